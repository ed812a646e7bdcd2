"""Symplectic spectra, partial transposition and logarithmic negativity.

Conventions: hbar = 1, quadrature ordering ``(x1, p1, x2, p2)``, vacuum
covariance ``I/2``, so physical states have symplectic eigenvalues >= 1/2.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, NumericalError
from .gaussian import J4, CovarianceMatrix

RADICAND_TOL = 1e-12
# relative disagreement between the eigenvalue and invariant routes
ROUTE_TOL = 1e-6

PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class EntanglementResult:
    sigma_minus_tilde: float
    sigma_plus_tilde: float
    E_N: float
    D_tilde: float
    dets: tuple  # (det A, det B, det C, det Lambda)
    min_symplectic: float


def _entries(cov):
    m = cov.entries if isinstance(cov, CovarianceMatrix) else np.asarray(cov, dtype=float)
    if m.shape != (4, 4):
        raise DomainError(f"expected a 4x4 covariance, got shape {m.shape}")
    return m


def invariants(cov):
    """``(det A, det B, det C, det Lambda)`` of the block decomposition."""
    m = _entries(cov)
    return (
        float(np.linalg.det(m[:2, :2])),
        float(np.linalg.det(m[2:, 2:])),
        float(np.linalg.det(m[:2, 2:])),
        float(np.linalg.det(m)),
    )


def partial_transpose(cov):
    """Covariance of the partially transposed state (``p2 -> -p2``)."""
    m = _entries(cov)
    return PARTIAL_TRANSPOSE @ m @ PARTIAL_TRANSPOSE


def symplectic_spectrum(matrix):
    """Symplectic eigenvalues ``(larger, smaller)`` from the spectrum of ``i J Lambda``."""
    m = np.asarray(matrix, dtype=float)
    ev = np.sort(np.abs(np.linalg.eigvals(1j * J4 @ m).real))
    # each modulus appears twice
    return float(0.5 * (ev[2] + ev[3])), float(0.5 * (ev[0] + ev[1]))


def _invariant_pair(delta, det_total):
    radicand = delta**2 - 4.0 * det_total
    if radicand < 0:
        if radicand < -RADICAND_TOL * max(1.0, delta**2):
            raise NumericalError(
                "symplectic invariants are inconsistent",
                diagnostics={"Delta": delta, "det": det_total, "radicand": radicand},
            )
        radicand = 0.0
    root = math.sqrt(radicand)
    return math.sqrt(0.5 * (delta + root)), math.sqrt(max(0.5 * (delta - root), 0.0))


def _require_positive(m):
    if np.linalg.eigvalsh(0.5 * (m + m.T))[0] <= 0:
        raise DomainError("covariance matrix must be positive definite")


def symplectic_eigenvalues(cov):
    """``(s_plus, s_minus)`` of ``Lambda``, checked against the invariant formula."""
    m = _entries(cov)
    _require_positive(m)
    s_plus, s_minus = symplectic_spectrum(m)
    det_a, det_b, det_c, det_total = invariants(m)
    f_plus, f_minus = _invariant_pair(det_a + det_b + 2.0 * det_c, det_total)
    if abs(f_plus - s_plus) > ROUTE_TOL * s_plus or abs(f_minus - s_minus) > ROUTE_TOL * s_plus:
        raise NumericalError(
            "symplectic eigenvalue routes disagree",
            diagnostics={"eig": (s_plus, s_minus), "invariant": (f_plus, f_minus)},
        )
    return s_plus, s_minus


def pt_symplectic_eigenvalues(cov):
    """Symplectic eigenvalues ``(plus, minus)`` of the partial transpose via
    ``D~ = det A + det B - 2 det C``."""
    m = _entries(cov)
    det_a, det_b, det_c, det_total = invariants(m)
    if det_total <= 0:
        raise DomainError(f"det Lambda must be positive, got {det_total}")
    return _invariant_pair(det_a + det_b - 2.0 * det_c, det_total)


def log_negativity(cov):
    _, s_minus = pt_symplectic_eigenvalues(cov)
    return max(0.0, -math.log(2.0 * s_minus))


def analyze(cov):
    """All entanglement diagnostics of one covariance matrix."""
    m = _entries(cov)
    dets = invariants(m)
    s_plus_t, s_minus_t = pt_symplectic_eigenvalues(m)
    _, s_minus = symplectic_eigenvalues(m)
    return EntanglementResult(
        sigma_minus_tilde=s_minus_t,
        sigma_plus_tilde=s_plus_t,
        E_N=max(0.0, -math.log(2.0 * s_minus_t)),
        D_tilde=dets[0] + dets[1] - 2.0 * dets[2],
        dets=dets,
        min_symplectic=s_minus,
    )


def _rotation(a):
    return np.array([[math.cos(a), math.sin(a)], [-math.sin(a), math.cos(a)]])


def _two_mode_mixer(theta, phi1, phi2):
    # local phase rotations followed by a beam splitter; both are passive
    c, s = math.cos(theta), math.sin(theta)
    local = np.zeros((4, 4))
    local[:2, :2], local[2:, 2:] = _rotation(phi1), _rotation(phi2)
    splitter = np.kron(np.array([[c, s], [-s, c]]), np.eye(2))
    return splitter @ local


def random_physical_covariance(rng, max_squeeze=1.0, max_excess=1.0):
    """A random valid two-mode covariance from a Williamson construction.

    Thermal symplectic eigenvalues ``1/2 + U(0, max_excess)`` are dressed by
    passive mixing, local squeezing up to ``max_squeeze`` and a second
    passive mixing.
    """
    nu = 0.5 + rng.uniform(0.0, max_excess, size=2)
    m = np.diag([nu[0], nu[0], nu[1], nu[1]])
    r = rng.uniform(-max_squeeze, max_squeeze, size=2)
    squeeze = np.diag([math.exp(r[0]), math.exp(-r[0]), math.exp(r[1]), math.exp(-r[1])])
    s = (
        _two_mode_mixer(*rng.uniform(0.0, 2.0 * math.pi, size=3))
        @ squeeze
        @ _two_mode_mixer(*rng.uniform(0.0, 2.0 * math.pi, size=3))
    )
    out = s @ m @ s.T
    return 0.5 * (out + out.T)
