"""Exact Gaussian propagation of the two-particle state.

A sector density matrix is stored as ``rho(a, b) = exp(log_norm - (a, b) Q (a, b)^T)``
with ``a`` the mean of ket and bra coordinates and ``b`` their difference
(ket minus bra). Center of mass: ``a = r``, ``b = chi`` (mass 2M). Relative
coordinate: ``a = u``, ``b = v`` (mass M/2). First moments vanish throughout.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .bath import build_kernel_table, derive_params, safe_t_min
from .errors import DomainError, InvalidPropagationError, NumericalError
from .propagator import CM, REL, CausticError, SectorForm, sector_forms
from .quadrature import QuadratureConfig

# Hermiticity residues above this fraction of |Q| are reported as errors
HERMITICITY_TOL = 1e-8

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
J4 = np.kron(np.eye(2), J2)

# (R, P_R, U, P_U) -> (x1, p1, x2, p2) with R = (x1+x2)/2, P_R = p1+p2,
# U = x1-x2, P_U = (p1-p2)/2
SECTOR_TO_PARTICLES = np.array(
    [
        [1.0, 0.0, 0.5, 0.0],
        [0.0, 0.5, 0.0, 1.0],
        [1.0, 0.0, -0.5, 0.0],
        [0.0, 0.5, 0.0, -1.0],
    ]
)

if not np.allclose(SECTOR_TO_PARTICLES @ J4 @ SECTOR_TO_PARTICLES.T, J4, rtol=0, atol=1e-15):
    raise RuntimeError("sector-to-particle map is not symplectic")


@dataclass(frozen=True)
class InitialStateSpec:
    z: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0 or math.isinf(self.sigma):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma!r}")
        if not math.isfinite(self.z):
            raise DomainError(f"z must be finite, got {self.z!r}")


@dataclass(frozen=True)
class SectorState:
    exponent: np.ndarray  # complex symmetric 2x2
    log_norm: float
    sector: str


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetrized second moments in the ordering ``(x1, p1, x2, p2)``."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (4, 4):
            raise DomainError(f"covariance must be 4x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("covariance has non-finite entries")
        if not np.allclose(m, m.T, rtol=1e-12, atol=1e-14 * np.abs(m).max()):
            raise DomainError("covariance must be symmetric")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def A(self):
        return self.entries[:2, :2]

    @property
    def B(self):
        return self.entries[2:, 2:]

    @property
    def C(self):
        return self.entries[:2, 2:]


def initial_sectors(init):
    """Sector states of the two-mode squeezed initial density matrix."""
    s2 = init.sigma**2
    e_minus, e_plus = math.exp(-2.0 * init.z), math.exp(2.0 * init.z)
    cm = np.diag([e_minus / s2, e_minus / (4.0 * s2)]).astype(complex)
    rel = np.diag([e_plus / (4.0 * s2), e_plus / (16.0 * s2)]).astype(complex)
    return _normalized(cm, CM), _normalized(rel, REL)


def _normalized(q, sector, t=None):
    q = 0.5 * (q + q.T)
    scale = np.abs(q).max()
    residue = max(abs(q[0, 0].imag), abs(q[1, 1].imag), abs(q[0, 1].real))
    if residue > HERMITICITY_TOL * scale:
        raise NumericalError(
            f"{sector} density matrix lost hermiticity", t=t, diagnostics={"Q": q}
        )
    q = np.array(
        [[q[0, 0].real, 1j * q[0, 1].imag], [1j * q[0, 1].imag, q[1, 1].real]], dtype=complex
    )
    if not (q[0, 0].real > 0 and q[1, 1].real > 0):
        raise NumericalError(f"{sector} state is not normalizable", t=t, diagnostics={"Q": q})
    # trace = int rho(a, 0) da = exp(log_norm) sqrt(pi / Q_aa) = 1
    log_norm = -0.5 * math.log(math.pi / q[0, 0].real)
    q.setflags(write=False)
    return SectorState(exponent=q, log_norm=log_norm, sector=sector)


def propagate_sector(state0, form):
    """Integrate the sector form against the initial Gaussian over ``(a', b')``.

    The primed block is eliminated by a Schur complement; the result is
    renormalized to unit trace.
    """
    if form.is_identity:
        return state0
    if state0.sector != form.sector:
        raise DomainError(f"sector mismatch: state {state0.sector}, form {form.sector}")
    m = form.exponent_matrix
    m_ff, m_fi, m_if = m[:2, :2], m[:2, 2:], m[2:, :2]
    g = m[2:, 2:] + state0.exponent
    eig = np.linalg.eigvalsh(g.real)
    if eig[0] <= 0:
        raise InvalidPropagationError(
            f"{form.sector} initial-variable form is not positive definite",
            t=form.t,
            diagnostics={"min_eigenvalue": float(eig[0])},
        )
    q = m_ff - m_fi @ np.linalg.solve(g, m_if)
    return _normalized(q, form.sector, t=form.t)


def sector_covariance(state):
    """``[[<a^2>, <a p>_sym], [<a p>_sym, <p^2>]]`` of a sector state.

    The momentum marginal follows from Fourier transforming over the
    difference coordinate: ``p`` is Gaussian around ``-2 Im(Q_ab) a`` with
    variance ``2 Q_bb``.
    """
    q = state.exponent
    q_aa, q_bb, kappa = q[0, 0].real, q[1, 1].real, q[0, 1].imag
    if not (q_aa > 0 and q_bb > 0):
        raise NumericalError(f"{state.sector} state is not normalizable")
    var_a = 1.0 / (2.0 * q_aa)
    cov = -2.0 * kappa * var_a
    var_p = 4.0 * kappa**2 * var_a + 2.0 * q_bb
    return np.array([[var_a, cov], [cov, var_p]])


def assemble_covariance(cm_cov, rel_cov):
    """Particle covariance from the sector covariances via the canonical map."""
    cm_cov, rel_cov = np.asarray(cm_cov, dtype=float), np.asarray(rel_cov, dtype=float)
    for name, c in (("cm_cov", cm_cov), ("rel_cov", rel_cov)):
        if c.shape != (2, 2) or not np.all(np.isfinite(c)):
            raise DomainError(f"{name} must be a finite 2x2 matrix")
    sigma = np.zeros((4, 4))
    sigma[:2, :2] = cm_cov
    sigma[2:, 2:] = rel_cov
    s = SECTOR_TO_PARTICLES
    return CovarianceMatrix(s @ sigma @ s.T)


def free_symplectic(t, mass):
    """Single-particle free flight ``x -> x + p t / m`` in ``(x1, p1, x2, p2)``."""
    one = np.array([[1.0, t / mass], [0.0, 1.0]])
    return np.kron(np.eye(2), one)


def _state_at(t, init_states, spec, table, quad):
    cm0, rel0 = init_states
    forms = sector_forms(t, spec, table, quad)
    cm = propagate_sector(cm0, forms[0])
    rel = propagate_sector(rel0, forms[1])
    return assemble_covariance(sector_covariance(cm), sector_covariance(rel))


def caustic_period(spec):
    """Spacing of the relative-sector caustic times, or ``None`` if overdamped."""
    p = derive_params(spec)
    disc = p.gamma_minus**2 - 4.0 * p.omega_t_sq
    if disc >= 0:
        return None
    return 2.0 * math.pi / math.sqrt(-disc)


def _near_caustic(t, spec, init_states, table, quad):
    # The physical state is smooth in t; rebuild it from four regular
    # neighbours with cubic Lagrange interpolation.
    period = caustic_period(spec)
    h = 1e-3 * period
    offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * h
    samples = [_state_at(t + dt, init_states, spec, table, quad).entries for dt in offsets]
    weights = [-1.0 / 6.0, 2.0 / 3.0, 2.0 / 3.0, -1.0 / 6.0]
    return CovarianceMatrix(sum(w * s for w, s in zip(weights, samples)))


def evolve(init, spec, t_grid, quad=None, table=None, workers=1):
    """Covariance matrices at every time of ``t_grid``, each propagated from t = 0.

    ``workers`` > 1 evaluates times on a thread pool; results do not depend
    on it.
    """
    quad = quad or QuadratureConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise DomainError("t_grid must be a non-empty 1-d sequence")
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) < 0):
        raise DomainError("t_grid must be ascending and non-negative")
    t_top = float(t_grid[-1])
    if caustic_period(spec) is not None:
        t_top += 2.5e-3 * caustic_period(spec)
    if table is None and t_top > 0:
        table = build_kernel_table(t_top, None, spec, quad)
    init_states = initial_sectors(init)
    t_min = quad.t_min if quad.t_min is not None else safe_t_min(spec)

    def one(t):
        if t < t_min:
            return assemble_covariance(
                sector_covariance(init_states[0]), sector_covariance(init_states[1])
            )
        try:
            return _state_at(t, init_states, spec, table, quad)
        except CausticError:
            return _near_caustic(t, spec, init_states, table, quad)
        except NumericalError as exc:
            if exc.t is None:
                exc.t = t
                exc.args = (f"t={t:.6g}: {exc.args[0]}",)
            raise

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, t_grid))
    return [one(t) for t in t_grid]


__all__ = [
    "CovarianceMatrix",
    "InitialStateSpec",
    "SectorForm",
    "SectorState",
    "assemble_covariance",
    "evolve",
    "free_symplectic",
    "initial_sectors",
    "propagate_sector",
    "sector_covariance",
]
