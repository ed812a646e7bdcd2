"""Decoherence coefficients and sector quadratic forms of the superpropagator.

The superpropagator factorizes into a center-of-mass sector over
``(r, chi, r', chi')`` and a relative sector over ``(u, v, u', v')``.
Primed variables are the initial ones; ``chi`` and ``v`` are the
ket-minus-bra differences. Each sector contributes

    exp( i * w^T P w  -  w^T R w ),   w = (a, b, a', b')

where ``P`` (``imag_form``) holds the classical-action phase and ``R``
(``real_form``) the noise coefficients. Both are symmetric, so an
off-diagonal entry carries half of the corresponding bilinear coefficient.

Every sector is a damped oscillator with rate ``g`` and frequency squared
``w2``; the hyperbolic functions take the argument ``Gamma*x/2`` with
``Gamma = sqrt(g^2 - 4*w2)``, a complex principal root. For an underdamped
sector ``Gamma`` is imaginary and ``sinh(Gamma*t/2)`` vanishes at the
caustic times ``t = 2*pi*k/|Gamma|``, where the boundary-value form does
not exist; :class:`CausticError` is raised there.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .bath import derive_params, safe_t_min
from .errors import DegenerateTimeError, NumericalError
from .quadrature import QuadratureConfig, gauss_legendre_panels, panels_for

CM = "CM"
REL = "REL"

# relative size of Im(coefficient) tolerated before declaring a numerical error
IMAG_RESIDUE_TOL = 1e-10
# |sinh(Gamma t/2)| / (|Gamma| t/2) below this counts as a caustic
CAUSTIC_TOL = 1e-9


class CausticError(NumericalError):
    """``sinh(Gamma t/2)`` vanishes: the sector form is singular at this time."""


@dataclass(frozen=True)
class SectorCoefficients:
    A: float
    B: float
    C: float
    sector: str
    t: float


@dataclass(frozen=True)
class SectorForm:
    """Quadratic exponent of one sector at time ``t`` (normalization excluded)."""

    imag_form: np.ndarray
    real_form: np.ndarray
    sector: str
    t: float
    is_identity: bool = False

    @classmethod
    def identity(cls, sector, t=0.0):
        """Placeholder for ``t < t_min``: the propagator acts as the identity."""
        zero = np.zeros((4, 4))
        return cls(imag_form=zero, real_form=zero, sector=sector, t=t, is_identity=True)

    @property
    def exponent_matrix(self):
        """Complex ``M`` with the form written as ``exp(-w^T M w)``."""
        return self.real_form - 1j * self.imag_form


@dataclass(frozen=True)
class SectorRates:
    noise_prefactor: float  # eta/pi (CM) or eta/(4 pi) (REL)
    g: float
    gamma_root: complex  # sqrt(g^2 - 4 w2)


def sector_rates(sector, spec):
    p = derive_params(spec)
    if sector == CM:
        return SectorRates(spec.eta / math.pi, p.gamma_plus, complex(p.gamma_plus))
    if sector == REL:
        root = cmath.sqrt(complex(p.gamma_minus**2 - 4.0 * p.omega_t_sq))
        return SectorRates(spec.eta / (4.0 * math.pi), p.gamma_minus, root)
    raise ValueError(f"unknown sector {sector!r}")


def _sinhc(z):
    # sinh(z)/z for complex z, finite at 0
    return np.sinc(1j * np.asarray(z) / np.pi)


def _check_caustic(root, t, sector):
    half = 0.5 * root * t
    if abs(half) > 0 and abs(np.sinh(half)) < CAUSTIC_TOL * min(1.0, abs(half)):
        raise CausticError(
            f"{sector} sector form is singular (caustic)",
            t=t,
            diagnostics={"gamma_root": root},
        )


def _sinh_ratio(x, t, root):
    """``sinh(root*x/2) / sinh(root*t/2)`` for ``0 <= x <= t``, overflow-free."""
    x = np.asarray(x, dtype=float)
    if abs(root) * t <= 1.0:
        return (x / t) * _sinhc(0.5 * root * x) / _sinhc(0.5 * root * t)
    return np.exp(0.5 * root * (x - t)) * np.expm1(-root * x) / np.expm1(-root * t)


def classical_weights(x, t, rates):
    """Coefficients of ``b`` and ``b'`` in the classical difference path ``b(x)``.

    ``b(x) = w_final(x) * b + w_initial(x) * b'`` solves the adjoint
    (anti-damped) equation with ``b(0) = b'`` and ``b(t) = b``.
    """
    g, root = rates.g, rates.gamma_root
    w_final = np.exp(0.5 * g * (np.asarray(x) - t)) * _sinh_ratio(x, t, root)
    if abs(root) * t <= 1.0:
        w_initial = np.exp(0.5 * g * np.asarray(x)) * _sinh_ratio(t - np.asarray(x), t, root)
    else:
        # e^{g x/2} sinh(root (t-x)/2)/sinh(root t/2) with the exponentials merged
        xx = np.asarray(x, dtype=float)
        w_initial = np.exp(0.5 * (g - root) * xx) * np.expm1(-root * (t - xx)) / np.expm1(-root * t)
    return w_final, w_initial


def _max_rate(spec):
    p = derive_params(spec)
    rel = sector_rates(REL, spec)
    return max(spec.omega_cutoff, p.gamma_plus, p.gamma_minus, abs(rel.gamma_root), p.omega0)


def _time_rule(t, spec, quad):
    n = panels_for(t, _max_rate(spec), quad.time_panels)
    return gauss_legendre_panels(0.0, t, n)


def kernel_matrix(nodes, table):
    """``K(tau_i - s_j)`` on a node set, filled from the upper triangle."""
    n = nodes.size
    iu = np.triu_indices(n)
    out = np.empty((n, n))
    vals = table(nodes[iu[0]] - nodes[iu[1]])
    out[iu] = vals
    out[(iu[1], iu[0])] = vals
    return out


def _quadratic(kmat, left, right):
    # fixed-order reduction, independent of BLAS threading
    inner = (kmat * right[None, :]).sum(axis=1)
    return complex((left * inner).sum())


def _check_t(t, spec, quad):
    t_min = quad.t_min if quad.t_min is not None else safe_t_min(spec)
    if not t >= t_min:
        raise DegenerateTimeError(f"propagation time below t_min={t_min:.3g}", t=t)
    return t_min


def _coefficients_on_grid(t, sector, spec, nodes, weights, kmat):
    rates = sector_rates(sector, spec)
    _check_caustic(rates.gamma_root, t, sector)
    w_final, w_initial = classical_weights(nodes, t, rates)
    u = weights * w_final
    v = weights * w_initial
    a = rates.noise_prefactor * _quadratic(kmat, u, u)
    b = 2.0 * rates.noise_prefactor * _quadratic(kmat, u, v)
    c = rates.noise_prefactor * _quadratic(kmat, v, v)
    scale = abs(a) + abs(b) + abs(c)
    residue = max(abs(a.imag), abs(b.imag), abs(c.imag))
    if not np.isfinite(scale) or residue > IMAG_RESIDUE_TOL * max(scale, 1e-300):
        raise NumericalError(
            f"{sector} coefficients are not real",
            t=t,
            diagnostics={"A": a, "B": b, "C": c},
        )
    return SectorCoefficients(A=a.real, B=b.real, C=c.real, sector=sector, t=t)


def _grid(t, spec, table, quad):
    if table.t_max < t * (1 - 1e-12):
        raise NumericalError(f"kernel table covers up to {table.t_max}, need {t}", t=t)
    nodes, weights = _time_rule(t, spec, quad)
    return nodes, weights, kernel_matrix(nodes, table)


def coefficients_cm(t, spec, table, quad=None):
    """``A_chi, B_chi, C_chi`` at time ``t`` (without the ``1 + D`` factor)."""
    quad = quad or QuadratureConfig()
    _check_t(t, spec, quad)
    return _coefficients_on_grid(t, CM, spec, *_grid(t, spec, table, quad))


def coefficients_rel(t, spec, table, quad=None):
    """``A_v, B_v, C_v`` at time ``t`` (without the ``1 - D`` factor)."""
    quad = quad or QuadratureConfig()
    _check_t(t, spec, quad)
    return _coefficients_on_grid(t, REL, spec, *_grid(t, spec, table, quad))


def _stable_hyperbolics(root, g, t):
    """``root e^{-g t/2}/sinh``, ``root e^{g t/2}/sinh`` and ``root coth`` at ``root*t/2``."""
    if abs(root) * t <= 1.0:
        half = 0.5 * root * t
        inv = 2.0 / (t * _sinhc(half))  # root / sinh(root t/2)
        return inv * np.exp(-0.5 * g * t), inv * np.exp(0.5 * g * t), inv * np.cosh(half)
    em = np.expm1(-root * t)
    d_minus = -2.0 * root * np.exp(-0.5 * (g + root) * t) / em
    d_plus = -2.0 * root * np.exp(0.5 * (g - root) * t) / em
    coth = -root * (2.0 + em) / em
    return d_minus, d_plus, coth


def _real(value, what, t):
    value = complex(value)
    if abs(value.imag) > IMAG_RESIDUE_TOL * max(abs(value), 1e-300):
        raise NumericalError(f"{what} is not real", t=t, diagnostics={what: value})
    return value.real


def _bilinear_form(coeffs):
    """Symmetric 4x4 from bilinear coefficients keyed by index pairs."""
    m = np.zeros((4, 4))
    for (i, j), c in coeffs.items():
        if i == j:
            m[i, i] += c
        else:
            m[i, j] += 0.5 * c
            m[j, i] += 0.5 * c
    return m


def _noise_form(factor, coeffs):
    m = np.zeros((4, 4))
    m[1, 1] = factor * coeffs.A
    m[3, 3] = factor * coeffs.C
    m[1, 3] = m[3, 1] = 0.5 * factor * coeffs.B
    return m


def cm_phase(t, spec):
    """Center-of-mass phase matrix over ``(r, chi, r', chi')``, boundary term included."""
    p = derive_params(spec)
    M, eta, gp = spec.mass_M, spec.eta, p.gamma_plus
    d_minus, d_plus, _ = _stable_hyperbolics(complex(gp), gp, t)
    d_minus, d_plus = _real(d_minus, "CM phase", t), _real(d_plus, "CM phase", t)
    # boundary term eta*(r'chi' - r chi); bracket -M/sinh{gp (r'-r)(chi e^- - chi' e^+) - gamma (r chi - r'chi') sinh}
    return _bilinear_form(
        {
            (0, 1): -eta + M * d_minus + M * p.gamma,
            (2, 3): eta + M * d_plus - M * p.gamma,
            (2, 1): -M * d_minus,
            (0, 3): -M * d_plus,
        }
    )


def rel_phase(t, spec):
    """Relative-sector phase matrix over ``(u, v, u', v')``, boundary term included."""
    p = derive_params(spec)
    M, eta, D, gm = spec.mass_M, spec.eta, p.D, p.gamma_minus
    root = sector_rates(REL, spec).gamma_root
    _check_caustic(root, t, REL)
    d_minus, d_plus, coth = (
        _real(x, "REL phase", t) for x in _stable_hyperbolics(root, gm, t)
    )
    q = M / 4.0
    boundary = eta / 4.0 - eta * D / 2.0  # multiplies (u'v' - u v)
    return _bilinear_form(
        {
            (0, 1): q * (gm - p.gamma) + q * coth - boundary,
            (2, 3): -q * (gm - p.gamma) + q * coth + boundary,
            (2, 1): -q * d_minus,
            (0, 3): -q * d_plus,
        }
    )


def _form(sector, t, spec, coeffs):
    D = derive_params(spec).D
    if sector == CM:
        return SectorForm(cm_phase(t, spec), _noise_form(1.0 + D, coeffs), CM, t)
    return SectorForm(rel_phase(t, spec), _noise_form(1.0 - D, coeffs), REL, t)


def sector_form_cm(t, spec, table, quad=None):
    quad = quad or QuadratureConfig()
    return _form(CM, t, spec, coefficients_cm(t, spec, table, quad))


def sector_form_rel(t, spec, table, quad=None):
    quad = quad or QuadratureConfig()
    return _form(REL, t, spec, coefficients_rel(t, spec, table, quad))


def sector_forms(t, spec, table, quad=None):
    """Both sector forms at ``t`` sharing one kernel matrix.

    Returns identity forms below ``t_min``. Values are identical to
    :func:`sector_form_cm` and :func:`sector_form_rel`.
    """
    quad = quad or QuadratureConfig()
    t_min = quad.t_min if quad.t_min is not None else safe_t_min(spec)
    if t < t_min:
        return SectorForm.identity(CM, t), SectorForm.identity(REL, t)
    grid = _grid(t, spec, table, quad)
    cm = _coefficients_on_grid(t, CM, spec, *grid)
    rel = _coefficients_on_grid(t, REL, spec, *grid)
    return _form(CM, t, spec, cm), _form(REL, t, spec, rel)
