"""Bath response: physical parameters and the thermal noise kernel.

Units are hbar = k_B = 1. The zero-temperature limit is requested with
``beta = math.inf``; coth is then replaced by 1 exactly.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, NumericalError
from .quadrature import QuadratureConfig, gauss_legendre_panels, panels_for

# Above beta*omega = 40 the thermal part of coth is below 1e-17.
_THERMAL_SPLIT = 40.0


@dataclass(frozen=True)
class BathSpec:
    """Physical inputs of the two-particle model.

    eta: damping coefficient, mass_M: particle mass, omega_cutoff: bath
    cutoff frequency, beta: inverse temperature (``math.inf`` for T = 0),
    k0L: dimensionless distance between the particles' regions.
    """

    eta: float
    mass_M: float
    omega_cutoff: float
    beta: float
    k0L: float

    def __post_init__(self):
        for name in ("eta", "mass_M", "omega_cutoff", "beta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0) or math.isnan(value):
                raise DomainError(f"{name} must be positive, got {value!r}")
            if name != "beta" and math.isinf(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not (self.k0L >= 0) or math.isinf(self.k0L):
            raise DomainError(f"k0L must be finite and >= 0, got {self.k0L!r}")

    @property
    def zero_temperature(self):
        return math.isinf(self.beta)

    def replace(self, **changes):
        values = {k: getattr(self, k) for k in ("eta", "mass_M", "omega_cutoff", "beta", "k0L")}
        values.update(changes)
        return BathSpec(**values)


@dataclass(frozen=True)
class DerivedParams:
    D: float
    gamma: float
    gamma_plus: float
    gamma_minus: float
    omega0_sq: float
    omega_t_sq: float

    @property
    def omega0(self):
        return math.sqrt(self.omega0_sq)


def coupling_attenuation(k0L):
    """Distance attenuation ``exp(-k0L)`` of the bath-mediated coupling."""
    if not k0L >= 0:
        raise DomainError(f"k0L must be >= 0, got {k0L!r}")
    return math.exp(-k0L)


def derive_params(spec):
    """Rates and frequencies entering the superpropagator.

    The relaxation rate is taken as ``gamma = eta / M``.
    """
    D = coupling_attenuation(spec.k0L)
    gamma = spec.eta / spec.mass_M
    omega0_sq = 4.0 * spec.omega_cutoff * spec.eta / (spec.mass_M * math.pi)
    return DerivedParams(
        D=D,
        gamma=gamma,
        gamma_plus=gamma * (1.0 + D),
        gamma_minus=gamma * (1.0 - D),
        omega0_sq=omega0_sq,
        omega_t_sq=omega0_sq * D,
    )


def safe_t_min(spec):
    """Smallest propagation time that is evaluated rather than treated as identity."""
    p = derive_params(spec)
    return 1e-3 / max(p.gamma_plus, p.omega0, spec.omega_cutoff)


def _omega_coth(omega, beta):
    omega = np.asarray(omega, dtype=float)
    if math.isinf(beta):
        return omega.copy()
    x = 0.5 * beta * omega
    out = np.empty_like(omega)
    small = np.abs(x) < 1e-3
    xs = x[small]
    # x*coth(x) = 1 + x^2/3 - x^4/45 + 2x^6/945
    out[small] = (2.0 / beta) * (1.0 + xs**2 / 3.0 - xs**4 / 45.0 + 2.0 * xs**6 / 945.0)
    xl = x[~small]
    out[~small] = omega[~small] / np.tanh(xl)
    return out


def spectral_weight(omega, spec):
    """``omega * coth(beta*omega/2)`` on ``0 <= omega <= cutoff``.

    The omega -> 0 value is the finite limit ``2/beta``.
    """
    arr = np.asarray(omega, dtype=float)
    if np.any(arr < 0) or np.any(arr > spec.omega_cutoff * (1 + 1e-12)):
        raise DomainError(
            f"spectral weight is defined on [0, {spec.omega_cutoff}], got {omega!r}"
        )
    out = _omega_coth(arr, spec.beta)
    return float(out) if out.ndim == 0 else out


def _omega_segments(spec):
    cutoff = spec.omega_cutoff
    if spec.zero_temperature:
        return [(0.0, cutoff, 0.0)]
    split = min(cutoff, _THERMAL_SPLIT / spec.beta)
    segments = [(0.0, split, spec.beta)]
    if split < cutoff:
        segments.append((split, cutoff, 0.0))
    return segments


def _segment_panels(spec, tau_abs, density):
    counts = []
    for lo, hi, beta in _omega_segments(spec):
        n = panels_for(hi - lo, tau_abs, density)
        if beta:
            # panel width at most the distance 2*pi/beta to the nearest coth pole
            n = max(n, panels_for(hi - lo, beta, density))
        counts.append(n)
    return tuple(counts)


def _omega_rule(spec, counts):
    nodes, weights = [], []
    for (lo, hi, _), n in zip(_omega_segments(spec), counts):
        x, w = gauss_legendre_panels(lo, hi, n)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def thermal_kernel(tau, spec, quad=None):
    """Noise kernel ``K(tau) = int_0^cutoff w coth(beta w/2) cos(w tau) dw``.

    Accepts a scalar or an array of times; the result is even in ``tau``.
    Times sharing a panel layout (set by ``|tau|``) are evaluated as one
    block, so a value never depends on which other times were requested.
    """
    quad = quad or QuadratureConfig()
    tau_arr = np.abs(np.asarray(tau, dtype=float))
    flat = tau_arr.ravel()
    out = np.empty_like(flat)
    groups = {}
    for i, t in enumerate(flat):
        groups.setdefault(_segment_panels(spec, t, quad.omega_panels), []).append(i)
    for counts, idx in groups.items():
        nodes, weights = _omega_rule(spec, counts)
        weighted = _omega_coth(nodes, spec.beta) * weights
        for chunk in np.array_split(np.asarray(idx), max(1, len(idx) // 512)):
            out[chunk] = (np.cos(np.outer(flat[chunk], nodes)) * weighted).sum(axis=1)
    if not np.all(np.isfinite(out)):
        bad = flat[~np.isfinite(out)]
        raise NumericalError(
            "thermal kernel is not finite",
            diagnostics={"tau": bad.tolist(), "beta": spec.beta, "cutoff": spec.omega_cutoff},
        )
    out = out.reshape(tau_arr.shape)
    return float(out) if out.ndim == 0 else out


def kernel_closed_form_zero_t(tau, cutoff):
    """``int_0^cutoff w cos(w tau) dw`` in closed form (T = 0 reference)."""
    tau = np.abs(np.asarray(tau, dtype=float))
    x = cutoff * tau
    out = np.empty_like(x)
    small = x < 0.1  # series error below 1e-13 here; direct form cancels below
    xs = x[small]
    # (cos x + x sin x - 1)/x^2 = 1/2 - x^2/8 + x^4/144 - x^6/5760 + ...
    out[small] = cutoff**2 * (0.5 - xs**2 / 8 + xs**4 / 144 - xs**6 / 5760)
    xl, tl = x[~small], tau[~small]
    out[~small] = (np.cos(xl) + xl * np.sin(xl) - 1.0) / tl**2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelTable:
    """Samples of ``K`` on a uniform grid over ``[0, t_max]`` with a cubic spline.

    Lookups use ``|tau|``; the spline is clamped with ``K'(0) = 0``.
    """

    t_max: float
    tau: np.ndarray
    values: np.ndarray
    spline: CubicSpline = field(repr=False)

    def __call__(self, tau):
        tau = np.abs(np.asarray(tau, dtype=float))
        if np.any(tau > self.t_max * (1 + 1e-12)):
            raise DomainError(f"kernel table covers |tau| <= {self.t_max}, got {tau.max()}")
        out = self.spline(tau)
        return float(out) if out.ndim == 0 else out


def default_kernel_samples(t_max, spec, quad):
    periods = t_max * spec.omega_cutoff / (2.0 * math.pi)
    return max(64, int(math.ceil(quad.kernel_samples * periods)) + 1)


def build_kernel_table(t_max, n_samples=None, spec=None, quad=None):
    """Tabulate the thermal kernel on ``[0, t_max]``."""
    if spec is None:
        raise DomainError("a BathSpec is required")
    quad = quad or QuadratureConfig()
    if not t_max > 0:
        raise DomainError(f"t_max must be positive, got {t_max!r}")
    if n_samples is None:
        n_samples = default_kernel_samples(t_max, spec, quad)
    if n_samples < 2:
        raise DomainError(f"n_samples must be >= 2, got {n_samples!r}")
    tau = np.linspace(0.0, t_max, int(n_samples))
    values = thermal_kernel(tau, spec, quad)
    spline = CubicSpline(tau, values, bc_type=((1, 0.0), "not-a-knot"))
    tau.setflags(write=False)
    values.setflags(write=False)
    return KernelTable(t_max=float(t_max), tau=tau, values=values, spline=spline)
