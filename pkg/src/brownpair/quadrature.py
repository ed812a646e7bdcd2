"""Composite Gauss-Legendre rules and the quadrature settings object."""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError

NODES_PER_PANEL = 10


@dataclass(frozen=True)
class QuadratureConfig:
    """Deterministic quadrature settings.

    ``omega_panels`` and ``time_panels`` are panel densities: the number of
    Gauss-Legendre panels per oscillation period of the fastest integrand
    oscillation on the respective axis. Each panel carries
    ``NODES_PER_PANEL`` nodes, so the default of 2 panels gives 20 nodes
    per period. ``kernel_samples`` is the number of kernel-table samples per
    cutoff period ``2*pi/omega_cutoff``.

    ``t_min`` of ``None`` means "use the safe floor derived from the bath".
    """

    omega_panels: int = 2
    time_panels: int = 2
    t_min: float | None = None
    tol: float = 1e-6
    kernel_samples: int = 128

    def __post_init__(self):
        for name in ("omega_panels", "time_panels", "kernel_samples"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")
        if self.t_min is not None and not self.t_min > 0:
            raise DomainError(f"t_min must be positive, got {self.t_min!r}")
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol!r}")

    def refined(self, factor=2):
        """Same settings with every panel/sample density multiplied by ``factor``."""
        return QuadratureConfig(
            omega_panels=self.omega_panels * factor,
            time_panels=self.time_panels * factor,
            t_min=self.t_min,
            tol=self.tol,
            kernel_samples=self.kernel_samples * factor,
        )


@lru_cache(maxsize=32)
def _reference_rule(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_panels(a, b, n_panels, n_nodes=NODES_PER_PANEL):
    """Nodes and weights of a composite Gauss-Legendre rule on ``[a, b]``.

    The interval is split into ``n_panels`` equal panels with ``n_nodes``
    nodes each. Nodes are returned in increasing order.
    """
    if n_panels < 1:
        raise DomainError("n_panels must be >= 1")
    x, w = _reference_rule(n_nodes)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def panels_for(length, frequency, density):
    """Panel count resolving ``frequency`` over ``length`` at ``density`` panels per period."""
    periods = abs(length) * frequency / (2.0 * math.pi)
    return max(int(density), int(math.ceil(density * periods)))
