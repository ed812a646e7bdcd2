"""Scenario configs, time-series runs, parameter sweeps and the command line.

Config files are flat ``key = value`` text; ``#`` starts a comment. Unknown
or repeated keys are errors, so a typo never silently falls back to a
default. Example::

    eta = 0.1
    mass_M = 1
    omega_cutoff = 5
    beta = inf        # zero temperature
    k0L = 1
    z = 0
    sigma = 2
    t_max = 40
    n_times = 200
"""

import argparse
import csv
from dataclasses import dataclass, field, replace
import io
import math
import os
from pathlib import Path
import sys

import numpy as np
from scipy.integrate import trapezoid

from . import propagator
from .bath import (
    BathSpec,
    build_kernel_table,
    kernel_closed_form_zero_t,
    safe_t_min,
    thermal_kernel,
)
from .entanglement import (
    analyze,
    pt_symplectic_eigenvalues,
    random_physical_covariance,
    symplectic_spectrum,
)
from .errors import BrownPairError, ConfigError, NumericalError
from .gaussian import J4, SECTOR_TO_PARTICLES, InitialStateSpec, evolve
from .quadrature import QuadratureConfig

THREADS_ENV = "BROWNPAIR_THREADS"

COLUMNS = (
    "t",
    "E_N",
    "sigma_minus_tilde",
    "sigma_plus_tilde",
    "det_Lambda",
    "purity",
    "min_symplectic",
    "detA",
    "detB",
    "detC",
)
SUMMARY_COLUMNS = ("delay_time", "max_E_N", "asymptotic_E_N", "extinction_time", "mean_E_N")
SWEEP_AXES = ("z", "beta", "eta", "k0L")

# E_N above this counts as entangled when locating delay and revival times
ENTANGLEMENT_THRESHOLD = 1e-3
# fraction of the time grid averaged for the asymptotic estimate
ASYMPTOTIC_TAIL = 0.2
PHYSICALITY_TOL = 1e-6
PURE_DET_TOL = 1e-8

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _float(text):
    return float(text)


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError("not an integer")
    return int(value)


def _positive(x):
    return x > 0 and math.isfinite(x)


# key -> (parser, validity predicate, requirement shown in errors)
_KEYS = {
    "eta": (_float, _positive, "positive and finite"),
    "mass_M": (_float, _positive, "positive and finite"),
    "omega_cutoff": (_float, _positive, "positive and finite"),
    "beta": (_float, lambda x: x > 0, "positive (inf for zero temperature)"),
    "k0L": (_float, lambda x: x >= 0 and math.isfinite(x), "finite and >= 0"),
    "z": (_float, math.isfinite, "finite"),
    "sigma": (_float, _positive, "positive and finite"),
    "t_max": (_float, _positive, "positive and finite"),
    "n_times": (_int, lambda n: n >= 2, "an integer >= 2"),
    "omega_panels": (_int, lambda n: n >= 1, "a positive integer"),
    "time_panels": (_int, lambda n: n >= 1, "a positive integer"),
    "kernel_samples": (_int, lambda n: n >= 1, "a positive integer"),
    "t_min": (_float, _positive, "positive and finite"),
    "tol": (_float, _positive, "positive and finite"),
    "sweep_axis": (str, lambda s: s in SWEEP_AXES, "one of " + ", ".join(SWEEP_AXES)),
    "sweep_values": (lambda s: tuple(float(v) for v in s.split(",")), bool, "a comma-separated list"),
    "output_path": (str, bool, "a non-empty path"),
    "slip_time": (_float, lambda x: x >= 0 and math.isfinite(x), "finite and >= 0"),
}
_REQUIRED = ("eta", "mass_M", "omega_cutoff", "beta", "k0L", "t_max", "n_times")
_BATH_KEYS = ("eta", "mass_M", "omega_cutoff", "beta", "k0L")


@dataclass(frozen=True)
class ScenarioConfig:
    bath: BathSpec
    init: InitialStateSpec
    t_max: float
    n_times: int
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    sweep_axis: str | None = None
    sweep_values: tuple = ()
    output_path: str | None = None
    slip_time: float = 0.0

    def times(self):
        return np.linspace(0.0, self.t_max, self.n_times)

    def with_value(self, axis, value):
        """The same scenario with one sweep axis set to ``value``."""
        if axis == "z":
            return replace(self, init=replace(self.init, z=value))
        return replace(self, bath=self.bath.replace(**{axis: value}))


def _check_t_min(quad, bath, context=""):
    if quad.t_min is not None and quad.t_min < safe_t_min(bath):
        raise ConfigError(
            f"t_min={quad.t_min!r} is below the safe floor {safe_t_min(bath):.3g}{context}",
            field="t_min",
        )


def parse_config(text):
    """Parse config text into a validated :class:`ScenarioConfig`."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r} on line {lineno}", field=key)
        if key in values:
            raise ConfigError(f"key {key!r} is given twice", field=key)
        parser, valid, requirement = _KEYS[key]
        try:
            parsed = parser(value)
        except ValueError:
            raise ConfigError(f"{key} must be {requirement}, got {value!r}", field=key) from None
        if not valid(parsed):
            raise ConfigError(f"{key} must be {requirement}, got {value!r}", field=key)
        values[key] = parsed
    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", field=key)

    bath = BathSpec(**{k: values[k] for k in _BATH_KEYS})
    init = InitialStateSpec(z=values.get("z", 0.0), sigma=values.get("sigma", 1.0))
    quad_fields = ("omega_panels", "time_panels", "kernel_samples", "t_min", "tol")
    quad = QuadratureConfig(**{k: values[k] for k in quad_fields if k in values})
    _check_t_min(quad, bath)

    axis, sweep = values.get("sweep_axis"), values.get("sweep_values", ())
    if sweep and axis is None:
        raise ConfigError("sweep_values given without sweep_axis", field="sweep_axis")
    if axis is not None and not sweep:
        raise ConfigError("sweep_axis given without sweep_values", field="sweep_values")
    cfg = ScenarioConfig(
        bath=bath,
        init=init,
        t_max=values["t_max"],
        n_times=values["n_times"],
        quad=quad,
        sweep_axis=axis,
        sweep_values=sweep,
        output_path=values.get("output_path"),
        slip_time=values.get("slip_time", 0.0),
    )
    for v in sweep:
        _, valid, requirement = _KEYS[axis]
        if not valid(v):
            raise ConfigError(f"sweep value {v!r} for {axis} must be {requirement}", field="sweep_values")
        _check_t_min(quad, cfg.with_value(axis, v).bath, context=f" at {axis}={v!r}")
    return cfg


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def worker_count():
    """Thread count from the environment; defaults to 1."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", field=THREADS_ENV)
    return n


@dataclass(frozen=True)
class ScenarioResult:
    """Time series of one scenario; ``data`` has one row per grid time in ``COLUMNS`` order."""

    config: ScenarioConfig
    data: np.ndarray

    def column(self, name):
        return self.data[:, COLUMNS.index(name)]

    def to_csv(self):
        return _csv_text(COLUMNS, self.data)


def _format(x):
    return repr(float(x))


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format(x) for x in row])
    return buf.getvalue()


def _row(t, cov):
    res = analyze(cov)
    det_a, det_b, det_c, det_total = res.dets
    if res.min_symplectic < 0.5 - PHYSICALITY_TOL or det_total < 1.0 / 16.0 - PURE_DET_TOL:
        raise NumericalError(
            f"unphysical state: min symplectic eigenvalue {res.min_symplectic:.9g}, "
            f"det Lambda {det_total:.9g}; widen the initial packet (sigma) or coarsen the grid",
            t=t,
            diagnostics={"covariance": cov.entries},
        )
    purity = 1.0 / (4.0 * math.sqrt(det_total))
    return (
        t,
        res.E_N,
        res.sigma_minus_tilde,
        res.sigma_plus_tilde,
        det_total,
        purity,
        res.min_symplectic,
        det_a,
        det_b,
        det_c,
    )


def run_scenario(cfg, workers=None):
    """Evolve the scenario over its time grid and tabulate the entanglement diagnostics.

    Rows failing the physicality bounds raise :class:`NumericalError`.
    """
    workers = worker_count() if workers is None else workers
    times = cfg.times()
    covs = evolve(cfg.init, cfg.bath, times, quad=cfg.quad, workers=workers)
    rows = []
    for t, cov in zip(times, covs):
        try:
            rows.append(_row(float(t), cov))
        except NumericalError as exc:
            if exc.t is None:
                exc.args = (f"t={t:.6g}: {exc.args[0]}",)
                exc.t = float(t)
            raise
    return ScenarioResult(config=cfg, data=np.array(rows))


def _first_time(times, mask):
    idx = np.flatnonzero(mask)
    return float(times[idx[0]]) if idx.size else math.inf


def summarize(result):
    """Delay (or revival), extremes and averages of one E_N time series.

    For a separable start (z = 0) the delay time is the first time E_N exceeds
    ``ENTANGLEMENT_THRESHOLD``. For an entangled start it is the revival time:
    the first such time after E_N has dropped to zero. Both searches skip
    ``t < slip_time``, which hides the brief transient caused by switching
    the bath coupling on at t = 0. The extinction time is the first zero of
    E_N after it was positive. Events not seen on the grid are ``inf``.
    """
    t, e = result.column("t"), result.column("E_N")
    entangled = (e > ENTANGLEMENT_THRESHOLD) & (t >= result.config.slip_time)
    if result.config.init.z == 0:
        delay = _first_time(t, entangled)
    else:
        zeros = np.flatnonzero(e <= 0)
        delay = math.inf
        if zeros.size:
            after = np.arange(t.size) > zeros[0]
            delay = _first_time(t, entangled & after)
    positive = np.flatnonzero(e > 0)
    extinction = math.inf
    if positive.size:
        later = np.arange(t.size) > positive[0]
        extinction = _first_time(t, (e <= 0) & later)
    tail = max(1, int(math.ceil(ASYMPTOTIC_TAIL * t.size)))
    span = t[-1] - t[0]
    mean = float(trapezoid(e, t) / span) if span > 0 else float(e.mean())
    return (delay, float(e.max()), float(e[-tail:].mean()), extinction, mean)


@dataclass(frozen=True)
class SweepResult:
    axis: str
    values: tuple
    runs: tuple
    summary: np.ndarray  # one row per value: (value, *SUMMARY_COLUMNS)

    def summary_csv(self):
        return _csv_text((self.axis,) + SUMMARY_COLUMNS, self.summary)

    def file_names(self):
        return [f"{self.axis}_{_format(v)}.csv" for v in self.values]


def run_sweep(cfg, workers=None):
    """Run the scenario once per sweep value, in the listed order."""
    if cfg.sweep_axis is None:
        raise ConfigError("sweep requires sweep_axis and sweep_values", field="sweep_axis")
    runs, summary = [], []
    for value in cfg.sweep_values:
        result = run_scenario(cfg.with_value(cfg.sweep_axis, value), workers=workers)
        runs.append(result)
        summary.append((value,) + summarize(result))
    return SweepResult(cfg.sweep_axis, tuple(cfg.sweep_values), tuple(runs), np.array(summary))


def write_text(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(text)


def write_sweep(result, directory):
    directory = Path(directory)
    for name, run in zip(result.file_names(), result.runs):
        write_text(directory / name, run.to_csv())
    write_text(directory / "summary.csv", result.summary_csv())


# --- self check -------------------------------------------------------------

REFERENCE_CONFIG = """\
# intermediate distance, zero temperature, separable start
eta = 0.1
mass_M = 1
omega_cutoff = 5
beta = inf
k0L = 1
z = 0
sigma = 2
t_max = 20
n_times = 41
"""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SelfCheckReport:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]


def _check_kernel_parity(cfg):
    tau = np.linspace(0.05, 10.0, 23)
    worst = 0.0
    for beta in (math.inf, 2.0):
        spec = cfg.bath.replace(beta=beta)
        worst = max(worst, float(np.abs(thermal_kernel(tau, spec) - thermal_kernel(-tau, spec)).max()))
    exact = kernel_closed_form_zero_t(tau, cfg.bath.omega_cutoff)
    rel = np.abs(thermal_kernel(tau, cfg.bath.replace(beta=math.inf)) - exact)
    rel_err = float((rel / np.maximum(np.abs(exact), 1e-300)).max())
    ok = worst == 0.0 and rel_err < 1e-8
    return CheckResult("kernel parity", ok, f"max |K(t)-K(-t)| = {worst:.3g}, T=0 closed-form rel err {rel_err:.3g}")


def _check_coefficients(cfg):
    t_values = np.linspace(0.5, cfg.t_max, 12)
    table = build_kernel_table(cfg.t_max, None, cfg.bath, cfg.quad)
    worst, where = -math.inf, ""
    for t in t_values:
        for name, fn in (("CM", propagator.coefficients_cm), ("REL", propagator.coefficients_rel)):
            try:
                c = fn(t, cfg.bath, table, cfg.quad)
            except propagator.CausticError:
                continue
            scale = max(abs(c.A) * abs(c.C), 1e-300)
            # positive means violated
            excess = max(-c.A, -c.C, (c.B**2 - 4.0 * c.A * c.C) / (4.0 * scale))
            if excess > worst:
                worst, where = excess, f"{name} at t={t:.4g}"
    ok = worst <= 1e-8
    return CheckResult("coefficient positivity", ok, f"worst A,C >= 0 / B^2 <= 4AC excess {worst:.3g} ({where})")


def _check_dual_route(n=200, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        m = random_physical_covariance(rng)
        pt = np.diag([1.0, 1.0, 1.0, -1.0])
        _, eig_minus = symplectic_spectrum(pt @ m @ pt)
        plus, inv_minus = pt_symplectic_eigenvalues(m)
        worst = max(worst, abs(eig_minus - inv_minus) / max(1.0, plus))
    return CheckResult("dual-route negativity", worst < 1e-10, f"max route disagreement {worst:.3g} over {n} states")


def _check_physicality(cfg, workers):
    try:
        result = run_scenario(cfg, workers=workers)
    except NumericalError as exc:
        return CheckResult("physicality", False, str(exc))
    smin = float(result.column("min_symplectic").min())
    dmin = float(result.column("det_Lambda").min())
    ok = smin >= 0.5 - PHYSICALITY_TOL and dmin >= 1.0 / 16.0 - PURE_DET_TOL
    return CheckResult("physicality", ok, f"min symplectic {smin:.12g}, min det Lambda {dmin:.12g}")


def _check_canonical_map():
    s = SECTOR_TO_PARTICLES
    err = float(np.abs(s @ J4 @ s.T - J4).max())
    return CheckResult("canonical map", err < 1e-15, f"symplectic residue {err:.3g}")


def self_check(workers=None):
    """Run the invariant suite on the built-in reference scenario."""
    cfg = parse_config(REFERENCE_CONFIG)
    workers = worker_count() if workers is None else workers
    checks = [
        _check_kernel_parity(cfg),
        _check_coefficients(cfg),
        _check_dual_route(),
        _check_canonical_map(),
        _check_physicality(cfg, workers),
    ]
    return SelfCheckReport(tuple(checks))


# --- command line -----------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="brownpair",
        description="Entanglement dynamics of two particles in a common thermal bath.",
        epilog=f"Exit codes: 0 ok, 2 config error, 3 numerical failure. "
        f"{THREADS_ENV} sets the thread count.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evolve one scenario and write its CSV time series")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="output CSV (default: output_path from the config, else stdout)")
    sweep = sub.add_parser("sweep", help="run a parameter sweep; writes one CSV per value and summary.csv")
    sweep.add_argument("--config", required=True)
    sub.add_parser("selfcheck", help="run the invariant suite on the reference scenario")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        workers = worker_count()
        if args.command == "selfcheck":
            report = self_check(workers)
            print("\n".join(report.lines()))
            return EXIT_OK if report.passed else EXIT_NUMERICAL
        cfg = load_config(args.config)
        if args.command == "run":
            text = run_scenario(cfg, workers).to_csv()
            out = args.out or cfg.output_path
            if out:
                write_text(out, text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if cfg.sweep_axis is None:
            raise ConfigError("sweep requires sweep_axis and sweep_values", field="sweep_axis")
        if not cfg.output_path:
            raise ConfigError("sweep requires output_path (a directory)", field="output_path")
        write_sweep(run_sweep(cfg, workers), cfg.output_path)
        return EXIT_OK
    except ConfigError as exc:
        where = f" [{exc.field}]" if exc.field else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrownPairError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
