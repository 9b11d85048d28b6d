"""Experiment configs, parameter sweeps, time traces and deterministic CSV output.

Configs are JSON documents; see ``configs/`` for the reference scenarios and the
README for the schema.  Every routine here is deterministic: fixed-step
integration, no randomness, and results assembled in axis order whatever
the worker count.
"""

from __future__ import annotations

import copy
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .classical import compute_limit_cycle
from .covariance import (
    CouplingSchedule,
    integrate_covariance,
    is_stable,
    monodromy,
    periodic_steady_state,
)
from .entanglement import log_negativity, max_entanglement_over_period, predict_resonances
from .errors import ConfigError, OptomechError, Unstable
from .model import DriveSpec, EffectiveCouplingSpec, SystemParams, thermal_covariance
from .perturbative import compare_with_numerical, evaluate, perturbative_coefficients

MODES = ("prescribed-coupling", "physical-drive")
NULL = "null"


@dataclass(frozen=True)
class Numerics:
    classical_steps_per_period: int = 2048
    covariance_steps_per_period: int = 4096
    samples_per_period: int = 256
    refine: int = 8
    limit_cycle_tol: float = 1e-6
    schedule_n_max: int = 16
    j_max: int = 3
    n_max: int = 2
    trace_periods: int = 20
    trace_samples_per_period: int = 64
    with_analytic: bool = False
    workers: int = 1


@dataclass(frozen=True)
class Sweep:
    variable: str
    start: float
    stop: float
    num: int

    def values(self):
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    params: SystemParams
    drive: DriveSpec | None = None
    coupling: EffectiveCouplingSpec | None = None
    sweep: Sweep | None = None
    numerics: Numerics = field(default_factory=Numerics)
    output: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    __hash__ = None

    @property
    def provenance(self):
        """The raw config minus settings that cannot change results."""
        raw = copy.deepcopy(self.raw)
        raw.get("numerics", {}).pop("workers", None)
        raw.pop("output", None)
        return raw

    @property
    def digest(self):
        return config_digest(self.provenance)


def config_digest(raw):
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------- config


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw, overrides):
    """Apply ``key.sub=value`` assignments to a config dict (returns a copy)."""
    raw = copy.deepcopy(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, value = item.split("=", 1)
        parts = key.strip().split(".")
        node = raw
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot descend into {key!r}")
        node[parts[-1]] = _parse_value(value)
    return raw


def _harmonics(section, name):
    if "harmonics" in section:
        out = {}
        for n, c in section["harmonics"].items():
            if isinstance(c, (list, tuple)):
                if len(c) != 2:
                    raise ConfigError(f"{name}.harmonics[{n}] must be [re, im]")
                c = complex(c[0], c[1])
            out[int(n)] = complex(c)
        return out
    return None


def _build_coupling(section):
    try:
        Omega = float(section["Omega"])
    except KeyError:
        raise ConfigError("coupling.Omega is required") from None
    delta_eff = float(section.get("delta_eff", 1.0))
    harmonics = _harmonics(section, "coupling")
    if harmonics is None:
        return EffectiveCouplingSpec.single_sideband(
            float(section.get("g0", 0.0)), float(section.get("g_mod", 0.0)), Omega, delta_eff
        )
    return EffectiveCouplingSpec(Omega=Omega, g_harmonics=harmonics, delta_eff=delta_eff)


def _build_drive(section):
    try:
        Omega = float(section["Omega"])
    except KeyError:
        raise ConfigError("drive.Omega is required") from None
    harmonics = _harmonics(section, "drive")
    if harmonics is None:
        return DriveSpec.two_tone(float(section.get("E0", 0.0)), float(section.get("E_mod", 0.0)), Omega)
    return DriveSpec(Omega=Omega, harmonics=harmonics)


def build_config(raw):
    """Validate a config dict and turn it into an :class:`ExperimentConfig`."""
    if raw.get("units") != "omega_m":
        raise ConfigError('config must declare "units": "omega_m"')
    mode = raw.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    try:
        params = SystemParams(**raw.get("params", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad params: {exc}") from None

    has_drive, has_coupling = "drive" in raw, "coupling" in raw
    if has_drive == has_coupling:
        raise ConfigError("exactly one of 'drive' and 'coupling' must be given")
    if mode == "physical-drive" and not has_drive:
        raise ConfigError("physical-drive mode needs a 'drive' section")
    if mode == "prescribed-coupling" and not has_coupling:
        raise ConfigError("prescribed-coupling mode needs a 'coupling' section")

    try:
        drive = _build_drive(raw["drive"]) if has_drive else None
        coupling = _build_coupling(raw["coupling"]) if has_coupling else None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    sweep = None
    if raw.get("sweep") is not None:
        s = raw["sweep"]
        try:
            sweep = Sweep(str(s["variable"]), float(s["start"]), float(s["stop"]), int(s["num"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad sweep: {exc}") from None
        if not (math.isfinite(sweep.start) and math.isfinite(sweep.stop)) or sweep.num < 2:
            raise ConfigError("sweep bounds must be finite with num >= 2")
        section = "drive" if has_drive else "coupling"
        allowed = ("Omega", "E0", "E_mod") if has_drive else ("Omega", "g0", "g_mod", "delta_eff")
        if sweep.variable not in allowed:
            raise ConfigError(f"cannot sweep {section}.{sweep.variable}; choose from {allowed}")
        if "harmonics" in raw[section] and sweep.variable != "Omega":
            raise ConfigError("amplitude sweeps need the g0/g_mod (or E0/E_mod) form")

    try:
        numerics = Numerics(**raw.get("numerics", {}))
    except TypeError as exc:
        raise ConfigError(f"bad numerics: {exc}") from None
    if numerics.covariance_steps_per_period % numerics.samples_per_period:
        raise ConfigError("covariance_steps_per_period must be a multiple of samples_per_period")
    if numerics.samples_per_period % numerics.trace_samples_per_period:
        raise ConfigError("samples_per_period must be a multiple of trace_samples_per_period")

    return ExperimentConfig(
        mode=mode,
        params=params,
        drive=drive,
        coupling=coupling,
        sweep=sweep,
        numerics=numerics,
        output=dict(raw.get("output", {})),
        raw=raw,
    )


def load_config(path, overrides=()):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return build_config(apply_overrides(raw, overrides))


def with_value(config, variable, value):
    """Copy of ``config`` with one drive/coupling field replaced."""
    section = "drive" if config.drive is not None else "coupling"
    raw = copy.deepcopy(config.raw)
    raw[section][variable] = float(value)
    raw.pop("sweep", None)
    return build_config(raw)


# ---------------------------------------------------------------- pipeline


def schedule_for(config):
    """Coupling schedule for a single config point.

    Physical-drive configs go through the numerical limit cycle and also
    return it (``None`` in prescribed mode).
    """
    num = config.numerics
    if config.mode == "prescribed-coupling":
        return CouplingSchedule.from_effective_coupling(config.coupling), None
    cycle = compute_limit_cycle(
        config.params,
        config.drive,
        n_max=num.schedule_n_max,
        steps_per_period=num.classical_steps_per_period,
        tol=num.limit_cycle_tol,
    )
    return CouplingSchedule.from_limit_cycle(cycle, config.params), cycle


@dataclass(frozen=True)
class PointResult:
    value: float
    stable: bool
    spectral_radius: float
    E_N_max: float | None = None
    argmax_phase: float | None = None
    error: str | None = None


def evaluate_point(config, value=None):
    """Stability and maximal entanglement at one parameter point.

    Library errors are caught and reported in ``error`` so that a sweep
    can carry on past a bad point.
    """
    point = config if value is None else with_value(config, config.sweep.variable, value)
    num = point.numerics
    try:
        schedule, _ = schedule_for(point)
        phi = monodromy(schedule, point.params, num.covariance_steps_per_period)
        stable, _ = is_stable(phi)
        if not stable:
            return PointResult(value, False, phi.spectral_radius)
        steady = periodic_steady_state(
            schedule, point.params, num.samples_per_period, num.covariance_steps_per_period
        )
        trace = max_entanglement_over_period(steady, refine=num.refine)
    except OptomechError as exc:
        return PointResult(value, False, math.nan, error=f"{type(exc).__name__}: {exc}")
    phase = (trace.argmax_time * schedule.Omega) % (2 * math.pi)
    return PointResult(value, True, phi.spectral_radius, trace.E_N_max, phase)


def _evaluate_star(args):
    return evaluate_point(*args)


def _map_points(config, values):
    jobs = [(config, float(v)) for v in values]
    workers = config.numerics.workers
    if workers <= 1:
        return [_evaluate_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_star, jobs))


@dataclass
class Peak:
    location: float
    height: float
    prominence: float


@dataclass
class SweepResult:
    variable: str
    axis: np.ndarray
    E_N_max: np.ndarray
    stable: np.ndarray
    argmax_phase: np.ndarray
    spectral_radius: np.ndarray
    errors: dict = field(default_factory=dict)

    @classmethod
    def from_points(cls, variable, points):
        def col(name):
            return np.array([math.nan if getattr(p, name) is None else getattr(p, name) for p in points])

        return cls(
            variable=variable,
            axis=np.array([p.value for p in points]),
            E_N_max=col("E_N_max"),
            stable=np.array([p.stable for p in points]),
            argmax_phase=col("argmax_phase"),
            spectral_radius=col("spectral_radius"),
            errors={i: p.error for i, p in enumerate(points) if p.error},
        )

    @property
    def peaks(self):
        return find_peaks(self)


def _require_prescribed(config, variable):
    if config.mode != "prescribed-coupling":
        raise ConfigError("this sweep needs prescribed-coupling mode")
    if config.sweep is None or config.sweep.variable != variable:
        raise ConfigError(f"this sweep needs a sweep over {variable!r}")


def sweep_modulation_frequency(config):
    """Maximal entanglement versus modulation frequency, all points independent."""
    _require_prescribed(config, "Omega")
    values = config.sweep.values()
    return SweepResult.from_points("Omega", _map_points(config, values))


def sweep_modulation_amplitude(config):
    """Maximal entanglement versus sideband amplitude at Omega = 2 omega_m - g0.

    Points are evaluated in order up to the first unstable one; the rest of
    the axis is marked unstable without integration.
    """
    _require_prescribed(config, "g_mod")
    g0 = config.raw["coupling"].get("g0", 0.0)
    raw = copy.deepcopy(config.raw)
    raw["coupling"]["Omega"] = predict_resonances(g0, config.params.omega_m)[0]
    config = build_config(raw)
    points = []
    values = config.sweep.values()
    for i, v in enumerate(values):
        res = evaluate_point(config, float(v))
        points.append(res)
        if not res.stable and res.error is None:
            points.extend(PointResult(float(w), False, math.nan) for w in values[i + 1:])
            break
    return SweepResult.from_points("g_mod", points)


def stability_scan(config):
    """Spectral radius of the monodromy matrix at each point (or the single point)."""
    values = config.sweep.values() if config.sweep else [None]
    rows = []
    for v in values:
        point = config if v is None else with_value(config, config.sweep.variable, v)
        try:
            schedule, _ = schedule_for(point)
            phi = monodromy(schedule, point.params, point.numerics.covariance_steps_per_period)
            stable, margin = is_stable(phi)
            rows.append((v, phi.spectral_radius, margin, stable, None))
        except OptomechError as exc:
            rows.append((v, math.nan, math.nan, False, f"{type(exc).__name__}: {exc}"))
    return rows


def find_peaks(result, min_prominence=1e-6):
    """Local maxima of E_N_max along the sweep axis.

    Three-point comparison (a plateau resolves to its lowest axis value),
    refined by the vertex of the parabola through the neighbours.
    Prominence is measured against the higher of the two minima separating
    the peak from taller terrain (or the sweep ends).  Unstable points split
    the axis into independent segments.
    """
    x = np.asarray(result.axis, dtype=float)
    y = np.asarray(result.E_N_max, dtype=float)
    peaks = []
    n = len(y)
    for i in range(1, n - 1):
        if not np.all(np.isfinite(y[i - 1: i + 2])):
            continue
        if not (y[i] > y[i - 1] and y[i] >= y[i + 1]):
            continue
        left = y[i]
        j = i - 1
        while j >= 0 and np.isfinite(y[j]) and y[j] <= y[i]:
            left = min(left, y[j])
            j -= 1
        right = y[i]
        j = i + 1
        while j < n and np.isfinite(y[j]) and y[j] <= y[i]:
            right = min(right, y[j])
            j += 1
        prominence = y[i] - max(left, right)
        if prominence < min_prominence:
            continue
        x0, y0 = _parabola_vertex(x[i - 1: i + 2], y[i - 1: i + 2])
        peaks.append(Peak(x0, y0, prominence))
    return peaks


def _parabola_vertex(x, y):
    h1, h2 = x[1] - x[0], x[2] - x[1]
    d1, d2 = (y[1] - y[0]) / h1, (y[2] - y[1]) / h2
    curv = (d2 - d1) / (0.5 * (h1 + h2))
    if curv >= 0:
        return float(x[1]), float(y[1])
    # derivative of the interpolant at x[1] from the centred difference
    slope = (d1 * h2 + d2 * h1) / (h1 + h2)
    shift = -slope / curv
    shift = min(max(shift, -h1), h2)
    return float(x[1] + shift), float(y[1] + slope * shift + 0.5 * curv * shift**2)


# ---------------------------------------------------------------- traces


@dataclass
class TraceRecord:
    columns: dict
    steady_start: float
    spectral_radius: float
    E_N_max: float


def run_time_trace(config):
    """E_N(t) from the thermal initial state through to the periodic steady state.

    The transient covers ``trace_periods`` periods of Lyapunov integration
    along the periodic coupling schedule; one exact steady-state period is
    appended starting at ``steady_start``.  Raises :class:`Unstable` if the
    periodic orbit is unstable.
    """
    num = config.numerics
    params = config.params
    schedule, cycle = schedule_for(config)
    phi = monodromy(schedule, params, num.covariance_steps_per_period)
    stable, _ = is_stable(phi)
    if not stable:
        raise Unstable(
            f"orbit unstable at this point (spectral radius {phi.spectral_radius:.6g}); "
            f"config {config.digest[:12]}"
        )
    tau = schedule.period
    m = num.covariance_steps_per_period
    stride = m // num.trace_samples_per_period
    transient = integrate_covariance(
        schedule,
        params,
        thermal_covariance(params),
        num.trace_periods * tau,
        steps_per_period=m,
        stride=stride,
    )
    steady = periodic_steady_state(schedule, params, num.samples_per_period, m)
    sub = num.samples_per_period // num.trace_samples_per_period
    t_ss = num.trace_periods * tau
    times = np.concatenate([transient.times[:-1], t_ss + steady.times[::sub]])
    V = np.concatenate([transient.V[:-1], steady.V[::sub]])

    g_eff, _ = schedule(times)
    cols = {"t": times, "E_N": log_negativity(V), "g_eff_re": g_eff.real, "g_eff_im": g_eff.imag}
    if cycle is not None:
        q, p, a = cycle.reconstruct(times)
        cols.update(q_mean=q, p_mean=p, a_abs=np.abs(a))
    else:
        nan = np.full(len(times), math.nan)
        cols.update(q_mean=nan, p_mean=nan, a_abs=nan)
    if num.with_analytic and config.mode == "physical-drive":
        sol = perturbative_coefficients(params, config.drive, num.j_max, num.n_max)
        ana = evaluate(sol, times)
        g_ana = math.sqrt(2) * params.g * ana.a
        cols.update(
            g_eff_re_analytic=g_ana.real,
            g_eff_im_analytic=g_ana.imag,
            q_mean_analytic=ana.q,
            a_abs_analytic=np.abs(ana.a),
        )
    trace = max_entanglement_over_period(steady, refine=num.refine)
    return TraceRecord(cols, t_ss, phi.spectral_radius, trace.E_N_max)


def limit_cycle_table(config):
    """One period of the numerical and analytic limit cycles (physical drive only)."""
    if config.mode != "physical-drive":
        raise ConfigError("limit-cycle needs physical-drive mode")
    num = config.numerics
    params = config.params
    cycle = compute_limit_cycle(
        params, config.drive, n_max=num.schedule_n_max,
        steps_per_period=num.classical_steps_per_period, tol=num.limit_cycle_tol,
    )
    sol = perturbative_coefficients(params, config.drive, num.j_max, num.n_max)
    error = compare_with_numerical(sol, cycle, n_samples=max(256, num.samples_per_period))
    t = np.linspace(0.0, cycle.period, num.samples_per_period, endpoint=False)
    q, p, a = cycle.reconstruct(t)
    ana = evaluate(sol, t)
    s2g = math.sqrt(2) * params.g
    cols = {
        "t": t,
        "q_mean": q,
        "p_mean": p,
        "a_re": a.real,
        "a_im": a.imag,
        "g_eff_re": (s2g * a).real,
        "g_eff_im": (s2g * a).imag,
        "q_analytic": ana.q,
        "p_analytic": ana.p,
        "a_re_analytic": ana.a.real,
        "a_im_analytic": ana.a.imag,
    }
    return cols, cycle.residual, error


# ---------------------------------------------------------------- output


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return NULL
    x = float(x)
    if math.isnan(x):
        return NULL
    return repr(x)


def format_csv(command, config, columns, rows, notes=()):
    """Render a CSV document with a ``#`` provenance header."""
    buf = io.StringIO()
    buf.write(f"# optomech {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# config_sha256: {config.digest}\n")
    buf.write(f"# config: {json.dumps(config.provenance, sort_keys=True, separators=(',', ':'))}\n")
    buf.write("# units: frequencies and rates in omega_m, times in 1/omega_m, E_N natural log\n")
    for note in notes:
        buf.write(f"# {note}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def sweep_csv(command, config, result):
    rows = zip(result.axis, result.E_N_max, result.stable, result.argmax_phase)
    notes = [f"axis: {result.variable}"]
    for i, msg in sorted(result.errors.items()):
        notes.append(f"failed point {i} ({result.variable}={result.axis[i]!r}): {msg}")
    return format_csv(command, config, ["axis", "E_N_max", "stable", "argmax_phase"], rows, notes)


def trace_csv(config, record):
    names = list(record.columns)
    rows = zip(*(record.columns[k] for k in names))
    notes = [
        f"rows with t >= {record.steady_start!r} are the periodic steady state",
        f"spectral_radius: {record.spectral_radius!r}",
        f"E_N_max: {record.E_N_max!r}",
    ]
    return format_csv("trace", config, names, rows, notes)


def write_output(text, path, config=None, sidecar=False):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    if sidecar and config is not None:
        with open(str(path) + ".json", "w") as fh:
            json.dump(config.raw, fh, sort_keys=True, indent=2)
            fh.write("\n")
