"""Config-driven experiment runners and their file outputs.

Each runner reproduces one study end to end: build the drive, integrate the
filter functions, apply measurement updates, and write tab-delimited tables
plus a gnuplot script and a JSON manifest (output names with content hashes,
the config snapshot, duration, convergence flags) into the output directory.
Runs are deterministic by construction; identical configs give byte-identical
data files.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import stats as _stats
from .dynamics import (DetunedDrive, NonConvergence, analytic_rosen_zener,
                       filter_function, integrate_block)
from .field import (ImpossibleOutcome, MeasurementOutcome, apply_measurement,
                    default_n_max, poisson_distribution, write_distribution)
from .pulses import make_equal_area_suite, make_microwave, rosen_zener
from .tableio import sha256_of, write_table

__all__ = [
    "EXPERIMENT_KINDS",
    "SPEED_OF_LIGHT",
    "ExperimentConfig",
    "FeasibilityEstimate",
    "RunRecord",
    "default_config",
    "feasibility",
    "run",
    "run_detuning_sensitivity",
    "run_feasibility",
    "run_filter_curves",
    "run_q_sweep",
    "run_sharpening",
]

SPEED_OF_LIGHT = 299_792_458.0  # m/s

EXPERIMENT_KINDS = (
    "filter-curves",
    "sharpen",
    "q-sweep",
    "detuning-sensitivity",
    "feasibility",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters for one experiment run.

    Only a subset matters for any given kind; unused fields are ignored.
    ``None`` means "use the built-in default for this kind" (n_max from the
    nbar + 10 sqrt(nbar) rule, 0..100 filter curves, a 40-point g0 grid over
    [1, 10], an 11-point detuning grid over [0, 5]).
    """

    kind: str
    g0: float = 5.0
    T: float = 0.1
    delta_omega: float = 0.5
    l_values: tuple[int, ...] = (1, 2, 3)
    nbar: float = 16.0
    m_values: tuple[int, ...] = (1, 5, 25)
    n_max: int | None = None
    tolerance: float = 1e-6
    g0_grid: tuple[float, ...] | None = None
    delta_omega_grid: tuple[float, ...] | None = None
    min_k: int = 3
    atom_speed: float = 300.0
    mode_frequency: float = 50e9
    loss_time: float = 0.3
    out_dir: str = "out"

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(
                f"unknown experiment kind {self.kind!r}; "
                f"expected one of {EXPERIMENT_KINDS}")
        for name in ("g0", "T", "tolerance", "atom_speed", "mode_frequency",
                     "loss_time"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.nbar < 0.0:
            raise ValueError("nbar must be >= 0")
        if self.min_k < 1:
            raise ValueError("min_k must be >= 1")
        for name in ("l_values", "m_values"):
            values = getattr(self, name)
            if len(values) == 0:
                raise ValueError(f"{name} must not be empty")
            if any(v < 1 for v in values):
                raise ValueError(f"{name} entries must be >= 1")
        for name in ("g0_grid", "delta_omega_grid"):
            grid = getattr(self, name)
            if grid is not None and len(grid) == 0:
                raise ValueError(f"{name} must not be empty when given")
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("l_values", "m_values", "g0_grid", "delta_omega_grid"):
            if data[key] is not None:
                data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        field_names = set(cls.__dataclass_fields__)
        unknown = set(data) - field_names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "kind" not in data:
            raise ValueError("config must set 'kind'")
        coerced = dict(data)
        for key in ("l_values", "m_values"):
            if key in coerced:
                coerced[key] = tuple(int(v) for v in coerced[key])
        for key in ("g0_grid", "delta_omega_grid"):
            if key in coerced and coerced[key] is not None:
                coerced[key] = tuple(float(v) for v in coerced[key])
        if coerced.get("n_max") is not None and "n_max" in coerced:
            coerced["n_max"] = int(coerced["n_max"])
        return cls(**coerced)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_file(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")


def default_config(kind: str, out_dir: str = "out") -> ExperimentConfig:
    """Per-kind defaults matching the reference studies."""
    if kind == "q-sweep":
        return ExperimentConfig(kind=kind, nbar=20.0, m_values=(25,),
                                out_dir=out_dir)
    return ExperimentConfig(kind=kind, out_dir=out_dir)


@dataclass(frozen=True)
class RunRecord:
    """What a runner produced: files with hashes plus run metadata."""

    kind: str
    config: dict
    outputs: tuple[tuple[str, str], ...]  # (file name, sha256)
    duration_seconds: float
    convergence_ok: bool
    notes: tuple[str, ...]

    def output_names(self) -> list[str]:
        return [name for name, _ in self.outputs]


@dataclass(frozen=True)
class FeasibilityEstimate:
    wavenumber: float
    interaction_time: float
    loss_time: float
    interaction_to_loss_ratio: float


def feasibility(atom_speed: float, mode_frequency: float,
                loss_time: float = 0.3) -> FeasibilityEstimate:
    """Single-transit interaction time against the cavity loss time.

    The mode wavenumber is k = 2 pi nu / c and one transit of a
    half-wavelength profile lasts pi / (k v).  Typical numbers (v of a few
    hundred m/s, nu of tens of GHz) give tens of microseconds against loss
    times of a few tenths of a second, so many atoms fit into one loss time.
    """
    if atom_speed <= 0.0 or mode_frequency <= 0.0 or loss_time <= 0.0:
        raise ValueError("atom_speed, mode_frequency and loss_time must be positive")
    wavenumber = 2.0 * math.pi * mode_frequency / SPEED_OF_LIGHT
    interaction_time = math.pi / (wavenumber * atom_speed)
    return FeasibilityEstimate(wavenumber, interaction_time, loss_time,
                               interaction_time / loss_time)


def _microwave_drive(cfg: ExperimentConfig, l: int) -> DetunedDrive:
    # Comparing different mode indices requires the amplitude rescaled by l.
    kv = 2.0 / (math.pi * cfg.T)
    return DetunedDrive(make_microwave(cfg.g0 * l, kv, l), cfg.delta_omega)


def _write_gnuplot(path: Path, body: list[str]) -> None:
    lines = [
        "# Generated plot script; render with: gnuplot " + path.name,
        'set datafile separator "\\t"',
        "set key autotitle columnhead",
        "set grid",
    ]
    path.write_text("\n".join(lines + body) + "\n", encoding="ascii", newline="\n")


class _Recorder:
    """Collects output files and notes, then writes the manifest."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []
        self.notes: list[str] = []
        self.convergence_ok = True
        self._t0 = time.perf_counter()

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.out / name

    def note(self, text: str) -> None:
        self.notes.append(text)

    def finish(self) -> RunRecord:
        duration = time.perf_counter() - self._t0
        outputs = tuple((name, sha256_of(self.out / name)) for name in self.files)
        record = RunRecord(self.cfg.kind, self.cfg.to_dict(), outputs, duration,
                           self.convergence_ok, tuple(self.notes))
        manifest = {
            "kind": record.kind,
            "config": record.config,
            "outputs": [{"file": n, "sha256": h} for n, h in record.outputs],
            "duration_seconds": record.duration_seconds,
            "convergence_ok": record.convergence_ok,
            "notes": list(record.notes),
        }
        (self.out / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
        return record


def run_filter_curves(cfg: ExperimentConfig) -> RunRecord:
    """Filter functions of the sech model and of microwave modes l = 1, 2, 3.

    Writes one two-column table (n, p_minus) per curve: the closed-form sech
    filter, its numeric integration, and one numeric curve per requested mode
    index with the amplitude-rescaling convention g0 -> g0 l.
    """
    rec = _Recorder(cfg)
    n_max = cfg.n_max if cfg.n_max is not None else 100
    ns = np.arange(n_max + 1)

    curves: list[tuple[str, str]] = []  # (file name, plot title)

    analytic = analytic_rosen_zener(cfg.g0, cfg.T, cfg.delta_omega, n_max)
    name = "filter_rz_analytic.dat"
    write_table(rec.path(name), ("n", "p_minus"),
                zip(ns, analytic.p_minus))
    curves.append((name, "sech closed form"))

    jobs = [("filter_rz_numeric.dat", "sech numeric",
             DetunedDrive(rosen_zener(cfg.g0, cfg.T), cfg.delta_omega))]
    for l in cfg.l_values:
        jobs.append((f"filter_microwave_l{l}.dat", f"microwave l={l}",
                     _microwave_drive(cfg, l)))
    for name, title, drive in jobs:
        try:
            filt = filter_function(drive, n_max, tolerance=cfg.tolerance)
        except NonConvergence as exc:
            rec.convergence_ok = False
            rec.note(f"{title}: {exc}")
            continue
        write_table(rec.path(name), ("n", "p_minus"), zip(ns, filt.p_minus))
        curves.append((name, title))

    plots = [f'"{name}" using 1:2 with lines title "{title}"'
             for name, title in curves]
    _write_gnuplot(rec.out / "filter_curves.gp", [
        'set xlabel "photon number n"',
        'set ylabel "p_minus"',
        "set yrange [0:1.05]",
        "plot " + ", \\\n     ".join(plots),
    ])
    rec.files.append("filter_curves.gp")
    return rec.finish()


def run_sharpening(cfg: ExperimentConfig) -> RunRecord:
    """Repeated lower-state detections on a coherent field.

    Starts from Poisson statistics with mean ``nbar``, applies the microwave
    filter (first entry of ``l_values``) once per atom, and snapshots the
    surviving distribution at m = 0 and each requested m, together with a
    moments table (m, mean, variance, Mandel Q).
    """
    rec = _Recorder(cfg)
    n_max = cfg.n_max if cfg.n_max is not None else default_n_max(cfg.nbar)
    l = cfg.l_values[0]
    marks = sorted(set(cfg.m_values) | {0})

    # The sharpening works around a filter maximum; flag a target nbar that
    # sits farther than half an acceptance width from the nearest one.
    k_star = max(1, round(cfg.T * cfg.g0 * math.sqrt(cfg.nbar)))
    nearest_max = (k_star / (cfg.T * cfg.g0)) ** 2
    width = math.sqrt(nearest_max) / (cfg.T * cfg.g0)
    if abs(cfg.nbar - nearest_max) > width / 2.0:
        message = (f"nbar={cfg.nbar} is {abs(cfg.nbar - nearest_max):.2f} "
                   f"photons from the nearest filter maximum at "
                   f"{nearest_max:.2f} (acceptance width {width:.2f}); "
                   "sharpening will be poor")
        warnings.warn(message)
        rec.note(message)

    filt = filter_function(_microwave_drive(cfg, l), n_max,
                           tolerance=cfg.tolerance)
    dist = poisson_distribution(cfg.nbar, n_max)

    stats_rows = []
    dist_files = []

    def snapshot(m, d):
        name = f"sharpening_m{m}.dat"
        write_distribution(d, rec.path(name))
        dist_files.append((name, f"m = {m}"))
        try:
            st = _stats.moments(d)
            stats_rows.append((m, st.mean, st.variance, st.mandel_q))
        except _stats.UndefinedQ:
            stats_rows.append((m, 0.0, 0.0, float("nan")))
            rec.note(f"m={m}: vacuum distribution, Q undefined")

    snapshot(0, dist)
    m_done = 0
    for m_target in marks[1:]:
        for _ in range(m_target - m_done):
            dist, _prob = apply_measurement(dist, filt,
                                            MeasurementOutcome.LOWER)
        m_done = m_target
        snapshot(m_target, dist)

    write_table(rec.path("sharpening_stats.dat"),
                ("m", "mean", "variance", "mandel_q"), stats_rows)
    plots = [f'"{name}" using 1:2 with linespoints title "{title}"'
             for name, title in dist_files]
    _write_gnuplot(rec.out / "sharpening.gp", [
        'set xlabel "photon number n"',
        'set ylabel "probability"',
        "plot " + ", \\\n     ".join(plots),
    ])
    rec.files.append("sharpening.gp")
    return rec.finish()


def run_q_sweep(cfg: ExperimentConfig) -> RunRecord:
    """Mandel Q of the surviving field across a coupling-amplitude grid.

    For each g0 the filter is rebuilt, the largest entry of ``m_values``
    lower detections are applied to Poisson statistics with mean ``nbar``,
    and one row (g0, mean, variance, mandel_q, status) is written.  Grid
    points whose all-lower record is impossible, fails to converge, or ends
    in vacuum are flagged in the status column rather than dropped.
    """
    rec = _Recorder(cfg)
    n_max = cfg.n_max if cfg.n_max is not None else default_n_max(cfg.nbar)
    m = max(cfg.m_values)
    grid = (cfg.g0_grid if cfg.g0_grid is not None
            else tuple(np.linspace(1.0, 10.0, 40)))
    start = poisson_distribution(cfg.nbar, n_max)

    rows = []
    for g0 in grid:
        sub = replace(cfg, g0=float(g0))
        status = "ok"
        mean = variance = mandel_q = float("nan")
        try:
            filt = filter_function(_microwave_drive(sub, sub.l_values[0]),
                                   n_max, tolerance=cfg.tolerance)
            dist = start
            for _ in range(m):
                dist, _prob = apply_measurement(dist, filt,
                                                MeasurementOutcome.LOWER)
            st = _stats.moments(dist)
            mean, variance, mandel_q = st.mean, st.variance, st.mandel_q
        except NonConvergence as exc:
            status = "nonconvergent"
            rec.convergence_ok = False
            rec.note(f"g0={g0}: {exc}")
        except ImpossibleOutcome:
            status = "impossible"
            rec.note(f"g0={g0}: all-lower record has zero probability")
        except _stats.UndefinedQ:
            status = "vacuum"
            mean, variance = 0.0, 0.0
            rec.note(f"g0={g0}: surviving field is vacuum, Q undefined")
        rows.append((float(g0), mean, variance, mandel_q, status))

    write_table(rec.path("q_sweep.dat"),
                ("g0", "mean", "variance", "mandel_q", "status"), rows)
    _write_gnuplot(rec.out / "q_sweep.gp", [
        'set xlabel "coupling amplitude g0"',
        'set ylabel "Mandel Q"',
        "set yrange [-1:*]",
        'plot "q_sweep.dat" using 1:4 with linespoints title '
        f'"Q after m = {m} lower detections", 0 with lines dashtype 2 '
        'title "Poissonian"',
    ])
    rec.files.append("q_sweep.gp")
    return rec.finish()


def run_detuning_sensitivity(cfg: ExperimentConfig) -> RunRecord:
    """Detuning response of the five equal-area pulse families.

    At the deep filter minimum indexed by ``min_k`` (photon number
    ((2 min_k + 1) / (2 T g0))^2, the default parameters give n = 49), the
    survival probability p_minus is tracked across the detuning grid for
    every family, and its shift from the resonant value is written alongside.
    Families that switch off more slowly respond more strongly.
    """
    rec = _Recorder(cfg)
    suite = make_equal_area_suite(cfg.g0, cfg.T)
    grid = (cfg.delta_omega_grid if cfg.delta_omega_grid is not None
            else tuple(np.linspace(0.0, 5.0, 11)))
    n_min = round(((2 * cfg.min_k + 1) / (2.0 * cfg.T * cfg.g0)) ** 2)
    if n_min < 1:
        raise ValueError("min_k landmark falls below n = 1; raise min_k or T*g0")
    rec.note(f"tracking the filter minimum at n = {n_min}")

    labels = [p.label for p in suite]
    values = np.empty((len(grid), len(suite)))
    shifts = np.empty_like(values)
    for j, pulse in enumerate(suite):
        try:
            base = abs(integrate_block(DetunedDrive(pulse, 0.0), n_min,
                                       tolerance=cfg.tolerance).a_minus) ** 2
            for i, dw in enumerate(grid):
                drive = DetunedDrive(pulse, float(dw))
                p = abs(integrate_block(drive, n_min,
                                        tolerance=cfg.tolerance).a_minus) ** 2
                values[i, j] = p
                shifts[i, j] = abs(p - base)
        except NonConvergence as exc:
            rec.convergence_ok = False
            rec.note(f"{pulse.label}: {exc}")
            values[:, j] = np.nan
            shifts[:, j] = np.nan

    header = ("delta_omega", *labels)
    write_table(rec.path("detuning_p_minus.dat"), header,
                [(float(dw), *values[i]) for i, dw in enumerate(grid)])
    write_table(rec.path("detuning_shift.dat"), header,
                [(float(dw), *shifts[i]) for i, dw in enumerate(grid)])
    plots = [f'"detuning_shift.dat" using 1:{j + 2} with linespoints '
             f'title "{label}"' for j, label in enumerate(labels)]
    _write_gnuplot(rec.out / "detuning_sensitivity.gp", [
        'set xlabel "detuning"',
        f'set ylabel "shift of p_minus at n = {n_min}"',
        "plot " + ", \\\n     ".join(plots),
    ])
    rec.files.append("detuning_sensitivity.gp")
    return rec.finish()


def run_feasibility(cfg: ExperimentConfig) -> RunRecord:
    """Interaction-versus-loss timing estimate for the given beam and mode."""
    rec = _Recorder(cfg)
    est = feasibility(cfg.atom_speed, cfg.mode_frequency, cfg.loss_time)
    write_table(rec.path("feasibility.dat"),
                ("atom_speed", "mode_frequency", "wavenumber",
                 "interaction_time", "loss_time", "interaction_to_loss_ratio"),
                [(cfg.atom_speed, cfg.mode_frequency, est.wavenumber,
                  est.interaction_time, est.loss_time,
                  est.interaction_to_loss_ratio)])
    return rec.finish()


_RUNNERS = {
    "filter-curves": run_filter_curves,
    "sharpen": run_sharpening,
    "q-sweep": run_q_sweep,
    "detuning-sensitivity": run_detuning_sensitivity,
    "feasibility": run_feasibility,
}


def run(cfg: ExperimentConfig) -> RunRecord:
    """Dispatch a config to its runner."""
    return _RUNNERS[cfg.kind](cfg)
