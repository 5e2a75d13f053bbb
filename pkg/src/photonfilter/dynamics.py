"""Two-level dynamics inside each excitation block and filter functions.

A drive couples the dressed pair { |n-1, upper>, |n, lower> } of the n-th
excitation block through the 2x2 Hamiltonian

    H_n(t) = [[ delta_omega / 2,  g(t) sqrt(n) ],
              [ g(t) sqrt(n),    -delta_omega / 2 ]]

and i d/dt (a_plus, a_minus) = H_n (a_plus, a_minus).  Integrating every
block across the pulse support yields the photon-number filter function,
the pair of arrays p_plus[n] = |a_plus(n)|^2 and p_minus[n] = |a_minus(n)|^2
at the end of the transit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .pulses import PulseShape

__all__ = [
    "BlockAmplitudes",
    "DetunedDrive",
    "FilterFunction",
    "FilterSource",
    "NonConvergence",
    "analytic_rosen_zener",
    "analytic_zero_detuning",
    "filter_function",
    "integrate_block",
    "norm_defect_history",
    "read_filter",
    "rosen_zener_maxima",
    "step_halving_change",
    "write_filter",
]

# Fixed-step bound: max(|delta_omega|/2, g_peak sqrt(n)) * dt <= this.
STEP_PHASE_BOUND = 0.02

_MIN_STEPS = 16


class NonConvergence(RuntimeError):
    """Raised when repeated step halving fails to settle |a_minus|^2."""

    def __init__(self, message: str, n: int | None = None):
        super().__init__(message)
        self.n = n


@dataclass(frozen=True)
class DetunedDrive:
    """A coupling pulse together with a constant atom-field detuning."""

    pulse: PulseShape
    delta_omega: float = 0.0


@dataclass(frozen=True)
class BlockAmplitudes:
    """Complex amplitudes of one excitation block at the end of the pulse."""

    a_plus: complex
    a_minus: complex
    n: int

    def norm_defect(self) -> float:
        """| |a_plus|^2 + |a_minus|^2 - 1 |, a unitarity diagnostic."""
        return abs(abs(self.a_plus) ** 2 + abs(self.a_minus) ** 2 - 1.0)


class FilterSource(Enum):
    NUMERIC = "numeric"
    ZERO_DETUNING = "zero-detuning-analytic"
    ROSEN_ZENER = "rosen-zener-analytic"


@dataclass(frozen=True)
class FilterFunction:
    """Transit probabilities per photon number, p_plus[n] + p_minus[n] = 1."""

    p_plus: np.ndarray
    p_minus: np.ndarray
    source: FilterSource
    params: dict

    def __post_init__(self):
        p_plus = np.asarray(self.p_plus, dtype=float)
        p_minus = np.asarray(self.p_minus, dtype=float)
        if p_plus.ndim != 1 or p_plus.shape != p_minus.shape or p_plus.size == 0:
            raise ValueError("p_plus and p_minus must be equal-length 1-d arrays")
        for name, arr in (("p_plus", p_plus), ("p_minus", p_minus)):
            if np.any(arr < 0.0) or np.any(arr > 1.0 + 1e-12):
                raise ValueError(f"{name} entries must lie in [0, 1]")
        if np.max(np.abs(p_plus + p_minus - 1.0)) > 1e-8:
            raise ValueError("p_plus + p_minus must equal 1 within 1e-8")
        p_plus.setflags(write=False)
        p_minus.setflags(write=False)
        object.__setattr__(self, "p_plus", p_plus)
        object.__setattr__(self, "p_minus", p_minus)

    @property
    def n_max(self) -> int:
        return self.p_minus.size - 1


@njit(cache=True)
def _rk4_transit(a_plus, a_minus, g_samples, coupling, half_detune, dt, n_steps):
    # Classic fixed-step RK4 on i y' = H(t) y for one block.  g_samples holds
    # the raw pulse at the step endpoints and midpoints (2*n_steps + 1 values).
    d = half_detune
    for i in range(n_steps):
        c0 = g_samples[2 * i] * coupling
        cm = g_samples[2 * i + 1] * coupling
        c1 = g_samples[2 * i + 2] * coupling
        k1p = -1j * (d * a_plus + c0 * a_minus)
        k1m = -1j * (c0 * a_plus - d * a_minus)
        yp = a_plus + 0.5 * dt * k1p
        ym = a_minus + 0.5 * dt * k1m
        k2p = -1j * (d * yp + cm * ym)
        k2m = -1j * (cm * yp - d * ym)
        yp = a_plus + 0.5 * dt * k2p
        ym = a_minus + 0.5 * dt * k2m
        k3p = -1j * (d * yp + cm * ym)
        k3m = -1j * (cm * yp - d * ym)
        yp = a_plus + dt * k3p
        ym = a_minus + dt * k3m
        k4p = -1j * (d * yp + c1 * ym)
        k4m = -1j * (c1 * yp - d * ym)
        a_plus = a_plus + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        a_minus = a_minus + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
    return a_plus, a_minus


def _base_steps(drive: DetunedDrive, n: int) -> int:
    rate = max(abs(drive.delta_omega) / 2.0, drive.pulse.peak * math.sqrt(n))
    span = drive.pulse.t_end - drive.pulse.t_start
    return max(_MIN_STEPS, math.ceil(rate * span / STEP_PHASE_BOUND))


def _integrate_fixed(drive: DetunedDrive, n: int, init: tuple, n_steps: int):
    t0, t1 = drive.pulse.t_start, drive.pulse.t_end
    dt = (t1 - t0) / n_steps
    # linspace pins both endpoints: a sample rounding past t_end would read
    # the pulse as 0 there and degrade the scheme to first order.
    times = np.linspace(t0, t1, 2 * n_steps + 1)
    g_samples = np.asarray(drive.pulse.eval(times), dtype=float)
    return _rk4_transit(complex(init[0]), complex(init[1]), g_samples,
                        math.sqrt(n), drive.delta_omega / 2.0, dt, n_steps)


def _check_init(init):
    norm = abs(init[0]) ** 2 + abs(init[1]) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("initial amplitudes must be normalized")


def integrate_block(drive: DetunedDrive, n: int,
                    init: BlockAmplitudes | None = None,
                    tolerance: float = 1e-6,
                    max_halvings: int = 8) -> BlockAmplitudes:
    """Integrate one excitation block across the full pulse support.

    The step count starts from the fixed-step phase bound and is halved until
    the last halving moves |a_minus|^2 by at most ``tolerance`` (a Richardson
    consistency check); the finest result is returned.

    Parameters
    ----------
    drive:
        Pulse plus detuning.
    n:
        Excitation block index, >= 0.  The n = 0 block has no coupled
        partner and only acquires phases, handled in closed form.
    init:
        Initial amplitudes; defaults to the lower branch (0, 1).
    tolerance:
        Permitted change of |a_minus|^2 under one step halving.
    max_halvings:
        Refinement budget before :class:`NonConvergence` is raised.
    """
    if n < 0:
        raise ValueError("block index n must be >= 0")
    if init is None:
        pair = (0.0 + 0.0j, 1.0 + 0.0j)
    else:
        pair = (complex(init.a_plus), complex(init.a_minus))
    _check_init(pair)
    if n == 0:
        span = drive.pulse.t_end - drive.pulse.t_start
        phase = cmath.exp(0.5j * drive.delta_omega * span)
        return BlockAmplitudes(pair[0] / phase, pair[1] * phase, 0)

    steps = _base_steps(drive, n)
    prev = _integrate_fixed(drive, n, pair, steps)
    for _ in range(max_halvings):
        steps *= 2
        cur = _integrate_fixed(drive, n, pair, steps)
        if abs(abs(cur[1]) ** 2 - abs(prev[1]) ** 2) <= tolerance:
            return BlockAmplitudes(cur[0], cur[1], n)
        prev = cur
    raise NonConvergence(
        f"block n={n}: |a_minus|^2 still moving more than {tolerance} "
        f"after {max_halvings} step halvings", n=n)


def step_halving_change(drive: DetunedDrive, n: int,
                        init: BlockAmplitudes | None = None) -> float:
    """Change of |a_minus|^2 under the first step halving (diagnostic)."""
    if n == 0:
        return 0.0
    pair = ((0j, 1 + 0j) if init is None
            else (complex(init.a_plus), complex(init.a_minus)))
    _check_init(pair)
    steps = _base_steps(drive, n)
    coarse = _integrate_fixed(drive, n, pair, steps)
    fine = _integrate_fixed(drive, n, pair, 2 * steps)
    return abs(abs(fine[1]) ** 2 - abs(coarse[1]) ** 2)


def norm_defect_history(drive: DetunedDrive, n: int,
                        init: BlockAmplitudes | None = None,
                        segments: int = 8) -> np.ndarray:
    """Unitarity defect | |a+|^2 + |a-|^2 - 1 | at interior checkpoints.

    Integrates at the base step count in ``segments`` consecutive pieces and
    records the defect after each, so drift inside the transit is visible,
    not just at the end.
    """
    if n <= 0:
        raise ValueError("diagnostics need a coupled block, n >= 1")
    pair = ((0j, 1 + 0j) if init is None
            else (complex(init.a_plus), complex(init.a_minus)))
    _check_init(pair)
    total = _base_steps(drive, n)
    per = max(1, total // segments)
    t0 = drive.pulse.t_start
    dt = (drive.pulse.t_end - t0) / (per * segments)
    ap, am = pair
    defects = np.empty(segments)
    for s in range(segments):
        start = t0 + s * per * dt
        times = np.linspace(start, start + per * dt, 2 * per + 1)
        g_samples = np.asarray(drive.pulse.eval(times), dtype=float)
        ap, am = _rk4_transit(ap, am, g_samples, math.sqrt(n),
                              drive.delta_omega / 2.0, dt, per)
        defects[s] = abs(abs(ap) ** 2 + abs(am) ** 2 - 1.0)
    return defects


def _clip_probability(value: float, n: int) -> float:
    if value < -1e-8 or value > 1.0 + 1e-8:
        raise NonConvergence(
            f"block n={n}: |amplitude|^2 = {value} strays outside [0, 1] "
            "beyond the unitarity budget", n=n)
    return min(max(value, 0.0), 1.0)


def filter_function(drive: DetunedDrive, n_max: int, branch: str = "lower",
                    tolerance: float = 1e-6,
                    max_halvings: int = 8) -> FilterFunction:
    """Numeric filter function for blocks n = 0..n_max.

    Each block starts on the requested branch ((0, 1) for ``lower``, (1, 0)
    for ``upper``) and is integrated across the pulse support.  The n = 0
    entry is fixed at (p_plus, p_minus) = (0, 1): that block has no upper
    partner state and its lone amplitude only picks up a phase.
    """
    if branch not in ("lower", "upper"):
        raise ValueError("branch must be 'lower' or 'upper'")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    init = (BlockAmplitudes(0j, 1 + 0j, 0) if branch == "lower"
            else BlockAmplitudes(1 + 0j, 0j, 0))
    p_plus = np.zeros(n_max + 1)
    p_minus = np.zeros(n_max + 1)
    p_minus[0] = 1.0
    for n in range(1, n_max + 1):
        amps = integrate_block(drive, n, init, tolerance, max_halvings)
        p_plus[n] = _clip_probability(abs(amps.a_plus) ** 2, n)
        p_minus[n] = _clip_probability(abs(amps.a_minus) ** 2, n)
    params = {
        "pulse": drive.pulse.to_config(),
        "delta_omega": drive.delta_omega,
        "branch": branch,
        "tolerance": tolerance,
    }
    return FilterFunction(p_plus, p_minus, FilterSource.NUMERIC, params)


def analytic_zero_detuning(pulse_area: float, n_max: int) -> FilterFunction:
    """Resonant filter function cos^2(sqrt(n) A) from the pulse area alone.

    On resonance the transit depends on the coupling pulse only through its
    area A, so any two equal-area pulses produce this same filter.
    """
    ns = np.arange(n_max + 1, dtype=float)
    p_minus = np.cos(np.sqrt(ns) * pulse_area) ** 2
    return FilterFunction(1.0 - p_minus, p_minus, FilterSource.ZERO_DETUNING,
                          {"area": pulse_area})


def analytic_rosen_zener(g0: float, T: float, delta_omega: float,
                         n_max: int) -> FilterFunction:
    """Closed-form filter for the sech pulse g0 / cosh(t/T) at any detuning.

    p_plus[n] = sin^2(pi T g0 sqrt(n)) sech^2(pi T delta_omega / 2).
    """
    ns = np.arange(n_max + 1, dtype=float)
    window = 1.0 / math.cosh(math.pi * T * delta_omega / 2.0) ** 2
    p_plus = np.sin(math.pi * T * g0 * np.sqrt(ns)) ** 2 * window
    return FilterFunction(p_plus, 1.0 - p_plus, FilterSource.ROSEN_ZENER,
                          {"g0": g0, "T": T, "delta_omega": delta_omega})


def rosen_zener_maxima(T: float, g0: float, k: int) -> tuple[float, float]:
    """Location and width of the k-th resonant filter maximum.

    The resonant filter cos^2(sqrt(n) pi T g0) peaks where sqrt(n) T g0 is the
    integer k, i.e. at n = k^2 / (T g0)^2, with acceptance width
    sqrt(n) / (T g0) in photon number.
    """
    if k < 1:
        raise ValueError("maximum index k must be >= 1")
    location = (k / (T * g0)) ** 2
    width = math.sqrt(location) / (T * g0)
    return location, width


def write_filter(filt: FilterFunction, path) -> None:
    """Write a filter as delimited text: n, p_plus, p_minus, source."""
    from .tableio import write_table

    rows = [(n, filt.p_plus[n], filt.p_minus[n], filt.source.value)
            for n in range(filt.n_max + 1)]
    write_table(path, ("n", "p_plus", "p_minus", "source"), rows)


def read_filter(path) -> FilterFunction:
    """Read a filter written by :func:`write_filter`."""
    from .tableio import read_table

    header, rows = read_table(path)
    if header != ["n", "p_plus", "p_minus", "source"]:
        raise ValueError(f"{path}: not a filter table")
    p_plus = np.array([float(r[1]) for r in rows])
    p_minus = np.array([float(r[2]) for r in rows])
    source = FilterSource(rows[0][3])
    return FilterFunction(p_plus, p_minus, source, {"path": str(path)})
