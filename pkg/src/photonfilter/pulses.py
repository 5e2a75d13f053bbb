"""Time-dependent coupling pulses seen by an atom crossing a cavity mode.

Five standard envelope shapes are provided (square-wave, trigonometric,
Gaussian, Rosen-Zener / hyperbolic secant, Lorentzian) together with the
spatial microwave mode profile, pulse areas, and a helper that rescales
the five shapes to a common area so that only their switching behaviour
differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

__all__ = [
    "AreaMethod",
    "PulseArea",
    "PulseKind",
    "PulseShape",
    "area",
    "area_quadrature",
    "edge_steepness",
    "gaussian",
    "lorentzian",
    "make_equal_area_suite",
    "make_microwave",
    "rosen_zener",
    "square_wave",
]


class PulseKind(Enum):
    """Envelope family of a coupling pulse."""

    TRIGONOMETRIC = "trigonometric"
    ROSEN_ZENER = "rosen-zener"
    SQUARE_WAVE = "square-wave"
    GAUSSIAN = "gaussian"
    LORENTZIAN = "lorentzian"


class AreaMethod(Enum):
    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class PulseArea:
    """Integral of g(t) over the pulse support, with how it was obtained."""

    value: float
    method: AreaMethod


_REQUIRED_PARAMS = {
    PulseKind.TRIGONOMETRIC: ("kv", "l"),
    PulseKind.ROSEN_ZENER: ("T",),
    PulseKind.SQUARE_WAVE: ("tau", "t_s"),
    PulseKind.GAUSSIAN: ("tau", "sigma"),
    PulseKind.LORENTZIAN: ("tau", "gamma"),
}


@dataclass(frozen=True)
class PulseShape:
    """A coupling pulse g(t) with finite support [t_start, t_end].

    Parameters
    ----------
    kind:
        Envelope family.
    amplitude:
        The overall amplitude factor g0 in the envelope formula.  Note that
        for the Gaussian and Lorentzian families the formula carries a
        width-dependent prefactor, so ``amplitude`` is not the peak value;
        use :attr:`peak` for the actual maximum of ``|g|``.
    params:
        Named shape parameters (see the module constructors).
    t_start, t_end:
        Support boundaries.  ``eval`` returns exactly 0.0 outside.
    """

    kind: PulseKind
    amplitude: float
    params: dict
    t_start: float
    t_end: float

    def __post_init__(self):
        if not self.amplitude > 0.0:
            raise ValueError("pulse amplitude must be positive")
        if not self.t_start < self.t_end:
            raise ValueError("pulse support must be a nonempty interval")
        missing = [k for k in _REQUIRED_PARAMS[self.kind] if k not in self.params]
        if missing:
            raise ValueError(f"{self.kind.value} pulse missing params: {missing}")
        for key in _REQUIRED_PARAMS[self.kind]:
            if key == "l":
                continue
            if not self.params[key] > 0.0:
                raise ValueError(f"pulse parameter {key!r} must be positive")

    def eval(self, t):
        """Evaluate g(t).  Accepts scalars or arrays; zero outside the support."""
        t_arr = np.asarray(t, dtype=float)
        inside = (t_arr >= self.t_start) & (t_arr <= self.t_end)
        values = np.where(inside, self._formula(np.where(inside, t_arr, 0.0)), 0.0)
        if np.isscalar(t) or t_arr.ndim == 0:
            return float(values)
        return values

    def _formula(self, t):
        g0, p = self.amplitude, self.params
        if self.kind is PulseKind.TRIGONOMETRIC:
            phase = p["kv"] * p["l"] * t
            return g0 * (np.cos(phase) if p["l"] % 2 else np.sin(phase))
        if self.kind is PulseKind.ROSEN_ZENER:
            return g0 / np.cosh(t / p["T"])
        if self.kind is PulseKind.SQUARE_WAVE:
            return 0.5 * g0 * (np.tanh((t + p["tau"]) / p["t_s"])
                               - np.tanh((t - p["tau"]) / p["t_s"]))
        if self.kind is PulseKind.GAUSSIAN:
            return (g0 / (2.0 * p["sigma"] * math.sqrt(math.pi))
                    * np.exp(-((t / p["tau"]) ** 2) / (4.0 * p["sigma"] ** 2)))
        if self.kind is PulseKind.LORENTZIAN:
            return (g0 * (p["gamma"] / math.pi) ** 2
                    / ((t / p["tau"]) ** 2 + p["gamma"] ** 2))
        raise AssertionError(f"unhandled pulse kind {self.kind}")

    @property
    def peak(self) -> float:
        """Maximum of |g(t)| over the support."""
        g0, p = self.amplitude, self.params
        if self.kind is PulseKind.TRIGONOMETRIC:
            # |cos| and |sin| both reach 1 inside the half-wavelength support.
            return g0
        if self.kind is PulseKind.ROSEN_ZENER:
            return g0
        if self.kind is PulseKind.SQUARE_WAVE:
            return g0 * math.tanh(p["tau"] / p["t_s"])
        if self.kind is PulseKind.GAUSSIAN:
            return g0 / (2.0 * p["sigma"] * math.sqrt(math.pi))
        if self.kind is PulseKind.LORENTZIAN:
            return g0 / math.pi**2
        raise AssertionError(f"unhandled pulse kind {self.kind}")

    @property
    def label(self) -> str:
        return self.kind.value

    def to_config(self) -> dict:
        """Plain-dict form used by the experiment config files."""
        return {
            "kind": self.kind.value,
            "amplitude": self.amplitude,
            "params": dict(self.params),
            "t_start": self.t_start,
            "t_end": self.t_end,
        }

    @classmethod
    def from_config(cls, data: dict) -> "PulseShape":
        return cls(
            kind=PulseKind(data["kind"]),
            amplitude=float(data["amplitude"]),
            params={k: (int(v) if k == "l" else float(v))
                    for k, v in data["params"].items()},
            t_start=float(data["t_start"]),
            t_end=float(data["t_end"]),
        )


def rosen_zener(g0: float, T: float) -> PulseShape:
    """Hyperbolic-secant pulse g0 / cosh(t/T).

    The support is truncated at |t| <= 15 T; the discarded sech tail holds
    less than 1e-6 of the total area.
    """
    return PulseShape(PulseKind.ROSEN_ZENER, g0, {"T": T}, -15.0 * T, 15.0 * T)


def square_wave(g0: float, tau: float, t_s: float = 0.02) -> PulseShape:
    """Flat-top pulse built from two tanh switches of timescale t_s at -tau, +tau."""
    half = tau + 20.0 * t_s  # tanh tails beyond this are ~exp(-40) of the peak
    return PulseShape(PulseKind.SQUARE_WAVE, g0, {"tau": tau, "t_s": t_s}, -half, half)


def gaussian(g0: float, tau: float, sigma: float = 0.3) -> PulseShape:
    """Gaussian pulse (g0 / (2 sigma sqrt(pi))) exp(-(t/tau)^2 / (4 sigma^2))."""
    half = 16.0 * sigma * tau  # tail mass < 1e-12 of the area
    return PulseShape(PulseKind.GAUSSIAN, g0, {"tau": tau, "sigma": sigma}, -half, half)


def lorentzian(g0: float, tau: float, gamma: float = 0.3) -> PulseShape:
    """Lorentzian pulse g0 (gamma/pi)^2 / ((t/tau)^2 + gamma^2).

    The power-law tails force a wide truncation window, |t| <= 200 tau gamma;
    the small remaining deficit is absorbed whenever the pulse is rescaled to
    a target area (see :func:`make_equal_area_suite`).
    """
    half = 200.0 * tau * gamma
    return PulseShape(PulseKind.LORENTZIAN, g0, {"tau": tau, "gamma": gamma}, -half, half)


def make_microwave(g0: float, kv: float, l: int) -> PulseShape:
    """Coupling profile of a standing microwave mode crossed at speed v.

    An atom moving through mode number ``l`` sees g0 cos(kv l t) for odd l and
    g0 sin(kv l t) for even l, supported on one transit, |t| <= pi / (2 kv).

    Parameters
    ----------
    g0:
        Coupling amplitude.
    kv:
        Product of the mode wavenumber and the atomic velocity (angular
        frequency of the seen modulation for l = 1).
    l:
        Mode index; must be a positive integer.
    """
    if not isinstance(l, (int, np.integer)) or isinstance(l, bool):
        raise ValueError("mode index l must be an integer")
    if l <= 0:
        raise ValueError("mode index l must be positive")
    if not kv > 0.0:
        raise ValueError("kv must be positive")
    half = math.pi / (2.0 * kv)
    return PulseShape(PulseKind.TRIGONOMETRIC, g0, {"kv": kv, "l": int(l)}, -half, half)


def area(pulse: PulseShape) -> PulseArea:
    """Pulse area, analytic where a closed form exists, else by quadrature.

    Closed forms: trigonometric pulses integrate to 2 g0 sin(l pi/2) / (kv l)
    (zero for even l, alternating sign for odd l); the Rosen-Zener pulse to
    pi T g0; the Gaussian to g0 tau.  Square-wave and Lorentzian areas are
    computed by adaptive Simpson quadrature over the support.
    """
    g0, p = pulse.amplitude, pulse.params
    if pulse.kind is PulseKind.TRIGONOMETRIC:
        if p["l"] % 2 == 0:
            return PulseArea(0.0, AreaMethod.ANALYTIC)
        value = 2.0 * g0 * math.sin(p["l"] * math.pi / 2.0) / (p["kv"] * p["l"])
        return PulseArea(value, AreaMethod.ANALYTIC)
    if pulse.kind is PulseKind.ROSEN_ZENER:
        return PulseArea(math.pi * p["T"] * g0, AreaMethod.ANALYTIC)
    if pulse.kind is PulseKind.GAUSSIAN:
        return PulseArea(g0 * p["tau"], AreaMethod.ANALYTIC)
    return PulseArea(area_quadrature(pulse), AreaMethod.QUADRATURE)


def area_quadrature(pulse: PulseShape, abs_tol: float = 1e-10) -> float:
    """Integrate g(t) over the support with adaptive Simpson quadrature."""
    return _adaptive_simpson(pulse._formula, pulse.t_start, pulse.t_end, abs_tol)


def _adaptive_simpson(f, a, b, abs_tol, max_depth: int = 48):
    fa, fb = float(f(a)), float(f(b))
    m = 0.5 * (a + b)
    fm = float(f(m))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = float(f(lm)), float(f(rm))
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def make_equal_area_suite(g0: float, T: float) -> list[PulseShape]:
    """Five pulse families rescaled to share the area pi T g0 exactly.

    The shapes use a common set of width parameters (tau = pi T for the
    square-wave, Gaussian and Lorentzian, switching time t_s = 0.02,
    sigma = gamma = 0.3, kv = 2 / (pi T)) so that, once their amplitudes are
    rescaled to the target area, the families differ only in how quickly the
    coupling switches on and off.  The trigonometric, Gaussian and
    Rosen-Zener members already sit at the target and keep scale factors of
    one (up to the truncated sech tail); the square-wave is halved and the
    Lorentzian is boosted by roughly pi / gamma.

    Returns the pulses ordered from fastest to slowest switching:
    square-wave, trigonometric, Gaussian, Rosen-Zener, Lorentzian.
    """
    tau = math.pi * T
    kv = 2.0 / (math.pi * T)
    members = [
        square_wave(g0, tau),
        make_microwave(g0, kv, 1),
        gaussian(g0, tau),
        rosen_zener(g0, T),
        lorentzian(g0, tau),
    ]
    target = math.pi * T * g0
    suite = []
    for pulse in members:
        # Normalize against the support-truncated integral so the realized
        # area is the target to quadrature accuracy, not just asymptotically.
        scale = target / area_quadrature(pulse)
        suite.append(replace(pulse, amplitude=pulse.amplitude * scale))
    return suite


def edge_steepness(pulse: PulseShape, level: float = 0.1) -> float:
    """Switch-off rate |dg/dt| / g_peak at the outer ``level``-of-peak crossing.

    The pulse edge is taken to be the outermost time where |g| has fallen to
    ``level`` times its peak; the returned slope there, normalized to the
    peak, ranks the families by how abruptly the coupling switches off
    (square-wave fastest, Lorentzian slowest).
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie strictly between 0 and 1")
    n_grid = 200_001
    ts = np.linspace(pulse.t_start, pulse.t_end, n_grid)
    g_abs = np.abs(pulse.eval(ts))
    peak = float(g_abs.max())
    threshold = level * peak
    above = np.nonzero(g_abs >= threshold)[0]
    if above.size == 0:
        raise ValueError("pulse never reaches the requested level")
    i = int(above[-1])
    if i == n_grid - 1:
        # Still above the level at the support edge (e.g. a raw trigonometric
        # pulse sampled exactly at its zero); fall back to the edge itself.
        t_cross = float(ts[i])
    else:
        lo, hi = float(ts[i]), float(ts[i + 1])
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if abs(pulse.eval(mid)) >= threshold:
                lo = mid
            else:
                hi = mid
        t_cross = 0.5 * (lo + hi)
    h = (pulse.t_end - pulse.t_start) * 1e-7
    slope = (pulse.eval(t_cross + h) - pulse.eval(t_cross - h)) / (2.0 * h)
    return abs(slope) / peak
