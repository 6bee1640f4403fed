"""Adaptive Runge-Kutta integration along paths in the complex time plane.

This is the ground truth every algebraic construction is checked against.
A path is a chain of straight segments and circular arcs; each piece is
parameterised by ``p in [0, 1]`` and the ODE ``dx/dt = f(x)`` becomes
``dx/dp = f(x) * dt/dp``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

Vector = tuple[complex, ...]
RHS = Callable[[Vector], Vector]

__all__ = [
    "Line",
    "Arc",
    "TrajectoryPath",
    "Trajectory",
    "PoleApproach",
    "StepUnderflow",
    "PoleOnLoop",
    "WindowTooNoisy",
    "MonodromyResult",
    "integrate_path",
    "integrate_to",
    "sample_path",
    "monodromy",
    "singularity_exponent",
]


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def point(self, p: float) -> complex:
        return self.start + (self.end - self.start) * p

    def velocity(self, p: float) -> complex:
        return self.end - self.start

    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class Arc:
    """Circular arc ``center + radius*exp(i*(start_angle + sweep*p))``."""

    center: complex
    radius: float
    start_angle: float
    sweep: float

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    def point(self, p: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * (self.start_angle + self.sweep * p))

    def velocity(self, p: float) -> complex:
        return 1j * self.sweep * self.radius * cmath.exp(1j * (self.start_angle + self.sweep * p))

    def length(self) -> float:
        return abs(self.sweep) * self.radius


Segment = Line | Arc


@dataclass
class TrajectoryPath:
    segments: list[Segment]

    def __post_init__(self):
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.end - b.start) > 1e-12 * (1 + abs(a.end)):
                raise ValueError("path segments are not contiguous")

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @classmethod
    def polyline(cls, points: Sequence[complex]) -> "TrajectoryPath":
        pts = [complex(p) for p in points]
        return cls([Line(a, b) for a, b in zip(pts, pts[1:])])

    @classmethod
    def circle(cls, center: complex, radius: float, start_angle: float, turns: int = 1) -> "TrajectoryPath":
        return cls([Arc(center, radius, start_angle + 2 * math.pi * k, 2 * math.pi) for k in range(turns)])

    def to_json(self) -> dict:
        out = []
        for s in self.segments:
            if isinstance(s, Line):
                out.append({"line": {"from": [s.start.real, s.start.imag], "to": [s.end.real, s.end.imag]}})
            else:
                out.append(
                    {
                        "arc": {
                            "center": [s.center.real, s.center.imag],
                            "radius": s.radius,
                            "start_angle": s.start_angle,
                            "sweep": s.sweep,
                        }
                    }
                )
        return {"segments": out}

    @classmethod
    def from_json(cls, data: dict) -> "TrajectoryPath":
        segs: list[Segment] = []
        for item in data["segments"]:
            if "line" in item:
                a, b = item["line"]["from"], item["line"]["to"]
                segs.append(Line(complex(*a), complex(*b)))
            else:
                arc = item["arc"]
                segs.append(Arc(complex(*arc["center"]), float(arc["radius"]), float(arc["start_angle"]), float(arc["sweep"])))
        return cls(segs)


@dataclass
class Trajectory:
    samples: list[tuple[complex, Vector]] = field(default_factory=list)
    accepted: int = 0
    rejected: int = 0
    events: list[dict] = field(default_factory=list)

    @property
    def final(self) -> Vector:
        return self.samples[-1][1]

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def states(self) -> np.ndarray:
        return np.array([y for _, y in self.samples])


class PoleApproach(ArithmeticError):
    """The solution grew past the blow-up threshold; ``t_est`` estimates the singular time."""

    def __init__(self, t: complex, t_est: complex, trajectory: Trajectory):
        super().__init__(f"pole approach near t={t_est:.6g} (stopped at t={t:.6g})")
        self.t = t
        self.t_est = t_est
        self.trajectory = trajectory


class StepUnderflow(ArithmeticError):
    def __init__(self, t: complex, trajectory: Trajectory):
        super().__init__(f"step size underflow at t={t:.6g}")
        self.t = t
        self.trajectory = trajectory


class PoleOnLoop(ArithmeticError):
    pass


class WindowTooNoisy(ValueError):
    pass


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def _norm(y: Vector) -> float:
    return max(abs(v) for v in y)


def _segment_run(
    f: RHS,
    y: Vector,
    seg: Segment,
    rtol: float,
    atol: float,
    blowup: float,
    traj: Trajectory,
    h: float,
    record: bool,
    max_steps: int,
) -> tuple[Vector, float]:
    """Integrate across one segment; returns the end state and a suggested next step."""
    n = len(y)
    p = 0.0
    length = max(seg.length(), 1e-300)
    h = min(h, 1.0) if h > 0 else 0.0
    if h == 0.0:
        f0 = f(y)
        scale = max(_norm(f0) * length, 1e-300)
        h = min(1.0, 0.01 * max(_norm(y), atol) / scale) if scale > 0 else 1.0
        h = max(h, 1e-6)
    err_prev = 1e-4
    steps = 0
    while p < 1.0:
        if steps > max_steps:
            raise StepUnderflow(seg.point(p), traj)
        steps += 1
        if p + h > 1.0:
            h = 1.0 - p
        k = []
        for s in range(7):
            ps = p + _C[s] * h
            v = seg.velocity(ps)
            if s == 0:
                ys = y
            else:
                a = _A[s]
                ys = tuple(y[i] + h * sum(a[j] * k[j][i] for j in range(s)) for i in range(n))
            fs = f(ys)
            k.append(tuple(fi * v for fi in fs))
        y_new = tuple(y[i] + h * sum(_B[j] * k[j][i] for j in range(6)) for i in range(n))
        err = 0.0
        for i in range(n):
            e = h * sum(_E[j] * k[j][i] for j in range(7))
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            err = max(err, abs(e) / sc)
        if not math.isfinite(err):
            err = 1e10
        if err <= 1.0:
            p += h
            y = y_new
            traj.accepted += 1
            t_now = seg.point(p)
            if record:
                traj.samples.append((t_now, y))
            ny = _norm(y)
            if ny > blowup:
                fy = f(y)
                i = max(range(n), key=lambda j: abs(y[j]))
                # simple-pole extrapolation of 1/|x|
                t_est = t_now + (y[i] / fy[i] if fy[i] != 0 else 0)
                traj.events.append({"event": "pole_approach", "t": t_now, "t_est": t_est})
                if not record:
                    traj.samples.append((t_now, y))
                raise PoleApproach(t_now, t_est, traj)
            # PI step control
            fac = 0.9 * err ** (-0.7 / 5) * err_prev ** (0.4 / 5) if err > 0 else 5.0
            fac = min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-4)
            h *= fac
        else:
            traj.rejected += 1
            h *= max(0.1, 0.9 * err ** (-1 / 5))
            if h < 1e-14 * max(1.0, p):
                traj.events.append({"event": "step_underflow", "t": seg.point(p)})
                raise StepUnderflow(seg.point(p), traj)
    return y, h


def integrate_path(
    f: RHS,
    y0: Sequence[complex],
    path: TrajectoryPath,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    *,
    blowup: float = 1e12,
    record: bool = True,
    max_steps: int = 2_000_000,
) -> Trajectory:
    """Integrate the autonomous system ``dy/dt = f(y)`` along ``path``.

    Samples are recorded at every accepted step when ``record`` is true, and
    always at segment ends. Raises ``PoleApproach`` when ``max|y|`` exceeds
    ``blowup``.
    """
    y = tuple(complex(v) for v in y0)
    traj = Trajectory()
    traj.samples.append((path.start, y))
    h = 0.0
    for seg in path.segments:
        seg_h = h / max(seg.length(), 1e-300) if h else 0.0
        y, h_param = _segment_run(f, y, seg, rtol, atol, blowup, traj, seg_h, record, max_steps)
        h = h_param * seg.length()
        if not record:
            traj.samples.append((seg.end, y))
    return traj


def integrate_to(f: RHS, y0: Sequence[complex], t_end: complex, t_start: complex = 0j, **kw) -> Vector:
    """End state of a straight-line integration from ``t_start`` to ``t_end``."""
    path = TrajectoryPath([Line(complex(t_start), complex(t_end))])
    return integrate_path(f, y0, path, record=False, **kw).final


def sample_path(f: RHS, y0: Sequence[complex], times: Sequence[complex], **kw) -> list[Vector]:
    """States at each point of ``times`` following the polyline through them."""
    times = [complex(t) for t in times]
    out = [tuple(complex(v) for v in y0)]
    if len(times) < 2:
        return out
    traj = integrate_path(f, y0, TrajectoryPath.polyline(times), record=False, **kw)
    out.extend(y for _, y in traj.samples[1:])
    return out


@dataclass
class MonodromyResult:
    cycle: int | None
    returns: list[Vector]
    start: Vector
    t_start: complex
    deviations: list[float]

    def to_json(self) -> dict:
        return {
            "cycle": self.cycle,
            "t_start": [self.t_start.real, self.t_start.imag],
            "start": [[v.real, v.imag] for v in self.start],
            "returns": [[[v.real, v.imag] for v in y] for y in self.returns],
            "deviations": self.deviations,
        }


def monodromy(
    f: RHS,
    y0: Sequence[complex],
    center: complex,
    radius: float,
    turns: int,
    *,
    t0: complex = 0j,
    tol: float = 1e-6,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> MonodromyResult:
    """Transport ``y0`` from ``t0`` onto a circle and around it ``turns`` times.

    The circle is entered at its point closest to ``t0``. ``cycle`` is the
    smallest number of turns after which the state returns to its value at
    the entry point (relative tolerance ``tol``), or ``None``.
    """
    center = complex(center)
    offset = complex(t0) - center
    angle = cmath.phase(offset) if offset != 0 else 0.0
    entry = center + radius * cmath.exp(1j * angle)
    y = tuple(complex(v) for v in y0)
    if abs(entry - t0) > 0:
        y = integrate_to(f, y, entry, t_start=t0, rtol=rtol, atol=atol)
    start = y
    returns: list[Vector] = []
    deviations: list[float] = []
    cycle = None
    for _ in range(turns):
        try:
            traj = integrate_path(
                f, y, TrajectoryPath([Arc(center, radius, angle, 2 * math.pi)]), rtol=rtol, atol=atol, record=False
            )
        except PoleApproach as exc:
            raise PoleOnLoop(f"pole on loop near t={exc.t_est:.6g}") from exc
        y = traj.final
        returns.append(y)
        dev = _norm(tuple(a - b for a, b in zip(y, start))) / max(_norm(start), 1e-300)
        deviations.append(dev)
        if cycle is None and dev <= tol:
            cycle = len(returns)
    return MonodromyResult(cycle, returns, start, entry, deviations)


def singularity_exponent(
    trajectory: Trajectory,
    t_est: complex | None = None,
    component: int = 0,
    decades: tuple[float, float] = (1e-5, 1e-4),
    f: RHS | None = None,
) -> tuple[float, float, complex]:
    """Fit ``|x| ~ |t - t_S|^p`` on the approach recorded in ``trajectory``.

    Returns ``(p, stderr, t_S)``. When the right-hand side ``f`` is given,
    ``t_S`` is refined by regressing ``x/xdot`` (linear in ``t`` for a power
    law) before the log-log fit over ``|t - t_S|`` in ``decades`` (relative
    to the distance covered on the approach).
    """
    ts = np.array([t for t, _ in trajectory.samples])
    xs = np.array([y[component] for _, y in trajectory.samples])
    t_end = ts[-1]
    if f is not None:
        tail = max(8, len(ts) // 4)
        tt = ts[-tail:]
        ratio = np.array([y[component] / f(y)[component] for _, y in trajectory.samples[-tail:]])
        # x/xdot = (t - t_S)/p
        slope, intercept = np.polyfit(tt.real, ratio, 1) if np.ptp(tt.imag) == 0 else _complex_linfit(tt, ratio)
        t_s = -intercept / slope
    elif t_est is not None:
        t_s = complex(t_est)
    else:
        raise ValueError("need t_est or f to locate the singularity")
    dist = np.abs(ts - t_s)
    span = abs(t_s - ts[0])
    lo, hi = decades[0] * span, decades[1] * span
    lo = max(lo, dist.min() * 1.5)
    hi = max(hi, 10 * lo)
    mask = (dist >= lo) & (dist <= hi)
    if mask.sum() < 6:
        raise WindowTooNoisy(f"only {int(mask.sum())} samples in the fitting window")
    lx = np.log(dist[mask])
    ly = np.log(np.abs(xs[mask]))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    dof = max(len(lx) - 2, 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    stderr = float(math.sqrt(max(cov[0, 0], 0.0)))
    if stderr > 0.1:
        raise WindowTooNoisy(f"exponent fit too noisy (stderr={stderr:.3g})")
    return float(coef[0]), stderr, complex(t_s)


def _complex_linfit(t: np.ndarray, y: np.ndarray) -> tuple[complex, complex]:
    A = np.vstack([t, np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return complex(coef[0]), complex(coef[1])
