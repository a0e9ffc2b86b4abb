"""Sampled functions on a truncated line and the Emden–Fowler transform.

A radial function u on ℝⁿ corresponds to a function w on ℝ through

    u(x) = |x|^((4−n)/2) w(−log|x|),

so a radial problem on ℝⁿ becomes a problem for ``w`` on the line. Profiles
live on the uniform grid ``t_i = −T + i h`` and are extended by zero outside
``[−T, T]``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import GridTooCoarse, NonFiniteSample
from .params import ProblemParams

__all__ = [
    "Grid",
    "Profile",
    "DEFAULT_HALF_WIDTH",
    "DEFAULT_POINTS",
    "differentiate",
    "integrate",
    "ef_transform",
    "ef_untransform",
    "write_profile",
    "read_profile",
]

DEFAULT_HALF_WIDTH = 40.0
DEFAULT_POINTS = 4097
MIN_POINTS = 16
EDGE_BAND = 4


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [−T, T]; an even node count is rounded up to the next odd one."""

    half_width: float = DEFAULT_HALF_WIDTH
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        n = int(self.points)
        if n < MIN_POINTS:
            raise GridTooCoarse(f"need at least {MIN_POINTS} nodes, got {n}")
        if n % 2 == 0:
            n += 1
        object.__setattr__(self, "half_width", float(self.half_width))
        object.__setattr__(self, "points", n)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return _nodes(self.half_width, self.points)

    @property
    def center(self) -> int:
        return self.points // 2

    def refined(self) -> "Grid":
        """Same interval with the spacing halved (N → 2N − 1)."""
        return Grid(self.half_width, 2 * self.points - 1)

    def to_dict(self) -> dict:
        return {"half_width": self.half_width, "points": self.points, "spacing": self.spacing}

    @classmethod
    def from_dict(cls, data: dict) -> "Grid":
        return cls(float(data["half_width"]), int(data["points"]))


@lru_cache(maxsize=32)
def _nodes(half_width: float, points: int) -> np.ndarray:
    t = np.linspace(-half_width, half_width, points)
    # exact antisymmetry keeps even data exactly even under reflection
    c = points // 2
    t[c] = 0.0
    t[:c] = -t[:c:-1]
    t.setflags(write=False)
    return t


@dataclass(frozen=True, eq=False)
class Profile:
    """Samples of ``w`` on ``grid``; zero outside the interval."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.points,):
            raise ValueError(f"expected {self.grid.points} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteSample("profile contains non-finite samples")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f: Callable, grid: Grid) -> "Profile":
        return cls(grid, np.asarray(f(grid.nodes), dtype=float) * np.ones(grid.points))

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def h(self) -> float:
        return self.grid.spacing

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def scaled(self, c: float) -> "Profile":
        return Profile(self.grid, c * self.values)

    def reflected(self) -> "Profile":
        return Profile(self.grid, self.values[::-1])

    def boundary_leak(self) -> float:
        """Largest |w| in the outer edge band, relative to max |w| (0 for w ≡ 0)."""
        m = self.max_abs()
        if m == 0.0:
            return 0.0
        v = np.abs(self.values)
        return float(max(v[:EDGE_BAND].max(), v[-EDGE_BAND:].max()) / m)

    def asymmetry(self) -> float:
        """max |w(t) − w(−t)| / max |w| about the center node."""
        m = self.max_abs()
        if m == 0.0:
            return 0.0
        return float(np.max(np.abs(self.values - self.values[::-1])) / m)

    def shifted(self, delta: float) -> "Profile":
        """Return t ↦ w(t − delta), by node shift when delta is a grid multiple, else spectrally."""
        steps = delta / self.h
        k = round(steps)
        if abs(steps - k) < 1e-12:
            out = np.zeros_like(self.values)
            if k >= 0:
                out[k:] = self.values[: self.grid.points - k]
            else:
                out[:k] = self.values[-k:]
            return Profile(self.grid, out)
        n = self.grid.points
        m = 2 * n
        spectrum = np.fft.rfft(self.values, m)
        freq = 2.0 * np.pi * np.fft.rfftfreq(m, self.h)
        out = np.fft.irfft(spectrum * np.exp(-1j * freq * delta), m)[:n]
        return Profile(self.grid, out)


# --- finite differences ----------------------------------------------------

_INTERIOR_HALF = {1: 2, 2: 2, 3: 3}


@lru_cache(maxsize=None)
def _fd_weights(offsets: tuple, order: int) -> np.ndarray:
    """Weights of the finite difference for d^order/dt^order on integer offsets (unit spacing)."""
    k = len(offsets)
    x = np.asarray(offsets, dtype=float)
    vander = np.vander(x, k, increasing=True).T
    rhs = np.zeros(k)
    rhs[order] = math.factorial(order)
    wts = np.linalg.solve(vander, rhs)
    if all(-o in offsets for o in offsets):
        # symmetric stencils: clean the rounding noise to exact (anti)symmetry
        sgn = (-1) ** order
        wts = 0.5 * (wts + sgn * wts[::-1])
    wts.setflags(write=False)
    return wts


def differentiate(p: Profile, order: int) -> Profile:
    """Fourth order accurate derivative of ``p`` (orders 1, 2 and 3).

    Centered stencils in the interior; one-sided stencils on the boundary
    nodes. Exact on polynomials of degree ≤ 4.
    """
    if order not in _INTERIOR_HALF:
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    half = _INTERIOR_HALF[order]
    width = order + 4  # one-sided closure length for fourth order accuracy
    n = p.grid.points
    if n < max(2 * half + 1, width):
        raise GridTooCoarse(f"{n} nodes cannot hold a width-{width} stencil")
    w = p.values
    scale = p.h ** order
    centered = _fd_weights(tuple(range(-half, half + 1)), order)
    out = np.empty(n)
    out[half : n - half] = np.convolve(w, centered[::-1], mode="valid")
    for i in list(range(half)) + list(range(n - half, n)):
        start = min(max(i - width // 2, 0), n - width)
        offs = tuple(range(start - i, start - i + width))
        out[i] = _fd_weights(offs, order) @ w[start : start + width]
    return Profile(p.grid, out / scale)


def integrate(p: Profile | np.ndarray, h: float | None = None) -> float:
    """Composite Simpson rule over [−T, T]."""
    if isinstance(p, Profile):
        return float(simpson(p.values, dx=p.h))
    return float(simpson(np.asarray(p, dtype=float), dx=h))


# --- Emden–Fowler transform -------------------------------------------------


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = y * np.ones_like(x)
    except (TypeError, ValueError):
        y = np.array([float(f(float(xi))) for xi in x])
    return y


def ef_transform(radial_u: Callable, p: ProblemParams, g: Grid) -> Profile:
    """Sample w(t) = r^((n−4)/2) u(r) at r = e^(−t) on ``g``."""
    t = g.nodes
    r = np.exp(-t)
    with np.errstate(all="ignore"):
        u = _evaluate(radial_u, r)
        w = np.exp(-0.5 * (p.n - 4) * t) * u
    if not np.all(np.isfinite(w)):
        bad = t[~np.isfinite(w)]
        raise NonFiniteSample(f"radial function not finite at r = e^(-t) for t in {bad[:3]}...")
    return Profile(g, w)


def ef_untransform(w: Profile, p: ProblemParams) -> Callable[[np.ndarray], np.ndarray]:
    """Return the radial function u(r) = r^((4−n)/2) w(−log r).

    ``w`` is interpolated by a cubic spline between nodes and is zero outside
    [−T, T]; at the nodes the values are reproduced exactly.
    """
    spline = CubicSpline(w.t, w.values, bc_type="clamped")
    half_width = w.grid.half_width
    k = 0.5 * (p.n - 4)

    def radial_u(r):
        r = np.asarray(r, dtype=float)
        t = -np.log(r)
        inside = np.abs(t) <= half_width * (1 + 1e-14)
        vals = np.where(inside, spline(np.clip(t, -half_width, half_width)), 0.0)
        return np.exp(k * t) * vals

    return radial_u


# --- serialization ----------------------------------------------------------


def _sidecar(path: Path) -> Path:
    return path.with_name(path.stem + ".grid.json")


def write_profile(p: Profile, path: str | Path) -> Path:
    """Write ``t,w`` CSV at 17 significant digits plus a JSON grid sidecar."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "w"])
        for t, v in zip(p.t, p.values):
            out.writerow([f"{t:.17g}", f"{v:.17g}"])
    _sidecar(path).write_text(json.dumps(p.grid.to_dict(), indent=2) + "\n")
    return path


def read_profile(path: str | Path) -> Profile:
    path = Path(path)
    grid = Grid.from_dict(json.loads(_sidecar(path).read_text()))
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["t", "w"]:
        raise ValueError(f"{path}: unexpected header {rows[0]}")
    values = np.array([float(r[1]) for r in rows[1:]])
    return Profile(grid, values)
