"""Membership geometry in the positive chamber of R^d.

Tubes and boxes are closed, cones are open; boundary ties therefore count
for tubes and boxes and not for cones.  All norms are Euclidean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import SpectraCensusError

UNIT_TOL = 1e-12


class DimensionMismatch(SpectraCensusError):
    """Point dimension differs from the region's."""


def _as_unit(direction: Sequence[float], positive: bool = True) -> Tuple[float, ...]:
    v = np.asarray(direction, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("direction must be a 1-d vector")
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit vector (norm {nrm!r})")
    if positive and np.any(v <= 0.0):
        raise ValueError("direction must have strictly positive coordinates")
    return tuple(float(x) for x in v)


def unit(direction: Sequence[float]) -> Tuple[float, ...]:
    """Normalize a direction vector to unit length."""
    v = np.asarray(direction, dtype=float)
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return tuple(float(x) for x in v / nrm)


def _check_point(x, d: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (d,):
        raise DimensionMismatch(f"point has shape {arr.shape}, region lives in R^{d}")
    return arr


@dataclass(frozen=True)
class TubeSpec:
    """Closed epsilon-neighborhood of the line R*v, shifted by offset, inside R_+^d."""

    direction: Tuple[float, ...]
    epsilon: float
    offset: Tuple[float, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "direction", _as_unit(self.direction))
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        off = self.offset
        if off is None:
            off = (0.0,) * len(self.direction)
        off = tuple(float(x) for x in off)
        if len(off) != len(self.direction):
            raise ValueError("offset dimension differs from direction")
        object.__setattr__(self, "offset", off)

    @property
    def d(self) -> int:
        return len(self.direction)


@dataclass(frozen=True)
class ConeSpec:
    """Open cone of half-angle theta around the ray R_+ v, inside R_+^d."""

    direction: Tuple[float, ...]
    half_angle: float

    def __post_init__(self):
        object.__setattr__(self, "direction", _as_unit(self.direction))
        if not 0.0 < self.half_angle < math.pi / 2:
            raise ValueError("half_angle must lie in (0, pi/2)")

    @property
    def d(self) -> int:
        return len(self.direction)


@dataclass(frozen=True)
class BoxWindow:
    """Moving box prod_i [v_i T, v_i T + eps_i]; closed on both sides."""

    direction: Tuple[float, ...]
    widths: Tuple[float, ...]
    time: float

    def __post_init__(self):
        v = tuple(float(x) for x in self.direction)
        w = tuple(float(x) for x in self.widths)
        if len(v) != len(w):
            raise ValueError("direction and widths dimensions differ")
        if any(x <= 0.0 for x in v):
            raise ValueError("direction coordinates must be strictly positive")
        if any(x <= 0.0 for x in w):
            raise ValueError("widths must be strictly positive")
        if self.time < 0.0:
            raise ValueError("time must be nonnegative")
        object.__setattr__(self, "direction", v)
        object.__setattr__(self, "widths", w)

    @property
    def d(self) -> int:
        return len(self.direction)


@dataclass(frozen=True)
class TruncatedTubeSpec:
    """Tube slab {t v + u : u in K, 0 <= t <= T + b(u)} inside R_+^d.

    K is an axis-aligned box in the orthocomplement of v, described by an
    orthonormal basis (rows) and one closed interval per basis axis; b is a
    continuous piecewise-affine truncation profile taking the ambient
    orthogonal component u.
    """

    direction: Tuple[float, ...]
    basis: np.ndarray  # (d-1, d), orthonormal rows spanning v^perp
    intervals: Tuple[Tuple[float, float], ...]
    height: float
    truncation: Callable[[np.ndarray], float] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "direction", _as_unit(self.direction))
        d = len(self.direction)
        basis = np.asarray(self.basis, dtype=float)
        if basis.shape != (d - 1, d):
            raise ValueError(f"basis must have shape {(d - 1, d)}")
        gram = basis @ basis.T
        if not np.allclose(gram, np.eye(d - 1), atol=1e-10):
            raise ValueError("basis rows must be orthonormal")
        if not np.allclose(basis @ np.asarray(self.direction), 0.0, atol=1e-10):
            raise ValueError("basis rows must be orthogonal to the direction")
        object.__setattr__(self, "basis", basis)
        ivals = tuple((float(a), float(b)) for a, b in self.intervals)
        if len(ivals) != d - 1 or any(a > b for a, b in ivals):
            raise ValueError("need one ordered interval per basis axis")
        object.__setattr__(self, "intervals", ivals)
        if self.height <= 0.0:
            raise ValueError("height must be positive")

    @property
    def d(self) -> int:
        return len(self.direction)


def in_tube(x, spec: TubeSpec) -> bool:
    arr = _check_point(x, spec.d)
    if np.any(arr < 0.0):
        return False
    v = np.asarray(spec.direction)
    u = arr - np.asarray(spec.offset)
    resid = u - (u @ v) * v
    return float(np.linalg.norm(resid)) <= spec.epsilon


def in_cone(x, spec: ConeSpec) -> bool:
    arr = _check_point(x, spec.d)
    nrm = float(np.linalg.norm(arr))
    if nrm == 0.0 or np.any(arr < 0.0):
        return False
    cosang = float(arr @ np.asarray(spec.direction)) / nrm
    angle = math.acos(min(1.0, max(-1.0, cosang)))
    return angle < spec.half_angle


def in_box_window(x, spec: BoxWindow) -> bool:
    arr = _check_point(x, spec.d)
    for xi, vi, wi in zip(arr, spec.direction, spec.widths):
        lo = vi * spec.time
        if not (lo <= xi <= lo + wi):
            return False
    return True


def in_truncated_tube(x, spec: TruncatedTubeSpec) -> bool:
    arr = _check_point(x, spec.d)
    if np.any(arr < 0.0):
        return False
    v = np.asarray(spec.direction)
    t = float(arr @ v)
    u = arr - t * v
    coords = spec.basis @ u
    for c, (lo, hi) in zip(coords, spec.intervals):
        if not (lo <= c <= hi):
            return False
    return 0.0 <= t <= spec.height + spec.truncation(u)


def orthocomplement_basis(direction: Sequence[float]) -> np.ndarray:
    """Deterministic orthonormal basis (rows) of the hyperplane orthogonal to v."""
    v = np.asarray(_as_unit(direction, positive=False), dtype=float)
    _, _, vh = np.linalg.svd(v[None, :])
    return vh[1:]


def box_as_tube_difference(
    direction: Sequence[float],
    widths: Sequence[float],
    height: float,
) -> Tuple[TruncatedTubeSpec, TruncatedTubeSpec]:
    """Two truncated tubes whose set difference is the moving box at T = height.

    The line t -> t v + u meets the static box prod_i [0, eps_i] for
    t in [b2(u), b1(u)] with b2 = max_i(-u_i / v_i) and
    b1 = min_i((eps_i - u_i) / v_i); sliding the box to T v shifts both
    truncation profiles by T, so box membership is exactly
    "below T + b1" minus "below T + b2" (up to the measure-zero lower face).
    """
    v = np.asarray(_as_unit(direction), dtype=float)
    eps = np.asarray(widths, dtype=float)
    if eps.shape != v.shape or np.any(eps <= 0.0):
        raise ValueError("widths must be positive and match the direction dimension")
    basis = orthocomplement_basis(v)

    corners = []
    d = v.size
    for mask in range(1 << d):
        f = np.array([eps[i] if (mask >> i) & 1 else 0.0 for i in range(d)])
        corners.append(basis @ (f - (f @ v) * v))
    corners = np.array(corners)
    intervals = tuple((float(lo), float(hi)) for lo, hi in zip(corners.min(0), corners.max(0)))

    def b_upper(u: np.ndarray, _eps=eps, _v=v) -> float:
        return float(np.min((_eps - u) / _v))

    def b_lower(u: np.ndarray, _v=v) -> float:
        return float(np.max(-u / _v))

    upper = TruncatedTubeSpec(tuple(v), basis, intervals, height, b_upper)
    lower = TruncatedTubeSpec(tuple(v), basis, intervals, height, b_lower)
    return upper, lower


def region_id(spec) -> str:
    """Stable short identifier for CSV artifacts."""
    fmt = lambda xs: ",".join(format(float(x), ".6g") for x in xs)
    if isinstance(spec, TubeSpec):
        base = f"tube[v=({fmt(spec.direction)});eps={spec.epsilon:.6g}"
        if any(spec.offset):
            base += f";w=({fmt(spec.offset)})"
        return base + "]"
    if isinstance(spec, ConeSpec):
        return f"cone[v=({fmt(spec.direction)});theta={spec.half_angle:.6g}]"
    if isinstance(spec, BoxWindow):
        return f"box[v=({fmt(spec.direction)});eps=({fmt(spec.widths)})]"
    if isinstance(spec, TruncatedTubeSpec):
        return f"ttube[v=({fmt(spec.direction)});T={spec.height:.6g}]"
    raise TypeError(f"no region id for {type(spec).__name__}")
