"""Boundary conjugacy tables by angle-doubling pullback.

A table of level N holds the landing points of all dyadic angles k/2^N:
``points[k]`` is the image of exp(2*pi*i*k/2^N) under the conjugacy that
carries angle doubling on the circle to f_delta on its Julia set.  Dyadic
angles are strictly pre-periodic to the fixed angle 0, so the continuation
construction below is exact up to branch selection: each level seeds new
points as hint-guided quadratic preimages of the previous level, and
refinement sweeps confirm (or polish, when seeded from a neighbor table)
the semiconjugacy f(points[k]) = points[2k mod 2^N].
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import maps
from .errors import LevelExceededError, NoConvergenceError

MAX_LEVEL = 24
MAX_SWEEPS = 500


@dataclass(frozen=True)
class DyadicAngle:
    """The angle numerator/2^level in turns, canonically reduced."""

    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.numerator < (1 << self.level):
            raise ValueError(f"bad dyadic angle {self.numerator}/2^{self.level}")
        k, lev = self.numerator, self.level
        while lev > 0 and k % 2 == 0:
            if k == 0:
                lev = 0
                break
            k //= 2
            lev -= 1
        object.__setattr__(self, "numerator", k)
        object.__setattr__(self, "level", lev)

    @property
    def turns(self) -> float:
        return self.numerator / (1 << self.level)

    def doubled(self) -> "DyadicAngle":
        if self.level == 0:
            return self
        return DyadicAngle((2 * self.numerator) % (1 << self.level), self.level)


def anchor_angle(n: int) -> DyadicAngle:
    """The angle 1/2^(n+1) turns whose landing point anchors cylinder n."""
    return DyadicAngle(1, n + 1)


@dataclass(frozen=True, eq=False)
class BoettcherTable:
    delta: complex
    level: int
    points: np.ndarray      # shape (2^level,), complex
    tol: float
    residual: float

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.points)

    def diameter(self) -> float:
        re, im = self.points.real, self.points.imag
        return float(np.hypot(re.max() - re.min(), im.max() - im.min()))


def _seed_by_continuation(delta: complex, level: int) -> np.ndarray:
    """Exact level-by-level pullback seeding, orientation pinned at level 2."""
    qmap = maps.f_delta(delta)
    h = 1.0 + complex(delta)
    pts = np.array([0.0 + 0j, -h])
    if level == 0:
        return pts[:1]
    if level >= 2:
        # preimages of -(1+delta); pick the quarter-angle point so that the
        # triple (0, z_{1/4}, z_{1/2}) winds counterclockwise
        r = np.sqrt(np.complex128(h * h / 4.0 - h))
        wa, wb = -h / 2.0 + r, -h / 2.0 - r
        if (np.conj(wa) * (-h)).imag > 0:
            q14, q34 = wa, wb
        else:
            q14, q34 = wb, wa
        pts = np.array([0.0 + 0j, q14, -h, q34])
    for lev in range(3, level + 1):
        n_old = 1 << (lev - 1)
        new = np.empty(1 << lev, dtype=complex)
        new[0::2] = pts
        kk = np.arange(1, 1 << lev, 2)
        target = pts[kk % n_old]
        hint = 0.5 * (pts[(kk - 1) // 2] + pts[((kk + 1) // 2) % n_old])
        new[1::2] = maps.inverse_branch_array(qmap, target, hint)
        pts = new
    return pts


def build_table(delta: complex, level: int, tol: float = 1e-12,
                seed: BoettcherTable | np.ndarray | None = None,
                cache_dir: str | None = None) -> BoettcherTable:
    """Build (or load) the landing-point table at the given level.

    ``seed`` continues from an existing table at a nearby parameter (same
    level), which keeps branch choices locked during parameter scans.
    Raises NoConvergenceError when sweeps fail to stabilize, as happens for
    parameters whose Julia set is not a Jordan curve.
    """
    delta = complex(delta)
    if not 0 <= level <= MAX_LEVEL:
        raise ValueError(f"level must be in [0, {MAX_LEVEL}]")
    if cache_dir is not None:
        cached = load_cached_table(cache_dir, delta, level)
        if cached is not None:
            return cached

    if seed is None:
        pts = _seed_by_continuation(delta, level)
    else:
        pts = np.array(seed.points if isinstance(seed, BoettcherTable) else seed,
                       dtype=complex)
        if len(pts) != 1 << level:
            raise ValueError("seed size does not match level")

    qmap = maps.f_delta(delta)
    n = 1 << level
    idx2 = (2 * np.arange(n)) % n
    scale = 1.0
    for _ in range(MAX_SWEEPS):
        new = maps.inverse_branch_array(qmap, pts[idx2], pts)
        new[0] = 0.0
        disp = float(np.max(np.abs(new - pts)))
        pts = new
        re, im = pts.real, pts.imag
        scale = max(float(np.hypot(re.max() - re.min(), im.max() - im.min())), 1e-300)
        if disp < tol * scale:
            break
    else:
        raise NoConvergenceError(
            f"pullback sweeps did not stabilize for delta={delta}")

    residual = float(np.max(np.abs(maps.evaluate(qmap, pts) - pts[idx2])))
    if not np.isfinite(residual) or residual >= tol * scale:
        raise NoConvergenceError(
            f"semiconjugacy residual {residual} above {tol * scale} "
            f"for delta={delta}")
    if level >= 1 and np.unique(pts).size < pts.size:
        # a collapsed (e.g. constant) table satisfies the semiconjugacy
        # trivially; landing points of distinct angles must stay distinct
        raise NoConvergenceError(
            f"pullback degenerated to repeated points for delta={delta}")
    table = BoettcherTable(delta, level, pts, tol, residual)
    if cache_dir is not None:
        save_table(cache_dir, table)
    return table


def landing_point(table: BoettcherTable, angle: DyadicAngle) -> complex:
    """Exact table lookup of the landing point of a dyadic angle."""
    if angle.level > table.level:
        raise LevelExceededError(
            f"angle level {angle.level} exceeds table level {table.level}")
    return complex(table.points[angle.numerator << (table.level - angle.level)])


def anchor_point(table: BoettcherTable, n: int) -> complex:
    """Landing point of the angle 1/2^(n+1): the cylinder-n anchor."""
    return landing_point(table, anchor_angle(n))


@dataclass(frozen=True)
class Cylinder:
    index: int
    endpoints: tuple[complex, complex]
    size: float


def cylinders(table: BoettcherTable, n_max: int) -> list[Cylinder]:
    """Cylinders 0..n_max with endpoints (z_n, z_{n+1}) and their sizes."""
    if n_max + 1 > table.level - 1:
        raise LevelExceededError(
            f"cylinder {n_max} needs level >= {n_max + 2}, have {table.level}")
    out = []
    for n in range(n_max + 1):
        a = anchor_point(table, n)
        b = anchor_point(table, n + 1)
        out.append(Cylinder(n, (a, b), abs(a - b)))
    return out


def julia_cloud(table: BoettcherTable) -> np.ndarray:
    """All table points in angle order (a plottable boundary sample)."""
    return table.points.copy()


# ---------------------------------------------------------------------------
# disk cache: one CSV per (delta rounded to 1e-15, level)

def _cache_name(delta: complex, level: int) -> str:
    re = round(delta.real, 15)
    im = round(delta.imag, 15)
    return f"boettcher_{re!r}_{im!r}_N{level}.csv".replace("-", "m")


def save_table(cache_dir: str, table: BoettcherTable) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, _cache_name(table.delta, table.level))
    with open(path, "w", newline="\n") as fh:
        fh.write("delta_re,delta_im,level,tol,residual\n")
        fh.write("%.17g,%.17g,%d,%.17g,%.17g\n"
                 % (table.delta.real, table.delta.imag, table.level,
                    table.tol, table.residual))
        fh.write("k,re,im\n")
        for k, z in enumerate(table.points):
            fh.write("%d,%.17g,%.17g\n" % (k, z.real, z.imag))
    return path


def load_cached_table(cache_dir: str, delta: complex,
                      level: int) -> BoettcherTable | None:
    path = os.path.join(cache_dir, _cache_name(delta, level))
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        vals = fh.readline().strip().split(",")
        meta = dict(zip(header, vals))
        fh.readline()  # column header
        pts = np.empty(1 << level, dtype=complex)
        for line in fh:
            k, re, im = line.strip().split(",")
            pts[int(k)] = complex(float(re), float(im))
    return BoettcherTable(complex(float(meta["delta_re"]), float(meta["delta_im"])),
                          int(meta["level"]), pts,
                          float(meta["tol"]), float(meta["residual"]))
