"""Discrete Schwarz symmetrization and the iterative polarization scheme.

All routines act on nonnegative :class:`~glskit.measure.GridFunction` values
over origin-symmetric grids.  The *canonical cell order* sorts cells by
distance to the origin and breaks ties lexicographically on the center
coordinates; the symmetrization hands the largest values to the earliest
cells in that order.

A polarizer is a reflection ``sigma`` across a hyperplane whose closed
halfspace ``H`` contains the origin; the two-point rearrangement puts
``max(u(x), u(sigma x))`` at ``x in H`` and the min at the mirror.  For
hyperplanes through the origin ``H`` is the lexicographically smaller side.
Together with the tie-break above this makes the symmetrized function a
fixed point of every polarizer in the family.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .measure import GridFunction, exact_lp_norm
from .norm import gls_norm

__all__ = [
    "Halfspace",
    "PolarizationRun",
    "canonical_order",
    "schwarz_symmetrize",
    "polarizer_family",
    "lattice_family",
    "bisector_family",
    "polarize",
    "is_family_fixed_point",
    "schaftingen_run",
    "gradient_seminorm",
]


def _primitive(vec) -> tuple[int, ...]:
    v = np.asarray(vec, dtype=np.int64)
    if not v.any():
        raise ValueError("normal must be nonzero")
    v = v // math.gcd(*(abs(int(x)) for x in v))
    if v[np.flatnonzero(v)[0]] < 0:
        v = -v
    return tuple(int(x) for x in v)


@dataclass(frozen=True)
class Halfspace:
    """Reflecting hyperplane ``normal . c = shift`` in doubled lattice units.

    ``c`` are cell centers in units of ``h/2``; ``normal`` is a primitive
    integer vector whose first nonzero entry is positive.  The closed
    halfspace containing the origin is the polarization side; when the plane
    passes through the origin it is the side ``normal . c < 0``, which is the
    lexicographically smaller one.

    The reflection ``c -> c - 2k normal`` with ``k = (normal.c - shift)/|normal|^2``
    lands on a lattice cell only when ``k`` is an integer.  Coordinate planes
    and diagonals pair every cell; other directions pair a sublattice, and
    cells without an exact mirror cell are left alone.
    """

    normal: tuple[int, ...]
    shift: int = 0

    def __post_init__(self):
        norm = _primitive(self.normal)
        if norm != tuple(self.normal):
            raise ValueError(f"normal {self.normal} must be primitive with positive leading entry")
        if int(self.shift) != self.shift:
            raise ValueError("shift must be an integer number of half cells")

    @classmethod
    def coordinate(cls, axis: int, shift: int = 0, ndim: int = 1) -> "Halfspace":
        m = [0] * ndim
        m[axis] = 1
        return cls(tuple(m), shift)

    @classmethod
    def diagonal(cls, i: int, j: int, sign: int = 1, shift: int = 0, ndim: int = 2) -> "Halfspace":
        """The plane ``x_i - sign * x_j = shift * h/2``."""
        m = [0] * ndim
        m[i], m[j] = 1, -sign
        return cls(_primitive(m), shift if m[min(i, j)] > 0 else -shift)

    @property
    def kind(self) -> str:
        nz = [abs(x) for x in self.normal if x]
        if nz == [1]:
            return "coordinate"
        if nz == [1, 1]:
            return "diagonal"
        return "oblique"

    def offset(self, h: float) -> float:
        """Signed distance of the plane from the origin in physical units."""
        return self.shift * h / 2.0 / math.sqrt(sum(x * x for x in self.normal))

    @property
    def side(self) -> str:
        return "contains_origin" if self.shift != 0 else "negative_side_default"

    def label(self) -> str:
        return f"n={self.normal},t={self.shift}"


def _check_grid(u: GridFunction):
    if not u.partition.is_grid:
        raise ValueError("rearrangement needs a grid partition")


def _check_nonneg(u: GridFunction):
    if np.any(u.values < 0):
        raise ValueError("rearrangement needs nonnegative values")


def canonical_order(partition) -> np.ndarray:
    """Cell indices by (|center| ascending, center lexicographically ascending)."""
    lat = partition.lattice
    r2 = (lat.astype(np.int64) ** 2).sum(axis=1)
    keys = [lat[:, k] for k in range(lat.shape[1] - 1, -1, -1)] + [r2]
    return np.lexsort(keys)


def schwarz_symmetrize(u: GridFunction) -> GridFunction:
    """Radially decreasing rearrangement: same multiset of values, largest nearest the origin."""
    _check_grid(u)
    _check_nonneg(u)
    order = canonical_order(u.partition)
    out = np.empty_like(u.values)
    out[order] = np.sort(u.values)[::-1]
    return u.with_values(out)


# --- polarization ------------------------------------------------------------


@lru_cache(maxsize=16384)
def _pairs(dims: tuple, H: Halfspace):
    """(cells strictly inside H, their mirror cells) for every exactly paired cell.

    A coordinate mirror falling outside the grid means the exterior value 0,
    and ``max(u, 0) = u`` leaves the inside cell unchanged, so such cells are
    simply dropped; the mirror of an outside cell always lies closer to the
    origin.
    """
    from .measure import MeasuredPartition

    if len(H.normal) != len(dims):
        raise ValueError(f"{len(H.normal)}-d halfspace on a {len(dims)}-d grid")
    lat = MeasuredPartition.grid(dims).lattice.astype(np.int64)
    m = np.asarray(H.normal, dtype=np.int64)
    t = int(H.shift)
    dot = lat @ m
    num = dot - t
    mm = int(m @ m)
    exact = num % mm == 0
    ref = lat - 2 * (num // mm)[:, None] * m[None, :]
    inside = dot < t if t > 0 else (dot > t if t < 0 else dot < 0)
    n = np.asarray(dims, dtype=np.int64)
    idx = (ref + (n - 1)) // 2
    ok = exact & inside & np.all((idx >= 0) & (idx < n), axis=1)
    src = np.flatnonzero(ok)
    dst = np.ravel_multi_index(idx[src].T, dims) if len(src) else src
    src.setflags(write=False)
    return src, np.asarray(dst)


def polarize(u: GridFunction, H: Halfspace) -> GridFunction:
    """Two-point rearrangement across ``H``: the origin side of each mirror pair takes the max."""
    _check_grid(u)
    _check_nonneg(u)
    x, y = _pairs(u.partition.dims, H)
    v = u.values.copy()
    v[x] = np.maximum(u.values[x], u.values[y])
    v[y] = np.minimum(u.values[x], u.values[y])
    return u.with_values(v)


def lattice_family(dims) -> list[Halfspace]:
    """Coordinate planes at every pairing shift and diagonals ``x_i = +/- x_j`` with their translates."""
    dims = tuple(dims)
    d = len(dims)
    fam = []
    for k, n in enumerate(dims):
        for s in range(-(n - 2), n - 1):
            fam.append(Halfspace.coordinate(k, s, d))
    for i, j in combinations(range(d), 2):
        if (dims[i] - dims[j]) % 2 or min(dims[i], dims[j]) < 2:
            continue
        reach = dims[i] + dims[j] - 3
        for sign in (1, -1):
            for s in range(-reach, reach + 1):
                if s % 2 == 0:
                    fam.append(Halfspace.diagonal(i, j, sign, s, d))
    return fam


def bisector_family(dims) -> list[Halfspace]:
    """Perpendicular bisectors of all cell pairs at equal or adjacent distance levels.

    A function left unchanged by all of these is ordered by distance to the
    origin (lexicographically within a level), i.e. equals its symmetrization.
    """
    from .measure import MeasuredPartition

    lat = MeasuredPartition.grid(dims).lattice.astype(np.int64)
    r2 = (lat ** 2).sum(axis=1)
    levels = np.unique(r2)
    groups = [lat[r2 == lev] for lev in levels]
    planes = set()
    for k, grp in enumerate(groups):
        nxt = np.concatenate([grp, groups[k + 1]]) if k + 1 < len(groups) else grp
        diff = nxt[None, :, :] - grp[:, None, :]
        mid = nxt[None, :, :] + grp[:, None, :]
        for dv, sv in zip(diff.reshape(-1, lat.shape[1]), mid.reshape(-1, lat.shape[1])):
            if not dv.any():
                continue
            m = _primitive(dv)
            planes.add((m, int(np.dot(m, sv)) // 2))
    return [Halfspace(m, t) for m, t in sorted(planes)]


def polarizer_family(dims, exact: bool = True) -> list[Halfspace]:
    """Polarizers used by :func:`schaftingen_run`.

    The lattice reflections (coordinate planes and diagonals) move mass
    quickly but their common fixed points in 2-d and higher need not be
    symmetric; ``exact=True`` appends the distance-level bisectors, which
    pins the only common fixed point to the symmetrization.  In 1-d the
    bisectors are already coordinate planes.
    """
    return list(_family(tuple(int(n) for n in dims), exact))


@lru_cache(maxsize=64)
def _family(dims: tuple, exact: bool) -> tuple:
    fam = lattice_family(dims)
    if exact and len(dims) > 1:
        seen = set(fam)
        fam += [H for H in bisector_family(dims) if H not in seen]
    return tuple(H for H in fam if len(_pairs(dims, H)[0]))


def is_family_fixed_point(u: GridFunction, family=None) -> bool:
    dims = u.partition.dims
    for H in family or polarizer_family(dims):
        x, y = _pairs(dims, H)
        if np.any(u.values[x] < u.values[y]):
            return False
    return True


@dataclass
class PolarizationRun:
    iterations: int
    p_list: list[float]
    nu_labels: list[str]
    changed: list[bool] = field(repr=False)
    lp_distance_trace: dict = field(repr=False)
    gls_distance_trace: dict = field(repr=False)
    potential_trace: list[float] = field(repr=False)
    norm_residual: float
    terminal_fixed_point: bool
    final: GridFunction = field(repr=False)
    target: GridFunction = field(repr=False)
    strategy: str = "sweep"
    seed: int | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "changed"] + [f"lp_dist_{p:g}" for p in self.p_list]
                   + [f"gls_dist_{lab}" for lab in self.nu_labels] + ["potential"])
        for i in range(len(self.potential_trace)):
            w.writerow([i, int(self.changed[i])]
                       + [repr(self.lp_distance_trace[p][i]) for p in self.p_list]
                       + [repr(self.gls_distance_trace[lab][i]) for lab in self.nu_labels]
                       + [repr(self.potential_trace[i])])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "strategy": self.strategy,
            "seed": self.seed,
            "terminal_fixed_point": self.terminal_fixed_point,
            "norm_residual": self.norm_residual,
            "final_lp_distance": {f"{p:g}": self.lp_distance_trace[p][-1] for p in self.p_list},
            "initial_lp_distance": {f"{p:g}": self.lp_distance_trace[p][0] for p in self.p_list},
        }


def schaftingen_run(u: GridFunction, strategy: str = "sweep", seed: int | None = None,
                    max_iter: int = 200000, p_list=(2.0,), nu_list=(), family=None) -> PolarizationRun:
    """Iterate polarizations from the family toward ``schwarz_symmetrize(u)``.

    ``strategy="sweep"`` cycles through the family in a fixed order;
    ``strategy="random"`` draws polarizers uniformly with ``seed``.  One
    iteration is one polarization.  The run stops once a whole family pass
    leaves the function unchanged (``terminal_fixed_point``); hitting
    ``max_iter`` first is not an error.

    Row 0 of every trace describes ``u`` itself.
    """
    _check_grid(u)
    _check_nonneg(u)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if strategy not in ("sweep", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    dims = u.partition.dims
    family = list(family) if family is not None else polarizer_family(dims)
    target = schwarz_symmetrize(u)
    order = canonical_order(u.partition)
    weight = np.empty(u.partition.size)
    weight[order] = u.partition.size - np.arange(u.partition.size)
    weight = weight * u.partition.masses
    p_list = [float(p) for p in p_list]
    norms0 = {p: exact_lp_norm(u, p) for p in p_list}
    rng = np.random.default_rng(seed) if strategy == "random" else None

    lp_tr = {p: [] for p in p_list}
    gls_tr = {nu.label: [] for nu in nu_list}
    pot, changed_tr = [], []
    resid = 0.0
    v = u.values.copy()

    def record(changed):
        if pot and not changed:
            for tr in (*lp_tr.values(), *gls_tr.values(), pot):
                tr.append(tr[-1])
            changed_tr.append(False)
            return
        cur = u.with_values(v)
        diff = u.with_values(np.abs(v - target.values))
        for p in p_list:
            lp_tr[p].append(exact_lp_norm(diff, p))
        for nu in nu_list:
            gls_tr[nu.label].append(gls_norm(diff, nu).value if diff.values.any() else 0.0)
        pot.append(math.fsum((v * weight).tolist()))
        changed_tr.append(changed)
        nonlocal resid
        for p in p_list:
            if norms0[p] > 0:
                resid = max(resid, abs(exact_lp_norm(cur, p) - norms0[p]) / norms0[p])

    record(False)
    quiet = 0
    fixed = not family
    it = 0
    pairs = [_pairs(dims, H) for H in family]
    draws = iter(())
    while it < max_iter and not fixed:
        if rng is None:
            x, y = pairs[it % len(pairs)]
        else:
            j = next(draws, None)
            if j is None:
                draws = iter(rng.integers(len(pairs), size=4096).tolist())
                j = next(draws)
            x, y = pairs[j]
        swap = v[x] < v[y]
        ch = bool(swap.any())
        if ch:
            xs, ys = x[swap], y[swap]
            v[xs], v[ys] = v[ys], v[xs].copy()
        it += 1
        record(ch)
        quiet = 0 if ch else quiet + 1
        if quiet >= len(family):
            if rng is None or is_family_fixed_point(u.with_values(v), family):
                fixed = True
                break
            quiet = 0
    return PolarizationRun(it, p_list, list(gls_tr), changed_tr, lp_tr, gls_tr, pot, resid,
                           fixed, u.with_values(v), target, strategy, seed)


# --- gradient -----------------------------------------------------------------


def gradient_seminorm(u: GridFunction, p: float) -> float:
    """``(sum |grad u|^p h^d)^(1/p)`` with forward differences and zero padding on every side.

    The difference lattice extends one cell past the grid in each negative
    direction so that the jumps into and out of the support are both counted.
    """
    if not u.partition.is_grid:
        raise ValueError("gradient needs a grid partition")
    if not p >= 1:
        raise ValueError("exponent must be >= 1")
    dims, h = u.partition.dims, u.partition.h
    padded = np.pad(u.as_array(), 1)
    base = tuple(slice(0, n + 1) for n in dims)
    sq = np.zeros(tuple(n + 1 for n in dims))
    for k in range(len(dims)):
        shifted = tuple(slice(1, n + 2) if j == k else slice(0, n + 1) for j, n in enumerate(dims))
        sq += ((padded[shifted] - padded[base]) / h) ** 2
    g = np.sqrt(sq).ravel()
    big = g.max()
    if big == 0:
        return 0.0
    return float(big * (math.fsum(((g / big) ** p).tolist()) * h ** len(dims)) ** (1.0 / p))
