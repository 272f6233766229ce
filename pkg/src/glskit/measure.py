"""Functions on measure spaces: simple functions on measured cells and moment curves.

Two representations are used throughout:

* :class:`GridFunction` -- finitely many cells with positive masses and one
  real value per cell.  Grid partitions are origin-symmetric lattices with
  equal cell masses ``h**d``; cell centers are stored in doubled integer
  units (``center = lattice * h / 2``) so that distances and reflections
  are exact.
* :class:`MomentCurve` -- an analytic map ``p -> |f|_p`` for functions known
  only through their absolute moments (standard Gaussian, its truncations
  and tails).

On a fixed partition a set of mass exactly ``mu(A)/2`` need not exist, so
small-set restrictions round the admissible mass down to whole cells; the
halving property of a diffuse measure is recovered only under refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammainc, gammaincc, gammaln, ndtri

__all__ = [
    "MeasuredPartition",
    "GridFunction",
    "MomentCurve",
    "QuadratureError",
    "lp_norm",
    "lp_norms",
    "gaussian_moment_curve",
    "gaussian_tail_curve",
    "gaussian_band_curve",
    "gaussian_quantile_function",
    "distance_in_measure",
    "superlevel_restriction",
    "indicator",
    "read_gridfn",
    "write_gridfn",
]


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach its error target."""


@dataclass(frozen=True, eq=False)
class MeasuredPartition:
    masses: np.ndarray
    centers: np.ndarray | None = None
    dims: tuple[int, ...] | None = None
    h: float | None = None
    lattice: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        m = np.asarray(self.masses, float)
        if m.ndim != 1 or len(m) == 0:
            raise ValueError("masses must be a non-empty 1-d array")
        if np.any(~(m > 0)) or not np.all(np.isfinite(m)):
            raise ValueError("every cell mass must be finite and positive")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @classmethod
    def abstract(cls, masses: Sequence[float]) -> "MeasuredPartition":
        return cls(np.asarray(masses, float))

    @classmethod
    def uniform(cls, n: int, total_mass: float = 1.0) -> "MeasuredPartition":
        return cls(np.full(n, total_mass / n))

    @classmethod
    def grid(cls, dims: Sequence[int] | int, h: float = 1.0) -> "MeasuredPartition":
        """Origin-symmetric axis-aligned lattice, cells in row-major order."""
        dims = (int(dims),) if np.isscalar(dims) else tuple(int(n) for n in dims)
        if not dims or any(n < 1 for n in dims):
            raise ValueError(f"bad grid dims {dims}")
        if not h > 0:
            raise ValueError("grid spacing must be positive")
        axes = [2 * np.arange(n) - (n - 1) for n in dims]
        lattice = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        lattice.setflags(write=False)
        ncell = int(np.prod(dims))
        return cls(np.full(ncell, float(h) ** len(dims)), lattice * (h / 2.0), dims, float(h), lattice)

    @property
    def is_grid(self) -> bool:
        return self.dims is not None

    @property
    def size(self) -> int:
        return len(self.masses)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    @property
    def ndim(self) -> int:
        return len(self.dims) if self.dims else 0

    def compatible(self, other: "MeasuredPartition") -> bool:
        if self is other:
            return True
        return (
            self.size == other.size
            and self.dims == other.dims
            and self.h == other.h
            and np.array_equal(self.masses, other.masses)
        )


class GridFunction:
    """Simple function: one finite value per cell of a :class:`MeasuredPartition`."""

    __array_priority__ = 100

    def __init__(self, partition: MeasuredPartition, values):
        values = np.array(values, dtype=float).ravel()
        if values.shape != (partition.size,):
            raise ValueError(f"expected {partition.size} values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.setflags(write=False)
        self.partition = partition
        self.values = values

    def __repr__(self):
        return f"GridFunction(cells={self.partition.size}, dims={self.partition.dims})"

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.partition, values)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if not self.partition.compatible(other.partition):
                raise ValueError("partition mismatch")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._other(other))

    def __sub__(self, other):
        return self.with_values(self.values - self._other(other))

    def __mul__(self, c):
        return self.with_values(self.values * self._other(c))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def as_array(self) -> np.ndarray:
        """Values reshaped to the grid dims (flat for abstract partitions)."""
        dims = self.partition.dims
        return self.values.reshape(dims) if dims else self.values.copy()


@dataclass(frozen=True)
class MomentCurve:
    """Analytic map ``p -> |f|_p``.

    ``log_moment`` returns ``log int |f|^p`` (vectorised over ``p``); working
    with the logarithm keeps large exponents representable.
    """

    family: str
    log_moment: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    mass_one: bool = True
    label: str = ""
    params: tuple = ()

    def __call__(self, p):
        return self.eval(p)

    def eval(self, p):
        arr = np.asarray(p, float)
        if np.any(arr < 1):
            raise ValueError("exponent must be >= 1")
        with np.errstate(divide="ignore"):
            out = np.exp(np.asarray(self.log_moment(arr), float) / arr)
        return float(out) if np.ndim(p) == 0 else out

    def scaled(self, c: float) -> "MomentCurve":
        """Curve of ``c * f``."""
        c = abs(float(c))
        base = self.log_moment
        if c == 0:
            return MomentCurve(self.family, lambda p: np.full(np.shape(p), -np.inf), self.mass_one,
                               f"0*{self.label}", self.params)
        logc = math.log(c)
        return MomentCurve(self.family, lambda p: base(p) + p * logc, self.mass_one,
                           f"{c:g}*{self.label}", self.params)

    @classmethod
    def tabulated(cls, ps, norms, a: float = 1.0, b: float = math.inf, label: str = "tabulated",
                  mass_one: bool = True) -> "MomentCurve":
        from .psi import LogLinearTable

        table = LogLinearTable(ps, norms, a, b)
        return cls("tabulated", lambda p: p * np.log(table(p)), mass_one, label)

    @classmethod
    def from_callable(cls, norm_fn: Callable, label: str = "tabulated", mass_one: bool = True) -> "MomentCurve":
        """Wrap any positive vectorised ``p -> |f|_p`` (e.g. a psi-function)."""
        return cls("tabulated", lambda p: p * np.log(np.asarray(norm_fn(p), float)), mass_one, label)


def lp_norms(f, ps) -> np.ndarray:
    """Vectorised :func:`lp_norm` over an array of exponents."""
    ps = np.atleast_1d(np.asarray(ps, float))
    if np.any(~(ps >= 1)) or np.any(np.isinf(ps)):
        raise ValueError("exponents must be finite and >= 1")
    if isinstance(f, MomentCurve):
        return np.atleast_1d(f.eval(ps))
    v = np.abs(f.values)
    big = v.max() if v.size else 0.0
    if big == 0:
        return np.zeros_like(ps)
    nz = v > 0
    with np.errstate(divide="ignore"):  # ratios that underflow to 0 contribute nothing
        logr = np.log(v[nz] / big)
    logm = np.log(f.partition.masses[nz])
    # log sum_i mu_i (v_i/max)^p, with the largest term pulled out
    terms = ps[:, None] * logr[None, :] + logm[None, :]
    top = terms.max(axis=1)
    lse = top + np.log(np.exp(terms - top[:, None]).sum(axis=1))
    return big * np.exp(lse / ps)


def lp_norm(f, p: float) -> float:
    """``(int |f|^p dmu)^(1/p)`` for a GridFunction or MomentCurve, ``p >= 1``."""
    if not p >= 1 or math.isinf(p):
        raise ValueError(f"exponent must be finite and >= 1, got {p}")
    return float(lp_norms(f, [p])[0])


def exact_lp_norm(f: GridFunction, p: float) -> float:
    """Overflow-safe ``lp_norm`` with a correctly rounded sum of terms.

    Equal multisets of ``|v_i|^p mu_i`` give bit-identical results, which the
    polarization traces rely on.
    """
    v = np.abs(f.values)
    big = float(v.max()) if v.size else 0.0
    if big == 0:
        return 0.0
    s = math.fsum(((v / big) ** p * f.partition.masses).tolist())
    return big * s ** (1.0 / p)


# --- Gaussian moment curves --------------------------------------------------

_LOG_SQRT_PI = 0.5 * math.log(math.pi)


def _log_gauss_moment(p):
    """``log E|N|^p = (p/2) log 2 + log Gamma((p+1)/2) - log sqrt(pi)``."""
    p = np.asarray(p, float)
    return 0.5 * p * math.log(2.0) + gammaln(0.5 * (p + 1.0)) - _LOG_SQRT_PI


def gaussian_moment_curve() -> MomentCurve:
    """``|xi|_p`` for a standard normal ``xi`` on a probability space."""
    return MomentCurve("gaussian", _log_gauss_moment, True, "gaussian")


_TINY = 1e-280


def _log_p_series(s: float, x: float) -> float:
    """``log P(s, x)`` from the power series; used where ``P`` underflows (``x`` well below ``s``)."""
    if x == 0:
        return -math.inf
    term, total, k = 1.0, 1.0, 0
    while term > 1e-17 * total:
        k += 1
        term *= x / (s + k)
        total += term
        if k > 100000:
            raise QuadratureError(f"incomplete gamma series stalled at s={s}, x={x}")
    return s * math.log(x) - x - math.lgamma(s + 1.0) + math.log(total)


def _log_q_contfrac(s: float, x: float) -> float:
    """``log Q(s, x)`` by Lentz's continued fraction; used where ``Q`` underflows (``x`` well above ``s``)."""
    fpmin = 1e-300
    b = x + 1.0 - s
    c = 1.0 / fpmin
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        d = fpmin if abs(d) < fpmin else d
        c = b + an / c
        c = fpmin if abs(c) < fpmin else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise QuadratureError(f"incomplete gamma continued fraction stalled at s={s}, x={x}")
    return s * math.log(x) - x - math.lgamma(s) + math.log(h)


def _log_reg_gamma(s, x, upper: bool) -> np.ndarray:
    """Elementwise ``log P(s, x)`` or ``log Q(s, x)``, robust where the value underflows."""
    s, x = np.broadcast_arrays(np.asarray(s, float), np.asarray(x, float))
    val = gammaincc(s, x) if upper else gammainc(s, x)
    with np.errstate(divide="ignore"):
        out = np.array(np.log(val), dtype=float)
    small = val < _TINY
    if np.any(small):
        fallback = _log_q_contfrac if upper else _log_p_series
        flat, fs, fx = out.reshape(-1), s.reshape(-1), x.reshape(-1)
        for i in np.flatnonzero(small.reshape(-1)):
            flat[i] = fallback(float(fs[i]), float(fx[i]))
        out = flat.reshape(out.shape)
    return out


def _log_reg_gamma_scalar(s: float, x: float, upper: bool) -> float:
    val = float(gammaincc(s, x) if upper else gammainc(s, x))
    if val < _TINY:
        return _log_q_contfrac(s, x) if upper else _log_p_series(s, x)
    return math.log(val)


def _log_band_fraction_scalar(p: float, lo: float, hi: float) -> float:
    s = 0.5 * (p + 1.0)
    xlo, xhi = 0.5 * lo * lo, 0.5 * hi * hi
    if math.isinf(hi):
        return _log_reg_gamma_scalar(s, xlo, True)
    if not hi > lo:
        return -math.inf
    if lo == 0:
        return _log_reg_gamma_scalar(s, xhi, False)
    if float(gammainc(s, xhi)) < 0.5:
        big, small = _log_reg_gamma_scalar(s, xhi, False), _log_reg_gamma_scalar(s, xlo, False)
    else:
        big, small = _log_reg_gamma_scalar(s, xlo, True), _log_reg_gamma_scalar(s, xhi, True)
    if math.isinf(big):
        return -math.inf
    return big + math.log1p(-math.exp(small - big))


def _log_diff(big, small):
    """``log(exp(big) - exp(small))`` for ``big >= small``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.isneginf(big), -np.inf, big + np.log1p(-np.exp(small - big)))


def _log_band_fraction(p, lo, hi):
    """``log`` of the share of ``E|N|^p`` carried by ``lo < |N| <= hi`` (regularised incomplete gamma).

    Broadcasts over ``p``, ``lo`` and ``hi``.
    """
    if np.size(p) == 1 and np.ndim(lo) == 0 and np.ndim(hi) == 0:
        val = _log_band_fraction_scalar(float(np.ravel(p)[0]), float(lo), float(hi))
        return val if np.ndim(p) == 0 else np.full(np.shape(p), val)
    p, lo, hi = np.broadcast_arrays(np.asarray(p, float), np.asarray(lo, float), np.asarray(hi, float))
    s = 0.5 * (p + 1.0)
    xlo, xhi = 0.5 * lo * lo, 0.5 * hi * hi
    out = np.full(p.shape, -np.inf)
    tail = np.isinf(hi)
    if tail.any():
        out[tail] = _log_reg_gamma(s[tail], xlo[tail], upper=True)
    head = ~tail & (lo == 0) & (hi > 0)
    if head.any():
        out[head] = _log_reg_gamma(s[head], xhi[head], upper=False)
    band = ~tail & (lo > 0) & (hi > lo)
    if band.any():
        sb, xl, xh = s[band], xlo[band], xhi[band]
        lower = _log_diff(_log_reg_gamma(sb, xh, False), _log_reg_gamma(sb, xl, False))
        upper = _log_diff(_log_reg_gamma(sb, xl, True), _log_reg_gamma(sb, xh, True))
        # pick the difference with less cancellation
        out[band] = np.where(gammainc(sb, xh) < 0.5, lower, upper)
    return out if out.ndim else float(out)


def gaussian_band_lp(p: float, lo, hi) -> np.ndarray:
    """``|xi 1(lo < |xi| <= hi)|_p`` vectorised over band edges."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
    logm = _log_gauss_moment(p) + _log_band_fraction(p, lo, hi)
    return np.exp(np.asarray(logm) / p)


def _log_band_moment_quad(p: float, lo: float, hi: float, rtol: float = 1e-10) -> float:
    """``log E[|N|^p ; lo < |N| <= hi]`` by adaptive quadrature around the integrand peak."""
    peak = min(max(math.sqrt(p), lo), hi)
    logpeak = p * math.log(peak) - 0.5 * peak * peak if peak > 0 else 0.0

    def g(x):
        if x <= 0:
            return 0.0
        return math.exp(p * math.log(x) - 0.5 * x * x - logpeak)

    upper = min(hi, max(lo, peak) + 40.0)
    pts = [peak] if lo < peak < upper else None
    val, err = integrate.quad(g, lo, upper, points=pts, epsabs=0.0, epsrel=rtol, limit=200)
    if hi > upper:
        tail, terr = integrate.quad(g, upper, hi, epsabs=0.0, epsrel=rtol, limit=200)
        val, err = val + tail, err + terr
    if not val > 0:
        return -math.inf
    if err > 1e-8 * val:
        raise QuadratureError(f"quadrature error {err:.3g} vs value {val:.3g} at p={p}")
    return logpeak + math.log(2.0 * val) - 0.5 * math.log(2.0 * math.pi)


def gaussian_band_curve(lo: float, hi: float = math.inf, method: str = "gamma") -> MomentCurve:
    """Moment curve of ``xi * 1(lo < |xi| <= hi)``.

    ``method="gamma"`` uses the regularised incomplete gamma function;
    ``method="quad"`` integrates ``x^p phi(x)`` adaptively and raises
    :class:`QuadratureError` when the error target is missed.
    """
    if not 0 <= lo <= hi:
        raise ValueError(f"need 0 <= lo <= hi, got lo={lo}, hi={hi}")
    if method == "gamma":
        def log_moment(p):
            return _log_gauss_moment(p) + _log_band_fraction(p, lo, hi)
    elif method == "quad":
        def log_moment(p):
            arr = np.asarray(p, float)
            flat = [_log_band_moment_quad(float(q), lo, hi) for q in arr.ravel()]
            return np.reshape(flat, arr.shape)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MomentCurve("gaussian_band", log_moment, True, f"gaussian_band({lo:g},{hi:g})", (lo, hi))


def gaussian_tail_curve(n: float, kind: str = "tail", method: str = "gamma") -> MomentCurve:
    """``xi * 1(|xi| > n)`` (``kind="tail"``) or ``xi * 1(|xi| <= n)`` (``kind="truncated"``)."""
    if not n >= 0:
        raise ValueError(f"threshold must be >= 0, got {n}")
    if kind == "tail":
        curve = gaussian_band_curve(n, math.inf, method)
    elif kind == "truncated":
        curve = gaussian_band_curve(0.0, n, method)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return MomentCurve(f"gaussian_{kind}", curve.log_moment, True, f"gaussian_{kind}({n:g})", (n,))


def gaussian_quantile_function(cells: int) -> GridFunction:
    """Standard normal realised on [0, 1] with ``cells`` equal masses: value = quantile at cell midpoint."""
    part = MeasuredPartition.uniform(cells)
    return GridFunction(part, ndtri((np.arange(cells) + 0.5) / cells))


# --- distances and restrictions ----------------------------------------------


def distance_in_measure(f: GridFunction, g: GridFunction) -> float:
    """Ky Fan distance ``inf{eps > 0 : mu{|f - g| > eps} < eps}``, exact on simple functions."""
    if not f.partition.compatible(g.partition):
        raise ValueError("partition mismatch")
    d = np.abs(f.values - g.values)
    masses = f.partition.masses
    levels, inv = np.unique(d, return_inverse=True)
    levels = levels[::-1]  # descending distinct values
    mass_at = np.bincount(inv, weights=masses, minlength=len(levels))[::-1]
    if levels[0] == 0:
        return 0.0
    best = float(levels[0])  # mu{|d| > eps} = 0 once eps >= max|d|
    cum = 0.0
    for k, lev in enumerate(levels):
        if lev == 0:
            break
        cum += mass_at[k]
        below = float(levels[k + 1]) if k + 1 < len(levels) else 0.0
        # on [below, lev): mu{|d| > eps} = cum
        cand = max(cum, below)
        if cand < lev:
            best = min(best, cand)
    return best


def superlevel_restriction(f: GridFunction, delta: float) -> GridFunction:
    """``f * 1_A`` for the worst admissible set ``A`` with ``mu(A) <= delta``.

    Cells are taken in order of decreasing ``|f|`` (ties by index) while the
    cumulative mass stays within ``delta``; the first cell that does not fit
    ends the set, so ``A`` is always a superlevel set of ``|f|``.  With equal
    cell masses this ``A`` maximises ``|f 1_A|_p`` for every ``p`` at once.
    """
    if not delta >= 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    total = f.partition.total_mass
    if delta > total * (1 + 1e-12):
        raise ValueError(f"delta {delta} exceeds total mass {total}")
    order = np.lexsort((np.arange(f.partition.size), -np.abs(f.values)))
    cum = np.cumsum(f.partition.masses[order])
    fits = cum <= delta * (1 + 1e-12)
    count = int(np.argmin(fits)) if not fits.all() else len(fits)
    mask = np.zeros(f.partition.size, bool)
    mask[order[:count]] = True
    return f.with_values(np.where(mask, f.values, 0.0))


def indicator(partition: MeasuredPartition, mask) -> GridFunction:
    return GridFunction(partition, np.asarray(mask, bool).astype(float))


# --- GRIDFN v1 files ----------------------------------------------------------


def read_gridfn(path) -> GridFunction:
    """Read ``GRIDFN v1 d=<int> n=<n1,...,nd> h=<real>`` followed by row-major values."""
    from .psi import _parse_header

    with open(path) as fh:
        header = fh.readline()
        body = fh.read().split()
    hdr = _parse_header(header, "GRIDFN")
    try:
        d = int(hdr["d"])
        dims = tuple(int(x) for x in hdr["n"].split(","))
        h = float(hdr["h"])
    except KeyError as exc:
        raise ValueError(f"{path}: GRIDFN header missing {exc}") from None
    if len(dims) != d:
        raise ValueError(f"{path}: d={d} but n lists {len(dims)} sizes")
    values = np.array(body, dtype=float)
    if values.size != int(np.prod(dims)):
        raise ValueError(f"{path}: expected {int(np.prod(dims))} values, found {values.size}")
    return GridFunction(MeasuredPartition.grid(dims, h), values)


def write_gridfn(path, f: GridFunction) -> None:
    part = f.partition
    if not part.is_grid:
        raise ValueError("GRIDFN files hold grid partitions only")
    dims = ",".join(str(n) for n in part.dims)
    with open(path, "w") as fh:
        fh.write(f"GRIDFN v1 d={len(part.dims)} n={dims} h={part.h!r}\n")
        arr = f.as_array().reshape(-1, part.dims[-1])
        for row in arr:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")
