"""Finite-sample compactness certificates in bilateral grand Lebesgue spaces.

A set ``S`` is relatively compact in ``G(psi)`` when it is bounded in a
strictly stronger space ``G(nu)`` (``nu << psi``) and totally bounded in
``L_p`` for exponents accumulating at both ends of the exponent interval.
In the closed subspace ``G0(psi)`` compactness is equivalent to total
boundedness in every ``L_p`` together with equi-absolute continuity (EGA).

Everything here produces *evidence*: verdicts are drawn from a finite
number of members, probes and set sizes, and every report carries those
sample sizes.

Sequences are indexed from ``n = 1``.  Two reference sequences are built
in:

* ``remark1``: ``f_n = f * (1 - 1/(n+1))``, convergent to ``f`` in every norm;
* ``remark2``: truncations ``xi_n = xi * 1(|xi| <= n)`` of a standard
  Gaussian, convergent in each ``L_p`` but not in ``G(p^(1/2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .measure import (
    GridFunction,
    MomentCurve,
    distance_in_measure,
    gaussian_band_curve,
    gaussian_band_lp,
    gaussian_moment_curve,
    gaussian_quantile_function,
    gaussian_tail_curve,
    lp_norm,
    superlevel_restriction,
)
from .norm import DEFAULT_SCAN, EgaModulus, G0Verdict, ScanConfig, ega_modulus, g0_membership, gls_norm
from .psi import Order, PsiFunction, make_psi_builtin, order_relation, s_to_p

__all__ = [
    "SequenceKind",
    "FunctionSequence",
    "NetResult",
    "CompactnessReport",
    "Verdict",
    "default_probes",
    "lp_total_boundedness",
    "theorem1_certify",
    "theorem2_certify",
    "remark_demos",
    "gaussian_truncation_family",
    "indicator_curve",
]


class SequenceKind(str, Enum):
    EXPLICIT = "explicit"
    REMARK1 = "remark1"
    REMARK2 = "remark2_truncated_gaussian"
    CUSTOM = "custom_generator"


class Verdict(str, Enum):
    CERTIFIED = "certified_compact_evidence"
    CONDITION1_FAILS = "condition1_fails"
    CONDITION2_FAILS = "condition2_fails"
    EGA_FAILS = "ega_fails"
    INCONCLUSIVE = "inconclusive"


class FunctionSequence:
    """A (possibly infinite) sequence ``f_1, f_2, ...`` of grid functions or moment curves.

    Distances ``|f_m - f_n|_p`` are exact for grid functions.  Moment
    curves carry no pointwise values, so their differences must be supplied
    analytically (the two builtin sequences do this).
    """

    def __init__(self, kind: SequenceKind, member: Callable[[int], object], length_hint: int | None = None,
                 difference: Callable[[int, int], object] | None = None,
                 lp_distances: Callable[[int, np.ndarray, float], np.ndarray] | None = None,
                 limit=None, label: str = ""):
        self.kind = SequenceKind(kind)
        self._member = member
        self.length_hint = length_hint
        self._difference = difference
        self._lp_distances = lp_distances
        self.limit = limit
        self.label = label or self.kind.value
        self._cache: dict[int, object] = {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def explicit(cls, items, label: str = "explicit") -> "FunctionSequence":
        items = list(items)
        if not items:
            raise ValueError("explicit sequence needs at least one member")
        return cls(SequenceKind.EXPLICIT, lambda n: items[n - 1], length_hint=len(items), label=label)

    @classmethod
    def remark1(cls, f, length_hint: int | None = 1000) -> "FunctionSequence":
        """``f_n = f * (1 - 1/(n+1))``; the limit ``f`` is kept in :attr:`limit`."""

        def member(n):
            c = 1.0 - 1.0 / (n + 1)
            return f.scaled(c) if isinstance(f, MomentCurve) else f * c

        def difference(m, n):
            c = abs(1.0 / (n + 1) - 1.0 / (m + 1))
            return f.scaled(c) if isinstance(f, MomentCurve) else abs(f) * c

        def dists(n, others, p):
            others = np.asarray(others, float)
            return np.abs(1.0 / (n + 1) - 1.0 / (others + 1)) * lp_norm(f, p)

        return cls(SequenceKind.REMARK1, member, length_hint, difference, dists, limit=f, label="remark1")

    @classmethod
    def remark2_truncated_gaussian(cls, length_hint: int | None = None, method: str = "gamma") -> "FunctionSequence":
        """Moment curves of ``xi_n = xi * 1(|xi| <= n)`` for a standard Gaussian ``xi``."""

        def member(n):
            return gaussian_tail_curve(n, "truncated", method)

        def difference(m, n):
            lo, hi = sorted((m, n))
            return gaussian_band_curve(lo, hi, method)

        def dists(n, others, p):
            others = np.asarray(others, float)
            return gaussian_band_lp(p, np.minimum(others, n), np.maximum(others, n))

        return cls(SequenceKind.REMARK2, member, length_hint, difference, dists,
                   limit=gaussian_moment_curve(), label="remark2")

    @classmethod
    def custom(cls, generator: Callable[[int], object], length_hint: int | None = None,
               difference: Callable[[int, int], object] | None = None, limit=None,
               label: str = "custom") -> "FunctionSequence":
        return cls(SequenceKind.CUSTOM, generator, length_hint, difference, limit=limit, label=label)

    # -- access ---------------------------------------------------------------

    def member(self, n: int):
        if n < 1:
            raise IndexError("sequences are indexed from 1")
        if self.length_hint is not None and self.kind == SequenceKind.EXPLICIT and n > self.length_hint:
            raise IndexError(f"explicit sequence has {self.length_hint} members")
        if n not in self._cache:
            self._cache[n] = self._member(n)
        return self._cache[n]

    def labels(self, n_max: int | None = None) -> list[int]:
        n = n_max if n_max is not None else self.length_hint
        if n is None:
            raise ValueError("sequence has no length hint; pass n_max")
        if self.length_hint is not None and self.kind == SequenceKind.EXPLICIT:
            n = min(n, self.length_hint)
        return list(range(1, int(n) + 1))

    def difference(self, m: int, n: int):
        """``|f_m - f_n|`` as a grid function or moment curve."""
        if self._difference is not None:
            return self._difference(m, n)
        fm, fn = self.member(m), self.member(n)
        if isinstance(fm, GridFunction) and isinstance(fn, GridFunction):
            return abs(fm - fn)
        raise TypeError(f"distance unavailable for {type(fm).__name__} members without an analytic difference")

    def lp_distances(self, n: int, others, p: float) -> np.ndarray:
        if self._lp_distances is not None:
            return np.asarray(self._lp_distances(n, others, p), float)
        return np.array([lp_norm(self.difference(n, m), p) if m != n else 0.0 for m in others])

    def measure_distances(self, n: int, others) -> np.ndarray:
        fn = self.member(n)
        if not isinstance(fn, GridFunction):
            raise TypeError("convergence in measure needs grid-function members")
        return np.array([distance_in_measure(fn, self.member(m)) for m in others])

    def lp_norm(self, n: int, p: float) -> float:
        return lp_norm(self.member(n), p)


def indicator_curve(delta: float) -> MomentCurve:
    """Moment curve of the indicator of a set of measure ``delta`` on a probability space."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    ld = math.log(delta)
    return MomentCurve("indicator", lambda p: np.full(np.shape(p), ld), True, f"indicator({delta:g})",
                       {"delta": delta})


def gaussian_truncation_family(cells: int = 2 ** 14, levels=(1, 2, 3, 4, 5)) -> list[GridFunction]:
    """Truncations ``xi * 1(|xi| <= n)`` of the Gaussian quantile function on a uniform grid."""
    xi = gaussian_quantile_function(cells)
    return [xi.with_values(np.where(np.abs(xi.values) <= n, xi.values, 0.0)) for n in levels]


def default_probes(a: float, b: float, points: int = 8, interior: int = 4) -> np.ndarray:
    """Exponents accumulating at both endpoints (ratio 2 in the endpoint distance) plus interior points."""
    k = np.arange(1, points + 1) * math.log(2.0)
    s = np.concatenate([-k[::-1], np.linspace(-0.6, 0.6, interior), k])
    p = s_to_p(s, a, b)
    return np.unique(p[(p > a) & (p < b)])


# --- total boundedness ------------------------------------------------------------


@dataclass
class NetResult:
    p: float | None
    eps: float
    eps_abs: float
    metric: str
    centers: list[int]
    sizes: list[int] = field(repr=False)
    n_examined: int = 0
    verdict: str = "evidence_positive"

    @property
    def net_size(self) -> int:
        return len(self.centers)

    @property
    def positive(self) -> bool:
        return self.verdict == "evidence_positive"

    def to_dict(self) -> dict:
        return {"p": self.p, "metric": self.metric, "eps": self.eps, "eps_abs": self.eps_abs,
                "net_size": self.net_size, "centers": self.centers, "n_examined": self.n_examined,
                "verdict": self.verdict}


def lp_total_boundedness(seq: FunctionSequence, p: float | None, eps: float, n_max: int | None = None,
                         relative: bool = False, metric: str = "lp", stable_fraction: float = 0.75,
                         late_allowance: int = 1) -> NetResult:
    """Greedy ``eps``-net over the first ``n_max`` members.

    A member joins the net when it is farther than ``eps`` from every
    current centre.  With ``relative=True`` the radius is ``eps`` times the
    largest member norm at ``p``.  ``metric="measure"`` uses the Ky Fan
    distance instead of ``|.|_p``.  A finite explicit set is always
    totally bounded; for other sequences the evidence is positive when at
    most ``late_allowance`` new centres appeared after the first
    ``stable_fraction`` of the members.  One late centre is tolerated by
    default: a convergent sequence can still produce a single new centre
    when a late member sits just over ``eps`` from an early one.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if metric not in ("lp", "measure"):
        raise ValueError(f"unknown metric {metric!r}")
    if metric == "lp" and (p is None or p < 1):
        raise ValueError("L_p metric needs p >= 1")
    labels = seq.labels(n_max)
    eps_abs = eps
    if relative and metric == "lp":
        scale = max(seq.lp_norm(n, p) for n in labels)
        eps_abs = eps * scale if scale > 0 else eps

    centers: list[int] = []
    sizes: list[int] = []
    cutoff = stable_fraction * len(labels)
    late = 0
    for n in labels:
        if centers:
            d = seq.lp_distances(n, centers, p) if metric == "lp" else seq.measure_distances(n, centers)
            covered = bool(np.min(d) <= eps_abs)
        else:
            covered = False
        if not covered:
            centers.append(n)
            late += n > cutoff
        sizes.append(len(centers))

    if seq.kind == SequenceKind.EXPLICIT or late <= late_allowance:
        verdict = "evidence_positive"
    else:
        verdict = "not_stabilized"
    return NetResult(None if p is None else float(p), eps, eps_abs, metric, centers, sizes, len(labels), verdict)


# --- reports -------------------------------------------------------------------------


@dataclass
class CompactnessReport:
    verdict: Verdict
    condition1: dict | None
    condition2: list[NetResult]
    extraction: dict
    ega: dict | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "condition1": self.condition1,
            "condition2": [r.to_dict() for r in self.condition2],
            "extraction": self.extraction,
            "verdict": self.verdict.value,
            "evidence_note": "finite-sample evidence, not proof",
            "config": self.config,
        }
        if self.ega is not None:
            out["ega"] = self.ega
        return out

    def condition1_csv(self) -> str:
        rows = ["n,norm"]
        if self.condition1:
            rows += [f"{n},{v!r}" for n, v in zip(self.condition1["labels"], self.condition1["trend"])]
        return "\n".join(rows) + "\n"

    def condition2_csv(self) -> str:
        rows = ["p,metric,eps_abs,n,net_size"]
        for r in self.condition2:
            rows += [f"{r.p!r},{r.metric},{r.eps_abs!r},{i + 1},{s}" for i, s in enumerate(r.sizes)]
        return "\n".join(rows) + "\n"

    def extraction_csv(self) -> str:
        rows = ["step,index,residual"]
        ex = self.extraction
        rows += [f"{i + 1},{n},{r!r}" for i, (n, r) in enumerate(zip(ex.get("indices", []), ex.get("residuals", [])))]
        return "\n".join(rows) + "\n"


def _json_real(x: float):
    return "inf" if math.isinf(x) else x


def _condition1(seq: FunctionSequence, nu: PsiFunction, labels: list[int], trend_k: int, gamma_max: float,
                config: ScanConfig) -> dict:
    norms = []
    diverged = False
    for n in labels:
        r = gls_norm(seq.member(n), nu, config=config)
        diverged |= r.diverged
        norms.append(r.value)
    arr = np.asarray(norms)
    observed = float(np.max(arr))
    gamma = None
    increasing = False
    if not diverged and len(arr) >= trend_k:
        tail = arr[-trend_k:]
        d = np.diff(tail)
        increasing = bool(np.all(d > 1e-9 * np.abs(tail[1:])))
        if increasing:
            x = np.log(np.asarray(labels[-trend_k + 1:], float))
            gamma = float(-np.polyfit(x, np.log(d), 1)[0])
    growing = increasing and gamma is not None and gamma <= gamma_max
    holds = not diverged and not growing
    return {
        "holds": holds,
        "bound": observed if holds else math.inf,
        "observed_max": _json_real(observed),
        "nu_label": nu.label,
        "labels": labels,
        "trend": [_json_real(v) for v in norms],
        "increment_exponent": gamma,
        "diverged_member": diverged,
        "trend_k": trend_k,
        "gamma_max": gamma_max,
    }


def _diagonal(seq: FunctionSequence, labels: list[int], probes: list[tuple[float, str, float]],
              psi: PsiFunction, tol: float, cauchy_k: int, passes: int, config: ScanConfig) -> dict:
    """Nested refinement across probes followed by the diagonal subsequence.

    At each probe the current subsequence is cut down to the ``eps``-ball
    around its last member (the finite stand-in for a ball holding
    infinitely many members).  The probe list is traversed ``passes``
    times with the radius halved on every pass.  The m-th diagonal entry
    is the m-th member of the m-th refinement, so indices increase strictly.
    Residual m is the largest ``G(psi)`` gap between consecutive diagonal
    members from position m on.
    """
    sub = list(labels)
    stages = []
    schedule = [(p, metric, eps_abs * 0.5 ** j) for j in range(passes) for p, metric, eps_abs in probes]
    for p, metric, eps_abs in schedule:
        last = sub[-1]
        d = seq.lp_distances(last, sub, p) if metric == "lp" else seq.measure_distances(last, sub)
        sub = [n for n, dist in zip(sub, d) if dist <= eps_abs or n == last]
        stages.append(sub)
    indices = [st[m] for m, st in enumerate(stages) if m < len(st)]
    scale = max((gls_norm(seq.member(n), psi, config=config).value for n in indices), default=0.0)
    successive = [gls_norm(seq.difference(i, j), psi, config=config).value for i, j in zip(indices, indices[1:])]
    # residual m: largest remaining successive gap, non-increasing along the diagonal
    residuals = [max(successive[m:], default=0.0) for m in range(len(indices))]
    thresh = tol * scale if scale > 0 else tol
    tail = successive[-cauchy_k:]
    cauchy = len(tail) == cauchy_k and all(s <= thresh for s in tail)
    return {
        "indices": indices,
        "residuals": residuals,
        "successive": successive,
        "stage_sizes": [len(st) for st in stages],
        "scale": scale,
        "cauchy_threshold": thresh,
        "cauchy_k": cauchy_k,
        "cauchy": cauchy,
    }


def theorem1_certify(seq: FunctionSequence, psi: PsiFunction, nu: PsiFunction, p_probes=None, tol: float = 1e-2,
                     eps: float = 1e-2, n_max: int | None = None, measure_probes: int = 0, trend_k: int = 5,
                     gamma_max: float = 1.2, cauchy_k: int = 5, stable_fraction: float = 0.75,
                     passes: int = 4, config: ScanConfig = DEFAULT_SCAN) -> CompactnessReport:
    """Evidence that ``{f_n}`` is relatively compact in ``G(psi)``.

    Condition 1 is boundedness in the stronger ``G(nu)``: it fails when a
    member diverges or when the last ``trend_k`` norms increase with
    increments decaying no faster than ``n^-gamma_max`` (a non-summable,
    hence unbounded, trend).  Condition 2 is total boundedness at every
    probe exponent, with radius ``eps`` relative to the largest member
    norm; the smallest ``measure_probes`` probes use convergence in
    measure instead.  When both hold, a diagonal subsequence is extracted
    and reported ``G(psi)``-Cauchy when its last ``cauchy_k`` successive
    distances are below ``tol`` times its largest ``G(psi)`` norm.  The
    refinement cycles through the probes ``passes`` times, halving the
    radius on each pass.
    """
    if order_relation(nu, psi) != Order.NU_MUCH_LESS_PSI:
        raise ValueError(f"theorem 1 needs nu << psi; got {order_relation(nu, psi).value} for "
                         f"nu={nu.label}, psi={psi.label}")
    probes = default_probes(psi.a, psi.b) if p_probes is None else np.sort(np.asarray(p_probes, float))
    if len(probes) == 0:
        raise ValueError("empty probe list")
    if np.any(probes <= psi.a) or np.any(probes >= psi.b):
        raise ValueError("probe exponents must lie inside (a, b)")
    if n_max is None:
        n_max = seq.length_hint if seq.length_hint is not None else 200
    labels = seq.labels(n_max)

    cond1 = _condition1(seq, nu, labels, trend_k, gamma_max, config)
    nets = []
    for i, p in enumerate(probes):
        if i < measure_probes:
            nets.append(lp_total_boundedness(seq, float(p), eps, n_max, metric="measure",
                                             stable_fraction=stable_fraction))
        else:
            nets.append(lp_total_boundedness(seq, float(p), eps, n_max, relative=True,
                                             stable_fraction=stable_fraction))
    cond2 = all(r.positive for r in nets)

    extraction: dict = {"indices": [], "residuals": []}
    if not cond1["holds"]:
        verdict = Verdict.CONDITION1_FAILS
    elif not cond2:
        verdict = Verdict.CONDITION2_FAILS
    else:
        stages = [(r.p, r.metric, r.eps_abs) for r in nets]
        extraction = _diagonal(seq, labels, stages, psi, tol, cauchy_k, passes, config)
        verdict = Verdict.CERTIFIED if extraction["cauchy"] else Verdict.INCONCLUSIVE
    cond1["bound"] = _json_real(cond1["bound"])
    conf = {"psi": psi.label, "nu": nu.label, "probes": probes.tolist(), "tol": tol, "eps": eps,
            "n_max": len(labels), "measure_probes": measure_probes, "trend_k": trend_k, "gamma_max": gamma_max,
            "cauchy_k": cauchy_k, "stable_fraction": stable_fraction, "passes": passes, "sequence": seq.label}
    return CompactnessReport(verdict, cond1, nets, extraction, None, conf)


# --- G0 compactness: L_p total boundedness + EGA -------------------------------------------


def _ega_floor(family: list[GridFunction], psi: PsiFunction, deltas, floor_tol: float,
               config: ScanConfig) -> tuple[bool, dict, EgaModulus]:
    """EGA leg: does ``eta(delta)`` vanish like a bounded family's would?

    A family bounded by ``M`` has ``eta(delta) <= M * iota(delta)`` with
    ``iota`` the modulus of an indicator, which tends to zero.  We fit
    ``eta = c + A * iota`` over the smaller half of the deltas; a floor
    ``c`` above ``floor_tol * eta(delta_max)`` means EGA fails.
    """
    ega = ega_modulus(family, psi, deltas, config=config)
    part = family[0].partition
    ones = GridFunction(part, np.ones(part.size))
    iota = []
    for d in ega.deltas:
        r = superlevel_restriction(ones, d)
        iota.append(gls_norm(r, psi, config=config).value if np.any(r.values) else 0.0)
    eta = np.asarray(ega.etas)
    iota_arr = np.asarray(iota)
    half = max(3, len(eta) // 2)
    x, y = iota_arr[-half:], eta[-half:]
    if len(x) >= 2 and np.ptp(x) > 0:
        A, c = np.polyfit(x, y, 1)
    else:
        A, c = 0.0, float(y[-1]) if len(y) else 0.0
    top = float(eta[0]) if len(eta) else 0.0
    holds = bool(c <= floor_tol * top) if top > 0 else True
    info = {"holds": holds, **ega.to_dict(), "reference_indicator": iota, "floor_estimate": float(c),
            "slope": float(A), "floor_tol": floor_tol, "fit_points": int(len(x))}
    return holds, info, ega


def _default_deltas(family: list[GridFunction]) -> list[float]:
    part = family[0].partition
    total, smallest = part.total_mass, float(np.min(part.masses))
    ds, d = [], 0.5 * total
    while d >= smallest * (1 - 1e-12):
        ds.append(d)
        d *= 0.5
    return ds


def theorem2_certify(family, psi: PsiFunction, p_probes=None, deltas=None, tol: float = 1e-2, eps: float = 1e-2,
                     floor_tol: float = 0.1, config: ScanConfig = DEFAULT_SCAN) -> tuple[CompactnessReport, EgaModulus]:
    """Evidence for compactness of a family of grid functions in ``G0(psi)``.

    Every member must belong to ``G0(psi)``; an explicit non-member raises.
    Leg one is ``L_p`` total boundedness at each probe, leg two is the EGA
    floor test of :func:`_ega_floor`.  Deltas below the smallest cell mass
    cannot be resolved and are dropped.
    """
    family = list(family)
    if not family:
        raise ValueError("empty family")
    memberships = []
    for i, f in enumerate(family):
        g = g0_membership(f, psi, config=config)
        if g.verdict == G0Verdict.NON_MEMBER:
            raise ValueError(f"family member {i + 1} is not in G0({psi.label})")
        memberships.append(g.verdict.value)
    probes = default_probes(psi.a, psi.b) if p_probes is None else np.sort(np.asarray(p_probes, float))
    if len(probes) == 0:
        raise ValueError("empty probe list")
    seq = FunctionSequence.explicit(family, label="family")
    nets = [lp_total_boundedness(seq, float(p), eps, relative=True) for p in probes]
    lp_ok = all(r.positive for r in nets)

    smallest = float(np.min(family[0].partition.masses))
    ds = _default_deltas(family) if deltas is None else [d for d in deltas if d >= smallest * (1 - 1e-12)]
    if len(ds) < 3:
        raise ValueError("need at least three resolvable deltas (>= smallest cell mass)")
    ega_ok, ega_info, ega = _ega_floor(family, psi, ds, floor_tol, config)

    if not lp_ok:
        verdict = Verdict.CONDITION2_FAILS
    elif not ega_ok:
        verdict = Verdict.EGA_FAILS
    else:
        verdict = Verdict.CERTIFIED
    conf = {"psi": psi.label, "probes": probes.tolist(), "tol": tol, "eps": eps, "floor_tol": floor_tol,
            "family_size": len(family), "g0_membership": memberships}
    report = CompactnessReport(verdict, None, nets, {"indices": [], "residuals": []}, ega_info, conf)
    return report, ega


# --- the counterexamples -----------------------------------------------------------


def _remark1(psi: PsiFunction, f, n_values, config: ScanConfig) -> dict:
    if f is None:
        f = indicator_curve(math.exp(-4.0))
    base = gls_norm(f, psi, config=config)
    if base.diverged or not math.isfinite(base.value):
        raise ValueError("remark1 needs a witness with finite G(psi) norm")
    rows = []
    worst = 0.0
    for n in n_values:
        measured = gls_norm(_remark1_gap(f, n), psi, config=config).value
        expected = base.value / (n + 1)
        rel = abs(measured - expected) / expected if expected else abs(measured)
        worst = max(worst, rel)
        rows.append({"n": int(n), "measured": measured, "expected": expected, "rel_error": rel})
    return {"which": "remark1", "psi": psi.label, "witness": getattr(f, "label", "grid"), "norm_f": base.value,
            "rows": rows, "max_rel_error": worst}


def _remark1_gap(f, n: int):
    """``|f_n - f| = |f| / (n+1)``, formed the same way as the members are."""
    c = 1.0 - 1.0 / (n + 1)
    if isinstance(f, MomentCurve):
        return f.scaled(1.0 / (n + 1))
    return abs(f * c - f)


def _remark2(psi: PsiFunction, nu: PsiFunction, n_values, probes, method: str, config: ScanConfig) -> dict:
    xi = gaussian_moment_curve()
    full = gls_norm(xi, psi, config=config).value

    conv = []
    for p in probes:
        vals = [float(gaussian_tail_curve(n, "tail", method).eval(p)) for n in n_values]
        row = {"p": float(p), "tail_lp": vals}
        if p == 2.0:
            row["closed_form"] = [math.sqrt(2.0 * (n * math.exp(-0.5 * n * n) / math.sqrt(2 * math.pi)
                                                   + ndtr(-n))) for n in n_values]
        conv.append(row)

    trunc = [gls_norm(gaussian_tail_curve(n, "truncated", method), psi, config=config).value for n in n_values]
    gaps = [gls_norm(gaussian_tail_curve(n, "tail", method), psi, config=config) for n in n_values]
    floor = math.exp(-0.5)

    strong = [gls_norm(gaussian_tail_curve(n, "tail", method), nu, config=config).value for n in n_values]
    return {
        "which": "remark2",
        "psi": psi.label,
        "n_values": list(map(int, n_values)),
        "method": method,
        "lp_convergence": conv,
        "norm_xi": full,
        "truncated_norms": trunc,
        "sup_truncated": max(trunc),
        "gap_norms": [g.value for g in gaps],
        "gap_argmax": [g.argmax_p for g in gaps],
        "floor": floor,
        "stronger_norm": {"nu": nu.label, "order": order_relation(psi, nu).value, "gap_norms": strong},
    }


def remark_demos(which: str, psi: PsiFunction | None = None, f=None, n_values=None, probes=(2.0, 8.0, 64.0),
                 nu: PsiFunction | None = None, method: str = "gamma",
                 config: ScanConfig = DEFAULT_SCAN) -> dict:
    """Reproduce the two counterexamples.

    ``remark1``: ``||f_n - f||G(psi) = ||f||G(psi)/(n+1)`` for each ``n``
    (witness defaults to the indicator of a set of measure ``e^-4``).

    ``remark2``: for Gaussian truncations, ``|xi_n - xi|_p -> 0`` at each
    probe, ``sup_n ||xi_n||G(psi) = ||xi||G(psi)``, and the gaps
    ``||xi_n - xi||G(psi)`` stay above the floor ``e^-1/2``; the same gaps
    measured in a stronger ``G(nu)`` (default ``nu(p) = p``) are listed too.
    """
    if which == "remark1":
        psi = psi or make_psi_builtin("power_alpha", 0.5)
        n_values = list(range(1, 11)) if n_values is None else list(n_values)
        return _remark1(psi, f, n_values, config)
    if which == "remark2":
        psi = psi or make_psi_builtin("power_alpha", 0.5)
        nu = nu or make_psi_builtin("power_alpha", 1.0)
        n_values = list(range(0, 21)) if n_values is None else list(n_values)
        return _remark2(psi, nu, n_values, probes, method, config)
    raise ValueError(f"unknown remark {which!r}")
