"""Bilateral grand Lebesgue norm ``||f||G(psi) = sup_{a<p<b} |f|_p / psi(p)``.

The supremum is located in three stages: a coarse scan that is uniform in
the logit coordinate ``s`` (see :mod:`glskit.psi`), explicit geometric
ladders toward both endpoints, and a golden-section refinement around the
best bracket.  When the largest ratio sits at the end of a ladder the
endpoint limit is extrapolated from the last three ladder ratios
(geometric-increment model), and a ladder whose ratios keep growing without
shrinking increments is reported as divergence (``value = inf``,
``diverged = True``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .measure import GridFunction, MomentCurve, lp_norms, superlevel_restriction
from .psi import LADDER_RATIO, ORDER_LADDER_DEPTH, PsiFunction, endpoint_ladder, s_to_p

__all__ = [
    "ScanConfig",
    "GlsNormResult",
    "G0Verdict",
    "G0Result",
    "EgaModulus",
    "gls_norm",
    "g0_membership",
    "ega_modulus",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScanConfig:
    scan_points: int = 64
    scan_halfwidth: float = math.log(1e3)
    ladder_points: int = 8
    golden_width: float = 1e-9
    divergence_k: int = 5
    divergence_q: float = 0.95

    def as_dict(self) -> dict:
        return {
            "scan_points": self.scan_points,
            "scan_halfwidth": self.scan_halfwidth,
            "ladder_points": self.ladder_points,
            "ladder_ratio": LADDER_RATIO,
            "golden_width": self.golden_width,
            "divergence_k": self.divergence_k,
            "divergence_q": self.divergence_q,
        }


DEFAULT_SCAN = ScanConfig()


@dataclass
class GlsNormResult:
    value: float
    argmax_p: float | str
    certificate: list[tuple[float, float]] = field(repr=False)
    refined_to: float
    diverged: bool = False
    endpoint_limits: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict, repr=False)

    def max_certificate_ratio(self) -> float:
        return max(r for _, r in self.certificate)

    def to_dict(self) -> dict:
        return {
            "value": "inf" if self.diverged else self.value,
            "diverged": self.diverged,
            "argmax_p": self.argmax_p,
            "refined_to": self.refined_to,
            "endpoint_limits": {
                k: ("inf" if math.isinf(v) else v) for k, v in self.endpoint_limits.items()
            },
            "trace": [{"p": p, "ratio": r} for p, r in self.certificate],
            "config": self.config,
        }


def _check_domain(f, psi: PsiFunction):
    if not isinstance(f, (GridFunction, MomentCurve)):
        raise TypeError(f"cannot take G(psi) norm of {type(f).__name__}")
    if isinstance(f, GridFunction) and not math.isfinite(f.partition.total_mass):
        raise ValueError("grid function must live on a finite-mass partition")


def _ratios(f, psi: PsiFunction, ps: np.ndarray) -> np.ndarray:
    return lp_norms(f, ps) / np.asarray(psi.fn(ps), float)


def _endpoint_limit(ratios: np.ndarray, cfg: ScanConfig) -> tuple[float, bool]:
    """Limit estimate along a ladder (ordered toward the endpoint) and a divergence flag."""
    r = ratios[np.isfinite(ratios)]
    if len(r) < 3:
        return (float(r[-1]) if len(r) else 0.0), False
    d = np.diff(r)
    k = min(cfg.divergence_k, len(r))
    tail_d = d[-(k - 1):]
    if np.all(tail_d > 0):
        q = tail_d[1:] / tail_d[:-1]
        if np.all(q >= cfg.divergence_q):
            return math.inf, True
    d1, d2 = d[-2], d[-1]
    if d1 != 0 and d1 * d2 > 0 and abs(d2) < abs(d1):
        q = d2 / d1
        return max(0.0, float(r[-1] + d2 * q / (1.0 - q))), False  # ratios are nonnegative
    return float(r[-1]), False


def _golden(fn, lo: float, hi: float, width: float, trace: list):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = fn(c), fn(d)
    trace += [(c, fc), (d, fd)]
    while hi - lo > width:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = fn(c)
            trace.append((c, fc))
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = fn(d)
            trace.append((d, fd))
    return hi - lo


def gls_norm(f, psi: PsiFunction, tol: float = 1e-4, config: ScanConfig = DEFAULT_SCAN) -> GlsNormResult:
    """``sup_p |f|_p / psi(p)`` with a sampled certificate.

    ``tol`` is the target relative accuracy and only affects how the result
    is reported; the search itself is governed by ``config``.
    """
    _check_domain(f, psi)
    a, b = psi.a, psi.b
    cfg = config
    W = cfg.scan_halfwidth
    scan_s = np.linspace(-W, W, cfg.scan_points)
    step = math.log(LADDER_RATIO)
    lad_a_s = -W - step * np.arange(1, cfg.ladder_points + 1)
    lad_b_s = W + step * np.arange(1, cfg.ladder_points + 1)

    def at(s_arr):
        ps = s_to_p(s_arr, a, b)
        ok = (ps > a) & (ps < b)
        out = np.full(len(ps), np.nan)
        if ok.any():
            out[ok] = _ratios(f, psi, ps[ok])
        return ps, out

    all_s = np.concatenate([lad_a_s[::-1], scan_s, lad_b_s])
    all_p, all_r = at(all_s)
    trace_s = [(float(s), float(r)) for s, r in zip(all_s, all_r) if np.isfinite(r)]

    limits = {}
    diverged = False
    for side, lad in (("a", lad_a_s), ("b", lad_b_s)):
        _, r = at(lad)
        lim, div = _endpoint_limit(r, cfg)
        limits[side] = lim
        diverged |= div

    best = int(np.nanargmax(all_r))
    width = 0.0
    if 0 < best < len(all_s) - 1:
        def fn(s):
            _, r = at(np.array([s]))
            return float(r[0]) if np.isfinite(r[0]) else -math.inf

        width = _golden(fn, float(all_s[best - 1]), float(all_s[best + 1]), cfg.golden_width, trace_s)

    s_best, r_best = max(trace_s, key=lambda t: t[1])
    value, argmax = r_best, float(s_to_p(s_best, a, b))
    for side in ("a", "b"):
        lim = limits[side]
        if lim > value:
            value, argmax = lim, f"{side}{'+' if side == 'a' else '-'}"
    if diverged:
        value = math.inf

    trace_s.sort()
    cert = [(float(s_to_p(s, a, b)), r) for s, r in trace_s]
    conf = {"tol": tol, **cfg.as_dict()}
    return GlsNormResult(value, argmax, cert, width, diverged, limits, conf)


# --- G0 = GA = GB membership ---------------------------------------------------


class G0Verdict(str, Enum):
    MEMBER = "member"
    NON_MEMBER = "non_member"
    INCONCLUSIVE = "inconclusive"


@dataclass
class G0Result:
    verdict: G0Verdict
    norm: GlsNormResult
    tails: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "norm": self.norm.to_dict(),
            "tails": {
                side: [{"p": p, "ratio": r} for p, r in pts] for side, pts in self.tails.items()
            },
            "config": self.config,
        }


def _tail_class(ratios: np.ndarray, scale: float, tol: float, k: int, floor_k: int, floor_rel: float) -> str:
    rel = ratios / scale
    if len(rel) >= k and np.all(np.diff(rel[-k:]) < 0) and rel[-1] < tol:
        return "decays"
    last = rel[-floor_k:]
    if len(last) == floor_k and np.all(last > 10 * tol):
        spread = np.abs(np.diff(last)) / last[1:]
        if np.all(spread < floor_rel):
            return "floor"
    return "unclear"


def g0_membership(f, psi: PsiFunction, tol: float = 1e-3, k: int = 8, floor_k: int = 5,
                  floor_rel: float = 1e-3, depth: int = ORDER_LADDER_DEPTH,
                  config: ScanConfig = DEFAULT_SCAN) -> G0Result:
    """Decide whether ``|f|_p / psi(p) -> 0`` at every endpoint where psi blows up.

    Ratios are taken along deep geometric ladders and measured relative to
    ``||f||G(psi)``: a tail whose last ``k`` ratios decrease strictly to below
    ``tol`` decays; a tail whose last ``floor_k`` ratios agree within
    ``floor_rel`` while staying above ``10*tol`` has a floor.
    """
    norm = gls_norm(f, psi, config=config)
    conf = {"tol": tol, "k": k, "floor_k": floor_k, "floor_rel": floor_rel, "depth": depth}
    if norm.diverged:
        return G0Result(G0Verdict.NON_MEMBER, norm, {}, conf)
    if norm.value == 0:
        return G0Result(G0Verdict.MEMBER, norm, {}, conf)
    classes, tails = [], {}
    for side in psi.infinite_endpoints():
        ps = endpoint_ladder(psi.a, psi.b, side, depth)
        r = _ratios(f, psi, ps)
        tails[side] = list(zip(ps.tolist(), r.tolist()))
        classes.append(_tail_class(r, norm.value, tol, k, floor_k, floor_rel))
    if all(c == "decays" for c in classes):
        verdict = G0Verdict.MEMBER
    elif any(c == "floor" for c in classes):
        verdict = G0Verdict.NON_MEMBER
    else:
        verdict = G0Verdict.INCONCLUSIVE
    return G0Result(verdict, norm, tails, conf)


# --- equi-absolute continuity --------------------------------------------------


@dataclass
class EgaModulus:
    deltas: list[float]
    etas: list[float]
    psi_label: str = ""

    def to_dict(self) -> dict:
        return {"psi": self.psi_label, "deltas": self.deltas, "etas": self.etas}


def ega_modulus(family, psi: PsiFunction, deltas, config: ScanConfig = DEFAULT_SCAN) -> EgaModulus:
    """``eta(delta) = max_f ||f 1_A||G(psi)`` over the worst ``A`` with ``mu(A) <= delta``.

    ``deltas`` are reported in decreasing order.
    """
    family = list(family)
    if not family:
        raise ValueError("empty family")
    part = family[0].partition
    for g in family[1:]:
        if not g.partition.compatible(part):
            raise ValueError("family members must share a partition")
    ds = sorted((float(d) for d in deltas), reverse=True)
    etas = []
    for d in ds:
        eta = 0.0
        for g in family:
            r = superlevel_restriction(g, d)
            if np.any(r.values):
                eta = max(eta, gls_norm(r, psi, config=config).value)
        etas.append(eta)
    return EgaModulus(ds, etas, psi.label)
