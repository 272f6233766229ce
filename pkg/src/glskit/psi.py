"""Weight functions psi of the class Psi(a, b) and the asymptotic order ``nu << psi``.

A psi-function is strictly positive and continuous on the open exponent
interval (a, b) and may blow up at one or both endpoints.  At least one
endpoint must blow up; if psi stays bounded on both sides the associated
space collapses to ``L_a + L_b`` and is rejected here.

Exponents are sampled through a single logit-type coordinate ``s``:

* ``b = inf``:  ``p = a + exp(s)``
* ``b < inf``:  ``p = a + (b - a) * expit(s)``

so that ``s -> -inf`` approaches ``a`` and ``s -> +inf`` approaches ``b``
in both cases.  All endpoint ladders are geometric (ratio 4) in the
distance to the endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

__all__ = [
    "PsiFunction",
    "Order",
    "make_psi_builtin",
    "psi_eval",
    "order_relation",
    "psi_from_table",
    "read_psi_file",
    "write_psi_file",
    "LogLinearTable",
    "s_to_p",
    "endpoint_ladder",
]

LADDER_RATIO = 4.0
ORDER_LADDER_DEPTH = 24


class Order(str, Enum):
    NU_MUCH_LESS_PSI = "nu_much_less_psi"
    PSI_MUCH_LESS_NU = "psi_much_less_nu"
    NEITHER = "neither"


@dataclass(frozen=True)
class PsiFunction:
    """A member of Psi(a, b).

    ``fn`` must accept a numpy array of exponents and return an array of the
    same shape.  Use :func:`psi_eval` for domain-checked evaluation.
    """

    a: float
    b: float
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    endpoint_a_infinite: bool
    endpoint_b_infinite: bool
    label: str = "psi"

    def __post_init__(self):
        if not self.a >= 1:
            raise ValueError(f"a must be >= 1, got {self.a}")
        if not self.b > self.a:
            raise ValueError(f"b must exceed a, got a={self.a}, b={self.b}")
        if not (self.endpoint_a_infinite or self.endpoint_b_infinite):
            raise ValueError(
                "psi bounded at both endpoints: G(psi) reduces to L_a + L_b, excluded"
            )

    def __call__(self, p):
        return psi_eval(self, p)

    @property
    def infinite_b(self) -> bool:
        return math.isinf(self.b)

    def infinite_endpoints(self) -> list[str]:
        ends = []
        if self.endpoint_a_infinite:
            ends.append("a")
        if self.endpoint_b_infinite:
            ends.append("b")
        return ends

    def same_domain(self, other: "PsiFunction") -> bool:
        return self.a == other.a and self.b == other.b

    def scaled(self, c: float) -> "PsiFunction":
        if not c > 0:
            raise ValueError("scale must be positive")
        fn = self.fn
        return PsiFunction(
            self.a, self.b, lambda p: c * fn(p),
            self.endpoint_a_infinite, self.endpoint_b_infinite,
            label=f"{c:g}*{self.label}",
        )


def s_to_p(s, a: float, b: float) -> np.ndarray:
    """Map the sampling coordinate ``s`` to exponents in (a, b)."""
    s = np.asarray(s, dtype=float)
    if math.isinf(b):
        return a + np.exp(s)
    return a + (b - a) * expit(s)


def p_to_s(p, a: float, b: float) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if math.isinf(b):
        return np.log(p - a)
    return np.log(p - a) - np.log(b - p)


def endpoint_ladder(a: float, b: float, side: str, depth: int, start: float = 0.0) -> np.ndarray:
    """Exponents approaching an endpoint geometrically, excluding the endpoint itself.

    ``start`` is the ``s`` coordinate the ladder departs from; step k sits at
    ``start +/- k*ln(4)``.
    """
    k = np.arange(1, depth + 1)
    step = math.log(LADDER_RATIO)
    s = start + k * step if side == "b" else start - k * step
    p = s_to_p(s, a, b)
    keep = (p > a) & (p < b) & np.isfinite(p)
    return p[keep]


def psi_eval(psi: PsiFunction, p):
    """Evaluate psi at ``p`` strictly inside (a, b); out-of-domain is an error."""
    arr = np.asarray(p, dtype=float)
    if np.any(~(arr > psi.a)) or np.any(~(arr < psi.b)):
        raise ValueError(f"exponent outside open interval ({psi.a}, {psi.b}): {p}")
    out = np.asarray(psi.fn(arr), dtype=float)
    if np.ndim(p) == 0:
        return float(out)
    return out


def make_psi_builtin(kind: str, param: float) -> PsiFunction:
    """Builtin weights.

    ``grand_b``: ``(b - p)^(-1/b)`` on (1, b), the classical grand Lebesgue weight.
    ``power_alpha``: ``p^alpha`` on (1, inf).
    """
    if kind == "grand_b":
        b = float(param)
        if not b > 1 or math.isinf(b):
            raise ValueError(f"grand_b needs finite b > 1, got {param}")
        return PsiFunction(
            1.0, b, lambda p: (b - p) ** (-1.0 / b),
            endpoint_a_infinite=False, endpoint_b_infinite=True,
            label=f"grand_b({b:g})",
        )
    if kind == "power_alpha":
        alpha = float(param)
        if not alpha > 0:
            raise ValueError(f"power_alpha needs alpha > 0, got {param}")
        return PsiFunction(
            1.0, math.inf, lambda p: p ** alpha,
            endpoint_a_infinite=False, endpoint_b_infinite=True,
            label=f"power_alpha({alpha:g})",
        )
    raise ValueError(f"unknown builtin psi kind {kind!r}")


# --- asymptotic order -------------------------------------------------------


def _decays(ratios: np.ndarray, tol: float, k: int) -> bool:
    """Last ``k`` ratios strictly decreasing and final value below ``tol`` relative to the peak."""
    if len(ratios) < k or not np.all(np.isfinite(ratios)):
        return False
    peak = float(np.max(ratios))
    if peak <= 0:
        return True
    tail = ratios[-k:]
    return bool(np.all(np.diff(tail) < 0) and tail[-1] / peak < tol)


def _dominated(nu: PsiFunction, psi: PsiFunction, tol: float, k: int, depth: int) -> bool:
    ends = psi.infinite_endpoints()
    for side in ends:
        ps = endpoint_ladder(psi.a, psi.b, side, depth)
        ratios = np.asarray(nu.fn(ps), float) / np.asarray(psi.fn(ps), float)
        if not _decays(ratios, tol, k):
            return False
    return bool(ends)


def order_relation(nu: PsiFunction, psi: PsiFunction, tol: float = 1e-3, k: int = 8,
                   depth: int = ORDER_LADDER_DEPTH) -> Order:
    """Decide ``nu << psi`` (ratio nu/psi vanishes wherever psi blows up) or the reverse.

    The ratio is sampled on geometric ladders toward each endpoint where the
    dominating weight is infinite.  A ladder certifies decay when its last
    ``k`` ratios decrease strictly and the final one is below ``tol`` times
    the largest ladder ratio.
    """
    if not nu.same_domain(psi):
        raise ValueError(f"domain mismatch: ({nu.a},{nu.b}) vs ({psi.a},{psi.b})")
    if _dominated(nu, psi, tol, k, depth):
        return Order.NU_MUCH_LESS_PSI
    if _dominated(psi, nu, tol, k, depth):
        return Order.PSI_MUCH_LESS_NU
    return Order.NEITHER


# --- tabulated weights ------------------------------------------------------


class LogLinearTable:
    """Positive tabulated curve on (a, b), log-linear in p between nodes.

    Outside the node range the curve is extended toward each endpoint as a
    power of the endpoint distance (``p - a``, ``b - p`` or ``1/p``) fitted
    to the two outermost nodes when that power blows up, and held flat
    otherwise.
    """

    def __init__(self, ps: Sequence[float], values: Sequence[float], a: float, b: float):
        ps = np.asarray(ps, float)
        values = np.asarray(values, float)
        if ps.ndim != 1 or ps.shape != values.shape or len(ps) < 2:
            raise ValueError("need at least two (p, value) pairs")
        if np.any(np.diff(ps) <= 0):
            raise ValueError("tabulated p must be strictly increasing")
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise ValueError("tabulated values must be finite and positive")
        if ps[0] <= a or ps[-1] >= b:
            raise ValueError("tabulated p must lie strictly inside (a, b)")
        self.ps, self.logv, self.a, self.b = ps, np.log(values), a, b
        self.slope_a = self._edge_slope("a")
        self.slope_b = self._edge_slope("b")

    def _dist(self, p, side):
        p = np.asarray(p, float)
        if side == "a":
            return p - self.a
        return 1.0 / p if math.isinf(self.b) else self.b - p

    def _edge_slope(self, side) -> float:
        idx = (0, 1) if side == "a" else (-1, -2)
        d = self._dist(self.ps[list(idx)], side)
        return float((self.logv[idx[1]] - self.logv[idx[0]]) / (math.log(d[1]) - math.log(d[0])))

    @property
    def blows_up_a(self) -> bool:
        return self.slope_a < 0

    @property
    def blows_up_b(self) -> bool:
        return self.slope_b < 0

    def __call__(self, p):
        p = np.asarray(p, float)
        out = np.interp(p, self.ps, self.logv)
        for side, mask, node, slope in (
            ("a", p < self.ps[0], 0, self.slope_a),
            ("b", p > self.ps[-1], -1, self.slope_b),
        ):
            if slope < 0 and np.any(mask):
                d0 = self._dist(self.ps[node], side)
                out = np.where(mask, self.logv[node] + slope * (np.log(self._dist(np.where(mask, p, self.ps[node]), side)) - math.log(d0)), out)
        return np.exp(out)


def psi_from_table(ps, values, a: float, b: float, label: str = "tabulated") -> PsiFunction:
    table = LogLinearTable(ps, values, a, b)
    return PsiFunction(a, b, table, table.blows_up_a, table.blows_up_b, label=label)


def _parse_header(line: str, magic: str) -> dict[str, str]:
    parts = line.split()
    if parts[:2] != [magic, "v1"]:
        raise ValueError(f"expected '{magic} v1' header, got {line.strip()!r}")
    fields = {}
    for tok in parts[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ValueError(f"malformed header token {tok!r}")
        fields[key] = val
    return fields


def read_psi_file(path, label: str | None = None) -> PsiFunction:
    """Read a ``PSI v1`` file: header ``PSI v1 a=<real> b=<real|inf>`` then ``<p> <value>`` lines."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty PSI file")
    hdr = _parse_header(lines[0], "PSI")
    try:
        a, b = float(hdr["a"]), float(hdr["b"])
    except KeyError as exc:
        raise ValueError(f"{path}: PSI header missing {exc}") from None
    rows = [ln.split() for ln in lines[1:]]
    if any(len(r) != 2 for r in rows):
        raise ValueError(f"{path}: each PSI row needs exactly '<p> <value>'")
    data = np.array(rows, dtype=float)
    return psi_from_table(data[:, 0], data[:, 1], a, b, label=label or str(path))


def write_psi_file(path, ps, values, a: float, b: float) -> None:
    bstr = "inf" if math.isinf(b) else repr(float(b))
    with open(path, "w") as fh:
        fh.write(f"PSI v1 a={float(a)!r} b={bstr}\n")
        for p, v in zip(ps, values):
            fh.write(f"{float(p)!r} {float(v)!r}\n")
