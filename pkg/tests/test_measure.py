import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import norm as normal

from glskit import (
    GridFunction,
    MeasuredPartition,
    MomentCurve,
    QuadratureError,
    distance_in_measure,
    exact_lp_norm,
    gaussian_band_curve,
    gaussian_moment_curve,
    gaussian_quantile_function,
    gaussian_tail_curve,
    indicator,
    lp_norm,
    lp_norms,
    read_gridfn,
    superlevel_restriction,
    write_gridfn,
)
from glskit import measure as measure_mod

PDF0 = 1.0 / math.sqrt(2 * math.pi)


def even_tail_moment(k: int, t: float) -> float:
    """E[N^(2k); |N| > t] by the recurrence I_k = t^(2k-1) phi(t) + (2k-1) I_(k-1)."""
    one_side = normal.sf(t)
    for j in range(1, k + 1):
        one_side = t ** (2 * j - 1) * normal.pdf(t) + (2 * j - 1) * one_side
    return 2.0 * one_side


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


# --- partitions and grid functions --------------------------------------------------


def test_grid_partition_layout():
    part = MeasuredPartition.grid((2, 3), h=0.5)
    assert part.size == 6 and part.ndim == 2
    assert part.total_mass == pytest.approx(1.5)
    # doubled integer coordinates, row-major
    np.testing.assert_array_equal(part.lattice[:3], [[-1, -2], [-1, 0], [-1, 2]])
    np.testing.assert_allclose(part.centers, part.lattice * 0.25)


@pytest.mark.parametrize("masses", [[], [1.0, 0.0], [1.0, -1.0], [np.inf]])
def test_bad_masses(masses):
    with pytest.raises(ValueError):
        MeasuredPartition.abstract(masses)


def test_grid_function_values_are_frozen():
    f = GridFunction(MeasuredPartition.uniform(3), [1, 2, 3])
    with pytest.raises(ValueError):
        f.values[0] = 5.0


def test_grid_function_arithmetic_checks_partition():
    f = GridFunction(MeasuredPartition.uniform(3), [1, 2, 3])
    g = GridFunction(MeasuredPartition.uniform(3, 2.0), [1, 2, 3])
    with pytest.raises(ValueError):
        f + g
    np.testing.assert_array_equal((f - f).values, 0)
    np.testing.assert_array_equal(abs(-f * 2).values, [2, 4, 6])


def test_nonfinite_values_rejected():
    with pytest.raises(ValueError):
        GridFunction(MeasuredPartition.uniform(2), [1.0, np.nan])


# --- L_p norms ------------------------------------------------------------------------


def test_lp_norm_small_example():
    f = GridFunction(MeasuredPartition.abstract([0.5, 0.25, 0.25]), [2.0, -1.0, 0.0])
    assert lp_norm(f, 1) == pytest.approx(1.25)
    assert lp_norm(f, 2) == pytest.approx(math.sqrt(2.25))
    assert exact_lp_norm(f, 2) == pytest.approx(math.sqrt(2.25), rel=1e-15)


def test_lp_norm_overflow_safe():
    f = GridFunction(MeasuredPartition.uniform(4), [1e200, 1e200, 0, 0])
    assert lp_norm(f, 50.0) == pytest.approx(1e200 * 0.5 ** (1 / 50), rel=1e-12)
    assert lp_norm(f * 1e-300, 400.0) == pytest.approx(1e-100 * 0.5 ** (1 / 400), rel=1e-12)


@pytest.mark.parametrize("p", [0.5, math.inf, -1.0])
def test_lp_norm_rejects_bad_exponent(p):
    with pytest.raises(ValueError):
        lp_norm(GridFunction(MeasuredPartition.uniform(2), [1, 2]), p)


@settings(max_examples=60)
@given(arrays(float, st.integers(1, 40), elements=st.floats(-1e3, 1e3)),
       st.floats(1.0, 12.0), st.floats(1.0, 12.0))
def test_lyapunov_monotonicity(vals, p, q):
    # on a probability space p -> |f|_p is non-decreasing
    f = GridFunction(MeasuredPartition.uniform(len(vals)), vals)
    lo, hi = sorted((p, q))
    assert lp_norm(f, lo) <= lp_norm(f, hi) * (1 + 1e-12)


@settings(max_examples=60)
@given(arrays(float, st.integers(1, 40), elements=st.floats(-1e3, 1e3)), st.floats(1.0, 30.0))
def test_vectorised_and_exact_agree(vals, p):
    f = GridFunction(MeasuredPartition.uniform(len(vals)), vals)
    assert lp_norms(f, [p])[0] == pytest.approx(exact_lp_norm(f, p), rel=1e-12, abs=1e-300)


# --- Gaussian oracles ---------------------------------------------------------------


def test_gaussian_low_moments():
    xi = gaussian_moment_curve()
    assert xi.eval(1.0) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)
    assert xi.eval(2.0) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("k", range(1, 9))
def test_gaussian_even_moments(k):
    assert gaussian_moment_curve().eval(2.0 * k) ** (2 * k) == pytest.approx(double_factorial(2 * k - 1), rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 1.7, 3.0, 10.5, 100.0, 1e4])
def test_gaussian_moment_via_duplication(p):
    # Gamma((p+1)/2) = 2^-p sqrt(pi) Gamma(p+1) / Gamma(p/2+1)  (Legendre duplication)
    log_m = math.lgamma(p + 1) - 0.5 * p * math.log(2) - math.lgamma(0.5 * p + 1)
    assert gaussian_moment_curve().eval(p) == pytest.approx(math.exp(log_m / p), rel=1e-12)


def test_gaussian_large_p_asymptote():
    xi = gaussian_moment_curve()
    assert xi.eval(1e4) / 100.0 == pytest.approx(math.exp(-0.5), rel=1e-3)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 2.0, 4.0, 6.0])
@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_tail_even_moments_recurrence(t, k):
    tail = gaussian_tail_curve(t)
    assert tail.eval(2.0 * k) ** (2 * k) == pytest.approx(even_tail_moment(k, t), rel=1e-10)


@pytest.mark.parametrize("n", [0.5, 1.0, 3.0])
def test_first_moment_bands(n):
    assert gaussian_tail_curve(n).eval(1.0) == pytest.approx(2 * normal.pdf(n), rel=1e-12)
    assert gaussian_tail_curve(n, "truncated").eval(1.0) == pytest.approx(2 * (PDF0 - normal.pdf(n)), rel=1e-12)


def test_band_closed_form_second_moment():
    lo, hi = 1.0, 2.5
    expect = even_tail_moment(1, lo) - even_tail_moment(1, hi)
    assert gaussian_band_curve(lo, hi).eval(2.0) ** 2 == pytest.approx(expect, rel=1e-12)


def test_tail_second_moment_n6():
    # the second moment, not the norm, sits below 1e-7 for n = 6
    m2 = gaussian_tail_curve(6).eval(2.0) ** 2
    assert m2 < 1e-7
    assert m2 == pytest.approx(even_tail_moment(1, 6.0), rel=1e-10)


@pytest.mark.parametrize("lo,hi", [(0.0, 1.0), (0.0, 20.0), (1.0, math.inf), (3.0, 5.0), (6.0, math.inf),
                                   (20.0, math.inf), (0.5, 0.7)])
@pytest.mark.parametrize("p", [1.0, 2.5, 17.0, 400.0, 1e4])
def test_gamma_route_matches_quadrature(lo, hi, p):
    a = gaussian_band_curve(lo, hi, "gamma").eval(p)
    b = gaussian_band_curve(lo, hi, "quad").eval(p)
    assert a == pytest.approx(b, rel=1e-9)


def test_truncated_limit_at_large_p():
    # |xi 1(|xi|<=n)|_p -> n as p -> inf
    assert gaussian_tail_curve(20, "truncated").eval(1e8) == pytest.approx(20.0, rel=1e-5)


def test_truncation_monotone_in_n():
    ps = np.geomspace(1, 1e4, 30)
    prev = np.zeros_like(ps)
    for n in range(1, 12):
        cur = gaussian_tail_curve(n, "truncated").eval(ps)
        assert np.all(cur >= prev)
        assert np.all(cur <= gaussian_moment_curve().eval(ps) * (1 + 1e-12))
        prev = cur


def test_quadrature_error_reported(monkeypatch):
    monkeypatch.setattr(measure_mod.integrate, "quad", lambda *a, **k: (1.0, 1.0))
    with pytest.raises(QuadratureError):
        gaussian_band_curve(1.0, 2.0, "quad").eval(3.0)


def test_band_argument_checks():
    with pytest.raises(ValueError):
        gaussian_band_curve(2.0, 1.0)
    with pytest.raises(ValueError):
        gaussian_tail_curve(-1.0)
    with pytest.raises(ValueError):
        gaussian_band_curve(1.0, 2.0, "simpson")


def test_moment_curve_scaling_exact():
    xi = gaussian_moment_curve()
    ps = np.array([1.0, 3.0, 50.0])
    np.testing.assert_allclose(xi.scaled(0.25).eval(ps), 0.25 * xi.eval(ps), rtol=1e-15)
    np.testing.assert_array_equal(xi.scaled(0.0).eval(ps), 0.0)
    with pytest.raises(ValueError):
        xi.eval(0.5)


def test_tabulated_curve():
    ps = np.array([1.5, 2.0, 4.0])
    c = MomentCurve.tabulated(ps, [1.0, 2.0, 3.0])
    assert c.eval(2.0) == pytest.approx(2.0)


def test_quantile_grid_approximates_gaussian():
    xi = gaussian_quantile_function(2 ** 14)
    assert xi.partition.total_mass == pytest.approx(1.0)
    assert lp_norm(xi, 2) == pytest.approx(1.0, rel=2e-3)
    assert lp_norm(xi, 1) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-3)


# --- Ky Fan distance and superlevel restriction -------------------------------------


def ky_fan_brute(d: np.ndarray, masses: np.ndarray) -> float:
    # the infimum sits either at a value level or at a tail mass mu{|d| > t}
    levels = np.unique(np.concatenate([[0.0], np.abs(d)]))
    tails = [masses[np.abs(d) > t].sum() for t in levels]
    cands = np.unique(np.concatenate([levels, tails]))
    best = math.inf
    for e in cands:
        if masses[np.abs(d) > e].sum() <= e:
            best = min(best, e)
    return best


@settings(max_examples=80)
@given(arrays(float, st.integers(1, 12), elements=st.floats(-3, 3)),
       arrays(float, st.integers(1, 12), elements=st.floats(0.01, 1.0)))
def test_ky_fan_against_brute_force(vals, masses):
    n = min(len(vals), len(masses))
    part = MeasuredPartition.abstract(masses[:n])
    f = GridFunction(part, vals[:n])
    g = GridFunction(part, np.zeros(n))
    got = distance_in_measure(f, g)
    assert got == pytest.approx(ky_fan_brute(vals[:n], masses[:n]), abs=1e-12)


def test_ky_fan_is_a_metric_sample(rng):
    part = MeasuredPartition.uniform(30)
    fs = [GridFunction(part, rng.normal(size=30)) for _ in range(3)]
    d = lambda a, b: distance_in_measure(a, b)  # noqa: E731
    assert d(fs[0], fs[0]) == 0
    assert d(fs[0], fs[1]) == d(fs[1], fs[0])
    assert d(fs[0], fs[2]) <= d(fs[0], fs[1]) + d(fs[1], fs[2]) + 1e-15


def test_superlevel_restriction_greedy():
    f = GridFunction(MeasuredPartition.uniform(5), [1.0, 5.0, -4.0, 4.0, 2.0])
    r = superlevel_restriction(f, 0.4)
    # ties in |f| break by index: -4 (cell 2) before 4 (cell 3)
    np.testing.assert_array_equal(r.values, [0, 5, -4, 0, 0])
    np.testing.assert_array_equal(superlevel_restriction(f, 0.0).values, 0)
    with pytest.raises(ValueError):
        superlevel_restriction(f, -0.1)
    with pytest.raises(ValueError):
        superlevel_restriction(f, 2.0)


@settings(max_examples=50)
@given(arrays(float, st.integers(2, 16), elements=st.floats(-5, 5)), st.floats(0, 1), st.floats(1, 8))
def test_superlevel_is_optimal_for_equal_masses(vals, delta, p):
    import itertools

    n = len(vals)
    f = GridFunction(MeasuredPartition.uniform(n), vals)
    best = lp_norm(superlevel_restriction(f, delta), p)
    k = int(math.floor(delta * n + 1e-9))
    if n <= 10:
        for combo in itertools.combinations(range(n), k):
            mask = np.zeros(n, bool)
            mask[list(combo)] = True
            assert lp_norm(f.with_values(np.where(mask, vals, 0)), p) <= best * (1 + 1e-12) + 1e-300


# --- GRIDFN v1 --------------------------------------------------------------------------------


def test_gridfn_roundtrip(tmp_path, rng):
    f = GridFunction(MeasuredPartition.grid((3, 4), 0.25), rng.normal(size=12))
    path = tmp_path / "f.gridfn"
    write_gridfn(path, f)
    assert path.read_text().splitlines()[0] == "GRIDFN v1 d=2 n=3,4 h=0.25"
    g = read_gridfn(path)
    np.testing.assert_array_equal(g.values, f.values)
    assert g.partition.compatible(f.partition)


@pytest.mark.parametrize("text", ["GRIDFN v1 d=1 n=3 h=1\n1 2\n", "GRIDFN v1 d=2 n=3 h=1\n1 2 3\n",
                                  "GRIDFN v2 d=1 n=2 h=1\n1 2\n", "GRIDFN v1 d=1 n=2\n1 2\n",
                                  "GRIDFN v1 d=1 n=2 h=1\n1 nan\n"])
def test_gridfn_malformed(tmp_path, text):
    path = tmp_path / "bad.gridfn"
    path.write_text(text)
    with pytest.raises(ValueError):
        read_gridfn(path)


def test_gridfn_needs_grid(tmp_path):
    with pytest.raises(ValueError):
        write_gridfn(tmp_path / "x", GridFunction(MeasuredPartition.uniform(2), [1, 2]))


def test_indicator_helper():
    part = MeasuredPartition.uniform(4)
    f = indicator(part, [True, False, True, False])
    assert lp_norm(f, 3.0) == pytest.approx(0.5 ** (1 / 3))
