"""Class breaks, width scaling, color interpolation and legend anchors."""

from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odflow.classify import (
    COLOR_SCHEMES,
    ColorRamp,
    classed_width,
    classify,
    format_label,
    interpolate_color,
    jenks_sdcm,
    legend_values,
    proportional_width,
    scheme_colors,
)
from odflow.errors import BreaksOutOfRange, InputError, TooFewDistinctValues


def brute_force_min_sdcm(values: list[float], k: int) -> float:
    """Exhaustive minimum over all interval partitions of the sorted data."""
    s = sorted(values)
    n = len(s)
    best = math.inf
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0, *cuts, n)
        total = 0.0
        for lo, hi in zip(bounds, bounds[1:]):
            g = s[lo:hi]
            m = sum(g) / len(g)
            total += sum((x - m) ** 2 for x in g)
        best = min(best, total)
    return best


# --- classification --------------------------------------------------------


def test_equal_interval_breaks():
    r = classify([0, 100, 25, 60], "equal_interval", 4)
    assert r.breaks == (25.0, 50.0, 75.0)


def test_quantile_positions():
    r = classify(list(range(1, 11)), "quantile", 5)
    assert r.breaks == (2.0, 4.0, 6.0, 8.0)


def test_jenks_two_cluster_example():
    values = [1, 2, 3, 10, 11, 12]
    r = classify(values, "jenks", 2)
    assert r.breaks == (3.0,)
    assert r.indices == (0, 0, 0, 1, 1, 1)
    assert jenks_sdcm(values, r) == brute_force_min_sdcm(values, 2) == 4.0


def test_jenks_assign_closed_on_break():
    r = classify([1, 2, 3, 10, 11, 12], "jenks", 2)
    assert r.assign(3.0) == 0
    assert r.assign(3.0001) == 1


def test_manual_breaks():
    r = classify([0, 5, 10], "manual", manual_breaks=[2.5, 7.5])
    assert r.k == 3
    assert r.indices == (0, 1, 2)
    with pytest.raises(BreaksOutOfRange):
        classify([0, 5, 10], "manual", manual_breaks=[7.5, 2.5])
    with pytest.raises(BreaksOutOfRange):
        classify([0, 5, 10], "manual", manual_breaks=[0.0, 5.0])


def test_linear_minmax_degenerate_result():
    r = classify([3, 9, 27], "linear_minmax")
    assert r.k == 1 and r.breaks == ()
    assert r.assign(100.0) == 0


def test_too_few_distinct_values():
    with pytest.raises(TooFewDistinctValues):
        classify([1, 1, 1, 2], "jenks", 3)
    with pytest.raises(TooFewDistinctValues):
        classify([5, 5, 5], "equal_interval", 2)


def test_quantile_tied_breaks_rejected():
    with pytest.raises(TooFewDistinctValues):
        classify([1, 1, 1, 1, 2, 3], "quantile", 3)


def test_k_bounds():
    with pytest.raises(InputError):
        classify(list(range(20)), "jenks", 10)
    with pytest.raises(InputError):
        classify(list(range(20)), "jenks", 1)


def test_min_max_boundary_classes():
    for method in ("equal_interval", "quantile", "jenks"):
        vals = [3.0, 7.5, 12.0, 20.0, 21.5, 40.0]
        r = classify(vals, method, 3)
        assert r.indices[0] == 0  # vals sorted ascending at construction?
        assert r.assign(min(vals)) == 0
        assert r.assign(max(vals)) == r.k - 1


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=40),
       st.integers(2, 5), st.randoms())
@settings(max_examples=80, deadline=None)
def test_classify_partition_properties(values, k, rnd):
    if len(set(values)) < k:
        return
    for method in ("equal_interval", "quantile", "jenks"):
        try:
            r = classify(values, method, k)
        except TooFewDistinctValues:
            continue
        assert len(r.indices) == len(values)
        assert all(0 <= i < r.k for i in r.indices)
        assert all(r.breaks[i] < r.breaks[i + 1] for i in range(len(r.breaks) - 1))
        # permutation invariance of breaks
        shuffled = list(values)
        rnd.shuffle(shuffled)
        assert classify(shuffled, method, k).breaks == r.breaks
        # assignment is monotone
        probes = sorted(rnd.uniform(min(values), max(values)) for _ in range(8))
        assigned = [r.assign(p) for p in probes]
        assert assigned == sorted(assigned)


@given(st.lists(st.integers(0, 100), min_size=4, max_size=12), st.integers(2, 4))
@settings(max_examples=60, deadline=None)
def test_jenks_matches_exhaustive_minimum(values, k):
    vals = [float(v) for v in values]
    if len(set(vals)) < k:
        return
    r = classify(vals, "jenks", k)
    dp = jenks_sdcm(vals, r)
    bf = brute_force_min_sdcm(vals, k)
    assert dp <= bf + 1e-9 * max(1.0, bf)


def test_equal_interval_affine_equivariance():
    vals = [1.0, 4.0, 9.0, 16.0, 25.0]
    r = classify(vals, "equal_interval", 4)
    a, b = 3.5, -11.0
    r2 = classify([a * v + b for v in vals], "equal_interval", 4)
    for br, br2 in zip(r.breaks, r2.breaks):
        assert math.isclose(a * br + b, br2, rel_tol=1e-12)


# --- proportional width ----------------------------------------------------


def test_proportional_width_endpoints():
    assert proportional_width(0, 0, 100, (1, 12)) == 1.0
    assert proportional_width(100, 0, 100, (1, 12)) == 12.0
    assert proportional_width(50, 0, 100, (2, 10)) == 6.0


def test_proportional_width_all_equal_midpoint():
    assert proportional_width(7, 7, 7, (2, 10)) == 6.0


def test_proportional_width_banana_max():
    assert proportional_width(242800, 0, 242800, (1, 12)) == 12.0


def test_classed_width_spacing():
    assert classed_width(0, 4, (1.0, 10.0)) == 1.0
    assert classed_width(3, 4, (1.0, 10.0)) == 10.0
    assert classed_width(1, 4, (1.0, 10.0)) == 4.0


# --- color -----------------------------------------------------------------


def test_interpolate_endpoints():
    ramp = ColorRamp("continuous", ((255, 255, 255), (0, 0, 255)))
    assert interpolate_color(0, 0, 1, ramp) == (255, 255, 255)
    assert interpolate_color(1, 0, 1, ramp) == (0, 0, 255)


def test_interpolate_midpoint_half_up():
    ramp = ColorRamp("continuous", ((255, 255, 255), (0, 0, 255)))
    assert interpolate_color(0.5, 0, 1, ramp) == (128, 128, 255)


def test_interpolate_quarter_to_black():
    ramp = ColorRamp("continuous", ((255, 255, 255), (0, 0, 0)))
    assert interpolate_color(0.25, 0, 1, ramp) == (191, 191, 191)


@given(st.integers(0, 255), st.integers(0, 255),
       st.floats(0, 1, allow_nan=False), st.floats(0, 1, allow_nan=False))
@settings(max_examples=100, deadline=None)
def test_interpolate_monotone_per_channel(a, b, t1, t2):
    lo, hi = min(a, b), max(a, b)
    ramp = ColorRamp("continuous", ((lo, lo, lo), (hi, hi, hi)))
    c1 = interpolate_color(min(t1, t2), 0, 1, ramp)
    c2 = interpolate_color(max(t1, t2), 0, 1, ramp)
    assert c1[0] <= c2[0]


def test_scheme_tables_have_all_sizes():
    for name, table in COLOR_SCHEMES.items():
        for k in range(3, 10):
            colors = scheme_colors(name, k)
            assert len(colors) == k, (name, k)
            for rgb in colors:
                assert all(0 <= c <= 255 for c in rgb)


def test_unknown_scheme():
    with pytest.raises(InputError):
        scheme_colors("NotAScheme", 5)


# --- legends ----------------------------------------------------------------


def test_legend_proportional_min_mean_max():
    anchors = legend_values([10, 20, 60], "proportional", decimals=0)
    assert [a.value for a in anchors] == [10.0, 30.0, 60.0]
    assert [a.label for a in anchors] == ["10", "30", "60"]


def test_legend_classified_rows():
    rng = random.Random(7)
    vals = [rng.uniform(0, 100) for _ in range(40)]
    r = classify(vals, "quantile", 5)
    anchors = legend_values(vals, r, decimals=1)
    assert len(anchors) == 5
    assert anchors[0].lower == min(vals)
    assert anchors[-1].upper == max(vals)


def test_legend_single_value_dataset():
    anchors = legend_values([4.2], "proportional", decimals=1)
    assert len(anchors) == 1
    assert anchors[0].label == "4.2"


def test_zero_decimal_label_half_up():
    assert format_label(0.999, 0) == "1"
    assert format_label(2.5, 0) == "3"
    assert format_label(-1.005, 2) == "-1.01"
    assert format_label(1.0, 2) == "1.00"
