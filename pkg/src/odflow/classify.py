"""Magnitude-to-visual-variable mapping.

Class-break computation (equal interval, quantile, optimal natural breaks,
manual), proportional scaling of widths, RGB color interpolation, and legend
anchor selection.  Natural breaks use Fisher's exact dynamic program over
distinct values, so the reported partition is the global minimum of the
within-class sum of squared deviations.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .errors import BreaksOutOfRange, InputError, TooFewDistinctValues

RGB = tuple[int, int, int]

METHODS = ("equal_interval", "quantile", "jenks", "manual", "linear_minmax")

# Published color scheme tables (colorbrewer.org), 3..9 classes each.
# Scheme names are part of the project-file contract.
COLOR_SCHEMES: dict[str, dict[int, tuple[str, ...]]] = {
    "Blues": {
        3: ("#deebf7", "#9ecae1", "#3182bd"),
        4: ("#eff3ff", "#bdd7e7", "#6baed6", "#2171b5"),
        5: ("#eff3ff", "#bdd7e7", "#6baed6", "#3182bd", "#08519c"),
        6: ("#eff3ff", "#c6dbef", "#9ecae1", "#6baed6", "#3182bd", "#08519c"),
        7: ("#eff3ff", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#084594"),
        8: ("#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#084594"),
        9: ("#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c", "#08306b"),
    },
    "Greens": {
        3: ("#e5f5e0", "#a1d99b", "#31a354"),
        4: ("#edf8e9", "#bae4b3", "#74c476", "#238b45"),
        5: ("#edf8e9", "#bae4b3", "#74c476", "#31a354", "#006d2c"),
        6: ("#edf8e9", "#c7e9c0", "#a1d99b", "#74c476", "#31a354", "#006d2c"),
        7: ("#edf8e9", "#c7e9c0", "#a1d99b", "#74c476", "#41ab5d", "#238b45", "#005a32"),
        8: ("#f7fcf5", "#e5f5e0", "#c7e9c0", "#a1d99b", "#74c476", "#41ab5d", "#238b45", "#005a32"),
        9: ("#f7fcf5", "#e5f5e0", "#c7e9c0", "#a1d99b", "#74c476", "#41ab5d", "#238b45", "#006d2c", "#00441b"),
    },
    "Greys": {
        3: ("#f0f0f0", "#bdbdbd", "#636363"),
        4: ("#f7f7f7", "#cccccc", "#969696", "#525252"),
        5: ("#f7f7f7", "#cccccc", "#969696", "#636363", "#252525"),
        6: ("#f7f7f7", "#d9d9d9", "#bdbdbd", "#969696", "#636363", "#252525"),
        7: ("#f7f7f7", "#d9d9d9", "#bdbdbd", "#969696", "#737373", "#525252", "#252525"),
        8: ("#ffffff", "#f0f0f0", "#d9d9d9", "#bdbdbd", "#969696", "#737373", "#525252", "#252525"),
        9: ("#ffffff", "#f0f0f0", "#d9d9d9", "#bdbdbd", "#969696", "#737373", "#525252", "#252525", "#000000"),
    },
    "Oranges": {
        3: ("#fee6ce", "#fdae6b", "#e6550d"),
        4: ("#feedde", "#fdbe85", "#fd8d3c", "#d94701"),
        5: ("#feedde", "#fdbe85", "#fd8d3c", "#e6550d", "#a63603"),
        6: ("#feedde", "#fdd0a2", "#fdae6b", "#fd8d3c", "#e6550d", "#a63603"),
        7: ("#feedde", "#fdd0a2", "#fdae6b", "#fd8d3c", "#f16913", "#d94801", "#8c2d04"),
        8: ("#fff5eb", "#fee6ce", "#fdd0a2", "#fdae6b", "#fd8d3c", "#f16913", "#d94801", "#8c2d04"),
        9: ("#fff5eb", "#fee6ce", "#fdd0a2", "#fdae6b", "#fd8d3c", "#f16913", "#d94801", "#a63603", "#7f2704"),
    },
    "Purples": {
        3: ("#efedf5", "#bcbddc", "#756bb1"),
        4: ("#f2f0f7", "#cbc9e2", "#9e9ac8", "#6a51a3"),
        5: ("#f2f0f7", "#cbc9e2", "#9e9ac8", "#756bb1", "#54278f"),
        6: ("#f2f0f7", "#dadaeb", "#bcbddc", "#9e9ac8", "#756bb1", "#54278f"),
        7: ("#f2f0f7", "#dadaeb", "#bcbddc", "#9e9ac8", "#807dba", "#6a51a3", "#4a1486"),
        8: ("#fcfbfd", "#efedf5", "#dadaeb", "#bcbddc", "#9e9ac8", "#807dba", "#6a51a3", "#4a1486"),
        9: ("#fcfbfd", "#efedf5", "#dadaeb", "#bcbddc", "#9e9ac8", "#807dba", "#6a51a3", "#54278f", "#3f007d"),
    },
    "Reds": {
        3: ("#fee0d2", "#fc9272", "#de2d26"),
        4: ("#fee5d9", "#fcae91", "#fb6a4a", "#cb181d"),
        5: ("#fee5d9", "#fcae91", "#fb6a4a", "#de2d26", "#a50f15"),
        6: ("#fee5d9", "#fcbba1", "#fc9272", "#fb6a4a", "#de2d26", "#a50f15"),
        7: ("#fee5d9", "#fcbba1", "#fc9272", "#fb6a4a", "#ef3b2c", "#cb181d", "#99000d"),
        8: ("#fff5f0", "#fee0d2", "#fcbba1", "#fc9272", "#fb6a4a", "#ef3b2c", "#cb181d", "#99000d"),
        9: ("#fff5f0", "#fee0d2", "#fcbba1", "#fc9272", "#fb6a4a", "#ef3b2c", "#cb181d", "#a50f15", "#67000d"),
    },
    "YlOrRd": {
        3: ("#ffeda0", "#feb24c", "#f03b20"),
        4: ("#ffffb2", "#fecc5c", "#fd8d3c", "#e31a1c"),
        5: ("#ffffb2", "#fecc5c", "#fd8d3c", "#f03b20", "#bd0026"),
        6: ("#ffffb2", "#fed976", "#feb24c", "#fd8d3c", "#f03b20", "#bd0026"),
        7: ("#ffffb2", "#fed976", "#feb24c", "#fd8d3c", "#fc4e2a", "#e31a1c", "#b10026"),
        8: ("#ffffcc", "#ffeda0", "#fed976", "#feb24c", "#fd8d3c", "#fc4e2a", "#e31a1c", "#b10026"),
        9: ("#ffffcc", "#ffeda0", "#fed976", "#feb24c", "#fd8d3c", "#fc4e2a", "#e31a1c", "#bd0026", "#800026"),
    },
    "YlGnBu": {
        3: ("#edf8b1", "#7fcdbb", "#2c7fb8"),
        4: ("#ffffcc", "#a1dab4", "#41b6c4", "#225ea8"),
        5: ("#ffffcc", "#a1dab4", "#41b6c4", "#2c7fb8", "#253494"),
        6: ("#ffffcc", "#c7e9b4", "#7fcdbb", "#41b6c4", "#2c7fb8", "#253494"),
        7: ("#ffffcc", "#c7e9b4", "#7fcdbb", "#41b6c4", "#1d91c0", "#225ea8", "#0c2c84"),
        8: ("#ffffd9", "#edf8b1", "#c7e9b4", "#7fcdbb", "#41b6c4", "#1d91c0", "#225ea8", "#0c2c84"),
        9: ("#ffffd9", "#edf8b1", "#c7e9b4", "#7fcdbb", "#41b6c4", "#1d91c0", "#225ea8", "#253494", "#081d58"),
    },
    "RdBu": {
        3: ("#ef8a62", "#f7f7f7", "#67a9cf"),
        4: ("#ca0020", "#f4a582", "#92c5de", "#0571b0"),
        5: ("#ca0020", "#f4a582", "#f7f7f7", "#92c5de", "#0571b0"),
        6: ("#b2182b", "#ef8a62", "#fddbc7", "#d1e5f0", "#67a9cf", "#2166ac"),
        7: ("#b2182b", "#ef8a62", "#fddbc7", "#f7f7f7", "#d1e5f0", "#67a9cf", "#2166ac"),
        8: ("#b2182b", "#d6604d", "#f4a582", "#fddbc7", "#d1e5f0", "#92c5de", "#4393c3", "#2166ac"),
        9: ("#b2182b", "#d6604d", "#f4a582", "#fddbc7", "#f7f7f7", "#d1e5f0", "#92c5de", "#4393c3", "#2166ac"),
    },
    "PRGn": {
        3: ("#af8dc3", "#f7f7f7", "#7fbf7b"),
        4: ("#7b3294", "#c2a5cf", "#a6dba0", "#008837"),
        5: ("#7b3294", "#c2a5cf", "#f7f7f7", "#a6dba0", "#008837"),
        6: ("#762a83", "#af8dc3", "#e7d4e8", "#d9f0d3", "#7fbf7b", "#1b7837"),
        7: ("#762a83", "#af8dc3", "#e7d4e8", "#f7f7f7", "#d9f0d3", "#7fbf7b", "#1b7837"),
        8: ("#762a83", "#9970ab", "#c2a5cf", "#e7d4e8", "#d9f0d3", "#a6dba0", "#5aae61", "#1b7837"),
        9: ("#762a83", "#9970ab", "#c2a5cf", "#e7d4e8", "#f7f7f7", "#d9f0d3", "#a6dba0", "#5aae61", "#1b7837"),
    },
    "PuOr": {
        3: ("#f1a340", "#f7f7f7", "#998ec3"),
        4: ("#e66101", "#fdb863", "#b2abd2", "#5e3c99"),
        5: ("#e66101", "#fdb863", "#f7f7f7", "#b2abd2", "#5e3c99"),
        6: ("#b35806", "#f1a340", "#fee0b6", "#d8daeb", "#998ec3", "#542788"),
        7: ("#b35806", "#f1a340", "#fee0b6", "#f7f7f7", "#d8daeb", "#998ec3", "#542788"),
        8: ("#b35806", "#e08214", "#fdb863", "#fee0b6", "#d8daeb", "#b2abd2", "#8073ac", "#542788"),
        9: ("#b35806", "#e08214", "#fdb863", "#fee0b6", "#f7f7f7", "#d8daeb", "#b2abd2", "#8073ac", "#542788"),
    },
    "Spectral": {
        3: ("#fc8d59", "#ffffbf", "#99d594"),
        4: ("#d7191c", "#fdae61", "#abdda4", "#2b83ba"),
        5: ("#d7191c", "#fdae61", "#ffffbf", "#abdda4", "#2b83ba"),
        6: ("#d53e4f", "#fc8d59", "#fee08b", "#e6f598", "#99d594", "#3288bd"),
        7: ("#d53e4f", "#fc8d59", "#fee08b", "#ffffbf", "#e6f598", "#99d594", "#3288bd"),
        8: ("#d53e4f", "#f46d43", "#fdae61", "#fee08b", "#e6f598", "#abdda4", "#66c2a5", "#3288bd"),
        9: ("#d53e4f", "#f46d43", "#fdae61", "#fee08b", "#ffffbf", "#e6f598", "#abdda4", "#66c2a5", "#3288bd"),
    },
}


def hex_to_rgb(code: str) -> RGB:
    code = code.lstrip("#")
    return int(code[0:2], 16), int(code[2:4], 16), int(code[4:6], 16)


def rgb_to_hex(rgb: RGB) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def scheme_colors(name: str, k: int) -> tuple[RGB, ...]:
    try:
        table = COLOR_SCHEMES[name]
    except KeyError:
        raise InputError(f"unknown color scheme {name!r}") from None
    try:
        return tuple(hex_to_rgb(c) for c in table[k])
    except KeyError:
        raise InputError(f"scheme {name!r} has no {k}-class variant") from None


@dataclass(frozen=True)
class ColorRamp:
    """Color source for a layer: a constant, a two-color gradient, or a
    classed scheme whose length must equal the class count."""

    mode: str  # single | continuous | classified
    colors: tuple[RGB, ...]

    def __post_init__(self):
        if self.mode == "single" and len(self.colors) != 1:
            raise InputError("single ramp needs exactly one color")
        if self.mode == "continuous" and len(self.colors) != 2:
            raise InputError("continuous ramp needs exactly two colors")


def half_up(value: float, decimals: int) -> Decimal:
    """Round to `decimals` places with ties going away from zero-half-up."""
    q = Decimal(1).scaleb(-decimals)
    return Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP)


def format_label(value: float, decimals: int) -> str:
    """Fixed-point label text used in legends (half-up rounding)."""
    d = half_up(value, decimals)
    if decimals <= 0:
        return str(d.to_integral_value(rounding=ROUND_HALF_UP))
    return str(d)


@dataclass(frozen=True)
class ClassificationResult:
    """Breaks plus the class assignment they induce.

    ``breaks`` are the k-1 upper bounds in ascending order.  For natural
    breaks they are the class maxima and assignment is right-closed (a value
    equal to a break stays in the lower class); the other methods use
    half-open intervals [lower, upper) with the last class closed.
    ``indices`` maps each input value to its class.
    """

    method: str
    k: int
    breaks: tuple[float, ...]
    indices: tuple[int, ...]
    vmin: float
    vmax: float
    inclusive_breaks: bool = False

    def assign(self, value: float) -> int:
        if not self.breaks:
            return 0
        if self.inclusive_breaks:
            return bisect_left(self.breaks, value)
        return bisect_right(self.breaks, value)

    def class_bounds(self, index: int) -> tuple[float, float]:
        lower = self.vmin if index == 0 else self.breaks[index - 1]
        upper = self.vmax if index == self.k - 1 else self.breaks[index]
        return lower, upper


def _jenks_breaks(values: list[float], k: int) -> tuple[float, ...]:
    """Fisher's O(k*m^2) dynamic program over the m distinct values.

    Classes of an optimal 1-D least-squares partition are intervals of the
    value line, so ties never need to be split and working on distinct
    values with counts loses nothing.
    """
    distinct: list[float] = []
    counts: list[int] = []
    for v in sorted(values):
        if distinct and v == distinct[-1]:
            counts[-1] += 1
        else:
            distinct.append(v)
            counts.append(1)
    m = len(distinct)

    # prefix sums of weight, weighted value and weighted square
    pw = [0.0] * (m + 1)
    ps = [0.0] * (m + 1)
    pq = [0.0] * (m + 1)
    for i in range(m):
        pw[i + 1] = pw[i] + counts[i]
        ps[i + 1] = ps[i] + counts[i] * distinct[i]
        pq[i + 1] = pq[i] + counts[i] * distinct[i] * distinct[i]

    def sse(i: int, j: int) -> float:
        # cost of one class covering distinct[i..j] inclusive
        w = pw[j + 1] - pw[i]
        s = ps[j + 1] - ps[i]
        q = pq[j + 1] - pq[i]
        return max(q - s * s / w, 0.0)

    inf = math.inf
    cost = [[inf] * m for _ in range(k + 1)]
    cut = [[0] * m for _ in range(k + 1)]
    for j in range(m):
        cost[1][j] = sse(0, j)
    for c in range(2, k + 1):
        for j in range(c - 1, m):
            best = inf
            best_i = c - 1
            for i in range(c - 1, j + 1):
                t = cost[c - 1][i - 1] + sse(i, j)
                if t < best:
                    best = t
                    best_i = i
            cost[c][j] = best
            cut[c][j] = best_i

    # backtrack: ends[c] = last distinct index of class c
    ends = [0] * k
    j = m - 1
    for c in range(k, 0, -1):
        ends[c - 1] = j
        if c > 1:
            j = cut[c][j] - 1
    return tuple(distinct[ends[c]] for c in range(k - 1))


def classify(values, method: str, k: int | None = None,
             manual_breaks=None) -> ClassificationResult:
    """Compute class breaks for ``values`` and assign every value a class.

    ``k`` must be between 2 and 9 (ignored for ``linear_minmax``, which is
    the degenerate single-class result backing continuous scaling).  Manual
    breaks must be strictly ascending and strictly inside the data range.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise InputError("classify needs at least one value")
    if method not in METHODS:
        raise InputError(f"unknown classification method {method!r}")
    vmin, vmax = min(vals), max(vals)

    if method == "linear_minmax":
        return ClassificationResult(method, 1, (), (0,) * len(vals), vmin, vmax)

    if method == "manual":
        if not manual_breaks:
            raise InputError("manual classification needs explicit breaks")
        breaks = tuple(float(b) for b in manual_breaks)
        k = len(breaks) + 1
    else:
        if k is None:
            raise InputError(f"{method} classification needs k")
        k = int(k)
    if not 2 <= k <= 9:
        raise InputError(f"class count {k} outside [2, 9]")

    distinct_count = len(set(vals))
    if method in ("jenks", "quantile") and distinct_count < k:
        raise TooFewDistinctValues(distinct_count, k)
    if distinct_count < 2:
        raise TooFewDistinctValues(distinct_count, k)

    inclusive = False
    if method == "equal_interval":
        breaks = tuple(vmin + i * (vmax - vmin) / k for i in range(1, k))
    elif method == "quantile":
        s = sorted(vals)
        n = len(s)
        breaks = tuple(s[math.ceil(i * n / k) - 1] for i in range(1, k))
        if any(breaks[i] >= breaks[i + 1] for i in range(len(breaks) - 1)):
            raise TooFewDistinctValues(distinct_count, k)
    elif method == "jenks":
        breaks = _jenks_breaks(vals, k)
        inclusive = True
    else:  # manual
        if any(breaks[i] >= breaks[i + 1] for i in range(len(breaks) - 1)):
            raise BreaksOutOfRange("manual breaks must be strictly ascending")
        if breaks[0] <= vmin or breaks[-1] >= vmax:
            raise BreaksOutOfRange(
                f"manual breaks must lie strictly inside ({vmin!r}, {vmax!r})"
            )

    result = ClassificationResult(method, k, breaks, (), vmin, vmax, inclusive)
    indices = tuple(result.assign(v) for v in vals)
    return ClassificationResult(method, k, breaks, indices, vmin, vmax, inclusive)


def jenks_sdcm(values, result: ClassificationResult) -> float:
    """Within-class sum of squared deviations realized by a classification."""
    groups: dict[int, list[float]] = {}
    for v, i in zip(values, result.indices):
        groups.setdefault(i, []).append(float(v))
    total = 0.0
    for g in groups.values():
        mean = math.fsum(g) / len(g)
        total += math.fsum((x - mean) ** 2 for x in g)
    return total


def proportional_width(value: float, vmin: float, vmax: float,
                       width_range: tuple[float, float]) -> float:
    """Linear min-max scaling of a value into a width range (px)."""
    wmin, wmax = width_range
    if vmin == vmax:
        return (wmin + wmax) / 2
    return wmin + (value - vmin) / (vmax - vmin) * (wmax - wmin)


def classed_width(index: int, k: int, width_range: tuple[float, float]) -> float:
    """Width of class ``index`` out of ``k``, evenly spaced over the range."""
    wmin, wmax = width_range
    if k <= 1:
        return (wmin + wmax) / 2
    return wmin + index * (wmax - wmin) / (k - 1)


def interpolate_color(value: float, vmin: float, vmax: float, ramp: ColorRamp) -> RGB:
    """Channel-wise linear interpolation with half-up channel rounding."""
    if ramp.mode != "continuous":
        raise InputError("interpolate_color needs a continuous ramp")
    (r0, g0, b0), (r1, g1, b1) = ramp.colors
    if vmin == vmax:
        t = 0.5
    else:
        t = (value - vmin) / (vmax - vmin)
    t = min(1.0, max(0.0, t))

    def chan(a: int, b: int) -> int:
        return int(math.floor(a + (b - a) * t + 0.5))

    return chan(r0, r1), chan(g0, g1), chan(b0, b1)


@dataclass(frozen=True)
class LegendAnchor:
    """One labeled legend entry; classed entries carry their value bounds."""

    value: float
    label: str
    lower: float | None = None
    upper: float | None = None


def legend_values(values, scaling, decimals: int = 2) -> tuple[LegendAnchor, ...]:
    """Legend anchors for a layer.

    Proportional scaling yields minimum / arithmetic mean / maximum;
    a :class:`ClassificationResult` yields one anchor per class labeled
    with its bounds at the configured decimals.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise InputError("legend_values needs at least one value")
    if scaling == "proportional" or (
        isinstance(scaling, ClassificationResult) and scaling.method == "linear_minmax"
    ):
        vmin, vmax = min(vals), max(vals)
        mean = math.fsum(vals) / len(vals)
        anchors = []
        seen = set()
        for v in (vmin, mean, vmax):
            if v in seen:
                continue
            seen.add(v)
            anchors.append(LegendAnchor(v, format_label(v, decimals)))
        return tuple(anchors)
    if not isinstance(scaling, ClassificationResult):
        raise InputError("scaling must be 'proportional' or a ClassificationResult")
    anchors = []
    for i in range(scaling.k):
        lower, upper = scaling.class_bounds(i)
        label = f"{format_label(lower, decimals)} - {format_label(upper, decimals)}"
        anchors.append(LegendAnchor(upper, label, lower, upper))
    return tuple(anchors)
