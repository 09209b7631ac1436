"""Construction of closed flow-symbol outlines between two node circles.

Four styles are provided: an asymmetric curve with a half-arrow, a straight
variant of it, a tapered curve that narrows to a point at the destination
periphery, and a teardrop (the tapered construction run with the endpoints
swapped, wide end at the destination).  The curve-with-half-arrow outline is
a faithful port of the original JavaScript routine, preserving two of its
quirks in the default "legacy" mode:

* in the general-slope branch the chord-parallel gap component evaluates to
  zero (the source read a variable before assigning it);
* the left-hand traffic branch uses a literal 2.5 where the right-hand
  branch uses the width-dependent arrow-length constant.

``corrected=True`` switches both to the intended arithmetic.  All math is
double precision; rounding happens only at serialization time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

FLOW_STYLES = ("curve_half_arrow", "straight_half_arrow", "tapered", "teardrop")

# Suppress symbols whose node circles nearly touch.
SUPPRESSION_FACTOR = 1.2

Point = tuple[float, float]
# ("M", p) | ("L", p) | ("C", c1, c2, p)
Command = tuple


@dataclass(frozen=True)
class ArrowConstants:
    """Half-arrow sizing for a given flow width."""

    length: float  # multiplier applied to the perpendicular deltas
    width: float   # arrow breadth in px


def arrow_constants(flow_width: float) -> ArrowConstants:
    """Piecewise-constant arrow sizing bands with breakpoints 2,3,4,6,8,10."""
    if flow_width >= 10:
        return ArrowConstants(2.42, flow_width * 1.1)
    if flow_width >= 8:
        return ArrowConstants(2.64, flow_width * 1.2)
    if flow_width >= 6:
        return ArrowConstants(3.08, flow_width * 1.4)
    if flow_width >= 4:
        return ArrowConstants(4.4, flow_width * 2)
    if flow_width >= 3:
        return ArrowConstants(6.6, flow_width * 3)
    if flow_width >= 2:
        return ArrowConstants(8.8, flow_width * 4)
    return ArrowConstants(11.0, flow_width * 5)


@dataclass(frozen=True)
class PathSpec:
    """Resolved geometry of one flow symbol.

    ``commands`` always starts with a MoveTo at ``start`` and the last
    command ends at ``start`` again, producing a closed fillable outline.
    The construction-frame points are retained so tests can check them; for
    the teardrop style the frame is the swapped one, i.e. ``start`` sits on
    the destination circle.
    """

    style: str
    commands: tuple[Command, ...]
    closed: bool
    start: Point                 # P0: path start on the origin-side periphery
    origin_offset: Optional[Point]   # P1: perpendicular offset next to start
    outer_end: Optional[Point]       # P2: outer-curve end before the arrow
    end: Point                   # P3: point on the destination-side periphery
    elbow: Optional[Point]       # arrow elbow
    outer_ctrl1: Optional[Point]
    outer_ctrl2: Optional[Point]
    inner_ctrl1: Point
    inner_ctrl2: Point
    clip_start: Point            # periphery point before the gap shift
    clip_end: Point

    def path_data(self, fmt=str) -> str:
        """Serialize to SVG path data, commands in construction order."""
        parts: list[str] = []
        for cmd in self.commands:
            if cmd[0] == "M" or cmd[0] == "L":
                (_, (x, y)) = cmd
                parts.append(f"{cmd[0]}{fmt(x)},{fmt(y)}")
            else:
                _, (x1, y1), (x2, y2), (x, y) = cmd
                parts.append(f"C{fmt(x1)},{fmt(y1)} {fmt(x2)},{fmt(y2)} {fmt(x)},{fmt(y)}")
        return " ".join(parts)


def _frame(x0: float, y0: float, x3: float, y3: float, flow_width: float,
           r0: float, r3: float, righthand: bool, corrected: bool):
    """Shared preamble: suppression, periphery clipping, gap shift, deltas.

    Returns None when the symbol is suppressed, else a dict of everything
    the style builders need.  Arithmetic mirrors the original routine
    operation for operation, including its sequential clipping (the
    destination clip uses the already-moved origin).
    """
    consts = arrow_constants(flow_width)
    arrowlen = consts.length
    arrowwidth = consts.width

    dx = abs(x3 - x0)
    dy = abs(y3 - y0)
    length = math.sqrt(dx * dx + dy * dy)
    if length < (r0 + r3) * SUPPRESSION_FACTOR:
        return None
    if length == 0.0:  # coincident centers with zero radii: nothing to draw
        return None

    x0 = x0 + (x3 - x0) * r0 / length
    y0 = y0 + (y3 - y0) * r0 / length
    x3 = x3 - (x3 - x0) * r3 / (length - r0)
    y3 = y3 - (y3 - y0) * r3 / (length - r0)
    clip_start = (x0, y0)
    clip_end = (x3, y3)

    sign = -1.0
    gap = flow_width * 0.05
    if y0 == y3:  # horizontal
        xdelta = 0.0
        ydelta = flow_width / 2
        xarrowdelta = 0.0
        yarrowdelta = arrowwidth / 1.0
        xgap = 0.0
        ygap = gap
    elif x0 == x3:  # vertical
        ydelta = 0.0
        xdelta = flow_width / 2
        yarrowdelta = 0.0
        xarrowdelta = arrowwidth / 1.0
        xgap = gap
        ygap = 0.0
    else:
        v = (x3 - x0) / (y0 - y3)
        xdelta = flow_width / 2.0 / math.sqrt(1 + v * v)
        ydelta = abs(xdelta * v)
        xarrowdelta = arrowwidth / math.sqrt(1 + v * v)
        yarrowdelta = abs(xarrowdelta * v)
        xgap = gap / math.sqrt(1 + v * v)
        ygap = abs(xgap * v) if corrected else 0.0  # legacy: reads unset var
        if v < 0:
            sign = 1.0

    x0 = x0 + xgap if y0 > y3 else x0 - xgap
    x3 = x3 + xgap if y0 > y3 else x3 - xgap
    y0 = y0 - ygap if x0 > x3 else y0 + ygap
    y3 = y3 - ygap if x0 > x3 else y3 + ygap

    # The two traffic-rule branches differ only by flipped comparisons (and
    # the legacy left-hand constant), so fold them into two predicates.
    above = (y0 > y3) if righthand else (y0 < y3)
    before = (x0 > x3) if righthand else (x0 < x3)
    head = arrowlen if (righthand or corrected) else 2.5

    xc1 = x0 + xdelta / 2 if above else x0 - xdelta / 2
    yc1 = y0 - ydelta / 2 if before else y0 + ydelta / 2

    yc2 = y3 - ydelta + head * xdelta * sign if before else y3 + ydelta - head * xdelta * sign
    xc2 = x3 + xdelta + head * ydelta * sign if above else x3 - xdelta - head * ydelta * sign

    xelbow = x3 + xarrowdelta + head * ydelta * sign if above else x3 - xarrowdelta - head * ydelta * sign
    yelbow = y3 - yarrowdelta + head * xdelta * sign if before else y3 + yarrowdelta - head * xdelta * sign

    arcx = xdelta * length / 4 / flow_width
    arcy = ydelta * length / 4 / flow_width
    x13rd = x0 + arcx if above else x0 - arcx
    y13rd = y0 - arcy if before else y0 + arcy
    x23rd = x0 + (x3 - x0) / 3 + arcx if above else x0 + (x3 - x0) / 3 - arcx
    y23rd = y0 + (y3 - y0) / 3 - arcy if before else y0 + (y3 - y0) / 3 + arcy
    arcx = arcx + xdelta
    arcy = arcy + ydelta
    xc13rd = x0 + arcx if above else x0 - arcx
    yc13rd = y0 - arcy if before else y0 + arcy
    xc23rd = x0 + (x3 - x0) / 3 + arcx if above else x0 + (x3 - x0) / 3 - arcx
    yc23rd = y0 + (y3 - y0) / 3 - arcy if before else y0 + (y3 - y0) / 3 + arcy

    # Outer-curve second control for the tapered/teardrop styles: built from
    # the destination point like the outer-curve end, arrow terms dropped.
    xtap = x3 + xdelta if above else x3 - xdelta
    ytap = y3 - ydelta if before else y3 + ydelta

    return dict(
        p0=(x0, y0), p3=(x3, y3),
        p1=(xc1, yc1), p2=(xc2, yc2), elbow=(xelbow, yelbow),
        outer_c1=(xc13rd, yc13rd), outer_c2=(xc23rd, yc23rd),
        inner_c1=(x23rd, y23rd), inner_c2=(x13rd, y13rd),
        taper_c2=(xtap, ytap),
        clip_start=clip_start, clip_end=clip_end,
    )


def flow_path(style: str, origin: Point, dest: Point, flow_width: float,
              source_radius: float = 0.0, target_radius: float = 0.0,
              traffic_rule: str = "right", corrected: bool = False) -> PathSpec | None:
    """Build the closed outline for one flow, or None when suppressed.

    ``origin``/``dest`` are node circle centers in px, ``flow_width`` the
    symbol thickness in px.  ``traffic_rule`` picks the side the curve bows
    to so that opposite flows of a pair separate.
    """
    if style not in FLOW_STYLES:
        raise ValueError(f"unknown flow style {style!r}")
    if flow_width <= 0:
        raise ValueError("flow_width must be > 0")
    if source_radius < 0 or target_radius < 0:
        raise ValueError("radii must be >= 0")
    righthand = traffic_rule != "left"

    if style == "teardrop":
        f = _frame(dest[0], dest[1], origin[0], origin[1], flow_width,
                   target_radius, source_radius, righthand, corrected)
    else:
        f = _frame(origin[0], origin[1], dest[0], dest[1], flow_width,
                   source_radius, target_radius, righthand, corrected)
    if f is None:
        return None

    p0, p1, p2, p3 = f["p0"], f["p1"], f["p2"], f["p3"]
    if style == "curve_half_arrow":
        commands = (
            ("M", p0),
            ("L", p1),
            ("C", f["outer_c1"], f["outer_c2"], p2),
            ("L", f["elbow"]),
            ("L", p3),
            ("C", f["inner_c1"], f["inner_c2"], p0),
        )
    elif style == "straight_half_arrow":
        commands = (
            ("M", p0),
            ("L", p1),
            ("L", p2),
            ("L", f["elbow"]),
            ("L", p3),
            ("L", p0),
        )
    elif style == "tapered":
        commands = (
            ("M", p0),
            ("L", p1),
            ("C", f["outer_c1"], f["taper_c2"], p3),
            ("C", f["inner_c1"], f["inner_c2"], p0),
        )
    else:  # teardrop: tapered outline in the swapped frame, offset dropped
        commands = (
            ("M", p0),
            ("C", f["outer_c1"], f["taper_c2"], p3),
            ("C", f["inner_c1"], f["inner_c2"], p0),
        )

    keep_arrow = style in ("curve_half_arrow", "straight_half_arrow")
    return PathSpec(
        style=style,
        commands=commands,
        closed=True,
        start=p0,
        origin_offset=None if style == "teardrop" else p1,
        outer_end=p2 if keep_arrow else None,
        end=p3,
        elbow=f["elbow"] if keep_arrow else None,
        outer_ctrl1=f["outer_c1"],
        outer_ctrl2=f["outer_c2"] if keep_arrow else f["taper_c2"],
        inner_ctrl1=f["inner_c1"],
        inner_ctrl2=f["inner_c2"],
        clip_start=f["clip_start"],
        clip_end=f["clip_end"],
    )
