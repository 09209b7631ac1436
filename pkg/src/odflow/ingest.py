"""Parsing and validation of the three input formats, attribute joins, and
polygon-to-centroid conversion.

CSV dialect: UTF-8 (BOM tolerated), comma delimiter, optional double-quote
quoting, header row required, LF or CRLF line endings.  Numbers must be
plain decimal reals; thousands separators and underscores are rejected so
fixtures stay bit-exact.  All parse failures raise structured errors naming
the offending row; nothing is silently dropped or truncated.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .errors import (
    AmbiguousKey,
    CoordinateOutOfRange,
    DegenerateGeometry,
    DuplicateNodeId,
    MalformedCsv,
    MalformedGeoJson,
    MissingColumn,
    NonNegativeViolation,
    NonNumericValue,
    UnsupportedGeometryType,
)
from .model import NodeRecord, FlowRecord, PolygonRings, RegionFeature, canonical_key

_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_INT_RE = re.compile(r"[+-]?\d+")


def _decode(text: bytes | str) -> str:
    if isinstance(text, bytes):
        return text.decode("utf-8-sig")
    return text.lstrip("﻿")


def parse_number(raw: str, field_name: str, row: int) -> float:
    s = raw.strip()
    if not _NUMBER_RE.fullmatch(s):
        raise NonNumericValue(field_name, raw, row)
    return float(s)


def _coerce_attr(raw: str) -> Any:
    s = raw.strip()
    if _INT_RE.fullmatch(s):
        return int(s)
    if _NUMBER_RE.fullmatch(s):
        return float(s)
    return raw


def _read_table(text: bytes | str) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Header plus (1-based data row number, cells) pairs, arity-checked."""
    decoded = _decode(text).replace("\r\n", "\n")
    reader = csv.reader(io.StringIO(decoded))
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise MalformedCsv(f"csv parse failure: {exc}") from None
    if not rows:
        raise MalformedCsv("missing header row")
    header = [c.strip() for c in rows[0]]
    body: list[tuple[int, list[str]]] = []
    for i, cells in enumerate(rows[1:], start=1):
        if not cells or (len(cells) == 1 and cells[0] == ""):
            continue  # trailing blank line
        if len(cells) != len(header):
            raise MalformedCsv(
                f"row has {len(cells)} cells, header has {len(header)}", row=i
            )
        body.append((i, cells))
    return header, body


def _require_columns(header: list[str], names: Iterable[str]) -> dict[str, int]:
    index: dict[str, int] = {}
    for name in names:
        if name not in header:
            raise MissingColumn(name, header)
        index[name] = header.index(name)
    return index


def parse_nodes_csv(text: bytes | str, id_field: str, x_field: str,
                    y_field: str) -> list[NodeRecord]:
    """One :class:`NodeRecord` per data row; extra columns become attributes."""
    header, body = _read_table(text)
    cols = _require_columns(header, (id_field, x_field, y_field))
    records: list[NodeRecord] = []
    seen: set[str] = set()
    for row_no, cells in body:
        node_id = cells[cols[id_field]].strip()
        if not node_id:
            raise MalformedCsv(f"empty {id_field!r} value", row=row_no)
        if node_id in seen:
            raise DuplicateNodeId(node_id, row=row_no)
        seen.add(node_id)
        lon = parse_number(cells[cols[x_field]], x_field, row_no)
        lat = parse_number(cells[cols[y_field]], y_field, row_no)
        if not -180.0 <= lon <= 180.0:
            raise CoordinateOutOfRange(x_field, lon, row_no)
        if not -90.0 <= lat <= 90.0:
            raise CoordinateOutOfRange(y_field, lat, row_no)
        attrs = {
            name: _coerce_attr(cells[i])
            for i, name in enumerate(header)
            if name not in (id_field, x_field, y_field)
        }
        records.append(NodeRecord(node_id, lon, lat, attrs))
    return records


def parse_flows_csv(text: bytes | str, origin_field: str, dest_field: str,
                    value_field: str) -> list[FlowRecord]:
    """One :class:`FlowRecord` per data row; extra columns become attributes."""
    header, body = _read_table(text)
    cols = _require_columns(header, (origin_field, dest_field, value_field))
    records: list[FlowRecord] = []
    for row_no, cells in body:
        origin = cells[cols[origin_field]].strip()
        dest = cells[cols[dest_field]].strip()
        if not origin or not dest:
            raise MalformedCsv("empty origin or destination id", row=row_no)
        value = parse_number(cells[cols[value_field]], value_field, row_no)
        if value < 0:
            raise NonNegativeViolation(value_field, value, row_no)
        if not math.isfinite(value):
            raise NonNumericValue(value_field, cells[cols[value_field]], row_no)
        attrs = {
            name: _coerce_attr(cells[i])
            for i, name in enumerate(header)
            if name not in (origin_field, dest_field, value_field)
        }
        records.append(FlowRecord(origin, dest, value, attrs))
    return records


@dataclass(frozen=True)
class AttributeTable:
    """A parsed attribute CSV: header plus row mappings."""

    header: tuple[str, ...]
    rows: tuple[Mapping[str, Any], ...]


def parse_attribute_csv(text: bytes | str) -> AttributeTable:
    header, body = _read_table(text)
    rows = tuple(
        {name: _coerce_attr(cells[i]) for i, name in enumerate(header)}
        for _, cells in body
    )
    return AttributeTable(tuple(header), rows)


# --------------------------------------------------------------------------
# GeoJSON regions
# --------------------------------------------------------------------------


def _clean_ring(raw, feature_index: int) -> tuple[tuple[float, float], ...]:
    try:
        pts = [(float(p[0]), float(p[1])) for p in raw]
    except (TypeError, ValueError, IndexError):
        raise MalformedGeoJson(f"feature {feature_index}: malformed ring coordinates") from None
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]  # drop GeoJSON closing vertex
    if len(set(pts)) < 3:
        raise MalformedGeoJson(f"feature {feature_index}: ring needs >= 3 distinct vertices")
    return tuple(pts)


def _polygon_parts(geometry: dict, feature_index: int) -> tuple[PolygonRings, ...]:
    gtype = geometry.get("type")
    coords = geometry.get("coordinates")
    if gtype == "Polygon":
        polys = [coords]
    elif gtype == "MultiPolygon":
        polys = coords
    else:
        raise UnsupportedGeometryType(str(gtype), feature_index)
    parts: list[PolygonRings] = []
    for rings in polys:
        if not rings:
            raise MalformedGeoJson(f"feature {feature_index}: polygon without rings")
        exterior = _clean_ring(rings[0], feature_index)
        holes = tuple(_clean_ring(r, feature_index) for r in rings[1:])
        parts.append(PolygonRings(exterior, holes))
    return tuple(parts)


def parse_regions(text: bytes | str, id_property: str | None = None) -> list[RegionFeature]:
    """Parse a GeoJSON FeatureCollection of Polygon/MultiPolygon features.

    The feature id comes from ``id_property`` when given; otherwise the
    GeoJSON ``id`` member, an ``id`` property, or the feature index.
    """
    try:
        doc = json.loads(_decode(text))
    except json.JSONDecodeError as exc:
        raise MalformedGeoJson(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise MalformedGeoJson("expected a FeatureCollection object")
    features = doc.get("features")
    if not isinstance(features, list):
        raise MalformedGeoJson("FeatureCollection without a features list")

    result: list[RegionFeature] = []
    for i, feat in enumerate(features):
        if not isinstance(feat, dict) or feat.get("type") != "Feature":
            raise MalformedGeoJson(f"features[{i}] is not a Feature")
        geometry = feat.get("geometry")
        if not isinstance(geometry, dict):
            raise MalformedGeoJson(f"features[{i}] has no geometry")
        props = feat.get("properties") or {}
        if not isinstance(props, dict):
            raise MalformedGeoJson(f"features[{i}] has non-object properties")
        if id_property is not None:
            if id_property not in props:
                raise MalformedGeoJson(f"features[{i}] lacks id property {id_property!r}")
            fid = canonical_key(props[id_property])
        elif "id" in feat:
            fid = canonical_key(feat["id"])
        elif "id" in props:
            fid = canonical_key(props["id"])
        else:
            fid = str(i)
        result.append(RegionFeature(fid, _polygon_parts(geometry, i), dict(props)))
    return result


@dataclass(frozen=True)
class JoinReport:
    """Diagnostics from an attribute join; nothing here is fatal."""

    matched: int
    unmatched_features: tuple[str, ...]
    unmatched_rows: tuple[str, ...]


@dataclass(frozen=True)
class JoinResult:
    features: tuple[RegionFeature, ...]
    report: JoinReport


def join_attributes(features: Iterable[RegionFeature], table: AttributeTable,
                    feature_id_prop: str, table_id_col: str) -> JoinResult:
    """Merge table rows into matching features by key.

    Keys are compared as canonical strings.  A repeated key in the table
    raises :class:`AmbiguousKey`; unmatched features and unmatched rows are
    reported, not errors.
    """
    if table_id_col not in table.header:
        raise MissingColumn(table_id_col, list(table.header))
    by_key: dict[str, Mapping[str, Any]] = {}
    for row in table.rows:
        key = canonical_key(row[table_id_col])
        if key in by_key:
            raise AmbiguousKey(key, table_id_col)
        by_key[key] = row

    joined: list[RegionFeature] = []
    unmatched_features: list[str] = []
    used: set[str] = set()
    for feat in features:
        raw = feat.attributes.get(feature_id_prop)
        key = canonical_key(raw) if raw is not None else None
        row = by_key.get(key) if key is not None else None
        if row is None:
            unmatched_features.append(feat.id)
            joined.append(feat)
            continue
        used.add(key)
        merged = dict(feat.attributes)
        merged.update(row)
        joined.append(RegionFeature(feat.id, feat.polygons, merged))
    unmatched_rows = tuple(k for k in by_key if k not in used)
    return JoinResult(
        features=tuple(joined),
        report=JoinReport(
            matched=len(used),
            unmatched_features=tuple(unmatched_features),
            unmatched_rows=unmatched_rows,
        ),
    )


# --------------------------------------------------------------------------
# Polygons to points
# --------------------------------------------------------------------------


def _ring_measures(ring: tuple[tuple[float, float], ...]) -> tuple[float, float, float]:
    """Signed shoelace area and first moments of one ring."""
    a = mx = my = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        a += cross
        mx += (x0 + x1) * cross
        my += (y0 + y1) * cross
    return a / 2.0, mx / 6.0, my / 6.0


def feature_centroid(feature: RegionFeature) -> tuple[float, float]:
    """Planar area-weighted centroid over all parts, holes subtracted.

    Coordinates are treated as planar; ring orientation does not matter.
    """
    area = mx = my = 0.0
    for part in feature.polygons:
        a, px, py = _ring_measures(part.exterior)
        s = 1.0 if a >= 0 else -1.0
        area += abs(a)
        mx += px * s
        my += py * s
        for hole in part.holes:
            a, px, py = _ring_measures(hole)
            s = 1.0 if a >= 0 else -1.0
            area -= abs(a)
            mx -= px * s
            my -= py * s
    if area <= 0.0:
        raise DegenerateGeometry(feature.id)
    return mx / area, my / area


def polygons_to_points(features: Iterable[RegionFeature]) -> list[NodeRecord]:
    """One node per feature at its area-weighted centroid; attributes copied."""
    out: list[NodeRecord] = []
    for feat in features:
        cx, cy = feature_centroid(feat)
        out.append(NodeRecord(feat.id, cx, cy, dict(feat.attributes)))
    return out


# --------------------------------------------------------------------------
# CSV serialization (poly2points output and round-trip checks)
# --------------------------------------------------------------------------


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _attribute_columns(records, skip: tuple[str, ...]) -> list[str]:
    cols: list[str] = []
    for rec in records:
        for name in rec.attributes:
            if name not in skip and name not in cols:
                cols.append(name)
    return cols


def serialize_nodes_csv(records: Iterable[NodeRecord], id_field: str = "id",
                        x_field: str = "X", y_field: str = "Y") -> str:
    records = list(records)
    attr_cols = _attribute_columns(records, (id_field, x_field, y_field))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([id_field, x_field, y_field, *attr_cols])
    for rec in records:
        writer.writerow(
            [rec.id, repr(rec.lon), repr(rec.lat)]
            + [_format_cell(rec.attributes.get(c, "")) for c in attr_cols]
        )
    return buf.getvalue()


def serialize_flows_csv(records: Iterable[FlowRecord], origin_field: str = "origin",
                        dest_field: str = "dest", value_field: str = "value") -> str:
    records = list(records)
    attr_cols = _attribute_columns(records, (origin_field, dest_field, value_field))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([origin_field, dest_field, value_field, *attr_cols])
    for rec in records:
        writer.writerow(
            [rec.origin_id, rec.dest_id, repr(rec.value)]
            + [_format_cell(rec.attributes.get(c, "")) for c in attr_cols]
        )
    return buf.getvalue()
