"""Node statistics, flow filtering and flow normalization.

Normalization subtracts a null-model expectation from each observed flow.
Two expectation models ship: the adjusted-volume model (two variants, see
:func:`expected_flows`) needing only flow data, and a doubly-constrained
gravity model balanced by iterated proportional fitting so expected
marginals match the observed in/out strengths.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    InputError,
    NoConvergence,
    NonPositivePopulation,
    ZeroDenominator,
    ZeroDistance,
)
from .model import FlowNetwork, FlowRecord

EARTH_RADIUS_KM = 6371.0088

GRAVITY_TOLERANCE = 1e-10
GRAVITY_MAX_ITERATIONS = 500

MODELS = ("adjusted_paper", "adjusted_conserving", "gravity")

PER_CAPITA_SCALE = 100_000.0


@dataclass(frozen=True)
class NodeStats:
    """Per-node flow summary.

    ``net_ratio`` is (inflow - outflow) / (inflow + outflow), zero for an
    isolated node; ``per_capita_gross`` is gross volume per 100k population
    and present only when a positive population attribute was supplied.
    """

    inflow: float
    outflow: float
    gross: float
    net: float
    net_ratio: float
    per_capita_gross: float | None = None


def node_stats(network: FlowNetwork,
               population_attr: str | None = None) -> dict[str, NodeStats]:
    """Compute :class:`NodeStats` for every node of the network."""
    out: dict[str, NodeStats] = {}
    for node in network.nodes:
        inflow = network.in_strength(node.id)
        outflow = network.out_strength(node.id)
        gross = inflow + outflow
        net = inflow - outflow
        ratio = net / gross if gross != 0 else 0.0
        per_capita = None
        if population_attr is not None:
            raw = node.attributes.get(population_attr)
            if isinstance(raw, (int, float)) and not isinstance(raw, bool):
                if raw <= 0:
                    raise NonPositivePopulation(node.id, float(raw))
                per_capita = PER_CAPITA_SCALE * gross / float(raw)
        out[node.id] = NodeStats(inflow, outflow, gross, net, ratio, per_capita)
    return out


def great_circle_km(lon1: float, lat1: float, lon2: float, lat2: float) -> float:
    """Haversine distance on the mean-radius sphere, in kilometers."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = p2 - p1
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


@dataclass(frozen=True, eq=False)
class ExpectedFlowMatrix:
    """Null-model expectations for every ordered pair of distinct nodes.

    The gravity variant also carries its balance factors, iteration count
    and final marginal residual.  Balance factors are determined only up to
    a reciprocal scalar, so compare expectations, never factors.
    """

    model: str
    ids: tuple[str, ...]
    matrix: np.ndarray  # n x n, zero diagonal
    beta: float | None = None
    a_factors: tuple[float, ...] | None = None
    b_factors: tuple[float, ...] | None = None
    iterations: int = 0
    residual: float = 0.0

    def value(self, origin_id: str, dest_id: str) -> float:
        i = self.ids.index(origin_id)
        j = self.ids.index(dest_id)
        return float(self.matrix[i, j])

    def pairs(self):
        """Yield ((origin_id, dest_id), expectation) over ordered pairs."""
        for i, o in enumerate(self.ids):
            for j, d in enumerate(self.ids):
                if i != j:
                    yield (o, d), float(self.matrix[i, j])

    def total(self) -> float:
        return float(self.matrix.sum())


def _observed_matrix(network: FlowNetwork, ids: tuple[str, ...]) -> np.ndarray:
    index = {nid: i for i, nid in enumerate(ids)}
    obs = np.zeros((len(ids), len(ids)))
    for f in network.transit_flows():
        obs[index[f.origin_id], index[f.dest_id]] += f.value
    return obs


def _distance_matrix(network: FlowNetwork, ids: tuple[str, ...],
                     distances) -> np.ndarray:
    n = len(ids)
    d = np.zeros((n, n))
    nodes = {node.id: node for node in network.nodes}
    for i, o in enumerate(ids):
        for j, t in enumerate(ids):
            if i == j:
                continue
            if distances is None:
                a, b = nodes[o], nodes[t]
                d[i, j] = great_circle_km(a.lon, a.lat, b.lon, b.lat)
            else:
                try:
                    d[i, j] = float(distances[(o, t)])
                except KeyError:
                    raise InputError(f"distance matrix lacks pair ({o!r}, {t!r})") from None
            if d[i, j] <= 0:
                raise ZeroDistance(o, t)
    return d


def _gravity(network: FlowNetwork, ids: tuple[str, ...], beta: float,
             distances) -> ExpectedFlowMatrix:
    n = len(ids)
    index = {nid: i for i, nid in enumerate(ids)}
    # Marginals exclude self-flows: expectations cover distinct pairs only.
    o_marg = np.zeros(n)
    d_marg = np.zeros(n)
    for f in network.transit_flows():
        o_marg[index[f.origin_id]] += f.value
        d_marg[index[f.dest_id]] += f.value

    d = _distance_matrix(network, ids, distances)
    w = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    w[off] = d[off] ** (-beta)

    a = np.zeros(n)
    b = np.where(d_marg > 0, 1.0, 0.0)
    e = np.zeros((n, n))
    residual = math.inf
    iterations = 0
    for iterations in range(1, GRAVITY_MAX_ITERATIONS + 1):
        denom_a = w @ (b * d_marg)
        if np.any((o_marg > 0) & (denom_a == 0)):
            raise ZeroDenominator("a positive-outflow node has no reachable destinations")
        a = np.divide(1.0, denom_a, out=np.zeros(n), where=(o_marg > 0) & (denom_a > 0))
        denom_b = w.T @ (a * o_marg)
        if np.any((d_marg > 0) & (denom_b == 0)):
            raise ZeroDenominator("a positive-inflow node has no reachable origins")
        b = np.divide(1.0, denom_b, out=np.zeros(n), where=(d_marg > 0) & (denom_b > 0))

        e = (a * o_marg)[:, None] * (b * d_marg)[None, :] * w
        row = e.sum(axis=1)
        col = e.sum(axis=0)
        errs = []
        mask_o = o_marg > 0
        mask_d = d_marg > 0
        if mask_o.any():
            errs.append(np.max(np.abs(row[mask_o] - o_marg[mask_o]) / o_marg[mask_o]))
        if mask_d.any():
            errs.append(np.max(np.abs(col[mask_d] - d_marg[mask_d]) / d_marg[mask_d]))
        residual = float(max(errs)) if errs else 0.0
        if residual < GRAVITY_TOLERANCE:
            break
    result = ExpectedFlowMatrix(
        model="gravity", ids=ids, matrix=e, beta=beta,
        a_factors=tuple(float(x) for x in a),
        b_factors=tuple(float(x) for x in b),
        iterations=iterations, residual=residual,
    )
    if residual >= GRAVITY_TOLERANCE:
        raise NoConvergence(residual, iterations, expected=result)
    return result


def expected_flows(network: FlowNetwork, model: str, beta: float | None = None,
                   distances: Mapping[tuple[str, str], float] | None = None
                   ) -> ExpectedFlowMatrix:
    """Expected flow volume for every ordered pair of distinct nodes.

    ``adjusted_paper`` multiplies the endpoint strengths by the observed
    pair volume over (total^2 - sum of per-node out*in strengths), exactly
    as originally printed; ``adjusted_conserving`` replaces the pair volume
    by the grand total, which makes the expectations sum back to the total.
    ``gravity`` balances strength products with a power-law distance decay
    (default exponent 2) until marginals match within 1e-10 relative or 500
    iterations; distances default to great-circle kilometers between node
    coordinates.
    """
    if model not in MODELS:
        raise InputError(f"unknown expectation model {model!r} (choose from {MODELS})")
    ids = tuple(n.id for n in network.nodes)
    if len(ids) < 2:
        raise InputError("expectation models need at least two nodes")
    if model == "gravity":
        beta = 2.0 if beta is None else float(beta)
        if beta <= 0:
            raise InputError("beta must be > 0")
        return _gravity(network, ids, beta, distances)
    if beta is not None:
        raise InputError(f"beta applies to the gravity model only, not {model!r}")

    f_out = np.array([network.out_strength(i) for i in ids])
    f_in = np.array([network.in_strength(i) for i in ids])
    total = network.total
    denom = total * total - math.fsum(
        network.out_strength(i) * network.in_strength(i) for i in ids
    )
    if denom == 0:
        raise ZeroDenominator(
            "total^2 equals the within-node strength product sum; "
            "the adjusted model is undefined for this network"
        )
    strength = f_out[:, None] * f_in[None, :]
    if model == "adjusted_paper":
        e = strength * _observed_matrix(network, ids) / denom
    else:
        e = strength * total / denom
    np.fill_diagonal(e, 0.0)
    return ExpectedFlowMatrix(model=model, ids=ids, matrix=e)


def modularity_transform(network: FlowNetwork,
                         expected: ExpectedFlowMatrix) -> list[FlowRecord]:
    """Observed minus expected per ordered pair.

    Positive values are above expectation.  Pairs with zero observed and
    zero expected volume are omitted; each record carries its observed and
    expected volumes as attributes.
    """
    known = set(expected.ids)
    for f in network.transit_flows():
        if f.origin_id not in known or f.dest_id not in known:
            raise InputError(
                f"expectation matrix does not cover pair ({f.origin_id!r}, {f.dest_id!r})"
            )
    obs = _observed_matrix(network, expected.ids)
    out: list[FlowRecord] = []
    for i, o in enumerate(expected.ids):
        for j, d in enumerate(expected.ids):
            if i == j:
                continue
            observed = float(obs[i, j])
            exp = float(expected.matrix[i, j])
            if observed == 0.0 and exp == 0.0:
                continue
            out.append(FlowRecord(o, d, observed - exp,
                                  {"observed": observed, "expected": exp}))
    return out


def modularity_csv(records: Iterable[FlowRecord]) -> str:
    """Serialize modularity records to the normalize-tool CSV format."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["origin_id", "dest_id", "observed", "expected", "modularity"])
    for rec in sorted(records, key=lambda r: (r.origin_id, r.dest_id)):
        writer.writerow([
            rec.origin_id,
            rec.dest_id,
            repr(float(rec.attributes["observed"])),
            repr(float(rec.attributes["expected"])),
            repr(rec.value),
        ])
    return buf.getvalue()


def normalize_tool(flows_csv: bytes | str, nodes_csv: bytes | str | None = None,
                   model: str = "adjusted_paper", beta: float | None = None,
                   distances: Mapping[tuple[str, str], float] | None = None,
                   origin_field: str = "origin", dest_field: str = "dest",
                   value_field: str = "value", id_field: str = "id",
                   x_field: str = "X", y_field: str = "Y") -> str:
    """Full normalization pipeline: CSV in, modularity CSV out.

    Without a node CSV, placeholder nodes are synthesized from the flow
    endpoints; the gravity model then needs an explicit distance mapping
    because there are no coordinates to measure.
    """
    from .ingest import parse_flows_csv, parse_nodes_csv
    from .model import NodeRecord, build_network

    flows = parse_flows_csv(flows_csv, origin_field, dest_field, value_field)
    if nodes_csv is not None:
        nodes = parse_nodes_csv(nodes_csv, id_field, x_field, y_field)
    else:
        if model == "gravity" and distances is None:
            raise InputError(
                "gravity normalization needs node coordinates or a distance table"
            )
        seen: list[str] = []
        for f in flows:
            for nid in (f.origin_id, f.dest_id):
                if nid not in seen:
                    seen.append(nid)
        nodes = [NodeRecord(nid, 0.0, 0.0) for nid in seen]
    network = build_network(nodes, flows)
    expected = expected_flows(network, model, beta=beta, distances=distances)
    return modularity_csv(modularity_transform(network, expected))


def filter_top_n(flows: Iterable[FlowRecord], n: int) -> list[FlowRecord]:
    """The n largest flows by value; ties resolve by (origin, dest) order."""
    if n < 1:
        raise InputError("top-n filter needs n >= 1")
    ranked = sorted(flows, key=lambda f: (-f.value, f.origin_id, f.dest_id))
    return ranked[:n]


def incident_flows(flows: Iterable[FlowRecord],
                   node_id: str) -> tuple[list[FlowRecord], list[FlowRecord]]:
    """Split flows into (touching node_id, all others); exact partition."""
    incident: list[FlowRecord] = []
    other: list[FlowRecord] = []
    for f in flows:
        if f.origin_id == node_id or f.dest_id == node_id:
            incident.append(f)
        else:
            other.append(f)
    return incident, other
