"""Always-terminating colorers and the end-to-end pipeline.

``pipeline_color`` drives the progress engine with a source that tries,
in order: give up to the greedy fallback below a size floor; extract a
high-degree vertex's 2-colorable neighborhood; run the full progress
search when the minimum degree clears the split threshold; otherwise
defer a minimum-degree vertex (degeneracy order).  The pipeline is
total: on inputs that are not 3-colorable it either raises a checked
odd-wheel certificate or still returns a proper coloring with extra
colors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import (
    Coloring,
    Graph,
    OddCycle,
    VertexSet,
    iter_bits,
)
from .graph import bipartition as graph_bipartition
from .params import Params, default_round_cap
from .progress import (
    EXHAUSTED,
    Defer,
    DriverStats,
    DriverView,
    MonoSet,
    Progress,
    Type0,
    Type1,
    Type2,
    color_with_progress,
    type1_threshold,
)
from .search import RoundAudit, SeekOutcome, seek_progress
from .structure import Not3Colorable, certificate_is_valid, find_certificate


@dataclass
class BaselineReport:
    method: str
    colors_used: int
    extractions: int = 0
    threshold: int | None = None


def greedy_color(G: Graph, order=None, base: int = 0) -> Coloring:
    """First-fit coloring along ``order`` starting at color ``base``.

    With base > 0 the palette span includes the reserved range below it.
    Uses at most max_degree + 1 colors above the base.
    """
    if order is None:
        order = range(G.n)
    else:
        order = list(order)
        if sorted(order) != list(range(G.n)):
            raise ValueError("order must be a permutation of the vertex set")
    masks: dict[int, int] = {}
    assign: list[int | None] = [None] * G.n
    top = base - 1
    for v in order:
        adj = G.adj_bits(v)
        c = base
        while adj & masks.get(c, 0):
            c += 1
        assign[v] = c
        masks[c] = masks.get(c, 0) | (1 << v)
        top = max(top, c)
    palette = top + 1 if G.n else 0
    coloring = Coloring(tuple(assign), palette)
    if G.n and palette - base > G.max_degree() + 1:
        raise AssertionError("first-fit exceeded the degree bound")
    return coloring


def neighborhood_extraction_color(
    G: Graph, threshold: int | None = None
) -> tuple[Coloring, BaselineReport]:
    """Repeatedly 2-color and remove a high-degree vertex's neighborhood.

    While some vertex has current degree >= threshold, its neighborhood
    must be bipartite (otherwise the odd-wheel certificate proves the
    graph is not 3-colorable); the two sides take a fresh color pair and
    the neighborhood is removed.  The low-degree remainder is colored
    first-fit on a fresh palette, for at most
    2 * ceil(n / threshold) + threshold colors in total.
    """
    n = G.n
    if threshold is None:
        threshold = max(1, math.ceil(math.sqrt(2 * n)))
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    alive = (1 << n) - 1
    assign: list[int | None] = [None] * n
    extractions = 0
    while alive:
        best_v, best_d = -1, -1
        for v in iter_bits(alive):
            d = (G.adj_bits(v) & alive).bit_count()
            if d > best_d:
                best_v, best_d = v, d
        if best_d < threshold:
            break
        W = VertexSet(n, G.adj_bits(best_v) & alive)
        split = graph_bipartition(G, W)
        if isinstance(split, OddCycle):
            raise Not3Colorable(best_v, split.vertices)
        lo, hi = 2 * extractions, 2 * extractions + 1
        for v in iter_bits(split.side0.bits):
            assign[v] = lo
        for v in iter_bits(split.side1.bits):
            assign[v] = hi
        alive &= ~W.bits
        extractions += 1

    base = 2 * extractions
    masks: dict[int, int] = {}
    top = base - 1
    for v in iter_bits(alive):
        adj = G.adj_bits(v)
        c = base
        while adj & masks.get(c, 0):
            c += 1
        assign[v] = c
        masks[c] = masks.get(c, 0) | (1 << v)
        top = max(top, c)
    palette = top + 1 if n else 0
    bound = 2 * math.ceil(n / threshold) + threshold
    if palette > bound:
        raise AssertionError(f"palette {palette} exceeds the bound {bound}")
    coloring = Coloring(tuple(assign), palette)
    report = BaselineReport("extract", palette, extractions, threshold)
    return coloring, report


@dataclass
class PipelineReport:
    method: str
    colors_used: int
    stats: DriverStats
    seek_calls: int = 0
    seek_progress_found: int = 0
    seek_failures: dict = field(default_factory=dict)
    audits: list[RoundAudit] = field(default_factory=list)

    def y1_ratios(self) -> list[float]:
        """Round-1 cut size over round-1 T size, one entry per audit."""
        return [
            a.size_Y / a.size_T for a in self.audits if a.j == 1 and a.size_T
        ]


def _lift_bits(bits: int, idmap: list[int], n: int) -> VertexSet:
    out = 0
    for i in iter_bits(bits):
        out |= 1 << idmap[i]
    return VertexSet(n, out)


def _lift_progress(claim: Progress, idmap: list[int], n: int) -> Progress:
    if isinstance(claim, Type0):
        return Type0(idmap[claim.u], idmap[claim.v])
    if isinstance(claim, MonoSet):
        return MonoSet(_lift_bits(claim.members.bits, idmap, n))
    if isinstance(claim, Type1):
        return Type1(
            _lift_bits(claim.members.bits, idmap, n),
            _lift_bits(claim.side0.bits, idmap, n),
            _lift_bits(claim.side1.bits, idmap, n),
        )
    if isinstance(claim, Type2):
        return Type2(
            _lift_bits(claim.members.bits, idmap, n),
            _lift_bits(claim.side0.bits, idmap, n),
            _lift_bits(claim.side1.bits, idmap, n),
            _lift_bits(claim.neighborhood.bits, idmap, n),
        )
    raise TypeError(f"cannot lift {claim!r}")


def seek_only_color(
    G: Graph,
    p: Params | None = None,
    *,
    trace: list | None = None,
    claim_log: list | None = None,
) -> tuple[Coloring, PipelineReport]:
    """Color using only the progress search: seek until it fails, then greedy.

    No degree split and no extraction branch; every working graph goes
    straight to ``seek_progress`` and the first failure hands the
    remainder to the greedy fallback.
    """
    if p is None:
        p = Params.for_graph(G.n, max(G.min_degree(), 1))
    k = p.k
    report = PipelineReport("seek", 0, DriverStats())

    def source(view: DriverView):
        h = view.n_alive
        if h < 2:
            return EXHAUSTED
        sub, idmap = view.materialize()
        if sub.min_degree() < 1:
            return EXHAUSTED
        sub_params = p.with_overrides(
            nhat=max(1, math.ceil(h / (k * k))),
            round_cap=default_round_cap(h),
        )
        report.seek_calls += 1
        outcome = seek_progress(
            sub, min_degree=sub.min_degree(), p=sub_params,
            claim_log=claim_log, trace=trace,
        )
        report.audits.extend(outcome.audits)
        if outcome.progress is None:
            report.seek_failures[outcome.failure] = (
                report.seek_failures.get(outcome.failure, 0) + 1
            )
            return EXHAUSTED
        report.seek_progress_found += 1
        return _lift_progress(outcome.progress, idmap, view.base.n)

    coloring, stats = color_with_progress(
        G, k, source, c1=p.c1, c2=p.c2, trace=trace, claim_log=claim_log
    )
    report.colors_used = coloring.palette_size
    report.stats = stats
    return coloring, report


def pipeline_color(
    G: Graph,
    p: Params | None = None,
    *,
    trace: list | None = None,
    claim_log: list | None = None,
) -> tuple[Coloring, PipelineReport]:
    """Color G by driving the progress search inside the degree split.

    Raises Not3Colorable only with a certificate that checks out against
    the original graph.
    """
    if p is None:
        p = Params.for_graph(G.n, max(G.min_degree(), 1))
    k = p.k
    report = PipelineReport("pipeline", 0, DriverStats())
    backoff_size: list[int | None] = [None]
    scan_exhausted = [False]  # the original graph held no certificate

    def raise_if_certified(view: DriverView, hub: int,
                           cycle: tuple[int, ...]) -> None:
        """Raise when the odd-wheel certificate can be checked against G."""
        groups = view.groups
        hub_group = groups[hub]
        cycle_groups = [groups[v] for v in cycle]
        if len(hub_group) == 1 and all(len(g) == 1 for g in cycle_groups):
            orig_hub = hub_group[0]
            orig_cycle = tuple(g[0] for g in cycle_groups)
            if certificate_is_valid(G, orig_hub, orig_cycle):
                raise Not3Colorable(orig_hub, orig_cycle)
        if not scan_exhausted[0]:
            found = find_certificate(G)
            if found is not None:
                raise Not3Colorable(found[0], found[1])
            scan_exhausted[0] = True

    def scan_view_for_certificate(view: DriverView) -> None:
        for v in sorted(iter_bits(view.alive_bits),
                        key=lambda u: (-view.degree(u), u)):
            if view.degree(v) < 3:
                break
            W = VertexSet(view.base.n, view.neighbors_bits(v))
            split = graph_bipartition(view.base, W)
            if isinstance(split, OddCycle):
                raise_if_certified(view, v, split.vertices)
                return

    def source(view: DriverView):
        h = view.n_alive
        if h < p.n0:
            scan_view_for_certificate(view)
            return EXHAUSTED
        v_max, d_max = view.max_degree_vertex()
        if d_max >= type1_threshold(h, k, p.c1):
            W = VertexSet(view.base.n, view.neighbors_bits(v_max))
            split = graph_bipartition(view.base, W)
            if isinstance(split, OddCycle):
                raise_if_certified(view, v_max, split.vertices)
                return Defer(v_max)
            return Type1(W, split.side0, split.side1)
        v_min, d_min = view.min_degree_vertex()
        split_floor = math.ceil(h ** p.tau)
        throttled = backoff_size[0] is not None and h > 0.9 * backoff_size[0]
        if d_min >= split_floor and not throttled:
            sub, idmap = view.materialize()
            sub_params = p.with_overrides(
                nhat=max(1, math.ceil(h / (k * k))),
                round_cap=default_round_cap(h),
            )
            report.seek_calls += 1
            try:
                outcome = seek_progress(
                    sub, min_degree=d_min, p=sub_params,
                    claim_log=claim_log, trace=trace,
                )
            except Not3Colorable as exc:
                base_hub = idmap[exc.hub]
                base_cycle = tuple(idmap[v] for v in exc.cycle)
                raise_if_certified(view, base_hub, base_cycle)
                backoff_size[0] = h
                return Defer(v_min)
            report.audits.extend(outcome.audits)
            if outcome.progress is not None:
                report.seek_progress_found += 1
                return _lift_progress(outcome.progress, idmap, view.base.n)
            report.seek_failures[outcome.failure] = (
                report.seek_failures.get(outcome.failure, 0) + 1
            )
            backoff_size[0] = h
        return Defer(v_min)

    coloring, stats = color_with_progress(
        G, k, source, c1=p.c1, c2=p.c2, trace=trace, claim_log=claim_log
    )
    report.colors_used = coloring.palette_size
    report.stats = stats
    return coloring, report
