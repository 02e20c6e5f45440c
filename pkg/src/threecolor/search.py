"""Cut-or-color search: nested sparse cuts, side cuts, and round audits.

The inner loop repeatedly seeds ``cut_or_color`` at a vertex of high
degree into the current S side.  Each call either finds structural
progress, certifies that S is monochromatic whenever the seed and the
root take different colors, or returns a sparse cut to recurse on.  One
outer round ends when the cut's edge mass gets thin; the best side cut
may then replace the sparse cut before the pair is regularized for the
next round.

Edge-mass quantities used for the inner-loop exit and the round audits
are per-vertex degree sums (the average-degree form of the bounds), so
they stay exact when the two sides of a pair overlap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Graph, VertexSet, iter_bits, union_neighborhoods
from .params import Params
from .progress import (
    ClaimLog,
    MonoSet,
    Progress,
    Type1,
    Type2,
    log_claim,
)
from .structure import (
    MultichromaticGuaranteed,
    Not3Colorable,
    RegularPair,
    TwoLevel,
    build_two_level,
    multichromatic_test,
    regularize,
)


@dataclass(frozen=True)
class MonochromaticIfDiffer:
    """S is monochromatic in every 3-coloring where t and r0 differ."""

    members: VertexSet
    t: int
    r0: int


@dataclass(frozen=True)
class SparseCut:
    X: VertexSet
    Y: VertexSet


@dataclass(frozen=True)
class ProgressFound:
    progress: Progress


CutResult = MonochromaticIfDiffer | SparseCut | ProgressFound


@dataclass(frozen=True)
class SideCut:
    """Best side cut; ``u`` is None when no vertex qualified."""

    x: VertexSet
    y: VertexSet
    u: int | None


@dataclass
class SeekCounters:
    sparse_cuts: int = 0
    sparse_cut_violations: int = 0
    side_cuts_adopted: int = 0
    side_cut_checks: int = 0
    verdicts: int = 0
    monochromatic_sets: int = 0
    rounds: int = 0
    roots_tried: int = 0


@dataclass(frozen=True)
class RoundAudit:
    """Quantities and bound flags recorded at the end of one outer round.

    ``edge_mass_cut`` is the degree sum from the sparse cut's Y into its
    X; ``edge_mass_side`` the degree sum from Y'' into S_j minus X.
    Flags marked hard in ``HARD_FLAGS`` are asserted at construction;
    the rest are diagnostics that asymptotic rounds would satisfy.
    """

    j: int
    size_S: int
    size_T: int
    size_X: int
    size_Y: int
    delta_S: Fraction
    delta_T: Fraction
    mu: Fraction
    ypp_size: int
    edge_mass_cut: int
    edge_mass_side: int
    side_cut_adopted: bool
    side_cut_u: int | None
    flags: dict[str, bool]

    def to_dict(self) -> dict:
        out = {
            "j": self.j,
            "size_S": self.size_S,
            "size_T": self.size_T,
            "size_X": self.size_X,
            "size_Y": self.size_Y,
            "delta_S": str(self.delta_S),
            "delta_T": str(self.delta_T),
            "mu": str(self.mu),
            "ypp_size": self.ypp_size,
            "edge_mass_cut": self.edge_mass_cut,
            "edge_mass_side": self.edge_mass_side,
            "side_cut_adopted": self.side_cut_adopted,
            "side_cut_u": self.side_cut_u,
        }
        out.update({f"flag_{k}": v for k, v in sorted(self.flags.items())})
        return out


HARD_FLAGS = ("side_edge_mass",)
SOFT_FLAGS = (
    "min_cut_degree",
    "x_size_floor",
    "y_size_floor",
    "y_sqrt_cap",
    "y_round_cap",
    "degree_vs_nhat",
    "base_degree_floor",
)


@dataclass
class SeekOutcome:
    progress: Progress | None
    failure: str | None  # "ErrorA" | "ErrorB" | "RoundCapExceeded" | "StructureFailed"
    audits: list[RoundAudit]
    counters: SeekCounters
    root: int | None

    def __post_init__(self):
        if (self.progress is None) == (self.failure is None):
            raise ValueError("exactly one of progress/failure must be set")


def _emit(trace, event: str, **payload):
    if trace is not None:
        entry = {"event": event}
        entry.update(payload)
        trace.append(entry)


def cut_or_color(
    G: Graph,
    r0: int,
    S: VertexSet,
    T: VertexSet,
    t: int,
    p: Params,
    *,
    claim_log: ClaimLog | None = None,
    trace: list | None = None,
    round_no: int = 0,
    counters: SeekCounters | None = None,
) -> CutResult:
    """Grow (X, Y) from the seed t until S is swallowed or the cut is sparse.

    X collects vertices of S forced to share a color under the
    assumption that t and r0 differ; Y collects vertices of T that then
    cannot take that color.  Extensions are only applied after the
    multichromatic test certifies the witness set, so every step is
    sound for every legal 3-coloring.  Scan order is ascending vertex
    id, with X-extensions exhausted before each Y-extension attempt.
    """
    n = G.n
    nh = p.nhat
    Sb, Tb = S.bits, T.bits
    if Sb.bit_count() < 2:
        raise ValueError("cut_or_color needs |S| >= 2")
    if Sb & ~G.adj_bits(r0):
        raise ValueError("S must lie inside N(r0)")
    if not (Tb >> t) & 1:
        raise ValueError("seed vertex must lie in T")

    X = G.adj_bits(t) & Sb
    if X == 0:
        raise ValueError("seed vertex has no neighbors in S")
    Y = 0
    y_size = 0
    deg_into_Y = {v: 0 for v in iter_bits(Sb)}
    root_adj = G.adj_bits(r0)
    measure_cache: dict[int, tuple[int, int]] = {}

    def grow_Y(bits: int) -> None:
        nonlocal Y, y_size
        add = bits & Tb & ~Y
        if not add:
            return
        Y |= add
        y_size += add.bit_count()
        for w in iter_bits(add):
            for s in iter_bits(G.adj_bits(w) & Sb):
                deg_into_Y[s] += 1

    grow_Y(union_neighborhoods(G, X))

    while True:
        if X == Sb:
            members = VertexSet(n, Sb)
            log_claim(claim_log, "mono_if_differ", members, G,
                      conditional=(t, r0), provenance="cut_or_color")
            if counters is not None:
                counters.verdicts += 1
            _emit(trace, "cut", round=round_no, seed=t, verdict=True,
                  x_size=Sb.bit_count(), y_size=y_size)
            return MonochromaticIfDiffer(members, t, r0)

        extended = True
        while extended:
            extended = False
            for s in iter_bits(Sb & ~X):
                if deg_into_Y[s] >= nh:
                    witness = VertexSet(n, G.adj_bits(s) & Y)
                    res = multichromatic_test(G, witness, p, claim_log=claim_log)
                    if not isinstance(res, MultichromaticGuaranteed):
                        return ProgressFound(res)
                    X |= 1 << s
                    grow_Y(G.adj_bits(s))
                    extended = True
                    _emit(trace, "extension", round=round_no, kind="x", vertex=s,
                          x_size=X.bit_count(), y_size=y_size)
            if X == Sb:
                break
        if X == Sb:
            continue

        applied = False
        for t2 in iter_bits(Tb & ~Y):
            cached = measure_cache.get(t2)
            if cached is not None and cached[0] + (y_size - cached[1]) < nh:
                continue
            reach = 0
            for x in iter_bits(G.adj_bits(t2) & root_adj):
                reach |= G.adj_bits(x)
            witness_bits = reach & Y
            measured = witness_bits.bit_count()
            measure_cache[t2] = (measured, y_size)
            if measured >= nh:
                res = multichromatic_test(G, VertexSet(n, witness_bits), p,
                                          claim_log=claim_log)
                if not isinstance(res, MultichromaticGuaranteed):
                    return ProgressFound(res)
                grow_Y(1 << t2)
                applied = True
                _emit(trace, "extension", round=round_no, kind="y", vertex=t2,
                      x_size=X.bit_count(), y_size=y_size)
                break
        if applied:
            continue

        cut = SparseCut(VertexSet(n, X), VertexSet(n, Y))
        violations = check_sparse_cut(G, r0, S, T, t, cut.X, cut.Y, p)
        if counters is not None:
            counters.sparse_cuts += 1
            counters.sparse_cut_violations += len(violations)
        if violations:
            raise AssertionError(f"sparse cut violates {violations}")
        _emit(trace, "cut", round=round_no, seed=t, verdict=False,
              x_size=X.bit_count(), y_size=y_size)
        return cut


def check_sparse_cut(
    G: Graph,
    r0: int,
    S: VertexSet,
    T: VertexSet,
    t: int,
    X: VertexSet,
    Y: VertexSet,
    p: Params,
) -> list[str]:
    """Independently re-derive the four sparse-cut invariants.

    I1: the seed keeps all its S-neighbors inside X.
    I2: no edge leaves X for T minus Y.
    I3: every s outside X sees fewer than nhat vertices of Y.
    I4: every t' outside Y reaches fewer than nhat vertices of Y through
        its neighbors in N(r0).
    """
    violated = []
    if G.adj_bits(t) & S.bits & ~X.bits:
        violated.append("I1")
    outside_T = T.bits & ~Y.bits
    for x in iter_bits(X.bits):
        if G.adj_bits(x) & outside_T:
            violated.append("I2")
            break
    for s in iter_bits(S.bits & ~X.bits):
        if (G.adj_bits(s) & Y.bits).bit_count() >= p.nhat:
            violated.append("I3")
            break
    root_adj = G.adj_bits(r0)
    for t2 in iter_bits(outside_T):
        reach = 0
        for x in iter_bits(G.adj_bits(t2) & root_adj):
            reach |= G.adj_bits(x)
        if (reach & Y.bits).bit_count() >= p.nhat:
            violated.append("I4")
            break
    return violated


def best_side_cut(
    G: Graph, X: VertexSet, Y: VertexSet, pair: RegularPair, p: Params
) -> SideCut:
    """Smallest-Y' side cut over qualifying u in Y; ties keep the earliest u.

    A vertex u qualifies when it has at least delta_T * sidecut_factor
    neighbors in S_j outside X; its cut is that outside neighborhood
    X'(u) and the fresh T_j-neighbors Y'(u) of X'(u).  The scan starts
    from (S_j, T_j), so an empty scan returns the full pair.
    """
    Sj, Tj = pair.S.bits, pair.T.bits
    threshold = pair.delta_T * p.sidecut_factor
    # d < p/q  <=>  d < ceil(p/q) for integral d
    threshold_int = -(-threshold.numerator // threshold.denominator)
    fresh_mask = Tj & ~Y.bits
    best_x, best_y, best_u = Sj, Tj, None
    best_size = Tj.bit_count()
    for u in iter_bits(Y.bits):
        outside = G.adj_bits(u) & Sj & ~X.bits
        if outside.bit_count() < threshold_int:
            continue
        reach = 0
        abandoned = False
        for i, x in enumerate(iter_bits(outside)):
            reach |= G.adj_bits(x)
            if (i & 7) == 7 and (reach & fresh_mask).bit_count() >= best_size:
                abandoned = True
                break
        if abandoned:
            continue
        y_bits = reach & fresh_mask
        size = y_bits.bit_count()
        if size < best_size:
            best_x, best_y, best_u, best_size = outside, y_bits, u, size
    return SideCut(VertexSet(G.n, best_x), VertexSet(G.n, best_y), best_u)


@dataclass(frozen=True)
class InnerProgress:
    progress: Progress


@dataclass(frozen=True)
class InnerCut:
    X: VertexSet
    Y: VertexSet


@dataclass(frozen=True)
class InnerError:
    reason: str  # "ErrorA" | "ErrorB"


def inner_loop(
    G: Graph,
    r0: int,
    pair: RegularPair,
    p: Params,
    *,
    claim_log: ClaimLog | None = None,
    trace: list | None = None,
    counters: SeekCounters | None = None,
) -> InnerProgress | InnerCut | InnerError:
    """Recurse through nested sparse cuts until the edge mass thins out.

    Exits with the final cut when the degree sum from the current Y into
    the current X drops below delta_T * |Y| / 2, with progress, or with
    one of the two error outcomes (|S| <= 1, or too few seed vertices).
    """
    n = G.n
    Sb, Tb = pair.S.bits, pair.T.bits
    seed_floor = pair.delta_T * p.highdeg_factor
    # d >= p/q  <=>  d >= ceil(p/q) for integral d
    seed_floor_int = -(-seed_floor.numerator // seed_floor.denominator)
    first = True
    while True:
        if not first:
            mass = sum(
                (G.adj_bits(w) & Sb).bit_count() for w in iter_bits(Tb)
            )
            if mass < pair.delta_T * p.term_factor * Tb.bit_count():
                for v in iter_bits(Sb):
                    if G.adj_bits(v) & pair.T.bits & ~Tb:
                        raise AssertionError(
                            "final cut lost a T_j-neighbor of its X side"
                        )
                return InnerCut(VertexSet(n, Sb), VertexSet(n, Tb))
        first = False
        if Sb.bit_count() <= 1:
            _emit(trace, "error", reason="ErrorA")
            return InnerError("ErrorA")
        seeds = 0
        for w in iter_bits(Tb):
            if (G.adj_bits(w) & Sb).bit_count() >= seed_floor_int:
                seeds |= 1 << w
        if seeds.bit_count() < p.nhat:
            _emit(trace, "error", reason="ErrorB")
            return InnerError("ErrorB")
        res = multichromatic_test(G, VertexSet(n, seeds), p, claim_log=claim_log)
        if not isinstance(res, MultichromaticGuaranteed):
            return InnerProgress(res)
        found: SparseCut | None = None
        verdicts = 0
        for seed in iter_bits(seeds):
            outcome = cut_or_color(
                G, r0, VertexSet(n, Sb), VertexSet(n, Tb), seed, p,
                claim_log=claim_log, trace=trace, round_no=pair.j,
                counters=counters,
            )
            if isinstance(outcome, ProgressFound):
                return InnerProgress(outcome.progress)
            if isinstance(outcome, SparseCut):
                found = outcome
                break
            verdicts += 1
        if found is None:
            if verdicts != seeds.bit_count():
                raise AssertionError("monochromatic set without full verdict cover")
            members = VertexSet(n, Sb)
            log_claim(claim_log, "mono", members, G, provenance="inner_loop")
            if counters is not None:
                counters.monochromatic_sets += 1
            _emit(trace, "progress", round=pair.j, kind="mono",
                  set_size=Sb.bit_count())
            return InnerProgress(MonoSet(members))
        if found.X.bits == Sb:
            raise AssertionError("adopted cut failed to shrink the S side")
        Sb, Tb = found.X.bits, found.Y.bits


def audit_round(
    G: Graph,
    p: Params,
    pair: RegularPair,
    sparse_X: VertexSet,
    sparse_Y: VertexSet,
    chosen_X: VertexSet,
    chosen_Y: VertexSet,
    side_cut_adopted: bool,
    side_cut_u: int | None,
    termination_fired: bool = True,
) -> RoundAudit:
    """Record the end-of-round quantities and evaluate the bound flags.

    Hard requirements (asserted): the side-cut edge-mass floor whenever
    the inner loop terminated on thin edge mass; and for an adopted side
    cut, disjointness from the sparse cut, the X' size floor, and the
    per-vertex degree floor delta_S - nhat into Y'.
    """
    nh = p.nhat
    d_S, d_T = pair.delta_S, pair.delta_T
    outside = pair.S.bits & ~sparse_X.bits
    ypp_bits = 0
    edge_mass_side = 0
    side_floor = d_T * p.sidecut_factor
    for u in iter_bits(sparse_Y.bits):
        d = (G.adj_bits(u) & outside).bit_count()
        if d >= side_floor:
            ypp_bits |= 1 << u
            edge_mass_side += d
    edge_mass_cut = sum(
        (G.adj_bits(w) & sparse_X.bits).bit_count() for w in iter_bits(sparse_Y.bits)
    )
    mu = Fraction(len(chosen_Y) * nh) / (d_S * d_S) if d_S else Fraction(0)

    min_cut_deg = min(
        ((G.adj_bits(v) & chosen_Y.bits).bit_count() for v in iter_bits(chosen_X.bits)),
        default=0,
    )
    x_floor = d_T * (p.sidecut_factor if side_cut_adopted else p.highdeg_factor)
    flags = {
        "min_cut_degree": Fraction(min_cut_deg) >= d_S / 2,
        "x_size_floor": Fraction(len(chosen_X)) >= x_floor,
        "y_size_floor": Fraction(len(chosen_Y)) >= d_S * d_S / (8 * nh),
        "y_sqrt_cap": len(chosen_Y) ** 2 <= 30 * nh * len(pair.T),
        "y_round_cap": len(chosen_Y) < 30 * nh * (p.k ** (1 / 2 ** pair.j)),
        "degree_vs_nhat": d_S > nh,
        "base_degree_floor": d_T >= 4 * d_S / nh,
        "side_edge_mass": (not termination_fired)
        or Fraction(edge_mass_side) >= d_T * len(sparse_Y) / 6,
    }

    if not flags["side_edge_mass"]:
        raise AssertionError("side-cut edge mass below the termination floor")
    if side_cut_adopted:
        if chosen_X.bits & sparse_X.bits or chosen_Y.bits & sparse_Y.bits:
            raise AssertionError("adopted side cut overlaps the sparse cut")
        if not flags["x_size_floor"]:
            raise AssertionError("adopted side cut below the X' size floor")
        degree_floor = d_S - nh
        for v in iter_bits(chosen_X.bits):
            if (G.adj_bits(v) & chosen_Y.bits).bit_count() < degree_floor:
                raise AssertionError(
                    "side-cut vertex below the delta_S - nhat degree floor"
                )

    return RoundAudit(
        j=pair.j,
        size_S=len(pair.S),
        size_T=len(pair.T),
        size_X=len(chosen_X),
        size_Y=len(chosen_Y),
        delta_S=d_S,
        delta_T=d_T,
        mu=mu,
        ypp_size=ypp_bits.bit_count(),
        edge_mass_cut=edge_mass_cut,
        edge_mass_side=edge_mass_side,
        side_cut_adopted=side_cut_adopted,
        side_cut_u=side_cut_u,
        flags=flags,
    )


def seek_progress(
    G: Graph,
    min_degree: int | None = None,
    p: Params | None = None,
    *,
    claim_log: ClaimLog | None = None,
    trace: list | None = None,
) -> SeekOutcome:
    """Run the full outer loop, retrying roots in decreasing degree order.

    Returns the first progress found, or the last root's failure with
    its round audits.  Every failure is data; only a non-3-colorability
    certificate escapes as an exception.
    """
    actual_min = G.min_degree()
    if min_degree is None:
        min_degree = actual_min
    elif actual_min < min_degree:
        raise ValueError(f"graph min degree {actual_min} below stated {min_degree}")
    if p is None:
        p = Params.for_graph(G.n, max(min_degree, 1))
    counters = SeekCounters()
    _emit(trace, "params", k=p.k, nhat=p.nhat, round_cap=p.round_cap,
          side_cuts=p.side_cuts, k_within_min_degree=p.k <= max(min_degree, 1))
    roots = [
        v
        for v in sorted(range(G.n), key=lambda u: (-G.degree(u), u))
        if G.degree(v) >= 1
    ][: p.root_retries]
    if not roots:
        return SeekOutcome(None, "StructureFailed", [], counters, None)
    audits: list[RoundAudit] = []
    last: SeekOutcome | None = None
    for r0 in roots:
        counters.roots_tried += 1
        outcome = _seek_from_root(G, r0, p, audits, counters, claim_log, trace)
        if outcome.progress is not None:
            return outcome
        last = outcome
    return last


def _seek_from_root(
    G: Graph,
    r0: int,
    p: Params,
    audits: list[RoundAudit],
    counters: SeekCounters,
    claim_log: ClaimLog | None,
    trace: list | None,
) -> SeekOutcome:
    structure = build_two_level(G, r0, p, claim_log=claim_log)
    if not isinstance(structure, TwoLevel):
        _emit(trace, "progress", round=0, kind=type(structure).__name__.lower(),
              set_size=len(structure.members))
        return SeekOutcome(structure, None, audits, counters, r0)
    pair = structure.pair
    _emit(trace, "structure", root=r0, s_size=len(pair.S), t_size=len(pair.T),
          delta_S=str(pair.delta_S), delta_T=str(pair.delta_T))
    for j in range(1, p.round_cap + 1):
        counters.rounds += 1
        res = inner_loop(G, r0, pair, p, claim_log=claim_log, trace=trace,
                         counters=counters)
        if isinstance(res, InnerError):
            return SeekOutcome(None, res.reason, audits, counters, r0)
        if isinstance(res, InnerProgress):
            return SeekOutcome(res.progress, None, audits, counters, r0)
        X, Y = res.X, res.Y
        adopted = False
        side = None
        if p.side_cuts:
            side = best_side_cut(G, X, Y, pair, p)
            counters.side_cut_checks += 1
            adopted = side.u is not None and len(side.y) < len(Y)
        chosen_X, chosen_Y = (side.x, side.y) if adopted else (X, Y)
        if adopted:
            counters.side_cuts_adopted += 1
            _emit(trace, "side_cut", round=j, u=side.u,
                  x_size=len(side.x), y_size=len(side.y))
        audit = audit_round(G, p, pair, X, Y, chosen_X, chosen_Y, adopted,
                            side.u if adopted else None)
        audits.append(audit)
        _emit(trace, "round_end", round=j, **audit.to_dict())
        if not chosen_Y:
            return SeekOutcome(None, "StructureFailed", audits, counters, r0)
        stripped = 0
        for w in iter_bits(chosen_Y.bits):
            if G.adj_bits(w) & chosen_X.bits:
                stripped |= 1 << w
        if not stripped:
            return SeekOutcome(None, "StructureFailed", audits, counters, r0)
        if j == p.round_cap:
            break
        pair = regularize(G, chosen_X, VertexSet(G.n, stripped), p, j + 1)
    return SeekOutcome(None, "RoundCapExceeded", audits, counters, r0)
