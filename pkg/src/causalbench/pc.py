"""The PC family: adjacency search (classic and stable), three collider
orientation strategies, three collider-conflict rules, and the assembled named
variants.

Determinism rules used throughout: edges and triples are processed in sorted
node-index order, conditioning subsets are enumerated in lexicographic order
of sorted indices, and the first separating set found is the one recorded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

from .graph import ARROW, MixedGraph, meek_closure
from .indtest import FisherZTest, IndResult, correlation_matrix

IndTest = Callable[[int, int, Iterable[int]], IndResult]


class ConflictRule(Enum):
    PRIORITY = "priority"
    OVERWRITE = "overwrite"
    BIDIRECTED = "bidirected"


class OrientationStrategy(Enum):
    SEPSET = "sepset"
    CPC = "cpc"
    MAX_P = "max-p"


class TripleStatus(Enum):
    COLLIDER = "collider"
    NONCOLLIDER = "noncollider"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class TripleMark:
    x: int
    y: int
    z: int
    status: TripleStatus


@dataclass(frozen=True)
class PcVariant:
    stable: bool
    orientation: OrientationStrategy
    conflict: ConflictRule = ConflictRule.PRIORITY
    alpha: float = 0.01


# named variants; alpha and conflict rule are per-run options
VARIANT_NAMES = {
    "pc": (False, OrientationStrategy.SEPSET),
    "pc-stable": (True, OrientationStrategy.SEPSET),
    "pc-stable-max": (True, OrientationStrategy.MAX_P),
    "cpc": (False, OrientationStrategy.CPC),
    "cpc-stable": (True, OrientationStrategy.CPC),
}


def make_variant(
    name: str,
    alpha: float = 0.01,
    conflict: ConflictRule | str = ConflictRule.PRIORITY,
) -> PcVariant:
    if name not in VARIANT_NAMES:
        raise ValueError(f"unknown variant {name!r}; choose from {sorted(VARIANT_NAMES)}")
    if isinstance(conflict, str):
        conflict = ConflictRule(conflict)
    stable, orientation = VARIANT_NAMES[name]
    return PcVariant(stable=stable, orientation=orientation, conflict=conflict, alpha=alpha)


class SepsetMap:
    """Separating set recorded for each pair whose edge was removed."""

    def __init__(self):
        self._map: dict[tuple[int, int], frozenset[int]] = {}

    @staticmethod
    def _key(x: int, y: int) -> tuple[int, int]:
        return (x, y) if x < y else (y, x)

    def record(self, x: int, y: int, sepset: Iterable[int]) -> None:
        self._map[self._key(x, y)] = frozenset(sepset)

    def get(self, x: int, y: int) -> frozenset[int] | None:
        return self._map.get(self._key(x, y))

    def __contains__(self, pair) -> bool:
        return self._key(*pair) in self._map

    def __len__(self) -> int:
        return len(self._map)


def adjacency_search(
    test: IndTest,
    v: int,
    stable: bool,
    names: list[str] | None = None,
    workers: int = 1,
) -> tuple[MixedGraph, SepsetMap]:
    """Skeleton search by depth-increasing conditional-independence pruning.

    Starts from the complete undirected graph. At depth d each remaining edge
    (x, y) is tested against size-d subsets of adj(x) \\ {y} and then of
    adj(y) \\ {x}; the first separating subset removes the edge and is
    recorded. In stable mode the candidate adjacency lists are frozen at the
    start of each depth, so removals within the depth cannot influence other
    decisions and the edge set is independent of variable order; only then may
    the per-depth decisions be computed in parallel.
    """
    if names is None:
        names = [f"X{i + 1}" for i in range(v)]
    g = MixedGraph(names)
    for x in range(v):
        for y in range(x + 1, v):
            g.add_undirected(x, y)
    sepsets = SepsetMap()

    depth = 0
    while True:
        if stable:
            frozen = [frozenset(g.adjacents(node)) for node in range(v)]
            adj_of = lambda node: frozen[node]  # noqa: E731
        else:
            adj_of = lambda node: g.adjacents(node)  # noqa: E731

        edges_now = [(x, y) for x, y, _, _ in g.edges()]
        if stable and workers > 1:
            decisions = _parallel_map(
                lambda e: _edge_decision(test, e[0], e[1], depth, adj_of),
                edges_now,
                workers,
            )
            for (x, y), found in zip(edges_now, decisions):
                if found is not None:
                    g.remove_edge(x, y)
                    sepsets.record(x, y, found)
        else:
            for x, y in edges_now:
                found = _edge_decision(test, x, y, depth, adj_of)
                if found is not None:
                    g.remove_edge(x, y)
                    sepsets.record(x, y, found)

        depth += 1
        if not any(
            len(g.adjacents(x) - {y}) >= depth or len(g.adjacents(y) - {x}) >= depth
            for x, y, _, _ in g.edges()
        ):
            break
    return g, sepsets


def _edge_decision(test, x, y, depth, adj_of) -> frozenset[int] | None:
    """First size-`depth` separating subset for the edge (x, y), else None."""
    if depth == 0:
        return frozenset() if test(x, y, ()).independent else None
    for a, b in ((x, y), (y, x)):
        candidates = sorted(adj_of(a) - {b})
        if len(candidates) < depth:
            continue
        for s in itertools.combinations(candidates, depth):
            if test(a, b, s).independent:
                return frozenset(s)
    return None


def _parallel_map(fn, items, workers):
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _triple_name_key(g: MixedGraph, t: tuple[int, int, int]):
    """Canonical (center, endpoints) name key; invariant to column order."""
    x, y, z = t
    lo, hi = sorted((g.names[x], g.names[z]))
    return (g.names[y], lo, hi)


def _sorted_triples(g: MixedGraph) -> list[tuple[int, int, int]]:
    """Unshielded triples in canonical name order, so every orientation pass
    processes them independently of the variable input order."""
    return sorted(g.unshielded_triples(), key=lambda t: _triple_name_key(g, t))


def _orient_collider(g: MixedGraph, x: int, y: int, z: int, rule: ConflictRule) -> None:
    """Point x and z at y, resolving disagreement with earlier orientations."""
    if rule is ConflictRule.PRIORITY:
        # refuse to re-point an edge already oriented out of y
        if x in g.children(y) or z in g.children(y):
            return
        _point(g, x, y)
        _point(g, z, y)
    elif rule is ConflictRule.OVERWRITE:
        g.remove_edge(x, y)
        g.add_directed(x, y)
        g.remove_edge(z, y)
        g.add_directed(z, y)
    elif rule is ConflictRule.BIDIRECTED:
        g.set_endpoint(x, y, ARROW)
        g.set_endpoint(z, y, ARROW)


def _point(g: MixedGraph, tail: int, head: int) -> None:
    if not g.has_directed(tail, head):
        g.remove_edge(tail, head)
        g.add_directed(tail, head)


def orient_colliders_sepset(
    skeleton: MixedGraph, sepsets: SepsetMap, conflict: ConflictRule
) -> MixedGraph:
    """Classic PC orientation: x -> y <- z whenever y is outside the recorded
    separating set of (x, z)."""
    out = skeleton.copy()
    for x, y, z in _sorted_triples(skeleton):
        sep = sepsets.get(x, z)
        if sep is not None and y not in sep:
            _orient_collider(out, x, y, z, conflict)
    return out


def _candidate_subsets(g: MixedGraph, x: int, z: int):
    """All subsets of adj(x) and of adj(z), deduplicated, in deterministic
    order (side, then size, then lexicographic)."""
    seen = set()
    for side, other in ((x, z), (z, x)):
        candidates = sorted(g.adjacents(side) - {other})
        for size in range(len(candidates) + 1):
            for s in itertools.combinations(candidates, size):
                fs = frozenset(s)
                if fs not in seen:
                    seen.add(fs)
                    yield s


def classify_triple(g: MixedGraph, test: IndTest, x: int, y: int, z: int) -> TripleStatus:
    """CPC judgment: collider when y is in no separating subset, noncollider
    when y is in every one, ambiguous otherwise (including when no separating
    subset exists at all)."""
    with_y = without_y = False
    for s in _candidate_subsets(g, x, z):
        if test(x, z, s).independent:
            if y in s:
                with_y = True
            else:
                without_y = True
            if with_y and without_y:
                return TripleStatus.AMBIGUOUS
    if without_y and not with_y:
        return TripleStatus.COLLIDER
    if with_y and not without_y:
        return TripleStatus.NONCOLLIDER
    return TripleStatus.AMBIGUOUS


def orient_colliders_cpc(
    skeleton: MixedGraph, test: IndTest, conflict: ConflictRule
) -> tuple[MixedGraph, list[TripleMark]]:
    """Conservative orientation: orient only unambiguous colliders; ambiguous
    triples are treated as noncolliders downstream."""
    out = skeleton.copy()
    marks = []
    for x, y, z in _sorted_triples(skeleton):
        status = classify_triple(skeleton, test, x, y, z)
        marks.append(TripleMark(x, y, z, status))
        if status is TripleStatus.COLLIDER:
            _orient_collider(out, x, y, z, conflict)
    return out, marks


def orient_colliders_maxp(
    skeleton: MixedGraph, test: IndTest, conflict: ConflictRule
) -> MixedGraph:
    """Orient each unshielded triple by the conditioning subset with maximal
    p-value for the x _||_ z test; collider iff y is outside that subset.

    Subset ties prefer smaller subsets, then lexicographic name order. The
    resulting colliders are oriented strongest evidence (highest p) first, so
    conflict resolution, like the decisions themselves, is invariant to the
    variable input order.
    """
    out = skeleton.copy()
    colliders = []
    for x, y, z in _sorted_triples(skeleton):
        best = None
        for s in _candidate_subsets(skeleton, x, z):
            p = test(x, z, s).p_value
            key = (-p, len(s), tuple(sorted(skeleton.names[v] for v in s)))
            if best is None or key < best[0]:
                best = (key, frozenset(s), p)
        if best is not None and y not in best[1]:
            colliders.append((-best[2], _triple_name_key(skeleton, (x, y, z)), x, y, z))
    colliders.sort()
    for _, _, x, y, z in colliders:
        _orient_collider(out, x, y, z, conflict)
    return out


def run_pc(
    variant: PcVariant,
    data=None,
    *,
    test: IndTest | None = None,
    names: list[str] | None = None,
    workers: int = 1,
) -> MixedGraph:
    """Full pipeline: adjacency search, collider orientation, Meek closure.

    Pass a DataSet for the Fisher Z test at the variant's alpha, or an
    explicit test (e.g. the d-separation oracle) plus the variable count via
    its num_vars attribute.
    """
    if test is None:
        if data is None:
            raise ValueError("need either data or a test")
        test = FisherZTest(correlation_matrix(data), variant.alpha)
        if names is None:
            names = list(data.names)
    v = test.num_vars
    if names is None and hasattr(test, "dag"):
        names = list(test.dag.names)
    skeleton, sepsets = adjacency_search(test, v, variant.stable, names, workers)
    if variant.orientation is OrientationStrategy.SEPSET:
        oriented = orient_colliders_sepset(skeleton, sepsets, variant.conflict)
    elif variant.orientation is OrientationStrategy.CPC:
        oriented, _ = orient_colliders_cpc(skeleton, test, variant.conflict)
    else:
        oriented = orient_colliders_maxp(skeleton, test, variant.conflict)
    return meek_closure(oriented)
