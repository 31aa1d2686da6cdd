"""Fast greedy equivalence search: best-first forward and backward equivalence
sweeps over CPDAG space with cached candidate operators.

The pipeline is (1) a screening sweep scoring every single-edge insertion into
the empty graph, run in parallel partitions and merged deterministically;
(2) a forward phase applying the best positive-delta valid insertion until
none remains, restricted to pairs that passed the screen; (3) a backward
phase applying the best positive-delta valid deletion until none remains;
(4) unless faithfulness is assumed, a second forward sweep open to every
nonadjacent pair (recovering edges whose endpoints are unconditionally
uncorrelated but conditionally dependent) followed by a repeat of the
backward sweep. With faithfulness assumed, screened-out pairs are never
reconsidered.

Operator semantics follow Chickering's insert/delete formulation: an
insertion (x, y, T) is valid when NA(y,x) | T is a clique and every
semidirected path from y to x crosses it; a deletion (x, y, H) is valid when
NA(y,x) - H is a clique. After each application the graph is rebuilt into a
proper pattern (unshielded-collider arrows kept, Meek closure of the rest).

Cache discipline: candidate operators are keyed by ordered pair and carry a
version stamp; after each application, operators are recomputed for every
pair touching the changed nodes or their neighbors (clique status for a pair
can only change inside that region). The semidirected-path condition can flip
through distant edits, so operators failing it at pop time are parked and
requeued after the next application instead of being dropped.
"""

from __future__ import annotations

import heapq
import itertools
from collections import defaultdict
from dataclasses import dataclass

from .graph import ARROW, TAIL, MixedGraph, meek_closure

_HEAP_COMPACT_LIMIT = 1_000_000


@dataclass
class FgesConfig:
    """Search options; score is a SemBicScore, FisherZScore, or DsepOracleScore."""

    score: object
    faithfulness_assumed: bool = False
    workers: int = 1


def na_yx(g: MixedGraph, x: int, y: int) -> set[int]:
    """Undirected neighbors of y that are adjacent to x."""
    return g.undirected_neighbors(y) & g.adjacents(x)


def _is_clique(g: MixedGraph, nodes) -> bool:
    nodes = sorted(nodes)
    for i, a in enumerate(nodes):
        adj_a = g.adjacents(a)
        for b in nodes[i + 1 :]:
            if b not in adj_a:
                return False
    return True


def _semidirected_reachable(g: MixedGraph, start: int, target: int, blocked) -> bool:
    """True iff some path start => target of child/undirected steps avoids
    every node in blocked."""
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in itertools.chain(g.children(v), g.undirected_neighbors(v)):
            if w == target:
                return True
            if w not in blocked and w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def valid_insert(g: MixedGraph, x: int, y: int, t_subset) -> bool:
    """Chickering validity for Insert(x, y, T)."""
    t = set(t_subset)
    if g.adjacent(x, y):
        raise ValueError("insert endpoints must be nonadjacent")
    if not t <= g.undirected_neighbors(y) - g.adjacents(x) - {x}:
        raise ValueError("T must be undirected neighbors of y not adjacent to x")
    union = na_yx(g, x, y) | t
    if not _is_clique(g, union):
        return False
    return not _semidirected_reachable(g, y, x, union)


def apply_insert(g: MixedGraph, x: int, y: int, t_subset) -> MixedGraph:
    """Apply a valid Insert(x, y, T) and rebuild the pattern; raises on an
    invalid operator (a programming bug, not a data condition)."""
    if not valid_insert(g, x, y, t_subset):
        raise ValueError(f"invalid insert ({x}, {y}, {sorted(t_subset)})")
    out = g.copy()
    _insert_edges(out, x, y, set(t_subset))
    return rebuild_pattern(out)


def _insert_edges(g: MixedGraph, x: int, y: int, t: set[int]) -> None:
    g.add_directed(x, y)
    for node in sorted(t):
        g.orient(node, y)


def valid_delete(g: MixedGraph, x: int, y: int, h_subset) -> bool:
    """Chickering validity for Delete(x, y, H)."""
    h = set(h_subset)
    if not g.adjacent(x, y):
        raise ValueError("delete endpoints must be adjacent")
    if g.has_directed(y, x):
        raise ValueError("delete applies to x -> y or x -- y edges")
    na = na_yx(g, x, y)
    if not h <= na:
        raise ValueError("H must be a subset of NA(y, x)")
    return _is_clique(g, na - h)


def apply_delete(g: MixedGraph, x: int, y: int, h_subset) -> MixedGraph:
    """Apply a valid Delete(x, y, H) and rebuild the pattern."""
    if not valid_delete(g, x, y, h_subset):
        raise ValueError(f"invalid delete ({x}, {y}, {sorted(h_subset)})")
    out = g.copy()
    _delete_edges(out, x, y, set(h_subset))
    return rebuild_pattern(out)


def _delete_edges(g: MixedGraph, x: int, y: int, h: set[int]) -> None:
    g.remove_edge(x, y)
    for node in sorted(h):
        if g.has_undirected(y, node):
            g.orient(y, node)
        if g.has_undirected(x, node):
            g.orient(x, node)


def rebuild_pattern(g: MixedGraph) -> MixedGraph:
    """Keep arrows that sit in unshielded colliders, undirect everything else,
    then take the Meek closure."""
    base = MixedGraph(g.names)
    for i, j, mi, mj in g.edges():
        if mi is TAIL and mj is ARROW:
            tail, head = i, j
        elif mi is ARROW and mj is TAIL:
            tail, head = j, i
        else:
            base.add_undirected(i, j)
            continue
        if any(p != tail and not g.adjacent(p, tail) for p in g.parents(head)):
            base.add_directed(tail, head)
        else:
            base.add_undirected(tail, head)
    return meek_closure(base)


def fges_search(config: FgesConfig, names: list[str] | None = None) -> MixedGraph:
    """Run the search and return the estimated pattern."""
    return _Engine(config, names).run()


class _Engine:
    def __init__(self, config: FgesConfig, names):
        self.score = config.score
        self.faithful = config.faithfulness_assumed
        self.workers = max(1, config.workers)
        v = self.score.num_vars
        if names is None:
            names = getattr(self.score, "names", None) or [f"X{i+1}" for i in range(v)]
        self.g = MixedGraph(names)
        self.v = v
        self.effect_adj: list[set[int]] = [set() for _ in range(v)]
        self.restricted = True
        self.heap: list = []
        self.version: dict[tuple[int, int], int] = defaultdict(int)
        self.deferred: list = []

    # -- shared plumbing -----------------------------------------------------

    def _map(self, fn, items):
        if self.workers == 1 or len(items) < 4:
            return [fn(it) for it in items]
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def _push(self, x, y, delta, subset, ver):
        heapq.heappush(self.heap, (-delta, x, y, len(subset), subset, ver))
        if len(self.heap) > _HEAP_COMPACT_LIMIT:
            self.heap = [
                a for a in self.heap if a[5] == self.version[(a[1], a[2])]
            ]
            heapq.heapify(self.heap)

    def _recompute_pairs(self, pairs, calc):
        pairs = sorted(set(pairs))
        arrow_lists = self._map(calc, pairs)
        for (x, y), arrows in zip(pairs, arrow_lists):
            self.version[(x, y)] += 1
            ver = self.version[(x, y)]
            for delta, subset in arrows:
                self._push(x, y, delta, subset, ver)

    def _region(self, changed) -> set[int]:
        region = set(changed)
        for node in changed:
            region |= self.g.adjacents(node)
        return region

    def _changed_nodes(self, before_marks) -> set[int]:
        after = self.g._marks
        changed = set()
        for key in before_marks.keys() | after.keys():
            if before_marks.get(key) != after.get(key):
                changed.update(key)
        return changed

    def _rebuild(self, before_marks: dict) -> set[int]:
        """Rebuild the pattern; report nodes changed relative to the marks
        snapshot taken before the operator was applied."""
        self.g = rebuild_pattern(self.g)
        return self._changed_nodes(before_marks)

    def _reset_queues(self):
        self.heap = []
        self.version = defaultdict(int)
        self.deferred = []

    # -- forward phase ---------------------------------------------------------

    def run(self) -> MixedGraph:
        self._seed_initial()
        self._forward_phase()
        self._backward_phase()
        if not self.faithful:
            self._open_all_pairs()
            self._forward_phase()
            self._backward_phase()
        return self.g

    def _seed_initial(self):
        """Screening sweep: single-edge deltas against the empty graph; pairs
        with positive delta become the candidate set for the first sweep."""
        init = self.score.initial_deltas()
        self._reset_queues()
        for x in range(self.v):
            for y in range(x + 1, self.v):
                d = init[x, y]
                if d > 0:
                    self.effect_adj[x].add(y)
                    self.effect_adj[y].add(x)
                    self._push(x, y, float(d), (), 0)
                    self._push(y, x, float(d), (), 0)

    def _open_all_pairs(self):
        """Admit every nonadjacent pair for the second forward sweep."""
        self.restricted = False
        self._reset_queues()
        pairs = [
            (x, y)
            for x in range(self.v)
            for y in range(self.v)
            if x != y and not self.g.adjacent(x, y)
        ]
        self._recompute_pairs(pairs, self._forward_arrows)

    def _partners(self, node: int):
        if self.restricted:
            return self.effect_adj[node]
        return (w for w in range(self.v) if w != node)

    def _forward_arrows(self, pair) -> list[tuple[float, tuple]]:
        """Positive-delta insert candidates for the ordered pair, cliqueness
        enforced, path condition deliberately left to pop time."""
        x, y = pair
        g = self.g
        if g.adjacent(x, y):
            return []
        na = na_yx(g, x, y)
        pa_y = frozenset(g.parents(y))
        tcands = sorted(g.undirected_neighbors(y) - g.adjacents(x) - {x})
        arrows = []
        for size in range(len(tcands) + 1):
            any_clique = False
            for t in itertools.combinations(tcands, size):
                union = na | set(t)
                if not _is_clique(g, union):
                    continue
                any_clique = True
                delta = self.score.insert_delta(x, y, union | pa_y)
                if delta > 0:
                    arrows.append((delta, t))
            if not any_clique:
                break  # supersets of non-cliques are non-cliques
        return arrows

    def _forward_phase(self):
        g = self.g
        while self.heap:
            negd, x, y, _, t, ver = heapq.heappop(self.heap)
            if ver != self.version[(x, y)] or g.adjacent(x, y):
                continue
            t_set = set(t)
            union = na_yx(g, x, y) | t_set
            if not _is_clique(g, union) or _semidirected_reachable(g, y, x, union):
                self.deferred.append((negd, x, y, len(t), t, ver))
                continue
            before = dict(g._marks)
            _insert_edges(g, x, y, t_set)
            changed = self._rebuild(before)
            g = self.g
            for arrow in self.deferred:
                heapq.heappush(self.heap, arrow)
            self.deferred = []
            pairs = []
            for b in sorted(self._region(changed)):
                for a in self._partners(b):
                    if a != b and not g.adjacent(a, b):
                        pairs.append((a, b))
                        pairs.append((b, a))
            self._recompute_pairs(pairs, self._forward_arrows)
        self.deferred = []

    # -- backward phase --------------------------------------------------------

    def _delete_pairs(self) -> list[tuple[int, int]]:
        pairs = []
        for i, j, mi, mj in self.g.edges():
            if mi is TAIL and mj is ARROW:
                pairs.append((i, j))
            elif mi is ARROW and mj is TAIL:
                pairs.append((j, i))
            elif mi is TAIL and mj is TAIL:
                pairs.append((i, j))
                pairs.append((j, i))
        return pairs

    def _backward_arrows(self, pair) -> list[tuple[float, tuple]]:
        x, y = pair
        g = self.g
        if not g.adjacent(x, y) or g.has_directed(y, x):
            return []
        na = na_yx(g, x, y)
        pa = frozenset(g.parents(y))
        nalist = sorted(na)
        arrows = []
        for size in range(len(nalist) + 1):
            for h in itertools.combinations(nalist, size):
                h_set = set(h)
                if not _is_clique(g, na - h_set):
                    continue
                delta = self.score.delete_delta(x, y, (na - h_set) | pa)
                if delta > 0:
                    arrows.append((delta, h))
        return arrows

    def _backward_phase(self):
        self._reset_queues()
        self._recompute_pairs(self._delete_pairs(), self._backward_arrows)
        g = self.g
        while self.heap:
            negd, x, y, _, h, ver = heapq.heappop(self.heap)
            if ver != self.version[(x, y)]:
                continue
            if not g.adjacent(x, y) or g.has_directed(y, x):
                continue
            h_set = set(h)
            na = na_yx(g, x, y)
            if not h_set <= na or not _is_clique(g, na - h_set):
                continue
            before = dict(g._marks)
            _delete_edges(g, x, y, h_set)
            changed = self._rebuild(before)
            g = self.g
            region = self._region(changed)
            pairs = [
                (a, b) for (a, b) in self._delete_pairs() if a in region or b in region
            ]
            self._recompute_pairs(pairs, self._backward_arrows)
        self._reset_queues()
