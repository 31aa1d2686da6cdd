"""Mixed graphs with tail/arrow endpoint marks, DAGs, d-separation, and pattern
(CPDAG) machinery shared by the search algorithms and the simulator.

Nodes are dense integer indices 0..v-1 with unique string names. Edges are
stored per unordered pair with one endpoint mark at each end, so undirected
(tail-tail), directed (tail-arrow), and bidirected (arrow-arrow) edges are all
representable. Iteration order is sorted by node index everywhere, which keeps
downstream tie-breaking reproducible.
"""

from __future__ import annotations

import itertools
from enum import Enum
from typing import Iterable, Iterator, Sequence


class Endpoint(Enum):
    TAIL = "-"
    ARROW = ">"


TAIL = Endpoint.TAIL
ARROW = Endpoint.ARROW


class CycleError(ValueError):
    """Raised when an operation requires acyclicity and a cycle is present."""

    def __init__(self, member: int):
        self.member = member
        super().__init__(f"graph contains a directed cycle through node {member}")


class MixedGraph:
    """Graph over named nodes whose edges carry an endpoint mark at each end.

    At most one edge per unordered pair, no self loops. Mutation is
    single-owner; once built, queries are safe to share across threads.
    """

    __slots__ = ("names", "_index", "_marks", "_adj", "_parents", "_children", "_undir")

    def __init__(self, names: Sequence[str]):
        names = list(names)
        if len(set(names)) != len(names):
            raise ValueError("node names must be unique")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        # unordered pair (i, j) with i < j -> (mark at i, mark at j)
        self._marks: dict[tuple[int, int], tuple[Endpoint, Endpoint]] = {}
        v = len(names)
        self._adj: list[set[int]] = [set() for _ in range(v)]
        self._parents: list[set[int]] = [set() for _ in range(v)]
        self._children: list[set[int]] = [set() for _ in range(v)]
        self._undir: list[set[int]] = [set() for _ in range(v)]

    # -- basic structure ---------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.names)

    def node_index(self, name: str) -> int:
        return self._index[name]

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self.names):
            raise ValueError(f"unknown node {v}")

    def add_edge(self, a: int, b: int, mark_a: Endpoint, mark_b: Endpoint) -> None:
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError("self loops are not allowed")
        key = (a, b) if a < b else (b, a)
        if key in self._marks:
            raise ValueError(f"edge {a},{b} already present")
        self._marks[key] = (mark_a, mark_b) if a < b else (mark_b, mark_a)
        self._adj[a].add(b)
        self._adj[b].add(a)
        self._register(a, b, mark_a, mark_b)

    def _register(self, a, b, mark_a, mark_b):
        if mark_a is TAIL and mark_b is ARROW:
            self._parents[b].add(a)
            self._children[a].add(b)
        elif mark_a is ARROW and mark_b is TAIL:
            self._parents[a].add(b)
            self._children[b].add(a)
        elif mark_a is TAIL and mark_b is TAIL:
            self._undir[a].add(b)
            self._undir[b].add(a)
        # bidirected edges register as adjacency only

    def _unregister(self, a, b):
        self._parents[a].discard(b)
        self._parents[b].discard(a)
        self._children[a].discard(b)
        self._children[b].discard(a)
        self._undir[a].discard(b)
        self._undir[b].discard(a)

    def add_directed(self, a: int, b: int) -> None:
        self.add_edge(a, b, TAIL, ARROW)

    def add_undirected(self, a: int, b: int) -> None:
        self.add_edge(a, b, TAIL, TAIL)

    def add_bidirected(self, a: int, b: int) -> None:
        self.add_edge(a, b, ARROW, ARROW)

    def remove_edge(self, a: int, b: int) -> None:
        key = (a, b) if a < b else (b, a)
        if key not in self._marks:
            raise ValueError(f"no edge between {a} and {b}")
        del self._marks[key]
        self._adj[a].discard(b)
        self._adj[b].discard(a)
        self._unregister(a, b)

    def marks(self, a: int, b: int) -> tuple[Endpoint, Endpoint] | None:
        """Marks (at a, at b) for the edge joining a and b, or None."""
        key = (a, b) if a < b else (b, a)
        m = self._marks.get(key)
        if m is None:
            return None
        return m if a < b else (m[1], m[0])

    def endpoint(self, a: int, b: int) -> Endpoint | None:
        """Mark at b on the edge joining a and b, or None if not adjacent."""
        m = self.marks(a, b)
        return None if m is None else m[1]

    def set_endpoint(self, a: int, b: int, mark: Endpoint) -> None:
        """Set the mark at b on the existing edge a-b, keeping the mark at a."""
        m = self.marks(a, b)
        if m is None:
            raise ValueError(f"no edge between {a} and {b}")
        self._unregister(a, b)
        key = (a, b) if a < b else (b, a)
        new = (m[0], mark) if a < b else (mark, m[0])
        self._marks[key] = new
        self._register(key[0], key[1], new[0], new[1])

    def orient(self, a: int, b: int) -> None:
        """Repoint the existing edge between a and b as a -> b."""
        self.remove_edge(a, b)
        self.add_directed(a, b)

    # -- queries -----------------------------------------------------------

    def adjacent(self, a: int, b: int) -> bool:
        self._check(a)
        self._check(b)
        return b in self._adj[a]

    def adjacents(self, v: int) -> set[int]:
        return self._adj[v]

    def parents(self, v: int) -> set[int]:
        return self._parents[v]

    def children(self, v: int) -> set[int]:
        return self._children[v]

    def undirected_neighbors(self, v: int) -> set[int]:
        return self._undir[v]

    def has_directed(self, a: int, b: int) -> bool:
        return b in self._children[a]

    def has_undirected(self, a: int, b: int) -> bool:
        return b in self._undir[a]

    def has_bidirected(self, a: int, b: int) -> bool:
        return self.marks(a, b) == (ARROW, ARROW)

    def edges(self) -> list[tuple[int, int, Endpoint, Endpoint]]:
        """All edges as (i, j, mark at i, mark at j) with i < j, sorted."""
        return [(i, j, m[0], m[1]) for (i, j), m in sorted(self._marks.items())]

    @property
    def num_edges(self) -> int:
        return len(self._marks)

    def unshielded_triples(self) -> Iterator[tuple[int, int, int]]:
        """Yield (x, y, z), x < z, with x-y and y-z adjacent but x, z not."""
        for y in range(self.num_nodes):
            adj = sorted(self._adj[y])
            for x, z in itertools.combinations(adj, 2):
                if z not in self._adj[x]:
                    yield (x, y, z)

    # -- identity ----------------------------------------------------------

    def edge_signature(self) -> frozenset:
        """Name-keyed canonical edge set; index permutations compare equal."""
        sig = []
        for i, j, mi, mj in self.edges():
            ni, nj = self.names[i], self.names[j]
            if ni <= nj:
                sig.append((ni, nj, mi.value, mj.value))
            else:
                sig.append((nj, ni, mj.value, mi.value))
        return frozenset(sig)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return (
            set(self.names) == set(other.names)
            and self.edge_signature() == other.edge_signature()
        )

    def __hash__(self):
        return hash((frozenset(self.names), self.edge_signature()))

    def __repr__(self):
        parts = []
        tok = {
            (TAIL, ARROW): "-->",
            (TAIL, TAIL): "---",
            (ARROW, ARROW): "<->",
            (ARROW, TAIL): "<--",
        }
        for i, j, mi, mj in self.edges():
            parts.append(f"{self.names[i]} {tok[(mi, mj)]} {self.names[j]}")
        return f"MixedGraph({self.num_nodes} nodes: {'; '.join(parts)})"

    def copy(self) -> "MixedGraph":
        g = MixedGraph(self.names)
        g._marks = dict(self._marks)
        g._adj = [set(s) for s in self._adj]
        g._parents = [set(s) for s in self._parents]
        g._children = [set(s) for s in self._children]
        g._undir = [set(s) for s in self._undir]
        return g

    def skeleton(self) -> "MixedGraph":
        g = MixedGraph(self.names)
        for i, j, _, _ in self.edges():
            g.add_undirected(i, j)
        return g


class Dag(MixedGraph):
    """MixedGraph restricted to directed edges, acyclic by construction."""

    def __init__(self, names: Sequence[str], edges: Iterable[tuple[int, int]] = ()):
        super().__init__(names)
        for a, b in edges:
            self.add_directed(a, b)
        topological_order(self)  # raises CycleError on a cycle

    def add_edge(self, a, b, mark_a, mark_b):
        if not (mark_a is TAIL and mark_b is ARROW):
            raise ValueError("a Dag holds directed edges only")
        super().add_edge(a, b, mark_a, mark_b)

    def copy(self) -> "Dag":
        g = Dag(self.names)
        for a, b, _, _ in self.edges():
            MixedGraph.add_edge(g, a, b, TAIL, ARROW)
        return g


def adjacent(g: MixedGraph, a: int, b: int) -> bool:
    """True iff an edge joins a and b, regardless of endpoint marks."""
    return g.adjacent(a, b)


def topological_order(g: MixedGraph) -> list[int]:
    """Order with every directed edge pointing forward (Kahn's algorithm).

    Lowest-index-first among simultaneously ready nodes, so the result is
    deterministic. Raises CycleError naming a node on a cycle.
    """
    import heapq

    indeg = [len(g.parents(v)) for v in range(g.num_nodes)]
    ready = [v for v in range(g.num_nodes) if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in sorted(g.children(v)):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != g.num_nodes:
        leftover = min(v for v in range(g.num_nodes) if indeg[v] > 0)
        raise CycleError(leftover)
    return order


def d_separated(g: Dag, x: int, y: int, z: Iterable[int]) -> bool:
    """True iff every path between x and y is blocked given conditioning set z.

    Linear-time reachability: a trail is tracked by (node, direction) states,
    where direction records whether the trail entered the node through an
    arrowhead (from a parent) or through a tail (from a child). Colliders pass
    only when the collision node has a descendant in z.
    """
    zset = frozenset(z)
    if x == y:
        raise ValueError("x and y must be distinct")
    if x in zset or y in zset:
        raise ValueError("x and y must not be in the conditioning set")
    g._check(x)
    g._check(y)

    # nodes with a descendant in z (including z itself)
    anc_z = set(zset)
    stack = list(zset)
    while stack:
        v = stack.pop()
        for p in g.parents(v):
            if p not in anc_z:
                anc_z.add(p)
                stack.append(p)

    UP, DOWN = True, False  # UP: entered from a child; DOWN: entered from a parent
    visited = set()
    stack = [(x, UP)]
    while stack:
        v, direction = stack.pop()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        if v == y:
            return False
        if direction == UP:
            if v not in zset:
                for p in g.parents(v):
                    stack.append((p, UP))
                for c in g.children(v):
                    stack.append((c, DOWN))
        else:
            if v not in zset:
                for c in g.children(v):
                    stack.append((c, DOWN))
            if v in anc_z:
                for p in g.parents(v):
                    stack.append((p, UP))
    return True


def meek_closure(g: MixedGraph) -> MixedGraph:
    """Fixpoint of the four Meek orientation rules, on a copy of g.

    R1: a -> b - c, a and c nonadjacent            =>  b -> c
    R2: a -> b -> c with a - c                     =>  a -> c
    R3: a - b, a - c, a - d, c -> b, d -> b,
        c and d nonadjacent                        =>  a -> b
    R4: a - b, a - c, c -> d, d -> b,
        c and b nonadjacent, a and d adjacent      =>  a -> b

    Orientations are only added, never removed. Bidirected edges are left
    untouched and never satisfy a rule premise. R4's premises require
    orientations that only background knowledge introduces; it is retained
    for completeness and in this pipeline never fires.
    """
    from collections import deque

    out = g.copy()
    nm = out.names

    def name_key(pair):
        a, b = pair
        return (nm[a], nm[b]) if nm[a] <= nm[b] else (nm[b], nm[a])

    # With conflicting (finite-sample) orientation inputs the fixpoint can
    # depend on processing order, so the worklist is ordered by node names:
    # renaming-invariant, hence stable under column permutations upstream.
    queue = deque(
        sorted(
            ((i, j) for i, j, mi, mj in out.edges() if mi is TAIL and mj is TAIL),
            key=name_key,
        )
    )
    queued = set(queue)
    while queue:
        a, b = queue.popleft()
        queued.discard((a, b))
        if not out.has_undirected(a, b):
            continue
        if nm[b] < nm[a]:
            a, b = b, a  # probe directions in name order too
        if _meek_applies(out, a, b):
            out.orient(a, b)
        elif _meek_applies(out, b, a):
            out.orient(b, a)
        else:
            continue
        # a new arrow can only enable rules on edges near its endpoints
        affected = {a, b} | out.adjacents(a) | out.adjacents(b)
        fresh = []
        for v in affected:
            for w in out.undirected_neighbors(v):
                key = (v, w) if v < w else (w, v)
                if key not in queued:
                    queued.add(key)
                    fresh.append(key)
        queue.extend(sorted(fresh, key=name_key))
    return out


def _meek_applies(g: MixedGraph, a: int, b: int) -> bool:
    """True if some Meek rule orients the undirected edge a - b as a -> b."""
    # R1 (with the roles shifted: p -> a - b, p,b nonadjacent => a -> b)
    for p in g.parents(a):
        if p != b and not g.adjacent(p, b):
            return True
    # R2: a -> k -> b with a - b
    for k in g.children(a):
        if b in g.children(k):
            return True
    # R3: a - c, a - d, c -> b, d -> b, c,d nonadjacent
    cand = sorted(g.undirected_neighbors(a) & g.parents(b))
    for c, d in itertools.combinations(cand, 2):
        if not g.adjacent(c, d):
            return True
    # R4: a - c, c -> d, d -> b, c,b nonadjacent, a,d adjacent
    for c in g.undirected_neighbors(a):
        if c == b or g.adjacent(c, b):
            continue
        for d in g.children(c):
            if b in g.children(d) and g.adjacent(a, d):
                return True
    return False


def cpdag_of(g: Dag) -> MixedGraph:
    """Pattern of a DAG: unshielded colliders kept directed, Meek closure of
    the rest, every remaining edge undirected."""
    if not isinstance(g, Dag):
        if any({mi, mj} != {TAIL, ARROW} for _, _, mi, mj in g.edges()):
            raise ValueError("cpdag_of expects a fully directed graph")
        topological_order(g)  # raises on cycles
    skel = g.skeleton()
    for x, y, z in g.unshielded_triples():
        if y in g.children(x) and y in g.children(z):
            if skel.has_undirected(x, y):
                skel.orient(x, y)
            if skel.has_undirected(z, y):
                skel.orient(z, y)
    return meek_closure(skel)


def consistent_extension(g: MixedGraph) -> Dag:
    """A DAG extending g's directed edges and orienting its undirected ones
    without creating cycles or new unshielded colliders (Dor & Tarsi).

    Raises ValueError when no consistent extension exists.
    """
    work = g.copy()
    alive = set(range(g.num_nodes))
    oriented: list[tuple[int, int]] = []
    while alive:
        found = None
        for v in sorted(alive):
            if work.children(v):
                continue  # must be a sink in the directed part
            nbrs = work.undirected_neighbors(v)
            adj_v = work.adjacents(v)
            if all(adj_v - {w} <= work.adjacents(w) for w in nbrs):
                found = v
                break
        if found is None:
            raise ValueError("graph admits no consistent DAG extension")
        for w in sorted(work.undirected_neighbors(found)):
            oriented.append((w, found))
        for w in list(work.adjacents(found)):
            work.remove_edge(found, w)
        alive.discard(found)

    dag = Dag(g.names)
    for a, b, ma, mb in g.edges():
        if ma is TAIL and mb is ARROW:
            dag.add_directed(a, b)
        elif ma is ARROW and mb is TAIL:
            dag.add_directed(b, a)
        elif ma is ARROW and mb is ARROW:
            raise ValueError("bidirected edges admit no DAG extension")
    for a, b in oriented:
        dag.add_directed(a, b)
    topological_order(dag)
    return dag
