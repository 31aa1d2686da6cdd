"""Shared oracles and generators for the test suite.

The d-separation oracle here enumerates simple paths and checks blocking
directly, independent of the reachability implementation under test.
"""

import itertools

import numpy as np
import pytest

from causalbench.graph import Dag


def sparse_random_dag(rng: np.random.Generator, v: int, edge_prob: float) -> Dag:
    """Bernoulli forward-edge DAG (for property tests, not the benchmark)."""
    edges = [
        (i, j)
        for i in range(v)
        for j in range(i + 1, v)
        if rng.random() < edge_prob
    ]
    return Dag([f"X{i + 1}" for i in range(v)], edges)


def brute_force_d_separated(dag: Dag, x: int, y: int, z) -> bool:
    """Path-enumeration oracle: d-separated iff no active simple path."""
    zset = set(z)
    anc_z = set(zset)
    stack = list(zset)
    while stack:
        node = stack.pop()
        for p in dag.parents(node):
            if p not in anc_z:
                anc_z.add(p)
                stack.append(p)

    def active(path):
        for k in range(1, len(path) - 1):
            prev, mid, nxt = path[k - 1], path[k], path[k + 1]
            is_collider = prev in dag.parents(mid) and nxt in dag.parents(mid)
            if is_collider:
                if mid not in anc_z:
                    return False
            elif mid in zset:
                return False
        return True

    def paths(current, visited):
        tip = current[-1]
        if tip == y:
            yield list(current)
            return
        for nbr in sorted(dag.adjacents(tip)):
            if nbr not in visited:
                visited.add(nbr)
                current.append(nbr)
                yield from paths(current, visited)
                current.pop()
                visited.discard(nbr)

    return not any(active(p) for p in paths([x], {x}))


def enumerate_dags(v: int):
    """All labeled DAGs on v nodes (25 for v=3, 543 for v=4)."""
    names = [f"X{i + 1}" for i in range(v)]
    pairs = list(itertools.combinations(range(v), 2))
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (i, j), c in zip(pairs, choice):
            if c == 1:
                edges.append((i, j))
            elif c == 2:
                edges.append((j, i))
        try:
            yield Dag(names, edges)
        except ValueError:
            continue


@pytest.fixture
def rng():
    return np.random.default_rng(20170803)
