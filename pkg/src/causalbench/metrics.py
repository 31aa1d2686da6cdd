"""Graph-accuracy statistics comparing an estimated pattern to the true DAG.

Adjacency judgments range over unordered node pairs; arrowhead judgments over
ordered pairs (x, y), where the estimate claims an arrowhead when its edge
between x and y carries an arrow mark at y (so a bidirected edge claims one in
both directions) and the truth claims x -> y. Arrowhead true negatives use the
full v*(v-1) ordered-pair universe so the Matthews correlation is always
well-defined. Graphs are aligned by node name, so column-shuffled estimates
compare correctly against the generating DAG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import ARROW, Dag, MixedGraph


@dataclass(frozen=True)
class ConfusionCounts:
    atp: int
    afp: int
    afn: int
    atn: int
    ahtp: int
    ahfp: int
    ahfn: int
    ahtn: int


def _check_nodes(truth: MixedGraph, est: MixedGraph) -> None:
    if set(truth.names) != set(est.names):
        raise ValueError("truth and estimate must share one node set")


def _adjacency_names(g: MixedGraph) -> set[frozenset]:
    return {
        frozenset((g.names[i], g.names[j])) for i, j, _, _ in g.edges()
    }


def _arrowhead_names(g: MixedGraph) -> set[tuple[str, str]]:
    """(tail name, head name) for every arrow mark in the graph."""
    heads = set()
    for i, j, mi, mj in g.edges():
        if mj is ARROW:
            heads.add((g.names[i], g.names[j]))
        if mi is ARROW:
            heads.add((g.names[j], g.names[i]))
    return heads


def adjacency_confusion(truth: Dag, est: MixedGraph) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) over unordered pairs, marks ignored."""
    _check_nodes(truth, est)
    t = _adjacency_names(truth)
    e = _adjacency_names(est)
    v = truth.num_nodes
    tp = len(t & e)
    fp = len(e - t)
    fn = len(t - e)
    tn = v * (v - 1) // 2 - tp - fp - fn
    return tp, fp, fn, tn


def arrowhead_confusion(truth: Dag, est: MixedGraph) -> tuple[int, int, int, int]:
    """(tp, fp, fn, tn) over ordered pairs."""
    _check_nodes(truth, est)
    t = _arrowhead_names(truth)
    e = _arrowhead_names(est)
    v = truth.num_nodes
    tp = len(t & e)
    fp = len(e - t)
    fn = len(t - e)
    tn = v * (v - 1) - tp - fp - fn
    return tp, fp, fn, tn


def confusion_counts(truth: Dag, est: MixedGraph) -> ConfusionCounts:
    atp, afp, afn, atn = adjacency_confusion(truth, est)
    ahtp, ahfp, ahfn, ahtn = arrowhead_confusion(truth, est)
    return ConfusionCounts(atp, afp, afn, atn, ahtp, ahfp, ahfn, ahtn)


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def precision_recall(
    c: ConfusionCounts,
) -> tuple[float | None, float | None, float | None, float | None]:
    """(AP, AR, AHP, AHR); a ratio with a zero denominator is None and is
    rendered as '*' in the result tables."""
    ap = _ratio(c.atp, c.atp + c.afp)
    ar = _ratio(c.atp, c.atp + c.afn)
    ahp = _ratio(c.ahtp, c.ahtp + c.ahfp)
    ahr = _ratio(c.ahtp, c.ahtp + c.ahfn)
    return ap, ar, ahp, ahr


def matthews(c: ConfusionCounts, which: str) -> float:
    """Matthews correlation for 'adj' or 'arrow' counts; 0 when any factor of
    the denominator vanishes."""
    if which == "adj":
        tp, fp, fn, tn = c.atp, c.afp, c.afn, c.atn
    elif which == "arrow":
        tp, fp, fn, tn = c.ahtp, c.ahfp, c.ahfn, c.ahtn
    else:
        raise ValueError("which must be 'adj' or 'arrow'")
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)
