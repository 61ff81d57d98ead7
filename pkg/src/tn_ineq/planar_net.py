"""Planar networks for bidiagonal factorizations and path-family sums.

Each factor contributes one column of the network: horizontal edges on every
level (weight ``d_k`` for the diagonal factor, 1 otherwise) plus at most one
slanted edge.  Pass-through vertices are contracted afterwards, so the
network keeps only sources, sinks, and endpoints of slanted edges.

``path_weight_sum`` enumerates vertex-disjoint path families directly and
never touches a determinant, which is what makes it usable as an oracle
against the elimination-based minors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BudgetExceeded, DimensionError
from .tn_matrix import (
    BidiagFactor,
    BidiagFactorization,
    FactorKind,
    Matrix,
    all_index_sets,
    check_factors,
    compose,
)

Vertex = tuple[int, int]  # (level, column)


@dataclass(frozen=True)
class PlanarNetwork:
    n: int
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[Vertex, Vertex, Fraction], ...]
    sources: tuple[Vertex, ...]
    sinks: tuple[Vertex, ...]

    def out_edges(self) -> dict[Vertex, list[tuple[Vertex, Fraction]]]:
        adj: dict[Vertex, list[tuple[Vertex, Fraction]]] = {v: [] for v in self.vertices}
        for a, b, w in self.edges:
            adj[a].append((b, w))
        return adj


def network_from_factors(n: int, factors: Sequence[BidiagFactor]) -> PlanarNetwork:
    """Network for an arbitrary product of factors, read left to right."""
    check_factors(n, factors)
    edges: list[tuple[Vertex, Vertex, Fraction]] = []
    for c, f in enumerate(factors, start=1):
        for lvl in range(1, n + 1):
            w = f.d[lvl - 1] if f.kind is FactorKind.DIAG else Fraction(1)
            edges.append(((lvl, c - 1), (lvl, c), w))
        e = f.edge()
        if e is not None and f.w != 0:
            edges.append(((e[0], c - 1), (e[1], c), f.w))
    last = len(factors)
    sources = tuple((lvl, 0) for lvl in range(1, n + 1))
    sinks = tuple((lvl, last) for lvl in range(1, n + 1))
    return _contract(n, edges, sources, sinks)


def build_network(f: BidiagFactorization) -> PlanarNetwork:
    return network_from_factors(f.n, f.factors)


def concatenate(a: PlanarNetwork, b: PlanarNetwork) -> PlanarNetwork:
    """Glue the sinks of ``a`` to the sources of ``b``."""
    if a.n != b.n:
        raise DimensionError("networks differ in size")
    shift = max(c for _, c in a.vertices)
    ren = {s: t for s, t in zip(b.sources, a.sinks)}

    def move(v: Vertex) -> Vertex:
        return ren.get(v, (v[0], v[1] + shift))

    edges = list(a.edges) + [(move(x), move(y), w) for x, y, w in b.edges]
    return _contract(a.n, edges, a.sources, tuple(move(s) for s in b.sinks))


def _contract(n, edges, sources, sinks) -> PlanarNetwork:
    """Merge series edges through vertices with one way in and one way out."""
    keep = set(sources) | set(sinks)
    edges = list(edges)
    while True:
        indeg: dict[Vertex, list[int]] = {}
        outdeg: dict[Vertex, list[int]] = {}
        for i, (a, b, _) in enumerate(edges):
            outdeg.setdefault(a, []).append(i)
            indeg.setdefault(b, []).append(i)
        mid = next(
            (
                v
                for v in indeg
                if v not in keep and len(indeg[v]) == 1 and len(outdeg.get(v, ())) == 1
            ),
            None,
        )
        if mid is None:
            break
        i, j = indeg[mid][0], outdeg[mid][0]
        a, _, w1 = edges[i]
        _, c, w2 = edges[j]
        edges = [e for k, e in enumerate(edges) if k not in (i, j)]
        edges.append((a, c, w1 * w2))
    verts = set(keep)
    for a, b, _ in edges:
        verts.add(a)
        verts.add(b)
    order = sorted(verts, key=lambda v: (v[1], v[0]))
    edges.sort(key=lambda e: (e[0][1], e[0][0], e[1][1], e[1][0]))
    return PlanarNetwork(n, tuple(order), tuple(edges), tuple(sources), tuple(sinks))


def path_weight_sum(
    net: PlanarNetwork,
    rows: Sequence[int],
    cols: Sequence[int],
    max_vertices: int = 2000,
) -> Fraction:
    """Sum over vertex-disjoint path families from sources ``rows`` to sinks ``cols``.

    Path k runs from the k-th chosen source to the k-th chosen sink.  The
    sweep always advances the path sitting earliest in topological order; a
    vertex ahead of that point cannot have been used by any other path, so
    the tuple of current positions is a complete memo key.
    """
    if len(net.vertices) > max_vertices:
        raise BudgetExceeded(f"network has {len(net.vertices)} vertices, budget {max_vertices}")
    rows, cols = tuple(rows), tuple(cols)
    if len(rows) != len(cols):
        raise DimensionError("need as many sources as sinks")
    if not rows:
        return Fraction(1)
    adj = net.out_edges()
    topo = {v: i for i, v in enumerate(net.vertices)}
    targets = tuple(net.sinks[j - 1] for j in cols)
    sink_set = set(net.sinks)
    done_rank = len(net.vertices)
    memo: dict[tuple[Vertex, ...], Fraction] = {}

    def rank(state, k):
        v = state[k]
        return done_rank if v in sink_set else topo[v]

    def go(state: tuple[Vertex, ...]) -> Fraction:
        if state in memo:
            return memo[state]
        k = min(range(len(state)), key=lambda i: rank(state, i))
        if rank(state, k) == done_rank:
            res = Fraction(1) if state == targets else Fraction(0)
        else:
            res = Fraction(0)
            occupied = set(state)
            for nxt, w in adj[state[k]]:
                if nxt in occupied:
                    continue
                if nxt in sink_set and nxt != targets[k]:
                    continue
                res += w * go(state[:k] + (nxt,) + state[k + 1:])
        memo[state] = res
        return res

    return go(tuple(net.sources[i - 1] for i in rows))


def lindstrom_check(f: BidiagFactorization) -> bool:
    """Every minor of the product equals its path-family sum (n <= 5)."""
    if f.n > 5:
        raise DimensionError("exhaustive path check is limited to n <= 5")
    a = compose(f)
    net = build_network(f)
    for s in range(1, f.n + 1):
        sets = all_index_sets(f.n, s)
        for r, c in itertools.product(sets, sets):
            if path_weight_sum(net, r, c) != a.minor(r, c):
                return False
    return True


def path_matrix(net: PlanarNetwork) -> Matrix:
    n = net.n
    return Matrix([[path_weight_sum(net, (i,), (j,)) for j in range(1, n + 1)] for i in range(1, n + 1)])


def to_dot(net: PlanarNetwork) -> str:
    """Graphviz rendering; vertex ids are ``L{level}C{column}``."""

    def vid(v: Vertex) -> str:
        return f"L{v[0]}C{v[1]}"

    lines = ["digraph network {", "  rankdir=LR;"]
    for v in net.vertices:
        lines.append(f'  {vid(v)} [pos="{v[1]},{-v[0]}!"];')
    for a, b, w in net.edges:
        w = Fraction(w)
        lines.append(f'  {vid(a)} -> {vid(b)} [weight="{w.numerator}/{w.denominator}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
