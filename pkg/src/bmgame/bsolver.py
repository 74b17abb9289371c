"""Half-integral optimal fractional b-matching and optimal fractional w-cover.

The instance is doubled into a bipartite graph (two copies i', i'' of every
vertex, edges i'j'' and j'i''), a maximum b-matching and minimum w-cover of
the doubled graph are found by min-cost flow, and both are folded back by
averaging the two copies. Every quantity is an exact integer counting halves.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .instance import Instance, Vertex, two_coloring


class CertificateError(RuntimeError):
    """An internal optimality or feasibility check failed (a solver bug)."""


@dataclass(frozen=True)
class HalfMatching:
    """Fractional b-matching stored as ``twice_x[k] = 2 * x_e`` per edge index."""

    instance: Instance
    twice_x: tuple[int, ...]

    def x(self, k: int) -> Fraction:
        return Fraction(self.twice_x[k], 2)

    def twice_weight(self) -> int:
        """2 * w(G, x)."""
        return sum(w * t for (_, _, w), t in zip(self.instance.edges, self.twice_x))

    def weight(self) -> Fraction:
        return Fraction(self.twice_weight(), 2)

    def twice_load(self, v: Vertex) -> int:
        return sum(self.twice_x[k] for k in self.instance.incidence[v])

    def support(self) -> list[int]:
        """Edge indices with non-integral x."""
        return [k for k, t in enumerate(self.twice_x) if t % 2]

    def is_integral(self) -> bool:
        return all(t % 2 == 0 for t in self.twice_x)

    def is_feasible(self) -> bool:
        inst = self.instance
        return all(t >= 0 for t in self.twice_x) and all(
            self.twice_load(v) <= 2 * inst.capacity[v] for v in inst.vertices
        )

    def as_dict(self) -> dict[tuple, Fraction]:
        return {(u, v): self.x(k) for k, (u, v, _) in enumerate(self.instance.edges)}


@dataclass(frozen=True)
class DualCover:
    """Fractional w-cover stored as ``twice_y[i] = 2 * y_v`` in vertex order."""

    instance: Instance
    twice_y: tuple[int, ...]

    def y(self, v: Vertex) -> Fraction:
        return Fraction(self.twice_y[self.instance.index[v]], 2)

    def twice_of(self, v: Vertex) -> int:
        return self.twice_y[self.instance.index[v]]

    def twice_value(self) -> int:
        """2 * b(G, y)."""
        inst = self.instance
        return sum(inst.capacity[v] * t for v, t in zip(inst.vertices, self.twice_y))

    def value(self) -> Fraction:
        return Fraction(self.twice_value(), 2)

    def is_feasible(self) -> bool:
        inst = self.instance
        if any(t < 0 for t in self.twice_y):
            return False
        return all(self.twice_of(u) + self.twice_of(v) >= 2 * w for u, v, w in inst.edges)


@dataclass(frozen=True)
class DoubledGraph:
    """Bipartite doubling of an instance.

    Node ``i`` (0 <= i < n) is the copy i' of vertex ``instance.vertices[i]``
    and node ``n + i`` is i''. Primed nodes form one side, double-primed nodes
    the other. Edge ``2k`` is i'j'' and edge ``2k + 1`` is j'i'' for the
    original edge k = (i, j).
    """

    instance: Instance
    capacity: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]

    @property
    def n_side(self) -> int:
        return self.instance.n

    def origin_vertex(self, node: int) -> Vertex:
        return self.instance.vertices[node % self.n_side]

    def origin_edge(self, e: int) -> int:
        return e // 2

    def label(self, node: int) -> str:
        return f"{self.origin_vertex(node)}{'′' if node < self.n_side else '″'}"


@dataclass(frozen=True)
class BipartiteSolution:
    """Integral b-matching ``x`` per doubled edge and cover ``y`` per doubled node."""

    x: tuple[int, ...]
    y: tuple[int, ...]


def build_doubled(inst: Instance) -> DoubledGraph:
    n = inst.n
    cap = tuple(inst.capacity[v] for v in inst.vertices) * 2
    edges = []
    for u, v, w in inst.edges:
        i, j = inst.index[u], inst.index[v]
        edges.append((i, n + j, w))
        edges.append((j, n + i, w))
    return DoubledGraph(inst, cap, tuple(edges))


# --- bipartite max-weight b-matching via successive shortest paths ----------


class _FlowNet:
    def __init__(self, n_nodes: int):
        self.n = n_nodes
        self.head: list[list[int]] = [[] for _ in range(n_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[int] = []

    def add(self, u: int, v: int, cap: int, cost: int) -> int:
        k = len(self.to)
        self.head[u].append(k)
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.head[v].append(k + 1)
        self.to.append(u)
        self.cap.append(0)
        self.cost.append(-cost)
        return k

    def tail(self, k: int) -> int:
        return self.to[k ^ 1]


def _bellman_ford(net: _FlowNet, sources: list[int]) -> list[int | None]:
    dist: list[int | None] = [None] * net.n
    for s in sources:
        dist[s] = 0
    for _ in range(net.n):
        changed = False
        for k, v in enumerate(net.to):
            if net.cap[k] <= 0:
                continue
            du = dist[net.tail(k)]
            if du is None:
                continue
            nd = du + net.cost[k]
            if dist[v] is None or nd < dist[v]:
                dist[v] = nd
                changed = True
        if not changed:
            return dist
    raise CertificateError("negative cycle in residual network")


def max_weight_bmatching(
    cap_left: list[int],
    cap_right: list[int],
    arcs: list[tuple[int, int, int]],
) -> tuple[list[int], list[int], list[int]]:
    """Maximum weight b-matching of a bipartite graph with its minimum w-cover.

    ``arcs`` holds ``(left, right, weight)``. Returns ``(x, y_left, y_right)``
    with integral x per arc and integral y, certified by equal objectives.
    """
    nl, nr = len(cap_left), len(cap_right)
    s, t = nl + nr, nl + nr + 1
    net = _FlowNet(nl + nr + 2)
    big = sum(cap_left) + sum(cap_right) + 1
    src_arc = [net.add(s, i, cap_left[i], 0) for i in range(nl)]
    mid_arc = [net.add(i, nl + j, big, -w) for i, j, w in arcs]
    snk_arc = [net.add(nl + j, t, cap_right[j], 0) for j in range(nr)]

    # unreachable nodes stay unreachable, so their potential is never read
    pot = [d if d is not None else 0 for d in _bellman_ford(net, [s])]
    while True:
        dist: list[int | None] = [None] * net.n
        pred: list[int] = [-1] * net.n
        dist[s] = 0
        heap = [(0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if d != dist[u]:
                continue
            for k in net.head[u]:
                if net.cap[k] <= 0:
                    continue
                v = net.to[k]
                nd = d + net.cost[k] + pot[u] - pot[v]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    pred[v] = k
                    heapq.heappush(heap, (nd, v))
        if dist[t] is None:
            break
        for v in range(net.n):
            if dist[v] is not None:
                pot[v] += dist[v]
        path_cost = pot[t] - pot[s]
        if path_cost >= 0:
            break
        push = big
        v = t
        while v != s:
            k = pred[v]
            push = min(push, net.cap[k])
            v = net.tail(k)
        v = t
        while v != s:
            k = pred[v]
            net.cap[k] -= push
            net.cap[k ^ 1] += push
            v = net.tail(k)

    x = [net.cap[k ^ 1] for k in mid_arc]

    # Duals: shortest distances in the residual network closed by a free t->s
    # arc, from a virtual root reaching every node at cost 0.
    back = net.add(t, s, big, 0)
    net.cap[back ^ 1] = sum(net.cap[k ^ 1] for k in src_arc)
    d = _bellman_ford(net, list(range(net.n)))
    y_left = [max(0, d[i] - d[s]) for i in range(nl)]
    y_right = [max(0, d[t] - d[nl + j]) for j in range(nr)]

    primal = sum(w * xk for (_, _, w), xk in zip(arcs, x))
    dual = sum(c * y for c, y in zip(cap_left, y_left)) + sum(
        c * y for c, y in zip(cap_right, y_right)
    )
    for (i, j, w), xk in zip(arcs, x):
        if y_left[i] + y_right[j] < w:
            raise CertificateError(f"cover infeasible on arc ({i}, {j})")
    for k in src_arc + snk_arc:
        if net.cap[k] < 0:
            raise CertificateError("capacity exceeded")
    if primal != dual:
        raise CertificateError(f"objectives differ: matching {primal} != cover {dual}")
    return x, y_left, y_right


def solve_bipartite_certified(dg: DoubledGraph) -> BipartiteSolution:
    """Maximum b-matching and minimum w-cover of the doubled graph.

    When the original instance is bipartite the doubled graph splits into two
    isomorphic copies; the original graph is solved once and the solution is
    mirrored onto both copies so that folding yields an integral x.
    """
    inst = dg.instance
    n = inst.n
    coloring = two_coloring(inst)
    if coloring is not None:
        return _solve_mirrored(dg, coloring)
    arcs = [(a, b - n, w) for a, b, w in dg.edges]
    x, yl, yr = max_weight_bmatching(list(dg.capacity[:n]), list(dg.capacity[n:]), arcs)
    sol = BipartiteSolution(tuple(x), tuple(yl + yr))
    _check_doubled(dg, sol)
    return sol


def _solve_mirrored(dg: DoubledGraph, coloring: dict) -> BipartiteSolution:
    inst = dg.instance
    left = [v for v in inst.vertices if coloring[v] == 0]
    right = [v for v in inst.vertices if coloring[v] == 1]
    lpos = {v: k for k, v in enumerate(left)}
    rpos = {v: k for k, v in enumerate(right)}
    arcs = []
    for u, v, w in inst.edges:
        a, b = (u, v) if coloring[u] == 0 else (v, u)
        arcs.append((lpos[a], rpos[b], w))
    x, yl, yr = max_weight_bmatching(
        [inst.capacity[v] for v in left], [inst.capacity[v] for v in right], arcs
    )
    xhat = tuple(xk for xk in x for _ in range(2))
    y_orig = {v: yl[k] for k, v in enumerate(left)} | {v: yr[k] for k, v in enumerate(right)}
    yhat = tuple(y_orig[v] for v in inst.vertices) * 2
    sol = BipartiteSolution(xhat, yhat)
    _check_doubled(dg, sol)
    return sol


def _check_doubled(dg: DoubledGraph, sol: BipartiteSolution) -> None:
    load = [0] * len(dg.capacity)
    for (a, b, w), xe in zip(dg.edges, sol.x):
        if xe < 0:
            raise CertificateError("negative flow on doubled edge")
        load[a] += xe
        load[b] += xe
        if sol.y[a] + sol.y[b] < w:
            raise CertificateError(f"doubled cover infeasible on {dg.label(a)}{dg.label(b)}")
    if any(l > c for l, c in zip(load, dg.capacity)):
        raise CertificateError("doubled capacity exceeded")
    if any(y < 0 for y in sol.y):
        raise CertificateError("negative doubled cover value")
    primal = sum(w * xe for (_, _, w), xe in zip(dg.edges, sol.x))
    dual = sum(c * y for c, y in zip(dg.capacity, sol.y))
    if primal != dual:
        raise CertificateError(f"doubled objectives differ: {primal} != {dual}")


def fold_back(dg: DoubledGraph, sol: BipartiteSolution) -> tuple[HalfMatching, DualCover]:
    inst = dg.instance
    n = inst.n
    twice_x = tuple(sol.x[2 * k] + sol.x[2 * k + 1] for k in range(inst.m))
    twice_y = tuple(sol.y[i] + sol.y[n + i] for i in range(n))
    x = HalfMatching(inst, twice_x)
    y = DualCover(inst, twice_y)
    if not x.is_feasible():
        raise CertificateError("folded matching infeasible")
    if not y.is_feasible():
        raise CertificateError("folded cover infeasible")
    if x.twice_weight() != y.twice_value():
        raise CertificateError(
            f"folded objectives differ: w(G,x)={x.weight()} b(G,y)={y.value()}"
        )
    return x, y


def solve(inst: Instance) -> tuple[HalfMatching, DualCover]:
    """Certified half-integral optimal x and optimal fractional cover y."""
    dg = build_doubled(inst)
    return fold_back(dg, solve_bipartite_certified(dg))


def slackness_violations(x: HalfMatching, y: DualCover) -> list[str]:
    """Term-by-term complementary slackness check in half-units; empty if it holds."""
    inst = x.instance
    bad = []
    for k, (u, v, w) in enumerate(inst.edges):
        if x.twice_x[k] * (y.twice_of(u) + y.twice_of(v) - 2 * w) != 0:
            bad.append(f"edge ({u!r}, {v!r})")
    for v in inst.vertices:
        if y.twice_of(v) * (2 * inst.capacity[v] - x.twice_load(v)) != 0:
            bad.append(f"vertex {v!r}")
    return bad
