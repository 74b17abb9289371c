"""Instances of the b-matching game: graph model, validation, JSON I/O and generators."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

Vertex = Hashable


class InstanceError(ValueError):
    """Raised for malformed or invalid instance documents."""


@dataclass(frozen=True)
class Instance:
    """Undirected graph with integral vertex capacities and edge weights.

    Edges are stored as ``(u, v, w)`` in input order; ``u`` precedes ``v`` in
    the vertex order. Vertex order is the order of ``vertices`` and is used
    for every tie-break downstream.
    """

    vertices: tuple
    capacity: Mapping[Vertex, int]
    edges: tuple[tuple[Vertex, Vertex, int], ...]
    name: str | None = None
    weight_scale: int = 1

    def __post_init__(self):
        _validate(self)

    @cached_property
    def index(self) -> dict:
        return {v: k for k, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[frozenset, int]:
        return {frozenset((u, v)): k for k, (u, v, _) in enumerate(self.edges)}

    @cached_property
    def incidence(self) -> dict[Vertex, tuple[int, ...]]:
        inc: dict[Vertex, list[int]] = {v: [] for v in self.vertices}
        for k, (u, v, _) in enumerate(self.edges):
            inc[u].append(k)
            inc[v].append(k)
        return {v: tuple(ks) for v, ks in inc.items()}

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, k: int) -> int:
        return self.edges[k][2]

    def other(self, k: int, v: Vertex) -> Vertex:
        a, b, _ = self.edges[k]
        return b if a == v else a

    def find_edge(self, u: Vertex, v: Vertex) -> int | None:
        return self.edge_index.get(frozenset((u, v)))

    def is_bipartite(self) -> bool:
        return two_coloring(self) is not None


@dataclass(frozen=True)
class Coalition:
    """A set of players; ``members`` must be vertices of ``instance``."""

    instance: Instance
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        missing = [v for v in self.members if v not in self.instance.index]
        if missing:
            raise InstanceError(f"coalition members not in instance: {missing!r}")

    @classmethod
    def grand(cls, instance: Instance) -> "Coalition":
        return cls(instance, frozenset(instance.vertices))

    def induced_edges(self) -> list[int]:
        return [
            k
            for k, (u, v, _) in enumerate(self.instance.edges)
            if u in self.members and v in self.members
        ]


def _validate(inst: Instance) -> None:
    seen: dict[str, Vertex] = {}
    for v in inst.vertices:
        key = str(v)
        if key in seen:
            raise InstanceError(f"duplicate vertex id {v!r}")
        seen[key] = v
        b = inst.capacity.get(v)
        if not isinstance(b, int) or isinstance(b, bool):
            raise InstanceError(f"vertex {v!r}: capacity must be an integer, got {b!r}")
        if b < 1:
            raise InstanceError(f"vertex {v!r}: capacity b={b} must be >= 1")
    pairs = set()
    for u, v, w in inst.edges:
        if u == v:
            raise InstanceError(f"edge ({u!r}, {v!r}): self-loop")
        for end in (u, v):
            if end not in inst.capacity:
                raise InstanceError(f"edge ({u!r}, {v!r}): unknown endpoint {end!r}")
        if not isinstance(w, int) or isinstance(w, bool):
            raise InstanceError(f"edge ({u!r}, {v!r}): weight must be an integer, got {w!r}")
        if w < 0:
            raise InstanceError(f"edge ({u!r}, {v!r}): negative weight {w}")
        pair = frozenset((u, v))
        if pair in pairs:
            raise InstanceError(f"edge ({u!r}, {v!r}): parallel edge")
        pairs.add(pair)


def make_instance(
    capacity: Mapping[Vertex, int] | Sequence[tuple[Vertex, int]],
    edges: Iterable[tuple[Vertex, Vertex, int]],
    name: str | None = None,
    weight_scale: int = 1,
) -> Instance:
    """Build an Instance, orienting each edge along the vertex order."""
    items = list(capacity.items()) if isinstance(capacity, Mapping) else list(capacity)
    vertices = tuple(v for v, _ in items)
    cap = dict(items)
    if len(cap) != len(vertices):
        raise InstanceError("duplicate vertex id")
    order = {v: k for k, v in enumerate(vertices)}
    oriented = []
    for u, v, w in edges:
        if u in order and v in order and order[v] < order[u]:
            u, v = v, u
        oriented.append((u, v, w))
    return Instance(vertices, cap, tuple(oriented), name, weight_scale)


# --- serialization ---------------------------------------------------------


def _parse_weight(raw, where: str) -> Fraction:
    if isinstance(raw, bool):
        raise InstanceError(f"{where}: weight must be a number, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            pass
    raise InstanceError(f"{where}: weight must be an integer or 'p/q' string, got {raw!r}")


def instance_from_dict(doc: Mapping) -> Instance:
    """Validate a decoded instance document.

    Weights may be integers or exact rationals written ``"p/q"``; rational
    weights are scaled by the lcm of their denominators and the factor is kept
    in ``weight_scale``.
    """
    if not isinstance(doc, Mapping):
        raise InstanceError("instance document must be an object")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise InstanceError("field 'name' must be a string")
    raw_vertices = doc.get("vertices")
    if not isinstance(raw_vertices, list):
        raise InstanceError("field 'vertices' must be an array")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        raise InstanceError("field 'edges' must be an array")

    capacity = []
    for k, rv in enumerate(raw_vertices):
        if not isinstance(rv, Mapping) or "id" not in rv or "b" not in rv:
            raise InstanceError(f"vertices[{k}]: expected object with 'id' and 'b'")
        vid = rv["id"]
        if isinstance(vid, bool) or not isinstance(vid, (int, str)):
            raise InstanceError(f"vertices[{k}]: id must be a string or integer")
        capacity.append((vid, rv["b"]))

    weights = []
    for k, re in enumerate(raw_edges):
        if not isinstance(re, Mapping) or not {"u", "v", "w"} <= set(re):
            raise InstanceError(f"edges[{k}]: expected object with 'u', 'v', 'w'")
        weights.append((re["u"], re["v"], _parse_weight(re["w"], f"edges[{k}]")))

    scale = math.lcm(1, *(w.denominator for _, _, w in weights))
    edges = [(u, v, int(w * scale)) for u, v, w in weights]
    return make_instance(capacity, edges, name=name, weight_scale=scale)


def load_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"parse error: {exc}") from exc
    return instance_from_dict(doc)


def instance_to_dict(inst: Instance) -> dict:
    scale = inst.weight_scale

    def weight(w: int):
        if scale == 1:
            return w
        q = Fraction(w, scale)
        return q.numerator if q.denominator == 1 else str(q)

    doc: dict = {}
    if inst.name is not None:
        doc["name"] = inst.name
    doc["vertices"] = [{"id": v, "b": inst.capacity[v]} for v in inst.vertices]
    doc["edges"] = [{"u": u, "v": v, "w": weight(w)} for u, v, w in inst.edges]
    return doc


def save_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


# --- graph helpers ----------------------------------------------------------


def two_coloring(inst: Instance) -> dict | None:
    """Side assignment (0/1) per vertex, or None if the graph has an odd cycle."""
    color: dict = {}
    for root in inst.vertices:
        if root in color:
            continue
        color[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for k in inst.incidence[u]:
                v = inst.other(k, u)
                if v not in color:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return None
    return color


# --- generators -------------------------------------------------------------


def gen_tight_family(n: int, l: int, b: int, epsilon_links: bool = False) -> Instance:
    """2n disjoint l-cycles with capacity b and unit weights.

    With ``epsilon_links`` one vertex per cycle is picked and all picked
    vertices are joined pairwise by weight-0 edges.
    """
    if n < 1:
        raise InstanceError("n must be >= 1")
    if l < 3 or l % 2 == 0:
        raise InstanceError("l must be odd and >= 3")
    if b < 1 or b % 2 == 0:
        raise InstanceError("b must be odd and >= 1")
    capacity = []
    edges = []
    for c in range(2 * n):
        ids = [c * l + k for k in range(l)]
        capacity.extend((v, b) for v in ids)
        edges.extend((ids[k], ids[(k + 1) % l], 1) for k in range(l))
    if epsilon_links:
        hubs = [c * l for c in range(2 * n)]
        edges.extend((hubs[i], hubs[j], 0) for i in range(len(hubs)) for j in range(i + 1, len(hubs)))
    name = f"tight-n{n}-l{l}-b{b}" + ("-linked" if epsilon_links else "")
    return make_instance(capacity, edges, name=name)


def gen_random(
    n_vertices: int,
    edge_prob: Fraction | float | str,
    max_b: int,
    max_w: int,
    seed: int,
    bipartite: bool = False,
) -> Instance:
    """Seeded G(n, p) instance with uniform capacities and weights.

    Weights are uniform in [1, max_w], or all 0 when ``max_w`` is 0. With
    ``bipartite`` the first ceil(n/2) vertices form one side and only cross
    pairs are candidate edges.
    """
    if n_vertices < 1:
        raise InstanceError("n_vertices must be >= 1")
    if max_b < 1:
        raise InstanceError("max_b must be >= 1")
    if max_w < 0:
        raise InstanceError("max_w must be >= 0")
    p = Fraction(edge_prob)
    if not 0 <= p <= 1:
        raise InstanceError("edge_prob must lie in [0, 1]")

    rng = random.Random(seed)
    vertices = list(range(n_vertices))
    capacity = [(v, rng.randint(1, max_b)) for v in vertices]
    half = (n_vertices + 1) // 2
    edges = []
    for i in vertices:
        for j in range(i + 1, n_vertices):
            if bipartite and (i < half) == (j < half):
                continue
            # exact Bernoulli(p) draw: integer in [0, den) below num
            if rng.randrange(p.denominator) < p.numerator:
                edges.append((i, j, rng.randint(min(1, max_w), max_w)))
    name = f"random-n{n_vertices}-p{p}-b{max_b}-w{max_w}-s{seed}" + ("-bip" if bipartite else "")
    return make_instance(capacity, edges, name=name)


def random_suite(count: int, seed: int = 0, bipartite: bool = False, max_n: int = 10) -> list[Instance]:
    """Seeded corpus: n in [2, max_n], density in {1/5, ..., 1}, b <= 3, w <= 20."""
    rng = random.Random(seed)
    densities = [Fraction(k, 5) for k in range(1, 6)]
    out = []
    for k in range(count):
        n = rng.randint(2, max_n)
        p = rng.choice(densities)
        out.append(gen_random(n, p, 3, 20, seed * 100_003 + k, bipartite))
    return out
