"""Odd-cycle rounding and the approximate core allocation built from the dual cover."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .bsolver import CertificateError, DualCover, HalfMatching, solve
from .canonical import OddCycleSet, Trail, apply_trail_ops, canonicalize
from .instance import Instance, Vertex


@dataclass(frozen=True)
class AllocationReport:
    instance: Instance
    allocation: dict[Vertex, Fraction]
    alpha: Fraction
    rounded_matching: HalfMatching
    x: HalfMatching
    y: DualCover
    cycles: OddCycleSet
    rounding_loss: Fraction

    @property
    def lp_value(self) -> Fraction:
        return self.x.weight()

    @property
    def dual_value(self) -> Fraction:
        return self.y.value()

    @property
    def rounded_value(self) -> int:
        return self.rounded_matching.twice_weight() // 2

    @property
    def total(self) -> Fraction:
        return sum(self.allocation.values(), Fraction(0))

    @property
    def min_vertex_ratio(self) -> Fraction:
        """Smallest a_i / (b_i y_i) over vertices with y_i > 0 (1 if none)."""
        inst = self.instance
        ratios = [
            self.allocation[v] / (inst.capacity[v] * self.y.y(v))
            for v in inst.vertices
            if self.y.twice_of(v) > 0
        ]
        return min(ratios, default=Fraction(1))


def guarantee_bound(cycles: OddCycleSet) -> Fraction:
    if not len(cycles):
        return Fraction(1)
    return 1 - Fraction(1, cycles.min_length * cycles.min_capacity)


def round_odd_cycles(
    x: HalfMatching, y: DualCover, cycles: OddCycleSet
) -> tuple[HalfMatching, Fraction]:
    """Round every odd cycle from a vertex of least dual value.

    Returns the integral b-matching and the total loss, the sum over cycles of
    the least dual value on the cycle.
    """
    twice_loss = 0
    for c in cycles:
        body = list(c.vertices[:-1])
        edges = list(c.edges)
        twice_ymin = min(y.twice_of(v) for v in body)
        order = x.instance.index
        start = min((v for v in body if y.twice_of(v) == twice_ymin), key=order.__getitem__)
        p = body.index(start)
        trail = Trail(tuple(body[p:] + body[: p + 1]), tuple(edges[p:] + edges[:p]))
        x_before = x.twice_weight()
        x = apply_trail_ops(x, trail)
        if x.twice_weight() != x_before - twice_ymin:
            raise CertificateError(f"rounding loss on cycle {c.vertices!r} is not y_C")
        twice_loss += twice_ymin
    if not x.is_integral() or not x.is_feasible():
        raise CertificateError("rounded matching is not an integral b-matching")
    return x, Fraction(twice_loss, 2)


def allocate(
    inst: Instance, x: HalfMatching, y: DualCover, cycles: OddCycleSet
) -> AllocationReport:
    """Pay b_i y_i, minus y_i / l_C for a vertex on odd cycle C."""
    x_rounded, loss = round_odd_cycles(x, y, cycles)
    on_cycle = cycles.cycle_of()
    allocation = {}
    for v in inst.vertices:
        share = inst.capacity[v] * y.y(v)
        if v in on_cycle:
            share -= y.y(v) / on_cycle[v].length
        allocation[v] = share
    alpha = guarantee_bound(cycles)
    report = AllocationReport(inst, allocation, alpha, x_rounded, x, y, cycles, loss)
    _check_report(report)
    return report


def _check_report(r: AllocationReport) -> None:
    inst = r.instance
    if any(a < 0 for a in r.allocation.values()):
        raise CertificateError("negative allocation")
    if r.rounded_value != r.lp_value - r.rounding_loss:
        raise CertificateError("w(G, x') != w(G, x) - rounding loss")
    if r.total > r.rounded_value:
        raise CertificateError(f"allocation total {r.total} exceeds w(G, x') = {r.rounded_value}")
    for v in inst.vertices:
        if r.allocation[v] < r.alpha * inst.capacity[v] * r.y.y(v):
            raise CertificateError(f"vertex {v!r} paid below alpha * b * y")


def run_mechanism(inst: Instance) -> AllocationReport:
    """Solve, canonicalize, round and allocate."""
    x, y = solve(inst)
    x, cycles = canonicalize(x, y)
    return allocate(inst, x, y, cycles)


# --- serialization ---------------------------------------------------------


def fmt(q: Fraction | int) -> str:
    return str(Fraction(q))


def report_to_dict(r: AllocationReport) -> dict:
    inst = r.instance
    return {
        "instance": inst.name,
        "alpha": fmt(r.alpha),
        "lp_value": fmt(r.lp_value),
        "dual_value": fmt(r.dual_value),
        "rounded_value": fmt(r.rounded_value),
        "rounding_loss": fmt(r.rounding_loss),
        "allocation_total": fmt(r.total),
        "min_vertex_ratio": fmt(r.min_vertex_ratio),
        "weight_scale": inst.weight_scale,
        "allocation": {str(v): fmt(r.allocation[v]) for v in inst.vertices},
        "y": {str(v): fmt(r.y.y(v)) for v in inst.vertices},
        "x": [
            {"u": u, "v": v, "x": fmt(r.x.x(k))} for k, (u, v, _) in enumerate(inst.edges)
        ],
        "rounded_matching": [
            {"u": u, "v": v, "x": r.rounded_matching.twice_x[k] // 2}
            for k, (u, v, _) in enumerate(inst.edges)
            if r.rounded_matching.twice_x[k]
        ],
        "cycles": [
            {
                "vertices": list(c.vertices[:-1]),
                "length": c.length,
                "b_min": c.b_min,
                "y_min": fmt(c.y_min),
                "start": c.argmin,
            }
            for c in r.cycles
        ],
    }


def dump_report(r: AllocationReport) -> str:
    return json.dumps(report_to_dict(r), indent=2) + "\n"


def parse_allocation(doc: dict, inst: Instance) -> tuple[dict[Vertex, Fraction], Fraction]:
    """Read back ``allocation`` and ``alpha`` from a report document."""
    by_name = {str(v): v for v in inst.vertices}
    raw = doc.get("allocation")
    if not isinstance(raw, dict):
        raise ValueError("report field 'allocation' must be an object")
    alloc = {}
    for key, val in raw.items():
        if key not in by_name:
            raise ValueError(f"allocation names unknown vertex {key!r}")
        alloc[by_name[key]] = Fraction(str(val))
    missing = [str(v) for v in inst.vertices if v not in alloc]
    if missing:
        raise ValueError(f"allocation missing vertices {missing}")
    return alloc, Fraction(str(doc.get("alpha", "1")))
