"""Exhaustive ground truth: gamma(S) by branch and bound, core audits, integrality gap.

Nothing here calls the LP pipeline except ``integrality_gap``, which needs the
LP value by definition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .bsolver import CertificateError, solve
from .instance import Coalition, Instance, Vertex

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """The exhaustive search would explore more nodes than allowed."""


@dataclass
class _Counter:
    budget: int
    used: int = 0

    def tick(self) -> None:
        self.used += 1
        if self.used > self.budget:
            raise BudgetExceeded(f"oracle budget of {self.budget} search nodes exceeded")


@dataclass(frozen=True)
class GameValue:
    coalition: Coalition
    gamma: int
    witness: dict[int, int]  # edge index -> multiplicity, zero entries omitted


@dataclass
class CoreAudit:
    alpha_claimed: Fraction
    total: Fraction
    gamma_grand: int
    budget_ok: bool
    violations: list[tuple[frozenset, int, Fraction]] = field(default_factory=list)
    tight_coalitions: list[frozenset] = field(default_factory=list)
    checked: int = 0
    connected_only: bool = False

    @property
    def budget_tight(self) -> bool:
        return self.total == self.gamma_grand

    @property
    def in_core(self) -> bool:
        return self.budget_ok and not self.violations


def _component_optimum(
    caps: list[int], edges: list[tuple[int, int, int, int]], counter: _Counter
) -> tuple[int, dict[int, int]]:
    """Max-weight integral b-matching of one connected edge set.

    ``edges`` holds ``(a, b, w, key)`` with local vertex ids. Edges are branched
    in order of decreasing weight, largest multiplicity first; a branch is cut
    when twice its value plus sum_v rem_v * maxw_v cannot beat twice the best,
    maxw_v being the heaviest undecided edge at v (half of which is a feasible
    fractional cover of the undecided edges).
    """
    edges = sorted(edges, key=lambda e: -e[2])
    m = len(edges)
    n = len(caps)
    # heaviest undecided edge at each vertex, for every depth
    maxw = [[0] * n for _ in range(m + 1)]
    for k in range(m - 1, -1, -1):
        row = maxw[k]
        row[:] = maxw[k + 1]
        a, b, w, _ = edges[k]
        row[a] = max(row[a], w)
        row[b] = max(row[b], w)

    rem = list(caps)
    choice = [0] * m
    best = [-1, None]

    def dfs(k: int, value: int) -> None:
        counter.tick()
        if k == m:
            if value > best[0]:
                best[0] = value
                best[1] = list(choice)
            return
        row = maxw[k]
        bound = 2 * value + sum(r * mw for r, mw in zip(rem, row))
        if bound <= 2 * best[0]:
            return
        a, b, w, _ = edges[k]
        for t in range(min(rem[a], rem[b]), -1, -1):
            choice[k] = t
            rem[a] -= t
            rem[b] -= t
            dfs(k + 1, value + w * t)
            rem[a] += t
            rem[b] += t
        choice[k] = 0

    dfs(0, 0)
    witness = {edges[k][3]: t for k, t in enumerate(best[1]) if t}
    return best[0], witness


def _components(n: int, edges: list[tuple[int, int, int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b, _, _ in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for k, e in enumerate(edges):
        groups.setdefault(find(e[0]), []).append(k)
    return [groups[r] for r in sorted(groups)]


def _gamma_of_mask(
    inst: Instance, mask: int, counter: _Counter, cache: dict | None = None
) -> tuple[int, dict[int, int]]:
    """gamma of the coalition given as a bitmask over vertex positions."""
    index = inst.index
    # weight-0 edges never add value and are dropped
    local = [
        (index[u], index[v], w, k)
        for k, (u, v, w) in enumerate(inst.edges)
        if w > 0 and mask >> index[u] & 1 and mask >> index[v] & 1
    ]
    total, witness = 0, {}
    for comp in _components(inst.n, local):
        comp_edges = [local[k] for k in comp]
        key = frozenset(e[3] for e in comp_edges)
        if cache is not None and key in cache:
            g, wit = cache[key]
        else:
            verts = sorted({e[0] for e in comp_edges} | {e[1] for e in comp_edges})
            pos = {v: p for p, v in enumerate(verts)}
            caps = [inst.capacity[inst.vertices[v]] for v in verts]
            g, wit = _component_optimum(
                caps, [(pos[a], pos[b], w, k) for a, b, w, k in comp_edges], counter
            )
            if cache is not None:
                cache[key] = (g, wit)
        total += g
        witness.update(wit)
    return total, witness


def _mask(inst: Instance, members) -> int:
    return sum(1 << inst.index[v] for v in members)


def gamma_exact(inst: Instance, S: Coalition | None = None, budget: int = DEFAULT_BUDGET) -> GameValue:
    """Weight of a maximum b-matching of G[S] by exhaustive search."""
    S = Coalition.grand(inst) if S is None else S
    g, witness = _gamma_of_mask(inst, _mask(inst, S.members), _Counter(budget))
    return GameValue(S, g, dict(sorted(witness.items())))


def connected_masks(inst: Instance) -> list[int]:
    """Bitmasks of coalitions that are connected through positive-weight edges."""
    index = inst.index
    adj = [0] * inst.n
    start = []
    for u, v, w in inst.edges:
        if w > 0:
            i, j = index[u], index[v]
            adj[i] |= 1 << j
            adj[j] |= 1 << i
            start.append((1 << i) | (1 << j))
    seen: set[int] = set()
    stack = start
    while stack:
        mask = stack.pop()
        if mask in seen:
            continue
        seen.add(mask)
        frontier = 0
        rest = mask
        while rest:
            low = rest & -rest
            frontier |= adj[low.bit_length() - 1]
            rest ^= low
        frontier &= ~mask
        while frontier:
            low = frontier & -frontier
            stack.append(mask | low)
            frontier ^= low
    return sorted(seen)


def coalition_values(
    inst: Instance, budget: int = DEFAULT_BUDGET, connected_only: bool = False
) -> dict[int, int]:
    """gamma per coalition bitmask.

    By default every coalition whose induced subgraph has an edge is listed.
    With ``connected_only`` only coalitions connected by positive-weight edges
    are listed, plus the grand coalition. Both gamma and any allocation total
    add up over the components of G[S], so a coalition constraint fails for
    some S exactly when it fails for some connected S.

    The budget applies to the whole table; component results are shared
    between coalitions.
    """
    counter = _Counter(budget)
    cache: dict = {}
    full = (1 << inst.n) - 1
    if connected_only:
        masks = connected_masks(inst)
        if inst.m and full not in masks:
            masks.append(full)
    else:
        index = inst.index
        edge_masks = [(1 << index[u]) | (1 << index[v]) for u, v, _ in inst.edges]
        masks = [m for m in range(1, full + 1) if any(em & m == em for em in edge_masks)]
    return {mask: _gamma_of_mask(inst, mask, counter, cache)[0] for mask in masks}


def audit_core(
    inst: Instance,
    allocation: Mapping[Vertex, Fraction],
    alpha: Fraction,
    gammas: Mapping[int, int] | None = None,
    budget: int = DEFAULT_BUDGET,
    connected_only: bool = False,
) -> CoreAudit:
    """Check sum_N a <= gamma(N) and sum_S a >= alpha * gamma(S) for every S.

    Coalitions without an internal edge are skipped (gamma = 0, a >= 0).
    ``connected_only`` restricts the listed coalitions as in
    ``coalition_values``; the verdict is unchanged.
    Violations and tight coalitions are listed in bitmask order.
    """
    if gammas is None:
        gammas = coalition_values(inst, budget, connected_only)
    alpha = Fraction(alpha)
    a = [Fraction(allocation[v]) for v in inst.vertices]
    full = (1 << inst.n) - 1
    total = sum(a, Fraction(0))
    gamma_n = gammas.get(full, 0)
    audit = CoreAudit(alpha, total, gamma_n, total <= gamma_n, connected_only=connected_only)
    for mask in sorted(gammas):
        g = gammas[mask]
        paid = sum((a[i] for i in range(inst.n) if mask >> i & 1), Fraction(0))
        members = frozenset(inst.vertices[i] for i in range(inst.n) if mask >> i & 1)
        target = alpha * g
        audit.checked += 1
        if paid < target:
            audit.violations.append((members, g, paid))
        elif paid == target:
            audit.tight_coalitions.append(members)
    return audit


def audit_report(inst: Instance, report, alpha: Fraction | None = None, **kw) -> CoreAudit:
    return audit_core(inst, report.allocation, report.alpha if alpha is None else alpha, **kw)


def audit_to_dict(inst: Instance, audit: CoreAudit) -> dict:
    order = inst.index

    def members(S):
        return sorted(S, key=order.__getitem__)

    return {
        "alpha": str(audit.alpha_claimed),
        "allocation_total": str(audit.total),
        "gamma_grand": audit.gamma_grand,
        "budget_ok": audit.budget_ok,
        "budget_tight": audit.budget_tight,
        "in_core": audit.in_core,
        "coalitions_checked": audit.checked,
        "connected_only": audit.connected_only,
        "violations": [
            {"coalition": members(S), "gamma": g, "paid": str(p)} for S, g, p in audit.violations
        ],
        "tight_coalitions": [members(S) for S in audit.tight_coalitions],
    }


def dump_audit(inst: Instance, audit: CoreAudit) -> str:
    return json.dumps(audit_to_dict(inst, audit), indent=2) + "\n"


@dataclass(frozen=True)
class GapResult:
    ratio: Fraction
    lp_value: Fraction
    ip_value: int


def integrality_gap(inst: Instance, budget: int = DEFAULT_BUDGET) -> GapResult:
    """gamma(N) / w(G, x); 1 when the LP value is 0."""
    x, _ = solve(inst)
    lp = x.weight()
    ip = gamma_exact(inst, budget=budget).gamma
    ratio = Fraction(1) if lp == 0 else ip / lp
    if ratio < Fraction(2, 3) or ratio > 1:
        raise CertificateError(f"integrality ratio {ratio} outside [2/3, 1]")
    return GapResult(ratio, lp, ip)
