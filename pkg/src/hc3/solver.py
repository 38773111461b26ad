"""Exact maximum-density packing on a quotient.

The optimum packing is the maximum independent set (MIS) of the exclusion
graph.  The search is a bitmask branch-and-bound: candidates are Python-int
bitmasks (arbitrary width), the upper bound is a greedy clique cover of the
candidate subgraph, and branching follows the highest-degree rule for the
optimum phase and lexicographic include-first order for the witness/count
phase, which makes the reported witness the lexicographically least optimal
set under the fixed coset order.

Determinism contract: optimum, witness and count are identical no matter how
many worker threads run the root subtrees.  The search never returns an
unproven optimum: exceeding the node budget raises instead.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt
from threading import Lock

from .admissibility import (
    Configuration,
    ExclusionGraph,
    PeriodTooShortError,
    build_exclusion_graph,
)
from .lattice import Quotient, add

__all__ = [
    "PackingResult",
    "BudgetExhaustedError",
    "max_packing",
    "count_optima",
    "clique_cover_bound",
]


class BudgetExhaustedError(RuntimeError):
    """The node budget ran out before the search proved its result."""


@dataclass(frozen=True)
class PackingResult:
    optimum: int
    witness: Configuration
    count: int | None
    nodes: int
    wall_time: float


class _Counter:
    """Shared node counter with a hard budget."""

    __slots__ = ("nodes", "budget", "lock")

    def __init__(self, budget: int | None):
        self.nodes = 0
        self.budget = budget
        self.lock = Lock()

    def spend(self, n: int = 1) -> None:
        with self.lock:
            self.nodes += n
            if self.budget is not None and self.nodes > self.budget:
                raise BudgetExhaustedError(
                    f"node budget {self.budget} exhausted"
                )


class _Best:
    """Monotone shared best-so-far (max); safe under any thread schedule."""

    __slots__ = ("value", "lock")

    def __init__(self, value: int = 0):
        self.value = value
        self.lock = Lock()

    def update(self, value: int) -> None:
        with self.lock:
            if value > self.value:
                self.value = value


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _greedy_clique_cover(cand: int, adj: tuple[int, ...]) -> int:
    """Number of cliques in a greedy cover of the candidate subgraph.

    An independent set picks at most one vertex per clique, so this is an
    upper bound on the MIS size of the candidates.
    """
    cliques: list[int] = []  # common neighborhood masks
    m = cand
    n_cliques = 0
    while m:
        v = _lowest_bit(m)
        m &= m - 1
        for i, common in enumerate(cliques):
            if common >> v & 1:
                cliques[i] = common & adj[v]
                break
        else:
            cliques.append(adj[v] & cand)
            n_cliques += 1
    return n_cliques


def _take_isolated(cand: int, adj: tuple[int, ...]) -> tuple[int, int, int]:
    """Move candidates with no remaining conflicts into the chosen set.

    Such vertices belong to every maximal (hence every maximum) extension.
    Returns (remaining candidates, number taken, mask taken).
    """
    taken = 0
    taken_mask = 0
    m = cand
    while m:
        v = _lowest_bit(m)
        m &= m - 1
        if not (adj[v] & cand):
            taken += 1
            taken_mask |= 1 << v
    return cand & ~taken_mask, taken, taken_mask


def _search_optimum(
    adj: tuple[int, ...],
    cand: int,
    size: int,
    best: _Best,
    counter: _Counter,
) -> None:
    counter.spend()
    cand, taken, _ = _take_isolated(cand, adj)
    size += taken
    if not cand:
        best.update(size)
        return
    if size + _greedy_clique_cover(cand, adj) <= best.value:
        return
    # branch on the highest-degree candidate (ties to the lowest index)
    v, v_deg = -1, -1
    m = cand
    while m:
        u = _lowest_bit(m)
        m &= m - 1
        d = (adj[u] & cand).bit_count()
        if d > v_deg:
            v, v_deg = u, d
    _search_optimum(adj, cand & ~adj[v] & ~(1 << v), size + 1, best, counter)
    _search_optimum(adj, cand & ~(1 << v), size, best, counter)


def _split_tasks(
    adj: tuple[int, ...], cand: int, size: int, depth: int
) -> list[tuple[int, int]]:
    """Expand the first `depth` branching levels into independent subtrees."""
    if depth == 0 or not cand:
        return [(cand, size)]
    v = _lowest_bit(cand)
    out = _split_tasks(adj, cand & ~adj[v] & ~(1 << v), size + 1, depth - 1)
    out += _split_tasks(adj, cand & ~(1 << v), size, depth - 1)
    return out


@dataclass
class _EnumState:
    count: int = 0
    witness: tuple[int, ...] | None = None
    solutions: list[int] | None = None  # chosen masks, when orbits are needed
    stop_at_first: bool = False
    found: bool = False


def _search_enumerate(
    adj: tuple[int, ...],
    cand: int,
    chosen: int,
    size: int,
    optimum: int,
    state: _EnumState,
    counter: _Counter,
) -> None:
    """Visit every independent set of size == optimum extending `chosen`.

    Branches on the lowest candidate, include-first, so the first solution
    found is the lexicographically least one in this subtree.
    """
    if state.stop_at_first and state.found:
        return
    counter.spend()
    cand, taken, taken_mask = _take_isolated(cand, adj)
    size += taken
    chosen |= taken_mask
    if not cand:
        if size == optimum:
            state.count += 1
            state.found = True
            key = _mask_to_tuple(chosen)
            if state.witness is None or key < state.witness:
                state.witness = key
            if state.solutions is not None:
                state.solutions.append(chosen)
        return
    if size + _greedy_clique_cover(cand, adj) < optimum:
        return
    v = _lowest_bit(cand)
    _search_enumerate(
        adj, cand & ~adj[v] & ~(1 << v), chosen | 1 << v, size + 1, optimum, state, counter
    )
    _search_enumerate(adj, cand & ~(1 << v), chosen, size, optimum, state, counter)


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        out.append(_lowest_bit(mask))
        mask &= mask - 1
    return tuple(out)


def _solve(
    graph: ExclusionGraph,
    *,
    count: bool,
    mod_translations: bool,
    threads: int,
    node_budget: int | None,
) -> tuple[int, tuple[int, ...], int | None, int]:
    adj = graph.adjacency
    n = graph.n
    full = (1 << n) - 1
    counter = _Counter(node_budget)
    threads = max(1, threads)

    # Phase 1: the optimum value.  Torus translations act transitively on
    # cosets, so some maximum set contains vertex 0; fixing it prunes the
    # root without affecting the optimum (symmetry breaking is not used for
    # counting, which runs in phase 2 over the full root).
    best = _Best(0)
    root_cand = full & ~adj[0] & ~1
    root_size = 1
    if threads == 1:
        _search_optimum(adj, root_cand, root_size, best, counter)
    else:
        depth = max(1, (4 * threads - 1).bit_length() - 1)
        tasks = _split_tasks(adj, root_cand, root_size, depth)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_search_optimum, adj, c, s, best, counter)
                for (c, s) in tasks
            ]
            for f in futures:
                f.result()
    optimum = best.value

    # Phase 2: lexicographically least witness, plus exact count on request.
    need_solutions = count and mod_translations
    if threads == 1 or not count:
        state = _EnumState(
            solutions=[] if need_solutions else None,
            stop_at_first=not count,
        )
        _search_enumerate(adj, full, 0, 0, optimum, state, counter)
        states = [state]
    else:
        depth = max(1, (4 * threads - 1).bit_length() - 1)
        tasks = _split_prefixed(adj, full, 0, 0, depth)
        states = [
            _EnumState(solutions=[] if need_solutions else None) for _ in tasks
        ]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(
                    _search_enumerate, adj, cand, chosen, size, optimum, st, counter
                )
                for ((cand, chosen), size), st in zip(tasks, states)
            ]
            for f in futures:
                f.result()

    total_count = sum(st.count for st in states)
    witnesses = [st.witness for st in states if st.witness is not None]
    if not witnesses:
        raise AssertionError("optimum proven but no witness enumerated")
    witness = min(witnesses)

    reported: int | None = None
    if count:
        if mod_translations:
            sols: list[int] = []
            for st in states:
                sols.extend(st.solutions or [])
            reported = _count_orbits(graph.quotient, sols)
        else:
            reported = total_count
    return optimum, witness, reported, counter.nodes


def _split_prefixed(
    adj: tuple[int, ...], cand: int, chosen: int, size: int, depth: int
) -> list[tuple[tuple[int, int], int]]:
    """Like _split_tasks but also carries the chosen mask, branching on the
    lowest vertex so subtree order matches the sequential enumeration."""
    if depth == 0 or not cand:
        return [((cand, chosen), size)]
    v = _lowest_bit(cand)
    out = _split_prefixed(
        adj, cand & ~adj[v] & ~(1 << v), chosen | 1 << v, size + 1, depth - 1
    )
    out += _split_prefixed(adj, cand & ~(1 << v), chosen, size, depth - 1)
    return out


def _count_orbits(q: Quotient, solutions: list[int]) -> int:
    """Number of orbits of the solution sets under the torus translations."""
    reps = q.reps
    index_of = q.rep_index
    perms = []
    for t in reps:
        perms.append(tuple(index_of[q.reduce(add(r, t))] for r in reps))
    canon: set[tuple[int, ...]] = set()
    for mask in solutions:
        verts = _mask_to_tuple(mask)
        canon.add(
            min(tuple(sorted(p[v] for v in verts)) for p in perms)
        )
    return len(canon)


def max_packing(
    q: Quotient,
    d2: int,
    *,
    count: bool = False,
    mod_translations: bool = False,
    threads: int = 1,
    node_budget: int | None = None,
) -> PackingResult:
    """Exact maximum packing of the torus at squared exclusion distance d2.

    The witness is the lexicographically least optimal set of coset
    representatives; with count=True the exact number of optimal
    configurations is reported (orbits under torus translations when
    mod_translations is set).
    """
    t0 = time.perf_counter()
    graph = build_exclusion_graph(q, d2)
    optimum, witness_idx, counted, nodes = _solve(
        graph,
        count=count,
        mod_translations=mod_translations,
        threads=threads,
        node_budget=node_budget,
    )
    witness = Configuration(q, d2, frozenset(q.reps[i] for i in witness_idx))
    return PackingResult(
        optimum=optimum,
        witness=witness,
        count=counted,
        nodes=nodes,
        wall_time=time.perf_counter() - t0,
    )


def count_optima(
    q: Quotient,
    d2: int,
    mod_translations: bool = False,
    *,
    threads: int = 1,
    node_budget: int | None = None,
) -> int:
    """Exact number of maximum packings of the torus (or of their
    translation orbits)."""
    result = max_packing(
        q,
        d2,
        count=True,
        mod_translations=mod_translations,
        threads=threads,
        node_budget=node_budget,
    )
    assert result.count is not None
    return result.count


def clique_cover_bound(q: Quotient, d2: int) -> int:
    """Upper bound on the optimum from a geometric clique cover.

    The fundamental box is tiled with axis-aligned boxes of side s chosen so
    that 3*(s-1)^2 < d2: any two cosets inside one box are strictly closer
    than the exclusion distance, hence pairwise conflicting, and an
    admissible configuration holds at most one site per box.
    """
    if q.min_period_sq_norm() < d2:
        raise PeriodTooShortError(
            f"period min squared norm {q.min_period_sq_norm()} < d2 = {d2}"
        )
    side = isqrt((d2 - 1) // 3) + 1
    bound = 1
    for i in range(3):
        d = q.period[i][i]
        bound *= -(-d // side)
    return bound
