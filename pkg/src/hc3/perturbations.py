"""Local excitations and sliding moves of packed configurations.

An excitation inserts particles and removes exactly the particles they
conflict with; its order is the net particle loss.  Insertion conflicts are
counted against the periodic extension (actual lattice points, images
included), which is what makes the order meaningful on small tori as well.
Sliding probes rigid shifts of line or plane sub-meshes that keep both the
particle count and admissibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .admissibility import Configuration
from .catalog import (
    LineSelector,
    PlaneSelector,
    Selector,
    SelectorEmptyError,
    mesh_shift,
)
from .lattice import Quotient, Site, add, sq_norm, sub

__all__ = [
    "Excitation",
    "ExcitationScan",
    "SlidingMove",
    "insertion_conflicts",
    "min_insertion_order",
    "enumerate_excitations",
    "find_sliding",
    "standard_selectors",
    "standard_shifts",
]

# line directions / plane normals probed by the standard sliding scan
_DIRECTIONS: tuple[Site, ...] = (
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 1),
    (1, 1, -1),
    (1, -1, 1),
    (-1, 1, 1),
)


def insertion_conflicts(c: Configuration, x: Site) -> list[Site]:
    """Particles of the (periodic) configuration at squared distance < d2
    from the unoccupied site x, as actual lattice points near x."""
    if c.domain.reduce(x) in c.occupied:
        raise ValueError(f"site {x} is occupied")
    if isinstance(c.domain, Quotient):
        out = []
        for o in sorted(c.occupied):
            for p in c.domain.images_near(o, x, c.d2 - 1):
                out.append(p)
        return sorted(out)
    return sorted(
        o for o in c.occupied if sq_norm(sub(o, x)) < c.d2
    )


def min_insertion_order(
    c: Configuration, region=None
) -> tuple[int, list[Site]]:
    """Minimum over unoccupied sites of (number of conflicts - 1), with all
    attaining sites.  The region defaults to one fundamental domain."""
    if region is None:
        region = c.domain.sites()
    best: int | None = None
    argmin: list[Site] = []
    for x in region:
        x = c.domain.reduce(x)
        if x in c.occupied:
            continue
        order = len(insertion_conflicts(c, x)) - 1
        if best is None or order < best:
            best = order
            argmin = [x]
        elif order == best:
            argmin.append(x)
    if best is None:
        raise ValueError("region contains no unoccupied site")
    return best, sorted(set(argmin))


@dataclass(frozen=True)
class Excitation:
    """A local modification of the periodic configuration: `added` are
    inserted lattice points, `removed` exactly the configuration points they
    repel (the minimality convention), order the net particle loss.

    One entry per translation class of the configuration's own period, so
    each listed excitation occurs exactly once per fundamental domain;
    classes related by point symmetries are listed separately."""

    added: tuple[Site, ...]
    removed: tuple[Site, ...]
    order: int


@dataclass(frozen=True)
class ExcitationScan:
    excitations: tuple[Excitation, ...]
    complete: bool
    nodes: int


def _stabilizer_lattice(c: Configuration) -> Quotient:
    """Quotient by the full translation lattice of the configuration (the
    torus period extended by every torus translation fixing the occupied
    set)."""
    assert isinstance(c.domain, Quotient)
    dom = c.domain
    stab = [
        t
        for t in dom.reps
        if {dom.reduce(add(x, t)) for x in c.occupied} == c.occupied
    ]
    from .lattice import lattice_from_generators

    return Quotient(lattice_from_generators([*dom.period, *stab]))


def enumerate_excitations(
    c: Configuration, max_order: int, radius: int, budget: int = 100_000
) -> ExcitationScan:
    """All excitations of order <= max_order whose added points lie within
    the given radius of the origin, up to translations fixing c.

    Everything is computed in the periodic extension: added candidates are
    actual lattice points of the ball, pairwise admissibility uses plain
    distances, and the removed set collects conflict points.  DFS over
    pairwise-admissible added sets; the budget bounds the number of visited
    nodes and a partial scan is flagged.
    """
    if not isinstance(c.domain, Quotient):
        raise ValueError("excitation enumeration requires a periodic configuration")
    dom = c.domain
    d2 = c.d2
    candidates = []
    for x in _ball_points(radius):
        if dom.reduce(x) not in c.occupied:
            candidates.append(x)
    candidates.sort(key=lambda x: (sq_norm(x), x))
    n = len(candidates)
    compatible = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if sq_norm(sub(candidates[i], candidates[j])) >= d2:
                compatible[i] |= 1 << j
                compatible[j] |= 1 << i

    conflict_points = {
        x: frozenset(insertion_conflicts(c, x)) for x in candidates
    }

    stab_q = _stabilizer_lattice(c)
    found: dict[tuple, None] = {}
    state = {"nodes": 0, "complete": True, "hit_cap": False}

    def canon(added: frozenset, removed: frozenset):
        shifts = {sub(stab_q.reduce(a), a) for a in added}
        return min(
            (
                tuple(sorted(add(x, t) for x in added)),
                tuple(sorted(add(x, t) for x in removed)),
            )
            for t in shifts
        )

    def dfs(start: int, added_mask: int, added: frozenset, removed: frozenset, cap: int):
        if state["nodes"] >= budget:
            state["complete"] = False
            return
        state["nodes"] += 1
        if added and len(removed) - len(added) <= max_order:
            found.setdefault(canon(added, removed))
        if len(added) == cap:
            state["hit_cap"] = True
            return
        for i in range(start, n):
            if added_mask & ~compatible[i]:
                continue  # conflicts with an already added point
            x = candidates[i]
            dfs(
                i + 1,
                added_mask | 1 << i,
                added | {x},
                removed | conflict_points[x],
                cap,
            )

    # Iterative deepening on the added-set size keeps small excitations
    # ahead of the combinatorial tail, so a budget-truncated scan still
    # reports every excitation up to the last completed size.
    cap = 1
    while state["complete"]:
        state["hit_cap"] = False
        dfs(0, 0, frozenset(), frozenset(), cap)
        if not state["hit_cap"]:
            break
        cap += 1

    excitations = [
        Excitation(added=a, removed=r, order=len(r) - len(a))
        for a, r in sorted(found)
    ]
    excitations.sort(key=lambda e: (e.order, e.added, e.removed))
    return ExcitationScan(tuple(excitations), state["complete"], state["nodes"])


def revalidate_excitation(c: Configuration, exc: Excitation) -> bool:
    """Re-check an excitation against the periodic extension: added points
    pairwise admissible, removed exactly the conflict set, and no remaining
    configuration point too close to an added one."""
    d2 = c.d2
    added = exc.added
    for i, a in enumerate(added):
        for b in added[i + 1 :]:
            if sq_norm(sub(a, b)) < d2:
                return False
    removed = set()
    for a in added:
        removed.update(insertion_conflicts(c, a))
    return removed == set(exc.removed)


def _ball_points(radius: int):
    r_sq = radius * radius
    for x in range(-radius, radius + 1):
        for y in range(-radius, radius + 1):
            for z in range(-radius, radius + 1):
                if x * x + y * y + z * z <= r_sq:
                    yield (x, y, z)


@dataclass(frozen=True)
class SlidingMove:
    selector: Selector
    shift: Site
    min_pair_sq_distance: int


def standard_shifts(max_sq_norm: int = 2) -> list[Site]:
    """All nonzero integer shifts up to the given squared norm."""
    r = isqrt(max_sq_norm)
    out = [
        (x, y, z)
        for x in range(-r, r + 1)
        for y in range(-r, r + 1)
        for z in range(-r, r + 1)
        if (x, y, z) != (0, 0, 0) and x * x + y * y + z * z <= max_sq_norm
    ]
    out.sort()
    return out


def standard_selectors(c: Configuration) -> list[Selector]:
    """Line and plane selectors through the occupied sites in the coordinate
    and main-diagonal directions, deduplicated by the set they select.

    Selectors matching nothing or the whole configuration are dropped: a
    whole-configuration shift is a global translation, not a slide.
    """
    selectors: list[Selector] = []
    seen: set = set()
    occupied = sorted(c.occupied)
    for d in _DIRECTIONS:
        for kind in ("line", "plane"):
            for anchor in occupied:
                sel: Selector
                if kind == "line":
                    sel = LineSelector(anchor, d)
                else:
                    sel = PlaneSelector(anchor, d)
                selected = sel.select(c)
                if not selected or selected == c.occupied:
                    continue
                key = (kind, d, selected)
                if key in seen:
                    continue
                seen.add(key)
                selectors.append(sel)
    return selectors


def find_sliding(
    c: Configuration,
    selectors: list[Selector] | None = None,
    shifts: list[Site] | None = None,
) -> list[SlidingMove]:
    """Density-preserving admissible shifts of sub-meshes of c.

    Every returned move passes mesh_shift + admissibility with the particle
    count unchanged and actually moves something.  An empty list means no
    sliding was found in the probed family.
    """
    if selectors is None:
        selectors = standard_selectors(c)
    if shifts is None:
        shifts = standard_shifts(2)
    moves = []
    for sel in selectors:
        for t in shifts:
            try:
                shifted = mesh_shift(c, sel, t)
            except SelectorEmptyError:
                continue
            if len(shifted.occupied) != len(c.occupied):
                continue
            if shifted.occupied == c.occupied:
                continue
            ok, _ = shifted.is_admissible()
            if not ok:
                continue
            moves.append(
                SlidingMove(sel, t, shifted.min_pair_sq_distance())
            )
    moves.sort(key=lambda m: (m.selector.describe(), m.shift))
    return moves
