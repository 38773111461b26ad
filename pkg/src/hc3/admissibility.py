"""Configurations with a hard-core exclusion constraint, on tori or windows.

A configuration is a set of occupied sites together with the squared
exclusion distance ``d2``: it is admissible when every pair of distinct
occupied sites (minimum-image distance on a torus, plain distance in a
window) is at squared distance >= d2.  Equality at d2 is allowed; only
strictly closer pairs conflict.

A quotient too small for d2 (some nonzero period vector shorter than the
exclusion distance) is rejected at construction time: on such a torus a
particle would conflict with its own periodic images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import Quotient, Site, Window, sub

Domain = Quotient | Window


class PeriodTooShortError(ValueError):
    """The period lattice has a nonzero vector shorter than the exclusion distance."""


@dataclass(frozen=True)
class Configuration:
    """An immutable set of occupied sites on a quotient or window."""

    domain: Domain
    d2: int
    occupied: frozenset[Site] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.d2 < 1:
            raise ValueError(f"d2 must be a positive integer, got {self.d2}")
        if isinstance(self.domain, Quotient):
            if self.domain.min_period_sq_norm() < self.d2:
                raise PeriodTooShortError(
                    f"period min squared norm {self.domain.min_period_sq_norm()}"
                    f" < d2 = {self.d2}"
                )
            object.__setattr__(
                self,
                "occupied",
                frozenset(self.domain.reduce(x) for x in self.occupied),
            )
        else:
            bad = [x for x in self.occupied if not self.domain.contains(x)]
            if bad:
                raise ValueError(f"sites outside window: {sorted(bad)[:3]}")

    # -- basic queries ------------------------------------------------------

    def sorted_sites(self) -> list[Site]:
        return sorted(self.occupied)

    def pair_sq_distance(self, a: Site, b: Site) -> int:
        return self.domain.pair_sq_distance(a, b)

    def is_admissible(self) -> tuple[bool, tuple[Site, Site] | None]:
        """Check all pairs; on failure return the first violating pair
        (in sorted site order)."""
        sites = self.sorted_sites()
        d2 = self.d2
        dist = self.domain.pair_sq_distance
        for i, a in enumerate(sites):
            for b in sites[i + 1 :]:
                if dist(a, b) < d2:
                    return False, (a, b)
        return True, None

    def density(self) -> Fraction:
        """Occupied fraction of the domain, exact."""
        return Fraction(len(self.occupied), self.domain.size)

    def min_pair_sq_distance(self) -> int:
        """Exact minimum over occupied pairs, including periodic self-images
        on a torus (the self-image term is the period's shortest vector)."""
        if len(self.occupied) < 2 and not isinstance(self.domain, Quotient):
            raise ValueError("need at least 2 occupied sites")
        sites = self.sorted_sites()
        dist = self.domain.pair_sq_distance
        best = None
        for i, a in enumerate(sites):
            for b in sites[i + 1 :]:
                d = dist(a, b)
                if best is None or d < best:
                    best = d
        if isinstance(self.domain, Quotient) and self.occupied:
            p = self.domain.min_period_sq_norm()
            best = p if best is None else min(best, p)
        if best is None:
            raise ValueError("need at least 2 occupied sites")
        return best

    # -- local moves --------------------------------------------------------

    def conflicts_with(self, x: Site) -> list[Site]:
        """Occupied sites (as stored) at squared distance < d2 from x."""
        dist = self.domain.pair_sq_distance
        return sorted(o for o in self.occupied if dist(x, o) < self.d2)

    def insertion_candidates(self) -> list[Site]:
        """All unoccupied domain sites insertable without violation.

        Empty list <=> the configuration is saturated.
        """
        out = []
        dist = self.domain.pair_sq_distance
        for x in self.domain.sites():
            if x in self.occupied:
                continue
            if all(dist(x, o) >= self.d2 for o in self.occupied):
                out.append(x)
        return out

    def with_sites(self, occupied) -> "Configuration":
        return Configuration(self.domain, self.d2, frozenset(occupied))

    def insert(self, x: Site) -> "Configuration":
        return self.with_sites(self.occupied | {self.domain.reduce(x)})

    def remove(self, xs) -> "Configuration":
        return self.with_sites(self.occupied - frozenset(xs))


@dataclass(frozen=True)
class ExclusionGraph:
    """Conflict graph of a quotient: vertices are the coset representatives
    in their fixed order, edges join cosets at minimum-image squared distance
    strictly between 0 and d2.  Adjacency is stored as per-vertex bitmasks."""

    quotient: Quotient
    d2: int
    adjacency: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def degree(self, i: int) -> int:
        return self.adjacency[i].bit_count()

    def neighbors(self, i: int) -> list[int]:
        mask = self.adjacency[i]
        return [j for j in range(self.n) if mask >> j & 1]

    def is_independent(self, vertices) -> bool:
        mask = 0
        for v in vertices:
            mask |= 1 << v
        return all(not (self.adjacency[v] & mask) for v in range(self.n) if mask >> v & 1)


def build_exclusion_graph(q: Quotient, d2: int) -> ExclusionGraph:
    """Exclusion graph of the torus at squared distance d2.

    Adjacency depends only on the difference coset, so one minimum-image
    distance per coset suffices.
    """
    if q.min_period_sq_norm() < d2:
        raise PeriodTooShortError(
            f"period min squared norm {q.min_period_sq_norm()} < d2 = {d2}"
        )
    reps = q.reps
    n = len(reps)
    conflict_diff = {
        t for t in reps if 0 < q.pair_sq_distance(t, (0, 0, 0)) < d2
    }
    adj = [0] * n
    for i, a in enumerate(reps):
        for j in range(i + 1, n):
            if q.reduce(sub(reps[j], a)) in conflict_diff:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return ExclusionGraph(q, d2, tuple(adj))
