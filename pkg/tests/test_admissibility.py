"""Configurations, the exclusion constraint, and exclusion graphs."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hc3.admissibility import (
    Configuration,
    PeriodTooShortError,
    build_exclusion_graph,
)
from hc3.catalog import known_sublattice, scaled_basis
from hc3.lattice import Window, quotient

DIAG2 = ((2, 0, 0), (0, 2, 0), (0, 0, 2))
DIAG4 = ((4, 0, 0), (0, 4, 0), (0, 0, 4))

A3_ON_DIAG2 = frozenset({(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)})


def a3_diag2(d2=2):
    return Configuration(quotient(DIAG2), d2, A3_ON_DIAG2)


def test_admissible_examples():
    ok, pair = a3_diag2().is_admissible()
    assert ok and pair is None

    c = Configuration(quotient(DIAG4), 2, frozenset({(0, 0, 0), (1, 0, 0)}))
    ok, pair = c.is_admissible()
    assert not ok
    assert pair == ((0, 0, 0), (1, 0, 0))
    assert c.pair_sq_distance(*pair) == 1

    bcc = Configuration(quotient(DIAG2), 3, frozenset({(0, 0, 0), (1, 1, 1)}))
    assert bcc.is_admissible() == (True, None)


def test_period_too_short_is_constructor_error():
    with pytest.raises(PeriodTooShortError):
        Configuration(quotient(DIAG2), 5, frozenset({(0, 0, 0)}))
    with pytest.raises(PeriodTooShortError):
        build_exclusion_graph(quotient(DIAG2), 5)


def test_density_examples():
    assert a3_diag2().density() == Fraction(1, 2)
    bcc = Configuration(
        quotient(DIAG4), 12, frozenset({(0, 0, 0), (2, 2, 2)})
    )
    assert bcc.density() == Fraction(1, 32)
    empty = Configuration(quotient(DIAG2), 2, frozenset())
    assert empty.density() == 0


def test_min_pair_sq_distance_examples():
    basis5 = known_sublattice(5)
    q = quotient(scaled_basis(basis5, 2))
    # all cosets of the basis5 sublattice inside the doubled torus
    occupied = frozenset(x for x in q.reps if _in_lattice(basis5, x))
    assert len(occupied) == 8
    c = Configuration(q, 5, occupied)
    assert c.min_pair_sq_distance() == 5

    basis9 = known_sublattice(9)
    q9 = quotient(scaled_basis(basis9, 2))
    c9 = Configuration(q9, 9, frozenset(x for x in q9.reps if _in_lattice(basis9, x)))
    assert c9.min_pair_sq_distance() == 9

    two_z3 = Configuration(
        quotient(DIAG4),
        4,
        frozenset((x, y, z) for x in (0, 2) for y in (0, 2) for z in (0, 2)),
    )
    assert two_z3.min_pair_sq_distance() == 4


def _in_lattice(basis, v):
    from hc3.lattice import lattice_contains

    return lattice_contains(basis, v)


def test_min_pair_includes_period_for_single_particle():
    c = Configuration(quotient(known_sublattice(5)), 5, frozenset({(0, 0, 0)}))
    assert c.min_pair_sq_distance() == 5


def test_min_pair_requires_particles():
    with pytest.raises(ValueError):
        Configuration(quotient(DIAG2), 2, frozenset()).min_pair_sq_distance()
    w = Window((0, 0, 0), (3, 3, 3))
    with pytest.raises(ValueError):
        Configuration(w, 2, frozenset({(0, 0, 0)})).min_pair_sq_distance()


def test_insertion_candidates():
    assert a3_diag2().insertion_candidates() == []
    empty = Configuration(quotient(DIAG2), 2, frozenset())
    assert len(empty.insertion_candidates()) == 8
    bcc = Configuration(quotient(DIAG4), 12, frozenset({(0, 0, 0), (2, 2, 2)}))
    assert bcc.insertion_candidates() == []


def test_insertion_preserves_admissibility():
    empty = Configuration(quotient(DIAG4), 4, frozenset())
    c = empty
    for _ in range(4):
        cands = c.insertion_candidates()
        if not cands:
            break
        c = c.insert(cands[0])
        assert c.is_admissible()[0]


def test_exclusion_graph_degrees_match_bruteforce():
    for d2 in (1, 2, 3, 4):
        q = quotient(DIAG2)
        g = build_exclusion_graph(q, d2)
        for i, a in enumerate(q.reps):
            brute = sum(
                1
                for j, b in enumerate(q.reps)
                if j != i and 0 < q.pair_sq_distance(a, b) < d2
            )
            assert g.degree(i) == brute
        # vertex transitivity: constant degree
        assert len({g.degree(i) for i in range(g.n)}) == 1
    assert all(
        build_exclusion_graph(quotient(DIAG2), 1).degree(i) == 0 for i in range(8)
    )


def test_exclusion_graph_degree_values():
    # on the 2-torus: d2=2 excludes squared distance 1 (3 neighbors),
    # d2=3 also excludes squared distance 2 (6 neighbors),
    # d2=4 also excludes 3 (7 neighbors: the full graph)
    degs = {
        d2: build_exclusion_graph(quotient(DIAG2), d2).degree(0) for d2 in (1, 2, 3, 4)
    }
    assert degs == {1: 0, 2: 3, 3: 6, 4: 7}


@settings(max_examples=60, deadline=None)
@given(st.sets(st.sampled_from(sorted(quotient(DIAG2).reps)), max_size=8), st.sampled_from([2, 3, 4]))
def test_admissible_iff_independent(occupied, d2):
    q = quotient(DIAG2)
    g = build_exclusion_graph(q, d2)
    c = Configuration(q, d2, frozenset(occupied))
    verts = [q.rep_index[x] for x in occupied]
    assert c.is_admissible()[0] == g.is_independent(verts)


def test_window_admissibility_is_free_boundary():
    w = Window((0, 0, 0), (4, 4, 0))
    c = Configuration(w, 4, frozenset({(0, 0, 0), (4, 0, 0), (0, 4, 0)}))
    assert c.is_admissible()[0]
    assert c.density() == Fraction(3, 25)
    bad = Configuration(w, 4, frozenset({(0, 0, 0), (1, 0, 0)}))
    ok, pair = bad.is_admissible()
    assert not ok and pair == ((0, 0, 0), (1, 0, 0))


def test_window_rejects_outside_sites():
    w = Window((0, 0, 0), (2, 2, 2))
    with pytest.raises(ValueError):
        Configuration(w, 2, frozenset({(5, 0, 0)}))
