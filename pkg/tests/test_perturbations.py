"""Excitations (insertions with forced removals) and sliding detection."""

import pytest

from hc3.admissibility import Configuration
from hc3.catalog import (
    LineSelector,
    build_layered,
    known_sublattice,
    layered_quotient,
    scaled_basis,
)
from hc3.lattice import lattice_contains, quotient, sq_norm, sub
from hc3.perturbations import (
    enumerate_excitations,
    find_sliding,
    insertion_conflicts,
    min_insertion_order,
    revalidate_excitation,
    standard_shifts,
)

DIAG2 = ((2, 0, 0), (0, 2, 0), (0, 0, 2))
DIAG4 = ((4, 0, 0), (0, 4, 0), (0, 0, 4))


def sublattice_on_scaled_torus(d2, variant=None, scale=2):
    basis = known_sublattice(d2, variant)
    q = quotient(scaled_basis(basis, scale))
    occupied = frozenset(x for x in q.reps if lattice_contains(basis, x))
    return Configuration(q, d2, occupied)


def dfcc_doubled():
    q = quotient(scaled_basis(layered_quotient(5, "S").period, 2))
    return build_layered(5, "SS", on=q)


def dhcp_doubled():
    q = quotient(scaled_basis(layered_quotient(5, "ST").period, 2))
    return build_layered(5, "STST", on=q)


def test_insertion_conflicts_fcc():
    a3 = Configuration(
        quotient(DIAG2), 2, frozenset({(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)})
    )
    conflicts = insertion_conflicts(a3, (1, 0, 0))
    # the six unit neighbors of (1,0,0) all belong to the FCC structure
    assert len(conflicts) == 6
    assert all(sq_norm(sub(p, (1, 0, 0))) == 1 for p in conflicts)


def test_insertion_conflicts_empty_configuration():
    empty = Configuration(quotient(DIAG2), 2, frozenset())
    assert insertion_conflicts(empty, (0, 0, 0)) == []


def test_insertion_conflicts_requires_unoccupied():
    a3 = Configuration(
        quotient(DIAG2), 2, frozenset({(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)})
    )
    with pytest.raises(ValueError):
        insertion_conflicts(a3, (2, 0, 0))  # coset of the origin


def test_dhcp_face_center_has_exactly_three_conflicts():
    dhcp = dhcp_doubled()
    conflicts = insertion_conflicts(dhcp, (0, 1, -1))
    assert len(conflicts) == 3
    assert all(sq_norm(sub(p, (0, 1, -1))) == 2 for p in conflicts)


def test_min_insertion_orders_distinguish_stackings():
    order_fcc, _ = min_insertion_order(dfcc_doubled())
    order_hcp, argmin = min_insertion_order(dhcp_doubled())
    assert order_hcp == 2
    assert order_fcc >= 3
    assert order_hcp < order_fcc
    assert argmin  # the face-center sites


def test_min_insertion_order_regression_2z3():
    c = sublattice_on_scaled_torus(4)
    order, _ = min_insertion_order(c)
    assert order == 1  # unit-offset sites conflict with exactly two particles


def test_min_insertion_order_on_single_cell_torus():
    # conflicts count periodic image particles, so the scan works even on the
    # sublattice's own quotient (one particle, 8 unoccupied cosets)
    c = Configuration(
        quotient(known_sublattice(5)), 5, frozenset({(0, 0, 0)})
    )
    order, _ = min_insertion_order(c)
    assert order >= 3


def test_excitations_dichotomy_at_d2_5():
    dhcp = dhcp_doubled()
    scan = enumerate_excitations(dhcp, 2, 2, budget=200_000)
    assert scan.complete
    assert scan.excitations
    for e in scan.excitations:
        assert e.order == 2
        assert len(e.added) == 1
        assert len(e.removed) == 3
        assert revalidate_excitation(dhcp, e)
    dfcc = dfcc_doubled()
    scan_fcc = enumerate_excitations(dfcc, 2, 2, budget=200_000)
    assert scan_fcc.complete
    assert scan_fcc.excitations == ()


def test_excitations_max_order_zero_empty():
    for c in (dfcc_doubled(), dhcp_doubled()):
        scan = enumerate_excitations(c, 0, 2, budget=200_000)
        assert scan.complete
        assert scan.excitations == ()


def test_excitations_budget_partial():
    dhcp = dhcp_doubled()
    scan = enumerate_excitations(dhcp, 2, 3, budget=2_000)
    assert not scan.complete


def test_sliding_witness_2z3():
    c = sublattice_on_scaled_torus(4)
    moves = find_sliding(c)
    assert moves
    line_moves = [m for m in moves if isinstance(m.selector, LineSelector)]
    assert line_moves
    assert all(m.min_pair_sq_distance >= 4 for m in moves)


def test_sliding_witness_bcc_at_d2_11():
    c = sublattice_on_scaled_torus(11)
    sel = LineSelector((0, 0, 0), (1, 1, 1))
    moves = find_sliding(c, selectors=[sel], shifts=[(1, 1, 1)])
    assert len(moves) == 1
    assert moves[0].min_pair_sq_distance == 11


def test_same_shift_rejected_at_d2_12():
    c = sublattice_on_scaled_torus(12)
    sel = LineSelector((0, 0, 0), (1, 1, 1))
    assert find_sliding(c, selectors=[sel], shifts=[(1, 1, 1)]) == []


def test_no_sliding_on_rigid_catalog_structures():
    for d2 in (2, 3, 5, 8, 9, 10, 12):
        c = sublattice_on_scaled_torus(d2)
        assert find_sliding(c) == [], f"unexpected sliding at d2={d2}"


def test_standard_shifts():
    shifts = standard_shifts(2)
    assert len(shifts) == 18
    assert all(0 < sq_norm(t) <= 2 for t in shifts)
    assert (0, 0, 0) not in shifts
