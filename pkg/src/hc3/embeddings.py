"""Number-theoretic enumeration of scaled-FCC sublattices of Z^3.

A scaled copy of the face-centered cubic lattice with nearest squared
distance 2*ell^2 embeds into Z^3 exactly when three integer vectors of
squared norm 2*ell^2 have pairwise inner products ell^2 (the FCC Gram
matrix).  This module enumerates all such sublattices, groups them into
orbits of the 48 signed coordinate permutations, and decides geometrically
whether an embedding admits the alternate (reflected) layer stacking - the
ingredient needed for layered close-packings.  The arithmetic criterion
(ell divisible by 3) is deliberately NOT consulted: it serves as the
independent oracle in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .lattice import (
    Basis,
    Site,
    add,
    cross,
    dot,
    hnf,
    lattice_index,
    primitive,
    scale,
    shortest_vectors,
    sq_norm,
    symmetry_group,
    apply_symmetry,
)

__all__ = [
    "EmbeddingClass",
    "NotAnFccEmbeddingError",
    "vectors_of_norm",
    "enumerate_fcc_embeddings",
    "embedding_classes",
    "admits_layered",
    "fcc_scale_of",
]


class NotAnFccEmbeddingError(ValueError):
    pass


def vectors_of_norm(n: int) -> list[Site]:
    """All integer triples of squared norm n, lexicographically ordered."""
    if n < 0:
        raise ValueError("squared norm must be nonnegative")
    r = isqrt(n)
    out = []
    for x in range(-r, r + 1):
        rest = n - x * x
        ry = isqrt(rest)
        for y in range(-ry, ry + 1):
            zz = rest - y * y
            z = isqrt(zz)
            if z * z == zz:
                if z == 0:
                    out.append((x, y, 0))
                else:
                    out.append((x, y, -z))
                    out.append((x, y, z))
    out.sort()
    return out


def enumerate_fcc_embeddings(ell: int) -> list[Basis]:
    """All sublattices generated by triples with the scaled FCC Gram matrix
    (diagonal 2*ell^2, off-diagonal ell^2), deduplicated by lattice set.

    Returned bases are HNFs, sorted; each has index 2*ell^3 and shortest
    squared norm 2*ell^2.
    """
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    norm = 2 * ell * ell
    target = ell * ell
    vecs = vectors_of_norm(norm)
    partners: dict[Site, list[Site]] = {
        v: [w for w in vecs if dot(v, w) == target] for v in vecs
    }
    found: dict[Basis, Basis] = {}
    for v1 in vecs:
        for v2 in partners[v1]:
            common = [w for w in partners[v2] if dot(v1, w) == target]
            for v3 in common:
                basis = (v1, v2, v3)
                key = hnf(basis)
                found.setdefault(key, key)
    out = sorted(found)
    for basis in out:
        assert lattice_index(basis) == 2 * ell**3
        assert shortest_vectors(basis)[0] == norm
    return out


@dataclass(frozen=True)
class EmbeddingClass:
    """An orbit of embeddings under the 48 signed coordinate permutations."""

    representative: Basis
    orbit_size: int
    members: tuple[Basis, ...]


def embedding_classes(ell: int) -> list[EmbeddingClass]:
    """Symmetry classes of the FCC embeddings at scale ell, sorted by
    canonical representative."""
    embeddings = enumerate_fcc_embeddings(ell)
    all_set = set(embeddings)
    ops = symmetry_group()
    classes: dict[Basis, set[Basis]] = {}
    for basis in embeddings:
        orbit = {hnf(tuple(apply_symmetry(op, g) for g in basis)) for op in ops}
        assert orbit <= all_set, "orbit left the enumerated set"
        rep = min(orbit)
        classes.setdefault(rep, set()).update(orbit)
    return [
        EmbeddingClass(rep, len(members), tuple(sorted(members)))
        for rep, members in sorted(classes.items())
    ]


def fcc_scale_of(basis: Basis) -> int:
    """The scale ell of an FCC embedding; raises if the lattice is not one."""
    m, mins = shortest_vectors(basis)
    if m % 2:
        raise NotAnFccEmbeddingError(f"shortest norm {m} is odd")
    ell = isqrt(m // 2)
    if 2 * ell * ell != m or len(mins) != 12:
        raise NotAnFccEmbeddingError(
            f"shortest shell (norm {m}, {len(mins)} vectors) is not FCC"
        )
    if lattice_index(basis) != 2 * ell**3:
        raise NotAnFccEmbeddingError(
            f"index {lattice_index(basis)} != 2*ell^3 for ell={ell}"
        )
    target = ell * ell
    for v1 in mins:
        for v2 in mins:
            if dot(v1, v2) != target:
                continue
            for v3 in mins:
                if dot(v1, v3) == target and dot(v2, v3) == target:
                    return ell
    raise NotAnFccEmbeddingError("no generating triple with the FCC Gram matrix")


def _plane_kernel_basis(n: Site) -> tuple[Site, Site]:
    """Basis of the full integer lattice {w : n.w = 0} for primitive n.

    Built from an extended gcd; the cross product of the returned pair is n
    itself, so the pair spans the whole kernel, not a sublattice.
    """
    a, b, c = n
    if b == 0 and c == 0:
        return (0, 1, 0), (0, 0, 1)
    g = gcd(abs(b), abs(c))
    p, q = _bezout(b, c)
    v1 = (0, c // g, -b // g)
    v2 = (-g, p * a, q * a)
    assert cross(v1, v2) in (n, tuple(-x for x in n))
    return v1, v2


def _bezout(b: int, c: int) -> tuple[int, int]:
    """(p, q) with p*b + q*c = gcd(|b|, |c|)."""
    old_r, r = b, c
    old_p, p = 1, 0
    old_q, q = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_p, p = p, old_p - k * p
        old_q, q = q, old_q - k * q
    if old_r < 0:
        return -old_p, -old_q
    return old_p, old_q


def _coeffs_2d(u1: Site, u2: Site, w: Site) -> tuple[int, int] | None:
    c = cross(u1, u2)
    if dot(c, w):
        return None
    cc = sq_norm(c)
    na = dot(cross(w, u2), c)
    nb = dot(cross(u1, w), c)
    if na % cc or nb % cc:
        return None
    return na // cc, nb // cc


def _min_dist_to_layer(t: Site, u1: Site, u2: Site) -> int:
    """Exact min over la in span(u1,u2) of |t + la|^2 (2D lattice CVP)."""
    area_sq = sq_norm(cross(u1, u2))
    cap = sq_norm(t)
    b1 = isqrt(4 * cap * sq_norm(u2)) // isqrt(area_sq) + 1
    b2 = isqrt(4 * cap * sq_norm(u1)) // isqrt(area_sq) + 1
    best = cap
    for i in range(-b1, b1 + 1):
        vi = add(t, scale(i, u1))
        for j in range(-b2, b2 + 1):
            d = sq_norm(add(vi, scale(j, u2)))
            if d < best:
                best = d
    return best


def admits_layered(basis: Basis) -> tuple[bool, dict | None]:
    """Whether the FCC embedding admits the alternate (reflected) stacking.

    For each of the four triangular-layer systems of the embedding, search
    the integer points of the adjacent layer plane, modulo the layer lattice,
    for a second shift coset that keeps the stack admissible at the
    embedding's exclusion distance.  Returns the witness shift when found.
    """
    ell = fcc_scale_of(basis)
    d2 = 2 * ell * ell
    _, mins = shortest_vectors(basis)

    normals: list[Site] = []
    for i, u in enumerate(mins):
        for v in mins[i + 1 :]:
            c = cross(u, v)
            if c == (0, 0, 0):
                continue
            nrm = primitive(c)
            if nrm < (0, 0, 0):
                nrm = tuple(-x for x in nrm)
            if nrm in normals:
                continue
            if sum(1 for w in mins if dot(nrm, w) == 0) == 6:
                normals.append(nrm)
    normals.sort()
    assert len(normals) == 4, f"expected 4 layer systems, got {len(normals)}"

    for n in normals:
        sextet = [w for w in mins if dot(n, w) == 0]
        u1 = sextet[0]
        u2 = next(w for w in sextet if cross(u1, w) != (0, 0, 0))
        off_plane = [w for w in mins if dot(n, w) != 0]
        step_height = min(abs(dot(n, w)) for w in off_plane)
        s = min(w for w in off_plane if abs(dot(n, w)) == step_height)
        if dot(n, s) < 0:
            s = tuple(-x for x in s)
        # integer points of the layer plane of s, modulo the layer lattice
        v1, v2 = _plane_kernel_basis(n)
        m11 = _coeffs_2d(v1, v2, u1)
        m21 = _coeffs_2d(v1, v2, u2)
        assert m11 is not None and m21 is not None
        det2 = m11[0] * m21[1] - m11[1] * m21[0]
        reps = _coset_reps_2d((m11, m21))
        assert len(reps) == abs(det2)
        for i, j in reps:
            w = add(scale(i, v1), scale(j, v2))
            if _coeffs_2d(u1, u2, w) is not None:
                continue  # same coset as the original step
            t = add(s, w)
            if _min_dist_to_layer(t, u1, u2) >= d2:
                return True, {"normal": n, "step": s, "alternate": t}
    return False, None


def _coset_reps_2d(rows: tuple[tuple[int, int], tuple[int, int]]) -> list[tuple[int, int]]:
    """Coset representatives of Z^2 modulo the lattice spanned by the rows.

    Row-reduces to a lower-triangular form (d0, 0), (m, d1); the box
    [0,d0) x [0,d1) is then a transversal.
    """
    (a, b), (c, d) = rows
    while b:
        if d == 0:
            a, b, c, d = c, d, a, b
            break
        k = b // d
        a, b = a - k * c, b - k * d
        if b:
            a, b, c, d = c, d, a, b
    a = abs(a)
    d = abs(d)
    assert a > 0 and d > 0
    return [(i, j) for i in range(a) for j in range(d)]
