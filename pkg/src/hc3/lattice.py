"""Exact integer lattice geometry on Z^3.

Everything in this module is arbitrary-precision integer (or exact rational)
arithmetic: squared norms, the 48 signed coordinate permutations, Hermite
normal forms of rank-3 sublattices, finite quotients (tori) and certified
minimum-image distances.  No floating point is used anywhere; all distance
comparisons are made on squared values.

Conventions
-----------
* A site is a plain ``(x, y, z)`` tuple of Python ints.
* A basis is a tuple of three generator sites.  Generators are the *rows*
  of the corresponding 3x3 matrix, so the lattice is ``{a*g1 + b*g2 + c*g3}``.
* The Hermite normal form used throughout is lower triangular with positive
  diagonal ``d0, d1, d2`` and below-diagonal entries reduced into
  ``[0, d_j)`` for column ``j``.  Equal HNF <=> equal lattice set.
"""

from __future__ import annotations

import itertools
from math import gcd, isqrt

Site = tuple[int, int, int]
Basis = tuple[Site, Site, Site]


# ---------------------------------------------------------------------------
# elementary vector arithmetic


def add(a: Site, b: Site) -> Site:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def sub(a: Site, b: Site) -> Site:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def neg(a: Site) -> Site:
    return (-a[0], -a[1], -a[2])


def scale(k: int, a: Site) -> Site:
    return (k * a[0], k * a[1], k * a[2])


def dot(a: Site, b: Site) -> int:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Site, b: Site) -> Site:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def sq_norm(v: Site) -> int:
    """Squared Euclidean norm x^2 + y^2 + z^2."""
    return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]


def det(basis: Basis) -> int:
    """Determinant of the matrix whose rows are the three generators."""
    g1, g2, g3 = basis
    return dot(g1, cross(g2, g3))


def primitive(v: Site) -> Site:
    """Divide out the gcd of the components (sign preserved)."""
    g = gcd(gcd(abs(v[0]), abs(v[1])), abs(v[2]))
    if g <= 1:
        return v
    return (v[0] // g, v[1] // g, v[2] // g)


# ---------------------------------------------------------------------------
# the point symmetry group of Z^3 (48 signed permutations)

SymmetryOp = tuple[Site, Site, Site]  # rows of a signed permutation matrix


def apply_symmetry(op: SymmetryOp, v: Site) -> Site:
    """Matrix-vector product; preserves sq_norm."""
    return (dot(op[0], v), dot(op[1], v), dot(op[2], v))


def compose(op1: SymmetryOp, op2: SymmetryOp) -> SymmetryOp:
    """The op acting as op1 after op2 (matrix product op1 * op2)."""
    cols = tuple(zip(*op2))
    return tuple(
        tuple(dot(row, col) for col in cols) for row in op1
    )  # type: ignore[return-value]


def symmetry_group() -> list[SymmetryOp]:
    """All 48 signed permutation matrices, in a fixed deterministic order."""
    ops = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            rows = []
            for i in range(3):
                row = [0, 0, 0]
                row[perm[i]] = signs[i]
                rows.append(tuple(row))
            ops.append(tuple(rows))
    ops.sort()
    return ops  # type: ignore[return-value]


IDENTITY_OP: SymmetryOp = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class SingularBasisError(ValueError):
    """Raised when three generators fail to span a rank-3 lattice."""


# ---------------------------------------------------------------------------
# Hermite normal form and lattice membership


def hnf(basis: Basis) -> Basis:
    """Canonical lower-triangular Hermite normal form of a rank-3 basis.

    Returns generators (rows) ``(d0,0,0), (m10,d1,0), (m20,m21,d2)`` with
    ``d_i > 0`` and ``0 <= m_ij < d_j``.  Two bases generate the same lattice
    iff their HNFs are equal.
    """
    m = [list(g) for g in basis]
    if det(basis) == 0:
        raise SingularBasisError(f"generators are linearly dependent: {basis}")
    # Clear column 2 above row 2, then column 1 above row 1, by unimodular
    # row operations (Euclid on the column entries).
    for col in (2, 1):
        while True:
            rows = [i for i in range(col + 1) if m[i][col] != 0]
            if len(rows) <= 1:
                break
            i0 = min(rows, key=lambda i: (abs(m[i][col]), i))
            for i in rows:
                if i == i0:
                    continue
                q = m[i][col] // m[i0][col]
                m[i] = [m[i][k] - q * m[i0][k] for k in range(3)]
        keep = next(i for i in range(col + 1) if m[i][col] != 0)
        m[col], m[keep] = m[keep], m[col]
    for i in range(3):
        if m[i][i] < 0:
            m[i] = [-x for x in m[i]]
    # Reduce below-diagonal entries into [0, d_j).
    q = m[2][1] // m[1][1]
    m[2] = [m[2][k] - q * m[1][k] for k in range(3)]
    for i in (1, 2):
        q = m[i][0] // m[0][0]
        m[i][0] -= q * m[0][0]
    return tuple(tuple(row) for row in m)  # type: ignore[return-value]


def lattice_index(basis: Basis) -> int:
    """Index of the sublattice in Z^3, i.e. |det| of the generator matrix."""
    d = det(basis)
    if d == 0:
        raise SingularBasisError(f"generators are linearly dependent: {basis}")
    return abs(d)


def _adjugate(basis: Basis) -> tuple[Site, Site, Site]:
    """Adjugate of the generator matrix G (rows = generators): adj = det * G^-1."""
    g1, g2, g3 = basis
    c1, c2, c3 = cross(g2, g3), cross(g3, g1), cross(g1, g2)
    # adj(G)[i][j] = cofactor(G)[j][i]; rows of adj are assembled from the
    # cross products of the generator rows.
    return (
        (c1[0], c2[0], c3[0]),
        (c1[1], c2[1], c3[1]),
        (c1[2], c2[2], c3[2]),
    )


def solve_coefficients(basis: Basis, v: Site) -> tuple[int, int, int] | None:
    """Integer coefficients (a, b, c) with a*g1 + b*g2 + c*g3 = v, or None.

    Cramer's rule on the exact integer system; no rounding anywhere.
    """
    d = det(basis)
    if d == 0:
        raise SingularBasisError(f"generators are linearly dependent: {basis}")
    g1, g2, g3 = basis
    nums = (
        dot(v, cross(g2, g3)),
        dot(g1, cross(v, g3)),
        dot(g1, cross(g2, v)),
    )
    if any(n % d for n in nums):
        return None
    return tuple(n // d for n in nums)  # type: ignore[return-value]


def lattice_contains(basis: Basis, v: Site) -> bool:
    """True iff v is an integer combination of the generators."""
    return solve_coefficients(basis, v) is not None


def lattice_from_generators(gens: list[Site]) -> Basis:
    """HNF basis of the lattice spanned by any number of generators.

    Raises SingularBasisError unless the generators span rank 3 (used to
    combine e.g. a mesh with a period lattice).
    """
    rows = [list(g) for g in gens if g != (0, 0, 0)]
    # Integer row reduction to at most 3 independent rows, column by column.
    for col in (2, 1, 0):
        while True:
            live = [r for r in rows if r[col] != 0 and all(r[c] == 0 for c in range(col + 1, 3))]
            if len(live) <= 1:
                break
            live.sort(key=lambda r: abs(r[col]))
            base = live[0]
            for r in live[1:]:
                q = r[col] // base[col]
                for k in range(3):
                    r[k] -= q * base[k]
        rows = [r for r in rows if any(r)]
    rows.sort(key=lambda r: next(i for i in range(3) if r[i] != 0) if any(r) else 3)
    if len(rows) != 3:
        raise SingularBasisError(f"generators span rank {len(rows)} < 3")
    return hnf(tuple(tuple(r) for r in rows))  # type: ignore[arg-type]


def _coefficient_bound(basis: Basis, t_sq: int) -> tuple[int, int, int]:
    """Box bounds B_i so that any lattice vector c.G with |c.G|^2 <= t_sq
    has |c_i| <= B_i.

    Uses the dual basis rows: c_i = (c.G) . d_i with d_i the i-th column of
    G^-1 = adj/det, hence |c_i| <= |c.G| * |d_i|.  The bound is rounded up,
    which only enlarges the certified search box.
    """
    adj = _adjugate(basis)
    d = abs(det(basis))
    cols = tuple(zip(*adj))  # columns of adj = det * columns of G^-1
    bounds = []
    for i in range(3):
        col_sq = sq_norm(cols[i])  # |det|^2 * |d_i|^2
        bounds.append(isqrt(t_sq * col_sq) // d + 1)
    return tuple(bounds)  # type: ignore[return-value]


def shortest_vectors(basis: Basis) -> tuple[int, list[Site]]:
    """Exact minimum nonzero squared norm of the lattice and all attaining vectors.

    Enumerates coefficients inside a box certified to contain every lattice
    vector at least as short as the shortest generator.
    """
    if det(basis) == 0:
        raise SingularBasisError(f"generators are linearly dependent: {basis}")
    cap = min(sq_norm(g) for g in basis)
    bx, by, bz = _coefficient_bound(basis, cap)
    g1, g2, g3 = basis
    best = cap
    attain: list[Site] = []
    for a in range(-bx, bx + 1):
        va = scale(a, g1)
        for b in range(-by, by + 1):
            vb = add(va, scale(b, g2))
            for c in range(-bz, bz + 1):
                if a == 0 and b == 0 and c == 0:
                    continue
                v = add(vb, scale(c, g3))
                n = sq_norm(v)
                if n < best:
                    best = n
                    attain = [v]
                elif n == best:
                    attain.append(v)
    attain.sort()
    return best, attain


def canonical_class_rep(basis: Basis) -> Basis:
    """Lexicographically least HNF of op . basis over the 48 symmetry ops.

    Two sublattices lie in the same Z^3-symmetry class iff their reps match.
    """
    best: Basis | None = None
    for op in symmetry_group():
        cand = hnf(tuple(apply_symmetry(op, g) for g in basis))  # type: ignore[arg-type]
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# quotients (tori)


class Quotient:
    """The finite torus Z^3 modulo a full-rank period sublattice.

    Representatives are the integer points of the HNF fundamental box
    ``[0,d0) x [0,d1) x [0,d2)`` in lexicographic order.  Minimum-image
    squared distances are exact, computed by certified coefficient-box
    enumeration and memoized per difference coset.
    """

    def __init__(self, period: Basis):
        self.period = hnf(period)
        self.index = lattice_index(self.period)
        d0, d1, d2 = (self.period[i][i] for i in range(3))
        self._diag = (d0, d1, d2)
        self.reps: tuple[Site, ...] = tuple(
            itertools.product(range(d0), range(d1), range(d2))
        )
        self.rep_index = {r: i for i, r in enumerate(self.reps)}
        self._min_norm: int | None = None
        self._dist_cache: dict[Site, int] = {(0, 0, 0): 0}
        adj_cols = tuple(zip(*_adjugate(self.period)))
        self._adj_col_sq = tuple(sq_norm(col) for col in adj_cols)

    def __repr__(self) -> str:
        return f"Quotient(period={self.period}, index={self.index})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Quotient) and self.period == other.period

    def __hash__(self) -> int:
        return hash(self.period)

    @property
    def size(self) -> int:
        return self.index

    def min_period_sq_norm(self) -> int:
        """Shortest nonzero squared norm of the period lattice."""
        if self._min_norm is None:
            self._min_norm = shortest_vectors(self.period)[0]
        return self._min_norm

    def reduce(self, v: Site) -> Site:
        """Canonical representative of the coset of v."""
        x, y, z = v
        r0, r1, r2 = self.period
        q = z // r2[2]
        x -= q * r2[0]
        y -= q * r2[1]
        z -= q * r2[2]
        q = y // r1[1]
        x -= q * r1[0]
        y -= q * r1[1]
        q = x // r0[0]
        x -= q * r0[0]
        return (x, y, z)

    def _size_reduce(self, t: Site) -> Site:
        """Shorten t by lattice vectors (exact nearest-integer Babai rounds);
        the result is in the same coset and keeps enumeration boxes small."""
        changed = True
        while changed:
            changed = False
            for g in self.period:
                gg = sq_norm(g)
                k = (2 * dot(t, g) + gg) // (2 * gg)
                if k:
                    cand = sub(t, scale(k, g))
                    if sq_norm(cand) < sq_norm(t):
                        t = cand
                        changed = True
        return t

    def _bounds_for(self, t_sq: int) -> tuple[int, int, int]:
        d = self.index
        return tuple(
            isqrt(t_sq * col_sq) // d + 1 for col_sq in self._adj_col_sq
        )  # type: ignore[return-value]

    def pair_sq_distance(self, a: Site, b: Site) -> int:
        """Exact minimum-image squared distance between the cosets of a and b."""
        t = self.reduce(sub(a, b))
        cached = self._dist_cache.get(t)
        if cached is not None:
            return cached
        t2 = self._size_reduce(t)
        best = sq_norm(t2)
        if best:
            bx, by, bz = self._bounds_for(4 * best)
            g1, g2, g3 = self.period
            for i in range(-bx, bx + 1):
                vi = add(t2, scale(i, g1))
                for j in range(-by, by + 1):
                    vj = add(vi, scale(j, g2))
                    for k in range(-bz, bz + 1):
                        n = sq_norm(add(vj, scale(k, g3)))
                        if n < best:
                            best = n
        self._dist_cache[t] = best
        return best

    def sites(self) -> tuple[Site, ...]:
        return self.reps

    def images_near(self, base: Site, center: Site, r_sq: int) -> list[Site]:
        """All points base + p (p in the period lattice) with
        |point - center|^2 <= r_sq, in deterministic order."""
        t = self._size_reduce(sub(base, center))
        bound = isqrt(r_sq) + isqrt(sq_norm(t)) + 2
        bx, by, bz = self._bounds_for(bound * bound)
        g1, g2, g3 = self.period
        out = []
        for i in range(-bx, bx + 1):
            vi = add(t, scale(i, g1))
            for j in range(-by, by + 1):
                vj = add(vi, scale(j, g2))
                for k in range(-bz, bz + 1):
                    v = add(vj, scale(k, g3))
                    if sq_norm(v) <= r_sq:
                        out.append(add(v, center))
        out.sort()
        return out


def quotient(period: Basis) -> Quotient:
    """Quotient of Z^3 by the lattice generated by the given period basis."""
    return Quotient(period)


def min_image_sq_distance(q: Quotient, a: Site, b: Site) -> int:
    """Exact minimum-image squared distance between the cosets of a and b."""
    return q.pair_sq_distance(a, b)


class Window:
    """A finite box of Z^3 with free boundary, lo..hi inclusive per axis.

    Used for layered builds whose stacking words do not close periodically;
    distances are plain squared Euclidean distances, with no images.
    """

    def __init__(self, lo: Site, hi: Site):
        if any(lo[i] > hi[i] for i in range(3)):
            raise ValueError(f"empty window: lo={lo} hi={hi}")
        self.lo = lo
        self.hi = hi
        self._sites: tuple[Site, ...] | None = None

    def __repr__(self) -> str:
        return f"Window(lo={self.lo}, hi={self.hi})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Window) and (self.lo, self.hi) == (other.lo, other.hi)

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    @property
    def size(self) -> int:
        return (
            (self.hi[0] - self.lo[0] + 1)
            * (self.hi[1] - self.lo[1] + 1)
            * (self.hi[2] - self.lo[2] + 1)
        )

    def contains(self, v: Site) -> bool:
        return all(self.lo[i] <= v[i] <= self.hi[i] for i in range(3))

    def reduce(self, v: Site) -> Site:
        return v

    def pair_sq_distance(self, a: Site, b: Site) -> int:
        return sq_norm(sub(a, b))

    def sites(self) -> tuple[Site, ...]:
        if self._sites is None:
            self._sites = tuple(
                itertools.product(
                    range(self.lo[0], self.hi[0] + 1),
                    range(self.lo[1], self.hi[1] + 1),
                    range(self.lo[2], self.hi[2] + 1),
                )
            )
        return self._sites
