"""Named optimal-density structures and layered stackings.

This module holds the explicit generator data for the known densest
sublattices at squared exclusion distances 2..12, the two-dimensional meshes
their layers are built from, and constructors for layered configurations
described by a stacking word (one letter per layer step, each letter a
permitted shift coset).  A constant word gives the FCC-like structure, an
alternating word the HCP-like one.

The d2=5 sublattice is stored with stacking generator (2,1,0): together with
the two in-plane generators it has index 9 and shortest squared norm exactly
5, which the admissibility validator confirms mechanically.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .admissibility import Configuration
from .lattice import (
    Basis,
    Quotient,
    Site,
    Window,
    add,
    cross,
    dot,
    lattice_from_generators,
    lattice_contains,
    scale,
    sq_norm,
    sub,
)

__all__ = [
    "MeshSpec",
    "LayerFamily",
    "LineSelector",
    "PlaneSelector",
    "MeshSelector",
    "known_sublattice",
    "known_sublattice_keys",
    "known_mesh",
    "layer_family",
    "build_layered",
    "layered_quotient",
    "classify_stacking",
    "mesh_shift",
    "scaled_basis",
]


class UnknownCatalogEntryError(KeyError):
    pass


class NotLayeredError(ValueError):
    pass


class WordClosureError(ValueError):
    pass


class SelectorEmptyError(ValueError):
    pass


@dataclass(frozen=True)
class MeshSpec:
    """A rank-2 sublattice in a plane: two generators, an anchor and the
    integer normal of the containing plane."""

    generators: tuple[Site, Site]
    anchor: Site
    normal: Site

    def __post_init__(self):
        g1, g2 = self.generators
        if cross(g1, g2) == (0, 0, 0):
            raise ValueError("mesh generators are collinear")
        if dot(g1, self.normal) or dot(g2, self.normal):
            raise ValueError("mesh generators must be orthogonal to the normal")

    def in_plane_coefficients(self, w: Site) -> tuple[int, int] | None:
        """Integer (a, b) with a*g1 + b*g2 = w, or None."""
        g1, g2 = self.generators
        c = cross(g1, g2)
        if dot(c, w):
            return None
        cc = sq_norm(c)
        na = dot(cross(w, g2), c)
        nb = dot(cross(g1, w), c)
        if na % cc or nb % cc:
            return None
        return na // cc, nb // cc

    def contains(self, w: Site) -> bool:
        return self.in_plane_coefficients(w) is not None


# --- sublattice table -------------------------------------------------------

_SUBLATTICES: dict[tuple[int, str], Basis] = {
    (2, "main"): ((1, 1, 0), (1, 0, 1), (0, 1, 1)),
    (3, "main"): ((2, 0, 0), (0, 2, 0), (1, 1, 1)),
    (4, "main"): ((2, 0, 0), (0, 2, 0), (0, 0, 2)),
    # stacking generator corrected to keep the shortest squared norm at 5
    (5, "main"): ((1, -2, 1), (-1, -1, 2), (2, 1, 0)),
    (6, "I"): ((1, -2, 1), (-1, -1, 2), (2, 1, 1)),
    (6, "II"): ((1, 1, 2), (1, 1, -2), (2, -1, 1)),
    (8, "main"): ((2, 2, 0), (2, 0, 2), (0, 2, 2)),
    (9, "1"): ((0, 3, 1), (0, -1, 3), (2, 1, 2)),
    (9, "2"): ((0, 3, -1), (0, -1, -3), (2, 1, -2)),
    (10, "1"): ((-1, -3, 4), (3, -4, 1), (0, 3, -1)),
    (10, "2"): ((-1, 4, -3), (3, 1, -4), (0, -1, 3)),
    (11, "main"): ((4, 0, 0), (0, 4, 0), (2, 2, 2)),
    (12, "main"): ((4, 0, 0), (0, 4, 0), (2, 2, 2)),
}

_DEFAULT_VARIANT = {2: "main", 3: "main", 4: "main", 5: "main", 6: "I",
                    8: "main", 9: "1", 10: "1", 11: "main", 12: "main"}


def known_sublattice(d2: int, variant: str | None = None) -> Basis:
    """Generators of the densest known sublattice at squared distance d2.

    Variants: "I"/"II" for d2=6, "1"/"2" for d2=9 and d2=10.
    """
    if d2 not in _DEFAULT_VARIANT:
        raise UnknownCatalogEntryError(f"no catalog sublattice for d2={d2}")
    key = (d2, variant if variant is not None else _DEFAULT_VARIANT[d2])
    if key not in _SUBLATTICES:
        raise UnknownCatalogEntryError(f"unknown variant {variant!r} for d2={d2}")
    return _SUBLATTICES[key]


def known_sublattice_keys() -> list[tuple[int, str]]:
    return sorted(_SUBLATTICES)


# --- mesh table -------------------------------------------------------------

_MESHES: dict[tuple[str, str], MeshSpec] = {
    ("triangular-2", "main"): MeshSpec(
        ((1, -1, 0), (1, 0, -1)), (0, 0, 0), (1, 1, 1)
    ),
    ("square-4", "main"): MeshSpec(((2, 0, 0), (0, 2, 0)), (0, 0, 0), (0, 0, 1)),
    ("triangular-6", "main"): MeshSpec(
        ((1, -2, 1), (-1, -1, 2)), (0, 0, 0), (1, 1, 1)
    ),
    ("square-10", "1"): MeshSpec(((0, 3, 1), (0, -1, 3)), (0, 0, 0), (1, 0, 0)),
    ("square-10", "2"): MeshSpec(((0, 3, -1), (0, -1, -3)), (0, 0, 0), (1, 0, 0)),
    ("triangular-26", "1"): MeshSpec(
        ((-1, -3, 4), (3, -4, 1)), (0, 0, 0), (1, 1, 1)
    ),
    ("triangular-26", "2"): MeshSpec(
        ((-1, 4, -3), (3, 1, -4)), (0, 0, 0), (1, 1, 1)
    ),
    ("rhombic-8-16", "main"): MeshSpec(
        ((1, 1, 2), (1, 1, -2)), (0, 0, 0), (1, -1, 0)
    ),
}


def known_mesh(name: str, variant: str = "main") -> MeshSpec:
    """Mesh of the given catalog name ("triangular-6", "square-10", ...)."""
    try:
        return _MESHES[(name, variant)]
    except KeyError:
        raise UnknownCatalogEntryError(f"unknown mesh {name!r} variant {variant!r}")


# --- layered families -------------------------------------------------------


@dataclass(frozen=True)
class LayerFamily:
    """A layered-packing family: a layer mesh, the plane increment between
    consecutive layers along the mesh normal, and the permitted per-step
    shift vectors keyed by word letter."""

    d2: int
    name: str
    mesh: MeshSpec
    plane_step: int
    steps: dict[str, Site]

    @property
    def normal(self) -> Site:
        return self.mesh.normal

    @property
    def alphabet(self) -> str:
        return "".join(sorted(self.steps))


_FAMILIES: dict[tuple[int, str], LayerFamily] = {}


def _register_family(d2, name, mesh, plane_step, steps):
    fam = LayerFamily(d2, name, mesh, plane_step, steps)
    for vec in steps.values():
        if dot(vec, mesh.normal) != plane_step:
            raise AssertionError(f"bad step table for d2={d2} family {name}")
    _FAMILIES[(d2, name)] = fam


_register_family(2, "main", known_mesh("triangular-2"), 2, {"S": (1, 1, 0)})
_register_family(3, "main", known_mesh("square-4"), 1, {"S": (1, 1, 1)})
_register_family(
    5, "main", known_mesh("triangular-6"), 3, {"S": (2, 1, 0), "T": (0, 1, 2)}
)
_register_family(
    6,
    "I",
    known_mesh("triangular-6"),
    4,
    {"S": (2, 1, 1), "T": (1, 2, 1), "U": (1, 1, 2)},
)
_register_family(
    6,
    "II",
    known_mesh("rhombic-8-16"),
    3,
    {"S": (2, -1, 1), "T": (1, -2, 1)},
)
_register_family(9, "1", known_mesh("square-10", "1"), 2, {"S": (2, 1, 2)})
_register_family(9, "2", known_mesh("square-10", "2"), 2, {"S": (2, 1, -2)})

_DEFAULT_FAMILY = {2: "main", 3: "main", 5: "main", 6: "I", 9: "1"}


def layer_family(d2: int, family: str | None = None) -> LayerFamily:
    if d2 not in _DEFAULT_FAMILY:
        raise UnknownCatalogEntryError(f"no layered family for d2={d2}")
    key = (d2, family if family is not None else _DEFAULT_FAMILY[d2])
    if key not in _FAMILIES:
        raise UnknownCatalogEntryError(f"unknown family {family!r} for d2={d2}")
    return _FAMILIES[key]


def _word_offsets(fam: LayerFamily, word: str) -> list[Site]:
    if not word:
        raise ValueError("stacking word must be nonempty")
    offsets = [(0, 0, 0)]
    for letter in word:
        if letter not in fam.steps:
            raise ValueError(
                f"letter {letter!r} not in alphabet {fam.alphabet!r}"
                f" of d2={fam.d2} family {fam.name}"
            )
        offsets.append(add(offsets[-1], fam.steps[letter]))
    return offsets


def layered_quotient(d2: int, word: str, family: str | None = None) -> Quotient:
    """The natural period of the layered configuration with this word:
    the lattice spanned by the layer mesh and the total word offset."""
    fam = layer_family(d2, family)
    offsets = _word_offsets(fam, word)
    g1, g2 = fam.mesh.generators
    return Quotient(lattice_from_generators([g1, g2, offsets[-1]]))


def build_layered(
    d2: int,
    word: str,
    on: Quotient | Window | None = None,
    family: str | None = None,
) -> Configuration:
    """Layered configuration for the given stacking word.

    On a quotient the word must close up: every period vector has to lie in
    the lattice spanned by the layer mesh and the total word offset.  With
    ``on=None`` the natural quotient of the word is used.  On a window the
    word produces len(word)+1 stacked layers clipped to the box.
    """
    fam = layer_family(d2, family)
    offsets = _word_offsets(fam, word)
    total = offsets[-1]
    g1, g2 = fam.mesh.generators
    n = fam.normal
    h = fam.plane_step
    length = len(word)

    if on is None:
        on = layered_quotient(d2, word, family)
    if isinstance(on, Quotient):
        closure = lattice_from_generators([g1, g2, total])
        for p in on.period:
            if not lattice_contains(closure, p):
                raise WordClosureError(
                    f"word {word!r} does not close on period {on.period}"
                )

        def member(x: Site) -> bool:
            p = dot(n, x)
            if p % h:
                return False
            m, k = divmod(p // h, length)
            base = add(offsets[k], scale(m, total))
            return fam.mesh.contains(sub(x, base))

        occupied = frozenset(x for x in on.reps if member(x))
    else:

        def member(x: Site) -> bool:
            p = dot(n, x)
            if p % h:
                return False
            k = p // h
            if not 0 <= k <= length:
                return False
            return fam.mesh.contains(sub(x, offsets[k]))

        occupied = frozenset(x for x in on.sites() if member(x))

    config = Configuration(on, d2, occupied)
    ok, pair = config.is_admissible()
    if not ok:
        raise AssertionError(f"layered build violated admissibility at {pair}")
    return config


def classify_stacking(c: Configuration, normal: Site) -> str:
    """Recover the stacking word of a layered configuration.

    Inverse of build_layered for configurations anchored at the origin layer:
    layers are identified as translates of the bottom layer and each step is
    matched against the family's shift cosets.
    """
    fams = [f for (d, _), f in sorted(_FAMILIES.items()) if d == c.d2 and f.normal == normal]
    if not fams:
        raise NotLayeredError(f"no layered family for d2={c.d2} with normal {normal}")
    errors = []
    for fam in fams:
        try:
            return _classify_with(c, fam)
        except NotLayeredError as exc:
            errors.append(str(exc))
    raise NotLayeredError("; ".join(errors))


def _classify_with(c: Configuration, fam: LayerFamily) -> str:
    n = fam.normal
    h = fam.plane_step
    g1, g2 = fam.mesh.generators
    if not c.occupied:
        raise NotLayeredError("empty configuration")
    domain = c.domain
    if isinstance(domain, Quotient):
        g_per = 0
        for p in domain.period:
            g_per = gcd(g_per, abs(dot(n, p)))
        if g_per == 0 or g_per % h:
            raise NotLayeredError(f"period incompatible with plane step {h}")
        length = g_per // h
        mesh_mod_period = lattice_from_generators([g1, g2, *domain.period])

        def in_mesh(w: Site) -> bool:
            return lattice_contains(mesh_mod_period, w)

        values = sorted({dot(n, x) % g_per for x in c.occupied})
        if len(values) != length:
            raise NotLayeredError(
                f"{len(values)} layers present, period demands {length}"
            )
        layers = [
            frozenset(x for x in c.occupied if dot(n, x) % g_per == v)
            for v in values
        ]
    else:
        values = sorted({dot(n, x) for x in c.occupied})
        length = len(values) - 1
        if length < 1:
            raise NotLayeredError("fewer than two layers in window")

        def in_mesh(w: Site) -> bool:
            return fam.mesh.contains(w)

        layers = [
            frozenset(x for x in c.occupied if dot(n, x) == v) for v in values
        ]

    v0 = values[0]
    if values != [v0 + k * h for k in range(len(values))]:
        raise NotLayeredError(f"layer planes {values} are not spaced by {h}")

    # each layer must be a full mesh translate (clipped by the window, when
    # there is one), with the anchor any of its members
    anchors = []
    for layer, v in zip(layers, values):
        anchor = min(layer)
        if isinstance(domain, Quotient):
            footprint = frozenset(
                x
                for x in domain.reps
                if dot(n, x) % g_per == v and in_mesh(sub(x, anchor))
            )
        else:
            footprint = frozenset(
                x
                for x in domain.sites()
                if dot(n, x) == v and in_mesh(sub(x, anchor))
            )
        if layer != footprint:
            raise NotLayeredError(
                f"layer at plane value {v} is not a full mesh translate"
            )
        anchors.append(anchor)

    word = []
    for k in range(length):
        a = anchors[k]
        b = anchors[(k + 1) % len(anchors)]
        step = sub(b, a)
        letters = [
            letter
            for letter, vec in sorted(fam.steps.items())
            if in_mesh(sub(step, vec))
        ]
        if len(letters) != 1:
            raise NotLayeredError(
                f"step {step} matches {len(letters)} shift cosets"
            )
        word.append(letters[0])
    return "".join(word)


# --- mesh selectors and sliding-style shifts --------------------------------


@dataclass(frozen=True)
class LineSelector:
    """Occupied sites on the (torus-wrapped) line anchor + Z*direction."""

    anchor: Site
    direction: Site

    def describe(self) -> str:
        return f"line:{_fmt(self.anchor)}:{_fmt(self.direction)}"

    def select(self, c: Configuration) -> frozenset[Site]:
        if isinstance(c.domain, Quotient):
            lat = lattice_from_generators([self.direction, *c.domain.period])
            return frozenset(
                x
                for x in c.occupied
                if lattice_contains(lat, sub(x, c.domain.reduce(self.anchor)))
            )
        out = []
        for x in c.occupied:
            w = sub(x, self.anchor)
            if cross(w, self.direction) == (0, 0, 0):
                out.append(x)
        return frozenset(out)


@dataclass(frozen=True)
class PlaneSelector:
    """Occupied sites in the (torus-wrapped) plane family through the anchor
    with the given integer normal."""

    anchor: Site
    normal: Site

    def describe(self) -> str:
        return f"plane:{_fmt(self.anchor)}:{_fmt(self.normal)}"

    def select(self, c: Configuration) -> frozenset[Site]:
        n = self.normal
        base = dot(n, self.anchor)
        if isinstance(c.domain, Quotient):
            g = 0
            for p in c.domain.period:
                g = gcd(g, abs(dot(n, p)))
            if g == 0:
                return frozenset(x for x in c.occupied if dot(n, x) == base)
            return frozenset(x for x in c.occupied if (dot(n, x) - base) % g == 0)
        return frozenset(x for x in c.occupied if dot(n, x) == base)


@dataclass(frozen=True)
class MeshSelector:
    """Occupied sites on the translate of a rank-2 mesh through its anchor."""

    mesh: MeshSpec

    def describe(self) -> str:
        g1, g2 = self.mesh.generators
        return f"mesh:{_fmt(self.mesh.anchor)}:{_fmt(g1)}:{_fmt(g2)}"

    def select(self, c: Configuration) -> frozenset[Site]:
        anchor = self.mesh.anchor
        if isinstance(c.domain, Quotient):
            lat = lattice_from_generators([*self.mesh.generators, *c.domain.period])
            return frozenset(
                x for x in c.occupied if lattice_contains(lat, sub(x, anchor))
            )
        return frozenset(
            x for x in c.occupied if self.mesh.contains(sub(x, anchor))
        )


Selector = LineSelector | PlaneSelector | MeshSelector


def _fmt(v: Site) -> str:
    return ",".join(str(x) for x in v)


def mesh_shift(c: Configuration, selector: Selector, t: Site) -> Configuration:
    """Translate the selected occupied sites by t.

    Admissibility of the result is NOT guaranteed; the caller re-validates.
    Collisions with unmoved sites reduce the particle count.
    """
    selected = selector.select(c)
    if not selected:
        raise SelectorEmptyError(f"selector {selector.describe()} matches nothing")
    moved = {c.domain.reduce(add(x, t)) for x in selected}
    return c.with_sites((c.occupied - selected) | moved)


def scaled_basis(basis: Basis, k: int) -> Basis:
    """The basis scaled by an integer factor (index scales by k^3)."""
    return tuple(scale(k, g) for g in basis)  # type: ignore[return-value]
