"""Pointed presheaves of finite pointed sets with explicit restriction tables.

Every level is the pointed set {0, .., size-1} with 0 as the basepoint.
Restriction along a shape morphism f: C -> D is contravariant: a table over
the level at D with values in the level at C.  Morphism components go the
covariant way, one pointed map per object.

All values are immutable; every operation here is a pure function, and the
enumeration operations return results in a fixed lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .fincat import FiniteCategory


@dataclass(frozen=True)
class PointedSet:
    size: int

    @property
    def basepoint(self) -> int:
        return 0

    def elements(self) -> range:
        return range(self.size)

    def non_basepoint(self) -> range:
        return range(1, self.size)


@dataclass(frozen=True)
class PointedPresheaf:
    shape: FiniteCategory
    levels: tuple[PointedSet, ...]
    restrict: tuple[tuple[int, ...], ...]

    def level(self, c: int) -> PointedSet:
        return self.levels[c]

    def size(self, c: int) -> int:
        return self.levels[c].size

    def level_sizes(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.levels)

    def restrict_along(self, f: int, e: int) -> int:
        return self.restrict[f][e]

    def validate(self) -> None:
        shape = self.shape
        if len(self.levels) != shape.num_objects:
            raise ValueError("one level per shape object is required")
        if any(lv.size < 1 for lv in self.levels):
            raise ValueError("levels must contain the basepoint")
        if len(self.restrict) != shape.num_morphisms:
            raise ValueError("one restriction table per shape morphism is required")
        for f in shape.morphisms():
            table = self.restrict[f]
            c, d = shape.dom[f], shape.cod[f]
            if len(table) != self.size(d):
                raise ValueError(f"restriction table along {f} has wrong length")
            if any(not 0 <= v < self.size(c) for v in table):
                raise ValueError(f"restriction table along {f} leaves the level")
            if table[0] != 0:
                raise ValueError(f"restriction along {f} moves the basepoint")
        for c in shape.objects():
            i = shape.identity[c]
            if self.restrict[i] != tuple(range(self.size(c))):
                raise ValueError(f"restriction along the identity of {c} is not the identity")
        for g, f in shape.composable_pairs():
            h = shape.compose(g, f)
            rg, rf, rh = self.restrict[g], self.restrict[f], self.restrict[h]
            if any(rf[rg[e]] != rh[e] for e in range(len(rh))):
                raise ValueError(f"functoriality fails at the pair ({g}, {f})")


@dataclass(frozen=True)
class PresheafMorphism:
    source: PointedPresheaf
    target: PointedPresheaf
    components: tuple[tuple[int, ...], ...]

    def apply(self, c: int, e: int) -> int:
        return self.components[c][e]

    def validate(self) -> None:
        src, tgt = self.source, self.target
        if src.shape != tgt.shape:
            raise ValueError("source and target have different shapes")
        shape = src.shape
        if len(self.components) != shape.num_objects:
            raise ValueError("one component per shape object is required")
        for c in shape.objects():
            comp = self.components[c]
            if len(comp) != src.size(c):
                raise ValueError(f"component at {c} has wrong length")
            if any(not 0 <= v < tgt.size(c) for v in comp):
                raise ValueError(f"component at {c} leaves the target level")
            if comp[0] != 0:
                raise ValueError(f"component at {c} moves the basepoint")
        for f in shape.non_identity_morphisms():
            c, d = shape.dom[f], shape.cod[f]
            comp_c, comp_d = self.components[c], self.components[d]
            rs, rt = src.restrict[f], tgt.restrict[f]
            if any(comp_c[rs[e]] != rt[comp_d[e]] for e in src.level(d).elements()):
                raise ValueError(f"naturality fails along morphism {f}")


def zero_object(shape: FiniteCategory) -> PointedPresheaf:
    """The presheaf with a single point at every level; initial and terminal."""
    return PointedPresheaf(
        shape=shape,
        levels=tuple(PointedSet(1) for _ in shape.objects()),
        restrict=tuple((0,) for _ in shape.morphisms()),
    )


def identity_morphism(a: PointedPresheaf) -> PresheafMorphism:
    return PresheafMorphism(
        source=a,
        target=a,
        components=tuple(tuple(range(a.size(c))) for c in a.shape.objects()),
    )


def zero_morphism(a: PointedPresheaf, b: PointedPresheaf) -> PresheafMorphism:
    """The morphism collapsing everything to the basepoint."""
    if a.shape != b.shape:
        raise ValueError("source and target have different shapes")
    return PresheafMorphism(
        source=a,
        target=b,
        components=tuple((0,) * a.size(c) for c in a.shape.objects()),
    )


def compose_morphisms(second: PresheafMorphism, first: PresheafMorphism) -> PresheafMorphism:
    """second ∘ first."""
    if first.target != second.source:
        raise ValueError("morphisms are not composable")
    return PresheafMorphism(
        source=first.source,
        target=second.target,
        components=tuple(
            tuple(second.components[c][v] for v in first.components[c])
            for c in range(len(first.components))
        ),
    )


from functools import lru_cache


@lru_cache(maxsize=None)
def _naturality_checks(shape: FiniteCategory) -> tuple[tuple[int, ...], ...]:
    """For each object c, the non-identity morphisms whose endpoints are <= c."""
    checks: list[list[int]] = [[] for _ in shape.objects()]
    for f in shape.non_identity_morphisms():
        c, d = shape.dom[f], shape.cod[f]
        checks[max(c, d)].append(f)
    return tuple(tuple(fs) for fs in checks)


def _natural_at(a, b, comps, f) -> bool:
    c, d = a.shape.dom[f], a.shape.cod[f]
    comp_c, comp_d = comps[c], comps[d]
    rs, rt = a.restrict[f], b.restrict[f]
    return all(comp_c[rs[e]] == rt[comp_d[e]] for e in range(a.size(d)))


def hom_enumerate(a: PointedPresheaf, b: PointedPresheaf) -> list[PresheafMorphism]:
    """All morphisms a -> b, in lexicographic order of their component tables.

    Components are assigned object by object and each partial assignment is
    pruned against every naturality square whose two objects are already
    assigned, so the full product of component tables is never materialized.
    """
    if a.shape != b.shape:
        raise ValueError("source and target have different shapes")
    shape = a.shape
    checks = _naturality_checks(shape)
    comps: list[tuple[int, ...]] = []
    out: list[PresheafMorphism] = []

    def extend(c: int) -> None:
        if c == shape.num_objects:
            out.append(PresheafMorphism(a, b, tuple(comps)))
            return
        for tail in product(range(b.size(c)), repeat=a.size(c) - 1):
            comps.append((0,) + tail)
            if all(_natural_at(a, b, comps, f) for f in checks[c]):
                extend(c + 1)
            comps.pop()

    extend(0)
    return out


def is_isomorphism(m: PresheafMorphism) -> bool:
    """True when every component is a bijection."""
    return all(
        len(set(comp)) == len(comp) == m.target.size(c)
        for c, comp in enumerate(m.components)
    )


def isomorphic(a: PointedPresheaf, b: PointedPresheaf) -> PresheafMorphism | None:
    """Some isomorphism a -> b, or None; exhaustive over component bijections."""
    if a.shape != b.shape:
        raise ValueError("source and target have different shapes")
    if a.level_sizes() != b.level_sizes():
        return None
    shape = a.shape
    checks = _naturality_checks(shape)
    comps: list[tuple[int, ...]] = []

    def extend(c: int) -> PresheafMorphism | None:
        if c == shape.num_objects:
            return PresheafMorphism(a, b, tuple(comps))
        for perm in _pointed_permutations(a.size(c)):
            comps.append(perm)
            if all(_natural_at(a, b, comps, f) for f in checks[c]):
                found = extend(c + 1)
                if found is not None:
                    return found
            comps.pop()
        return None

    return extend(0)


def _pointed_permutations(n: int):
    from itertools import permutations

    for tail in permutations(range(1, n)):
        yield (0,) + tail
