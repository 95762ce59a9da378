"""Initial normal covers: enumeration of bounded covers and the limit construction.

A normal cover of X is a normal epimorphism onto X.  The initial one is
computed generically in three steps: enumerate all covers within a
per-object size bound up to slice isomorphism, take the wide pullback of
the pool, and shrink the result to the joint fixed points of its slice
endomorphisms until nothing moves.  Initiality of the output is then
verified against the pool (and any covers the caller supplies) rather than
assumed; a failed check raises instead of returning a wrong cover.

The per-object default bound counts, for each object C, the basepoint plus
one element for every pair (arrow C -> D, non-basepoint element of X(D)).
That is exactly the largest size the subobject generated by the non-kernel
part of a cover can reach, so every normal cover receives a slice morphism
from some pool member and the limit construction applies.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Sequence

from .exactness import (
    NormalEpiWitness,
    SubPresheaf,
    embed,
    generated_subpresheaf,
    is_normal_epi,
    kernel,
    retraction_onto,
    subpresheaf,
    wide_pullback,
)
from .fincat import ARROW_MAP, build_arrow, build_terminal
from .presheaf import (
    PointedPresheaf,
    PointedSet,
    PresheafMorphism,
    compose_morphisms,
    identity_morphism,
)


class VerificationError(Exception):
    """A post-hoc uniqueness or agreement check failed."""


@dataclass(frozen=True)
class NormalCover:
    domain: PointedPresheaf
    map: PresheafMorphism
    witness: NormalEpiWitness

    @property
    def base(self) -> PointedPresheaf:
        return self.map.target

    def kernel_sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.witness.kernel.membership)


@dataclass(frozen=True)
class InitialNormalCover:
    cover: NormalCover
    kernel: SubPresheaf

    @property
    def domain(self) -> PointedPresheaf:
        return self.cover.domain

    @property
    def map(self) -> PresheafMorphism:
        return self.cover.map

    def kernel_inclusion(self) -> tuple[PointedPresheaf, PresheafMorphism]:
        return embed(self.kernel)


def normal_cover_from(map: PresheafMorphism) -> NormalCover:
    witness = is_normal_epi(map)
    if witness is None:
        raise ValueError("morphism is not a normal epimorphism")
    return NormalCover(domain=map.source, map=map, witness=witness)


def generation_bound(x: PointedPresheaf) -> tuple[int, ...]:
    """Largest level sizes reachable by the subobject generated by non-kernel elements."""
    shape = x.shape
    return tuple(
        1 + sum(len(shape.hom(c, d)) * (x.size(d) - 1) for d in shape.objects())
        for c in shape.objects()
    )


def _check_bound(x: PointedPresheaf, bound: Sequence[int]) -> tuple[int, ...]:
    bound = tuple(bound)
    if len(bound) != x.shape.num_objects:
        raise ValueError("one bound per shape object is required")
    for c in x.shape.objects():
        if bound[c] < x.size(c):
            raise ValueError(
                f"bound at object {c} is below the level size of the base ({x.size(c)})"
            )
    return bound


def _composition_checks(shape):
    """Triples (g, f, h=g∘f) of non-identity morphisms keyed by their largest index."""
    checks: dict[int, list[tuple[int, int, int]]] = {}
    for g, f in shape.composable_pairs():
        if shape.is_identity(g) or shape.is_identity(f):
            continue
        h = shape.compose(g, f)
        key = max(g, f, h if not shape.is_identity(h) else -1)
        checks.setdefault(key, []).append((g, f, h))
    return checks


def _enumerate_canonical_covers(x: PointedPresheaf, bound: tuple[int, ...]):
    """All covers of x within the bound, in canonical labeling.

    The domain at C is 0..k-1 (the kernel, basepoint first) followed by one
    element per non-basepoint element of X(C); the cover map is the obvious
    projection.  Only restriction entries landing in a kernel are free, and
    partial tables are pruned against every composition triple as soon as
    its three tables are known.
    """
    shape = x.shape
    comp_checks = _composition_checks(shape)
    kappa_ranges = [range(1, bound[c] - x.size(c) + 2) for c in shape.objects()]
    non_id = shape.non_identity_morphisms()

    for kappa in product(*kappa_ranges):
        sizes = [kappa[c] + x.size(c) - 1 for c in shape.objects()]
        map_components = tuple(
            tuple(0 if e < kappa[c] else e - kappa[c] + 1 for e in range(sizes[c]))
            for c in shape.objects()
        )
        tables: dict[int, tuple[int, ...]] = {
            shape.identity[c]: tuple(range(sizes[c])) for c in shape.objects()
        }

        def row_choices(m: int) -> list[tuple[int, ...]]:
            c, d = shape.dom[m], shape.cod[m]
            per_entry = []
            for e in range(sizes[d]):
                if e == 0:
                    per_entry.append((0,))
                elif e < kappa[d]:
                    per_entry.append(tuple(range(kappa[c])))
                else:
                    xr = x.restrict[m][e - kappa[d] + 1]
                    if xr == 0:
                        per_entry.append(tuple(range(kappa[c])))
                    else:
                        per_entry.append((kappa[c] - 1 + xr,))
            return per_entry

        results: list[PointedPresheaf] = []

        def extend(pos: int) -> None:
            if pos == len(non_id):
                restrict = tuple(tables[m] for m in shape.morphisms())
                results.append(
                    PointedPresheaf(
                        shape=shape,
                        levels=tuple(PointedSet(s) for s in sizes),
                        restrict=restrict,
                    )
                )
                return
            m = non_id[pos]
            for combo in product(*row_choices(m)):
                tables[m] = combo
                ok = True
                for g, f, h in comp_checks.get(m, ()):
                    tg, tf, th = tables[g], tables[f], tables[h]
                    if any(tf[tg[e]] != th[e] for e in range(len(th))):
                        ok = False
                        break
                if ok:
                    extend(pos + 1)
                del tables[m]

        extend(0)
        for domain in results:
            yield normal_cover_from(
                PresheafMorphism(source=domain, target=x, components=map_components)
            )


def _slice_candidates(c1: NormalCover, c2: NormalCover, bijective: bool):
    """Per-object candidate component tables for slice morphisms c1 -> c2.

    The non-kernel part is pinned by the two cover maps; only kernel
    elements have freedom.
    """
    shape = c1.domain.shape
    x = c1.base
    kernel1 = c1.witness.kernel.membership
    kernel2 = c2.witness.kernel.membership
    inverse2 = []
    for c in shape.objects():
        inv = [0] * x.size(c)
        for e, v in enumerate(c2.map.components[c]):
            if v != 0:
                inv[v] = e
        inverse2.append(inv)

    per_object = []
    for c in shape.objects():
        free = [e for e in kernel1[c] if e != 0]
        if bijective and len(kernel1[c]) != len(kernel2[c]):
            return None
        pinned = [0] * c1.domain.size(c)
        for e, v in enumerate(c1.map.components[c]):
            if v != 0:
                pinned[e] = inverse2[c][v]
        if bijective:
            targets = [e for e in kernel2[c] if e != 0]
            choices = [
                tuple(zip(free, perm)) for perm in permutations(targets)
            ]
        else:
            choices = [
                tuple(zip(free, combo))
                for combo in product(kernel2[c], repeat=len(free))
            ]
        per_object.append((pinned, choices))
    return per_object


def _slice_search(c1: NormalCover, c2: NormalCover, bijective: bool, first_only: bool):
    from .presheaf import _natural_at, _naturality_checks

    prepared = _slice_candidates(c1, c2, bijective)
    if prepared is None:
        return []
    shape = c1.domain.shape
    checks = _naturality_checks(shape)
    comps: list[tuple[int, ...]] = []
    out: list[PresheafMorphism] = []

    def extend(c: int) -> bool:
        if c == shape.num_objects:
            out.append(PresheafMorphism(c1.domain, c2.domain, tuple(comps)))
            return first_only
        pinned, choices = prepared[c]
        for assignment in choices:
            table = list(pinned)
            for e, v in assignment:
                table[e] = v
            comps.append(tuple(table))
            if all(_natural_at(c1.domain, c2.domain, comps, f) for f in checks[c]):
                if extend(c + 1):
                    comps.pop()
                    return True
            comps.pop()
        return False

    extend(0)
    return out


def slice_morphisms(c1: NormalCover, c2: NormalCover) -> list[PresheafMorphism]:
    """All morphisms of covers over the common base, in deterministic order."""
    if c1.base != c2.base:
        raise ValueError("covers have different bases")
    return _slice_search(c1, c2, bijective=False, first_only=False)


def slice_isomorphism(c1: NormalCover, c2: NormalCover) -> PresheafMorphism | None:
    """An isomorphism of covers over the common base, or None."""
    if c1.base != c2.base:
        raise ValueError("covers have different bases")
    if c1.domain.level_sizes() != c2.domain.level_sizes():
        return None
    found = _slice_search(c1, c2, bijective=True, first_only=True)
    return found[0] if found else None


def solution_set(x: PointedPresheaf, bound: Sequence[int]) -> list[NormalCover]:
    """All normal covers within the bound, one per slice-isomorphism class."""
    bound = _check_bound(x, bound)
    kept: list[NormalCover] = []
    for cand in _enumerate_canonical_covers(x, bound):
        cand.domain.validate()
        if any(
            kept_cover.domain.level_sizes() == cand.domain.level_sizes()
            and slice_isomorphism(kept_cover, cand) is not None
            for kept_cover in kept
        ):
            continue
        kept.append(cand)
    return kept


def core_subcover(cov: NormalCover) -> NormalCover:
    """Smallest subobject of the domain that still covers: the part generated
    by the elements the cover map does not kill."""
    seeds = [
        {e for e, v in enumerate(comp) if v != 0}
        for comp in cov.map.components
    ]
    sub = generated_subpresheaf(cov.domain, seeds)
    _, inclusion = embed(sub)
    return normal_cover_from(compose_morphisms(cov.map, inclusion))


def _fixed_point_membership(cov: NormalCover, endos: list[PresheafMorphism]) -> list[set[int]]:
    return [
        {
            e
            for e in cov.domain.level(c).elements()
            if all(t.components[c][e] == e for t in endos)
        }
        for c in cov.domain.shape.objects()
    ]


def initial_cover_generic(
    x: PointedPresheaf,
    bound: Sequence[int] | None = None,
    verify_against: Sequence[NormalCover] = (),
) -> InitialNormalCover:
    """Initial normal cover of x by pullback of the bounded pool plus shrinking.

    Raises VerificationError when some pool member (or extra cover supplied
    for verification) does not receive exactly one slice morphism from the
    result; that signals an insufficient bound or a bug, never a silently
    wrong answer.
    """
    bound = generation_bound(x) if bound is None else _check_bound(x, bound)
    pool = solution_set(x, bound)
    _, _, composite = wide_pullback([c.map for c in pool])
    current = core_subcover(normal_cover_from(composite))
    while True:
        endos = slice_morphisms(current, current)
        fixed = _fixed_point_membership(current, endos)
        if all(
            len(fixed[c]) == current.domain.size(c)
            for c in current.domain.shape.objects()
        ):
            break
        sub = subpresheaf(current.domain, fixed)
        _, inclusion = embed(sub)
        current = normal_cover_from(compose_morphisms(current.map, inclusion))
    for other in list(pool) + list(verify_against):
        arrows = slice_morphisms(current, other)
        if len(arrows) != 1:
            raise VerificationError(
                "initiality fails: found "
                f"{len(arrows)} slice morphisms to a cover with domain sizes "
                f"{other.domain.level_sizes()} (bound {tuple(bound)})"
            )
    return InitialNormalCover(cover=current, kernel=kernel(current.map))


def closed_form_boolean(x: PointedPresheaf) -> InitialNormalCover:
    """Over the one-object shape the identity on x is already initial."""
    if x.shape != build_terminal():
        raise ValueError("closed form applies to the one-object shape only")
    cov = normal_cover_from(identity_morphism(x))
    return InitialNormalCover(cover=cov, kernel=kernel(cov.map))


def closed_form_arrow(x: PointedPresheaf) -> InitialNormalCover:
    """Direct construction of the initial cover over the two-object arrow shape.

    The domain keeps the upper level of x and extends the lower level by the
    fiber of the basepoint under the structure map; the cover map collapses
    that extra summand back to the basepoint.
    """
    if x.shape != build_arrow():
        raise ValueError("closed form applies to the arrow shape only")
    structure = x.restrict[ARROW_MAP]
    upper, lower = len(structure), x.size(0)
    fiber = [e for e in range(upper) if structure[e] == 0]
    summand_index = {e: lower - 1 + i for i, e in enumerate(fiber) if e != 0}
    new_lower = lower + len(fiber) - 1

    new_structure = tuple(
        summand_index[e] if e in summand_index else structure[e]
        for e in range(upper)
    )
    domain = PointedPresheaf(
        shape=x.shape,
        levels=(PointedSet(new_lower), PointedSet(upper)),
        restrict=(
            tuple(range(new_lower)),
            tuple(range(upper)),
            new_structure,
        ),
    )
    projection = PresheafMorphism(
        source=domain,
        target=x,
        components=(
            tuple(e if e < lower else 0 for e in range(new_lower)),
            tuple(range(upper)),
        ),
    )
    cov = normal_cover_from(projection)
    return InitialNormalCover(cover=cov, kernel=kernel(projection))


def kernel_is_retract(c: InitialNormalCover) -> bool:
    """True when some morphism from the domain restricts to the identity on the kernel."""
    return retraction_onto(c.kernel) is not None
