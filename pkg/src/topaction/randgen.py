"""Seeded random presheaves, morphisms and normal covers for verification runs.

Sampling is deterministic for a given random.Random instance.  Presheaves
over shapes with composable non-identity arrows are not sampled table by
table (random tables are almost never functorial); they are assembled from
building blocks that are functorial by construction: representables,
constants killed along chosen arrows, wedges, products and quotients.
"""

from __future__ import annotations

from random import Random

from .cover import NormalCover, normal_cover_from
from .exactness import (
    cokernel,
    coproduct,
    embed,
    generated_subpresheaf,
    wide_pullback,
)
from .fincat import FiniteCategory
from .presheaf import (
    PointedPresheaf,
    PointedSet,
    PresheafMorphism,
    zero_morphism,
    zero_object,
    _natural_at,
    _naturality_checks,
)


def representable(shape: FiniteCategory, at: int) -> PointedPresheaf:
    """Arrows into a fixed object, with a disjoint basepoint added levelwise."""
    arrows = [shape.hom(c, at) for c in shape.objects()]
    levels = tuple(PointedSet(1 + len(arrows[c])) for c in shape.objects())
    restrict = []
    for m in shape.morphisms():
        c, d = shape.dom[m], shape.cod[m]
        index = {f: i + 1 for i, f in enumerate(arrows[c])}
        restrict.append(
            (0,) + tuple(index[shape.compose(f, m)] for f in arrows[d])
        )
    return PointedPresheaf(shape=shape, levels=levels, restrict=tuple(restrict))


def _random_block(shape: FiniteCategory, rng: Random) -> PointedPresheaf:
    kind = rng.randrange(3)
    if kind == 0:
        return zero_object(shape)
    if kind == 1:
        return representable(shape, rng.randrange(shape.num_objects))
    block = representable(shape, rng.randrange(shape.num_objects))
    seeds = [
        {e for e in block.level(c).elements() if rng.random() < 0.5}
        for c in shape.objects()
    ]
    inner, _ = embed(generated_subpresheaf(block, seeds))
    return inner


def random_presheaf(
    shape: FiniteCategory, rng: Random, max_size: int = 5, steps: int = 3
) -> PointedPresheaf:
    """A random functorial presheaf with level sizes capped at max_size."""
    current = _random_block(shape, rng)
    for _ in range(steps):
        op = rng.randrange(3)
        other = _random_block(shape, rng)
        if op == 0:
            candidate, _, _ = coproduct(current, other)
        elif op == 1:
            zero = zero_object(shape)
            candidate, _, _ = wide_pullback(
                [zero_morphism(current, zero), zero_morphism(other, zero)]
            )
        else:
            target = random_morphism(current, _random_block(shape, rng), rng)
            candidate = cokernel(target).target
        if all(candidate.size(c) <= max_size for c in shape.objects()):
            current = candidate
    if any(current.size(c) > max_size for c in shape.objects()):
        seeds = [
            set(rng.sample(range(current.size(c)), k=min(max_size - 1, current.size(c) - 1)))
            for c in shape.objects()
        ]
        current, _ = embed(generated_subpresheaf(current, seeds))
    if any(current.size(c) > max_size for c in shape.objects()):
        current = zero_object(shape)
    return current


def random_morphism(
    a: PointedPresheaf, b: PointedPresheaf, rng: Random
) -> PresheafMorphism:
    """A random natural morphism a -> b: randomized backtracking, first hit.

    The zero morphism is always a solution, so the search cannot fail.
    """
    shape = a.shape
    checks = _naturality_checks(shape)
    comps: list[tuple[int, ...]] = []

    def extend(c: int) -> bool:
        if c == shape.num_objects:
            return True
        slots = []
        for _ in range(a.size(c) - 1):
            values = list(range(b.size(c)))
            rng.shuffle(values)
            if 0 not in values[:1]:
                # keep the basepoint early so dead branches fail fast
                values.remove(0)
                values.insert(rng.randrange(2), 0)
            slots.append(values)

        def fill(table: list[int], i: int) -> bool:
            if i == len(slots):
                comps.append(tuple(table))
                if all(_natural_at(a, b, comps, f) for f in checks[c]):
                    if extend(c + 1):
                        return True
                comps.pop()
                return False
            for v in slots[i]:
                table.append(v)
                if fill(table, i + 1):
                    return True
                table.pop()
            return False

        return fill([0], 0)

    if not extend(0):
        return zero_morphism(a, b)
    return PresheafMorphism(source=a, target=b, components=tuple(comps))


def random_normal_epi_onto(
    x: PointedPresheaf, rng: Random, kernel_size: int = 3
) -> PresheafMorphism:
    """A random normal epimorphism onto x.

    The domain is the wedge of a random kernel presheaf with the non-basepoint
    part of x; on shapes without composable non-identity arrows the entries
    sent into the kernel are additionally twisted at random.
    """
    shape = x.shape
    kernel_part = random_presheaf(shape, rng, max_size=kernel_size)
    sizes = [kernel_part.size(c) + x.size(c) - 1 for c in shape.objects()]
    twistable = not any(
        not shape.is_identity(g) and not shape.is_identity(f)
        for g, f in shape.composable_pairs()
    )
    restrict = []
    for m in shape.morphisms():
        c, d = shape.dom[m], shape.cod[m]
        table = list(kernel_part.restrict[m])
        for e in x.level(d).non_basepoint():
            v = x.restrict[m][e]
            if v != 0:
                table.append(kernel_part.size(c) - 1 + v)
            elif twistable and not shape.is_identity(m):
                table.append(rng.randrange(kernel_part.size(c)))
            else:
                table.append(0)
        restrict.append(tuple(table))
    domain = PointedPresheaf(
        shape=shape,
        levels=tuple(PointedSet(s) for s in sizes),
        restrict=tuple(restrict),
    )
    components = tuple(
        tuple(
            0 if e < kernel_part.size(c) else e - kernel_part.size(c) + 1
            for e in range(sizes[c])
        )
        for c in shape.objects()
    )
    return PresheafMorphism(source=domain, target=x, components=components)


def random_normal_cover(
    x: PointedPresheaf, rng: Random, kernel_size: int = 3
) -> NormalCover:
    return normal_cover_from(random_normal_epi_onto(x, rng, kernel_size))
