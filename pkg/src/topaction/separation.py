"""Lower bounds on the codomain of any common factorization of separating maps.

Over the arrow shape, take the base whose upper level is {basepoint, 1..k}
and whose lower level is a single point.  Its initial normal cover domain
is the identity arrow on the upper level, and for every pair n != m there
is a witness morphism out of it that keeps n and m apart at the lower
level while killing everything else.  Any single morphism through which
all witnesses factor must therefore be injective at the lower level, so
the smallest codomain that works has exactly k+1 points: the requirement
grows without bound with k.

The search for a common factorization only has to range over quotients of
the lower level: whether a witness factors through a morphism depends on
nothing but the partition its lower component induces, because the upper
levels of all witnesses agree and the factoring map can always be taken to
be the induced map on partition classes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cover import InitialNormalCover, closed_form_arrow
from .fincat import build_arrow
from .presheaf import PointedPresheaf, PointedSet, PresheafMorphism


@dataclass(frozen=True)
class SeparationWitness:
    low: int
    high: int
    target: PointedPresheaf
    morphism: PresheafMorphism


@dataclass(frozen=True)
class SeparationInstance:
    k: int
    cover: InitialNormalCover
    witnesses: tuple[SeparationWitness, ...]


def build_base(k: int) -> PointedPresheaf:
    """The arrow-shape object with upper level {0..k} and trivial lower level."""
    if k < 2:
        raise ValueError("at least two separable points are required")
    return PointedPresheaf(
        shape=build_arrow(),
        levels=(PointedSet(1), PointedSet(k + 1)),
        restrict=((0,), tuple(range(k + 1)), (0,) * (k + 1)),
    )


def build_separation(k: int) -> SeparationInstance:
    """The cover of the truncated base together with all pair witnesses."""
    base = build_base(k)
    cover = closed_form_arrow(base)
    witnesses = []
    for low in range(1, k + 1):
        for high in range(low + 1, k + 1):
            lower_component = tuple(
                1 if e == low else 2 if e == high else 0 for e in range(k + 1)
            )
            target = PointedPresheaf(
                shape=base.shape,
                levels=(PointedSet(3), PointedSet(k + 1)),
                restrict=((0, 1, 2), tuple(range(k + 1)), lower_component),
            )
            morphism = PresheafMorphism(
                source=cover.domain,
                target=target,
                components=(lower_component, tuple(range(k + 1))),
            )
            morphism.validate()
            witnesses.append(SeparationWitness(low=low, high=high, target=target, morphism=morphism))
    return SeparationInstance(k=k, cover=cover, witnesses=tuple(witnesses))


def _partitions(n: int):
    """Set partitions of range(n) as block-index vectors, in restricted-growth order."""
    assignment = [0] * n

    def extend(i: int, blocks: int):
        if i == n:
            yield tuple(assignment)
            return
        for b in range(blocks + 1):
            assignment[i] = b
            yield from extend(i + 1, blocks + (1 if b == blocks else 0))

    yield from extend(0, 0)


def partition_factors_witnesses(assignment: tuple[int, ...], instance: SeparationInstance) -> bool:
    """Whether every witness's lower component is constant on each block."""
    for witness in instance.witnesses:
        table = witness.morphism.components[0]
        seen: dict[int, int] = {}
        for element, block in enumerate(assignment):
            value = table[element]
            if block in seen and seen[block] != value:
                return False
            seen.setdefault(block, value)
    return True


def factoring_partitions(k: int) -> list[tuple[int, ...]]:
    instance = build_separation(k)
    return [
        assignment
        for assignment in _partitions(k + 1)
        if partition_factors_witnesses(assignment, instance)
    ]


def min_separator_size(k: int) -> int:
    """Smallest lower-level size through which every pair witness factors."""
    instance = build_separation(k)
    best: int | None = None
    for assignment in _partitions(k + 1):
        if not partition_factors_witnesses(assignment, instance):
            continue
        blocks = max(assignment) + 1
        if best is None or blocks < best:
            best = blocks
    assert best is not None
    return best
