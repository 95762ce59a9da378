"""Kernels, cokernels, normal epimorphisms and pointwise (co)limits.

Everything is computed level by level in finite pointed sets.  A normal
epimorphism is a levelwise surjection that is injective outside the
preimage of the basepoint; quotient constructions pick the minimal-index
member of each class as its canonical representative so that results are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .presheaf import (
    PointedPresheaf,
    PointedSet,
    PresheafMorphism,
    compose_morphisms,
    zero_object,
)


@dataclass(frozen=True)
class SubPresheaf:
    ambient: PointedPresheaf
    membership: tuple[tuple[int, ...], ...]

    def contains(self, c: int, e: int) -> bool:
        return e in self.membership[c]

    def validate(self) -> None:
        shape = self.ambient.shape
        if len(self.membership) != shape.num_objects:
            raise ValueError("one member list per shape object is required")
        for c, members in enumerate(self.membership):
            if not members or members[0] != 0:
                raise ValueError(f"subobject at {c} must contain the basepoint first")
            if list(members) != sorted(set(members)):
                raise ValueError(f"membership at {c} must be strictly sorted")
            if members[-1] >= self.ambient.size(c):
                raise ValueError(f"membership at {c} leaves the level")
        member_sets = [set(m) for m in self.membership]
        for f in shape.non_identity_morphisms():
            c, d = shape.dom[f], shape.cod[f]
            table = self.ambient.restrict[f]
            for e in self.membership[d]:
                if table[e] not in member_sets[c]:
                    raise ValueError(f"subobject not closed under restriction along {f}")


def subpresheaf(ambient: PointedPresheaf, members: list[set[int]]) -> SubPresheaf:
    sub = SubPresheaf(
        ambient=ambient,
        membership=tuple(tuple(sorted(m | {0})) for m in members),
    )
    sub.validate()
    return sub


def embed(sub: SubPresheaf) -> tuple[PointedPresheaf, PresheafMorphism]:
    """The subobject as a presheaf of its own, with its inclusion."""
    ambient = sub.ambient
    shape = ambient.shape
    index = [{e: i for i, e in enumerate(members)} for members in sub.membership]
    levels = tuple(PointedSet(len(members)) for members in sub.membership)
    restrict = tuple(
        tuple(
            index[shape.dom[f]][ambient.restrict[f][e]]
            for e in sub.membership[shape.cod[f]]
        )
        for f in shape.morphisms()
    )
    inner = PointedPresheaf(shape=shape, levels=levels, restrict=restrict)
    inclusion = PresheafMorphism(source=inner, target=ambient, components=sub.membership)
    return inner, inclusion


def generated_subpresheaf(p: PointedPresheaf, seeds: list[set[int]]) -> SubPresheaf:
    """Smallest subobject containing the seeds: closure under all restrictions."""
    members = [set(s) | {0} for s in seeds]
    changed = True
    while changed:
        changed = False
        for f in p.shape.non_identity_morphisms():
            c, d = p.shape.dom[f], p.shape.cod[f]
            table = p.restrict[f]
            for e in list(members[d]):
                v = table[e]
                if v not in members[c]:
                    members[c].add(v)
                    changed = True
    return subpresheaf(p, members)


def image_subpresheaf(f: PresheafMorphism) -> SubPresheaf:
    return subpresheaf(f.target, [set(comp) for comp in f.components])


def kernel(f: PresheafMorphism) -> SubPresheaf:
    """Levelwise preimage of the basepoint; closure is verified, not assumed."""
    members = [
        {e for e, v in enumerate(comp) if v == 0} for comp in f.components
    ]
    sub = SubPresheaf(
        ambient=f.source,
        membership=tuple(tuple(sorted(m)) for m in members),
    )
    sub.validate()
    return sub


def kernel_inclusion(f: PresheafMorphism) -> tuple[PointedPresheaf, PresheafMorphism]:
    return embed(kernel(f))


def cokernel(f: PresheafMorphism) -> PresheafMorphism:
    """Quotient of the target collapsing the image of f to the basepoint."""
    tgt = f.target
    shape = tgt.shape
    image = [set(comp) | {0} for comp in f.components]
    keep = [[e for e in tgt.level(c).elements() if e == 0 or e not in image[c]]
            for c in shape.objects()]
    proj = []
    for c in shape.objects():
        table = [0] * tgt.size(c)
        for i, e in enumerate(keep[c]):
            table[e] = i
        proj.append(tuple(table))
    levels = tuple(PointedSet(len(keep[c])) for c in shape.objects())
    restrict = []
    for m in shape.morphisms():
        c, d = shape.dom[m], shape.cod[m]
        restrict.append(tuple(proj[c][tgt.restrict[m][e]] for e in keep[d]))
    quotient = PointedPresheaf(shape=shape, levels=levels, restrict=tuple(restrict))
    return PresheafMorphism(source=tgt, target=quotient, components=tuple(proj))


@dataclass(frozen=True)
class NormalEpiWitness:
    morphism: PresheafMorphism
    kernel: SubPresheaf

    def validate(self) -> None:
        f = self.morphism
        if kernel(f) != self.kernel:
            raise ValueError("witness kernel is not the basepoint preimage")
        for c, comp in enumerate(f.components):
            if set(comp) != set(f.target.level(c).elements()):
                raise ValueError(f"component at {c} is not surjective")
            seen: dict[int, int] = {}
            for e, v in enumerate(comp):
                if v == 0:
                    continue
                if v in seen and seen[v] != e:
                    raise ValueError(f"component at {c} collides outside the kernel")
                seen[v] = e


def is_normal_epi(f: PresheafMorphism) -> NormalEpiWitness | None:
    """Witness iff f is a levelwise surjection injective outside its kernel."""
    for c, comp in enumerate(f.components):
        hit = set(comp)
        if len(hit) != f.target.size(c):
            return None
        non_kernel = [v for v in comp if v != 0]
        if len(non_kernel) != len(set(non_kernel)):
            return None
    return NormalEpiWitness(morphism=f, kernel=kernel(f))


def is_normal_epi_by_definition(f: PresheafMorphism) -> bool:
    """True iff f agrees with the cokernel of its own kernel inclusion.

    The independent route: form the quotient q of the source by the kernel
    of f and check that e |-> f(e) descends to a levelwise bijection from
    the quotient onto the target.
    """
    _, inclusion = kernel_inclusion(f)
    q = cokernel(inclusion)
    quotient = q.target
    for c in f.source.shape.objects():
        induced: dict[int, int] = {}
        for e in f.source.level(c).elements():
            cls, val = q.components[c][e], f.components[c][e]
            if cls in induced and induced[cls] != val:
                return False
            induced[cls] = val
        values = [induced[cls] for cls in quotient.level(c).elements()]
        if sorted(values) != list(f.target.level(c).elements()):
            return False
    return True


def equalizer(u: PresheafMorphism, v: PresheafMorphism) -> tuple[SubPresheaf, PresheafMorphism]:
    """Inclusion of the levelwise agreement subobject of the common source."""
    if u.source != v.source or u.target != v.target:
        raise ValueError("equalizer needs a parallel pair")
    sub = subpresheaf(
        u.source,
        [
            {e for e in u.source.level(c).elements() if u.components[c][e] == v.components[c][e]}
            for c in u.source.shape.objects()
        ],
    )
    _, inclusion = embed(sub)
    return sub, inclusion


def coproduct(a: PointedPresheaf, b: PointedPresheaf) -> tuple[PointedPresheaf, PresheafMorphism, PresheafMorphism]:
    """Levelwise wedge: disjoint union with the basepoints identified."""
    if a.shape != b.shape:
        raise ValueError("summands have different shapes")
    shape = a.shape
    levels = tuple(PointedSet(a.size(c) + b.size(c) - 1) for c in shape.objects())
    into_a = tuple(tuple(range(a.size(c))) for c in shape.objects())
    into_b = tuple(
        (0,) + tuple(a.size(c) - 1 + e for e in b.level(c).non_basepoint())
        for c in shape.objects()
    )
    restrict = []
    for m in shape.morphisms():
        c, d = shape.dom[m], shape.cod[m]
        ra, rb = a.restrict[m], b.restrict[m]
        table = list(ra)
        table += [into_b[c][rb[e]] for e in b.level(d).non_basepoint()]
        restrict.append(tuple(table))
    q = PointedPresheaf(shape=shape, levels=levels, restrict=tuple(restrict))
    return (
        q,
        PresheafMorphism(source=a, target=q, components=into_a),
        PresheafMorphism(source=b, target=q, components=into_b),
    )


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def pushout(k: PresheafMorphism, s: PresheafMorphism) -> tuple[PointedPresheaf, PresheafMorphism, PresheafMorphism]:
    """Pointwise pushout of a span: glue the two targets along the common source.

    Elements of the result are classes of the wedge of the two targets under
    k(x) ~ s(x); classes are ordered by their minimal member, first-target
    slots first, so the basepoint class keeps index 0.
    """
    if k.source != s.source:
        raise ValueError("pushout needs a common source")
    shape = k.source.shape
    a, b = k.target, s.target
    members: list[list[list[int]]] = []
    slot_maps_a: list[tuple[int, ...]] = []
    slot_maps_b: list[tuple[int, ...]] = []
    for c in shape.objects():
        na, nb = a.size(c), b.size(c)
        uf = _UnionFind(na + nb)
        uf.union(0, na)
        for x in k.source.level(c).elements():
            uf.union(k.components[c][x], na + s.components[c][x])
        roots = sorted({uf.find(t) for t in range(na + nb)})
        idx = {r: i for i, r in enumerate(roots)}
        grouped: list[list[int]] = [[] for _ in roots]
        for t in range(na + nb):
            grouped[idx[uf.find(t)]].append(t)
        members.append(grouped)
        slot_maps_a.append(tuple(idx[uf.find(e)] for e in range(na)))
        slot_maps_b.append(tuple(idx[uf.find(na + e)] for e in range(nb)))
    levels = tuple(PointedSet(len(members[c])) for c in shape.objects())

    def slot_restrict(m: int, slot: int) -> int:
        c, d = shape.dom[m], shape.cod[m]
        na_d = a.size(d)
        if slot < na_d:
            return slot_maps_a[c][a.restrict[m][slot]]
        return slot_maps_b[c][b.restrict[m][slot - na_d]]

    restrict = []
    for m in shape.morphisms():
        d = shape.cod[m]
        table = []
        for slots in members[d]:
            values = {slot_restrict(m, slot) for slot in slots}
            if len(values) != 1:
                raise ValueError("glued restriction is not well defined; inputs are not natural")
            table.append(values.pop())
        restrict.append(tuple(table))
    q = PointedPresheaf(shape=shape, levels=levels, restrict=tuple(restrict))
    return (
        q,
        PresheafMorphism(source=a, target=q, components=tuple(slot_maps_a)),
        PresheafMorphism(source=b, target=q, components=tuple(slot_maps_b)),
    )


def wide_pullback(family: list[PresheafMorphism]) -> tuple[PointedPresheaf, list[PresheafMorphism], PresheafMorphism]:
    """Limit of a nonempty family over its common target.

    Levelwise the set of tuples with a common image; tuples are ordered
    lexicographically, which keeps the all-basepoints tuple at index 0.
    Returns the apex, the projections and the composite onto the target.
    """
    if not family:
        raise ValueError("wide pullback needs a nonempty family")
    x = family[0].target
    if any(f.target != x for f in family):
        raise ValueError("family members have different targets")
    shape = x.shape
    tuples: list[list[tuple[int, ...]]] = []
    to_target: list[tuple[int, ...]] = []
    for c in shape.objects():
        fibers = [
            [[e for e in f.source.level(c).elements() if f.components[c][e] == v]
             for v in x.level(c).elements()]
            for f in family
        ]
        level_tuples = []
        level_values = []
        for v in x.level(c).elements():
            for combo in product(*(fib[v] for fib in fibers)):
                level_tuples.append(combo)
                level_values.append(v)
        order = sorted(range(len(level_tuples)), key=lambda i: level_tuples[i])
        tuples.append([level_tuples[i] for i in order])
        to_target.append(tuple(level_values[i] for i in order))
    index = [{t: i for i, t in enumerate(level)} for level in tuples]
    levels = tuple(PointedSet(len(level)) for level in tuples)
    restrict = []
    for m in shape.morphisms():
        c, d = shape.dom[m], shape.cod[m]
        restrict.append(
            tuple(
                index[c][tuple(family[i].source.restrict[m][t[i]] for i in range(len(family)))]
                for t in tuples[d]
            )
        )
    apex = PointedPresheaf(shape=shape, levels=levels, restrict=tuple(restrict))
    projections = [
        PresheafMorphism(
            source=apex,
            target=f.source,
            components=tuple(tuple(t[i] for t in tuples[c]) for c in shape.objects()),
        )
        for i, f in enumerate(family)
    ]
    composite = PresheafMorphism(source=apex, target=x, components=tuple(to_target))
    return apex, projections, composite


def retraction_onto(sub: SubPresheaf) -> PresheafMorphism | None:
    """A morphism ambient -> sub restricting to the identity on sub, if any."""
    inner, inclusion = embed(sub)
    ambient = sub.ambient
    shape = ambient.shape
    pinned = [
        {e: i for i, e in enumerate(sub.membership[c])}
        for c in shape.objects()
    ]
    from .presheaf import _natural_at, _naturality_checks

    checks = _naturality_checks(shape)
    comps: list[tuple[int, ...]] = []

    def extend(c: int) -> PresheafMorphism | None:
        if c == shape.num_objects:
            return PresheafMorphism(ambient, inner, tuple(comps))
        free = [e for e in ambient.level(c).elements() if e not in pinned[c]]
        for combo in product(range(inner.size(c)), repeat=len(free)):
            table = [0] * ambient.size(c)
            for e, i in pinned[c].items():
                table[e] = i
            for e, v in zip(free, combo):
                table[e] = v
            comps.append(tuple(table))
            if all(_natural_at(ambient, inner, comps, f) for f in checks[c]):
                found = extend(c + 1)
                if found is not None:
                    return found
            comps.pop()
        return None

    found = extend(0)
    if found is not None:
        assert compose_morphisms(found, inclusion).components == tuple(
            tuple(range(inner.size(c))) for c in shape.objects()
        )
    return found


def zero_subpresheaf(p: PointedPresheaf) -> SubPresheaf:
    return subpresheaf(p, [set() for _ in p.shape.objects()])


def coproduct_is_total(q: PointedPresheaf, a: PointedPresheaf, b: PointedPresheaf) -> bool:
    """Size sanity for wedges: |Q(C)| = |A(C)| + |B(C)| - 1 at every level."""
    return all(
        q.size(c) == a.size(c) + b.size(c) - 1 for c in q.shape.objects()
    )
