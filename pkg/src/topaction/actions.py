"""Left-split short exact sequences and their classification.

A sequence here is a split kernel inclusion together with a normal
epimorphism onto a base: inclusion u: L -> A with retraction v: A -> L,
v∘u = id, and projection w: A -> X a normal epimorphism whose kernel is
exactly the image of u.  The set of such sequences up to isomorphism is
computed by brute force, and the bijection with morphisms out of the
initial normal cover domain is realized by an explicit pair of maps whose
round trips are checked, not trusted.

Two isomorphism conventions are supported.  The default ("uvw") asks the
comparison isomorphism to commute with u, v and w; the weaker "uw" mode
drops the retraction condition.  Counts can genuinely differ between the
two (over the one-object shape the weak mode collapses all retractions of
one underlying middle object into a single class).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .cover import InitialNormalCover, NormalCover, normal_cover_from, slice_morphisms
from .exactness import (
    NormalEpiWitness,
    coproduct,
    is_normal_epi,
    pushout,
    retraction_onto,
    wide_pullback,
)
from .presheaf import (
    PointedPresheaf,
    PointedSet,
    PresheafMorphism,
    compose_morphisms,
    hom_enumerate,
    identity_morphism,
    zero_morphism,
)


@dataclass(frozen=True)
class LeftSplitSequence:
    left: PointedPresheaf
    middle: PointedPresheaf
    base: PointedPresheaf
    inclusion: PresheafMorphism
    retraction: PresheafMorphism
    projection: PresheafMorphism
    witness: NormalEpiWitness

    def as_cover(self) -> NormalCover:
        return NormalCover(domain=self.middle, map=self.projection, witness=self.witness)


@dataclass(frozen=True)
class ActionSet:
    base: PointedPresheaf
    left: PointedPresheaf
    classes: tuple[LeftSplitSequence, ...]

    def count(self) -> int:
        return len(self.classes)


def validate_sequence(s: LeftSplitSequence) -> bool:
    """True iff the splitting, kernel and normality conditions all hold."""
    try:
        s.inclusion.validate()
        s.retraction.validate()
        s.projection.validate()
    except ValueError:
        return False
    if s.inclusion.source != s.left or s.inclusion.target != s.middle:
        return False
    if s.retraction.source != s.middle or s.retraction.target != s.left:
        return False
    if s.projection.source != s.middle or s.projection.target != s.base:
        return False
    if compose_morphisms(s.retraction, s.inclusion) != identity_morphism(s.left):
        return False
    witness = is_normal_epi(s.projection)
    if witness is None or witness != s.witness:
        return False
    for c in s.middle.shape.objects():
        image = s.inclusion.components[c]
        if len(set(image)) != len(image):
            return False
        if tuple(sorted(image)) != witness.kernel.membership[c]:
            return False
    return True


def trivial_sequence(x: PointedPresheaf, g: PointedPresheaf) -> LeftSplitSequence:
    """The product action: middle object the wedge of g and x."""
    middle, into_g, into_x = coproduct(g, x)
    retraction = PresheafMorphism(
        source=middle,
        target=g,
        components=tuple(
            tuple(e if e < g.size(c) else 0 for e in range(middle.size(c)))
            for c in middle.shape.objects()
        ),
    )
    projection = PresheafMorphism(
        source=middle,
        target=x,
        components=tuple(
            tuple(0 if e < g.size(c) else e - g.size(c) + 1 for e in range(middle.size(c)))
            for c in middle.shape.objects()
        ),
    )
    witness = is_normal_epi(projection)
    assert witness is not None
    return LeftSplitSequence(
        left=g,
        middle=middle,
        base=x,
        inclusion=into_g,
        retraction=retraction,
        projection=projection,
        witness=witness,
    )


def sequence_isomorphism(
    s1: LeftSplitSequence, s2: LeftSplitSequence, iso_mode: str = "uvw"
) -> PresheafMorphism | None:
    """The comparison isomorphism of the middles, if the sequences match.

    The candidate is forced pointwise: it must agree with the two inclusions
    on the kernel part and with the two projections outside it, so only
    naturality (and, in "uvw" mode, compatibility with the retractions)
    remains to be checked.
    """
    if iso_mode not in ("uvw", "uw"):
        raise ValueError("iso_mode must be 'uvw' or 'uw'")
    if s1.left != s2.left or s1.base != s2.base:
        return None
    if s1.middle.level_sizes() != s2.middle.level_sizes():
        return None
    shape = s1.middle.shape
    comps = []
    for c in shape.objects():
        inverse_u1 = {v: e for e, v in enumerate(s1.inclusion.components[c])}
        inverse_w2 = {}
        for e, v in enumerate(s2.projection.components[c]):
            if v != 0:
                inverse_w2[v] = e
        table = []
        for e in range(s1.middle.size(c)):
            if e in inverse_u1:
                table.append(s2.inclusion.components[c][inverse_u1[e]])
            else:
                table.append(inverse_w2[s1.projection.components[c][e]])
        if len(set(table)) != s2.middle.size(c):
            return None
        comps.append(tuple(table))
    phi = PresheafMorphism(source=s1.middle, target=s2.middle, components=tuple(comps))
    try:
        phi.validate()
    except ValueError:
        return None
    if compose_morphisms(s1.projection, _inverse(phi)) != s2.projection:
        return None
    if iso_mode == "uvw":
        if compose_morphisms(s2.retraction, phi) != s1.retraction:
            return None
    return phi


def _inverse(phi: PresheafMorphism) -> PresheafMorphism:
    comps = []
    for c, comp in enumerate(phi.components):
        inv = [0] * len(comp)
        for e, v in enumerate(comp):
            inv[v] = e
        comps.append(tuple(inv))
    return PresheafMorphism(source=phi.target, target=phi.source, components=tuple(comps))


def enumerate_actions(
    x: PointedPresheaf, g: PointedPresheaf, iso_mode: str = "uvw"
) -> ActionSet:
    """All sequences with base x and left object g, one per isomorphism class.

    Middle objects are built on the fixed underlying sets g(C) + (x(C) minus
    its basepoint), which every valid sequence can be relabeled onto; what is
    enumerated is the free part of the restriction tables together with the
    retraction.
    """
    if x.shape != g.shape:
        raise ValueError("base and left object have different shapes")
    shape = x.shape
    sizes = [g.size(c) + x.size(c) - 1 for c in shape.objects()]
    inclusion_comps = tuple(tuple(range(g.size(c))) for c in shape.objects())
    projection_comps = tuple(
        tuple(0 if e < g.size(c) else e - g.size(c) + 1 for e in range(sizes[c]))
        for c in shape.objects()
    )

    non_id = shape.non_identity_morphisms()
    from .cover import _composition_checks

    comp_checks = _composition_checks(shape)

    def row_choices(m: int):
        c, d = shape.dom[m], shape.cod[m]
        per_entry = []
        for e in range(sizes[d]):
            if e < g.size(d):
                per_entry.append((g.restrict[m][e],))
            else:
                xr = x.restrict[m][e - g.size(d) + 1]
                if xr == 0:
                    per_entry.append(tuple(range(g.size(c))))
                else:
                    per_entry.append((g.size(c) - 1 + xr,))
        return per_entry

    middles: list[PointedPresheaf] = []
    tables: dict[int, tuple[int, ...]] = {
        shape.identity[c]: tuple(range(sizes[c])) for c in shape.objects()
    }

    def extend(pos: int) -> None:
        if pos == len(non_id):
            middles.append(
                PointedPresheaf(
                    shape=shape,
                    levels=tuple(PointedSet(s) for s in sizes),
                    restrict=tuple(tables[m] for m in shape.morphisms()),
                )
            )
            return
        m = non_id[pos]
        for combo in product(*row_choices(m)):
            tables[m] = combo
            ok = True
            for gg, ff, hh in comp_checks.get(m, ()):
                tg, tf, th = tables[gg], tables[ff], tables[hh]
                if any(tf[tg[e]] != th[e] for e in range(len(th))):
                    ok = False
                    break
            if ok:
                extend(pos + 1)
            del tables[m]

    extend(0)

    classes: list[LeftSplitSequence] = []
    for middle in middles:
        inclusion = PresheafMorphism(source=g, target=middle, components=inclusion_comps)
        projection = PresheafMorphism(source=middle, target=x, components=projection_comps)
        witness = is_normal_epi(projection)
        assert witness is not None
        for retraction_tables in _retraction_choices(g, middle):
            retraction = PresheafMorphism(source=middle, target=g, components=retraction_tables)
            candidate = LeftSplitSequence(
                left=g,
                middle=middle,
                base=x,
                inclusion=inclusion,
                retraction=retraction,
                projection=projection,
                witness=witness,
            )
            if not validate_sequence(candidate):
                continue
            if any(
                sequence_isomorphism(kept, candidate, iso_mode) is not None
                for kept in classes
            ):
                continue
            classes.append(candidate)
    return ActionSet(base=x, left=g, classes=tuple(classes))


def _retraction_choices(g: PointedPresheaf, middle: PointedPresheaf):
    """Natural retractions middle -> g fixing the leading g block, lexicographically."""
    shape = g.shape
    from .presheaf import _natural_at, _naturality_checks

    checks = _naturality_checks(shape)
    comps: list[tuple[int, ...]] = []
    out: list[tuple[tuple[int, ...], ...]] = []

    def extend(c: int) -> None:
        if c == shape.num_objects:
            out.append(tuple(comps))
            return
        lead = tuple(range(g.size(c)))
        for tail in product(range(g.size(c)), repeat=middle.size(c) - g.size(c)):
            comps.append(lead + tail)
            if all(_natural_at(middle, g, comps, f) for f in checks[c]):
                extend(c + 1)
            comps.pop()

    extend(0)
    return out


def classifying_morphism(s: LeftSplitSequence, cover: InitialNormalCover) -> PresheafMorphism:
    """The morphism out of the cover domain that represents the sequence.

    Built as the retraction after the unique slice morphism from the cover
    to the sequence's projection; zero or several such slice morphisms mean
    the supplied cover is not initial, which is reported loudly.
    """
    lifts = slice_morphisms(cover.cover, s.as_cover())
    if len(lifts) != 1:
        raise ValueError(
            f"expected exactly one slice morphism from the cover, found {len(lifts)}"
        )
    return compose_morphisms(s.retraction, lifts[0])


def induced_sequence(s: PresheafMorphism, cover: InitialNormalCover) -> LeftSplitSequence:
    """The sequence obtained by gluing the cover domain to the target of s
    along the cover kernel."""
    if s.source != cover.domain:
        raise ValueError("morphism must start at the cover domain")
    g = s.target
    kernel_obj, k = cover.kernel_inclusion()
    sk = compose_morphisms(s, k)
    middle, from_domain, from_g = pushout(k, sk)
    retraction_comps = []
    projection_comps = []
    shape = middle.shape
    for c in shape.objects():
        ret = [0] * middle.size(c)
        proj = [0] * middle.size(c)
        for e in range(cover.domain.size(c)):
            cls = from_domain.components[c][e]
            ret[cls] = s.components[c][e]
            proj[cls] = cover.map.components[c][e]
        for e in range(g.size(c)):
            cls = from_g.components[c][e]
            ret[cls] = e
            proj[cls] = 0
        retraction_comps.append(tuple(ret))
        projection_comps.append(tuple(proj))
    retraction = PresheafMorphism(source=middle, target=g, components=tuple(retraction_comps))
    projection = PresheafMorphism(source=middle, target=cover.map.target, components=tuple(projection_comps))
    witness = is_normal_epi(projection)
    if witness is None:
        raise ValueError("glued projection is not a normal epimorphism; corrupt input")
    seq = LeftSplitSequence(
        left=g,
        middle=middle,
        base=cover.map.target,
        inclusion=from_g,
        retraction=retraction,
        projection=projection,
        witness=witness,
    )
    if not validate_sequence(seq):
        raise ValueError("glued sequence fails validation; corrupt input")
    return seq


def push_forward(s: LeftSplitSequence, h: PresheafMorphism) -> LeftSplitSequence:
    """Transport a sequence along h out of its left object."""
    if h.source != s.left:
        raise ValueError("morphism must start at the left object of the sequence")
    g2 = h.target
    middle, from_old, from_g2 = pushout(s.inclusion, h)
    shape = middle.shape
    retraction_comps = []
    projection_comps = []
    for c in shape.objects():
        ret = [0] * middle.size(c)
        proj = [0] * middle.size(c)
        for e in range(s.middle.size(c)):
            cls = from_old.components[c][e]
            ret[cls] = h.components[c][s.retraction.components[c][e]]
            proj[cls] = s.projection.components[c][e]
        for e in range(g2.size(c)):
            cls = from_g2.components[c][e]
            ret[cls] = e
            proj[cls] = 0
        retraction_comps.append(tuple(ret))
        projection_comps.append(tuple(proj))
    retraction = PresheafMorphism(source=middle, target=g2, components=tuple(retraction_comps))
    projection = PresheafMorphism(source=middle, target=s.base, components=tuple(projection_comps))
    witness = is_normal_epi(projection)
    if witness is None:
        raise ValueError("pushed projection is not a normal epimorphism")
    seq = LeftSplitSequence(
        left=g2,
        middle=middle,
        base=s.base,
        inclusion=from_g2,
        retraction=retraction,
        projection=projection,
        witness=witness,
    )
    if not validate_sequence(seq):
        raise ValueError("pushed sequence fails validation")
    return seq


@dataclass
class RepresentabilityEntry:
    act_count: int
    hom_count: int
    roundtrip_ok: bool


@dataclass
class RepresentabilityReport:
    base: PointedPresheaf
    entries: list[RepresentabilityEntry] = field(default_factory=list)
    naturality_checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and all(
            e.act_count == e.hom_count and e.roundtrip_ok for e in self.entries
        )


def verify_representability(
    x: PointedPresheaf,
    pool: Sequence[PointedPresheaf],
    cover: InitialNormalCover,
    iso_mode: str = "uvw",
) -> RepresentabilityReport:
    """Check that morphisms out of the cover domain classify the actions.

    For every pool member G: the number of sequence classes equals the
    number of morphisms, the hom -> sequence -> hom round trip is the exact
    identity, the sequence -> hom -> sequence round trip lands in the same
    isomorphism class, and classification commutes with transport along
    every morphism between pool members.
    """
    report = RepresentabilityReport(base=x)
    per_g: list[tuple[ActionSet, list[PresheafMorphism]]] = []
    for i, g in enumerate(pool):
        acts = enumerate_actions(x, g, iso_mode)
        homs = hom_enumerate(cover.domain, g)
        roundtrip_ok = True
        for s in homs:
            back = classifying_morphism(induced_sequence(s, cover), cover)
            if back != s:
                roundtrip_ok = False
                report.violations.append(
                    f"pool[{i}]: hom round trip moved a morphism: {s.components} -> {back.components}"
                )
        for seq in acts.classes:
            again = induced_sequence(classifying_morphism(seq, cover), cover)
            if sequence_isomorphism(again, seq, iso_mode) is None:
                roundtrip_ok = False
                report.violations.append(
                    f"pool[{i}]: sequence round trip left the isomorphism class"
                )
        if acts.count() != len(homs):
            report.violations.append(
                f"pool[{i}]: {acts.count()} classes vs {len(homs)} morphisms"
            )
        report.entries.append(
            RepresentabilityEntry(
                act_count=acts.count(), hom_count=len(homs), roundtrip_ok=roundtrip_ok
            )
        )
        per_g.append((acts, homs))
    for i, gi in enumerate(pool):
        alphas = [classifying_morphism(seq, cover) for seq in per_g[i][0].classes]
        for j, gj in enumerate(pool):
            for h in hom_enumerate(gi, gj):
                for seq, alpha in zip(per_g[i][0].classes, alphas):
                    lhs = classifying_morphism(push_forward(seq, h), cover)
                    rhs = compose_morphisms(h, alpha)
                    report.naturality_checked += 1
                    if lhs != rhs:
                        report.violations.append(
                            f"naturality fails from pool[{i}] to pool[{j}] along {h.components}"
                        )
    return report


def necessary_condition(x: PointedPresheaf | None, family: Sequence[NormalCover]) -> bool:
    """Pointwise-epimorphism check for the pullback of covers with retract kernels.

    Raises if some member's kernel admits no retraction or does not cover x;
    returns whether the combined projection onto the base is a levelwise
    surjection.  Pass None to take the base from the family.
    """
    if not family:
        raise ValueError("family must be nonempty")
    if x is None:
        x = family[0].base
    for member in family:
        if member.base != x:
            raise ValueError("family member does not cover the given base")
        if retraction_onto(member.witness.kernel) is None:
            raise ValueError("family member kernel is not a retract")
    _, _, composite = wide_pullback([c.map for c in family])
    return all(
        len(set(composite.components[c])) == x.size(c) for c in x.shape.objects()
    )
