from random import Random

import pytest
from hypothesis import given, strategies as st

from helpers import ARROW, TERMINAL, all_arrow_presheaves, arrow_presheaf, terminal_presheaf
from topaction.actions import (
    classifying_morphism,
    enumerate_actions,
    induced_sequence,
    necessary_condition,
    push_forward,
    sequence_isomorphism,
    trivial_sequence,
    validate_sequence,
    verify_representability,
)
from topaction.cover import closed_form_boolean, initial_cover_generic, normal_cover_from
from topaction.presheaf import (
    compose_morphisms,
    hom_enumerate,
    is_isomorphism,
    zero_morphism,
    zero_object,
)
from topaction.randgen import random_normal_cover


def test_trivial_sequence_validates():
    x = arrow_presheaf(2, 2, (0, 1))
    g = arrow_presheaf(2, 3, (0, 1, 1))
    assert validate_sequence(trivial_sequence(x, g))


def test_broken_splitting_rejected():
    x = terminal_presheaf(2)
    g = terminal_presheaf(2)
    seq = trivial_sequence(x, g)
    import dataclasses

    broken = dataclasses.replace(seq, retraction=zero_morphism(seq.middle, g))
    assert not validate_sequence(broken)


def test_middle_size_law():
    for x in all_arrow_presheaves(3)[:8]:
        for g in all_arrow_presheaves(3)[:8]:
            for seq in enumerate_actions(x, g).classes:
                assert seq.middle.level_sizes() == tuple(
                    g.size(c) + x.size(c) - 1 for c in ARROW.objects()
                )


def test_terminal_action_counts():
    x = terminal_presheaf(2)
    g = terminal_presheaf(2)
    assert enumerate_actions(x, g).count() == 2


@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=4))
def test_boolean_count_formula(nx, ng):
    x, g = terminal_presheaf(nx), terminal_presheaf(ng)
    assert enumerate_actions(x, g).count() == ng ** (nx - 1)


def test_zero_left_object_single_class():
    x = arrow_presheaf(2, 2, (0, 1))
    z = zero_object(ARROW)
    acts = enumerate_actions(x, z)
    assert acts.count() == 1
    from topaction.presheaf import isomorphic

    assert isomorphic(acts.classes[0].middle, x) is not None


def test_zero_base_single_class():
    g = arrow_presheaf(2, 2, (0, 1))
    z = zero_object(ARROW)
    acts = enumerate_actions(z, g)
    assert acts.count() == 1
    from topaction.presheaf import isomorphic

    assert isomorphic(acts.classes[0].middle, g) is not None


def test_sequence_isomorphism_reflexive_and_distinguishing():
    x = terminal_presheaf(2)
    g = terminal_presheaf(2)
    classes = enumerate_actions(x, g).classes
    assert len(classes) == 2
    for seq in classes:
        phi = sequence_isomorphism(seq, seq)
        assert phi is not None and is_isomorphism(phi)
    assert sequence_isomorphism(classes[0], classes[1]) is None


def test_iso_mode_uw_collapses_retractions():
    x = terminal_presheaf(2)
    g = terminal_presheaf(2)
    assert enumerate_actions(x, g, "uvw").count() == 2
    assert enumerate_actions(x, g, "uw").count() == 1


def test_alpha_of_trivial_sequence_is_zero():
    x = arrow_presheaf(1, 2, (0, 0))
    g = arrow_presheaf(2, 2, (0, 1))
    cover = initial_cover_generic(x)
    alpha = classifying_morphism(trivial_sequence(x, g), cover)
    assert alpha == zero_morphism(cover.domain, g)


def test_beta_of_zero_is_trivial_class():
    x = arrow_presheaf(1, 2, (0, 0))
    g = arrow_presheaf(2, 2, (0, 1))
    cover = initial_cover_generic(x)
    seq = induced_sequence(zero_morphism(cover.domain, g), cover)
    assert validate_sequence(seq)
    assert sequence_isomorphism(seq, trivial_sequence(x, g)) is not None


def test_roundtrips_terminal_pairing():
    x = terminal_presheaf(3)
    cover = closed_form_boolean(x)
    g = terminal_presheaf(3)
    homs = hom_enumerate(cover.domain, g)
    acts = enumerate_actions(x, g)
    assert len(homs) == acts.count()
    for s in homs:
        assert classifying_morphism(induced_sequence(s, cover), cover) == s
    seen = []
    for seq in acts.classes:
        s = classifying_morphism(seq, cover)
        assert s not in seen
        seen.append(s)
        again = induced_sequence(s, cover)
        assert sequence_isomorphism(again, seq) is not None


def test_representability_report_arrow():
    x = arrow_presheaf(2, 2, (0, 0))
    cover = initial_cover_generic(x)
    pool = [
        zero_object(ARROW),
        arrow_presheaf(2, 2, (0, 1)),
        arrow_presheaf(2, 2, (0, 0)),
        arrow_presheaf(1, 3, (0, 0, 0)),
    ]
    report = verify_representability(x, pool, cover)
    assert report.ok, report.violations
    assert report.entries[0].act_count == 1
    assert report.naturality_checked > 0


def test_push_forward_preserves_validity():
    rng = Random(44)
    x = arrow_presheaf(2, 2, (0, 0))
    g = arrow_presheaf(2, 2, (0, 1))
    g2 = arrow_presheaf(3, 2, (0, 2))
    for seq in enumerate_actions(x, g).classes:
        for h in hom_enumerate(g, g2):
            pushed = push_forward(seq, h)
            assert validate_sequence(pushed)
            assert pushed.left == g2 and pushed.base == x


def test_necessary_condition_on_presheaf_families():
    rng = Random(7)
    x = arrow_presheaf(2, 2, (0, 1))
    singleton = [random_normal_cover(x, rng, kernel_size=1)]
    assert necessary_condition(x, singleton)
    # over the one-object shape the kernels are wedge summands, hence retracts
    y = terminal_presheaf(3)
    family = [random_normal_cover(y, rng, kernel_size=3) for _ in range(4)]
    assert any(sum(c.kernel_sizes()) > 1 for c in family)
    assert necessary_condition(y, family)


def test_necessary_condition_rejects_non_retract_kernels():
    from topaction.cover import closed_form_arrow

    x = arrow_presheaf(1, 2, (0, 0))
    cover = closed_form_arrow(x).cover
    with pytest.raises(ValueError):
        necessary_condition(x, [cover])


def test_self_gluing_row_is_valid_sequence():
    """Gluing the cover domain to itself along its kernel yields a sequence
    with the codiagonal as retraction."""
    from topaction.actions import LeftSplitSequence
    from topaction.cover import initial_cover_generic
    from topaction.exactness import is_normal_epi, pushout
    from topaction.presheaf import PresheafMorphism

    for x in [arrow_presheaf(1, 2, (0, 0)), arrow_presheaf(2, 3, (0, 1, 0))]:
        cover = initial_cover_generic(x)
        _, k = cover.kernel_inclusion()
        middle, i1, i2 = pushout(k, k)
        shape = middle.shape
        retraction_comps = []
        projection_comps = []
        for c in shape.objects():
            ret = [0] * middle.size(c)
            proj = [0] * middle.size(c)
            for e in range(cover.domain.size(c)):
                ret[i1.components[c][e]] = e
                ret[i2.components[c][e]] = e
                proj[i1.components[c][e]] = cover.map.components[c][e]
                proj[i2.components[c][e]] = 0
            retraction_comps.append(tuple(ret))
            projection_comps.append(tuple(proj))
        retraction = PresheafMorphism(middle, cover.domain, tuple(retraction_comps))
        projection = PresheafMorphism(middle, x, tuple(projection_comps))
        witness = is_normal_epi(projection)
        assert witness is not None
        row = LeftSplitSequence(
            left=cover.domain,
            middle=middle,
            base=x,
            inclusion=i2,
            retraction=retraction,
            projection=projection,
            witness=witness,
        )
        assert validate_sequence(row)


def _sequence_classes_bruteforce(x, g):
    """Independent oracle: raw product over middle structures and all map
    triples on the forced level sizes, filtered by the validator, deduped by
    the comparison isomorphism."""
    from itertools import permutations, product as iproduct

    from topaction.actions import LeftSplitSequence
    from topaction.exactness import is_normal_epi
    from topaction.presheaf import PointedPresheaf, PointedSet, PresheafMorphism

    shape = x.shape
    sizes = [g.size(c) + x.size(c) - 1 for c in shape.objects()]

    def pointed_tables(src_sizes, tgt_sizes):
        per_level = [
            [(0,) + tail for tail in iproduct(range(tgt_sizes[c]), repeat=src_sizes[c] - 1)]
            for c in shape.objects()
        ]
        return [tuple(combo) for combo in iproduct(*per_level)]

    middles = []
    table_space = [
        [(0,) + tail for tail in iproduct(range(sizes[shape.dom[m]]), repeat=sizes[shape.cod[m]] - 1)]
        for m in shape.non_identity_morphisms()
    ]
    for combo in iproduct(*table_space):
        tables = {shape.identity[c]: tuple(range(sizes[c])) for c in shape.objects()}
        tables.update(dict(zip(shape.non_identity_morphisms(), combo)))
        candidate = PointedPresheaf(
            shape=shape,
            levels=tuple(PointedSet(s) for s in sizes),
            restrict=tuple(tables[m] for m in shape.morphisms()),
        )
        try:
            candidate.validate()
        except ValueError:
            continue
        middles.append(candidate)

    g_sizes = [g.size(c) for c in shape.objects()]
    x_sizes = [x.size(c) for c in shape.objects()]
    classes = []
    for middle in middles:
        def natural(m):
            try:
                m.validate()
            except ValueError:
                return False
            return True

        for u_tab in pointed_tables(g_sizes, sizes):
            if any(len(set(t)) != len(t) for t in u_tab):
                continue
            u = PresheafMorphism(g, middle, u_tab)
            if not natural(u):
                continue
            for w_tab in pointed_tables(sizes, x_sizes):
                w = PresheafMorphism(middle, x, w_tab)
                if not natural(w):
                    continue
                witness = is_normal_epi(w)
                if witness is None:
                    continue
                for v_tab in pointed_tables(sizes, g_sizes):
                    v = PresheafMorphism(middle, g, v_tab)
                    if not natural(v):
                        continue
                    seq = LeftSplitSequence(
                        left=g, middle=middle, base=x,
                        inclusion=u, retraction=v, projection=w, witness=witness,
                    )
                    if not validate_sequence(seq):
                        continue
                    if any(sequence_isomorphism(rep, seq) is not None for rep in classes):
                        continue
                    classes.append(seq)
    return classes


@pytest.mark.parametrize(
    "x_args,g_args",
    [
        ((1, 2, (0, 0)), (2, 2, (0, 1))),
        ((1, 2, (0, 0)), (2, 2, (0, 0))),
        ((2, 2, (0, 1)), (1, 2, (0, 0))),
        ((2, 2, (0, 0)), (2, 1, (0,))),
    ],
)
def test_enumerate_actions_matches_raw_product_oracle(x_args, g_args):
    x = arrow_presheaf(*x_args)
    g = arrow_presheaf(*g_args)
    fast = enumerate_actions(x, g)
    slow = _sequence_classes_bruteforce(x, g)
    assert fast.count() == len(slow)
    for seq in slow:
        hits = [r for r in fast.classes if sequence_isomorphism(seq, r) is not None]
        assert len(hits) == 1


def test_enumerate_actions_matches_raw_product_oracle_terminal():
    for nx in (1, 2, 3):
        for ng in (1, 2):
            x, g = terminal_presheaf(nx), terminal_presheaf(ng)
            assert enumerate_actions(x, g).count() == len(_sequence_classes_bruteforce(x, g))


def test_pushout_square_commutes_on_random_spans():
    from random import Random as _R

    from topaction.exactness import pushout
    from topaction.presheaf import compose_morphisms as comp
    from topaction.randgen import random_morphism, random_presheaf

    rng = _R(55)
    for _ in range(25):
        k_src = random_presheaf(ARROW, rng, max_size=3)
        a = random_presheaf(ARROW, rng, max_size=3)
        b = random_presheaf(ARROW, rng, max_size=3)
        k = random_morphism(k_src, a, rng)
        s = random_morphism(k_src, b, rng)
        q, i1, i2 = pushout(k, s)
        q.validate()
        i1.validate()
        i2.validate()
        assert comp(i1, k) == comp(i2, s)


def test_relabeled_sequence_lands_in_exactly_one_class():
    """Permuting the middle object's labels keeps a sequence in its class and
    in no other."""
    import dataclasses

    from topaction.exactness import is_normal_epi
    from topaction.presheaf import PointedPresheaf, PresheafMorphism

    rng = Random(77)
    x = arrow_presheaf(2, 2, (0, 0))
    g = arrow_presheaf(2, 2, (0, 1))
    acts = enumerate_actions(x, g)
    for seq in acts.classes:
        perms = []
        for c in ARROW.objects():
            tail = list(range(1, seq.middle.size(c)))
            rng.shuffle(tail)
            perms.append((0, *tail))
        inverse = []
        for perm in perms:
            inv = [0] * len(perm)
            for e, v in enumerate(perm):
                inv[v] = e
            inverse.append(tuple(inv))
        middle = PointedPresheaf(
            shape=ARROW,
            levels=seq.middle.levels,
            restrict=tuple(
                tuple(
                    perms[ARROW.dom[m]][seq.middle.restrict[m][inverse[ARROW.cod[m]][e]]]
                    for e in range(seq.middle.size(ARROW.cod[m]))
                )
                for m in ARROW.morphisms()
            ),
        )
        middle.validate()
        inclusion = PresheafMorphism(
            g, middle, tuple(
                tuple(perms[c][v] for v in seq.inclusion.components[c])
                for c in ARROW.objects()
            )
        )
        retraction = PresheafMorphism(
            middle, g, tuple(
                tuple(seq.retraction.components[c][inverse[c][e]] for e in range(len(perms[c])))
                for c in ARROW.objects()
            )
        )
        projection = PresheafMorphism(
            middle, x, tuple(
                tuple(seq.projection.components[c][inverse[c][e]] for e in range(len(perms[c])))
                for c in ARROW.objects()
            )
        )
        witness = is_normal_epi(projection)
        assert witness is not None
        relabeled = dataclasses.replace(
            seq,
            middle=middle,
            inclusion=inclusion,
            retraction=retraction,
            projection=projection,
            witness=witness,
        )
        assert validate_sequence(relabeled)
        hits = [
            other
            for other in acts.classes
            if sequence_isomorphism(relabeled, other) is not None
        ]
        assert hits == [seq]


def test_sheaf_family_fails_pointwise_necessary_condition():
    """The grid family has retract kernels and locally normal members, yet the
    combined pullback misses sections pointwise; its escape level grows."""
    from topaction.exactness import retraction_onto, kernel, wide_pullback
    from topaction.site import (
        build_site,
        build_threshold_cover,
        escape_index,
        sheaf_normal_epi,
    )

    n = 4
    site = build_site(n)
    family = [build_threshold_cover(site, m) for m in range(3)]
    for f in family:
        assert sheaf_normal_epi(site, f)
        assert retraction_onto(kernel(f)) is not None
    _, _, composite = wide_pullback(family)
    surjective = all(
        len(set(composite.components[e])) == composite.target.size(e)
        for e in site.poset.elements()
    )
    assert not surjective
    assert [escape_index(m, n) for m in range(3)] == [0, 1, 2]
