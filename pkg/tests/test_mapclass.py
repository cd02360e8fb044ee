import random

import pytest

from flipsurf.canonical import isomorphisms
from flipsurf.mapclass import (
    MappingClass,
    apply_to_vertex,
    check_functorial,
    check_naturality,
    check_well_defined,
    compose,
    count_non_exchangeable,
    exchangeable_base_arcs,
    inverse,
    make_exchangeable_path,
    random_mapping_class,
    random_surgery_fixture,
    tilde_arc_map,
)
from flipsurf.marking import BaseContext, diff, flip_marked, replay
from flipsurf.surface import InvariantViolation, NotExchangeableError


@pytest.fixture(scope="module")
def ctx04():
    return BaseContext.for_surface(0, 4)


@pytest.fixture(scope="module")
def ctx12():
    return BaseContext.for_surface(1, 2)


def test_identity_class(ctx04):
    ident = MappingClass.identity(ctx04)
    base = ctx04.base_marked()
    assert apply_to_vertex(ident, base) == base
    m = replay(ctx04, (1, 2, 1))
    assert apply_to_vertex(ident, m) == m


def test_identity_tilde_is_identity(ctx04):
    ident = MappingClass.identity(ctx04)
    base = ctx04.base_marked()
    for e in base.shape.exchangeable_edges():
        assert tilde_arc_map(ident, base.keys[e], base) == base.keys[e]


def test_pure_relabeling_class(ctx04):
    base = ctx04.base_marked()
    autos = [(s, o) for s, o in isomorphisms(ctx04.base, ctx04.base)]
    # use an orientation-preserving automorphism as a relabeling class
    sigma, orient = next((s, o) for s, o in autos if o > 0)
    phi = MappingClass(ctx04, (), sigma, orient)
    image = apply_to_vertex(phi, base)
    assert image == base  # same vertex
    if sigma != tuple(range(len(sigma))):
        reloc = ctx04.base.edge_relocation(sigma)
        permuted = [None] * len(base.keys)
        for i, k in enumerate(base.keys):
            permuted[reloc[i]] = k
        assert list(image.keys) == permuted
    # relabeling classes send each base arc to its relabeled arc
    for e in base.shape.exchangeable_edges():
        x, _ = ctx04.base.edge_slots(e)
        target = ctx04.base.edge_of_slot(sigma[x])
        assert tilde_arc_map(phi, base.keys[e], base) == base.keys[target]


def test_constructor_validates_iso(ctx04):
    bad = list(range(ctx04.base.num_slots))
    bad[0], bad[1] = bad[1], bad[0]
    with pytest.raises(InvariantViolation):
        MappingClass(ctx04, (), bad, 1)


def test_apply_respects_vertex_not_word(ctx04, ctx12):
    # the image is independent of which word defines the input vertex
    rng = random.Random(11)
    for ctx in (ctx04, ctx12):
        for _ in range(6):
            phi = random_mapping_class(ctx, rng, rng.randrange(2, 5))
            m = ctx.base_marked()
            for _k in range(3):
                m = flip_marked(m, rng.choice(m.shape.exchangeable_edges()))
            # build a second word for the same vertex: out and back, then
            # the same flips located by arc (edge ids shift between words)
            base = ctx.base_marked()
            e0 = base.shape.exchangeable_edges()[0]
            detour = flip_marked(base, e0)
            m2 = detour.flip_arc(diff(detour, base))
            walk = base
            for e in m.word:
                arc = walk.keys[e]
                walk = flip_marked(walk, e)
                m2 = m2.flip_arc(arc)
            assert m2 == m and m2.word != m.word
            assert apply_to_vertex(phi, m) == apply_to_vertex(phi, m2)


def test_random_mapping_classes_move_base(ctx04, ctx12):
    # free-action probe: nontrivial sampled classes do not fix the base
    rng = random.Random(101)
    for ctx in (ctx04, ctx12):
        base = ctx.base_marked()
        for _ in range(50):
            phi = random_mapping_class(ctx, rng, rng.randrange(1, 5))
            assert apply_to_vertex(phi, base) != base


def test_orientation_reversing_classes_exist_and_transport(ctx04):
    rng = random.Random(7)
    found = None
    for _ in range(80):
        phi = random_mapping_class(ctx04, rng, rng.randrange(0, 4), nontrivial=False)
        if phi.orientation < 0:
            found = phi
            break
    assert found is not None
    base = ctx04.base_marked()
    arcs = [base.keys[e] for e in base.shape.exchangeable_edges()]
    images = {tilde_arc_map(found, a, base) for a in arcs}
    assert len(images) == len(arcs)  # injective on samples


def test_compose_and_inverse(ctx04, ctx12):
    rng = random.Random(23)
    for ctx in (ctx04, ctx12):
        base = ctx.base_marked()
        for _ in range(4):
            phi = random_mapping_class(ctx, rng, rng.randrange(1, 4))
            psi = random_mapping_class(ctx, rng, rng.randrange(1, 4))
            comp = compose(phi, psi)
            m = flip_marked(base, base.shape.exchangeable_edges()[0])
            assert apply_to_vertex(comp, m) == apply_to_vertex(
                phi, apply_to_vertex(psi, m))
            inv = inverse(phi)
            assert apply_to_vertex(inv, apply_to_vertex(phi, m)) == m
            assert apply_to_vertex(compose(inv, phi), base) == base
            assert apply_to_vertex(compose(phi, inv), base) == base


def test_inverse_composition_tilde_is_identity(ctx04):
    rng = random.Random(31)
    phi = random_mapping_class(ctx04, rng, 3)
    both = compose(phi, inverse(phi))
    for arc, delta in exchangeable_base_arcs(ctx04):
        assert tilde_arc_map(both, arc, delta) == arc


def test_tilde_requires_exchangeable_and_present(ctx04):
    ident = MappingClass.identity(ctx04)
    base = ctx04.base_marked()
    folded = [e for e in range(6) if not base.shape.is_exchangeable(e)]
    with pytest.raises(NotExchangeableError):
        tilde_arc_map(ident, base.keys[folded[0]], base)
    with pytest.raises(ValueError):
        tilde_arc_map(ident, (9,) * len(base.keys[0]), base)


def test_well_defined_sweep(ctx04, ctx12):
    rng = random.Random(5)
    for ctx in (ctx04, ctx12):
        for _ in range(5):
            phi = random_mapping_class(ctx, rng, rng.randrange(1, 5))
            for arc, _delta in exchangeable_base_arcs(ctx)[:2]:
                report = check_well_defined(phi, arc, trials=6, rng=rng)
                assert not report.inconclusive
                assert report.passed, report.to_json()


def test_well_defined_requires_two_trials(ctx04):
    with pytest.raises(ValueError):
        check_well_defined(MappingClass.identity(ctx04), (0,) * 18, 1, random.Random(0))


def test_naturality_sweep_with_detours(ctx04, ctx12):
    rng = random.Random(13)
    for ctx in (ctx04, ctx12):
        base = ctx.base_marked()
        has_fold = any(not base.shape.is_exchangeable(e)
                       for e in range(base.shape.num_edges))
        for _ in range(5):
            phi = random_mapping_class(ctx, rng, rng.randrange(1, 4))
            report = check_naturality(phi, base)
            assert report.passed, report.to_json()
            if has_fold:
                assert "detours" in report.detail
                assert not report.detail.startswith("0 ")


def test_functorial_sweep(ctx04, ctx12):
    rng = random.Random(17)
    for ctx in (ctx04, ctx12):
        for _ in range(4):
            phi = random_mapping_class(ctx, rng, rng.randrange(1, 4))
            psi = random_mapping_class(ctx, rng, rng.randrange(1, 4))
            report = check_functorial(phi, psi, exchangeable_base_arcs(ctx))
            assert report.passed, report.to_json()


def test_mapping_class_json_round_trip(ctx04):
    rng = random.Random(3)
    phi = random_mapping_class(ctx04, rng, 3)
    data = phi.to_json()
    assert data["orientation"] in ("+", "-")
    back = MappingClass.from_json(ctx04, data)
    assert back.word == phi.word and back.iso == phi.iso
    assert back.orientation == phi.orientation


# ---------------------------------------------------------------------------
# path surgery
# ---------------------------------------------------------------------------


def test_surgery_clean_path_unchanged(ctx04):
    base = ctx04.base_marked()
    e = base.shape.exchangeable_edges()[0]
    arc = base.keys[base.shape.exchangeable_edges()[1]]
    m1 = flip_marked(base, e)
    if not m1.shape.is_exchangeable(m1.key_index(arc)):
        pytest.skip("fixture assumption broken")
    path = [base, m1]
    assert make_exchangeable_path(path, arc) == path


def test_surgery_fixtures(ctx04, ctx12):
    rng = random.Random(2024)
    cases = 0
    for ctx in (ctx04, ctx12):
        for runs in (1, 2):
            for inner in (1, 2):
                path, arc = random_surgery_fixture(ctx, rng, runs=runs,
                                                   inner_flips=inner)
                before = count_non_exchangeable(path, arc)
                assert before > 0
                fixed = make_exchangeable_path(path, arc)
                assert count_non_exchangeable(fixed, arc) == 0
                assert fixed[0] == path[0]
                assert fixed[-1] == path[-1]
                for m in fixed:
                    assert m.has_arc(arc)
                cases += 1
    assert cases == 8


def test_surgery_backtrack_collapse(ctx04):
    # a non-simple 3-vertex path: fold and immediately unfold
    rng = random.Random(6)
    path, arc = random_surgery_fixture(ctx04, rng, runs=1, inner_flips=0)
    assert len(path) == 3
    assert count_non_exchangeable(path, arc) == 1
    fixed = make_exchangeable_path(path, arc)
    assert [m.vertex_key() for m in fixed] == [path[0].vertex_key()]


def test_surgery_rejects_bad_input(ctx04):
    base = ctx04.base_marked()
    with pytest.raises(ValueError):
        make_exchangeable_path([], base.keys[0])
    # endpoints must have the arc exchangeable
    folded_edge = next(e for e in range(6) if not base.shape.is_exchangeable(e))
    with pytest.raises(ValueError):
        make_exchangeable_path([base], base.keys[folded_edge])


def test_surgery_exercises_both_detours(ctx04, ctx12):
    # a batch of fixtures must hit both rewrite kinds, and every rewrite
    # step is one of the three sanctioned moves
    rng = random.Random(99)
    kinds = []
    for ctx in (ctx04, ctx12):
        for _ in range(10):
            path, arc = random_surgery_fixture(
                ctx, rng, runs=1, inner_flips=rng.choice((1, 2)))
            trace = []
            make_exchangeable_path(path, arc, trace=trace)
            assert trace
            kinds.extend(trace)
    assert "pentagon" in kinds, kinds
    assert "square" in kinds, kinds
    assert set(kinds) <= {"pentagon", "square", "backtrack"}
