import itertools
import random

import pytest

from flipsurf.canonical import canonical_key
from flipsurf.marking import (
    BASE_SLOPES,
    BaseContext,
    InvariantViolation,
    MarkedTriangulation,
    are_adjacent,
    diff,
    farey_flip_slope,
    farey_oracle,
    flip_involution_holds,
    flip_marked,
    max_plus_prediction,
    pentagon_closure_holds,
    quadrilateral_blocks,
    replay,
    shares_one_triangle,
    slope_key,
    square_closure_holds,
    vertex_key,
)
from flipsurf.surface import NotExchangeableError, initial_triangulation


@pytest.fixture
def ctx11():
    return BaseContext.for_surface(1, 1)


@pytest.fixture
def ctx04():
    return BaseContext.for_surface(0, 4)


@pytest.fixture
def ctx12():
    return BaseContext.for_surface(1, 2)


def vectors(m):
    return {m.key_vector(e) for e in range(m.shape.num_edges)}


def test_base_marked_convention(ctx11, ctx04):
    m = ctx11.base_marked()
    assert vectors(m) == {(-1, 0, 0), (0, -1, 0), (0, 0, -1)}
    assert all(k[3:] == (0,) * 6 for k in m.keys)
    m4 = ctx04.base_marked()
    assert len(m4.keys) == 6
    assert len(m4.keys[0]) == 6 + 12
    for e in range(6):
        v = m4.key_vector(e)
        assert v.count(-1) == 1 and all(x in (0, -1) for x in v)
    assert len(set(m4.keys)) == 6


def test_base_marked_03():
    m = BaseContext.for_surface(0, 3).base_marked()
    assert len(set(m.keys)) == 3


def test_flip_slope_one_gives_slope_minus_one(ctx11):
    # base keys mark slopes 0, infinity, 1 on edges 0, 1, 2; flipping the
    # slope-1 edge must produce the slope -1 arc, crossing only slope 1 once
    m = ctx11.base_marked()
    m2 = flip_marked(m, 2)
    assert diff(m2, m)[:3] == (0, 0, 1)
    assert vectors(m2) == {(-1, 0, 0), (0, -1, 0), (0, 0, 1)}


def test_unfolding_flip_crosses_only_the_old_diagonal(ctx04):
    # edge 1 of the (0,4) fan is the dual of the folded edge 0; its flip is
    # the punctured-bigon move, where plain max-plus provably miscounts
    m = ctx04.base_marked()
    assert not m.shape.is_exchangeable(0)
    assert m.shape.dual_edge(0) == 1
    m2 = flip_marked(m, 1)
    new = diff(m2, m)
    assert new[:6] == (0, 1, 0, 0, 0, 0)
    assert max_plus_prediction(m, 1) != new[:6]


def test_max_plus_matches_tracing_on_torus():
    # the coordinatewise exchange rule is exact on the once-punctured torus
    # (no folded configurations); elsewhere the traced value is the truth
    ctx = BaseContext.for_surface(1, 1)
    cache = {(): ctx.base_marked()}
    for L in range(5):
        for word in itertools.product(range(3), repeat=L):
            m = cache[word]
            for e in range(3):
                pred = max_plus_prediction(m, e)
                m2 = flip_marked(m, e)
                cache[word + (e,)] = m2
                assert diff(m2, m)[:3] == pred


def ray_counts(ctx, key):
    """
    Ends of the arc per base corner, reconstructed from the key: crossings
    of a side equal its two corner counts plus rays from the opposite one.
    """
    base = ctx.base
    E = base.num_edges
    vector, corners = key[:E], key[E:]
    out = []
    for c in range(base.num_slots):
        opp = (c - c % 3) + (c + 1) % 3
        r = (vector[base.edge_of_slot(opp)]
             - corners[opp] - corners[(c - c % 3) + (c + 2) % 3])
        out.append(r)
    return out


def test_every_arc_has_two_ends(ctx04, ctx12):
    # structural soundness of traced keys: derived ray counts are
    # non-negative and total exactly 2 for every non-base arc
    rng = random.Random(77)
    for ctx in (ctx04, ctx12):
        m = ctx.base_marked()
        for _ in range(50):
            e = rng.choice(m.shape.exchangeable_edges())
            m = flip_marked(m, e)
            for key in m.keys:
                if -1 in key:
                    continue
                rays = ray_counts(ctx, key)
                assert all(r >= 0 for r in rays), (key, rays)
                assert sum(rays) == 2, (key, rays)


def test_flip_marked_involution(ctx11, ctx04, ctx12):
    for ctx in (ctx11, ctx04, ctx12):
        m = ctx.base_marked()
        for e in range(m.shape.num_edges):
            if m.shape.is_exchangeable(e):
                assert flip_involution_holds(m, e)


def test_flip_marked_requires_exchangeable():
    m = BaseContext.for_surface(0, 3).base_marked()
    folded = [e for e in range(3) if not m.shape.is_exchangeable(e)]
    with pytest.raises(NotExchangeableError):
        flip_marked(m, folded[0])


def test_vertex_key_sorted_and_stable(ctx11):
    m = ctx11.base_marked()
    assert vertex_key(m) == tuple(sorted(m.keys))
    pi = [3, 4, 5, 0, 1, 2]
    assert vertex_key(m.relabeled(pi)) == vertex_key(m)


def test_diff_and_adjacency(ctx11):
    m = ctx11.base_marked()
    m2 = flip_marked(m, 0)
    assert diff(m, m2)[:3] == (-1, 0, 0)
    assert are_adjacent(m, m2)
    with pytest.raises(ValueError):
        diff(m, m)


def test_marked_equality_is_vertex_identity(ctx11):
    # flip there and back: same vertex through a different history
    m = ctx11.base_marked()
    m1 = flip_marked(m, 2)
    back = m1.flip_arc(diff(m1, m))
    assert back == m
    assert hash(back) == hash(m)
    assert back.word != m.word


def test_key_sanity_enforced(ctx11):
    m = ctx11.base_marked()
    bad = list(m.keys)
    bad[0] = (0,) * len(bad[0])
    with pytest.raises(InvariantViolation):
        MarkedTriangulation(ctx11, m.shape, bad, m.paths)


def test_duplicate_keys_rejected(ctx11):
    m = ctx11.base_marked()
    bad = list(m.keys)
    bad[1] = bad[0]
    with pytest.raises(InvariantViolation):
        MarkedTriangulation(ctx11, m.shape, bad, m.paths)


# ---------------------------------------------------------------------------
# Farey oracle
# ---------------------------------------------------------------------------


def test_farey_empty_word():
    assert farey_oracle(()) == BASE_SLOPES


def test_farey_first_flip():
    slopes = farey_oracle((2,))
    assert set(slopes) == {(0, 1), (1, 0), (-1, 1)}


def test_farey_flip_rule_by_hand():
    assert farey_flip_slope((1, 1), (0, 1), (1, 0)) == (-1, 1)
    assert farey_flip_slope((-1, 1), (0, 1), (1, 0)) == (1, 1)


def test_farey_involution():
    shape = initial_triangulation(1, 1)
    for e in range(3):
        _, reloc = shape.flip(e)
        assert farey_oracle((e, reloc[e])) == BASE_SLOPES


def test_slope_key_matches_base_convention():
    assert slope_key((0, 1)) == (-1, 0, 0)
    assert slope_key((1, 0)) == (0, -1, 0)
    assert slope_key((1, 1)) == (0, 0, -1)
    assert slope_key((-1, 1)) == (0, 0, 1)
    assert slope_key((-2, 1)) == (1, 0, 2)


def all_words(max_len):
    for L in range(max_len + 1):
        yield from itertools.product(range(3), repeat=L)


def test_farey_agreement_words_up_to_6(ctx11):
    # per-edge vector agreement, vertex-key/slope-set bijection, and shape
    # consistency, memoized over the state graph so every word is covered
    seen_by_vkey = {}
    seen_by_slopes = {}
    state_cache = {}

    def state(word):
        if word in state_cache:
            return state_cache[word]
        if word:
            prev_m, prev_slopes, prev_shape = state(word[:-1])
            e = word[-1]
            m = flip_marked(prev_m, e)
            others = [prev_slopes[j] for j in range(3) if j != e]
            new_slope = farey_flip_slope(prev_slopes[e], *others)
            shape, reloc = prev_shape.flip(e)
            slopes = [None] * 3
            for j in range(3):
                slopes[reloc[j]] = prev_slopes[j]
            slopes[reloc[e]] = new_slope
            out = (m, tuple(slopes), shape)
        else:
            out = (ctx11.base_marked(), BASE_SLOPES, ctx11.base)
        state_cache[word] = out
        return out

    for word in all_words(6):
        m, slopes, shape = state(word)
        assert shape == m.shape
        assert tuple(m.key_vector(j) for j in range(3)) == tuple(
            slope_key(s) for s in slopes)
        vk = vertex_key(m)
        sset = frozenset(slopes)
        assert seen_by_vkey.setdefault(vk, sset) == sset
        assert seen_by_slopes.setdefault(sset, vk) == vk
        assert canonical_key(m.shape) == canonical_key(ctx11.base)


# ---------------------------------------------------------------------------
# Closure battery
# ---------------------------------------------------------------------------


def disjoint_pairs(shape):
    for e1, e2 in itertools.combinations(shape.exchangeable_edges(), 2):
        if not quadrilateral_blocks(shape, e1) & quadrilateral_blocks(shape, e2):
            yield e1, e2


def shared_pairs(shape):
    for e1 in shape.exchangeable_edges():
        for e2 in shape.exchangeable_edges():
            if e1 != e2 and shares_one_triangle(shape, e1, e2):
                yield e1, e2


def test_square_closure_base(ctx04, ctx12):
    checked = 0
    for ctx in (ctx04, ctx12):
        m = ctx.base_marked()
        for e1, e2 in disjoint_pairs(m.shape):
            assert square_closure_holds(m, e1, e2)
            checked += 1
    assert checked > 0


def test_pentagon_closure_base(ctx04, ctx12):
    checked = 0
    for ctx in (ctx04, ctx12):
        m = ctx.base_marked()
        for e1, e2 in shared_pairs(m.shape):
            assert pentagon_closure_holds(m, e_a=e1, e_c=e2)
            checked += 1
    assert checked > 0


def test_closures_along_random_walks(ctx04, ctx12):
    rng = random.Random(20240817)
    for ctx in (ctx04, ctx12):
        m = ctx.base_marked()
        for _ in range(40):
            e = rng.choice(m.shape.exchangeable_edges())
            m = flip_marked(m, e)
            assert flip_involution_holds(m, rng.choice(m.shape.exchangeable_edges()))
            sq = list(disjoint_pairs(m.shape))
            if sq:
                assert square_closure_holds(m, *rng.choice(sq))
            pent = list(shared_pairs(m.shape))
            if pent:
                assert pentagon_closure_holds(m, *rng.choice(pent))


def test_path_reversal_consistency(ctx04):
    # the two slots of every edge carry mutually reversed paths that
    # produce the same key
    from flipsurf.marking import _path_key, _reverse_path

    rng = random.Random(9)
    m = ctx04.base_marked()
    for _ in range(60):
        m = flip_marked(m, rng.choice(m.shape.exchangeable_edges()))
    g0 = ctx04.base.gluing
    for a, b in m.shape.edges:
        assert m.paths[b] == _reverse_path(g0, m.paths[a])
        assert _path_key(ctx04.base, m.paths[a]) == _path_key(ctx04.base, m.paths[b])
    for e in range(m.shape.num_edges):
        a, b = m.shape.edge_slots(e)
        assert _path_key(ctx04.base, m.paths[a]) == m.keys[e]


def test_replay(ctx11):
    m = replay(ctx11, (0, 1, 2))
    assert m.word == (0, 1, 2)
    assert len(m.keys) == 3
