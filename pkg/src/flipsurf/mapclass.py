r"""
Mapping classes acting on the flip graph, and the induced arc map.

A mapping class is presented as the flip word taking the base vertex to
its image plus a gluing-pattern isomorphism from the word's terminal shape
back to the base shape (with its orientation sign).  Applying the class to
a vertex replays the vertex's defining word through that identification:
the reference walk and the image walk advance together, joined by a slot
map that stays an isomorphism step by step (conjugated by the
opposite-side swap of each flipped quadrilateral when the identification
reverses orientation).

The induced arc map sends an arc a, exchangeable in a triangulation D, to
the arc separating the images of D and of D flipped at a.  The sweeps
check empirically that this is independent of D, natural on edge sets, and
functorial under composition; the path surgery rewrites a path of
triangulations containing a into one where a stays exchangeable, one
pentagon or square detour at a time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .canonical import is_isomorphism, isomorphisms
from .marking import (
    BaseContext,
    MarkedTriangulation,
    are_adjacent,
    diff,
    flip_marked,
    replay,
)
from .surface import InvariantViolation, NotExchangeableError


def _invert(sigma):
    out = [0] * len(sigma)
    for s, t in enumerate(sigma):
        out[t] = s
    return tuple(out)


class MappingClass:
    """
    (flip word, terminal-to-base isomorphism, orientation sign).

    The isomorphism is validated at construction; the induced vertex map
    is probed, not proved, by the free-action sweep.
    """

    __slots__ = ("ctx", "word", "iso", "orientation")

    def __init__(self, ctx: BaseContext, word, iso, orientation: int, check: bool = True):
        self.ctx = ctx
        self.word = tuple(word)
        self.iso = tuple(iso)
        self.orientation = 1 if orientation >= 0 else -1
        if check:
            terminal = replay(ctx, self.word)
            if not is_isomorphism(terminal.shape, ctx.base, self.iso, self.orientation):
                raise InvariantViolation(
                    "iso is not a gluing-pattern isomorphism from the terminal "
                    "shape to the base")

    @staticmethod
    def identity(ctx: BaseContext) -> "MappingClass":
        return MappingClass(ctx, (), tuple(range(ctx.base.num_slots)), 1, check=False)

    def is_identity_data(self) -> bool:
        return not self.word and self.iso == tuple(range(len(self.iso))) \
            and self.orientation == 1

    def to_json(self) -> dict:
        return {
            "word": list(self.word),
            "iso": list(self.iso),
            "orientation": "+" if self.orientation > 0 else "-",
        }

    @staticmethod
    def from_json(ctx: BaseContext, data: dict) -> "MappingClass":
        orient = 1 if data["orientation"] == "+" else -1
        return MappingClass(ctx, data["word"], data["iso"], orient)

    def __repr__(self) -> str:
        return "MappingClass(word=%r, orientation=%+d)" % (self.word, self.orientation)


def _transported_walk(ref: MarkedTriangulation, img: MarkedTriangulation,
                      sigma, orient: int, word):
    """
    Walk `word` on the reference vertex while mirroring each flip on the
    image vertex through the slot map sigma; returns the final image and
    slot map.  Transport consistency is asserted at every step.
    """
    sigma = tuple(sigma)
    for e in word:
        x, _y = ref.shape.edge_slots(e)
        img_e = img.shape.edge_of_slot(sigma[x])
        if orient < 0:
            # a reversing identification does not survive a flip unchanged:
            # conjugate by both flips' side relocations and swap the image
            # diagonal's two slots
            s1, sa, sb, s2, sc, sd = ref.shape.flip_quadrilateral(e)
            _i1, ia, ib, _i2, ic, id_ = img.shape.flip_quadrilateral(img_e)
            pi_e_inv = {sa: sb, sb: sc, sc: sd, sd: sa}
            pi_f = {ia: id_, id_: ic, ic: ib, ib: ia}
            new_sigma = [
                pi_f.get(sigma[pi_e_inv.get(s, s)], sigma[pi_e_inv.get(s, s)])
                for s in range(len(sigma))
            ]
            new_sigma[s1], new_sigma[s2] = sigma[s2], sigma[s1]
            sigma = tuple(new_sigma)
        ref = flip_marked(ref, e)
        img = flip_marked(img, img_e)
        if not is_isomorphism(ref.shape, img.shape, sigma, orient):
            raise InvariantViolation(
                "inconsistent transport at flip %r (marking defect)" % (e,))
    return ref, img, sigma


def apply_to_vertex(phi: MappingClass, m: MarkedTriangulation) -> MarkedTriangulation:
    """
    Image of the vertex m under the mapping class: replay m's defining
    word after phi's word, translating edges through the isomorphism, then
    relabel by the accumulated slot map (presentation only; skipped for
    orientation-reversing classes, whose mirrored presentation the
    counterclockwise encoding cannot carry — the vertex is unaffected).
    """
    ctx = phi.ctx
    img = replay(ctx, phi.word)
    sigma0 = _invert(phi.iso)
    ref, img, sigma = _transported_walk(
        ctx.base_marked(), img, sigma0, phi.orientation, m.word)
    if ref.vertex_key() != m.vertex_key():
        raise InvariantViolation(
            "vertex's word does not replay to its key set (stale history)")
    if phi.orientation > 0:
        return img.relabeled(_invert(sigma))
    return img


def compose(phi: MappingClass, psi: MappingClass) -> MappingClass:
    """The mapping class acting as phi after psi."""
    ctx = phi.ctx
    img = replay(ctx, phi.word)
    ref, img, sigma = _transported_walk(
        ctx.base_marked(), img, _invert(phi.iso), phi.orientation, psi.word)
    iso = tuple(psi.iso[s] for s in _invert(sigma))
    return MappingClass(ctx, img.word, iso, phi.orientation * psi.orientation)


def _identify_with_base(ctx: BaseContext, m: MarkedTriangulation):
    """
    The by-the-arcs slot identification of a base-vertex presentation with
    the base shape: every slot carries a base edge side, read off its
    (necessarily empty) path.
    """
    from .surface import slot_next, slot_prev

    g0 = ctx.base.gluing
    mu = [0] * m.shape.num_slots
    for s, (c0, xs, e0) in enumerate(m.paths):
        if xs:
            raise InvariantViolation("not a base-vertex presentation")
        mu[s] = c0 if e0 == slot_next(c0) else g0[slot_prev(c0)]
    if not is_isomorphism(m.shape, ctx.base, mu, 1):
        raise InvariantViolation("base identification is not an isomorphism")
    return tuple(mu)


def inverse(phi: MappingClass) -> MappingClass:
    """The mapping class undoing phi."""
    ctx = phi.ctx
    m = ctx.base_marked()
    undo_arcs = []
    for e in phi.word:
        m2 = flip_marked(m, e)
        undo_arcs.append(diff(m2, m))
        m = m2
    ref, img, sigma = m, ctx.base_marked(), phi.iso
    # resolve each undone arc against the live shape: flipping back does
    # not restore slot assignments pointwise, so recorded ids go stale
    for arc in reversed(undo_arcs):
        ref, img, sigma = _transported_walk(
            ref, img, sigma, phi.orientation, [ref.key_index(arc)])
    if ref.vertex_key() != ctx.base_marked().vertex_key():
        raise InvariantViolation("undo word failed to return to base")
    # sigma maps the returned presentation to the image; route the final
    # iso through the by-the-arcs identification of that presentation
    mu = _identify_with_base(ctx, ref)
    sigma_inv = _invert(sigma)
    iso = tuple(mu[sigma_inv[s]] for s in range(len(sigma)))
    return MappingClass(ctx, img.word, iso, phi.orientation)


def random_mapping_class(ctx: BaseContext, rng: random.Random, length: int,
                         nontrivial: bool = True, max_tries: int = 200) -> MappingClass:
    """
    Random flip walk of at least `length` steps, continued until the
    terminal shape is isomorphic to the base, plus a random such
    isomorphism.  With nontrivial=True, walks returning to the base vertex
    are resampled: those present vertex stabilizers, which the free-action
    probe must exclude.
    """
    base_key = ctx.base_marked().vertex_key()
    for _ in range(max_tries):
        m = ctx.base_marked()
        for _step in range(length):
            m = flip_marked(m, rng.choice(m.shape.exchangeable_edges()))
        for _extra in range(length + 24):
            usable = not (nontrivial and m.vertex_key() == base_key)
            if usable:
                isos = isomorphisms(m.shape, ctx.base)
                if isos:
                    sigma, orient = rng.choice(isos)
                    return MappingClass(ctx, m.word, sigma, orient)
            m = flip_marked(m, rng.choice(m.shape.exchangeable_edges()))
    raise RuntimeError(
        "no mapping class found in %d tries (length %d)" % (max_tries, length))


# ---------------------------------------------------------------------------
# The induced arc map and its checks.
# ---------------------------------------------------------------------------


def _replay_consistent(ctx: BaseContext, m: MarkedTriangulation) -> MarkedTriangulation:
    """
    The presentation of m's vertex obtained by replaying its word; safe to
    extend with further flips (relabeled presentations are not).
    """
    ref = replay(ctx, m.word)
    if ref.vertex_key() != m.vertex_key():
        raise InvariantViolation(
            "vertex's word does not replay to its key set (stale history)")
    return ref


def tilde_arc_map(phi: MappingClass, arc, delta: MarkedTriangulation):
    """
    Image of the arc under the induced map, computed in a triangulation
    where the arc is exchangeable: the arc separating the images of delta
    and of delta flipped at the arc.
    """
    delta = _replay_consistent(phi.ctx, delta)
    e = delta.key_index(arc)
    if not delta.shape.is_exchangeable(e):
        raise NotExchangeableError(
            "arc %r is not exchangeable in the given triangulation" % (arc,))
    delta_a = flip_marked(delta, e)
    return diff(apply_to_vertex(phi, delta), apply_to_vertex(phi, delta_a))


@dataclass
class SweepReport:
    name: str
    passed: bool
    inconclusive: bool = False
    samples: int = 0
    detail: str = ""
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "samples": self.samples,
            "detail": self.detail,
            "witnesses": self.witnesses,
        }


def sample_admissible(ctx: BaseContext, arc, rng: random.Random, count: int,
                      walk_length: int = 6, attempts: int = 400):
    """
    Distinct triangulations containing the arc as an exchangeable edge,
    sampled by random flip walks from the base that never flip the arc.
    """
    out = {}
    for _ in range(attempts):
        if len(out) >= count:
            break
        m = ctx.base_marked()
        if not m.has_arc(arc):
            continue
        ok = True
        for _step in range(rng.randrange(walk_length + 1)):
            e_arc = m.key_index(arc)
            edges = [e for e in m.shape.exchangeable_edges() if e != e_arc]
            if not edges:
                ok = False
                break
            m = flip_marked(m, rng.choice(edges))
        if not ok or not m.has_arc(arc):
            continue
        if m.shape.is_exchangeable(m.key_index(arc)):
            out.setdefault(m.vertex_key(), m)
    return list(out.values())


def check_well_defined(phi: MappingClass, arc, trials: int,
                       rng: random.Random) -> SweepReport:
    """
    The induced image of the arc must not depend on the triangulation
    chosen to compute it.
    """
    if trials < 2:
        raise ValueError("trials must be at least 2")
    deltas = sample_admissible(phi.ctx, arc, rng, trials)
    if len(deltas) < 2:
        return SweepReport("well_defined", passed=False, inconclusive=True,
                           samples=len(deltas),
                           detail="fewer than 2 admissible triangulations found")
    values = {}
    for delta in deltas:
        values.setdefault(tilde_arc_map(phi, arc, delta), []).append(delta)
    if len(values) == 1:
        return SweepReport("well_defined", passed=True, samples=len(deltas))
    witnesses = [[list(v.word) for v in group] for group in values.values()]
    return SweepReport("well_defined", passed=False, samples=len(deltas),
                       detail="%d distinct values" % len(values), witnesses=witnesses)


def check_naturality(phi: MappingClass, delta: MarkedTriangulation) -> SweepReport:
    """
    The image triangulation's arcs are exactly the induced images of the
    input's arcs; non-exchangeable arcs go through the dual-edge detour
    (flip the dual, then compute in the result).
    """
    delta = _replay_consistent(phi.ctx, delta)
    image = apply_to_vertex(phi, delta)
    expected = set(image.keys)
    produced = set()
    detours = 0
    for e in range(delta.shape.num_edges):
        arc = delta.keys[e]
        if delta.shape.is_exchangeable(e):
            produced.add(tilde_arc_map(phi, arc, delta))
        else:
            detours += 1
            dual = delta.shape.dual_edge(e)
            delta2 = flip_marked(delta, dual)
            e2 = delta2.key_index(arc)
            if not delta2.shape.is_exchangeable(e2):
                raise InvariantViolation(
                    "arc still folded after flipping its dual edge")
            produced.add(tilde_arc_map(phi, arc, delta2))
    passed = produced == expected
    return SweepReport("naturality", passed=passed, samples=delta.shape.num_edges,
                       detail="%d dual-edge detours" % detours,
                       witnesses=[] if passed else [
                           [list(k) for k in sorted(produced ^ expected)]])


def check_functorial(phi: MappingClass, psi: MappingClass,
                     arcs_with_deltas) -> SweepReport:
    """
    Composing then inducing equals inducing then composing, on samples:
    (phi psi)~(a) computed directly against phi~(psi~(a)) computed in the
    image triangulation, which contains psi~(a) as an exchangeable arc.
    """
    comp = compose(phi, psi)
    failures = []
    n = 0
    for arc, delta in arcs_with_deltas:
        n += 1
        direct = tilde_arc_map(comp, arc, delta)
        via_psi = tilde_arc_map(psi, arc, delta)
        image_delta = apply_to_vertex(psi, delta)
        staged = tilde_arc_map(phi, via_psi, image_delta)
        if direct != staged:
            failures.append(list(arc))
    return SweepReport("functoriality", passed=not failures, samples=n,
                       witnesses=failures)


def exchangeable_base_arcs(ctx: BaseContext):
    m = ctx.base_marked()
    return [(m.keys[e], m) for e in m.shape.exchangeable_edges()]


# ---------------------------------------------------------------------------
# Path surgery: make an arc exchangeable along a whole path.
# ---------------------------------------------------------------------------


def count_non_exchangeable(path, arc) -> int:
    return sum(
        1 for m in path if not m.shape.is_exchangeable(m.key_index(arc)))


def _check_path(path, arc):
    for m in path:
        if not m.has_arc(arc):
            raise ValueError("a vertex of the path does not contain the arc")
    for m1, m2 in zip(path, path[1:]):
        if not are_adjacent(m1, m2):
            raise ValueError("consecutive path vertices are not adjacent")
    for end in (path[0], path[-1]):
        if not end.shape.is_exchangeable(end.key_index(arc)):
            raise ValueError("the arc must be exchangeable at both endpoints")


def make_exchangeable_path(path, arc, trace=None):
    """
    Rewrite the path so the arc is exchangeable at every vertex, keeping
    the endpoints.  The first folded vertex is removed per step: by
    cancelling an immediate backtrack, by the square detour when the next
    move is disjoint from the dual edge's triangles, or by the pentagon
    detour when it touches them (one vertex longer).  The folded-vertex
    count strictly decreases each step; pass a list as `trace` to record
    the rewrite kinds applied.
    """
    path = list(path)
    if not path:
        raise ValueError("empty path")
    arc = tuple(arc)
    _check_path(path, arc)
    bad = count_non_exchangeable(path, arc)
    while bad:
        i = next(i for i, m in enumerate(path)
                 if not m.shape.is_exchangeable(m.key_index(arc)))
        prev, cur, nxt = path[i - 1], path[i], path[i + 1]
        e_fold = cur.key_index(arc)
        a_star = cur.keys[cur.shape.dual_edge(e_fold)]
        if diff(cur, prev) != a_star:
            raise InvariantViolation(
                "the move into the first folded vertex did not introduce the dual edge")
        y = diff(cur, nxt)
        if y == a_star:
            # immediate backtrack: the only unfolding move returns to prev
            if nxt.vertex_key() != prev.vertex_key():
                raise InvariantViolation("non-dual flip unfolded the arc")
            if trace is not None:
                trace.append("backtrack")
            path[i - 1:i + 2] = [prev]
        else:
            dual_blocks = {s // 3 for s in cur.shape.edge_slots(
                cur.shape.dual_edge(e_fold))}
            e_y = cur.key_index(y)
            y_blocks = {s // 3 for s in cur.shape.edge_slots(e_y)}
            if y_blocks & dual_blocks:
                # pentagon detour, one vertex longer
                x = nxt.flip_arc(a_star)
                yv = x.flip_arc(diff(nxt, cur))
                closing = yv.flip_arc(diff(x, nxt))
                if closing.vertex_key() != prev.vertex_key():
                    raise InvariantViolation("pentagon detour failed to close")
                if trace is not None:
                    trace.append("pentagon")
                path[i - 1:i + 2] = [prev, yv, x, nxt]
            else:
                # square detour, same length
                yprime = prev.flip_arc(y)
                check = yprime.flip_arc(diff(prev, cur))
                if check.vertex_key() != nxt.vertex_key():
                    raise InvariantViolation("square detour failed to commute")
                if trace is not None:
                    trace.append("square")
                path[i - 1:i + 2] = [prev, yprime, nxt]
        _check_path(path, arc)
        new_bad = count_non_exchangeable(path, arc)
        if new_bad >= bad:
            raise InvariantViolation(
                "surgery step did not reduce the folded-vertex count")
        bad = new_bad
    return path


def random_surgery_fixture(ctx: BaseContext, rng: random.Random,
                           runs: int = 1, inner_flips: int = 1,
                           max_tries: int = 300):
    """
    A path containing a chosen arc, exchangeable at both ends, with the
    requested number of folded runs in the middle; used to exercise the
    surgery.  Returns (path, arc).
    """
    for _ in range(max_tries):
        start = ctx.base_marked()
        for _step in range(rng.randrange(0, 5)):
            start = flip_marked(
                start, rng.choice(start.shape.exchangeable_edges()))
        # pick a flip of the start vertex that folds some currently
        # exchangeable arc; the path is rooted where the arc is good
        events = []
        for e in start.shape.exchangeable_edges():
            m2 = flip_marked(start, e)
            for i2 in range(m2.shape.num_edges):
                if m2.shape.is_exchangeable(i2):
                    continue
                arc = m2.keys[i2]
                if start.has_arc(arc) and start.shape.is_exchangeable(
                        start.key_index(arc)):
                    events.append((arc, m2))
        if not events:
            continue
        arc, first_fold = rng.choice(events)
        path = [start]
        ok = True
        for run in range(runs):
            m = path[-1]
            if run == 0:
                folding = [first_fold]
            else:
                folding = []
                e_arc = m.key_index(arc)
                for e in m.shape.exchangeable_edges():
                    if e == e_arc:
                        continue
                    m2 = flip_marked(m, e)
                    if not m2.shape.is_exchangeable(m2.key_index(arc)):
                        folding.append(m2)
            if not folding:
                ok = False
                break
            cur = rng.choice(folding)
            path.append(cur)
            dual_arc = cur.keys[cur.shape.dual_edge(cur.key_index(arc))]
            for _k in range(inner_flips):
                e_arc = cur.key_index(arc)
                e_dual = cur.key_index(dual_arc)
                choices = [e for e in cur.shape.exchangeable_edges()
                           if e not in (e_arc, e_dual)]
                if not choices:
                    break
                cur = flip_marked(cur, rng.choice(choices))
                path.append(cur)
            cur = cur.flip_arc(dual_arc)
            path.append(cur)
            if not cur.shape.is_exchangeable(cur.key_index(arc)):
                ok = False
                break
        if not ok:
            continue
        if count_non_exchangeable(path, arc) == 0:
            continue
        return path, arc
    raise RuntimeError("no surgery fixture found")
