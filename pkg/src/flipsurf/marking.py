r"""
Isotopy classes of arcs and marked triangulations over a fixed base.

Every arc is carried exactly as its reduced crossing path through the base
triangulation: the corner sector where it leaves its start puncture, the
sequence of base sides it crosses (recorded as the slot it enters each
triangle through), and its final corner.  Reduced paths are geodesic
normal forms, so arcs compare by structure alone.

The public identity of an arc is its ArcKey: the vector of geometric
intersection numbers with the E base edges (with -1 at j for the arc
isotopic to base edge j) extended by 3F corner coordinates, one count per
base triangle corner, of strands cutting that corner.  The vector part
leads the ordering; the corner part separates arcs the plain vector alone
cannot be trusted to distinguish.

Flipping an edge replaces the quadrilateral's diagonal by the smoothing of
side d followed by side a around the corner between them; the smoothing
sweeps clockwise across the base edge germs at that puncture and the
concatenation is then reduced (bigon and spike moves).  A marked
triangulation is a vertex of the flip graph; its identity is its key set.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .surface import (
    CombTriangulation,
    InvariantViolation,
    NotExchangeableError,
    initial_triangulation,
    slot_next,
    slot_prev,
    validate,
)

ArcKey = tuple  # E intersection numbers followed by 3F corner counts
VertexKey = tuple  # sorted tuple of ArcKeys


# ---------------------------------------------------------------------------
# Arc paths: (start corner, entering slots, end corner) over the base.
# ---------------------------------------------------------------------------


def _reverse_path(g0, path):
    start, xs, end = path
    return (end, tuple(g0[x] for x in reversed(xs)), start)


def _reduce_path(g0, start, xs, end):
    """
    Normal form: cancel bigons (a crossing immediately undone through the
    same edge) and end spikes (a terminal crossing of a side incident to
    the endpoint's own puncture, removed by sliding the end germ across).
    """
    stack = []
    for x in xs:
        if stack and x == g0[stack[-1]]:
            stack.pop()
        else:
            stack.append(x)
    xs = stack
    while True:
        if not xs:
            break
        x0 = xs[0]
        if x0 == g0[slot_next(start)]:
            pass  # head is normal
        elif x0 == g0[start]:
            # crosses the outgoing side at the start vertex: hop clockwise
            start = slot_next(x0)
            xs.pop(0)
            continue
        elif x0 == g0[slot_prev(start)]:
            # crosses the incoming side: hop counterclockwise
            start = x0
            xs.pop(0)
            continue
        else:
            raise InvariantViolation("malformed arc path head")
        xm = xs[-1]
        if end == slot_prev(xm):
            break  # tail is normal too
        if end == xm:
            end = slot_next(g0[xm])
            xs.pop()
        elif end == slot_next(xm):
            end = g0[xm]
            xs.pop()
        else:
            raise InvariantViolation("malformed arc path tail")
    if not xs:
        if start // 3 != end // 3 or start == end:
            raise InvariantViolation(
                "arc path reduced to an invalid chord (%d -> %d)" % (start, end))
    return start, tuple(xs), end


def _germ_clockwise_before(g0, p, q) -> bool:
    """
    Strict clockwise order of two distinct arc germs anchored in the same
    base corner, both paths oriented away from the shared puncture.

    Parallel strands diverge at a first triangle; there, read along the
    entered side from its head corner, the possible moves come in the
    order exit-left, end, exit-right, and sweeping clockwise from the germ
    making the later move reaches the other without leaving the corner.
    (In the start corner the move order is end-at-head, cross the opposite
    side, end-at-tail.)
    """
    (cp, ps, pe) = p
    (cq, qs, qe) = q
    if cp != cq:
        raise InvariantViolation("germs compared across different corners")

    def move(xs, k, w, end):
        if k < len(xs):
            x = xs[k]
            if w is None:
                return 1
            if x == g0[slot_next(w)]:
                return 0
            if x == g0[slot_prev(w)]:
                return 2
            raise InvariantViolation("bad step in arc path")
        if w is None:
            return 0 if end == slot_next(cp) else 2
        return 1

    w = None
    k = 0
    while True:
        mp = move(ps, k, w, pe)
        mq = move(qs, k, w, qe)
        if mp != mq:
            return mp > mq
        if k >= len(ps) or k >= len(qs):
            raise InvariantViolation("comparing identical germs")
        if ps[k] != qs[k]:
            raise InvariantViolation("bad step in arc path")
        w = ps[k]
        k += 1


def _sweep_part(g0, vertex_of_corner, path_from, path_to):
    """
    Base sides crossed sweeping clockwise from one germ to another around
    their shared puncture; both paths point away from it.  Distinct
    corners reduce to a corner walk; within one corner the germ order
    decides between no crossing and a full turn.
    """
    c_from, c_to = path_from[0], path_to[0]
    if vertex_of_corner[c_from] != vertex_of_corner[c_to]:
        raise InvariantViolation("sweep endpoints at different punctures")
    if c_from == c_to:
        if _germ_clockwise_before(g0, path_from, path_to):
            return []
        # full turn: cross every germ at the puncture once
        out = [g0[c_from]]
        c = slot_next(g0[c_from])
        while c != c_from:
            out.append(g0[c])
            c = slot_next(g0[c])
        return out
    out = []
    c = c_from
    while c != c_to:
        out.append(g0[c])
        c = slot_next(g0[c])
        if len(out) > len(g0):
            raise InvariantViolation("clockwise sweep failed to close up")
    return out


def _smooth(g0, vertex_of_corner, path_d, path_e_in, path_a):
    """
    The arc following path_d, swinging clockwise around its terminal
    puncture, and continuing along path_a: the flipped diagonal when d and
    a are the quadrilateral's sides meeting at the old diagonal's endpoint.

    The sweep runs through the two current corners flanking the old
    diagonal's germ, so it is computed in two parts split at that germ; a
    single triangulation corner never wraps a full turn, which keeps each
    part well-defined even when d and a share a germ (the fold-creating
    flip, whose new diagonal loops all the way around the puncture).
    """
    start_d, xs_d, end_d = path_d
    start_a, xs_a, end_a = path_a
    d_out = _reverse_path(g0, path_d)
    e_out = _reverse_path(g0, path_e_in)
    sweep = (_sweep_part(g0, vertex_of_corner, d_out, e_out)
             + _sweep_part(g0, vertex_of_corner, e_out, path_a))
    return _reduce_path(g0, start_d, list(xs_d) + sweep + list(xs_a), end_a)


def _path_key(base: CombTriangulation, path) -> ArcKey:
    """Intersection vector plus corner counts; the arc's public identity."""
    E = base.num_edges
    F3 = base.num_slots
    start, xs, end = path
    if not xs:
        if end == slot_next(start):
            side = start
        elif end == slot_prev(start):
            side = slot_prev(start)
        else:
            raise InvariantViolation("empty path does not follow a side")
        j = base.edge_of_slot(side)
        return tuple(-1 if i == j else 0 for i in range(E)) + (0,) * F3
    vector = [0] * E
    for x in xs:
        vector[base.edge_of_slot(x)] += 1
    corners = [0] * F3
    for x, x_next in zip(xs, xs[1:]):
        y = base.gluing[x_next]  # the slot exited to reach the next crossing
        if y == slot_next(x):
            corners[slot_next(x)] += 1
        elif y == slot_prev(x):
            corners[x] += 1
        else:
            raise InvariantViolation("non-adjacent consecutive crossings")
    return tuple(vector) + tuple(corners)


def check_arc_key(key: ArcKey, num_edges: int) -> None:
    """
    Invariants every produced key must satisfy: entries >= -1 with at most
    one -1; a -1 entry means the pure base-edge convention vector (all
    other entries zero); never the zero vector.
    """
    vector = key[:num_edges]
    corners = key[num_edges:]
    if any(x < 0 for x in corners):
        raise InvariantViolation("negative corner count in key %r" % (key,))
    negs = [x for x in vector if x < 0]
    if negs:
        if negs != [-1] or any(x > 0 for x in vector) or any(corners):
            raise InvariantViolation(
                "key %r marks a base edge but has extra crossings" % (key,))
    elif not any(vector):
        raise InvariantViolation("arc key is the zero vector")


@dataclass(frozen=True)
class BaseContext:
    """A validated base triangulation fixing the coordinate system."""

    base: CombTriangulation

    def __post_init__(self):
        report = validate(self.base)
        if not report.ok:
            raise InvariantViolation(
                "base triangulation invalid: %s"
                % ", ".join(c.name for c in report.failures))
        object.__setattr__(self, "_voc", self.base.vertex_of_corner())

    @property
    def num_edges(self) -> int:
        return self.base.num_edges

    @property
    def key_length(self) -> int:
        return self.base.num_edges + self.base.num_slots

    def base_marked(self) -> "MarkedTriangulation":
        base = self.base
        paths = tuple((s, (), slot_next(s)) for s in range(base.num_slots))
        keys = tuple(_path_key(base, paths[a]) for a, _b in base.edges)
        return MarkedTriangulation(self, base, keys, paths, ())

    @staticmethod
    def for_surface(genus: int, punctures: int) -> "BaseContext":
        return BaseContext(initial_triangulation(genus, punctures))

    @staticmethod
    def for_triangulation(tri: CombTriangulation) -> "BaseContext":
        return BaseContext(tri)


class MarkedTriangulation:
    """
    A vertex of the flip graph: a gluing pattern whose edges carry arcs.

    `keys[i]` is the ArcKey of edge i; `paths[s]` the crossing path of slot
    s's arc, oriented along the slot.  `word` records one flip word from
    the base realizing this vertex.  Equality and hash follow vertex
    identity: equal key sets, regardless of presentation.
    """

    __slots__ = ("ctx", "shape", "keys", "paths", "word", "_vkey")

    def __init__(self, ctx, shape, keys, paths, word=()):
        self.ctx = ctx
        self.shape = shape
        self.keys = tuple(tuple(k) for k in keys)
        self.paths = tuple(paths)
        self.word = tuple(word)
        if len(self.keys) != shape.num_edges:
            raise ValueError("need one key per edge")
        if len(self.paths) != shape.num_slots:
            raise ValueError("need one oriented path per slot")
        if len(set(self.keys)) != len(self.keys):
            raise InvariantViolation("marked edges must be pairwise distinct arcs")
        for k in self.keys:
            check_arc_key(k, ctx.num_edges)
        self._vkey = tuple(sorted(self.keys))

    def vertex_key(self) -> VertexKey:
        """Sorted key list; stable across edge reorderings."""
        return self._vkey

    def __eq__(self, other) -> bool:
        return (isinstance(other, MarkedTriangulation)
                and self._vkey == other._vkey)

    def __hash__(self) -> int:
        return hash(self._vkey)

    def __repr__(self) -> str:
        return "MarkedTriangulation(F=%d, word=%r)" % (
            self.shape.num_triangles, self.word)

    def key_vector(self, e: int) -> tuple:
        """Intersection-number part of edge e's key."""
        return self.keys[e][:self.ctx.num_edges]

    def key_index(self, arc: ArcKey) -> int:
        """Edge id currently marked with the given arc."""
        arc = tuple(arc)
        for i, k in enumerate(self.keys):
            if k == arc:
                return i
        raise ValueError("arc %r is not an edge of this triangulation" % (arc,))

    def has_arc(self, arc: ArcKey) -> bool:
        return tuple(arc) in self.keys

    def flip(self, e: int) -> "MarkedTriangulation":
        return flip_marked(self, e)

    def flip_arc(self, arc: ArcKey) -> "MarkedTriangulation":
        return flip_marked(self, self.key_index(arc))

    def relabeled(self, pi) -> "MarkedTriangulation":
        """Same vertex presented through a slot bijection of the shape."""
        shape = self.shape.relabeled(pi)
        reloc = self.shape.edge_relocation(pi)
        keys = [None] * len(self.keys)
        for i, k in enumerate(self.keys):
            keys[reloc[i]] = k
        paths = [None] * len(self.paths)
        for s, p in enumerate(self.paths):
            paths[pi[s]] = p
        return MarkedTriangulation(self.ctx, shape, keys, paths, self.word)

    def to_json(self) -> dict:
        return {
            "shape": self.shape.to_json(),
            "keys": [list(k) for k in self.keys],
            "word": list(self.word),
        }


def flip_marked(m: MarkedTriangulation, e: int) -> MarkedTriangulation:
    """
    Flip edge e of a marked triangulation.

    The new diagonal is traced through the base triangulation as the
    smoothing of side d followed by side a around the quadrilateral corner
    they share; every other arc rides along the edge-id relocation of the
    shape flip.  A violated key invariant afterwards signals a defect and
    aborts; it is never repaired silently.
    """
    shape = m.shape
    g0 = m.ctx.base.gluing
    s1, sa, sb, s2, sc, sd = shape.flip_quadrilateral(e)
    new_path = _smooth(g0, m.ctx._voc, m.paths[sd], m.paths[s1], m.paths[sa])
    new_key = _path_key(m.ctx.base, new_path)
    check_arc_key(new_key, m.ctx.num_edges)
    ke = m.keys[e]
    if new_key == ke:
        raise InvariantViolation(
            "flip of edge %d produced the removed arc again (degenerate move)" % e)
    new_shape, reloc = shape.flip(e)
    keys = [None] * len(m.keys)
    for i, k in enumerate(m.keys):
        keys[reloc[i]] = k
    keys[reloc[e]] = new_key
    # sides move within the two triangles (a->sd, b->sa, c->sb, d->sc)
    # keeping their orientations; everything else stays put
    paths = list(m.paths)
    paths[sd] = m.paths[sa]
    paths[sa] = m.paths[sb]
    paths[sb] = m.paths[sc]
    paths[sc] = m.paths[sd]
    paths[s1] = new_path
    paths[s2] = _reverse_path(g0, new_path)
    return MarkedTriangulation(m.ctx, new_shape, keys, paths, m.word + (e,))


def max_plus_prediction(m: MarkedTriangulation, e: int) -> tuple:
    """
    The coordinatewise max-plus exchange value max(a+c, b+d) - e on the
    vector parts.  Exact for embedded quadrilaterals; kept as a cross-check
    against the traced value (it provably fails on folded quadrilaterals).
    """
    shape = m.shape
    E = m.ctx.num_edges
    s1, sa, sb, s2, sc, sd = shape.flip_quadrilateral(e)
    ka = m.key_vector(shape.edge_of_slot(sa))
    kb = m.key_vector(shape.edge_of_slot(sb))
    kc = m.key_vector(shape.edge_of_slot(sc))
    kd = m.key_vector(shape.edge_of_slot(sd))
    ke = m.key_vector(e)
    return tuple(max(a + c, b + d) - x for a, b, c, d, x in zip(ka, kb, kc, kd, ke))


def replay(ctx: BaseContext, word) -> MarkedTriangulation:
    """Apply a flip word from the base vertex."""
    m = ctx.base_marked()
    for e in word:
        m = flip_marked(m, e)
    return m


def vertex_key(m: MarkedTriangulation) -> VertexKey:
    return m.vertex_key()


def diff(m1: MarkedTriangulation, m2: MarkedTriangulation) -> ArcKey:
    """
    The unique arc of m1 that m2 lacks, defined for elementary-move pairs.
    """
    k1, k2 = set(m1.keys), set(m2.keys)
    only1 = k1 - k2
    only2 = k2 - k1
    if len(only1) != 1 or len(only2) != 1:
        raise ValueError(
            "not an elementary move pair (key sets differ by %d/%d arcs)"
            % (len(only1), len(only2)))
    return next(iter(only1))


def are_adjacent(m1: MarkedTriangulation, m2: MarkedTriangulation) -> bool:
    k1, k2 = set(m1.keys), set(m2.keys)
    return len(k1 - k2) == 1 and len(k2 - k1) == 1


# ---------------------------------------------------------------------------
# Closure checks: the battery that certifies the marking engine.
# ---------------------------------------------------------------------------


def flip_involution_holds(m: MarkedTriangulation, e: int) -> bool:
    """Flipping an edge and then its replacement restores the vertex."""
    m1 = flip_marked(m, e)
    new_arc = diff(m1, m)
    m2 = m1.flip_arc(new_arc)
    return m2.vertex_key() == m.vertex_key()


def quadrilateral_blocks(shape: CombTriangulation, e: int) -> frozenset:
    s1, s2 = shape.edge_slots(e)
    return frozenset((s1 // 3, s2 // 3))


def square_closure_holds(m: MarkedTriangulation, e1: int, e2: int) -> bool:
    """
    Flips on edges with disjoint quadrilaterals commute: the 4-cycle
    a, c, a', c' of flipped arcs returns to the start.
    """
    b1 = quadrilateral_blocks(m.shape, e1)
    b2 = quadrilateral_blocks(m.shape, e2)
    if b1 & b2:
        raise ValueError("edges %d and %d do not have disjoint quadrilaterals" % (e1, e2))
    arc_a = m.keys[e1]
    arc_c = m.keys[e2]
    m1 = flip_marked(m, e1)
    arc_a2 = diff(m1, m)
    m2 = m1.flip_arc(arc_c)
    arc_c2 = diff(m2, m1)
    m3 = m2.flip_arc(arc_a2)
    if diff(m3, m2) != arc_a:
        return False
    m4 = m3.flip_arc(arc_c2)
    if diff(m4, m3) != arc_c:
        return False
    return m4.vertex_key() == m.vertex_key()


def shares_one_triangle(shape: CombTriangulation, e1: int, e2: int) -> bool:
    """Both edges exchangeable and together on exactly one triangle."""
    if not (shape.is_exchangeable(e1) and shape.is_exchangeable(e2)) or e1 == e2:
        return False
    blocks1 = {s // 3 for s in shape.edge_slots(e1)}
    blocks2 = {s // 3 for s in shape.edge_slots(e2)}
    return len(blocks1 & blocks2) == 1


def pentagon_closure_holds(m: MarkedTriangulation, e_a: int, e_c: int) -> bool:
    """
    For exchangeable edges a, c sharing exactly one triangle, the five-move
    cycle flipping c, a, c', d, a' in turn returns to the start.
    """
    if not shares_one_triangle(m.shape, e_a, e_c):
        raise ValueError("edges %d and %d do not share exactly one triangle" % (e_a, e_c))
    arc_a = m.keys[e_a]
    arc_c = m.keys[e_c]
    m1 = flip_marked(m, e_c)
    arc_c2 = diff(m1, m)
    m2 = m1.flip_arc(arc_a)
    arc_d = diff(m2, m1)
    m3 = m2.flip_arc(arc_c2)
    arc_a2 = diff(m3, m2)
    m4 = m3.flip_arc(arc_d)
    if diff(m4, m3) != arc_c:
        return False
    m5 = m4.flip_arc(arc_a2)
    if diff(m5, m4) != arc_a:
        return False
    return m5.vertex_key() == m.vertex_key()


# ---------------------------------------------------------------------------
# Farey oracle for the once-punctured torus.
# ---------------------------------------------------------------------------

BASE_SLOPES = ((0, 1), (1, 0), (1, 1))


def _normalize_slope(p: int, q: int) -> tuple[int, int]:
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    d = gcd(abs(p), abs(q))
    return (p // d, q // d) if d else (p, q)


def _det(a: tuple[int, int], b: tuple[int, int]) -> int:
    return a[0] * b[1] - a[1] * b[0]


def slope_key(slope: tuple[int, int]) -> tuple:
    """
    Intersection numbers of the slope-(p/q) arc with the base slopes
    0/1, 1/0, 1/1: |p qj - q pj| - 1 per base edge (the -1 convention is
    the degenerate case of the same determinant count).
    """
    return tuple(abs(_det(slope, b)) - 1 for b in BASE_SLOPES)


def farey_flip_slope(x, y, z) -> tuple[int, int]:
    """Replace x by the other Farey completion of the edge {y, z}."""
    if abs(_det(y, z)) != 1:
        raise InvariantViolation("slopes %r, %r are not Farey neighbors" % (y, z))
    cand1 = _normalize_slope(y[0] + z[0], y[1] + z[1])
    cand2 = _normalize_slope(y[0] - z[0], y[1] - z[1])
    if x == cand1:
        return cand2
    if x == cand2:
        return cand1
    raise InvariantViolation(
        "slope %r is not a Farey completion of {%r, %r}" % (x, y, z))


def farey_oracle(word) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
    """
    Slope triple reached from {0/1, 1/0, 1/1} by a flip word on the
    once-punctured torus, indexed by edge id of the replayed shape.

    Only the edge-id bookkeeping is shared with the implementation; the
    slope arithmetic is the independent mediant/reflection rule.
    """
    shape = initial_triangulation(1, 1)
    slopes = list(BASE_SLOPES)
    for e in word:
        if not 0 <= e < 3:
            raise ValueError("flip word entries must be edge ids 0..2, got %r" % (e,))
        others = [slopes[j] for j in range(3) if j != e]
        new_slope = farey_flip_slope(slopes[e], *others)
        shape, reloc = shape.flip(e)
        out = [None, None, None]
        for j in range(3):
            out[reloc[j]] = slopes[j]
        out[reloc[e]] = new_slope
        slopes = out
    return tuple(slopes)
