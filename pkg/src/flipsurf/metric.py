r"""
Desk-scale metric probes: exact ball distances, four-point deltas, and
flat witnesses from commuting flip words.

Distances inside a ball only upper-bound flip-graph distances; a pair is
certified exact when its in-ball distance is at most (r - depth(u)) +
(r - depth(v)), since any path through missing structure is at least that
long.  Only certified quadruples feed the hyperbolicity estimate, so the
reported maxima never rest on truncation artifacts; maxima are cumulative
over the nested radii, hence non-decreasing by construction.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .explore import FlipGraphBall, build_ball, vertex_digest
from .marking import BaseContext, MarkedTriangulation, flip_marked

EXHAUSTIVE_VERTEX_LIMIT = 60
POOL_LIMIT = 120


@dataclass
class DistanceTable:
    """Hop distances from selected sources within a depth-limited subgraph."""

    ball: FlipGraphBall
    radius: int
    rows: dict

    def _row(self, u: int):
        row = self.rows.get(u)
        if row is None:
            raise KeyError("vertex %d is not a distance source" % u)
        return row

    def distance(self, u: int, v: int) -> int:
        if u in self.rows:
            d = self._row(u)[v]
        elif v in self.rows:
            d = self._row(v)[u]
        else:
            raise KeyError("neither %d nor %d is a distance source" % (u, v))
        if d < 0:
            raise ValueError("vertices %d and %d not connected at radius %d"
                             % (u, v, self.radius))
        return d

    def certified(self, u: int, v: int) -> bool:
        """True when the in-ball distance provably equals the graph distance."""
        d = self.distance(u, v)
        du, dv = self.ball.distance[u], self.ball.distance[v]
        return d <= (self.radius - du) + (self.radius - dv)


def bfs_distances(ball: FlipGraphBall, sources, radius: int | None = None) -> DistanceTable:
    """
    Exact hop distances from each source within the depth-`radius` induced
    subgraph of the ball (default: the whole ball).
    """
    if radius is None:
        radius = ball.radius
    allowed = [d >= 0 and d <= radius for d in ball.distance]
    rows = {}
    for s in sources:
        if not allowed[s]:
            raise ValueError("source %d lies outside radius %d" % (s, radius))
        dist = [-1] * ball.num_vertices
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in ball.neighbors(u):
                if allowed[v] and dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        rows[s] = dist
    return DistanceTable(ball=ball, radius=radius, rows=rows)


def four_point_delta(table: DistanceTable, quadruple) -> float:
    """
    Half the gap between the largest and second-largest of the three
    pairwise sums; every one of the six distances must be certified.
    """
    a, b, c, d = quadruple
    for u, v in ((a, b), (a, c), (a, d), (b, c), (b, d), (c, d)):
        if u != v and not table.certified(u, v):
            raise ValueError("quadruple not certified at radius %d" % table.radius)
    s1 = table.distance(a, b) + table.distance(c, d)
    s2 = table.distance(a, c) + table.distance(b, d)
    s3 = table.distance(a, d) + table.distance(b, c)
    big, mid, _small = sorted((s1, s2, s3), reverse=True)
    return (big - mid) / 2.0


@dataclass
class DeltaEstimate:
    radius: int
    samples: int
    certified: int
    max_delta: float
    witness: tuple
    seed: int

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "samples": self.samples,
            "certified": self.certified,
            "max_delta": self.max_delta,
            "witness": list(self.witness),
            "seed": self.seed,
        }


def _stratified_pool(ball: FlipGraphBall, radius: int, rng: random.Random,
                     limit: int = POOL_LIMIT):
    """Vertices spread across depths 0..radius, at most `limit` of them."""
    strata = {}
    for v in range(ball.num_vertices):
        if ball.distance[v] <= radius:
            strata.setdefault(ball.distance[v], []).append(v)
    pool = []
    per = max(1, limit // max(1, len(strata)))
    for depth in sorted(strata):
        vs = strata[depth]
        if len(vs) <= per:
            pool.extend(vs)
        else:
            pool.extend(rng.sample(vs, per))
    return sorted(pool)


def delta_scan(ctx: BaseContext, radius: int, samples: int, seed: int,
               cap: int = None, ball: FlipGraphBall = None) -> list:
    """
    Maximum certified four-point delta per radius up to the given one.

    Balls under EXHAUSTIVE_VERTEX_LIMIT vertices are scanned over all
    quadruples; larger ones over seeded, depth-stratified samples.  The
    reported maxima are cumulative over radii (nested quadruple sets).
    """
    from itertools import combinations

    if ball is None:
        kwargs = {} if cap is None else {"cap": cap}
        ball = build_ball(ctx, radius, **kwargs)
    estimates = []
    running_max = 0.0
    running_witness = ()
    for r in range(radius + 1):
        rng = random.Random((seed, r).__hash__() & 0x7FFFFFFFFFFFFFFF)
        members = [v for v in range(ball.num_vertices) if ball.distance[v] <= r]
        if len(members) <= EXHAUSTIVE_VERTEX_LIMIT:
            pool = members
            quads = list(combinations(pool, 4))
        else:
            pool = _stratified_pool(ball, r, rng)
            quads = [tuple(rng.sample(pool, 4)) for _ in range(samples)]
        table = bfs_distances(ball, pool, radius=r)
        n_cert = 0
        for quad in quads:
            try:
                delta = four_point_delta(table, quad)
            except (ValueError, KeyError):
                continue
            n_cert += 1
            if delta > running_max:
                running_max = delta
                running_witness = quad
        estimates.append(DeltaEstimate(
            radius=r, samples=len(quads), certified=n_cert,
            max_delta=running_max, witness=running_witness, seed=seed))
    return estimates


def delta_scan_csv(estimates) -> str:
    lines = ["radius,samples,certified,max_delta,witness,seed"]
    for est in estimates:
        lines.append("%d,%d,%d,%s,%s,%d" % (
            est.radius, est.samples, est.certified, est.max_delta,
            ";".join(str(i) for i in est.witness), est.seed))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Flat witnesses: commuting words on disjoint supports.
# ---------------------------------------------------------------------------


def support_interior_edges(shape, support):
    """Edges whose both triangles lie in the support, by increasing slot."""
    out = []
    for e in range(shape.num_edges):
        x, y = shape.edge_slots(e)
        if {x // 3, y // 3} <= support:
            out.append(e)
    return out


def _apply_support_word(m: MarkedTriangulation, word, support):
    """
    Flip the word's entries, each naming an interior edge of the support
    by rank; flips therefore never leave the declared triangle set, and
    the word repeats meaningfully because the ranking is intrinsic.
    """
    for k in word:
        interiors = support_interior_edges(m.shape, support)
        if not 0 <= k < len(interiors):
            raise ValueError(
                "word entry %d exceeds the %d interior edges of support %s"
                % (k, len(interiors), sorted(support)))
        m = flip_marked(m, interiors[k])
    return m


@dataclass
class FlatWitnessReport:
    grid: dict
    commutation_ok: bool
    supports: tuple
    words: tuple

    def to_json(self) -> dict:
        return {
            "commutation_ok": self.commutation_ok,
            "supports": [sorted(s) for s in self.supports],
            "words": [list(w) for w in self.words],
            "grid": [
                {
                    "i": i,
                    "j": j,
                    "lower": entry["lower"],
                    "upper": entry["upper"],
                    "exact": entry["exact"],
                    "max_intersection": entry["max_intersection"],
                    "digest": entry["digest"],
                }
                for (i, j), entry in sorted(self.grid.items())
            ],
        }


def flat_witness(ctx: BaseContext, supports, words, m: int, n: int,
                 ball_radius: int = 0) -> FlatWitnessReport:
    """
    Verify that two flip words on disjoint triangle supports commute as
    vertex maps for all exponents up to (m, n), and report the distance
    growth of the grid they span.

    Each word entry names an interior edge of its support by rank, so the
    word's flips stay inside the declared triangle set and its powers are
    well-defined.  Distances from the base come as bounds: the number of
    base arcs lost is a lower bound, the word length an upper one; a
    positive ball_radius adds exact values for grid points inside it.
    """
    sup1, sup2 = frozenset(supports[0]), frozenset(supports[1])
    if sup1 & sup2:
        raise ValueError("non-disjoint supports")
    w1, w2 = tuple(words[0]), tuple(words[1])
    base = ctx.base_marked()
    base_keys = set(base.keys)

    # row 0: powers of w1; then extend each row by powers of w2
    rows = [base]
    for _i in range(m):
        rows.append(_apply_support_word(rows[-1], w1, sup1))
    grid = {}
    for i, start in enumerate(rows):
        cur = start
        grid[(i, 0)] = cur
        for j in range(1, n + 1):
            cur = _apply_support_word(cur, w2, sup2)
            grid[(i, j)] = cur

    # other order: columns of w2 first, then w1 powers; keys must agree
    commutation_ok = True
    col = base
    for j in range(n + 1):
        cur = col
        for i in range(m + 1):
            if cur.vertex_key() != grid[(i, j)].vertex_key():
                commutation_ok = False
            if i < m:
                cur = _apply_support_word(cur, w1, sup1)
        if j < n:
            col = _apply_support_word(col, w2, sup2)

    exact = {}
    if ball_radius > 0:
        ball = build_ball(ctx, ball_radius)
        for (i, j), v in grid.items():
            idx = ball.index.get(v.vertex_key())
            if idx is not None:
                exact[(i, j)] = ball.distance[idx]

    E = ctx.num_edges
    out = {}
    for (i, j), v in grid.items():
        max_int = max(max(k[:E]) for k in v.keys)
        # flips at most double coordinates (plus a bounded sweep), so the
        # intersection growth bounds the distance from below
        lower = max(len(base_keys - set(v.keys)),
                    (max_int + 2).bit_length() - 2 if max_int > 0 else 0)
        upper = i * len(w1) + j * len(w2)
        out[(i, j)] = {
            "lower": lower,
            "upper": upper,
            "exact": exact.get((i, j)),
            "max_intersection": max_int,
            "digest": vertex_digest(v.vertex_key()),
        }
    return FlatWitnessReport(grid=out, commutation_ok=commutation_ok,
                             supports=(sup1, sup2), words=(w1, w2))
