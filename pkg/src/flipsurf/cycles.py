r"""
Short cycles in flip-graph balls and their square/pentagon classification.

Simple cycles of length three must never occur; every simple 4-cycle must
be a square (two flips with disjoint supports performed in both orders)
and every simple 5-cycle a pentagon (the five-move relation of two flips
sharing a triangle).  Both patterns are recognized through the difference
identities of the cycle's moves: around the cycle, the arc restored by
step i is the arc removed by step i+2, all removed arcs distinct, plus
disjointness of the two quadrilaterals for squares.  Cycles are only
enumerated where every vertex has its full neighborhood inside the ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .explore import FlipGraphBall
from .marking import diff

SUPPORTED_MAX_LEN = 5


def enumerate_simple_cycles(ball: FlipGraphBall, max_len: int = SUPPORTED_MAX_LEN):
    """
    All simple cycles of length 3..max_len whose vertices lie in the ball
    interior, each listed once up to rotation and reflection.
    """
    if max_len > SUPPORTED_MAX_LEN:
        raise ValueError("cycle enumeration supports lengths up to %d" % SUPPORTED_MAX_LEN)
    interior = set(ball.interior())
    cycles = []

    def extend(path):
        last = path[-1]
        if len(path) >= 3 and path[0] in set(ball.neighbors(last)):
            # close only the canonical traversal: smallest vertex first,
            # second vertex smaller than last (kills rotation/reflection)
            if path[1] < path[-1]:
                cycles.append(tuple(path))
        if len(path) == max_len:
            return
        for nxt in ball.neighbors(last):
            if nxt in interior and nxt > path[0] and nxt not in path:
                extend(path + [nxt])

    for start in sorted(interior):
        extend([start])
    return sorted(cycles, key=lambda c: (len(c), c))


def _cycle_moves(ball: FlipGraphBall, cycle):
    """Removed/introduced arcs along each directed edge of the cycle."""
    k = len(cycle)
    removed, introduced = [], []
    for i in range(k):
        u, v = cycle[i], cycle[(i + 1) % k]
        mu, mv = ball.vertices[u], ball.vertices[v]
        removed.append(diff(mu, mv))
        introduced.append(diff(mv, mu))
    return removed, introduced


def _flip_triangles(m, arc):
    """The two triangles of the quadrilateral flipped at the given arc."""
    e = m.key_index(arc)
    s1, s2 = m.shape.edge_slots(e)
    return {s1 // 3, s2 // 3}


def classify_cycle(ball: FlipGraphBall, cycle) -> str:
    """
    "square" or "pentagon" when the cycle matches the corresponding move
    pattern; anything else (including every 3-cycle) is a "violation".
    """
    for v in cycle:
        if not 0 <= v < ball.num_vertices:
            raise ValueError("cycle vertex %r not in ball" % (v,))
    k = len(cycle)
    if k == 3:
        return "violation"
    if k not in (4, 5):
        raise ValueError("classification supports lengths 3..5, got %d" % k)
    removed, introduced = _cycle_moves(ball, cycle)
    if len(set(removed)) != k:
        return "violation"
    if any(introduced[i] != removed[(i + 2) % k] for i in range(k)):
        return "violation"
    if k == 4:
        # the two flips leaving the first vertex must have disjoint
        # quadrilaterals (removed[0] toward cycle[1], introduced[3] toward
        # cycle[3]; both are arcs of the first vertex)
        m0 = ball.vertices[cycle[0]]
        if _flip_triangles(m0, removed[0]) & _flip_triangles(m0, introduced[3]):
            return "violation"
    return "square" if k == 4 else "pentagon"


@dataclass
class CycleReport:
    counts: dict = field(default_factory=dict)
    squares: int = 0
    pentagons: int = 0
    violations: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "squares": self.squares,
            "pentagons": self.pentagons,
            "clean": self.clean,
            "violations": [list(c) for c in self.violations],
        }


def audit_ball(ball: FlipGraphBall, max_len: int = SUPPORTED_MAX_LEN) -> CycleReport:
    """
    Enumerate and classify all short interior cycles.  Any 3-cycle, or any
    4/5-cycle that is not a square/pentagon, lands in `violations` with its
    full vertex list for reproduction.
    """
    report = CycleReport(counts={L: 0 for L in range(3, max_len + 1)})
    for cycle in enumerate_simple_cycles(ball, max_len):
        report.counts[len(cycle)] += 1
        kind = classify_cycle(ball, cycle)
        if kind == "square":
            report.squares += 1
        elif kind == "pentagon":
            report.pentagons += 1
        else:
            report.violations.append(tuple(cycle))
    return report
