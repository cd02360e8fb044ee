r"""
Finite balls of the flip graph and the finite quotient by homeomorphism.

A ball is built breadth-first from the base vertex with vertex-key
deduplication; every vertex strictly inside the radius has all its flip
neighbors present, and indexing is deterministic (each completed frontier
is sorted by vertex key before numbering).  The quotient graph explores
canonical keys instead: its vertices are the finitely many gluing
patterns up to relabeling and orientation reversal, with one edge end per
orbit of exchangeable edges under the pattern's automorphisms.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .canonical import canonical_key, isomorphisms
from .marking import BaseContext, MarkedTriangulation, diff, flip_marked
from .surface import CombTriangulation, InvariantViolation, SurfaceSpec, initial_triangulation

DEFAULT_BALL_CAP = 2_000_000
DEFAULT_QUOTIENT_CAP = 100_000

FORMAT_VERSION = 1


def vertex_digest(vkey) -> str:
    payload = json.dumps([list(k) for k in vkey]).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class FlipGraphBall:
    """Explicit radius-r ball around the base vertex."""

    ctx: BaseContext
    radius: int
    vertices: list
    index: dict
    adjacency: list
    edge_labels: dict
    distance: list
    truncated: bool
    complete_radius: int

    @property
    def center(self):
        return self.vertices[0].vertex_key()

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edge_labels)

    def neighbors(self, i: int):
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def interior(self):
        """Vertices whose whole neighborhood is present in the ball."""
        bound = min(self.radius, self.complete_radius + 1)
        return [i for i in range(len(self.vertices)) if self.distance[i] < bound]

    def edges(self):
        return sorted(self.edge_labels)

    def to_json(self, config=None) -> dict:
        base = self.ctx.base
        return {
            "format_version": FORMAT_VERSION,
            "config": config or {},
            "surface": {"genus": base.genus, "punctures": base.punctures},
            "radius": self.radius,
            "truncated": self.truncated,
            "complete_radius": self.complete_radius,
            "num_vertices": self.num_vertices,
            "num_edges": self.num_edges,
            "vertices": [
                {
                    "index": i,
                    "distance": self.distance[i],
                    "keys": [list(k) for k in m.keys],
                    "shape": m.shape.to_json(),
                    "word": list(m.word),
                }
                for i, m in enumerate(self.vertices)
            ],
            "edges": [
                {
                    "u": u,
                    "v": v,
                    "label_u": list(self.edge_labels[(u, v)][0]),
                    "label_v": list(self.edge_labels[(u, v)][1]),
                }
                for u, v in self.edges()
            ],
        }

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        for i, m in enumerate(self.vertices):
            lines.append(
                '  %d [label="%d", tooltip="%s"];'
                % (i, i, vertex_digest(m.vertex_key())))
        for u, v in self.edges():
            lines.append("  %d -- %d;" % (u, v))
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ball(ctx: BaseContext, radius: int, cap: int = DEFAULT_BALL_CAP,
               check_shapes: bool = False) -> FlipGraphBall:
    """
    Breadth-first ball of the flip graph around the base vertex.

    Deduplication is by vertex key; with check_shapes, every rediscovery
    also confirms the canonical shape key matches (two flip words reaching
    the same vertex must yield isomorphic gluing patterns).
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    start = ctx.base_marked()
    vertices = [start]
    index = {start.vertex_key(): 0}
    adjacency = [[]]
    edge_labels = {}
    distance = [0]
    truncated = False
    complete_radius = radius
    frontier = [0]

    def add_edge(u, v, mu, mv):
        if u > v:
            u, v, mu, mv = v, u, mv, mu
        if (u, v) not in edge_labels:
            edge_labels[(u, v)] = (diff(mu, mv), diff(mv, mu))
            adjacency[u].append(v)
            adjacency[v].append(u)

    for depth in range(1, radius + 1):
        discovered = {}
        links = []
        for u in frontier:
            m = vertices[u]
            for e in m.shape.exchangeable_edges():
                m2 = flip_marked(m, e)
                vk = m2.vertex_key()
                if vk in index:
                    known = vertices[index[vk]]
                    if check_shapes and canonical_key(known.shape) != canonical_key(m2.shape):
                        raise InvariantViolation(
                            "equal vertex keys with non-isomorphic shapes")
                    add_edge(u, index[vk], m, known)
                elif vk in discovered:
                    if check_shapes and canonical_key(
                            discovered[vk].shape) != canonical_key(m2.shape):
                        raise InvariantViolation(
                            "equal vertex keys with non-isomorphic shapes")
                    links.append((u, vk))
                else:
                    discovered[vk] = m2
                    links.append((u, vk))
        new_keys = sorted(discovered)
        if len(vertices) + len(new_keys) > cap:
            new_keys = new_keys[:cap - len(vertices)]
            truncated = True
            complete_radius = depth - 1
        kept = set(new_keys)
        for vk in new_keys:
            index[vk] = len(vertices)
            vertices.append(discovered[vk])
            adjacency.append([])
            distance.append(depth)
        for u, vk in links:
            if vk in kept:
                add_edge(u, index[vk], vertices[u], discovered[vk])
        frontier = [index[vk] for vk in new_keys]
        if truncated or not frontier:
            break
    for nbrs in adjacency:
        nbrs.sort()
    return FlipGraphBall(
        ctx=ctx, radius=radius, vertices=vertices, index=index,
        adjacency=adjacency, edge_labels=edge_labels, distance=distance,
        truncated=truncated, complete_radius=complete_radius)


@dataclass
class QuotientClass:
    key: bytes
    representative: CombTriangulation
    automorphisms: int
    # one entry per orbit of exchangeable edges: (edge, orbit size, target key)
    ends: list = field(default_factory=list)


@dataclass
class QuotientGraph:
    """Flip moves between homeomorphism classes of triangulations."""

    spec: SurfaceSpec
    classes: list
    index: dict
    truncated: bool

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def multiplicity(self, u: int, v: int) -> int:
        return sum(1 for (_e, _s, t) in self.classes[u].ends
                   if self.index[t] == v)

    def edge_multiplicities(self) -> dict:
        out = {}
        for u, cls in enumerate(self.classes):
            for _e, _s, target in cls.ends:
                v = self.index[target]
                if u < v:
                    out[(u, v)] = out.get((u, v), 0) + 1
                elif u == v:
                    out[(u, u)] = out.get((u, u), 0) + 1
        for (u, v), m in list(out.items()):
            if u != v and self.multiplicity(v, u) != m:
                raise InvariantViolation(
                    "asymmetric end counts between classes %d and %d" % (u, v))
        return out

    def to_json(self, config=None) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "config": config or {},
            "surface": {"genus": self.spec.genus, "punctures": self.spec.punctures},
            "truncated": self.truncated,
            "num_classes": self.num_classes,
            "classes": [
                {
                    "index": i,
                    "key": c.key.hex(),
                    "automorphisms": c.automorphisms,
                    "representative": c.representative.to_json(),
                    "ends": [
                        {"edge": e, "orbit_size": s, "target": self.index[t]}
                        for e, s, t in c.ends
                    ],
                }
                for i, c in enumerate(self.classes)
            ],
            "edges": [
                {"u": u, "v": v, "multiplicity": m}
                for (u, v), m in sorted(self.edge_multiplicities().items())
            ],
        }

    def to_dot(self) -> str:
        lines = ["graph quotient {"]
        for i, c in enumerate(self.classes):
            lines.append(
                '  %d [label="%d", tooltip="aut=%d key=%s"];'
                % (i, i, c.automorphisms, c.key.hex()[:16]))
        for (u, v), m in sorted(self.edge_multiplicities().items()):
            lines.append('  %d -- %d [label="%d"];' % (u, v, m))
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_quotient(genus: int, punctures: int,
                   cap: int = DEFAULT_QUOTIENT_CAP) -> QuotientGraph:
    """
    Breadth-first exploration of flip moves between canonical classes,
    seeded at the standard triangulation.  Each class records its
    automorphism count and one edge end per exchangeable-edge orbit.
    """
    spec = SurfaceSpec(genus, punctures)
    start = initial_triangulation(genus, punctures)
    key0 = canonical_key(start)
    classes = [QuotientClass(key0, start, 0)]
    index = {key0: 0}
    truncated = False
    todo = [0]
    while todo:
        i = todo.pop(0)
        cls = classes[i]
        tri = cls.representative
        autos = isomorphisms(tri, tri)
        cls.automorphisms = len(autos)
        exchangeable = tri.exchangeable_edges()
        seen = set()
        for e in exchangeable:
            if e in seen:
                continue
            orbit = {e}
            for sigma, _o in autos:
                x, y = tri.edge_slots(e)
                orbit.add(tri.edge_of_slot(sigma[x]))
            seen |= orbit
            flipped, _ = tri.flip(e)
            key = canonical_key(flipped)
            if key not in index:
                if len(classes) >= cap:
                    truncated = True
                    continue  # end dropped; the build is flagged partial
                index[key] = len(classes)
                classes.append(QuotientClass(key, flipped, 0))
                todo.append(index[key])
            cls.ends.append((e, len(orbit), key))
    return QuotientGraph(spec=spec, classes=classes, index=index, truncated=truncated)
