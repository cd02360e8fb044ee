r"""
Combinatorial ideal triangulations of punctured surfaces.

A triangulation of a genus-g surface with n punctures (2 - 2g - n < 0) is
encoded as F = 4g - 4 + 2n triangles glued along their sides.  Triangle t
owns the three side slots 3t, 3t+1, 3t+2, listed counterclockwise, and the
gluing is a fixed-point-free involution on the 3F slots pairing each side
with its partner (the identification reverses direction along the side, so
the glued surface is oriented with every triangle counterclockwise).

Edges are the slot pairs of the involution; there are E = 6g - 6 + 3n of
them.  Punctures are the orbits of the corner rotation, flips are gluing
conjugations supported on the two triangles adjacent to an edge.
"""

from __future__ import annotations

from dataclasses import dataclass


class InvalidSurfaceError(ValueError):
    """The glued object is not a triangulated surface of the declared type."""


class NotExchangeableError(ValueError):
    """A flip or dual-edge query hit an edge of the wrong kind."""


class InvariantViolation(RuntimeError):
    """An internal consistency cross-check failed; never repaired silently."""


@dataclass(frozen=True)
class SurfaceSpec:
    """Genus and puncture count, with the standing assumption 2-2g-n < 0."""

    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0:
            raise InvalidSurfaceError("genus must be non-negative, got %d" % self.genus)
        if self.punctures < 1:
            raise InvalidSurfaceError(
                "at least one puncture required, got %d" % self.punctures)
        if self.euler_characteristic >= 0:
            raise InvalidSurfaceError(
                "Euler characteristic must be negative (got genus=%d, punctures=%d, chi=%d)"
                % (self.genus, self.punctures, self.euler_characteristic))

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.punctures

    @property
    def num_triangles(self) -> int:
        return 4 * self.genus - 4 + 2 * self.punctures

    @property
    def num_edges(self) -> int:
        return 6 * self.genus - 6 + 3 * self.punctures


def slot_triangle(s: int) -> int:
    return s // 3


def slot_next(s: int) -> int:
    """Next side counterclockwise within the same triangle."""
    return s - s % 3 + (s + 1) % 3


def slot_prev(s: int) -> int:
    return s - s % 3 + (s + 2) % 3


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


class CombTriangulation:
    """
    Gluing pattern of ideal triangles, immutable after construction.

    `gluing` is the slot involution; `genus`/`punctures` declare the intended
    surface.  Edge ids are derived from the gluing: edges are sorted by their
    smaller slot, so ids are renormalized automatically after every flip.
    """

    __slots__ = ("genus", "punctures", "gluing", "_edges", "_edge_of_slot")

    def __init__(self, genus: int, punctures: int, gluing):
        self.genus = int(genus)
        self.punctures = int(punctures)
        self.gluing = tuple(int(x) for x in gluing)
        n = len(self.gluing)
        if n % 6 != 0:
            raise InvalidSurfaceError("slot count %d is not a multiple of 6" % n)
        for s, p in enumerate(self.gluing):
            if not 0 <= p < n:
                raise InvalidSurfaceError("gluing[%d]=%d out of range" % (s, p))
            if p == s:
                raise InvalidSurfaceError("gluing fixes slot %d" % s)
            if self.gluing[p] != s:
                raise InvalidSurfaceError("gluing is not an involution at slot %d" % s)
        edges = tuple((s, self.gluing[s]) for s in range(n) if s < self.gluing[s])
        self._edges = edges
        eos = [-1] * n
        for i, (a, b) in enumerate(edges):
            eos[a] = eos[b] = i
        self._edge_of_slot = tuple(eos)

    # -- basic structure ---------------------------------------------------

    @property
    def spec(self) -> SurfaceSpec:
        return SurfaceSpec(self.genus, self.punctures)

    @property
    def num_slots(self) -> int:
        return len(self.gluing)

    @property
    def num_triangles(self) -> int:
        return len(self.gluing) // 3

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Slot pairs, ordered by smaller slot; the index is the edge id."""
        return self._edges

    def edge_of_slot(self, s: int) -> int:
        return self._edge_of_slot[s]

    def edge_slots(self, e: int) -> tuple[int, int]:
        if not 0 <= e < len(self._edges):
            raise ValueError("edge id %d out of range [0, %d)" % (e, len(self._edges)))
        return self._edges[e]

    def triangle_slots(self, t: int) -> tuple[int, int, int]:
        return (3 * t, 3 * t + 1, 3 * t + 2)

    def triangle_edges(self, t: int) -> tuple[int, int, int]:
        return tuple(self._edge_of_slot[s] for s in self.triangle_slots(t))

    def __eq__(self, other) -> bool:
        return (isinstance(other, CombTriangulation)
                and self.genus == other.genus
                and self.punctures == other.punctures
                and self.gluing == other.gluing)

    def __hash__(self) -> int:
        return hash((self.genus, self.punctures, self.gluing))

    def __repr__(self) -> str:
        return "CombTriangulation(genus=%d, punctures=%d, F=%d)" % (
            self.genus, self.punctures, self.num_triangles)

    # -- punctures ---------------------------------------------------------

    def puncture_orbits(self) -> tuple[tuple[int, ...], ...]:
        """
        Orbits of corners under the rotation around a vertex.

        Corner i of triangle t sits between sides i-1 and i; rotating
        counterclockwise around the vertex crosses side i-1, landing on the
        corner at the tail of its partner slot.  Hence rho(c) = gluing[prev(c)].
        """
        n = self.num_slots
        seen = [False] * n
        orbits = []
        for c0 in range(n):
            if seen[c0]:
                continue
            orbit = []
            c = c0
            while not seen[c]:
                seen[c] = True
                orbit.append(c)
                c = self.gluing[slot_prev(c)]
            orbits.append(tuple(orbit))
        return tuple(orbits)

    def vertex_of_corner(self) -> tuple[int, ...]:
        """Map corner id -> puncture orbit index."""
        out = [-1] * self.num_slots
        for i, orbit in enumerate(self.puncture_orbits()):
            for c in orbit:
                out[c] = i
        return tuple(out)

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        """Puncture orbits at the two ends of an edge (tail, head of one slot)."""
        voc = self.vertex_of_corner()
        s, _ = self.edge_slots(e)
        return voc[s], voc[slot_next(s)]

    def is_connected(self) -> bool:
        ntri = self.num_triangles
        if ntri == 0:
            return False
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for s in self.triangle_slots(t):
                u = slot_triangle(self.gluing[s])
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == ntri

    # -- exchangeability, dual edges, flips ---------------------------------

    def is_exchangeable(self, e: int) -> bool:
        """
        True unless both sides of the edge lie in one triangle (the folded
        configuration).  When returning False, cross-check that the folded
        edge joins two distinct punctures; a failure means the surface data
        itself is corrupt.
        """
        s1, s2 = self.edge_slots(e)
        if slot_triangle(s1) != slot_triangle(s2):
            return True
        tail, head = self.edge_endpoints(e)
        if tail == head:
            raise InvariantViolation(
                "folded edge %d joins puncture %d to itself; "
                "non-exchangeable edges must join two distinct punctures" % (e, tail))
        return False

    def exchangeable_edges(self) -> tuple[int, ...]:
        return tuple(e for e in range(self.num_edges) if self.is_exchangeable(e))

    def dual_edge(self, e: int) -> int:
        """The third edge of the unique triangle containing a folded edge."""
        s1, s2 = self.edge_slots(e)
        if self.is_exchangeable(e):
            raise NotExchangeableError("edge %d has no dual: it is exchangeable" % e)
        t = slot_triangle(s1)
        (third,) = [s for s in self.triangle_slots(t) if s not in (s1, s2)]
        return self._edge_of_slot[third]

    def flip_quadrilateral(self, e: int) -> tuple[int, int, int, int, int, int]:
        """
        Slots (s1, sa, sb, s2, sc, sd) of the quadrilateral around edge e.

        The diagonal e runs w -> u on its s1 side; the sides in cyclic order
        around the quadrilateral are a (u->v), b (v->w), c (w->x), d (x->u),
        held by slots sa, sb, sc, sd::

             v <---a---- u
             |          ^^
             b    e    / d
             v  (s1) /   |
             w ---c---> x

        Opposite side pairs are {a, c} and {b, d}; the flipped diagonal f
        joins v and x, separating (b, c) from (d, a).
        """
        s1, s2 = self.edge_slots(e)
        if slot_triangle(s1) == slot_triangle(s2):
            raise NotExchangeableError("edge %d is not exchangeable (folded triangle)" % e)
        sa = slot_next(s1)
        sb = slot_next(sa)
        sc = slot_next(s2)
        sd = slot_next(sc)
        return s1, sa, sb, s2, sc, sd

    def flip(self, e: int) -> tuple["CombTriangulation", tuple[int, ...]]:
        """
        Flip edge e, returning (new triangulation, edge id relocation).

        The new diagonal occupies the old diagonal's slots; the four sides
        relocate within the two triangles (a -> sd, b -> sa, c -> sb, d -> sc),
        so the gluing is conjugated by that relocation.  All edges outside the
        two triangles keep their slots; relocation[old_id] = new_id tracks the
        renormalized ids (the new diagonal keeps the flipped edge's image).
        """
        s1, sa, sb, s2, sc, sd = self.flip_quadrilateral(e)
        n = self.num_slots
        pi = list(range(n))
        pi[sa] = sd
        pi[sd] = sc
        pi[sc] = sb
        pi[sb] = sa
        g = self.gluing
        new_g = [0] * n
        for x in range(n):
            new_g[pi[x]] = pi[g[x]]
        out = CombTriangulation(self.genus, self.punctures, new_g)
        relocation = tuple(
            out._edge_of_slot[pi[a]] for (a, _b) in self._edges
        )
        return out, relocation

    # -- relabeling ----------------------------------------------------------

    def relabeled(self, pi) -> "CombTriangulation":
        """
        Apply a slot bijection.  pi must map triangles to triangles respecting
        the cyclic side order globally (preserving or reversing); this is not
        checked here beyond the involution arithmetic.
        """
        n = self.num_slots
        new_g = [0] * n
        for x in range(n):
            new_g[pi[x]] = pi[self.gluing[x]]
        return CombTriangulation(self.genus, self.punctures, new_g)

    def edge_relocation(self, pi) -> tuple[int, ...]:
        """Edge id map induced by a slot bijection pi (for use with relabeled)."""
        relabeled = self.relabeled(pi)
        return tuple(relabeled._edge_of_slot[pi[a]] for (a, _b) in self._edges)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "punctures": self.punctures,
            "triangles": [list(self.triangle_slots(t)) for t in range(self.num_triangles)],
            "gluing": list(self.gluing),
        }

    @staticmethod
    def from_json(data: dict) -> "CombTriangulation":
        tri = CombTriangulation(data["genus"], data["punctures"], data["gluing"])
        expected = [list(tri.triangle_slots(t)) for t in range(tri.num_triangles)]
        if "triangles" in data and [list(t) for t in data["triangles"]] != expected:
            raise InvalidSurfaceError("triangles field does not match slot convention 3t+i")
        return tri


def validate(tri: CombTriangulation, spec: SurfaceSpec | None = None) -> ValidationReport:
    """
    Check a gluing pattern against its declared surface.

    Every check is reported by name; a failing report never passes silently.
    """
    checks = []
    genus = tri.genus if spec is None else spec.genus
    punctures = tri.punctures if spec is None else spec.punctures

    chi = 2 - 2 * genus - punctures
    checks.append(CheckResult(
        "chi_negative", chi < 0,
        "2-2g-n = %d for genus=%d punctures=%d" % (chi, genus, punctures)))

    declared = (tri.genus, tri.punctures) == (genus, punctures)
    checks.append(CheckResult(
        "declared_spec", declared,
        "triangulation declares (%d,%d), expected (%d,%d)"
        % (tri.genus, tri.punctures, genus, punctures)))

    F = 4 * genus - 4 + 2 * punctures
    checks.append(CheckResult(
        "triangle_count", tri.num_triangles == F,
        "F = %d, expected 4g-4+2n = %d" % (tri.num_triangles, F)))

    E = 6 * genus - 6 + 3 * punctures
    checks.append(CheckResult(
        "edge_count", tri.num_edges == E,
        "E = %d, expected 6g-6+3n = %d" % (tri.num_edges, E)))

    connected = tri.is_connected()
    checks.append(CheckResult(
        "connected", connected, "slot adjacency graph connected: %s" % connected))

    V = len(tri.puncture_orbits())
    checks.append(CheckResult(
        "puncture_count", V == punctures,
        "corner rotation orbits = %d, expected n = %d" % (V, punctures)))

    euler = V - tri.num_edges + tri.num_triangles
    checks.append(CheckResult(
        "euler_characteristic", euler == 2 - 2 * genus,
        "V-E+F = %d, expected 2-2g = %d" % (euler, 2 - 2 * genus)))

    return ValidationReport(tuple(checks))


def initial_triangulation(genus: int, punctures: int) -> CombTriangulation:
    """
    Fan triangulation of the standard polygon model.

    The (4g+2n-2)-gon is triangulated by the fan of diagonals from vertex 0;
    boundary sides are glued pairwise following the word
    a1 b1 a1~ b1~ ... ag bg ag~ bg~ c1 c1~ ... c_{n-1} c_{n-1}~,
    which yields one vertex from the handle part plus one pinched vertex per
    adjacent c-pair, i.e. n punctures in total.
    """
    spec = SurfaceSpec(genus, punctures)
    P = 4 * genus + 2 * punctures - 2
    F = P - 2
    assert F == spec.num_triangles

    def side_slot(j: int) -> int:
        # polygon side j = (v_j, v_{j+1}) in the fan triangle layout
        if j == 0:
            return 0
        if j <= P - 2:
            return 3 * (j - 1) + 1
        return 3 * (P - 3) + 2

    n = 3 * F
    g = [-1] * n
    # diagonals d_j = (v0, v_j), shared by consecutive fan triangles
    for j in range(2, P - 1):
        a = 3 * (j - 2) + 2
        b = 3 * (j - 1)
        g[a], g[b] = b, a
    # handle pairs (4k, 4k+2), (4k+1, 4k+3); puncture pairs adjacent after them
    pairs = []
    for k in range(genus):
        pairs.append((4 * k, 4 * k + 2))
        pairs.append((4 * k + 1, 4 * k + 3))
    for j in range(punctures - 1):
        pairs.append((4 * genus + 2 * j, 4 * genus + 2 * j + 1))
    for i, j in pairs:
        a, b = side_slot(i), side_slot(j)
        g[a], g[b] = b, a
    assert -1 not in g
    tri = CombTriangulation(genus, punctures, g)
    report = validate(tri)
    if not report.ok:
        raise InvariantViolation(
            "fan construction failed validation: %s"
            % ", ".join(c.name for c in report.failures))
    return tri


def annulus_pair_triangulation() -> CombTriangulation:
    """
    Triangulation of the twice-punctured torus made of two annuli.

    Triangles (0,1) and (2,3) are each glued along two edges, forming two
    disjoint annulus subsurfaces joined along the remaining sides.  Each
    annulus carries a marching (twist-like) alternating flip word.
    """
    g = [-1] * 12
    for a, b in [(0, 3), (1, 4), (6, 9), (7, 10), (2, 8), (5, 11)]:
        g[a], g[b] = b, a
    tri = CombTriangulation(1, 2, g)
    report = validate(tri)
    if not report.ok:  # pragma: no cover - construction is fixed
        raise InvariantViolation("annulus pair construction failed validation")
    return tri


def capped_annulus_triangulation() -> CombTriangulation:
    """
    Four-punctured sphere: one annulus pair (triangles 0,1 double-glued)
    capped off by two folded triangles.  The annulus supports a marching
    twist word; the folded triangles provide non-exchangeable edges.
    """
    g = [-1] * 12
    for a, b in [(0, 3), (1, 4), (6, 7), (9, 10), (2, 8), (5, 11)]:
        g[a], g[b] = b, a
    tri = CombTriangulation(0, 4, g)
    report = validate(tri)
    if not report.ok:  # pragma: no cover - construction is fixed
        raise InvariantViolation("capped annulus construction failed validation")
    return tri


def tetrahedron_triangulation() -> CombTriangulation:
    """
    Four-punctured sphere as the boundary of the tetrahedron: every pair of
    triangles shares exactly one edge, so opposite edges have disjoint
    quadrilaterals (the commuting-flip configuration).
    """
    # faces of the tetrahedron on vertices {0,1,2,3}, all oriented outward:
    # T0=(0,1,2), T1=(0,2,3), T2=(0,3,1), T3=(1,3,2)
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    directed = {}
    for t, (u, v, w) in enumerate(faces):
        for i, (p, q) in enumerate(((u, v), (v, w), (w, u))):
            directed[(p, q)] = 3 * t + i
    g = [-1] * 12
    for (p, q), s in directed.items():
        g[s] = directed[(q, p)]
    tri = CombTriangulation(0, 4, g)
    report = validate(tri)
    if not report.ok:  # pragma: no cover - construction is fixed
        raise InvariantViolation("tetrahedron construction failed validation")
    return tri


def center_type_03() -> CombTriangulation:
    """The (0,3) triangulation in which every edge is exchangeable."""
    return CombTriangulation(0, 3, [3, 5, 4, 0, 2, 1])


def leaf_type_03() -> CombTriangulation:
    """The (0,3) triangulation with exactly one exchangeable edge."""
    return initial_triangulation(0, 3)
