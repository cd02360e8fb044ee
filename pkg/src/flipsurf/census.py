r"""
Exhaustive enumeration of triangle gluings, independent of the flip walk.

Generates fixed-point-free involutions on the 3F side slots, with a
symmetry reduction for completely fresh triangles (permuting and rotating
untouched triangles is free, so the lowest unpaired slot only ever meets
one representative slot per fresh triangle).  Every isomorphism class of
gluing pattern is reached; duplicates are collapsed by canonical key.
"""

from __future__ import annotations

from .canonical import canonical_key
from .surface import CombTriangulation, SurfaceSpec, validate


def enumerate_involutions(num_triangles: int, pruned: bool = True):
    """
    Yield gluing involutions on 3*num_triangles slots.  With pruning, each
    relabeling class appears at least once but not exhaustively; without,
    all (3F-1)!! pairings appear (cross-validation mode, tiny F only).
    """
    n = 3 * num_triangles
    g = [-1] * n

    def candidates(s: int):
        if not pruned:
            return [x for x in range(s + 1, n) if g[x] == -1]
        out = []
        lowest_fresh = None
        tri_s = s // 3
        for t in range(num_triangles):
            slots = (3 * t, 3 * t + 1, 3 * t + 2)
            touched = any(g[x] != -1 for x in slots)
            if t == tri_s:
                free = [x for x in slots if x > s and g[x] == -1]
                if touched:
                    out.extend(free)
                elif free:
                    out.append(free[0])  # rotation of s's own fresh triangle
            elif touched:
                out.extend(x for x in slots if g[x] == -1)
            elif lowest_fresh is None:
                lowest_fresh = 3 * t  # all fresh triangles are interchangeable
        if lowest_fresh is not None:
            out.append(lowest_fresh)
        return out

    def rec():
        s = next((i for i in range(n) if g[i] == -1), None)
        if s is None:
            yield tuple(g)
            return
        for t in candidates(s):
            g[s], g[t] = t, s
            yield from rec()
            g[s], g[t] = -1, -1

    yield from rec()


def gluing_classes(genus: int, punctures: int, pruned: bool = True):
    """
    All homeomorphism classes of triangulations of the surface, as a dict
    canonical key -> representative, by exhaustive gluing enumeration.
    """
    spec = SurfaceSpec(genus, punctures)
    classes = {}
    for g in enumerate_involutions(spec.num_triangles, pruned=pruned):
        tri = CombTriangulation(genus, punctures, g)
        if not validate(tri).ok:
            continue
        key = canonical_key(tri)
        if key not in classes:
            classes[key] = tri
    return classes
