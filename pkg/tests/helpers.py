"""Shared brute-force oracles, deliberately dumber than the library code."""

from __future__ import annotations

import itertools

from flipsurf.surface import CombTriangulation, slot_next, slot_prev, validate


def naive_involutions(num_slots: int):
    """Every fixed-point-free involution on the slots, by direct pairing."""

    def rec(unpaired, acc):
        if not unpaired:
            yield dict(acc)
            return
        s = unpaired[0]
        for i in range(1, len(unpaired)):
            t = unpaired[i]
            rest = unpaired[1:i] + unpaired[i + 1:]
            yield from rec(rest, acc + [(s, t), (t, s)])

    for pairing in rec(list(range(num_slots)), []):
        yield tuple(pairing[s] for s in range(num_slots))


def naive_gluings(genus: int, punctures: int):
    """All valid gluing patterns of the right surface, no symmetry pruning."""
    F = 4 * genus - 4 + 2 * punctures
    for g in naive_involutions(3 * F):
        tri = CombTriangulation(genus, punctures, g)
        if validate(tri).ok:
            yield tri


def brute_force_isomorphisms(t1: CombTriangulation, t2: CombTriangulation):
    """
    All slot bijections commuting with the gluings that send triangles to
    triangles with a globally consistent rotation sense.  Exponential; only
    for tiny patterns.
    """
    n = t1.num_slots
    F = n // 3
    out = []
    for orient in (1, -1):
        step = slot_next if orient > 0 else slot_prev
        for tri_perm in itertools.permutations(range(F)):
            for rots in itertools.product(range(3), repeat=F):
                sigma = [0] * n
                for t in range(F):
                    x = 3 * t
                    y = 3 * tri_perm[t] + rots[t]
                    for _ in range(3):
                        sigma[x] = y
                        x = slot_next(x)
                        y = step(y)
                if all(sigma[t1.gluing[s]] == t2.gluing[sigma[s]] for s in range(n)):
                    out.append((tuple(sigma), orient))
    return out


def dumb_closed_walks(adjacency, interior, length):
    """
    Simple cycles of exactly `length` with all vertices in `interior`,
    via raw enumeration of closed non-repeating walks, deduplicated by
    rotation and reflection.  Quadratically dumber than the library version.
    """
    interior = set(interior)
    found = set()

    def canon(cycle):
        best = None
        k = len(cycle)
        doubled = cycle + cycle
        for rev in (cycle, tuple(reversed(cycle))):
            doubled = rev + rev
            for i in range(k):
                cand = doubled[i:i + k]
                if best is None or cand < best:
                    best = cand
        return best

    def walk(path):
        last = path[-1]
        if len(path) == length:
            if path[0] in adjacency[last]:
                found.add(canon(tuple(path)))
            return
        for nxt in adjacency[last]:
            if nxt in interior and nxt not in path:
                walk(path + [nxt])

    for v in interior:
        walk([v])
    return found
