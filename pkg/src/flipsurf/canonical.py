r"""
Canonical forms and isomorphisms of gluing patterns.

Two triangulations are isomorphic when a slot bijection maps triangles to
triangles, respects the cyclic side order globally (either preserving it
everywhere or reversing it everywhere), and commutes with the gluings.
The canonical key quotients by both relabeling and global orientation
reversal, since the extended mapping class group contains orientation
reversing classes.
"""

from __future__ import annotations

from .surface import CombTriangulation, slot_next, slot_prev, slot_triangle


def _encode_from(tri: CombTriangulation, start: int, orient: int):
    """
    BFS relabeling seeded at `start` with rotation sense `orient` (+1/-1).

    Triangles are numbered in discovery order; the k-th discovered triangle's
    slots get labels 3k, 3k+1, 3k+2 walking from its entry slot in the chosen
    rotation sense.  Returns (code, relabeling) where code[s] is the new label
    of the partner of the slot newly labeled s, and relabeling[old] = new.
    """
    g = tri.gluing
    n = tri.num_slots
    step = slot_next if orient > 0 else slot_prev
    new = [-1] * n
    order = [-1] * n  # new label -> old slot
    entry = [start]
    count = 0
    while entry:
        s0 = entry.pop(0)
        if new[s0] != -1:
            continue
        s = s0
        for _ in range(3):
            new[s] = count
            order[count] = s
            count += 1
            s = step(s)
        # queue partners in label order for deterministic discovery
        s = s0
        for _ in range(3):
            p = g[s]
            if new[p] == -1:
                entry.append(p)
            s = step(s)
    # connected surfaces label everything; guard anyway
    if count != n:
        raise ValueError("disconnected gluing pattern cannot be canonically labeled")
    code = bytes(new[g[order[i]]] for i in range(n))
    return code, new


def canonical_form(tri: CombTriangulation) -> tuple[bytes, tuple[int, ...]]:
    """
    Lexicographically least BFS encoding over all (start slot, orientation)
    choices, with the relabeling that realizes it.

    The key is invariant under slot relabeling and global orientation
    reversal; deterministic.
    """
    if tri.num_slots >= 256:
        raise ValueError("canonical byte encoding supports fewer than 86 triangles")
    best = None
    best_relabel = None
    for orient in (1, -1):
        for start in range(tri.num_slots):
            code, relabel = _encode_from(tri, start, orient)
            if best is None or code < best:
                best = code
                best_relabel = tuple(relabel)
    return best, best_relabel


def canonical_key(tri: CombTriangulation) -> bytes:
    return canonical_form(tri)[0]


def canonical_key_hex(tri: CombTriangulation) -> str:
    return canonical_form(tri)[0].hex()


def canonical_representative(tri: CombTriangulation) -> CombTriangulation:
    """The relabeled triangulation realizing the canonical key.

    Orientation-reversing winners still relabel slots only, so the
    representative is a genuine CombTriangulation; equal keys give equal
    representatives up to the orientation quotient, which is re-checked by
    key equality rather than object identity.
    """
    _, relabel = canonical_form(tri)
    return tri.relabeled(relabel)


def _extend_isomorphism(t1: CombTriangulation, t2: CombTriangulation,
                        image0: int, orient: int):
    """Propagate slot 0 -> image0 with rotation sense orient; None if blocked."""
    g1, g2 = t1.gluing, t2.gluing
    n = t1.num_slots
    step = slot_next if orient > 0 else slot_prev
    sigma = [-1] * n
    used = [False] * n

    def assign_triangle(s, im):
        x, y = s, im
        for _ in range(3):
            if sigma[x] != -1:
                if sigma[x] != y:
                    return False
            elif used[y]:
                return False
            else:
                sigma[x] = y
                used[y] = True
            x = slot_next(x)
            y = step(y)
        return True

    if not assign_triangle(0, image0):
        return None
    stack = [0]
    done = set()
    while stack:
        s0 = stack.pop()
        t = slot_triangle(s0)
        if t in done:
            continue
        done.add(t)
        for s in t1.triangle_slots(t):
            p1 = g1[s]
            p2 = g2[sigma[s]]
            if sigma[p1] == -1:
                if not assign_triangle(p1, p2):
                    return None
                stack.append(p1)
            elif sigma[p1] != p2:
                return None
    if -1 in sigma:
        return None
    return tuple(sigma)


def isomorphisms(t1: CombTriangulation, t2: CombTriangulation):
    """
    All gluing-pattern isomorphisms t1 -> t2, each as (slot map, orientation).

    Orientation is +1 for order-preserving maps, -1 for reversing ones.
    Empty exactly when the patterns are non-isomorphic.
    """
    if (t1.genus, t1.punctures) != (t2.genus, t2.punctures):
        raise ValueError(
            "surface mismatch: (%d,%d) vs (%d,%d)"
            % (t1.genus, t1.punctures, t2.genus, t2.punctures))
    if t1.num_slots != t2.num_slots:
        return []
    out = []
    for orient in (1, -1):
        for image0 in range(t2.num_slots):
            sigma = _extend_isomorphism(t1, t2, image0, orient)
            if sigma is not None:
                out.append((sigma, orient))
    return out


def is_isomorphism(t1: CombTriangulation, t2: CombTriangulation,
                   sigma, orient: int) -> bool:
    """Check that sigma conjugates t1's gluing to t2's with rotation sense orient."""
    n = t1.num_slots
    if sorted(sigma) != list(range(n)):
        return False
    step = slot_next if orient > 0 else slot_prev
    for s in range(n):
        if sigma[slot_next(s)] != step(sigma[s]):
            return False
        if sigma[t1.gluing[s]] != t2.gluing[sigma[s]]:
            return False
    return True


def automorphism_count(tri: CombTriangulation) -> int:
    return len(isomorphisms(tri, tri))
