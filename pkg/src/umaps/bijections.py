"""Constructive transformations between unicellular map families.

Opening and gluing
------------------
Splitting an intertwined degree-3 vertex into three marked leaves (rotation
and twists inherited) produces a unicellular map of type ``h - 1`` with the
same edges; the marked leaves come out in tour order.  The inverse *gluing*
merges three tour-ordered non-root leaves ``v1, v2, v3`` (leaf edges
``e1, e2, e3``, untwisted since leaf edges of a canonical map are two-way)
into one vertex whose rotation and extra twists depend on the requested
flavor:

=======  =========================  ============
flavor   rotation (counterclockwise)  new twists
=======  =========================  ============
A        ``(e1, e2, e3)``           none
B        ``(e1, e3, e2)``           ``e1, e2``
C        ``(e1, e3, e2)``           ``e2, e3``
D        ``(e1, e2, e3)``           ``e2``
=======  =========================  ============

Each row is the unique choice of rotation and twist subset making the new
vertex intertwined with that flavor and making open and glue mutually
inverse (verified exhaustively by the round-trip tests).  Gluing with
flavor A on an orientable map is the only orientability-preserving case.

The twist-permuting map phi
---------------------------
Cutting the ``k`` twists of a canonically oriented non-orientable precubic
map at their midpoints leaves a twist-free embedded graph with ``2k``
dangling half-twists (*buds*).  Walking its faces so that every corner is
left defines the bud successor permutation ``sigma``; regluing the buds
``sigma(b), sigma(b')`` into a twist for every original twist ``{b, b'}``
yields another canonically oriented unicellular map of the same type, and
the intertwined node counts of the map and its image always add up to
``4h - 2``.  Composing phi (or its inverse) according to whether the count
exceeds ``2h - 1`` gives the averaging involution.

The leaf bijection on the projective plane
------------------------------------------
Deleting a marked non-root leaf of a projective precubic map and smoothing
the remaining degree-2 vertex leaves a smaller projective precubic map plus
the edge side where the leaf hung; re-inserting is the inverse.  Counting
both sides gives ``m * count(m + 1) = 4m * count(m)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .map_kernel import RibbonMap, SurfaceType, check, euler_type
from .unicellular import (
    Classification,
    NotCanonicalError,
    NotPrecubicError,
    _apply_flips,
    _Mutable,
    canonical_orientation,
    canonicalizing_flips,
    classify,
    is_canonical,
    is_precubic,
    tour,
)

GLUE_RULES = {
    "A": ((0, 1, 2), ()),
    "B": ((0, 2, 1), (0, 1)),
    "C": ((0, 2, 1), (1, 2)),
    "D": ((0, 1, 2), (1,)),
}


class NotIntertwinedError(ValueError):
    pass


class OrientableInputError(ValueError):
    """The twist-permuting map needs a non-empty twist set."""


@dataclass(frozen=True)
class MarkedTriple:
    """A precubic unicellular map with three marked non-root leaves listed
    in tour order."""

    map: RibbonMap
    leaves: tuple[int, int, int]

    def __post_init__(self):
        m = self.map
        if len(set(self.leaves)) != 3:
            raise ValueError("need three distinct marked leaves")
        rv = m.root_vertex()
        for v in self.leaves:
            if not 0 <= v < m.num_vertices or len(m.rotation[v]) != 1:
                raise ValueError(f"marked vertex {v} is not a leaf")
            if v == rv:
                raise ValueError("the root leaf cannot be marked")
        labels = tour(m).label_of()
        seen = [labels[(m.rotation[v][0], m.rotation[v][0])] for v in self.leaves]
        if seen != sorted(seen):
            raise ValueError("marked leaves are not in tour order")


def mark_leaves(m: RibbonMap, leaves) -> MarkedTriple:
    """Build a MarkedTriple with the leaves sorted into tour order."""
    labels = tour(m).label_of()
    key = lambda v: labels[(m.rotation[v][0], m.rotation[v][0])]
    ordered = tuple(sorted(leaves, key=key))
    return MarkedTriple(map=m, leaves=ordered)


def open_node(m: RibbonMap, v: int) -> tuple[MarkedTriple, str]:
    """Split the intertwined node ``v`` into three marked leaves.

    Returns the opened map (canonically oriented, type ``h - 1``) with its
    marked leaves in tour order, together with the flavor of ``v``.
    """
    cls = classify(m)
    flavor = cls.nodes.get(v)
    if flavor is None:
        raise NotIntertwinedError(f"vertex {v} is not an intertwined node")
    rot_v = m.rotation[v]
    rotation = [rot for i, rot in enumerate(m.rotation) if i != v]
    new_ids = []
    for h in rot_v:
        new_ids.append(len(rotation))
        rotation.append((h,))
    opened = check(RibbonMap(m.pair, tuple(rotation), m.twists, m.root))
    opened = canonical_orientation(opened)
    triple = mark_leaves(opened, new_ids)
    return triple, flavor


def glue(triple: MarkedTriple, flavor: str) -> RibbonMap:
    """Merge the marked leaves into one intertwined node of ``flavor``.

    The result is canonically oriented and unicellular of type ``h + 1``.
    """
    if flavor not in GLUE_RULES:
        raise ValueError(f"unknown flavor {flavor!r}")
    m = triple.map
    if not is_canonical(m):
        raise NotCanonicalError("glue needs a canonically oriented source")
    order, twist_slots = GLUE_RULES[flavor]
    hs = tuple(m.rotation[v][0] for v in triple.leaves)
    for h in hs:
        assert m.edge_key(h) not in m.twists, \
            "leaf edge of a canonical map cannot be a twist"
    rotation = [rot for i, rot in enumerate(m.rotation)
                if i not in set(triple.leaves)]
    rotation.append(tuple(hs[i] for i in order))
    twists = set(m.twists)
    twists.update(m.edge_key(hs[i]) for i in twist_slots)
    glued = check(RibbonMap(m.pair, tuple(rotation), frozenset(twists), m.root))
    glued = canonical_orientation(glued)
    tour(glued)  # asserts unicellularity
    return glued


# ---------------------------------------------------------------------------
# the twist-permuting map


@dataclass(frozen=True)
class BudSystem:
    """Buds of the cut graph labelled along the tour of the source map.

    ``labels`` maps each half-twist (bud half-edge) to ``1 .. 2k`` in the
    order of the tour blocks it terminates; ``sigma`` is the bud successor
    permutation around the faces of the cut graph, ``alpha`` the twist
    pairing of the source, both on labels; ``r = sigma^{-1}(1)``.
    """

    labels: dict[int, int]
    sigma: dict[int, int]
    alpha: dict[int, int]
    r: int


def _bud_successor(m: RibbonMap) -> dict[int, int]:
    """Successor permutation on the bud half-edges of the cut graph.

    Cut every twist at its midpoint and walk all faces of the remaining
    (twist-free) embedded graph with the all-left convention: from a
    half-edge's clockwise flag, cross plain edges, U-turn at bud tips.
    ``sigma[b]`` is the next bud met around the face containing bud ``b``.
    """
    buds = set()
    for k in m.twists:
        buds.add(k)
        buds.add(m.pair[k])
    out: dict[int, int] = {}
    seen = set()
    for h0 in range(m.num_half_edges):
        if h0 in seen:
            continue
        cycle_buds = []
        h = h0
        while True:
            seen.add(h)
            if h in buds:
                cycle_buds.append(h)
            land = h if h in buds else m.pair[h]
            h = m.succ(land)
            if h == h0:
                break
        for i, b in enumerate(cycle_buds):
            out[b] = cycle_buds[(i + 1) % len(cycle_buds)]
    assert set(out) == buds
    return out


def _check_phi_input(m: RibbonMap) -> None:
    if not is_precubic(m):
        raise NotPrecubicError("twist permutation needs a precubic map")
    if not is_canonical(m):
        raise NotCanonicalError("twist permutation needs the canonical "
                                "orientation")
    if not m.twists:
        raise OrientableInputError("map has no twists (orientable)")


def phi(m: RibbonMap) -> RibbonMap:
    """Reglue every twist ``{b, b'}`` as the twist ``{sigma(b), sigma(b')}``.

    A bijection of the set of non-orientable precubic unicellular maps of
    one type and size onto itself; the result inherits the canonical
    orientation, and the intertwined node counts of ``m`` and ``phi(m)``
    sum to ``4h - 2``.
    """
    _check_phi_input(m)
    sigma = _bud_successor(m)
    pair = list(m.pair)
    new_twists = set()
    for k in m.twists:
        x, y = sigma[k], sigma[m.pair[k]]
        pair[x], pair[y] = y, x
        new_twists.add(min(x, y))
    out = check(RibbonMap(tuple(pair), m.rotation, frozenset(new_twists),
                          m.root))
    tour(out)  # unicellular by construction; fail loudly otherwise
    return out


def phi_inverse(m: RibbonMap) -> RibbonMap:
    """The unique preimage of ``m`` under :func:`phi` (same cut graph, buds
    pulled back through ``sigma``)."""
    _check_phi_input(m)
    sigma = _bud_successor(m)
    sigma_inv = {b: a for a, b in sigma.items()}
    pair = list(m.pair)
    new_twists = set()
    for k in m.twists:
        x, y = sigma_inv[k], sigma_inv[m.pair[k]]
        pair[x], pair[y] = y, x
        new_twists.add(min(x, y))
    out = check(RibbonMap(tuple(pair), m.rotation, frozenset(new_twists),
                          m.root))
    tour(out)
    return out


def averaging_involution(m: RibbonMap) -> RibbonMap:
    """Apply phi when ``tau > 2h - 1``, its inverse when ``tau < 2h - 1``,
    the identity at the average; an involution balancing intertwined node
    counts around the mean ``2h - 1``."""
    _check_phi_input(m)
    tau = classify(m).tau
    pivot = euler_type(m).twice_h - 1
    if tau > pivot:
        return phi(m)
    if tau < pivot:
        return phi_inverse(m)
    return m


def bud_system(m: RibbonMap) -> BudSystem:
    """Label the buds along the tour and express sigma/alpha on labels.

    The tour splits at its ``2k`` twist crossings into blocks
    ``w_1 .. w_{2k+1}``; around the faces of the cut graph the corners
    appear as the blocks ``w'_1 = w_{2k+1} w_1``, then ``w'_i`` equal to
    ``w_i`` for odd ``i`` and its mirror for even ``i``; bud ``i`` is the
    bud following block ``w'_i``.  Odd buds pair with even buds under the
    twist involution ``alpha``, and ``sigma`` maps odd labels to even ones.
    """
    _check_phi_input(m)
    t = tour(m)
    # blocks of corners separated by twist crossings
    blocks: list[list[tuple[int, int]]] = [[]]
    for c in t.corners:
        blocks[-1].append(c.corner)
        frm = c.succ if c.side == "L" else c.pred
        if m.edge_key(frm) in m.twists:
            blocks.append([])
    k = len(m.twists)
    assert len(blocks) == 2 * k + 1, "tour must cross each twist twice"

    # corner immediately before each bud along the all-left face walks
    buds = set()
    for kk in m.twists:
        buds.add(kk)
        buds.add(m.pair[kk])
    prev_corner: dict[tuple[int, int], int] = {}
    seen = set()
    for h0 in range(m.num_half_edges):
        if h0 in seen:
            continue
        h = h0
        while True:
            seen.add(h)
            if h in buds:
                land = h
            else:
                land = m.pair[h]
            nxt = m.succ(land)
            if h in buds:
                # the corner just visited before this U-turn is the corner
                # whose leave half-edge is h, i.e. (pred h, h)
                prev_corner[(m.pred(h), h)] = h
            h = nxt
            if h == h0:
                break

    labels: dict[int, int] = {}
    for i in range(1, 2 * k + 1):
        if i == 1:
            block = blocks[2 * k] + blocks[0]
            last = block[-1]
        elif i % 2 == 1:
            last = blocks[i - 1][-1]
        else:
            last = blocks[i - 1][0]  # mirrored block ends at the first corner
        bud = prev_corner.get(last)
        assert bud is not None, "tour block does not end at a bud"
        assert bud not in labels.values()
        labels[bud] = i

    sigma_he = _bud_successor(m)
    sigma = {labels[b]: labels[s] for b, s in sigma_he.items()}
    alpha = {}
    for kk in m.twists:
        a, b = labels[kk], labels[m.pair[kk]]
        alpha[a], alpha[b] = b, a
    r = next(a for a, b in sigma.items() if b == 1)
    return BudSystem(labels=labels, sigma=sigma, alpha=alpha, r=r)


# ---------------------------------------------------------------------------
# leaf deletion / insertion on the projective plane


def _check_projective_precubic(m: RibbonMap) -> None:
    if not is_precubic(m):
        raise NotPrecubicError("need a precubic map")
    st = euler_type(m)
    if st != SurfaceType(1, False):
        raise ValueError(f"need a projective-plane map, got {st}")


def edge_sides(m: RibbonMap) -> list[tuple[int, int]]:
    """The ``2 e`` edge sides of ``m`` in normalized form, as
    ``(edge key, flag bit at the key half-edge)`` pairs."""
    return [(k, s) for k in m.edge_keys() for s in (0, 1)]


def _normalize_marker(m: RibbonMap, h: int, s: int) -> tuple[int, int]:
    """Represent the edge side through flag ``(h, s)`` at the key half-edge."""
    k = m.edge_key(h)
    if h == k:
        return (h, s)
    t = 1 if k in m.twists else 0
    return (k, s if t else 1 - s)


def remy_delete(m: RibbonMap, leaf: int) -> tuple[RibbonMap, tuple[int, int]]:
    """Delete a marked non-root leaf of a projective precubic map.

    The leaf's neighbor drops to degree 2 and is smoothed into a single
    edge; the marker records the side of that edge on which the leaf hung,
    as an edge side of the returned (canonical) map.  Inverse of
    :func:`remy_insert`.
    """
    _check_projective_precubic(m)
    m = canonical_orientation(m)
    if not 0 <= leaf < m.num_vertices or len(m.rotation[leaf]) != 1:
        raise ValueError(f"vertex {leaf} is not a leaf")
    if leaf == m.root_vertex():
        raise ValueError("cannot delete the root leaf")
    (lk,) = m.rotation[leaf]
    kw = m.pair[lk]
    w = m.vertex_of(kw)
    x, y = m.succ(kw), m.pred(kw)  # rotation at w reads (kw, x, y)
    t_x = 1 if m.edge_key(x) in m.twists else 0
    x2 = m.pair[x]

    mm = _Mutable(m)
    mm.delete_leaf(leaf)
    mm.smooth(w)
    index = mm.index_map()
    small = mm.freeze()
    # the leaf hung on the side curve through the old corner (y, x), which
    # leaves the x-side of w on flag (x, 0) and crosses e_x to its far end
    marker_h = index[x2]
    marker_s = 0 if t_x else 1
    flips = canonicalizing_flips(small)
    if small.vertex_of(marker_h) in flips:
        marker_s = 1 - marker_s
    small = _apply_flips(small, flips)
    return small, _normalize_marker(small, marker_h, marker_s)


def remy_insert(m: RibbonMap, marker: tuple[int, int]) -> RibbonMap:
    """Hang a new leaf on the given edge side of a projective precubic map.

    The marked edge is subdivided and a leaf edge attached on the marked
    side; the output (canonical, two more edges) deletes back to ``m`` with
    the same marker.
    """
    _check_projective_precubic(m)
    if not is_canonical(m):
        raise NotCanonicalError("marker side bits refer to the canonical "
                                "orientation")
    h, s = marker
    if not (0 <= h < m.num_half_edges) or s not in (0, 1):
        raise ValueError(f"invalid marker {marker!r}")
    z, s = _normalize_marker(m, h, s)
    z2 = m.pair[z]
    t_e = 1 if z in m.twists else 0
    t_x = 1 - s
    t_y = t_e ^ t_x

    n_he = m.num_half_edges
    x, y, kw, lk = n_he, n_he + 1, n_he + 2, n_he + 3
    pair = list(m.pair) + [0] * 4
    pair[z], pair[x] = x, z
    pair[y], pair[z2] = z2, y
    pair[kw], pair[lk] = lk, kw
    rotation = list(m.rotation)
    rotation.append((kw, x, y))
    rotation.append((lk,))
    twists = set(m.twists)
    twists.discard(z)
    if t_x:
        twists.add(min(z, x))
    if t_y:
        twists.add(min(y, z2))
    big = check(RibbonMap(tuple(pair), tuple(rotation), frozenset(twists),
                          m.root))
    return canonical_orientation(big)
