"""The tour of a one-face map and everything read off it.

A unicellular map has a single face whose border visits every corner once.
The *tour* starts in the root corner, leaves along the root flag, and
records each corner with its side: a corner is *left* when the walker keeps
the vertex on its left (it then sweeps the corner counterclockwise for the
local convention), *right* otherwise.  The corner sequence itself does not
depend on the orientation conventions; only the side labels do, and flipping
one vertex toggles exactly the sides of that vertex's corners.

For maps whose vertex degrees are all odd there is a unique choice of
conventions giving every vertex strictly more left than right corners, the
*canonical orientation*.  Under it, the classification implemented here
applies to precubic maps (degrees 1 and 3, root at a leaf):

* an edge is *two-way* if the tour follows it in both directions, *one-way*
  otherwise; two-way edges touch only left corners and are never twists;
* a twist is *left-to-right* or *right-to-left* according to the side of its
  first-visited incident corner;
* a degree-3 vertex with counterclockwise corners ``c1, c2, c3`` (``c1``
  first in the tour) is a *crossing node* -- here called intertwined -- when
  ``c3`` is toured before ``c2``; its flavor is A when all three corners are
  left, else B, C or D according to which of ``c1, c2, c3`` is the single
  right corner;
* a corner is a *descent* when the next corner counterclockwise around its
  vertex has a smaller or equal tour label (a leaf corner is its own
  successor, hence a descent).

The number of intertwined nodes satisfies ``tau = 2h + T_RL - T_LR`` on
every canonically oriented precubic unicellular map of type ``h``; the
boolean check is exposed as :func:`trisection_identity`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .map_kernel import (
    IN,
    LEFT,
    OUT,
    RIGHT,
    RibbonMap,
    SurfaceType,
    _step,
    _visit_of,
    check,
    euler_type,
    trace_faces,
)


class NotUnicellularError(ValueError):
    pass


class NotPrecubicError(ValueError):
    pass


class NotCanonicalError(ValueError):
    pass


class CanonicalUndefinedError(ValueError):
    """Raised when a vertex of even degree makes the majority rule tie."""


@dataclass(frozen=True)
class CornerVisit:
    """One corner of the tour: the sector between ``pred`` and its
    counterclockwise successor ``succ`` at ``vertex``."""

    vertex: int
    pred: int
    succ: int
    side: str  # LEFT or RIGHT
    label: int  # 1-based position in tour order

    @property
    def corner(self) -> tuple[int, int]:
        return (self.pred, self.succ)


@dataclass(frozen=True)
class Tour:
    corners: tuple[CornerVisit, ...]

    def label_of(self) -> dict[tuple[int, int], int]:
        return {c.corner: c.label for c in self.corners}

    def side_of(self) -> dict[tuple[int, int], str]:
        return {c.corner: c.side for c in self.corners}


def tour(m: RibbonMap) -> Tour:
    """Corner sequence of the unique face, starting at the root corner.

    Raises :class:`NotUnicellularError` when the map has more than one face.
    """
    check(m)
    h0, s0 = m.root
    start = (h0, s0, OUT)
    visits = []
    st = start
    while True:
        st = _step(m, st)
        if st[2] == IN:
            (a, b), side = _visit_of(m, st)
            visits.append((m.vertex_of(a), a, b, side))
            st = _step(m, st)
        if st == start:
            break
    if len(visits) != m.num_edges * 2:
        raise NotUnicellularError(
            f"map has {trace_faces(m).num_faces} faces, tour requires one")
    # the visit emitting the root flag is recorded last; the tour starts there
    ordered = [visits[-1]] + visits[:-1]
    corners = tuple(
        CornerVisit(vertex=v, pred=a, succ=b, side=side, label=i + 1)
        for i, (v, a, b, side) in enumerate(ordered))
    return Tour(corners)


def side_counts(m: RibbonMap, t: Tour | None = None) -> list[tuple[int, int]]:
    """Per vertex, the pair (#left corners, #right corners) along the tour."""
    if t is None:
        t = tour(m)
    counts = [[0, 0] for _ in range(m.num_vertices)]
    for c in t.corners:
        counts[c.vertex][0 if c.side == LEFT else 1] += 1
    return [tuple(lr) for lr in counts]


def is_canonical(m: RibbonMap, t: Tour | None = None) -> bool:
    return all(l > r for l, r in side_counts(m, t))


def canonicalizing_flips(m: RibbonMap) -> set[int]:
    """Vertices that must be flipped to reach the canonical orientation."""
    for v, rot in enumerate(m.rotation):
        if len(rot) % 2 == 0:
            raise CanonicalUndefinedError(
                f"vertex {v} has even degree {len(rot)}; majority rule ties")
    counts = side_counts(m)
    return {v for v, (l, r) in enumerate(counts) if r > l}


def canonical_orientation(m: RibbonMap) -> RibbonMap:
    """The flip-equivalent triple giving every vertex a strict left majority.

    Defined (and unique) when all vertex degrees are odd, because flipping a
    vertex swaps its left and right corners.  The physical tour is kept
    intact: if the root vertex itself must be flipped, the stored root side
    bit is toggled so that it keeps denoting the same boundary flag.
    """
    return _apply_flips(m, canonicalizing_flips(m))


def _apply_flips(m: RibbonMap, flips: set[int]) -> RibbonMap:
    """Flip a set of vertices at once, preserving the physical root flag."""
    if not flips:
        return m
    rotation = list(m.rotation)
    twists = set(m.twists)
    for v in flips:
        rotation[v] = tuple(reversed(rotation[v]))
        for h in m.rotation[v]:
            k = m.edge_key(h)
            if m.vertex_of(h) != m.vertex_of(m.pair[h]):
                twists.symmetric_difference_update({k})
    root = m.root
    if m.root_vertex() in flips:
        root = (root[0], 1 - root[1])
    return RibbonMap(m.pair, tuple(rotation), frozenset(twists), root)


def is_precubic(m: RibbonMap) -> bool:
    """All vertices of degree 1 or 3 and the root vertex a leaf."""
    return (all(len(rot) in (1, 3) for rot in m.rotation)
            and len(m.rotation[m.root_vertex()]) == 1)


TWO_WAY, ONE_WAY = "two-way", "one-way"
LEFT_TO_RIGHT, RIGHT_TO_LEFT = "left-to-right", "right-to-left"
FLAVORS = "ABCD"


@dataclass(frozen=True)
class Classification:
    """Everything classify() reads off a canonical precubic tour."""

    edge_ways: dict[int, str]          # edge key -> two-way / one-way
    twist_directions: dict[int, str]   # twist edge key -> LR / RL
    nodes: dict[int, str | None]       # degree-3 vertex -> flavor or None
    tau: int
    t_lr: int
    t_rl: int
    dsc: int
    asc: int

    @property
    def flavor_counts(self) -> dict[str, int]:
        counts = {f: 0 for f in FLAVORS}
        for fl in self.nodes.values():
            if fl is not None:
                counts[fl] += 1
        return counts

    def intertwined_nodes(self) -> list[int]:
        return sorted(v for v, fl in self.nodes.items() if fl is not None)


def classify(m: RibbonMap, t: Tour | None = None) -> Classification:
    """Classify edges, twists and degree-3 nodes of a canonical precubic map.

    Raises :class:`NotPrecubicError` / :class:`NotCanonicalError` when the
    preconditions fail (canonicity is detected from a right-majority
    vertex rather than silently fixed, so failures localize).
    """
    if not is_precubic(m):
        raise NotPrecubicError("map is not precubic (degrees 1/3, root a leaf)")
    if t is None:
        t = tour(m)
    if not is_canonical(m, t):
        raise NotCanonicalError("map is not canonically oriented")

    labels = t.label_of()
    sides = t.side_of()
    e = m.num_edges

    # crossings: after the visit of (a, b) the walker leaves along b if the
    # corner was left, along a otherwise
    cross_from: dict[int, list[int]] = {}
    for c in t.corners:
        frm = c.succ if c.side == LEFT else c.pred
        k = m.edge_key(frm)
        cross_from.setdefault(k, []).append(frm)

    edge_ways = {}
    for k in m.edge_keys():
        f1, f2 = cross_from[k]
        edge_ways[k] = TWO_WAY if f1 != f2 else ONE_WAY

    twist_directions = {}
    for k in sorted(m.twists):
        incident = [labels[c.corner] for c in t.corners
                    if {c.pred, c.succ} & {k, m.pair[k]}]
        side = next(c.side for c in t.corners if c.label == min(incident))
        twist_directions[k] = LEFT_TO_RIGHT if side == LEFT else RIGHT_TO_LEFT

    # two-way edges touch only left corners and are never twists
    for k, way in edge_ways.items():
        if way == TWO_WAY:
            assert k not in m.twists, "two-way edge marked as twist"
            for c in t.corners:
                if {c.pred, c.succ} & {k, m.pair[k]}:
                    assert c.side == LEFT, "two-way edge at a right corner"

    nodes: dict[int, str | None] = {}
    tau = 0
    for v, rot in enumerate(m.rotation):
        if len(rot) != 3:
            continue
        corners = [(h, m.succ(h)) for h in rot]
        c1 = min(corners, key=lambda c: labels[c])
        c2 = (c1[1], m.succ(c1[1]))
        c3 = (c2[1], m.succ(c2[1]))
        if labels[c3] < labels[c2]:
            rights = [i for i, c in enumerate((c1, c2, c3)) if sides[c] == RIGHT]
            assert len(rights) <= 1, "canonical degree-3 vertex with 2 rights"
            flavor = "A" if not rights else "BCD"[rights[0]]
            nodes[v] = flavor
            tau += 1
        else:
            nodes[v] = None

    dsc = 0
    for c in t.corners:
        nxt = (c.succ, m.succ(c.succ))
        if labels[nxt] <= c.label:
            dsc += 1

    t_lr = sum(1 for d in twist_directions.values() if d == LEFT_TO_RIGHT)
    t_rl = len(twist_directions) - t_lr
    return Classification(edge_ways=edge_ways, twist_directions=twist_directions,
                          nodes=nodes, tau=tau, t_lr=t_lr, t_rl=t_rl,
                          dsc=dsc, asc=2 * e - dsc)


def trisection_identity(m: RibbonMap) -> bool:
    """Check ``tau = 2h + T_RL - T_LR`` on a canonical precubic map."""
    cls = classify(m)
    st = euler_type(m)
    return cls.tau == st.twice_h + cls.t_rl - cls.t_lr


# ---------------------------------------------------------------------------
# core / scheme / dominant


@dataclass(frozen=True)
class CoreScheme:
    core: RibbonMap
    scheme: RibbonMap
    dominant: bool


class _Mutable:
    """Scratch representation for deletions and smoothings."""

    def __init__(self, m: RibbonMap):
        self.pair = {h: m.pair[h] for h in range(m.num_half_edges)}
        self.rot = {v: list(r) for v, r in enumerate(m.rotation)}
        self.twists = set(m.twists)  # stored per edge key; keys kept original
        self.root_he = m.root[0]
        self.root_bit = m.root[1]

    def vertex_of(self, h):
        for v, r in self.rot.items():
            if h in r:
                return v
        raise KeyError(h)

    def key(self, h):
        return min(h, self.pair[h])

    def delete_leaf(self, v):
        (h,) = self.rot[v]
        h2 = self.pair[h]
        k = self.key(h)
        self.twists.discard(k)
        del self.pair[h], self.pair[h2]
        del self.rot[v]
        w = self.vertex_of(h2)
        self.rot[w].remove(h2)
        if self.root_he in (h, h2):
            self.root_he = None

    def smooth(self, v):
        x, y = self.rot[v]
        x2, y2 = self.pair[x], self.pair[y]
        assert x2 != y and y2 != x, "cannot smooth an isolated loop vertex"
        t = (self.key(x) in self.twists) ^ (self.key(y) in self.twists)
        self.twists.discard(self.key(x))
        self.twists.discard(self.key(y))
        del self.pair[x], self.pair[y]
        del self.rot[v]
        self.pair[x2], self.pair[y2] = y2, x2
        if t:
            self.twists.add(min(x2, y2))
        if self.root_he in (x, y):
            self.root_he = None

    def index_map(self) -> dict[int, int]:
        return {h: i for i, h in enumerate(sorted(self.pair))}

    def freeze(self) -> RibbonMap:
        index = self.index_map()
        alive = sorted(self.pair)
        pair = tuple(index[self.pair[h]] for h in alive)
        rotation = tuple(tuple(index[h] for h in r)
                         for _, r in sorted(self.rot.items()))
        twists = frozenset(min(index[k], index[self.pair[k]])
                           for k in self.twists)
        if self.root_he is not None and self.root_he in index:
            root = (index[self.root_he], self.root_bit)
        else:
            root = (0, 0)
        return check(RibbonMap(pair, rotation, twists, root))


def core_scheme(m: RibbonMap) -> CoreScheme:
    """Leaf-pruned core and degree-2-path-contracted scheme of ``m``.

    The core deletes leaves recursively; the scheme replaces each maximal
    path of degree-2 vertices by one edge whose twist bit is the parity of
    the path's twist bits (flip interior vertices to push all twists onto a
    single representative edge).  A map is *dominant* when its scheme is
    cubic; a core reduced to a single cycle keeps one degree-2 loop vertex
    and is not dominant.  Trees have an empty core and raise ``ValueError``.
    """
    tour(m)  # raises NotUnicellularError on multi-face input
    if m.num_edges == m.num_vertices - 1:
        raise ValueError("tree input: empty core")
    mm = _Mutable(m)
    while True:
        leaf = next((v for v, r in mm.rot.items() if len(r) == 1), None)
        if leaf is None:
            break
        mm.delete_leaf(leaf)
    core = mm.freeze()

    while True:
        v = next((v for v, r in mm.rot.items()
                  if len(r) == 2 and mm.pair[r[0]] != r[1]), None)
        if v is None:
            break
        mm.smooth(v)
    scheme = mm.freeze()
    dominant = all(len(r) == 3 for r in scheme.rotation)
    return CoreScheme(core=core, scheme=scheme, dominant=dominant)


def report_record(m: RibbonMap) -> dict:
    """NDJSON-ready classification record for one precubic map."""
    mc = canonical_orientation(m)
    cls = classify(mc)
    st = euler_type(mc)
    if mc.num_edges == mc.num_vertices - 1:
        dominant = False
    else:
        dominant = core_scheme(mc).dominant
    return {
        "edges": mc.num_edges,
        "twice_h": st.twice_h,
        "orientable": st.orientable,
        "tau": cls.tau,
        "t_lr": cls.t_lr,
        "t_rl": cls.t_rl,
        "dsc": cls.dsc,
        "asc": cls.asc,
        "flavors": cls.flavor_counts,
        "dominant": dominant,
    }
