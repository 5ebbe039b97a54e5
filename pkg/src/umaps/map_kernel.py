"""Maps on compact surfaces as half-edge triples with twists.

A map is a graph embedded in a compact surface (orientable or not) so that
every face is a disk.  Combinatorially it is stored as a triple plus a root:

* ``pair``      -- a fixed-point-free involution on the half-edge ids
  ``0 .. 2e-1`` pairing the two halves of each edge;
* ``rotation``  -- for each vertex, the cyclic order of its incident
  half-edges, read counterclockwise with respect to a local orientation
  convention chosen at that vertex;
* ``twists``    -- the set of edges whose two endpoint conventions disagree
  across the edge (crossing such an edge flips the side of travel);
* ``root``      -- a distinguished half-edge together with a side bit
  selecting one of its two boundary flags.

Reversing the convention at one vertex (a *flip*) reverses its rotation and
toggles the twist status of every non-loop edge incident to it; two triples
describe the same embedded map exactly when they differ by a set of flips.
Edges are identified by their smaller half-edge id.

Flags and the face walk
-----------------------
Each edge has two boundary sides, so each half-edge ``h`` carries two
*flags*: flag ``(h, 1)`` borders the corner ``(h, succ h)`` that follows
``h`` counterclockwise at its vertex, and flag ``(h, 0)`` borders the corner
``(pred h, h)``.  Face borders are walked with a four-state transition rule
on (flag, direction):

* inward on ``(h, 1)``  -> visit corner ``(h, succ h)`` as a *left* corner,
  continue outward on ``(succ h, 0)``;
* inward on ``(h, 0)``  -> visit corner ``(pred h, h)`` as a *right* corner,
  continue outward on ``(pred h, 1)``;
* outward on ``(h, s)`` -> cross the edge midpoint: continue inward on
  ``(pair h, 1 - s)`` for a plain edge, on ``(pair h, s)`` for a twist.

Every one of the ``4e`` flags is traversed exactly once over all face
borders (each border also has a reverse walk; only one direction is kept),
and every corner is visited exactly once, which makes the total step count
over all borders exactly ``4e`` flags, i.e. ``2e`` corner visits.

The root bit selects the flag along which the face walk leaves the root
corner: bit 0 walks out of the corner ``(pred h, h)``, bit 1 out of
``(h, succ h)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

OUT, IN = 0, 1
LEFT, RIGHT = "L", "R"


class MapStructureError(ValueError):
    """Raised when two maps cannot be compared half-edge by half-edge."""


@dataclass(frozen=True)
class RibbonMap:
    """Rooted map on a locally orientable surface.

    ``pair[h]`` is the partner half-edge of ``h``; ``rotation[v]`` the
    counterclockwise cyclic order at vertex ``v`` (a tuple, read cyclically);
    ``twists`` contains edge keys (an edge's key is its smaller half-edge
    id); ``root`` is ``(half_edge, side_bit)``.
    """

    pair: tuple[int, ...]
    rotation: tuple[tuple[int, ...], ...]
    twists: frozenset[int]
    root: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "pair", tuple(self.pair))
        object.__setattr__(self, "rotation", tuple(tuple(r) for r in self.rotation))
        object.__setattr__(self, "twists", frozenset(self.twists))
        object.__setattr__(self, "root", (int(self.root[0]), int(self.root[1])))

    @property
    def num_half_edges(self) -> int:
        return len(self.pair)

    @property
    def num_edges(self) -> int:
        return len(self.pair) // 2

    @property
    def num_vertices(self) -> int:
        return len(self.rotation)

    def edge_key(self, h: int) -> int:
        return min(h, self.pair[h])

    def edge_keys(self) -> list[int]:
        return sorted(h for h in range(len(self.pair)) if h < self.pair[h])

    def is_twist(self, h: int) -> bool:
        return self.edge_key(h) in self.twists

    def vertex_of(self, h: int) -> int:
        return _topo(self).vertex_of[h]

    def is_loop(self, h: int) -> bool:
        return self.vertex_of(h) == self.vertex_of(self.pair[h])

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def succ(self, h: int) -> int:
        """Half-edge following ``h`` counterclockwise at its vertex."""
        return _topo(self).succ[h]

    def pred(self, h: int) -> int:
        return _topo(self).pred[h]

    def root_vertex(self) -> int:
        return self.vertex_of(self.root[0])

    def root_corner(self) -> tuple[int, int]:
        """Corner ``(a, b)`` bordered by the root flag."""
        h, s = self.root
        return (self.pred(h), h) if s == 0 else (h, self.succ(h))


@dataclass(frozen=True)
class SurfaceType:
    """Topological type ``h`` of a surface, stored exactly as ``2h``.

    Euler characteristic is ``2 - twice_h``; orientable types have even
    ``twice_h`` (genus ``twice_h / 2``), non-orientable ones carry
    ``twice_h`` cross-caps.
    """

    twice_h: int
    orientable: bool

    def __post_init__(self):
        if self.orientable and self.twice_h % 2:
            raise ValueError("orientable type must have even twice_h")

    def __str__(self):
        if self.twice_h % 2 == 0:
            label = f"h={self.twice_h // 2}"
        else:
            label = f"h={self.twice_h}/2"
        return f"{label} ({'orientable' if self.orientable else 'non-orientable'})"


@dataclass(frozen=True)
class FaceTrace:
    """Face borders as cyclic flag sequences.

    Each border lists ``(half_edge, side_bit)`` flags in walk order; every
    one of the ``4e`` flags of the map occurs in exactly one border, exactly
    once (the reverse walk of each border is not listed).  Corner visits are
    the inward half of each flag pair, so a border of ``2k`` flags passes
    ``k`` corners.
    """

    faces: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def num_faces(self) -> int:
        return len(self.faces)


class _Topo:
    """Derived half-edge tables for one map (succ/pred/vertex lookup)."""

    __slots__ = ("vertex_of", "succ", "pred", "pos")

    def __init__(self, m: RibbonMap):
        n = m.num_half_edges
        self.vertex_of = [-1] * n
        self.succ = [-1] * n
        self.pred = [-1] * n
        self.pos = [-1] * n
        for v, rot in enumerate(m.rotation):
            d = len(rot)
            for i, h in enumerate(rot):
                self.vertex_of[h] = v
                self.succ[h] = rot[(i + 1) % d]
                self.pred[h] = rot[(i - 1) % d]
                self.pos[h] = i


@lru_cache(maxsize=512)
def _topo(m: RibbonMap) -> _Topo:
    return _Topo(m)


# ---------------------------------------------------------------------------
# validation


def validate(m: RibbonMap) -> str | None:
    """Return ``None`` if ``m`` is a well-formed connected rooted map,
    otherwise the first violated invariant as a short description."""
    n = len(m.pair)
    if n == 0:
        return "map has no half-edges"
    if n % 2:
        return "odd number of half-edges"
    for h, p in enumerate(m.pair):
        if not 0 <= p < n:
            return f"pairing image {p} of half-edge {h} out of range"
    for h, p in enumerate(m.pair):
        if p == h:
            return f"pairing has fixed point {h}"
        if m.pair[p] != h:
            return "pairing not an involution"
    seen = [0] * n
    for rot in m.rotation:
        if not rot:
            return "empty vertex rotation"
        for h in rot:
            if not 0 <= h < n:
                return f"rotation uses unknown half-edge {h}"
            seen[h] += 1
    for h, c in enumerate(seen):
        if c == 0:
            return f"half-edge {h} missing from rotations"
        if c > 1:
            return f"half-edge {h} appears {c} times in rotations"
    for t in m.twists:
        if not 0 <= t < n or t != min(t, m.pair[t]):
            return f"twist {t} is not an edge key"
    h0, s = m.root
    if not 0 <= h0 < n:
        return f"root half-edge {h0} does not exist"
    if s not in (0, 1):
        return f"root side bit {s} not in {{0,1}}"
    # connectivity over the union of pairing and rotation adjacencies
    topo = _Topo(m)
    reached = [False] * n
    todo = deque([0])
    reached[0] = True
    while todo:
        h = todo.popleft()
        for g in (m.pair[h], topo.succ[h]):
            if not reached[g]:
                reached[g] = True
                todo.append(g)
    if not all(reached):
        return "graph not connected"
    return None


def check(m: RibbonMap) -> RibbonMap:
    """Validate ``m`` and raise ``ValueError`` on the first violation."""
    problem = validate(m)
    if problem is not None:
        raise ValueError(f"invalid map: {problem}")
    return m


# ---------------------------------------------------------------------------
# face walk


def _step(m: RibbonMap, state: tuple[int, int, int]) -> tuple[int, int, int]:
    """One transition of the four-state face walk (see module docstring)."""
    h, s, d = state
    if d == OUT:
        s2 = s if m.is_twist(h) else 1 - s
        return (m.pair[h], s2, IN)
    if s == 1:
        return (m.succ(h), 0, OUT)
    return (m.pred(h), 1, OUT)


def _visit_of(m: RibbonMap, state) -> tuple[tuple[int, int], str]:
    """Corner visit performed by an inward state: ((a, b), side)."""
    h, s, d = state
    assert d == IN
    if s == 1:
        return (h, m.succ(h)), LEFT
    return (m.pred(h), h), RIGHT


def trace_faces(m: RibbonMap) -> FaceTrace:
    """Walk all face borders of ``m``.

    Borders are reported once each (one of the two walk directions), as
    flag sequences rotated to start at their lexicographically least flag
    state for determinism.
    """
    n = m.num_half_edges
    visited = set()
    covered_flags = set()
    faces = []
    for h0 in range(n):
        for s0 in (0, 1):
            for d0 in (OUT, IN):
                start = (h0, s0, d0)
                if start in visited:
                    continue
                cycle = []
                st = start
                while True:
                    visited.add(st)
                    cycle.append(st)
                    st = _step(m, st)
                    if st == start:
                        break
                if (cycle[0][0], cycle[0][1]) in covered_flags:
                    continue  # reverse walk of a border already kept
                flags = tuple((h, s) for h, s, _ in cycle)
                covered_flags.update(flags)
                k = min(range(len(cycle)), key=lambda i: cycle[i])
                faces.append(flags[k:] + flags[:k])
    trace = FaceTrace(tuple(faces))
    assert sum(len(f) for f in trace.faces) == 2 * n
    return trace


def euler_type(m: RibbonMap) -> SurfaceType:
    """Type of the underlying surface via ``e = v + f - 2 + 2h``."""
    f = trace_faces(m).num_faces
    twice_h = 2 + m.num_edges - m.num_vertices - f
    return SurfaceType(twice_h=twice_h, orientable=is_orientable(m))


def orienting_flips(m: RibbonMap) -> set[int] | None:
    """A set of vertices whose flips empty the twist set, or ``None``.

    A twisted loop can never be untwisted (flipping its vertex leaves loop
    twist bits unchanged), and for every non-loop edge the flip bits of its
    endpoints must differ exactly on the twisted edges; the constraints are
    solved by 2-coloring.
    """
    nv = m.num_vertices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for k in m.edge_keys():
        u, v = m.vertex_of(k), m.vertex_of(m.pair[k])
        t = 1 if k in m.twists else 0
        if u == v:
            if t:
                return None
            continue
        adj[u].append((v, t))
        adj[v].append((u, t))
    color = [-1] * nv
    for v0 in range(nv):
        if color[v0] != -1:
            continue
        color[v0] = 0
        todo = deque([v0])
        while todo:
            u = todo.popleft()
            for w, t in adj[u]:
                want = color[u] ^ t
                if color[w] == -1:
                    color[w] = want
                    todo.append(w)
                elif color[w] != want:
                    return None
    return {v for v in range(nv) if color[v] == 1}


def is_orientable(m: RibbonMap) -> bool:
    """True iff some set of vertex flips empties the twist set."""
    return orienting_flips(m) is not None


def flip_vertex(m: RibbonMap, v: int) -> RibbonMap:
    """Reverse the orientation convention at vertex ``v``.

    The rotation at ``v`` is reversed and every non-loop edge incident to
    ``v`` toggles twist membership; loops at ``v`` and the root field are
    unchanged.
    """
    if not 0 <= v < m.num_vertices:
        raise ValueError(f"unknown vertex id {v}")
    rotation = list(m.rotation)
    rotation[v] = tuple(reversed(rotation[v]))
    twists = set(m.twists)
    for h in m.rotation[v]:
        if not m.is_loop(h):
            twists.symmetric_difference_update({m.edge_key(h)})
    return RibbonMap(m.pair, tuple(rotation), frozenset(twists), m.root)


def _vertex_content_map(m: RibbonMap) -> dict[frozenset[int], int]:
    return {frozenset(rot): v for v, rot in enumerate(m.rotation)}


def flip_equivalent(a: RibbonMap, b: RibbonMap) -> bool:
    """Decide whether some flip vector carries ``a`` onto ``b``.

    Both maps must share their half-edge ids, pairing, vertex supports and
    root; otherwise a :class:`MapStructureError` is raised.  Rotation
    comparison fixes each vertex flip bit (equal up to cyclic rotation vs
    reversed; degree <= 2 leaves it free), and the twist sets impose parity
    constraints on non-loop edges which are solved by 2-coloring.  Loop
    twist bits must agree outright.
    """
    if a.pair != b.pair:
        raise MapStructureError("maps have different pairings")
    if a.root != b.root:
        raise MapStructureError("maps have different roots")
    ca, cb = _vertex_content_map(a), _vertex_content_map(b)
    if set(ca) != set(cb):
        raise MapStructureError("maps have different vertex supports")

    n_a = a.num_vertices
    allowed: list[set[int]] = [set() for _ in range(n_a)]
    for content, va in ca.items():
        ra, rb = a.rotation[va], b.rotation[cb[content]]
        if _cyclic_equal(ra, rb):
            allowed[va].add(0)
        if _cyclic_equal(ra, tuple(reversed(rb))):
            allowed[va].add(1)
        if not allowed[va]:
            return False

    nv = n_a
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for k in a.edge_keys():
        ta = 1 if k in a.twists else 0
        tb = 1 if k in b.twists else 0
        u, v = a.vertex_of(k), a.vertex_of(a.pair[k])
        if u == v:
            if ta != tb:
                return False
            continue
        adj[u].append((v, ta ^ tb))
        adj[v].append((u, ta ^ tb))

    color = [-1] * nv
    for v0 in range(nv):
        if color[v0] != -1:
            continue
        for guess in sorted(allowed[v0]):
            trial = {v0: guess}
            todo = deque([v0])
            ok = True
            while todo and ok:
                u = todo.popleft()
                for w, t in adj[u]:
                    want = trial[u] ^ t
                    if w in trial:
                        if trial[w] != want:
                            ok = False
                            break
                    elif want not in allowed[w]:
                        ok = False
                        break
                    else:
                        trial[w] = want
                        todo.append(w)
            if ok:
                for w, c in trial.items():
                    color[w] = c
                break
        else:
            return False
    return True


def _cyclic_equal(x: tuple[int, ...], y: tuple[int, ...]) -> bool:
    if len(x) != len(y):
        return False
    if len(x) == 0:
        return True
    if set(x) != set(y):
        return False
    try:
        i = y.index(x[0])
    except ValueError:
        return False
    d = len(x)
    return all(x[j] == y[(i + j) % d] for j in range(d))


# ---------------------------------------------------------------------------
# UMAP v1 serialization


def to_umap(m: RibbonMap) -> str:
    """Serialize ``m`` as a canonical UMAP v1 document.

    Edges are listed in increasing key order (edge id = line order), each
    vertex rotation is rotated to start at its smallest half-edge, and
    vertices are sorted by that half-edge, so parse/serialize round-trips
    are byte-exact.
    """
    check(m)
    keys = m.edge_keys()
    lines = ["UMAP v1", f"edges: {m.num_edges}"]
    for k in keys:
        lines.append(f"pair: {k} {m.pair[k]}")
    for rot in sorted(m.rotation, key=min):
        i = rot.index(min(rot))
        cyc = rot[i:] + rot[:i]
        lines.append("vertex: " + " ".join(str(h) for h in cyc))
    twist_ids = sorted(keys.index(k) for k in m.twists)
    lines.append("twists:" + "".join(f" {t}" for t in twist_ids))
    lines.append(f"root: {m.root[0]} {m.root[1]}")
    return "\n".join(lines) + "\n"


def parse_umap(text: str) -> RibbonMap:
    """Parse a UMAP v1 document, rejecting invalid maps with line numbers.

    Blank lines and ``#`` comment lines are ignored.
    """
    rows = []  # (lineno, content)
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        rows.append((i, s))

    def fail(lineno, msg):
        raise ValueError(f"line {lineno}: {msg}")

    if not rows:
        raise ValueError("line 1: empty document")
    it = iter(rows)
    lineno, header = next(it)
    if header != "UMAP v1":
        fail(lineno, f"expected 'UMAP v1' header, got {header!r}")

    def expect(prefix):
        try:
            ln, s = next(it)
        except StopIteration:
            raise ValueError(f"line {rows[-1][0]}: unexpected end of document "
                             f"(missing '{prefix}' line)") from None
        if not s.startswith(prefix):
            fail(ln, f"expected '{prefix}' line, got {s!r}")
        return ln, s[len(prefix):].split()

    ln_e, fields = expect("edges:")
    if len(fields) != 1 or not fields[0].isdigit():
        fail(ln_e, "edges line must hold one non-negative integer")
    e = int(fields[0])
    if e == 0:
        fail(ln_e, "map must have at least one edge")

    pair = [-1] * (2 * e)
    pair_lines = [0] * (2 * e)
    keys = []
    for _ in range(e):
        ln, fields = expect("pair:")
        if len(fields) != 2:
            fail(ln, "pair line must hold two half-edge ids")
        try:
            h0, h1 = int(fields[0]), int(fields[1])
        except ValueError:
            fail(ln, "pair line must hold two integers")
        for h in (h0, h1):
            if not 0 <= h < 2 * e:
                fail(ln, f"half-edge id {h} out of range [0, {2 * e})")
        if h0 == h1:
            fail(ln, f"half-edge {h0} paired with itself")
        if pair[h0] != -1 or pair[h1] != -1:
            fail(ln, "pairing not an involution (half-edge reused)")
        pair[h0], pair[h1] = h1, h0
        pair_lines[h0] = pair_lines[h1] = ln
        keys.append(min(h0, h1))

    rotation = []
    seen = {}
    rest = list(it)
    vertex_rows = [(ln, s) for ln, s in rest if s.startswith("vertex:")]
    tail = [(ln, s) for ln, s in rest if not s.startswith("vertex:")]
    if not vertex_rows:
        fail(rows[-1][0], "no vertex lines")
    for ln, s in vertex_rows:
        try:
            rot = tuple(int(t) for t in s[len("vertex:"):].split())
        except ValueError:
            fail(ln, "vertex line must hold half-edge ids")
        if not rot:
            fail(ln, "empty vertex rotation")
        for h in rot:
            if not 0 <= h < 2 * e:
                fail(ln, f"half-edge id {h} out of range [0, {2 * e})")
            if h in seen:
                fail(ln, f"half-edge {h} already used on line {seen[h]}")
            seen[h] = ln
        rotation.append(rot)
    if len(seen) != 2 * e:
        missing = next(h for h in range(2 * e) if h not in seen)
        fail(vertex_rows[-1][0], f"half-edge {missing} missing from rotations")

    if len(tail) != 2:
        fail(rows[-1][0], "expected exactly one twists line and one root line")
    (ln_t, s_t), (ln_r, s_r) = tail
    if not s_t.startswith("twists:"):
        fail(ln_t, f"expected 'twists:' line, got {s_t!r}")
    twists = set()
    for tok in s_t[len("twists:"):].split():
        try:
            idx = int(tok)
        except ValueError:
            fail(ln_t, f"twist id {tok!r} is not an integer")
        if not 0 <= idx < e:
            fail(ln_t, f"twist edge id {idx} out of range [0, {e})")
        twists.add(keys[idx])
    if not s_r.startswith("root:"):
        fail(ln_r, f"expected 'root:' line, got {s_r!r}")
    fields = s_r[len("root:"):].split()
    if len(fields) != 2:
        fail(ln_r, "root line must hold a half-edge id and a side bit")
    try:
        rh, rs = int(fields[0]), int(fields[1])
    except ValueError:
        fail(ln_r, "root line must hold two integers")
    if not 0 <= rh < 2 * e:
        fail(ln_r, f"root half-edge {rh} out of range")
    if rs not in (0, 1):
        fail(ln_r, f"root side bit {rs} not in {{0,1}}")

    m = RibbonMap(tuple(pair), tuple(rotation), frozenset(twists), (rh, rs))
    problem = validate(m)
    if problem is not None:
        fail(ln_e, problem)
    return m
