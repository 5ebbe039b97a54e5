"""Exhaustive census of rooted unicellular maps via polygon gluings.

Every rooted unicellular map with ``n`` edges arises exactly once by gluing
the sides of a ``2n``-gon in pairs: a perfect matching on the sides
``0 .. 2n-1`` plus one bit per pair choosing between opposite-direction
identification (bit 0, the two traversals of the glued edge run in opposite
directions) and same-direction identification (bit 1, a one-way edge).  The
polygon boundary is the single face, so the decoded map is unicellular with
its tour visiting polygon corner ``k`` (between sides ``k-1`` and ``k``) at
label ``k+1``; the root is the corner at side 0.

The model is locked by two exact totals: over all ``(2n-1)!! 2^n`` codes the
orientable maps number ``(2n-1)!!`` and every decoded map has one face.

Counting runs on a flat integer kernel (:mod:`umaps._census`, jitted when
numba is available) that never builds map objects; :func:`decode` is the
independent reference path producing full :class:`~umaps.map_kernel.RibbonMap`
values, and the two are cross-checked exhaustively at small ``n`` in the
test suite.  Enumeration order is deterministic: matchings pair the smallest
unmatched side first with partners ascending, twist bits count in binary,
and parallel runs split on the partner of side 0 and merge associatively.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np

from . import _census
from .map_kernel import RibbonMap, check

DEFAULT_MAX_EDGES = 7
ENV_MAX_EDGES = "UMAP_MAX_EDGES"


class EnumerationCapError(ValueError):
    pass


def max_edges_cap(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get(ENV_MAX_EDGES)
    return int(env) if env else DEFAULT_MAX_EDGES


@dataclass(frozen=True)
class GluingCode:
    """A polygon gluing: ``pairs[k]`` in smallest-first order, ``bits[k]``
    the same-direction flag of pair ``k``."""

    n: int
    pairs: tuple[tuple[int, int], ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        n = self.n
        sides = [s for p in self.pairs for s in p]
        if sorted(sides) != list(range(2 * n)) or len(self.pairs) != n:
            raise ValueError("pairs must form a perfect matching on the sides")
        if len(self.bits) != n or any(b not in (0, 1) for b in self.bits):
            raise ValueError("need one 0/1 bit per pair")

    def partner(self) -> list[int]:
        out = [-1] * (2 * self.n)
        for i, j in self.pairs:
            out[i], out[j] = j, i
        return out

    def bit_of_side(self) -> list[int]:
        out = [-1] * (2 * self.n)
        for (i, j), b in zip(self.pairs, self.bits):
            out[i] = out[j] = b
        return out


def iter_matchings(n: int):
    """All perfect matchings of ``{0 .. 2n-1}`` as smallest-first pair lists,
    in the canonical order (partners of the smallest unmatched ascending)."""
    sides = list(range(2 * n))

    def rec(avail):
        if not avail:
            yield []
            return
        a = avail[0]
        for idx in range(1, len(avail)):
            b = avail[idx]
            rest = avail[1:idx] + avail[idx + 1:]
            for tail in rec(rest):
                yield [(a, b)] + tail

    yield from rec(sides)


def iter_codes(n: int):
    """All ``(2n-1)!! 2^n`` gluing codes in deterministic order."""
    for pairs in iter_matchings(n):
        for mask in range(2 ** n):
            bits = tuple((mask >> k) & 1 for k in range(n))
            yield GluingCode(n=n, pairs=tuple(pairs), bits=bits)


def decode(code: GluingCode) -> RibbonMap:
    """Glue the polygon sides of ``code`` into a rooted map.

    Corners of the polygon are numbered so that side ``k`` runs from corner
    ``k`` to corner ``k+1``; gluing identifies corner points, one half-edge
    is created per glued pair of side ends, and each vertex's rotation is
    read off the corner cycle around it (the walk direction becomes that
    vertex's counterclockwise convention).
    """
    n, N = code.n, 2 * code.n
    match = code.partner()
    bit = code.bit_of_side()

    # half-edge ids: pair k owns 2k (tail of the smaller side) and 2k+1
    he_of_tail = [-1] * N
    he_of_head = [-1] * N
    for k, ((i, j), b) in enumerate(zip(code.pairs, code.bits)):
        if b == 0:  # opposite direction: {T_i, H_j} and {H_i, T_j}
            he_of_tail[i] = he_of_head[j] = 2 * k
            he_of_head[i] = he_of_tail[j] = 2 * k + 1
        else:       # same direction: {T_i, T_j} and {H_i, H_j}
            he_of_tail[i] = he_of_tail[j] = 2 * k
            he_of_head[i] = he_of_head[j] = 2 * k + 1
    pair = tuple(h ^ 1 for h in range(2 * n))

    # spin links between the two corner visits sharing a half-edge:
    # equal spin when the directions differ (one outward, one inward)
    nbr = [[-1, -1] for _ in range(N)]  # [slot0 = departing, slot1 = arriving]
    par = [[0, 0] for _ in range(N)]
    for i in range(N):
        j, b = match[i], bit[i]
        ip1, jp1 = (i + 1) % N, (j + 1) % N
        if b == 0:
            nbr[i][0], par[i][0] = jp1, 0
            nbr[ip1][1], par[ip1][1] = j, 0
        else:
            nbr[i][0], par[i][0] = j, 1
            nbr[ip1][1], par[ip1][1] = jp1, 1

    vid = [-1] * N
    spin = [0] * N
    slot_used = [0] * N
    rotations: list[tuple[int, ...]] = []
    for c0 in range(N):
        if vid[c0] != -1:
            continue
        v = len(rotations)
        cyc_links = []
        c, slot = c0, 0
        vid[c0] = v
        while True:
            slot_used[c] = slot
            link_he = he_of_tail[c] if slot == 0 else he_of_head[(c - 1) % N]
            nc, p = nbr[c][slot], par[c][slot]
            cyc_links.append(link_he)
            arrived = (1 - slot) if p == 0 else slot
            if nc == c0:
                assert arrived == 1, "vertex cycle closed inconsistently"
                assert spin[c] ^ p == spin[c0], "spin coloring inconsistent"
                break
            vid[nc] = v
            spin[nc] = spin[c] ^ p
            c, slot = nc, 1 - arrived
        rotations.append(tuple(cyc_links))

    # declaring each walk order counterclockwise, the tour sweeps a corner
    # counterclockwise (a left corner) exactly when the walk left it along
    # its departing side
    side = [0 if slot_used[c] == 0 else 1 for c in range(N)]
    twists = set()
    for k, ((i, j), b) in enumerate(zip(code.pairs, code.bits)):
        t1 = side[i] ^ side[(i + 1) % N]
        t2 = side[j] ^ side[(j + 1) % N]
        assert t1 == t2, "the two crossings of an edge disagree on twisting"
        if t1:
            twists.add(2 * k)

    root = (he_of_tail[0], 0 if side[0] == 0 else 1)
    return check(RibbonMap(pair, tuple(rotations), frozenset(twists), root))


# ---------------------------------------------------------------------------
# aggregated census tables


VIOLATION_NAMES = (
    "trisection", "descents", "twist-crossings", "two-way-side",
    "two-way-twist", "leaf-count", "cycle-close", "spin-color",
    "right-majority", "tau-range",
)

Key = tuple[int, bool]  # (twice_h, orientable)


@dataclass(frozen=True)
class CensusFilter:
    """Predicate on census maps; ``None`` fields match anything."""

    precubic: bool | None = None
    orientable: bool | None = None
    twice_h: frozenset[int] | None = None
    root_at_leaf: bool | None = None

    def matches(self, twice_h: int, orientable: bool, precubic: bool,
                root_at_leaf: bool) -> bool:
        if self.precubic is not None and precubic != self.precubic:
            return False
        if self.orientable is not None and orientable != self.orientable:
            return False
        if self.twice_h is not None and twice_h not in self.twice_h:
            return False
        if self.root_at_leaf is not None and root_at_leaf != self.root_at_leaf:
            return False
        return True

    def kernel_args(self) -> dict:
        mask = 0
        for th in self.twice_h or ():
            mask |= 1 << th
        tri = lambda x: -1 if x is None else int(x)
        return {
            "f_precubic": tri(self.precubic),
            "f_orient": tri(self.orientable),
            "f_rootleaf": tri(self.root_at_leaf),
            "f_hmask": mask,
        }


@dataclass
class CountTable:
    """Aggregated census of all maps with ``n`` edges.

    ``counts`` (and the root-leaf / precubic variants) are keyed by
    ``(twice_h, orientable)``; ``tau_hist`` and ``flavor_totals`` cover
    precubic maps only; ``dominant`` covers all maps.  ``violations`` counts
    failures of the identities checked inside the kernel and must be all
    zero.  Tables merge associatively with ``+``.
    """

    n: int
    counts: dict[Key, int] = field(default_factory=dict)
    counts_root_leaf: dict[Key, int] = field(default_factory=dict)
    counts_precubic: dict[Key, int] = field(default_factory=dict)
    tau_hist: dict[Key, dict[int, int]] = field(default_factory=dict)
    flavor_totals: dict[Key, dict[str, int]] = field(default_factory=dict)
    dominant: dict[Key, dict[bool, int]] = field(default_factory=dict)
    violations: dict[str, int] = field(default_factory=dict)

    def __add__(self, other: "CountTable") -> "CountTable":
        if self.n != other.n:
            raise ValueError("cannot merge tables for different edge counts")
        out = CountTable(self.n)
        for name in ("counts", "counts_root_leaf", "counts_precubic"):
            a, b = getattr(self, name), getattr(other, name)
            merged = dict(a)
            for k, v in b.items():
                merged[k] = merged.get(k, 0) + v
            setattr(out, name, merged)
        for name in ("tau_hist", "flavor_totals", "dominant"):
            a, b = getattr(self, name), getattr(other, name)
            merged = {k: dict(v) for k, v in a.items()}
            for k, sub in b.items():
                tgt = merged.setdefault(k, {})
                for kk, v in sub.items():
                    tgt[kk] = tgt.get(kk, 0) + v
            setattr(out, name, merged)
        out.violations = dict(self.violations)
        for k, v in other.violations.items():
            out.violations[k] = out.violations.get(k, 0) + v
        return out

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def orientable_total(self) -> int:
        return sum(v for (th, o), v in self.counts.items() if o)

    def violation_total(self) -> int:
        return sum(self.violations.values())

    def select(self, filt: CensusFilter | None) -> dict[Key, int]:
        """Counts of maps passing ``filt``, keyed by (twice_h, orientable)."""
        if filt is None:
            return dict(self.counts)
        out = {}
        for key in self.counts:
            th, ori = key
            all_c = self.counts.get(key, 0)
            pc = self.counts_precubic.get(key, 0)
            rl = self.counts_root_leaf.get(key, 0)
            if filt.precubic is None:
                if filt.root_at_leaf is None:
                    c = all_c
                elif filt.root_at_leaf:
                    c = rl
                else:
                    c = all_c - rl
            elif filt.precubic:
                # precubic maps all have their root at a leaf
                c = pc if filt.root_at_leaf in (None, True) else 0
            else:
                if filt.root_at_leaf is None:
                    c = all_c - pc
                elif filt.root_at_leaf:
                    c = rl - pc
                else:
                    c = all_c - rl
            if filt.orientable is not None and ori != filt.orientable:
                c = 0
            if filt.twice_h is not None and th not in filt.twice_h:
                c = 0
            if c:
                out[key] = c
        return out

    def to_tsv(self, filt: CensusFilter | None = None) -> str:
        rows = ["twice_h\torientable\tcount"]
        for (th, ori), c in sorted(self.select(filt).items()):
            rows.append(f"{th}\t{'yes' if ori else 'no'}\t{c}")
        return "\n".join(rows) + "\n"

    def to_ndjson(self) -> str:
        import json

        rows = []
        for key in sorted(self.counts):
            th, ori = key
            rows.append(json.dumps({
                "twice_h": th,
                "orientable": ori,
                "count": self.counts[key],
                "precubic": self.counts_precubic.get(key, 0),
                "root_at_leaf": self.counts_root_leaf.get(key, 0),
                "tau_hist": {str(t): c for t, c in
                             sorted(self.tau_hist.get(key, {}).items())},
                "flavors": self.flavor_totals.get(key, {}),
                "dominant": self.dominant.get(key, {}).get(True, 0),
            }))
        rows.append(json.dumps({"violations": self.violations,
                                "total": self.total, "n": self.n}))
        return "\n".join(rows) + "\n"


def _table_from_raw(n: int, raw: dict) -> CountTable:
    t = CountTable(n)
    K = n + 2
    for th in range(K):
        for ori in (0, 1):
            cell = th * 2 + ori
            key = (th, bool(ori))
            c = int(raw["counts"][cell])
            if c:
                t.counts[key] = c
            c = int(raw["counts_rootleaf"][cell])
            if c:
                t.counts_root_leaf[key] = c
            c = int(raw["counts_precubic"][cell])
            if c:
                t.counts_precubic[key] = c
            hist = {tau: int(raw["tau_hist"][cell * (n + 1) + tau])
                    for tau in range(n + 1)
                    if raw["tau_hist"][cell * (n + 1) + tau]}
            if hist:
                t.tau_hist[key] = hist
            fl = {f: int(raw["flavors"][cell * 4 + i])
                  for i, f in enumerate("ABCD")
                  if raw["flavors"][cell * 4 + i]}
            if fl:
                t.flavor_totals[key] = fl
            dom = {bool(d): int(raw["dominant"][cell * 2 + d])
                   for d in (0, 1) if raw["dominant"][cell * 2 + d]}
            if dom:
                t.dominant[key] = dom
    t.violations = {name: int(raw["violations"][i])
                    for i, name in enumerate(VIOLATION_NAMES)
                    if raw["violations"][i]}
    return t


def _branch_worker(args):
    n, fp, collect, kargs, max_hits = args
    return _census.scan_branch(n, fp, collect=collect, max_hits=max_hits, **kargs)


def _scan(n: int, jobs: int = 1, collect: bool = False,
          filt: CensusFilter | None = None, max_hits: int = 1 << 20):
    """Run the kernel over all branches; returns (CountTable, hit codes)."""
    kargs = (filt or CensusFilter()).kernel_args() if collect else \
        CensusFilter().kernel_args()
    branches = list(range(1, 2 * n))
    tasks = [(n, fp, collect, kargs, max_hits) for fp in branches]
    if jobs > 1 and len(branches) > 1:
        with get_context("fork").Pool(min(jobs, len(branches))) as pool:
            raws = pool.map(_branch_worker, tasks)
    else:
        raws = [_branch_worker(t) for t in tasks]
    table = CountTable(n)
    hits: list[GluingCode] = []
    for raw in raws:
        table = table + _table_from_raw(n, raw)
        if raw["overflow"]:
            raise MemoryError(
                "hit buffer overflow; tighten the filter or raise max_hits")
        if collect:
            for packed, mask in zip(raw["hits_match"], raw["hits_mask"]):
                pairs = _census.unpack_matching(int(packed), n)
                level_order = sorted(pairs)  # smallest-first construction order
                bits = tuple((int(mask) >> k) & 1 for k in range(n))
                hits.append(GluingCode(n=n, pairs=tuple(level_order), bits=bits))
    return table, hits


def enumerate_maps(n: int, filt: CensusFilter | None = None, visitor=None,
                   jobs: int = 1, max_edges: int | None = None) -> CountTable:
    """Scan all ``(2n-1)!! 2^n`` gluing codes of the 2n-gon.

    Returns the aggregated :class:`CountTable`.  When ``visitor`` is given,
    every decoded map passing ``filt`` is handed to it as a
    :class:`~umaps.map_kernel.RibbonMap` (in deterministic order).
    """
    cap = max_edges_cap(max_edges)
    if n < 1:
        raise ValueError("need at least one edge")
    if n > cap:
        raise EnumerationCapError(
            f"n={n} exceeds the enumeration cap {cap}; raise the cap "
            f"explicitly (max_edges / --max-edges / {ENV_MAX_EDGES}) to allow "
            "long runs")
    collect = visitor is not None
    table, hits = _scan(n, jobs=jobs, collect=collect, filt=filt)
    if visitor is not None:
        for code in hits:
            visitor(decode(code))
    return table


def maps_matching(n: int, filt: CensusFilter | None = None, jobs: int = 1,
                  max_edges: int | None = None) -> list[RibbonMap]:
    """Decode every census map with ``n`` edges passing ``filt``."""
    out: list[RibbonMap] = []
    enumerate_maps(n, filt=filt, visitor=out.append, jobs=jobs,
                   max_edges=max_edges)
    return out


@dataclass(frozen=True)
class PrecubicCensus:
    twice_h: int
    m: int
    edges: int
    count: int
    tau_hist: dict[int, int]
    sum_tau: int
    flavor_totals: dict[str, int]


def precubic_census(twice_h: int, m: int, orientable: bool = False,
                    jobs: int = 1, max_edges: int | None = None) -> PrecubicCensus:
    """Census of precubic maps of one type and size.

    Size ``m`` means ``2m + 1`` edges for integer types (even ``twice_h``)
    and ``2m`` edges for half-integer types.
    """
    if twice_h < 0 or m < 1:
        raise ValueError("need twice_h >= 0 and m >= 1")
    n = 2 * m + (1 if twice_h % 2 == 0 else 0)
    table = enumerate_maps(n, jobs=jobs, max_edges=max_edges)
    key = (twice_h, orientable)
    hist = dict(table.tau_hist.get(key, {}))
    return PrecubicCensus(
        twice_h=twice_h,
        m=m,
        edges=n,
        count=table.counts_precubic.get(key, 0),
        tau_hist=hist,
        sum_tau=sum(t * c for t, c in hist.items()),
        flavor_totals=dict(table.flavor_totals.get(key, {})),
    )
