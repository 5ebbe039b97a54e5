"""Flat integer kernel behind the exhaustive census.

Works directly on gluing codes (matching + twist bits of a 2n-gon) without
building map objects: vertices are the cycles of the corner-link walk,
corner spins come from a parity propagation along shared half-edges, sides
from per-vertex spin majorities, and all per-map statistics (type,
orientability, twists and their directions, intertwined nodes and flavors,
descents, dominance) are small integer loops.  The reference object path in
:mod:`umaps.enumeration` computes the same quantities through full
``RibbonMap`` values; the two are compared code-by-code in the tests.

Everything here is written to be compiled by numba when it is installed
(the module falls back to running the same bodies as plain Python).

Accumulator layout, for ``K = (n + 2) * 2`` type/orientability cells with
``cell = twice_h * 2 + orientable``:

* ``counts[cell]``, ``counts_rootleaf[cell]``, ``counts_precubic[cell]``
* ``tau_hist[cell * (n + 1) + tau]``          (precubic maps only)
* ``flavors[cell * 4 + f]``    f in A,B,C,D   (precubic maps only)
* ``dominant[cell * 2 + is_dominant]``        (all maps)
* ``violations[i]``: in-kernel identity checks, all expected to stay 0.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


N_VIOLATIONS = 10
V_TRISECTION = 0        # tau != 2h + T_RL - T_LR
V_DESCENTS = 1          # dsc != e + 1 + T_RL - T_LR
V_TWIST_CROSSINGS = 2   # the two crossings of an edge disagree on twisting
V_TWOWAY_SIDE = 3       # two-way edge incident to a right corner
V_TWOWAY_TWIST = 4      # two-way edge classified as a twist
V_LEAF_COUNT = 5        # wrong non-root leaf count or edge parity
V_CYCLE_CLOSE = 6       # corner cycle closed on the wrong slot
V_SPIN_COLOR = 7        # spin parity constraint inconsistent
V_RIGHT_MAJORITY = 8    # precubic vertex without strict left majority
V_TAU_RANGE = 9         # tau outside [0, #degree-3 vertices]


@njit(cache=True)
def _uf_find(parent, parity, x):
    p = 0
    while parent[x] != x:
        p ^= parity[x]
        x = parent[x]
    return x, p


@njit(cache=True)
def _scan_branch(n, first_partner, collect, f_precubic, f_orient, f_hmask,
                 f_rootleaf, hits_match, hits_mask):
    """Enumerate and classify every code whose matching pairs side 0 with
    ``first_partner``.  Returns the accumulator arrays described in the
    module docstring plus (number of collected hits, overflow flag)."""
    N = 2 * n
    K = (n + 2) * 2
    counts = np.zeros(K, np.int64)
    counts_rl = np.zeros(K, np.int64)
    counts_pc = np.zeros(K, np.int64)
    tau_hist = np.zeros(K * (n + 1), np.int64)
    flavors = np.zeros(K * 4, np.int64)
    dominant = np.zeros(K * 2, np.int64)
    viol = np.zeros(N_VIOLATIONS, np.int64)
    nhits = 0
    overflow = 0
    cap_hits = hits_match.shape[0]

    match = np.full(N, -1, np.int64)
    pidx = np.zeros(N, np.int64)
    lvl_a = np.zeros(n + 1, np.int64)
    lvl_b = np.zeros(n + 1, np.int64)

    nbr0 = np.zeros(N, np.int64)
    par0 = np.zeros(N, np.int64)
    nbr1 = np.zeros(N, np.int64)
    par1 = np.zeros(N, np.int64)
    vid = np.zeros(N, np.int64)
    spin = np.zeros(N, np.int64)
    slot_used = np.zeros(N, np.int64)
    rot_next = np.zeros(N, np.int64)
    rot_prev = np.zeros(N, np.int64)
    vstart = np.zeros(N, np.int64)
    deg = np.zeros(N, np.int64)
    cnt1 = np.zeros(N, np.int64)
    maj = np.zeros(N, np.int64)
    side = np.zeros(N, np.int64)
    ccw_next = np.zeros(N, np.int64)
    ufp = np.zeros(N, np.int64)
    ufr = np.zeros(N, np.int64)
    eu = np.zeros(n, np.int64)
    ev = np.zeros(n, np.int64)
    degw = np.zeros(N, np.int64)
    alive = np.zeros(n, np.int64)

    match[0] = first_partner
    match[first_partner] = 0
    pidx[0] = 0
    pidx[first_partner] = 0

    level = 1
    fresh = True
    while level >= 1:
        if level == n:
            # ----- complete matching: run every twist mask -----
            for mask in range(1 << n):
                # links between the two corner visits of each half-edge
                for i in range(N):
                    j = match[i]
                    b = (mask >> pidx[i]) & 1
                    ip1 = i + 1 if i + 1 < N else 0
                    jp1 = j + 1 if j + 1 < N else 0
                    if b == 0:
                        nbr0[i] = jp1
                        par0[i] = 0
                        nbr1[ip1] = j
                        par1[ip1] = 0
                    else:
                        nbr0[i] = j
                        par0[i] = 1
                        nbr1[ip1] = jp1
                        par1[ip1] = 1

                # vertices = corner cycles; spins by parity propagation
                for i in range(N):
                    vid[i] = -1
                nv = 0
                for c0 in range(N):
                    if vid[c0] != -1:
                        continue
                    vstart[nv] = c0
                    d = 0
                    c = c0
                    slot = 0
                    spin[c0] = 0
                    vid[c0] = nv
                    while True:
                        slot_used[c] = slot
                        if slot == 0:
                            nc = nbr0[c]
                            p = par0[c]
                        else:
                            nc = nbr1[c]
                            p = par1[c]
                        rot_next[c] = nc
                        rot_prev[nc] = c
                        arrived = (1 - slot) if p == 0 else slot
                        d += 1
                        if nc == c0:
                            if arrived != 1:
                                viol[V_CYCLE_CLOSE] += 1
                            if spin[c] ^ p != spin[c0]:
                                viol[V_SPIN_COLOR] += 1
                            break
                        vid[nc] = nv
                        spin[nc] = spin[c] ^ p
                        c = nc
                        slot = 1 - arrived
                    deg[nv] = d
                    nv += 1

                twice_h = 1 + n - nv

                # orientability: can vertex flips make every side crossing
                # side-preserving?
                for v in range(nv):
                    ufp[v] = v
                    ufr[v] = 0
                orientable = 1
                for i in range(N):
                    ip1 = i + 1 if i + 1 < N else 0
                    rel = spin[i] ^ spin[ip1]
                    rx, px = _uf_find(ufp, ufr, vid[i])
                    ry, py = _uf_find(ufp, ufr, vid[ip1])
                    if rx == ry:
                        if px ^ py != rel:
                            orientable = 0
                    else:
                        ufp[rx] = ry
                        ufr[rx] = px ^ py ^ rel

                root_leaf = 1 if deg[vid[0]] == 1 else 0
                precubic = root_leaf
                if precubic == 1:
                    for v in range(nv):
                        if deg[v] != 1 and deg[v] != 3:
                            precubic = 0
                            break

                cell = twice_h * 2 + orientable
                counts[cell] += 1
                if root_leaf == 1:
                    counts_rl[cell] += 1

                # dominance: prune leaves, then the scheme is cubic iff the
                # core is non-empty with maximum degree exactly 3
                for i in range(N):
                    if i < match[i]:
                        k = pidx[i]
                        ip1 = i + 1 if i + 1 < N else 0
                        eu[k] = vid[i]
                        ev[k] = vid[ip1]
                for v in range(nv):
                    degw[v] = deg[v]
                for k in range(n):
                    alive[k] = 1
                changed = True
                while changed:
                    changed = False
                    for k in range(n):
                        if alive[k] == 1 and (degw[eu[k]] == 1 or degw[ev[k]] == 1):
                            alive[k] = 0
                            degw[eu[k]] -= 1
                            degw[ev[k]] -= 1
                            changed = True
                maxdeg = 0
                core_any = 0
                for v in range(nv):
                    if degw[v] > 0:
                        core_any = 1
                        if degw[v] > maxdeg:
                            maxdeg = degw[v]
                is_dom = 1 if (core_any == 1 and maxdeg == 3) else 0
                dominant[cell * 2 + is_dom] += 1

                t_lr = 0
                t_rl = 0
                if precubic == 1:
                    counts_pc[cell] += 1
                    # canonical sides from per-vertex spin majorities
                    for v in range(nv):
                        cnt1[v] = 0
                    for c in range(N):
                        cnt1[vid[c]] += spin[c]
                    for v in range(nv):
                        maj[v] = 1 if 2 * cnt1[v] > deg[v] else 0
                        if 2 * cnt1[v] == deg[v]:
                            viol[V_RIGHT_MAJORITY] += 1
                    for c in range(N):
                        side[c] = 0 if spin[c] == maj[vid[c]] else 1

                    # twists and their directions; two-way edges are the
                    # opposite-direction gluings (bit 0)
                    for i in range(N):
                        j = match[i]
                        if i > j:
                            continue
                        ip1 = i + 1 if i + 1 < N else 0
                        jp1 = j + 1 if j + 1 < N else 0
                        t1 = side[i] ^ side[ip1]
                        t2 = side[j] ^ side[jp1]
                        if t1 != t2:
                            viol[V_TWIST_CROSSINGS] += 1
                        b = (mask >> pidx[i]) & 1
                        if b == 0:
                            if t1 == 1:
                                viol[V_TWOWAY_TWIST] += 1
                            if side[i] == 1 or side[ip1] == 1 or side[j] == 1 or side[jp1] == 1:
                                viol[V_TWOWAY_SIDE] += 1
                        if t1 == 1:
                            if side[i] == 0:
                                t_lr += 1
                            else:
                                t_rl += 1

                    # counterclockwise successor of each corner: the walk
                    # order is counterclockwise exactly when the vertex's
                    # majority class is the class of its start corner
                    for c in range(N):
                        if maj[vid[c]] == 0:
                            ccw_next[c] = rot_next[c]
                        else:
                            ccw_next[c] = rot_prev[c]

                    tau = 0
                    n3 = 0
                    for v in range(nv):
                        if deg[v] != 3:
                            continue
                        n3 += 1
                        ca = vstart[v]
                        cb = rot_next[ca]
                        cc = rot_next[cb]
                        c1 = ca
                        if cb < c1:
                            c1 = cb
                        if cc < c1:
                            c1 = cc
                        c2 = ccw_next[c1]
                        c3 = ccw_next[c2]
                        if c3 < c2:
                            tau += 1
                            if side[c1] == 1:
                                flavors[cell * 4 + 1] += 1
                            elif side[c2] == 1:
                                flavors[cell * 4 + 2] += 1
                            elif side[c3] == 1:
                                flavors[cell * 4 + 3] += 1
                            else:
                                flavors[cell * 4 + 0] += 1

                    if tau < 0 or tau > n3:
                        viol[V_TAU_RANGE] += 1
                    tau_hist[cell * (n + 1) + tau] += 1

                    dsc = 0
                    for c in range(N):
                        if ccw_next[c] <= c:
                            dsc += 1
                    if tau != twice_h + t_rl - t_lr:
                        viol[V_TRISECTION] += 1
                    if dsc != n + 1 + t_rl - t_lr:
                        viol[V_DESCENTS] += 1

                    # edge parity and non-root leaf count of precubic maps
                    n1 = 0
                    for v in range(nv):
                        if deg[v] == 1:
                            n1 += 1
                    if (twice_h % 2 == 0) != (n % 2 == 1):
                        viol[V_LEAF_COUNT] += 1
                    else:
                        m_size = (n - (1 if twice_h % 2 == 0 else 0)) // 2
                        expect = m_size + 1 - (3 * twice_h + (twice_h % 2)) // 2
                        if n1 - 1 != expect:
                            viol[V_LEAF_COUNT] += 1

                # ----- collection filter -----
                if collect == 1:
                    ok = 1
                    if f_precubic >= 0 and precubic != f_precubic:
                        ok = 0
                    if f_orient >= 0 and orientable != f_orient:
                        ok = 0
                    if f_rootleaf >= 0 and root_leaf != f_rootleaf:
                        ok = 0
                    if f_hmask != 0 and (f_hmask >> twice_h) & 1 == 0:
                        ok = 0
                    if ok == 1:
                        if nhits < cap_hits:
                            packed = np.uint64(0)
                            for s in range(N):
                                packed |= np.uint64(match[s]) << np.uint64(4 * s)
                            hits_match[nhits] = packed
                            hits_mask[nhits] = mask
                            nhits += 1
                        else:
                            overflow = 1
            # ----- end of mask loop -----
            level -= 1
            fresh = False
            continue

        if fresh:
            a = 0
            while match[a] != -1:
                a += 1
            lvl_a[level] = a
            lvl_b[level] = a
        else:
            a = lvl_a[level]
            b_old = lvl_b[level]
            match[a] = -1
            match[b_old] = -1
        b = lvl_b[level] + 1
        while b < N and match[b] != -1:
            b += 1
        if b >= N:
            level -= 1
            fresh = False
            continue
        match[a] = b
        match[b] = a
        lvl_b[level] = b
        pidx[a] = level
        pidx[b] = level
        level += 1
        fresh = True

    return (counts, counts_rl, counts_pc, tau_hist, flavors, dominant, viol,
            nhits, overflow)


def scan_branch(n, first_partner, collect=False, f_precubic=-1, f_orient=-1,
                f_hmask=0, f_rootleaf=-1, max_hits=1 << 20):
    """Python-friendly wrapper around :func:`_scan_branch`."""
    hits_match = np.zeros(max_hits if collect else 1, np.uint64)
    hits_mask = np.zeros(max_hits if collect else 1, np.int64)
    out = _scan_branch(n, first_partner, 1 if collect else 0, f_precubic,
                       f_orient, f_hmask, f_rootleaf, hits_match, hits_mask)
    (counts, counts_rl, counts_pc, tau_hist, flavors, dominant, viol,
     nhits, overflow) = out
    return {
        "counts": counts,
        "counts_rootleaf": counts_rl,
        "counts_precubic": counts_pc,
        "tau_hist": tau_hist,
        "flavors": flavors,
        "dominant": dominant,
        "violations": viol,
        "hits_match": hits_match[:nhits].copy(),
        "hits_mask": hits_mask[:nhits].copy(),
        "overflow": bool(overflow),
    }


def unpack_matching(packed: int, n: int) -> tuple[tuple[int, int], ...]:
    """Invert the 4-bit-per-side packing used for collected hits."""
    part = [(int(packed) >> (4 * s)) & 0xF for s in range(2 * n)]
    return tuple((i, part[i]) for i in range(2 * n) if i < part[i])
