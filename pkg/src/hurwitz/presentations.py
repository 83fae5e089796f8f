"""Stabilizer presentations of braid orbits and exact H1 of components.

A braid orbit yields a Schreier graph (vertices = orbit members, edges =
sigma_i), and the stabilizer of the basepoint is presented by the rewritten
braid relators on the non-tree Schreier generators.  Components of the space
being modeled are aspherical with these stabilizers as fundamental groups, so
H1 of a component is the abelianized stabilizer.

For large orbits the presentation is never materialized as words.  Instead the
abelianized relator rows (equivalently, the boundary of the 2-complex with the
BFS spanning tree collapsed) are built as numpy blocks, then crushed by a
zero-fill merge cascade: rows that shrink to a single surviving entry kill
their column, rows with two surviving entries identify their columns up to an
invertible ratio (a signed union-find), and both moves are repeated to a fixed
point.  Every pivot is recorded in an elimination trail, and the usually tiny
leftover core is eliminated exactly.  The trail makes cokernel coordinates of
arbitrary 1-chains computable afterwards, which is what the induced maps on
H1 consume.
"""

from __future__ import annotations

import heapq
import math
from array import array
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .action import HurwitzAction
from .errors import InfeasibleSizeError, InvalidInputError
from .linalg import AbelianGroup, SparseIntMatrix, cokernel

LETTER_CAP = 2_000_000
CORE_ENTRY_CAP = 5_000_000


@dataclass
class GroupPresentation:
    num_generators: int
    relators: list  # words: sequences of signed 1-based generator indices
    provenance: list = None  # per generator, e.g. (coset, braid generator)

    def __post_init__(self):
        for w in self.relators:
            for letter in w:
                if letter == 0 or abs(letter) > self.num_generators:
                    raise InvalidInputError("relator letter out of range")

    def total_letters(self):
        return sum(len(w) for w in self.relators)


def braid_relator_words(n):
    """Defining relators of the braid group on n strands."""
    out = []
    for i in range(1, n - 1):
        out.append((i, i + 1, i, -(i + 1), -i, -(i + 1)))
    for i in range(1, n):
        for j in range(i + 2, n):
            out.append((i, j, -i, -j))
    return out


def braid_presentation(n):
    return GroupPresentation(
        num_generators=max(n - 1, 0),
        relators=[list(w) for w in braid_relator_words(n)],
    )


# ---------------------------------------------------------------------------
# Schreier graph and the collapsed 2-complex


class SchreierComplex:
    """Schreier graph of a braid orbit, its BFS spanning tree, and the
    abelianized relator rows in edge coordinates with tree edges dropped.

    Edge (v, i) is the sigma_i-edge out of coset v; its id is (i-1)*V + v.
    The root is the lexicographically smallest orbit member, and the tree is
    grown breadth-first taking sigma_1, sigma_1^-1, sigma_2, ... in order, so
    everything downstream is deterministic.
    """

    def __init__(self, act: HurwitzAction, t, keep_blocks=True):
        t = tuple(t)
        self.act = act
        self.n = n = len(t)
        eng = act._engine(n) if n >= 1 else None
        if n == 0:
            raise InvalidInputError("weight-0 tuple has no braid action")
        res = eng.orbit(eng.rank(t), want_members=True, cap=act.state_cap)
        self.members = res.members  # sorted int64 ranks
        self.V = V = int(res.size)
        self.canonical = eng.unrank(int(self.members[0]))
        self.basepoint = t
        self.num_edges = (n - 1) * V
        if self.num_edges >= 2**31:
            raise InfeasibleSizeError("edge space exceeds 32-bit indexing")
        self.perm = [None]  # 1-indexed by generator
        self.perm_inv = [None]
        for i in range(1, n):
            img = eng.sigma_images(self.members, i)
            self.perm.append(np.searchsorted(self.members, img).astype(np.int32))
            inv = eng.sigma_images(self.members, i, inverse=True)
            self.perm_inv.append(np.searchsorted(self.members, inv).astype(np.int32))
        self._build_tree()
        self.blocks = self._build_rows() if keep_blocks and n >= 2 else []

    # -- spanning tree -------------------------------------------------------

    def _build_tree(self):
        V, n = self.V, self.n
        self.root = 0
        dist = np.full(V, -1, dtype=np.int32)
        parent = np.full(V, -1, dtype=np.int32)
        pvia = np.zeros(V, dtype=np.int8)  # signed generator taken from parent
        dist[self.root] = 0
        frontier = np.array([self.root], dtype=np.int32)
        level = 0
        tree_mask = np.zeros(self.num_edges, dtype=bool)
        while frontier.size:
            level += 1
            nxt = []
            for i in range(1, n):
                for sgn, perm in ((1, self.perm[i]), (-1, self.perm_inv[i])):
                    img = perm[frontier]
                    mask = dist[img] < 0
                    if not mask.any():
                        continue
                    tgt, first = np.unique(img[mask], return_index=True)
                    src = frontier[mask][first]
                    # a node may have been claimed earlier in this same level
                    fresh = dist[tgt] < 0
                    tgt, src = tgt[fresh], src[fresh]
                    dist[tgt] = level
                    parent[tgt] = src
                    pvia[tgt] = sgn * i
                    if sgn > 0:
                        tree_mask[(i - 1) * V + src] = True
                    else:
                        tree_mask[(i - 1) * V + tgt] = True
                    nxt.append(tgt)
            frontier = (
                np.sort(np.concatenate(nxt)) if nxt else np.empty(0, dtype=np.int32)
            )
        if (dist < 0).any():
            raise InvalidInputError("Schreier graph is disconnected")
        self.dist = dist
        self.parent = parent
        self.pvia = pvia
        self.tree_mask = tree_mask

    # -- relator rows --------------------------------------------------------

    def _build_rows(self):
        """Per braid relator, the abelianized rewritten rows for all cosets as
        an (edge, value) block pair of shape (word length, V); value 0 marks a
        dropped entry (tree edge or cancelled duplicate)."""
        V, n = self.V, self.n
        blocks = []
        for word in braid_relator_words(n):
            L = len(word)
            edges = np.empty((L, V), dtype=np.int32)
            vals = np.empty((L, V), dtype=np.int8)
            cur = np.arange(V, dtype=np.int32)
            for k, letter in enumerate(word):
                i = abs(letter)
                if letter > 0:
                    edges[k] = (i - 1) * V + cur
                    vals[k] = 1
                    cur = self.perm[i][cur]
                else:
                    cur = self.perm_inv[i][cur]
                    edges[k] = (i - 1) * V + cur
                    vals[k] = -1
            vals[self.tree_mask[edges]] = 0
            # cancel duplicate edges within each column
            for l in range(1, L):
                for k in range(l):
                    dup = (edges[k] == edges[l]) & (vals[l] != 0) & (vals[k] != 0)
                    if dup.any():
                        vals[k][dup] += vals[l][dup]
                        vals[l][dup] = 0
            blocks.append((edges, vals))
        return blocks

    # -- paths and cycles ----------------------------------------------------

    def path_chain(self, v):
        """The tree path root -> v as a signed edge chain."""
        chain = {}
        v = int(v)
        while v != self.root:
            via = int(self.pvia[v])
            i = abs(via)
            if via > 0:  # edge (parent, i) traversed forward
                eid = (i - 1) * self.V + int(self.parent[v])
                chain[eid] = chain.get(eid, 0) + 1
            else:  # edge (v, i) points v -> parent; traversed backwards
                eid = (i - 1) * self.V + v
                chain[eid] = chain.get(eid, 0) - 1
            v = int(self.parent[v])
        return chain

    def cycle_of_edge(self, eid):
        """The fundamental cycle of a non-tree edge: root->v, the edge, and
        back w->root."""
        eid = int(eid)
        i = eid // self.V + 1
        v = eid % self.V
        w = int(self.perm[i][v])
        chain = {eid: 1}
        for e, c in self.path_chain(v).items():
            chain[e] = chain.get(e, 0) + c
        for e, c in self.path_chain(w).items():
            chain[e] = chain.get(e, 0) - c
        return {e: c for e, c in chain.items() if c}

    def coset_of_tuple(self, t):
        eng = self.act._engine(self.n)
        r = eng.rank(t)
        i = int(np.searchsorted(self.members, r))
        if i >= self.V or self.members[i] != r:
            raise InvalidInputError("tuple not in this orbit")
        return i


# ---------------------------------------------------------------------------
# coreduction with an elimination trail


_VAL_LIMIT = 1 << 14


class TrailReducer:
    """Row-space reducer for the relator blocks of a SchreierComplex.

    The merge cascade runs in vectorized batches over the numpy blocks: a row
    with one surviving entry kills its column, a row with two identifies its
    columns up to an invertible ratio (signed union-find), and rewriting rows
    through the accumulated identifications exposes new short rows until
    nothing changes.  Every pivot (column, row) is recorded in elimination
    order; the leftover core is eliminated exactly.  Coefficients: GF(p) for
    prime p, rationals for p = 0 (merges whose ratio is not integral are
    deferred to the core, so the cascade itself stays in machine integers).

    ``reduce`` computes the canonical representative of a 1-chain modulo the
    row space; its support lies on the free columns, which form the H1 basis.

    ``consume=True`` lets the reducer rewrite the complex's blocks in place
    (they are dropped afterwards), halving peak memory on large orbits.
    """

    def __init__(
        self,
        cx: SchreierComplex,
        p=0,
        core_entry_cap=CORE_ENTRY_CAP,
        consume=False,
    ):
        self.p = p
        self.ncols = cx.num_edges
        self.tree_mask = cx.tree_mask
        vdtype = np.int16 if 0 < p < 256 else np.int32
        if consume:
            blocks = [(e, v.astype(vdtype)) for e, v in cx.blocks]
            cx.blocks = []
        else:
            blocks = [(e.copy(), v.astype(vdtype)) for e, v in cx.blocks]
        if p:
            for _, v in blocks:
                np.mod(v, p, out=v)
        self.step_of = np.full(self.ncols, -1, dtype=np.int64)
        self._trail_cols = array("q")  # flat appenders, frozen at the end
        self._trail_vals = array("q")
        self._trail_cnt = array("q")
        self._nsteps = 0
        self._merge_cascade(blocks)
        self._core_eliminate(blocks, core_entry_cap)
        self._finalize_trail()
        self.rank = self._nsteps
        free = (~self.tree_mask) & (self.step_of < 0)
        self.free_cols = np.flatnonzero(free)
        self.h1_dim = int(self.free_cols.size)
        self.free_index = {int(c): i for i, c in enumerate(self.free_cols)}

    # -- merge cascade -------------------------------------------------------

    def _record(self, pivot, row_items):
        for c, v in row_items:
            self._trail_cols.append(c)
            self._trail_vals.append(v)
        self._trail_cnt.append(len(row_items))
        self.step_of[pivot] = self._nsteps
        self._nsteps += 1

    def _merge_cascade(self, blocks):
        p = self.p
        E = self.ncols
        root = np.arange(E, dtype=np.int32)
        # var_c = (num[c] / den[c]) * var_root[c]; den stays 1 over GF(p)
        num = np.ones(E, dtype=np.int64)
        den = np.ones(E, dtype=np.int64)
        dead = np.zeros(E, dtype=bool)

        def compress():
            while True:
                r2 = root[root]
                mask = r2 != root
                if not mask.any():
                    break
                idx = np.flatnonzero(mask)
                nu = num[idx] * num[root[idx]]
                if p:
                    nu %= p
                else:
                    de = den[idx] * den[root[idx]]
                    g = np.gcd(nu, de)
                    g[g == 0] = 1
                    den[idx] = de // g
                    nu //= g
                num[idx] = nu
                root[idx] = r2[idx]
                if not p and abs(int(np.abs(num[idx]).max(initial=0))) >= _VAL_LIMIT:
                    raise InfeasibleSizeError("merge ratios overflow")

        def find(c):
            """Root of c and the weight as an integer pair (nu, de)."""
            if p:
                w = 1
                while root[c] != c:
                    w = w * int(num[c]) % p
                    c = int(root[c])
                return c, w, 1
            nu, de = 1, 1
            while root[c] != c:
                nu *= int(num[c])
                de *= int(den[c])
                c = int(root[c])
            g = math.gcd(nu, de)
            return c, nu // g, de // g

        def resolve(edges, vals):
            """Rewrite a block through the union-find; over the rationals each
            row is rescaled to clear denominators and divided by its gcd."""
            live = vals != 0
            e2 = np.where(live, root[edges], edges)
            nu = vals.astype(np.int64) * np.where(live, num[edges], 1)
            if p:
                nu %= p
            else:
                de = np.where(live, den[edges], 1)
                D = np.lcm.reduce(de, axis=0)
                nu *= D // de
                g = np.gcd.reduce(np.abs(nu), axis=0)
                g[g == 0] = 1
                nu //= g
                if int(np.abs(nu).max(initial=0)) >= 2**30:
                    raise InfeasibleSizeError("entry values overflow")
            nu[dead[e2] & live] = 0
            edges[...] = e2
            vals[...] = nu.astype(vals.dtype)

        while True:
            compress()
            pend = []
            for edges, vals in blocks:
                resolve(edges, vals)
                L = edges.shape[0]
                for l in range(1, L):
                    for k in range(l):
                        dup = (edges[k] == edges[l]) & (vals[l] != 0) & (vals[k] != 0)
                        if dup.any():
                            s = vals[k][dup].astype(np.int64) + vals[l][dup]
                            if p:
                                s %= p
                            vals[k][dup] = s.astype(vals.dtype)
                            vals[l][dup] = 0
                nz = vals != 0
                deg = nz.sum(axis=0)
                r1 = np.flatnonzero(deg == 1)
                if r1.size:
                    k = nz[:, r1].argmax(axis=0)
                    pend.append(
                        (
                            edges[k, r1].copy(),
                            vals[k, r1].copy(),
                            np.full(r1.size, -1, dtype=np.int32),
                            np.zeros(r1.size, dtype=np.int16),
                        )
                    )
                    vals[:, r1] = 0
                r2 = np.flatnonzero(deg == 2)
                if r2.size:
                    order = np.argsort(~nz[:, r2], axis=0, kind="stable")
                    k1, k2 = order[0], order[1]
                    pend.append(
                        (
                            edges[k1, r2].copy(),
                            vals[k1, r2].copy(),
                            edges[k2, r2].copy(),
                            vals[k2, r2].copy(),
                        )
                    )
                    vals[:, r2] = 0
            progress = 0
            if pend:
                A = np.concatenate([q[0] for q in pend]).tolist()
                VA = np.concatenate([q[1] for q in pend]).tolist()
                B = np.concatenate([q[2] for q in pend]).tolist()
                VB = np.concatenate([q[3] for q in pend]).tolist()
                for a, va, b, vb in zip(A, VA, B, VB):
                    # resolved entry of column a: (va*na/da) at root ra, as an
                    # integer pair (can, cad); over GF(p) denominators are 1
                    ra, na, da = find(a)
                    can = va * na % p if p else va * na
                    cad = da
                    if b < 0:
                        if dead[ra]:
                            continue
                        dead[ra] = True
                        self._record(ra, [(ra, can)])
                        progress += 1
                        continue
                    rb, nb, db = find(b)
                    cbn = vb * nb % p if p else vb * nb
                    cbd = db
                    if dead[ra] and dead[rb]:
                        continue
                    if dead[ra] or dead[rb]:
                        if dead[ra]:
                            ra, can = rb, cbn
                        dead[ra] = True
                        self._record(ra, [(ra, can)])
                        progress += 1
                        continue
                    if ra == rb:
                        s = (can + cbn) % p if p else can * cbd + cbn * cad
                        if s:
                            dead[ra] = True
                            self._record(ra, [(ra, s)])
                            progress += 1
                        continue
                    # clear denominators: row is {ra: can*cbd, rb: cbn*cad}
                    if not p:
                        can, cbn = can * cbd, cbn * cad
                        g = math.gcd(can, cbn)
                        if g > 1:
                            can //= g
                            cbn //= g
                    # identify the two columns, killing the larger as a pivot
                    rbig, cbg = (ra, can) if ra > rb else (rb, cbn)
                    rsml, csm = (rb, cbn) if ra > rb else (ra, can)
                    root[rbig] = rsml
                    if p:
                        num[rbig] = -csm * pow(cbg, p - 2, p) % p
                    else:
                        g = math.gcd(csm, cbg)
                        nu, de = -(csm // g), cbg // g
                        if de < 0:
                            nu, de = -nu, -de
                        num[rbig] = nu
                        den[rbig] = de
                    self._record(rbig, [(rbig, cbg), (rsml, csm)])
                    progress += 1
            if progress == 0:
                break

    def _core_eliminate(self, blocks, core_entry_cap):
        """Exact elimination of whatever the cascade left, with Markowitz-style
        pivoting: smallest column degree first, shortest row as pivot.  On
        these matrices this ordering shows essentially no fill-in."""
        p = self.p
        rows = []
        total = 0
        for edges, vals in blocks:
            nz = vals != 0
            live = np.flatnonzero(nz.any(axis=0))
            total += int(nz.sum())
            if total > core_entry_cap:
                raise InfeasibleSizeError(
                    f"cascade core exceeds {core_entry_cap} entries"
                )
            for c in live:
                sel = nz[:, c]
                rows.append(
                    dict(zip(edges[sel, c].tolist(), vals[sel, c].tolist()))
                )
        self._core_steps = []  # (col, row dict) appended after numpy trail
        colrows = {}
        for rid, row in enumerate(rows):
            for c in row:
                colrows.setdefault(c, set()).add(rid)
        heap = [(len(s), c) for c, s in colrows.items()]
        heapq.heapify(heap)
        while heap:
            d, c = heapq.heappop(heap)
            s = colrows.get(c)
            if not s:
                continue
            if len(s) != d:
                heapq.heappush(heap, (len(s), c))
                continue
            rid = min(s, key=lambda r: (len(rows[r]), r))
            prow = rows[rid]
            for cc in prow:
                colrows[cc].discard(rid)
            for r2 in sorted(s):
                old = rows[r2]
                new = _axpy(old, prow, c, p) if p else _int_axpy(old, prow, c)
                for cc in old:
                    if cc not in new:
                        colrows[cc].discard(r2)
                for cc in new:
                    if cc not in old:
                        colrows.setdefault(cc, set()).add(r2)
                rows[r2] = new
            rows[rid] = None
            for cc in prow:
                live = colrows.get(cc)
                if live and cc != c:
                    heapq.heappush(heap, (len(live), cc))
            self._core_steps.append((c, prow))
            self.step_of[c] = self._nsteps
            self._nsteps += 1

    def _finalize_trail(self):
        cols = np.frombuffer(self._trail_cols, dtype=np.int64).copy()
        vals = np.frombuffer(self._trail_vals, dtype=np.int64).copy()
        cnt = np.frombuffer(self._trail_cnt, dtype=np.int64)
        self._indptr = np.concatenate([[0], np.cumsum(cnt)]).astype(np.int64)
        self._cols = cols
        self._vals = vals
        self._ncore_base = self._indptr.size - 1  # steps before core steps
        del self._trail_cols, self._trail_vals, self._trail_cnt

    def _step_row(self, step):
        """The recorded pivot row of a step, as a python dict."""
        if step < self._ncore_base:
            lo, hi = self._indptr[step], self._indptr[step + 1]
            return dict(
                zip(self._cols[lo:hi].tolist(), self._vals[lo:hi].tolist())
            )
        c, row = self._core_steps[step - self._ncore_base]
        return row

    # -- queries -------------------------------------------------------------

    def reduce(self, chain):
        """Canonical representative of a 1-chain modulo the row space (tree
        edges are quotiented away first); supported on the free columns."""
        p = self.p
        if p:
            vec = {int(c): v % p for c, v in chain.items() if v % p}
        else:
            vec = {int(c): Fraction(v) for c, v in chain.items() if v}
        vec = {c: v for c, v in vec.items() if not self.tree_mask[c]}
        heap = []
        inheap = set()
        for c in vec:
            s = int(self.step_of[c])
            if s >= 0:
                heapq.heappush(heap, (s, c))
                inheap.add(c)
        while heap:
            s, c = heapq.heappop(heap)
            inheap.discard(c)
            if c not in vec or not vec[c]:
                vec.pop(c, None)
                continue
            prow = self._step_row(s)
            vec = _axpy(vec, prow, c, p)
            for c2 in vec:
                s2 = int(self.step_of[c2])
                if s2 > s and c2 not in inheap:
                    heapq.heappush(heap, (s2, c2))
                    inheap.add(c2)
        return {c: v for c, v in vec.items() if v}

    def coords(self, chain):
        red = self.reduce(chain)
        out = [0] * self.h1_dim
        for c, v in red.items():
            out[self.free_index[c]] = v
        return out


def _int_axpy(vec, prow, c):
    """Fraction-free row update over the integers: prow[c]*vec - vec[c]*prow,
    normalized by the gcd.  Equivalent to _axpy(..., p=0) up to row scaling."""
    a, b = prow[c], vec[c]
    out = {cc: vv * a for cc, vv in vec.items()}
    for cc, vv in prow.items():
        nv = out.get(cc, 0) - b * vv
        if nv:
            out[cc] = nv
        else:
            out.pop(cc, None)
    g = 0
    for vv in out.values():
        g = math.gcd(g, vv)
    if g > 1:
        out = {cc: vv // g for cc, vv in out.items()}
    return out


def _axpy(vec, prow, c, p):
    """vec -= (vec[c]/prow[c]) * prow, over GF(p) or the rationals."""
    if p:
        factor = (vec[c] * pow(prow[c] % p, p - 2, p)) % p
        out = dict(vec)
        for cc, vv in prow.items():
            nv = (out.get(cc, 0) - factor * vv) % p
            if nv:
                out[cc] = nv
            else:
                out.pop(cc, None)
    else:
        factor = Fraction(vec[c]) / prow[c]
        out = dict(vec)
        for cc, vv in prow.items():
            nv = out.get(cc, 0) - factor * vv
            if nv:
                out[cc] = nv
            else:
                out.pop(cc, None)
    return out


# ---------------------------------------------------------------------------
# presentations and H1


def stabilizer_presentation(act: HurwitzAction, t, letter_cap=LETTER_CAP):
    """Reidemeister-Schreier presentation of the stabilizer of ``t``, with
    Schreier generators = non-tree edges and rewritten braid relators."""
    t = tuple(t)
    n = len(t)
    if n <= 1:
        return GroupPresentation(0, [], provenance=[])
    cx = SchreierComplex(act, t, keep_blocks=False)
    V = cx.V
    nontree = np.flatnonzero(~cx.tree_mask)
    gen_of_edge = np.full(cx.num_edges, 0, dtype=np.int64)
    gen_of_edge[nontree] = np.arange(1, nontree.size + 1)
    provenance = [(int(e % V), int(e // V + 1)) for e in nontree]
    words = braid_relator_words(n)
    est = sum(len(w) for w in words) * V
    if est > letter_cap:
        raise InfeasibleSizeError(
            f"presentation would have ~{est} relator letters (cap {letter_cap})"
        )
    relators = []
    for word in words:
        for v in range(V):
            cur = v
            out = []
            for letter in word:
                i = abs(letter)
                if letter > 0:
                    g = int(gen_of_edge[(i - 1) * V + cur])
                    if g:
                        out.append(g)
                    cur = int(cx.perm[i][cur])
                else:
                    cur = int(cx.perm_inv[i][cur])
                    g = int(gen_of_edge[(i - 1) * V + cur])
                    if g:
                        out.append(-g)
            relators.append(out)
    return GroupPresentation(int(nontree.size), relators, provenance=provenance)


def abelianized_relator_matrix(pres: GroupPresentation):
    M = SparseIntMatrix(len(pres.relators), pres.num_generators)
    for r, word in enumerate(pres.relators):
        for letter in word:
            M.add(r, abs(letter) - 1, 1 if letter > 0 else -1)
    return M


def h1_of_component(act: HurwitzAction, t, letter_cap=LETTER_CAP):
    """Integral H1 of the component of ``t``: abelianization of the stabilizer
    presentation, as free rank plus invariant factors."""
    t = tuple(t)
    if len(t) <= 1:
        return AbelianGroup(0, ())
    pres = stabilizer_presentation(act, t, letter_cap=letter_cap)
    return cokernel(abelianized_relator_matrix(pres))


def write_h1_csv(path, act, rows):
    """CSV export of integral H1 per component: rows are
    (weight, orbit, AbelianGroup) triples."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["weight", "canonical", "orbit_size", "h1_rank", "torsion"])
        for weight, orb, ab in rows:
            w.writerow(
                [
                    weight,
                    act.labels_of(orb.canonical),
                    orb.size,
                    ab.rank,
                    ";".join(str(d) for d in ab.torsion),
                ]
            )


def component_homology(act: HurwitzAction, t, p=0):
    """(SchreierComplex, TrailReducer) for the component of ``t`` over GF(p)
    or the rationals; H1 dimension is ``reducer.h1_dim``."""
    cx = SchreierComplex(act, t)
    red = TrailReducer(cx, p=p, consume=True)
    return cx, red


# ---------------------------------------------------------------------------
# induced maps on H1


@dataclass
class H1Map:
    source_canonical: tuple
    target_canonical: tuple
    field: int  # 0 = rationals, else the prime
    matrix: list  # rows indexed by target basis, columns by source basis

    def compose(self, other):
        """self after other (matrix product)."""
        if other.target_canonical != self.source_canonical or other.field != self.field:
            raise InvalidInputError("maps not composable")
        A, B = self.matrix, other.matrix
        rows = len(A)
        inner = len(B)
        cols = len(B[0]) if inner else 0
        out = [[0] * cols for _ in range(rows)]
        for r in range(rows):
            for k in range(inner):
                a = A[r][k]
                if a:
                    Bk = B[k]
                    for c in range(cols):
                        out[r][c] += a * Bk[c]
        if self.field:
            out = [[v % self.field for v in row] for row in out]
        return H1Map(other.source_canonical, self.target_canonical, self.field, out)


def _mapped_chain(chain, edge_map):
    out = {}
    for e, c in chain.items():
        e2 = edge_map(e)
        out[e2] = out.get(e2, 0) + c
    return out


def _induced_h1(source, target, edge_map, field):
    """Matrix of a chain map on H1, given the per-edge map."""
    src_cx, src_red = source
    tgt_cx, tgt_red = target
    cols = []
    for f in src_red.free_cols:
        cycle = src_cx.cycle_of_edge(int(f))
        img = _mapped_chain(cycle, edge_map)
        cols.append(tgt_red.coords(img))
    matrix = [
        [cols[c][r] for c in range(len(cols))] for r in range(tgt_red.h1_dim)
    ]
    return H1Map(src_cx.canonical, tgt_cx.canonical, field, matrix)


def lst_induced_h1(act, a, source, target, power=1, field=0):
    """H1 map induced by prepending ``power`` copies of Q-member ``a``
    (strand inclusion on the right: sigma_i goes to sigma_{i+power})."""
    src_cx, _ = source
    tgt_cx, _ = target
    n, V = src_cx.n, src_cx.V
    m = act.m
    r_a = sum(a * m**k for k in range(power))
    shifted = r_a * m**n + src_cx.members
    v_new = np.searchsorted(tgt_cx.members, shifted).astype(np.int64)
    if (v_new >= tgt_cx.V).any() or (tgt_cx.members[v_new] != shifted).any():
        raise InvalidInputError("prepended members do not land in the target orbit")

    def edge_map(e):
        i = e // V + 1
        v = e % V
        return (i + power - 1) * tgt_cx.V + int(v_new[v])

    return _induced_h1(source, target, edge_map, field)


def rst_induced_h1(act, a, source, target, power=1, field=0):
    """H1 map induced by appending ``power`` copies of ``a`` (sigma_i fixed)."""
    src_cx, _ = source
    tgt_cx, _ = target
    n, V = src_cx.n, src_cx.V
    m = act.m
    r_a = sum(a * m**k for k in range(power))
    shifted = src_cx.members * m**power + r_a
    v_new = np.searchsorted(tgt_cx.members, shifted).astype(np.int64)
    if (v_new >= tgt_cx.V).any() or (tgt_cx.members[v_new] != shifted).any():
        raise InvalidInputError("appended members do not land in the target orbit")

    def edge_map(e):
        i = e // V + 1
        v = e % V
        return (i - 1) * tgt_cx.V + int(v_new[v])

    return _induced_h1(source, target, edge_map, field)
