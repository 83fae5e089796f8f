"""Exact integer and finite-field linear algebra.

Smith normal form over arbitrary-precision integers, field ranks (rationals or
a prime field), and a reducer that keeps its elimination trail so cokernel
coordinates of arbitrary vectors can be computed afterwards.

Large sparse matrices are first crushed by zero-fill "coreduction" passes
(pivots whose row or column is a singleton), which removes the bulk of
Schreier-complex style matrices before any dense work happens.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InfeasibleSizeError, InvalidInputError

DENSE_CAP = 4000  # max rows/cols for the dense fallbacks
SNF_CAP = 2_000_000_000


@dataclass
class SparseIntMatrix:
    """Triplet-form integer matrix; duplicate (row, col) pairs are summed."""

    rows: int
    cols: int
    entries: list = field(default_factory=list)  # (row, col, value)

    def add(self, r, c, v):
        if v:
            self.entries.append((r, c, v))

    def coalesced(self):
        acc = {}
        for r, c, v in self.entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise InvalidInputError("entry out of bounds")
            acc[(r, c)] = acc.get((r, c), 0) + v
        return {k: v for k, v in acc.items() if v}

    def to_dense(self):
        A = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.coalesced().items():
            A[r][c] = v
        return A

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (r, c), v in self.coalesced().items():
            rows[r][c] = v
        return rows

    def transpose(self):
        return SparseIntMatrix(
            self.cols, self.rows, [(c, r, v) for r, c, v in self.entries]
        )

    @classmethod
    def from_dense(cls, A):
        rows = len(A)
        cols = len(A[0]) if rows else 0
        M = cls(rows, cols)
        for r in range(rows):
            for c in range(cols):
                M.add(r, c, A[r][c])
        return M

    def write_triplets(self, path):
        with open(path, "w") as fh:
            fh.write(f"{self.rows} {self.cols}\n")
            for (r, c), v in sorted(self.coalesced().items()):
                fh.write(f"{r} {c} {v}\n")

    @classmethod
    def read_triplets(cls, path):
        with open(path) as fh:
            first = fh.readline().split()
            M = cls(int(first[0]), int(first[1]))
            for line in fh:
                r, c, v = line.split()
                M.add(int(r), int(c), int(v))
        return M


# ---------------------------------------------------------------------------
# Smith normal form


def _snf_dense(A, transforms):
    """Classical SNF by row/column reduction, smallest-magnitude pivot."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = [[int(i == j) for j in range(rows)] for i in range(rows)] if transforms else None
    V = [[int(i == j) for j in range(cols)] for i in range(cols)] if transforms else None

    def row_op(i, j, q):  # row_i -= q * row_j
        Ai, Aj = A[i], A[j]
        for c in range(cols):
            Ai[c] -= q * Aj[c]
        if U:
            Ui, Uj = U[i], U[j]
            for c in range(rows):
                Ui[c] -= q * Uj[c]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(rows):
            A[r][i] -= q * A[r][j]
        if V:
            for r in range(cols):
                V[r][i] -= q * V[r][j]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in range(rows):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        if V:
            for r in range(cols):
                V[r][i], V[r][j] = V[r][j], V[r][i]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if U:
            U[i] = [-x for x in U[i]]

    t = 0
    while True:
        # pick smallest-magnitude nonzero pivot in the trailing block
        pivot = None
        for r in range(t, rows):
            for c in range(t, cols):
                v = A[r][c]
                if v and (pivot is None or abs(v) < abs(A[pivot[0]][pivot[1]])):
                    pivot = (r, c)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            changed = False
            for r in range(t + 1, rows):
                if A[r][t]:
                    q = A[r][t] // A[t][t]
                    row_op(r, t, q)
                    if A[r][t]:  # remainder became the smaller pivot
                        swap_rows(t, r)
                    changed = True
            for c in range(t + 1, cols):
                if A[t][c]:
                    q = A[t][c] // A[t][t]
                    col_op(c, t, q)
                    if A[t][c]:
                        swap_cols(t, c)
                    changed = True
            if not changed:
                break
        # enforce divisibility of the trailing block by the pivot
        d = A[t][t]
        offender = None
        for r in range(t + 1, rows):
            for c in range(t + 1, cols):
                if A[r][c] % d:
                    offender = r
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(t, offender, -1)  # fold the offending row into the pivot row
            continue
        if A[t][t] < 0:
            negate_row(t)
        t += 1
    factors = [A[i][i] for i in range(min(rows, cols))]
    if transforms:
        return factors, U, V
    return factors


def _unit_coreduce_int(rowmaps, colmap):
    """Zero-fill elimination of +-1 pivots whose row or column is a singleton.

    rowmaps: list of {col: value}; colmap: {col: set(row ids)}.
    Returns the number of unit pivots removed.
    """
    from collections import deque

    live_rows = {i for i, r in enumerate(rowmaps) if r}
    queue = deque()
    for c, rs in colmap.items():
        if len(rs) == 1:
            queue.append(("c", c))
    for i in live_rows:
        if len(rowmaps[i]) == 1:
            queue.append(("r", i))
    pivots = 0
    while queue:
        kind, idx = queue.popleft()
        if kind == "c":
            rs = colmap.get(idx)
            if not rs or len(rs) != 1:
                continue
            (r,) = rs
            if r not in live_rows or abs(rowmaps[r].get(idx, 0)) != 1:
                continue
            # column idx is a singleton: delete row r and column idx
            pivots += 1
            live_rows.discard(r)
            for c2 in rowmaps[r]:
                s = colmap.get(c2)
                if s is not None:
                    s.discard(r)
                    if len(s) == 1:
                        queue.append(("c", c2))
            for c2 in rowmaps[r]:
                s = colmap.get(c2)
                if s is not None and not s:
                    del colmap[c2]
            del colmap[idx]
            rowmaps[r] = {}
        else:
            r = idx
            if r not in live_rows or len(rowmaps[r]) != 1:
                continue
            ((c, v),) = rowmaps[r].items()
            if abs(v) != 1:
                continue
            # row r is a singleton with unit entry: column c dies everywhere
            pivots += 1
            live_rows.discard(r)
            rowmaps[r] = {}
            for r2 in list(colmap.get(c, ())):
                if r2 == r or r2 not in live_rows:
                    continue
                del rowmaps[r2][c]
                if len(rowmaps[r2]) == 1:
                    queue.append(("r", r2))
                elif not rowmaps[r2]:
                    live_rows.discard(r2)
            colmap.pop(c, None)
    return pivots


def smith_normal_form(M, transforms=False):
    """Invariant factors d_1 | d_2 | ... (length min(rows, cols), zeros padded).

    With ``transforms=True`` also returns unimodular U, V with U A V = diag(d);
    only available on the dense path.
    """
    if isinstance(M, SparseIntMatrix):
        rows, cols = M.rows, M.cols
        if rows * cols > SNF_CAP:
            raise InfeasibleSizeError("matrix exceeds SNF cap")
        if transforms or max(rows, cols) <= DENSE_CAP:
            result = _snf_dense(M.to_dense(), transforms)
            if transforms:
                factors, U, V = result
                _check_unimodular(U)
                _check_unimodular(V)
                return factors, U, V
            return result
        # sparse path: unit coreduction, then dense SNF of the core
        rowmaps = M.row_dicts()
        colmap = {}
        for i, r in enumerate(rowmaps):
            for c in r:
                colmap.setdefault(c, set()).add(i)
        unit_pivots = _unit_coreduce_int(rowmaps, colmap)
        live = [r for r in rowmaps if r]
        colids = sorted({c for r in live for c in r})
        cindex = {c: i for i, c in enumerate(colids)}
        if len(live) > DENSE_CAP or len(colids) > DENSE_CAP:
            raise InfeasibleSizeError(
                f"SNF core still {len(live)}x{len(colids)} after coreduction"
            )
        core = [[0] * len(colids) for _ in live]
        for i, r in enumerate(live):
            for c, v in r.items():
                core[i][cindex[c]] = v
        core_factors = [d for d in _snf_dense(core, False) if d != 0]
        factors = [1] * unit_pivots + core_factors
        factors += [0] * (min(rows, cols) - len(factors))
        return factors
    return smith_normal_form(SparseIntMatrix.from_dense(M), transforms)


def _check_unimodular(T):
    n = len(T)
    det = _det_int([row[:] for row in T])
    if det not in (1, -1):
        raise InvalidInputError(f"transform not unimodular (det {det})")


def _det_int(A):
    """Fraction-free Bareiss determinant."""
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


# ---------------------------------------------------------------------------
# field linear algebra


def _inv_mod(a, p):
    return pow(a % p, p - 2, p)


class FieldReducer:
    """Row-space reducer over Q (p=0) or GF(p), built from sparse rows.

    Stores the elimination trail so arbitrary vectors can later be reduced
    modulo the row space; cokernel coordinates live on ``free_cols``.
    Elimination is deterministic: coreduction passes in index order, then
    dense-style elimination of the core with lexicographic pivot choice.
    """

    def __init__(self, rows, ncols, p=0):
        self.ncols = ncols
        self.p = p
        self.steps = []  # (pivot_col, {col: value}) in elimination order
        self._pivot_cols = set()
        rowmaps = []
        for row in rows:
            if p:
                rr = {c: v % p for c, v in row.items() if v % p}
            else:
                rr = {c: Fraction(v) for c, v in row.items() if v}
            if rr:
                rowmaps.append(rr)
        self._eliminate(rowmaps)
        self.rank = len(self.steps)
        self.free_cols = [c for c in range(ncols) if c not in self._pivot_cols]
        self.free_index = {c: i for i, c in enumerate(self.free_cols)}

    # -- construction -------------------------------------------------------

    def _eliminate(self, rowmaps):
        from collections import deque

        colmap = {}
        for i, r in enumerate(rowmaps):
            for c in r:
                colmap.setdefault(c, set()).add(i)
        live = {i for i, r in enumerate(rowmaps) if r}
        queue = deque()
        for c in sorted(colmap):
            if len(colmap[c]) == 1:
                queue.append(("c", c))
        for i in sorted(live):
            if len(rowmaps[i]) == 1:
                queue.append(("r", i))
        pending = []  # deferred pivot records in elimination order
        while queue:
            kind, idx = queue.popleft()
            if kind == "c":
                rs = colmap.get(idx)
                if not rs or len(rs) != 1:
                    continue
                (r,) = rs
                if r not in live or idx not in rowmaps[r]:
                    continue
                pending.append((idx, rowmaps[r]))
                self._pivot_cols.add(idx)
                live.discard(r)
                for c2 in rowmaps[r]:
                    s = colmap.get(c2)
                    if s is not None:
                        s.discard(r)
                        if len(s) == 1:
                            queue.append(("c", c2))
                colmap.pop(idx, None)
                rowmaps[r] = None
            else:
                r = idx
                if r not in live or rowmaps[r] is None or len(rowmaps[r]) != 1:
                    continue
                ((c, v),) = rowmaps[r].items()
                if c in self._pivot_cols:
                    continue
                pending.append((c, {c: v}))
                self._pivot_cols.add(c)
                live.discard(r)
                rowmaps[r] = None
                for r2 in list(colmap.get(c, ())):
                    if r2 not in live:
                        continue
                    rowmaps[r2].pop(c, None)
                    if len(rowmaps[r2]) == 1:
                        queue.append(("r", r2))
                    elif not rowmaps[r2]:
                        live.discard(r2)
                colmap.pop(c, None)
        # dense-style elimination of the remaining core
        core = [rowmaps[i] for i in sorted(live) if rowmaps[i]]
        for row in core:
            row = self._reduce_core(row, pending)
            if not row:
                continue
            c = min(row)
            pending.append((c, row))
            self._pivot_cols.add(c)
        self.steps = pending

    def _reduce_core(self, row, pending):
        # reduce only against core pivots added after coreduction; coreduction
        # pivot columns cannot occur in core rows by construction, except for
        # row-singleton pivots whose columns were already deleted
        row = dict(row)
        for c, prow in pending:
            if c in row and len(prow) >= 1:
                row = self._axpy(row, prow, c)
        return row

    def _axpy(self, row, prow, c):
        if self.p:
            factor = (row[c] * _inv_mod(prow[c], self.p)) % self.p
            out = dict(row)
            for cc, vv in prow.items():
                nv = (out.get(cc, 0) - factor * vv) % self.p
                if nv:
                    out[cc] = nv
                else:
                    out.pop(cc, None)
        else:
            factor = row[c] / prow[c]
            out = dict(row)
            for cc, vv in prow.items():
                nv = out.get(cc, 0) - factor * vv
                if nv:
                    out[cc] = nv
                else:
                    out.pop(cc, None)
        return out

    # -- queries ------------------------------------------------------------

    def reduce(self, vec):
        """Reduce a sparse vector modulo the row space; result is supported on
        the free columns (= cokernel coordinates)."""
        if self.p:
            row = {c: v % self.p for c, v in vec.items() if v % self.p}
        else:
            row = {c: Fraction(v) for c, v in vec.items() if v}
        for c, prow in self.steps:
            if c in row:
                row = self._axpy(row, prow, c)
        return row

    def coker_coords(self, vec):
        red = self.reduce(vec)
        out = [0] * len(self.free_cols)
        for c, v in red.items():
            out[self.free_index[c]] = v
        return out

    def in_image(self, vec):
        return not self.reduce(vec)

    @property
    def coker_dim(self):
        return len(self.free_cols)


def rank_over_field(M, p=0):
    """Rank of an integer matrix over Q (p=0) or GF(p)."""
    if isinstance(M, SparseIntMatrix):
        rows = M.row_dicts()
        ncols = M.cols
    else:
        rows = [
            {c: v for c, v in enumerate(row) if v} for row in M
        ]
        ncols = len(M[0]) if M else 0
    return FieldReducer(rows, ncols, p).rank


def kernel_basis(M, p=0):
    """Basis of the right kernel over the chosen field (dense; small matrices)."""
    if isinstance(M, SparseIntMatrix):
        A = M.to_dense()
        rows, cols = M.rows, M.cols
    else:
        A = [list(r) for r in M]
        rows = len(A)
        cols = len(A[0]) if rows else 0
    if max(rows, cols, 1) > DENSE_CAP:
        raise InfeasibleSizeError("kernel basis limited to the dense cap")
    if p:
        A = [[v % p for v in row] for row in A]
    else:
        A = [[Fraction(v) for v in row] for row in A]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if A[i][c]), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = _inv_mod(A[r][c], p) if p else 1 / A[r][c]
        A[r] = [(v * inv) % p if p else v * inv for v in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [
                    (A[i][j] - f * A[r][j]) % p if p else A[i][j] - f * A[r][j]
                    for j in range(cols)
                ]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * cols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            v = -A[i][fc]
            vec[pc] = v % p if p else v
        basis.append(vec)
    return basis


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group as free rank plus invariant factors."""

    rank: int
    torsion: tuple  # invariant factors > 1, each dividing the next

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise InvalidInputError("torsion factors must divide successively")

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def is_trivial(self):
        return self.rank == 0 and not self.torsion


def cokernel(M):
    """Cokernel of an integer matrix (columns = target coordinates is *not*
    assumed: this is coker of the linear map represented by M acting on column
    vectors, i.e. Z^cols -> Z^rows would be M^T; callers pass the matrix whose
    ROWS are the relations on ``cols`` generators)."""
    if not isinstance(M, SparseIntMatrix):
        M = SparseIntMatrix.from_dense(M)
    factors = smith_normal_form(M)
    nonzero = [d for d in factors if d != 0]
    rank = M.cols - len(nonzero)
    torsion = tuple(d for d in nonzero if d > 1)
    return AbelianGroup(rank=rank, torsion=torsion)
