"""Stabilization and generation-degree reports for H0 and H1 of components.

``stability_report`` checks, over a weight window and several fields, that the
map induced by prepending ell copies of a member a of Q on the homology of the
fixed-total-monodromy slice becomes independent of a and an isomorphism, and
that Betti numbers become constant per residue class mod ell.

``generation_degree`` checks surjectivity of the assembled one-step maps
(+) over a in Q of H_i(weight n) -> H_i(weight n+1), reporting the minimal
weight from which surjectivity holds through the window.
"""

from __future__ import annotations

from .action import HurwitzAction
from .errors import InvalidInputError
from .linalg import FieldReducer
from .presentations import component_homology, lst_induced_h1

FIELD_LABELS = {0: "Q", 2: "F2", 3: "F3"}


def field_label(p):
    return FIELD_LABELS.get(p, f"F{p}")


class HomologyCache:
    """Per-(component, field) Schreier complexes and trail reducers, with
    explicit eviction so sliding-window sweeps stay within memory."""

    def __init__(self, act: HurwitzAction):
        self.act = act
        self._tables = {}
        self._hom = {}
        self._img = {}

    def table(self, n, omega=None):
        key = (n, omega)
        if key not in self._tables:
            self._tables[key] = self.act.enumerate_components(n, omega=omega)
        return self._tables[key]

    def homology(self, canonical, p):
        key = (canonical, p)
        if key not in self._hom:
            self._hom[key] = component_homology(self.act, canonical, p=p)
        return self._hom[key]

    def image_canonical(self, a, canonical, power, tgt_table):
        """Canonical of the component of a^power prepended to ``canonical``;
        cached, and trivial when the target slice has a single component."""
        if len(tgt_table.orbits) == 1:
            return tgt_table.orbits[0].canonical
        key = (a, canonical, power)
        if key not in self._img:
            self._img[key] = self.act.orbit_of(
                (a,) * power + canonical
            ).canonical
        return self._img[key]

    def evict_weight(self, n, p=None):
        for key in [
            k for k in self._hom if len(k[0]) == n and (p is None or k[1] == p)
        ]:
            del self._hom[key]


def _matrix_rank(matrix, p):
    rows = [
        {c: v for c, v in enumerate(row) if v} for row in matrix
    ]
    ncols = len(matrix[0]) if matrix else 0
    return FieldReducer(rows, ncols, p).rank


def _h0_matrix(act, a, src_table, tgt_table, power, cache):
    """Component-level matrix of prepending a^power (a 0/1 matrix)."""
    matrix = [[0] * len(src_table.orbits) for _ in tgt_table.orbits]
    for c, orb in enumerate(src_table.orbits):
        img = cache.image_canonical(a, orb.canonical, power, tgt_table)
        r = tgt_table.index.get(img)
        if r is None:
            raise InvalidInputError("image component missing from target table")
        matrix[r][c] = 1
    return matrix


def _h1_stacked_matrix(act, a, src_table, tgt_table, power, p, cache):
    """Global matrix of the induced H1 map, blockwise over components."""
    src_hom = [cache.homology(o.canonical, p) for o in src_table.orbits]
    tgt_hom = [cache.homology(o.canonical, p) for o in tgt_table.orbits]
    col_off, total_cols = [], 0
    for _, red in src_hom:
        col_off.append(total_cols)
        total_cols += red.h1_dim
    row_off, total_rows = [], 0
    for _, red in tgt_hom:
        row_off.append(total_rows)
        total_rows += red.h1_dim
    matrix = [[0] * total_cols for _ in range(total_rows)]
    for c_idx, orb in enumerate(src_table.orbits):
        img = cache.image_canonical(a, orb.canonical, power, tgt_table)
        r_idx = tgt_table.index[img]
        block = lst_induced_h1(
            act, a, src_hom[c_idx], tgt_hom[r_idx], power=power, field=p
        )
        for r, row in enumerate(block.matrix):
            for c, v in enumerate(row):
                matrix[row_off[r_idx] + r][col_off[c_idx] + c] = v
    return matrix


def _threshold(flags_by_weight, weights):
    """Minimal weight from which all flags are True through the window."""
    thr = None
    for n in reversed(weights):
        if flags_by_weight[n]:
            thr = n
        else:
            break
    return thr


def stability_report(act: HurwitzAction, omega, fields=(0, 2, 3), window=(2, 9)):
    """Theorems-of-stabilization shadow: for i in {0,1}, each field, each
    weight n in the window and each a in Q, the matrix of prepending a^ell on
    H_i of the omega-monodromy slice; reports per-weight agreement and
    isomorphism flags, their thresholds, and Betti constancy mod ell."""
    from .groups import is_large

    if not is_large(act.G, act.Q, omega):
        raise InvalidInputError("omega is not a large element for (G, Q)")
    ell = act.Q.ell
    lo, hi = window
    weights = list(range(lo, hi + 1))
    report = {
        "omega": act.G.label(omega),
        "ell": ell,
        "window": list(window),
        "fields": [field_label(p) for p in fields],
        "results": {},
        "betti": {},
    }
    cache = HomologyCache(act)
    ok = True
    for p in fields:
        for i in (0, 1):
            agree = {}
            iso = {}
            betti = {}
            detail = {}
            for n in weights:
                src = cache.table(n, omega=omega)
                tgt = cache.table(n + ell, omega=omega)
                mats = []
                for a in range(act.m):
                    if i == 0:
                        mats.append(_h0_matrix(act, a, src, tgt, ell, cache))
                    else:
                        mats.append(
                            _h1_stacked_matrix(act, a, src, tgt, ell, p, cache)
                        )
                rows = len(mats[0])
                cols = len(mats[0][0]) if rows else 0
                if i == 1:
                    betti[n] = cols
                agree[n] = all(m == mats[0] for m in mats[1:])
                iso[n] = rows == cols and (
                    rows == 0 or _matrix_rank(mats[0], p) == rows
                ) and all(
                    len(m) == 0 or _matrix_rank(m, p) == rows for m in mats[1:]
                )
                detail[n] = {
                    "dims": [cols, rows],
                    "agree": agree[n],
                    "iso": iso[n],
                    "per_a": [
                        {"a": act.G.label(act.Q.members[a]), "equal_to_first": mats[a] == mats[0]}
                        for a in range(act.m)
                    ],
                }
                if i == 1:
                    # weight n was target for n - ell and source for n; later
                    # weights never look back at it, so free its reducers
                    cache.evict_weight(n, p)
            agree_thr = _threshold(agree, weights)
            iso_thr = _threshold(iso, weights)
            entry = {
                "per_weight": detail,
                "agreement_threshold": agree_thr,
                "isomorphism_threshold": iso_thr,
            }
            if i == 1:
                entry["betti"] = betti
                const = None
                if iso_thr is not None:
                    const = True
                    for r in range(ell):
                        vals = [betti[n] for n in weights if n >= iso_thr and n % ell == r]
                        if len(set(vals)) > 1:
                            const = False
                entry["betti_constant_per_residue"] = const
                if const is False:
                    ok = False
            if agree_thr is None or iso_thr is None:
                ok = False
            report["results"][f"i{i}_{field_label(p)}"] = entry
    report["ok"] = ok
    return report


def generation_degree(
    act: HurwitzAction, i, field, window=(0, 9), omega=None, cache=None
):
    """Minimal weight nbar such that (+)_a H_i(n) -> H_i(n+1) is surjective
    for every n >= nbar through the window."""
    if cache is None:
        cache = HomologyCache(act)
    lo, hi = window
    weights = list(range(lo, hi + 1))
    surj = {}
    for n in weights:
        src = cache.table(n, omega=omega)
        tgt = cache.table(n + 1, omega=omega)
        if i == 0:
            hit = set()
            for orb in src.orbits:
                for a in range(act.m):
                    hit.add(cache.image_canonical(a, orb.canonical, 1, tgt))
            surj[n] = all(o.canonical in hit for o in tgt.orbits)
            continue
        tgt_hom = [cache.homology(o.canonical, field) for o in tgt.orbits]
        row_off, total_rows = [], 0
        for _, red in tgt_hom:
            row_off.append(total_rows)
            total_rows += red.h1_dim
        if total_rows == 0:
            surj[n] = True
            continue
        # rank of the stacked matrix, accumulated column-block by column-block
        columns = []
        for a in range(act.m):
            for orb in src.orbits:
                shom = cache.homology(orb.canonical, field)
                img = cache.image_canonical(a, orb.canonical, 1, tgt)
                r_idx = tgt.index[img]
                block = lst_induced_h1(
                    act, a, shom, tgt_hom[r_idx], power=1, field=field
                )
                for c in range(len(block.matrix[0]) if block.matrix else 0):
                    col = {}
                    for r, row in enumerate(block.matrix):
                        if row[c]:
                            col[row_off[r_idx] + r] = row[c]
                    columns.append(col)
        rank = FieldReducer(columns, total_rows, field).rank
        surj[n] = rank == total_rows
    nbar = _threshold(surj, weights)
    return {
        "i": i,
        "field": field_label(field),
        "omega": None if omega is None else act.G.label(omega),
        "window": list(window),
        "surjective_per_weight": surj,
        "nbar": nbar,
    }
