"""A Koszul-style chain complex on the orbit basis of the component ring.

At weight w the complex has terms K_p for p = -1 .. w-1:

* K_p (p >= 0): basis = (p+1)-tuples over Q paired with weight-(w-p-1) orbits;
* K_{-1}: the weight-w orbit basis itself.

The differential is d_p = sum_{j=0}^{p} (-1)^j d_{p,j} with

    d_{p,j}: (a_0,...,a_p) (x) x  |->  (a_0,...,^a_j,...,a_p) (x) [c]*x,

where c = a_j conjugated by the product a_{j+1}...a_p, and d_0 is the
augmentation (a_0) (x) x |-> [a_0]*x.  (The two summation indices in the
source formula disagree as printed; both are read as j, the unique choice
compatible with the face maps of the underlying semi-simplicial object.)

Right multiplication by a class [a] raises weight by one and is chain-null-
homotopic via H_a: (a_0,...,a_p) (x) x |-> (-1)^(p+1) (a_0,...,a_p,a) (x) x^a;
``homotopy_check`` verifies this identity exactly on every basis element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .action import HurwitzAction, Orbit
from .errors import InvalidInputError
from .linalg import (
    AbelianGroup,
    FieldReducer,
    SparseIntMatrix,
    kernel_basis,
    rank_over_field,
    smith_normal_form,
)


class TwistedBimoduleA:
    """The component ring with its left/right Q-multiplications and G-twist,
    realized as maps on the per-weight orbit bases."""

    def __init__(self, act: HurwitzAction, max_weight):
        self.act = act
        self.max_weight = max_weight
        self.tables = {w: act.enumerate_components(w) for w in range(max_weight + 1)}

    def orbits(self, w):
        return self.tables[w].orbits

    def orbit_index(self, orbit: Orbit):
        return self.tables[orbit.weight].index[orbit.canonical]

    def left_mult(self, a, orbit: Orbit):
        return self.act.orbit_of((a,) + orbit.canonical)

    def right_mult(self, a, orbit: Orbit):
        return self.act.orbit_of(orbit.canonical + (a,))

    def twist(self, g, orbit: Orbit):
        return self.act.orbit_of(self.act.conjugate_tuple(g, orbit.canonical))

    def verify_axioms(self):
        """Exhaustively check the twist-compatibility axioms on all bases:
        ([a]x)^b = [a^b] x^b,  (x[a])^b = x^b [a^b],  x[a] = [a] x^a.
        Returns the list of violations (empty when all hold)."""
        act = self.act
        members = act.Q.members
        bad = []
        for w in range(self.max_weight):  # products land in weight w+1
            for x in self.orbits(w):
                xa = {a: self.left_mult(a, x) for a in range(act.m)}
                ax = {a: self.right_mult(a, x) for a in range(act.m)}
                for a in range(act.m):
                    # axiom: x[a] = [a] x^a
                    twist_xa = self.twist(members[a], x)
                    if ax[a].canonical != self.left_mult(a, twist_xa).canonical:
                        bad.append(("right_vs_left_twist", w, x.canonical, a))
                for g in range(act.G.order):
                    xg = self.twist(g, x)
                    for a in range(act.m):
                        ag = members.index(act.G.conj(members[a], g))
                        if self.twist(g, xa[a]).canonical != self.left_mult(ag, xg).canonical:
                            bad.append(("left_equivariance", w, x.canonical, a, g))
                        if self.twist(g, ax[a]).canonical != self.right_mult(ag, xg).canonical:
                            bad.append(("right_equivariance", w, x.canonical, a, g))
        return bad


@dataclass
class WeightedChainComplex:
    weight: int
    terms: dict  # p -> basis list; p = -1 holds Orbit objects, p >= 0 (tuple, Orbit)
    boundaries: dict = field(default_factory=dict)  # p -> SparseIntMatrix K_p -> K_{p-1}

    def dim(self, p):
        basis = self.terms.get(p)
        return len(basis) if basis is not None else 0

    def boundary(self, p):
        """Matrix of d_p (columns = K_p basis), zero-shaped if out of range."""
        M = self.boundaries.get(p)
        if M is None:
            return SparseIntMatrix(self.dim(p - 1), self.dim(p))
        return M

    def verify_d2(self):
        for p in sorted(self.boundaries):
            if p - 1 not in self.boundaries:
                continue
            inner = self.boundaries[p].row_dicts()  # rows of d_p
            # compose: d_{p-1} d_p columns
            cols = {}
            for (r, c), v in self.boundaries[p].coalesced().items():
                cols.setdefault(c, {})[r] = v
            outer = {}
            for (r, c), v in self.boundaries[p - 1].coalesced().items():
                outer.setdefault(c, {})[r] = v
            for c, col in cols.items():
                acc = {}
                for mid, v in col.items():
                    for r2, v2 in outer.get(mid, {}).items():
                        acc[r2] = acc.get(r2, 0) + v * v2
                if any(acc.values()):
                    raise InvalidInputError(
                        f"d^2 != 0 at weight {self.weight}, degree {p}, column {c}"
                    )
        return True


def _tuple_basis(m, p, orbits):
    """Basis of K_p: all (p+1)-tuples over Q in lex order, times the orbit
    basis in table order."""
    return [
        (t, x) for t in itertools.product(range(m), repeat=p + 1) for x in orbits
    ]


def build_K(bimod: TwistedBimoduleA, weight, pmax=None):
    """The weight-``weight`` complex with terms K_{-1} .. K_{min(pmax, w-1)}."""
    act = bimod.act
    m = act.m
    w = weight
    top = w - 1 if pmax is None else min(pmax, w - 1)
    terms = {-1: list(bimod.orbits(w))}
    for p in range(0, top + 1):
        terms[p] = _tuple_basis(m, p, bimod.orbits(w - p - 1))
    cx = WeightedChainComplex(weight=w, terms=terms)
    index_m1 = {x.canonical: i for i, x in enumerate(terms[-1])}
    for p in range(0, top + 1):
        basis = terms[p]
        if p == 0:
            M = SparseIntMatrix(len(terms[-1]), len(basis))
            for col, (t, x) in enumerate(basis):
                y = bimod.left_mult(t[0], x)
                M.add(index_m1[y.canonical], col, 1)
        else:
            prev = terms[p - 1]
            pidx = {
                (t, x.canonical): i for i, (t, x) in enumerate(prev)
            }
            M = SparseIntMatrix(len(prev), len(basis))
            members = act.Q.members
            G = act.G
            for col, (t, x) in enumerate(basis):
                for j in range(p + 1):
                    # conjugate a_j by the product of the later entries
                    prod = G.identity
                    for k in range(j + 1, p + 1):
                        prod = G.mult[prod][members[t[k]]]
                    c = members.index(G.conj(members[t[j]], prod))
                    y = bimod.left_mult(c, x)
                    face = t[:j] + t[j + 1 :]
                    M.add(pidx[(face, y.canonical)], col, (-1) ** j)
        cx.boundaries[p] = M
    return cx


def build_KA(bimod: TwistedBimoduleA, max_weight=None, pmax=None):
    if max_weight is None:
        max_weight = bimod.max_weight
    return {w: build_K(bimod, w, pmax=pmax) for w in range(max_weight + 1)}


def koszul_homology(cx: WeightedChainComplex, p, coeff="Z"):
    """H_p of the complex: an AbelianGroup over the integers ("Z"), or a
    dimension over the rationals (0) / a prime field (the prime)."""
    if p not in cx.terms:
        return AbelianGroup(0, ()) if coeff == "Z" else 0
    d_in = cx.boundary(p + 1)  # K_{p+1} -> K_p
    d_out = cx.boundary(p)  # K_p -> K_{p-1}
    if coeff == "Z":
        nullity = cx.dim(p) - rank_over_field(d_out, 0)
        factors = smith_normal_form(d_in)
        nonzero = [d for d in factors if d != 0]
        return AbelianGroup(
            rank=nullity - len(nonzero),
            torsion=tuple(d for d in nonzero if d > 1),
        )
    prime = coeff
    return (
        cx.dim(p)
        - rank_over_field(d_out, prime)
        - rank_over_field(d_in, prime)
    )


# ---------------------------------------------------------------------------
# the weight-raising homotopy


def _right_mult_matrix(bimod, w, p, a, source_cx, target_cx):
    """x |-> x * [a] applied to the module factor: K_p(w) -> K_p(w+1)."""
    src = source_cx.terms[p]
    if p == -1:
        tindex = {x.canonical: i for i, x in enumerate(target_cx.terms[-1])}
        M = SparseIntMatrix(len(target_cx.terms[-1]), len(src))
        for col, x in enumerate(src):
            M.add(tindex[bimod.right_mult(a, x).canonical], col, 1)
        return M
    tindex = {(t, x.canonical): i for i, (t, x) in enumerate(target_cx.terms[p])}
    M = SparseIntMatrix(len(target_cx.terms[p]), len(src))
    for col, (t, x) in enumerate(src):
        y = bimod.right_mult(a, x)
        M.add(tindex[(t, y.canonical)], col, 1)
    return M


def _homotopy_matrix(bimod, w, p, a, source_cx, target_cx):
    """H_a: K_p(w) -> K_{p+1}(w+1), appending a and twisting the module
    factor, with sign (-1)^(p+1)."""
    act = bimod.act
    g = act.Q.members[a]
    sign = (-1) ** (p + 1)
    if p == -1:
        src = source_cx.terms[-1]
        tindex = {(t, x.canonical): i for i, (t, x) in enumerate(target_cx.terms[0])}
        M = SparseIntMatrix(len(target_cx.terms[0]), len(src))
        for col, x in enumerate(src):
            y = bimod.twist(g, x)
            M.add(tindex[((a,), y.canonical)], col, sign)
        return M
    src = source_cx.terms[p]
    tindex = {(t, x.canonical): i for i, (t, x) in enumerate(target_cx.terms[p + 1])}
    M = SparseIntMatrix(len(target_cx.terms[p + 1]), len(src))
    for col, (t, x) in enumerate(src):
        y = bimod.twist(g, x)
        M.add(tindex[(t + (a,), y.canonical)], col, sign)
    return M


def _mat_sub(A: SparseIntMatrix, *others):
    out = SparseIntMatrix(A.rows, A.cols, list(A.entries))
    for B in others:
        for r, c, v in B.entries:
            out.add(r, c, -v)
    return out


def _compose(A: SparseIntMatrix, B: SparseIntMatrix):
    """A after B."""
    if A.cols != B.rows:
        raise InvalidInputError("composition shape mismatch")
    bycol = {}
    for (r, c), v in B.coalesced().items():
        bycol.setdefault(c, {})[r] = v
    rows_of_A = {}
    for (r, c), v in A.coalesced().items():
        rows_of_A.setdefault(c, {})[r] = v  # column c of A's input
    out = SparseIntMatrix(A.rows, B.cols)
    for c, col in bycol.items():
        acc = {}
        for mid, v in col.items():
            for r2, v2 in rows_of_A.get(mid, {}).items():
                acc[r2] = acc.get(r2, 0) + v * v2
        for r2, v2 in acc.items():
            out.add(r2, c, v2)
    return out


def homotopy_check(bimod: TwistedBimoduleA, a, max_weight=None, pmax=None):
    """Verify d H_a + H_a d = right-multiplication-by-[a] exactly, on every
    basis element of every K_p(w) for w < max_weight.  Returns a report dict;
    a nonempty ``violations`` list means the identity failed."""
    if max_weight is None:
        max_weight = bimod.max_weight
    violations = []
    checked = 0
    complexes = {}

    def cx(w):
        if w not in complexes:
            complexes[w] = build_K(bimod, w, pmax=None if pmax is None else pmax + 1)
        return complexes[w]

    for w in range(max_weight):
        src, tgt = cx(w), cx(w + 1)
        top = (w - 1) if pmax is None else min(pmax, w - 1)
        for p in range(-1, top + 1):
            H = _homotopy_matrix(bimod, w, p, a, src, tgt)
            dH = _compose(tgt.boundary(p + 1), H)
            if p >= 0:
                Hd = _compose(
                    _homotopy_matrix(bimod, w, p - 1, a, src, tgt),
                    src.boundary(p),
                )
            else:
                Hd = SparseIntMatrix(tgt.dim(p), src.dim(p))
            R = _right_mult_matrix(bimod, w, p, a, src, tgt)
            diff = _mat_sub(R, dH, Hd)
            if diff.coalesced():
                violations.append((w, p, sorted(diff.coalesced())[:5]))
            checked += src.dim(p)
    return {"a": a, "max_weight": max_weight, "checked": checked, "violations": violations}


def right_action_on_homology_is_trivial(bimod, a, w, p, prime=0):
    """Check that x |-> x*[a] induces the zero map H_p(w) -> H_p(w+1)."""
    src = build_K(bimod, w, pmax=p + 1)
    tgt = build_K(bimod, w + 1, pmax=p + 1)
    R = _right_mult_matrix(bimod, w, p, a, src, tgt)
    img_rows = [
        {r: v for (r, c2), v in tgt.boundary(p + 1).coalesced().items() if c2 == c}
        for c in range(tgt.dim(p + 1))
    ]
    red = FieldReducer([r for r in img_rows if r], tgt.dim(p), prime)
    Rc = {}
    for (r, c), v in R.coalesced().items():
        Rc.setdefault(c, {})[r] = v
    for v in kernel_basis(src.boundary(p), prime):
        img = {}
        for c, coeff in enumerate(v):
            if coeff:
                for r, vv in Rc.get(c, {}).items():
                    img[r] = img.get(r, 0) + coeff * vv
        if not red.in_image(img):
            return False
    return True


def vanishing_scan(bimod: TwistedBimoduleA, max_weight=None, degrees=(-1, 0, 1, 2)):
    """Integral homology per (weight, degree); for each degree reports the
    largest weight with nonvanishing homology and whether homology vanishes
    from there through max_weight."""
    if max_weight is None:
        max_weight = bimod.max_weight
    pmax = max(degrees)
    table = {}
    for w in range(max_weight + 1):
        cx = build_K(bimod, w, pmax=pmax + 1)
        cx.verify_d2()
        for p in degrees:
            if p <= w - 1:
                table[(w, p)] = koszul_homology(cx, p, "Z")
    report = {"max_weight": max_weight, "degrees": {}, "homology": {}}
    for (w, p), h in sorted(table.items()):
        report["homology"][f"w{w}_p{p}"] = str(h)
    for p in degrees:
        nonvan = [w for w in range(max_weight + 1) if (w, p) in table and not table[(w, p)].is_trivial()]
        last = max(nonvan) if nonvan else None
        report["degrees"][p] = {
            "last_nonvanishing_weight": last,
            "vanishes_to_max_weight": last is None or last < max_weight,
        }
    report["ok"] = all(d["vanishes_to_max_weight"] for d in report["degrees"].values())
    return report
