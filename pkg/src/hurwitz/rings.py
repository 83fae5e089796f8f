"""Weight-graded dimension series of the component rings and exact
quasi-polynomial fitting.

Five series are tracked, all with the orbit bases of weight-graded pieces:

* ``A``      — all components (one basis vector per braid orbit);
* ``A1``     — components with identity total monodromy;
* ``B``      — the subring generated by the classes of constant tuples
               (q, ..., q) of length ell, ell = lcm of the orders of Q;
* ``Bomega`` — B modulo identifying each generator with its omega-conjugate;
* ``C``      — B modulo identifying all generators with each other.

B is commutative (the ell-th power classes are central), so the quotients are
computed level by level: the weight-(j*ell) basis of a quotient is the set of
product orbits of j generators modulo the equivalence generated by
``e * g_x ~ e * g_y`` over all level-(j-1) elements e and identified pairs
(x, y).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

from .action import HurwitzAction
from .errors import FitError, InvalidInputError

RING_TAGS = ("A", "A1", "B", "Bomega", "C")


@dataclass
class GradedDimSeries:
    ring_tag: str
    dims: dict  # weight -> dimension
    max_weight: int
    period_hint: int

    def __post_init__(self):
        if self.ring_tag not in RING_TAGS:
            raise InvalidInputError(f"unknown ring tag {self.ring_tag!r}")

    def values(self):
        return [self.dims.get(n, 0) for n in range(self.max_weight + 1)]


# ---------------------------------------------------------------------------
# series construction


def dim_series_A(act: HurwitzAction, max_weight, omega=None, tag=None):
    """dim A_n = number of braid orbits of weight-n tuples, optionally
    restricted to total monodromy omega ("A1" when omega is the identity)."""
    if tag is None:
        tag = "A1" if omega == act.G.identity else "A"
    dims = {}
    for n in range(max_weight + 1):
        if n == 0:
            dims[0] = 1 if omega in (None, act.G.identity) else 0
            continue
        dims[n] = act.enumerate_components(n, omega=omega).orbit_count()
    return GradedDimSeries(tag, dims, max_weight, act.Q.ell)


def _b_generators(act: HurwitzAction):
    ell = act.Q.ell
    return [act.generator_orbit(x, ell) for x in range(act.m)]


def b_levels(act: HurwitzAction, max_level):
    """Level-j basis of B (orbits that are products of j generators), together
    with the product map level x generator -> level+1 orbit key.

    Large weights share one visited bitmap per level so that each orbit is
    closed exactly once; products landing in an already-closed orbit are
    identified by binary search in its sorted member ranks."""
    PY_PRODUCT_LIMIT = 10**5
    ell = act.Q.ell
    gens = _b_generators(act)
    unit = act.unit_orbit()
    levels = [{unit.key(): unit}]
    products = []  # products[j][(key, x)] = key of the level-(j+1) product
    for j in range(1, max_level + 1):
        n = j * ell
        prev = levels[-1]
        nxt = {}
        prod = {}
        if act.m**n <= PY_PRODUCT_LIMIT:
            for key in sorted(prev):
                orb = prev[key]
                for x, g in enumerate(gens):
                    po = act.pi0_multiply(orb, g)
                    nxt[po.key()] = po
                    prod[(key, x)] = po.key()
        else:
            import numpy as np

            eng = act._engine(n)
            visited = eng.new_bitmap()
            closed = []  # (sorted member ranks, orbit)
            for key in sorted(prev):
                orb = prev[key]
                for x in range(act.m):
                    r = eng.rank(orb.canonical + (x,) * ell)
                    po = None
                    if eng._test_bits(visited, np.asarray([r]))[0]:
                        for mem, cand in closed:
                            i = int(np.searchsorted(mem, r))
                            if i < mem.size and mem[i] == r:
                                po = cand
                                break
                        if po is None:  # pragma: no cover - closure invariant
                            raise InvalidInputError("visited rank not in any orbit")
                    else:
                        res = eng.orbit(
                            r, visited=visited, want_members=True, cap=act.state_cap
                        )
                        po = act._make_orbit(eng.unrank(res.min_rank), res.size)
                        closed.append((res.members, po))
                    nxt[po.key()] = po
                    prod[(key, x)] = po.key()
        levels.append(nxt)
        products.append(prod)
    return levels, products


def dim_series_B(act: HurwitzAction, max_weight):
    ell = act.Q.ell
    levels, _ = b_levels(act, max_weight // ell)
    dims = {j * ell: len(lv) for j, lv in enumerate(levels)}
    return GradedDimSeries("B", dims, max_weight, ell)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, x, y):
        self.parent[self.find(x)] = self.find(y)

    def class_count(self, keys):
        return len({self.find(k) for k in keys})


def _dim_series_quotient(act, max_weight, pairs, tag):
    """Dimensions of B modulo the congruence generated by identifying the
    generator pairs in ``pairs`` (positions into Q.members)."""
    ell = act.Q.ell
    levels, products = b_levels(act, max_weight // ell)
    dims = {0: 1}
    for j in range(1, len(levels)):
        uf = _UnionFind()
        prod = products[j - 1]
        for key in levels[j]:
            uf.find(key)
        for ekey in levels[j - 1]:
            for x, y in pairs:
                uf.union(prod[(ekey, x)], prod[(ekey, y)])
        dims[j * ell] = uf.class_count(levels[j].keys())
    return GradedDimSeries(tag, dims, max_weight, ell)


def dim_series_Bomega(act: HurwitzAction, max_weight, omega):
    members = act.Q.members
    pos = {a: i for i, a in enumerate(members)}
    pairs = []
    for x in range(act.m):
        y = pos[act.G.conj(members[x], omega)]
        if y != x:
            pairs.append((x, y))
    return _dim_series_quotient(act, max_weight, pairs, "Bomega")


def dim_series_C(act: HurwitzAction, max_weight):
    pairs = [(0, x) for x in range(1, act.m)]
    return _dim_series_quotient(act, max_weight, pairs, "C")


def write_dims_csv(path, series_list):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ring_tag", "weight", "dim"])
        for s in series_list:
            for n in range(s.max_weight + 1):
                w.writerow([s.ring_tag, n, s.dims.get(n, 0)])


# ---------------------------------------------------------------------------
# quasi-polynomial fitting


@dataclass(frozen=True)
class QuasiPolynomial:
    """Period-q list of polynomials with exact rational coefficients; the
    value at n is polys[n % period](n).  Coefficient tuples are ascending;
    an empty tuple is the zero polynomial."""

    period: int
    polys: tuple

    def evaluate(self, n):
        coeffs = self.polys[n % self.period]
        return sum((c * n**i for i, c in enumerate(coeffs)), Fraction(0))

    @property
    def degree(self):
        degs = [len(p) - 1 for p in self.polys if p]
        return max(degs) if degs else -math.inf

    def coeff_strings(self):
        return [[str(c) for c in p] for p in self.polys]


def _poly_from_samples(xs, ys):
    """Exact Newton interpolation through (xs[i], ys[i]); ascending coeffs."""
    n = len(xs)
    divided = [Fraction(y) for y in ys]
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            divided[i] = (divided[i] - divided[i - 1]) / (xs[i] - xs[i - level])
    # expand prod (x - xs[j]) incrementally
    coeffs = [Fraction(0)] * n
    basis = [Fraction(1)]
    for k in range(n):
        for i, b in enumerate(basis):
            coeffs[i] += divided[k] * b
        newb = [Fraction(0)] * (len(basis) + 1)
        for i, b in enumerate(basis):
            newb[i] -= b * xs[k]
            newb[i + 1] += b
        basis = newb
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def fit_quasipolynomial(series: GradedDimSeries, tail_start, end_weight=None):
    """Fit one polynomial per residue class mod the period to the dimension
    tail, certified by vanishing finite differences across the whole window.

    Raises FitError (with the first violating weight) when some residue class
    has no vanishing difference order within its window, and on windows too
    short to certify any degree.
    """
    period = series.period_hint
    end = series.max_weight if end_weight is None else end_weight
    if end > series.max_weight or tail_start < 0 or tail_start > end:
        raise InvalidInputError("fit window outside the computed series")
    polys = []
    for r in range(period):
        ns = [n for n in range(tail_start, end + 1) if n % period == r]
        ys = [series.dims.get(n, 0) for n in ns]
        if not ns:
            raise FitError(f"no samples for residue {r} in the window", None)
        if all(y == 0 for y in ys):
            polys.append(())
            continue
        if len(ns) < 2:
            raise FitError(
                f"window too short for residue {r} (need at least 2 samples)",
                None,
            )
        # difference table: find the lowest order whose differences all vanish
        table = [list(map(Fraction, ys))]
        while len(table[-1]) > 1:
            prev = table[-1]
            table.append([prev[i + 1] - prev[i] for i in range(len(prev) - 1)])
        fitted = None
        for d in range(len(ns) - 1):
            if all(v == 0 for v in table[d + 1]):
                fitted = d
                break
        if fitted is None:
            row = table[-1]
            bad = next(i for i, v in enumerate(row) if v != 0)
            raise FitError(
                f"residue {r}: no vanishing difference order within the window",
                first_bad_weight=ns[bad + len(table) - 1],
            )
        polys.append(_poly_from_samples(ns[: fitted + 1], ys[: fitted + 1]))
    qp = QuasiPolynomial(period=period, polys=tuple(polys))
    # certify on every window sample, reporting the first violation
    for n in range(tail_start, end + 1):
        if qp.evaluate(n) != series.dims.get(n, 0):
            raise FitError(
                f"fitted polynomial misses weight {n}", first_bad_weight=n
            )
    return qp


# ---------------------------------------------------------------------------
# degree-bound report


def degree_bound_report(act: HurwitzAction, omega, max_weight, tail_start=None):
    """Fit all five series and compare fitted degrees with the subgroup-class
    invariants: deg p_B = k(G,Q) - 1 and deg p_A = k(G,Q) - 1 must hold
    exactly, deg p_Bomega <= k(G,Q,omega) - 1.  Returns a JSON-able dict with
    one pass/fail entry per assertion."""
    from .groups import k_invariant

    ell = act.Q.ell
    if tail_start is None:
        tail_start = max_weight // 2
    series = {
        "A": dim_series_A(act, max_weight),
        "A1": dim_series_A(act, max_weight, omega=act.G.identity, tag="A1"),
        "B": dim_series_B(act, max_weight),
        "C": dim_series_C(act, max_weight),
    }
    if omega is not None:
        series["Bomega"] = dim_series_Bomega(act, max_weight, omega)
    k = k_invariant(act.G, act.Q)
    report = {
        "k": k,
        "ell": ell,
        "max_weight": max_weight,
        "tail_start": tail_start,
        "series": {},
        "assertions": {},
    }
    fits = {}
    for tag, s in series.items():
        entry = {"dims": s.values()}
        try:
            qp = fit_quasipolynomial(s, tail_start)
            fits[tag] = qp
            entry["degree"] = None if qp.degree == -math.inf else qp.degree
            entry["coefficients"] = qp.coeff_strings()
        except FitError as e:
            entry["fit_error"] = str(e)
        report["series"][tag] = entry

    def check(name, ok):
        report["assertions"][name] = "pass" if ok else "fail"

    check("deg_pB_equals_k_minus_1", "B" in fits and fits["B"].degree == k - 1)
    check("deg_pA_equals_k_minus_1", "A" in fits and fits["A"].degree == k - 1)
    if omega is not None:
        komega = k_invariant(act.G, act.Q, omega=omega)
        report["k_omega"] = komega
        check(
            "deg_pBomega_at_most_k_omega_minus_1",
            "Bomega" in fits and fits["Bomega"].degree <= komega - 1,
        )
    report["ok"] = all(v == "pass" for v in report["assertions"].values())
    return report
