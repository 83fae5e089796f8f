"""Finite groups as explicit multiplication tables, plus the subgroup machinery
needed for conjugation-invariant subsets and the k-invariants that bound
quasi-polynomial degrees.

Conventions: elements are indices ``0..order-1``; conjugation is
``a ** g = g^-1 * a * g``.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field

from .errors import InfeasibleSizeError, InvalidInputError

DEFAULT_ORDER_CAP = 512
SUBSET_ENUM_CAP = 20  # |Q| cap for subset-generated subgroup enumeration


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``mult[a][b]`` is the index of the product a*b, ``inv[a]`` the inverse of a.
    Group axioms are checked exhaustively at construction.
    """

    order: int
    mult: tuple
    inv: tuple
    identity: int
    labels: tuple = None

    def __post_init__(self):
        n = self.order
        if n <= 0 or len(self.mult) != n or any(len(row) != n for row in self.mult):
            raise InvalidInputError("multiplication table has wrong shape")
        for row in self.mult:
            for x in row:
                if not (0 <= x < n):
                    raise InvalidInputError("table entry out of range")
        e = self.identity
        for a in range(n):
            if self.mult[e][a] != a or self.mult[a][e] != a:
                raise InvalidInputError(f"identity fails at element {a}")
            b = self.inv[a]
            if self.mult[a][b] != e or self.mult[b][a] != e:
                raise InvalidInputError(f"inverse fails at element {a}")
        import numpy as np

        M = np.asarray(self.mult, dtype=np.int64)
        for a in range(n):  # chunk over a to bound memory at n^2 per step
            left = M[M[a]]          # (a*b)*c for all b, c
            right = M[a][M]         # a*(b*c)
            if not np.array_equal(left, right):
                b, c = map(int, np.argwhere(left != right)[0])
                raise InvalidInputError(f"non-associative triple ({a}, {b}, {c})")

    def op(self, a, b):
        return self.mult[a][b]

    def inverse(self, a):
        return self.inv[a]

    def conj(self, a, g):
        """a^g = g^-1 a g."""
        return self.mult[self.mult[self.inv[g]][a]][g]

    def power(self, a, k):
        if k < 0:
            return self.power(self.inv[a], -k)
        r = self.identity
        for _ in range(k):
            r = self.mult[r][a]
        return r

    def element_order(self, a):
        r, k = a, 1
        while r != self.identity:
            r = self.mult[r][a]
            k += 1
        return k

    def label(self, a):
        if self.labels is not None:
            return self.labels[a]
        return str(a)

    def elements_by_label(self, names):
        if self.labels is None:
            raise InvalidInputError("group has no labels")
        lookup = {lab: i for i, lab in enumerate(self.labels)}
        out = []
        for name in names:
            if name not in lookup:
                raise InvalidInputError(f"unknown element label {name!r}")
            out.append(lookup[name])
        return out


@dataclass(frozen=True)
class Subgroup:
    group: FiniteGroup
    members: tuple  # sorted element indices

    def __post_init__(self):
        G = self.group
        ms = set(self.members)
        if G.identity not in ms:
            raise InvalidInputError("subgroup misses the identity")
        for a in self.members:
            if G.inv[a] not in ms:
                raise InvalidInputError("subgroup not closed under inverse")
            for b in self.members:
                if G.mult[a][b] not in ms:
                    raise InvalidInputError("subgroup not closed under product")

    @property
    def order(self):
        return len(self.members)


@dataclass(frozen=True)
class InvariantSubset:
    """A conjugation-invariant subset Q of a group, with its exponent ell
    (the lcm of the orders of the members, so a^ell = 1 for every a in Q)."""

    group: FiniteGroup
    members: tuple  # sorted element indices
    ell: int = field(default=0)

    def __post_init__(self):
        if not self.members:
            raise InvalidInputError("Q must be nonempty")
        if self.ell == 0:
            lcm = 1
            for a in self.members:
                lcm = math.lcm(lcm, self.group.element_order(a))
            object.__setattr__(self, "ell", lcm)

    @property
    def m(self):
        return len(self.members)

    def position(self, element):
        return self.members.index(element)


# ---------------------------------------------------------------------------
# construction


def _perm_compose(p, q):
    """(p then q) acting on points: (p*q)(x) = q(p(x)), matching row-times-column
    composition of the one-line images used below."""
    return tuple(q[x] for x in p)


def _cycle_label(perm):
    n = len(perm)
    seen = [False] * n
    parts = []
    for s in range(n):
        if seen[s] or perm[s] == s:
            seen[s] = True
            continue
        cyc = [s]
        seen[s] = True
        x = perm[s]
        while x != s:
            cyc.append(x)
            seen[x] = True
            x = perm[x]
        parts.append("(" + ",".join(str(i + 1) for i in cyc) + ")")
    return "".join(parts) if parts else "e"


def group_from_permutations(degree, generators, order_cap=DEFAULT_ORDER_CAP):
    """Closure of permutation generators (one-line images on 0..degree-1)."""
    gens = []
    for g in generators:
        t = tuple(g)
        if sorted(t) != list(range(degree)):
            raise InvalidInputError(f"not a permutation of degree {degree}: {g}")
        gens.append(t)
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = _perm_compose(p, g)
                if q not in index:
                    if len(elements) >= order_cap:
                        raise InfeasibleSizeError(
                            f"permutation closure exceeds order cap {order_cap}"
                        )
                    index[q] = len(elements)
                    elements.append(q)
                    nxt.append(q)
        frontier = nxt
    n = len(elements)
    mult = tuple(
        tuple(index[_perm_compose(elements[a], elements[b])] for b in range(n))
        for a in range(n)
    )
    inv = []
    for a in range(n):
        p = elements[a]
        ip = [0] * degree
        for i, x in enumerate(p):
            ip[x] = i
        inv.append(index[tuple(ip)])
    labels = tuple(_cycle_label(p) for p in elements)
    return FiniteGroup(order=n, mult=mult, inv=tuple(inv), identity=0, labels=labels)


def group_from_table(mult, labels=None, order_cap=DEFAULT_ORDER_CAP):
    n = len(mult)
    if n > order_cap:
        raise InfeasibleSizeError(f"group order {n} exceeds cap {order_cap}")
    mult = tuple(tuple(row) for row in mult)
    # locate the two-sided identity
    ident = None
    for e in range(n):
        if all(mult[e][a] == a and mult[a][e] == a for a in range(n)):
            ident = e
            break
    if ident is None:
        raise InvalidInputError("table has no two-sided identity")
    inv = []
    for a in range(n):
        found = None
        for b in range(n):
            if mult[a][b] == ident and mult[b][a] == ident:
                found = b
                break
        if found is None:
            raise InvalidInputError(f"element {a} has no two-sided inverse")
        inv.append(found)
    return FiniteGroup(
        order=n,
        mult=mult,
        inv=tuple(inv),
        identity=ident,
        labels=tuple(labels) if labels is not None else None,
    )


def load_group(spec, order_cap=DEFAULT_ORDER_CAP):
    """Build a group from a spec dict, a JSON string, or a path to a JSON file.

    Accepted forms: {"mult": [[...]], "labels": [...]} or
    {"degree": d, "permutation_generators": [[one-line images]]}.
    """
    if isinstance(spec, str):
        try:
            data = json.loads(spec)
        except json.JSONDecodeError:
            with open(spec) as fh:
                data = json.load(fh)
    else:
        data = spec
    if "mult" in data:
        return group_from_table(data["mult"], data.get("labels"), order_cap)
    if "permutation_generators" in data:
        return group_from_permutations(
            data["degree"], data["permutation_generators"], order_cap
        )
    raise InvalidInputError("group spec needs 'mult' or 'permutation_generators'")


# ---------------------------------------------------------------------------
# subgroups, classes, Q validation


def conjugacy_classes(G):
    """Partition of the element indices into conjugacy classes, each sorted,
    classes ordered by their smallest member."""
    seen = [False] * G.order
    classes = []
    for a in range(G.order):
        if seen[a]:
            continue
        cls = {G.conj(a, g) for g in range(G.order)}
        for x in cls:
            seen[x] = True
        classes.append(tuple(sorted(cls)))
    return classes


def subgroup_closure(G, S):
    """Smallest subgroup containing S (worklist closure under products)."""
    members = {G.identity}
    frontier = []
    for s in S:
        if s not in members:
            members.add(s)
            frontier.append(s)
    while frontier:
        nxt = []
        for a in list(members):
            for b in frontier:
                for c in (G.mult[a][b], G.mult[b][a]):
                    if c not in members:
                        members.add(c)
                        nxt.append(c)
        frontier = nxt
    # closure under products of a full generating run also yields inverses
    # (finite group), so the Subgroup invariant check will pass
    return Subgroup(group=G, members=tuple(sorted(members)))


def validate_Q(G, members, allow_identity=True):
    """Check conjugation-invariance exhaustively and compute ell."""
    ms = sorted(set(members))
    if not ms:
        raise InvalidInputError("Q must be nonempty")
    mset = set(ms)
    for a in ms:
        for g in range(G.order):
            if G.conj(a, g) not in mset:
                raise InvalidInputError(
                    f"Q is not conjugation-invariant: witness (a={G.label(a)}, "
                    f"g={G.label(g)}), a^g={G.label(G.conj(a, g))} not in Q"
                )
    if G.identity in mset:
        if not allow_identity:
            raise InvalidInputError("identity element in Q")
        warnings.warn("Q contains the identity element", stacklevel=2)
    return InvariantSubset(group=G, members=tuple(ms))


# ---------------------------------------------------------------------------
# k-invariants and large elements


def _class_count_in_subgroup(G, Q_members, H_members):
    """Number of H-conjugacy classes into which Q n H splits."""
    Hset = set(H_members)
    inter = [a for a in Q_members if a in Hset]
    remaining = set(inter)
    count = 0
    while remaining:
        a = min(remaining)
        cls = {G.conj(a, h) for h in H_members}
        remaining -= cls
        count += 1
    return count


def k_invariant(G, Q, omega=None):
    """k(G,Q): the maximal number of H-conjugacy classes of Q n H, over all
    subgroups H (containing omega, when omega is given).

    Only subgroups of the form <S> for S subset of Q (resp. <S u {omega}>) are
    enumerated; replacing H by the subgroup generated by Q n H (and omega)
    preserves Q n H and cannot merge its conjugacy classes, so the maximum is
    attained on this family.
    """
    if Q.m > SUBSET_ENUM_CAP:
        raise InfeasibleSizeError(
            f"|Q| = {Q.m} exceeds the subset enumeration cap {SUBSET_ENUM_CAP}"
        )
    extra = (omega,) if omega is not None else ()
    best = 0
    seen_subgroups = set()
    for r in range(Q.m + 1):
        for S in itertools.combinations(Q.members, r):
            H = subgroup_closure(G, S + extra)
            if H.members in seen_subgroups:
                continue
            seen_subgroups.add(H.members)
            best = max(best, _class_count_in_subgroup(G, Q.members, H.members))
    return best


def is_large(G, Q, omega):
    """True iff Q is one conjugacy class and <omega, a> = G for every a in Q."""
    classes = conjugacy_classes(G)
    if tuple(Q.members) not in classes:
        raise InvalidInputError("Q must be a single conjugacy class")
    return all(
        subgroup_closure(G, (omega, a)).order == G.order for a in Q.members
    )
