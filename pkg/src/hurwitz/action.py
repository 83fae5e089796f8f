"""The braid-group action on tuples over a conjugation-invariant subset,
orbit enumeration, component invariants, and the component monoid.

Tuples are stored as tuples of *positions* into ``Q.members`` (0..m-1), so the
lexicographic order used for canonical representatives is the fixed member
order of Q.  The generator ``sigma_i`` (1-indexed) sends
``(..., a_i, a_{i+1}, ...) -> (..., a_{i+1}, a_i^{a_{i+1}}, ...)``.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass

from .errors import InfeasibleSizeError, InvalidInputError
from .groups import FiniteGroup, InvariantSubset, Subgroup, subgroup_closure

DEFAULT_STATE_CAP = 10**7
PY_BFS_LIMIT = 2_000_000  # above this many tuples, orbit BFS goes through numpy


@dataclass(frozen=True)
class Orbit:
    """A braid-orbit of weight-n tuples with its component invariants."""

    weight: int
    canonical: tuple  # lexicographically minimal member
    size: int
    total_monodromy: int  # group element index
    image_subgroup: Subgroup
    class_partition: tuple  # sorted ((class representative, count), ...)

    def key(self):
        return (self.weight, self.canonical)


@dataclass
class OrbitTable:
    weight: int
    orbits: list
    index: dict  # canonical tuple -> orbit id

    def orbit_count(self):
        return len(self.orbits)

    def total_size(self):
        return sum(o.size for o in self.orbits)


class HurwitzAction:
    """The braid action attached to a fixed (G, Q), with cached orbit data."""

    def __init__(self, G: FiniteGroup, Q: InvariantSubset, state_cap=DEFAULT_STATE_CAP):
        if Q.group is not G:
            raise InvalidInputError("Q does not belong to the given group")
        self.G = G
        self.Q = Q
        self.m = Q.m
        self.state_cap = state_cap
        members = Q.members
        pos = {a: i for i, a in enumerate(members)}
        # conj[x][y] = position of members[x]^members[y]; conj_inv uses y^-1
        self.conj = tuple(
            tuple(pos[G.conj(members[x], members[y])] for y in range(self.m))
            for x in range(self.m)
        )
        self.conj_inv = tuple(
            tuple(pos[G.conj(members[x], G.inv[members[y]])] for y in range(self.m))
            for x in range(self.m)
        )
        self._engines = {}
        self._orbit_cache = {}

    # -- elementary moves ---------------------------------------------------

    def apply_sigma(self, i, t, inverse=False):
        n = len(t)
        if not 1 <= i <= n - 1:
            raise InvalidInputError(f"sigma index {i} out of range for weight {n}")
        p = i - 1
        x, y = t[p], t[p + 1]
        if inverse:
            pair = (self.conj_inv[y][x], x)
        else:
            pair = (y, self.conj[x][y])
        return t[:p] + pair + t[p + 2 :]

    def apply_word(self, word, t):
        """Left-to-right composition; letters are signed generator indices
        (+i for sigma_i, -i for its inverse)."""
        for letter in word:
            if letter == 0:
                raise InvalidInputError("zero is not a valid letter")
            t = self.apply_sigma(abs(letter), t, inverse=letter < 0)
        return t

    def conjugate_tuple(self, g, t):
        members = self.Q.members
        pos = {a: i for i, a in enumerate(members)}
        return tuple(pos[self.G.conj(members[x], g)] for x in t)

    # -- tuple-level helpers ------------------------------------------------

    def tuple_monodromy(self, t):
        r = self.G.identity
        for x in t:
            r = self.G.mult[r][self.Q.members[x]]
        return r

    def labels_of(self, t):
        return "(" + ",".join(self.G.label(self.Q.members[x]) for x in t) + ")"

    def _invariants(self, t):
        G, members = self.G, self.Q.members
        total = self.tuple_monodromy(t)
        H = subgroup_closure(G, {members[x] for x in t})
        Hset = set(H.members)
        inter = [a for a in self.Q.members if a in Hset]
        # H-conjugacy classes of Q n H, keyed by smallest member
        cls_of = {}
        remaining = set(inter)
        while remaining:
            a = min(remaining)
            cls = {G.conj(a, h) for h in H.members}
            for x in cls:
                cls_of[x] = a
            remaining -= cls
        counts = {}
        for x in t:
            rep = cls_of[members[x]]
            counts[rep] = counts.get(rep, 0) + 1
        partition = tuple(sorted(counts.items()))
        return total, H, partition

    def _make_orbit(self, canonical, size):
        total, H, partition = self._invariants(canonical)
        return Orbit(
            weight=len(canonical),
            canonical=canonical,
            size=size,
            total_monodromy=total,
            image_subgroup=H,
            class_partition=partition,
        )

    # -- orbit BFS ----------------------------------------------------------

    def _orbit_py(self, t):
        cap = self.state_cap
        seen = {t}
        queue = deque([t])
        canonical = t
        n = len(t)
        while queue:
            u = queue.popleft()
            for i in range(1, n):
                for inverse in (False, True):
                    v = self.apply_sigma(i, u, inverse)
                    if v not in seen:
                        if len(seen) >= cap:
                            raise InfeasibleSizeError(
                                f"orbit exceeds state cap {cap}"
                            )
                        seen.add(v)
                        queue.append(v)
                        if v < canonical:
                            canonical = v
        return canonical, len(seen), seen

    def orbit_of(self, t, keep_members=False):
        """Breadth-first closure of t under all sigma_i^(+-1)."""
        t = tuple(t)
        n = len(t)
        for x in t:
            if not 0 <= x < self.m:
                raise InvalidInputError("tuple entry outside Q")
        if n <= 1 or self.m == 1:
            return self._make_orbit(t, 1)
        key = (n, t)
        if not keep_members and key in self._orbit_cache:
            return self._orbit_cache[key]
        if self.m**n <= PY_BFS_LIMIT:
            canonical, size, members = self._orbit_py(t)
        else:
            canonical, size, members = self._orbit_np(t, keep_members)
        orbit = self._make_orbit(canonical, size)
        self._orbit_cache[(n, canonical)] = orbit
        self._orbit_cache[key] = orbit
        if keep_members:
            return orbit, members
        return orbit

    def _engine(self, n):
        if n not in self._engines:
            from .fast_orbits import RankEngine

            self._engines[n] = RankEngine(self.m, n, self.conj, self.conj_inv)
        return self._engines[n]

    def _orbit_np(self, t, keep_members):
        eng = self._engine(len(t))
        res = eng.orbit(eng.rank(t), want_members=keep_members, cap=self.state_cap)
        canonical = eng.unrank(res.min_rank)
        if keep_members:
            return canonical, res.size, res.members
        return canonical, res.size, None

    # -- component tables ---------------------------------------------------

    def enumerate_components(self, n, omega=None):
        """All braid orbits on weight-n tuples, optionally restricted to a
        given total monodromy."""
        total_states = self.m**n
        if omega is None and total_states > self.state_cap:
            raise InfeasibleSizeError(
                f"|Q|^{n} = {total_states} exceeds state cap {self.state_cap}"
            )
        if total_states > PY_BFS_LIMIT:
            return self._enumerate_np(n, omega)
        orbits = []
        visited = set()
        import itertools

        for t in itertools.product(range(self.m), repeat=n):
            if t in visited:
                continue
            if omega is not None and self.tuple_monodromy(t) != omega:
                continue
            canonical, size, members = self._orbit_py(t)
            visited |= members
            orbits.append(self._make_orbit(canonical, size))
        orbits.sort(key=lambda o: o.canonical)
        return OrbitTable(
            weight=n,
            orbits=orbits,
            index={o.canonical: i for i, o in enumerate(orbits)},
        )

    def _enumerate_np(self, n, omega):
        eng = self._engine(n)
        raw = eng.enumerate_all(
            omega=omega,
            group=self.G,
            members=self.Q.members,
            cap=self.state_cap if omega is not None else None,
        )
        orbits = [self._make_orbit(canonical, size) for canonical, size in raw]
        orbits.sort(key=lambda o: o.canonical)
        return OrbitTable(
            weight=n,
            orbits=orbits,
            index={o.canonical: i for i, o in enumerate(orbits)},
        )

    # -- monoid structure ---------------------------------------------------

    def pi0_multiply(self, x: Orbit, y: Orbit):
        return self.orbit_of(x.canonical + y.canonical)

    def unit_orbit(self):
        return self.orbit_of(())

    def generator_orbit(self, x, power=1):
        """The component of the weight-``power`` tuple (q_x, ..., q_x)."""
        return self.orbit_of((x,) * power)


def write_orbit_csv(path, act: HurwitzAction, tables):
    """CSV export of one or more OrbitTables."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "weight",
                "orbit_id",
                "size",
                "canonical",
                "total_monodromy",
                "image_subgroup_order",
                "class_partition",
            ]
        )
        for table in tables:
            for oid, o in enumerate(table.orbits):
                partition = ";".join(
                    f"{act.G.label(rep)}:{cnt}" for rep, cnt in o.class_partition
                )
                w.writerow(
                    [
                        table.weight,
                        oid,
                        o.size,
                        act.labels_of(o.canonical),
                        act.G.label(o.total_monodromy),
                        o.image_subgroup.order,
                        partition,
                    ]
                )
