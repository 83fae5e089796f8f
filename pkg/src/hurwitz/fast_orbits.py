"""Vectorized orbit BFS over rank-encoded tuples.

A weight-n tuple (t_0, ..., t_{n-1}) of positions in 0..m-1 is encoded
big-endian as ``rank = sum t_p * m^(n-1-p)``, so numeric order on ranks equals
lexicographic order on tuples.  Visited sets are bit-packed numpy arrays, which
keeps full enumeration feasible up to a few 10^9 states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleSizeError


@dataclass
class OrbitResult:
    min_rank: int
    size: int
    members: np.ndarray  # sorted int64 ranks, or None if not requested


class RankEngine:
    def __init__(self, m, n, conj, conj_inv):
        self.m = m
        self.n = n
        self.total = m**n
        if self.total >= 2**62:
            raise InfeasibleSizeError("rank space exceeds 2^62")
        self.pow = [m**k for k in range(n + 1)]
        cf = np.empty(m * m, dtype=np.int64)
        ci = np.empty(m * m, dtype=np.int64)
        for x in range(m):
            for y in range(m):
                cf[x * m + y] = conj[x][y]
                ci[x * m + y] = conj_inv[x][y]
        self.conj_flat = cf
        self.conjinv_flat = ci

    def rank(self, t):
        r = 0
        for x in t:
            r = r * self.m + x
        return r

    def unrank(self, r):
        out = []
        for p in range(self.n):
            out.append(int(r // self.pow[self.n - 1 - p]) % self.m)
        return tuple(out)

    def sigma_images(self, ranks, i, inverse=False):
        """Images of an int64 rank array under sigma_i (1-indexed)."""
        m = self.m
        wp = self.pow[self.n - i]      # weight of position i-1
        wp1 = self.pow[self.n - i - 1]  # weight of position i
        x = (ranks // wp) % m
        y = (ranks // wp1) % m
        if inverse:
            nx = self.conjinv_flat[y * m + x]
            ny = x
        else:
            nx = y
            ny = self.conj_flat[x * m + y]
        return ranks + (nx - x) * wp + (ny - y) * wp1

    # -- visited bitmaps ----------------------------------------------------

    def new_bitmap(self):
        return np.zeros((self.total + 7) // 8, dtype=np.uint8)

    @staticmethod
    def _test_bits(bitmap, ranks):
        return (bitmap[ranks >> 3] >> (ranks & 7).astype(np.uint8)) & 1

    @staticmethod
    def _set_bits(bitmap, ranks):
        np.bitwise_or.at(bitmap, ranks >> 3, np.uint8(1) << (ranks & 7).astype(np.uint8))

    # -- BFS ----------------------------------------------------------------

    def orbit(self, start_rank, visited=None, want_members=False, cap=None):
        """BFS closure of a single rank; marks the shared ``visited`` bitmap.

        Each sigma_i^(+-1) is a bijection on states and discovered states are
        bit-marked immediately, so successor arrays never need deduplication.
        Frontiers are processed in chunks with the digit decomposition computed
        once per chunk, and stored 32-bit when the rank space allows."""
        if visited is None:
            visited = self.new_bitmap()
        store = np.uint32 if self.total < 2**32 else np.int64
        CH = 1 << 20
        m = self.m
        frontier = np.array([start_rank], dtype=store)
        self._set_bits(visited, np.asarray([start_rank], dtype=np.int64))
        size = 0
        min_rank = start_rank
        member_chunks = [frontier] if want_members else None
        while frontier.size:
            size += frontier.size
            if cap is not None and size > cap:
                raise InfeasibleSizeError(f"orbit exceeds state cap {cap}")
            nxt = []
            for lo in range(0, frontier.size, CH):
                chunk = frontier[lo : lo + CH].astype(np.int64)
                digits = [
                    ((chunk // self.pow[self.n - 1 - p]) % m) for p in range(self.n)
                ]
                for i in range(1, self.n):
                    wp = self.pow[self.n - i]
                    wp1 = self.pow[self.n - i - 1]
                    x, y = digits[i - 1], digits[i]
                    for inverse in (False, True):
                        if inverse:
                            nx = self.conjinv_flat[y * m + x]
                            ny = x
                        else:
                            nx = y
                            ny = self.conj_flat[x * m + y]
                        img = chunk + (nx - x) * wp + (ny - y) * wp1
                        img = img[self._test_bits(visited, img) == 0]
                        if img.size:
                            self._set_bits(visited, img)
                            mn = int(img.min())
                            if mn < min_rank:
                                min_rank = mn
                            nxt.append(img.astype(store))
            frontier = (
                np.concatenate(nxt) if nxt else np.empty(0, dtype=store)
            )
            if want_members and frontier.size:
                member_chunks.append(frontier)
        members = None
        if want_members:
            members = np.sort(np.concatenate(member_chunks).astype(np.int64))
        return OrbitResult(min_rank=int(min_rank), size=size, members=members)

    def monodromy_ranks(self, ranks, mult_flat, member_elems, identity):
        """Total monodromy of each rank, vectorized over the group mult table."""
        order = int(round(mult_flat.shape[0] ** 0.5))
        acc = np.full(ranks.shape, identity, dtype=np.int64)
        for p in range(self.n):
            digit = (ranks // self.pow[self.n - 1 - p]) % self.m
            acc = mult_flat[acc * order + member_elems[digit]]
        return acc

    def enumerate_all(self, omega=None, group=None, members=None, cap=None):
        """All orbits on the full rank space, as (canonical tuple, size) pairs.

        With ``omega`` given, every rank whose total monodromy differs from
        omega is pre-marked as visited (orbits stay inside the slice, so the
        scan over the remaining seeds is complete).
        """
        visited = self.new_bitmap()
        if omega is not None:
            mult_flat = np.asarray(group.mult, dtype=np.int64).ravel()
            member_elems = np.asarray(members, dtype=np.int64)
            CH = 1 << 22
            for lo in range(0, self.total, CH):
                ranks = np.arange(lo, min(lo + CH, self.total), dtype=np.int64)
                bad = ranks[
                    self.monodromy_ranks(ranks, mult_flat, member_elems, group.identity)
                    != omega
                ]
                self._set_bits(visited, bad)
        out = []
        bytepos = 0
        nbytes = visited.shape[0]
        CHUNK = 1 << 20
        while bytepos < nbytes:
            block = visited[bytepos : bytepos + CHUNK]
            holes = np.nonzero(block != 0xFF)[0]
            if holes.size == 0:
                bytepos += CHUNK
                continue
            b = int(holes[0]) + bytepos
            byte = int(visited[b])
            bit = (~byte & 0xFF & -(~byte & 0xFF)).bit_length() - 1
            r = (b << 3) + bit
            if r >= self.total:
                break
            res = self.orbit(r, visited=visited, cap=cap)
            out.append((self.unrank(res.min_rank), res.size))
        return out
