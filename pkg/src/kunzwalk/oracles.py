"""Slow, independent reference computations used to cross-check the walk.

Nothing here shares code paths with the walk beyond the nilsemigroup data
type and the Kunz test.
"""
from __future__ import annotations

from itertools import combinations
from math import gcd
from typing import Iterator, Sequence

from .geometry import IntVec
from .nilsemigroup import ModularNilsemigroup, is_kunz, unit


def valid_atom_sets(m: int, k: int) -> Iterator[tuple[int, ...]]:
    """All ``k``-subsets of ``Z_m \\ {0}`` generating ``Z_m``, ascending."""
    for atoms in combinations(range(1, m), k):
        g = m
        for a in atoms:
            g = gcd(g, a)
        if g == 1:
            yield atoms


def staircase_fillings(m: int, atoms: Sequence[int]) -> Iterator[ModularNilsemigroup]:
    """Every staircase modular nilsemigroup on ``Z_m`` with atom set exactly ``atoms``.

    A staircase filling is an order ideal ``S`` of ``N^k`` containing ``0`` and
    each ``e_j``, on which ``z -> z.atoms mod m`` is a bijection onto ``Z_m``.
    The search branches on the least addable vector: take it or forbid it.
    """
    k = len(atoms)
    atoms = tuple(atoms)
    start = [(0,) * k] + [unit(k, j) for j in range(k)]
    if len({sum(c * a for c, a in zip(z, atoms)) % m for z in start}) != k + 1:
        return
    forbidden: set[IntVec] = set()
    used: dict[int, IntVec] = {0: start[0]}
    for j, a in enumerate(atoms):
        used[a % m] = start[j + 1]
    members = {z: sum(c * a for c, a in zip(z, atoms)) % m for z in start}

    def addable() -> list[IntVec]:
        out = set()
        for z, rz in members.items():
            for j in range(k):
                w = z[:j] + (z[j] + 1,) + z[j + 1:]
                if w in members or w in forbidden or w in out:
                    continue
                if (rz + atoms[j]) % m in used:
                    continue
                if sum(w) < 2:
                    continue  # atoms only factor as themselves
                if all(w[:i] + (c - 1,) + w[i + 1:] in members for i, c in enumerate(w) if c):
                    out.add(w)
        return sorted(out, key=lambda w: (sum(w), w))

    def rec() -> Iterator[ModularNilsemigroup]:
        if len(used) == m:
            facts = [None] * m
            for r, z in used.items():
                facts[r] = z
            yield ModularNilsemigroup.staircase(m, atoms, facts)
            return
        cands = addable()
        if not cands:
            return
        w = cands[0]
        r = sum(c * a for c, a in zip(w, atoms)) % m
        members[w] = r
        used[r] = w
        yield from rec()
        del used[r]
        del members[w]
        forbidden.add(w)
        yield from rec()
        forbidden.discard(w)

    yield from rec()


def kunz_staircases(m: int, atoms: Sequence[int]) -> list[ModularNilsemigroup]:
    """Oracle chamber set: staircase fillings that pass the Kunz test."""
    return [n for n in staircase_fillings(m, atoms) if is_kunz(n)]
