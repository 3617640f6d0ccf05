"""Modular nilsemigroups and their outer Betti elements.

A modular nilsemigroup on ``Z_m`` is stored by its factorization sets: for
each residue ``i`` the set ``Z(i)`` of exponent vectors ``z`` over the atoms
``(p_1, ..., p_k)`` with ``z_1 p_1 + ... + z_k p_k = i`` in the semigroup.  The
nil element is never stored; a vector is a factorization of nil exactly when
it lies in no ``Z(i)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

from .geometry import ConeH, IntVec, double_description, dot, independent_subset, primitive

Trade = tuple[IntVec, IntVec]


class InvalidNilsemigroup(ValueError):
    def __init__(self, violations: Sequence[str]):
        super().__init__("invalid modular nilsemigroup: " + "; ".join(violations[:5]))
        self.violations = list(violations)


def unit(k: int, j: int) -> IntVec:
    return tuple(int(i == j) for i in range(k))


def support(z: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, c in enumerate(z) if c)


@dataclass(frozen=True)
class ModularNilsemigroup:
    """Factorization-set description of a modular nilsemigroup.

    ``fact_sets[i]`` holds the factorizations of residue ``i``; an empty set
    marks a residue missing from the map (never valid, see :func:`validate`).
    """

    m: int
    atoms: tuple[int, ...]
    fact_sets: tuple[frozenset[IntVec], ...]

    @classmethod
    def from_factorizations(cls, m: int, atoms: Sequence[int],
                            facts: Mapping[int, Iterable[Sequence[int]]]) -> "ModularNilsemigroup":
        sets = [set() for _ in range(m)]
        for res, zs in facts.items():
            sets[int(res) % m].update(tuple(int(c) for c in z) for z in zs)
        return cls(m, tuple(int(a) % m for a in atoms), tuple(frozenset(s) for s in sets))

    @classmethod
    def staircase(cls, m: int, atoms: Sequence[int], facts: Sequence[IntVec]) -> "ModularNilsemigroup":
        """Build from one factorization per residue (``facts[i]`` factors ``i``)."""
        return cls(m, tuple(atoms), tuple(frozenset((tuple(z),)) for z in facts))

    @property
    def k(self) -> int:
        return len(self.atoms)

    def residue(self, z: Sequence[int]) -> int:
        return dot(z, self.atoms) % self.m

    def factorizations(self, i: int) -> frozenset[IntVec]:
        return self.fact_sets[i % self.m]

    @cached_property
    def elements(self) -> frozenset[IntVec]:
        """Every factorization of a non-nil element."""
        return frozenset(z for zs in self.fact_sets for z in zs)

    @cached_property
    def violations(self) -> tuple[str, ...]:
        return tuple(_violations(self))

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def require_valid(self) -> None:
        if self.violations:
            raise InvalidNilsemigroup(self.violations)

    @cached_property
    def key(self) -> str:
        return json.dumps(to_json(self), separators=(",", ":"))

    @cached_property
    def outer_betti_elements(self) -> tuple["OuterBetti", ...]:
        return tuple(_outer_bettis(self))

    @cached_property
    def betti_inequality_rows(self) -> tuple[tuple[IntVec, IntVec, IntVec], ...]:
        out = []
        for b in outer_bettis(self):
            a = min(self.fact_sets[b.residue])
            for z in b.members:
                out.append((z, a, primitive(x - y for x, y in zip(z, a))))
        return tuple(out)

    def permute_atoms(self, order: Sequence[int]) -> "ModularNilsemigroup":
        """Relabel so the new ``j``-th atom is the old ``order[j]``-th."""
        atoms = tuple(self.atoms[j] for j in order)
        sets = tuple(frozenset(tuple(z[j] for j in order) for z in zs) for zs in self.fact_sets)
        return ModularNilsemigroup(self.m, atoms, sets)


def _violations(n: ModularNilsemigroup) -> list[str]:
    out: list[str] = []
    m, k = n.m, n.k
    if m < 2:
        return [f"modulus {m} < 2"]
    if len(n.fact_sets) != m:
        return [f"expected {m} residues, got {len(n.fact_sets)}"]
    if len(set(n.atoms)) != k or any(a % m == 0 for a in n.atoms):
        out.append(f"atoms {n.atoms} must be distinct nonzero residues")
    g = m
    for a in n.atoms:
        g = gcd(g, a)
    if g != 1:
        out.append(f"gcd of atoms {n.atoms} with {m} is {g}, not 1")
    zero = (0,) * k
    if n.fact_sets[0] != frozenset((zero,)):
        out.append(f"Z(0) must be {{{zero}}}, got {sorted(n.fact_sets[0])}")
    for i, zs in enumerate(n.fact_sets):
        if not zs:
            out.append(f"residue {i} has no factorization")
        for z in zs:
            if len(z) != k or any(c < 0 for c in z):
                out.append(f"bad factorization {z} at residue {i}")
                continue
            if n.residue(z) != i:
                out.append(f"factorization {z} has residue {n.residue(z)}, listed under {i}")
    if out:
        return out
    for j, a in enumerate(n.atoms):
        if n.fact_sets[a] != frozenset((unit(k, j),)):
            out.append(f"atom {a} must factor only as {unit(k, j)}, got {sorted(n.fact_sets[a])}")
    elements = n.elements
    for i, zs in enumerate(n.fact_sets):
        for z in zs:
            for j, c in enumerate(z):
                if c and z[:j] + (c - 1,) + z[j + 1:] not in elements:
                    out.append(f"closure: {z} in Z({i}) but {z} - e_{j} is not a factorization")
    # i + p_j is well defined: adding e_j keeps all of Z(i) inside or all outside
    for i, zs in enumerate(n.fact_sets):
        for j in range(k):
            inside = {z[:j] + (z[j] + 1,) + z[j + 1:] in elements for z in zs}
            if len(inside) > 1:
                out.append(f"sum {i} + {n.atoms[j]} is ambiguous: some factorizations of {i} "
                           f"extend by e_{j} and others do not")
    return out


def validate(n: ModularNilsemigroup) -> list[str]:
    """All violated axioms, one message each; empty when ``n`` is valid."""
    return list(n.violations)


def is_staircase(n: ModularNilsemigroup) -> bool:
    return all(len(zs) == 1 for zs in n.fact_sets)


def _components(zs: Iterable[IntVec]) -> list[list[IntVec]]:
    """Connected components of the shared-support graph, each sorted, in sorted order."""
    remaining = sorted(zs)
    comps = []
    while remaining:
        comp = [remaining.pop(0)]
        supp = set(support(comp[0]))
        grew = True
        while grew:
            grew = False
            for z in list(remaining):
                if supp & support(z):
                    remaining.remove(z)
                    comp.append(z)
                    supp |= support(z)
                    grew = True
        comps.append(sorted(comp))
    return sorted(comps)


@dataclass(frozen=True)
class OuterBetti:
    members: tuple[IntVec, ...]
    residue: int

    @property
    def support(self) -> frozenset[int]:
        return frozenset().union(*(support(z) for z in self.members))


def minimal_nil_factorizations(n: ModularNilsemigroup) -> set[IntVec]:
    """Minimal factorizations of nil: outside every Z(i), all one-step predecessors inside."""
    elements = n.elements
    out = set()
    for w in elements:
        for j in range(n.k):
            z = w[:j] + (w[j] + 1,) + w[j + 1:]
            if z in elements or z in out:
                continue
            if all(z[:i] + (c - 1,) + z[i + 1:] in elements for i, c in enumerate(z) if c):
                out.add(z)
    return out


def outer_bettis(n: ModularNilsemigroup) -> list[OuterBetti]:
    n.require_valid()
    return list(n.outer_betti_elements)


def _outer_bettis(n: ModularNilsemigroup) -> list[OuterBetti]:
    by_res: dict[int, list[IntVec]] = {}
    for z in minimal_nil_factorizations(n):
        by_res.setdefault(n.residue(z), []).append(z)
    out = []
    for res in sorted(by_res):
        for comp in _components(by_res[res]):
            members = set(comp)
            ok = True
            for z in comp:
                for i in support(z):
                    below = n.fact_sets[(res - n.atoms[i]) % n.m]
                    if any(w[:i] + (w[i] + 1,) + w[i + 1:] not in members for w in below):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.append(OuterBetti(tuple(comp), res))
    return sorted(out, key=lambda b: b.members)


def minimal_presentation(n: ModularNilsemigroup) -> list[Trade]:
    """One trade per extra component of each factorization graph."""
    n.require_valid()
    trades = []
    for zs in n.fact_sets:
        if len(zs) > 1:
            comps = _components(zs)
            trades.extend((comps[0][0], c[0]) for c in comps[1:])
    return trades


def eta(n: ModularNilsemigroup) -> int:
    """Minimal presentation cardinality of any numerical semigroup with Kunz nilsemigroup ``n``."""
    return len(minimal_presentation(n)) + len(outer_bettis(n))


def inner_betti_elements(n: ModularNilsemigroup) -> list[int]:
    """Residues whose factorization graph is disconnected."""
    return [i for i, zs in enumerate(n.fact_sets) if len(zs) > 1 and len(_components(zs)) > 1]


def betti_equations(n: ModularNilsemigroup) -> list[IntVec]:
    rows = []
    for zs in n.fact_sets:
        if len(zs) > 1:
            first, *rest = sorted(zs)
            rows.extend(tuple(a - b for a, b in zip(first, c)) for c in rest)
    return independent_subset(rows)


def betti_inequalities(n: ModularNilsemigroup) -> list[tuple[IntVec, IntVec, IntVec]]:
    """``(z, a, normal)`` per outer Betti factorization ``z``; ``normal = primitive(z - a)``.

    ``a`` is the lexicographically least factorization of the residue of ``z``
    (any choice agrees modulo the Betti equalities).
    """
    return list(n.betti_inequality_rows)


def betti_cone(n: ModularNilsemigroup) -> ConeH:
    """Betti equalities and inequalities of ``n`` together with ``x >= 0``."""
    k = n.k
    hs = [normal for _, _, normal in betti_inequalities(n)]
    hs += [unit(k, j) for j in range(k)]
    return ConeH.make(k, betti_equations(n), hs)


def is_kunz(n: ModularNilsemigroup) -> bool:
    """Some point of the Betti cone satisfies every Betti inequality strictly."""
    cone = betti_cone(n)
    rays = double_description(cone)
    return all(any(dot(normal, r) > 0 for r in rays) for _, _, normal in betti_inequalities(n))


def is_refinement(n: ModularNilsemigroup, coarse: ModularNilsemigroup) -> bool:
    """True iff ``Z_coarse(i)`` is contained in ``Z_n(i)`` for every residue."""
    if n.m != coarse.m or n.atoms != coarse.atoms:
        raise ValueError("refinement needs the same modulus and atom list")
    return all(c <= f for f, c in zip(n.fact_sets, coarse.fact_sets))


def canonical_key(n: ModularNilsemigroup) -> str:
    return n.key


def to_json(n: ModularNilsemigroup) -> dict:
    return {
        "m": n.m,
        "atoms": list(n.atoms),
        "factorizations": {str(i): [list(z) for z in sorted(zs)]
                           for i, zs in enumerate(n.fact_sets) if zs},
    }


def from_json(data: Mapping) -> ModularNilsemigroup:
    try:
        m = int(data["m"])
        atoms = [int(a) for a in data["atoms"]]
        facts = {int(r): zs for r, zs in data["factorizations"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed nilsemigroup JSON: {exc}") from exc
    return ModularNilsemigroup.from_factorizations(m, atoms, facts)


def dumps(n: ModularNilsemigroup) -> str:
    return json.dumps(to_json(n), indent=1)


def loads(text: str) -> ModularNilsemigroup:
    return from_json(json.loads(text))

