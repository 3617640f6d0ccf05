"""Circle of lights: minimal coordinate sums over ``Z_m`` and their factorizations."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Sequence

from .geometry import RationalPoint, dot, double_description
from .nilsemigroup import (
    ModularNilsemigroup,
    betti_cone,
    betti_equations,
    betti_inequalities,
    is_kunz,
    unit,
)


@dataclass(frozen=True)
class LightsResult:
    y: RationalPoint  # y[i - 1] is the minimum for residue i
    nilsemigroup: ModularNilsemigroup
    kunz_subgroup: frozenset[int]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _check_atoms(m: int, atoms: Sequence[int]) -> None:
    if m < 2:
        raise ValueError(f"modulus must be at least 2, got {m}")
    if len(set(a % m for a in atoms)) != len(atoms) or any(a % m == 0 for a in atoms):
        raise ValueError(f"atoms {list(atoms)} must be distinct nonzero residues mod {m}")
    if reduce(gcd, atoms, m) != 1:
        raise ValueError(f"gcd of atoms {list(atoms)} and {m} must be 1")


def shortest_paths(m: int, atoms: Sequence[int], weights: Sequence[int]
                   ) -> tuple[list[int], list[frozenset]]:
    """Integer-weight core: distances from 0 and every optimal exponent vector.

    Arcs ``i -> i + atoms[j]`` carry weight ``weights[j] > 0``.
    """
    k = len(atoms)
    dist: list[int | None] = [None] * m
    heap = [(0, 0)]
    best = [None] * m
    best[0] = 0
    while heap:
        d, i = heapq.heappop(heap)
        if dist[i] is not None:
            continue
        dist[i] = d
        for a, w in zip(atoms, weights):
            j = (i + a) % m
            nd = d + w
            if dist[j] is None and (best[j] is None or nd < best[j]):
                best[j] = nd
                heapq.heappush(heap, (nd, j))
    facts: list[frozenset | None] = [None] * m
    facts[0] = frozenset(((0,) * k,))
    for i in sorted(range(1, m), key=lambda r: dist[r]):
        zs = set()
        for j, (a, w) in enumerate(zip(atoms, weights)):
            src = (i - a) % m
            if dist[src] + w == dist[i]:
                zs.update(z[:j] + (z[j] + 1,) + z[j + 1:] for z in facts[src])
        facts[i] = frozenset(zs)
    return dist, facts


def circle_of_lights(m: int, atoms: Sequence[int], x: Sequence) -> LightsResult:
    """Evaluate ``y_i = min{c.x : c.atoms = i mod m}`` and collect the minimizers."""
    atoms = tuple(int(a) % m for a in atoms)
    _check_atoms(m, atoms)
    x = [Fraction(v) for v in x]
    if len(x) != len(atoms):
        raise ValueError("point and atom list have different lengths")
    if any(v <= 0 for v in x):
        raise ValueError(f"coordinates must be strictly positive, got {x}")
    den = reduce(_lcm, (v.denominator for v in x), 1)
    weights = [int(v * den) for v in x]
    dist, facts = shortest_paths(m, atoms, weights)
    y = tuple(Fraction(dist[i], den) for i in range(1, m))
    n = ModularNilsemigroup(m, atoms, tuple(facts))
    return LightsResult(y, n, frozenset((0,)))


def brute_force_lights(m: int, atoms: Sequence[int], x: Sequence) -> tuple[RationalPoint, list[frozenset]]:
    """Exhaustive minimisation over ``c`` in ``[0, m-1]^k``; test oracle."""
    from itertools import product

    x = [Fraction(v) for v in x]
    best: list = [None] * m
    facts: list[set] = [set() for _ in range(m)]
    for c in product(range(m), repeat=len(atoms)):
        r = dot(c, atoms) % m
        v = dot(c, x)
        if best[r] is None or v < best[r]:
            best[r] = v
            facts[r] = {c}
        elif v == best[r]:
            facts[r].add(c)
    return tuple(best[1:]), [frozenset(f) for f in facts]


def kunz_nilsemigroup_at(m: int, atoms: Sequence[int], x: Sequence
                         ) -> tuple[ModularNilsemigroup, tuple[int, ...]]:
    """Kunz nilsemigroup of the face containing ``q(x)``, over its true atoms.

    Coordinates of ``x`` belonging to residues that are not atoms at ``x``
    are dropped; returns the nilsemigroup and the kept indices.
    """
    keep = tuple(range(len(atoms)))
    while True:
        res = circle_of_lights(m, [atoms[j] for j in keep], [x[j] for j in keep])
        n = res.nilsemigroup
        drop = [j for j, a in zip(keep, n.atoms)
                if n.fact_sets[a] != frozenset((unit(n.k, keep.index(j)),))]
        if not drop:
            return n, keep
        keep = tuple(j for j in keep if j != drop[-1])


def apery_of_generators(gens: Sequence[int]) -> tuple[tuple[int, ...], ModularNilsemigroup]:
    """Apéry point ``(a_1, ..., a_{m-1})`` of ``<gens>`` w.r.t. its smallest generator, and its Kunz nilsemigroup."""
    gens = sorted({int(g) for g in gens})
    if not gens or gens[0] <= 0:
        raise ValueError("generators must be positive integers")
    if reduce(gcd, gens) != 1:
        raise ValueError(f"generators {gens} have gcd {reduce(gcd, gens)} != 1")
    m = gens[0]
    if m == 1:
        raise ValueError("multiplicity 1 gives the trivial semigroup")
    by_res: dict[int, int] = {}
    for g in gens[1:]:
        if g % m and g % m not in by_res:
            by_res[g % m] = g  # gens are sorted, so the smaller one wins
    atoms = sorted(by_res)
    x = [by_res[a] for a in atoms]
    n, keep = kunz_nilsemigroup_at(m, atoms, x)
    res = circle_of_lights(m, n.atoms, [x[j] for j in keep])
    point = tuple(int(v) for v in res.y)
    return point, n


def _apery_ok(n: ModularNilsemigroup, x: Sequence[int], eqs, ineqs) -> bool:
    return (all(dot(e, x) == 0 for e in eqs)
            and all(dot(h, x) > 0 for h in ineqs))


def find_semigroup_in_chamber(n: ModularNilsemigroup, bound: int) -> tuple[int, ...] | None:
    """An Apéry point ``y`` with ``max(y) <= bound`` in the relative interior of the face of ``n``.

    The point returned belongs to a numerical semigroup of multiplicity
    ``m``, so every coordinate exceeds ``m``.  Scaled copies of an interior
    point are tried first; if none fits, the box is searched exhaustively,
    so ``None`` means no such point exists within ``bound``.
    """
    n.require_valid()
    if not is_kunz(n):
        raise ValueError("nilsemigroup is not Kunz")
    m, k = n.m, n.k
    eqs = betti_equations(n)
    ineqs = [normal for _, _, normal in betti_inequalities(n)]
    lin = [min(zs) for zs in n.fact_sets[1:]]

    def lift(x):
        return tuple(dot(z, x) for z in lin)

    rays = double_description(betti_cone(n))
    interior = [sum(r[j] for r in rays) for j in range(k)]
    t = 1
    while True:
        x = [t * m * v + (p - t * m * v) % m for v, p in zip(interior, n.atoms)]
        x = [v + m if v <= m else v for v in x]
        y = lift(x)
        if max(y) > bound:
            break
        if _apery_ok(n, x, eqs, ineqs):
            return y
        t += 1

    from itertools import product

    ranges = [range(p + m * ((m - p) // m + 1), bound + 1, m) for p in n.atoms]
    best = None
    for x in product(*ranges):
        if _apery_ok(n, x, eqs, ineqs):
            y = lift(x)
            if max(y) <= bound and (best is None or (max(y), y) < (max(best), best)):
                best = y
    return best
