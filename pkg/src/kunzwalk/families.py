"""Two-atom staircase shapes and the cup-poset family."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from math import gcd
from typing import Sequence, Union

from .geometry import (
    ConeH,
    IntVec,
    dot,
    double_description,
    integer_kernel_generator,
    irredundant_hdescription,
    nullspace,
    primitive,
    rank,
)
from .lights import kunz_nilsemigroup_at
from .nilsemigroup import ModularNilsemigroup, betti_cone, is_staircase, outer_bettis, unit


class NoFilling(ValueError):
    pass


@dataclass(frozen=True)
class Diamond:
    a: int
    c: int

    @property
    def m(self) -> int:
        return self.a * self.c

    def swapped(self) -> "Diamond":
        return Diamond(self.c, self.a)


@dataclass(frozen=True)
class Vee:
    a: int
    b: int
    c: int
    d: int

    @property
    def m(self) -> int:
        return (self.a + self.b) * (self.c + self.d) - self.b * self.d

    def swapped(self) -> "Vee":
        return Vee(self.c, self.d, self.a, self.b)

    def astuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


Shape = Union[Diamond, Vee]


def canonical_shape(s: Shape) -> Shape:
    """Representative of ``s`` up to swapping the two atoms."""
    t = s.swapped()
    key = (lambda v: (v.a, v.c)) if isinstance(s, Diamond) else Vee.astuple
    return min(s, t, key=key)


def _require_two_atom_staircase(n: ModularNilsemigroup) -> None:
    if n.k != 2 or not is_staircase(n):
        raise ValueError("shapes are defined for staircase nilsemigroups with two atoms")


def shape_of(n: ModularNilsemigroup) -> Shape:
    """Diamond or V shape, read in the atom order of ``n``."""
    _require_two_atom_staircase(n)
    bettis = [b.members[0] for b in outer_bettis(n)]
    pure1 = [z for z in bettis if z[1] == 0]
    pure2 = [z for z in bettis if z[0] == 0]
    mixed = [z for z in bettis if z[0] and z[1]]
    if len(pure1) != 1 or len(pure2) != 1 or len(mixed) > 1:
        raise ValueError(f"unexpected outer Betti elements {bettis}")
    (u, _), (_, v) = pure1[0], pure2[0]
    if not mixed:
        return Diamond(u, v)
    a, c = mixed[0]
    return Vee(a, u - a, c, v - c)


def vee_exists(a: int, b: int, c: int, d: int) -> bool:
    return gcd(gcd(a, b), gcd(c, d)) == 1


def vee_conditions(s: Vee, p1: int, p2: int) -> bool:
    """The four filling congruences for a V shape."""
    a, b, c, d = s.astuple()
    m = s.m
    return ((a + b) * p1 % m == d * p2 % m
            and (c + d) * p2 % m == b * p1 % m
            and (a * p1 + c * p2) % m == 0
            and gcd(gcd(p1, p2), m) == 1)


def vee_filling(a: int, b: int, c: int, d: int) -> tuple[int, int, int]:
    """``(m, p1, p2)`` filling the V shape ``(a, b, c, d)``, from a kernel generator."""
    if min(a, b, c, d) < 1:
        raise ValueError("V shape entries must be positive")
    if not vee_exists(a, b, c, d):
        raise NoFilling(f"gcd({a},{b},{c},{d}) > 1, so no filling exists")
    s = Vee(a, b, c, d)
    m = s.m
    _, (p1, p2) = integer_kernel_generator([[a + b, -d], [a, c]], m)
    if not vee_conditions(s, p1, p2):
        raise AssertionError(f"kernel generator ({p1},{p2}) does not fill {s}")
    return m, p1, p2


def shape_cells(s: Shape) -> list[IntVec]:
    if isinstance(s, Diamond):
        return [(i, j) for i in range(s.a) for j in range(s.c)]
    a, b, c, d = s.astuple()
    return [(i, j) for i in range(a + b) for j in range(c + d) if i < a or j < c]


def fill_shape(s: Shape, p1: int, p2: int) -> ModularNilsemigroup | None:
    """Staircase obtained by writing ``i p1 + j p2`` into cell ``(i, j)``; None unless valid with this shape."""
    m = s.m
    facts: list = [None] * m
    for cell in shape_cells(s):
        r = (cell[0] * p1 + cell[1] * p2) % m
        if facts[r] is not None:
            return None
        facts[r] = cell
    if p1 % m == 0 or p2 % m == 0 or p1 % m == p2 % m:
        return None
    n = ModularNilsemigroup.staircase(m, (p1 % m, p2 % m), facts)
    if not n.is_valid or shape_of(n) != s:
        return None
    return n


def diamond_fills(s: Diamond, p1: int, p2: int) -> bool:
    """Printed criterion: ``p2`` has order ``c`` and ``p1`` generates ``Z_m/<a>``."""
    m = s.m
    return m // gcd(p2, m) == s.c and gcd(p1, s.a) == 1


def _diamond_k(n: ModularNilsemigroup, s: Diamond) -> int | None:
    """``k`` with ``Z(a p1) = {(0, k)}`` when ``p2`` has order ``c``; None otherwise."""
    m = n.m
    p1, p2 = n.atoms
    if m // gcd(p2, m) != s.c:
        return None
    (z,) = n.fact_sets[s.a * p1 % m]
    return z[1]


def shape_rays(s: Shape, k: int = 0) -> tuple[IntVec, ...]:
    """The two rays of the chamber of a shape.

    For a diamond whose second atom has order ``c``, ``k`` is given by
    ``Z(a p1) = {(0, k)}``; the cone is ``a x1 >= k x2, x2 >= 0``.
    """
    if isinstance(s, Diamond):
        if k < 0:
            raise ValueError("k must be nonnegative")
        return tuple(sorted({(1, 0), primitive((k, s.a))}))
    a, b, c, d = s.astuple()
    return tuple(sorted({primitive((d, a + b)), primitive((c + d, b))}))


def chamber_shape_rays(n: ModularNilsemigroup) -> tuple[IntVec, ...]:
    """Predicted rays of ``F_N`` in the atom order of ``n``."""
    s = shape_of(n)
    if isinstance(s, Vee):
        return shape_rays(s)
    k = _diamond_k(n, s)
    if k is not None:
        return shape_rays(s, k)
    swapped = n.permute_atoms((1, 0))
    k = _diamond_k(swapped, s.swapped())
    if k is None:
        raise AssertionError(f"neither atom has the column order in {n.key}")
    return tuple(sorted((r[1], r[0]) for r in shape_rays(s.swapped(), k)))


def lift(n: ModularNilsemigroup, x: Sequence) -> tuple:
    """Kunz coordinates ``(z_1.x, ..., z_{m-1}.x)`` using the least factorization of each residue."""
    return tuple(dot(min(zs), x) for zs in n.fact_sets[1:])


def lift_rays(n: ModularNilsemigroup, rays: Sequence[IntVec] | None = None) -> list[IntVec]:
    """Rays of the face of ``C_m`` over a V-shaped chamber."""
    if not isinstance(shape_of(n), Vee):
        raise ValueError("ray lifting is implemented for V shapes only")
    if rays is None:
        rays = shape_rays(shape_of(n))
    return [primitive(lift(n, r)) for r in rays]


def kunz_face_cone(n: ModularNilsemigroup) -> ConeH:
    """The face of ``C_m`` labelled by ``n``, as a cone in ``R^{m-1}``.

    ``y_i + y_j >= y_{i+j}`` for all ``i, j`` with ``i + j != 0``, with equality
    where ``n`` has ``i + j`` non-nil.  Independent of the projection.
    """
    m = n.m
    dim = m - 1
    eqs, hs = [], []
    for i in range(1, m):
        for j in range(i, m):
            s = (i + j) % m
            if s == 0:
                continue
            row = [0] * dim
            row[i - 1] += 1
            row[j - 1] += 1
            row[s - 1] -= 1
            summed = any(tuple(a + b for a, b in zip(zi, zj)) in n.fact_sets[s]
                         for zi in n.fact_sets[i] for zj in n.fact_sets[j])
            (eqs if summed else hs).append(row)
    return ConeH.make(dim, eqs, hs)


# cup posets

@dataclass(frozen=True)
class CupSpec:
    d: int

    def __post_init__(self):
        if self.d < 3:
            raise ValueError(f"cup posets need d >= 3, got {self.d}")

    @property
    def m(self) -> int:
        return 3 * (self.d - 1)

    @property
    def atoms(self) -> tuple[int, ...]:
        m, d = self.m, self.d
        return (1,) + tuple(range(d, m - d + 1)) + (m - 1,)


def cup_poset(spec: CupSpec) -> ModularNilsemigroup:
    """Staircase with chains ``1 < 2 < ... < d-1`` and ``m-1 < m-2 < ... < m-(d-1)``."""
    m, d, atoms = spec.m, spec.d, spec.atoms
    k = len(atoms)
    facts: list = [None] * m
    facts[0] = (0,) * k
    for j, a in enumerate(atoms):
        facts[a] = unit(k, j)
    for t in range(2, d):
        facts[t] = tuple(t * (j == 0) for j in range(k))
        facts[m - t] = tuple(t * (j == k - 1) for j in range(k))
    return ModularNilsemigroup.staircase(m, atoms, facts)


def _cup_rows(spec: CupSpec) -> tuple[list[IntVec], list[IntVec]]:
    """Left and right columns of the cup inequality system, in atom coordinates."""
    d = spec.d
    k = d  # coordinates x_1..x_d: atoms 1, d, ..., m-d, m-1

    def vec(pairs):
        v = [0] * k
        for idx, c in pairs:
            v[idx] += c
        return tuple(v)

    left = [vec([(0, d), (1, -1)])]
    right = [vec([(0, -(d - 1)), (1, 1), (k - 1, 1)])]
    for t in range(1, d - 2):
        left.append(vec([(0, 1), (t, 1), (t + 1, -1)]))
        right.append(vec([(t, -1), (t + 1, 1), (k - 1, 1)]))
    left.append(vec([(0, 1), (d - 2, 1), (k - 1, -(d - 1))]))
    right.append(vec([(d - 2, -1), (k - 1, d)]))
    return left, right


def cup_hdescription(spec: CupSpec) -> ConeH:
    left, right = _cup_rows(spec)
    return ConeH.make(spec.d, (), left + right)


def cup_cube_check(spec: CupSpec) -> tuple[list[IntVec], bool]:
    """``H = (H1; e_1 + e_d)`` and whether it carries the cup cone onto the cube cone."""
    d = spec.d
    left, right = _cup_rows(spec)
    j = tuple(int(i in (0, d - 1)) for i in range(d))
    h = left + [j]
    if rank(h) != d:
        return h, False
    ok = all(tuple(a + b for a, b in zip(l, r)) == j for l, r in zip(left, right))
    # [[I, 0], [-I, 1]] H has rows H1 and j - H1
    cube_rows = left + [tuple(jj - x for jj, x in zip(j, l)) for l in left]
    ok = ok and cube_rows == left + right
    same = irredundant_hdescription(betti_cone(cup_poset(spec))) == cup_hdescription(spec)
    return h, ok and same


def mountain_ray(spec: CupSpec, choices: Sequence[int]) -> IntVec:
    """Ray of the cup cone tight on the left (0) or right (1) inequality of each opposite pair."""
    d = spec.d
    if len(choices) != d - 1 or any(c not in (0, 1) for c in choices):
        raise ValueError(f"need {d - 1} binary choices, got {list(choices)}")
    left, right = _cup_rows(spec)
    rows = [right[i] if c else left[i] for i, c in enumerate(choices)]
    (v,) = nullspace(rows, d)
    if any(x < 0 for x in v):
        v = tuple(-x for x in v)
    return primitive(v)


def mountain_range_poset(spec: CupSpec, choices: Sequence[int]) -> ModularNilsemigroup:
    """Kunz nilsemigroup (over its own atoms) of the ray picked by ``choices``."""
    ray = mountain_ray(spec, choices)
    n, _ = kunz_nilsemigroup_at(spec.m, spec.atoms, ray)
    return n


def precedes(n: ModularNilsemigroup, i: int, j: int) -> bool:
    """``i`` divides ``j`` in ``n``: some ``z in Z(i)``, ``w in Z(j - i)`` with ``z + w in Z(j)``."""
    m = n.m
    t = (j - i) % m
    return any(tuple(a + b for a, b in zip(z, w)) in n.fact_sets[j % m]
               for z in n.fact_sets[i % m] for w in n.fact_sets[t])


def mountain_relations(spec: CupSpec, n: ModularNilsemigroup) -> list[int]:
    """For ``i = d-1..2d-3``: 0 if ``i < i+1`` in ``n``, 1 if ``i+1 < i``; -1 if neither."""
    out = []
    for i in range(spec.d - 1, 2 * spec.d - 2):
        if precedes(n, i, i + 1):
            out.append(0)
        elif precedes(n, i + 1, i):
            out.append(1)
        else:
            out.append(-1)
    return out


def all_choices(spec: CupSpec):
    return product((0, 1), repeat=spec.d - 1)


def cup_rays(spec: CupSpec) -> tuple[IntVec, ...]:
    return double_description(betti_cone(cup_poset(spec)))


def gcd_all(values: Sequence[int]) -> int:
    return reduce(gcd, values, 0)
