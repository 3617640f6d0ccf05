"""Exact integer cone arithmetic.

Cones are stored by their H-description ``{x : E x = 0, H x >= 0}`` with
integer rows.  Everything here is exact: integer arithmetic where possible,
:class:`fractions.Fraction` where a division cannot be avoided.  The double
description routine is the single source of geometric truth for the rest of
the package (dimensions, facets, interior points, equality of cones).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from operator import mul
from typing import Iterable, Sequence

IntVec = tuple[int, ...]
RationalPoint = tuple[Fraction, ...]


class GeometryError(ValueError):
    pass


class NonPointedCone(GeometryError):
    """Raised when a cone contains a line; ``line`` spans it."""

    def __init__(self, line: IntVec):
        super().__init__(f"cone is not pointed: contains the line spanned by {line}")
        self.line = line


def dot(a: Sequence, b: Sequence):
    return sum(map(mul, a, b))


def primitive(v: Iterable[int], equation: bool = False) -> IntVec:
    """Divide ``v`` by the gcd of its entries.

    Halfspace normals keep their orientation.  With ``equation=True`` the sign
    is normalised so the first nonzero entry is positive.
    """
    v = tuple(map(int, v))
    g = gcd(*v)
    if g == 0:
        raise GeometryError("zero vector has no primitive form")
    if equation and next(x for x in v if x) < 0:
        g = -g
    return tuple(x // g for x in v)


def primitive_rational(v: Iterable[Fraction]) -> IntVec:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    v = [Fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
    return primitive(int(x * den) for x in v)


def rank(rows: Iterable[Sequence[int]]) -> int:
    """Rank over Q by fraction-free elimination."""
    mat = [list(r) for r in rows if any(r)]
    if not mat:
        return 0
    ncols = len(mat[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        p = mat[r]
        pc = p[col]
        for i in range(r + 1, len(mat)):
            f = mat[i][col]
            if f:
                row = [pc * a - f * b for a, b in zip(mat[i], p)]
                g = reduce(gcd, row, 0)
                mat[i] = [a // g for a in row] if g > 1 else row
        r += 1
        if r == len(mat):
            break
    return r


def independent_subset(rows: Iterable[Sequence[int]]) -> list[IntVec]:
    """Greedy maximal linearly independent subset, in input order."""
    kept: list[IntVec] = []
    for row in rows:
        row = tuple(row)
        if any(row) and rank(kept + [row]) > len(kept):
            kept.append(row)
    return kept


def _rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    mat = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][col]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def nullspace(rows: Sequence[Sequence[int]], n: int) -> list[IntVec]:
    """Integer basis (primitive vectors) of ``{x in Q^n : rows x = 0}``."""
    if not rows:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    red, pivots = _rref(rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(primitive_rational(v))
    return basis


def _inverse_columns(mat: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Columns of the inverse of a square nonsingular integer matrix."""
    n = len(mat)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(mat)]
    red, _ = _rref(aug, n)
    return [[red[i][n + j] for i in range(n)] for j in range(n)]


@dataclass(frozen=True)
class ConeH:
    """``{x in R^dim : e.x = 0 for e in equations, h.x >= 0 for h in halfspaces}``.

    Rows are reduced to primitive form, deduplicated and sorted on
    construction via :meth:`make`; the raw constructor trusts its input.
    """

    dim: int
    equations: tuple[IntVec, ...] = ()
    halfspaces: tuple[IntVec, ...] = ()

    @classmethod
    def make(cls, dim: int, equations: Iterable[Sequence[int]] = (),
             halfspaces: Iterable[Sequence[int]] = ()) -> "ConeH":
        eqs = {primitive(e, equation=True) for e in equations if any(e)}
        hs = {primitive(h) for h in halfspaces if any(h)}
        for v in eqs | hs:
            if len(v) != dim:
                raise GeometryError(f"vector {v} does not have length {dim}")
        return cls(dim, tuple(sorted(eqs)), tuple(sorted(hs)))

    @classmethod
    def orthant(cls, dim: int) -> "ConeH":
        return cls.make(dim, (), [tuple(int(i == j) for j in range(dim)) for i in range(dim)])

    def intersect(self, other: "ConeH") -> "ConeH":
        if self.dim != other.dim:
            raise GeometryError("dimension mismatch")
        return ConeH.make(self.dim, self.equations + other.equations,
                          self.halfspaces + other.halfspaces)


def _subspace_basis(cone: ConeH) -> list[IntVec]:
    if not cone.equations:
        n = cone.dim
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return nullspace(cone.equations, cone.dim)


def _dd_core(rows: list[IntVec], r: int) -> list[IntVec]:
    """Extreme rays of the pointed cone ``{t in R^r : rows t >= 0}``.

    Incremental double description with the combinatorial adjacency test.
    """
    init: list[int] = []
    chosen: list[IntVec] = []
    where = {h: idx for idx, h in enumerate(rows)}
    units = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    if all(u in where for u in units):
        # the orthant is among the rows: start from it and skip the inverse
        init = [where[u] for u in units]
        masks = [sum(1 << init[i] for i in range(r) if i != j) for j in range(r)]
        return _dd_extend(rows, r, units, masks, set(init))
    for idx, h in enumerate(rows):
        if rank(chosen + [h]) > len(chosen):
            chosen.append(h)
            init.append(idx)
            if len(chosen) == r:
                break
    if len(chosen) < r:
        line = nullspace(rows, r)[0] if rows else tuple(int(j == 0) for j in range(r))
        raise NonPointedCone(line)

    rays: list[IntVec] = []
    masks: list[int] = []
    for j, col in enumerate(_inverse_columns(chosen)):
        rays.append(primitive_rational(col))
        masks.append(sum(1 << init[i] for i in range(r) if i != j))

    return _dd_extend(rows, r, rays, masks, set(init))


def _dd_extend(rows: list[IntVec], r: int, rays: list[IntVec], masks: list[int],
               init_set: set[int]) -> list[IntVec]:
    for idx, h in enumerate(rows):
        if idx in init_set:
            continue
        bit = 1 << idx
        vals = [dot(h, t) for t in rays]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if not neg:
            masks = [mk | bit if v == 0 else mk for mk, v in zip(masks, vals)]
            continue
        pos = [i for i, v in enumerate(vals) if v > 0]
        new_rays: list[IntVec] = []
        new_masks: list[int] = []
        for p in pos:
            mp = masks[p]
            for q in neg:
                common = mp & masks[q]
                if common.bit_count() < r - 2:
                    continue
                # adjacent iff only p and q are tight on all of ``common``
                hits = 0
                for mk in masks:
                    if mk & common == common:
                        hits += 1
                        if hits > 2:
                            break
                if hits > 2:
                    continue
                vp, vq = vals[p], -vals[q]
                ray = [vp * b + vq * a for a, b in zip(rays[p], rays[q])]
                g = gcd(*ray)
                new_rays.append(tuple(c // g for c in ray) if g > 1 else tuple(ray))
                new_masks.append(common | bit)
        keep = [i for i, v in enumerate(vals) if v >= 0]
        rays = [rays[i] for i in keep] + new_rays
        masks = [masks[i] | (bit if vals[i] == 0 else 0) for i in keep] + new_masks
    return rays


def double_description(cone: ConeH) -> tuple[IntVec, ...]:
    """Primitive extreme rays of a pointed cone, sorted lexicographically.

    Raises :class:`NonPointedCone` when the cone contains a line.
    """
    basis = _subspace_basis(cone)
    r = len(basis)
    if r == 0:
        return ()
    identity = not cone.equations
    if identity:
        rows = list(cone.halfspaces)
    else:
        seen: set[IntVec] = set()
        rows = []
        for h in cone.halfspaces:
            hp = tuple(dot(h, b) for b in basis)
            if any(hp):
                hp = primitive(hp)
                if hp not in seen:
                    seen.add(hp)
                    rows.append(hp)
    # sparse rows first keeps the intermediate ray sets small
    rows.sort(key=lambda h: (sum(1 for c in h if c), h))
    try:
        core = _dd_core(rows, r)
    except NonPointedCone as exc:
        if identity:
            raise
        line = primitive(sum(t * b[i] for t, b in zip(exc.line, basis)) for i in range(cone.dim))
        raise NonPointedCone(line) from None
    if identity:
        return tuple(sorted(core))
    out = {primitive(sum(t * b[i] for t, b in zip(ray, basis)) for i in range(cone.dim))
           for ray in core}
    return tuple(sorted(out))


def cone_dim(cone: ConeH) -> int:
    return rank(double_description(cone))


def facet_halfspaces(cone: ConeH, rays: Sequence[IntVec] | None = None
                     ) -> tuple[list[IntVec], list[IntVec]]:
    """Split the halfspaces of ``cone`` into (facet-defining, implicit equalities).

    A halfspace is facet-defining when the rays on which it is tight span a
    space of dimension one less than the cone.  Several halfspaces defining
    the same facet are reported once (the first in sorted order).
    """
    if rays is None:
        rays = double_description(cone)
    d = rank(rays)
    facets: list[IntVec] = []
    implicit: list[IntVec] = []
    seen: set[frozenset[int]] = set()
    for h in cone.halfspaces:
        tight = frozenset(i for i, r in enumerate(rays) if dot(h, r) == 0)
        if len(tight) == len(rays):
            implicit.append(h)
            continue
        if tight in seen:
            continue
        if rank([rays[i] for i in tight]) == d - 1:
            seen.add(tight)
            facets.append(h)
    return facets, implicit


def irredundant_hdescription(cone: ConeH) -> ConeH:
    """Subset of the rows of ``cone`` defining the same set, with no redundancy.

    Halfspaces that vanish on the whole cone are turned into equations.
    """
    rays = double_description(cone)
    facets, implicit = facet_halfspaces(cone, rays)
    eqs = independent_subset(list(cone.equations) + implicit)
    # sign-normalised equations; make() keeps facets in sorted order
    return ConeH.make(cone.dim, eqs, facets)


def strict_interior_point(cone: ConeH) -> RationalPoint | None:
    """A point satisfying every halfspace strictly, or ``None``.

    Built as the sum of the extreme rays; exists iff no halfspace vanishes on
    the whole cone.
    """
    rays = double_description(cone)
    point = tuple(Fraction(sum(r[i] for r in rays)) for i in range(cone.dim))
    for h in cone.halfspaces:
        if dot(h, point) <= 0:
            return None
    return point


def contains(cone: ConeH, point: Sequence) -> bool:
    if len(point) != cone.dim:
        raise GeometryError(f"point of length {len(point)} vs cone dimension {cone.dim}")
    point = [Fraction(x) for x in point]
    return (all(dot(e, point) == 0 for e in cone.equations)
            and all(dot(h, point) >= 0 for h in cone.halfspaces))


def cones_equal(a: ConeH, b: ConeH) -> bool:
    if a.dim != b.dim:
        raise GeometryError("dimension mismatch")
    ra, rb = double_description(a), double_description(b)
    return all(contains(b, r) for r in ra) and all(contains(a, r) for r in rb)


def smith_normal_form(mat: Sequence[Sequence[int]]
                      ) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return ``(D, U, V)`` with ``U @ mat @ V == D`` diagonal, ``U``/``V`` unimodular.

    Plain elementary-operation algorithm; intended for small matrices.
    """
    rows, cols = len(mat), len(mat[0])
    d = [list(r) for r in mat]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row_dst += f * row_src
        d[dst] = [a + f * b for a, b in zip(d[dst], d[src])]
        u[dst] = [a + f * b for a, b in zip(u[dst], u[src])]

    def add_col(src, dst, f):
        for row in d:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(rows, cols)):
        while True:
            entries = [(abs(d[i][j]), i, j) for i in range(t, rows)
                       for j in range(t, cols) if d[i][j]]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = d[t][t]
            done = True
            for i in range(t + 1, rows):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // p))
                    done = done and d[i][t] == 0
            for j in range(t + 1, cols):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // p))
                    done = done and d[t][j] == 0
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if d[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return d, u, v


def integer_kernel_generator(mat: Sequence[Sequence[int]], m: int) -> tuple[int, tuple[int, ...]]:
    """Kernel of ``mat`` acting on ``(Z/m)^n``.

    Returns ``(order, generator)`` where ``order`` is the largest order of a
    kernel element and ``generator`` is an element of that order, reduced
    mod ``m``.  When the kernel is cyclic this is its size and a generator.
    """
    if m < 2:
        raise GeometryError("modulus must be at least 2")
    d, _, v = smith_normal_form(mat)
    n = len(v)
    t = []
    order = 1
    for i in range(n):
        di = d[i][i] if i < len(d) else 0
        g = gcd(di, m)  # gcd(0, m) == m: free coordinate
        t.append(m // g)
        order = order * g // gcd(order, g)
    gen = tuple(sum(v[i][j] * t[j] for j in range(n)) % m for i in range(n))
    return order, gen


def kernel_size(mat: Sequence[Sequence[int]], m: int) -> int:
    """Number of elements of the kernel of ``mat`` on ``(Z/m)^n``."""
    d, _, v = smith_normal_form(mat)
    size = 1
    for i in range(len(v)):
        di = d[i][i] if i < len(d) else 0
        size *= gcd(di, m)
    return size
