"""Enumerate the chambers of a Kunz fan by walking across interior facets."""
from __future__ import annotations

import json
import random
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import (
    ConeH,
    IntVec,
    contains,
    dot,
    double_description,
    facet_halfspaces,
    rank,
)
from .lights import circle_of_lights
from .nilsemigroup import (
    ModularNilsemigroup,
    betti_cone,
    betti_inequalities,
    eta,
    from_json,
    inner_betti_elements,
    is_kunz,
    is_refinement,
    is_staircase,
    support,
    to_json,
    unit,
)


class InfeasibleAtomSet(RuntimeError):
    pass


class ClosureViolation(ValueError):
    """Cutting and pasting across a wall produced an invalid staircase."""


class InvariantViolation(AssertionError):
    """A combinatorial shortcut disagreed with the geometric computation."""


def _check_atoms(m: int, atoms: Sequence[int]) -> tuple[int, ...]:
    atoms = tuple(int(a) for a in atoms)
    if m < 2:
        raise ValueError(f"modulus must be at least 2, got {m}")
    if not atoms or any(not 0 < a < m for a in atoms) or len(set(atoms)) != len(atoms):
        raise ValueError(f"atoms {list(atoms)} must be distinct residues in 1..{m - 1}")
    g = m
    for a in atoms:
        g = gcd(g, a)
    if g != 1:
        raise ValueError(f"gcd of atoms {list(atoms)} and {m} is {g}, not 1")
    return atoms


def _zero_sum_free(m: int, atoms: Sequence[int], skip: int) -> list[IntVec]:
    """Vectors ``c`` with ``c[skip] = 0`` such that no nonzero ``d <= c`` has ``d.atoms = 0 mod m``."""
    k = len(atoms)
    zero = (0,) * k
    out = []
    frontier = {zero: frozenset()}  # vector -> residues of its nonzero subvectors
    while frontier:
        nxt = {}
        for c, subs in frontier.items():
            for j in range(k):
                if j == skip or any(c[j + 1:]):
                    continue  # extend in nondecreasing index order only
                w = c[:j] + (c[j] + 1,) + c[j + 1:]
                if w in nxt:
                    continue
                a = atoms[j] % m
                new = subs | {(s + a) % m for s in subs} | {a}
                if 0 in new:
                    continue
                nxt[w] = frozenset(new)
        out.extend(nxt)
        frontier = nxt
    return out


def c_of(m: int, atoms: Sequence[int]) -> ConeH:
    """Irredundant H-description of ``C(m;A)``.

    ``x_i <= c.x`` for ``c.A = p_i`` only needs ``c`` with ``c_i = 0`` and no
    zero-sum subvector; anything else follows from ``x >= 0``.
    """
    atoms = _check_atoms(m, atoms)
    k = len(atoms)
    hs = [unit(k, j) for j in range(k)]
    for i, p in enumerate(atoms):
        for c in _zero_sum_free(m, atoms, i):
            if dot(c, atoms) % m == p and c != unit(k, i):
                hs.append(tuple(cj - (j == i) for j, cj in enumerate(c)))
    cone = ConeH.make(k, (), hs)
    facets, implicit = facet_halfspaces(cone)
    return ConeH.make(k, implicit, facets)


@dataclass(frozen=True)
class FacetRecord:
    outer_betti: IntVec
    inner: IntVec | None  # None when the outer Betti factors 0
    normal: IntVec
    kind: str  # "boundary" | "interior"
    neighbor: str | None = None

    def to_json(self) -> dict:
        return {
            "outer_betti": list(self.outer_betti),
            "inner": None if self.inner is None else list(self.inner),
            "normal": list(self.normal),
            "kind": self.kind,
            "neighbor": self.neighbor,
        }


@dataclass(frozen=True)
class Chamber:
    nilsemigroup: ModularNilsemigroup
    cone: ConeH
    rays: tuple[IntVec, ...]
    facets: tuple[FacetRecord, ...]

    @property
    def key(self) -> str:
        return self.nilsemigroup.key

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "nilsemigroup": to_json(self.nilsemigroup),
            "facets": [f.to_json() for f in self.facets],
            "rays": [list(r) for r in self.rays],
        }


@dataclass
class FanGraph:
    m: int
    atoms: tuple[int, ...]
    chambers: dict[str, Chamber] = field(default_factory=dict)
    edges: dict[tuple[str, str], IntVec] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "atoms": list(self.atoms),
            "chambers": [self.chambers[key].to_json() for key in sorted(self.chambers)],
            "edges": [list(pair) for pair in sorted(self.edges)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def fan_from_json(data: dict) -> FanGraph:
    """Rebuild a FanGraph; cones are recomputed from the stored nilsemigroups."""
    g = FanGraph(int(data["m"]), tuple(data["atoms"]))
    for ch in data["chambers"]:
        n = from_json(ch["nilsemigroup"])
        cone = betti_cone(n)
        facets = tuple(FacetRecord(tuple(f["outer_betti"]),
                                   None if f["inner"] is None else tuple(f["inner"]),
                                   tuple(f["normal"]), f["kind"], f["neighbor"])
                       for f in ch["facets"])
        g.chambers[n.key] = Chamber(n, cone, tuple(tuple(r) for r in ch["rays"]), facets)
    for a, b in data["edges"]:
        g.edges[(a, b)] = next(f.normal for f in g.chambers[a].facets if f.neighbor == b)
    return g


def has_atom_set(n: ModularNilsemigroup) -> bool:
    """True iff every listed atom factors only as itself."""
    return all(n.fact_sets[a] == frozenset((unit(n.k, j),)) for j, a in enumerate(n.atoms))


def _rng(m: int, atoms: Sequence[int], seed: int) -> random.Random:
    return random.Random(repr((m, tuple(atoms), seed)))


def initial_chamber(m: int, atoms: Sequence[int], seed: int = 0, retries: int = 40) -> ModularNilsemigroup:
    """Staircase nilsemigroup of a chamber near the all-ones vector."""
    atoms = _check_atoms(m, atoms)
    k = len(atoms)
    rng = _rng(m, atoms, seed)
    eps = Fraction(1, m * m * k)
    for _ in range(retries):
        r = [Fraction(rng.randrange(1, 10 ** 6), 10 ** 6) for _ in range(k)]
        x = [1 + eps * v for v in r]
        n = circle_of_lights(m, atoms, x).nilsemigroup
        if is_staircase(n) and has_atom_set(n):
            return n
        eps /= 2
    raise InfeasibleAtomSet(f"no chamber found near the all-ones vector for m={m}, atoms={list(atoms)}")


def facet_is_boundary(n: ModularNilsemigroup, b: IntVec) -> bool:
    r = n.residue(b)
    return r == 0 or r in n.atoms


def cross_facet(n: ModularNilsemigroup, b: IntVec, a: IntVec) -> ModularNilsemigroup:
    """Cut and paste across the wall ``b.x = a.x``: ``a`` becomes nil and ``b`` takes its place."""
    if support(a) & support(b):
        raise InvariantViolation(f"trade {b} ~ {a} has overlapping support")
    facts = []
    for zs in n.fact_sets:
        (w,) = zs
        while all(wi >= ai for wi, ai in zip(w, a)):
            w = tuple(wi - ai + bi for wi, ai, bi in zip(w, a, b))
        facts.append(w)
    # residues are preserved by the trade, so only closure and atoms can break
    members = set(facts)
    for w in facts:
        for j, c in enumerate(w):
            if c and w[:j] + (c - 1,) + w[j + 1:] not in members:
                raise ClosureViolation(f"{w} is left dangling: {w} - e_{j} is nil after crossing")
    out = ModularNilsemigroup.staircase(n.m, n.atoms, facts)
    if not has_atom_set(out):
        raise ClosureViolation("crossing changed the atom set")
    return out


def _prop_b_irredundant(n: ModularNilsemigroup, b: IntVec) -> bool:
    """Factorization of 0: single support ``i`` and atoms distinct mod ``gcd(p_i, m)``."""
    supp = support(b)
    if len(supp) != 1:
        return False
    (i,) = supp
    d = gcd(n.atoms[i], n.m)
    return len({p % d for p in n.atoms}) == n.k


def build_chamber(n: ModularNilsemigroup, check: bool = True) -> Chamber:
    """Cone, rays and irredundant facets of a staircase Kunz nilsemigroup.

    The geometric facet test decides; the combinatorial criteria run as
    assertions when ``check`` is set.
    """
    if not is_staircase(n):
        raise ValueError("chambers are labelled by staircase nilsemigroups")
    n.require_valid()
    k = n.k
    ineqs = betti_inequalities(n)
    cone = betti_cone(n)
    rays = double_description(cone)
    if rank(rays) != k:
        raise InvariantViolation(f"chamber cone has dimension {rank(rays)} < {k}: {n.key}")
    if check and not all(any(dot(h, r) > 0 for r in rays) for _, _, h in ineqs):
        raise InvariantViolation(f"staircase nilsemigroup is not Kunz: {n.key}")

    # in a full-dimensional cone a halfspace cuts out a facet iff its tight
    # set is proper and maximal among the tight sets of all defining rows
    def tight_mask(h):
        return sum(1 << i for i, r in enumerate(rays) if dot(h, r) == 0)

    masks = [tight_mask(h) for _, _, h in ineqs]
    everything = (1 << len(rays)) - 1
    all_masks = set(masks) | {tight_mask(unit(k, j)) for j in range(k)}
    all_masks.discard(everything)

    def is_facet(mk):
        return mk != everything and not any(o != mk and o & mk == mk for o in all_masks)

    records = []
    seen_normals = set()
    for (b, a, h), mk in zip(ineqs, masks):
        facet = is_facet(mk)
        res = n.residue(b)
        full = len(support(b)) == k
        if check:
            if full and k > 1 and facet:
                raise InvariantViolation(f"full-support outer Betti {b} defines a facet of {n.key}")
            # only necessary: the criterion says x_i >= 0 is a facet of C(m;A),
            # which this chamber may meet in lower dimension
            if res == 0 and facet and not _prop_b_irredundant(n, b):
                raise InvariantViolation(f"zero-residue criterion disagrees for {b} in {n.key}")
        if not facet:
            continue
        crossed = None
        if res != 0 and res not in n.atoms:
            # the cut-and-paste test is necessary for irredundance, so it must pass here
            try:
                crossed = cross_facet(n, b, a)
            except ClosureViolation as exc:
                raise InvariantViolation(f"irredundant {b} fails the cut-and-paste test in {n.key}: {exc}")
        if h in seen_normals:
            raise InvariantViolation(f"two outer Bettis share the facet {h} in {n.key}")
        seen_normals.add(h)
        if res == 0:
            records.append(FacetRecord(b, None, h, "boundary"))
        elif res in n.atoms:
            records.append(FacetRecord(b, a, h, "boundary"))
        else:
            records.append(FacetRecord(b, a, h, "interior", crossed.key))
    if check and k == 3:
        supports = Counter(support(f.outer_betti) for f in records)
        if any(c > 1 for c in supports.values()):
            raise InvariantViolation(f"two irredundant outer Bettis share support in {n.key}")
    records.sort(key=lambda f: f.normal)
    return Chamber(n, cone, rays, tuple(records))


def cross_record(ch: Chamber, f: FacetRecord) -> ModularNilsemigroup:
    if f.kind != "interior":
        raise ValueError("boundary facets have no neighbor")
    return cross_facet(ch.nilsemigroup, f.outer_betti, f.inner)


def facet_point(ch: Chamber, f: FacetRecord) -> list[Fraction]:
    """A point in the relative interior of a facet: the mean of its tight rays."""
    tight = [r for r in ch.rays if dot(f.normal, r) == 0]
    return [Fraction(sum(r[j] for r in tight), len(tight)) for j in range(ch.nilsemigroup.k)]


def cross_check_numeric(ch: Chamber, f: FacetRecord, neighbor: ModularNilsemigroup,
                        max_halvings: int = 60) -> bool:
    """Step just past the wall and compare the circle-of-lights labelling with ``neighbor``.

    The step is halved until the staircase found there has the facet point
    in its closed cone; only the two chambers on either side of the wall do.
    """
    if f.kind != "interior":
        raise ValueError("numeric crossing needs an interior facet")
    n = ch.nilsemigroup
    p = facet_point(ch, f)
    eps = Fraction(max(abs(v) for v in p), 4 * max(abs(c) for c in f.normal))
    for _ in range(max_halvings):
        x = [pj - eps * hj for pj, hj in zip(p, f.normal)]
        if all(v > 0 for v in x):
            got = circle_of_lights(n.m, n.atoms, x).nilsemigroup
            if (is_staircase(got) and has_atom_set(got) and got.key != n.key
                    and contains(betti_cone(got), p)):
                return got.key == neighbor.key
        eps /= 2
    return False


def wall_nilsemigroup(ch: Chamber, f: FacetRecord) -> ModularNilsemigroup:
    """Kunz nilsemigroup in the relative interior of a facet of ``ch``."""
    n = ch.nilsemigroup
    return circle_of_lights(n.m, n.atoms, facet_point(ch, f)).nilsemigroup


def wall_trade_ok(ch: Chamber, f: FacetRecord) -> bool:
    """The wall has exactly one inner Betti element, factored exactly by the two sides of the trade."""
    wall = wall_nilsemigroup(ch, f)
    inner = inner_betti_elements(wall)
    return len(inner) == 1 and wall.fact_sets[inner[0]] == {f.outer_betti, f.inner}


def walk(m: int, atoms: Sequence[int], seed: int = 0, check: bool = True) -> FanGraph:
    """Breadth-first search over chambers of ``G(m;A)``, crossing every interior facet."""
    atoms = _check_atoms(m, atoms)
    start = initial_chamber(m, atoms, seed)
    graph = FanGraph(m, atoms)
    queue = deque([start])
    queued = {start.key}
    while queue:
        n = queue.popleft()
        ch = build_chamber(n, check)
        graph.chambers[ch.key] = ch
        for f in ch.facets:
            if f.kind != "interior":
                continue
            pair = tuple(sorted((ch.key, f.neighbor)))
            normal = f.normal if pair[0] == ch.key else tuple(-c for c in f.normal)
            graph.edges.setdefault(pair, normal)  # oriented to point into pair[0]
            if f.neighbor not in queued:
                queued.add(f.neighbor)
                queue.append(cross_record(ch, f))
    if check:
        for (a, b), normal in graph.edges.items():
            fwd = [f.normal for f in graph.chambers[a].facets if f.neighbor == b]
            back = [f.normal for f in graph.chambers[b].facets if f.neighbor == a]
            if fwd != [normal] or back != [tuple(-c for c in normal)]:
                raise InvariantViolation(f"edge {a} -- {b} is not symmetric")
    return graph


def chamber_containing(graph: FanGraph, x: Sequence) -> list[str]:
    return [key for key, ch in sorted(graph.chambers.items()) if contains(ch.cone, x)]


def refine_to_staircase(n: ModularNilsemigroup, seed: int = 0, max_halvings: int = 60) -> Chamber:
    """A chamber whose cone contains ``F_N`` and whose staircase ``N`` refines."""
    n.require_valid()
    if is_staircase(n):
        if not is_kunz(n):
            raise ValueError("nilsemigroup is not Kunz")
        return build_chamber(n)
    if not is_kunz(n):
        raise ValueError("nilsemigroup is not Kunz")
    k = n.k
    rays = double_description(betti_cone(n))
    x = [sum(r[j] for r in rays) for j in range(k)]
    rng = _rng(n.m, n.atoms, seed)
    r = [Fraction(rng.randrange(1, 10 ** 6), 10 ** 6) for _ in range(k)]
    eps = Fraction(min(x), 4 * (1 + max(sum(z) for zs in n.fact_sets for z in zs)))
    for _ in range(max_halvings):
        y = [xj + eps * rj for xj, rj in zip(x, r)]
        got = circle_of_lights(n.m, n.atoms, y).nilsemigroup
        if is_staircase(got) and has_atom_set(got) and is_refinement(n, got):
            ch = build_chamber(got)
            if all(contains(ch.cone, ray) for ray in rays):
                return ch
        eps /= 2
    raise InvariantViolation(f"no staircase refinement found for {n.key}")


def face_nilsemigroups(ch: Chamber) -> list[ModularNilsemigroup]:
    """Kunz nilsemigroups (with the full atom set) of every face of a chamber off the fan boundary."""
    n = ch.nilsemigroup
    rays = ch.rays
    allr = frozenset(range(len(rays)))
    facet_sets = [frozenset(i for i, r in enumerate(rays) if dot(f.normal, r) == 0)
                  for f in ch.facets]
    faces = {allr}
    frontier = [allr]
    while frontier:
        nxt = []
        for s in frontier:
            for t in facet_sets:
                u = s & t
                if u and u not in faces:
                    faces.add(u)
                    nxt.append(u)
        frontier = nxt
    out = {}
    for s in faces:
        x = [sum(rays[i][j] for i in s) for j in range(n.k)]
        if any(v <= 0 for v in x):
            continue
        face = circle_of_lights(n.m, n.atoms, x).nilsemigroup
        if has_atom_set(face):
            out[face.key] = face
    return [out[key] for key in sorted(out)]


# sweeps

@dataclass(frozen=True)
class AtomSetSummary:
    atoms: tuple[int, ...]
    chambers: int
    max_facets: int
    facet_histogram: tuple[tuple[int, int], ...]
    max_eta: int
    infeasible: bool
    violation: str | None = None

    def row(self) -> dict:
        return {
            "atoms": " ".join(map(str, self.atoms)),
            "chambers": self.chambers,
            "max_facets": self.max_facets,
            "max_eta": self.max_eta,
            "infeasible_flag": int(self.infeasible),
        }


def _sweep_task(args) -> AtomSetSummary:
    m, atoms, seed, out_dir = args
    try:
        graph = walk(m, atoms, seed)
    except InfeasibleAtomSet:
        return AtomSetSummary(atoms, 0, 0, (), 0, True)
    except InvariantViolation as exc:
        return AtomSetSummary(atoms, 0, 0, (), 0, False, str(exc))
    if out_dir is not None:
        name = "A_" + "-".join(map(str, atoms)) + ".json"
        Path(out_dir, name).write_text(graph.dumps())
    hist = Counter(len(ch.facets) for ch in graph.chambers.values())
    return AtomSetSummary(
        atoms,
        len(graph.chambers),
        max(hist),
        tuple(sorted(hist.items())),
        max(eta(ch.nilsemigroup) for ch in graph.chambers.values()),
        False,
    )


@dataclass(frozen=True)
class SweepResult:
    m: int
    k: int
    summaries: tuple[AtomSetSummary, ...]

    @property
    def facet_histogram(self) -> dict[int, int]:
        total = Counter()
        for s in self.summaries:
            total.update(dict(s.facet_histogram))
        return dict(sorted(total.items()))

    @property
    def violations(self) -> list[AtomSetSummary]:
        return [s for s in self.summaries if s.violation]

    def facet_bound_violations(self, bound: int) -> list[AtomSetSummary]:
        return [s for s in self.summaries if s.max_facets > bound]


def walk_all(m: int, k: int, workers: int = 1, seed: int = 0,
             out_dir: str | Path | None = None) -> SweepResult:
    """Walk every ``k``-atom set of ``Z_m``; results are sorted by atom set regardless of scheduling."""
    from .oracles import valid_atom_sets

    if m < 2 or not 1 <= k <= m - 1:
        raise ValueError(f"need m >= 2 and 1 <= k <= m - 1, got m={m}, k={k}")
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    tasks = [(m, atoms, seed, None if out_dir is None else str(out_dir))
             for atoms in valid_atom_sets(m, k)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [_sweep_task(t) for t in tasks]
    return SweepResult(m, k, tuple(sorted(results, key=lambda s: s.atoms)))


def chamber_keys(graph: FanGraph) -> set[str]:
    return set(graph.chambers)


def oracle_keys(m: int, atoms: Iterable[int]) -> set[str]:
    from .oracles import kunz_staircases

    return {n.key for n in kunz_staircases(m, tuple(atoms))}
