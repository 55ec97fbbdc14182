"""Table-backed violator spaces for small ground sets.

Everything here is exhaustive by design: axiom verification walks all
2^n subsets (locality walks all submask pairs, so O(3^n)), basis
enumeration and the equivalence-class structure are exact, and the
conversions between the three equivalent representations (violator
table, abstract value table, concrete minimum-of-intersection problem)
are the canonical constructions.

The ground-set size is capped at 24 table entries-wise; exhaustive
checks get slow in practice above n = 16, which is where the CLI warns.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .core import ConstraintSet, ViolationOracle

MAX_TABLE_N = 24
EXHAUSTIVE_WARN_N = 16

INFINITY_TOKEN = "+inf"


class NotValidatedError(Exception):
    """Operation requires a table that has passed its axiom check."""


class CyclicSpaceError(Exception):
    """Operation requires an acyclic violator space."""


@dataclass(frozen=True)
class AxiomWitness:
    """Counterexample to one of the two violator-space axioms.

    Consistency witnesses have F == G; locality witnesses carry the pair
    F subset of G with G disjoint from V(F) but V(G) != V(F).
    """

    axiom: str
    F: ConstraintSet
    G: ConstraintSet

    def describe(self, names: Sequence[str]) -> str:
        if self.axiom == "consistency":
            return f"consistency fails: G={self.G.label(names)} meets V(G)"
        return (
            f"locality fails: F={self.F.label(names)} G={self.G.label(names)}"
            f" with G disjoint from V(F) but V(G) != V(F)"
        )


@dataclass(frozen=True)
class AbstractAxiomWitness:
    """Counterexample to monotonicity or locality of a value table."""

    axiom: str
    F: ConstraintSet
    G: ConstraintSet
    h: Optional[int] = None

    def describe(self, names: Sequence[str]) -> str:
        if self.axiom == "monotonicity":
            return (
                f"monotonicity fails: w({self.F.label(names)}) >"
                f" w({self.G.label(names)})"
            )
        return (
            f"locality fails: F={self.F.label(names)} G={self.G.label(names)}"
            f" h={names[self.h]}"
        )


def _check_names(names: Sequence[str], n: int) -> List[str]:
    names = list(names)
    if len(names) != n:
        raise ValueError(f"need exactly {n} names, got {len(names)}")
    if len(set(names)) != n:
        raise ValueError("names must be unique")
    for name in names:
        if not name or "," in name:
            raise ValueError(f"bad name {name!r}: empty or contains a comma")
    return names


def _default_names(n: int) -> List[str]:
    return [f"h{i}" for i in range(n)]


class ExplicitViolatorSpace:
    """Full table G -> V(G) over all 2^n subsets of {0..n-1}."""

    def __init__(
        self,
        n: int,
        table: Sequence[int],
        names: Optional[Sequence[str]] = None,
        checked: bool = False,
    ):
        if not 0 <= n <= MAX_TABLE_N:
            raise ValueError(f"explicit tables support 0 <= n <= {MAX_TABLE_N}")
        size = 1 << n
        if len(table) != size:
            raise ValueError(f"table must have {size} entries, got {len(table)}")
        full = size - 1
        for g, v in enumerate(table):
            if v < 0 or v & ~full:
                raise ValueError(f"V entry for subset {g} is not a subset of H")
        self.n = n
        self._table = list(table)
        self.names = _check_names(names, n) if names is not None else _default_names(n)
        self._checked = checked

    @property
    def checked(self) -> bool:
        return self._checked

    def _require_checked(self) -> None:
        if not self._checked:
            raise NotValidatedError("run check_axioms() on this space first")

    def violators(self, G: ConstraintSet) -> ConstraintSet:
        if G.n != self.n:
            raise ValueError("ground-set size mismatch")
        return ConstraintSet(self._table[G.mask], self.n)

    def violator_mask(self, mask: int) -> int:
        return self._table[mask]

    # -- axioms -------------------------------------------------------

    def check_axioms(self) -> Optional[AxiomWitness]:
        """Verify consistency and locality exhaustively.

        Returns None and marks the space checked on success, otherwise the
        first witness found (subsets scanned in mask order, submasks in
        decreasing-mask order).
        """
        table = self._table
        n = self.n
        for g in range(1 << n):
            vg = table[g]
            if g & vg:
                return AxiomWitness(
                    "consistency", ConstraintSet(g, n), ConstraintSet(g, n)
                )
            # proper submasks F of g with g disjoint from V(F)
            f = (g - 1) & g
            while True:
                if g & table[f] == 0 and table[f] != vg:
                    return AxiomWitness(
                        "locality", ConstraintSet(f, n), ConstraintSet(g, n)
                    )
                if f == 0:
                    break
                f = (f - 1) & g
        self._checked = True
        return None

    # -- bases --------------------------------------------------------

    def is_basis(self, B: ConstraintSet) -> bool:
        """Basis predicate: every proper subset is violated inside B.

        For a space satisfying the axioms this is equivalent to every
        element being extreme: removing it changes the violator set.
        """
        self._require_checked()
        table = self._table
        b = B.mask
        vb = table[b]
        m = b
        while m:
            low = m & -m
            if table[b ^ low] == vb:
                return False
            m ^= low
        return True

    def enumerate_bases(self) -> List[ConstraintSet]:
        """All bases, ascending by (cardinality, lexicographic members)."""
        self._require_checked()
        table = self._table
        found = []
        for b in range(1 << self.n):
            vb = table[b]
            m = b
            ok = True
            while m:
                low = m & -m
                if table[b ^ low] == vb:
                    ok = False
                    break
                m ^= low
            if ok:
                found.append(ConstraintSet(b, self.n))
        found.sort(key=ConstraintSet.sort_key)
        return found

    def basis_of(self, G: ConstraintSet) -> ConstraintSet:
        """The (min cardinality, then lexicographically first) basis of G."""
        self._require_checked()
        table = self._table
        target = table[G.mask]
        members = sorted(G)
        for size in range(len(members) + 1):
            for combo in combinations(members, size):
                b = 0
                for h in combo:
                    b |= 1 << h
                if table[b] == target:
                    return ConstraintSet(b, self.n)
        raise AssertionError("unreachable: G is a subset of itself")

    def combinatorial_dimension(self) -> int:
        """Size of a largest basis."""
        self._require_checked()
        return max(len(b) for b in self.enumerate_bases())

    # -- structure ----------------------------------------------------

    def structure(self) -> "BasisStructure":
        """Equivalence classes of bases, the locally-smaller order, and
        either a cycle witness or a deterministic linear extension."""
        self._require_checked()
        bases = self.enumerate_bases()
        by_violators: Dict[int, List[ConstraintSet]] = {}
        for b in bases:
            by_violators.setdefault(self._table[b.mask], []).append(b)
        classes = [
            BasisClass(ConstraintSet(v, self.n), members)
            for v, members in by_violators.items()
        ]
        classes.sort(key=lambda c: c.representative.sort_key())

        k = len(classes)
        # [B] <=0 [C] iff some member of [B] is disjoint from V([C]).
        leq0 = set()
        for j, cj in enumerate(classes):
            vj = cj.violators.mask
            for i, ci in enumerate(classes):
                if any(m.mask & vj == 0 for m in ci.members):
                    leq0.add((i, j))

        # transitive closure over class indices, as reachability bitmasks
        succ = [0] * k
        for i, j in leq0:
            succ[i] |= 1 << j
        reach = list(succ)
        changed = True
        while changed:
            changed = False
            for i in range(k):
                r = reach[i]
                m = r
                while m:
                    low = m & -m
                    r |= reach[low.bit_length() - 1]
                    m ^= low
                if r != reach[i]:
                    reach[i] = r
                    changed = True
        leq1 = set(leq0)
        for i in range(k):
            m = reach[i]
            while m:
                low = m & -m
                leq1.add((i, low.bit_length() - 1))
                m ^= low

        acyclic = all(
            not (reach[i] >> j) & 1 or not (reach[j] >> i) & 1
            for i in range(k)
            for j in range(i + 1, k)
        )

        extension = _linear_extension(k, leq0) if acyclic else None
        cycle = None if acyclic else _cycle_witness(k, leq0, reach)

        return BasisStructure(
            space=self,
            bases=bases,
            classes=classes,
            leq0=frozenset(leq0),
            leq1=frozenset(leq1),
            acyclic=acyclic,
            linear_extension=extension,
            cycle=cycle,
        )

    # -- conversions --------------------------------------------------

    def to_concrete(self) -> "ConcreteLpProblem":
        """Concrete representation over basis-equivalence classes.

        Point p carries the classes ordered by the linear extension; the
        constraint for h collects the classes whose bases h does not
        violate.  Only defined for acyclic spaces.
        """
        self._require_checked()
        st = self.structure()
        if not st.acyclic:
            raise CyclicSpaceError("cyclic violator space has no concrete form")
        assert st.linear_extension is not None
        ordered = [st.classes[i] for i in st.linear_extension]
        points = [cls.display_label(self.names) for cls in ordered]
        constraints = []
        for h in range(self.n):
            s_h = tuple(
                pos
                for pos, cls in enumerate(ordered)
                if not (cls.violators.mask >> h) & 1
            )
            constraints.append(s_h)
        return ConcreteLpProblem(
            points=points, constraints=constraints, names=list(self.names)
        )

    def oracle(self, delta: Optional[int] = None) -> "TableOracle":
        """Violation oracle backed by this table.

        With delta omitted the exact combinatorial dimension is used,
        which requires a checked space.
        """
        if delta is None:
            delta = max(self.combinatorial_dimension(), 1)
        return TableOracle(self, delta)


class TableOracle(ViolationOracle):
    """Oracle answering from a stored table; one lookup per query."""

    def __init__(self, space: ExplicitViolatorSpace, delta: int):
        super().__init__(space.n, delta, names=space.names)
        self._space = space

    def _violates(self, G: ConstraintSet, h: int) -> bool:
        return (self._space.violator_mask(G.mask) >> h) & 1 == 1


@dataclass
class BasisClass:
    """Bases sharing one violator set; members sorted canonically."""

    violators: ConstraintSet
    members: List[ConstraintSet]

    def __post_init__(self) -> None:
        self.members = sorted(self.members, key=ConstraintSet.sort_key)

    @property
    def representative(self) -> ConstraintSet:
        return self.members[0]

    def display_label(self, names: Sequence[str]) -> str:
        core = self.representative.label(names).replace(",", "")
        return f"[{core}]" if len(self.members) > 1 else core


@dataclass
class BasisStructure:
    """Bases, their equivalence classes, and the class ordering.

    leq0/leq1 hold index pairs (i, j) meaning classes[i] <= classes[j];
    leq1 is the transitive closure of leq0.  linear_extension lists class
    indices in a total order extending leq1 and is present iff the space
    is acyclic; cycle is a class-index sequence c0, c1, ..., ck with each
    step locally smaller and an edge back from ck to c0, present iff the
    space is cyclic.
    """

    space: ExplicitViolatorSpace
    bases: List[ConstraintSet]
    classes: List[BasisClass]
    leq0: frozenset
    leq1: frozenset
    acyclic: bool
    linear_extension: Optional[List[int]] = None
    cycle: Optional[List[int]] = None

    def class_of(self, B: ConstraintSet) -> int:
        v = self.space.violator_mask(B.mask)
        for i, cls in enumerate(self.classes):
            if cls.violators.mask == v and B in cls.members:
                return i
        raise ValueError(f"{B!r} is not a basis of this space")

    def class_labels(self) -> List[str]:
        return [cls.display_label(self.space.names) for cls in self.classes]


def _linear_extension(k: int, leq0: set) -> List[int]:
    """Kahn's algorithm; ties go to the lowest class index, and classes
    are pre-sorted by representative, so ties resolve to the
    lexicographically least representative."""
    preds = [set() for _ in range(k)]
    for i, j in leq0:
        if i != j:
            preds[j].add(i)
    placed: List[int] = []
    done = set()
    while len(placed) < k:
        candidates = [
            i for i in range(k) if i not in done and preds[i].issubset(done)
        ]
        if not candidates:
            raise AssertionError("cycle encountered while extending an acyclic order")
        nxt = min(candidates)
        placed.append(nxt)
        done.add(nxt)
    return placed


def _cycle_witness(k: int, leq0: set, reach: List[int]) -> List[int]:
    """Shortest locally-smaller cycle through the least class index that
    sits on any cycle; deterministic by ascending neighbor order."""
    succ = [[] for _ in range(k)]
    for i, j in sorted(leq0):
        if i != j:
            succ[i].append(j)
    on_cycle = [
        i
        for i in range(k)
        if any(
            (reach[i] >> j) & 1 and (reach[j] >> i) & 1 for j in range(k) if j != i
        )
    ]
    start = min(on_cycle)
    # BFS from start; the first edge found back to start closes the cycle.
    parent = {start: None}
    queue = [start]
    while queue:
        node = queue.pop(0)
        for nb in succ[node]:
            if nb == start and node != start:
                path = [node]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return list(reversed(path))
            if nb not in parent:
                parent[nb] = node
                queue.append(nb)
    raise AssertionError("no cycle found although the order is not antisymmetric")


class AbstractLpTable:
    """Value table w over all subsets, into a linearly ordered token set.

    Tokens are opaque strings; `order` lists them ascending and is the
    single source of the comparison.
    """

    def __init__(
        self,
        n: int,
        values: Sequence[str],
        order: Sequence[str],
        names: Optional[Sequence[str]] = None,
        checked: bool = False,
    ):
        if not 0 <= n <= MAX_TABLE_N:
            raise ValueError(f"abstract tables support 0 <= n <= {MAX_TABLE_N}")
        size = 1 << n
        if len(values) != size:
            raise ValueError(f"need {size} values, got {len(values)}")
        self.order = list(order)
        if len(set(self.order)) != len(self.order):
            raise ValueError("order must not repeat tokens")
        self._rank = {tok: i for i, tok in enumerate(self.order)}
        for tok in values:
            if tok not in self._rank:
                raise ValueError(f"value token {tok!r} missing from order")
        self.n = n
        self.values = list(values)
        self._ranks = [self._rank[tok] for tok in self.values]
        self.names = _check_names(names, n) if names is not None else _default_names(n)
        self._checked = checked

    @property
    def checked(self) -> bool:
        return self._checked

    def value_of(self, G: ConstraintSet) -> str:
        return self.values[G.mask]

    def rank_of(self, G: ConstraintSet) -> int:
        return self._ranks[G.mask]

    def check_axioms(self) -> Optional[AbstractAxiomWitness]:
        """Verify monotonicity and locality exhaustively.

        Monotonicity is checked on covering pairs, which implies it for
        all nested pairs by transitivity of the token order.
        """
        r = self._ranks
        n = self.n
        for g in range(1 << n):
            m = g
            while m:
                low = m & -m
                if r[g ^ low] > r[g]:
                    return AbstractAxiomWitness(
                        "monotonicity", ConstraintSet(g ^ low, n), ConstraintSet(g, n)
                    )
                m ^= low
        for g in range(1 << n):
            rg = r[g]
            outside = ~g & ((1 << n) - 1)
            f = (g - 1) & g
            while True:
                if r[f] == rg:
                    m = outside
                    while m:
                        low = m & -m
                        if r[g | low] > rg and r[f | low] == r[f]:
                            return AbstractAxiomWitness(
                                "locality",
                                ConstraintSet(f, n),
                                ConstraintSet(g, n),
                                low.bit_length() - 1,
                            )
                        m ^= low
                if f == 0:
                    break
                f = (f - 1) & g
        self._checked = True
        return None

    def violator_map(self) -> ExplicitViolatorSpace:
        """The induced violator table: h violates G iff adding h raises w.

        Requires a validated table; the result satisfies both violator
        axioms and is acyclic, so it is returned pre-checked.
        """
        if not self._checked:
            raise NotValidatedError("run check_axioms() on this table first")
        r = self._ranks
        n = self.n
        table = []
        for g in range(1 << n):
            rg = r[g]
            v = 0
            m = ~g & ((1 << n) - 1)
            while m:
                low = m & -m
                if r[g | low] > rg:
                    v |= low
                m ^= low
            table.append(v)
        return ExplicitViolatorSpace(n, table, names=self.names, checked=True)


class ConcreteLpProblem:
    """Constraints as subsets of a linearly ordered point list.

    The value of a constraint family is the least point (by list order)
    in its intersection; the empty family's intersection is all of X.
    `constraints` is a list, so duplicate subsets are kept with
    positional identity.
    """

    def __init__(
        self,
        points: Sequence[str],
        constraints: Sequence[Sequence[int]],
        names: Optional[Sequence[str]] = None,
    ):
        self.points = list(points)
        if len(set(self.points)) != len(self.points):
            raise ValueError("point labels must be unique")
        if INFINITY_TOKEN in self.points:
            raise ValueError(f"point label {INFINITY_TOKEN!r} is reserved")
        m = len(self.points)
        self.constraints: List[Tuple[int, ...]] = []
        for c in constraints:
            tup = tuple(sorted(set(c)))
            if tup and not (0 <= tup[0] and tup[-1] < m):
                raise ValueError(f"constraint {c} indexes outside the point list")
            self.constraints.append(tup)
        n = len(self.constraints)
        self.names = _check_names(names, n) if names is not None else _default_names(n)

    @property
    def n(self) -> int:
        return len(self.constraints)

    def to_abstract(self) -> AbstractLpTable:
        """Value table w(G) = least point of the intersection of G.

        Constraints are identified by their list position, so duplicates
        stay distinct.  Empty intersections map to the reserved maximal
        token.  The result is validated before it is returned.
        """
        n = self.n
        if n > MAX_TABLE_N:
            raise ValueError(f"too many constraints for a full table (n={n})")
        m = len(self.points)
        full_points = (1 << m) - 1
        cmask = []
        for tup in self.constraints:
            mk = 0
            for p in tup:
                mk |= 1 << p
            cmask.append(mk)
        inter = [full_points] * (1 << n)
        for g in range(1, 1 << n):
            low = g & -g
            inter[g] = inter[g ^ low] & cmask[low.bit_length() - 1]
        values = []
        for g in range(1 << n):
            x = inter[g]
            if x == 0:
                values.append(INFINITY_TOKEN)
            else:
                values.append(self.points[(x & -x).bit_length() - 1])
        order = list(self.points) + [INFINITY_TOKEN]
        table = AbstractLpTable(n, values, order, names=self.names)
        witness = table.check_axioms()
        if witness is not None:
            raise AssertionError(f"concrete problem produced an invalid table: {witness}")
        return table


def tabulate_oracle(
    oracle: ViolationOracle, max_n: int = EXHAUSTIVE_WARN_N
) -> ExplicitViolatorSpace:
    """Materialize V(G) for every subset by scanning all h outside G.

    Every entry costs counted primitive calls.  The result is unchecked;
    run check_axioms() to certify it.
    """
    n = oracle.n
    if n > max_n:
        raise ValueError(f"refusing to tabulate n={n} > {max_n} subsets")
    table = []
    for g in range(1 << n):
        G = ConstraintSet(g, n)
        v = 0
        m = ~g & ((1 << n) - 1)
        while m:
            low = m & -m
            if oracle.violates(G, low.bit_length() - 1):
                v |= low
            m ^= low
        table.append(v)
    return ExplicitViolatorSpace(n, table, names=oracle.names)
