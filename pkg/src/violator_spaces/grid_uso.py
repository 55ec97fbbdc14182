"""Grid unique-sink orientations and their violation oracles.

A grid is the product of disjoint blocks partitioning {0..n-1}; a vertex
picks one element per block.  An orientation is stored as an outmap
(vertex -> outgoing directions) and is a USO when every nonempty subgrid
has exactly one sink.  The induced violator mapping sends a set meeting
every block to the outmap of its subgrid's sink, and any other set to
the union of the blocks it misses.

The oracle adapter charges one edge evaluation per single outmap
membership query.  The solvers only ever ask about vertices and about
sets missing a block (each one evaluation or none); the sink-scan
fallback for other queries exists for completeness and its charging is
a documented choice, not something the reduction relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .algorithms import Rng
from .core import ConstraintSet, ViolationOracle, _Counter

MAX_VALIDATE_N = 16
MAX_RANDOM_N = 12
MAX_DENSE_VERTICES = 1 << 16

Vertex = Tuple[int, ...]


class EdgeConsistencyError(Exception):
    """Some edge is oriented both ways or neither way."""


class GenerationExhausted(Exception):
    """Rejection sampling failed to find a USO within the attempt cap."""


@dataclass(frozen=True)
class GridPartition:
    """Disjoint nonempty blocks covering {0..n-1}."""

    blocks: Tuple[Tuple[int, ...], ...]

    @classmethod
    def of(cls, blocks: Sequence[Iterable[int]]) -> "GridPartition":
        tup = tuple(tuple(sorted(b)) for b in blocks)
        if not tup or any(not b for b in tup):
            raise ValueError("every block must be nonempty")
        seen = [h for b in tup for h in b]
        n = len(seen)
        if sorted(seen) != list(range(n)):
            raise ValueError("blocks must partition 0..n-1 exactly")
        return cls(blocks=tup)

    @classmethod
    def uniform(cls, sizes: Sequence[int]) -> "GridPartition":
        blocks = []
        start = 0
        for s in sizes:
            blocks.append(range(start, start + s))
            start += s
        return cls.of(blocks)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def delta(self) -> int:
        return len(self.blocks)

    @property
    def block_of(self) -> Tuple[int, ...]:
        out = [0] * self.n
        for i, b in enumerate(self.blocks):
            for h in b:
                out[h] = i
        return tuple(out)

    def vertices(self) -> Iterable[Vertex]:
        return product(*self.blocks)

    def vertex_count(self) -> int:
        count = 1
        for b in self.blocks:
            count *= len(b)
        return count


def _vertex_mask(J: Vertex) -> int:
    m = 0
    for h in J:
        m |= 1 << h
    return m


def _step(J: Vertex, j: int, block_of: Sequence[int]) -> Vertex:
    """Neighbor of J in direction j: swap j into its block's slot."""
    i = block_of[j]
    return J[:i] + (j,) + J[i + 1 :]


class GridUso:
    """Dense outmap over all vertices; edge consistency is checked at
    construction and failures raise with the offending edge."""

    def __init__(self, partition: GridPartition, outmap: Dict[Vertex, int]):
        self.partition = partition
        if partition.vertex_count() > MAX_DENSE_VERTICES:
            raise ValueError("grid too large for a dense outmap")
        block_of = partition.block_of
        n = partition.n
        full = (1 << n) - 1
        vertices = list(partition.vertices())
        for J in vertices:
            if J not in outmap:
                raise ValueError(f"outmap missing vertex {J}")
            s = outmap[J]
            if s < 0 or s & ~full or s & _vertex_mask(J):
                raise ValueError(f"outmap of {J} is not a subset of H minus J")
        self.outmap = {J: outmap[J] for J in vertices}
        self._block_of = block_of
        for J in vertices:
            for j in range(n):
                jj = J[block_of[j]]
                if j == jj or j < jj:
                    continue
                Jp = _step(J, j, block_of)
                out_here = (self.outmap[J] >> j) & 1
                out_back = (self.outmap[Jp] >> jj) & 1
                if out_here == out_back:
                    raise EdgeConsistencyError(
                        f"edge {{{J}, {Jp}}} is oriented "
                        + ("both ways" if out_here else "neither way")
                    )
        self._validated = False

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def delta(self) -> int:
        return self.partition.delta

    @property
    def validated(self) -> bool:
        return self._validated

    def s(self, J: Vertex) -> ConstraintSet:
        return ConstraintSet(self.outmap[J], self.n)

    def neighbor(self, J: Vertex, j: int) -> Vertex:
        return _step(J, j, self._block_of)


@dataclass(frozen=True)
class UsoWitness:
    """A nonempty subgrid with a sink count different from one."""

    G: ConstraintSet
    sinks: Tuple[Vertex, ...]


def _valid_subsets(partition: GridPartition):
    """All subsets meeting every block, as (mask, members-per-block)."""
    per_block = []
    for b in partition.blocks:
        subs = []
        k = len(b)
        for m in range(1, 1 << k):
            chosen = tuple(b[i] for i in range(k) if (m >> i) & 1)
            mask = 0
            for h in chosen:
                mask |= 1 << h
            subs.append((mask, chosen))
        per_block.append(subs)
    for combo in product(*per_block):
        mask = 0
        for bm, _ in combo:
            mask |= bm
        yield mask, [chosen for _, chosen in combo]


def validate_uso(u: GridUso) -> Optional[UsoWitness]:
    """Exhaustive unique-sink check over every nonempty subgrid.

    Returns None and marks the orientation validated when each of them
    has exactly one sink, otherwise the first offending subgrid.
    """
    if u.n > MAX_VALIDATE_N:
        raise ValueError(f"validation is exhaustive; n <= {MAX_VALIDATE_N} only")
    for mask, members in _valid_subsets(u.partition):
        sinks = [J for J in product(*members) if u.outmap[J] & mask == 0]
        if len(sinks) != 1:
            return UsoWitness(ConstraintSet(mask, u.n), tuple(sinks))
    u._validated = True
    return None


def coordinate_order_uso(
    partition: GridPartition, rankings: Sequence[Sequence[int]]
) -> GridUso:
    """Orientation with every edge pointing towards the lower rank.

    The sink of any subgrid is its blockwise minimum, so this is always
    a USO, and the induced violator space is acyclic.
    """
    rank = _ranks(partition, rankings)
    block_of = partition.block_of
    outmap = {}
    for J in partition.vertices():
        s = 0
        for j in range(partition.n):
            jj = J[block_of[j]]
            if j != jj and rank[j] < rank[jj]:
                s |= 1 << j
        outmap[J] = s
    u = GridUso(partition, outmap)
    u._validated = True
    return u


def _ranks(partition: GridPartition, rankings: Sequence[Sequence[int]]) -> List[int]:
    if len(rankings) != partition.delta:
        raise ValueError("need one ranking per block")
    rank = [-1] * partition.n
    for b, ordering in zip(partition.blocks, rankings):
        if sorted(ordering) != list(b):
            raise ValueError(f"ranking {ordering} is not an order of block {b}")
        for pos, h in enumerate(ordering):
            rank[h] = pos
    return rank


# Fixed 2x2x2 orientation over blocks ({0,1},{2,3},{4,5}): every subgrid
# has a unique sink, yet the six vertices other than the global sink and
# source form a directed cycle.  Found by exhaustive search over the
# 3-cube orientations; see tests for the revalidation.
_CYCLIC_CUBE_OUTMAP: Dict[Vertex, Tuple[int, ...]] = {
    (0, 2, 4): (),
    (0, 2, 5): (1, 4),
    (0, 3, 4): (2, 5),
    (0, 3, 5): (2,),
    (1, 2, 4): (0, 3),
    (1, 2, 5): (4,),
    (1, 3, 4): (0,),
    (1, 3, 5): (0, 2, 4),
}


def cyclic_cube_uso() -> GridUso:
    """Frozen 2x2x2 USO containing a directed cycle."""
    partition = GridPartition.of([(0, 1), (2, 3), (4, 5)])
    outmap = {J: _mask_of(dirs) for J, dirs in _CYCLIC_CUBE_OUTMAP.items()}
    u = GridUso(partition, outmap)
    witness = validate_uso(u)
    assert witness is None, "frozen cyclic-cube orientation must be a USO"
    return u


def _mask_of(dirs: Iterable[int]) -> int:
    m = 0
    for d in dirs:
        m |= 1 << d
    return m


def random_uso(
    partition: GridPartition, rng: Rng, max_attempts: int = 10000
) -> GridUso:
    """Uniform edge-consistent orientation, resampled until it is a USO."""
    if partition.n > MAX_RANDOM_N:
        raise ValueError(f"rejection sampling supports n <= {MAX_RANDOM_N}")
    block_of = partition.block_of
    vertices = list(partition.vertices())
    for _ in range(max_attempts):
        outmap = {J: 0 for J in vertices}
        for J in vertices:
            for j in range(partition.n):
                jj = J[block_of[j]]
                if j <= jj:
                    continue
                if rng.randbelow(2):
                    outmap[J] |= 1 << j
                else:
                    outmap[_step(J, j, block_of)] |= 1 << jj
        u = GridUso(partition, outmap)
        if validate_uso(u) is None:
            return u
    raise GenerationExhausted(f"no USO found in {max_attempts} attempts")


def uso_violators(u: GridUso, G: ConstraintSet) -> ConstraintSet:
    """The induced violator set of G.

    A set meeting every block maps to the outmap of its subgrid's sink;
    any other set maps to the union of the blocks it misses.
    """
    if not u.validated:
        raise ValueError("validate the orientation first")
    gmask = G.mask
    members = []
    missing = 0
    for b in u.partition.blocks:
        chosen = [h for h in b if (gmask >> h) & 1]
        if not chosen:
            missing |= _mask_of(b)
        members.append(chosen)
    if missing:
        return ConstraintSet(missing, u.n)
    for J in product(*members):
        if u.outmap[J] & gmask == 0:
            return ConstraintSet(u.outmap[J], u.n)
    raise AssertionError("validated USO must have a sink in every subgrid")


class OutmapOracle(ViolationOracle):
    """Violation oracle over an outmap, counting edge evaluations.

    One edge evaluation is one membership query "is j in the outmap of
    J".  Sets missing a block are answered with no evaluation, vertices
    with exactly one; anything else falls back to a sink scan that
    charges one evaluation per membership query it makes.
    """

    def __init__(
        self,
        partition: GridPartition,
        membership: Callable[[Vertex, int], bool],
        names: Optional[Sequence[str]] = None,
    ):
        super().__init__(partition.n, partition.delta, names=names)
        self.partition = partition
        self._membership = membership
        self._block_of = partition.block_of
        self._edge_evals = _Counter()

    @property
    def edge_evals(self) -> int:
        return self._edge_evals.value

    def _query(self, J: Vertex, j: int) -> bool:
        self._edge_evals.increment()
        return self._membership(J, j)

    def _violates(self, G: ConstraintSet, h: int) -> bool:
        gmask = G.mask
        members = []
        missing = 0
        for b in self.partition.blocks:
            chosen = [x for x in b if (gmask >> x) & 1]
            if not chosen:
                missing |= _mask_of(b)
            members.append(chosen)
        if missing:
            return (missing >> h) & 1 == 1
        if len(G) == self.partition.delta:
            return self._query(tuple(c[0] for c in members), h)
        for J in product(*members):
            is_sink = True
            for j in G:
                if j not in J and self._query(J, j):
                    is_sink = False
                    break
            if is_sink:
                return self._query(J, h)
        raise AssertionError("no sink found: orientation is not a USO")


def uso_oracle(u: GridUso, names: Optional[Sequence[str]] = None) -> OutmapOracle:
    """Oracle adapter for a validated dense USO."""
    if not u.validated:
        raise ValueError("validate the orientation first")
    outmap = u.outmap
    return OutmapOracle(
        u.partition, lambda J, j: (outmap[J] >> j) & 1 == 1, names=names
    )


def coordinate_order_oracle(
    partition: GridPartition,
    rankings: Sequence[Sequence[int]],
    names: Optional[Sequence[str]] = None,
) -> OutmapOracle:
    """Lazy oracle for coordinate-order orientations of any size.

    Equivalent to uso_oracle(coordinate_order_uso(...)) but without the
    dense table, so it scales to the benchmark sizes.
    """
    rank = _ranks(partition, rankings)
    block_of = partition.block_of
    return OutmapOracle(
        partition,
        lambda J, j: rank[j] < rank[J[block_of[j]]],
        names=names,
    )


def sink_by_scan(u: GridUso) -> Vertex:
    """Global sink located by brute force over all vertices."""
    for J in u.partition.vertices():
        if u.outmap[J] == 0:
            return J
    raise AssertionError("a USO has a global sink")


def has_directed_cycle(u: GridUso) -> bool:
    """DFS cycle detection on the vertex digraph (arc per outmap entry)."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color: Dict[Vertex, int] = {J: WHITE for J in u.partition.vertices()}
    for start in u.partition.vertices():
        if color[start] != WHITE:
            continue
        stack: List[Tuple[Vertex, Iterable]] = [
            (start, iter(sorted(u.s(start))))
        ]
        color[start] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for j in it:
                nb = u.neighbor(node, j)
                if color[nb] == GRAY:
                    return True
                if color[nb] == WHITE:
                    color[nb] = GRAY
                    stack.append((nb, iter(sorted(u.s(nb)))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return False
