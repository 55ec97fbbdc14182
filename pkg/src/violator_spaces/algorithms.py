"""Basis-finding algorithms driven purely by the violation primitive.

`trivial_basis` scans all candidate sets of size up to delta.  `basis1`
and `basis2` are Clarkson's two randomized reduction stages; both return
a basis of G for any oracle satisfying the violator-space axioms, cyclic
or not.  `solve` runs basis1 on the whole ground set, which is the
combination with expected O(delta*n + delta^O(delta)) primitive calls.

Both randomized loops carry hard safety bounds that hold for every true
violator space: basis1 augments its working set at most delta times and
basis2 performs fewer than 3*delta*ln|G| reweighting iterations.
Exceeding either (or the generous outer loop guard) signals an oracle
that is not a violator space and raises IterationGuardExceeded.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Sequence, Set, Tuple

from .core import ConstraintSet, SolveStats, ViolationOracle

MAX_WEIGHT_BITS = 128


class NoBasisFound(Exception):
    """No candidate of size <= delta passed the basis test: the delta
    hint is too small or the oracle is not a violator space."""


class IterationGuardExceeded(Exception):
    """A randomized loop exceeded a bound that holds for every violator
    space; the oracle almost certainly violates the axioms."""


class WeightOverflow(Exception):
    """A multiplicity left the supported 128-bit range."""


def _mix64(*parts: int) -> int:
    """splitmix64-style mixing, used to derive child seeds."""
    z = 0
    for p in parts:
        z = (z + (p & 0xFFFFFFFFFFFFFFFF) + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z ^= z >> 30
        z = (z * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z ^= z >> 27
        z = (z * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        z ^= z >> 31
    return z


class Rng:
    """Deterministic 64-bit-seeded generator (Mersenne Twister core).

    All sampling routines are implemented on top of getrandbits with a
    fixed rejection scheme, so identical seeds give identical sample
    sequences on any interpreter with the standard MT19937 core.
    """

    def __init__(self, seed: int):
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self._gen = random.Random(self.seed)

    def spawn(self, *parts: int) -> "Rng":
        """Child generator with a seed derived from this seed and parts."""
        return Rng(_mix64(self.seed, *parts))

    def randbelow(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        bits = bound.bit_length()
        r = self._gen.getrandbits(bits)
        while r >= bound:
            r = self._gen.getrandbits(bits)
        return r

    def subset(self, members: Sequence[int], r: int) -> List[int]:
        """Uniform r-element subset via partial Fisher-Yates."""
        if not 0 <= r <= len(members):
            raise ValueError(f"cannot draw {r} of {len(members)} elements")
        pool = list(members)
        for i in range(r):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:r]

    def weighted_support(self, items: Sequence[Tuple[int, int]], r: int) -> Set[int]:
        """Support of a uniform r-sub-multiset of the weighted items.

        Draws r copies without replacement from the multiset in which
        item h appears weight(h) times, then collapses to the distinct
        elements drawn.
        """
        weights = [w for _, w in items]
        total = sum(weights)
        if r > total:
            raise ValueError(f"cannot draw {r} of {total} copies")
        support: Set[int] = set()
        for _ in range(r):
            x = self.randbelow(total)
            for idx, w in enumerate(weights):
                if x < w:
                    break
                x -= w
            support.add(items[idx][0])
            weights[idx] -= 1
            total -= 1
        return support


@dataclass
class WeightedGroundSet:
    """Positive integer multiplicities over a constraint set."""

    weights: Dict[int, int]

    def __post_init__(self) -> None:
        for h, w in self.weights.items():
            if w < 1:
                raise ValueError(f"multiplicity of {h} must be >= 1")
        self._check_overflow()

    @property
    def total(self) -> int:
        return sum(self.weights.values())

    def of(self, members: Sequence[int]) -> int:
        return sum(self.weights[h] for h in members)

    def double(self, members: Sequence[int]) -> None:
        for h in members:
            self.weights[h] *= 2
        self._check_overflow()

    def items(self) -> List[Tuple[int, int]]:
        return sorted(self.weights.items())

    def _check_overflow(self) -> None:
        for h, w in self.weights.items():
            if w.bit_length() > MAX_WEIGHT_BITS:
                raise WeightOverflow(f"multiplicity of {h} exceeds 128 bits")


def trivial_basis(oracle: ViolationOracle, G: ConstraintSet) -> ConstraintSet:
    """Scan candidate sets of size <= delta for a basis of G.

    B qualifies iff every h in B violates B minus h and no h in G
    outside B violates B.  Candidates run by ascending cardinality and
    lexicographically within one cardinality; the first hit is returned,
    after at most n * sum_{i<=delta} C(n, i) primitive calls.
    """
    members = sorted(G)
    n = oracle.n
    limit = min(oracle.delta, len(members))
    for size in range(limit + 1):
        for combo in combinations(members, size):
            B = ConstraintSet.of(combo, n)
            ok = True
            for h in combo:
                if not oracle.violates(B.remove(h), h):
                    ok = False
                    break
            if not ok:
                continue
            for h in members:
                if h not in B and oracle.violates(B, h):
                    ok = False
                    break
            if ok:
                return B
    raise NoBasisFound(
        f"no subset of size <= {oracle.delta} is a basis of the given set"
    )


def _loop_limit(delta: int, g: int) -> float:
    return 100.0 * delta * (1.0 + math.log2(max(g, 2)))


def _basis2(
    oracle: ViolationOracle, G: ConstraintSet, rng: Rng, stats: SolveStats
) -> ConstraintSet:
    stats.basis2_calls += 1
    delta = oracle.delta
    members = sorted(G)
    g = len(members)
    if g <= 6 * delta * delta:
        stats.trivial_calls += 1
        return trivial_basis(oracle, G)

    r = 6 * delta * delta
    mu = WeightedGroundSet({h: 1 for h in members})
    successful = 0
    max_successful = 3.0 * delta * math.log(g)
    iterations = 0
    limit = _loop_limit(delta, g)
    while True:
        iterations += 1
        stats.loop_iterations += 1
        if iterations > limit:
            raise IterationGuardExceeded(
                f"basis2 exceeded {limit:.0f} iterations on |G|={g}"
            )
        R = ConstraintSet.of(rng.weighted_support(mu.items(), r), oracle.n)
        stats.trivial_calls += 1
        C = trivial_basis(oracle, R)
        viol = [h for h in members if h not in C and oracle.violates(C, h)]
        if not viol:
            return C
        if 3 * delta * mu.of(viol) <= mu.total:
            mu.double(viol)
            successful += 1
            stats.reweight_iterations += 1
            if successful >= max_successful:
                raise IterationGuardExceeded(
                    f"basis2 performed {successful} reweighting iterations,"
                    f" which contradicts the < {max_successful:.2f} bound"
                )


def _basis1(
    oracle: ViolationOracle, G: ConstraintSet, rng: Rng, stats: SolveStats
) -> ConstraintSet:
    delta = oracle.delta
    members = sorted(G)
    g = len(members)
    if g <= 9 * delta * delta:
        return _basis2(oracle, G, rng, stats)

    r = math.isqrt(delta * delta * g)
    W = ConstraintSet.empty(oracle.n)
    augmentations = 0
    iterations = 0
    limit = _loop_limit(delta, g)
    while True:
        iterations += 1
        stats.loop_iterations += 1
        if iterations > limit:
            raise IterationGuardExceeded(
                f"basis1 exceeded {limit:.0f} iterations on |G|={g}"
            )
        R = ConstraintSet.of(rng.subset(members, r), oracle.n)
        C = _basis2(oracle, W | R, rng, stats)
        viol = [h for h in members if h not in C and oracle.violates(C, h)]
        if not viol:
            return C
        if len(viol) * len(viol) <= 4 * g:
            W = W | ConstraintSet.of(viol, oracle.n)
            augmentations += 1
            stats.w_augmentations += 1
            if augmentations > delta:
                raise IterationGuardExceeded(
                    f"basis1 augmented its working set {augmentations} times,"
                    f" which contradicts the <= {delta} bound"
                )


def basis2(
    oracle: ViolationOracle, G: ConstraintSet, rng: Rng
) -> Tuple[ConstraintSet, SolveStats]:
    """Clarkson's reweighting stage: a basis of G plus run statistics."""
    stats = SolveStats(rng_seed=rng.seed)
    before = oracle.primitive_calls
    C = _basis2(oracle, G, rng, stats)
    stats.primitive_calls = oracle.primitive_calls - before
    return C, stats


def basis1(
    oracle: ViolationOracle, G: ConstraintSet, rng: Rng
) -> Tuple[ConstraintSet, SolveStats]:
    """Clarkson's sampling stage: a basis of G plus run statistics."""
    stats = SolveStats(rng_seed=rng.seed)
    before = oracle.primitive_calls
    C = _basis1(oracle, G, rng, stats)
    stats.primitive_calls = oracle.primitive_calls - before
    return C, stats


def solve(oracle: ViolationOracle, rng: Rng) -> Tuple[ConstraintSet, SolveStats]:
    """Find a basis of the full ground set."""
    return basis1(oracle, oracle.ground_set(), rng)


@dataclass
class SamplingReport:
    """Monte-Carlo estimate of the expected violator count of W + R."""

    mean: float
    bound: float
    stddev: float
    trials: int
    r: int
    seed: int
    passed: bool

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "bound": self.bound,
            "stddev": self.stddev,
            "trials": self.trials,
            "r": self.r,
            "seed": self.seed,
            "passed": self.passed,
        }


def sampling_check(
    oracle: ViolationOracle,
    W: ConstraintSet,
    r: int,
    trials: int,
    rng: Rng,
) -> SamplingReport:
    """Compare the mean violator count of W union a random r-subset
    against the bound delta * (n - r) / (r + 1).

    Passes when the empirical mean stays below the bound plus three
    standard errors.
    """
    n = oracle.n
    if not 0 <= r < n:
        raise ValueError(f"need 0 <= r < n, got r={r}, n={n}")
    if trials < 1:
        raise ValueError("need at least one trial")
    members = list(range(n))
    counts = []
    for _ in range(trials):
        R = ConstraintSet.of(rng.subset(members, r), n)
        base = W | R
        count = 0
        for h in range(n):
            if h not in base and oracle.violates(base, h):
                count += 1
        counts.append(count)
    mean = sum(counts) / trials
    if trials > 1:
        var = sum((c - mean) ** 2 for c in counts) / (trials - 1)
    else:
        var = 0.0
    stddev = math.sqrt(var)
    bound = oracle.delta * (n - r) / (r + 1)
    passed = mean <= bound + 3.0 * stddev / math.sqrt(trials)
    return SamplingReport(
        mean=mean,
        bound=bound,
        stddev=stddev,
        trials=trials,
        r=r,
        seed=rng.seed,
        passed=passed,
    )
