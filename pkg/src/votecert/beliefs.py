"""Strategy-proofness with respect to all i.i.d. beliefs, decided exactly.

For a manipulation instance (truthful ordering P, misreport P', upper-set
size k), the expected upper-set mass difference between reporting P and P'
is a homogeneous polynomial of degree n-1 in the m! belief weights.  The
rule is strategy-proof w.r.t. every i.i.d. belief exactly when all of these
polynomials are nonnegative on the belief simplex: a consistent utility is
a positive combination of upper-set indicators plus a constant, and the
constant cancels between the two reports.

Nonnegativity is certified by scaling with powers of the coordinate sum and
checking coefficients (sound, not complete), and refuted by exact evaluation
at point masses, pairwise midpoints, and seeded rational samples.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .prefs import AnonKey, Ordering, enumerate_orderings, ordering_rank, upper_set
from .rules import RuleTable, upper_set_utility

ZERO = Fraction(0)
ONE = Fraction(1)

Belief = tuple[Fraction, ...]

STATUS_CERTIFIED = "certified"
STATUS_REFUTED = "refuted"
STATUS_UNKNOWN = "unknown"


def validate_belief(nvars: int, weights) -> Belief:
    phi = tuple(Fraction(w) for w in weights)
    if len(phi) != nvars:
        raise DomainError(f"belief has {len(phi)} weights, expected {nvars}")
    if any(w < 0 for w in phi) or sum(phi) != 1:
        raise DomainError("belief weights must be nonnegative and sum to 1")
    return phi


@dataclass(frozen=True)
class SimplexPolynomial:
    """Sparse homogeneous polynomial over the belief variables."""

    nvars: int
    degree: int
    terms: dict[tuple[int, ...], Fraction]

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, point: Belief) -> Fraction:
        if len(point) != self.nvars:
            raise DomainError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = ZERO
        for exps, coeff in self.terms.items():
            term = coeff
            for w, e in zip(point, exps):
                if e:
                    if w == 0:
                        term = ZERO
                        break
                    term *= w**e
            total += term
        return total

    def times_coordinate_sum(self) -> "SimplexPolynomial":
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms.items():
            for i in range(self.nvars):
                bumped = exps[:i] + (exps[i] + 1,) + exps[i + 1:]
                out[bumped] = out.get(bumped, ZERO) + coeff
        out = {e: c for e, c in out.items() if c}
        return SimplexPolynomial(self.nvars, self.degree + 1, out)


def polynomial_from_terms(nvars: int, degree: int, terms) -> SimplexPolynomial:
    clean = {}
    for exps, coeff in dict(terms).items():
        coeff = Fraction(coeff)
        if not coeff:
            continue
        if len(exps) != nvars or sum(exps) != degree:
            raise DomainError(f"exponent vector {exps} does not match nvars={nvars}, degree={degree}")
        clean[tuple(exps)] = coeff
    return SimplexPolynomial(nvars, degree, clean)


@dataclass(frozen=True)
class ManipulationInstance:
    truthful: Ordering
    misreport: Ordering
    k: int

    def __post_init__(self):
        m = len(self.truthful)
        if self.truthful == self.misreport:
            raise DomainError("misreport must differ from the truthful ordering")
        if not 1 <= self.k <= m - 1:
            raise DomainError(f"upper-set size k={self.k} outside 1..{m - 1}")


@dataclass(frozen=True)
class RefutationPoint:
    belief: Belief
    value: Fraction
    stage: str  # "point-mass" | "midpoint" | "random"
    index: int


@dataclass(frozen=True)
class SPWitness:
    instance: ManipulationInstance
    utility: tuple[Fraction, ...]
    rho: Fraction
    gain: Fraction
    belief: Belief | None = None  # i.i.d. refutations
    stage: str | None = None
    others: AnonKey | None = None  # classic refutations: the fixed opponents


@dataclass(frozen=True)
class SPVerdict:
    status: str
    polya_degree: int | None = None
    witness: SPWitness | None = None
    max_degree_tried: int = 0
    instances_total: int = 0
    instances_unknown: tuple[ManipulationInstance, ...] = ()


def enumerate_instances(m: int):
    """All (truthful, misreport, k) triples, deterministically ordered."""
    orderings = enumerate_orderings(m)
    for p in orderings:
        for q in orderings:
            if p == q:
                continue
            for k in range(1, m):
                yield ManipulationInstance(p, q, k)


def _multinomial(key: tuple[int, ...]) -> int:
    total = math.factorial(len(key))
    for mult in Counter(key).values():
        total //= math.factorial(mult)
    return total


def dominance_polynomial(v: RuleTable, inst: ManipulationInstance) -> SimplexPolynomial:
    """Expected truthful-minus-misreport upper-set mass, as a belief polynomial."""
    fact = math.factorial(v.m)
    u = upper_set(inst.truthful, inst.k)
    r_true = ordering_rank(inst.truthful)
    r_lie = ordering_rank(inst.misreport)
    terms: dict[tuple[int, ...], Fraction] = {}
    for others in itertools.combinations_with_replacement(range(fact), v.n - 1):
        truth_key = tuple(sorted(others + (r_true,)))
        lie_key = tuple(sorted(others + (r_lie,)))
        gap = v.upper_mass_at(truth_key, u) - v.upper_mass_at(lie_key, u)
        if not gap:
            continue
        counts = [0] * fact
        for s in others:
            counts[s] += 1
        terms[tuple(counts)] = _multinomial(others) * gap
    return SimplexPolynomial(fact, v.n - 1, terms)


def polya_certify(f: SimplexPolynomial, boost: int) -> bool:
    """Certify f >= 0 on the simplex: scale by the coordinate sum `boost` times
    and require every coefficient to be nonnegative.  Sound but not complete."""
    if boost < 0:
        raise DomainError(f"certificate degree boost must be nonnegative, got {boost}")
    g = f
    for _ in range(boost):
        g = g.times_coordinate_sum()
    return all(c >= 0 for c in g.terms.values())


def sample_refute(f: SimplexPolynomial, trials: int, seed: int) -> RefutationPoint | None:
    """First belief with f < 0 among point masses, midpoints, then seeded samples."""
    nv = f.nvars
    for i in range(nv):
        phi = tuple(ONE if j == i else ZERO for j in range(nv))
        val = f.evaluate(phi)
        if val < 0:
            return RefutationPoint(phi, val, "point-mass", i)
    half = Fraction(1, 2)
    for idx, (i, j) in enumerate(itertools.combinations(range(nv), 2)):
        phi = tuple(half if t in (i, j) else ZERO for t in range(nv))
        val = f.evaluate(phi)
        if val < 0:
            return RefutationPoint(phi, val, "midpoint", idx)
    rng = random.Random(seed)
    for t in range(trials):
        weights = [rng.randrange(0, 101) for _ in range(nv)]
        total = sum(weights)
        if not total:
            continue
        phi = tuple(Fraction(w, total) for w in weights)
        val = f.evaluate(phi)
        if val < 0:
            return RefutationPoint(phi, val, "random", t)
    return None


@dataclass(frozen=True)
class SPConfig:
    polya_max: int = 6
    trials: int = 10_000
    seed: int = 42


def _witness_from_values(
    inst: ManipulationInstance, k_values: dict[int, Fraction]
) -> tuple[tuple[Fraction, ...], Fraction, Fraction]:
    """Build a strictly consistent utility whose misreport gain is positive.

    k_values maps each upper-set size to the truthful-minus-misreport mass
    at the refuting belief; k_values[inst.k] must be negative.  The utility
    is the upper-set indicator plus rho times a rank bonus, with rho small
    enough that the gain's sign survives the perturbation.
    """
    m = len(inst.truthful)
    f_k = k_values[inst.k]
    spill = sum(k_values.values()) / m
    rho = ONE if spill <= 0 else min(ONE, -f_k / (2 * spill))
    utility = upper_set_utility(inst.truthful, inst.k, rho)
    scale = 1 / (1 + rho * Fraction(m - 1, m))
    gain = scale * (-(f_k + rho * spill))
    return utility, rho, gain


def check_weak_sp(v: RuleTable, config: SPConfig | None = None) -> SPVerdict:
    """Decide strategy-proofness w.r.t. all i.i.d. beliefs.

    Each instance is first scanned at the deterministic beliefs (point
    masses, midpoints), then pushed up the certificate ladder, and only
    instances the ladder cannot settle are sampled.  By anonymity a single
    manipulating voter index covers all of them.
    """
    config = config or SPConfig()
    instances = list(enumerate_instances(v.m))
    pending: list[tuple[ManipulationInstance, SimplexPolynomial]] = []
    certified_at = 0
    max_tried = 0
    for inst in instances:
        f = dominance_polynomial(v, inst)
        hit = sample_refute(f, 0, config.seed)
        if hit is not None:
            return _refuted_verdict(v, inst, hit, len(instances), max_tried)
        settled = False
        for boost in range(config.polya_max + 1):
            max_tried = max(max_tried, boost)
            if polya_certify(f, boost):
                certified_at = max(certified_at, boost)
                settled = True
                break
        if not settled:
            pending.append((inst, f))
    unknown: list[ManipulationInstance] = []
    for inst, f in pending:
        hit = sample_refute(f, config.trials, config.seed)
        if hit is not None:
            return _refuted_verdict(v, inst, hit, len(instances), max_tried)
        unknown.append(inst)
    if unknown:
        return SPVerdict(
            STATUS_UNKNOWN,
            max_degree_tried=max_tried,
            instances_total=len(instances),
            instances_unknown=tuple(unknown),
        )
    return SPVerdict(
        STATUS_CERTIFIED,
        polya_degree=certified_at,
        max_degree_tried=max_tried,
        instances_total=len(instances),
    )


def _refuted_verdict(
    v: RuleTable,
    inst: ManipulationInstance,
    hit: RefutationPoint,
    total: int,
    max_tried: int,
) -> SPVerdict:
    k_values = {}
    for k in range(1, v.m):
        sibling = ManipulationInstance(inst.truthful, inst.misreport, k)
        k_values[k] = dominance_polynomial(v, sibling).evaluate(hit.belief)
    utility, rho, gain = _witness_from_values(inst, k_values)
    witness = SPWitness(inst, utility, rho, gain, belief=hit.belief, stage=hit.stage)
    return SPVerdict(
        STATUS_REFUTED,
        witness=witness,
        max_degree_tried=max_tried,
        instances_total=total,
    )


def check_classic_sp(v: RuleTable) -> SPVerdict:
    """Classic strategy-proofness: dominance must hold at every fixed profile
    of the other voters, not just in expectation under a belief."""
    fact = math.factorial(v.m)
    instances = list(enumerate_instances(v.m))
    for inst in instances:
        u = upper_set(inst.truthful, inst.k)
        r_true = ordering_rank(inst.truthful)
        r_lie = ordering_rank(inst.misreport)
        for others in itertools.combinations_with_replacement(range(fact), v.n - 1):
            truth_key = tuple(sorted(others + (r_true,)))
            lie_key = tuple(sorted(others + (r_lie,)))
            gap = v.upper_mass_at(truth_key, u) - v.upper_mass_at(lie_key, u)
            if gap < 0:
                k_values = {}
                for k in range(1, v.m):
                    uk = upper_set(inst.truthful, k)
                    k_values[k] = v.upper_mass_at(truth_key, uk) - v.upper_mass_at(lie_key, uk)
                utility, rho, gain = _witness_from_values(inst, k_values)
                witness = SPWitness(inst, utility, rho, gain, others=others)
                return SPVerdict(STATUS_REFUTED, witness=witness, instances_total=len(instances))
    return SPVerdict(STATUS_CERTIFIED, polya_degree=0, instances_total=len(instances))


def replay_gain(v: RuleTable, witness: SPWitness) -> Fraction:
    """Recompute the misreport's expected-utility gain from the witness alone.

    Independent of the polynomial path: expectations are expanded directly
    over the opponents, weighted by multinomial belief mass.
    """
    r_true = ordering_rank(witness.instance.truthful)
    r_lie = ordering_rank(witness.instance.misreport)
    u = witness.utility

    def expected(report_rank: int) -> Fraction:
        if witness.others is not None:
            key = tuple(sorted(witness.others + (report_rank,)))
            lot = v.lottery_at(key)
            return sum((u[x] * lot[x] for x in range(v.m)), ZERO)
        total = ZERO
        fact = math.factorial(v.m)
        for others in itertools.combinations_with_replacement(range(fact), v.n - 1):
            weight = Fraction(_multinomial(others))
            for s in others:
                weight *= witness.belief[s]
            if not weight:
                continue
            lot = v.lottery_at(tuple(sorted(others + (report_rank,))))
            total += weight * sum((u[x] * lot[x] for x in range(v.m)), ZERO)
        return total

    return expected(r_lie) - expected(r_true)
