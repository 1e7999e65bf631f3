"""Minimal-eps axiom checkers and deviation meters for rule tables.

Every checker returns the smallest eps for which its axiom holds, together
with a witness that replays to exactly that value.  Deviation meters return
0 exactly when the corresponding structural property (pairwise responsive,
pairwise isolated, tops-only, ...) holds.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .prefs import AnonKey, Ordering, canonicalize, enumerate_orderings
from .rules import RuleTable, random_dictatorship

ZERO = Fraction(0)

AXIOM_NAMES = (
    "pareto",
    "strong-unanimity",
    "weak-unanimity",
    "super-weak-unanimity",
    "responsiveness",
    "isolation",
    "tops-only",
    "times-at-top",
    "candidate-anonymity",
    "sliding-window",
)


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    eps: Fraction
    witness: dict | None


@dataclass(frozen=True)
class VPrimeTable:
    """Canonical-profile selection probabilities, indexed by (candidate, top count)."""

    m: int
    n: int
    base: Ordering
    values: dict[tuple[int, int], Fraction]

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.values[key]


@dataclass(frozen=True)
class DistanceReport:
    """Distance to random dictatorship plus its two canonical sub-quantities."""

    closeness: AxiomReport
    table_vs_canonical: AxiomReport
    canonical_vs_linear: AxiomReport


# -- Helpers -------------------------------------------------------------------


def _tops_of_ranks(m: int) -> list[int]:
    return [o[0] for o in enumerate_orderings(m)]


def _all_tops_keys(m: int, n: int, x: int):
    """Anonymous profiles in which every voter ranks x first."""
    ranks = [r for r, o in enumerate(enumerate_orderings(m)) if o[0] == x]
    return itertools.combinations_with_replacement(ranks, n)


def _replace_rank(key: AnonKey, old: int, new: int) -> AnonKey:
    lst = list(key)
    lst.remove(old)
    lst.append(new)
    return tuple(sorted(lst))


# -- Efficiency and unanimity ---------------------------------------------------


def min_eps_pareto(v: RuleTable) -> AxiomReport:
    """Largest probability a unanimously dominated candidate ever receives."""
    orderings = enumerate_orderings(v.m)
    best, witness = ZERO, None
    for key in v.keys():
        support = [orderings[r] for r in set(key)]
        positions = [{c: o.index(c) for c in o} for o in support]
        for x in range(v.m):
            for y in range(v.m):
                if x == y:
                    continue
                if all(pos[x] < pos[y] for pos in positions):
                    val = v.prob_at(key, y)
                    if val > best:
                        best = val
                        witness = {"profile": key, "dominator": x, "dominated": y}
    return AxiomReport("pareto", best, witness)


def min_eps_strong_unanimity(v: RuleTable) -> AxiomReport:
    best, witness = ZERO, None
    for x in range(v.m):
        for key in _all_tops_keys(v.m, v.n, x):
            val = 1 - v.prob_at(key, x)
            if val > best:
                best, witness = val, {"profile": key, "x": x}
    return AxiomReport("strong-unanimity", best, witness)


def min_eps_weak_unanimity(v: RuleTable) -> AxiomReport:
    best, witness = ZERO, None
    for r, o in enumerate(enumerate_orderings(v.m)):
        key = (r,) * v.n
        val = 1 - v.prob_at(key, o[0])
        if val > best:
            best, witness = val, {"profile": key, "x": o[0]}
    return AxiomReport("weak-unanimity", best, witness)


def min_eps_super_weak_unanimity(v: RuleTable) -> AxiomReport:
    best, witness = ZERO, None
    for x in range(v.m):
        vals = [(1 - v.prob_at(key, x), key) for key in _all_tops_keys(v.m, v.n, x)]
        val, key = min(vals)
        if val > best:
            best, witness = val, {"profile": key, "x": x}
    return AxiomReport("super-weak-unanimity", best, witness)


# -- Swap-based deviation meters -------------------------------------------------


def responsiveness_deviation(v: RuleTable) -> AxiomReport:
    """How much an adjacent swap can move a bystander candidate's probability."""
    orderings = enumerate_orderings(v.m)
    best, witness = ZERO, None
    for key in v.keys():
        for r in set(key):
            o = orderings[r]
            for p in range(v.m - 1):
                swapped = list(o)
                swapped[p], swapped[p + 1] = swapped[p + 1], swapped[p]
                r2 = orderings.index(tuple(swapped))
                key2 = _replace_rank(key, r, r2)
                pair = {o[p], o[p + 1]}
                for z in range(v.m):
                    if z in pair:
                        continue
                    d = abs(v.prob_at(key2, z) - v.prob_at(key, z))
                    if d > best:
                        best = d
                        witness = {
                            "profile": key,
                            "swapped_profile": key2,
                            "acting_rank": r,
                            "pos": p,
                            "z": z,
                        }
    return AxiomReport("responsiveness", best, witness)


def _isolation_groups(v: RuleTable):
    """Raise-step deltas grouped by (acting ordering, swap position, pair-order count)."""
    orderings = enumerate_orderings(v.m)
    for r, o in enumerate(orderings):
        for p in range(v.m - 1):
            x, y = o[p], o[p + 1]
            swapped = list(o)
            swapped[p], swapped[p + 1] = swapped[p + 1], swapped[p]
            r2 = orderings.index(tuple(swapped))
            groups: dict[int, list] = defaultdict(list)
            for others in itertools.combinations_with_replacement(range(len(orderings)), v.n - 1):
                c = sum(1 for s in others if orderings[s].index(x) < orderings[s].index(y))
                before = tuple(sorted(others + (r,)))
                after = tuple(sorted(others + (r2,)))
                delta = v.prob_at(after, y) - v.prob_at(before, y)
                groups[c].append((others, delta))
            for c, members in groups.items():
                yield r, p, c, members


def isolation_deviation(v: RuleTable) -> AxiomReport:
    """Spread of the raised candidate's probability change across matched contexts."""
    best, witness = ZERO, None
    for r, p, c, members in _isolation_groups(v):
        lo = min(members, key=lambda t: t[1])
        hi = max(members, key=lambda t: t[1])
        d = hi[1] - lo[1]
        if d > best:
            best = d
            witness = {
                "acting_rank": r,
                "pos": p,
                "pair_count": c,
                "others": hi[0],
                "others_2": lo[0],
            }
    return AxiomReport("isolation", best, witness)


def tops_only_deviation(v: RuleTable) -> AxiomReport:
    """Spread of any candidate's probability across profiles with equal tops."""
    tops = _tops_of_ranks(v.m)
    groups: dict[tuple, list] = defaultdict(list)
    for key in v.keys():
        cnt = Counter(tops[r] for r in key)
        groups[tuple(cnt.get(x, 0) for x in range(v.m))].append(key)
    best, witness = ZERO, None
    for members in groups.values():
        if len(members) < 2:
            continue
        for x in range(v.m):
            lo = min(members, key=lambda k: v.prob_at(k, x))
            hi = max(members, key=lambda k: v.prob_at(k, x))
            d = v.prob_at(hi, x) - v.prob_at(lo, x)
            if d > best:
                best, witness = d, {"profile": hi, "profile_2": lo, "x": x}
    return AxiomReport("tops-only", best, witness)


def times_at_top_deviation(v: RuleTable) -> AxiomReport:
    """Spread of x's probability across profiles with the same x top-count."""
    tops = _tops_of_ranks(v.m)
    best, witness = ZERO, None
    for x in range(v.m):
        groups: dict[int, list] = defaultdict(list)
        for key in v.keys():
            groups[sum(1 for r in key if tops[r] == x)].append(key)
        for members in groups.values():
            if len(members) < 2:
                continue
            lo = min(members, key=lambda k: v.prob_at(k, x))
            hi = max(members, key=lambda k: v.prob_at(k, x))
            d = v.prob_at(hi, x) - v.prob_at(lo, x)
            if d > best:
                best, witness = d, {"profile": hi, "profile_2": lo, "x": x}
    return AxiomReport("times-at-top", best, witness)


# -- Canonical-profile table -----------------------------------------------------


def canonical_profile(m: int, n: int, x: int, j: int, base: Ordering) -> AnonKey:
    """j voters with x on top of `base`, the rest with x moved to its bottom."""
    rest = tuple(c for c in base if c != x)
    top_x = (x,) + rest
    bottom_x = rest + (x,)
    return canonicalize((top_x,) * j + (bottom_x,) * (n - j))


def vprime_table(v: RuleTable, base: Ordering | None = None) -> VPrimeTable:
    """Probability of x on the canonical profile with j top-x voters, for all (x, j)."""
    if v.m < 2:
        raise DomainError("canonical-profile table needs m >= 2 (no bottom to move to)")
    if base is None:
        base = tuple(range(v.m))
    if sorted(base) != list(range(v.m)):
        raise DomainError(f"base {base!r} is not an ordering of 0..{v.m - 1}")
    values = {}
    for x in range(v.m):
        for j in range(v.n + 1):
            key = canonical_profile(v.m, v.n, x, j, base)
            values[(x, j)] = v.prob_at(key, x)
    return VPrimeTable(v.m, v.n, tuple(base), values)


def candidate_anonymity_deviation(v: RuleTable, vp: VPrimeTable | None = None) -> AxiomReport:
    """Spread of the canonical-profile table across candidates at fixed top count."""
    vp = vp or vprime_table(v)
    best, witness = ZERO, None
    for j in range(v.n + 1):
        for x in range(v.m):
            for y in range(x + 1, v.m):
                d = abs(vp[(x, j)] - vp[(y, j)])
                if d > best:
                    best, witness = d, {"x": x, "y": y, "j": j}
    return AxiomReport("candidate-anonymity", best, witness)


def sliding_window_deviation(v: RuleTable, vp: VPrimeTable | None = None) -> AxiomReport:
    """How much a canonical-table increment of width l depends on its start point."""
    vp = vp or vprime_table(v)
    n = v.n
    best, witness = ZERO, None
    for x in range(v.m):
        for length in range(1, n + 1):
            starts = [j for j in range(n) if j + length <= n]
            for j in starts:
                for jp in starts:
                    d = abs(
                        (vp[(x, j + length)] - vp[(x, j)])
                        - (vp[(x, jp + length)] - vp[(x, jp)])
                    )
                    if d > best:
                        best, witness = d, {"x": x, "j": j, "jp": jp, "l": length}
    return AxiomReport("sliding-window", best, witness)


def vprime_sweep(v: RuleTable) -> tuple[Fraction, dict | None]:
    """Spread of the canonical-profile table over all m! base orderings (m <= 4)."""
    if v.m > 4:
        raise DomainError("base-ordering sweep is capped at m <= 4")
    tables = {base: vprime_table(v, base) for base in enumerate_orderings(v.m)}
    best, witness = ZERO, None
    for x in range(v.m):
        for j in range(v.n + 1):
            vals = [(vp[(x, j)], base) for base, vp in tables.items()]
            lo, hi = min(vals), max(vals)
            if hi[0] - lo[0] > best:
                best = hi[0] - lo[0]
                witness = {"x": x, "j": j, "base": hi[1], "base_2": lo[1]}
    return best, witness


# -- Distance to random dictatorship ----------------------------------------------


def distance_to_random_dictatorship(v: RuleTable) -> DistanceReport:
    tops = _tops_of_ranks(v.m)
    dict_rule = random_dictatorship(v.m, v.n)

    best, witness = ZERO, None
    for key in v.keys():
        for x in range(v.m):
            d = abs(v.prob_at(key, x) - dict_rule.prob_at(key, x))
            if d > best:
                best, witness = d, {"profile": key, "x": x}
    close = AxiomReport("distance", best, witness)

    if v.m >= 2:
        vp = vprime_table(v)
        best, witness = ZERO, None
        for key in v.keys():
            for x in range(v.m):
                j = sum(1 for r in key if tops[r] == x)
                d = abs(v.prob_at(key, x) - vp[(x, j)])
                if d > best:
                    best, witness = d, {"profile": key, "x": x, "j": j}
        table_vs_canon = AxiomReport("table-vs-canonical", best, witness)

        best, witness = ZERO, None
        for x in range(v.m):
            for j in range(v.n + 1):
                d = abs(vp[(x, j)] - Fraction(j, v.n))
                if d > best:
                    best, witness = d, {"x": x, "j": j}
        canon_vs_linear = AxiomReport("canonical-vs-linear", best, witness)
    else:
        table_vs_canon = AxiomReport("table-vs-canonical", ZERO, None)
        canon_vs_linear = AxiomReport("canonical-vs-linear", ZERO, None)

    return DistanceReport(close, table_vs_canon, canon_vs_linear)


# -- Witness replay ----------------------------------------------------------------


def replay_report(v: RuleTable, report: AxiomReport) -> Fraction:
    """Recompute a report's value from its witness alone."""
    w = report.witness
    if w is None:
        return ZERO
    name = report.axiom
    if name == "pareto":
        return v.prob_at(w["profile"], w["dominated"])
    if name in ("strong-unanimity", "weak-unanimity", "super-weak-unanimity"):
        return 1 - v.prob_at(w["profile"], w["x"])
    if name == "responsiveness":
        return abs(v.prob_at(w["swapped_profile"], w["z"]) - v.prob_at(w["profile"], w["z"]))
    if name == "isolation":
        return abs(_raise_delta(v, w["acting_rank"], w["pos"], w["others"])
                   - _raise_delta(v, w["acting_rank"], w["pos"], w["others_2"]))
    if name in ("tops-only", "times-at-top"):
        return abs(v.prob_at(w["profile"], w["x"]) - v.prob_at(w["profile_2"], w["x"]))
    if name == "candidate-anonymity":
        vp = vprime_table(v)
        return abs(vp[(w["x"], w["j"])] - vp[(w["y"], w["j"])])
    if name == "sliding-window":
        vp = vprime_table(v)
        x, j, jp, length = w["x"], w["j"], w["jp"], w["l"]
        return abs((vp[(x, j + length)] - vp[(x, j)]) - (vp[(x, jp + length)] - vp[(x, jp)]))
    if name == "distance":
        dict_rule = random_dictatorship(v.m, v.n)
        return abs(v.prob_at(w["profile"], w["x"]) - dict_rule.prob_at(w["profile"], w["x"]))
    if name == "table-vs-canonical":
        vp = vprime_table(v)
        return abs(v.prob_at(w["profile"], w["x"]) - vp[(w["x"], w["j"])])
    if name == "canonical-vs-linear":
        vp = vprime_table(v)
        return abs(vp[(w["x"], w["j"])] - Fraction(w["j"], v.n))
    raise DomainError(f"unknown axiom report {name!r}")


def _raise_delta(v: RuleTable, r: int, p: int, others: AnonKey) -> Fraction:
    orderings = enumerate_orderings(v.m)
    o = orderings[r]
    swapped = list(o)
    swapped[p], swapped[p + 1] = swapped[p + 1], swapped[p]
    r2 = orderings.index(tuple(swapped))
    y = o[p + 1]
    before = tuple(sorted(others + (r,)))
    after = tuple(sorted(others + (r2,)))
    return v.prob_at(after, y) - v.prob_at(before, y)


def run_axiom(v: RuleTable, name: str) -> AxiomReport:
    """Dispatch a single axiom checker by name."""
    dispatch = {
        "pareto": min_eps_pareto,
        "strong-unanimity": min_eps_strong_unanimity,
        "weak-unanimity": min_eps_weak_unanimity,
        "super-weak-unanimity": min_eps_super_weak_unanimity,
        "responsiveness": responsiveness_deviation,
        "isolation": isolation_deviation,
        "tops-only": tops_only_deviation,
        "times-at-top": times_at_top_deviation,
        "candidate-anonymity": candidate_anonymity_deviation,
        "sliding-window": sliding_window_deviation,
    }
    if name not in dispatch:
        raise DomainError(f"unknown axiom {name!r}; expected one of {', '.join(AXIOM_NAMES)}")
    return dispatch[name](v)
