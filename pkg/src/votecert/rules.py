"""Anonymous randomized voting rules as exact-rational lottery tables.

A rule table maps every anonymous profile for a fixed (m, n) to a lottery
over candidates.  All probabilities are Fractions; lotteries must sum to
exactly 1 and the table must be total, both checked at construction.
"""

from __future__ import annotations

import json
import os
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ValidationError
from .prefs import (
    AnonKey,
    Ordering,
    Profile,
    candidate_names,
    canonicalize,
    enumerate_orderings,
    enumerate_profiles,
    format_ordering,
    parse_ordering,
    upper_set,
)

Lottery = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def validate_lottery(m: int, probs) -> Lottery:
    """Check length, range, and exact normalization; return as a tuple."""
    lot = tuple(Fraction(p) for p in probs)
    if len(lot) != m:
        raise ValidationError(f"lottery has {len(lot)} entries, expected {m}")
    for p in lot:
        if p < 0 or p > 1:
            raise ValidationError(f"lottery entry {p} outside [0, 1]")
    if sum(lot) != 1:
        raise ValidationError(f"lottery sums to {sum(lot)}, not 1")
    return lot


class RuleTable:
    """Total map from anonymous profiles to exact lotteries."""

    __slots__ = ("m", "n", "names", "table")

    def __init__(self, m: int, n: int, table: dict[AnonKey, Lottery], names=None):
        if m < 1 or n < 1:
            raise DomainError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
        self.m = m
        self.n = n
        self.names = tuple(names) if names is not None else candidate_names(m)
        if len(self.names) != m or len(set(self.names)) != m:
            raise ValidationError(f"need {m} distinct candidate names, got {self.names!r}")
        checked: dict[AnonKey, Lottery] = {}
        for key in enumerate_profiles(m, n, anonymous=True):
            if key not in table:
                raise ValidationError(f"rule table is missing profile {key}")
            checked[key] = validate_lottery(m, table[key])
        if len(table) != len(checked):
            extra = sorted(set(table) - set(checked))[0]
            raise ValidationError(f"rule table lists unknown profile {extra}")
        self.table = checked

    def __eq__(self, other):
        return (
            isinstance(other, RuleTable)
            and (self.m, self.n) == (other.m, other.n)
            and self.table == other.table
        )

    def __repr__(self):
        return f"RuleTable(m={self.m}, n={self.n}, profiles={len(self.table)})"

    def keys(self):
        return self.table.keys()

    def lottery_at(self, key: AnonKey) -> Lottery:
        return self.table[key]

    def prob_at(self, key: AnonKey, x: int) -> Fraction:
        return self.table[key][x]

    def lottery(self, profile: Profile) -> Lottery:
        self._check_profile(profile)
        return self.table[canonicalize(profile)]

    def prob(self, profile: Profile, x: int) -> Fraction:
        """Selection probability of candidate x on a (possibly ordered) profile."""
        if not 0 <= x < self.m:
            raise DomainError(f"candidate {x} outside 0..{self.m - 1}")
        return self.lottery(profile)[x]

    def upper_mass_at(self, key: AnonKey, candidates) -> Fraction:
        lot = self.table[key]
        return sum((lot[x] for x in candidates), ZERO)

    def _check_profile(self, profile: Profile):
        if len(profile) != self.n or any(len(o) != self.m for o in profile):
            raise DomainError(
                f"profile shape does not match rule dimensions (m={self.m}, n={self.n})"
            )


# -- Built-in rules ----------------------------------------------------------


def _tops(m: int) -> list[int]:
    return [o[0] for o in enumerate_orderings(m)]


def random_dictatorship(m: int, n: int) -> RuleTable:
    """Pick a voter uniformly at random and elect her top choice."""
    tops = _tops(m)
    table = {}
    for key in enumerate_profiles(m, n, anonymous=True):
        cnt = Counter(tops[r] for r in key)
        table[key] = tuple(Fraction(cnt.get(x, 0), n) for x in range(m))
    return RuleTable(m, n, table)


def uniform_rule(m: int, n: int) -> RuleTable:
    """Ignore the votes; elect uniformly at random."""
    lot = tuple(Fraction(1, m) for _ in range(m))
    table = {key: lot for key in enumerate_profiles(m, n, anonymous=True)}
    return RuleTable(m, n, table)


def plurality_uniform_tiebreak(m: int, n: int) -> RuleTable:
    """Most top votes wins; ties are broken uniformly among the tied."""
    tops = _tops(m)
    table = {}
    for key in enumerate_profiles(m, n, anonymous=True):
        cnt = Counter(tops[r] for r in key)
        best = max(cnt.values())
        winners = [x for x in range(m) if cnt.get(x, 0) == best]
        share = Fraction(1, len(winners))
        table[key] = tuple(share if x in winners else ZERO for x in range(m))
    return RuleTable(m, n, table)


def plurality_fixed_tiebreak(m: int, n: int) -> RuleTable:
    """Most top votes wins; ties go to the lowest candidate id (deterministic)."""
    tops = _tops(m)
    table = {}
    for key in enumerate_profiles(m, n, anonymous=True):
        cnt = Counter(tops[r] for r in key)
        best = max(cnt.values())
        winner = min(x for x in range(m) if cnt.get(x, 0) == best)
        table[key] = tuple(ONE if x == winner else ZERO for x in range(m))
    return RuleTable(m, n, table)


def rank_rule(m: int, n: int, r: int) -> RuleTable:
    """Pick a voter uniformly at random and elect her r-th ranked candidate."""
    if not 1 <= r <= m:
        raise DomainError(f"rank r={r} outside 1..{m}")
    orderings = enumerate_orderings(m)
    table = {}
    for key in enumerate_profiles(m, n, anonymous=True):
        cnt = Counter(orderings[idx][r - 1] for idx in key)
        table[key] = tuple(Fraction(cnt.get(x, 0), n) for x in range(m))
    return RuleTable(m, n, table)


def pair_rule(m: int, n: int, x: int, y: int) -> RuleTable:
    """Split all mass between x and y by how many voters rank x above y."""
    if x == y or not (0 <= x < m and 0 <= y < m):
        raise DomainError(f"need two distinct candidates in 0..{m - 1}, got {x}, {y}")
    orderings = enumerate_orderings(m)
    prefers_x = [o.index(x) < o.index(y) for o in orderings]
    table = {}
    for key in enumerate_profiles(m, n, anonymous=True):
        cx = sum(1 for idx in key if prefers_x[idx])
        lot = [ZERO] * m
        lot[x] = Fraction(cx, n)
        lot[y] = Fraction(n - cx, n)
        table[key] = tuple(lot)
    return RuleTable(m, n, table)


def constant_rule(m: int, n: int, lottery) -> RuleTable:
    """Ignore the votes; always play the given lottery."""
    lot = validate_lottery(m, lottery)
    table = {key: lot for key in enumerate_profiles(m, n, anonymous=True)}
    return RuleTable(m, n, table)


# -- Combinators and comparisons ---------------------------------------------


def mixture(rules: list[RuleTable], weights) -> RuleTable:
    """Pointwise convex combination of rules over the same (m, n)."""
    if not rules:
        raise DomainError("mixture needs at least one rule")
    w = [Fraction(q) for q in weights]
    if len(w) != len(rules):
        raise DomainError(f"{len(rules)} rules but {len(w)} weights")
    if any(q <= 0 for q in w):
        raise DomainError("mixture weights must be strictly positive")
    if sum(w) != 1:
        raise DomainError(f"mixture weights sum to {sum(w)}, not 1")
    m, n = rules[0].m, rules[0].n
    for v in rules[1:]:
        if (v.m, v.n) != (m, n):
            raise DomainError("mixture requires rules with identical dimensions")
    table = {}
    for key in rules[0].keys():
        table[key] = tuple(
            sum((q * v.prob_at(key, x) for q, v in zip(w, rules)), ZERO) for x in range(m)
        )
    return RuleTable(m, n, table, rules[0].names)


def closeness(v: RuleTable, w: RuleTable) -> Fraction:
    """Smallest eps such that the two tables differ by at most eps everywhere."""
    return closeness_witness(v, w)[0]


def closeness_witness(v: RuleTable, w: RuleTable) -> tuple[Fraction, AnonKey | None, int | None]:
    if (v.m, v.n) != (w.m, w.n):
        raise DomainError("closeness requires rules with identical dimensions")
    best, bkey, bx = ZERO, None, None
    for key in v.keys():
        lv, lw = v.lottery_at(key), w.lottery_at(key)
        for x in range(v.m):
            d = abs(lv[x] - lw[x])
            if d > best:
                best, bkey, bx = d, key, x
    return best, bkey, bx


def perturb(v: RuleTable, delta, seed: int) -> RuleTable:
    """Move each lottery toward a seeded pseudo-random lottery by factor delta."""
    delta = Fraction(delta)
    if not 0 <= delta <= 1:
        raise DomainError(f"delta={delta} outside [0, 1]")
    rng = random.Random(seed)
    table = {}
    for key in sorted(v.keys()):
        weights = [rng.randrange(1, 1001) for _ in range(v.m)]
        total = sum(weights)
        noise = [Fraction(wt, total) for wt in weights]
        lot = v.lottery_at(key)
        table[key] = tuple((1 - delta) * lot[x] + delta * noise[x] for x in range(v.m))
    return RuleTable(v.m, v.n, table, v.names)


# -- Structural predicates ---------------------------------------------------


@dataclass(frozen=True)
class StructureVerdict:
    holds: bool
    detail: str
    witness: dict | None = None


def is_deterministic(v: RuleTable) -> bool:
    return all(max(lot) == 1 for lot in v.table.values())


def _winner(lot: Lottery) -> int:
    return lot.index(ONE)


def is_dictatorial_deterministic(v: RuleTable) -> StructureVerdict:
    """Does some fixed voter index always get her top choice elected?

    Anonymous tables with n >= 2 can only satisfy this degenerately, so for
    those the verdict carries a per-voter counterexample profile instead.
    """
    if not is_deterministic(v):
        raise DomainError("dictatorship predicate is defined for deterministic rules only")
    counterexamples: dict[int, Profile] = {}
    for i in range(v.n):
        for profile in enumerate_profiles(v.m, v.n):
            if _winner(v.lottery(profile)) != profile[i][0]:
                counterexamples[i] = profile
                break
        else:
            return StructureVerdict(True, f"voter {i} always gets her top choice", {"voter": i})
    return StructureVerdict(
        False,
        "every voter index has a profile where the winner is not her top choice",
        {"counterexamples": counterexamples},
    )


def is_duple(v: RuleTable) -> StructureVerdict:
    """Is all probability mass confined to one fixed pair of candidates?"""
    seen: dict[int, AnonKey] = {}
    for key in v.keys():
        lot = v.lottery_at(key)
        for x in range(v.m):
            if lot[x] > 0 and x not in seen:
                seen[x] = key
    support = sorted(seen)
    if len(support) <= 2:
        return StructureVerdict(True, f"support is {support}", {"pair": tuple(support)})
    return StructureVerdict(
        False,
        f"support {support} has more than two candidates",
        {"support": support, "examples": seen},
    )


# -- Utility functions --------------------------------------------------------


def is_consistent_utility(u, ordering: Ordering) -> bool:
    """Strict consistency: u decreases strictly along the ordering."""
    vals = [Fraction(q) for q in u]
    if len(vals) != len(ordering):
        return False
    if any(q < 0 or q > 1 for q in vals):
        return False
    return all(vals[ordering[i]] > vals[ordering[i + 1]] for i in range(len(ordering) - 1))


def upper_set_utility(ordering: Ordering, k: int, rho: Fraction) -> tuple[Fraction, ...]:
    """Indicator of the top-k candidates plus a rank bonus, scaled into [0, 1].

    For any 0 < rho <= 1 the result is strictly consistent with `ordering`.
    """
    m = len(ordering)
    up = upper_set(ordering, k)
    scale = 1 / (1 + rho * Fraction(m - 1, m))
    u = [ZERO] * m
    for pos, cand in enumerate(ordering):
        bonus = rho * Fraction(m - 1 - pos, m)
        u[cand] = scale * ((1 if cand in up else 0) + bonus)
    return tuple(u)


# -- Rule files ---------------------------------------------------------------


def rule_to_json_obj(v: RuleTable) -> dict:
    entries = []
    for key in sorted(v.keys()):
        orderings = enumerate_orderings(v.m)
        entries.append(
            {
                "profile": [format_ordering(orderings[r], v.names) for r in key],
                "lottery": [str(p) for p in v.lottery_at(key)],
            }
        )
    return {"m": v.m, "n": v.n, "candidates": list(v.names), "entries": entries}


def rule_from_json_obj(obj: dict) -> RuleTable:
    try:
        m, n = int(obj["m"]), int(obj["n"])
        names = tuple(obj["candidates"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed rule file: missing {exc}") from None
    if len(names) != m:
        raise ValidationError(f"expected {m} candidate names, got {len(names)}")
    table: dict[AnonKey, Lottery] = {}
    for entry in entries:
        profile = tuple(parse_ordering(text, names) for text in entry["profile"])
        if len(profile) != n:
            raise ValidationError(f"entry lists {len(profile)} orderings, expected {n}")
        key = canonicalize(profile)
        if key in table:
            raise ValidationError(f"duplicate entry for profile {entry['profile']}")
        try:
            lottery = [Fraction(text) for text in entry["lottery"]]
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational in lottery: {exc}") from None
        table[key] = validate_lottery(m, lottery)
    return RuleTable(m, n, table, names)


def save_rule(v: RuleTable, path: str) -> None:
    text = json.dumps(rule_to_json_obj(v), indent=2, sort_keys=True) + "\n"
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def load_rule(path: str) -> RuleTable:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"rule file is not valid JSON: {exc}") from None
    return rule_from_json_obj(obj)
