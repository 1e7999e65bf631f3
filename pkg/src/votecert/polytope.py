"""Linear relaxation of the responsive/isolated/unanimous rules, and the
exact worst-case distance from that polytope to random dictatorship.

Variables are the lottery entries of an anonymous rule table, indexed by
(anonymous profile, candidate).  Pairwise responsiveness and pairwise
isolation are equality constraints; eps-strong unanimity gives inequality
constraints; lottery normalization and nonnegativity are always present.

`max_distance` maximizes +/-(v(x, P) - j/n) over the polytope, one linear
objective per (profile, candidate, sign).  Equalities are folded away by
exact elimination first, the parametrization is shifted so that random
dictatorship sits at the origin (making the all-slack basis feasible), and
objectives equivalent under candidate relabeling are solved once.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .lp import (
    Constraint,
    LinearProgram,
    REL_EQ,
    REL_GE,
    SlackBasisSimplex,
    reduce_equalities,
)
from .prefs import AnonKey, enumerate_orderings, enumerate_profiles
from .rules import RuleTable, random_dictatorship

ZERO = Fraction(0)
ONE = Fraction(1)

ALL_PARTS = frozenset({"responsive", "isolated", "unanimity"})
_PART_ALIASES = {"strong-unanimity": "unanimity"}


def normalize_parts(parts) -> frozenset[str]:
    out = set()
    for p in parts:
        p = _PART_ALIASES.get(p, p)
        if p not in ALL_PARTS:
            raise DomainError(f"unknown polytope part {p!r}; expected subset of {sorted(ALL_PARTS)}")
        out.add(p)
    return frozenset(out)


def _var(pidx: int, x: int, m: int) -> int:
    return pidx * m + x


def build_polytope(m: int, n: int, eps, parts=ALL_PARTS) -> LinearProgram:
    """Constraint system over rule-table variables; the objective is zero.

    At eps = 0 the unanimity constraints are emitted as equalities pinning
    the full lottery (mass 1 on the common top, 0 elsewhere), which is the
    same feasible set once normalization and nonnegativity are in play.
    """
    if m < 2:
        raise DomainError(f"polytope construction needs m >= 2, got m={m}")
    eps = Fraction(eps)
    if eps < 0:
        raise DomainError(f"eps must be nonnegative, got {eps}")
    parts = normalize_parts(parts)
    orderings = enumerate_orderings(m)
    keys = list(enumerate_profiles(m, n, anonymous=True))
    key_index = {k: i for i, k in enumerate(keys)}
    nvars = len(keys) * m

    rows: list[Constraint] = []
    seen: set = set()

    def add(coeffs: dict[int, Fraction], rel: str, rhs: Fraction):
        dense = [ZERO] * nvars
        for j, a in coeffs.items():
            dense[j] = a
        sig = (tuple(dense), rel, rhs)
        if sig in seen:
            return
        seen.add(sig)
        rows.append(Constraint(tuple(dense), rel, rhs))

    for k, key in enumerate(keys):
        add({_var(k, x, m): ONE for x in range(m)}, REL_EQ, ONE)

    if "responsive" in parts:
        for key in keys:
            for r in set(key):
                o = orderings[r]
                for p in range(m - 1):
                    swapped = list(o)
                    swapped[p], swapped[p + 1] = swapped[p + 1], swapped[p]
                    r2 = orderings.index(tuple(swapped))
                    lst = list(key)
                    lst.remove(r)
                    lst.append(r2)
                    key2 = tuple(sorted(lst))
                    a, b = key_index[key], key_index[key2]
                    pair = {o[p], o[p + 1]}
                    for z in range(m):
                        if z in pair:
                            continue
                        lo, hi = sorted((_var(a, z, m), _var(b, z, m)))
                        add({lo: ONE, hi: -ONE}, REL_EQ, ZERO)

    if "isolated" in parts:
        fact = len(orderings)
        for r, o in enumerate(orderings):
            for p in range(m - 1):
                x, y = o[p], o[p + 1]
                swapped = list(o)
                swapped[p], swapped[p + 1] = swapped[p + 1], swapped[p]
                r2 = orderings.index(tuple(swapped))
                groups: dict[int, list] = defaultdict(list)
                for others in itertools.combinations_with_replacement(range(fact), n - 1):
                    c = sum(1 for s in others if orderings[s].index(x) < orderings[s].index(y))
                    before = key_index[tuple(sorted(others + (r,)))]
                    after = key_index[tuple(sorted(others + (r2,)))]
                    groups[c].append((before, after))
                for members in groups.values():
                    for (b1, a1), (b2, a2) in zip(members, members[1:]):
                        coeffs: dict[int, Fraction] = defaultdict(lambda: ZERO)
                        coeffs[_var(a1, y, m)] += ONE
                        coeffs[_var(b1, y, m)] -= ONE
                        coeffs[_var(a2, y, m)] -= ONE
                        coeffs[_var(b2, y, m)] += ONE
                        coeffs = {j: a for j, a in coeffs.items() if a}
                        if coeffs:
                            add(coeffs, REL_EQ, ZERO)

    if "unanimity" in parts:
        for x in range(m):
            top_x_ranks = [r for r, o in enumerate(orderings) if o[0] == x]
            for key in itertools.combinations_with_replacement(top_x_ranks, n):
                k = key_index[key]
                if eps == 0:
                    add({_var(k, x, m): ONE}, REL_EQ, ONE)
                    for y in range(m):
                        if y != x:
                            add({_var(k, y, m): ONE}, REL_EQ, ZERO)
                else:
                    add({_var(k, x, m): ONE}, REL_GE, 1 - eps)

    names = tuple(f"p{k}/c{x}" for k in range(len(keys)) for x in range(m))
    return LinearProgram(
        n_vars=nvars,
        objective=tuple([ZERO] * nvars),
        constraints=tuple(rows),
        maximize=True,
        names=names,
    )


# -- Candidate-relabeling symmetry ----------------------------------------------


def _relabel_maps(m: int, n: int, keys, key_index):
    """For each candidate permutation, the induced map on (profile, candidate)."""
    orderings = enumerate_orderings(m)
    rank = {o: i for i, o in enumerate(orderings)}
    maps = []
    for perm in itertools.permutations(range(m)):
        rank_map = [rank[tuple(perm[c] for c in o)] for o in orderings]
        key_map = [key_index[tuple(sorted(rank_map[r] for r in key))] for key in keys]
        maps.append((perm, key_map))
    return maps


@dataclass(frozen=True)
class ObjectiveValue:
    profile: AnonKey
    candidate: int
    sign: int  # +1 maximizes v - j/n, -1 maximizes j/n - v
    value: Fraction


@dataclass(frozen=True)
class MaxDistanceResult:
    d_star: Fraction
    witness: RuleTable
    witness_profile: AnonKey
    witness_candidate: int
    witness_sign: int
    per_objective: tuple[ObjectiveValue, ...]
    free_dim: int
    n_solves: int
    all_witnesses: tuple[RuleTable, ...] = ()


def max_distance(m: int, n: int, eps, parts=ALL_PARTS, keep_witnesses: bool = False) -> MaxDistanceResult:
    """Exact worst case of |v(x, P) - j/n| over the polytope.

    j is the number of voters ranking x first in P, so j/n is the random
    dictatorship probability; the distance of the maximizing vertex to
    random dictatorship equals the returned optimum exactly.
    """
    eps = Fraction(eps)
    lp = build_polytope(m, n, eps, parts)
    keys = list(enumerate_profiles(m, n, anonymous=True))
    key_index = {k: i for i, k in enumerate(keys)}
    nvars = lp.n_vars

    dict_rule = random_dictatorship(m, n)
    x0 = [ZERO] * nvars
    for k, key in enumerate(keys):
        lot = dict_rule.lottery_at(key)
        for x in range(m):
            x0[_var(k, x, m)] = lot[x]

    eqs = []
    ineqs = []
    for c in lp.constraints:
        sparse = {j: a for j, a in enumerate(c.coeffs) if a}
        if c.rel == REL_EQ:
            eqs.append((sparse, c.rhs))
        else:
            ineqs.append((sparse, c.rel, c.rhs))

    for sparse, rhs in eqs:  # random dictatorship must satisfy every equality
        got = sum((a * x0[j] for j, a in sparse.items()), ZERO)
        if got != rhs:
            raise AssertionError(f"random dictatorship violates an equality row: {got} != {rhs}")

    reduced = reduce_equalities(eqs, nvars)
    if reduced is None:
        raise AssertionError("equality system inconsistent despite a feasible point")
    pivots, free = reduced
    d = len(free)
    free_pos = {f: i for i, f in enumerate(free)}

    # Affine parametrization x = x0 + Nt with t free; row_of[v] is N's row v.
    def nrow(var: int) -> list[Fraction]:
        row = [ZERO] * d
        if var in free_pos:
            row[free_pos[var]] = ONE
        else:
            prow, _ = pivots[var]
            for f, a in prow.items():
                row[free_pos[f]] = -a
        return row

    row_of = [nrow(vv) for vv in range(nvars)]

    # Inequalities in t-space as G t <= h with h >= 0 (t = 0 is the dictatorship).
    gmap: dict[tuple[Fraction, ...], Fraction] = {}

    def add_row(coeffs: list[Fraction], slack: Fraction):
        if slack < 0:
            raise AssertionError("random dictatorship violates an inequality row")
        key = tuple(coeffs)
        if any(key):
            if key not in gmap or slack < gmap[key]:
                gmap[key] = slack

    for var in range(nvars):  # x_var >= 0  ->  -N_var . t <= x0_var
        add_row([-a for a in row_of[var]], x0[var])
    for sparse, rel, rhs in ineqs:
        coeffs = [ZERO] * d
        const = ZERO
        for j, a in sparse.items():
            const += a * x0[j]
            rj = row_of[j]
            for i in range(d):
                if rj[i]:
                    coeffs[i] += a * rj[i]
        if rel == REL_GE:  # a.x >= rhs  ->  -(a.N) t <= a.x0 - rhs
            add_row([-a for a in coeffs], const - rhs)
        else:
            add_row(coeffs, rhs - const)

    G = [list(row) for row in gmap]
    h = [gmap[tuple(row)] for row in G]
    # Split t = u - w so both parts are nonnegative.
    G2 = [row + [-a for a in row] for row in G]
    simplex = SlackBasisSimplex(G2, h)

    reps: dict[tuple[int, int], list[tuple[int, int]]] = {}
    maps = _relabel_maps(m, n, keys, key_index)
    seen_pairs = set()
    for k in range(len(keys)):
        for x in range(m):
            if (k, x) in seen_pairs:
                continue
            orbit = {(key_map[k], perm[x]) for perm, key_map in maps}
            rep = min(orbit)
            reps[rep] = sorted(orbit)
            seen_pairs |= orbit

    best = None  # (value, rep, sign, t)
    rep_values: dict[tuple[tuple[int, int], int], Fraction] = {}
    witnesses = []
    n_solves = 0
    for rep in sorted(reps):
        k, x = rep
        cvec = row_of[_var(k, x, m)]
        for sign in (1, -1):
            obj = [sign * a for a in cvec] + [-sign * a for a in cvec]
            value, y = simplex.solve(obj)
            n_solves += 1
            rep_values[(rep, sign)] = value
            t = [y[i] - y[d + i] for i in range(d)]
            if best is None or value > best[0]:
                best = (value, rep, sign, t)
            if keep_witnesses:
                witnesses.append(_table_from_t(m, n, keys, x0, row_of, t))

    assert best is not None
    d_star, (bk, bx), bsign, bt = best
    witness = _table_from_t(m, n, keys, x0, row_of, bt)

    per_objective = []
    for rep, orbit in reps.items():
        for sign in (1, -1):
            value = rep_values[(rep, sign)]
            for k, x in orbit:
                per_objective.append(ObjectiveValue(keys[k], x, sign, value))
    per_objective.sort(key=lambda o: (o.profile, o.candidate, -o.sign))

    uniq = []
    if keep_witnesses:
        for w in witnesses:
            if w not in uniq:
                uniq.append(w)

    return MaxDistanceResult(
        d_star=d_star,
        witness=witness,
        witness_profile=keys[bk],
        witness_candidate=bx,
        witness_sign=bsign,
        per_objective=tuple(per_objective),
        free_dim=d,
        n_solves=n_solves,
        all_witnesses=tuple(uniq),
    )


def _table_from_t(m, n, keys, x0, row_of, t) -> RuleTable:
    table = {}
    for k, key in enumerate(keys):
        lot = []
        for x in range(m):
            var = _var(k, x, m)
            val = x0[var] + sum((a * ti for a, ti in zip(row_of[var], t)), ZERO)
            lot.append(val)
        table[key] = tuple(lot)
    return RuleTable(m, n, table)


# -- The traced distance constant ------------------------------------------------


@dataclass(frozen=True)
class TracedConstant:
    value: Fraction
    links: tuple[str, ...]


def traced_constant(m: int) -> TracedConstant:
    """Explicit multiple of eps bounding the polytope's distance to random
    dictatorship, assembled link by link with exact bookkeeping.

    Needs m >= 3: the candidate-symmetry and window-shift steps each park a
    third candidate on top while two others trade places.
    """
    if m < 3:
        raise DomainError(f"the constant chain needs m >= 3 candidates, got m={m}")
    k_tops = m  # profiles with equal top vectors differ by at most m*eps
    k_count = 2 * k_tops  # equal top-count profiles: route both through a canonical one
    k_canon = k_count  # table entry vs canonical-profile entry (j tops of x)
    k_sym = 14 * m  # canonical entries across candidates at fixed top count
    k_window = 64 * m  # increment of width l vs the same width elsewhere
    # Doubling argument on r_j = |v'(x, j) - j/n| at the maximizing j:
    #   j <= n/2:        r_2j >= 2 r_j - (k_window + 1) eps, so r_j <= (k_window + 1) eps
    #   j > n/2, j'=n-j: r_j' >= r_j - (k_window + 2) eps, then double j',
    #                    so r_j <= (3 k_window + 5) eps
    #   j in {0, n}:     r_j <= eps directly from eps-strong unanimity
    k_linear = 3 * k_window + 5
    value = Fraction(k_canon + k_linear)
    links = (
        f"tops-only window: m*eps = {k_tops}*eps",
        f"equal-top-count window: 2m*eps = {k_count}*eps",
        f"table vs canonical profile: 2m*eps = {k_canon}*eps",
        f"candidate symmetry of canonical table: 14m*eps = {k_sym}*eps",
        f"window-shift bound: 64m*eps = {k_window}*eps",
        f"doubling at j <= n/2: (64m + 1)*eps = {k_window + 1}*eps",
        f"reflection plus doubling at j > n/2: (3*64m + 5)*eps = {k_linear}*eps",
        f"assembly: (2m + 192m + 5)*eps = {value}*eps",
    )
    return TracedConstant(value, links)


def verify_theorem(m: int, n: int, eps, parts=ALL_PARTS) -> dict:
    """PASS iff the polytope's worst-case distance is at most C(m)*eps."""
    eps = Fraction(eps)
    if m < 3:
        return {
            "status": "SKIPPED",
            "reason": "hypothesis needs at least three candidates",
            "m": m,
            "n": n,
            "eps": eps,
        }
    constant = traced_constant(m)
    result = max_distance(m, n, eps, parts)
    bound = constant.value * eps
    status = "PASS" if result.d_star <= bound else "FAIL"
    return {
        "status": status,
        "m": m,
        "n": n,
        "eps": eps,
        "d_star": result.d_star,
        "constant": constant.value,
        "bound": bound,
        "links": constant.links,
        "result": result,
    }
