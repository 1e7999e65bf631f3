"""Candidates, strict preference orderings, profiles, and adjacent swaps.

An ordering is a tuple of candidate ids (best first) and is identified by
its lexicographic rank among all m! orderings.  An anonymous profile is the
sorted tuple of its voters' ordering ranks, which makes it a canonical
multiset key: voter permutations map to the same tuple.

Size caps come from VOTECERT_MAX_M and VOTECERT_MAX_PROFILES; successful
enumerations are cached per m, so overrides should be set before first use
(i.e. at process start).
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from functools import lru_cache

from .errors import CapExceededError, DomainError

Ordering = tuple[int, ...]
Profile = tuple[Ordering, ...]
AnonKey = tuple[int, ...]

DEFAULT_MAX_M = 5
DEFAULT_MAX_PROFILES = 10_000_000

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def max_m() -> int:
    """Candidate-count cap; override with VOTECERT_MAX_M."""
    return int(os.environ.get("VOTECERT_MAX_M", DEFAULT_MAX_M))


def max_profiles() -> int:
    """Profile-enumeration cap; override with VOTECERT_MAX_PROFILES."""
    return int(os.environ.get("VOTECERT_MAX_PROFILES", DEFAULT_MAX_PROFILES))


def candidate_names(m: int) -> tuple[str, ...]:
    """Default display names a, b, c, ..."""
    if m <= len(_ALPHABET):
        return tuple(_ALPHABET[:m])
    return tuple(f"c{i}" for i in range(m))


@lru_cache(maxsize=None)
def enumerate_orderings(m: int) -> tuple[Ordering, ...]:
    """All m! strict orderings of candidates 0..m-1, in lexicographic order."""
    if m < 1:
        raise DomainError(f"need at least one candidate, got m={m}")
    cap = max_m()
    if m > cap:
        raise CapExceededError(f"m={m} exceeds the candidate cap m <= {cap}")
    return tuple(itertools.permutations(range(m)))


@lru_cache(maxsize=None)
def _rank_of(m: int) -> dict[Ordering, int]:
    return {o: i for i, o in enumerate(enumerate_orderings(m))}


def ordering_rank(ordering: Ordering) -> int:
    """Lexicographic rank of an ordering among all orderings of its size."""
    try:
        return _rank_of(len(ordering))[tuple(ordering)]
    except KeyError:
        raise DomainError(f"{ordering!r} is not a permutation of 0..{len(ordering) - 1}") from None


def top(ordering: Ordering) -> int:
    """Highest-ranked candidate."""
    return ordering[0]


def raise_candidate(ordering: Ordering, y: int) -> Ordering:
    """Swap y with the candidate directly above it; the top is a fixed point."""
    if y not in ordering:
        raise DomainError(f"candidate {y} does not appear in {ordering!r}")
    i = ordering.index(y)
    if i == 0:
        return ordering
    ranks = list(ordering)
    ranks[i - 1], ranks[i] = ranks[i], ranks[i - 1]
    return tuple(ranks)


def upper_set(ordering: Ordering, k: int) -> frozenset[int]:
    """The k highest-ranked candidates."""
    if not 1 <= k <= len(ordering):
        raise DomainError(f"upper-set size k={k} outside 1..{len(ordering)}")
    return frozenset(ordering[:k])


def canonicalize(profile: Profile) -> AnonKey:
    """Anonymous-profile key: voters' ordering ranks, sorted."""
    m = len(profile[0])
    rank = _rank_of(m)
    return tuple(sorted(rank[o] for o in profile))


def anon_counts(key: AnonKey) -> Counter:
    """Multiplicity of each ordering rank in an anonymous profile."""
    return Counter(key)


def anon_expand(key: AnonKey, m: int) -> Profile:
    """One concrete profile realizing an anonymous key (ranks ascending)."""
    orderings = enumerate_orderings(m)
    return tuple(orderings[r] for r in key)


def count_anonymous_profiles(m: int, n: int) -> int:
    """Number of size-n multisets over the m! orderings."""
    return math.comb(math.factorial(m) + n - 1, n)


def enumerate_profiles(m: int, n: int, anonymous: bool = False):
    """Iterate all profiles for (m, n), deterministically and without duplicates.

    Ordered mode yields Profile tuples; anonymous mode yields AnonKey tuples.
    Raises CapExceededError when the enumeration would exceed the profile cap.
    """
    if n < 1:
        raise DomainError(f"need at least one voter, got n={n}")
    orderings = enumerate_orderings(m)
    cap = max_profiles()
    if anonymous:
        total = count_anonymous_profiles(m, n)
        if total > cap:
            raise CapExceededError(
                f"{total} anonymous profiles at (m={m}, n={n}) exceed the profile cap {cap}"
            )
        return itertools.combinations_with_replacement(range(len(orderings)), n)
    total = len(orderings) ** n
    if total > cap:
        raise CapExceededError(
            f"{total} ordered profiles at (m={m}, n={n}) exceed the profile cap {cap}"
        )
    return itertools.product(orderings, repeat=n)


def kendall_tau(a: Ordering, b: Ordering) -> int:
    """Number of candidate pairs ordered differently by a and b."""
    pos = {c: i for i, c in enumerate(b)}
    seq = [pos[c] for c in a]
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


def swap_path(
    a: Profile, b: Profile, forbidden: int | None = None
) -> list[tuple[int, tuple[int, int]]]:
    """Adjacent-swap schedule turning profile a into profile b.

    Voters are processed in index order; within a voter, the candidate the
    target wants at the highest disagreeing position is bubbled up one
    adjacent swap at a time.  Each swap fixes one inversion, so the path
    length is the summed Kendall-tau distance (minimal).

    Swaps are reported as (voter, (above, below)): the two candidates
    adjacent at swap time, which exchange places.

    When `forbidden` is given, the set of candidates ranked above it must
    agree between a_i and b_i for every voter i (equal position alone does
    not admit a path that never moves it); the schedule then never touches
    the forbidden candidate.
    """
    if len(a) != len(b):
        raise DomainError(f"profiles have different sizes {len(a)} and {len(b)}")
    path: list[tuple[int, tuple[int, int]]] = []
    for voter, (src, tgt) in enumerate(zip(a, b)):
        if set(src) != set(tgt) or len(src) != len(tgt):
            raise DomainError(f"voter {voter}: orderings use different candidate sets")
        if forbidden is not None:
            if forbidden not in src:
                raise DomainError(f"forbidden candidate {forbidden} not in voter {voter}'s ordering")
            fa, fb = src.index(forbidden), tgt.index(forbidden)
            if fa != fb or set(src[:fa]) != set(tgt[:fb]):
                raise DomainError(
                    f"voter {voter}: placement of forbidden candidate {forbidden} "
                    "differs between the two profiles"
                )
        cur = list(src)
        for pos, want in enumerate(tgt):
            q = cur.index(want)
            while q > pos:
                above, below = cur[q - 1], cur[q]
                cur[q - 1], cur[q] = below, above
                path.append((voter, (above, below)))
                q -= 1
    return path


def parse_ordering(text: str, names: tuple[str, ...]) -> Ordering:
    """Parse "a>b>c" into a tuple of candidate ids."""
    ids = {name: i for i, name in enumerate(names)}
    parts = [p.strip() for p in text.split(">")]
    try:
        ordering = tuple(ids[p] for p in parts)
    except KeyError as exc:
        raise DomainError(f"unknown candidate {exc.args[0]!r} in ordering {text!r}") from None
    if sorted(ordering) != list(range(len(names))):
        raise DomainError(f"ordering {text!r} is not a permutation of all {len(names)} candidates")
    return ordering


def format_ordering(ordering: Ordering, names: tuple[str, ...]) -> str:
    return ">".join(names[c] for c in ordering)


def parse_profile(text: str, names: tuple[str, ...]) -> Profile:
    """Parse "a>b>c;b>a>c" into a profile."""
    return tuple(parse_ordering(part, names) for part in text.split(";"))


def format_profile(profile: Profile, names: tuple[str, ...]) -> str:
    return ";".join(format_ordering(o, names) for o in profile)
