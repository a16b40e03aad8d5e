"""Preference relations, profiles, majority margins and Kelly comparisons.

Alternatives are small integers ``0..m-1``; a universe attaches display
labels to them.  A relation stores one verdict per unordered pair ``(i, j)``
with ``i < j``, in lexicographic pair order:

* ``+1``  i is strictly preferred to j
* `` 0``  indifference
* ``-1``  j is strictly preferred to i

Relations need not be transitive.  Weak orders and linear orders are the
transitive special cases.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CapExceeded, ValidationError

STRICT = "strict"
WEAK = "weak"
GENERAL = "general"
TOURNAMENT = "tournament"
MODES = (STRICT, WEAK, GENERAL, TOURNAMENT)

DEFAULT_CAP = 10**7

# aPb < aIb < bPa
VERDICT_ORDER = (1, 0, -1)


def enumeration_cap() -> int:
    """Profile/relation cap, overridable through ``CHOICELAB_CAP``."""
    raw = os.environ.get("CHOICELAB_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(float(raw))
    except ValueError:
        raise ValidationError(f"CHOICELAB_CAP is not a number: {raw!r}") from None


@lru_cache(maxsize=None)
def pairs(m: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(m), 2))


@lru_cache(maxsize=None)
def _pair_index(m: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pairs(m))}


def default_labels(m: int) -> tuple[str, ...]:
    return tuple(f"a{k + 1}" for k in range(m))


@dataclass(frozen=True)
class Alternative:
    id: int
    label: Optional[str] = None


@dataclass(frozen=True)
class PreferenceRelation:
    """A complete binary relation over ``range(m)``.

    ``mode`` records how the relation was produced; it does not take part in
    equality, so a weak order built from tiers equals the same verdicts
    produced by the general enumeration.
    """

    m: int
    verdicts: tuple[int, ...]
    mode: str = field(default=GENERAL, compare=False)

    def __post_init__(self):
        if len(self.verdicts) != self.m * (self.m - 1) // 2:
            raise ValidationError(
                f"expected {self.m * (self.m - 1) // 2} verdicts, got {len(self.verdicts)}"
            )
        if any(v not in (-1, 0, 1) for v in self.verdicts):
            raise ValidationError(f"verdicts must be -1, 0 or 1: {self.verdicts}")
        if self.mode in (WEAK, STRICT) and not self.is_transitive():
            raise ValidationError(f"relation {self.verdicts} is not transitive")
        if self.mode in (STRICT, TOURNAMENT) and 0 in self.verdicts:
            raise ValidationError(f"relation {self.verdicts} has indifferences")

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """``matrix[a][b]`` is +1 if a P b, -1 if b P a, 0 otherwise."""
        try:
            return self.__dict__["_matrix"]
        except KeyError:
            pass
        rows = [[0] * self.m for _ in range(self.m)]
        for (a, b), v in zip(pairs(self.m), self.verdicts):
            rows[a][b] = v
            rows[b][a] = -v
        mat = tuple(tuple(r) for r in rows)
        object.__setattr__(self, "_matrix", mat)
        return mat

    def compare(self, a: int, b: int) -> int:
        """+1 if a P b, -1 if b P a, 0 if a I b (including a == b)."""
        return self.matrix[a][b]

    def weakly_prefers(self, a: int, b: int) -> bool:
        return self.compare(a, b) >= 0

    def strictly_prefers(self, a: int, b: int) -> bool:
        return self.compare(a, b) > 0

    def indifferent(self, a: int, b: int) -> bool:
        return self.compare(a, b) == 0

    def with_verdict(self, a: int, b: int, v: int) -> PreferenceRelation:
        """Copy with the (a, b) comparison set to ``v`` (+1 means a P b)."""
        if a == b:
            raise ValidationError("a pair needs two distinct alternatives")
        if a > b:
            a, b, v = b, a, -v
        vs = list(self.verdicts)
        vs[_pair_index(self.m)[(a, b)]] = v
        return PreferenceRelation(self.m, tuple(vs))

    def is_transitive(self) -> bool:
        m = self.m
        for a, b, c in itertools.permutations(range(m), 3):
            if self.compare(a, b) >= 0 and self.compare(b, c) >= 0 and self.compare(a, c) < 0:
                return False
        return True

    def is_strict(self) -> bool:
        return 0 not in self.verdicts

    def is_linear(self) -> bool:
        return self.is_strict() and self.is_transitive()

    def indifference_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(p for p, v in zip(pairs(self.m), self.verdicts) if v == 0)

    def tiers(self) -> list[list[int]]:
        """Indifference classes best-first; only defined for weak orders."""
        if not self.is_transitive():
            raise ValidationError("tiers are only defined for weak orders")
        better = [sum(1 for b in range(self.m) if self.compare(b, a) > 0) for a in range(self.m)]
        levels = sorted(set(better))
        return [[a for a in range(self.m) if better[a] == lv] for lv in levels]

    def top(self, within: Iterable[int]) -> list[int]:
        """Maximal elements of ``within``: nobody in it is strictly better."""
        within = list(within)
        return [a for a in within if not any(self.compare(b, a) > 0 for b in within)]

    def restrict(self, keep: Sequence[int]) -> PreferenceRelation:
        """The relation on ``keep`` reindexed to ``0..len(keep)-1``."""
        k = len(keep)
        vs = tuple(self.compare(keep[i], keep[j]) for i, j in pairs(k))
        return PreferenceRelation(k, vs)


def full_indifference(m: int) -> PreferenceRelation:
    return PreferenceRelation(m, (0,) * (m * (m - 1) // 2))


def relation_from_tiers(tiers: Sequence[Iterable[int]], m: Optional[int] = None) -> PreferenceRelation:
    """Weak order in which earlier tiers beat later ones."""
    tiers = [list(t) for t in tiers]
    flat = [a for t in tiers for a in t]
    if m is None:
        m = len(flat)
    if any(not t for t in tiers):
        raise ValidationError("empty tier")
    if len(set(flat)) != len(flat):
        dup = sorted({a for a in flat if flat.count(a) > 1})
        raise ValidationError(f"tiers overlap on {dup}")
    if sorted(flat) != list(range(m)):
        missing = sorted(set(range(m)) - set(flat))
        extra = sorted(set(flat) - set(range(m)))
        raise ValidationError(f"tiers do not partition the universe (missing {missing}, extra {extra})")
    level = {a: k for k, t in enumerate(tiers) for a in t}
    vs = []
    for a, b in pairs(m):
        vs.append((level[a] < level[b]) - (level[a] > level[b]))
    return PreferenceRelation(m, tuple(vs), WEAK)


def relation_from_ranking(order: Sequence[int]) -> PreferenceRelation:
    rel = relation_from_tiers([[a] for a in order])
    return PreferenceRelation(rel.m, rel.verdicts, STRICT)


@dataclass(frozen=True)
class Profile:
    labels: tuple[str, ...]
    voters: tuple[PreferenceRelation, ...]

    def __post_init__(self):
        if not self.voters:
            raise ValidationError("a profile needs at least one voter")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("labels must be unique")
        for k, r in enumerate(self.voters):
            if r.m != len(self.labels):
                raise ValidationError(f"voter {k + 1} covers {r.m} alternatives, universe has {len(self.labels)}")

    @classmethod
    def of(cls, voters: Sequence[PreferenceRelation], labels: Optional[Sequence[str]] = None) -> Profile:
        voters = tuple(voters)
        if labels is None:
            labels = default_labels(voters[0].m if voters else 0)
        return cls(tuple(labels), voters)

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.voters)

    @property
    def universe(self) -> tuple[Alternative, ...]:
        return tuple(Alternative(k, lab) for k, lab in enumerate(self.labels))

    @property
    def alternatives(self) -> frozenset[int]:
        return frozenset(range(self.m))

    def replace(self, i: int, rel: PreferenceRelation) -> Profile:
        """Copy with voter ``i`` (0-based) replaced."""
        vs = list(self.voters)
        vs[i] = rel
        return Profile(self.labels, tuple(vs))

    def append(self, rel: PreferenceRelation) -> Profile:
        return Profile(self.labels, self.voters + (rel,))

    def label_set(self, xs: Iterable[int]) -> list[str]:
        return [self.labels[x] for x in sorted(xs)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown label {label!r}") from None


def check_feasible(profile: Profile, A: Iterable[int]) -> frozenset[int]:
    A = frozenset(A)
    if not A:
        raise ValidationError("feasible set is empty")
    if not A <= profile.alternatives:
        raise ValidationError(f"feasible set {sorted(A)} is not within the universe 0..{profile.m - 1}")
    return A


def restrict(profile: Profile, A: Iterable[int]) -> Profile:
    """Profile over ``A`` only; alternatives are reindexed in increasing order."""
    keep = sorted(check_feasible(profile, A))
    return Profile(
        tuple(profile.labels[a] for a in keep),
        tuple(r.restrict(keep) for r in profile.voters),
    )


@dataclass(frozen=True)
class MarginMatrix:
    """Skew-symmetric majority margins over ``alternatives`` (universe ids)."""

    alternatives: tuple[int, ...]
    entries: tuple[tuple[int, ...], ...]
    n: int
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        k = len(self.alternatives)
        if len(self.entries) != k or any(len(row) != k for row in self.entries):
            raise ValidationError("margin matrix shape does not match its alternatives")
        for i in range(k):
            if self.entries[i][i] != 0:
                raise ValidationError("margin matrix diagonal must be zero")
            for j in range(i + 1, k):
                if self.entries[i][j] != -self.entries[j][i]:
                    raise ValidationError("margin matrix is not skew-symmetric")
        object.__setattr__(self, "_pos", {a: i for i, a in enumerate(self.alternatives)})

    @property
    def parity(self) -> str:
        return "odd" if self.n % 2 else "even"

    def g(self, a: int, b: int) -> int:
        return self.entries[self._pos[a]][self._pos[b]]

    def tied_pair(self, within: Optional[Iterable[int]] = None) -> Optional[tuple[int, int]]:
        alts = sorted(within) if within is not None else self.alternatives
        for a, b in itertools.combinations(alts, 2):
            if self.g(a, b) == 0:
                return (a, b)
        return None

    def is_tournament(self, within: Optional[Iterable[int]] = None) -> bool:
        return self.tied_pair(within) is None

    def submatrix(self, B: Iterable[int]) -> MarginMatrix:
        keep = tuple(sorted(B))
        return MarginMatrix(keep, tuple(tuple(self.g(a, b) for b in keep) for a in keep), self.n)

    def key(self) -> tuple:
        return (self.alternatives, self.entries)

    @classmethod
    def from_function(cls, alternatives: Iterable[int], g, n: int = 1) -> MarginMatrix:
        alts = tuple(sorted(alternatives))
        return cls(alts, tuple(tuple(0 if a == b else g(a, b) for b in alts) for a in alts), n)


def margin_matrix(profile: Profile, A: Optional[Iterable[int]] = None) -> MarginMatrix:
    alts = tuple(sorted(check_feasible(profile, A) if A is not None else profile.alternatives))
    k = len(alts)
    rows = [[0] * k for _ in range(k)]
    idx = pairs(k)
    for r in profile.voters:
        mat = r.matrix
        for i, j in idx:
            v = mat[alts[i]][alts[j]]
            rows[i][j] += v
            rows[j][i] -= v
    return MarginMatrix(alts, tuple(tuple(row) for row in rows), profile.n)


def condorcet_winner(margins: MarginMatrix) -> Optional[int]:
    for a in margins.alternatives:
        if all(margins.g(a, b) > 0 for b in margins.alternatives if b != a):
            return a
    return None


def weaken_variants(
    rel: PreferenceRelation, a: int, b: int, transitive_only: bool = False
) -> list[PreferenceRelation]:
    """The relations in which ``a`` is weakly strengthened against ``b``.

    Order: unchanged, then (a, b) added, then (b, a) removed with (a, b) added.
    """
    if a == b:
        raise ValidationError("weaken_variants needs a != b")
    out = [rel]
    for cand in (
        rel.with_verdict(a, b, max(rel.compare(a, b), 0)),
        rel.with_verdict(a, b, 1),
    ):
        if cand not in out:
            out.append(cand)
    if transitive_only:
        out = [r for r in out if r.is_transitive()]
    return out


def kelly_weak(X: Iterable[int], Y: Iterable[int], rel: PreferenceRelation) -> bool:
    """X is weakly Kelly-preferred to Y: every x R every y."""
    Y = tuple(Y)
    return all(rel.compare(x, y) >= 0 for x in X for y in Y)


def kelly_strict(X: Iterable[int], Y: Iterable[int], rel: PreferenceRelation) -> bool:
    X, Y = tuple(X), tuple(Y)
    return kelly_weak(X, Y, rel) and any(rel.compare(x, y) > 0 for x in X for y in Y)


def _fubini(m: int) -> int:
    # ordered set partitions
    a = [1]
    for k in range(1, m + 1):
        a.append(sum(math.comb(k, j) * a[k - j] for j in range(1, k + 1)))
    return a[m]


def relation_count(m: int, mode: str) -> int:
    p = m * (m - 1) // 2
    return {
        STRICT: math.factorial(m),
        WEAK: _fubini(m),
        GENERAL: 3**p,
        TOURNAMENT: 2**p,
    }[_check_mode(mode)]


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValidationError(f"unknown relation mode {mode!r}; expected one of {MODES}")
    return mode


def _ordered_partitions(items: tuple[int, ...]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    for r in range(1, len(items) + 1):
        for first in itertools.combinations(items, r):
            rest = tuple(x for x in items if x not in first)
            for tail in _ordered_partitions(rest):
                yield [list(first)] + tail


def _verdict_key(rel: PreferenceRelation) -> tuple[int, ...]:
    return tuple(VERDICT_ORDER.index(v) for v in rel.verdicts)


@lru_cache(maxsize=64)
def _relations(m: int, mode: str) -> tuple[PreferenceRelation, ...]:
    p = m * (m - 1) // 2
    if mode == GENERAL:
        return tuple(PreferenceRelation(m, vs) for vs in itertools.product(VERDICT_ORDER, repeat=p))
    if mode == TOURNAMENT:
        return tuple(PreferenceRelation(m, vs, TOURNAMENT) for vs in itertools.product((1, -1), repeat=p))
    if mode == STRICT:
        rels = [relation_from_ranking(order) for order in itertools.permutations(range(m))]
    else:
        rels = [relation_from_tiers(t, m) for t in _ordered_partitions(tuple(range(m)))]
    return tuple(sorted(rels, key=_verdict_key))


def enumerate_relations(m: int, mode: str) -> Iterator[PreferenceRelation]:
    """All relations of a mode over ``m`` alternatives, in verdict-lexicographic order."""
    _check_mode(mode)
    if m < 1:
        raise ValidationError("m must be at least 1")
    count = relation_count(m, mode)
    if count > enumeration_cap():
        raise CapExceeded(f"{count} {mode} relations on {m} alternatives exceed the cap {enumeration_cap()}")
    return iter(_relations(m, mode))


@dataclass(frozen=True)
class DomainSpec:
    """A finite profile domain: ``n`` voters, ``m`` alternatives, one relation mode.

    ``samples`` switches to seeded sampling; ``None`` means exhaustive.
    """

    n: int
    m: int
    mode: str = GENERAL
    samples: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        _check_mode(self.mode)
        if self.n < 1 or self.m < 1:
            raise ValidationError("a domain needs n >= 1 and m >= 1")
        if self.samples is not None and self.seed is None:
            raise ValidationError("sampled domains need an explicit seed")

    @property
    def exhaustive(self) -> bool:
        return self.samples is None

    def size(self) -> int:
        if not self.exhaustive:
            return self.samples
        return relation_count(self.m, self.mode) ** self.n

    def describe(self) -> str:
        style = "exhaustive" if self.exhaustive else f"sampled({self.samples}, seed={self.seed})"
        return f"n={self.n} m={self.m} mode={self.mode} {style}"


def enumerate_profiles(spec: DomainSpec, labels: Optional[Sequence[str]] = None) -> Iterator[Profile]:
    labels = tuple(labels) if labels is not None else default_labels(spec.m)
    if spec.exhaustive and spec.size() > enumeration_cap():
        raise CapExceeded(
            f"{spec.size()} profiles in {spec.describe()} exceed the cap {enumeration_cap()}; use sampling"
        )
    rels = list(enumerate_relations(spec.m, spec.mode))
    if spec.exhaustive:
        for combo in itertools.product(rels, repeat=spec.n):
            yield Profile(labels, combo)
    else:
        rng = random.Random(spec.seed)
        for _ in range(spec.samples):
            yield Profile(labels, tuple(rng.choice(rels) for _ in range(spec.n)))


def enumerate_tournaments(m: int) -> Iterator[MarginMatrix]:
    """All labeled tournaments on ``m`` alternatives as single-voter margins."""
    for rel in enumerate_relations(m, TOURNAMENT):
        yield margin_matrix(Profile(default_labels(m), (rel,)))


def subsets(alts: Iterable[int], min_size: int = 1) -> Iterator[frozenset[int]]:
    """Subsets by decreasing size, lexicographic within a size."""
    alts = sorted(alts)
    for r in range(len(alts), min_size - 1, -1):
        for c in itertools.combinations(alts, r):
            yield frozenset(c)
