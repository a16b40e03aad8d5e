"""Social choice functions and the exact game solver behind the bipartisan set.

Majority-based rules take a :class:`MarginMatrix` already restricted to the
feasible set.  ``apply_scf`` is the single entry point used by the axiom and
manipulation machinery; it restricts, computes margins for pairwise rules and
validates the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .errors import InternalInvariantError, PreconditionError, TournamentError, ValidationError
from .lp import OPTIMAL, linprog_exact
from .prefcore import MarginMatrix, Profile, check_feasible, margin_matrix

ChoiceSet = frozenset


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def _alts(margins: MarginMatrix, A: Optional[Iterable[int]]) -> tuple[int, ...]:
    if A is None:
        return margins.alternatives
    A = tuple(sorted(A))
    if not A:
        raise ValidationError("feasible set is empty")
    unknown = set(A) - set(margins.alternatives)
    if unknown:
        raise ValidationError(f"alternatives {sorted(unknown)} are not in the margin matrix")
    return A


def _require_tournament(margins: MarginMatrix, S: Iterable[int]) -> None:
    tie = margins.tied_pair(S)
    if tie is not None:
        raise TournamentError(tie)


def copeland(margins: MarginMatrix, A: Optional[Iterable[int]] = None) -> ChoiceSet:
    A = _alts(margins, A)
    score = {a: sum(_sign(margins.g(a, b)) for b in A) for a in A}
    best = max(score.values())
    return frozenset(a for a in A if score[a] == best)


def borda(margins: MarginMatrix, A: Optional[Iterable[int]] = None) -> ChoiceSet:
    A = _alts(margins, A)
    score = {a: sum(margins.g(a, b) for b in A) for a in A}
    best = max(score.values())
    return frozenset(a for a in A if score[a] == best)


def plurality(profile: Profile, A: Iterable[int]) -> ChoiceSet:
    A = sorted(check_feasible(profile, A))
    counts = dict.fromkeys(A, 0)
    for i, rel in enumerate(profile.voters):
        tops = rel.top(A)
        if len(tops) != 1:
            raise PreconditionError(
                f"plurality: voter {i + 1} has no unique top in {profile.label_set(A)}"
            )
        counts[tops[0]] += 1
    best = max(counts.values())
    return frozenset(a for a in A if counts[a] == best)


def weak_majority_closure(margins: MarginMatrix, A: Iterable[int]) -> dict[int, set[int]]:
    """Reachability under ``x -> y iff g(x, y) >= 0`` (Floyd-Warshall style)."""
    A = list(A)
    reach = {x: {y for y in A if margins.g(x, y) >= 0} for x in A}
    for k in A:
        for x in A:
            if k in reach[x]:
                reach[x] |= reach[k]
    return reach


def top_cycle(margins: MarginMatrix, A: Optional[Iterable[int]] = None) -> ChoiceSet:
    A = _alts(margins, A)
    reach = weak_majority_closure(margins, A)
    return frozenset(x for x in A if reach[x] >= set(A))


def covers(
    margins: MarginMatrix, S: Iterable[int], x: int, y: int, allow_ties: bool = False
) -> bool:
    """Whether ``x`` covers ``y`` within ``S``.

    On tournaments: x beats y and beats everything y beats.  With
    ``allow_ties`` the comparison is on majority signs: x beats y and for
    every other z, sign g(x, z) >= sign g(y, z).  Both agree on tournaments.
    """
    S = tuple(S)
    if x not in S or y not in S:
        raise ValidationError("x and y must belong to S")
    if not allow_ties:
        _require_tournament(margins, S)
        return margins.g(x, y) > 0 and all(margins.g(x, z) > 0 for z in S if margins.g(y, z) > 0)
    if margins.g(x, y) <= 0:
        return False
    return all(_sign(margins.g(x, z)) >= _sign(margins.g(y, z)) for z in S if z != x and z != y)


def uncovered_set(
    margins: MarginMatrix, A: Optional[Iterable[int]] = None, allow_ties: bool = False
) -> ChoiceSet:
    A = _alts(margins, A)
    if not allow_ties:
        _require_tournament(margins, A)
    return frozenset(x for x in A if not any(covers(margins, A, y, x, allow_ties) for y in A if y != x))


def is_covering_set(
    margins: MarginMatrix, B: Iterable[int], A: Iterable[int], allow_ties: bool = False
) -> bool:
    B, A = frozenset(B), frozenset(A)
    if not B or not B <= A:
        raise ValidationError("a covering set must be a nonempty subset of the feasible set")
    if not allow_ties:
        _require_tournament(margins, A)
    for x in sorted(A - B):
        within = tuple(sorted(B | {x}))
        if not any(covers(margins, within, b, x, allow_ties) for b in B):
            return False
    return True


def minimal_covering_set(
    margins: MarginMatrix,
    A: Optional[Iterable[int]] = None,
    allow_ties: bool = False,
    fast: bool = False,
) -> ChoiceSet:
    A = _alts(margins, A)
    if not allow_ties:
        _require_tournament(margins, A)
    if fast:
        return _mc_from_bipartisan(margins, A, allow_ties)
    for r in range(1, len(A) + 1):
        found = [
            frozenset(B) for B in itertools.combinations(A, r) if is_covering_set(margins, B, A, allow_ties)
        ]
        if len(found) > 1:
            raise InternalInvariantError(
                f"several minimal covering sets of size {r}: {[sorted(B) for B in found]}"
            )
        if found:
            return found[0]
    raise InternalInvariantError("no covering set found; the feasible set itself always covers")


def _mc_from_bipartisan(margins: MarginMatrix, A: tuple[int, ...], allow_ties: bool) -> ChoiceSet:
    # grow the bipartisan set by the bipartisan set of the outsiders left uncovered
    B = set(bipartisan(margins, A))
    while True:
        loose = [
            x for x in A
            if x not in B and not any(covers(margins, sorted(B | {x}), b, x, allow_ties) for b in B)
        ]
        if not loose:
            return frozenset(B)
        B |= bipartisan(margins, loose)


@dataclass(frozen=True)
class MixedStrategy:
    alternatives: tuple[int, ...]
    probabilities: tuple[Fraction, ...]

    def __post_init__(self):
        if any(p < 0 for p in self.probabilities) or sum(self.probabilities) != 1:
            raise InternalInvariantError(f"not a probability vector: {self.probabilities}")

    def support(self) -> frozenset[int]:
        return frozenset(a for a, p in zip(self.alternatives, self.probabilities) if p > 0)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.alternatives, self.probabilities))


def _game_constraints(margins: MarginMatrix, A: tuple[int, ...]):
    # variables: p_1..p_k, then slacks s_1..s_k with (p^T G)_j - s_j = 0
    k = len(A)
    rows, rhs = [], []
    for j, b in enumerate(A):
        rows.append([margins.g(a, b) for a in A] + [-int(t == j) for t in range(k)])
        rhs.append(0)
    rows.append([1] * k + [0] * k)
    rhs.append(1)
    return rows, rhs


def optimality_certificate(margins: MarginMatrix, strategy: MixedStrategy) -> bool:
    """p >= 0, sum p = 1 and p^T G >= 0, checked exactly."""
    p = strategy.as_dict()
    if any(v < 0 for v in p.values()) or sum(p.values()) != 1:
        return False
    return all(sum(p[a] * margins.g(a, b) for a in p) >= 0 for b in p)


def maximin_strategy(margins: MarginMatrix, A: Optional[Iterable[int]] = None) -> MixedStrategy:
    A = _alts(margins, A)
    rows, rhs = _game_constraints(margins, A)
    res = linprog_exact([0] * (2 * len(A)), rows, rhs)
    if res.status != OPTIMAL:
        raise InternalInvariantError(f"symmetric game LP reported {res.status}")
    return MixedStrategy(A, res.x[: len(A)])


def essential_weights(margins: MarginMatrix, A: Optional[Iterable[int]] = None) -> dict[int, Fraction]:
    """For each alternative, the largest probability any optimal strategy gives it."""
    A = _alts(margins, A)
    rows, rhs = _game_constraints(margins, A)
    out = {}
    for t, a in enumerate(A):
        res = linprog_exact([int(j == t) for j in range(2 * len(A))], rows, rhs)
        if res.status != OPTIMAL:
            raise InternalInvariantError(f"essential-set LP for {a} reported {res.status}")
        out[a] = res.value
    return out


def bipartisan(margins: MarginMatrix, A: Optional[Iterable[int]] = None) -> ChoiceSet:
    """Union of the supports of all optimal strategies (the essential set)."""
    weights = essential_weights(margins, A)
    return frozenset(a for a, w in weights.items() if w > 0)


@dataclass(frozen=True)
class ScfDescriptor:
    """A named SCF plus the structural claims the checkers rely on.

    Pairwise rules have ``func(margins) -> set`` with margins already over the
    feasible set; the others have ``func(profile, A) -> set``.
    """

    name: str
    func: Callable = field(compare=False, repr=False)
    pairwise: bool = True
    requires_strict_profiles: bool = False
    requires_tournament_margins: bool = False
    condorcet_extension: bool = False
    set_monotone: bool = False
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, profile: Profile, A: Iterable[int]) -> ChoiceSet:
        return apply_scf(self, profile, A)

    def on_margins(self, margins: MarginMatrix) -> ChoiceSet:
        if not self.pairwise:
            raise PreconditionError(f"{self.name} is not pairwise")
        key = margins.key()
        hit = self._cache.get(key)
        if hit is None:
            if self.requires_tournament_margins:
                tie = margins.tied_pair()
                if tie is not None:
                    raise PreconditionError(f"{self.name}: majority tie between {tie[0]} and {tie[1]}")
            hit = frozenset(self.func(margins))
            if len(self._cache) < 500_000:
                self._cache[key] = hit
        return hit


def apply_scf(desc: ScfDescriptor, profile: Profile, A: Iterable[int]) -> ChoiceSet:
    A = check_feasible(profile, A)
    if desc.requires_strict_profiles:
        for i, rel in enumerate(profile.voters):
            if any(rel.compare(a, b) == 0 for a, b in itertools.combinations(sorted(A), 2)):
                raise PreconditionError(f"{desc.name}: voter {i + 1} is not strict on the feasible set")
    if desc.pairwise:
        out = desc.on_margins(margin_matrix(profile, A))
    else:
        out = frozenset(desc.func(profile, A))
    if not out or not out <= A:
        raise InternalInvariantError(f"{desc.name} returned {sorted(out)} for feasible set {sorted(A)}")
    return out


REGISTRY: dict[str, ScfDescriptor] = {
    d.name: d
    for d in (
        ScfDescriptor("copeland", copeland, condorcet_extension=True),
        ScfDescriptor("borda", borda),
        ScfDescriptor("plurality", plurality, pairwise=False),
        ScfDescriptor("topcycle", top_cycle, condorcet_extension=True, set_monotone=True),
        ScfDescriptor(
            "uncovered", lambda g: uncovered_set(g, allow_ties=True), condorcet_extension=True
        ),
        ScfDescriptor(
            "mc", lambda g: minimal_covering_set(g, allow_ties=True), condorcet_extension=True, set_monotone=True
        ),
        ScfDescriptor("bp", bipartisan, condorcet_extension=True, set_monotone=True),
    )
}

CONDORCET_EXTENSIONS = ("copeland", "topcycle", "uncovered", "mc", "bp")
SET_MONOTONE = ("topcycle", "mc", "bp")


def get_scf(name: str) -> ScfDescriptor:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ValidationError(f"unknown SCF {name!r}; known: {', '.join(REGISTRY)}") from None


def constant_scf() -> ScfDescriptor:
    """Always chooses the whole feasible set."""
    return ScfDescriptor("constant", lambda g: g.alternatives, set_monotone=True)


def tiebroken(base: ScfDescriptor, order: Optional[Iterable[int]] = None) -> ScfDescriptor:
    """Resolute wrapper: the first member of ``base``'s choice set in ``order``.

    ``order`` is a priority list of alternative ids; default is increasing id.
    """
    if not base.pairwise:
        raise PreconditionError("tiebroken wraps pairwise SCFs only")
    prio = list(order) if order is not None else None

    def pick(g: MarginMatrix) -> frozenset[int]:
        chosen = base.on_margins(g)
        ranked = prio if prio is not None else sorted(g.alternatives)
        return frozenset([next(a for a in ranked if a in chosen)])

    suffix = "" if prio is None else "[" + ",".join(map(str, prio)) + "]"
    return ScfDescriptor(f"lex-{base.name}{suffix}", pick, condorcet_extension=base.condorcet_extension)
