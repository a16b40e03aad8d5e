"""Manipulation search under Kelly's extension, and the constructive attacks.

``find_manipulation`` is a brute-force search.  For pairwise SCFs it sums the
members' margin contributions instead of evaluating every joint misreport;
the distinct sums are visited in the order of their lexicographically first
realization, so it returns exactly the witness the plain product search
would.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional

from .axioms import SET_MONO, Witness
from .errors import CapExceeded, InternalInvariantError, PreconditionError, ValidationError
from .prefcore import (
    GENERAL,
    STRICT,
    VERDICT_ORDER,
    DomainSpec,
    MarginMatrix,
    PreferenceRelation,
    Profile,
    condorcet_winner,
    enumerate_profiles,
    enumerate_relations,
    enumeration_cap,
    full_indifference,
    kelly_strict,
    kelly_weak,
    margin_matrix,
    relation_from_tiers,
    subsets,
)
from .solutions import ScfDescriptor, apply_scf

WEAK_PREF = "weak"
STRICT_PREF = "strict"
ANY = "any"
KEEP_TIES = "keep-ties"

SEARCH_CAP = 10**8


@dataclass(frozen=True)
class ModeFlags:
    """How manipulations are judged and which misreports are allowed.

    ``preference``: ``weak`` compares outcomes with R-hat, ``strict`` with P-hat.
    ``misreport``: ``keep-ties`` forbids refining any true indifference.
    ``misreport_mode``: relation class misreports are drawn from.
    ``max_group_size``: ``None`` means up to all voters.
    """

    preference: str = WEAK_PREF
    misreport: str = KEEP_TIES
    require_outcome_change: bool = True
    max_group_size: Optional[int] = None
    misreport_mode: str = GENERAL

    def __post_init__(self):
        if self.preference not in (WEAK_PREF, STRICT_PREF):
            raise ValidationError(f"unknown preference flag {self.preference!r}")
        if self.misreport not in (ANY, KEEP_TIES):
            raise ValidationError(f"unknown misreport class {self.misreport!r}")

    def describe(self) -> str:
        return (
            f"pref={self.preference} misreport={self.misreport} "
            f"outcome-change={'yes' if self.require_outcome_change else 'no'} "
            f"max-group={self.max_group_size if self.max_group_size is not None else 'all'} "
            f"misreport-mode={self.misreport_mode}"
        )


@dataclass(frozen=True)
class ManipulationWitness:
    """A verified manipulation: ``group`` (0-based) moves ``true`` to ``misreport``."""

    scf: str
    feasible: frozenset[int]
    true: Profile
    misreport: Profile
    group: tuple[int, ...]
    flags: ModeFlags
    before: frozenset[int]
    after: frozenset[int]
    verified: bool = False
    note: str = ""


def _prefers(flags: ModeFlags, Y, X, rel: PreferenceRelation) -> bool:
    if flags.preference == STRICT_PREF:
        return kelly_strict(Y, X, rel)
    return kelly_weak(Y, X, rel)


def verify_witness(scf: ScfDescriptor, w: ManipulationWitness) -> bool:
    """Recompute both outcomes and every Kelly comparison under the true relations."""
    if w.true.n != w.misreport.n or w.true.labels != w.misreport.labels:
        return False
    for k, (r, r2) in enumerate(zip(w.true.voters, w.misreport.voters)):
        if k not in w.group and r != r2:
            return False
    X = apply_scf(scf, w.true, w.feasible)
    Y = apply_scf(scf, w.misreport, w.feasible)
    if X != w.before or Y != w.after:
        return False
    if w.flags.require_outcome_change and X == Y:
        return False
    for i in w.group:
        truth, lie = w.true.voters[i], w.misreport.voters[i]
        if not _prefers(w.flags, Y, X, truth):
            return False
        if w.flags.misreport == KEEP_TIES and not truth.indifference_pairs() <= lie.indifference_pairs():
            return False
    return True


def _verified(scf: ScfDescriptor, w: ManipulationWitness) -> ManipulationWitness:
    ok = verify_witness(scf, w)
    if not ok:
        raise InternalInvariantError(f"constructed witness for {scf.name} does not verify")
    return replace(w, verified=True)


def _misreports(rel: PreferenceRelation, A: tuple[int, ...], flags: ModeFlags) -> list[PreferenceRelation]:
    """Reports that agree with ``rel`` outside ``A`` x ``A``, in verdict order."""
    inner = list(itertools.combinations(A, 2))
    choices = []
    for a, b in inner:
        if flags.misreport == KEEP_TIES and rel.compare(a, b) == 0:
            choices.append((0,))
        else:
            choices.append(VERDICT_ORDER)
    out = []
    for combo in itertools.product(*choices):
        cand = rel
        for (a, b), v in zip(inner, combo):
            if cand.compare(a, b) != v:
                cand = cand.with_verdict(a, b, v)
        if flags.misreport_mode == GENERAL:
            out.append(cand)
        elif cand.is_transitive() and (flags.misreport_mode != STRICT or cand.is_strict()):
            out.append(cand)
    return out


def _groups(n: int, flags: ModeFlags) -> Iterator[tuple[int, ...]]:
    top = n if flags.max_group_size is None else min(n, flags.max_group_size)
    for size in range(1, top + 1):
        yield from itertools.combinations(range(n), size)


def _pairwise_candidates(
    profile: Profile, A: tuple[int, ...], group: tuple[int, ...], options: list[list[PreferenceRelation]]
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """(first joint choice, margin vector) per distinct margin vector, in choice order."""
    inner = list(itertools.combinations(A, 2))
    base = [0] * len(inner)
    for k, rel in enumerate(profile.voters):
        if k not in group:
            for t, (a, b) in enumerate(inner):
                base[t] += rel.compare(a, b)
    frontier: dict[tuple[int, ...], tuple[int, ...]] = {tuple(base): ()}
    for opts in options:
        contrib = [tuple(r.compare(a, b) for a, b in inner) for r in opts]
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for s, choice in frontier.items():
            for idx, c in enumerate(contrib):
                key = tuple(x + y for x, y in zip(s, c))
                cand = choice + (idx,)
                old = nxt.get(key)
                if old is None or cand < old:
                    nxt[key] = cand
        frontier = nxt
    return sorted(((choice, vec) for vec, choice in frontier.items()))


def _margins_from_vector(A: tuple[int, ...], vec: tuple[int, ...], n: int) -> MarginMatrix:
    inner = list(itertools.combinations(range(len(A)), 2))
    rows = [[0] * len(A) for _ in A]
    for (i, j), v in zip(inner, vec):
        rows[i][j] = v
        rows[j][i] = -v
    return MarginMatrix(A, tuple(tuple(r) for r in rows), n)


def find_manipulation(
    scf: ScfDescriptor,
    profile: Profile,
    A: Iterable[int],
    flags: ModeFlags = ModeFlags(),
    use_margins: Optional[bool] = None,
) -> Optional[ManipulationWitness]:
    """First manipulation in (group size, group, joint misreport) order, or None.

    ``use_margins`` forces the margin-sum shortcut on or off; by default it is
    used for pairwise SCFs.
    """
    A = tuple(sorted(A))
    Aset = frozenset(A)
    if len(A) < 2:
        return None
    if use_margins is None:
        use_margins = scf.pairwise
    if use_margins and not scf.pairwise:
        raise PreconditionError(f"{scf.name} is not pairwise; margin search is unsound")
    X = apply_scf(scf, profile, Aset)
    outcomes = [Y for Y in subsets(A) if not (flags.require_outcome_change and Y == X)]
    cap = max(SEARCH_CAP, enumeration_cap())
    for group in _groups(profile.n, flags):
        wanted = {Y for Y in outcomes if all(_prefers(flags, Y, X, profile.voters[i]) for i in group)}
        if not wanted:
            continue
        options = [_misreports(profile.voters[i], A, flags) for i in group]
        if use_margins:
            for choice, vec in _pairwise_candidates(profile, A, group, options):
                Y = scf.on_margins(_margins_from_vector(A, vec, profile.n))
                if Y in wanted:
                    lie = profile
                    for i, idx in zip(group, choice):
                        lie = lie.replace(i, options[group.index(i)][idx])
                    return _verified(scf, ManipulationWitness(scf.name, Aset, profile, lie, group, flags, X, Y))
            continue
        total = 1
        for opts in options:
            total *= len(opts)
        if total > cap:
            raise CapExceeded(f"{total} joint misreports for group {group} exceed the search cap {cap}")
        for combo in itertools.product(*options):
            lie = profile
            for i, rel in zip(group, combo):
                lie = lie.replace(i, rel)
            try:
                Y = apply_scf(scf, lie, Aset)
            except PreconditionError:
                continue
            if Y in wanted:
                return _verified(scf, ManipulationWitness(scf.name, Aset, profile, lie, group, flags, X, Y))
    return None


@dataclass
class SearchReport:
    """Result of a domain-wide sweep (group strategyproofness or participation)."""

    check: str
    scf: str
    domain: DomainSpec
    flags: Optional[ModeFlags] = None
    witness: Optional[object] = None
    instances: int = 0

    @property
    def verdict(self) -> str:
        return "fail" if self.witness is not None else "pass"

    @property
    def passed(self) -> bool:
        return self.witness is None

    @property
    def exhaustive(self) -> bool:
        return self.domain.exhaustive


def check_group_strategyproofness(
    scf: ScfDescriptor, spec: DomainSpec, flags: ModeFlags = ModeFlags()
) -> SearchReport:
    report = SearchReport("group-sp", scf.name, spec, flags)
    for profile in enumerate_profiles(spec):
        report.instances += 1
        for A in subsets(range(profile.m), 2):
            w = find_manipulation(scf, profile, A, flags)
            if w is not None:
                report.witness = w
                return report
    return report


def theorem1_profile(m: int) -> Profile:
    """The 3m-voter weak-order profile on which every Condorcet extension is manipulable.

    Voters 2k-1 and 2k put every alternative above a_k and are otherwise
    indifferent; voter 2m+k ranks a_k then a_{k+1} (cyclically) at the bottom.
    """
    if m < 3:
        raise ValidationError("the construction needs at least three alternatives")
    voters = []
    for k in range(m):
        rel = relation_from_tiers([[a for a in range(m) if a != k], [k]], m)
        voters += [rel, rel]
    for k in range(m):
        nxt = (k + 1) % m
        voters.append(relation_from_tiers([[a for a in range(m) if a not in (k, nxt)], [k], [nxt]], m))
    return Profile.of(voters)


def _lift(m: int, top: int, bottom: int) -> PreferenceRelation:
    return relation_from_tiers([[top], [a for a in range(m) if a not in (top, bottom)], [bottom]], m)


def theorem1_attack(scf: ScfDescriptor, m: int) -> ManipulationWitness:
    R = theorem1_profile(m)
    A = frozenset(range(m))
    X = apply_scf(scf, R, A)
    # relabel cyclically so the lifted alternative a_{j-1} has the lowest index possible
    j = min(X, key=lambda x: (x - 1) % m)
    prev = (j - 1) % m
    first, second = 2 * j, 2 * j + 1
    lifted = _lift(m, prev, j)
    R1 = R.replace(first, lifted)
    R2 = R1.replace(second, lifted)
    if condorcet_winner(margin_matrix(R2)) != prev:
        raise InternalInvariantError(f"{R.labels[prev]} is not the Condorcet winner after both lifts")
    Y2 = apply_scf(scf, R2, A)
    if Y2 != {prev}:
        raise PreconditionError(
            f"{scf.name} is not a Condorcet extension: chose {R.label_set(Y2)} over winner {R.labels[prev]}"
        )
    Y1 = apply_scf(scf, R1, A)
    flags = ModeFlags(STRICT_PREF, ANY, True, 1)
    cw = f"Condorcet winner after both lifts: {R.labels[prev]}"
    if j not in Y1:
        w = ManipulationWitness(
            scf.name, A, R, R1, (first,), flags, X, Y1,
            note=f"branch=first voter {first + 1} lifts {R.labels[prev]}; {cw}",
        )
    else:
        w = ManipulationWitness(
            scf.name, A, R1, R2, (second,), flags, Y1, Y2,
            note=f"branch=second voter {second + 1} lifts {R.labels[prev]}; {cw}",
        )
    return _verified(scf, w)


def theorem3_attack(scf: ScfDescriptor, violation: Witness) -> ManipulationWitness:
    """Turn a set-monotonicity failure into a manipulation by an added voter."""
    if not scf.pairwise:
        raise PreconditionError(f"{scf.name} is not pairwise")
    if violation.axiom != SET_MONO or violation.other is None or violation.pair is None:
        raise PreconditionError("theorem3_attack needs a set-monotonicity witness")
    A, R, R1, i = violation.feasible, violation.profile, violation.other, violation.voter
    a, b = violation.pair
    X, Y = violation.before, violation.after
    v, v1 = R.voters[i].compare(a, b), R1.voters[i].compare(a, b)
    if b in X or X == Y or v > 0 or v1 <= v:
        raise PreconditionError("witness is not a set-monotonicity failure with b R_i a")
    m = R.m
    S = R.replace(i, R.voters[i].with_verdict(a, b, 0)).append(full_indifference(m).with_verdict(a, b, v))
    S1 = R1.replace(i, R1.voters[i].with_verdict(a, b, 0)).append(full_indifference(m).with_verdict(a, b, v1))
    if margin_matrix(S, A) != _with_n(margin_matrix(R, A), S.n) or margin_matrix(S1, A) != _with_n(
        margin_matrix(R1, A), S1.n
    ):
        raise InternalInvariantError("moving the (a, b) comparison to a new voter changed the margins")
    if apply_scf(scf, S, A) != X or apply_scf(scf, S1, A) != Y:
        raise PreconditionError(f"{scf.name} is not pairwise: equal margins gave different choice sets")
    flags = ModeFlags(WEAK_PREF, KEEP_TIES, True, 1)
    newcomer = (R.n,)
    if v < 0:
        w = ManipulationWitness(scf.name, A, S, S1, newcomer, flags, X, Y, note="branch=S (b P_i a)")
    else:
        w = ManipulationWitness(scf.name, A, S1, S, newcomer, flags, Y, X, note="branch=S' (b I_i a)")
    return _verified(scf, w)


def _with_n(g: MarginMatrix, n: int) -> MarginMatrix:
    return MarginMatrix(g.alternatives, g.entries, n)


@dataclass(frozen=True)
class ParticipationWitness:
    """``joiner`` strictly prefers ``without`` (abstaining) to ``with_joiner``."""

    scf: str
    feasible: frozenset[int]
    base: Profile
    joiner: PreferenceRelation
    without: frozenset[int]
    with_joiner: frozenset[int]


def verify_participation_witness(scf: ScfDescriptor, w: ParticipationWitness) -> bool:
    X = apply_scf(scf, w.base, w.feasible)
    Z = apply_scf(scf, w.base.append(w.joiner), w.feasible)
    return X == w.without and Z == w.with_joiner and kelly_strict(X, Z, w.joiner)


def check_participation(scf: ScfDescriptor, spec: DomainSpec) -> SearchReport:
    """Base electorates of every size 1..spec.n, plus one joiner of the same mode."""
    report = SearchReport("participation", scf.name, spec)
    joiners = list(enumerate_relations(spec.m, spec.mode))
    for n in range(1, spec.n + 1):
        base_spec = DomainSpec(n, spec.m, spec.mode, spec.samples, spec.seed)
        for base in enumerate_profiles(base_spec):
            for J in joiners:
                report.instances += 1
                full = base.append(J)
                for A in subsets(range(spec.m), 2):
                    X = apply_scf(scf, base, A)
                    Z = apply_scf(scf, full, A)
                    if kelly_strict(X, Z, J):
                        report.witness = ParticipationWitness(scf.name, A, base, J, X, Z)
                        return report
    return report


def prop3_reduction(scf: ScfDescriptor, pw: ParticipationWitness) -> ManipulationWitness:
    """The joiner of a no-show witness manipulates by reporting complete indifference."""
    if not scf.pairwise:
        raise PreconditionError(f"{scf.name} is not pairwise; the reduction does not apply")
    A = pw.feasible
    full = pw.base.append(pw.joiner)
    lie = pw.base.append(full_indifference(pw.base.m))
    if margin_matrix(lie, A).entries != margin_matrix(pw.base, A).entries:
        raise InternalInvariantError("a fully indifferent ballot changed the margins")
    if apply_scf(scf, lie, A) != apply_scf(scf, pw.base, A):
        raise PreconditionError(f"{scf.name} is not pairwise: equal margins gave different choice sets")
    flags = ModeFlags(STRICT_PREF, ANY, True, 1)
    w = ManipulationWitness(
        scf.name, A, full, lie, (pw.base.n,), flags, pw.with_joiner, pw.without,
        note="joiner reports complete indifference",
    )
    return _verified(scf, w)

