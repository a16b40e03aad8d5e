"""Finite-domain decision procedures for the SCF axioms.

Every check walks the domain in a fixed order (profiles in enumeration
order, feasible sets largest first, voters ascending, pairs lexicographic,
weakening variants in :func:`weaken_variants` order) and stops at the first
violation, so witnesses are reproducible.  A ``pass`` is a proof only when
the domain is exhaustive; reports carry that flag.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .errors import ChoicelabError, PreconditionError
from .prefcore import (
    GENERAL,
    TOURNAMENT,
    DomainSpec,
    PreferenceRelation,
    Profile,
    condorcet_winner,
    enumerate_profiles,
    enumerate_relations,
    margin_matrix,
    subsets,
    weaken_variants,
)
from .solutions import REGISTRY, ScfDescriptor, apply_scf

MONO = "mono"
STRONG_MONO = "strongmono"
SET_MONO = "setmono"
SSP = "ssp"
IUA = "iua"
PAIRWISE = "pairwise"
CONDORCET = "condorcet"
AXIOMS = (MONO, STRONG_MONO, SET_MONO, SSP, IUA, PAIRWISE, CONDORCET)


class ImplicationViolation(ChoicelabError):
    """Observed verdicts break the implication lattice; one of the checkers is wrong."""


@dataclass(frozen=True)
class Witness:
    """Objects exhibiting one axiom violation.

    ``voter`` is 0-based.  ``other`` is the modified profile R' (absent for
    SSP, which uses ``subset`` instead).  ``before``/``after`` are the two
    choice sets being compared.
    """

    axiom: str
    feasible: frozenset[int]
    profile: Profile
    before: frozenset[int]
    after: frozenset[int]
    other: Optional[Profile] = None
    subset: Optional[frozenset[int]] = None
    voter: Optional[int] = None
    pair: Optional[tuple[int, int]] = None
    chosen: Optional[int] = None


@dataclass
class AxiomReport:
    axiom: str
    scf: str
    domain: DomainSpec
    witness: Optional[Witness] = None
    instances: int = 0
    skipped: int = 0

    @property
    def verdict(self) -> str:
        return "fail" if self.witness is not None else "pass"

    @property
    def passed(self) -> bool:
        return self.witness is None

    @property
    def exhaustive(self) -> bool:
        return self.domain.exhaustive


def _variant_filter(spec: DomainSpec) -> bool:
    # keep weakening variants inside the transitive world for strict/weak domains
    return spec.mode not in (GENERAL, TOURNAMENT)


def _evaluate(scf: ScfDescriptor, profile: Profile, A: frozenset[int]) -> Optional[frozenset[int]]:
    try:
        return apply_scf(scf, profile, A)
    except PreconditionError:
        return None


def _run(
    axiom: str,
    scf: ScfDescriptor,
    spec: DomainSpec,
    probe: Callable[[Profile, frozenset[int], frozenset[int]], Optional[Witness]],
    min_size: int = 1,
) -> AxiomReport:
    report = AxiomReport(axiom, scf.name, spec)
    for profile in enumerate_profiles(spec):
        report.instances += 1
        for A in subsets(range(profile.m), min_size):
            X = _evaluate(scf, profile, A)
            if X is None:
                report.skipped += 1
                continue
            w = probe(profile, A, X)
            if w is not None:
                report.witness = w
                return report
    return report


def _single_voter_moves(
    profile: Profile, A: frozenset[int], spec: DomainSpec, firsts: Iterable[int], seconds: Callable[[int], Iterable[int]]
) -> Iterator[tuple[int, int, int, Profile]]:
    transitive = _variant_filter(spec)
    for i, rel in enumerate(profile.voters):
        for a in firsts:
            for b in seconds(a):
                if a == b:
                    continue
                for var in weaken_variants(rel, a, b, transitive)[1:]:
                    if var == rel:
                        continue
                    yield i, a, b, profile.replace(i, var)


def check_monotonicity(scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    def probe(R, A, X):
        for i, a, b, R2 in _single_voter_moves(R, A, spec, sorted(X), lambda a: sorted(A)):
            Y = _evaluate(scf, R2, A)
            if Y is not None and a not in Y:
                return Witness(MONO, A, R, X, Y, other=R2, voter=i, pair=(a, b), chosen=a)
        return None

    return _run(MONO, scf, spec, probe)


def check_strong_monotonicity(scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    def probe(R, A, X):
        for i, a, b, R2 in _single_voter_moves(R, A, spec, sorted(A), lambda a: sorted(A)):
            Y = _evaluate(scf, R2, A)
            if Y is None:
                continue
            lost = [x for x in sorted(X) if x != b and x not in Y]
            if lost:
                return Witness(STRONG_MONO, A, R, X, Y, other=R2, voter=i, pair=(a, b), chosen=lost[0])
        return None

    return _run(STRONG_MONO, scf, spec, probe)


def check_set_monotonicity(scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    def probe(R, A, X):
        outside = sorted(A - X)
        for i, a, b, R2 in _single_voter_moves(R, A, spec, sorted(A), lambda a: outside):
            Y = _evaluate(scf, R2, A)
            if Y is not None and Y != X:
                return Witness(SET_MONO, A, R, X, Y, other=R2, voter=i, pair=(a, b))
        return None

    return _run(SET_MONO, scf, spec, probe)


def check_ssp(scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    def probe(R, A, X):
        rest = sorted(A - X)
        for r in range(len(rest) - 1, -1, -1):
            for extra in itertools.combinations(rest, r):
                B = X | frozenset(extra)
                Y = _evaluate(scf, R, B)
                if Y is not None and Y != X:
                    return Witness(SSP, A, R, X, Y, subset=B)
        return None

    return _run(SSP, scf, spec, probe)


def _iua_alternatives(
    spec: DomainSpec, rel: PreferenceRelation, fixed: Sequence[tuple[int, int]]
) -> list[PreferenceRelation]:
    rels = enumerate_relations(spec.m, spec.mode)
    return [r for r in rels if all(r.compare(a, b) == rel.compare(a, b) for a, b in fixed)]


def check_iua(scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    def probe(R, A, X):
        loose = A - X
        if len(loose) < 2:
            return None
        # every pair except those with both ends unchosen stays put
        fixed = [
            (a, b) for a, b in itertools.combinations(range(R.m), 2) if not (a in loose and b in loose)
        ]
        options = [_iua_alternatives(spec, rel, fixed) for rel in R.voters]
        for combo in itertools.product(*options):
            if combo == R.voters:
                continue
            R2 = Profile(R.labels, combo)
            Y = _evaluate(scf, R2, A)
            if Y is not None and Y != X:
                return Witness(IUA, A, R, X, Y, other=R2)
        return None

    return _run(IUA, scf, spec, probe, min_size=3)


def check_pairwiseness(scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    seen: dict[tuple, tuple[Profile, frozenset[int]]] = {}

    def probe(R, A, X):
        key = (A, margin_matrix(R, A).entries)
        if key not in seen:
            seen[key] = (R, X)
            return None
        R0, X0 = seen[key]
        if X0 != X:
            return Witness(PAIRWISE, A, R0, X0, X, other=R)
        return None

    return _run(PAIRWISE, scf, spec, probe, min_size=2)


def check_condorcet_extension(scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    def probe(R, A, X):
        cw = condorcet_winner(margin_matrix(R, A))
        if cw is not None and X != {cw}:
            return Witness(CONDORCET, A, R, X, frozenset([cw]), chosen=cw)
        return None

    return _run(CONDORCET, scf, spec, probe, min_size=2)


CHECKS: dict[str, Callable[[ScfDescriptor, DomainSpec], AxiomReport]] = {
    MONO: check_monotonicity,
    STRONG_MONO: check_strong_monotonicity,
    SET_MONO: check_set_monotonicity,
    SSP: check_ssp,
    IUA: check_iua,
    PAIRWISE: check_pairwiseness,
    CONDORCET: check_condorcet_extension,
}


def check_axiom(axiom: str, scf: ScfDescriptor, spec: DomainSpec) -> AxiomReport:
    try:
        check = CHECKS[axiom]
    except KeyError:
        raise PreconditionError(f"unknown axiom {axiom!r}; known: {', '.join(AXIOMS)}") from None
    return check(scf, spec)


def replay(scf: ScfDescriptor, w: Witness) -> bool:
    """Recompute everything in ``w`` from scratch; True iff the violation reproduces."""
    A = w.feasible
    X = apply_scf(scf, w.profile, A)
    if X != w.before:
        return False
    if w.axiom == SSP:
        B = w.subset
        return X <= B <= A and apply_scf(scf, w.profile, B) == w.after != X
    if w.axiom == CONDORCET:
        cw = condorcet_winner(margin_matrix(w.profile, A))
        return cw is not None and cw == w.chosen and X != {cw}
    Y = apply_scf(scf, w.other, A)
    if Y != w.after:
        return False
    if w.axiom == PAIRWISE:
        return margin_matrix(w.profile, A) == margin_matrix(w.other, A) and X != Y
    if w.axiom == IUA:
        loose = A - X
        same = all(
            r.compare(a, b) == r2.compare(a, b)
            for r, r2 in zip(w.profile.voters, w.other.voters)
            for a in X
            for b in A
        )
        return same and X != Y and len(loose) >= 2
    # single-voter weakening axioms
    i, (a, b) = w.voter, w.pair
    if w.profile.n != w.other.n or any(
        r != r2 for k, (r, r2) in enumerate(zip(w.profile.voters, w.other.voters)) if k != i
    ):
        return False
    if w.other.voters[i] not in weaken_variants(w.profile.voters[i], a, b):
        return False
    if w.axiom == MONO:
        return a in X and a not in Y
    if w.axiom == STRONG_MONO:
        x = w.chosen
        return x in X and x != b and x not in Y
    if w.axiom == SET_MONO:
        return b not in X and X != Y
    return False


@dataclass
class ImplicationResult:
    domain: DomainSpec
    reports: dict[str, dict[str, AxiomReport]] = field(default_factory=dict)
    contradictions: list[str] = field(default_factory=list)


def implication_violations(reports: Mapping[str, Mapping[str, AxiomReport]]) -> list[str]:
    """Contradictions with 'strongmono and iua => setmono' and 'setmono => mono and iua'."""
    problems = []
    for name, rs in reports.items():
        ok = {ax: r.passed for ax, r in rs.items()}
        if ok.get(STRONG_MONO) and ok.get(IUA) and ok.get(SET_MONO) is False:
            problems.append(f"{name}: passes strongmono and iua but fails setmono")
        if ok.get(SET_MONO):
            for ax in (MONO, IUA):
                if ok.get(ax) is False:
                    problems.append(f"{name}: passes setmono but fails {ax}")
    return problems


def verify_implications(
    spec: DomainSpec, scfs: Optional[Iterable[ScfDescriptor]] = None
) -> ImplicationResult:
    """Run the four lattice axioms for every SCF and cross-check the verdicts."""
    scfs = list(REGISTRY.values()) if scfs is None else list(scfs)
    result = ImplicationResult(spec)
    for scf in scfs:
        result.reports[scf.name] = {
            ax: CHECKS[ax](scf, spec) for ax in (MONO, STRONG_MONO, SET_MONO, IUA)
        }
    result.contradictions = implication_violations(result.reports)
    if result.contradictions:
        raise ImplicationViolation("; ".join(result.contradictions))
    return result
