"""Profile text format, witness blocks and report serialization.

Profile format::

    # comment
    3 9                      m alternatives, n voters (after multiplicities)
    labels: a1 a2 a3         optional; defaults to a1..am
    2: a2=a3>a1              multiplicity, then tiers best-first
    a1>a2>a3                 multiplicity 1 may be omitted
    1: {a1>a2 a1=a3 a3>a2}   a relation that is not a weak order, one token per pair

Human output lists choice sets by label in label order; machine output
lists alternative indices in increasing order.
"""

from __future__ import annotations

import hashlib
import json
import re
from typing import Iterable, Union

from .axioms import AxiomReport, Witness
from .errors import ValidationError
from .manipulation import ManipulationWitness, ParticipationWitness, SearchReport
from .prefcore import PreferenceRelation, Profile, default_labels, relation_from_tiers

_LABEL = re.compile(r"[A-Za-z0-9_.\-]+")
_RESERVED = set(">=:{}#,")


class ProfileSyntaxError(ValidationError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def _check_label(label: str, line: int, col: int) -> None:
    if not _LABEL.fullmatch(label):
        raise ProfileSyntaxError(f"bad label {label!r}", line, col)


def parse_profile(text: str) -> Profile:
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = _strip_comment(raw)
        if body.strip():
            lines.append((no, body))
    if not lines:
        raise ProfileSyntaxError("empty profile", 1, 1)
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ProfileSyntaxError("expected header 'm n'", no, 1)
    m, n = int(parts[0]), int(parts[1])
    if m < 1 or n < 1:
        raise ProfileSyntaxError("m and n must be positive", no, 1)
    rest = lines[1:]
    labels = default_labels(m)
    if rest and rest[0][1].lstrip().startswith("labels:"):
        no, body = rest[0]
        toks = body.split(":", 1)[1].split()
        col = body.index(":") + 2
        for t in toks:
            _check_label(t, no, body.find(t, col - 1) + 1)
        if len(toks) != m:
            raise ProfileSyntaxError(f"expected {m} labels, got {len(toks)}", no, 1)
        if len(set(toks)) != m:
            raise ProfileSyntaxError("labels must be unique", no, 1)
        labels = tuple(toks)
        rest = rest[1:]
    index = {lab: k for k, lab in enumerate(labels)}
    voters: list[PreferenceRelation] = []
    for no, body in rest:
        k, rel = _parse_voter_line(body, no, index, m)
        voters += [rel] * k
    if len(voters) != n:
        last = rest[-1][0] if rest else lines[0][0]
        raise ProfileSyntaxError(f"header promises {n} voters, lines give {len(voters)}", last, 1)
    return Profile(labels, tuple(voters))


def _parse_voter_line(body: str, no: int, index: dict[str, int], m: int) -> tuple[int, PreferenceRelation]:
    mult = 1
    offset = len(body) - len(body.lstrip())
    text = body.strip()
    head = re.match(r"(\d+)\s*:\s*", text)
    if head:
        mult = int(head.group(1))
        if mult < 1:
            raise ProfileSyntaxError("multiplicity must be positive", no, offset + 1)
        offset += head.end()
        text = text[head.end():]
    if text.startswith("{"):
        return mult, _parse_pairs(text, no, offset, index, m)
    tiers, col = [], offset + 1
    for tier_text in text.split(">"):
        tier = []
        for lab in tier_text.split("="):
            lab_s = lab.strip()
            if lab_s not in index:
                raise ProfileSyntaxError(f"unknown label {lab_s!r}", no, col + (len(lab) - len(lab.lstrip())))
            tier.append(index[lab_s])
            col += len(lab) + 1
        tiers.append(tier)
    flat = [a for t in tiers for a in t]
    if len(set(flat)) != len(flat):
        raise ProfileSyntaxError("tiers overlap", no, offset + 1)
    if len(flat) != m:
        raise ProfileSyntaxError(f"tiers name {len(flat)} of {m} alternatives", no, offset + 1)
    return mult, relation_from_tiers(tiers, m)


def _parse_pairs(text: str, no: int, offset: int, index: dict[str, int], m: int) -> PreferenceRelation:
    if not text.endswith("}"):
        raise ProfileSyntaxError("unterminated pair list", no, offset + len(text) + 1)
    rel = PreferenceRelation(m, (0,) * (m * (m - 1) // 2))
    seen = set()
    for tok in text[1:-1].replace(",", " ").split():
        col = offset + text.find(tok) + 1
        mt = re.fullmatch(r"([^>=]+)([>=])([^>=]+)", tok)
        if not mt or mt.group(1) not in index or mt.group(3) not in index:
            raise ProfileSyntaxError(f"bad pair token {tok!r}", no, col)
        a, b = index[mt.group(1)], index[mt.group(3)]
        key = (min(a, b), max(a, b))
        if a == b or key in seen:
            raise ProfileSyntaxError(f"pair {tok!r} repeated or reflexive", no, col)
        seen.add(key)
        rel = rel.with_verdict(a, b, 1 if mt.group(2) == ">" else 0)
    if len(seen) != m * (m - 1) // 2:
        raise ProfileSyntaxError("pair list does not cover every pair", no, offset + 1)
    return rel


def format_relation(rel: PreferenceRelation, labels: tuple[str, ...]) -> str:
    if rel.is_transitive():
        return ">".join("=".join(labels[a] for a in tier) for tier in rel.tiers())
    toks = []
    for a in range(rel.m):
        for b in range(a + 1, rel.m):
            v = rel.compare(a, b)
            toks.append(f"{labels[a]}={labels[b]}" if v == 0 else
                        f"{labels[a]}>{labels[b]}" if v > 0 else f"{labels[b]}>{labels[a]}")
    return "{" + " ".join(toks) + "}"


def format_profile(profile: Profile) -> str:
    """Canonical text: header, labels, consecutive equal voters merged."""
    out = [f"{profile.m} {profile.n}", "labels: " + " ".join(profile.labels)]
    run, count = None, 0
    for rel in profile.voters + (None,):
        if rel is not None and rel == run:
            count += 1
            continue
        if run is not None:
            out.append(f"{count}: {format_relation(run, profile.labels)}")
        run, count = rel, 1
    return "\n".join(out) + "\n"


def format_set(profile_or_labels: Union[Profile, tuple[str, ...]], S: Iterable[int], machine: bool = False) -> str:
    labels = profile_or_labels.labels if isinstance(profile_or_labels, Profile) else profile_or_labels
    if machine:
        return " ".join(str(x) for x in sorted(S))
    return " ".join(sorted(labels[x] for x in S))


def _indent(text: str) -> list[str]:
    return ["  " + line for line in text.rstrip("\n").split("\n")]


def _checksum(lines: list[str]) -> str:
    return hashlib.sha256("\n".join(lines).encode("ascii")).hexdigest()[:16]


def format_manipulation(w: ManipulationWitness, machine: bool = False) -> str:
    P = w.true
    lines = [
        "witness: manipulation",
        f"scf: {w.scf}",
        f"flags: {w.flags.describe()}",
        f"feasible: {format_set(P, w.feasible, machine)}",
        "group: " + " ".join(str(i + 1) for i in w.group),
        f"before: {format_set(P, w.before, machine)}",
        f"after: {format_set(P, w.after, machine)}",
        f"verified: {'yes' if w.verified else 'no'}",
    ]
    if w.note:
        lines.append(f"note: {w.note}")
    lines += ["true-profile:"] + _indent(format_profile(w.true))
    lines += ["misreport-profile:"] + _indent(format_profile(w.misreport))
    lines.append(f"checksum: {_checksum(lines)}")
    return "\n".join(lines) + "\n"


def format_participation(w: ParticipationWitness, machine: bool = False) -> str:
    P = w.base
    lines = [
        "witness: participation",
        f"scf: {w.scf}",
        f"feasible: {format_set(P, w.feasible, machine)}",
        f"joiner: {format_relation(w.joiner, P.labels)}",
        f"without-joiner: {format_set(P, w.without, machine)}",
        f"with-joiner: {format_set(P, w.with_joiner, machine)}",
        "base-profile:",
    ] + _indent(format_profile(w.base))
    lines.append(f"checksum: {_checksum(lines)}")
    return "\n".join(lines) + "\n"


def format_axiom_witness(w: Witness, machine: bool = False) -> str:
    P = w.profile
    lines = [
        f"witness: {w.axiom}",
        f"feasible: {format_set(P, w.feasible, machine)}",
        f"before: {format_set(P, w.before, machine)}",
        f"after: {format_set(P, w.after, machine)}",
    ]
    if w.voter is not None:
        lines.append(f"voter: {w.voter + 1}")
    if w.pair is not None:
        a, b = w.pair
        lines.append(f"pair: {a} {b}" if machine else f"pair: {P.labels[a]} {P.labels[b]}")
    if w.chosen is not None:
        lines.append(f"alternative: {w.chosen if machine else P.labels[w.chosen]}")
    if w.subset is not None:
        lines.append(f"subset: {format_set(P, w.subset, machine)}")
    lines += ["profile:"] + _indent(format_profile(P))
    if w.other is not None:
        lines += ["other-profile:"] + _indent(format_profile(w.other))
    lines.append(f"checksum: {_checksum(lines)}")
    return "\n".join(lines) + "\n"


def format_report(report: Union[AxiomReport, SearchReport], machine: bool = False) -> str:
    name = report.axiom if isinstance(report, AxiomReport) else report.check
    lines = [
        f"check: {name}",
        f"scf: {report.scf}",
        f"domain: {report.domain.describe()}",
        f"verdict: {report.verdict}",
        f"instances: {report.instances}",
        f"exhaustive: {'yes' if report.exhaustive else 'no'}",
    ]
    if isinstance(report, AxiomReport) and report.skipped:
        lines.append(f"skipped: {report.skipped}")
    if isinstance(report, SearchReport) and report.flags is not None:
        lines.append(f"flags: {report.flags.describe()}")
    text = "\n".join(lines) + "\n"
    if report.witness is not None:
        text += format_witness(report.witness, machine)
    return text


def format_witness(w, machine: bool = False) -> str:
    if isinstance(w, ManipulationWitness):
        return format_manipulation(w, machine)
    if isinstance(w, ParticipationWitness):
        return format_participation(w, machine)
    return format_axiom_witness(w, machine)


def report_to_dict(report: Union[AxiomReport, SearchReport]) -> dict:
    d = {
        "check": report.axiom if isinstance(report, AxiomReport) else report.check,
        "scf": report.scf,
        "domain": {
            "n": report.domain.n,
            "m": report.domain.m,
            "mode": report.domain.mode,
            "samples": report.domain.samples,
            "seed": report.domain.seed,
        },
        "verdict": report.verdict,
        "instances": report.instances,
        "exhaustive": report.exhaustive,
        "witness": format_witness(report.witness, machine=True) if report.witness is not None else None,
    }
    if isinstance(report, AxiomReport):
        d["skipped"] = report.skipped
    return d


def report_to_json(report: Union[AxiomReport, SearchReport]) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True)


def table_line(instance_id: str, scf: str, labels: tuple[str, ...], S: Iterable[int]) -> str:
    return f"{instance_id}\t{scf}\t{' '.join(labels[x] for x in sorted(S))}"


def parse_table(text: str) -> dict[tuple[str, str], tuple[str, ...]]:
    out = {}
    for no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ProfileSyntaxError("golden table lines need three tab-separated fields", no, 1)
        out[(parts[0], parts[1])] = tuple(parts[2].split())
    return out
