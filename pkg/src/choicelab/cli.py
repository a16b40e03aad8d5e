"""``choicelab`` command-line driver.

Exit codes: 0 everything as expected (negative exemplars failing counts as
expected), 1 a result contradicts a registered claim or a golden file,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import difflib
import sys
from typing import Optional, Sequence, TextIO

from . import reproduce
from .axioms import AXIOMS, CONDORCET, IUA, MONO, SET_MONO, SSP, check_axiom
from .errors import CapExceeded, PreconditionError, ValidationError
from .manipulation import (
    ModeFlags,
    check_group_strategyproofness,
    check_participation,
    find_manipulation,
)
from .prefcore import (
    GENERAL,
    STRICT,
    WEAK,
    DomainSpec,
    condorcet_winner,
    enumerate_profiles,
    margin_matrix,
    relation_count,
    subsets,
)
from .solutions import REGISTRY, get_scf
from .textio import format_manipulation, format_report, format_set, parse_profile, report_to_json

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

_MODES = {"strict": STRICT, "weak": WEAK, "general": GENERAL}

# claims a "pass" must honor; failures elsewhere are expected or uninformative
_CLAIMED_PASS = {
    SET_MONO: ("topcycle", "mc", "bp"),
    MONO: ("topcycle", "mc", "bp"),
    IUA: ("topcycle", "mc", "bp"),
    SSP: ("topcycle", "mc", "bp"),
    CONDORCET: ("copeland", "topcycle", "uncovered", "mc", "bp"),
}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scf", help="comma-separated SCF keys: " + ",".join(REGISTRY))
    common.add_argument("--in", dest="infile", help="profile file ('-' for stdin)")
    common.add_argument("--axiom", help="comma-separated axioms: " + ",".join(AXIOMS))
    common.add_argument("--n", type=int, help="number of voters")
    common.add_argument("--m", type=int, help="number of alternatives")
    common.add_argument("--mode", choices=sorted(_MODES), default="general")
    common.add_argument("--group-size", type=int, help="largest manipulating group")
    common.add_argument("--pref", choices=["weak", "strict"], default="weak")
    common.add_argument("--misreport", choices=["any", "keep-ties"], default="keep-ties")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--bless", action="store_true", help="rewrite golden files")
    common.add_argument("--format", choices=["human", "machine"], default="human")

    p = argparse.ArgumentParser(prog="choicelab", description="Irresolute SCFs, Kelly manipulation and axiom checks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="choice sets of a profile")
    sub.add_parser("axioms", parents=[common], help="axiom reports over a domain")
    sub.add_parser("manipulate", parents=[common], help="manipulation search")
    sub.add_parser("participation", parents=[common], help="no-show search")
    rp = sub.add_parser("reproduce", parents=[common], help="rerun a theorem recipe against golden files")
    rp.add_argument("target", choices=reproduce.TARGETS)
    sub.add_parser("enumerate", parents=[common], help="domain statistics")
    return p


def _scfs(args, default: Sequence[str]) -> list[str]:
    names = args.scf.split(",") if args.scf else list(default)
    for name in names:
        get_scf(name)
    return names


def _domain(args) -> DomainSpec:
    if args.n is None or args.m is None:
        raise UsageError("this command needs --n and --m")
    if (args.samples is None) != (args.seed is None):
        raise UsageError("--samples and --seed go together")
    return DomainSpec(args.n, args.m, _MODES[args.mode], args.samples, args.seed)


def _flags(args) -> ModeFlags:
    return ModeFlags(args.pref, args.misreport, True, args.group_size)


def _read_profile(path: str):
    if path == "-":
        return parse_profile(sys.stdin.read())
    with open(path, encoding="ascii") as fh:
        return parse_profile(fh.read())


def _cmd_compute(args, out: TextIO) -> int:
    if not args.infile:
        raise UsageError("compute needs --in")
    prof = _read_profile(args.infile)
    machine = args.format == "machine"
    sep = "\t" if machine else ": "
    status = EXIT_OK
    for name in _scfs(args, REGISTRY):
        try:
            chosen = get_scf(name)(prof, range(prof.m))
        except PreconditionError as exc:
            # undefined on this profile; only an error if the user asked for it
            reason = str(exc).removeprefix(f"{name}: ")
            out.write(f"{name}{sep}undefined ({reason})\n")
            if args.scf:
                status = EXIT_USAGE
            continue
        out.write(f"{name}{sep}{format_set(prof, chosen, machine)}\n")
    return status


def _cmd_axioms(args, out: TextIO) -> int:
    spec = _domain(args)
    axioms = args.axiom.split(",") if args.axiom else list(AXIOMS)
    status = EXIT_OK
    for name in _scfs(args, REGISTRY):
        for ax in axioms:
            rep = check_axiom(ax, get_scf(name), spec)
            _emit(rep, args, out)
            if not rep.passed and name in _CLAIMED_PASS.get(ax, ()):
                status = EXIT_MISMATCH
    return status


def _emit(rep, args, out: TextIO) -> None:
    if args.format == "machine":
        out.write(report_to_json(rep) + "\n")
    else:
        out.write(format_report(rep) + "\n")


def _cmd_manipulate(args, out: TextIO) -> int:
    flags = _flags(args)
    machine = args.format == "machine"
    status = EXIT_OK
    for name in _scfs(args, reproduce.SET_MONOTONE):
        scf = get_scf(name)
        claim = scf.set_monotone and flags.preference == "weak" and flags.misreport == "keep-ties"
        if args.infile:
            prof = _read_profile(args.infile)
            w = None
            for A in subsets(range(prof.m), 2):
                w = find_manipulation(scf, prof, A, flags)
                if w is not None:
                    break
            if w is None:
                out.write(f"{name}: no manipulation\n")
            else:
                out.write(format_manipulation(w, machine))
                status = EXIT_MISMATCH if claim else status
        else:
            rep = check_group_strategyproofness(scf, _domain(args), flags)
            _emit(rep, args, out)
            if claim and not rep.passed:
                status = EXIT_MISMATCH
    return status


def _cmd_participation(args, out: TextIO) -> int:
    status = EXIT_OK
    for name in _scfs(args, reproduce.SET_MONOTONE):
        scf = get_scf(name)
        rep = check_participation(scf, _domain(args))
        _emit(rep, args, out)
        if scf.set_monotone and scf.pairwise and not rep.passed:
            status = EXIT_MISMATCH
    return status


def _cmd_reproduce(args, out: TextIO) -> int:
    scfs = _scfs(args, ()) or None
    text = reproduce.run_target(args.target, scfs, args.m)
    path = reproduce.golden_path(args.target)
    filtered = bool(scfs) or args.m is not None
    if args.bless:
        if filtered:
            raise UsageError("--bless rewrites whole golden files; drop --scf/--m")
        path.write_text(text, encoding="ascii")
        out.write(f"blessed {path.name}\n")
        return EXIT_OK
    if args.format == "machine" or args.target != "tables":
        out.write(text)
    if not path.exists():
        out.write(f"no golden file {path.name}; run with --bless\n")
        return EXIT_MISMATCH
    golden = path.read_text(encoding="ascii")
    if reproduce.matches_golden(text, golden, filtered):
        out.write(f"{args.target}: matches golden\n")
        return EXIT_OK
    diff = difflib.unified_diff(golden.splitlines(True), text.splitlines(True), "golden", "run")
    out.write("".join(diff))
    out.write(f"{args.target}: MISMATCH against golden\n")
    return EXIT_MISMATCH


def _cmd_enumerate(args, out: TextIO) -> int:
    spec = _domain(args)
    rels = relation_count(spec.m, spec.mode)
    out.write(f"domain: {spec.describe()}\n")
    out.write(f"relations: {rels}\n")
    out.write(f"profiles: {spec.size()}\n")
    with_cw, margins = 0, set()
    for prof in enumerate_profiles(spec):
        g = margin_matrix(prof)
        margins.add(g.entries)
        if condorcet_winner(g) is not None:
            with_cw += 1
    out.write(f"with-condorcet-winner: {with_cw}\n")
    out.write(f"distinct-margin-matrices: {len(margins)}\n")
    return EXIT_OK


_COMMANDS = {
    "compute": _cmd_compute,
    "axioms": _cmd_axioms,
    "manipulate": _cmd_manipulate,
    "participation": _cmd_participation,
    "reproduce": _cmd_reproduce,
    "enumerate": _cmd_enumerate,
}


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args, out)
    except (UsageError, ValidationError, PreconditionError, CapExceeded, OSError) as exc:
        print(f"choicelab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
