"""Command-line interface: ``recosync <subcommand> ...``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import cases
from .autfile import AUT_GRAMMAR, dump_aut, read_aut, to_dot, write_aut
from .automaton import format_word, step, language_equal, parallel, trim
from .closed_loop import SCN_GRAMMAR, Model, read_scenario, run_scenario
from .errors import RecosyncError, SearchLimitError, SimulationError
from .recovery import PLANT, SPEC, RecoveryBinding, dump_bindings, make_recoverable
from .sync import EXACT, EXACT_LIMIT, GREEDY, greedy_sync_word, is_sync_word, shortest_sync_word
from .synthesis import (
    STRICT,
    WITH_RECOVERY,
    check_nonconflict,
    merge_specs,
    synthesize_modular,
    synthesize_monolithic,
)

OK, USAGE, CONFLICT, EMPTY, FAILED = 0, 1, 2, 3, 4

EPILOG = f"""\
.aut format ('#' starts a comment):
{AUT_GRAMMAR}
.scn format ('#' starts a comment):
{SCN_GRAMMAR}
exit codes: 0 ok, 1 usage or parse error, 2 conflict detected,
3 empty supervisor, 4 scenario assertion or reproduction failure
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_models(args):
    """Plants and specs from ``--dir`` (manifest + originals) or explicit files."""
    if args.dir:
        if args.plants or args.specs:
            raise argparse.ArgumentTypeError("--dir cannot be combined with --plants/--specs")
        return cases.load_dir(args.dir)
    if not args.plants or not args.specs:
        raise argparse.ArgumentTypeError("give --dir, or both --plants and --specs")
    return [read_aut(p) for p in args.plants], [read_aut(p) for p in args.specs]


# -- subcommands -------------------------------------------------------------

def cmd_compose(args):
    a = parallel(*(read_aut(p) for p in args.models), name=args.name)
    if args.trim:
        a = trim(a).renamed(a.name)
    _emit(to_dot(a) if args.dot else dump_aut(a), args.output)
    return OK


def cmd_make_recoverable(args):
    if args.event and len(args.models) != 1:
        raise argparse.ArgumentTypeError("--event needs exactly one model")
    out = Path(args.out) if args.out else None
    if out is None and len(args.models) != 1:
        raise argparse.ArgumentTypeError("--out is required for more than one model")
    bindings = []
    for path in args.models:
        a = read_aut(path)
        r = args.event or f"{args.prefix}{a.name}"
        b = make_recoverable(a, r)
        bindings.append(RecoveryBinding(a.name, r, args.kind))
        if out is None:
            sys.stdout.write(dump_aut(b))
        else:
            out.mkdir(parents=True, exist_ok=True)
            write_aut(b, out / f"{a.name}.aut")
    if out is not None:
        (out / "recovery.txt").write_text(dump_bindings(bindings), encoding="utf-8")
    return OK


def cmd_syncword(args):
    a = read_aut(args.model)
    target = a.initial if args.initial else None
    method = GREEDY
    if args.greedy:
        w = greedy_sync_word(a, target)
    else:
        try:
            w, method = shortest_sync_word(a, target, args.cutoff), EXACT
        except SearchLimitError as exc:
            print(f"# {exc}", file=sys.stderr)
            w = greedy_sync_word(a, target)
    if w is None or not is_sync_word(a, w, target):
        print(f"{a.name}: no synchronizing word", file=sys.stderr)
        return FAILED
    end = step(a, a.initial, w)
    print(f"{a.name}\t{len(w)}\t{method}\t{end}\t{format_word(w)}")
    return OK


def _report_synthesis(result, out):
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        for s in result.supervisors:
            write_aut(s.automaton, out / f"{s.name}.aut")
        (out / "stats.tsv").write_text(result.stats_tsv(), encoding="utf-8")
    sys.stdout.write(result.stats_tsv())
    code = OK
    if result.nonconflict is not None:
        if result.nonconflict:
            print("nonconflicting: yes")
        else:
            print(f"nonconflicting: no (witness: {format_word(result.nonconflict.witness)})")
            code = CONFLICT
    if result.empty:
        print(f"empty supervisors: {', '.join(result.empty)}")
        code = EMPTY
    return code


def cmd_synth(args):
    plants, specs = _load_models(args)
    if args.merge:
        specs = merge_specs(specs, [g.split(",") for g in args.merge])
    if args.mode == "monolithic":
        result = synthesize_monolithic(plants, specs, name=(args.names or ["S"])[0],
                                       max_states=args.cutoff, blocking=args.blocking)
    else:
        result = synthesize_modular(plants, specs, names=args.names, max_states=args.cutoff,
                                    check=not args.no_check, blocking=args.blocking)
    return _report_synthesis(result, args.out)


def cmd_check_nonconflict(args):
    v = check_nonconflict([read_aut(p) for p in args.supervisors])
    if v:
        print("nonconflicting")
        return OK
    print(f"conflicting; witness: {format_word(v.witness)}")
    return CONFLICT


def _parse_words(items):
    out = {}
    for item in items or []:
        name, sep, word = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--sync-word expects NAME=e1,e2,..., got {item!r}")
        out[name] = tuple(x for x in word.split(",") if x)
    return out


def cmd_simulate(args):
    plants = tuple(read_aut(p) for p in args.plants)
    sups = tuple(read_aut(p) for p in args.supervisors)
    model = Model.build(plants, sups, _parse_words(args.sync_word))
    result = run_scenario(read_scenario(args.scenario), model, args.scenario)
    _emit(result.transcript, None)
    if args.transcript:
        Path(args.transcript).write_text(result.transcript, encoding="utf-8")
    failed = [t for _, t, ok in result.assertions if not ok]
    print(f"assertions: {len(result.assertions) - len(failed)}/{len(result.assertions)} passed")
    return OK if not failed else FAILED


# -- reproduction ------------------------------------------------------------

def _reproduce_small_factory(args):
    plants, specs = cases.load_case("small-factory")
    result = synthesize_modular(plants, specs, names=list(cases.SMALL_FACTORY_NAMES))
    code = _report_synthesis(result, args.out)
    problems = []
    for sup in result.supervisors:
        golden = read_aut(cases.fixture_dir("small-factory") / f"{sup.name}_golden.aut")
        a = sup.automaton
        for mode in ("generated", "marked"):
            v = language_equal(a, golden, mode)
            if not v:
                problems.append(f"{sup.name}: {mode} language differs from golden ({format_word(v.witness)})")
        if a.n_states != golden.n_states:
            problems.append(f"{sup.name}: {a.n_states} states, golden has {golden.n_states}")
        if sup.sync_word is None or len(sup.sync_word) != 3:
            problems.append(f"{sup.name}: shortest synchronizing word length is not 3")
    model = Model.build(plants, [s.automaton for s in result.supervisors])
    scn = cases.fixture_dir("small-factory") / cases.SMALL_FACTORY_SCENARIO
    run = run_scenario(read_scenario(scn), model, scn)
    sys.stdout.write(run.transcript)
    if args.transcript:
        Path(args.transcript).write_text(run.transcript, encoding="utf-8")
    problems += [f"scenario line {n}: {t} failed" for n, t, ok in run.assertions if not ok]
    for p in problems:
        print(f"MISMATCH {p}")
    print("small-factory: " + ("reproduced" if not problems else "NOT reproduced"))
    return FAILED if problems else code


def _diff(label, got, want, hard, problems, flags):
    if got == want:
        return
    line = f"{label}: computed {got}, reference {want}"
    (problems if hard else flags).append(line)


def _reproduce_fms(args):
    plants, specs = cases.load_case("fms")
    blocking = args.blocking or WITH_RECOVERY
    problems, flags = [], []
    if args.mode == "monolithic":
        result = synthesize_monolithic(plants, specs, name="S", max_states=args.cutoff, blocking=blocking)
        code = _report_synthesis(result, args.out)
        st = result.stats()[0]
        states, trans, rec, wlen = cases.FMS_MONOLITHIC
        _diff("S states", st.states, states, True, problems, flags)
        _diff("S transitions", st.transitions, trans, False, problems, flags)
        _diff("S recovery transitions", st.recovery_transitions, rec, False, problems, flags)
        _diff("S |w|", st.sync_word_length, wlen, False, problems, flags)
        if st.sync_word is None:
            problems.append("S: no synchronizing word found")
    else:
        separate = synthesize_modular(plants, specs, sync=False, blocking=blocking)
        sep_ok = bool(separate.nonconflict)
        print(f"separate E7, E8 nonconflicting: {'yes' if sep_ok else 'no'}")
        if sep_ok:
            problems.append("separate E7 and E8 supervisors should conflict")
        merged = merge_specs(specs, [list(cases.FMS_MERGE)])
        names = [row[0] for row in cases.FMS_MODULAR]
        result = synthesize_modular(plants, merged, names=names, max_states=args.cutoff, blocking=blocking)
        code = _report_synthesis(result, args.out)
        for st, (name, states, trans, rec, wlen) in zip(result.stats(), cases.FMS_MODULAR):
            _diff(f"{name} states", st.states, states, True, problems, flags)
            _diff(f"{name} transitions", st.transitions, trans, True, problems, flags)
            _diff(f"{name} |w|", st.sync_word_length, wlen, True, problems, flags)
            _diff(f"{name} recovery transitions", st.recovery_transitions, rec, False, problems, flags)
    if blocking == STRICT and problems:
        # Reference sizes were obtained with recovery counted for blocking.
        flags.extend(problems)
        problems = []
    for f in flags:
        print(f"FLAG {f}")
    for p in problems:
        print(f"MISMATCH {p}")
    print(f"fms ({args.mode}, blocking={blocking}): " + ("reproduced" if not problems else "NOT reproduced"))
    return FAILED if problems else code


def cmd_reproduce(args):
    if args.case == "small-factory":
        return _reproduce_small_factory(args)
    return _reproduce_fms(args)


# -- parser ------------------------------------------------------------------

def build_parser():
    p = _Parser(
        prog="recosync",
        description="Supervisor synthesis with recovery events and synchronizing words.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, help=help_, description=help_, epilog=EPILOG,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    c = add("compose", "Parallel composition of .aut models.")
    c.add_argument("models", nargs="+")
    c.add_argument("--name")
    c.add_argument("--trim", action="store_true", help="keep only the trim part")
    c.add_argument("--dot", action="store_true", help="write Graphviz dot instead of .aut")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compose)

    m = add("make-recoverable", "Add a recovery event resetting each model to its initial state.")
    m.add_argument("models", nargs="+")
    m.add_argument("--kind", choices=(PLANT, SPEC), default=PLANT)
    m.add_argument("--event", help="recovery event id (single model only)")
    m.add_argument("--prefix", default="r_", help="id prefix when --event is not given (default r_)")
    m.add_argument("--out", help="output directory; also writes recovery.txt")
    m.set_defaults(func=cmd_make_recoverable)

    s = add("syncword", "Shortest synchronizing word of a model (exact search up to --cutoff states).")
    s.add_argument("model")
    s.add_argument("--cutoff", type=_positive, default=EXACT_LIMIT,
                   help=f"largest state count for exact search (default {EXACT_LIMIT})")
    s.add_argument("--initial", action="store_true", help="require the word to end in the initial state")
    s.add_argument("--greedy", action="store_true", help="skip exact search")
    s.set_defaults(func=cmd_syncword)

    def model_args(q):
        q.add_argument("--dir", help="directory with recovery.txt and the models it lists")
        q.add_argument("--plants", nargs="+", default=[], help="recoverable plant models")
        q.add_argument("--specs", nargs="+", default=[], help="recoverable specification models")

    def synth_args(q):
        q.add_argument("--cutoff", type=_positive, default=EXACT_LIMIT)
        q.add_argument("--out", help="directory for supervisor .aut files and stats.tsv")

    y = add("synth", "Monolithic or local modular synthesis.")
    model_args(y)
    synth_args(y)
    y.add_argument("--mode", choices=("modular", "monolithic"), default="modular")
    y.add_argument("--merge", action="append", metavar="E1,E2",
                   help="compose these specifications first (repeatable)")
    y.add_argument("--names", nargs="+", help="supervisor names in specification order")
    y.add_argument("--blocking", choices=(STRICT, WITH_RECOVERY), default=STRICT,
                   help="whether recovery events may be used to reach a marked state (default strict)")
    y.add_argument("--no-check", action="store_true", help="skip the nonconflict check")
    y.set_defaults(func=cmd_synth)

    n = add("check-nonconflict", "Nonconflict test of modular supervisors, ignoring recovery.")
    n.add_argument("supervisors", nargs="+")
    n.set_defaults(func=cmd_check_nonconflict)

    i = add("simulate", "Run a .scn scenario against plants and supervisors.")
    i.add_argument("scenario")
    i.add_argument("--plants", nargs="+", required=True)
    i.add_argument("--supervisors", nargs="+", required=True)
    i.add_argument("--sync-word", action="append", metavar="SUP=e1,e2,...",
                   help="recovery word for a supervisor (default: its recovery events, in a synchronizing order)")
    i.add_argument("--transcript", help="also write the transcript to this file")
    i.set_defaults(func=cmd_simulate)

    r = add("reproduce", "Run a bundled case study and compare with reference figures.")
    r.add_argument("case", choices=tuple(cases.CASES))
    r.add_argument("--mode", choices=("modular", "monolithic"), default="modular")
    r.add_argument("--blocking", choices=(STRICT, WITH_RECOVERY),
                   help="blocking rule for fms (default with-recovery, matching the reference figures)")
    r.add_argument("--cutoff", type=_positive, default=EXACT_LIMIT)
    r.add_argument("--out")
    r.add_argument("--transcript", help="small-factory: write the scenario transcript here")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"recosync: error: {exc}", file=sys.stderr)
        return USAGE
    except SimulationError as exc:
        print(f"recosync: simulation error: {exc}", file=sys.stderr)
        return FAILED
    except (RecosyncError, OSError) as exc:
        print(f"recosync: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
