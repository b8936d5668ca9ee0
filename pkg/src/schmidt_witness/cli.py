"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .countsfile import CountsFormatError, read_counts, serialize_counts
from .extremal import (
    ExtremalResult,
    classical_max_a,
    max_b,
    quantum_max_a,
    verify_appendix_configs,
)
from .qsim import q_gate_povm, tetrahedron_povm, verify_gate_identities
from .report import build_report, matrix_csv, nosignal_table
from .scenarios import ScenarioSpec, prepare_measure_counterexample
from .stats import (
    CountsError,
    estimate_matrix,
    extra_dimension_counts,
    no_signaling_test,
    sample_counts,
    signaling_counts,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str):
    try:
        return read_counts(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except CountsFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_simulate(args) -> int:
    spec = ScenarioSpec.from_name(args.scenario)
    if args.middle is not None:
        if spec.kind != "A":
            raise InputError("--middle only applies to kind A scenarios")
        spec = ScenarioSpec(spec.kind, spec.measurement_set, args.middle)
    table = sample_counts(spec, args.shots, args.jobs, args.reps, args.seed, device=args.device)
    _emit(serialize_counts(table), args.output)
    return EXIT_OK


def cmd_score(args) -> int:
    table = _load(args.file)
    report = build_report(table)
    text = report.to_json() if args.json else report.to_text()
    if args.matrix:
        if table.kind == "A":
            text += "probability matrix:\n" + matrix_csv(estimate_matrix(table).entries)
        else:
            for s in report.spectators:
                text += f"probability matrix a0={s[0]} b0={s[1]}:\n"
                text += matrix_csv(estimate_matrix(table, spectator=s).entries)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_nosignal(args) -> int:
    table = _load(args.file)
    if table.kind != "A":
        raise InputError("the no-signaling test needs a kind A counts file")
    sys.stdout.write(nosignal_table(no_signaling_test(table)))
    return EXIT_OK


def _describe(result: ExtremalResult) -> str:
    p = result.problem
    lines = [
        f"kind {p.kind}  model {p.model}  n {p.n}  d {p.d}",
        f"value {result.value:.12g}" + ("  (4^n W)" if p.kind == "A" else "  (W)"),
    ]
    if result.reference is not None:
        lines.append(f"published {result.reference:.12g}  deviation {result.deviation:.3g}")
    else:
        lines.append("published value: none")
    lines.append(f"method {result.method}  restarts {result.restarts}")
    prm = result.parameters
    with np.printoptions(precision=6, suppress=True):
        if "rank_forced" in prm:
            lines.append("rank argument: det p vanishes identically")
        if "binary" in prm:
            lines.append("binary measurements:\n" + "\n".join(" ".join(map(str, r)) for r in prm["binary"]))
            lines.append(f"rho {np.asarray(prm['rho'])}")
        if "psi" in prm:
            lines.append(f"psi {np.asarray(prm['psi'])}")
        if "vectors" in prm:
            lines.append(f"vectors\n{np.asarray(prm['vectors'])}")
    return "\n".join(lines) + "\n"


def cmd_maxima(args) -> int:
    kind = args.kind.upper()
    if kind == "A":
        if args.model == "classical":
            res = classical_max_a(args.n, args.d, args.restarts, args.seed)
        else:
            res = quantum_max_a(args.n, args.d, args.model, args.restarts, args.seed)
    else:
        res = max_b(args.n, args.d, args.model, args.restarts, args.seed)
    sys.stdout.write(_describe(res))
    return EXIT_OK


def cmd_verify(args) -> int:
    failures = 0
    out = []

    def line(ok: bool, name: str, detail: str) -> None:
        nonlocal failures
        failures += not ok
        out.append(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}")

    for c in verify_gate_identities():
        line(c.ok, c.name, f"deviation {c.deviation:.2e}, phase {c.phase.real:+.6f}{c.phase.imag:+.6f}j")
    for name, povm in (("tetrahedron POVM", tetrahedron_povm()), ("Q readout POVM", q_gate_povm())):
        total = sum(e.matrix for e in povm.effects)
        dev = float(np.max(np.abs(total - np.eye(total.shape[0]))))
        line(dev < 1e-12, f"{name} completeness", f"deviation {dev:.2e}")
    for c in verify_appendix_configs(args.n7_restarts):
        line(c.ok, c.name, f"value {c.value:.16g}, published {c.published:.16g}, deviation {c.deviation:.2e}")
    ce = prepare_measure_counterexample()
    line(ce.det_printed == Fraction(1, 8), "counterexample determinant", f"printed matrix det = {ce.det_printed}")
    diffs = ", ".join(f"({i + 1},{j + 1}) {a} vs {b}" for i, j, a, b in ce.mismatches())
    out.append(
        f"[note] counterexample rebuilt from the listed vectors: det = {ce.det_constructed}; "
        + ("matches the printed matrix" if ce.matches else f"differs at {diffs}")
    )
    out.append(f"{failures} failure(s)")
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_FAIL if failures else EXIT_OK


def cmd_perturb(args) -> int:
    table = _load(args.file)
    if args.mode == "signaling":
        if table.kind != "A":
            raise InputError("signaling injection needs a kind A counts file")
        i, j = args.setting
        if not (1 <= i <= 4 and 1 <= j <= 4):
            raise InputError("--setting indices must lie in 1..4")
        new = signaling_counts(table, i, j, args.epsilon)
    else:
        new = extra_dimension_counts(table, args.epsilon)
    _emit(serialize_counts(new), args.output)
    return EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _fraction(text: str) -> float:
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schmidt-witness", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic counts file from the ideal circuits")
    p.add_argument("--scenario", required=True, choices=("a-set1", "a-set2", "b"))
    p.add_argument("--shots", type=_positive, required=True)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--reps", type=_positive, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--middle", type=int, choices=(2, 3), default=None, help="middle qubits (kind A)")
    p.add_argument("--device", default="simulator")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("score", help="witness, errors and z-scores for a counts file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--matrix", action="store_true", help="append the probability matrix as CSV")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("nosignal", help="48 pairwise marginal comparisons")
    p.add_argument("file")
    p.set_defaults(func=cmd_nosignal)

    p = sub.add_parser("maxima", help="classical or quantum maximum of the witness")
    p.add_argument("--kind", required=True, choices=("a", "b", "A", "B"))
    p.add_argument("--model", required=True, choices=("classical", "real", "complex"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--restarts", type=_positive, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_maxima)

    p = sub.add_parser("verify", help="gate identities, POVMs, printed configurations")
    p.add_argument("--n7-restarts", type=_positive, default=40)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("perturb", help="inject signaling or extra-level counts")
    p.add_argument("file")
    p.add_argument("--epsilon", type=_fraction, required=True)
    p.add_argument("--mode", required=True, choices=("signaling", "extra-dim"))
    p.add_argument("--setting", type=int, nargs=2, default=(2, 1), metavar=("I", "J"))
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_perturb)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, CountsError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
