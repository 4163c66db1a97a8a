"""Command-line front end.

Subcommands:

* ``simulate``: run a circuit file through an engine, one JSON object
  per trial on stdout.
* ``verify-table1``: exhaustively check the adapted-T measurement
  table (optionally a user-supplied table file) and print the report.
* ``stats``: sample retry-loop attempt counts and emit a CSV of
  empirical vs model tail probabilities.
* ``compare``: run every engine on the same circuit and inputs and
  emit a per-run cost CSV.

Exit codes: 0 success, 1 verification or fidelity failure, 2 bad
usage or unreadable input.  Seeds come from --seed, else the
MBQC_SEED environment variable, else fresh entropy; the chosen seed
is always echoed to stderr so any run can be replayed.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys

import numpy as np

from .circuit import CircuitParseError, parse_circuit
from .engines import (
    ENGINE_NAMES,
    ENGINES,
    TerminationModel,
    compare_costs,
    sample_attempt_counts,
)
from .gadgets import load_table1, verify_table1
from .measurement import RandomSource
from .numerics import basis_state, random_state

FIDELITY_GATE = 1.0 - 1e-9


def _resolve_seed(value):
    """(seed, auto) from the flag, MBQC_SEED, or fresh entropy."""
    if value is not None:
        return value, False
    env = os.environ.get("MBQC_SEED")
    if env is not None:
        try:
            return int(env), False
        except ValueError:
            raise SystemExit(f"error: MBQC_SEED is not an integer: {env!r}")
    return secrets.randbits(32), True


def _announce_seed(seed, auto):
    tag = " (auto)" if auto else ""
    print(f"# seed {seed}{tag}", file=sys.stderr)


def _read_circuit(path):
    if path == "-":
        return parse_circuit(sys.stdin.read())
    with open(path, "r", encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def _input_state(spec, num_qubits, gen):
    """Initial register from an --input spec.

    ``None`` means |0...0>; ``random`` draws a fresh state from the
    trial's input substream; anything else must be a bit string of
    the register width.
    """
    if spec is None:
        return basis_state("0" * num_qubits)
    if spec == "random":
        return random_state(num_qubits, gen)
    if len(spec) != num_qubits or any(c not in "01" for c in spec):
        raise ValueError(
            f"--input must be 'random' or {num_qubits} bits, got {spec!r}"
        )
    return basis_state(spec)


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _cmd_simulate(args):
    circuit = _read_circuit(args.circuit)
    seed, auto = _resolve_seed(args.seed)
    _announce_seed(seed, auto)
    src = RandomSource(seed)
    out, close = _open_out(args.out)
    worst = 1.0
    try:
        for trial in range(args.trials):
            sub = src.substream(trial)
            state = _input_state(
                args.input, circuit.num_qubits, sub.substream(0).gen
            )
            if args.engine == "frame":
                report = ENGINES["frame"](
                    circuit, state, sub.substream(1), finalize=args.finalize
                )
            else:
                report = ENGINES[args.engine](circuit, state, sub.substream(1))
            payload = {"trial": trial}
            payload.update(report.to_json_dict())
            print(json.dumps(payload), file=out)
            worst = min(worst, report.fidelity_vs_oracle)
    finally:
        if close:
            out.close()
    print(f"# min fidelity {worst:.12f}", file=sys.stderr)
    return 0 if worst >= FIDELITY_GATE else 1


def _cmd_verify_table1(args):
    seed, auto = _resolve_seed(args.seed)
    _announce_seed(seed, auto)
    table = load_table1(args.table) if args.table else None
    report = verify_table1(
        table=table, states_per_key=args.states, seed=seed
    )
    out, close = _open_out(args.out)
    try:
        out.write(report.render(table))
    finally:
        if close:
            out.close()
    return 0 if report.ok else 1


def _cmd_stats(args):
    seed, auto = _resolve_seed(args.seed)
    _announce_seed(seed, auto)
    counts = sample_attempt_counts(args.trials, RandomSource(seed))
    model = TerminationModel()
    total = int(counts.sum())
    lines = [
        f"# seed {seed}",
        f"# trials {args.trials}",
        f"# total_attempts {total}",
        f"# success_rate {args.trials / total:.6f}",
        f"# mean_attempts {total / args.trials:.6f}",
        "k,empirical_tail,model_tail,stderr",
    ]
    for k in range(args.max_k + 1):
        tail = model.tail(k)
        empirical = float(np.mean(counts > k))
        err = np.sqrt(tail * (1.0 - tail) / args.trials)
        lines.append(f"{k},{empirical:.6f},{tail:.6f},{err:.6f}")
    out, close = _open_out(args.out)
    try:
        out.write("\n".join(lines) + "\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_compare(args):
    circuit = _read_circuit(args.circuit)
    seed, auto = _resolve_seed(args.seed)
    _announce_seed(seed, auto)
    rows = compare_costs(circuit, args.trials, seed)
    out, close = _open_out(args.out)
    try:
        print(
            "engine,circuit_len,trial,gadget_calls,corrective_calls,fidelity",
            file=out,
        )
        for r in rows:
            print(
                f"{r.engine},{r.circuit_len},{r.trial},"
                f"{r.gadget_calls},{r.corrective_calls},{r.fidelity:.12f}",
                file=out,
            )
    finally:
        if close:
            out.close()
    return 0 if all(r.fidelity >= FIDELITY_GATE for r in rows) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mbqcsim",
        description="Measurement-based simulation of unitary circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a circuit through an engine")
    sim.add_argument("--circuit", required=True, help="circuit file, or - for stdin")
    sim.add_argument("--engine", choices=ENGINE_NAMES, default="frame")
    sim.add_argument(
        "--input",
        default=None,
        help="initial register: bit string or 'random' (default all zeros)",
    )
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--trials", type=int, default=1)
    sim.add_argument(
        "--finalize",
        choices=("apply", "report"),
        default="apply",
        help="frame engine only: apply the frame or report it raw",
    )
    sim.add_argument("--out", default=None, help="write output to a file")
    sim.set_defaults(func=_cmd_simulate)

    ver = sub.add_parser(
        "verify-table1", help="check the adapted-T measurement table"
    )
    ver.add_argument("--table", default=None, help="table file (default: packaged)")
    ver.add_argument("--states", type=int, default=20, help="random states per key")
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--out", default=None)
    ver.set_defaults(func=_cmd_verify_table1)

    st = sub.add_parser("stats", help="retry-loop attempt statistics as CSV")
    st.add_argument("--trials", type=int, default=10000)
    st.add_argument("--max-k", type=int, default=10, help="largest tail cutoff")
    st.add_argument("--seed", type=int, default=None)
    st.add_argument("--out", default=None)
    st.set_defaults(func=_cmd_stats)

    cmp_ = sub.add_parser("compare", help="per-engine gadget-cost CSV")
    cmp_.add_argument("--circuit", required=True)
    cmp_.add_argument("--trials", type=int, default=20)
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--out", default=None)
    cmp_.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CircuitParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
