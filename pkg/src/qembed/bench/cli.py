"""Command line front end.

Subcommands: encode (one-off vectors, bitstrings or text), preprocess,
bench and report.  Exit status is 0 on success, 1 for configuration or
usage problems (including unknown flags) and 2 for data problems.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .. import encoding as enc
from .. import qsim
from ..errors import (
    ConfigError,
    EncodingError,
    InvalidHyperparameter,
    InvalidScheme,
    QembedError,
)
from ..pipeline import run_preprocess
from . import report as report_mod
from . import runner as runner_mod
from .config import config_from_dict, load_raw

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise EncodingError(f"cannot parse vector {text!r}") from None


def _parse_bits(text: str) -> list[int]:
    if not all(c in "01" for c in text):
        raise EncodingError(f"bitstring {text!r} must contain only 0 and 1")
    return [int(c) for c in text]


def _fmt(arr) -> str:
    return np.array2string(
        np.asarray(arr), separator=", ", threshold=64, max_line_width=100
    )


def _print_state(state, readout: str) -> None:
    print(f"qubits: {state.n_qubits}")
    probs = qsim.probabilities(state)
    nz = np.flatnonzero(probs > 1e-15)
    if nz.size == 1:
        label = format(int(nz[0]), f"0{state.n_qubits}b")
        print(f"state index: {int(nz[0])} (|{label}>)")
    print(f"amplitudes: {_fmt(state.amps)}")
    features = enc.readout_features(state, readout)
    print(f"readout ({readout}): {_fmt(features)}")


def _cmd_encode(args) -> int:
    if args.text is not None:
        states = enc.basis_encode_text(args.text)
        for ch, state in zip(args.text, states):
            print(f"char {ch!r} (code {ord(ch)}):")
            _print_state(state, args.readout or "probability_vector")
        return EXIT_OK

    if args.scheme == "basis":
        if args.bits is None:
            raise ConfigError("basis encoding needs --bits or --text")
        state = enc.basis_encode(_parse_bits(args.bits))
        readout = args.readout or enc.default_readout("basis")
    elif args.scheme == "superposition":
        if not args.strings:
            raise ConfigError("superposition encoding needs --strings")
        state = enc.superposition_encode(args.strings.split(","))
        readout = args.readout or "probability_vector"
    elif args.scheme == "angle":
        if args.vector is None:
            raise ConfigError("angle encoding needs --vector")
        values = _parse_floats(args.vector)
        if args.degrees:
            values = list(np.radians(values))
            scheme = enc.angle_scheme(args.axis, "raw", args.readout)
        else:
            scheme = enc.angle_scheme(args.axis, args.map, args.readout)
        state = enc.angle_encode(values, scheme)
        readout = scheme.readout
    elif args.scheme == "amplitude":
        if args.vector is None:
            raise ConfigError("amplitude encoding needs --vector")
        state = enc.amplitude_encode(_parse_floats(args.vector))
        readout = args.readout or enc.default_readout("amplitude")
    else:
        raise ConfigError(f"unknown scheme {args.scheme!r}")
    _print_state(state, readout)
    return EXIT_OK


def _load_config(args):
    if not args.config:
        raise ConfigError("--config is required")
    raw = load_raw(args.config)
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be a nonnegative integer")
        raw = dict(raw)
        raw["seed"] = args.seed
    return config_from_dict(raw)


def _cmd_preprocess(args) -> int:
    config = _load_config(args)
    dataset = runner_mod.load_dataset(config)
    result = run_preprocess(dataset, config.preprocess)
    out_dir = runner_mod.resolve_output_dir(config, args.out)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "preprocess.json")
    payload = {
        "report": result.report.to_dict(),
        "train_rows": result.train.n_rows,
        "test_rows": result.test.n_rows,
        "n_components": result.report.n_components,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    dropped = ", ".join(d.name for d in result.report.dropped) or "none"
    print(f"rows: {dataset.n_rows} -> train {result.train.n_rows}, test {result.test.n_rows}")
    print(f"dropped columns: {dropped}")
    print(f"components kept: {result.report.n_components} (elbow {result.report.elbow_index})")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = _load_config(args)
    run = runner_mod.run_matrix(config, repeat=args.repeat)
    out_dir = runner_mod.resolve_output_dir(config, args.out)
    results_path = runner_mod.persist_run(run, out_dir)
    report_path = report_mod.write_report(run.results, args.format, out_dir)
    print(report_mod.emit_report(run.results, args.format), end="")
    print(f"wrote {results_path}")
    print(f"wrote {report_path}")
    return EXIT_OK


def _cmd_report(args) -> int:
    results = runner_mod.load_results(args.results)
    if args.out:
        path = report_mod.write_report(results, args.format, args.out)
        print(f"wrote {path}")
    else:
        print(report_mod.emit_report(results, args.format), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qembed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_enc = sub.add_parser("encode", help="encode one vector, bitstring or text")
    p_enc.add_argument("--scheme", default="basis",
                       choices=("basis", "superposition", "angle", "amplitude"))
    p_enc.add_argument("--vector", help="comma-separated numbers")
    p_enc.add_argument("--bits", help="bitstring such as 101")
    p_enc.add_argument("--strings", help="comma-separated bitstrings to superpose")
    p_enc.add_argument("--text", help="ASCII text, one 7-qubit state per character")
    p_enc.add_argument("--axis", default="X", choices=("X", "Y", "Z"))
    p_enc.add_argument("--map", default="linear_pi", choices=("linear_pi", "raw"),
                       help="angle map for --scheme angle")
    p_enc.add_argument("--degrees", action="store_true",
                       help="treat --vector entries as rotation angles in degrees")
    p_enc.add_argument("--readout",
                       choices=("probability_vector", "z_expectations", "amplitude_parts"))
    p_enc.set_defaults(func=_cmd_encode)

    p_pre = sub.add_parser("preprocess", help="run the preprocessing chain only")
    p_pre.add_argument("--config", required=True)
    p_pre.add_argument("--seed", type=int)
    p_pre.add_argument("--out")
    p_pre.set_defaults(func=_cmd_preprocess)

    p_bench = sub.add_parser("bench", help="run the full encoding x model matrix")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--out")
    p_bench.add_argument("--format", default="csv", choices=report_mod.FORMATS)
    p_bench.add_argument("--repeat", type=int, default=1,
                         help="rerun the matrix n times, report median timings")
    p_bench.set_defaults(func=_cmd_bench)

    p_rep = sub.add_parser("report", help="re-render a saved results file")
    p_rep.add_argument("--results", required=True, help="path to results.json")
    p_rep.add_argument("--format", default="csv", choices=report_mod.FORMATS)
    p_rep.add_argument("--out")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, InvalidScheme, InvalidHyperparameter) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QembedError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
