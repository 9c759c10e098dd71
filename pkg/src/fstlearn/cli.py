"""Command-line entry point.

Subcommands: learn, synth, verify, simulate, sample, hankel, equiv, and
pipeline (dataset-to-verdict in one call). Results go to stdout, all
diagnostics to stderr. Exit codes: 0 success or positive verdict, 1
negative analysis verdict (NOT_RESILIENT, non-learnable data), 2 usage
or I/O errors, 3 resource-guard aborts.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

import numpy as np

from .errors import AnalysisError, FstlearnError
from .formats import (
    grid,
    letter_to_text,
    load_dataset,
    load_fst,
    save_dataset,
    save_fst,
    word_to_text,
)
from .fst import EPS, Fst, counterexample
from .loop import LoopConfig, format_trace, run, sample_attacker
from .spectral import LearnResult, learn_pipeline
from .supervisor import SynthesisResult, pattern_to_fst, synthesize, verify_resilient


def _load_mk(spec_text: str) -> Fst:
    # A value naming an existing file is loaded; anything else is
    # parsed as a desired-language pattern like ((a1:s2)(a2:s2))*.
    if os.path.exists(spec_text):
        return load_fst(spec_text)
    return pattern_to_fst(spec_text)


def _sanitize(symbol: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", symbol) if symbol != EPS else "eps"


def _dump_learn(res: LearnResult, outdir: str) -> None:
    os.makedirs(outdir, exist_ok=True)

    def save(name: str, mat) -> None:
        np.savetxt(os.path.join(outdir, name), np.atleast_2d(mat), fmt="%.10g")

    with open(os.path.join(outdir, "mask.txt"), "w", encoding="utf-8") as fh:
        for w in res.mask.prefixes:
            fh.write(f"psi {word_to_text(w)}\n")
        for w in res.mask.suffixes:
            fh.write(f"gamma {word_to_text(w)}\n")
    save("h_theta.txt", res.hankel.h_theta)
    save("p.txt", res.raw.p)
    save("s.txt", res.raw.s)
    save("b.txt", res.b)
    save("p_new.txt", res.natural.p)
    save("s_new.txt", res.natural.s)
    save("t0.txt", res.tup.t0)
    save("t_inf.txt", res.tup.t_inf)
    for chi, mat in res.hankel.h_chi.items():
        save(f"h_chi_{_sanitize(chi[0])}_{_sanitize(chi[1])}.txt", mat)
    for chi, mat in res.tup.trans.items():
        save(f"t_{_sanitize(chi[0])}_{_sanitize(chi[1])}.txt", mat)


def pipeline(
    sensor_data_path: str,
    actuator_data_path: str,
    plant: Fst,
    m_k: Fst,
    max_mask_len: int | None = None,
    tol_rank: float = 1e-9,
    tol_binary: float = 1e-6,
    dump_dir: str | None = None,
) -> SynthesisResult:
    """Learn both channel attackers, synthesize, and verify."""
    results: dict[str, LearnResult] = {}
    for channel, path in (("sensor", sensor_data_path), ("actuator", actuator_data_path)):
        d = load_dataset(path)
        if not d.words:
            raise AnalysisError("learn", f"{channel} dataset is empty")
        try:
            results[channel] = learn_pipeline(
                d, max_mask_len, tol_rank=tol_rank, tol_binary=tol_binary
            )
        except AnalysisError as exc:
            raise type(exc)(
                exc.stage, f"learning the {channel} attacker model failed: {exc.message}"
            ) from exc
        if dump_dir is not None:
            _dump_learn(results[channel], os.path.join(dump_dir, channel))
    a_s = results["sensor"].fst
    a_a = results["actuator"].fst
    s = synthesize(m_k, a_s, a_a)
    if dump_dir is not None:
        save_fst(s, os.path.join(dump_dir, "supervisor.fst"))
    return verify_resilient(plant, s, a_s, a_a, m_k)


def _cmd_learn(args: argparse.Namespace) -> int:
    d = load_dataset(args.data)
    if not d.words:
        raise AnalysisError("learn", "dataset is empty")
    res = learn_pipeline(
        d, args.max_mask_len, tol_rank=args.tol_rank, tol_binary=args.tol_binary
    )
    if args.dump_intermediates is not None:
        _dump_learn(res, args.dump_intermediates)
    save_fst(res.fst, args.out)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    s = synthesize(_load_mk(args.mk), load_fst(args.sensor_attacker), load_fst(args.actuator_attacker))
    save_fst(s, args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    result = verify_resilient(
        load_fst(args.plant),
        load_fst(args.supervisor),
        load_fst(args.sensor_attacker),
        load_fst(args.actuator_attacker),
        _load_mk(args.mk),
    )
    if result.resilient:
        print("RESILIENT")
        return 0
    print(f"NOT_RESILIENT witness={word_to_text(result.witness)}")
    return 1


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = LoopConfig(
        plant=load_fst(args.plant),
        supervisor=load_fst(args.supervisor),
        sensor_attacker=load_fst(args.sensor_attacker),
        actuator_attacker=load_fst(args.actuator_attacker),
        max_steps=args.steps,
        seed=args.seed,
    )
    text = format_trace(run(cfg))
    if args.trace_out is not None:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    d = sample_attacker(
        load_fst(args.attacker),
        n_words=args.n,
        max_len=args.max_len,
        seed=args.seed,
        exhaustive=args.mode == "exhaustive",
    )
    save_dataset(d, args.out)
    return 0


def _cmd_hankel(args: argparse.Namespace) -> int:
    from .hankel import build_hankel_set, find_basis, numeric_rank

    d = load_dataset(args.data)
    if not d.words:
        raise AnalysisError("hankel", "dataset is empty")
    max_len = args.max_mask_len
    if max_len is None:
        max_len = max(0, (max(len(w) for w in d.words) - 1) // 2)
    hz = build_hankel_set(d, find_basis(d, max_len))
    psi, gamma = hz.mask.prefixes, hz.mask.suffixes
    sys.stdout.write(grid(hz.h_theta, psi, gamma, "H_theta"))
    for chi in hz.alphabet:
        sys.stdout.write("\n" + grid(hz.h_chi[chi], psi, gamma, f"H_chi {letter_to_text(chi)}"))
    print(f"\nrank(H_theta) = {numeric_rank(hz.h_theta, args.tol_rank)}")
    return 0


def _cmd_equiv(args: argparse.Namespace) -> int:
    witness = counterexample(load_fst(args.left), load_fst(args.right))
    if witness is None:
        print("EQUIVALENT")
        return 0
    print(f"NOT_EQUIVALENT witness={word_to_text(witness)}")
    return 1


def _cmd_pipeline(args: argparse.Namespace) -> int:
    result = pipeline(
        args.sensor_data,
        args.actuator_data,
        load_fst(args.plant),
        _load_mk(args.mk),
        max_mask_len=args.max_mask_len,
        tol_rank=args.tol_rank,
        tol_binary=args.tol_binary,
        dump_dir=args.dump_intermediates,
    )
    if result.resilient:
        # The supervisor file is only written on success; a candidate that
        # failed verification is available via --dump-intermediates.
        if args.out is not None:
            save_fst(result.supervisor, args.out)
        print("RESILIENT")
        return 0
    print(f"NOT_RESILIENT witness={word_to_text(result.witness)}")
    return 1


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-9, help="relative rank cutoff")
    common.add_argument("--tol-binary", type=float, default=1e-6, help="binarization tolerance")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument(
        "--dump-intermediates", metavar="DIR", default=None, help="write intermediate matrices here"
    )

    parser = argparse.ArgumentParser(prog="fstlearn", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("learn", parents=[common], help="learn an FST from a sample dataset")
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--out", required=True, help="output FST file")
    p.add_argument("--max-mask-len", type=int, default=None, help="mask word length bound")
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("synth", parents=[common], help="synthesize a candidate supervisor")
    p.add_argument("--mk", required=True, help="desired-language FST file or pattern")
    p.add_argument("--sensor-attacker", required=True)
    p.add_argument("--actuator-attacker", required=True)
    p.add_argument("--out", required=True, help="output supervisor FST file")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("verify", parents=[common], help="check a supervisor for resilience")
    p.add_argument("--plant", required=True)
    p.add_argument("--supervisor", required=True)
    p.add_argument("--sensor-attacker", required=True)
    p.add_argument("--actuator-attacker", required=True)
    p.add_argument("--mk", required=True, help="desired-language FST file or pattern")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="run the clocked control loop")
    p.add_argument("--plant", required=True)
    p.add_argument("--supervisor", required=True)
    p.add_argument("--sensor-attacker", required=True)
    p.add_argument("--actuator-attacker", required=True)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--trace-out", default=None, help="trace file (default stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sample", parents=[common], help="record attack words from an attacker FST")
    p.add_argument("--attacker", required=True)
    p.add_argument("--mode", choices=("random", "exhaustive"), default="random")
    p.add_argument("--n", type=int, default=50, help="number of random walks")
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--out", required=True, help="output dataset file")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("hankel", parents=[common], help="print the Hankel matrices of a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--max-mask-len", type=int, default=None)
    p.set_defaults(func=_cmd_hankel)

    p = sub.add_parser("equiv", parents=[common], help="compare the languages of two FSTs")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("pipeline", parents=[common], help="learn both attackers, synthesize, verify")
    p.add_argument("--sensor-data", required=True)
    p.add_argument("--actuator-data", required=True)
    p.add_argument("--plant", required=True)
    p.add_argument("--mk", required=True, help="desired-language FST file or pattern")
    p.add_argument("--out", default=None, help="also write the supervisor FST here")
    p.add_argument("--max-mask-len", type=int, default=None)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FstlearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
