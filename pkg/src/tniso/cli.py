"""Command-line interface.

Subcommands: check-channel, classify, correct, simulate, epsilon, example.
Exit codes are stable across commands: 0 success, 1 analysis verdict
failure, 2 input error. Reports are deterministic for a fixed config and
seed; wall-clock duration lives under a separate "meta" key so the report
body can be hashed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .analysis import (
    build_correction,
    check_ns_factorization,
    classify,
    is_fixed,
)
from .channels import Superoperator, compose
from .codes import make_example2_channel, make_repetition_example
from .errors import ContractViolation, NotCorrectableError, TnisoError
from .robustness import (
    check_geometric_bound,
    check_prop3_bound,
    estimate_epsilon,
    simulate_iterated,
)
from . import serialize

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2

_STRATEGIES = {"petz": "time_reversal", "replace": "replace"}


def _default_tol() -> float:
    env = os.environ.get("TNISO_TOL")
    if env is None:
        return 1e-8
    try:
        value = float(env)
    except ValueError as exc:
        raise ContractViolation(f"TNISO_TOL is not a number: {env!r}") from exc
    if value <= 0:
        raise ContractViolation("TNISO_TOL must be positive")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tniso",
        description="Analyze trace-norm isometric encodings under CPTP noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, channel=False, code=False, recovery=False, state=False):
        if channel:
            p.add_argument("--channel", required=True, help="channel JSON file")
        if code:
            p.add_argument("--code", required=True, help="code JSON file")
        if recovery:
            p.add_argument("--recovery", help="recovery channel JSON file")
        if state:
            p.add_argument("--state", help="initial state JSON file")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--out", help="output path for the JSON report")

    p = sub.add_parser("check-channel", help="validate a channel file")
    add_common(p, channel=True)

    p = sub.add_parser("classify", help="full code classification table")
    add_common(p, channel=True, code=True)
    p.add_argument("--horizon", type=int, default=8, help="power sweep depth")
    p.add_argument("--strategy", choices=sorted(_STRATEGIES), default="petz")

    p = sub.add_parser("correct", help="construct and write a recovery channel")
    add_common(p, channel=True, code=True)
    p.add_argument("--strategy", choices=sorted(_STRATEGIES), default="petz")

    p = sub.add_parser("simulate", help="iterate recovery-after-channel")
    add_common(p, channel=True, code=True, recovery=True, state=True)
    p.add_argument("--iters", type=int, default=10, help="number of rounds")
    p.add_argument("--csv", help="write (n, error, bounds) rows to this CSV file")

    p = sub.add_parser("epsilon", help="estimate the per-round perturbation bracket")
    add_common(p, channel=True, code=True, recovery=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--refine", type=int, default=200)

    p = sub.add_parser("example", help="generate a named example system")
    p.add_argument("name", choices=["repetition", "example2"])
    p.add_argument("--p", type=float, default=0.4, help="flip probability")
    p.add_argument("--epsilon", type=float, default=0.05, help="phase-flip admixture")
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory for generated files")
    return parser


def _load_channel(path, tol_):
    return serialize.channel_from_dict(serialize.load_json(path))


def _load_code(path):
    return serialize.encoding_from_dict(serialize.load_json(path))


def _emit(report: dict, out_path, started: float) -> None:
    report["meta"] = {"duration_s": time.perf_counter() - started}
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _base_report(command: str, config: dict) -> dict:
    return {
        "command": command,
        "config": config,
        "results": {},
        "versions": {
            "tniso": __version__,
            "numpy": np.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
    }


def _cmd_check_channel(args, tol_):
    # validation is the point here, so load without the TP gate
    channel = serialize.channel_from_dict(
        serialize.load_json(args.channel), tp_tol=float("inf")
    )
    residual = channel.tp_defect()
    report = _base_report(
        "check-channel", {"channel": args.channel, "tol": tol_, "seed": args.seed}
    )
    report["results"] = {
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "kraus_count": len(channel.kraus),
        "tp_residual": float(residual),
        "trace_preserving": bool(residual <= tol_),
    }
    print(
        f"channel {args.channel}: {len(channel.kraus)} Kraus operators, "
        f"{channel.dim_in} -> {channel.dim_out}, TP residual {residual:.3e}"
    )
    code = EXIT_OK if residual <= tol_ else EXIT_VERDICT
    return code, report


def _cmd_classify(args, tol_):
    channel = _load_channel(args.channel, tol_)
    encoding = _load_code(args.code)
    if channel.dim_in != encoding.dim_physical or channel.dim_in != channel.dim_out:
        raise ContractViolation("channel and code dimensions do not match")
    result = classify(
        encoding,
        channel,
        horizon=args.horizon,
        tol_=tol_,
        seed=args.seed,
        strategy=_STRATEGIES[args.strategy],
    )
    table = result.as_dict()
    print(f"{'property':<24}{'verdict':<9}")
    for key in (
        "fixed",
        "preserved",
        "noiseless_certificate",
        "correctable",
        "completely_correctable",
        "protectable",
        "unitarily_correctable",
        "unitarily_recoverable",
    ):
        print(f"{key:<24}{'yes' if table[key] else 'no':<9}")
    for key, value in sorted(table["residuals"].items()):
        print(f"  residual[{key}] = {value:.3e}")
    report = _base_report(
        "classify",
        {
            "channel": args.channel,
            "code": args.code,
            "horizon": args.horizon,
            "strategy": args.strategy,
            "tol": tol_,
            "seed": args.seed,
        },
    )
    report["results"] = table
    return EXIT_OK, report


def _cmd_correct(args, tol_):
    channel = _load_channel(args.channel, tol_)
    encoding = _load_code(args.code)
    if channel.dim_in != encoding.dim_physical or channel.dim_in != channel.dim_out:
        raise ContractViolation("channel and code dimensions do not match")
    recovery, details = build_correction(
        encoding,
        channel,
        strategy=_STRATEGIES[args.strategy],
        tol_=tol_,
        seed=args.seed,
        return_details=True,
    )
    _, residual = is_fixed(encoding, compose(recovery, channel), tol_)
    out_path = args.out or "recovery.json"
    serialize.dump_json(serialize.channel_to_dict(recovery), out_path)
    verification = {
        "recovery_file": out_path,
        "fixed_residual": float(residual),
        "strategy_requested": details.strategy_requested,
        "strategy_used": details.strategy_used,
        "fell_back": details.fell_back,
        "kraus_count": len(recovery.kraus),
    }
    print(json.dumps(verification, indent=2, sort_keys=True))
    return EXIT_OK, None


def _round_epsilon(channel, recovery, encoding, samples, refine, seed):
    """Perturbation bracket of one recovery-after-channel round on the code."""
    loop = compose(recovery, channel) if recovery is not None else channel
    composite = loop.superoperator() @ encoding.superoperator()
    return estimate_epsilon(
        composite, encoding, samples=samples, refine_steps=refine, seed=seed
    )


def _cmd_simulate(args, tol_):
    channel = _load_channel(args.channel, tol_)
    encoding = _load_code(args.code)
    if not args.recovery:
        raise ContractViolation("simulate requires --recovery")
    recovery = _load_channel(args.recovery, tol_)
    if args.state:
        rho = serialize.state_from_json(serialize.load_json(args.state))
        if rho.shape[0] == encoding.dim_logical:
            rho = encoding.encode(rho)
        elif rho.shape[0] != encoding.dim_physical:
            raise ContractViolation(
                f"state dimension {rho.shape[0]} matches neither the logical "
                f"({encoding.dim_logical}) nor the physical ({encoding.dim_physical}) space"
            )
    else:
        d = encoding.dim_logical
        rho = encoding.encode(np.full((d, d), 1.0 / d, dtype=complex))
    if channel.dim_in != encoding.dim_physical:
        raise ContractViolation("channel and code dimensions do not match")

    est = _round_epsilon(channel, recovery, encoding, 200, 200, args.seed)
    trace = simulate_iterated(
        channel, recovery, rho, args.iters, encoding=encoding, epsilon=est.upper_bound
    )
    prop3_ok, margin = check_prop3_bound(trace, est.upper_bound)
    geo = check_geometric_bound(trace, est.upper_bound)

    results = {
        "iterations": args.iters,
        "errors": [float(x) for x in trace.errors],
        "decoded_errors": [float(x) for x in trace.decoded_errors],
        "final_decoded_state": serialize.state_to_json(
            encoding.decode(trace.states[-1])
        ),
        "alpha_estimates": [
            None if not np.isfinite(a) else float(a) for a in trace.alpha_estimates
        ],
        "alpha_max": None if trace.alpha_max is None else float(trace.alpha_max),
        "epsilon_witness": float(est.epsilon),
        "epsilon_upper": float(est.upper_bound),
        "linear_bound": [float(x) for x in trace.linear_bound],
        "geometric_bound": None
        if trace.geometric_bound is None
        else float(trace.geometric_bound),
        "linear_bound_ok": prop3_ok,
        "linear_bound_margin": float(margin),
        "geometric_bound_ok": geo.ok,
    }
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "error", "linear_bound", "geometric_bound"])
            gb = results["geometric_bound"]
            for i, err in enumerate(results["errors"]):
                writer.writerow([i, err, results["linear_bound"][i], gb])
    print(
        f"simulated {args.iters} rounds: final error {results['errors'][-1]:.6f}, "
        f"decoded error {results['decoded_errors'][-1]:.6f}, "
        f"per-round epsilon <= {est.upper_bound:.6f}"
    )
    report = _base_report(
        "simulate",
        {
            "channel": args.channel,
            "code": args.code,
            "recovery": args.recovery,
            "state": args.state,
            "iters": args.iters,
            "tol": tol_,
            "seed": args.seed,
        },
    )
    report["results"] = results
    return EXIT_OK, report


def _cmd_epsilon(args, tol_):
    channel = _load_channel(args.channel, tol_)
    encoding = _load_code(args.code)
    recovery = _load_channel(args.recovery, tol_) if args.recovery else None
    est = _round_epsilon(
        channel, recovery, encoding, args.samples, args.refine, args.seed
    )
    results = {
        "epsilon_witness": float(est.epsilon),
        "epsilon_upper": float(est.upper_bound),
        "witness_state": serialize.state_to_json(est.witness_state),
        "samples": est.samples,
        "refine_steps": est.refine_steps,
    }
    print(
        f"perturbation bracket: [{est.epsilon:.6e}, {est.upper_bound:.6e}] "
        f"({est.samples} samples, {est.refine_steps} refinement steps)"
    )
    report = _base_report(
        "epsilon",
        {
            "channel": args.channel,
            "code": args.code,
            "recovery": args.recovery,
            "samples": args.samples,
            "refine": args.refine,
            "tol": tol_,
            "seed": args.seed,
        },
    )
    report["results"] = results
    return EXIT_OK, report


def _example_goldens_repetition(system, p, tol_):
    deltas = []
    image = system.channel(system.encoding.encode(np.diag([1.0, 0.0]).astype(complex)))
    block = system.encoding.decomposition.restrict(image)[:4, :4]
    spectrum = np.sort(np.linalg.eigvalsh(block))[::-1]
    expected = np.sort([1.0 - p, p / 3.0, p / 3.0, p / 3.0])[::-1]
    if np.abs(spectrum - expected).max() > 1e-12:
        deltas.append(
            f"cofactor image spectrum {spectrum.tolist()} != {expected.tolist()}"
        )
    protect_loop = compose(system.channel, system.recovery)
    ns_ok, cof, ns_res = check_ns_factorization(
        protect_loop, system.encoding.decomposition, max(tol_, 1e-9)
    )
    if not ns_ok:
        deltas.append(
            f"channel-after-recovery does not factor off the logical qubit "
            f"(residual {ns_res:.3e})"
        )
    else:
        ref = np.zeros((4, 4), dtype=complex)
        ref[0, 0] = 1.0
        dev = np.abs(cof(ref) - np.diag([1.0 - p, p / 3.0, p / 3.0, p / 3.0])).max()
        if dev > 1e-12:
            deltas.append(f"cofactor channel image deviates by {dev:.3e}")
    _, fixed_res = is_fixed(
        system.encoding, compose(system.recovery, system.channel), 1e-10
    )
    if fixed_res > 1e-10:
        deltas.append(f"code not fixed under correction (residual {fixed_res:.3e})")
    if p == 0.0:
        ident = Superoperator.identity(8).matrix
        dev = np.abs(system.channel.superoperator().matrix - ident).max()
        if dev > 1e-12:
            deltas.append(f"p=0 channel is not the identity (deviation {dev:.3e})")
    return deltas


def _example_goldens_example2(system, channel, p, eps, iters, seed):
    deltas = []
    rho_c = 0.5 * np.ones((2, 2), dtype=complex)
    est = _round_epsilon(channel, system.recovery, system.encoding, 200, 200, seed)
    trace = simulate_iterated(
        channel,
        system.recovery,
        system.encoding.encode(rho_c),
        iters,
        encoding=system.encoding,
        epsilon=est.upper_bound,
    )
    ok, margin = check_prop3_bound(trace, est.upper_bound)
    if not ok:
        deltas.append(f"linear error bound violated (margin {margin:.3e})")
    final = system.encoding.decode(trace.states[-1])
    offdiag = [abs(system.encoding.decode(s)[0, 1]) for s in trace.states]
    if any(b > a + 1e-12 for a, b in zip(offdiag, offdiag[1:])):
        deltas.append("decoded coherence is not non-increasing")
    if (p, eps, iters) == (0.4, 0.05, 10):
        if abs(abs(final[0, 1]) - 0.332) > 1e-3:
            deltas.append(f"decoded off-diagonal {abs(final[0, 1]):.6f} != 0.332 +- 0.001")
        err = trace.decoded_errors[-1]
        if abs(err - 0.335) > 1e-3:
            deltas.append(f"decoded error {err:.6f} != 0.335 +- 0.001")
    return deltas, trace, est


def _cmd_example(args, tol_):
    os.makedirs(args.out, exist_ok=True)
    system = make_repetition_example(args.p)
    if args.name == "repetition":
        channel = system.channel
        deltas = _example_goldens_repetition(system, args.p, tol_)
        extra = {}
    else:
        channel = make_example2_channel(args.p, args.epsilon)
        deltas, trace, est = _example_goldens_example2(
            system, channel, args.p, args.epsilon, args.iters, args.seed
        )
        extra = {
            "errors": [float(x) for x in trace.decoded_errors],
            "epsilon_upper": float(est.upper_bound),
        }
    paths = {
        "channel": os.path.join(args.out, f"{args.name}_channel.json"),
        "code": os.path.join(args.out, f"{args.name}_code.json"),
        "recovery": os.path.join(args.out, f"{args.name}_recovery.json"),
    }
    serialize.dump_json(serialize.channel_to_dict(channel), paths["channel"])
    serialize.dump_json(serialize.encoding_to_dict(system.encoding), paths["code"])
    serialize.dump_json(serialize.channel_to_dict(system.recovery), paths["recovery"])
    for label, path in paths.items():
        print(f"wrote {label}: {path}")
    if deltas:
        for d in deltas:
            print(f"GOLDEN MISMATCH: {d}", file=sys.stderr)
    else:
        print("golden checks passed")
    report = _base_report(
        "example",
        {
            "name": args.name,
            "p": args.p,
            "epsilon": args.epsilon,
            "iters": args.iters,
            "out": args.out,
            "seed": args.seed,
        },
    )
    report["results"] = {"files": paths, "golden_ok": not deltas, "deltas": deltas, **extra}
    return (EXIT_OK if not deltas else EXIT_VERDICT), report


_DISPATCH = {
    "check-channel": _cmd_check_channel,
    "classify": _cmd_classify,
    "correct": _cmd_correct,
    "simulate": _cmd_simulate,
    "epsilon": _cmd_epsilon,
    "example": _cmd_example,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        tol_ = args.tol if getattr(args, "tol", None) is not None else _default_tol()
        code, report = _DISPATCH[args.command](args, tol_)
    except NotCorrectableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except (TnisoError, FileNotFoundError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if report is not None:
        out = getattr(args, "out", None)
        if args.command == "example":
            out = os.path.join(args.out, f"{args.name}_report.json")
        _emit(report, out, started)
    return code


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
