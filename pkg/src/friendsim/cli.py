"""Command-line front end.

Every subcommand writes one CSV (stdout unless ``--out`` is given) whose
leading ``#`` lines record the package version, the command, the seed and
all resolved parameters.  The resolved configuration is also echoed to
stderr.  Exit status: 0 on success, 2 on usage errors, 1 on runtime
errors.

Settings may come from an optional ``--config`` file of ``key=value``
lines; explicit flags win over the file, which wins over built-in
defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._jit import backend_name
from .monogamy import PARTICLE_RHS_LINES, Measure, ckw_check, monogamy_table, scan_to_csv
from .povm import (
    OutcomeImpossibleError,
    PartitionError,
    born_update,
    load_manifest,
    outcome_probabilities,
    sample_measurement,
)
from .protocol import (
    CANONICAL_ALPHA,
    CANONICAL_BETA,
    CANONICAL_TILDE,
    ProtocolParams,
    conditional_posterior,
    fig1_sweep,
    prob_spin_down,
    sample_spin_down,
)
from .qstate import AnnihilatedStateError, InvariantError, Ket, purity
from .stopping import (
    DEFAULT_SEED,
    BaxterChaconConfig,
    DeviceSyncConfig,
    baxter_chacon_experiment,
    device_sync_experiment,
    parse_config_text,
)
from .textio import MatrixParseError, load_matrix_file, parse_complex

class UsageError(Exception):
    """Invalid flag value or parameter combination (exit status 2)."""


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v, 0) for v in text.replace(" ", "").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _amplitude(text: str) -> complex:
    try:
        z = parse_complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return z.real if z.imag == 0 else z


def _seed(text: str) -> int:
    try:
        s = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return s


def _positive_int(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _global_options(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=_seed, default=d(DEFAULT_SEED), help="64-bit RNG seed")
    parser.add_argument("--out", default=d(None), help="output CSV path (stdout if omitted)")
    parser.add_argument("--config", default=d(None), help="optional key=value settings file")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="friendsim",
        description="Run the friends-protocol, stopping-time and monogamy experiments; emit CSV.",
        formatter_class=fmt,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    subs = {}

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, parents=[common], formatter_class=fmt)
        subs[name] = p
        return p

    def amplitudes(p):
        p.add_argument("--alpha", type=_amplitude, default=CANONICAL_ALPHA, help="particle amplitude on down")
        p.add_argument("--beta", type=_amplitude, default=CANONICAL_BETA, help="particle amplitude on up")
        p.add_argument("--alpha-t", type=_amplitude, default=CANONICAL_TILDE, help="tilded amplitude on down")
        p.add_argument("--beta-t", type=_amplitude, default=CANONICAL_TILDE, help="tilded amplitude on up")

    p = add("fig1", "Spin-down probability swept over phi in [0, 4 pi].")
    p.add_argument("--rho", type=float, default=1.0 / math.sqrt(2.0), help="detector overlap")
    p.add_argument("--phi-points", type=int, default=401, help="number of phase grid points")
    amplitudes(p)

    p = add("protocol", "Single-point posterior state and spin-down probability.")
    p.add_argument("--rho", type=float, default=1.0 / math.sqrt(2.0), help="detector overlap")
    p.add_argument("--phi", type=float, default=0.0, help="phase in radians")
    p.add_argument("--samples", type=int, default=0, help="Born-rule draws for a sampled frequency (0 = none)")
    amplitudes(p)

    bc = BaxterChaconConfig()
    p = add("baxter-chacon", "Exceedance probabilities of the stopping-pair convergence experiment.")
    p.add_argument("--trials", type=_positive_int, default=bc.n_trials, help="Monte Carlo trials")
    p.add_argument("--n-list", type=_int_list, default=",".join(map(str, bc.n_list)), help="comma-separated n values")
    p.add_argument("--epsilon", type=float, default=bc.epsilon, help="exceedance threshold")

    ds = DeviceSyncConfig()
    p = add("device-sync", "Joint transition statistics of two devices reading one path.")
    p.add_argument("--trials", type=_positive_int, default=ds.n_trials, help="Monte Carlo trials")

    p = add("monogamy", "Room-dimension scan of the detached-particle construction.")
    p.add_argument("--dmax", type=int, default=8, help="largest room dimension (2..32)")
    p.add_argument("--construction", choices=("detached", "swapped"), default="detached")

    p = add("ckw", "Monogamy report for a tripartite pure state file.")
    p.add_argument("--state", required=True, help="ket or rank-1 density matrix file, dims 2 dB dL")
    p.add_argument(
        "--measure",
        choices=("auto",) + tuple(m.value for m in Measure),
        default="auto",
        help="pairwise measure; auto = Wootters for qubit rooms, else Negativity",
    )

    p = add("povm-demo", "Outcome probabilities and one seeded draw for a projector manifest.")
    p.add_argument("--state", required=True, help="ket or density matrix file")
    p.add_argument("--projectors", required=True, help="manifest of 'FILE TAU' lines")
    return parser, subs


# ------------------------------------------------------------------ config


def _read_config(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_EXPERIMENT_CONFIG = {"baxter-chacon": BaxterChaconConfig, "device-sync": DeviceSyncConfig}


def _apply_config(args, sub) -> tuple[dict[str, str], dict[str, str]]:
    """Split ``--config`` keys into flag defaults and experiment-only settings."""
    cfg = _read_config(args.config)
    dests = {a.dest for a in sub._actions} - {"help", "config"}
    cls = _EXPERIMENT_CONFIG.get(args.command)
    fields = {f.name for f in dataclasses.fields(cls)} if cls else set()
    flag_defaults, extra = {}, {}
    for key, value in cfg.items():
        if key in dests:
            flag_defaults[key] = value
        elif key in fields:
            extra[key] = value
        else:
            raise UsageError(f"config: unknown key {key!r} for {args.command}")
    return flag_defaults, extra


# ----------------------------------------------------------------- helpers


def _meta(command: str, seed: int, params: dict) -> dict:
    meta = {"friendsim": __version__, "command": command, "seed": seed}
    meta.update(params)
    return meta


def _comment_block(meta: dict) -> str:
    return "".join(f"# {k}={v}\n" for k, v in meta.items())


def _echo(meta: dict):
    print(f"# backend={backend_name()}", file=sys.stderr)
    sys.stderr.write(_comment_block(meta))


def _params(args, **extra) -> ProtocolParams:
    try:
        return ProtocolParams(
            alpha=args.alpha, beta=args.beta, alpha_t=args.alpha_t, beta_t=args.beta_t,
            rho_overlap=args.rho, **extra,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _experiment_config(cls, extra: dict, overrides: dict):
    text = "\n".join(f"{k}={v}" for k, v in extra.items())
    try:
        cfg = dataclasses.replace(parse_config_text(text, cls), **overrides)
        return cfg.validate()
    except ValueError as exc:
        raise UsageError(f"config: {exc}") from None


def _pure_ket(obj) -> Ket:
    if isinstance(obj, Ket):
        return obj
    if abs(purity(obj) - 1.0) > 1e-10:
        raise ValueError(f"state is mixed (purity {purity(obj):.6g}); a pure state is required")
    w, v = np.linalg.eigh(obj.entries)
    return Ket(obj.dims, v[:, -1])


# ---------------------------------------------------------------- commands


def cmd_fig1(args, extra):
    p = _params(args)
    if args.phi_points < 2:
        raise UsageError("phi_points must be at least 2")
    table = fig1_sweep(p, args.phi_points)
    meta = _meta("fig1", args.seed, {})
    _echo({**meta, **{k: v for k, v in p.as_dict().items() if k != "phi"}, "phi_points": args.phi_points})
    return table.to_csv(meta)


def cmd_protocol(args, extra):
    p = _params(args, phi=args.phi)
    meta = _meta("protocol", args.seed, p.as_dict())
    _echo(meta)
    post, a = conditional_posterior(p)
    pd = prob_spin_down(p)
    c_down, c_up = post.amplitudes
    head = "rho,phi,A,c_down_re,c_down_im,c_up_re,c_up_im,p_down"
    row = [p.rho_overlap, p.phi, a, c_down.real, c_down.imag, c_up.real, c_up.imag, pd]
    if args.samples > 0:
        k = sample_spin_down(p, args.samples, args.seed)
        head += ",samples,sampled_p_down"
        row += [args.samples, k / args.samples]
    cells = ",".join(str(v) if isinstance(v, int) else repr(float(v)) for v in row)
    return _comment_block(meta) + head + "\n" + cells + "\n"


def cmd_baxter_chacon(args, extra):
    cfg = _experiment_config(
        BaxterChaconConfig, extra,
        {"n_trials": args.trials, "n_list": tuple(args.n_list), "epsilon": args.epsilon, "seed": args.seed},
    )
    meta = _meta("baxter-chacon", args.seed, dataclasses.asdict(cfg))
    meta["n_list"] = ",".join(map(str, cfg.n_list))
    _echo(meta)
    report = baxter_chacon_experiment(cfg)
    return _comment_block(meta) + report.to_csv()


def cmd_device_sync(args, extra):
    cfg = _experiment_config(DeviceSyncConfig, extra, {"n_trials": args.trials, "seed": args.seed})
    meta = _meta("device-sync", args.seed, dataclasses.asdict(cfg))
    meta["n_list"] = ",".join(map(str, cfg.n_list))
    _echo(meta)
    report = device_sync_experiment(cfg)
    return _comment_block(meta) + report.to_csv()


def cmd_monogamy(args, extra):
    if not 2 <= args.dmax <= 32:
        raise UsageError(f"dmax must lie in [2, 32], got {args.dmax}")
    meta = _meta("monogamy", args.seed, {"dmax": args.dmax, "construction": args.construction})
    _echo(meta)
    return scan_to_csv(monogamy_table(args.dmax, args.construction), meta)


def cmd_ckw(args, extra):
    psi = _pure_ket(load_matrix_file(args.state))
    measure = args.measure
    if measure == "auto":
        measure = Measure.WoottersConcurrence if psi.dims == (2, 2, 2) else Measure.Negativity
    report = ckw_check(psi, measure)
    meta = _meta("ckw", args.seed, {"state": args.state, "measure": Measure(measure).value})
    for name in ("c2_pB", "c2_pL", "c2_BL", "c2_p_BL", "c2_B_pL", "c2_L_pB"):
        meta[name] = repr(getattr(report, name))
    meta["satisfied"] = int(report.satisfied)
    _echo(meta)
    lines = ["line,kind,lhs,rhs,holds"]
    for name, (lhs, rhs, holds) in report.lines.items():
        kind = "as_printed" if name in PARTICLE_RHS_LINES else "focus"
        lines.append(f"{name},{kind},{lhs!r},{rhs!r},{int(holds)}")
    return _comment_block(meta) + "\n".join(lines) + "\n"


def cmd_povm_demo(args, extra):
    state = load_matrix_file(args.state)
    rho = state.dm() if isinstance(state, Ket) else state
    mp = load_manifest(args.projectors)
    if mp.dims != rho.dims:
        raise ValueError(f"state dims {rho.dims} do not match projector dims {mp.dims}")
    probs = outcome_probabilities(rho, mp)
    record = sample_measurement(rho, mp, args.seed)
    # a second draw on the post-measurement state must reproduce the outcome
    again = sample_measurement(record.post_state, mp, args.seed + 1 if args.seed + 1 < 2**64 else 0)
    check = born_update(record.post_state, mp.projectors[record.outcome_index])
    meta = _meta("povm-demo", args.seed, {"state": args.state, "projectors": args.projectors})
    meta.update(
        sampled_outcome=record.outcome_index,
        sampled_probability=repr(record.probability),
        repeat_outcome=again.outcome_index,
        repeat_probability=repr(check.probability),
    )
    _echo(meta)
    lines = ["index,tau,probability,sampled"]
    for i, (tau, pr) in enumerate(zip(mp.taus.taus, probs)):
        lines.append(f"{i},{float(tau)!r},{float(pr)!r},{int(i == record.outcome_index)}")
    return _comment_block(meta) + "\n".join(lines) + "\n"


HANDLERS = {
    "fig1": cmd_fig1,
    "protocol": cmd_protocol,
    "baxter-chacon": cmd_baxter_chacon,
    "device-sync": cmd_device_sync,
    "monogamy": cmd_monogamy,
    "ckw": cmd_ckw,
    "povm-demo": cmd_povm_demo,
}

RUNTIME_ERRORS = (
    AnnihilatedStateError,
    OutcomeImpossibleError,
    PartitionError,
    InvariantError,
    MatrixParseError,
    OSError,
    ValueError,
)


def main(argv=None) -> int:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    try:
        extra = {}
        if args.config is not None:
            flag_defaults, extra = _apply_config(args, subs[args.command])
            subs[args.command].set_defaults(**flag_defaults)
            args = parser.parse_args(argv)
        text = HANDLERS[args.command](args, extra)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    except RUNTIME_ERRORS as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"{parser.prog}: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
