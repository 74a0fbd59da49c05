"""Command-line interface.

Subcommands: construct, simulate, compare-rules, transmit-image,
transmit-speech, export-zvector. Defaults may come from a TOML file
(--config, one table per subcommand); explicit flags win. The POLARLINK_SEED
environment variable supplies the seed when neither a flag nor the config
sets one.
"""

import argparse
import math
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .channels import AwgnBpsk, Bec, RayleighBpsk, snr_db_to_sigma2
from .construction import (
    RecursionRule,
    Z0Policy,
    construct_code,
    evolve,
    initial_z,
    rate_to_k,
)
from .ldpc import export_alist, generate_regular_ldpc, import_alist
from .media import frame_spectral_distortion, read_wav
from .polar import CodeConfig
from .simulate import (
    SweepConfig,
    run_ber_sweep,
    run_media_pipeline,
    run_rule_comparison,
    write_frame_sd_csv,
    write_rules_csv,
    write_sweep_csv,
    write_zvector_csv,
)

DEFAULT_SEED = 0
SEED_ENV_VAR = "POLARLINK_SEED"


def _float_list(value):
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(tok) for tok in str(value).split(",") if tok.strip()]


def _resolve_seed(args):
    if args.seed is not None:
        return int(args.seed)
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))


def _construct_channel(kind, param, k_factor):
    """Channel from the construct/export parameter: epsilon, sigma, or SNR dB."""
    if kind == "bec":
        return Bec(param)
    if kind == "awgn":
        return AwgnBpsk(param)
    if kind == "rayleigh":
        return RayleighBpsk(k_factor, math.sqrt(snr_db_to_sigma2(param)))
    raise ValueError(f"unknown channel {kind!r}")


def _grid_from_args(args):
    if args.channel == "bec":
        if args.epsilon is None:
            raise SystemExit("--epsilon grid required for the erasure channel")
        return _float_list(args.epsilon)
    if args.snr_db is None:
        raise SystemExit("--snr-db grid required for awgn/rayleigh")
    return _float_list(args.snr_db)


def _add_common_code_flags(sub, n_default=8, rate_default=0.5):
    sub.add_argument("--n", type=int, default=n_default,
                     help="block-length exponent, N = 2^n")
    sub.add_argument("--rate", type=float, default=rate_default)
    sub.add_argument("--rule", default="type1",
                     choices=[r.value for r in RecursionRule])
    sub.add_argument("--z0", default=None,
                     help="proposed | constant:<v> | hybrid")
    sub.add_argument("--k-factor", type=float, default=0.7)


def _z0_or_default(args, default="proposed"):
    return Z0Policy.parse(args.z0 if args.z0 is not None else default)


# ---------------------------------------------------------------------------
# handlers


def _cmd_construct(args):
    seed = _resolve_seed(args)  # unused randomness-wise; echoed in comments
    channel = _construct_channel(args.channel, args.param, args.k_factor)
    rule = RecursionRule.parse(args.rule)
    policy = _z0_or_default(args)
    k = args.k if args.k is not None else rate_to_k(args.n, args.rate)
    config, z = construct_code(channel, args.n, k, rule, policy)
    out = Path(args.output)
    config.save(out)
    zpath = Path(args.zvector) if args.zvector else out.with_suffix(".zvector.csv")
    write_zvector_csv(
        z, zpath,
        comments=[f"channel={args.channel} param={args.param!r} rule={rule.value} "
                  f"z0={policy} n={args.n} k={k} seed={seed}"],
    )
    print(f"wrote {out} and {zpath} (N={config.N}, K={config.K})")
    if args.plot:
        from .plotting import save_zvector_figure

        fig = zpath.with_suffix(".png")
        save_zvector_figure(z, fig)
        print(f"wrote {fig}")
    return 0


def _cmd_simulate(args):
    seed = _resolve_seed(args)
    grid = _grid_from_args(args)
    code = CodeConfig.load(args.code) if args.code else None
    ldpc_code = import_alist(args.alist) if args.alist else None
    if args.codec == "ldpc" and args.ldpc_seed is not None and ldpc_code is None:
        ldpc_code = generate_regular_ldpc(1 << args.n, seed=args.ldpc_seed)
    cfg = SweepConfig(
        codec=args.codec,
        channel=args.channel,
        grid=grid,
        frames=args.frames,
        seed=seed,
        n=args.n,
        rate=args.rate,
        rule=RecursionRule.parse(args.rule),
        z0=_z0_or_default(args),
        k_factor=args.k_factor,
        code=code,
        ldpc_code=ldpc_code,
        bp_iters=args.bp_iters,
        workers=args.workers,
        max_block_errors=args.max_block_errors,
    )
    records = run_ber_sweep(cfg)
    out = Path(args.output)
    write_sweep_csv(
        records, out,
        comments=[f"codec={args.codec} channel={args.channel} frames={args.frames} "
                  f"seed={seed} workers={args.workers}"],
    )
    for rec in records:
        print(f"{rec.channel} param={rec.param:g}: ber={rec.ber:.3e} "
              f"fer={rec.fer:.3e} frames={rec.frames}")
    print(f"wrote {out}")
    if args.plot:
        from .plotting import save_sweep_figure

        fig = out.with_suffix(".png")
        save_sweep_figure(records, fig)
        print(f"wrote {fig}")
    return 0


def _cmd_compare_rules(args):
    seed = _resolve_seed(args)
    grid = _float_list(args.snr_db)
    rows = run_rule_comparison(
        args.n, args.rate, grid, args.frames, seed,
        k_factor=args.k_factor, workers=args.workers,
    )
    out = Path(args.output)
    write_rules_csv(
        rows, out,
        comments=[f"n={args.n} rate={args.rate!r} frames={args.frames} seed={seed}"],
    )
    print(f"wrote {out} ({len(rows)} rows)")
    if args.plot:
        from .plotting import save_rules_figure

        fig = out.with_suffix(".png")
        save_rules_figure(rows, fig)
        print(f"wrote {fig}")
    return 0


def _media_common(args, kind):
    seed = _resolve_seed(args)
    param = (
        float(args.epsilon) if args.channel == "bec" else float(args.snr_db)
    )
    result = run_media_pipeline(
        kind,
        args.input,
        output_dir=args.output_dir,
        codec=args.codec,
        n=args.n,
        rate=args.rate,
        channel=args.channel,
        param=param,
        k_factor=args.k_factor,
        trials=args.trials,
        seed=seed,
        rule=RecursionRule.parse(args.rule),
        z0=Z0Policy.parse(args.z0) if args.z0 is not None else None,
        bp_iters=args.bp_iters,
        ldpc_seed=args.ldpc_seed,
        frame_length=getattr(args, "frame_length", None),
    )
    label = "PSNR" if result.metric == "psnr" else "SD"
    print(f"{kind} via {result.codec}: mean {label} = {result.mean:.4f} dB "
          f"over {args.trials} trials")
    print(f"wrote {result.csv_path} and {result.recon_path}")
    if args.plot:
        from .plotting import save_media_figure

        fig = result.csv_path.with_suffix(".png")
        save_media_figure(result, fig)
        print(f"wrote {fig}")
    return result


def _cmd_transmit_image(args):
    _media_common(args, "image")
    return 0


def _cmd_transmit_speech(args):
    result = _media_common(args, "speech")
    if args.frame_sd:
        source = read_wav(args.input, args.frame_length)
        recon = read_wav(result.recon_path, args.frame_length)
        per_frame = frame_spectral_distortion(source, recon)
        out = Path(args.frame_sd)
        write_frame_sd_csv(
            per_frame, out,
            comments=[f"final-trial per-frame spectral distortion seed={result.seed}"],
        )
        print(f"wrote {out}")
    return 0


def _cmd_export_zvector(args):
    channel = _construct_channel(args.channel, args.param, args.k_factor)
    rule = RecursionRule.parse(args.rule)
    policy = _z0_or_default(args)
    z = evolve(initial_z(channel, policy), args.n, rule)
    out = Path(args.output)
    write_zvector_csv(
        z, out,
        comments=[f"channel={args.channel} param={args.param!r} rule={rule.value} "
                  f"z0={policy} n={args.n}"],
    )
    print(f"wrote {out}")
    if args.plot:
        from .plotting import save_zvector_figure

        fig = out.with_suffix(".png")
        save_zvector_figure(z, fig)
        print(f"wrote {fig}")
    return 0


def _cmd_export_alist(args):
    code = generate_regular_ldpc(
        args.length, dv=args.dv, dc=args.dc,
        seed=_resolve_seed(args), min_girth=args.min_girth,
    )
    export_alist(code, args.output)
    print(f"wrote {args.output} (n={code.n}, m={code.m}, k={code.k})")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser(toml_cfg):
    parser = argparse.ArgumentParser(
        prog="polarlink",
        description="polar-code construction, simulation, and media transmission",
    )
    parser.add_argument("--config", help="TOML file with per-subcommand defaults")
    subs = parser.add_subparsers(dest="command", required=True)

    finalizers = []

    def new_sub(name, func, **kwargs):
        sub = subs.add_parser(name, **kwargs)
        sub.set_defaults(func=func)
        section = toml_cfg.get(name, toml_cfg.get(name.replace("-", "_"), {}))
        if section:
            keys = {k.replace("-", "_"): v for k, v in section.items()}

            def finalize(sub=sub, keys=keys):
                # runs after all arguments exist: config values become the
                # defaults, and flags they satisfy are no longer mandatory
                sub.set_defaults(**keys)
                for action in sub._actions:
                    if action.required and action.dest in keys:
                        action.required = False

            finalizers.append(finalize)
        return sub

    con = new_sub("construct", _cmd_construct,
                  help="build a code and write CodeConfig JSON plus a z-vector CSV")
    con.add_argument("--channel", required=True, choices=["bec", "awgn", "rayleigh"])
    con.add_argument("--param", type=float, required=True,
                     help="epsilon (bec), sigma (awgn), or SNR dB (rayleigh)")
    _add_common_code_flags(con)
    con.add_argument("--k", type=int, default=None, help="overrides --rate")
    con.add_argument("--seed", type=int, default=None)
    con.add_argument("--output", default="code.json")
    con.add_argument("--zvector", default=None)
    con.add_argument("--plot", action=argparse.BooleanOptionalAction, default=False)

    sim = new_sub("simulate", _cmd_simulate, help="run a BER/FER sweep to CSV")
    sim.add_argument("--codec", default="polar", choices=["polar", "ldpc"])
    sim.add_argument("--channel", required=True, choices=["bec", "awgn", "rayleigh"])
    sim.add_argument("--snr-db", default=None, help="comma-separated SNR grid (dB)")
    sim.add_argument("--epsilon", default=None,
                     help="comma-separated erasure-probability grid")
    _add_common_code_flags(sim)
    sim.add_argument("--code", default=None, help="CodeConfig JSON pinning the code")
    sim.add_argument("--alist", default=None, help="LDPC parity-check matrix (alist)")
    sim.add_argument("--ldpc-seed", type=int, default=None)
    sim.add_argument("--bp-iters", type=int, default=50)
    sim.add_argument("--frames", type=int, default=10000)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--max-block-errors", type=int, default=None,
                     help="early-stop a grid point at this many block errors")
    sim.add_argument("--output", default="sweep.csv")
    sim.add_argument("--plot", action=argparse.BooleanOptionalAction, default=False)

    cmp_ = new_sub("compare-rules", _cmd_compare_rules,
                   help="Type1/2/3 recursion comparison on AWGN and Rayleigh")
    cmp_.add_argument("--n", type=int, default=8)
    cmp_.add_argument("--rate", type=float, default=0.25)
    cmp_.add_argument("--snr-db", default="0,1,2,3,4,5")
    cmp_.add_argument("--frames", type=int, default=10000)
    cmp_.add_argument("--k-factor", type=float, default=0.7)
    cmp_.add_argument("--seed", type=int, default=None)
    cmp_.add_argument("--workers", type=int, default=1)
    cmp_.add_argument("--output", default="rules.csv")
    cmp_.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)

    def media_sub(name, func, helptext):
        med = new_sub(name, func, help=helptext)
        med.add_argument("--input", required=True)
        med.add_argument("--output-dir", default=".")
        med.add_argument("--codec", default="polar", choices=["polar", "ldpc"])
        med.add_argument("--channel", default="rayleigh",
                         choices=["bec", "awgn", "rayleigh"])
        med.add_argument("--snr-db", type=float, default=6.0)
        med.add_argument("--epsilon", type=float, default=None)
        _add_common_code_flags(med, n_default=11)
        med.add_argument("--trials", type=int, default=50)
        med.add_argument("--seed", type=int, default=None)
        med.add_argument("--ldpc-seed", type=int, default=None)
        med.add_argument("--bp-iters", type=int, default=50)
        med.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True)
        return med

    media_sub("transmit-image", _cmd_transmit_image,
              "send a PGM image through a coded channel; report PSNR")
    speech = media_sub("transmit-speech", _cmd_transmit_speech,
                       "send a WAV file through a coded channel; report SD")
    speech.add_argument("--frame-length", type=int, default=160)
    speech.add_argument("--frame-sd", default=None,
                        help="also write the final trial's per-frame SD CSV here")

    exz = new_sub("export-zvector", _cmd_export_zvector,
                  help="write the reliability vector for a channel/rule as CSV")
    exz.add_argument("--channel", required=True, choices=["bec", "awgn", "rayleigh"])
    exz.add_argument("--param", type=float, required=True)
    _add_common_code_flags(exz)
    exz.add_argument("--output", default="zvector.csv")
    exz.add_argument("--plot", action=argparse.BooleanOptionalAction, default=False)

    exa = new_sub("export-alist", _cmd_export_alist,
                  help="generate a regular LDPC code and export its alist matrix")
    exa.add_argument("--length", type=int, required=True)
    exa.add_argument("--dv", type=int, default=3)
    exa.add_argument("--dc", type=int, default=6)
    exa.add_argument("--min-girth", type=int, default=6)
    exa.add_argument("--seed", type=int, default=None)
    exa.add_argument("--output", default="code.alist")

    for finalize in finalizers:
        finalize()
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    toml_cfg = {}
    if known.config:
        with open(known.config, "rb") as fh:
            toml_cfg = tomllib.load(fh)
    parser = _build_parser(toml_cfg)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as err:
        raise SystemExit(f"polarlink {args.command}: error: {err}") from err


if __name__ == "__main__":
    sys.exit(main())
