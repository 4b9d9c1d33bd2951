"""Command-line interface: reproduce each figure of the study as a data file.

Subcommands: `discriminate` (success-probability sweep), `multimeter`
(inconclusive-rate sweep), `hom-scan` (mirror scan through the dip) and
`analyze` (offline re-estimation from raw count columns).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import discriminator, multimeter
from .dataset import Dataset
from .errors import InvalidNormalizationError, NoDataError, SchemaViolationError
from .experiment import (
    ExperimentConfig,
    config_from_dict,
    config_to_dict,
    hom_scan,
    run_full_experiment,
    with_pairs_per_point,
)

_COUNT_COLUMNS = ("c_pp", "c_mp", "c_pm", "c_mm", "sh_pp", "sh_mp", "sh_pm", "sh_mm")
_COORD_COLUMNS = ("epsilon", "theta", "phi", "eta", "position")


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip() != ""]


def _parse_range(text: str) -> list[float]:
    """Parse 'start:stop:step' with an inclusive stop; a bare number is a single point."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"expected 'start:stop:step', got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"range step must be positive, got {step}")
    values = []
    v = start
    while v <= stop + 1e-9:
        values.append(round(v, 9))
        v += step
    return values


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        data = json.loads(Path(args.config).read_text())
        config = config_from_dict(data)
    else:
        config = ExperimentConfig()
    if getattr(args, "ideal", False):
        config = config.idealized()
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    return config


def cmd_discriminate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    epsilons = _parse_float_list(args.epsilon)
    thetas = _parse_range(args.theta_range)
    dataset = run_full_experiment(
        "discriminator",
        config,
        epsilons=epsilons,
        thetas=thetas,
        pairs_per_point=args.pairs,
        seed=config.seed,
    )
    dataset.metadata["command"] = "discriminate"
    dataset.metadata["argv"] = _recorded_argv(args)
    dataset.write(args.out)
    print(f"wrote {len(dataset.rows)} rows to {args.out}")
    return 0


def cmd_multimeter(args: argparse.Namespace) -> int:
    config = _load_config(args)
    phis = _parse_range(args.phi_range)
    dataset = run_full_experiment(
        "multimeter",
        config,
        phis=phis,
        eta=args.eta,
        pairs_per_point=args.pairs,
        seed=config.seed,
    )
    dataset.metadata["command"] = "multimeter"
    dataset.metadata["argv"] = _recorded_argv(args)
    dataset.write(args.out)
    print(f"wrote {len(dataset.rows)} rows to {args.out}")
    return 0


def cmd_hom_scan(args: argparse.Namespace) -> int:
    config = with_pairs_per_point(_load_config(args), args.pairs)
    if args.positions:
        positions = _parse_float_list(args.positions)
    else:
        positions = _parse_range(args.range)
    result = hom_scan(positions, config)
    rows = [
        [x, pp, mp, pm, mm]
        for x, pp, mp, pm, mm in zip(
            result.positions, result.rate_pp, result.rate_mp, result.rate_pm, result.rate_mm
        )
    ]
    dataset = Dataset(
        columns=["position", "rate_pp", "rate_mp", "rate_pm", "rate_mm"],
        rows=rows,
        metadata={
            "command": "hom-scan",
            "argv": _recorded_argv(args),
            "seed": config.seed,
            "config": config_to_dict(config),
            "fitted_visibility": result.visibility,
            "curve_visibilities": list(result.curve_visibilities),
        },
    )
    dataset.write(args.out)
    vis = "n/a" if result.visibility is None else f"{result.visibility:.4f}"
    print(f"wrote {len(rows)} rows to {args.out} (fitted visibility {vis})")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    dataset = Dataset.read(args.input)
    for column in _COUNT_COLUMNS:
        if column not in dataset.columns:
            raise SchemaViolationError(f"input dataset is missing required column {column!r}")
    coord_columns = [c for c in _COORD_COLUMNS if c in dataset.columns]
    out_columns = coord_columns + [
        "p_succ", "p_succ_stderr", "p_inconclusive", "pi_stderr",
        "error_rate", "error_rate_stderr",
    ]
    out_rows = []
    from .experiment import CountRecord

    for row in dataset.rows:
        values = dict(zip(dataset.columns, row))
        counts = CountRecord(**{name: int(values[name]) for name in _COUNT_COLUMNS})
        try:
            p_succ = discriminator.estimate_success(counts)
            p_succ_err = discriminator.success_stderr(counts)
            p_inc = multimeter.estimate_PI(counts)
            p_inc_err = multimeter.pi_stderr(counts)
        except InvalidNormalizationError:
            p_succ = p_succ_err = p_inc = p_inc_err = math.nan
        try:
            rate = discriminator.error_rate(counts)
            rate_err = discriminator.error_rate_stderr(counts)
        except NoDataError:
            rate = rate_err = math.nan
        out_rows.append(
            [values[c] for c in coord_columns]
            + [p_succ, p_succ_err, p_inc, p_inc_err, rate, rate_err]
        )
    out = Dataset(
        columns=out_columns,
        rows=out_rows,
        metadata={"command": "analyze", "argv": _recorded_argv(args), "input": str(args.input)},
    )
    if args.out:
        out.write(args.out)
        print(f"wrote {len(out_rows)} rows to {args.out}")
    else:
        print("\t".join(out_columns))
        for row in out_rows:
            print("\t".join(f"{v}" for v in row))
    return 0


def _recorded_argv(args: argparse.Namespace) -> list[str]:
    return list(getattr(args, "_argv", []))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellmeter",
        description="Simulate programmable polarization measurements on a partial Bell analyzer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, pairs_default: int = 100_000):
        p.add_argument("--config", help="JSON experiment config file")
        p.add_argument("--seed", type=int, default=None, help="master random seed (overrides config)")
        p.add_argument("--ideal", action="store_true", help="switch off every imperfection")
        p.add_argument("--pairs", type=float, default=pairs_default,
                       help="expected photon pairs per input setting and sweep point")

    p_disc = sub.add_parser("discriminate", help="success-probability sweep of the discriminator")
    add_common(p_disc)
    p_disc.add_argument("--epsilon", default="0,12,24,36", help="comma list of ellipticities (deg)")
    p_disc.add_argument("--theta-range", default="0:90:4", help="axis-angle grid start:stop:step (deg)")
    p_disc.add_argument("--out", default="discriminate.tsv", help="output dataset path")
    p_disc.set_defaults(func=cmd_discriminate)

    p_multi = sub.add_parser("multimeter", help="inconclusive-rate sweep of the multimeter")
    add_common(p_multi)
    p_multi.add_argument("--phi-range", default="-90:90:8", help="basis-phase grid start:stop:step (deg)")
    p_multi.add_argument("--eta", type=float, default=1.0, help="POVM parameter in [0, 1]")
    p_multi.add_argument("--out", default="multimeter.tsv", help="output dataset path")
    p_multi.set_defaults(func=cmd_multimeter)

    p_hom = sub.add_parser("hom-scan", help="coincidence rates vs mirror position")
    add_common(p_hom)
    p_hom.add_argument("--positions", default=None, help="comma list of mirror positions (um)")
    p_hom.add_argument("--range", default="-200:200:10", help="position grid start:stop:step (um)")
    p_hom.add_argument("--out", default="hom_scan.tsv", help="output dataset path")
    p_hom.set_defaults(func=cmd_hom_scan)

    p_an = sub.add_parser("analyze", help="recompute estimators from a raw-count dataset")
    p_an.add_argument("input", help="dataset file with the eight count columns")
    p_an.add_argument("--out", default=None, help="output path (default: print to stdout)")
    p_an.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    try:
        return args.func(args)
    except (ValueError, OSError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
