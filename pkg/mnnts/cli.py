"""
MNNTS CLI - fit, evaluate, marginalize, condition, test and sample models.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .conditional import ConditionalSpec, conditional, conditional_marginal, conditioning_density
from .config import ESTIMATORS, EXIT_OK, EXIT_USAGE, UNITS
from .config_default import set_config_value, show_config
from .core import DimVector, check_variables
from .dataset import check_unit, ingest_csv, missing_mask, synthetic_wind_dataset, write_csv, write_frame
from .density import density_batch, torus_grid
from .errors import ArgumentError, DegenerateDataError, MnntsError
from .estimation import fit
from .hardware import HardwareDetector
from .independence import independence_score, lr_test, parse_split
from .marginal import marginal, mixture_density_batch
from .modelfile import ModelFile, load_model, save_model
from .sampling import RngState, sample
from .stats import circular_correlation, summarize_columns


def _parse_indices(text: str, what: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ArgumentError(f"invalid {what} list {text!r}, expected i,j,...") from None


def _var_names(model: ModelFile) -> List[str]:
    names = model.metadata.var_names
    return list(names) if names else [f"theta{i}" for i in range(1, len(model.dims) + 1)]


def _given_spec(text: str, unit: Optional[str]) -> ConditionalSpec:
    return ConditionalSpec.parse(text, check_unit(unit))


def _fmt(angle: float) -> str:
    return f"{angle:.4f}"


def cmd_fit(args):
    """Fit a model to a CSV dataset."""
    dims = DimVector.parse(args.m)
    data = ingest_csv(args.input, args.unit, args.missing_token)
    if dims.n_vars != data.n_vars:
        raise ArgumentError(f"--m has {dims.n_vars} entries, {args.input} has {data.n_vars} columns")

    kwargs = {}
    if args.method == "ml":
        kwargs = {"max_iter": args.max_iter, "tol": args.tol}
    report = fit(data, dims, args.method, **kwargs)

    save_model(
        report.params,
        args.output,
        method=report.method,
        loglik=report.loglik,
        n_obs=report.n_obs,
        var_names=list(data.var_names),
        iterations=report.iterations,
        converged=report.converged,
    )
    if data.dropped:
        print(f"  dropped {data.dropped} rows with missing values")
    print(f"  {report.summary()}")
    if not report.converged:
        print("  ⚠ ML iterations stopped before convergence")
    print(f"✓ Model ({dims.total_length} coefficients) written to {args.output}")
    return EXIT_OK


def cmd_density(args):
    """Density grid over one or two variables."""
    model = load_model(args.model)
    p = model.to_params()
    names = _var_names(model)
    plotted = check_variables(_parse_indices(args.vars, "--vars"), p.n_vars, "--vars")
    if not 1 <= len(plotted) <= 2:
        raise ArgumentError("--vars takes one or two variables")
    if args.grid < 1:
        raise ArgumentError("--grid must be >= 1")

    grid = torus_grid(p.dims.select([i - 1 for i in plotted]), points=args.grid)
    if args.fix:
        spec = _given_spec(args.fix, args.unit)
        overlap = set(plotted) & set(spec.indices)
        if overlap:
            raise ArgumentError(f"variables {sorted(overlap)} are both plotted and fixed")
        free, _ = spec.validate(p.n_vars)
        if set(free) == set(plotted):
            values = density_batch(conditional(p, spec), grid)
        else:
            values = mixture_density_batch(conditional_marginal(p, spec, plotted), grid)
    elif len(plotted) == p.n_vars:
        values = density_batch(p, grid)
    else:
        values = mixture_density_batch(marginal(p, plotted), grid)

    frame = pd.DataFrame({names[i - 1]: grid[:, col] for col, i in enumerate(plotted)})
    frame["density"] = values
    write_frame(frame, args.out)
    if args.out:
        print(f"✓ {len(frame)} grid points written to {args.out}")
    return EXIT_OK


def _print_table(columns: dict) -> pd.DataFrame:
    frame = pd.DataFrame({name: pd.Series(probs) for name, probs in columns.items()})
    frame.index = [str(m) for m in range(1, len(frame) + 1)]
    print(frame.to_string(float_format=lambda v: f"{v:.4f}", na_rep=""))
    sums = "  ".join(f"{name}={np.sum(probs):.4f}" for name, probs in columns.items())
    print(f"sum: {sums}")
    return frame


def cmd_marginal(args):
    """Mixing probabilities and components of marginal distributions."""
    if not args.keep and not args.table:
        raise ArgumentError("marginal needs --keep, --table or both")
    model = load_model(args.model)
    p = model.to_params()
    names = _var_names(model)
    keep = check_variables(_parse_indices(args.keep, "--keep"), p.n_vars, "--keep") if args.keep else ()

    if args.table:
        requested = keep or tuple(range(1, p.n_vars + 1))
        columns = {names[i - 1]: marginal(p, [i]).probs for i in requested}
        frame = _print_table(columns)
        if args.out:
            write_frame(frame.reset_index(names="component"), args.out)
            print(f"✓ Table written to {args.out}")
        return EXIT_OK

    mixture = marginal(p, keep)
    kept = [names[i - 1] for i in keep]
    print(f"Marginal of {', '.join(kept)}: {mixture.n_components} components")
    for m, prob in enumerate(mixture.probs, start=1):
        print(f"  p{m} = {prob:.4f}")

    if args.components:
        out_dir = Path(args.components)
        for m, (prob, comp) in enumerate(zip(mixture.probs, mixture.components), start=1):
            save_model(
                comp,
                out_dir / f"component_{m}.json",
                method="marginal",
                var_names=kept,
                probability=float(prob),
            )
        print(f"✓ {mixture.n_components} component models written to {out_dir}")
    return EXIT_OK


def cmd_conditional(args):
    """Conditional model given fixed angles."""
    model = load_model(args.model)
    p = model.to_params()
    names = _var_names(model)
    spec = _given_spec(args.given, args.unit)
    free, given = spec.validate(p.n_vars)

    cond = conditional(p, spec)
    f_given = conditioning_density(p, spec)
    save_model(
        cond,
        args.output,
        method="conditional",
        var_names=[names[i - 1] for i in free],
        given={names[i - 1]: spec.given[i] for i in given},
        conditioning_density=f_given,
    )
    print(f"  conditioning density {f_given:.6e}")
    print(f"✓ Conditional model of {', '.join(names[i - 1] for i in free)} written to {args.output}")
    return EXIT_OK


def cmd_indep(args):
    """Independence between two blocks of variables."""
    split = parse_split(args.split)
    if args.model and args.input:
        raise ArgumentError("use either --model or --input, not both")

    if args.model:
        p = load_model(args.model).to_params()
        score = independence_score(p, split)
        left = ",".join(map(str, split[0]))
        right = ",".join(map(str, split[1]))
        verdict = "factorizes" if score >= 1.0 - 1e-10 else "dependent"
        print(f"independence score {left}|{right}: {score:.6f} ({verdict})")
        return EXIT_OK

    if not args.input or not args.m:
        raise ArgumentError("indep needs --model, or --input together with --m")
    dims = DimVector.parse(args.m)
    data = ingest_csv(args.input, args.unit, args.missing_token)
    if dims.n_vars != data.n_vars:
        raise ArgumentError(f"--m has {dims.n_vars} entries, {args.input} has {data.n_vars} columns")
    print(lr_test(data, dims, split, args.method).report())
    return EXIT_OK


def cmd_sample(args):
    """Draw a seeded sample from a model."""
    model = load_model(args.model)
    data = sample(model.to_params(), RngState(args.seed), args.n, tuple(_var_names(model)))
    write_csv(data, args.out)
    if args.out:
        print(f"✓ {data.n_obs} draws (seed {args.seed}) written to {args.out}")
    return EXIT_OK


def cmd_summary(args):
    """Circular summaries and the correlation matrix of a dataset."""
    data = ingest_csv(args.input, args.unit, args.missing_token)
    summaries = summarize_columns(data)

    print(f"{data.n_obs} observations ({data.dropped} rows dropped), angles in radians")
    print()
    header = f"{'variable':<12}{'mean':>9}{'R':>9}{'median':>9}{'q1':>9}{'q3':>9}"
    print(header)
    for name, s in summaries.items():
        print(
            f"{name:<12}{_fmt(s.mean_direction):>9}{_fmt(s.resultant_length):>9}"
            f"{_fmt(s.median):>9}{_fmt(s.q1):>9}{_fmt(s.q3):>9}"
        )

    print()
    print("Circular correlations:")
    width = max(8, max(len(n) for n in data.var_names) + 1)
    print(" " * width + "".join(f"{n:>{width}}" for n in data.var_names[1:]))
    for i, name in enumerate(data.var_names[:-1]):
        cells = []
        for j in range(1, data.n_vars):
            if j <= i:
                cells.append(" " * width)
                continue
            try:
                r = circular_correlation(data.rows[:, i], data.rows[:, j])
                cells.append(f"{r:>{width}.2f}")
            except DegenerateDataError:
                cells.append(f"{'n/a':>{width}}")
        print(f"{name:<{width}}" + "".join(cells))

    if args.out:
        frame = pd.DataFrame([{"variable": name, **s.as_dict()} for name, s in summaries.items()])
        write_frame(frame, args.out)
        print(f"✓ Summary written to {args.out}")
    return EXIT_OK


def cmd_synth(args):
    """Synthetic seven-station wind-direction dataset."""
    data = synthetic_wind_dataset(args.n, args.seed)
    mask = missing_mask(data.rows.shape, args.missing_rate, args.seed) if args.missing_rate else None
    write_csv(data, args.out, unit=args.unit, missing=mask, missing_token=args.missing_token)
    print(f"✓ {data.n_obs} rows x {data.n_vars} stations ({args.unit}) written to {args.out}")
    return EXIT_OK


def cmd_config(args):
    """Handle config commands."""
    if args.set_key and args.set_value is not None:
        value = args.set_value
        if value.isdigit():
            value = int(value)
        else:
            try:
                value = float(value)
            except ValueError:
                pass

        try:
            set_config_value(args.set_key, value)
        except ValidationError as e:
            raise ArgumentError(f"invalid value for {args.set_key}: {e.errors()[0]['msg']}") from e
        print(f"✓ Set {args.set_key} = {value}")
    else:
        print(show_config())
    return EXIT_OK


def cmd_hardware(args):
    """Show hardware info and the parallelism it allows."""
    detector = HardwareDetector()
    hw = detector.detect()
    workers = detector.workers()

    print("Hardware Info:")
    print(f"  RAM: {hw['total_ram_gb']:.1f}GB total")
    print(f"       {hw['available_ram_gb']:.1f}GB available")
    print(f"  CPU cores: {hw['cpu_cores']}")
    print()
    print(f"Worker threads: {workers}")
    print(f"Rows per chunk (M=3, 7 variables): {detector.chunk_rows(16 * 4**7, workers=workers)}")
    return EXIT_OK


def _add_unit(parser: argparse.ArgumentParser, what: str = "input angles") -> None:
    parser.add_argument("--unit", choices=UNITS, default=None, help=f"Unit of {what} (default from config)")


def _add_input(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--input", "-i", required=required, help="CSV dataset with a header row")
    _add_unit(parser)
    parser.add_argument("--missing-token", default=None, help="Cell value marking missing data")


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser for mnnts CLI."""
    parser = argparse.ArgumentParser(
        prog="mnnts", description="MNNTS - Multivariate nonnegative trigonometric sums on the torus"
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # fit subcommand
    fit_parser = subparsers.add_parser("fit", help="Fit a model to data")
    _add_input(fit_parser)
    fit_parser.add_argument("--m", required=True, help="Dimension vector, e.g. 3,3,3")
    fit_parser.add_argument("--method", choices=ESTIMATORS, default="md", help="Estimator")
    fit_parser.add_argument("--output", "-o", required=True, help="Model file to write")
    fit_parser.add_argument("--max-iter", type=int, default=None, help="ML iteration limit")
    fit_parser.add_argument("--tol", type=float, default=None, help="ML gradient tolerance")
    fit_parser.set_defaults(func=cmd_fit)

    # density subcommand
    density_parser = subparsers.add_parser("density", help="Density on a uniform grid")
    density_parser.add_argument("--model", required=True, help="Model file")
    density_parser.add_argument("--grid", type=int, default=64, help="Points per axis")
    density_parser.add_argument("--vars", default="1", help="One or two variables, e.g. 1,2")
    density_parser.add_argument("--fix", default=None, help="Condition on k=VAL,...")
    _add_unit(density_parser, "--fix values")
    density_parser.add_argument("--out", default=None, help="CSV output (default stdout)")
    density_parser.set_defaults(func=cmd_density)

    # marginal subcommand
    marginal_parser = subparsers.add_parser("marginal", help="Marginal mixing probabilities")
    marginal_parser.add_argument("--model", required=True, help="Model file")
    marginal_parser.add_argument("--keep", default=None, help="Variables to keep, e.g. 1,2")
    marginal_parser.add_argument("--table", action="store_true", help="Singleton marginals side by side")
    marginal_parser.add_argument("--components", default=None, metavar="DIR", help="Write component models")
    marginal_parser.add_argument("--out", default=None, help="CSV output for --table")
    marginal_parser.set_defaults(func=cmd_marginal)

    # conditional subcommand
    conditional_parser = subparsers.add_parser("conditional", help="Conditional model")
    conditional_parser.add_argument("--model", required=True, help="Model file")
    conditional_parser.add_argument("--given", required=True, help="Fixed angles k=VAL,...")
    _add_unit(conditional_parser, "--given values")
    conditional_parser.add_argument("--output", "-o", required=True, help="Model file to write")
    conditional_parser.set_defaults(func=cmd_conditional)

    # indep subcommand
    indep_parser = subparsers.add_parser("indep", help="Independence between two blocks")
    indep_parser.add_argument("--model", default=None, help="Model file (independence score)")
    _add_input(indep_parser, required=False)
    indep_parser.add_argument("--m", default=None, help="Dimension vector for --input")
    indep_parser.add_argument("--split", required=True, help="Partition i,j|k,l")
    indep_parser.add_argument("--method", choices=ESTIMATORS, default="ml", help="Estimator")
    indep_parser.set_defaults(func=cmd_indep)

    # sample subcommand
    sample_parser = subparsers.add_parser("sample", help="Draw from a model")
    sample_parser.add_argument("--model", required=True, help="Model file")
    sample_parser.add_argument("-n", type=int, required=True, help="Number of draws")
    sample_parser.add_argument("--seed", type=int, default=0, help="SplitMix64 seed")
    sample_parser.add_argument("--out", default=None, help="CSV output (default stdout)")
    sample_parser.set_defaults(func=cmd_sample)

    # summary subcommand
    summary_parser = subparsers.add_parser("summary", help="Circular summaries and correlations")
    _add_input(summary_parser)
    summary_parser.add_argument("--out", default=None, help="CSV output of the summaries")
    summary_parser.set_defaults(func=cmd_summary)

    # synth subcommand
    synth_parser = subparsers.add_parser("synth", help="Synthetic wind-direction dataset")
    synth_parser.add_argument("--out", required=True, help="CSV output")
    synth_parser.add_argument("-n", type=int, default=2017, help="Number of days")
    synth_parser.add_argument("--seed", type=int, default=0, help="Generator seed")
    synth_parser.add_argument("--unit", choices=UNITS, default="degrees", help="Output unit")
    synth_parser.add_argument("--missing-rate", type=float, default=0.0, help="Fraction of missing cells")
    synth_parser.add_argument("--missing-token", default="NA", help="Token written for missing cells")
    synth_parser.set_defaults(func=cmd_synth)

    # config subcommand
    config_parser = subparsers.add_parser("config", help="Manage configuration")
    config_parser.add_argument("set_key", nargs="?", help="Config key to set")
    config_parser.add_argument("set_value", nargs="?", help="Value to set")
    config_parser.set_defaults(func=cmd_config)

    # hardware subcommand
    hardware_parser = subparsers.add_parser("hardware", help="Show hardware info")
    hardware_parser.set_defaults(func=cmd_hardware)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the exit status."""
    parser = create_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_USAGE

    try:
        return args.func(args)
    except MnntsError as e:
        print(f"✗ {e}", file=sys.stderr)
        return e.exit_status


if __name__ == "__main__":
    sys.exit(main())
