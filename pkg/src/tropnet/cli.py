"""
Command-line interface for tropnet
"""

import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import click

from .config import settings
from .exact import format_rational
from .exceptions import ModelFileError, SubsetCapExceededError, TropNetError, ValidationError
from .experiments import EXPERIMENTS, parse_architectures, run_experiment
from .hoffman import HoffmanResult, TropicalHoffman, hoffman_exact, hoffman_lower, hoffman_tropical
from .hoffman import hoffman_upper, radius_bound
from .io import RunManifest, detect_kind, load_matrix, load_point, load_polynomial
from .io import load_rational_map, write_csv, write_json, write_manifest
from .logging_config import log, setup_logging
from .network import load_network
from .regions import network_regions, rational_regions, regions_report
from .sampling import SampleConfig, estimate_csv_row, estimate_regions
from .tropical import TropicalRationalMap, prune, redundant_monomials
from .tropicalize import tropicalize_with_counts


def _exit_code(error: TropNetError) -> int:
    if isinstance(error, ModelFileError):
        return 2
    if isinstance(error, SubsetCapExceededError):
        return 3
    return 1


def _fail(error: TropNetError) -> None:
    log.error(f"{type(error).__name__}: {error}")
    click.secho(f"Error: {error}", fg="red", err=True)
    sys.exit(_exit_code(error))


def _out_dir() -> Path:
    path = Path(settings.runtime.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _finish(ctx: click.Context, outputs: List[Path]) -> None:
    """Write the run manifest next to the command's outputs."""
    manifest = RunManifest(
        command=ctx.info_name or "tropnet",
        arguments={k: (str(v) if isinstance(v, Path) else v) for k, v in ctx.params.items()},
        config=settings.model_dump(mode="json"),
        seed=settings.runtime.seed,
        elapsed_seconds=round(time.perf_counter() - ctx.find_root().obj["start"], 6),
        outputs=[str(p) for p in outputs],
    )
    path = write_manifest(_out_dir(), manifest)
    log.debug(f"Manifest written to {path}")


def _number(value: Union[Fraction, float, None]) -> Union[str, float, None]:
    if value is None or isinstance(value, float):
        return value
    return format_rational(value)


def _hoffman_report(
    exact: Optional[HoffmanResult],
    lower: Optional[HoffmanResult],
    upper: Optional[HoffmanResult],
) -> Dict[str, Any]:
    witness = None
    for result in (exact, lower, upper):
        if result is not None and result.witness_subset is not None:
            witness = list(result.witness_subset)
            break
    return {
        "H_exact": _number(exact.value) if exact else None,
        "H_lower": _number(lower.value) if lower else None,
        "H_upper": upper.value if upper else None,
        "witness_subset": witness,
    }


def _tropical_report(result: TropicalHoffman) -> Dict[str, Any]:
    report = _hoffman_report(result.exact, result.lower, result.upper)
    report["block"] = list(result.block) if result.block is not None else None
    return report


def _load_map(path: Path, output_index: int) -> TropicalRationalMap:
    """A rational map from a model (tropicalized), rational-map or polynomial file."""
    kind = detect_kind(path)
    if kind == "model":
        outputs = tropicalize_with_counts(load_network(path))
        if not 0 <= output_index < len(outputs):
            raise ModelFileError(f"model has no output {output_index}", str(path))
        return outputs[output_index].map
    if kind == "matrix":
        raise ModelFileError("expected a model or polynomial file, found a matrix", str(path))
    return load_rational_map(path)


@click.group()
@click.option("--seed", default=None, type=int, help="Random seed")
@click.option("--threads", default=None, type=int, help="Worker processes (TROPNET_THREADS)")
@click.option("--subset-cap", default=None, type=int, help="Largest row count for subset enumeration")
@click.option("--out", "out_dir", default=None, help="Directory for reports and the run manifest")
@click.option("--log-level", default=None, help="Set logging level (DEBUG, INFO, WARNING, ERROR)")
@click.pass_context
def cli(
    ctx: click.Context,
    seed: Optional[int],
    threads: Optional[int],
    subset_cap: Optional[int],
    out_dir: Optional[str],
    log_level: Optional[str],
):
    """tropnet - tropical geometry toolkit for ReLU networks"""

    try:
        if seed is not None:
            settings.runtime.seed = seed
        if threads is not None:
            settings.runtime.threads = threads
        if subset_cap is not None:
            settings.hoffman.subset_cap = subset_cap
        if out_dir is not None:
            settings.runtime.out_dir = out_dir
        if log_level:
            settings.runtime.log_level = log_level.upper()
    except ValueError as e:
        raise click.BadParameter(str(e)) from e

    # Re-initialize logging with the new level
    setup_logging()
    ctx.obj = {"start": time.perf_counter()}


@cli.command()
@click.argument("model", type=click.Path(path_type=Path))
@click.option("--prune", "do_prune", is_flag=True, help="Also prune redundant monomials")
@click.pass_context
def tropicalize(ctx: click.Context, model: Path, do_prune: bool):
    """Convert a network into tropical rational maps"""

    try:
        outputs = tropicalize_with_counts(load_network(model))
        entries = []
        for k, out in enumerate(outputs):
            entry: Dict[str, Any] = {
                "output": k,
                "native_terms": list(out.native_terms),
                "canonical_terms": list(out.canonical_terms),
                "map": out.map.to_json(),
            }
            line = (
                f"output {k}: native {out.native_terms[0]} (/) {out.native_terms[1]}, "
                f"canonical {out.canonical_terms[0]} (/) {out.canonical_terms[1]}"
            )
            if do_prune:
                pruned = out.map.pruned()
                entry["pruned_terms"] = [len(pruned.numerator), len(pruned.denominator)]
                entry["pruned_map"] = pruned.to_json()
                line += f", pruned {len(pruned.numerator)} (/) {len(pruned.denominator)}"
            entries.append(entry)
            click.echo(line)
        path = write_json(_out_dir() / "tropical.json", {"outputs": entries})
        _finish(ctx, [path])
    except TropNetError as e:
        _fail(e)


@cli.command()
@click.argument("model", type=click.Path(path_type=Path))
@click.option("--output-index", default=None, type=int, help="Output coordinate of the network")
@click.pass_context
def regions(ctx: click.Context, model: Path, output_index: Optional[int]):
    """Enumerate the linear regions of a network exactly"""

    try:
        found = network_regions(load_network(model), output_index)
        path = write_json(_out_dir() / "regions.json", regions_report(found))
        click.echo(f"{len(found)} linear regions")
        _finish(ctx, [path])
    except TropNetError as e:
        _fail(e)


@cli.command("regions-trop")
@click.argument("numerator", type=click.Path(path_type=Path))
@click.argument("denominator", required=False, type=click.Path(path_type=Path))
@click.pass_context
def regions_trop(ctx: click.Context, numerator: Path, denominator: Optional[Path]):
    """Linear regions of a tropical polynomial or rational map"""

    try:
        found = rational_regions(load_rational_map(numerator, denominator))
        path = write_json(_out_dir() / "regions.json", regions_report(found))
        click.echo(f"{len(found)} linear regions")
        _finish(ctx, [path])
    except TropNetError as e:
        _fail(e)


@cli.command("prune")
@click.argument("poly", type=click.Path(path_type=Path))
@click.pass_context
def prune_command(ctx: click.Context, poly: Path):
    """Remove redundant monomials from a polynomial"""

    try:
        f = load_polynomial(poly)
        removed = redundant_monomials(f)
        pruned = prune(f)
        path = write_json(
            _out_dir() / "pruned.json",
            {"polynomial": pruned.to_json(), "removed": [m.to_json() for m in removed]},
        )
        click.echo(f"kept {len(pruned)} of {len(f)} monomials")
        for m in removed:
            click.echo(f"  removed {m.to_text()}")
        _finish(ctx, [path])
    except TropNetError as e:
        _fail(e)


@cli.command()
@click.argument("source", type=click.Path(path_type=Path))
@click.option("--exact", "want_exact", is_flag=True, help="Exact constant by subset enumeration")
@click.option("--lower", "lower_iterations", default=None, type=int, help="Random subsets for a lower bound")
@click.option("--seed", "local_seed", default=None, type=int, help="Seed of the random subsets")
@click.option("--upper", "want_upper", is_flag=True, help="Singular-value upper bound (matrix files)")
@click.option("--sampled", is_flag=True, help="Sample subsets for the upper bound (matrix files)")
@click.option("--certified", is_flag=True, help="Scale the upper bound into a guaranteed one (matrix files)")
@click.option("--output-index", default=0, type=int, help="Output coordinate for model files")
@click.pass_context
def hoffman(
    ctx: click.Context,
    source: Path,
    want_exact: bool,
    lower_iterations: Optional[int],
    local_seed: Optional[int],
    want_upper: bool,
    sampled: bool,
    certified: bool,
    output_index: int,
):
    """Hoffman constant of a matrix, polynomial or network"""

    try:
        seed = settings.runtime.seed if local_seed is None else local_seed
        kind = detect_kind(source)
        if kind == "matrix":
            A = load_matrix(source)
            if not (want_exact or lower_iterations or want_upper):
                want_exact = True
            exact = hoffman_exact(A) if want_exact else None
            lower = hoffman_lower(A, lower_iterations, seed) if lower_iterations else None
            upper = (
                hoffman_upper(
                    A,
                    "sampled" if sampled else "exhaustive",
                    iterations=settings.hoffman.lower_iterations,
                    seed=seed,
                    certified=certified,
                )
                if want_upper
                else None
            )
            report = _hoffman_report(exact, lower, upper)
        else:
            if want_upper or sampled or certified:
                raise ValidationError(
                    "--upper, --sampled and --certified apply to matrix files only; "
                    "tropical inputs fall back to certified bounds on their own"
                )
            f = _load_map(source, output_index)
            target = f.numerator if kind == "polynomial" else f
            result = hoffman_tropical(
                target, iterations=lower_iterations, seed=seed, exact_only=want_exact
            )
            report = _tropical_report(result)
        path = write_json(_out_dir() / "hoffman.json", report)
        for key in ("H_exact", "H_lower", "H_upper"):
            if report[key] is not None:
                click.echo(f"{key}: {report[key]}")
        _finish(ctx, [path])
    except TropNetError as e:
        _fail(e)


@cli.command()
@click.argument("source", type=click.Path(path_type=Path))
@click.option("--at", "at", required=True, type=click.Path(path_type=Path), help="Point file")
@click.option("--output-index", default=0, type=int, help="Output coordinate for model files")
@click.pass_context
def radius(ctx: click.Context, source: Path, at: Path, output_index: int):
    """Radius around a point that reaches every linear region"""

    try:
        f = _load_map(source, output_index)
        x = load_point(at)
        result = hoffman_tropical(f)
        bound = radius_bound(f, x, result)
        report = _tropical_report(result)
        report["radius_bound_at"] = {"x": [format_rational(v) for v in x], "bound": _number(bound)}
        path = write_json(_out_dir() / "radius.json", report)
        click.echo(f"radius bound: {_number(bound)}")
        _finish(ctx, [path])
    except TropNetError as e:
        _fail(e)


@cli.command()
@click.argument("model", type=click.Path(path_type=Path))
@click.option("-R", "--radius", "box_radius", default=None, type=float, help="Half-width of the cube")
@click.option("-N", "--npoints", default=None, type=int, help="Number of sample points")
@click.option("--seed", "local_seed", default=None, type=int, help="Sampling seed")
@click.option("--scheme", default=None, type=click.Choice(["uniform", "grid"]))
@click.option("--fundamental", is_flag=True, help="Sample the sorted cone of an invariant network")
@click.option("--timing/--no-timing", default=True, help="Record elapsed seconds in the CSV")
@click.pass_context
def sample(
    ctx: click.Context,
    model: Path,
    box_radius: Optional[float],
    npoints: Optional[int],
    local_seed: Optional[int],
    scheme: Optional[str],
    fundamental: bool,
    timing: bool,
):
    """Estimate the number of linear regions by sampling"""

    try:
        net = load_network(model)
        cfg = SampleConfig.from_settings(
            box_radius=box_radius,
            npoints=npoints,
            seed=local_seed,
            scheme=scheme,
            restrict_to_fundamental=fundamental,
        )
        estimate = estimate_regions(net, cfg)
        path = write_csv(_out_dir() / "sample.csv", [estimate_csv_row(net, cfg, estimate, timing)])
        click.echo(f"{estimate.count} estimated linear regions")
        _finish(ctx, [path])
    except TropNetError as e:
        _fail(e)


def _int_list(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    return [int(part) for part in text.replace(",", " ").split()]


@cli.command()
@click.argument("name", type=click.Choice(sorted(EXPERIMENTS)))
@click.option("--archs", default=None, help='Architectures, e.g. "[6,2,1],[5,3,1]"')
@click.option("--trials", default=None, type=int, help="Random instances per setting")
@click.option("-N", "--npoints", default=None, type=int, help="Sample points per estimate")
@click.option("-R", "--radius", default=None, type=float, help="Sampling cube half-width")
@click.option("--dims", default=None, help="Input dimensions, e.g. 2,3")
@click.option("--widths", default=None, help="Hidden widths, e.g. 2,3,4")
@click.option("--repetitions", default=None, type=int, help="Repetitions of the ratio experiment")
@click.option("--instances", default=None, type=int, help="Random maps per Hoffman table")
@click.pass_context
def experiment(
    ctx: click.Context,
    name: str,
    archs: Optional[str],
    trials: Optional[int],
    npoints: Optional[int],
    radius: Optional[float],
    dims: Optional[str],
    widths: Optional[str],
    repetitions: Optional[int],
    instances: Optional[int],
):
    """Reproduce one of the experiment tables as CSV and JSON"""

    try:
        report = run_experiment(
            name,
            archs=parse_architectures(archs) if archs else None,
            trials=trials,
            npoints=npoints,
            radius=radius,
            dims=_int_list(dims),
            widths=_int_list(widths),
            repetitions=repetitions,
            instances=instances,
        )
        out = _out_dir()
        paths = [write_json(out / f"{name}.json", report.to_json())]
        if report.rows:
            paths.append(write_csv(out / f"{name}.csv", report.rows))
        for key, value in report.summary.items():
            click.echo(f"{key}: {value}")
        _finish(ctx, paths)
    except TropNetError as e:
        _fail(e)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


@cli.command()
def config():
    """Show current configuration"""

    click.echo("tropnet Configuration:")
    click.echo("=" * 40)

    click.echo("Runtime Settings:")
    click.echo(f"  Seed: {settings.runtime.seed}")
    click.echo(f"  Threads: {settings.runtime.threads}")
    click.echo(f"  Output Directory: {settings.runtime.out_dir}")
    click.echo(f"  Log Level: {settings.runtime.log_level}")

    click.echo("\nHoffman Settings:")
    click.echo(f"  Subset Cap: {settings.hoffman.subset_cap}")
    click.echo(f"  Lower-Bound Iterations: {settings.hoffman.lower_iterations}")
    click.echo(f"  Upper-Bound Padding: {settings.hoffman.upper_padding}")

    click.echo("\nSampling Defaults:")
    click.echo(f"  Box Radius: {settings.sampling.box_radius}")
    click.echo(f"  Points: {settings.sampling.npoints}")
    click.echo(f"  Scheme: {settings.sampling.scheme}")
    click.echo(f"  Rounding: {settings.sampling.decimals} decimals")

    click.echo("\nExperiment Defaults:")
    click.echo(f"  Trials: {settings.experiment.trials}")
    click.echo(f"  Repetitions: {settings.experiment.repetitions}")
    click.echo(f"  Hoffman Instances: {settings.experiment.hoffman_instances}")


def main():
    """Main CLI entry point"""
    cli()


if __name__ == "__main__":
    main()
