##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# `gjcv` command-line front end. Every subcommand runs one pipeline stage and prints its         #
# protocol as plain text or, with --format json, as a JSON document. Exit codes: 0 for a         #
# positive verdict, 1 for a negative one, 2 for unreadable or malformed input.                   #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import json
from typing import Callable, Optional

import click
from pydantic import ValidationError

from src import pipeline
from src.errors import FieldMismatchError, InputError, ParseError, PreconditionError
from utils.logs_config import logger

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

EXIT_INPUT = 2

INPUT_ERRORS = (ParseError, InputError, PreconditionError, FieldMismatchError, ValidationError, FileNotFoundError, IsADirectoryError, json.JSONDecodeError)

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def _emit(ctx: click.Context, run: Callable[[], pipeline.RunResult]) -> None:
    try:
        result = run()
    except INPUT_ERRORS as exc:
        logger.error(f"[CLI] {type(exc).__name__}: {exc}")
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_INPUT)
        return
    if ctx.obj["format"] == "json":
        document = dict(result.document)
        if ctx.obj["timing"]:
            document["duration_s"] = result.duration_s
        click.echo(json.dumps(document, indent=2))
    else:
        for line in result.lines:
            click.echo(line)
        if ctx.obj["timing"]:
            click.echo(f"time: {result.duration_s}s")
    ctx.exit(result.exit_code)


@click.group()
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True, help="Protocol output format.")
@click.option("--timing", is_flag=True, help="Append the run time to the protocol.")
@click.pass_context
def gjcv(ctx: click.Context, fmt: str, timing: bool) -> None:
    """Exact verification of Gomory-Johnson cut-generating functions."""
    ctx.ensure_object(dict)
    ctx.obj["format"] = fmt
    ctx.obj["timing"] = timing


_threads = click.option("--threads", type=int, default=None, help="Worker threads for per-face checks (default GJ_THREADS).")
_assume_pwc = click.option("--assume-pwc/--no-assume-pwc", default=None, help="Merge densely covered intervals (default GJ_ASSUME_PWC).")


@gjcv.command()
@click.argument("function_file", type=click.Path(dir_okay=False))
@_threads
@click.pass_context
def minimality(ctx: click.Context, function_file: str, threads: Optional[int]) -> None:
    """Decide minimality of a piecewise linear function."""
    _emit(ctx, lambda: pipeline.run_minimality(function_file, threads))


@gjcv.command()
@click.argument("function_file", type=click.Path(dir_okay=False))
@_assume_pwc
@_threads
@click.pass_context
def extremality(ctx: click.Context, function_file: str, assume_pwc: Optional[bool], threads: Optional[int]) -> None:
    """Test extremality relative to piecewise continuous perturbations."""
    _emit(ctx, lambda: pipeline.run_extremality(function_file, assume_pwc, threads))


@gjcv.command()
@click.argument("function_file", type=click.Path(dir_okay=False))
@_assume_pwc
@click.pass_context
def covering(ctx: click.Context, function_file: str, assume_pwc: Optional[bool]) -> None:
    """Print the covered components and the covering steps."""
    _emit(ctx, lambda: pipeline.run_covering(function_file, assume_pwc))


@gjcv.command("verify-perturbation")
@click.argument("function_file", type=click.Path(dir_okay=False))
@click.argument("perturbation_file", type=click.Path(dir_okay=False))
@_threads
@click.option("--recheck", default=None, help="Also re-verify minimality of pi +/- EPS*perturbation, e.g. 3/10000.")
@click.pass_context
def verify_perturbation(ctx: click.Context, function_file: str, perturbation_file: str, threads: Optional[int], recheck: Optional[str]) -> None:
    """Verify a quasimicroperiodic perturbation certificate and report epsilon."""
    _emit(ctx, lambda: pipeline.run_verify_perturbation(function_file, perturbation_file, threads, recheck))


@gjcv.command("show-complex")
@click.argument("function_file", type=click.Path(dir_okay=False))
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Write additive-face polygons to this CSV.")
@click.pass_context
def show_complex(ctx: click.Context, function_file: str, csv_path: Optional[str]) -> None:
    """List the faces of Delta P with vertices and Delta pi values."""
    _emit(ctx, lambda: pipeline.run_show_complex(function_file, csv_path))


@gjcv.command("plot-data")
@click.argument("input_file", type=click.Path(dir_okay=False))
@click.argument("output_csv", type=click.Path(dir_okay=False))
@click.option("--perturbation", is_flag=True, help="INPUT_FILE is a perturbation file.")
@click.option("--samples", type=click.IntRange(0, 1000), default=pipeline.PLOT_SAMPLES, show_default=True, help="Interior samples per interval.")
@click.pass_context
def plot_data(ctx: click.Context, input_file: str, output_csv: str, perturbation: bool, samples: int) -> None:
    """Write decimal plot data (display only) for a function or perturbation."""
    _emit(ctx, lambda: pipeline.run_plot_data(input_file, output_csv, perturbation, samples))


@gjcv.group()
def compendium() -> None:
    """Known functions and certificates."""


@compendium.command("list")
@click.pass_context
def compendium_list(ctx: click.Context) -> None:
    """List the registry."""
    _emit(ctx, pipeline.run_compendium_list)


@compendium.command("emit")
@click.argument("name")
@click.argument("output_file", type=click.Path(dir_okay=False))
@click.pass_context
def compendium_emit(ctx: click.Context, name: str, output_file: str) -> None:
    """Write a registry entry as a function or perturbation file."""
    _emit(ctx, lambda: pipeline.run_compendium_emit(name, output_file))


def main() -> None:
    gjcv(obj={})


if __name__ == "__main__":
    main()
