"""``ocrs-lab`` command line.

Every subcommand takes ``--config FILE --seed U64 --out DIR [--trials N] [--threads T]``.
The flags can also be set through ``OCRS_LAB_CONFIG``, ``OCRS_LAB_SEED``,
``OCRS_LAB_OUT``, ``OCRS_LAB_TRIALS`` and ``OCRS_LAB_THREADS``; flags and
environment take precedence over values inside the config file.

Exit status: 0 success, 2 input error, 3 indeterminate comparison,
4 invariant failure, 1 anything unexpected.  Failures print one JSON error
record on stderr and leave no output directory behind.
"""
from __future__ import annotations

import json
import sys

import click

from . import __version__, kernels
from . import config as C
from .errors import IndeterminateComparisonError, InputError, OcrsLabError
from .output import RunDirectory, now, write_manifest
from .runners import DEFAULT_TRIALS, RUNNERS, RunContext


def _error_record(exc: BaseException, code: int) -> str:
    record = {"error": type(exc).__name__, "exit_code": code, "message": str(exc)}
    if isinstance(exc, IndeterminateComparisonError):
        record.update(element=exc.element, estimate=exc.estimate, threshold=exc.threshold, radius=exc.radius)
    return json.dumps(record, sort_keys=True, default=str)


def execute(command: str, config_path: str | None, *, seed: int | None, out: str | None, trials: int | None,
            threads: int | None, overrides: dict | None = None) -> int:
    """Validate, run and persist one subcommand; returns the exit status."""
    data = C.read_document(config_path) if config_path else {}
    data.update(overrides or {})
    for key, value in (("seed", seed), ("trials", trials), ("threads", threads)):
        if value is not None:
            data[key] = value
    cfg = C.parse(command, data)
    if out is None:
        raise InputError("an output directory is required (--out or OCRS_LAB_OUT)")
    ctx = RunContext(
        seed=cfg.seed if cfg.seed is not None else 0,
        trials=cfg.trials if cfg.trials is not None else DEFAULT_TRIALS.get(command, 1),
        threads=cfg.threads if cfg.threads is not None else 1,
        out=None,
    )
    resolved = cfg.model_dump(mode="json")
    resolved.update(seed=ctx.seed, trials=ctx.trials)
    resolved.pop("threads", None)
    started = now()
    with RunDirectory(out) as tmp:
        ctx.out = tmp
        RUNNERS[command](cfg, ctx)
        write_manifest(tmp, command=command, config=resolved, seed=ctx.seed, threads=ctx.threads,
                       version=__version__, started=started, backend=kernels.default_backend())
    for line in ctx.lines:
        click.echo(line)
    return ctx.exit_code


def _common(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), envvar="OCRS_LAB_CONFIG",
                     help="YAML or JSON run configuration."),
        click.option("--seed", type=click.IntRange(0, C.U64 - 1), envvar="OCRS_LAB_SEED", help="Master seed."),
        click.option("--out", type=click.Path(file_okay=False), envvar="OCRS_LAB_OUT", help="Output directory."),
        click.option("--trials", type=click.IntRange(min=1), envvar="OCRS_LAB_TRIALS", help="Monte Carlo trials."),
        click.option("--threads", type=click.IntRange(min=1), envvar="OCRS_LAB_THREADS", help="Worker threads."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="ocrs-lab")
def cli():
    """OCRS, prophet-inequality and concentration experiments on k-fold matroid unions."""


def _simple(name: str, doc: str):
    @cli.command(name, help=doc)
    @_common
    def cmd(config_path, seed, out, trials, threads):
        sys.exit(execute(name, config_path, seed=seed, out=out, trials=trials, threads=threads))

    return cmd


_simple("ocrs-select", "Build the chain decomposition and estimate per-element selectability.")
_simple("prophet-ratio", "Estimate competitive ratios of online policies on a prophet instance.")
_simple("girth-bound", "Measure policies on the high-girth hard instances.")
_simple("concentration-sweep", "Compare empirical upper tails against the scaled bound over an (s, t) grid.")
_simple("verify-oracles", "Check the rank oracles against exhaustive brute force on the bundled corpus.")


def _param(values):
    out = {}
    for item in values:
        if "=" not in item:
            raise InputError(f"--param expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except ValueError:
            out[key] = raw
    return out


@cli.command("gen-instance", help="Write instance files for a generated family.")
@_common
@click.option("--family", type=click.Choice(["uniform-suite", "graphic-catalog", "overloaded-partition",
                                             "hard-girth"]), help="Instance family (overrides the config).")
@click.option("--param", "params", multiple=True, help="Family parameter KEY=VALUE (repeatable).")
def gen_instance(config_path, seed, out, trials, threads, family, params):
    overrides = {}
    if family:
        overrides["family"] = family
    if params:
        base = C.read_document(config_path).get("params", {}) if config_path else {}
        overrides["params"] = {**base, **_param(params)}
    sys.exit(execute("gen-instance", config_path, seed=seed, out=out, trials=trials, threads=threads,
                     overrides=overrides))


def main(argv=None) -> None:
    try:
        cli.main(args=argv, prog_name="ocrs-lab", standalone_mode=False)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 0
        raise SystemExit(code)
    except click.exceptions.Exit as exc:
        raise SystemExit(exc.exit_code)
    except click.ClickException as exc:
        click.echo(_error_record(exc, 2), err=True)
        raise SystemExit(2)
    except click.exceptions.Abort as exc:
        click.echo(_error_record(exc, 1), err=True)
        raise SystemExit(1)
    except OcrsLabError as exc:
        click.echo(_error_record(exc, exc.exit_code), err=True)
        raise SystemExit(exc.exit_code)
    except Exception as exc:  # noqa: BLE001 - last-resort record for unexpected failures
        click.echo(_error_record(exc, 1), err=True)
        raise SystemExit(1)


if __name__ == "__main__":
    main()
