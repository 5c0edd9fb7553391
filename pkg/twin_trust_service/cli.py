import logging

import click

from .contracts import GasSchedule, StorageMode
from .errors import IoFailure, TwinTrustError
from .settings import load_config

logger = logging.getLogger(__name__)

MODES = click.Choice([mode.value for mode in StorageMode])


def _modes(value):
    return [StorageMode(value)] if value else list(StorageMode)


def _n_list(ctx, param, value):
    from .bench.latency import parse_n_list

    if value is None:
        return None
    try:
        return parse_n_list(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


def _write(ctx, rows, report_type):
    from .bench.reports import emit_csv

    out = ctx.obj["out"]
    if out is None:
        return
    try:
        emit_csv(rows, out, report_type)
    except IoFailure as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(1)
    click.echo(f"wrote {out}")


def _fail_on(ctx, failures):
    for failure in failures:
        click.echo(f"assertion failed: {failure}", err=True)
    if failures:
        ctx.exit(1)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="YAML or JSON config file.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV output path.")
@click.option("--log-level", default="WARNING", show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]))
@click.pass_context
def cli(ctx, config_path, out, log_level):
    """Digital twin trust service: benchmarks, demo, twins and chain nodes."""
    logging.basicConfig(level=log_level, format="%(asctime)s %(levelname)s %(name)s %(message)s")
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["config"] = load_config(config_path)
    ctx.obj["out"] = out


@cli.group()
def bench():
    """Gas and latency experiments."""


@bench.command("gas")
@click.option("--mode", type=MODES, default=None, help="Only this storage mode.")
@click.pass_context
def bench_gas(ctx, mode):
    from .bench.gas import check_gas_rows, run_gas_bench
    from .bench.reports import GasReport, format_table

    config = ctx.obj["config"]
    schedule = GasSchedule.from_dict(config["CONTRACT_SETTINGS"]["gas_schedule"])
    rows = run_gas_bench(_modes(mode), schedule, seed=int(config["BENCH_SETTINGS"]["seed"]))
    click.echo(format_table(rows, GasReport))
    _write(ctx, rows, GasReport)
    _fail_on(ctx, check_gas_rows(rows))


@bench.command("latency")
@click.option("--n", "n_list", callback=_n_list, default=None,
              help="Twin counts: 1000..5000, 1000..5000..500 or 1000,3000.")
@click.option("--difficulty", "difficulties", type=click.IntRange(0, 64), multiple=True,
              help="Proof-of-work bits; repeat to compare difficulties.")
@click.option("--runs", type=click.IntRange(1), default=None)
@click.option("--workers", type=click.IntRange(1), default=None)
@click.option("--mode", type=MODES, default=None, help="Only this storage mode.")
@click.option("--check", is_flag=True, help="Fail unless the latency trends hold.")
@click.pass_context
def bench_latency(ctx, n_list, difficulties, runs, workers, mode, check):
    from .bench.latency import check_latency_rows, run_latency_bench
    from .bench.reports import LatencyReport, format_table

    settings = ctx.obj["config"]["BENCH_SETTINGS"]
    rows = run_latency_bench(
        n_list=n_list or [int(n) for n in settings["n_list"]],
        difficulty=list(difficulties) or int(settings["difficulty"]),
        runs=int(settings["runs"]) if runs is None else runs,
        workers=int(settings["workers"]) if workers is None else workers,
        seed=int(settings["seed"]),
        modes=_modes(mode),
        confirmations=int(settings["confirmations"]),
        node_count=int(settings["node_count"]),
    )
    click.echo(format_table(rows, LatencyReport))
    _write(ctx, rows, LatencyReport)
    if check:
        _fail_on(ctx, check_latency_rows(rows))


@cli.group()
def demo():
    """Scripted scenarios."""


@demo.command("smartcity")
@click.option("--skip-revocation", is_flag=True, help="Leave the water trust in place.")
@click.option("--difficulty", type=click.IntRange(0, 64), default=0, show_default=True)
@click.option("--mode", type=MODES, default=StorageMode.VARIABLES.value, show_default=True)
@click.pass_context
def demo_smartcity(ctx, skip_revocation, difficulty, mode):
    from .bench.demo import run_smartcity

    result = run_smartcity(
        difficulty=difficulty,
        skip_revocation=skip_revocation,
        mode=StorageMode(mode),
        echo=click.echo,
    )
    ctx.exit(result.exit_code)


@cli.group()
def twin():
    """Digital twin instances."""


@twin.command("start")
@click.option("--id", "twin_id", required=True, help="On-chain twin id.")
@click.option("--chain", "chain_url", required=True, help="Chain node base URL.")
@click.option("--resource", required=True, help="Virtual resource the twin reads.")
@click.option("--coap-port", type=int, default=None)
@click.option("--http-port", type=int, default=None)
@click.pass_context
def twin_start(ctx, twin_id, chain_url, resource, coap_port, http_port):
    from .api.server import build_twin, create_app

    config = ctx.obj["config"]
    settings = config["TWIN_SETTINGS"]
    settings.update(twin_id=twin_id, chain_url=chain_url, resource=resource)
    if coap_port is not None:
        settings["coap_port"] = coap_port
    if http_port is not None:
        settings["http_port"] = http_port
    try:
        instance = build_twin(config)
    except TwinTrustError as e:
        click.echo(f"cannot start {twin_id}: {type(e).__name__}: {e}", err=True)
        ctx.exit(1)
    click.echo(f"twin {twin_id} listening: {instance.endpoints()}")
    try:
        create_app(ctx.obj["config_path"], twin=instance).run(
            host=settings["host"], port=int(settings["http_port"])
        )
    finally:
        instance.stop()


@cli.group()
def chain():
    """Chain nodes."""


@chain.command("serve")
@click.option("--port", type=int, default=8545, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--mode", type=MODES, default=None)
@click.option("--difficulty", type=click.IntRange(0, 64), default=None)
@click.pass_context
def chain_serve(ctx, port, host, mode, difficulty):
    from .api.server import ChainService, create_chain_app

    config = ctx.obj["config"]
    if mode is not None:
        config["CONTRACT_SETTINGS"]["storage_mode"] = mode
    if difficulty is not None:
        config["LEDGER_SETTINGS"]["difficulty"] = difficulty
    try:
        service = ChainService.from_settings(config).start()
    except TwinTrustError as e:
        click.echo(f"cannot start chain: {type(e).__name__}: {e}", err=True)
        ctx.exit(1)
    click.echo(f"{service.mode.value} registry at {service.registry_address.hex}")
    try:
        create_chain_app(ctx.obj["config_path"], service=service).run(host=host, port=port)
    finally:
        service.stop()
