"""Command-line entry point.

Subcommands: simulate, safety, drive, session, analyze, serve.
Human-readable tables go to stdout; machine CSV goes behind --out.
Exit codes: 0 success, 1 validation/usage, 2 runtime failure.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import device, experiment, physics, stats, units
from .drivechain import PulseConfig, synthesize_square


def _stack_from_options(area: str, thickness: str, permittivity: float, mu: float):
    return physics.MaterialStack(
        contact_area=units.parse_area(area),
        insulator_thickness=units.parse_length(thickness),
        insulator_rel_permittivity=permittivity,
        friction_coeff=mu,
    )


def stack_options(fn):
    fn = click.option("--area", default="1cm2", show_default=True,
                      help="Contact area (m2/cm2/mm2 suffix).")(fn)
    fn = click.option("--thickness", default="35um", show_default=True,
                      help="Insulator thickness (m/mm/um suffix).")(fn)
    fn = click.option("--permittivity", default=3.0, show_default=True,
                      help="Insulator relative permittivity.")(fn)
    fn = click.option("--mu", default=0.5, show_default=True,
                      help="Friction coefficient.")(fn)
    return fn


@click.group()
def main():
    """Electrovibration cloth toolkit: simulation, safety, device, study, stats."""


@main.command()
@click.option("--v", "voltage", required=True, type=float, help="Drive voltage, V.")
@click.option("--f", "frequency", required=True, type=float, help="Drive frequency, Hz.")
@click.option("--ms", "duration_ms", default=100.0, show_default=True,
              help="Trace duration, ms.")
@click.option("--rate", default=20_000.0, show_default=True, help="Sample rate, Hz.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write trace CSV here.")
@stack_options
def simulate(voltage, frequency, duration_ms, rate, out, area, thickness, permittivity, mu):
    """Emit a force trace and its modulation metrics."""
    stack = _stack_from_options(area, thickness, permittivity, mu)
    cfg = PulseConfig(frequency=frequency, sample_rate=rate, duration=duration_ms / 1000.0)
    trace = physics.friction_trace(stack, synthesize_square(cfg, voltage))
    metrics = physics.modulation_metrics(trace)
    click.echo(f"samples          {len(trace)} @ {trace.sample_rate:g} Hz")
    click.echo(f"peak_to_peak_N   {metrics['peak_to_peak']:.6g}")
    click.echo(f"mean_N           {metrics['mean']:.6g}")
    click.echo(f"ac_rms_N         {metrics['ac_rms']:.6g}")
    click.echo(f"fundamental_Hz   {metrics['fundamental']:.6g}")
    if out:
        Path(out).write_text(physics.trace_to_csv(trace), encoding="utf-8")
        click.echo(f"trace written to {out}")


@main.command()
@click.option("--sweep", is_flag=True, help="Check the full 3x3 condition grid.")
@click.option("--v", "voltage", type=float, help="Single-point voltage, V.")
@click.option("--f", "frequency", type=float, help="Single-point frequency, Hz.")
@click.option("--resistance", default=1e6, show_default=True, help="Series resistance, ohm.")
@click.option("--rise-time", default=1e-3, show_default=True, help="Switch rise time, s.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write CSV here.")
@stack_options
def safety(sweep, voltage, frequency, resistance, rise_time, out,
           area, thickness, permittivity, mu):
    """Current-draw check against the 0.5 mA body-safe limit."""
    stack = _stack_from_options(area, thickness, permittivity, mu)
    if sweep:
        points = [(v, f) for v in experiment.VOLTAGE_LEVELS
                  for f in experiment.FREQUENCY_LEVELS]
    elif voltage is not None and frequency is not None:
        points = [(voltage, frequency)]
    else:
        raise click.UsageError("give --sweep or both --v and --f")
    rows = []
    click.echo(f"{'V':>6} {'Hz':>6} {'avg_A':>12} {'peak_A':>12} {'pass':>5}")
    for v, f in points:
        report = physics.estimate_currents(stack, v, f, resistance, rise_time)
        rows.append((v, f, report))
        click.echo(
            f"{v:>6g} {f:>6g} {report.average_rectified_current:>12.4e} "
            f"{report.peak_current:>12.4e} {'PASS' if report.passed else 'FAIL':>5}"
        )
    if out:
        lines = ["voltage_v,frequency_hz,avg_current_a,peak_current_a,pass"]
        for v, f, r in rows:
            lines.append(
                f"{v:g},{f:g},{r.average_rectified_current:.9g},"
                f"{r.peak_current:.9g},{str(r.passed).lower()}"
            )
        Path(out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if not all(r.passed for _, _, r in rows):
        sys.exit(2)


@main.command()
@stack_options
@click.option("--resistance", default=1e6, show_default=True, help="Series resistance, ohm.")
@click.option("--rise-time", default=1e-3, show_default=True, help="Switch rise time, s.")
def drive(area, thickness, permittivity, mu, resistance, rise_time):
    """Line-protocol REPL against the simulated driver (reads stdin)."""
    limits = device.DriverLimits(
        stack=_stack_from_options(area, thickness, permittivity, mu),
        series_resistance=resistance,
        rise_time=rise_time,
    )
    state = device.DeviceState(limits=limits)
    for line in sys.stdin:
        if not line.strip():
            continue
        state, response = device.handle_line(state, line)
        click.echo(response)


@main.command()
@click.option("--participant", required=True, help="Participant identifier.")
@click.option("--seed", required=True, type=int, help="Randomization seed.")
@click.option("--out", type=click.Path(dir_okay=False), help="Session JSONL path.")
def session(participant, seed, out):
    """Terminal-driven study session producing a JSONL log.

    For each of the 10 conditions it prompts for the four 1..5 Likert scores,
    acceptability (y/n), free text and the most-similar fabric index; it ends
    with the distinct-sensation count. Prompts read stdin, so the whole
    session is scriptable by piping answers.
    """
    plan = experiment.plan_session(participant, seed)
    log = experiment.SessionLog(plan=plan)
    click.echo(f"session for {participant}, seed {seed}: "
               f"{len(plan.order)} conditions")
    click.echo("criteria cloths: " + "; ".join(
        f"{p}: {'/'.join(c)}" for p, c in experiment.CRITERIA_CLOTHS.items()))
    for i, cond in enumerate(plan.order, start=1):
        click.echo(f"\n[{i}/{len(plan.order)}] present condition: {cond.label()}")
        likert = {}
        for prop in experiment.LIKERT_PROPERTIES:
            likert[prop] = click.prompt(f"  {prop} (1-5)", type=click.IntRange(1, 5))
        acceptable = click.confirm("  acceptable as cloth?")
        free_text = click.prompt("  free impression", default="", show_default=False)
        fabric = click.prompt(
            "  most similar fabric (1-16)", type=click.IntRange(1, 16)
        )
        rec = experiment.ResponseRecord(
            condition=cond,
            likert=likert,
            acceptable=acceptable,
            free_text=free_text,
            similar_fabric=fabric,
            timestamp=_timestamp(),
        )
        log = experiment.record_response(log, rec)
    count = click.prompt(
        "\nhow many distinct sensations among the nine energized states? (0-9)",
        type=click.IntRange(0, 9),
    )
    log = experiment.set_distinct_count(log, count)
    path = Path(out) if out else Path(f"{participant}_{seed}.jsonl")
    experiment.save_session(log, path)
    click.echo(f"session written to {path}")


@main.command()
@click.argument("files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--property", "prop", multiple=True,
              help="Restrict to these Likert properties (default: all).")
@click.option("--out", type=click.Path(dir_okay=False), help="Write report CSV here.")
def analyze(files, prop, out):
    """Aligned-rank factorial analysis over one or more session JSONL files."""
    logs = [experiment.load_session(f) for f in files]
    props = prop or experiment.LIKERT_PROPERTIES
    from .service import observations_from_logs

    results = {}
    for p in props:
        obs = observations_from_logs(logs, p)
        results[p] = stats.art_anova(obs)
    click.echo(f"{'property':<10} {'term':<4} {'df1':>3} {'df2':>4} {'F':>10} {'p':>10}")
    for p in sorted(results):
        for row in results[p]:
            click.echo(
                f"{p:<10} {row.term.value:<4} {row.df_num:>3} {row.df_den:>4} "
                f"{row.f_stat:>10.4g} {row.p_value:>10.4g}"
            )
    if out:
        Path(out).write_text(stats.anova_report_csv(results), encoding="utf-8")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8743, show_default=True, type=int)
@click.option("--allow-external", is_flag=True,
              help="Required to bind anything other than loopback.")
@click.option("--data-dir", default=None, help="Session storage directory.")
@click.option("--console-dir", default=None,
              help="Directory of built console assets to serve at /.")
@stack_options
def serve(host, port, allow_external, data_dir, console_dir,
          area, thickness, permittivity, mu):
    """Start the HTTP service (and the web console if assets are given)."""
    if host not in ("127.0.0.1", "localhost", "::1") and not allow_external:
        raise click.UsageError(
            "refusing to bind non-loopback address without --allow-external"
        )
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        data_dir=Path(data_dir or os.environ.get("EVCLOTH_DATA_DIR", "./sessions")),
        stack=_stack_from_options(area, thickness, permittivity, mu),
        static_dir=Path(console_dir) if console_dir else _default_console_dir(),
    )
    uvicorn.run(create_app(config), host=host, port=port, log_level="info")


def _default_console_dir() -> Path | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def _timestamp() -> str:
    from datetime import datetime, timezone

    return datetime.now(timezone.utc).isoformat()


def entrypoint() -> None:
    """Console-script wrapper enforcing the documented exit codes."""
    try:
        main.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except SystemExit:
        raise
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except Exception as exc:  # pragma: no cover - unexpected runtime faults
        click.echo(f"runtime error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    entrypoint()
