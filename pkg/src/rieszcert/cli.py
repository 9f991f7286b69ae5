"""Command-line entry point for the certification campaigns.

Exit codes: 0 all checks pass, 1 at least one check fails, 2 malformed
configuration, 3 at least one check inconclusive (with none failing).
Identical config and seed produce a byte-identical report.json.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from .campaigns import CAMPAIGNS, run_campaign
from .config import CampaignConfig, ConfigError
from .report import write_plotdata

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_INCONCLUSIVE = 3


def _load_config(config_path: str | None, out: str | None, seed: int | None) -> CampaignConfig:
    if config_path is None:
        cfg = CampaignConfig()
    else:
        cfg = CampaignConfig.from_file(config_path)
    if out is not None:
        cfg.outputs = out
    if seed is not None:
        cfg.seed = int(seed)
    return cfg


def run(subcommand: str, cfg: CampaignConfig, strict: bool = False) -> int:
    """Execute one campaign, write report.csv / report.json / plotdata /
    figures under the configured output directory, return the exit code."""
    rep, plots, elapsed = run_campaign(subcommand, cfg)
    out_dir = Path(cfg.outputs)
    out_dir.mkdir(parents=True, exist_ok=True)
    rep.write_csv(out_dir / "report.csv")
    rep.write_json(out_dir / "report.json")
    for name, (header, rows) in sorted(plots.items()):
        write_plotdata(out_dir / "plotdata" / f"{name}.csv", header, rows)

    from .figures import render_all

    rows = [r.as_row() for r in rep.rows]
    render_all(out_dir, rows)

    for line in rep.summary_lines():
        click.echo(line)
    click.echo(f"{len(rep.rows)} checks in {elapsed:.1f}s -> {out_dir}")

    if strict:
        failed = not rep.all_passed or rep.any_inconclusive
    else:
        failed = not rep.all_passed
    if failed:
        return EXIT_FAIL
    if rep.any_inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


@click.command()
@click.argument("subcommand", type=click.Choice(sorted(CAMPAIGNS)))
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON campaign configuration.")
@click.option("--out", type=click.Path(), default=None,
              help="Output directory (overrides config).")
@click.option("--seed", type=int, default=None, help="Seed override.")
@click.option("--strict", is_flag=True,
              help="Treat inconclusive refinement-order checks as failures.")
def main(subcommand: str, config_path: str | None, out: str | None,
         seed: int | None, strict: bool) -> None:
    """Run a certification campaign and write its reports."""
    try:
        cfg = _load_config(config_path, out, seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    sys.exit(run(subcommand, cfg, strict=strict))


if __name__ == "__main__":
    main()
