"""Command line for rendering twoway-covert CSV tables into figures."""

import click

from .render import render_regions, render_scaling


@click.group()
def main() -> None:
    """Render twoway-covert CSV outputs into static figures."""


@main.command()
@click.argument("pts_csv", type=click.Path(exists=True))
@click.argument("capacity_csv", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(),
              help="output image path (SVG recommended)")
def regions(pts_csv: str, capacity_csv: str, out: str) -> None:
    """Plot both rate-region boundaries from pts.csv and capacity.csv."""
    try:
        render_regions(pts_csv, capacity_csv, out)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@click.argument("scaling_csv", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(),
              help="output image path (SVG recommended)")
def scaling(scaling_csv: str, out: str) -> None:
    """Log-log plot of a scaling table with its fitted slope."""
    try:
        render_scaling(scaling_csv, out)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


if __name__ == "__main__":
    main()
