"""Command-line front end.

All outputs are deterministic functions of the inputs and seed; numbers are
written with 9 significant digits so files are byte-stable across platforms.
Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import click

from .channel import ChannelSpecError, check_assumptions, parse_channel
from .metrics import (CovertInputDesign, DesignError, InfoQuantities,
                      exact_finite_n_quantities, fit_scaling_exponent,
                      leading_order_quantities)
from .regions import (RhoWeights, capacity_region_point, converse_frontier,
                      pts_region_point, weight_budget)
from .simulate import (CodebookSizes, estimate_error_probability,
                       exact_induced_distribution, generate_codebook)

FMT = "{:.9g}"


def _fmt(x: float) -> str:
    return FMT.format(x)


def _load_channel(path: str):
    try:
        return parse_channel(Path(path).read_text())
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc}") from exc
    except ChannelSpecError as exc:
        raise click.ClickException(f"invalid channel spec: {exc}") from exc


def _build_design(scheme: str, q1: float, q2: float, p1: float, p2: float,
                  n: int) -> CovertInputDesign:
    try:
        if scheme == "ts":
            # for time sharing, --q1 supplies the single slot-share q
            return CovertInputDesign.ts(q=q1, p1=p1, p2=p2, n=n)
        return CovertInputDesign.sts(q1=q1, q2=q2, p1=p1, p2=p2, n=n)
    except DesignError as exc:
        raise click.UsageError(f"invalid design: {exc}") from exc


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise click.UsageError(f"{flag} must be comma-separated integers") from exc


@click.group()
def main() -> None:
    """Covert-communication regions, scalings and simulations for
    binary-input two-way channels."""


@main.command()
@click.argument("channel", type=click.Path())
def validate(channel: str) -> None:
    """Parse a channel spec and report its structural classification."""
    ch = _load_channel(channel)
    report = check_assumptions(ch)
    click.echo(f"alarm_symbols={sorted(report.alarm_symbols)}")
    for name in ("is_alarm", "abs_continuity_ok", "q00_in_hull_pair",
                 "q00_in_hull_triple", "degraded_dir1", "degraded_dir2"):
        click.echo(f"{name}={getattr(report, name)}")
    for key, value in report.divergence_table.items():
        click.echo(f"{key}={_fmt(value)}")


@main.command()
@click.argument("channel", type=click.Path())
@click.option("--grid", default=201, show_default=True,
              help="number of lambda grid points")
@click.option("--simplex-resolution", default=50, show_default=True,
              help="barycentric resolution of the converse enumeration")
@click.option("--out", required=True, type=click.Path(),
              help="output directory for pts.csv, capacity.csv, converse.csv")
def region(channel: str, grid: int, simplex_resolution: int, out: str) -> None:
    """Write the time-sharing, capacity and converse boundary tables."""
    if grid < 2:
        raise click.UsageError("--grid must be at least 2")
    ch = _load_channel(channel)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    lambdas = [i / (grid - 1) for i in range(grid)]
    with open(out_dir / "pts.csv", "w") as f:
        f.write("lambda,delta1_frac,r1,r2\n")
        for lam in lambdas:
            p = pts_region_point(ch, lam, lam)
            f.write(f"{_fmt(lam)},{_fmt(lam)},{_fmt(p.r1)},{_fmt(p.r2)}\n")
    with open(out_dir / "capacity.csv", "w") as f:
        f.write("lambda,r1,r2,c_lambda\n")
        for lam in lambdas:
            p = capacity_region_point(ch, lam)
            f.write(f"{_fmt(lam)},{_fmt(p.r1)},{_fmt(p.r2)},"
                    f"{_fmt(p.constants['c_lambda'])}\n")
    frontier = converse_frontier(ch, simplex_resolution)
    with open(out_dir / "converse.csv", "w") as f:
        f.write("rho01,rho10,rho11,r1,r2,tau\n")
        for p in frontier:
            c = p.constants
            f.write(f"{_fmt(c['rho01'])},{_fmt(c['rho10'])},"
                    f"{_fmt(c['rho11'])},{_fmt(p.r1)},{_fmt(p.r2)},"
                    f"{_fmt(c['tau'])}\n")


@main.command()
@click.argument("channel", type=click.Path())
@click.option("--scheme", type=click.Choice(["ts", "sts"]), required=True)
@click.option("--q1", default=0.5, show_default=True,
              help="slot share q1 (for ts this is the single share q)")
@click.option("--q2", default=0.5, show_default=True)
@click.option("--p1", default=0.9, show_default=True)
@click.option("--p2", default=0.9, show_default=True)
@click.option("--n-grid", default="10000,100000,1000000,10000000,100000000,"
              "1000000000,10000000000", show_default=True,
              help="comma-separated blocklengths")
@click.option("--quantity", default="i_u_z", show_default=True,
              type=click.Choice(InfoQuantities.FIELDS))
@click.option("--out", required=True, type=click.Path())
def scaling(channel: str, scheme: str, q1: float, q2: float, p1: float,
            p2: float, n_grid: str, quantity: str, out: str) -> None:
    """Tabulate exact vs leading-order quantities and the fitted
    log-log slope over a blocklength grid."""
    ch = _load_channel(channel)
    ns = _parse_int_list(n_grid, "--n-grid")
    family = _build_design(scheme, q1, q2, p1, p2, max(ns))
    slope, r2 = fit_scaling_exponent(ch, family, quantity, ns)
    with open(out, "w") as f:
        f.write("n,quantity,exact,leading,fit_slope,fit_r2\n")
        for n in ns:
            d = family.with_n(n)
            exact = getattr(exact_finite_n_quantities(ch, d), quantity)
            lead = getattr(leading_order_quantities(ch, d), quantity)
            f.write(f"{n},{quantity},{_fmt(exact)},{_fmt(lead)},"
                    f"{_fmt(slope)},{_fmt(r2)}\n")


@main.command()
@click.argument("channel", type=click.Path())
@click.option("--scheme", type=click.Choice(["ts", "sts"]), required=True)
@click.option("--n", default=16, show_default=True)
@click.option("--q1", default=1.0, show_default=True,
              help="slot share q1 (for ts this is the single share q)")
@click.option("--q2", default=1.0, show_default=True)
@click.option("--p1", default=1.0, show_default=True)
@click.option("--p2", default=1.0, show_default=True)
@click.option("--sizes", default="1,2,1,2,1", show_default=True,
              help="m0,m1p,m1s,m2p,m2s")
@click.option("--mu", default=0.1, show_default=True)
@click.option("--trials", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--exact", "exact_out", type=click.Path(), default=None,
              help="also write the exact induced eavesdropper distribution "
                   "as CSV to this path")
@click.option("--out", type=click.Path(), default=None,
              help="write the report here instead of stdout")
def simulate(channel: str, scheme: str, n: int, q1: float, q2: float,
             p1: float, p2: float, sizes: str, mu: float, trials: int,
             seed: int, exact_out: str | None, out: str | None) -> None:
    """Run the random-codebook threshold-decoding simulation."""
    ch = _load_channel(channel)
    d = _build_design(scheme, q1, q2, p1, p2, n)
    size_list = _parse_int_list(sizes, "--sizes")
    if len(size_list) != 5:
        raise click.UsageError("--sizes needs exactly 5 integers")
    try:
        cb_sizes = CodebookSizes(*size_list)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    try:
        codebook = generate_codebook(ch, d, cb_sizes, seed)
    except MemoryError as exc:
        raise click.ClickException(str(exc)) from exc
    report = estimate_error_probability(ch, codebook, mu, trials, seed)
    text = report.to_text()
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)
    if exact_out is not None:
        try:
            dist = exact_induced_distribution(ch, codebook)
        except MemoryError as exc:
            raise click.ClickException(str(exc)) from exc
        with open(exact_out, "w") as f:
            f.write("sequence_index,probability\n")
            for i, p in enumerate(dist):
                f.write(f"{i},{_fmt(p)}\n")


@main.command()
@click.argument("channel", type=click.Path())
@click.option("--rho", default="0.5,0.5,0", show_default=True,
              help="rho01,rho10,rho11 (must sum to 1)")
@click.option("--n", "n_list", default="100", show_default=True,
              help="comma-separated blocklengths")
@click.option("--delta", default=1.0, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="write the table here instead of stdout")
def budget(channel: str, rho: str, n_list: str, delta: float,
           out: str | None) -> None:
    """Tabulate the codeword weight budget mu_n."""
    ch = _load_channel(channel)
    try:
        parts = [float(v) for v in rho.split(",")]
        weights = RhoWeights(*parts)
    except (ValueError, TypeError) as exc:
        raise click.UsageError(f"bad --rho: {exc}") from exc
    ns = _parse_int_list(n_list, "--n")
    lines = ["rho01,rho10,rho11,n,mu,alarm,unconstrained"]
    for n in ns:
        wb = weight_budget(ch, weights, n, delta)
        mu = wb.mu if math.isfinite(wb.mu) else math.inf
        lines.append(
            f"{_fmt(weights.rho01)},{_fmt(weights.rho10)},"
            f"{_fmt(weights.rho11)},{n},{_fmt(mu)},"
            f"{int(wb.alarm)},{int(wb.unconstrained)}"
        )
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


if __name__ == "__main__":
    sys.exit(main())
