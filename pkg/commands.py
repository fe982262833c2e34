"""Defines the command-line surface: one click command per experiment."""

import click

from services import handle_command
from utils.dyadic import DyadicTime, parse_dyadic
from utils.errors import FramePathException


# --- Parameter types ---

class DyadicParam(click.ParamType):
    """Exact dyadic literal: k/2^m, k/2**m, k/N or a binary decimal such as 0.25."""

    name = "dyadic"

    def convert(self, value, param, ctx):
        if isinstance(value, DyadicTime):
            return value
        try:
            return parse_dyadic(value)
        except FramePathException as e:
            self.fail(str(e), param, ctx)


class OffsetsParam(click.ParamType):
    """Offset exponents k (offset 2^-k) as `a..b` or a comma list."""

    name = "offsets"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            if ".." in value:
                low, high = value.split("..", 1)
                exponents = tuple(range(int(low), int(high) + 1))
            else:
                exponents = tuple(int(part) for part in value.split(","))
        except ValueError:
            self.fail(f"{value!r} is not a range a..b or a comma list of integers", param, ctx)
        if not exponents or min(exponents) < 0:
            self.fail(f"{value!r} must name at least one exponent >= 0", param, ctx)
        return exponents


class FloatListParam(click.ParamType):
    """Comma list of reals such as `0.5,1,2`."""

    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return tuple(float(part) for part in value.split(","))
        except ValueError:
            self.fail(f"{value!r} is not a comma list of numbers", param, ctx)


DYADIC = DyadicParam()
OFFSETS = OffsetsParam()
FLOATS = FloatListParam()


def common_options(fn):
    """Flags shared by every command."""
    options = [
        click.option("--seed", type=click.IntRange(0, (1 << 64) - 1), default=None, help="Base seed (FRAMEPATH_SEED overrides)."),
        click.option("--level", type=click.IntRange(min=0), default=None, help="Sample grid level L: 2^(L+1)+1 points on [-1, 1]."),
        click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker cap; never changes results."),
        click.option("--out", "-o", "out", default=None, help="Output file, stdout when omitted."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None),
        click.option("--deterministic", type=click.Choice(["ramp"]), default=None, help="Replace the sampler with f(x) = x + 1."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def constant_options(fn):
    options = [
        click.option("--p", type=float, default=None, help="Variation exponent p > 2."),
        click.option("--alpha", type=float, default=None, help="Weight exponent, alpha > 1 - 1/p."),
        click.option("--beta", type=float, default=None, help="Second weight exponent (defaults to alpha)."),
        click.option("--pprime", type=float, default=None, help="Moment exponent p'."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


@click.group()
def cli():
    """Brownian frame process: p-variation, tail estimate and Levy-area experiments."""


@cli.command()
@common_options
@click.option("--frame-h", type=DYADIC, default=None, help="Dump the frame T_h instead of the path.")
@click.pass_context
def sample(ctx, **options):
    """Write a sampled path as `k,x,f` rows."""
    ctx.exit(handle_command("sample", options))


@cli.command()
@common_options
@constant_options
@click.option("--h1", type=DYADIC, default=None)
@click.option("--h2", type=DYADIC, default=None)
@click.option("--tol", type=float, default=None, help="Series truncation tolerance.")
@click.pass_context
def variation(ctx, **options):
    """p-variation norm of T_h2 - T_h1 with the dyadic bound and constants."""
    ctx.exit(handle_command("variation", options))


@cli.command()
@common_options
@constant_options
@click.option("--h1", type=DYADIC, default=None)
@click.option("--h2", type=DYADIC, default=None)
@click.option("--trials", type=click.IntRange(min=1), default=None)
@click.option("--r-grid", type=FLOATS, default=None, help="Comma list of thresholds r.")
@click.pass_context
def tail(ctx, **options):
    """Monte-Carlo survival of the normalised frame norm against the Gaussian tail."""
    ctx.exit(handle_command("tail", options))


@cli.command("area-surface")
@common_options
@click.option("--m", type=click.IntRange(min=0), default=None, help="Surface grid level.")
@click.option("--n", type=click.IntRange(min=0), default=None, help="Summation level.")
@click.pass_context
def area_surface(ctx, **options):
    """Upper-triangle Levy-area surface as `s,t,area` rows."""
    ctx.exit(handle_command("area-surface", options))


@cli.command()
@common_options
@click.option("--s", type=DYADIC, default=None)
@click.option("--offsets", type=OFFSETS, default=None, help="Exponents k of the offsets 2^-k, e.g. 4..10.")
@click.option("--n", type=click.IntRange(min=0), default=None, help="Summation level.")
@click.option("--trials", type=click.IntRange(min=1), default=None)
@click.pass_context
def diagonal(ctx, **options):
    """Ensemble means of A(s - 2^-k, s) as the offset shrinks."""
    ctx.exit(handle_command("diagonal", options))


@cli.command()
@common_options
@constant_options
@click.option("--tol", type=float, default=None, help="Series truncation tolerance.")
@click.pass_context
def constants(ctx, **options):
    """c(alpha,p), d(alpha,p), d(alpha,beta,p,p'), d_p, d1 and d2."""
    ctx.exit(handle_command("constants", options))
