"""Command-line interface — classify, measure and transform closed subgroups.

Every command prints human-readable lines, or with ``--json`` a single
object {"status": ..., "result": ...}.  Exit codes: 0 ok, 2 usage, 3 bad
descriptor or stratum, 4 numeric failure.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import click

from chabauty.config import Config, load_config, save_config, to_dict
from chabauty.errors import ChabautyError, DescriptorError, NumericError, StratumError

log = logging.getLogger(__name__)

SPACE_CHOICE = click.Choice(["R", "C", "H"], case_sensitive=False)
PLOT_ALIASES = {"example11-trace": "collapse-trace"}


# ── results ──────────────────────────────────────────────────────────────────


@dataclass
class CommandResult:
    status: str = "ok"
    payload: dict[str, Any] = field(default_factory=dict)
    code: int = 0
    message: str = ""

    @classmethod
    def ok(cls, **payload: Any) -> CommandResult:
        return cls("ok", payload)

    @classmethod
    def error(cls, code: int, message: str, **payload: Any) -> CommandResult:
        return cls("error", payload, code, message)

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "ok" else self.code

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.status, "result": self.payload}
        if self.status != "ok":
            out["code"] = self.code
            out["message"] = self.message
        return out


@dataclass
class _State:
    config: Config
    as_json: bool = False


def _render(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    if isinstance(value, (dict, list)):
        return json.dumps(value)
    return str(value)


def _emit(result: CommandResult, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(result.to_json()))
    elif result.status == "ok":
        for key, value in result.payload.items():
            click.echo(f"{key}: {_render(value)}")
    if result.status != "ok":
        click.echo(f"Error: {result.message}", err=True)


def _command(fn: Callable[..., CommandResult]) -> Callable[..., None]:
    """Run a command body, map package errors to exit codes, print the result."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        state = _state()
        try:
            result = fn(*args, **kwargs)
        except click.ClickException:
            raise
        except ChabautyError as e:
            extra: dict[str, Any] = {}
            message = str(e)
            if isinstance(e, NumericError) and e.residual is not None:
                extra["residual"] = e.residual
                message = f"{message} (residual {e.residual:.3g})"
            result = CommandResult.error(e.exit_code, message, **extra)
        except ArithmeticError as e:
            log.debug("floating-point failure", exc_info=True)
            result = CommandResult.error(NumericError.exit_code, f"numeric failure: {e}")
        except Exception as e:
            log.debug("unexpected failure", exc_info=True)
            result = CommandResult.error(1, str(e))
        _emit(result, state.as_json)
        if result.exit_code:
            sys.exit(result.exit_code)

    return wrapper


def _state() -> _State:
    ctx = click.get_current_context()
    state = ctx.find_object(_State)
    if state is None:
        state = _State(load_config())
        ctx.obj = state
    return state


def _metric_config(**overrides: Any):
    cfg = _state().config.metric
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **changes) if changes else cfg


# ── root group ───────────────────────────────────────────────────────────────


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="TOML config file")
@click.option("--json", "as_json", is_flag=True, help="Print one JSON object instead of text")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, as_json: bool, verbose: bool) -> None:
    """Closed subgroups of R, C and the Heisenberg group H."""
    if verbose:
        logging.getLogger("chabauty").setLevel(logging.DEBUG)
    from chabauty.euclid import configure_canonical

    cfg = load_config(config_path)
    configure_canonical(cfg.canonical)
    ctx.obj = _State(cfg, as_json)


@main.command()
@click.option("--space", type=SPACE_CHOICE, default="C", show_default=True)
@click.argument("descriptor")
@_command
def classify(space: str, descriptor: str) -> CommandResult:
    """Canonical form and stratum of a subgroup (inline JSON or file)."""
    from chabauty.descriptors import c_to_json, h_to_json, load_subgroup, number_to_json, r_to_json
    from chabauty.euclid import covolume, is_discrete

    space = space.upper()
    s = load_subgroup(space, descriptor)
    if space == "R":
        return CommandResult.ok(stratum=s.kind, param=number_to_json(s.param), descriptor=r_to_json(s))
    if space == "C":
        return CommandResult.ok(
            stratum=s.stratum,
            covolume=number_to_json(covolume(s)),
            discrete=is_discrete(s),
            descriptor=c_to_json(s),
        )

    from chabauty.heisenberg import HeisLattice, classify_heis, project
    from chabauty.spaces import heis_is_discrete

    payload: dict[str, Any] = {
        "stratum": classify_heis(s),
        "discrete": heis_is_discrete(s),
        "descriptor": h_to_json(s),
    }
    if isinstance(s, HeisLattice):
        payload["center_index"] = s.n
    try:
        payload["projection"] = c_to_json(project(s))
    except StratumError:
        payload["projection"] = None
    return CommandResult("ok", payload)


@main.command()
@click.option("--space", type=SPACE_CHOICE, default="C", show_default=True)
@click.option("--tol", type=float, default=None, help="Bisection tolerance (default from config)")
@click.option("--max-points", type=int, default=None, help="Enumeration cap")
@click.option("--trace", "show_trace", is_flag=True, help="Include every predicate evaluation")
@click.option("--strict", is_flag=True, help="Fail when a sampled piece stays undecided")
@click.argument("first")
@click.argument("second")
@_command
def dist(
    space: str, tol: float | None, max_points: int | None, show_trace: bool, strict: bool, first: str, second: str
) -> CommandResult:
    """Chabauty distance between two closed subgroups."""
    from chabauty.descriptors import load_subgroup
    from chabauty.metric import chabauty_trace
    from chabauty.spaces import get_space

    cfg = _metric_config(tol=tol, max_points=max_points, strict=strict or None)
    f1, f2 = load_subgroup(space, first), load_subgroup(space, second)
    res = chabauty_trace(get_space(space), f1, f2, cfg)
    payload: dict[str, Any] = {"distance": res.distance, "tol": cfg.tol, "evaluations": len(res.trace)}
    if show_trace:
        payload["trace"] = [[eps, ok] for eps, ok in res.trace]
    return CommandResult("ok", payload)


@main.command()
@click.option("--space", type=SPACE_CHOICE, default="C", show_default=True)
@click.option("--radius", type=float, required=True, help="Ball radius R")
@click.option("--delta", type=float, required=True, help="Tolerance δ")
@click.option("--start", type=int, default=None, help="First index K (default: first listed index)")
@click.option("--stop", type=int, default=None, help="Stop index (exclusive); default K + horizon")
@click.argument("sequence")
@click.argument("limit")
@_command
def limit(space: str, radius: float, delta: float, start: int | None, stop: int | None, sequence: str, limit: str) -> CommandResult:
    """Finite-scale check that a sequence of subgroups converges to LIMIT."""
    from chabauty.descriptors import load_json, load_subgroup, parse_family
    from chabauty.metric import limit_verdict
    from chabauty.spaces import get_space

    member, listed = parse_family(space, load_json(sequence))
    target = load_subgroup(space, limit)
    indices = None
    if listed is not None:
        indices = [k for k in listed if (start is None or k >= start) and (stop is None or k < stop)]
    elif start is None:
        raise click.UsageError("--start is required for an unbounded family")
    report = limit_verdict(
        get_space(space), member, target, radius, delta, start or 0, stop=stop, indices=indices, cfg=_metric_config()
    )
    return CommandResult.ok(
        passed=report.passed,
        indices=report.indices,
        failures=[
            {"index": f.index, "condition": f.condition, "point": list(f.witness.point), "distance": f.witness.distance}
            for f in report.failures
        ],
    )


@main.command()
@click.option("--space", type=SPACE_CHOICE, default="C", show_default=True)
@click.option("--k-radius", type=float, required=True, help="Radius of the compact ball K")
@click.option("--u-radius", type=float, required=True, help="Radius of the open identity ball U")
@click.argument("c")
@click.argument("d")
@_command
def nbhd(space: str, k_radius: float, u_radius: float, c: str, d: str) -> CommandResult:
    """Is D in the neighbourhood N(K, U) of C?"""
    from chabauty.descriptors import load_subgroup
    from chabauty.metric import neighborhood_check
    from chabauty.spaces import get_space

    inside = neighborhood_check(
        get_space(space), load_subgroup(space, c), load_subgroup(space, d), k_radius, u_radius, _metric_config()
    )
    return CommandResult.ok(inside=inside, k_radius=k_radius, u_radius=u_radius)


@main.command()
@click.option("--space", type=click.Choice(["C", "H"], case_sensitive=False), default="C", show_default=True)
@click.option("--c-big", type=float, required=True, help="Covolume / volume bound C")
@click.option("--c-small", type=float, default=None, help="Minimal-norm bound c (plane)")
@click.option("--u-radius", type=float, default=None, help="Identity ball radius (Heisenberg)")
@click.argument("family")
@_command
def mahler(space: str, c_big: float, c_small: float | None, u_radius: float | None, family: str) -> CommandResult:
    """Mahler-type compactness verdict over a finite family of lattices."""
    from chabauty.descriptors import load_json, parse_family
    from chabauty.metric import heis_mahler_verdict, mahler_verdict

    member, listed = parse_family(space, load_json(family))
    if listed is None:
        raise DescriptorError("a Mahler family needs explicit indices (a list or 'ks')")
    lats = [member(k) for k in listed]
    if space.upper() == "C":
        if c_small is None:
            raise click.UsageError("--c-small is required for lattices in C")
        r = mahler_verdict(lats, c_big, c_small)
        return CommandResult.ok(
            certified=r.certified,
            sup_covolume=r.sup_covolume,
            inf_min_norm=r.inf_min_norm,
            covolume_escaping=r.covolume_escaping,
            min_norm_collapsing=r.min_norm_collapsing,
        )
    if u_radius is None:
        raise click.UsageError("--u-radius is required for lattices in H")
    r = heis_mahler_verdict(lats, c_big, u_radius, _metric_config())
    return CommandResult.ok(
        certified=r.certified,
        sup_volume=r.sup_volume,
        shortest=r.shortest,
        volume_violations=r.volume_violations,
        neighborhood_violations=r.neighborhood_violations,
    )


@main.command()
@click.option("--method", type=click.Choice(["qseries", "shell"]), default=None, help="Summation method")
@click.option("--tol", type=float, default=None, help="Truncation tolerance")
@click.argument("descriptor")
@_command
def invariants(method: str | None, tol: float | None, descriptor: str) -> CommandResult:
    """g2, g3, discriminant and j of a subgroup in {0}, cyclic or lattice strata."""
    from chabauty.descriptors import complex_to_json, load_subgroup
    from chabauty.modular import invariants as compute, printed_discriminant

    cfg = _state().config.invariants
    changes = {k: v for k, v in (("method", method), ("tol", tol)) if v is not None}
    if changes:
        cfg = replace(cfg, **changes)
    c = load_subgroup("C", descriptor)
    inv = compute(c, cfg)
    return CommandResult.ok(
        stratum=c.stratum,
        g2=complex_to_json(inv.g2),
        g3=complex_to_json(inv.g3),
        delta=complex_to_json(inv.delta),
        printed_delta=complex_to_json(printed_discriminant(inv)),
        j=None if inv.j is None else complex_to_json(inv.j),
        err=inv.err,
        method=inv.method,
    )


@main.command()
@click.argument("a")
@click.argument("b")
@_command
def invert(a: str, b: str) -> CommandResult:
    """The closed subgroup with extended invariants (A, B)."""
    from chabauty.descriptors import c_to_json, load_json, parse_complex
    from chabauty.modular import invert_g

    c = invert_g(parse_complex(load_json(a)), parse_complex(load_json(b)), cfg=_state().config.invariants)
    return CommandResult.ok(stratum=c.stratum, descriptor=c_to_json(c))


@main.command("sphere-fwd")
@click.argument("point")
@_command
def sphere_fwd(point: str) -> CommandResult:
    """f(x): the closed subgroup of C at a point of S4 = C2 ∪ {∞}."""
    from chabauty.descriptors import c_to_json, load_json, number_to_json, parse_sphere_point
    from chabauty.euclid import covolume
    from chabauty.sphere import curve_membership, forward_f

    x = parse_sphere_point(load_json(point))
    cfg = _state().config.sphere
    c = forward_f(x, cfg)
    return CommandResult.ok(
        stratum=c.stratum,
        covolume=number_to_json(covolume(c)),
        curve=None if x.infinite else curve_membership(x, cfg.tol),
        descriptor=c_to_json(c),
    )


@main.command("sphere-inv")
@click.argument("descriptor")
@_command
def sphere_inv(descriptor: str) -> CommandResult:
    """f⁻¹(C): the point of S4 carrying a closed subgroup of C."""
    from chabauty.descriptors import load_subgroup, sphere_to_json
    from chabauty.sphere import inverse_f

    x = inverse_f(load_subgroup("C", descriptor), _state().config.sphere)
    return CommandResult.ok(point=sphere_to_json(x), norm="inf" if x.infinite else x.norm)


@main.command("config")
@click.option("--write", "write_path", type=click.Path(dir_okay=False), default=None, help="Save the effective config here")
@_command
def config_cmd(write_path: str | None) -> CommandResult:
    """Print the effective configuration."""
    cfg = _state().config
    if write_path:
        save_config(cfg, write_path)
        log.info("Config written to %s", write_path)
    return CommandResult("ok", to_dict(cfg))


@main.command("emit-plot")
@click.argument("kind", type=click.Choice(["trefoil", "strata-sample", "collapse-trace", "example11-trace"]))
@click.option("--output", "output_path", type=click.Path(dir_okay=False), required=True, help="CSV (or .json) path")
@click.option("--samples", type=int, default=None, help="Trefoil samples")
@click.option("--grid", type=int, default=None, help="Points per axis of the strata grid")
@click.option("--radius", type=float, default=None, help="Half-width of the strata grid")
@click.option("--n", "n", type=int, default=1, show_default=True, help="Central index of the collapsing lattices")
@click.option("--ks", type=str, default="1,2,4,8,16,32", show_default=True, help="Comma-separated k values")
@_command
def emit_plot(
    kind: str, output_path: str, samples: int | None, grid: int | None, radius: float | None, n: int, ks: str
) -> CommandResult:
    """Write the data table behind a figure."""
    from chabauty.plots import emit_plot as emit

    cfg = _state().config
    plot = cfg.plot
    changes = {k: v for k, v in (("samples", samples), ("grid", grid), ("radius", radius)) if v is not None}
    if changes:
        cfg = replace(cfg, plot=replace(plot, **changes))
    try:
        k_values = [int(v) for v in ks.split(",") if v.strip()]
    except ValueError:
        raise click.UsageError(f"--ks must be comma-separated integers, got {ks!r}") from None
    kind = PLOT_ALIASES.get(kind, kind)
    df = emit(kind, output_path, cfg, n=n, ks=k_values)
    return CommandResult.ok(kind=kind, rows=len(df), columns=list(df.columns), path=output_path)


# ── Heisenberg group ─────────────────────────────────────────────────────────


@main.group(name="heis")
def heis_cmd() -> None:
    """Lattices and elements of the Heisenberg group."""


@heis_cmd.command("standard-lattice")
@click.argument("n", type=click.IntRange(min=1))
@_command
def heis_standard(n: int) -> CommandResult:
    """The lattice generated by (1,0), (i,0) and (0,1/N)."""
    from chabauty.descriptors import h_to_json
    from chabauty.heisenberg import standard_lattice

    lat = standard_lattice(n)
    return CommandResult.ok(
        descriptor=h_to_json(lat), center_index=lat.n, central_step=lat.central_step, commutator_step=lat.covolume
    )


@heis_cmd.command("member")
@click.argument("subgroup")
@click.argument("element")
@_command
def heis_member(subgroup: str, element: str) -> CommandResult:
    """Is ELEMENT ([x, y, t]) in SUBGROUP?"""
    from chabauty.descriptors import element_to_json, load_json, load_subgroup, parse_element
    from chabauty.heisenberg import heis_contains

    x = parse_element(load_json(element))
    return CommandResult.ok(member=heis_contains(load_subgroup("H", subgroup), x), element=element_to_json(x))


@heis_cmd.command("commutator")
@click.argument("x")
@click.argument("y")
@_command
def heis_comm(x: str, y: str) -> CommandResult:
    """[X, Y] = (0, Im(conj z1·z2)); rational input stays exact."""
    from chabauty.ambient import heis_commutator
    from chabauty.descriptors import element_to_json, load_json, parse_element

    c = heis_commutator(parse_element(load_json(x)), parse_element(load_json(y)))
    return CommandResult.ok(commutator=element_to_json(c))


@heis_cmd.command("index")
@click.argument("lattice")
@_command
def heis_index(lattice: str) -> CommandResult:
    """Central index [Z(Λ) : [Λ, Λ]] with the two central steps."""
    from chabauty.descriptors import load_subgroup
    from chabauty.heisenberg import HeisLattice, center, center_index, commutator_subgroup

    lat = load_subgroup("H", lattice)
    if not isinstance(lat, HeisLattice):
        raise StratumError(f"central index needs a lattice, got stratum {lat.stratum!r}")
    return CommandResult.ok(
        center_index=center_index(lat),
        center_step=center(lat).sub.step,
        commutator_step=commutator_subgroup(lat).sub.step,
    )


@heis_cmd.command("aut")
@click.argument("automorphism")
@click.argument("target")
@_command
def heis_aut(automorphism: str, target: str) -> CommandResult:
    """Apply an automorphism to an element [x, y, t] or a lattice descriptor."""
    from chabauty.ambient import aut_apply
    from chabauty.descriptors import element_to_json, h_to_json, load_json, parse_automorphism, parse_element, parse_h
    from chabauty.heisenberg import HeisLattice, aut_apply_lattice

    alpha = parse_automorphism(load_json(automorphism))
    data = load_json(target)
    if isinstance(data, list):
        return CommandResult.ok(image=element_to_json(aut_apply(alpha, parse_element(data))), det=float(alpha.det))
    lat = parse_h(data)
    if not isinstance(lat, HeisLattice):
        raise StratumError(f"automorphisms act here on elements and lattices, got stratum {lat.stratum!r}")
    image = aut_apply_lattice(alpha, lat)
    return CommandResult.ok(image=h_to_json(image), center_index=image.n, det=float(alpha.det))


@heis_cmd.command("collapse")
@click.option("--n", "n", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--k", "k", type=click.IntRange(min=1), required=True)
@_command
def heis_collapse(n: int, k: int) -> CommandResult:
    """The k-th lattice of the sequence collapsing onto Z x Z in R x R, and its limit."""
    from chabauty.descriptors import c_to_json, h_to_json
    from chabauty.heisenberg import collapsing_lattice, collapsing_limit, project

    lat, lim = collapsing_lattice(n, k), collapsing_limit()
    return CommandResult.ok(
        lattice=h_to_json(lat),
        center_index=lat.n,
        projection=c_to_json(lat.projection),
        limit=h_to_json(lim),
        limit_projection=c_to_json(project(lim)),
    )


heis_cmd.add_command(heis_standard, name="make-lambda")
heis_cmd.add_command(heis_collapse, name="example11")


@heis_cmd.command("refine")
@click.option("--eps", type=float, required=True, help="Target Chabauty distance")
@click.option("--max-n", type=int, default=1000, show_default=True)
@click.argument("base")
@_command
def heis_refine(eps: float, max_n: int, base: str) -> CommandResult:
    """Smallest-n lattice over BASE within EPS of the pullback of BASE."""
    from chabauty.descriptors import h_to_json, load_subgroup
    from chabauty.euclid import Lattice
    from chabauty.heisenberg import central_refinement

    lat = load_subgroup("C", base)
    if not isinstance(lat, Lattice):
        raise StratumError(f"refinement needs a lattice, got stratum {lat.stratum!r}")
    ref = central_refinement(lat, eps, max_n, _metric_config())
    return CommandResult.ok(lattice=h_to_json(ref), n=ref.n)
