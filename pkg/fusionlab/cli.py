"""
The fusion-lab command line tool.

Each command loads a rule (from a file or the built-in catalog), runs one or
more analyses and writes a canonical JSON report (or an SVG drawing) to
stdout or a file. Failures print a single diagnostic line on stderr and exit
with 1 (the rule could not be loaded), 2 (the rule or an analysis rejected
its input) or 3 (an expansion was refused for being too large).

Copyright (C) 2020 Nicholas H.Tollervey (ntoll@ntoll.org).

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU Affero General Public License as
published by the Free Software Foundation, either version 3 of the
License, or (at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>
"""
import click
import structlog  # type: ignore
import fusionlab.log  # noqa
from contextlib import contextmanager
from functools import wraps
from pathlib import Path
from typing import (
    Any,
    Callable,
    Dict,
    Iterator,
    NoReturn,
    Optional,
    Tuple,
)
from fusionlab import __version__, config, constants
from fusionlab.cohomology1d import h1_direct_limit
from fusionlab.core import FusionLabError, FusionRule, validate
from fusionlab.engine import (
    ExpansionTooLarge,
    adjacency_complexity,
    expand,
    perron_eigenvalue,
    primitivity,
    transition_step,
    van_hove_diagnostic,
)
from fusionlab.entropy import (
    complexity,
    entropy_estimate,
    harvest_level,
    zero_entropy_bound,
)
from fusionlab.field import as_json
from fusionlab.measures import (
    ergodic_vertices,
    kappa_frequencies,
    unique_ergodicity,
)
from fusionlab.render import render_svg
from fusionlab.report import dumps, make_report
from fusionlab.ruledsl import (
    catalog_names,
    catalog_source,
    load_catalog,
    parse_alpha,
    parse_rule,
)
from fusionlab.spectral import (
    constant_length_profile,
    eigenvalue_test,
    pure_point_verdict,
)


logger = structlog.get_logger()


class LoadFailure(FusionLabError):
    """
    The rule named on the command line could not be read.
    """

    pass


def fail(code: int, message: str) -> NoReturn:
    """
    Print one diagnostic line on stderr and leave with the given exit code.
    """
    logger.error("Command failed.", code=code, message=message)
    click.echo(f"fusion-lab: error: {message}", err=True)
    raise SystemExit(code)


@contextmanager
def loading() -> Iterator[None]:
    """
    Anything that goes wrong while the rule is loaded exits with 1.
    """
    try:
        yield
    except FusionLabError as ex:
        fail(constants.EXIT_PARSE, str(ex))


@contextmanager
def analysing() -> Iterator[None]:
    """
    Refused expansions exit with 3, bad configuration with 1 and any other
    domain error with 2.
    """
    try:
        yield
    except ExpansionTooLarge as ex:
        fail(constants.EXIT_CAP, str(ex))
    except config.ConfigError as ex:
        fail(constants.EXIT_PARSE, str(ex))
    except FusionLabError as ex:
        fail(constants.EXIT_VALIDATION, str(ex))


def parse_params(ctx, param, values: Tuple[str, ...]) -> Dict[str, str]:
    result = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise click.BadParameter(f"expected key=value, got {item!r}.")
        result[key.strip()] = value.strip()
    return result


def read_rule(
    rule_file: Optional[str], catalog: Optional[str], params: Dict[str, str]
) -> FusionRule:
    """
    Read the rule from exactly one of a rule file or a catalog entry.
    """
    if (rule_file is None) == (catalog is None):
        raise LoadFailure("give either a rule file or --catalog NAME.")
    if catalog is not None:
        return load_catalog(catalog, params)
    if params:
        raise LoadFailure("--param only applies to catalog entries.")
    path = Path(str(rule_file))
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as ex:
        raise LoadFailure(f"cannot read {path}: {ex.strerror}.")
    try:
        return parse_rule(source, path.stem)
    except FusionLabError as ex:
        raise LoadFailure(f"{path}: {ex}")


def load_rule(
    rule_file: Optional[str], catalog: Optional[str], params: Dict[str, str]
) -> FusionRule:
    try:
        return read_rule(rule_file, catalog, params)
    except FusionLabError as ex:
        fail(constants.EXIT_PARSE, str(ex))


def resolve_horizon(horizon: Optional[int]) -> int:
    try:
        return config.horizon() if horizon is None else horizon
    except config.ConfigError as ex:
        fail(constants.EXIT_PARSE, str(ex))


def rule_options(func: Callable) -> Callable:
    """
    The rule file argument and the --catalog, --param and --horizon options
    shared by every analysis command.
    """

    @click.argument(
        "rule_file", required=False, type=click.Path(dir_okay=False)
    )
    @click.option("--catalog", "-c", help="Use a built-in catalog rule.")
    @click.option(
        "--param",
        "-p",
        "params",
        multiple=True,
        callback=parse_params,
        help="Catalog parameter as key=value (repeatable).",
    )
    @click.option(
        "--horizon",
        "-H",
        type=click.IntRange(min=1),
        default=None,
        help="Number of levels to look at (default: FUSIONLAB_HORIZON).",
    )
    @wraps(func)
    def wrapper(rule_file, catalog, params, horizon, **kwargs):
        rule = load_rule(rule_file, catalog, params)
        parameters: Dict[str, Any] = {"horizon": resolve_horizon(horizon)}
        if catalog is not None:
            parameters["catalog"] = catalog
            parameters["params"] = params
        else:
            parameters["file"] = rule_file
        return func(rule, parameters, **kwargs)

    return wrapper


def emit(text: str, out: Optional[str]) -> None:
    with click.open_file(out or "-", "w", encoding="utf-8") as handle:
        handle.write(text)
        if not text.endswith("\n"):
            handle.write("\n")


def emit_report(command: str, parameters, results, rule, out=None) -> None:
    emit(dumps(make_report(command, parameters, results, rule)), out)


@click.group()
@click.version_option(__version__, prog_name="fusion-lab")
def main() -> None:
    """
    Exact analysis of fusion tiling rules.
    """


def _matrices(rule: FusionRule, last: int):
    return [transition_step(rule, n) for n in range(1, last + 1)]


def _primitivity(rule: FusionRule, horizon: int) -> Dict[str, Any]:
    report = primitivity(rule, horizon)
    return {
        "status": report.status,
        "witnesses": report.witnesses,
        "certificate": report.certificate,
    }


def _kappa(text: str):
    """
    "a" is the constant choice a; "a,b,c" picks a label per level.
    """
    labels = [label.strip() for label in text.split(",")]
    return labels[0] if len(labels) == 1 else labels


@main.command()
@rule_options
@click.option("--validate", "run_validate", is_flag=True, help="Validate.")
@click.option("--matrices", is_flag=True, help="Transition matrices.")
@click.option("--primitivity", "run_primitivity", is_flag=True)
@click.option("--ergodicity", is_flag=True, help="Unique ergodicity.")
@click.option("--constant-length", is_flag=True)
@click.option("--pure-point", is_flag=True, help="Pure point spectrum.")
@click.option("--vertices", is_flag=True, help="Ergodic measure vertices.")
@click.option(
    "--kappa", help="Supertile frequencies along a kappa sequence: a or a,b,c"
)
@click.option(
    "--adjacency",
    type=click.IntRange(min=1),
    help="Adjacency complexity for levels 1..N.",
)
@click.option("--perron", is_flag=True, help="Dominant eigenvalue.")
@click.option(
    "--van-hove",
    type=click.IntRange(min=0),
    help="Boundary to volume ratios for radius R at the horizon.",
)
def analyze(
    rule,
    parameters,
    run_validate,
    matrices,
    run_primitivity,
    ergodicity,
    constant_length,
    pure_point,
    vertices,
    kappa,
    adjacency,
    perron,
    van_hove,
):
    """
    Validate a rule and run the selected analyses. With no analysis flags:
    validation, transition matrices, primitivity, unique ergodicity and the
    constant length profile.
    """
    horizon = parameters["horizon"]
    chosen = (
        run_validate,
        matrices,
        run_primitivity,
        ergodicity,
        constant_length,
        pure_point,
        vertices,
        kappa,
        adjacency,
        perron,
        van_hove is not None,
    )
    if not any(chosen):
        run_validate = matrices = run_primitivity = True
        ergodicity = constant_length = True
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    results: Dict[str, Any] = {}
    with analysing():
        if run_validate:
            violations = validate(rule, horizon)
            if violations:
                first = violations[0]
                fail(
                    constants.EXIT_VALIDATION,
                    f"level {first.level} {first.supertile}: {first.message}"
                    f" ({len(violations)} problem(s)).",
                )
            results["validate"] = {"levels": last, "violations": []}
        if matrices:
            results["matrices"] = _matrices(rule, last)
        if run_primitivity:
            results["primitivity"] = _primitivity(rule, horizon)
        if ergodicity:
            results["ergodicity"] = unique_ergodicity(rule, horizon)
        if constant_length:
            results["constantLength"] = constant_length_profile(rule, horizon)
        if pure_point:
            results["purePoint"] = pure_point_verdict(rule, horizon)
        if vertices:
            report = ergodic_vertices(rule, 0, last)
            results["vertices"] = {
                "report": report,
                "persisting": report.persisting,
            }
        if kappa:
            vector = kappa_frequencies(rule, _kappa(kappa), 0, last)
            results["frequencies"] = {
                "vector": vector,
                "floats": vector.as_floats(),
            }
        if adjacency:
            results["adjacency"] = {
                n: adjacency_complexity(rule, n)
                for n in range(1, adjacency + 1)
            }
        if perron:
            step = transition_step(rule, last)
            results["perron"] = {
                "level": last,
                "eigenvalue": perron_eigenvalue(step),
            }
        if van_hove is not None:
            results["vanHove"] = {
                "level": last,
                "radius": van_hove,
                "ratios": van_hove_diagnostic(rule, last, van_hove),
            }
    emit_report("analyze", parameters, results, rule)


def _supertile(rule: FusionRule, level: int, name: str) -> int:
    labels = rule.labels(level)
    if name in labels:
        return labels.index(name)
    if name.isdigit() and int(name) < len(labels):
        return int(name)
    raise click.BadParameter(
        f"level {level} has no supertile {name!r} "
        f"(choose from {', '.join(labels)}).",
        param_hint="--supertile",
    )


def patch_options(func: Callable) -> Callable:
    for option in reversed(
        [
            click.option(
                "--level", "-n", type=click.IntRange(min=0), required=True
            ),
            click.option(
                "--supertile",
                "-j",
                default="0",
                help="Supertile label or index (default: the first).",
            ),
            click.option(
                "--to",
                "-t",
                "to",
                type=click.IntRange(min=0),
                default=0,
                help="Expand down to this level (default: prototiles).",
            ),
            click.option("--out", "-o", type=click.Path(dir_okay=False)),
            click.option(
                "--scale",
                type=click.IntRange(min=1),
                default=constants.DEFAULT_SCALE,
                help="SVG units per unit of length.",
            ),
        ]
    ):
        func = option(func)
    return func


def write_patch(rule, parameters, level, supertile, to, out, scale, fmt):
    with analysing():
        j = _supertile(rule, level, supertile)
        patch = expand(rule, level, j, to)
        parameters.update(
            {"level": level, "supertile": rule.labels(level)[j], "to": to}
        )
        if fmt == "svg":
            emit(render_svg(patch, rule, scale), out)
            return
        labels = rule.labels(to)
        results = {
            "dimension": patch.dimension,
            "count": len(patch),
            "sizes": {
                label: [as_json(side) for side in patch.sizes[k]]
                for k, label in enumerate(labels)
            },
            "tiles": [
                [labels[kind]] + [as_json(p) for p in position]
                for kind, position in patch.tiles
            ],
        }
    emit_report("expand", parameters, results, rule, out)


@main.command(name="expand")
@rule_options
@patch_options
@click.option(
    "--format", "fmt", type=click.Choice(["json", "svg"]), default="json"
)
def expand_command(rule, parameters, level, supertile, to, out, scale, fmt):
    """
    Expand a supertile into its tiles.
    """
    write_patch(rule, parameters, level, supertile, to, out, scale, fmt)


@main.command()
@rule_options
@patch_options
@click.option(
    "--format", "fmt", type=click.Choice(["svg", "json"]), default="svg"
)
def render(rule, parameters, level, supertile, to, out, scale, fmt):
    """
    Draw a supertile as SVG.
    """
    write_patch(rule, parameters, level, supertile, to, out, scale, fmt)


@main.command()
@rule_options
@click.option(
    "--alpha",
    "-a",
    required=True,
    help='Candidate eigenvalue such as "(1/3, 0)" or "(2*phi - 1)/5".',
)
def spectrum(rule, parameters, alpha):
    """
    Test whether alpha is a topological eigenvalue.
    """
    with loading():
        vector = parse_alpha(alpha)
    parameters["alpha"] = [as_json(a) for a in vector]
    with analysing():
        verdict = eigenvalue_test(rule, vector, parameters["horizon"])
    emit_report("spectrum", parameters, {"eigenvalue": verdict}, rule)


@main.command()
@rule_options
@click.option(
    "--maxn",
    type=click.IntRange(min=1),
    default=6,
    help="Largest window side counted.",
)
@click.option(
    "--harvest",
    type=click.IntRange(min=0),
    help="Level whose supertiles are scanned (default: chosen from maxn).",
)
def entropy(rule, parameters, maxn, harvest):
    """
    Window complexity, the entropy estimate and the zero entropy bound.
    """
    horizon = parameters["horizon"]
    with analysing():
        if harvest is None:
            harvest = harvest_level(rule, maxn, horizon)
        parameters.update({"maxn": maxn, "harvest": harvest})
        profile = complexity(rule, maxn, harvest)
        results = {
            "complexity": profile,
            "estimate": entropy_estimate(profile),
            "zeroEntropyBound": zero_entropy_bound(rule, horizon),
        }
    emit_report("entropy", parameters, results, rule)


@main.command()
@rule_options
def cohomology(rule, parameters):
    """
    The first cohomology direct limit of a 1-D rule.
    """
    with analysing():
        report = h1_direct_limit(rule, parameters["horizon"])
    emit_report("cohomology", parameters, {"cohomology": report}, rule)


@main.command()
@click.argument("name", required=False)
@click.option(
    "--param", "-p", "params", multiple=True, callback=parse_params
)
def catalog(name, params):
    """
    List the catalog, or print the rule file of one entry.
    """
    if name is None:
        for entry, description in catalog_names():
            click.echo(f"{entry:<22}{description}")
        return
    with loading():
        source = catalog_source(name, params)
    click.echo(source, nl=False)
