"""
Tests for the fusion-lab command line tool.

Copyright (C) 2020 Nicholas H.Tollervey
"""
import json
import pytest  # type: ignore
from click.testing import CliRunner
from fusionlab import __version__
from fusionlab.cli import main, parse_params, read_rule, LoadFailure
from fusionlab.engine import ExpansionTooLarge
from fusionlab.report import rule_hash
from fusionlab.ruledsl import load_catalog


BAD_SYNTAX = "dim 1\ntile a len 1\nlevel(n): a -> -> a\n"

SHRINKING = (
    "dim 1\ntile a len 1\ntile b len 1\n"
    "level(n): a -> a^(3 - n) b ; b -> a\n"
)


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args, **kwargs):
    return runner.invoke(main, list(args), **kwargs)


def report_of(result) -> dict:
    assert result.exit_code == 0, result.output
    return json.loads(result.stdout)


def test_version(runner):
    """
    --version names the tool and its version.
    """
    result = run(runner, "--version")
    assert result.exit_code == 0
    assert "fusion-lab" in result.output
    assert __version__ in result.output


def test_parse_params():
    """
    key=value pairs become a dictionary.
    """
    assert parse_params(None, None, ("a=1", " b = x ")) == {
        "a": "1",
        "b": "x",
    }


def test_read_rule_needs_one_source(tmp_path):
    """
    Exactly one of a file or a catalog entry.
    """
    with pytest.raises(LoadFailure):
        read_rule(None, None, {})
    with pytest.raises(LoadFailure):
        read_rule("rule.fuse", "chacon", {})
    with pytest.raises(LoadFailure):
        read_rule(str(tmp_path / "rule.fuse"), None, {"a": "1"})
    with pytest.raises(LoadFailure) as ex:
        read_rule(str(tmp_path / "missing.fuse"), None, {})
    assert "cannot read" in str(ex.value)


def test_read_rule_from_file(tmp_path):
    """
    A rule file is named after its stem.
    """
    path = tmp_path / "shrinking.fuse"
    path.write_text(SHRINKING)
    rule = read_rule(str(path), None, {})
    assert rule.name == "shrinking"


def test_catalog_listing(runner):
    """
    One line per entry, name first.
    """
    result = run(runner, "catalog")
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert len(lines) == 13
    assert lines[0].startswith("ap_example")


def test_catalog_source(runner):
    """
    Printing an entry fills in its parameters.
    """
    result = run(runner, "catalog", "periodic", "-p", "length=3")
    assert result.exit_code == 0
    assert "tile a len 3" in result.stdout
    result = run(runner, "catalog", "penrose")
    assert result.exit_code == 1
    assert "fusion-lab: error:" in result.output


def test_analyze_defaults(runner):
    """
    Without flags: validation, matrices, primitivity, unique ergodicity and
    the constant length profile.
    """
    report = report_of(run(runner, "analyze", "-c", "fibonacci_1d", "-H", "4"))
    assert report["command"] == "analyze"
    assert report["rule"] == "fibonacci_1d"
    assert report["ruleHash"] == rule_hash(load_catalog("fibonacci_1d"))
    assert report["parameters"] == {
        "horizon": 4,
        "catalog": "fibonacci_1d",
        "params": {},
    }
    results = report["results"]
    assert set(results) == {
        "validate",
        "matrices",
        "primitivity",
        "ergodicity",
        "constantLength",
    }
    assert results["validate"] == {"levels": 4, "violations": []}
    assert results["matrices"][0]["entries"] == [[1, 1], [1, 0]]
    assert results["primitivity"]["status"] == "Primitive"
    assert results["primitivity"]["witnesses"]["0"] == 2
    assert results["ergodicity"]["status"] == "UniquelyErgodic"
    assert results["constantLength"]["failedLevel"] == 1


def test_analyze_selected(runner):
    """
    Only the chosen analyses run.
    """
    report = report_of(
        run(
            runner,
            "analyze",
            "-c",
            "fibonacci_1d",
            "-H",
            "4",
            "--adjacency",
            "2",
            "--perron",
            "--kappa",
            "a",
        )
    )
    results = report["results"]
    assert set(results) == {"adjacency", "perron", "frequencies"}
    assert results["adjacency"] == {"1": 3, "2": 3}
    assert results["perron"]["level"] == 4
    assert results["perron"]["eigenvalue"] == pytest.approx(1.618034)
    assert results["frequencies"]["vector"]["values"] == ["5/8", "3/8"]


def test_analyze_pure_point(runner):
    """
    Period doubling has pure point spectrum.
    """
    report = report_of(
        run(runner, "analyze", "-c", "period_doubling", "--pure-point")
    )
    assert report["results"]["purePoint"]["status"] == "PurePoint"


def test_analyze_needs_a_rule(runner, tmp_path):
    """
    No rule, or two rules, is a usage error with exit code 1.
    """
    result = run(runner, "analyze")
    assert result.exit_code == 1
    assert "fusion-lab: error:" in result.output
    path = tmp_path / "rule.fuse"
    path.write_text(SHRINKING)
    result = run(runner, "analyze", str(path), "-c", "chacon")
    assert result.exit_code == 1


def test_analyze_syntax_error(runner, tmp_path):
    """
    Parse errors exit with 1 and name the file and position.
    """
    path = tmp_path / "bad.fuse"
    path.write_text(BAD_SYNTAX)
    result = run(runner, "analyze", str(path))
    assert result.exit_code == 1
    assert "bad.fuse" in result.output
    assert "Line 3" in result.output


def test_analyze_validation_failure(runner, tmp_path):
    """
    A rule that fails validation exits with 2.
    """
    path = tmp_path / "shrinking.fuse"
    path.write_text(SHRINKING)
    result = run(runner, "analyze", str(path), "-H", "5")
    assert result.exit_code == 2
    assert "level 3" in result.output
    assert "(1 problem(s))" in result.output


def test_bad_horizon_from_environment(runner):
    """
    A broken FUSIONLAB_HORIZON is reported like a load error.
    """
    result = run(
        runner,
        "analyze",
        "-c",
        "fibonacci_1d",
        env={"FUSIONLAB_HORIZON": "zero"},
    )
    assert result.exit_code == 1
    assert "FUSIONLAB_HORIZON" in result.output


def test_bad_param(runner):
    """
    --param needs key=value.
    """
    result = run(runner, "analyze", "-c", "periodic", "-p", "oops")
    assert result.exit_code == 2


def test_expand_json(runner):
    """
    Tiles are listed with their label and exact position.
    """
    report = report_of(
        run(runner, "expand", "-c", "fibonacci_1d", "-n", "3", "-j", "a")
    )
    assert report["command"] == "expand"
    assert report["parameters"]["level"] == 3
    assert report["parameters"]["supertile"] == "a"
    results = report["results"]
    assert results["count"] == 5
    assert results["dimension"] == 1
    assert results["sizes"] == {"a": [1], "b": [1]}
    assert results["tiles"] == [
        ["a", 0],
        ["b", 1],
        ["a", 2],
        ["a", 3],
        ["b", 4],
    ]


def test_expand_unknown_supertile(runner):
    """
    An unknown supertile is a usage error.
    """
    result = run(runner, "expand", "-c", "fibonacci_1d", "-n", "3", "-j", "z")
    assert result.exit_code == 2
    assert "no supertile" in result.output


def test_expand_over_the_cap(runner):
    """
    Refused expansions exit with 3 and give the tile count.
    """
    result = run(
        runner,
        "expand",
        "-c",
        "fibonacci_1d",
        "-n",
        "10",
        env={"FUSIONLAB_CAP": "10"},
    )
    assert result.exit_code == 3
    assert "144" in result.output


def test_render_to_file(runner, tmp_path):
    """
    render writes SVG to the --out file.
    """
    out = tmp_path / "patch.svg"
    result = run(
        runner, "render", "-c", "fibonacci_dpv", "-n", "2", "-o", str(out)
    )
    assert result.exit_code == 0
    assert out.read_text(encoding="utf-8").startswith("<svg")


def test_spectrum(runner):
    """
    alpha = 1 is an eigenvalue of the Fibonacci rule with unit tiles.
    """
    report = report_of(
        run(runner, "spectrum", "-c", "fibonacci_1d", "-a", "1", "-H", "4")
    )
    assert report["parameters"]["alpha"] == [1]
    assert report["results"]["eigenvalue"]["status"] == "Pass"


def test_spectrum_bad_alpha(runner):
    """
    Numbers outside Q(phi) are refused before any analysis.
    """
    result = run(runner, "spectrum", "-c", "fibonacci_1d", "-a", "pi")
    assert result.exit_code == 1


def test_entropy(runner):
    """
    The harvest level is chosen from maxn.
    """
    report = report_of(
        run(runner, "entropy", "-c", "fibonacci_1d", "--maxn", "3")
    )
    assert report["parameters"]["harvest"] == 6
    results = report["results"]
    assert results["complexity"]["counts"] == {"1": 2, "2": 3, "3": 4}
    assert results["zeroEntropyBound"]["status"] == "ZeroEntropyBoundHolds"


def test_cohomology(runner):
    """
    The unimodular example gives Z^2.
    """
    report = report_of(
        run(runner, "cohomology", "-c", "ap_example", "-H", "4")
    )
    cohomology = report["results"]["cohomology"]
    assert cohomology["description"] == "ℤ² (stable)"
    assert cohomology["borderForced"] is True


def test_cohomology_two_dimensional(runner):
    """
    2-D rules are refused with exit code 2.
    """
    result = run(runner, "cohomology", "-c", "fibonacci_dpv")
    assert result.exit_code == 2


def test_refused_expansion_inside_an_analysis(runner, mocker):
    """
    An analysis that runs into the cap part way through exits with 3.
    """
    mocker.patch(
        "fusionlab.cli.h1_direct_limit",
        side_effect=ExpansionTooLarge(5000, 10),
    )
    result = run(runner, "cohomology", "-c", "ap_example")
    assert result.exit_code == 3
    assert "5000" in result.output


def test_bad_cap_during_analysis(runner):
    """
    A malformed cap met part way through a command is still a
    configuration error.
    """
    result = run(
        runner,
        "expand",
        "-c",
        "fibonacci_1d",
        "-n",
        "3",
        env={"FUSIONLAB_CAP": "lots"},
    )
    assert result.exit_code == 1
    assert "FUSIONLAB_CAP" in result.output
