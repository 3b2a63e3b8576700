"""
Test suite for the command line.

Tests configuration building, argument parsing and the exit status of every
subcommand.
"""

import json

import pytest

from src.cli import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    RunConfigBuilder,
    build_parser,
    main,
)
from src.config import Config
from src.errors import InputError

FIRST_PROFILE = "1: a>b>c>d\n2: a>b>c>d\n3: a>b>c>d\n4: a>b>d>c\n"
SECOND_PROFILE = "1: a>b>c>d\n2: a>b>c>d\n3: b>a>d>c\n4: b>a>d>c\n"
PS_SECOND = "a b c d\n1: 1/2 0 1/2 0\n2: 1/2 0 1/2 0\n3: 0 1/2 0 1/2\n4: 0 1/2 0 1/2\n"
RSD_SECOND = (
    "a b c d\n"
    "1: 5/12 1/12 5/12 1/12\n"
    "2: 5/12 1/12 5/12 1/12\n"
    "3: 1/12 5/12 1/12 5/12\n"
    "4: 1/12 5/12 1/12 5/12\n"
)


@pytest.fixture
def files(tmp_path):
    """Profile and matrix files of the two theorem profiles."""
    paths = {}
    for name, text in {
        "first.txt": FIRST_PROFILE,
        "second.txt": SECOND_PROFILE,
        "ps.txt": PS_SECOND,
        "rsd.txt": RSD_SECOND,
    }.items():
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        paths[name.split(".")[0]] = str(path)
    return paths


class TestRunConfigBuilder:
    """Test cases for RunConfigBuilder validation."""

    def test_check_config(self):
        """Test a complete check configuration."""
        config = (
            RunConfigBuilder("check")
            .with_mechanism("ps")
            .with_axioms(["symmetry"])
            .with_exhaustive(3)
            .build()
        )

        assert config.axioms == ("symmetry",)
        assert config.exhaustive == 3
        assert config.seed == Config.DEFAULT_SEED

    def test_check_needs_one_domain(self):
        """Test that check takes exactly one domain."""
        builder = RunConfigBuilder("check").with_mechanism("ps").with_axioms(["symmetry"])
        with pytest.raises(InputError):
            builder.build()
        with pytest.raises(InputError):
            builder.with_exhaustive(3).with_sample(10, 4, 1).build()

    def test_unknown_axiom(self):
        """Test that axiom names are validated."""
        builder = (
            RunConfigBuilder("check")
            .with_mechanism("ps")
            .with_axioms(["strategyproofness"])
            .with_exhaustive(3)
        )
        with pytest.raises(InputError):
            builder.build()

    @pytest.mark.parametrize(
        "builder",
        [
            RunConfigBuilder("replay"),
            RunConfigBuilder("replay").with_theorem(1).with_script("proof.json"),
            RunConfigBuilder("replay").with_theorem(3),
            RunConfigBuilder("replay").with_theorem(1).with_padding(0),
            RunConfigBuilder("replay").with_theorem(1).with_padding(-1),
            RunConfigBuilder("search"),
            RunConfigBuilder("bvn"),
            RunConfigBuilder("eval").with_mechanism("ps"),
            RunConfigBuilder("prove"),
            RunConfigBuilder("bvn").with_matrix("x.txt").with_output(False, "report.xml"),
        ],
    )
    def test_invalid_configurations(self, builder):
        """Test missing, conflicting and unknown options."""
        with pytest.raises(InputError):
            builder.build()

    def test_sample_seed(self):
        """Test that an explicit seed overrides the configured default."""
        config = (
            RunConfigBuilder("check")
            .with_mechanism("rsd")
            .with_axioms(["local-sp"])
            .with_sample(50, 4, 7)
            .build()
        )
        assert (config.sample, config.sample_n, config.seed) == (50, 4, 7)


class TestParser:
    """Test cases for build_parser."""

    def test_repeatable_axioms(self):
        """Test that --axiom collects every occurrence."""
        args = build_parser().parse_args(
            ["check", "--mechanism", "ps", "--axiom", "symmetry", "--axiom", "anonymity",
             "--exhaustive", "3", "--global"]
        )

        assert args.axiom == ["symmetry", "anonymity"]
        assert args.global_mode
        assert RunConfigBuilder.from_namespace(args).build().global_mode

    def test_search_families(self):
        """Test that --drop takes search families."""
        args = build_parser().parse_args(
            ["search", "--theorem", "1", "--drop", "lower-invariance"]
        )
        config = RunConfigBuilder.from_namespace(args).build()
        assert config.drop == ("lower-invariance",)


class TestMain:
    """Test cases for main and the exit status of each subcommand."""

    def test_eval(self, files, capsys):
        """Test PS at the profile where agent 4 swaps c and d."""
        status = main(["eval", "--mechanism", "ps", "--profile", files["first"]])
        out = capsys.readouterr().out

        assert status == EXIT_OK
        assert "1/6" in out
        assert out.splitlines()[-1].split() == ["4:", "1/4", "1/4", "0", "1/2"]

    def test_check_holds(self, capsys):
        """Test a holding axiom over every three-agent profile."""
        status = main(
            ["check", "--mechanism", "ps", "--axiom", "symmetry", "--exhaustive", "3"]
        )

        assert status == EXIT_OK
        assert "symmetry: HOLDS (216 profiles" in capsys.readouterr().out

    def test_check_violated(self, files, capsys):
        """Test that RSD's efficiency failure exits with 1."""
        status = main(
            ["check", "--mechanism", "rsd", "--axiom", "ordinal-efficiency",
             "--profiles", files["second"]]
        )

        assert status == EXIT_FAILED
        assert "ordinal-efficiency: VIOLATED" in capsys.readouterr().out

    def test_efficient(self, files, capsys):
        """Test the PS matrix at the second theorem profile."""
        status = main(["efficient", "--profile", files["second"], "--matrix", files["ps"]])

        assert status == EXIT_OK
        assert capsys.readouterr().out.startswith("ORDINALLY EFFICIENT")

    def test_dominated(self, files, capsys):
        """Test the RSD matrix, which has a trading cycle."""
        status = main(["efficient", "--profile", files["second"], "--matrix", files["rsd"]])
        out = capsys.readouterr().out

        assert status == EXIT_FAILED
        assert out.startswith("ORDINALLY DOMINATED: trading cycle")
        assert "strict dominator:" in out

    def test_bvn(self, files, capsys):
        """Test decomposing a matrix into two permutations."""
        status = main(["bvn", "--matrix", files["ps"], "--json"])
        report = json.loads(capsys.readouterr().out)

        assert status == EXIT_OK
        assert len(report["components"]) == 2
        assert report["total_weight"] == "1"

    @pytest.mark.integration
    def test_replay(self, capsys):
        """Test the second proof end to end."""
        status = main(["replay", "--theorem", "2"])
        out = capsys.readouterr().out

        assert status == EXIT_OK
        assert "CONTRADICTION: row 4 at profile VII: known mass 5/4 exceeds 1" in out
        assert out.rstrip().endswith("REPLAY SUCCEEDED")

    @pytest.mark.integration
    def test_replay_json_is_stable(self, capsys):
        """Test that JSON output carries no timing field."""
        main(["replay", "--theorem", "1", "--json"])
        first = capsys.readouterr().out
        main(["replay", "--theorem", "1", "--json"])
        second = capsys.readouterr().out
        report = json.loads(first)

        assert first == second
        assert "wall_time" not in report
        assert report["success"] is True

    @pytest.mark.integration
    def test_replay_exported_script(self, tmp_path, capsys):
        """Test that an exported script replays from its file."""
        path = tmp_path / "scripts" / "second.json"
        assert main(["replay", "--theorem", "2", "--export-script", str(path)]) == EXIT_OK
        capsys.readouterr()

        assert main(["replay", "--script", str(path)]) == EXIT_OK
        assert "REPLAY SUCCEEDED" in capsys.readouterr().out

    def test_search_inconclusive(self, capsys):
        """Test that an exhausted branch budget exits with 1."""
        status = main(["search", "--theorem", "1", "--branch-limit", "0", "--threads", "1"])

        assert status == EXIT_FAILED
        assert "INCONCLUSIVE after 1 branch(es): branch limit 0 reached" in capsys.readouterr().out

    def test_export(self, tmp_path, capsys):
        """Test that --export writes the tabular records."""
        target = tmp_path / "reports" / "check.csv"
        status = main(
            ["check", "--mechanism", "ps", "--axiom", "anonymity", "--exhaustive", "2",
             "--export", str(target)]
        )

        assert status == EXIT_OK
        assert target.read_text(encoding="utf-8").splitlines()[0].startswith("axiom,")

    def test_missing_file(self, tmp_path, capsys):
        """Test that unreadable input exits with 2."""
        status = main(["bvn", "--matrix", str(tmp_path / "missing.txt")])

        assert status == EXIT_USAGE
        assert "does not exist" in capsys.readouterr().err

    @pytest.mark.parametrize("pad", ["0", "-2"])
    def test_replay_rejects_non_positive_padding(self, pad, capsys):
        """Test that --pad must add at least one agent."""
        status = main(["replay", "--theorem", "1", "--pad", pad])

        assert status == EXIT_USAGE
        assert "--pad must be a positive number of agents" in capsys.readouterr().err

    def test_usage_error(self, capsys):
        """Test that argparse failures exit with 2."""
        assert main(["prove"]) == EXIT_USAGE

    def test_version(self, capsys):
        """Test --version."""
        assert main(["--version"]) == EXIT_OK
        assert "0.1.0" in capsys.readouterr().out
