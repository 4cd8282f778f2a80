import pytest
from click.testing import CliRunner

from conftest import THREE_ROOM_LAYOUT, three_room_net
from transitmc.cli import (EXIT_HOLDS, EXIT_INCONCLUSIVE, EXIT_INPUT,
                           EXIT_VIOLATED, cli, main)
from transitmc.nets import dump_net, parse_net


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def net_file(tmp_path):
    path = tmp_path / "rooms.net"
    path.write_text(dump_net(three_room_net()))
    return str(path)


@pytest.fixture
def layout_file(tmp_path):
    path = tmp_path / "rooms.layout"
    path.write_text(THREE_ROOM_LAYOUT)
    return str(path)


def test_encode_writes_a_net(runner, layout_file, tmp_path):
    out = tmp_path / "encoded.net"
    result = runner.invoke(cli, ["encode", "--layout", layout_file,
                                 "--out", str(out)])
    assert result.exit_code == 0, result.output
    net = parse_net(out.read_text())
    assert len(net.places) == 7
    assert len(net.transitions) == 8


def test_encode_rejects_bad_layout(runner, tmp_path):
    bad = tmp_path / "bad.layout"
    bad.write_text("room outside\n")
    out = tmp_path / "out.net"
    result = runner.invoke(cli, ["encode", "--layout", str(bad),
                                 "--out", str(out)])
    assert result.exit_code == EXIT_INPUT
    assert "reserved" in result.output


def test_check_ltl_holds(runner, net_file):
    result = runner.invoke(cli, ["check", "--net", net_file,
                                 "--formula", "G hall"])
    assert result.exit_code == EXIT_HOLDS
    assert "verdict: holds" in result.output


def test_check_ltl_violated_prints_witness(runner, net_file):
    result = runner.invoke(cli, ["check", "--net", net_file,
                                 "--formula", "G !evening"])
    assert result.exit_code == EXIT_VIOLATED
    assert "verdict: violated" in result.output
    assert "witness stem:" in result.output
    assert "evening" in result.output


def test_check_flow_formula_with_dumps(runner, net_file, tmp_path):
    dumps = tmp_path / "dumps"
    result = runner.invoke(cli, [
        "check", "--net", net_file, "--formula", "A E F lab",
        "--dump-kripke", str(dumps), "--dump-nba", str(dumps),
        "--dump-mcnet", str(dumps), "--dump-ltl", str(dumps)])
    assert result.exit_code == EXIT_VIOLATED
    for name in ("kripke_1.txt", "nba_1.txt", "mcnet.txt", "ltl.txt"):
        content = (dumps / name).read_text()
        assert content.startswith("format-version 1\n"), name


def test_check_oracle_cross_check(runner, net_file):
    result = runner.invoke(cli, ["check", "--net", net_file,
                                 "--formula", "A E F lab",
                                 "--oracle-bound", "4"])
    assert result.exit_code == EXIT_VIOLATED
    assert "oracle: violated" in result.output


def test_check_state_cap_gives_inconclusive(runner, net_file):
    result = runner.invoke(cli, ["check", "--net", net_file,
                                 "--formula", "G hall",
                                 "--state-cap", "3"])
    assert result.exit_code == EXIT_INCONCLUSIVE
    assert "inconclusive" in result.output


def test_check_formula_file(runner, net_file, tmp_path):
    f = tmp_path / "spec.ltl"
    f.write_text("G hall\n")
    result = runner.invoke(cli, ["check", "--net", net_file,
                                 "--formula-file", str(f)])
    assert result.exit_code == EXIT_HOLDS


def test_check_needs_exactly_one_formula_source(runner, net_file):
    result = runner.invoke(cli, ["check", "--net", net_file])
    assert result.exit_code == EXIT_INPUT
    result = runner.invoke(cli, ["check", "--net", net_file,
                                 "--formula", "G hall",
                                 "--formula-file", net_file])
    assert result.exit_code == EXIT_INPUT


def test_check_rejects_unsafe_net(runner, tmp_path):
    bad = tmp_path / "unsafe.net"
    bad.write_text("place a init\nplace b init\ntransition t\n"
                   "arc a -> t\narc t -> b\n")
    result = runner.invoke(cli, ["check", "--net", str(bad),
                                 "--formula", "G a"])
    assert result.exit_code == EXIT_INPUT
    assert "1-safe" in result.output


def test_template_property(runner):
    result = runner.invoke(cli, ["template", "--name", "prohibition",
                                 "--args", "lab & kitchen"])
    assert result.exit_code == 0
    assert result.output.strip() == "A A G !(lab & kitchen)"


def test_template_assumption_needs_net(runner, net_file):
    result = runner.invoke(cli, ["template", "--name", "weak-fair",
                                 "--args", "evening"])
    assert result.exit_code == EXIT_INPUT
    result = runner.invoke(cli, ["template", "--name", "weak-fair",
                                 "--args", "evening", "--net", net_file])
    assert result.exit_code == 0
    assert "G F evening" in result.output


def test_template_unknown_name(runner):
    result = runner.invoke(cli, ["template", "--name", "wormhole"])
    assert result.exit_code == EXIT_INPUT


def test_oracle_command(runner, net_file):
    result = runner.invoke(cli, ["oracle", "--net", net_file,
                                 "--formula", "F c_hk", "--bound", "3"])
    assert result.exit_code == EXIT_VIOLATED
    assert "witness" in result.output
    result = runner.invoke(cli, ["oracle", "--net", net_file,
                                 "--formula", "G hall", "--bound", "3"])
    assert result.exit_code == EXIT_INCONCLUSIVE
    assert "no violation up to bound 3" in result.output


def test_main_maps_usage_errors_to_input_code(capsys):
    assert main(["check", "--no-such-option"]) == EXIT_INPUT
    assert main(["no-such-command"]) == EXIT_INPUT
    capsys.readouterr()


def test_main_propagates_command_exit_codes(net_file):
    with pytest.raises(SystemExit) as exc:
        main(["check", "--net", net_file, "--formula", "G hall"])
    assert exc.value.code == EXIT_HOLDS
