import io

import pytest

from fuzzymetric.cli import cli_main
from fuzzymetric.instances import read_instances
from fuzzymetric.schemas import ReportRecord


def reports(out: str) -> list[ReportRecord]:
    return [ReportRecord.model_validate_json(line) for line in out.splitlines() if line.strip()]


@pytest.fixture
def generate(tmp_path):
    """Run `fuzzymetric gen` into a file and return its path."""
    def _generate(*args: str) -> str:
        path = tmp_path / f"{args[0]}.jsonl"
        assert cli_main(["gen", *args, "-o", str(path)]) == 0
        return str(path)
    return _generate

# ========== GEN TESTS ==========

def test_gen_writes_one_record_to_stdout(capsys):
    assert cli_main(["gen", "escaping", "--n", "4", "--spacing", "5"]) == 0
    out = capsys.readouterr().out
    (seq,) = read_instances(out)
    assert len(seq.window) == 4
    assert '"generator":"escaping"' in out


def test_gen_random_family_is_seeded(generate):
    first = open(generate("random-family", "--members", "3", "--seed", "4")).read()
    second = open(generate("random-family", "--members", "3", "--seed", "4")).read()
    assert first == second
    assert '"seed":4' in first


def test_gen_rejects_bad_parameters(capsys):
    assert cli_main(["gen", "escaping", "--n", "1"]) == 2
    assert "error:" in capsys.readouterr().err


def test_gen_random_family_shape_flags(generate):
    path = generate("random-family", "--members", "4", "--levels", "2,2", "--cut-size", "1,1", "--box", "5,6")
    (family,) = read_instances(open(path).read())
    assert all(len(u.levels) == 2 for u in family.members)
    assert all(len(c.points) == 1 for u in family.members for c in u.cuts)
    assert all(5.0 <= c <= 6.0 for u in family.members for p in u.cuts[0].points for c in p)
    assert '"levels":[2,2]' in open(path).read()


@pytest.mark.parametrize(
    "args",
    [
        ["random-family", "--seed", "-1"],
        ["random-family", "--levels", "1"],
        ["random-family", "--box", "a,b"],
        ["random-family", "--levels", "3,1"],
    ],
)
def test_gen_invalid_arguments_exit_two(args, capsys):
    """Test that bad generator arguments are usage errors, not tracebacks."""
    assert cli_main(["gen", *args]) == 2
    assert "error" in capsys.readouterr().err

# ========== DIST TESTS ==========

def test_dist_on_escaping_points(generate, capsys):
    """Every pair of escaping members is 1 apart."""
    path = generate("escaping", "--n", "4", "--spacing", "5")
    assert cli_main(["dist", path]) == 0
    (report,) = reports(capsys.readouterr().out)
    matrix = report.data["matrix"]
    assert report.command == "dist"
    assert all(matrix[i][j] == pytest.approx(1.0) for i in range(4) for j in range(4) if i != j)
    assert all(matrix[i][i] == 0.0 for i in range(4))


def test_dist_reports_both_endograph_metrics(generate, capsys):
    """Test that the sum and max matrices come together, with the sandwich between them."""
    path = generate("nested-intervals", "--n", "3")
    assert cli_main(["dist", path]) == 0
    (report,) = reports(capsys.readouterr().out)
    hend, hend_max = report.data["hend"], report.data["hend_max"]
    assert report.data["matrix"] == hend
    for i in range(3):
        for j in range(3):
            assert hend_max[i][j] <= hend[i][j] + 1e-12
            assert hend[i][j] <= 2 * hend_max[i][j] + 1e-12
    assert hend[0][1] == pytest.approx(0.5)


def test_dist_reads_stdin(generate, capsys, monkeypatch):
    text = open(generate("oscillating", "--n", "2")).read()
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    assert cli_main(["dist", "--metric", "hend-max"]) == 0
    (report,) = reports(capsys.readouterr().out)
    assert report.data["matrix"][0][1] == pytest.approx(1.0)


def test_hausdorff_needs_set_records(generate, capsys):
    path = generate("oscillating", "--n", "2")
    assert cli_main(["dist", path, "--metric", "hausdorff"]) == 2
    assert "set records" in capsys.readouterr().err


def test_report_file_output(generate, tmp_path):
    path = generate("escaping", "--n", "3", "--spacing", "5")
    out = tmp_path / "report.jsonl"
    assert cli_main(["dist", path, "-o", str(out)]) == 0
    (report,) = reports(out.read_text())
    assert report.passed

# ========== GAMMA CHECK TESTS ==========

def test_gamma_check_finds_oscillation(generate, capsys):
    path = generate("oscillating", "--n", "10")
    assert cli_main(["gamma-check", path, "--eps", "0.1"]) == 1
    (report,) = reports(capsys.readouterr().out)
    assert report.data["verdict"] == "oscillation"
    assert report.data["witnesses"][0] == [3.0, 1.0]


def test_gamma_check_tail_out_of_range(generate, capsys):
    path = generate("oscillating", "--n", "4")
    assert cli_main(["gamma-check", path, "--tail", "9"]) == 2
    assert "--tail 9" in capsys.readouterr().err

# ========== AUDIT TESTS ==========

def test_tb_audit_on_a_random_family(generate, capsys):
    path = generate("random-family", "--members", "5", "--seed", "1")
    assert cli_main(["tb-audit", path]) == 0
    (report,) = reports(capsys.readouterr().out)
    assert report.data["forward_holds"] and report.data["backward_holds"]


def test_tb_audit_needs_a_family(generate, capsys):
    path = generate("empu", "--r", "0.5", "--mesh", "0.1")
    assert cli_main(["tb-audit", path]) == 2
    assert "family record" in capsys.readouterr().err


def test_bad_alpha_grid_is_a_usage_error(generate):
    path = generate("random-family", "--members", "2")
    assert cli_main(["tb-audit", path, "--alpha-grid", "0.5,2"]) == 2


def test_extract_on_nested_intervals(generate, capsys):
    path = generate("nested-intervals", "--n", "64")
    assert cli_main(["extract", path]) == 0
    (report,) = reports(capsys.readouterr().out)
    assert len(report.data["diagonal_indices"]) == 4
    assert "limit" not in report.data


def test_extract_failure_exits_one(generate, capsys):
    path = generate("escaping", "--n", "8", "--spacing", "5")
    assert cli_main(["extract", path, "--stages", "2", "--budget", "2"]) == 1
    (report,) = reports(capsys.readouterr().out)
    assert report.data["failure"]["kind"] == "family-net"


def test_classify_reports_each_member(generate, capsys):
    path = generate("empu", "--r", "0.5", "--mesh", "0.1")
    assert cli_main(["classify", path]) == 0
    (report,) = reports(capsys.readouterr().out)
    assert report.data["is_usc"]
    assert not report.data["is_uscg"]

# ========== ERROR TESTS ==========

@pytest.mark.parametrize(
    "command, option",
    [
        ("gamma-check", ["--eps", "0"]),
        ("gamma-check", ["--eps", "-0.5"]),
        ("tb-audit", ["--eps", "0"]),
        ("extract", ["--stages", "0"]),
        ("extract", ["--budget", "0"]),
    ],
)
def test_invalid_numeric_options_exit_two(generate, command, option):
    path = generate("nested-intervals", "--n", "8")
    assert cli_main([command, path, *option]) == 2


def test_schedule_validation_error_exits_two(generate, capsys, monkeypatch):
    """Test that a pydantic ValidationError from a handler is reported, not raised."""
    from fuzzymetric.compactness import DiagonalSchedule

    def empty_schedule(stages, xi=1.0, net_budget=1):
        return DiagonalSchedule(xi=xi, alphas=(), epsilons=(), net_budget=net_budget)

    monkeypatch.setattr("fuzzymetric.cli.DiagonalSchedule.geometric", empty_schedule)
    path = generate("nested-intervals", "--n", "8")
    assert cli_main(["extract", path]) == 2
    assert "at least one stage" in capsys.readouterr().err



def test_unknown_command():
    assert cli_main(["frobnicate"]) == 2


def test_malformed_input_names_the_line(tmp_path, capsys):
    path = tmp_path / "bad.jsonl"
    path.write_text("{not json\n")
    assert cli_main(["dist", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_missing_input_file(tmp_path, capsys):
    assert cli_main(["classify", str(tmp_path / "missing.jsonl")]) == 2
    assert "cannot read" in capsys.readouterr().err
