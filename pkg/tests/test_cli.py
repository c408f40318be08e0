import pytest

from fourbvp.cli import build_parser, main


def test_verify_subcommand_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "[pass]" in out
    assert "FAIL" not in out


def test_solve_subcommand_with_csv_and_figures(tmp_path, capsys):
    code = main(["solve", "--problem", "sin5", "--m", "4,8", "--n", "6",
                 "--csv", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "sin5" in out
    for name in ("sin5_errors.csv", "sin5_timings.csv", "sin5_residuals.csv",
                 "sin5_solution.png", "sin5_convergence.png"):
        assert (tmp_path / name).exists()


def test_solve_no_figures(tmp_path):
    assert main(["solve", "--problem", "sin5", "--m", "4", "--n", "6",
                 "--csv", str(tmp_path), "--no-figures"]) == 0
    assert (tmp_path / "sin5_errors.csv").exists()
    assert not (tmp_path / "sin5_solution.png").exists()


def test_solve_without_csv(capsys):
    assert main(["solve", "--problem", "beam-fixed", "--m", "2", "--n", "6"]) == 0
    assert "beam-fixed" in capsys.readouterr().out


def test_solver_knob_flags():
    assert main(["solve", "--problem", "sin5", "--m", "4", "--n", "6",
                 "--max-iters", "5", "--tol", "1e-12", "--eval-grid", "500"]) == 0


def test_bad_m_list_rejected():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["solve", "--problem", "sin5", "--m", "4,x"])
    with pytest.raises(SystemExit):
        parser.parse_args(["solve", "--problem", "sin5", "--m", "0"])


def test_unknown_problem_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["solve", "--problem", "cubic", "--m", "4"])


def test_failed_rows_set_exit_code(capsys):
    assert main(["solve", "--problem", "sin5", "--m", "4", "--n", "3"]) == 1
