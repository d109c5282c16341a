"""Config parsing and command-line behavior."""

import numpy as np
import pytest

from absprox import cli
from absprox.config import ConfigError, parse_config
from absprox.experiments import (
    CSV_HEADER,
    EXPERIMENTS,
    named_experiment_configs,
    run_config,
)

PSG_TEXT = """
# projected subgradient on a small quadratic
algorithm = psg
Q = [[1,2];[2,1]]
set = ball(0, 1)
x0 = [3, -3]
gamma0 = 1
a0 = 50
a_f = 3
schedule = psg_constant
N = 40
reference = auto_eigen
"""

PPA_TEXT = """
algorithm = ppa
function = abs_plus_square
x0 = -10
gamma0 = 0.5
a0 = 1
schedule = ppa_additive(0.9)
N = 20
reference = [0]
seed = 7
output = somewhere.csv
"""

FB_TEXT = """
algorithm = fb
function = hessian_example
x0 = [-5, -1]
gamma0 = 0.1
a0 = 200
epsilon = 0.1
schedule = psg_constant
N = 30
"""


def errors_of(text):
    with pytest.raises(ConfigError) as ei:
        parse_config(text)
    return ei.value.errors


def test_parse_psg_config():
    cfg = parse_config(PSG_TEXT)
    assert cfg.algorithm == "psg"
    assert cfg.q.shape == (2, 2) and cfg.q[0, 1] == 2.0
    assert cfg.set_desc[0] == "ball"
    np.testing.assert_array_equal(cfg.x0, [3.0, -3.0])
    assert cfg.gamma0 == 1.0 and cfg.a0 == 50.0 and cfg.a_f == 3.0
    assert cfg.schedule == ("psg_constant", ())
    assert cfg.n_iter == 40
    assert cfg.reference == "auto_eigen"
    assert cfg.seed == 1  # default
    assert cfg.output is None


def test_parse_ppa_config():
    cfg = parse_config(PPA_TEXT)
    assert cfg.algorithm == "ppa"
    assert cfg.function == "abs_plus_square" and cfg.q is None
    np.testing.assert_array_equal(cfg.x0, [-10.0])  # scalar promoted to 1-vector
    assert cfg.schedule == ("ppa_additive", (0.9,))
    np.testing.assert_array_equal(cfg.reference, [0.0])
    assert cfg.seed == 7
    assert cfg.output == "somewhere.csv"


def test_parse_fb_config():
    cfg = parse_config(FB_TEXT)
    assert cfg.algorithm == "fb"
    assert cfg.function == "hessian_example"
    assert cfg.epsilon == 0.1
    assert cfg.set_desc is None


def test_errors_are_collected_not_first_only():
    text = """
algorithm = psg
bogus = 1
gamma0 = -2
a0 = 5
schedule = psg_constant
N = 10
"""
    errs = errors_of(text)
    assert "line 3: unknown key 'bogus'" in errs
    assert "missing required key 'x0'" in errs
    assert any("gamma must be positive" in e for e in errs)
    assert "missing oracle: give Q or function" in errs
    assert "psg requires a set" in errs
    assert len(errs) >= 5


def test_malformed_line_and_duplicate_key():
    errs = errors_of("algorithm = ppa\njust a bare line\na0 = 1\na0 = 2\n")
    assert any("expected 'key = value'" in e for e in errs)
    assert any("duplicate key 'a0'" in e for e in errs)


def test_bad_matrix_and_unequal_rows():
    errs = errors_of("algorithm = psg\nQ = [1,2]\nx0 = [1,1]\n"
                     "gamma0 = 1\na0 = 1\nschedule = psg_constant\nN = 1\n"
                     "set = ball(0,1)\n")
    assert any("matrix must look like" in e for e in errs)
    errs = errors_of("algorithm = psg\nQ = [[1,2];[3]]\nx0 = [1,1]\n"
                     "gamma0 = 1\na0 = 1\nschedule = psg_constant\nN = 1\n"
                     "set = ball(0,1)\n")
    assert any("unequal lengths" in e for e in errs)


def test_set_descriptor_validation():
    base = ("algorithm = psg\nQ = [[1,0];[0,1]]\nx0 = [1,1]\n"
            "gamma0 = 1\na0 = 1\nschedule = psg_constant\nN = 1\n")
    assert any("unknown set kind 'cone'" in e
               for e in errors_of(base + "set = cone(0,1)\n"))
    assert any("ball takes 2 arguments, got 1" in e
               for e in errors_of(base + "set = ball(1)\n"))
    assert any("set descriptor dimension does not match x0" in e
               for e in errors_of(base + "set = box([-1,-1,-1], [1,1,1])\n"))


def test_schedule_validation():
    base = ("algorithm = ppa\nfunction = abs_plus_square\nx0 = -1\n"
            "gamma0 = 1\na0 = 1\nN = 1\n")
    assert any("unknown schedule 'warp'" in e
               for e in errors_of(base + "schedule = warp(1)\n"))
    assert any("takes 1 parameter(s), got 2" in e
               for e in errors_of(base + "schedule = ppa_additive(1, 2)\n"))
    # compatibility matrix: a psg rule cannot drive the proximal iteration
    assert any("not usable with algorithm ppa" in e
               for e in errors_of(base + "schedule = psg_constant\n"))


def test_dimension_cross_checks():
    errs = errors_of("algorithm = psg\nQ = [[1,0];[0,1]]\nx0 = [1,1,1]\n"
                     "set = ball(0,1)\ngamma0 = 1\na0 = 1\n"
                     "schedule = psg_constant\nN = 1\n")
    assert any("Q is 2x2 but x0 has dimension 3" in e for e in errs)

    errs = errors_of("algorithm = ppa\nfunction = abs_plus_square\nx0 = [1,2]\n"
                     "gamma0 = 1\na0 = 1\nschedule = ppa_additive(1)\nN = 1\n")
    assert any("abs_plus_square is one-dimensional" in e for e in errs)

    errs = errors_of("algorithm = fb\nfunction = hessian_example\nx0 = [1]\n"
                     "gamma0 = 1\na0 = 1\nepsilon = 0.1\n"
                     "schedule = fb_constant(5)\nN = 1\n")
    assert any("hessian_example is two-dimensional" in e for e in errs)

    errs = errors_of("algorithm = psg\nQ = [[1,0];[0,1]]\nx0 = [1,1]\n"
                     "set = ball(0,1)\ngamma0 = 1\na0 = 1\n"
                     "schedule = psg_constant\nN = 1\nreference = [1,2,3]\n")
    assert any("reference vector dimension does not match x0" in e for e in errs)


def test_oracle_exclusivity_and_fb_requirements():
    errs = errors_of("algorithm = ppa\nfunction = abs_plus_square\n"
                     "Q = [[1]]\nx0 = -1\ngamma0 = 1\na0 = 1\n"
                     "schedule = ppa_additive(1)\nN = 1\n")
    assert any("give either Q or function, not both" in e for e in errs)

    errs = errors_of("algorithm = fb\nfunction = abs_plus_square\nx0 = -1\n"
                     "gamma0 = 1\na0 = 1\nepsilon = 0.1\n"
                     "schedule = fb_constant(5)\nN = 1\n")
    assert any("fb supports the hessian_example function" in e for e in errs)

    errs = errors_of("algorithm = fb\nfunction = hessian_example\nx0 = [1,1]\n"
                     "gamma0 = 1\na0 = 1\nschedule = fb_constant(5)\nN = 1\n")
    assert "fb requires epsilon (curvature margin)" in errs


def test_numeric_field_validation():
    base = ("algorithm = ppa\nfunction = abs_plus_square\nx0 = -1\n"
            "gamma0 = 1\na0 = 1\nschedule = ppa_additive(1)\n")
    assert any("N must be a nonnegative integer" in e
               for e in errors_of(base + "N = 2.5\n"))
    assert any("epsilon must be positive" in e
               for e in errors_of(base + "N = 1\nepsilon = 0\n"))
    assert any("malformed number" in e
               for e in errors_of(base + "N = 1\na_f = three\n"))
    assert any("seed must be an integer" in e
               for e in errors_of(base + "N = 1\nseed = 1.5\n"))


def test_bundled_experiments_all_parse():
    assert len(EXPERIMENTS) == 7
    for name in EXPERIMENTS:
        pairs = named_experiment_configs(name)
        assert [g for g, _ in pairs] == list(EXPERIMENTS[name]["gammas"])
        for gamma, cfg in pairs:
            assert cfg.gamma0 == gamma
    with pytest.raises(KeyError, match="unknown experiment"):
        named_experiment_configs("nope")


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------


def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    for name in EXPERIMENTS:
        assert name in out


def test_cli_run_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "ppa.cfg"
    cfg.write_text(PPA_TEXT.replace("output = somewhere.csv",
                                    f"output = {tmp_path / 'run.csv'}"))
    assert cli.main(["run", str(cfg)]) == 0
    text = (tmp_path / "run.csv").read_text()
    lines = text.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 22  # header + initial point + 20 iterations + none extra
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[1] == "0.5"  # gamma column, %.17g prints exactly
    assert first[3] == ""     # a_f never queried by the proximal iteration
    assert lines[-1].split(",")[-1] == ""  # no stop rule fired on this run
    # a second run must produce byte-identical output
    assert cli.main(["run", str(cfg)]) == 0
    assert (tmp_path / "run.csv").read_text() == text
    assert "terminal=max-iter" in capsys.readouterr().out


def test_cli_run_missing_file(capsys):
    assert cli.main(["run", "/no/such/file.cfg"]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_cli_run_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("algorithm = psg\nbogus = 1\n")
    assert cli.main(["run", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "config error: " in err
    assert "unknown key 'bogus'" in err


def test_cli_reproduce(tmp_path, capsys):
    assert cli.main(["reproduce", "ppa-absq", "--out-dir", str(tmp_path)]) == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == [
        "ppa-absq-gamma0.01.csv",
        "ppa-absq-gamma0.1.csv",
        "ppa-absq-gamma1.csv",
        "ppa-absq-gamma10.csv",
    ]
    for p in tmp_path.iterdir():
        assert p.read_text().splitlines()[0] == CSV_HEADER
    out = capsys.readouterr().out
    assert out.count("terminal=") == 4

    assert cli.main(["reproduce", "nope"]) == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_cli_verify(capsys):
    assert cli.main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("ok ") == 7
    assert "FAIL" not in out


def test_run_config_reference_distance_column(tmp_path):
    # dist_to_ref is populated when a reference is given and empty when not
    run = run_config(parse_config(PPA_TEXT))
    assert run.x_star is not None and run.f_star == 0.0
    from absprox.experiments import write_csv

    path = tmp_path / "with_ref.csv"
    write_csv(run.result, str(path), x_star=run.x_star)
    row = path.read_text().splitlines()[1].split(",")
    assert float(row[6]) == 10.0  # |x0 - 0|

    path2 = tmp_path / "no_ref.csv"
    write_csv(run.result, str(path2))
    assert path2.read_text().splitlines()[1].split(",")[6] == ""
