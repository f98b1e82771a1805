"""Config parsing: strict schema, typed conversion, overrides."""
import pytest

from dispwave.config import ConfigError, load_config, parse_config
from dispwave.solver import ConstLevel, HomogeneousB, MeanZero, Solitary

MINIMAL = """
[equation]
name = whitham
length = 6.283185307179586
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.equation.name == "whitham"
    assert cfg.grid_n == 64
    assert cfg.doubling == 3
    assert cfg.boundary_kind == "mean-zero"
    assert cfg.step == 0.01
    assert cfg.n_iter == 100
    assert cfg.guess == "stokes:first"
    assert cfg.newton.tol == 1e-12
    assert cfg.newton.max_iters == 50
    assert cfg.evolution.dt is None
    assert cfg.evolution.dealias is True
    assert cfg.grids == (32, 64, 128, 256, 512)
    assert cfg.output_dir == "out"


def test_full_config_roundtrip():
    cfg = parse_config(
        """
[equation]
name = benjamin
length = 12.566370614359172
tau = 0.1

[grid]
n = 256
doubling = 1

[boundary]
kind = const-level
level = -0.25

[navigation]
step = 0.005
n_iter = 40
max_halvings = 4
amplitude_start = 0.002
guess = stokes:corrected

[newton]
newton_tol = 1e-10
newton_max_iters = 25

[evolution]
dt = 0.001
t_end = 2.5
dealias = no
snapshot_stride = 10

[convergence]
grids = 64, 128, 256
waveheight = 0.1

[output]
directory = run7
"""
    )
    assert cfg.equation.name == "benjamin"
    assert dict(cfg.equation.params)["tau"] == 0.1
    assert cfg.grid_n == 256
    assert cfg.boundary_kind == "const-level"
    assert cfg.boundary_level == -0.25
    assert cfg.step == 0.005
    assert cfg.guess == "stokes:corrected"
    assert cfg.newton.tol == 1e-10
    assert cfg.newton.max_iters == 25
    assert cfg.evolution.dt == 0.001
    assert cfg.evolution.dealias is False
    assert cfg.evolution.snapshot_stride == 10
    assert cfg.grids == (64, 128, 256)
    assert cfg.waveheight == 0.1
    assert cfg.output_dir == "run7"


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match=r"unknown section \[sovler\]"):
        parse_config(MINIMAL + "\n[sovler]\nstep = 1\n")


def test_misspelled_key_names_the_key():
    bad = MINIMAL + "\n[newton]\nnewton_tollerance = 1e-8\n"
    with pytest.raises(
        ConfigError, match=r"unknown key 'newton_tollerance' in section \[newton\]"
    ):
        parse_config(bad)


def test_type_errors_name_the_entry():
    with pytest.raises(ConfigError, match=r"key 'n' in section \[grid\]"):
        parse_config(MINIMAL + "\n[grid]\nn = sixty-four\n")
    with pytest.raises(ConfigError, match=r"key 'dealias' in section \[evolution\]"):
        parse_config(MINIMAL + "\n[evolution]\ndealias = maybe\n")
    with pytest.raises(ConfigError, match=r"key 'length' in section \[equation\]"):
        parse_config("[equation]\nname = kdv\nlength = tau/2\n")


def test_missing_equation_section():
    with pytest.raises(ConfigError, match=r"\[equation\]"):
        parse_config("[grid]\nn = 64\n")
    with pytest.raises(ConfigError, match="missing required key 'length'"):
        parse_config("[equation]\nname = kdv\n")


def test_unknown_equation_lists_choices():
    with pytest.raises(ConfigError, match="unknown equation 'kawahara'"):
        parse_config("[equation]\nname = kawahara\nlength = 6.0\n")


def test_tau_only_for_benjamin():
    with pytest.raises(ConfigError, match="missing required key 'tau'"):
        parse_config("[equation]\nname = benjamin\nlength = 6.0\n")
    with pytest.raises(ConfigError, match="only applies to the benjamin"):
        parse_config("[equation]\nname = kdv\nlength = 6.0\ntau = 0.1\n")
    with pytest.raises(ConfigError, match="must be positive"):
        parse_config("[equation]\nname = benjamin\nlength = 6.0\ntau = -0.1\n")


def test_p_only_for_gkdv():
    with pytest.raises(ConfigError, match="missing required key 'p'"):
        parse_config("[equation]\nname = gkdv\nlength = 6.0\n")
    with pytest.raises(ConfigError, match="only applies to the gkdv"):
        parse_config("[equation]\nname = whitham\nlength = 6.0\np = 2\n")
    cfg = parse_config("[equation]\nname = gkdv\nlength = 6.0\np = 3\n")
    assert dict(cfg.equation.params)["p"] == 3


def test_level_only_for_const_level():
    with pytest.raises(ConfigError, match="only applies to the const-level"):
        parse_config(MINIMAL + "\n[boundary]\nkind = mean-zero\nlevel = 0.1\n")
    with pytest.raises(ConfigError, match="must be one of"):
        parse_config(MINIMAL + "\n[boundary]\nkind = dirichlet\n")


def test_make_boundary_kinds():
    pairs = [
        ("mean-zero", MeanZero),
        ("homogeneous", HomogeneousB),
        ("solitary", Solitary),
    ]
    for kind, cls in pairs:
        cfg = parse_config(MINIMAL + f"\n[boundary]\nkind = {kind}\n")
        assert isinstance(cfg.make_boundary(), cls)
    cfg = parse_config(MINIMAL + "\n[boundary]\nkind = const-level\nlevel = 0.3\n")
    bc = cfg.make_boundary()
    assert isinstance(bc, ConstLevel)
    assert bc.level == 0.3


def test_guess_validation():
    with pytest.raises(ConfigError, match="must be one of"):
        parse_config(MINIMAL + "\n[navigation]\nguess = stokes:third\n")


def test_overrides_apply_after_file_values():
    cfg = parse_config(MINIMAL + "\n[grid]\nn = 64\n", overrides=["grid.n=128"])
    assert cfg.grid_n == 128
    # an override can introduce a section absent from the file
    cfg = parse_config(MINIMAL, overrides=["newton.newton_tol=1e-9"])
    assert cfg.newton.tol == 1e-9


def test_overrides_are_schema_checked():
    with pytest.raises(ConfigError, match="unknown key 'newton_tollerance'"):
        parse_config(MINIMAL, overrides=["newton.newton_tollerance=1e-9"])
    with pytest.raises(ConfigError, match="not of the form"):
        parse_config(MINIMAL, overrides=["grid.n"])
    with pytest.raises(ConfigError, match="not of the form"):
        parse_config(MINIMAL, overrides=["gridn=128"])


def test_grids_list_validation():
    with pytest.raises(ConfigError, match="at least two grid sizes"):
        parse_config(MINIMAL + "\n[convergence]\ngrids = 64\n")
    with pytest.raises(ConfigError, match="at least 4"):
        parse_config(MINIMAL + "\n[convergence]\ngrids = 2, 64\n")
    with pytest.raises(ConfigError, match="comma-separated list"):
        parse_config(MINIMAL + "\n[convergence]\ngrids = 64; 128\n")


def test_value_range_checks():
    with pytest.raises(ConfigError, match="must be positive"):
        parse_config(MINIMAL + "\n[navigation]\nstep = 0\n")
    with pytest.raises(ConfigError, match="must be positive"):
        parse_config("[equation]\nname = kdv\nlength = -2\n")
    with pytest.raises(ConfigError, match="at least 1"):
        parse_config(MINIMAL + "\n[newton]\nnewton_max_iters = 0\n")
    with pytest.raises(ConfigError, match="must be positive"):
        parse_config(MINIMAL + "\n[evolution]\ndt = -0.5\n")


def test_malformed_ini_reports_config_error():
    with pytest.raises(ConfigError, match="malformed config"):
        parse_config("equation]\nname = kdv\n")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="config file not found"):
        load_config(str(tmp_path / "nope.ini"))
    path = tmp_path / "run.ini"
    path.write_text(MINIMAL, encoding="utf-8")
    cfg = load_config(str(path), overrides=["grid.n=32"])
    assert cfg.grid_n == 32
