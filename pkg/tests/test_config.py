import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ladder_cavity.config import (
    ConfigError,
    config_echo,
    parse_config,
    parse_float,
    read_echo,
)
from ladder_cavity.dressed import SteadyMethod
from ladder_cavity.sweep import SweepParam

MINIMAL = """\
g1 = 6
g2 = 4
gamma2 = 2
kappa = 0.1
omega1 = 100
omega2 = 150
"""


def test_defaults_applied():
    cfg = parse_config(MINIMAL)
    p, s = cfg.params, cfg.solver
    assert (p.gamma1, p.phi1, p.phi2) == (1.0, 0.0, 0.0)
    assert s.steady_method is SteadyMethod.LINEAR_SOLVE
    assert (s.rel_tol, s.tail_tol, s.n_max_initial, s.n_max_cap) == (1e-8, 1e-10, 16, 4096)
    assert cfg.delta_c is None
    assert cfg.oracle_params.detuning == pytest.approx(2 * math.hypot(100, 150))
    spec = cfg.sweep_spec()
    assert spec.shape == (121, 60)
    assert spec.param_x is SweepParam.PHI2 and spec.param_y is SweepParam.RATIO


@pytest.mark.parametrize("text,value", [
    ("pi", math.pi),
    ("pi/4", math.pi / 4),
    ("-pi/2", -math.pi / 2),
    ("2*pi", 2 * math.pi),
    ("3*pi/4", 3 * math.pi / 4),
    (" 3 * pi / 4 ", 3 * math.pi / 4),
    ("0.785", 0.785),
    ("1e-3", 1e-3),
])
def test_symbolic_pi(text, value):
    assert parse_float(text) == value


def test_phase_keys_accept_pi():
    cfg = parse_config(MINIMAL + "phi1 = pi/4\nphi2 = 5*pi/4\n")
    assert cfg.params.phi1 == math.pi / 4
    assert cfg.params.phi2 == 5 * math.pi / 4


def test_unknown_key_reports_name_and_line():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + "# comment\n\nfoo = 1\n")
    assert info.value.line == 9
    assert "foo" in str(info.value) and "line 9" in str(info.value)


def test_missing_mandatory():
    with pytest.raises(ConfigError, match="kappa"):
        parse_config(MINIMAL.replace("kappa = 0.1\n", ""))


@pytest.mark.parametrize("extra,line", [
    ("g1 = 2\n", 7),
    ("phi1 = quarter\n", 7),
    ("n_max_initial = 2.5\n", 7),
    ("steady_method = magic\n", 7),
    ("no equals sign\n", 7),
])
def test_line_diagnostics(extra, line):
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL + extra)
    assert info.value.line == line


def test_domain_errors_point_at_the_key():
    with pytest.raises(ConfigError) as info:
        parse_config(MINIMAL.replace("kappa = 0.1", "kappa = -1"))
    assert info.value.line == 4
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("omega1 = 100", "omega1 = 0").replace("omega2 = 150", "omega2 = 0"))


def test_inline_comments_and_blank_lines():
    cfg = parse_config("\n# header\n" + MINIMAL.replace("g1 = 6", "g1 = 6   # upper bound"))
    assert cfg.params.g1 == 6.0


def test_profiles():
    cfg = parse_config(MINIMAL)
    assert cfg.with_profile("paper").params.kappa == 1e-3
    assert cfg.with_profile("paper").solver.n_max_cap == 1024
    assert cfg.with_profile("fast").params.kappa == 0.1
    assert cfg.with_profile(None) is cfg
    with pytest.raises(ConfigError):
        cfg.with_profile("slow")


def test_echo_round_trip():
    text = MINIMAL + "phi2 = pi/3\ndelta_c = 12.5\nsteady_method = long_time\nsweep_y = kappa\n" \
        "sweep_y_start = 0.01\nsweep_y_stop = 1\nsweep_y_count = 3\n"
    cfg = parse_config(text)
    echoed = "".join(f"# {line}\n" for line in config_echo(cfg)) + "x,y\n1,2\n"
    assert read_echo(echoed) == cfg


finite = st.floats(0.01, 1e3, allow_nan=False, allow_infinity=False)
phase = st.floats(-20, 20, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(g1=finite, g2=finite, kappa=finite, o1=finite, phi2=phase)
def test_echo_round_trip_random(g1, g2, kappa, o1, phi2):
    cfg = parse_config(f"g1 = {g1!r}\ng2 = {g2!r}\ngamma2 = 2\nkappa = {kappa!r}\n"
                       f"omega1 = {o1!r}\nomega2 = 0\nphi2 = {phi2!r}\n")
    assert parse_config("\n".join(config_echo(cfg))) == cfg
