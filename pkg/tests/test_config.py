import pytest

from sebot.config import PRESETS, PipelineConfig, resolve_config


def test_defaults():
    cfg = PipelineConfig()
    assert (cfg.xi, cfg.phi, cfg.p, cfg.rho, cfg.pi, cfg.theta) == (0.1, 1.0, 0.15, 0.004, 0.4, 1.0)
    assert cfg.omega == (1.0, 1.0, 1.0) and cfg.seed is None
    assert resolve_config() == cfg


def test_presets():
    assert PRESETS["pronbots"] == {"xi": 0.01, "p": 0.05, "theta": 0.60}
    assert PRESETS["botwiki"] == {"pi": 0.6, "theta": 0.55}
    cfg = resolve_config("pronbots")
    assert (cfg.xi, cfg.p, cfg.theta, cfg.pi) == (0.01, 0.05, 0.60, 0.4)


def test_precedence(tmp_path):
    f = tmp_path / "cfg.toml"
    f.write_text('preset = "botwiki"\ntheta = 0.7\nxi = 0.2\nomega = [2, 1, 1]\n')
    cfg = resolve_config(file=f)
    assert (cfg.pi, cfg.theta, cfg.xi, cfg.omega) == (0.6, 0.7, 0.2, (2.0, 1.0, 1.0))
    cfg = resolve_config(file=f, overrides={"theta": 0.9, "xi": None})
    assert cfg.theta == 0.9 and cfg.xi == 0.2


def test_every_field_settable_from_file(tmp_path):
    f = tmp_path / "cfg.toml"
    f.write_text("xi = 0.2\nphi = 2.0\np = 0.3\nrho = 0.01\npi = 0.5\ntheta = 0.8\n"
                 'omega = "1,2,3"\nseed = 4\n')
    cfg = resolve_config(file=f)
    assert cfg == PipelineConfig(xi=0.2, phi=2.0, p=0.3, rho=0.01, pi=0.5, theta=0.8, omega=(1, 2, 3), seed=4)


def test_unknown_keys(tmp_path):
    f = tmp_path / "cfg.toml"
    f.write_text("gamma = 1\n")
    with pytest.raises(ValueError, match="gamma"):
        resolve_config(file=f)
    with pytest.raises(ValueError):
        resolve_config("nope")
