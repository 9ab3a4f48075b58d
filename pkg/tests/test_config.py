from fractions import Fraction

import pytest

from decmatch.config import Config, stream

F = Fraction


def test_defaults_are_exact_fractions():
    cfg = Config()
    assert (cfg.eps, cfg.alpha, cfg.rho, cfg.lam, cfg.theta) == (F(1, 5), 8, 8, 16, F(1, 8))
    assert isinstance(Config(eps=0.25).eps, Fraction)
    assert cfg.violations() == []
    assert cfg.sparsifier_enabled


@pytest.mark.parametrize("kwargs,fragment", [
    ({"eps": F(2, 5)}, "not 1/k"),
    ({"alpha": 3}, "alpha >= max(2, 1/eps)"),
    ({"rho": F(1, 2)}, "rho >= 1"),
    ({"lam": 0}, "lambda >= 1"),
])
def test_violations_are_rejected(kwargs, fragment):
    cfg = Config(**kwargs)
    assert any(fragment in v for v in cfg.violations())
    with pytest.raises(ValueError, match=fragment.split()[0]):
        cfg.validate()


def test_threshold_violation_only_disables_sparsifier():
    cfg = Config(alpha=5, theta=F(1, 8))
    assert any("theta" in v for v in cfg.violations())
    assert cfg.validate() is cfg
    assert not cfg.sparsifier_enabled


def test_streams_are_reproducible_and_path_separated():
    a = stream(4, 1, 2).random(5)
    assert (a == stream(4, 1, 2).random(5)).all()
    assert not (a == stream(4, 1, 3).random(5)).any()
    assert not (a == stream(5, 1, 2).random(5)).any()
