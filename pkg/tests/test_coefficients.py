import numpy as np
import pytest

from tvarma import (
    ConfigError,
    OutOfWindow,
    PathSpec,
    StochasticCoeffSpec,
    constant_path,
    make_break_path,
    make_exponential_path,
    make_gegenbauer_path,
    make_logistic_path,
    make_periodic_path,
    sample_stochastic_path,
    table_path,
)
from tvarma.io import read_custom_table


def test_logistic_midpoint_and_plateaus():
    path = make_logistic_path(0.2, 0.8, gamma=0.5, tau=100)
    assert path.phi(1, 100) == pytest.approx(0.5)
    assert path.phi(1, 0) == 0.2
    assert path.phi(1, 200) == 0.8


def test_logistic_flat_at_zero_gamma():
    path = make_logistic_path(0.2, 0.8, gamma=0.0, tau=100)
    assert all(path.phi(1, t) == pytest.approx(0.5) for t in (-50, 100, 300))


def test_logistic_monotone():
    path = make_logistic_path(0.2, 0.8, gamma=0.3, tau=50)
    values = np.array([path.phi(1, t) for t in range(0, 101)])
    assert np.all(np.diff(values) >= 0)


def test_logistic_rejects_negative_gamma():
    with pytest.raises(ConfigError):
        make_logistic_path(0.2, 0.8, gamma=-1.0, tau=0)


def test_exponential_transition():
    path = make_exponential_path(0.9, 0.5, T=10)
    assert path.phi(1, -3) == 0.9
    assert path.phi(1, 5) == pytest.approx(0.9 * 0.5**0.5)
    assert path.phi(1, 10) == pytest.approx(0.45)


def test_periodic_seasons():
    path = make_periodic_path([0.9, 1.2, 0.5, 0.8], drift=[1.0, 0.0, 0.0, 2.0])
    assert [path.phi(1, t) for t in range(8)] == [0.9, 1.2, 0.5, 0.8] * 2
    assert path.drift(7) == 2.0
    with pytest.raises(ConfigError):
        make_periodic_path([0.9, 1.2], ell=3)


def test_gegenbauer_coefficients_at_small_j():
    d, phi = 0.3, 0.8
    path = make_gegenbauer_path(d, phi)
    assert path.phi(1, 2) == pytest.approx(phi * (d + 1))
    assert path.phi(2, 3) == pytest.approx(-(2 * d + 1) / 3)
    big = 10**9
    assert path.phi(1, big) == pytest.approx(2 * phi)
    assert path.phi(2, big) == pytest.approx(-1.0)
    with pytest.raises(OutOfWindow):
        path.phi(1, 0)
    with pytest.raises(ConfigError):
        make_gegenbauer_path(0.6, 0.5)


def test_break_path_regimes():
    path = make_break_path(
        [{"ar": [0.5], "drift": 1.0, "sigma": 2.0}, {"ar": [0.1, 0.2], "drift": 0.0}],
        [10],
    )
    assert path.p == 2
    assert path.ar_at(10) == (0.5, 0.0)
    assert path.ar_at(11) == (0.1, 0.2)
    assert path.sigma2(0) == pytest.approx(4.0)


def test_break_path_without_breaks():
    path = make_break_path([{"ar": [0.3]}], [])
    assert path.phi(1, -1000) == path.phi(1, 1000) == 0.3


def test_break_times_must_increase():
    seg = {"ar": [0.3]}
    with pytest.raises(ConfigError):
        make_break_path([seg, seg, seg], [20, 10])
    with pytest.raises(ConfigError):
        make_break_path([seg, seg], [10, 20])


def test_rc_without_noise_is_constant():
    spec = StochasticCoeffSpec(kind="rc", p=2, phi=(0.4, 0.2), eta_scale=(0.0, 0.0))
    path = sample_stochastic_path(spec, 3, (0, 50))
    assert all(path.ar_at(t) == (0.4, 0.2) for t in range(51))


def test_bilinear_without_loading_is_constant():
    spec = StochasticCoeffSpec(kind="markov_bilinear", p=1, phi=(0.4,), vartheta=(0.0,))
    path = sample_stochastic_path(spec, 3, (0, 50))
    assert all(path.phi(1, t) == 0.4 for t in range(51))


def test_generalised_bilinear_first_power():
    base = StochasticCoeffSpec(kind="markov_bilinear", p=2, phi=(0.3, 0.1), vartheta=(0.2, -0.1))
    gen = StochasticCoeffSpec(kind="gen_markov_bilinear", p=2, c=(0.3, 0.1), vartheta=(0.2, -0.1), r=(1, 1))
    a = sample_stochastic_path(base, 11, (0, 40))
    b = sample_stochastic_path(gen, 11, (0, 40))
    assert np.allclose(a.ar_block(0, 40), b.ar_block(0, 40))


@pytest.mark.parametrize("kind,extra", [
    ("rc", {"phi": (0.5,), "eta_scale": (0.2,)}),
    ("rc_exponential", {"c": (0.3,), "vartheta": ((0.1, 0.2, 1.0),)}),
    ("dsar", {"beta0": (0.2,), "beta": ((0.5,),), "e_scale": (0.1,)}),
])
def test_seed_reproducible(kind, extra):
    spec = StochasticCoeffSpec(kind=kind, p=1, **extra)
    a = sample_stochastic_path(spec, 5, (0, 30))
    b = sample_stochastic_path(spec, 5, (0, 30))
    c = sample_stochastic_path(spec, 6, (0, 30))
    assert np.array_equal(a.ar_block(0, 30), b.ar_block(0, 30))
    assert np.array_equal(a.innovations[1], b.innovations[1])
    assert not np.array_equal(a.innovations[1], c.innovations[1])


def test_stochastic_spec_validation():
    with pytest.raises(ConfigError):
        StochasticCoeffSpec(kind="rc", p=2, phi=(0.1,), eta_scale=(0.1, 0.1))
    with pytest.raises(ConfigError):
        StochasticCoeffSpec(kind="nope", p=1)
    with pytest.raises(ConfigError):
        StochasticCoeffSpec.from_dict({"kind": "rc", "p": 1, "bogus": 1})


def test_path_spec_round_trip():
    spec = PathSpec("logistic_transition", {"phi1": 0.2, "phi2": 0.8, "gamma": 0.5, "tau": 10})
    again = PathSpec.from_json(spec.to_json())
    assert again == spec
    assert again.build().phi(1, 10) == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        PathSpec.from_json("{not json")
    with pytest.raises(ConfigError):
        PathSpec("unknown")
    with pytest.raises(ConfigError):
        PathSpec("constant", {"bogus": 1}).build()


def test_custom_table(tmp_path):
    csv = tmp_path / "coef.csv"
    csv.write_text("t,phi1,theta1,drift,sigma2\n5,0.5,0.1,1.0,2.0\n6,0.4,0.2,0.0,1.0\n")
    path = read_custom_table(str(csv))
    assert (path.p, path.q) == (1, 1)
    assert path.phi(1, 6) == 0.4
    assert path.theta(1, 5) == 0.1
    assert path.sigma2(5) == 2.0
    with pytest.raises(OutOfWindow):
        path.phi(1, 7)
    built = PathSpec("custom_table", {"csv": "coef.csv"}).build(base_dir=str(tmp_path))
    assert built.drift(5) == 1.0


def test_table_path_rejects_gaps():
    with pytest.raises(ConfigError):
        table_path([0, 2], ar=[0.1, 0.2])


def test_constant_path_checks():
    with pytest.raises(ConfigError):
        constant_path((0.5,), sigma2=0.0)
