import pytest

from ghostlist import config
from ghostlist.config import GenParams, ServiceConfig, StrategyConfig
from ghostlist.errors import ParamError


def test_default_gen_params_are_valid():
    params = GenParams()
    assert params.n_users == 115
    assert params.picture_friend_bias == 0.8


def test_set_params_revalidates():
    params = GenParams()
    params.set_params(n_users=50, picture_friend_bias=1.0)
    assert params.n_users == 50

    with pytest.raises(ParamError):
        params.set_params(picture_friend_bias=1.5)


def test_set_params_rejects_unknown_names():
    with pytest.raises(ParamError, match="Invalid parameter names"):
        GenParams().set_params(number_of_users=3)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_users": -1},
        {"mean_degree": 5},
        {"page_homophily": 2.0},
        {"fraction_public_profiles": -0.1},
        {"group_visibility_weights": (0.5, 0.5)},
        {"group_visibility_weights": (0.0, 0.0, 0.0)},
    ],
)
def test_invalid_gen_params(kwargs):
    with pytest.raises(ParamError):
        GenParams(**kwargs)


def test_service_config_validation():
    assert ServiceConfig().sample_size == 30
    with pytest.raises(ParamError):
        ServiceConfig(group_page_size=0)
    with pytest.raises(ParamError):
        ServiceConfig(rate_limit=0)
    with pytest.raises(ParamError):
        ServiceConfig(rate_limit=1.0, latency=0.0)


def test_strategy_config_validation():
    assert StrategyConfig().budget is None
    with pytest.raises(ParamError):
        StrategyConfig(budget=-1)
    with pytest.raises(ParamError):
        StrategyConfig(facepile_calls_per_page=0)


def test_presets():
    assert config.get_preset("mixed").n_users == 115
    assert config.get_preset("mixed").fraction_public_profiles == 0.3
    assert config.get_preset("public").n_users == 1000
    assert config.get_preset("public").fraction_public_profiles == 1.0


def test_get_preset_returns_a_copy():
    preset = config.get_preset("mixed")
    preset.set_params(n_users=3)
    assert config.get_preset("mixed").n_users == 115


def test_unknown_preset():
    with pytest.raises(ParamError, match="invalid preset chosen"):
        config.get_preset("private")
