from dataclasses import dataclass, fields, replace
from typing import Any

from ghostlist.errors import ParamError

# %% Parameters

SEED_ENV_VAR = "GHOSTLIST_SEED"
DEFAULT_SEED = 0

DEFAULT_SAMPLE_SIZE = 30
DEFAULT_LATENCY = 0.5
DEFAULT_GROUP_PAGE_SIZE = 100
DEFAULT_N_ACCOUNTS = 9
DEFAULT_HTTP_PORT = 8080


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParamError(f"{name} must be a probability in [0, 1], and it is {value}.")


def _check_non_negative(name: str, value: float) -> None:
    if value < 0:
        raise ParamError(f"{name} must be non-negative, and it is {value}.")


class _SettableParams:
    """Mixin giving validated dataclasses the `set_params` mutator."""

    def __post_init__(self) -> None: ...

    def set_params(self, **kwargs: Any) -> None:
        """
        Set one or more parameters and re-run validation.

        Example:
            params.set_params(n_users=50, picture_friend_bias=1.0)
        """
        valid_fields = {f.name for f in fields(self)}  # type: ignore[arg-type]
        invalid_params = set(kwargs.keys()) - valid_fields
        if invalid_params:
            raise ParamError(
                f"Invalid parameter names: {invalid_params}. Valid parameters are: {valid_fields}"
            )

        for param_name, value in kwargs.items():
            setattr(self, param_name, value)

        self.__post_init__()


@dataclass
class GenParams(_SettableParams):
    n_users: int = 115
    mean_degree: int = 30
    n_pages: int = 300
    page_popularity_exponent: float = 1.1
    likes_per_user_mean: float = 5.0
    page_homophily: float = 0.6
    pictures_per_user_mean: float = 2.0
    cover_photo_rate: float = 1.0
    picture_friend_bias: float = 0.8
    reactions_per_picture_mean: float = 8.0
    fraction_public_profiles: float = 0.3
    n_groups: int = 20
    group_visibility_weights: tuple[float, float, float] = (0.5, 0.3, 0.2)
    group_size_mean: float = 15.0
    rewire_probability: float = 0.1

    def __post_init__(self) -> None:
        for name in ("n_users", "mean_degree", "n_pages", "n_groups"):
            _check_non_negative(name, getattr(self, name))
        if self.mean_degree % 2:
            # each user is joined to mean_degree / 2 ring neighbours per side
            raise ParamError(f"mean_degree must be even, and it is {self.mean_degree}.")
        for name in (
            "page_popularity_exponent",
            "likes_per_user_mean",
            "pictures_per_user_mean",
            "reactions_per_picture_mean",
            "group_size_mean",
        ):
            _check_non_negative(name, getattr(self, name))
        for name in (
            "page_homophily",
            "cover_photo_rate",
            "picture_friend_bias",
            "fraction_public_profiles",
            "rewire_probability",
        ):
            _check_probability(name, getattr(self, name))

        if len(self.group_visibility_weights) != 3:
            raise ParamError(
                f"group_visibility_weights must be a (public, private, hidden) triple, and it is {self.group_visibility_weights}."
            )
        for weight in self.group_visibility_weights:
            _check_probability("group_visibility_weights", weight)
        if self.n_groups > 0 and sum(self.group_visibility_weights) == 0:
            raise ParamError("group_visibility_weights cannot all be zero.")


@dataclass
class ServiceConfig(_SettableParams):
    sample_size: int = DEFAULT_SAMPLE_SIZE
    latency: float = DEFAULT_LATENCY
    rate_limit: float | None = None
    burst: int = 5
    group_page_size: int = DEFAULT_GROUP_PAGE_SIZE

    def __post_init__(self) -> None:
        _check_non_negative("sample_size", self.sample_size)
        _check_non_negative("latency", self.latency)
        if self.group_page_size < 1:
            raise ParamError(
                f"group_page_size must be at least 1, and it is {self.group_page_size}."
            )
        if self.rate_limit is not None and self.rate_limit <= 0:
            raise ParamError(
                f"rate_limit must be positive when set, and it is {self.rate_limit}."
            )
        if self.rate_limit is not None and self.latency == 0:
            # the bucket refills on the simulated clock, which only latency advances
            raise ParamError("rate_limit needs a positive latency.")
        if self.burst < 1:
            raise ParamError(f"burst must be at least 1, and it is {self.burst}.")


@dataclass
class StrategyConfig(_SettableParams):
    budget: int | None = None
    expand_mutuals: bool = False
    facepile_calls_per_page: int = 1
    run_seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.budget is not None:
            _check_non_negative("budget", self.budget)
        if self.facepile_calls_per_page < 1:
            raise ParamError(
                f"facepile_calls_per_page must be at least 1, and it is {self.facepile_calls_per_page}."
            )


# %% Dataset presets

PRESETS: dict[str, GenParams] = {
    "mixed": GenParams(n_users=115, fraction_public_profiles=0.3),
    "public": GenParams(n_users=1000, fraction_public_profiles=1.0),
}


def get_preset(name: str) -> GenParams:
    if name not in PRESETS:
        raise ParamError(
            f"invalid preset chosen. It should be one of {sorted(PRESETS)}, and you chose {name}."
        )
    return replace(PRESETS[name])
