"""Access to the bundled example game and controller."""

from importlib import resources


def lawnmower_text() -> str:
    return resources.files(__package__).joinpath("data/lawnmower.game").read_text()


def lawnmower_sample_strategy_text() -> str:
    return (
        resources.files(__package__)
        .joinpath("data/lawnmower_sample.strategy")
        .read_text()
    )
