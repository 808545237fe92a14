"""Bot players and Monte Carlo experiment runner for the caption game."""

from capguess.simharness.bots import (
    GuesserBot,
    GuesserBotModel,
    LeaderBot,
    LeaderBotModel,
    Vocabulary,
)
from capguess.simharness.experiment import (
    LabeledRound,
    blanks_accuracy_trend,
    run_cohort,
    sweep,
)

__all__ = [
    "GuesserBot",
    "GuesserBotModel",
    "LabeledRound",
    "LeaderBot",
    "LeaderBotModel",
    "Vocabulary",
    "blanks_accuracy_trend",
    "run_cohort",
    "sweep",
]
