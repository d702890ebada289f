"""Explicit witnesses: line torsion bounds, hyperbolic-plane nonvanishing and
the ball counterexample, with the pairing certificates behind them."""

from lqplab.witnesses.ball import (
    BallWitnessConfig,
    alpha_form,
    alpha_norm_exact,
    ball_witness,
    ball_witness_for,
    differential_norm,
    gamma_norm,
    mu_interval,
    pairing_value,
    plateau_profile,
)
from lqplab.witnesses.hyperbolic import (
    HyperbolicWitnesses,
    hyperbolic_nonvanishing,
    hyperbolic_witnesses,
)
from lqplab.witnesses.line import (
    excluded_reduced_report,
    line_gaussian_bound,
    line_gaussian_ladder,
    line_plateau_bound,
    line_plateau_ladder,
    line_reduced_approx,
    line_reduced_ladder,
    plateau_lower_bound,
)
from lqplab.witnesses.reports import (
    Verdict,
    WitnessReport,
    closed_pairing_certificate,
    sequence_certificate,
)

__all__ = [
    "BallWitnessConfig",
    "HyperbolicWitnesses",
    "Verdict",
    "WitnessReport",
    "alpha_form",
    "alpha_norm_exact",
    "ball_witness",
    "ball_witness_for",
    "closed_pairing_certificate",
    "differential_norm",
    "excluded_reduced_report",
    "gamma_norm",
    "hyperbolic_nonvanishing",
    "hyperbolic_witnesses",
    "line_gaussian_bound",
    "line_gaussian_ladder",
    "line_plateau_bound",
    "line_plateau_ladder",
    "line_reduced_approx",
    "line_reduced_ladder",
    "mu_interval",
    "pairing_value",
    "plateau_lower_bound",
    "plateau_profile",
    "sequence_certificate",
]
