"""Causal identification, estimation and counterfactual reasoning over discrete models."""

from ._causeway import (
    CausewayError,
    ConditioningOnZero,
    Graph,
    NotRecoverable,
    ParseError,
    counterfactual,
    d_separated,
    discover,
    estimate,
    hedge,
    identify,
    mediation,
    pn_ps,
    pn_ps_bounds,
    recoverability,
    run_cli,
)

__all__ = [
    "CausewayError",
    "ConditioningOnZero",
    "Graph",
    "NotRecoverable",
    "ParseError",
    "counterfactual",
    "d_separated",
    "discover",
    "estimate",
    "hedge",
    "identify",
    "mediation",
    "pn_ps",
    "pn_ps_bounds",
    "recoverability",
    "run_cli",
]
