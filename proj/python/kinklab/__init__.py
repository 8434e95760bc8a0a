from ._core import (
    SimConfig,
    alpha_inv,
    audit,
    criterion_count,
    ground_state,
    h0,
    h_tilde,
    potential_v,
    q_tilde,
    resonance,
    roots,
    run_criterion,
    shoot,
    simulate,
)

__all__ = [
    "SimConfig",
    "alpha_inv",
    "audit",
    "criterion_count",
    "ground_state",
    "h0",
    "h_tilde",
    "potential_v",
    "q_tilde",
    "resonance",
    "roots",
    "run_criterion",
    "shoot",
    "simulate",
]
