from ._core import (
    Scenario,
    ScenarioError,
    jain_index,
    load_scenario,
    nats_to_bits,
    parse_scenario,
    penalty_xi,
    q_inverse,
    run,
    scenario_keys,
    validate,
)

__all__ = [
    "Scenario",
    "ScenarioError",
    "jain_index",
    "load_scenario",
    "nats_to_bits",
    "parse_scenario",
    "penalty_xi",
    "q_inverse",
    "run",
    "scenario_keys",
    "validate",
]
