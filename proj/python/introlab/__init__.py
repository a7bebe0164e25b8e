"""introlab: a desk-scale laboratory for the introspective MIP* protocol stack."""

from introlab._core import (
    Gf,
    MultiPoly,
    brute_force_sat,
    experiment_names,
    game_value,
    ld_encode,
    parse_instance_text,
    pi_index,
    run_experiment,
    run_suite,
    subcube_decompose_remainder_zero,
    __version__,
)

__all__ = [
    "Gf",
    "MultiPoly",
    "brute_force_sat",
    "experiment_names",
    "game_value",
    "ld_encode",
    "parse_instance_text",
    "pi_index",
    "run_experiment",
    "run_suite",
    "subcube_decompose_remainder_zero",
    "__version__",
]
