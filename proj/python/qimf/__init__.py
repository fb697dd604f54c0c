"""Mean-field QUBO solver with shot-subsampled Ising costs."""

from ._core import (
    IsingHamiltonian,
    ParseError,
    QuboInstance,
    RunTrace,
    ValidationError,
    brute_force,
    build_ising,
    build_maxcut,
    build_portfolio,
    cost_s,
    evaluate_full,
    generate_wsbm,
    instance_hamiltonian,
    ising_to_qubo,
    load,
    preprocess,
    quadratic_form,
    run_cli,
    save,
    shot_count_block,
    shot_count_simple,
    solve,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
