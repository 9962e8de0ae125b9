"""Grounded Lipschitz functions on d-ary trees: exact counting tables,
uniform samplers, and machine checks of the proved tail inequalities."""

from .model import (
    Backend,
    BignumBudgetError,
    LevelTable,
    ModelParams,
    RootDistribution,
    base_table,
    build_tables,
    level_step,
    root_distribution,
    support_bound,
    truncate_tables,
)
from .oracle import (
    BudgetExceededError,
    CountProfile,
    continuous_root_density,
    enumerate_functions,
)
from .sampling import (
    TreeFunction,
    derive_seed,
    empirical_root_distribution,
    gibbs_chains,
    sample_continuous_gibbs,
    sample_exact,
    sample_root_values_gibbs,
    validate_tree_function,
)
from .verify import (
    VerificationReport,
    check_alpha_condition,
    check_continuous_tail,
    check_decay,
    check_double_exponential,
    check_root_zero_bound,
    check_strengthened_d2,
    check_unimodality,
    decay_alpha,
    scan_depth_limit,
    verify_grid,
    verify_instance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
