"""Empirical quantile process simulation and verification toolkit.

The heavy lifting lives in the compiled extension ``quantclt._core``;
this package re-exports its public surface.
"""

from quantclt._core import (  # noqa: F401
    LevelGrid,
    PathBatch,
    ProcessSpec,
    QuantileField,
    ScalarSampler,
    TimeGrid,
    TimeGrid2D,
    __version__,
    add_shift,
    analytic,
    empirical_cdf,
    empirical_quantile,
    gen_brownian_sheet,
    gen_compound_poisson,
    gen_fbm,
    gen_sym_stable,
    generate,
    order_statistics,
    quantile_field,
    quantile_rank,
    run_experiment_toml,
    sup_statistic,
    vervaat_identity_check,
)
