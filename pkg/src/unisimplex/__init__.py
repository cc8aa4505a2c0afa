"""Uniform random probability vectors over ``n`` outcomes.

The main entry points are :func:`sample_stick_breaking` for one point and
:func:`sample_batch` / :func:`generate` for many. Batch kernels come from a
compiled extension when it was built, else from numpy; see ``BACKEND``.
"""

from ._backend import BACKEND, available_backends, set_backend
from .marginal import (
    DomainError,
    MarginalModel,
    inverse_cdf,
    marginal_cdf,
    marginal_pdf,
    shape_exponent,
)
from .samplers import (
    BudgetExceededError,
    SamplerMethod,
    SamplerStats,
    SimplexPoint,
    chain_density,
    chain_log_density,
    chain_log_density_batch,
    default_max_trials,
    generate,
    iter_shards,
    sample,
    sample_batch,
    sample_exponential,
    sample_rejection,
    sample_rescaled_uniforms,
    sample_sorted_spacings,
    sample_stick_breaking,
)
from .source import ReplaySource, SourceExhaustedError, UniformSource, substream

__version__ = "0.1.0"
