"""Numerics and exact samplers for Airy wanderer line ensembles.

The package covers the full pipeline from discrete Schur-process sampling
through KPZ rescaling to contour-quadrature evaluation of the limiting
determinantal kernel:

- ``params``: parameter sets (a, b, c), support indices, domain edges, and
  the normalization of finite-class parameters into the positive class.
- ``partitions``: partitions, interlacing, skew Schur weights, and
  brute-force enumeration of small Schur processes.
- ``truncgeom``: truncated shifted geometric distributions with exact
  quantile inversion and stochastic-domination checks.
- ``sampler``: push-block quantile dynamics driven by a counter-based
  noise field, plus monotone couplings.
- ``scaling``: spiked parameter sequences, line-ensemble embedding, and
  rescaling into Airy coordinates.
- ``kernel``: contour quadrature for the limiting kernel K = K1 + K2 + K3.
- ``moments``: factorial moments of rescaled point counts and Fredholm
  gap probabilities.
- ``bridges``: avoiding Brownian bridges and Gibbs-resampling checks.
- ``cli``: experiment harness.
"""

from wanderlines.params import ParamSet, SupportInfo, DomainEdges

__all__ = ["ParamSet", "SupportInfo", "DomainEdges"]

__version__ = "0.1.0"
