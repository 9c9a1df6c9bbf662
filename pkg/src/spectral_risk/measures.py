"""Risk measures over loss distributions.

Value at risk reads a single quantile.  Expected shortfall and the general
spectral measures are weight-averaged quantile integrals; the weight family
decides how strongly the bad tail is emphasised.  Lower partial moments
summarise shortfall below a target on raw samples.
"""

from __future__ import annotations

import numpy as np

from .distributions import QuantileSource, quantile
from .quadrature import QuadratureConfig, srm_converged, srm_replication
from .risk_aversion import WeightSpec

__all__ = ["var", "es", "srm", "exponential_srm", "power_srm", "lpm"]


def var(source: QuantileSource, alpha: float) -> float:
    """Value at risk: the loss quantile at confidence alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return quantile(source, alpha)


def srm(source: QuantileSource, spec: WeightSpec, config: QuadratureConfig | None = None) -> float:
    """Spectral risk measure: the weight-averaged quantile integral.

    Defaults to the replication scheme on its standard grid; pass a config
    with scheme converged for singularity-aware adaptive quadrature.
    """
    if config is None:
        config = QuadratureConfig()
    if config.scheme == "converged":
        return srm_converged(source, spec, rel_tol=config.rel_tol).value
    return srm_replication(source, spec, config).value


def es(source: QuantileSource, alpha: float, config: QuadratureConfig | None = None) -> float:
    """Expected shortfall at confidence alpha: the average loss beyond VaR.

    Without a config this uses the converged scheme, whose single
    singularity at p = 1 it resolves exactly for bounded sources.
    """
    spec = WeightSpec.es(alpha)
    if config is None:
        return srm_converged(source, spec, rel_tol=1e-9).value
    return srm(source, spec, config)


def exponential_srm(source: QuantileSource, a: float, config: QuadratureConfig | None = None) -> float:
    """Spectral risk measure under the exponential weight family."""
    return srm(source, WeightSpec.exponential(a=a), config)


def power_srm(source: QuantileSource, c: float, config: QuadratureConfig | None = None) -> float:
    """Spectral risk measure under the power weight family."""
    return srm(source, WeightSpec.power(c), config)


def lpm(sample, target: float, order: float) -> float:
    """Lower partial moment: mean of max(0, target - x) ** order.

    order 0 counts the fraction of strict shortfalls (0 ** 0 counts as 0),
    order 1 is the mean shortfall, order 2 its second moment, and so on.
    """
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise ValueError("sample must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample values must be finite")
    if order < 0:
        raise ValueError("order must be non-negative")
    short = np.maximum(target - arr, 0.0)
    if order == 0:
        return float(np.mean(short > 0.0))
    return float(np.mean(short**order))
