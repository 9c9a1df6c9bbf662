"""Risk-aversion weight functions, utility helpers, and admissibility checks.

A weight function maps a cumulative probability p in [0, 1] to a
non-negative density over quantiles.  A weight function is admissible as a
spectral risk aversion function when it is non-negative, integrates to one,
and never decreases in p; a stricter variant additionally demands that it
actually rises somewhere, so that worse outcomes get strictly more weight
than some better ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError

__all__ = [
    "WeightSpec",
    "AdmissibilityReport",
    "weight",
    "weight_mass",
    "utility_exponential",
    "utility_power",
    "ara",
    "rra",
    "check_admissibility",
]

_FAMILIES = ("exponential", "power", "es", "flat")


@dataclass(frozen=True)
class WeightSpec:
    """A parametric weight family plus its parameter values.

    Families:
      exponential  phi(p) = lambda * exp(-a * (1 - p)),  a > 0
      power        phi(p) = c * (1 - p) ** (c - 1),      0 < c < 1
      es           phi(p) = 1 / (1 - alpha) for p >= alpha, else 0
      flat         phi(p) = 1
    """

    family: str
    a: float | None = None
    c: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        want = {"exponential": "a", "power": "c", "es": "alpha", "flat": None}[self.family]
        for name in ("a", "c", "alpha"):
            val = getattr(self, name)
            if name == want:
                if val is None:
                    raise ValueError(f"{self.family} family needs parameter {name}")
            elif val is not None:
                raise ValueError(f"{self.family} family does not take parameter {name}")
        if self.family == "exponential" and not self.a > 0.0:
            raise ValueError("a must be positive")
        if self.family == "power" and not 0.0 < self.c < 1.0:
            raise ValueError("c must lie in (0, 1)")
        if self.family == "es" and not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def lambda_(self) -> float:
        """Normalising constant making the weight integrate to one."""
        if self.family == "exponential":
            # a / (1 - exp(-a)), stable for small a via expm1
            return self.a / -math.expm1(-self.a)
        if self.family == "power":
            return self.c * (1.0 - self.c)
        if self.family == "es":
            return 1.0 / (1.0 - self.alpha)
        return 1.0

    @classmethod
    def exponential(cls, a: float | None = None, *, gamma: float | None = None) -> "WeightSpec":
        """Exponential family, parameterised by a or by its reciprocal gamma."""
        if (a is None) == (gamma is None):
            raise ValueError("give exactly one of a or gamma")
        if gamma is not None:
            if not gamma > 0.0:
                raise ValueError("gamma must be positive")
            a = 1.0 / gamma
        return cls(family="exponential", a=float(a))

    @classmethod
    def power(cls, c: float) -> "WeightSpec":
        return cls(family="power", c=float(c))

    @classmethod
    def es(cls, alpha: float) -> "WeightSpec":
        return cls(family="es", alpha=float(alpha))

    @classmethod
    def flat(cls) -> "WeightSpec":
        return cls(family="flat")

    def to_json(self) -> str:
        payload = {"family": self.family}
        for name in ("a", "c", "alpha"):
            val = getattr(self, name)
            if val is not None:
                payload[name] = val
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "WeightSpec":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"bad weight spec JSON: {exc}") from exc
        if not isinstance(payload, dict) or "family" not in payload:
            raise ValueError("weight spec JSON must be an object with a 'family' key")
        extra = set(payload) - {"family", "a", "c", "alpha"}
        if extra:
            raise ValueError(f"unknown weight spec keys: {sorted(extra)}")
        return cls(
            family=payload["family"],
            a=payload.get("a"),
            c=payload.get("c"),
            alpha=payload.get("alpha"),
        )


def _check_unit_interval(arr: np.ndarray):
    if arr.size and not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise ValueError("p must lie in [0, 1]")


def weight(spec: WeightSpec, p):
    """Evaluate the weight function at p (scalar or array), p in [0, 1].

    The power family diverges at p = 1 and raises there rather than
    returning inf.
    """
    arr = np.asarray(p, dtype=float)
    _check_unit_interval(arr)
    fam = spec.family
    if fam == "exponential":
        out = spec.lambda_ * np.exp(-spec.a * (1.0 - arr))
    elif fam == "power":
        if np.any(arr == 1.0):
            raise SingularityError("power weight diverges at p = 1")
        out = spec.c * (1.0 - arr) ** (spec.c - 1.0)
    elif fam == "es":
        out = np.where(arr >= spec.alpha, 1.0 / (1.0 - spec.alpha), 0.0)
    else:
        out = np.ones_like(arr)
    if arr.ndim == 0:
        return float(out)
    return out


def weight_mass(spec: WeightSpec, p):
    """Cumulative weight on [0, p]: the integral of the weight up to p."""
    arr = np.asarray(p, dtype=float)
    _check_unit_interval(arr)
    fam = spec.family
    if fam == "exponential":
        a = spec.a
        denom = -math.expm1(-a)
        out = np.empty_like(arr, dtype=float)
        # exp(-a) * expm1(a p) avoids cancellation for small a p; the direct
        # difference takes over once a p is large enough to overflow expm1.
        low = a * arr < 50.0
        out[low] = math.exp(-a) * np.expm1(a * arr[low])
        out[~low] = np.exp(-a * (1.0 - arr[~low])) - math.exp(-a)
        out = out / denom
    elif fam == "power":
        out = 1.0 - (1.0 - arr) ** spec.c
    elif fam == "es":
        out = np.clip((arr - spec.alpha) / (1.0 - spec.alpha), 0.0, 1.0)
    else:
        out = arr.copy()
    if arr.ndim == 0:
        return float(out)
    return out


def utility_exponential(x, a: float):
    """Exponential utility -exp(-a x); constant absolute risk aversion a."""
    if not a > 0.0:
        raise ValueError("a must be positive")
    out = -np.exp(-a * np.asarray(x, dtype=float))
    return float(out) if np.ndim(x) == 0 else out


def utility_power(x, c: float):
    """Power utility x**(1 - c) / (1 - c) for x > 0; constant relative risk aversion c."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    arr = np.asarray(x, dtype=float)
    if arr.size and not np.all(arr > 0.0):
        raise ValueError("x must be positive")
    out = arr ** (1.0 - c) / (1.0 - c)
    return float(out) if np.ndim(x) == 0 else out


def ara(utility, x: float, step: float = 1e-4) -> float:
    """Absolute risk aversion -u''(x)/u'(x) by central differences."""
    if not step > 0.0:
        raise ValueError("step must be positive")
    up = utility(x + step)
    u0 = utility(x)
    um = utility(x - step)
    d1 = (up - um) / (2.0 * step)
    if abs(d1) < 1e-12:
        raise ValueError(f"utility derivative vanishes near x = {x}")
    d2 = (up - 2.0 * u0 + um) / (step * step)
    return -d2 / d1


def rra(utility, x: float, step: float = 1e-4) -> float:
    """Relative risk aversion -x u''(x)/u'(x) by central differences."""
    return x * ara(utility, x, step)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the admissibility checks for a candidate weight function.

    Evidence fields hold the worst case seen even when a check passes:
    positivity_worst is (p, value) at the minimum, increasingness_worst is
    (p_left, p_right, rise) for the most decreasing adjacent pair.
    """

    positivity: bool
    positivity_worst: tuple[float, float]
    normalisation: bool
    normalisation_integral: float
    increasingness: bool
    increasingness_worst: tuple[float, float, float]
    strict_rise: bool
    grid_size: int

    @property
    def admissible(self) -> bool:
        return self.positivity and self.normalisation and self.increasingness and self.strict_rise

    def to_dict(self) -> dict:
        return {
            "positivity": self.positivity,
            "positivity_worst_p": self.positivity_worst[0],
            "positivity_worst_value": self.positivity_worst[1],
            "normalisation": self.normalisation,
            "normalisation_integral": self.normalisation_integral,
            "increasingness": self.increasingness,
            "increasingness_worst_p_left": self.increasingness_worst[0],
            "increasingness_worst_p_right": self.increasingness_worst[1],
            "increasingness_worst_rise": self.increasingness_worst[2],
            "strict_rise": self.strict_rise,
            "grid_size": self.grid_size,
            "admissible": self.admissible,
        }


def _as_weight_fn(candidate):
    if isinstance(candidate, WeightSpec):
        return lambda p: weight(candidate, p)
    if callable(candidate):
        return candidate
    raise TypeError("candidate must be a WeightSpec or a callable of p")


def _eval_grid(fn, ps: np.ndarray) -> np.ndarray:
    """Evaluate fn on ps, tolerating callables that only accept scalars or
    that blow up at individual points (those points come back as nan)."""
    try:
        vals = np.asarray(fn(ps), dtype=float)
        if vals.shape == ps.shape:
            return vals
    except (ValueError, TypeError, ArithmeticError):
        pass
    out = np.empty_like(ps)
    for i, p in enumerate(ps):
        try:
            out[i] = float(fn(float(p)))
        except (ValueError, TypeError, ArithmeticError):
            out[i] = math.nan
    return out


def _panel_simpson(fn, lo: float, hi: float, n: int = 65) -> float:
    xs = np.linspace(lo, hi, n)
    ys = _eval_grid(fn, xs)
    coef = np.full(n, 2.0)
    coef[1::2] = 4.0
    coef[0] = coef[-1] = 1.0
    h = (hi - lo) / (n - 1)
    return float(coef @ ys) * h / 3.0


def _adaptive_panel(fn, lo: float, hi: float, tol: float, depth: int = 48) -> float:
    whole = _panel_simpson(fn, lo, hi)
    return _refine_panel(fn, lo, hi, whole, tol, depth)


def _refine_panel(fn, lo, hi, whole, tol, depth):
    mid = 0.5 * (lo + hi)
    left = _panel_simpson(fn, lo, mid)
    right = _panel_simpson(fn, mid, hi)
    delta = left + right - whole
    if not math.isfinite(delta):
        return math.nan
    if abs(delta) <= 15.0 * tol or depth <= 0:
        return left + right + delta / 15.0
    return (
        _refine_panel(fn, lo, mid, left, 0.5 * tol, depth - 1)
        + _refine_panel(fn, mid, hi, right, 0.5 * tol, depth - 1)
    )


def _weight_integral(fn, tol: float = 1e-14) -> float:
    """Integrate a candidate weight over [0, 1].

    The panel widths halve geometrically toward p = 1 so that integrable
    singularities there (the power family for small c) stay outside every
    evaluated panel.  The march stops while panels are still wide enough
    to integrate reliably; the remaining tail is completed as a geometric
    sum with the decay ratio measured across a window of panels.  That
    completion is exact for a power-law tail, which is the singular case,
    and the window keeps the 1 / (1 - ratio) amplification of panel noise
    in check when the decay is slow.
    """
    total = _adaptive_panel(fn, 0.0, 0.5, tol)
    left = 0.5
    width = 0.25
    window = []
    rest = 0.0
    # below this width the 65-point panel grid starts losing distinct nodes
    while width > 1e-12:
        right = left + width
        part = _adaptive_panel(fn, left, right, tol)
        total += part
        if not math.isfinite(total):
            return total
        rest = 0.0
        window.append(part)
        if len(window) > 17:
            window.pop(0)
        if len(window) >= 2 and window[0] != 0.0:
            m = len(window) - 1
            ratio_m = window[-1] / window[0]
            if 0.0 < ratio_m < 1.0:
                ratio = ratio_m ** (1.0 / m)
                rest = window[-1] * ratio / (1.0 - ratio)
                if abs(rest) < 1e-9:
                    break
        left = right
        width *= 0.5
    return total + rest


def check_admissibility(candidate, grid_size: int = 1001) -> AdmissibilityReport:
    """Check a WeightSpec or callable against the admissibility conditions.

    Positivity and increasingness are checked on grid_size points strictly
    inside (0, 1); normalisation integrates the candidate over [0, 1].
    Non-finite values show up as failed checks, never as exceptions.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    fn = _as_weight_fn(candidate)
    ps = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    vals = _eval_grid(fn, ps)

    finite = np.isfinite(vals)
    if np.all(finite):
        i = int(np.argmin(vals))
        positivity = bool(vals[i] >= 0.0)
    else:
        i = int(np.argmax(~finite))
        positivity = False
    positivity_worst = (float(ps[i]), float(vals[i]))

    rises = np.diff(vals)
    with np.errstate(invalid="ignore"):
        increasingness = bool(np.all(rises >= -1e-12))
        strict_rise = bool(np.any(rises > 0.0))
    if np.all(np.isnan(rises)):
        j = 0
    else:
        j = int(np.nanargmin(rises))
    increasingness_worst = (float(ps[j]), float(ps[j + 1]), float(rises[j]))

    integral = _weight_integral(fn)
    normalisation = bool(math.isfinite(integral) and abs(integral - 1.0) <= 1e-6)

    return AdmissibilityReport(
        positivity=positivity,
        positivity_worst=positivity_worst,
        normalisation=normalisation,
        normalisation_integral=float(integral),
        increasingness=increasingness,
        increasingness_worst=increasingness_worst,
        strict_rise=strict_rise,
        grid_size=grid_size,
    )
