"""Single-variable marginal laws with the analytic facts the checks need:
absolute moments, the tail ``P(|X| > y)`` and its regular-variation index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = ["Marginal", "normal", "rademacher", "symmetric_pareto", "cauchy", "zero",
           "uniform", "from_spec"]


@dataclass(frozen=True)
class Marginal:
    """A symmetric marginal law.

    ``tail_index`` is ``gamma`` with ``P(|X| > y) ~ c y**-gamma`` (``inf`` for
    light or bounded tails); ``support`` is the essential sup of ``|X|``.
    """

    name: str
    scale: float = 1.0
    shape: float = math.nan

    @property
    def tail_index(self) -> float:
        if self.name in ("pareto",):
            return self.shape
        if self.name == "cauchy":
            return 1.0
        return math.inf

    @property
    def support(self) -> float:
        if self.name == "rademacher":
            return self.scale
        if self.name == "uniform":
            return self.scale
        if self.name == "zero":
            return 0.0
        return math.inf

    def sample(self, gen: np.random.Generator, size) -> np.ndarray:
        if self.name == "normal":
            return self.scale * gen.standard_normal(size)
        if self.name == "rademacher":
            return self.scale * (2.0 * gen.integers(0, 2, size=size) - 1.0)
        if self.name == "pareto":
            u = 1.0 - gen.random(size)  # (0, 1]
            sign = 2.0 * gen.integers(0, 2, size=size) - 1.0
            return self.scale * sign * u ** (-1.0 / self.shape)
        if self.name == "cauchy":
            return self.scale * gen.standard_cauchy(size)
        if self.name == "uniform":
            return gen.uniform(-self.scale, self.scale, size)
        if self.name == "zero":
            return np.zeros(size)
        raise ValueError(f"unknown marginal {self.name!r}")

    def abs_moment(self, p: float) -> float:
        """``E|X|**p`` (``inf`` when it does not exist)."""
        s = self.scale
        if self.name == "normal":
            return s**p * 2.0 ** (p / 2) * special.gamma((p + 1) / 2) / math.sqrt(math.pi)
        if self.name == "rademacher":
            return s**p
        if self.name == "pareto":
            return s**p * self.shape / (self.shape - p) if p < self.shape else math.inf
        if self.name == "cauchy":
            return s**p / math.cos(math.pi * p / 2) if p < 1 else math.inf
        if self.name == "uniform":
            return s**p / (p + 1)
        if self.name == "zero":
            return 0.0
        raise ValueError(f"unknown marginal {self.name!r}")

    @property
    def variance(self) -> float:
        return self.abs_moment(2.0)

    def tail(self, y) -> np.ndarray:
        """``P(|X| > y)``."""
        y = np.asarray(y, dtype=np.float64)
        s = self.scale
        if self.name == "normal":
            return special.erfc(y / (s * math.sqrt(2.0)))
        if self.name == "rademacher":
            return (y < s).astype(float)
        if self.name == "pareto":
            return np.where(y < s, 1.0, (np.maximum(y, s) / s) ** (-self.shape))
        if self.name == "cauchy":
            return 1.0 - (2.0 / math.pi) * np.arctan(np.maximum(y, 0.0) / s)
        if self.name == "uniform":
            return np.clip(1.0 - y / s, 0.0, 1.0)
        if self.name == "zero":
            return np.zeros_like(y)
        raise ValueError(f"unknown marginal {self.name!r}")

    def tail_majorant(self):
        """``(c, gamma, y0)`` with ``P(|X| > y) <= c * y**-gamma`` for ``y >= y0``.

        Bounded laws return ``gamma = inf`` and ``y0`` = support (tail is zero
        beyond it). Normal tails use the Markov bound of order 8.
        """
        if self.support < math.inf:
            return (0.0, math.inf, self.support)
        if self.name == "pareto":
            return (self.scale**self.shape, self.shape, self.scale)
        if self.name == "cauchy":
            return (2.0 * self.scale / math.pi, 1.0, 0.0)
        return (self.abs_moment(8.0), 8.0, 1.0)

    @property
    def mean_zero(self) -> bool:
        return self.name != "cauchy"

    def to_spec(self) -> dict:
        d = {"name": self.name, "scale": self.scale}
        if self.name == "pareto":
            d["tail_index"] = self.shape
        return d


def normal(scale: float = 1.0) -> Marginal:
    return Marginal("normal", scale)


def rademacher(scale: float = 1.0) -> Marginal:
    return Marginal("rademacher", scale)


def symmetric_pareto(tail_index: float, scale: float = 1.0) -> Marginal:
    """Symmetric law with ``P(|X| > y) = (y/scale)**-tail_index`` for ``y >= scale``."""
    if not tail_index > 0:
        raise ValueError("tail_index must be positive")
    return Marginal("pareto", scale, float(tail_index))


def cauchy(scale: float = 1.0) -> Marginal:
    return Marginal("cauchy", scale)


def uniform(half_width: float = 1.0) -> Marginal:
    return Marginal("uniform", half_width)


def zero() -> Marginal:
    return Marginal("zero", 0.0)


def from_spec(spec) -> Marginal:
    """Build from ``"normal"`` or ``{"name": "pareto", "tail_index": 1.8, "scale": 1}``."""
    if isinstance(spec, Marginal):
        return spec
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec["name"]
    scale = float(spec.get("scale", 1.0))
    if name == "normal":
        return normal(scale)
    if name == "rademacher":
        return rademacher(scale)
    if name == "pareto":
        return symmetric_pareto(float(spec["tail_index"]), scale)
    if name == "cauchy":
        return cauchy(scale)
    if name == "uniform":
        return uniform(scale)
    if name == "zero":
        return zero()
    raise ValueError(f"unknown marginal {name!r}")
