"""Deterministic numerics for weight series, tail sums, rate envelopes and
the constants that move a Kolmogorov-type bound to a Hajek-Renyi-type bound.

Nothing in this module draws random numbers.

Sequences are 1-indexed in the mathematical sense: ``values[0]`` holds the
first term. Closed-form families (power law, geometric) can be extended to
any horizon and come with analytic tail bounds; explicit lists are treated as
finitely supported, i.e. zero past their last stored entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _summation

__all__ = [
    "WeightSequence",
    "NormalizerSequence",
    "SeriesSum",
    "Trend",
    "TailSeries",
    "DiniSum",
    "PhiFunction",
    "PhiCertificate",
    "RateEnvelope",
    "AbelCheck",
    "NormalizerWitness",
    "HorizonError",
    "DivergentSeriesError",
    "PhiCertificationError",
    "series_ratio_sum",
    "tail_series",
    "dini_transform",
    "phi_dini_transform",
    "hu_hu_envelope",
    "phi_envelope",
    "abel_condition_check",
    "slower_normalizer",
    "kounias_weng_alpha",
    "kounias_weng_domination",
    "constant_transfer",
    "TRANSFER_FORMS",
]


class HorizonError(ValueError):
    """A sequence does not cover the requested horizon."""


class DivergentSeriesError(ValueError):
    pass


class PhiCertificationError(ValueError):
    pass


def _index(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Non-negative weights ``a_1, ..., a_N``.

    ``family`` is one of ``"power"`` (``coef * l**exponent``), ``"geometric"``
    (``coef * ratio**l``) or ``"explicit"``. Explicit sequences are zero beyond
    their stored prefix.
    """

    values: np.ndarray
    family: str = "explicit"
    params: tuple = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("weights must be a non-empty 1-D array")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("weights must be finite and non-negative")
        if self.family not in ("power", "geometric", "explicit"):
            raise ValueError(f"unknown family {self.family!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def power(cls, coef: float, exponent: float, horizon: int) -> "WeightSequence":
        if coef < 0:
            raise ValueError("coef must be non-negative")
        return cls(coef * _index(horizon) ** exponent, "power", (float(coef), float(exponent)))

    @classmethod
    def constant(cls, value: float, horizon: int) -> "WeightSequence":
        return cls.power(value, 0.0, horizon)

    @classmethod
    def geometric(cls, coef: float, ratio: float, horizon: int) -> "WeightSequence":
        if coef < 0 or not 0 < ratio < 1:
            raise ValueError("geometric weights need coef >= 0 and 0 < ratio < 1")
        return cls(coef * ratio ** _index(horizon), "geometric", (float(coef), float(ratio)))

    @classmethod
    def explicit(cls, values) -> "WeightSequence":
        return cls(np.asarray(values, dtype=np.float64), "explicit", ())

    @property
    def horizon(self) -> int:
        return self.values.size

    @property
    def is_zero_beyond_horizon(self) -> bool:
        if self.family == "explicit":
            return True
        return self.params[0] == 0.0

    def prefix(self, n: int) -> np.ndarray:
        """First ``n`` values, regenerating closed forms when ``n`` exceeds the stored horizon."""
        if n <= self.horizon:
            return self.values[:n]
        if self.family == "power":
            c, a = self.params
            return c * _index(n) ** a
        if self.family == "geometric":
            c, q = self.params
            return c * q ** _index(n)
        out = np.zeros(n)
        out[: self.horizon] = self.values
        return out

    def tail_sum_bounds(self, n: int) -> Optional[tuple[float, float]]:
        """Bounds on ``sum_{l > n} a_l``, or ``None`` if no finite bound is known."""
        if self.is_zero_beyond_horizon and (self.family != "explicit" or n >= self.horizon):
            return (0.0, 0.0)
        if self.family == "explicit":
            rest = _summation.total(self.values[n:])
            return (rest, rest)
        if self.family == "geometric":
            c, q = self.params
            t = c * q ** (n + 1) / (1.0 - q)
            return (t, t)
        c, a = self.params
        if a >= -1.0:
            return None
        s = -a
        # convex decreasing terms: integral over [n+1, inf) <= sum <= integral over [n+1/2, inf)
        return (c * (n + 1) ** (1 - s) / (s - 1), c * (n + 0.5) ** (1 - s) / (s - 1))


@dataclass(frozen=True, eq=False)
class NormalizerSequence:
    """Positive non-decreasing normalizers ``b_1 <= b_2 <= ...``.

    ``unbounded`` is derived for power families and must be asserted by the
    caller for explicit lists.
    """

    values: np.ndarray
    family: str = "explicit"
    params: tuple = ()
    unbounded: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("normalizer must be a non-empty 1-D array")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("normalizer must be strictly positive")
        if np.any(np.diff(v) < 0):
            raise ValueError("normalizer must be non-decreasing")
        if self.family not in ("power", "explicit"):
            raise ValueError(f"unknown family {self.family!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def power(cls, coef: float, exponent: float, horizon: int) -> "NormalizerSequence":
        if coef <= 0 or exponent < 0:
            raise ValueError("power normalizer needs coef > 0 and exponent >= 0")
        return cls(coef * _index(horizon) ** exponent, "power",
                   (float(coef), float(exponent)), unbounded=exponent > 0)

    @classmethod
    def constant(cls, value: float, horizon: int) -> "NormalizerSequence":
        return cls.power(value, 0.0, horizon)

    @classmethod
    def explicit(cls, values, unbounded: bool = False) -> "NormalizerSequence":
        return cls(np.asarray(values, dtype=np.float64), "explicit", (), unbounded)

    @property
    def horizon(self) -> int:
        return self.values.size

    def prefix(self, n: int) -> np.ndarray:
        if n <= self.horizon:
            return self.values[:n]
        if self.family == "power":
            c, e = self.params
            return c * _index(n) ** e
        raise HorizonError(f"explicit normalizer has {self.horizon} terms, need {n}")

    def value_at(self, l: int) -> Optional[float]:
        """``b_l`` (1-based) if known."""
        if l <= self.horizon:
            return float(self.values[l - 1])
        if self.family == "power":
            c, e = self.params
            return c * float(l) ** e
        return None


# -- trend verdicts ---------------------------------------------------------

@dataclass(frozen=True)
class Trend:
    """Increment of a partial-sum sequence over its last horizon doubling."""

    increment: float
    relative_increment: float
    increment_ratio: float
    converging: bool


def partial_sum_trend(partial: np.ndarray, tol: float = 1e-6, ratio_tol: float = 0.95) -> Trend:
    """Numerical convergence trend of ``partial`` (never a proof).

    Converging when the last-doubling increment is below ``tol`` relative to the
    current value, or when increments shrink by at least ``ratio_tol`` per
    doubling (a p-series with p > 1 shrinks by ``2**(1-p)``).
    """
    n = partial.size
    last = float(partial[-1])
    if n < 4:
        return Trend(0.0, 0.0, 0.0, True)
    half, quarter = n // 2, n // 4
    inc = last - float(partial[half - 1])
    prev = float(partial[half - 1]) - float(partial[quarter - 1])
    rel = abs(inc) / abs(last) if last != 0 else abs(inc)
    if prev == 0.0:
        ratio = 0.0 if inc == 0.0 else math.inf
    else:
        ratio = abs(inc) / abs(prev)
    return Trend(inc, rel, ratio, bool(rel <= tol or ratio <= ratio_tol))


# -- series and tails -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SeriesSum:
    """Partial sums of ``sum a_l / b_l**r`` plus a convergence diagnosis.

    ``status`` is ``"converged"`` (an analytic tail bound exists), ``"divergent"``
    (closed forms prove divergence) or ``"inconclusive"``.
    """

    terms: np.ndarray
    partial_sums: np.ndarray
    status: str
    limit: Optional[float]
    tail_lower: Optional[float]
    tail_bound: Optional[float]
    exact: bool
    trend: Trend

    @property
    def partial_sum(self) -> float:
        return float(self.partial_sums[-1])


def _validate_r(r: float) -> None:
    if not r > 0:
        raise ValueError("r must be positive")


def _ratio_tail(alpha: WeightSequence, b: NormalizerSequence, r: float, n: int):
    """Interval for ``sum_{l>n} alpha_l / b_l**r``; ``"divergent"``; or ``None``."""
    if alpha.is_zero_beyond_horizon and (alpha.family != "explicit" or n >= alpha.horizon):
        return (0.0, 0.0, True)
    if alpha.family == "explicit":
        # explicit weights stored past n: need b there too
        stop = alpha.horizon
        try:
            bb = b.prefix(stop)[n:]
        except HorizonError:
            return None
        t = _summation.total(alpha.values[n:stop] / bb ** r)
        return (t, t, True)
    if alpha.family == "power" and b.family == "power":
        c, a = alpha.params
        d, e = b.params
        s = e * r - a
        k = c / d ** r
        if s <= 1.0:
            return "divergent"
        return (k * (n + 1) ** (1 - s) / (s - 1), k * (n + 0.5) ** (1 - s) / (s - 1), False)
    if alpha.family == "geometric":
        c, q = alpha.params
        rest = c * q ** (n + 1) / (1.0 - q)
        nxt = b.value_at(n + 1)
        if nxt is not None:
            hi = rest / nxt ** r
            if b.family == "power" and b.params[1] == 0.0:
                return (hi, hi, True)
            return (c * q ** (n + 1) / nxt ** r, hi, False)
        return (0.0, rest / b.values[-1] ** r, False)
    # power weights against an explicit normalizer: b_l >= b_n beyond the horizon
    bounds = alpha.tail_sum_bounds(n)
    if bounds is None:
        return None
    return (0.0, bounds[1] / b.prefix(n)[-1] ** r, False)


def _terms(alpha: WeightSequence, b: NormalizerSequence, r: float, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("horizon must be positive")
    return alpha.prefix(n) / b.prefix(n) ** r


def series_ratio_sum(alpha: WeightSequence, b: NormalizerSequence, r: float,
                     N: Optional[int] = None, tol: float = 1e-6) -> SeriesSum:
    """Partial sums of ``sum_l alpha_l / b_l**r`` up to ``N`` with a tail diagnosis.

    Examples
    --------
    >>> s = series_ratio_sum(WeightSequence.constant(1, 10), NormalizerSequence.power(1, 1, 10), 2, 10**6)
    >>> round(s.limit, 6), s.tail_bound < 1e-6
    (1.644934, True)
    """
    _validate_r(r)
    N = alpha.horizon if N is None else int(N)
    terms = _terms(alpha, b, r, N)
    partial = _summation.cumsum(terms)
    trend = partial_sum_trend(partial, tol)
    tail = _ratio_tail(alpha, b, r, N)
    last = float(partial[-1])
    if tail == "divergent":
        return SeriesSum(terms, partial, "divergent", None, None, None, False, trend)
    if tail is None:
        return SeriesSum(terms, partial, "inconclusive", None, None, None, False, trend)
    lo, hi, exact = tail
    return SeriesSum(terms, partial, "converged", last + 0.5 * (lo + hi), lo, hi, exact, trend)


@dataclass(frozen=True, eq=False)
class TailSeries:
    """Tail sums ``t_k = sum_{l>=k} alpha_l / b_l**r`` for ``k = 1..N``.

    ``values`` are lower ends; the true tail lies in
    ``[values, values + truncation_error_bound]``.
    """

    values: np.ndarray
    terms: np.ndarray
    truncation_error_bound: np.ndarray
    exact: bool

    @property
    def upper(self) -> np.ndarray:
        return self.values + self.truncation_error_bound


def tail_series(alpha: WeightSequence, b: NormalizerSequence, r: float,
                N: Optional[int] = None, majorant: Optional[float] = None) -> TailSeries:
    """Tail sums of ``alpha_l / b_l**r`` on the horizon.

    ``majorant`` is a caller-supplied analytic bound on the mass beyond ``N``,
    used when the families admit no built-in bound.
    """
    _validate_r(r)
    N = alpha.horizon if N is None else int(N)
    terms = _terms(alpha, b, r, N)
    tail = _ratio_tail(alpha, b, r, N)
    if tail == "divergent":
        raise DivergentSeriesError("sum of alpha_l / b_l**r diverges")
    if tail is None:
        if majorant is None:
            raise DivergentSeriesError("no tail majorant available for these families")
        if majorant < 0:
            raise ValueError("majorant must be non-negative")
        lo, hi, exact = 0.0, float(majorant), majorant == 0
    else:
        lo, hi, exact = tail
    values = _summation.revcumsum(terms) + lo
    return TailSeries(values, terms, np.full(N, hi - lo), bool(exact))


# -- phi functions ----------------------------------------------------------

@dataclass(frozen=True)
class PhiCertificate:
    ok: bool
    partial_sum: float
    tail_bound: float
    reason: str


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """Growth function used to sharpen Dini-type tail transforms.

    ``kind`` is ``"power"`` (``x**delta``), ``"power_log"`` (``x / log(e + x)**2``)
    or ``"custom"`` (arbitrary vectorised callable, trend-only certification).
    """

    kind: str
    delta: Optional[float] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    @classmethod
    def power(cls, delta: float) -> "PhiFunction":
        return cls("power", float(delta), name=f"x^{delta:g}")

    @classmethod
    def power_log(cls) -> "PhiFunction":
        return cls("power_log", name="x/log(e+x)^2")

    @classmethod
    def custom(cls, func: Callable[[np.ndarray], np.ndarray], name: str = "custom") -> "PhiFunction":
        return cls("custom", func=func, name=name)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "power":
            return x ** self.delta
        if self.kind == "power_log":
            return x / np.log(np.e + x) ** 2
        return np.asarray(self.func(x), dtype=np.float64)

    def at_inverse(self, tails: np.ndarray) -> np.ndarray:
        """``phi(1/t)``, with ``t = 0`` mapped to ``inf``."""
        tails = np.asarray(tails, dtype=np.float64)
        with np.errstate(divide="ignore"):
            if self.kind == "power":
                return tails ** (-self.delta)
            return self(1.0 / tails)

    def envelope_factor(self, tails: np.ndarray, r: float) -> np.ndarray:
        """``phi(1/t)**(-1/r)``; zero where ``t = 0``."""
        tails = np.asarray(tails, dtype=np.float64)
        if self.kind == "power":
            return tails ** (self.delta / r)
        out = np.zeros_like(tails)
        pos = tails > 0
        out[pos] = self(1.0 / tails[pos]) ** (-1.0 / r)
        return out

    def certify(self, horizon: int = 10**6) -> PhiCertificate:
        """Check ``sum phi(n)/n**2 < inf`` via partial sums plus an integral tail bound."""
        n = _index(horizon)
        if self.kind == "power":
            d = self.delta
            if not d > 0:
                return PhiCertificate(False, math.nan, math.inf, "phi must increase to infinity (delta > 0)")
            partial = _summation.total(n ** (d - 2.0))
            if d >= 1:
                return PhiCertificate(False, partial, math.inf,
                                      "sum phi(n)/n^2 diverges (harmonic-type tail)")
            tail = (horizon + 0.5) ** (d - 1.0) / (1.0 - d)
            return PhiCertificate(True, partial, tail, "power family with 0 < delta < 1")
        if self.kind == "power_log":
            partial = _summation.total(1.0 / (n * np.log(np.e + n) ** 2))
            # 1/(x log(e+x)^2) <= 1/(x log(x)^2), whose tail integral is 1/log(N)
            return PhiCertificate(True, partial, 1.0 / math.log(horizon), "power-log family")
        vals = self(n) / n**2
        if np.any(~np.isfinite(vals)) or np.any(self(n) <= 0):
            return PhiCertificate(False, math.nan, math.inf, "custom phi not positive and finite")
        trend = partial_sum_trend(_summation.cumsum(vals))
        return PhiCertificate(False, float(np.sum(vals)), math.nan,
                              "custom phi: trend only (converging=%s)" % trend.converging)


def _require_certified(phi: PhiFunction, allow_uncertified: bool) -> PhiCertificate:
    cert = phi.certify()
    if not cert.ok and not (allow_uncertified and phi.kind == "custom"):
        raise PhiCertificationError(cert.reason)
    return cert


# -- Dini transforms --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiniSum:
    partial_sums: np.ndarray
    value: float
    increment: float
    relative_increment: float


def _dini(c: WeightSequence, phi: PhiFunction, N: Optional[int]) -> DiniSum:
    N = c.horizon if N is None else int(N)
    ones = NormalizerSequence.constant(1.0, N)
    tails = tail_series(c, ones, 1.0, N)
    if np.any(tails.values <= 0):
        k = int(np.argmax(tails.values <= 0)) + 1
        raise ValueError(f"tail sum vanishes at index {k}; transform needs positive tails")
    terms = tails.terms * phi.at_inverse(tails.values)
    partial = _summation.cumsum(terms)
    value = float(partial[-1])
    inc = value - float(partial[N // 2 - 1]) if N >= 2 else 0.0
    return DiniSum(partial, value, inc, abs(inc) / value if value else 0.0)


def dini_transform(c: WeightSequence, delta: float, N: Optional[int] = None) -> DiniSum:
    """Partial sums of ``sum_n c_n / t_n**delta`` with ``t_n = sum_{k>=n} c_k``.

    Converges for every ``0 < delta < 1`` whenever ``sum c_k`` does. The
    result reports the increment over the last horizon doubling.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return _dini(c, PhiFunction.power(delta), N)


def phi_dini_transform(c: WeightSequence, phi: PhiFunction, N: Optional[int] = None,
                       allow_uncertified: bool = False) -> DiniSum:
    """Partial sums of ``sum_n c_n * phi(1/t_n)``."""
    _require_certified(phi, allow_uncertified)
    return _dini(c, phi, N)


# -- rate envelopes ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RateEnvelope:
    """Running-maximum envelope ``beta_n = max_{k<=n} b_k * phi(1/t_k)**(-1/r)``.

    ``branch`` is ``"bounded"`` when the envelope is flat over the last horizon
    doubling, else ``"unbounded"``.
    """

    beta: np.ndarray
    ratio: np.ndarray
    tails: np.ndarray
    parameter: object
    source: str
    ratio_decreasing: bool
    branch: str

    @property
    def horizon(self) -> int:
        return self.beta.size


def _ratio_eventually_decreasing(ratio: np.ndarray) -> bool:
    n = ratio.size
    if n < 4:
        return bool(np.all(np.diff(ratio) <= 0))
    tail = ratio[n // 2 - 1:]
    slack = 1e-12 * np.maximum(tail[:-1], 1e-300)
    return bool(np.all(np.diff(tail) <= slack) and tail[-1] < tail[0])


def phi_envelope(alpha: WeightSequence, b: NormalizerSequence, r: float, phi: PhiFunction,
                 N: Optional[int] = None, allow_uncertified: bool = False,
                 majorant: Optional[float] = None, source: str = "phi") -> RateEnvelope:
    _require_certified(phi, allow_uncertified)
    N = alpha.horizon if N is None else int(N)
    tails = tail_series(alpha, b, r, N, majorant)
    if tails.values[0] <= 0:
        raise ValueError("weights are identically zero; no envelope")
    bb = b.prefix(N)
    beta = np.maximum.accumulate(bb * phi.envelope_factor(tails.values, r))
    ratio = beta / bb
    branch = "bounded" if beta[-1] == beta[max(N // 2 - 1, 0)] else "unbounded"
    param = phi.delta if phi.kind == "power" else phi.name
    return RateEnvelope(beta, ratio, tails.values, param, source,
                        _ratio_eventually_decreasing(ratio), branch)


def hu_hu_envelope(alpha: WeightSequence, b: NormalizerSequence, r: float, delta: float = 0.5,
                   N: Optional[int] = None, majorant: Optional[float] = None) -> RateEnvelope:
    """Envelope ``beta_n = max_{k<=n} b_k * t_k**(delta/r)``.

    Identical, entry for entry, to :func:`phi_envelope` with ``phi(x) = x**delta``.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return phi_envelope(alpha, b, r, PhiFunction.power(delta), N, majorant=majorant, source="hu_hu")


# -- summability conditions -------------------------------------------------

@dataclass(frozen=True, eq=False)
class AbelCheck:
    abel_sum_converges: bool
    normalized_bounded: bool
    series_converges: Optional[bool]
    abel_partial_sums: np.ndarray
    normalized_cumulative: np.ndarray
    abel_residual: float
    series: SeriesSum


def abel_condition_check(alpha: WeightSequence, b: NormalizerSequence, r: float,
                         N: Optional[int] = None) -> AbelCheck:
    """Summation-by-parts conditions for ``sum alpha_l / b_l**r < inf``.

    Evaluates ``sum_l L_l (b_l**-r - b_{l+1}**-r)`` (trend) and
    ``sup_n L_n / b_n**r`` (boundedness), with ``L_n = alpha_1 + ... + alpha_n``,
    and checks the identity
    ``sum_{l<=n} alpha_l/b_l**r = L_n/b_n**r + sum_{l<n} L_l (b_l**-r - b_{l+1}**-r)``
    on every prefix.
    """
    _validate_r(r)
    N = alpha.horizon if N is None else int(N)
    cum = _summation.cumsum(alpha.prefix(N))
    inv = b.prefix(N) ** (-r)
    abel_terms = cum[:-1] * (inv[:-1] - inv[1:])
    abel_partial = _summation.cumsum(abel_terms) if N > 1 else np.zeros(0)
    normalized = cum * inv
    series = series_ratio_sum(alpha, b, r, N)

    abel_ok = partial_sum_trend(abel_partial).converging if N > 1 else True
    half = max(N // 2, 1)
    bounded = bool(np.max(normalized[half:], initial=0.0) <= np.max(normalized[:half]) * (1 + 1e-12))

    rhs = normalized.copy()
    rhs[1:] += abel_partial
    scale = np.maximum(1.0, np.abs(series.partial_sums))
    residual = float(np.max(np.abs(series.partial_sums - rhs) / scale))

    implied = None
    if abel_ok and bounded:
        implied = series.status == "converged" or (series.status == "inconclusive" and series.trend.converging)
    return AbelCheck(bool(abel_ok), bounded, implied, abel_partial, normalized, residual, series)


@dataclass(frozen=True, eq=False)
class NormalizerWitness:
    witness: NormalizerSequence
    envelope: RateEnvelope
    weighted_partial_sums: np.ndarray
    dini_partial_sums: np.ndarray
    dominated: bool
    stabilized: bool

    @property
    def ratio_decreasing(self) -> bool:
        return self.envelope.ratio_decreasing


def slower_normalizer(alpha: WeightSequence, b: NormalizerSequence, r: float, delta: float = 0.5,
                    N: Optional[int] = None) -> NormalizerWitness:
    """Slower normalizer keeping the weighted series summable.

    Built from the running-maximum envelope: ``w_k >= b_k t_k**(delta/r)``, so
    ``alpha_k / w_k**r <= (alpha_k / b_k**r) / t_k**delta`` and the Dini bound
    controls ``sum alpha_k / w_k**r``.
    """
    if not b.unbounded:
        raise ValueError("normalizer must be certified unbounded")
    N = alpha.horizon if N is None else int(N)
    env = hu_hu_envelope(alpha, b, r, delta, N)
    w = env.beta
    a = alpha.prefix(N)
    weighted = _summation.cumsum(a / w ** r)

    tails = env.tails
    pos = tails > 0
    dini_terms = np.zeros(N)
    bb = b.prefix(N)
    dini_terms[pos] = (a[pos] / bb[pos] ** r) / tails[pos] ** delta
    dini = _summation.cumsum(dini_terms)
    dominated = bool(np.all(a / w ** r <= dini_terms * (1 + 1e-12) + 1e-300))
    half = max(N // 2 - 1, 0)
    stabilized = bool(weighted[-1] - weighted[half] <= (dini[-1] - dini[half]) * (1 + 1e-12) + 1e-300)
    witness = NormalizerSequence.explicit(w, unbounded=env.branch == "unbounded")
    return NormalizerWitness(witness, env, weighted, dini, dominated, stabilized)


# -- Kounias-Weng transformation -------------------------------------------

def kounias_weng_alpha(a: WeightSequence, r: float) -> WeightSequence:
    """Weights ``(a_1+...+a_k)**r - (a_1+...+a_{k-1})**r`` for ``r > 1``.

    For ``r <= 1`` no transformation is needed (use ``a_k**r`` directly), so
    that case is rejected.
    """
    if not r > 1:
        raise ValueError("transformation is defined for r > 1; use a_k**r when r <= 1")
    cum = _summation.cumsum(a.values)
    powered = cum ** r
    prev = np.concatenate(([0.0], powered[:-1]))
    return WeightSequence.explicit(np.maximum(powered - prev, 0.0))


def kounias_weng_domination(a: WeightSequence, r: float, beta: NormalizerSequence):
    """Prefix values of both sides of
    ``sum_{l<=n} alpha_l / beta_l**r <= (sum_{l<=n} a_l / beta_l)**r``.

    Returns ``(lhs, rhs, holds)``.
    """
    alpha = kounias_weng_alpha(a, r)
    n = a.horizon
    bb = beta.prefix(n)
    lhs = _summation.cumsum(alpha.values / bb ** r)
    rhs = _summation.cumsum(a.values / bb) ** r
    holds = bool(np.all(lhs <= rhs * (1 + 1e-12) + 1e-300))
    return lhs, rhs, holds


# -- constant transfer ------------------------------------------------------

TRANSFER_FORMS = ("moment1", "moment2", "prob1", "prob2")


def constant_transfer(K: float, r: float, form: str) -> float:
    """Hajek-Renyi constant implied by a Kolmogorov-type constant ``K``.

    ``form`` names the inequality pair:

    ``moment1``  first moment form, ``C = 4K``
    ``moment2``  second (two-segment) moment form, ``C = 4 D_r K`` with
                 ``D_r = 1`` for ``r <= 1`` and ``2**(r-1)`` otherwise
    ``prob1``    first probability form, ``C = 4K``
    ``prob2``    second probability form, ``C = (1 + 4**(1/r))**r K``
    """
    if not K > 0 or not r > 0:
        raise ValueError("K and r must be positive")
    if form in ("moment1", "prob1"):
        return 4.0 * K
    if form == "moment2":
        d = 1.0 if r <= 1 else 2.0 ** (r - 1.0)
        return 4.0 * d * K
    if form == "prob2":
        return (1.0 + 4.0 ** (1.0 / r)) ** r * K
    raise ValueError(f"unknown transfer form {form!r}; expected one of {TRANSFER_FORMS}")
