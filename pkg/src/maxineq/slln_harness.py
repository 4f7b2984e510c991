"""Path-wise checks of strong laws and their rates.

Almost-sure limits are not observable, so each check computes quantiles of a
normalized statistic over an ensemble at increasing horizons and applies a
trend rule: *decaying* (last quantile below the first by a factor) or
*bounded* (growth below a tolerance). Every function accepts a
:class:`~maxineq.process_models.PathEnsemble` or a lazily generated
:class:`~maxineq.process_models.PathStream`; the latter keeps long horizons
within memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate

from . import marginals as mg
from .inequality_verifier import check_kolmogorov
from .process_models import BoundScheme, PathEnsemble, PathStream, ProcessModel
from .sequence_calculus import (NormalizerSequence, RateEnvelope, WeightSequence,
                                series_ratio_sum)

__all__ = [
    "LEVELS",
    "RateCheckReport",
    "TruncationTriple",
    "GFunction",
    "PMomentCheck",
    "slln_decay",
    "rate_envelope_check",
    "log_slln_check",
    "truncate",
    "g_function",
    "pmoment_check",
    "mz_slln_check",
]

LEVELS = (0.5, 0.9, 0.99)

Source = Union[PathEnsemble, PathStream]


@dataclass(frozen=True, eq=False)
class RateCheckReport:
    """Quantiles of a normalized statistic on a horizon grid.

    ``quantiles[g, j]`` is the ``levels[j]`` quantile at ``grid[g]``;
    ``secondary`` holds a second statistic on the same layout when the check
    has one. ``status`` is ``Pass``, ``Fail`` or ``NotApplicable``.
    """

    check: str
    grid: np.ndarray
    levels: tuple
    quantiles: np.ndarray
    status: str
    verdicts: dict = field(default_factory=dict)
    reason: str = ""
    secondary: Optional[np.ndarray] = None
    horizon: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.int64)
        if g.size and np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        if self.quantiles.size and self.quantiles.shape != (g.size, len(self.levels)):
            raise ValueError("quantile table does not match grid and levels")

    @property
    def applicable(self) -> bool:
        return self.status != "NotApplicable"

    def column(self, level: float) -> np.ndarray:
        return self.quantiles[:, self.levels.index(level)]


def _not_applicable(check, grid, reason, horizon=0, levels=LEVELS) -> RateCheckReport:
    return RateCheckReport(check, np.asarray(grid), tuple(levels), np.empty((0, len(levels))),
                           "NotApplicable", {}, reason, None, horizon)


def _validate_grid(grid, n: int) -> np.ndarray:
    g = np.asarray(grid, dtype=np.int64)
    if g.ndim != 1 or g.size < 2:
        raise ValueError("grid needs at least two horizons")
    if np.any(np.diff(g) <= 0) or g[0] < 1:
        raise ValueError("grid must be strictly increasing positive integers")
    if g[-1] > n:
        raise ValueError(f"grid reaches {g[-1]} beyond path length {n}")
    return g


def _collect(source: Source, fn) -> np.ndarray:
    """Apply ``fn(X, S)`` blockwise and stack the per-path rows."""
    if isinstance(source, PathEnsemble):
        return fn(source.increments, source.partial_sums)
    parts = [fn(X, np.cumsum(X, axis=1)) for X in source.iter_blocks()]
    return np.concatenate(parts, axis=0)


def _quantiles(values: np.ndarray, levels) -> np.ndarray:
    return np.quantile(values, levels, axis=0).T


def _decaying(q: np.ndarray, factor: float) -> bool:
    return bool(np.all(q[-1] * factor <= q[0]))


def _default_alpha(model: Optional[ProcessModel], n: int) -> Optional[WeightSequence]:
    if model is None:
        return None
    v = model.variances()
    if not np.all(np.isfinite(v)):
        return None
    if np.all(v == v[0]):
        return WeightSequence.constant(float(v[0]), n)
    return WeightSequence.explicit(v)


def slln_decay(source: Source, b: NormalizerSequence, grid, *, alpha: Optional[WeightSequence] = None,
               r: float = 2.0, factor: float = 2.0, levels=LEVELS) -> RateCheckReport:
    """Quantiles of ``|S_n / b_n|`` with a decay verdict.

    The check runs only when ``b`` is unbounded and ``sum alpha_l / b_l**r``
    converges; otherwise it is reported ``NotApplicable``. ``alpha`` defaults
    to the model variances.
    """
    n = source.n
    g = _validate_grid(grid, n)
    if not b.unbounded:
        return _not_applicable("slln_decay", g, "normalizer is bounded", n, levels)
    alpha = alpha if alpha is not None else _default_alpha(getattr(source, "model", None), n)
    if alpha is None:
        raise ValueError("weights unknown; pass alpha")
    series = series_ratio_sum(alpha, b, r)
    if series.status == "divergent":
        return _not_applicable("slln_decay", g, "sum alpha_l / b_l**r diverges", n, levels)
    bg = b.prefix(n)[g - 1]
    vals = _collect(source, lambda X, S: np.abs(S[:, g - 1]) / bg)
    q = _quantiles(vals, levels)
    ok = _decaying(q, factor)
    return RateCheckReport("slln_decay", g, tuple(levels), q, "Pass" if ok else "Fail",
                           {"decay": "Decaying" if ok else "NotDecaying"}, "", None, n,
                           {"factor": factor, "series_status": series.status,
                            "achieved_factor": (q[0] / np.where(q[-1] > 0, q[-1], np.nan)).tolist()})


def rate_envelope_check(source: Source, envelope: RateEnvelope, grid, *, start: Optional[int] = None,
                        tol: float = 0.10, levels=LEVELS) -> RateCheckReport:
    """Quantiles of ``sup_{start <= k <= n} |S_k| / beta_k`` with a boundedness verdict.

    ``Bounded`` when the 90% quantile grows by less than ``tol`` between the
    last two horizons. ``secondary`` holds quantiles of ``|S_n| / beta_n``.
    """
    n = source.n
    g = _validate_grid(grid, n)
    if envelope.horizon < g[-1]:
        raise ValueError("envelope horizon shorter than grid")
    start = int(g[0] if start is None else start)
    if not 1 <= start <= g[0]:
        raise ValueError("start must lie in [1, first grid point]")
    beta = envelope.beta[: g[-1]]

    def fn(X, S):
        ratio = np.abs(S[:, start - 1:g[-1]]) / beta[start - 1:]
        run = np.maximum.accumulate(ratio, axis=1)
        return np.concatenate([run[:, g - start], ratio[:, g - start]], axis=1)

    vals = _collect(source, fn)
    G = g.size
    q = _quantiles(vals[:, :G], levels)
    q_end = _quantiles(vals[:, G:], levels)
    j = list(levels).index(0.9) if 0.9 in levels else len(levels) - 1
    prev, last = q[-2, j], q[-1, j]
    growth = (last / prev - 1.0) if prev > 0 else 0.0
    ok = growth < tol
    return RateCheckReport("rate_envelope_check", g, tuple(levels), q, "Pass" if ok else "Fail",
                           {"envelope": "Bounded" if ok else "Growing"}, "", q_end, n,
                           {"growth": growth, "tol": tol, "start": start,
                            "envelope_source": envelope.source,
                            "envelope_parameter": envelope.parameter})


def log_slln_check(source: Source, grid, delta: float = 0.45, *, means=None,
                   ratio_tol: float = 1.1, levels=LEVELS) -> RateCheckReport:
    """Logarithmic averages ``T_n = (1/log n) sum_{k<=n} (X_k - E X_k)/k``.

    Verdicts: median ``|T_n|`` strictly decreasing over the grid, and median
    ``(log n)**delta |T_n|`` growing by at most ``ratio_tol`` between
    consecutive grid points. ``secondary`` holds the scaled quantiles.
    """
    if not 0 <= delta < 0.5:
        raise ValueError("delta must lie in [0, 1/2)")
    n = source.n
    g = _validate_grid(grid, n)
    if g[0] < 2:
        raise ValueError("grid must start at n >= 2 (log n > 0)")
    k = np.arange(1, g[-1] + 1, dtype=np.float64)
    mu = np.zeros(g[-1]) if means is None else np.broadcast_to(np.asarray(means, float), (n,))[: g[-1]]
    logs = np.log(g.astype(float))

    def fn(X, S):
        w = np.cumsum((X[:, : g[-1]] - mu) / k, axis=1)
        return np.abs(w[:, g - 1]) / logs

    vals = _collect(source, fn)
    q = _quantiles(vals, levels)
    scaled = q * (logs ** delta)[:, None]
    j = list(levels).index(0.5) if 0.5 in levels else 0
    med = q[:, j]
    decreasing = bool(np.all(np.diff(med) < 0)) or bool(np.all(med == 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = scaled[1:, j] / scaled[:-1, j]
    ratios = np.where(np.isfinite(ratios), ratios, 0.0)
    bounded = bool(np.all(ratios <= ratio_tol))
    ok = decreasing and bounded
    return RateCheckReport("log_slln_check", g, tuple(levels), q, "Pass" if ok else "Fail",
                           {"decay": "Decaying" if decreasing else "NotDecaying",
                            "scaled": "Bounded" if bounded else "Growing"},
                           "", scaled, n, {"delta": delta, "scaled_median_ratios": ratios.tolist()})


# -- truncation ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncationTriple:
    """Clipped (``clipped``) and zeroed (``zeroed``) copies of ``x`` at level ``k**(1/p)``.

    The last axis of ``x`` is the index ``k = 1, 2, ...``.
    """

    x: np.ndarray
    clipped: np.ndarray
    zeroed: np.ndarray
    level: np.ndarray
    p: float


def truncate(x, p: float) -> TruncationTriple:
    """Truncate ``x[..., k-1]`` at ``k**(1/p)``.

    >>> t = truncate([5.0, 0.0, 0.0, -1.0], 1.0)
    >>> t.clipped[0], t.zeroed[0], t.clipped[3], t.zeroed[3]
    (1.0, 0.0, -1.0, -1.0)
    """
    if not 0 < p < 2:
        raise ValueError("p must lie in (0, 2)")
    x = np.asarray(x, dtype=np.float64)
    k = np.arange(1, x.shape[-1] + 1, dtype=np.float64)
    level = k ** (1.0 / p)
    clipped = np.clip(x, -level, level)
    zeroed = np.where(np.abs(x) <= level, x, 0.0)
    return TruncationTriple(x, clipped, zeroed, level, float(p))


# -- tail conditions -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GFunction:
    """``G(y) = sup_{n <= window} (1/n) sum_{k<=n} P(|X_k| > y)`` on a grid."""

    y: np.ndarray
    values: np.ndarray
    window: int


def _tail_matrix(source, y: np.ndarray, window: int) -> np.ndarray:
    """``P(|X_k| > y)`` with shape ``(window, len(y))``."""
    if isinstance(source, mg.Marginal):
        return np.broadcast_to(source.tail(y), (window, y.size))
    if isinstance(source, ProcessModel):
        m = source.with_length(max(window, 1))
        if m.kind in ("IID", "Copies"):
            return np.broadcast_to(m.marginal.tail(y), (window, y.size))
        if m.kind == "MartingaleDiff":
            marg = m.marginal
            later = 0.5 * marg.tail(y / math.sqrt(2.0))
            out = np.broadcast_to(later, (window, y.size)).copy()
            out[0] = marg.tail(y)
            return out
        sd = np.sqrt(m.variances()[:window])
        return np.stack([mg.normal(s).tail(y) if s > 0 else np.zeros_like(y) for s in sd])
    if isinstance(source, PathEnsemble):
        X = np.abs(source.increments[:, :window])
        return np.stack([(X[:, k][:, None] > y).mean(axis=0) for k in range(X.shape[1])])
    raise TypeError("source must be a Marginal, ProcessModel or PathEnsemble")


def g_function(source, y, window: int = 1000) -> GFunction:
    """Evaluate the averaged tail ``G`` on the grid ``y``.

    For identical marginals ``G`` equals the single-variable tail exactly.
    """
    y = np.asarray(y, dtype=np.float64)
    if isinstance(source, PathEnsemble):
        window = min(window, source.n)
    T = _tail_matrix(source, y, window)
    if not T.flags.writeable:
        # broadcast rows: identical marginals, so the average is the tail itself
        return GFunction(y, np.clip(T[0], 0.0, 1.0), window)
    avg = np.cumsum(T, axis=0) / np.arange(1, T.shape[0] + 1)[:, None]
    return GFunction(y, np.clip(avg.max(axis=0), 0.0, 1.0), window)


@dataclass(frozen=True)
class PMomentCheck:
    """Both tail conditions for the truncation strong law.

    ``integral``: ``int_0^inf y**(p-1) G(y) dy``; ``series``:
    ``sum_k P(|X_k|**p > k)``. Each carries a computed value and a bound on
    the neglected tail (``inf`` when the condition fails).
    """

    p: float
    integral_ok: bool
    integral_value: float
    integral_tail: float
    series_ok: bool
    series_partial: float
    series_tail: float
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.integral_ok and self.series_ok

    @property
    def integral_upper(self) -> float:
        return self.integral_value + self.integral_tail


def _marginal_of(source) -> mg.Marginal:
    if isinstance(source, mg.Marginal):
        return source
    model = source if isinstance(source, ProcessModel) else getattr(source, "model", None)
    if model is None:
        raise ValueError("no tail bound available for an unlabelled ensemble")
    if model.kind not in ("IID", "Copies"):
        raise ValueError(f"no closed-form tail for {model.kind}; identical marginals required")
    return model.marginal


def pmoment_check(source, p: float, horizon: int = 10**6) -> PMomentCheck:
    """Check ``int y**(p-1) G(y) dy < inf`` and ``sum P(|X|**p > k) < inf``.

    Quadrature covers ``[0, y0]`` and the tail majorant
    ``P(|X| > y) <= c y**-gamma`` bounds the rest analytically, so both
    conditions hold exactly when ``gamma > p``.
    """
    if not 0 < p < 2:
        raise ValueError("p must lie in (0, 2)")
    marg = _marginal_of(source)
    c, gamma, y0 = marg.tail_majorant()
    reasons = []

    upper = max(y0, 1.0, 10.0 * marg.scale) if math.isfinite(gamma) else max(y0, 0.0)
    f = lambda y: y ** (p - 1.0) * float(marg.tail(y))
    pts = [marg.scale] if marg.name == "pareto" and 0 < marg.scale < upper else None
    body = integrate.quad(f, 0.0, upper, points=pts, limit=200)[0] if upper > 0 else 0.0
    if not math.isfinite(gamma) or c == 0.0:
        int_tail, int_ok = 0.0, True
    elif gamma > p:
        int_tail, int_ok = float(c * upper ** (p - gamma) / (gamma - p)), True
    else:
        int_tail, int_ok = math.inf, False
        reasons.append(f"integral of y**(p-1) G(y) diverges (tail index {gamma:g} <= p)")

    k = np.arange(1, horizon + 1, dtype=np.float64)
    partial = float(np.sum(marg.tail(k ** (1.0 / p))))
    s = gamma / p
    if not math.isfinite(gamma) or c == 0.0:
        ser_tail, ser_ok = 0.0, True
    elif s > 1 and horizon ** (1.0 / p) >= y0:
        ser_tail, ser_ok = float(c * horizon ** (1.0 - s) / (s - 1.0)), True
    else:
        ser_tail, ser_ok = math.inf, False
        reasons.append(f"sum of P(|X|**p > k) diverges (tail index {gamma:g} <= p)")
    return PMomentCheck(p, int_ok, body, int_tail, ser_ok, partial, ser_tail, "; ".join(reasons))


def _truncated_second_moments(marg: mg.Marginal, level: np.ndarray):
    """``E Y_k**2`` and ``E Z_k**2`` for a symmetric marginal, by quadrature."""
    ey, ez = np.empty(level.size), np.empty(level.size)
    f = lambda y: 2.0 * y * float(marg.tail(y))
    edge = 0.0
    acc = 0.0
    pts = [marg.scale] if marg.name == "pareto" else None
    for i, L in enumerate(level):
        inner = [q for q in (pts or []) if edge < q < L]
        acc += integrate.quad(f, edge, L, points=inner or None, limit=200)[0]
        edge = L
        ey[i] = acc
        ez[i] = acc - L * L * float(marg.tail(L))
    return ey, np.maximum(ez, 0.0)


def mz_slln_check(source: Source, p: float, grid, *, factor: float = 2.0, decay_levels=(0.5,),
                  kolmogorov_length: int = 1000, kolmogorov_paths: int = 2000,
                  levels=LEVELS) -> RateCheckReport:
    """Quantiles of ``|S_n| / n**(1/p)`` with a decay verdict at ``decay_levels``.

    The tail conditions gate the check. For ``1 <= p < 2`` the Kolmogorov
    inequality (``K = 1``, independent increments) is also checked on the
    clipped and on the zeroed truncations of the first ``kolmogorov_length``
    increments, and both routes are reported.
    """
    n = source.n
    g = _validate_grid(grid, n)
    model = getattr(source, "model", None)
    try:
        pm = pmoment_check(source, p)
    except ValueError as exc:
        return _not_applicable("mz_slln_check", g, str(exc), n, levels)
    if not pm.holds:
        return _not_applicable("mz_slln_check", g, pm.reason, n, levels)
    scale = g.astype(float) ** (1.0 / p)
    vals = _collect(source, lambda X, S: np.abs(S[:, g - 1]) / scale)
    q = _quantiles(vals, levels)
    cols = [list(levels).index(lv) for lv in decay_levels]
    ok = _decaying(q[:, cols], factor)
    extra = {"factor": factor, "decay_levels": list(decay_levels),
             "achieved_factor": (q[0] / np.where(q[-1] > 0, q[-1], np.nan)).tolist(),
             "pmoment": pm}
    if 1 <= p < 2 and model is not None and model.kind == "IID":
        m = min(kolmogorov_length, n)
        blocks = []
        got = 0
        for X in source.iter_blocks():
            blocks.append(X[:, :m])
            got += X.shape[0]
            if got >= kolmogorov_paths:
                break
        X = np.concatenate(blocks)[:kolmogorov_paths]
        tr = truncate(X, p)
        ey, ez = _truncated_second_moments(model.marginal, tr.level)
        routes = {}
        for name, arr, var in (("clipped", tr.clipped, ey), ("zeroed", tr.zeroed, ez)):
            # symmetric marginals: truncated variables have mean zero
            ens = PathEnsemble.from_increments(arr, seed=source.seed, model=None)
            scheme = BoundScheme(WeightSequence.explicit(var), 2.0, 1.0, "prob1",
                                 "Kolmogorov maximal inequality, truncated variables")
            recs = check_kolmogorov(ens, scheme)
            routes[name] = [r.verdict for r in recs]
        extra["kolmogorov_routes"] = routes
        extra["routes_agree"] = all(v != "Violated" for vs in routes.values() for v in vs)
    return RateCheckReport("mz_slln_check", g, tuple(levels), q, "Pass" if ok else "Fail",
                           {"decay": "Decaying" if ok else "NotDecaying"}, "", None, n, extra)
