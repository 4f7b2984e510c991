"""Reproducible generators for weakly dependent sequences, each paired with the
Kolmogorov-type bound that is known to hold for it.

Every path draws from its own counter-based stream keyed by ``(seed, path)``,
so ensembles are bit-identical for any block size or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import numpy as np
from scipy import signal

from . import marginals as mg
from . import rng
from .sequence_calculus import WeightSequence, kounias_weng_alpha

__all__ = [
    "KINDS",
    "ProcessModel",
    "PathEnsemble",
    "PathStream",
    "BoundScheme",
    "DemimartingaleAlpha",
    "RhoSchedule",
    "generate",
    "stream_paths",
    "theoretical_bound",
    "demimartingale_alpha",
    "rho_schedule",
    "partial_sum_std",
    "na_covariance_battery",
    "demimartingale_battery",
    "aana_battery",
    "empirical_correlation",
]

KINDS = ("IID", "MartingaleDiff", "NAGaussian", "AR1", "AANA", "LogOU", "Demimartingale", "Copies")
_GAUSSIAN_KINDS = ("NAGaussian", "AR1", "AANA", "LogOU", "Demimartingale")


@dataclass(frozen=True, eq=False)
class ProcessModel:
    """A family of random sequences ``X_1, ..., X_n``.

    Kinds and their parameters:

    - ``IID``: ``marginal``.
    - ``MartingaleDiff``: ``marginal``; ``X_l = e_l * sqrt(2) * 1{e_{l-1} > 0}``
      for ``l >= 2`` with ``e`` i.i.d. symmetric, so increments are uncorrelated
      but dependent.
    - ``NAGaussian``: ``c`` in ``[0, 1]`` and ``structure`` (``"equicorrelated"``:
      all correlations ``-c/(n-1)``; ``"pairs"``: consecutive pairs with
      correlation ``-c``). Unit variances.
    - ``AR1``: ``a`` with ``|a| < 1``; stationary, unit variance.
    - ``AANA``: ``X_l = (Z_l + q_l Z_{l+1}) / sqrt(1 + q_l**2)`` with
      ``q_l = q_scale * l**-q_power``.
    - ``LogOU``: stationary OU sampled at times ``log k``; ``cov(X_k, X_l) =
      (min/max)**beta``.
    - ``Demimartingale``: ``X_l = sqrt(1-gamma) Z_l + sqrt(gamma) W``, zero-mean
      associated increments.
    - ``Copies``: ``X_l = X_1`` for all ``l`` (fully dependent).
    """

    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if int(self.n) < 1:
            raise ValueError("path length must be positive")
        object.__setattr__(self, "n", int(self.n))
        p = dict(self.params)
        if self.kind in ("IID", "MartingaleDiff", "Copies"):
            p["marginal"] = mg.from_spec(p.get("marginal", "normal"))
        elif self.kind == "NAGaussian":
            p.setdefault("c", 0.5)
            p.setdefault("structure", "equicorrelated")
            if not 0 <= p["c"] <= 1:
                raise ValueError("NAGaussian needs 0 <= c <= 1")
            if p["structure"] not in ("equicorrelated", "pairs"):
                raise ValueError("structure must be 'equicorrelated' or 'pairs'")
        elif self.kind == "AR1":
            p.setdefault("a", 0.5)
            if not abs(p["a"]) < 1:
                raise ValueError("AR1 needs |a| < 1")
        elif self.kind == "AANA":
            p.setdefault("q_scale", 1.0)
            p.setdefault("q_power", 1.0)
            if p["q_scale"] < 0:
                raise ValueError("AANA needs q_scale >= 0")
            if p["q_scale"] > 0 and not p["q_power"] > 0:
                raise ValueError("AANA needs q_l -> 0 (q_power > 0)")
        elif self.kind == "LogOU":
            p.setdefault("beta", 1.0)
            if not p["beta"] > 0:
                raise ValueError("LogOU needs beta > 0")
        elif self.kind == "Demimartingale":
            p.setdefault("gamma", 0.3)
            if not 0 <= p["gamma"] <= 1:
                raise ValueError("Demimartingale needs 0 <= gamma <= 1")
        object.__setattr__(self, "params", p)

    # convenience constructors
    @classmethod
    def iid(cls, n, marginal="normal"):
        return cls("IID", n, {"marginal": marginal})

    @classmethod
    def martingale_diff(cls, n, marginal="normal"):
        return cls("MartingaleDiff", n, {"marginal": marginal})

    @classmethod
    def na_gaussian(cls, n, c=0.5, structure="equicorrelated"):
        return cls("NAGaussian", n, {"c": c, "structure": structure})

    @classmethod
    def ar1(cls, n, a=0.5):
        return cls("AR1", n, {"a": a})

    @classmethod
    def aana(cls, n, q_scale=1.0, q_power=1.0):
        return cls("AANA", n, {"q_scale": q_scale, "q_power": q_power})

    @classmethod
    def log_ou(cls, n, beta=1.0):
        return cls("LogOU", n, {"beta": beta})

    @classmethod
    def demimartingale(cls, n, gamma=0.3):
        return cls("Demimartingale", n, {"gamma": gamma})

    @classmethod
    def copies(cls, n, marginal="normal"):
        return cls("Copies", n, {"marginal": marginal})

    @classmethod
    def from_spec(cls, spec: dict) -> "ProcessModel":
        spec = dict(spec)
        kind = spec.pop("kind")
        n = spec.pop("n")
        return cls(kind, n, spec)

    def with_length(self, n: int) -> "ProcessModel":
        return ProcessModel(self.kind, n, self.params)

    def to_spec(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        for k, v in sorted(self.params.items()):
            d[k] = v.to_spec() if isinstance(v, mg.Marginal) else v
        return d

    @property
    def label(self) -> str:
        parts = [self.kind, f"n={self.n}"]
        for k, v in sorted(self.params.items()):
            parts.append(f"{k}={v.name if isinstance(v, mg.Marginal) else v}")
        return ",".join(parts)

    @property
    def marginal(self) -> mg.Marginal:
        """Marginal law of each ``X_l`` (unit normal for the Gaussian kinds)."""
        if self.kind in ("IID", "Copies"):
            return self.params["marginal"]
        if self.kind == "MartingaleDiff":
            raise ValueError("MartingaleDiff marginals vary with l; use abs_moments")
        return mg.normal()

    @property
    def zero_mean(self) -> bool:
        if self.kind in ("IID", "MartingaleDiff", "Copies"):
            return self.params["marginal"].mean_zero
        return True

    @property
    def q(self) -> np.ndarray:
        """AANA weights ``q_1..q_n``."""
        if self.kind != "AANA":
            raise ValueError("q schedule exists only for AANA models")
        c, p = self.params["q_scale"], self.params["q_power"]
        return c * np.arange(1, self.n + 1, dtype=float) ** (-p)

    def abs_moments(self, p: float) -> np.ndarray:
        """``E|X_l|**p`` for ``l = 1..n``."""
        if self.kind == "MartingaleDiff":
            m = self.params["marginal"]
            base = m.abs_moment(p)
            if m.name == "zero":
                return np.zeros(self.n)
            out = np.full(self.n, base * 2.0 ** (p / 2) * 0.5)
            out[0] = base
            return out
        return np.full(self.n, self.marginal.abs_moment(p))

    def variances(self) -> np.ndarray:
        return self.abs_moments(2.0)


# -- path generation ---------------------------------------------------------

def _raw_width(model: ProcessModel) -> int:
    return model.n + 1 if model.kind in ("AANA", "Demimartingale") else model.n


def _draw_block(model: ProcessModel, seed: int, start: int, stop: int) -> np.ndarray:
    """Raw per-path draws for paths ``start..stop-1`` from their own streams."""
    width = _raw_width(model)
    out = np.empty((stop - start, width))
    for row, path in enumerate(range(start, stop)):
        gen = rng.stream(seed, path)
        if model.kind in ("IID", "MartingaleDiff"):
            out[row] = model.params["marginal"].sample(gen, width)
        elif model.kind == "Copies":
            out[row] = model.params["marginal"].sample(gen, 1)[0]
        else:
            out[row] = gen.standard_normal(width)
    return out


def _transform(model: ProcessModel, raw: np.ndarray) -> np.ndarray:
    """Map raw draws to increments, vectorised over the rows of a block."""
    n = model.n
    kind = model.kind
    p = model.params
    if kind in ("IID", "Copies"):
        return raw
    if kind == "MartingaleDiff":
        x = raw.copy()
        x[:, 1:] = raw[:, 1:] * math.sqrt(2.0) * (raw[:, :-1] > 0)
        return x
    if kind == "NAGaussian":
        c = p["c"]
        if p["structure"] == "equicorrelated":
            if n == 1:
                return raw
            rho = c / (n - 1)
            a = math.sqrt(1.0 + rho)
            b = -a + math.sqrt(1.0 - c)
            return a * raw + b * raw.mean(axis=1, keepdims=True)
        x = raw.copy()
        m = (n // 2) * 2
        x[:, 1:m:2] = -c * raw[:, 0:m:2] + math.sqrt(1.0 - c * c) * raw[:, 1:m:2]
        return x
    if kind == "AR1":
        a = p["a"]
        s = math.sqrt(1.0 - a * a)
        z = raw.copy()
        z[:, 0] /= s
        return signal.lfilter([s], [1.0, -a], z, axis=1)
    if kind == "AANA":
        q = model.q
        return (raw[:, :n] + q * raw[:, 1:]) / np.sqrt(1.0 + q * q)
    if kind == "LogOU":
        beta = p["beta"]
        k = np.arange(1, n + 1, dtype=float)
        dtau = np.empty(n)
        dtau[0] = 1.0
        kk = k[1:]
        dtau[1:] = kk ** (2 * beta) * -np.expm1(2 * beta * np.log1p(-1.0 / kk))
        return k ** (-beta) * np.cumsum(np.sqrt(dtau) * raw, axis=1)
    if kind == "Demimartingale":
        g = p["gamma"]
        return math.sqrt(1.0 - g) * raw[:, :n] + math.sqrt(g) * raw[:, n:]
    raise AssertionError(kind)


def _block(model: ProcessModel, seed: int, start: int, stop: int) -> np.ndarray:
    return _transform(model, _draw_block(model, seed, start, stop))


@dataclass(eq=False)
class PathEnsemble:
    """``P`` simulated paths of increments ``X`` with partial sums ``S``.

    ``partial_sums[:, l-1]`` is ``S_l``; ``S_0 = 0`` is implicit.
    """

    increments: np.ndarray
    seed: int
    model: Optional[ProcessModel] = None

    def __post_init__(self):
        self.increments = np.asarray(self.increments, dtype=np.float64)
        if self.increments.ndim != 2:
            raise ValueError("increments must be a P x n array")
        self.increments.setflags(write=False)

    increments_available = True

    @classmethod
    def from_increments(cls, x, seed: int = 0, model: Optional[ProcessModel] = None) -> "PathEnsemble":
        return cls(np.atleast_2d(np.asarray(x, dtype=np.float64)), seed, model)

    @property
    def P(self) -> int:
        return self.increments.shape[0]

    @property
    def n(self) -> int:
        return self.increments.shape[1]

    @cached_property
    def partial_sums(self) -> np.ndarray:
        s = np.cumsum(self.increments, axis=1)
        s.setflags(write=False)
        return s

    def iter_blocks(self, block_size: int = 256) -> Iterator[np.ndarray]:
        for start in range(0, self.P, block_size):
            yield self.increments[start:start + block_size]


@dataclass(frozen=True, eq=False)
class PathStream:
    """Lazily generated ensemble for paths too long to hold in memory at once.

    Yields the same increments as :func:`generate` block by block.
    """

    model: ProcessModel
    P: int
    seed: int
    block_size: int = 64

    @property
    def n(self) -> int:
        return self.model.n

    def iter_blocks(self, block_size: Optional[int] = None) -> Iterator[np.ndarray]:
        bs = block_size or self.block_size
        for start in range(0, self.P, bs):
            yield _block(self.model, self.seed, start, min(start + bs, self.P))

    def materialize(self) -> PathEnsemble:
        return generate(self.model, self.P, self.seed)


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def generate(model: ProcessModel, P: int, seed: int, workers: int = 1,
             block_size: int = 512) -> PathEnsemble:
    """Simulate ``P`` independent paths of ``model``.

    Output is bit-identical for any ``workers`` and ``block_size``.
    """
    seed = _check_seed(seed)
    if P < 1:
        raise ValueError("P must be positive")
    bounds = [(s, min(s + block_size, P)) for s in range(0, P, block_size)]
    out = np.empty((P, model.n))

    def fill(b):
        out[b[0]:b[1]] = _block(model, seed, *b)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, bounds))
    else:
        for b in bounds:
            fill(b)
    return PathEnsemble(out, seed, model)


def stream_paths(model: ProcessModel, P: int, seed: int, block_size: int = 64) -> PathStream:
    return PathStream(model, int(P), _check_seed(seed), block_size)


# -- theoretical bounds -----------------------------------------------------

SCHEME_KINDS = ("moment1", "moment2", "prob1", "prob2", "demi", "kw")


@dataclass(frozen=True, eq=False)
class BoundScheme:
    """Weights, order and constant of a Kolmogorov-type maximal inequality.

    ``kind``: ``moment1``/``moment2`` bound ``E[max |S_l|]**r`` (first: windows
    starting at 1; second: any window), ``prob1``/``prob2`` bound
    ``P(max |S_l| >= eps) * eps**r``, ``demi`` is the one-sided demimartingale
    bound and ``kw`` the arbitrary-dependence bound. ``K is None`` marks a
    constant that is known to exist but not explicitly.
    """

    alpha: WeightSequence
    r: float
    K: Optional[float]
    kind: str
    citation: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if not self.r > 0:
            raise ValueError("r must be positive")
        if self.K is not None and not self.K > 0:
            raise ValueError("K must be positive")

    @property
    def estimated(self) -> bool:
        return self.K is None

    @property
    def additive(self) -> bool:
        return "variances" not in self.extra

    @property
    def second_kind(self) -> bool:
        return self.kind in ("moment2", "prob2")

    @property
    def is_probability(self) -> bool:
        return self.kind in ("prob1", "prob2", "demi", "kw")

    def bracket(self, lo: int, hi: int) -> float:
        """Sum of weights over the 1-based window ``[lo, hi]`` (plus any non-additive term)."""
        a = self.alpha.prefix(hi)[lo - 1:hi]
        total = float(np.sum(a))
        if not self.additive:
            v = self.extra["variances"][lo - 1:hi]
            total += float(np.sum(v)) ** (self.r / 2.0)
        return total

    def with_constant(self, K: float) -> "BoundScheme":
        return BoundScheme(self.alpha, self.r, K, self.kind, self.citation, self.extra)


def theoretical_bound(model: ProcessModel, order: float = 2.0,
                      inequality: str = "probability") -> BoundScheme:
    """The Kolmogorov-type bound known to hold for ``model``.

    ``inequality`` is ``"moment"``, ``"probability"`` or ``"kw"`` (the
    dependence-free bound, available for every kind with finite moments).

    >>> s = theoretical_bound(ProcessModel.iid(5), 2, "probability")
    >>> s.K, s.r, list(s.alpha.values)
    (1.0, 2.0, [1.0, 1.0, 1.0, 1.0, 1.0])
    """
    kind = model.kind
    p = float(order)
    if inequality not in ("moment", "probability", "kw"):
        raise ValueError("inequality must be 'moment', 'probability' or 'kw'")

    if inequality == "kw":
        v = model.abs_moments(p)
        if not np.all(np.isfinite(v)):
            raise ValueError("moments of this order do not exist")
        if p > 1:
            alpha = kounias_weng_alpha(WeightSequence.explicit(v ** (1.0 / p)), p)
        else:
            alpha = WeightSequence.explicit(v)
        return BoundScheme(alpha, p, 1.0, "kw", "Kounias & Weng (1969), arbitrary dependence",
                           {"moments": v})

    if kind in ("IID", "MartingaleDiff"):
        if p != 2:
            raise ValueError(f"{kind}: only order 2 (Doob / Kolmogorov) is supported")
        var = model.variances()
        if not np.all(np.isfinite(var)):
            raise ValueError("variance is infinite")
        alpha = WeightSequence.explicit(var)
        if inequality == "moment":
            return BoundScheme(alpha, 2.0, 4.0, "moment2", "Doob L2 maximal inequality")
        return BoundScheme(alpha, 2.0, 1.0, "prob2", "Kolmogorov maximal inequality")

    if kind == "NAGaussian":
        if p <= 1:
            raise ValueError("NA moment bounds need order > 1")
        m = model.abs_moments(p)
        kind_out = "moment2" if inequality == "moment" else "prob2"
        if p <= 2:
            return BoundScheme(WeightSequence.explicit(m), p, 2.0 ** (3.0 - p), kind_out,
                               "Shao (2000) / Matula (1992), NA moments 1<p<=2")
        K = 2.0 * (15.0 * p / math.log(p)) ** p
        return BoundScheme(WeightSequence.explicit(m), p, K, kind_out,
                           "Shao (2000), NA moments p>2",
                           {"variances": model.variances()})

    if kind == "AANA":
        if p != 2 or inequality != "probability":
            raise ValueError("AANA: only the order-2 probability bound is available")
        A = aana_A(model.q, model.n)
        K = 2.0 * (A + math.sqrt(1.0 + A * A)) ** 2
        # windows inherit the condition with a sub-collection of q, so A only shrinks
        return BoundScheme(WeightSequence.explicit(model.variances()), 2.0, K, "prob2",
                           "Chandra & Ghosal (1996), AANA", {"A": A})

    if kind == "AR1":
        if p != 2:
            raise ValueError("AR1: only q = 2 is supported")
        return BoundScheme(WeightSequence.explicit(model.variances()), 2.0, None, "moment1",
                           "Shao (1995), rho-mixing q=2 (constant not explicit)",
                           {"rho": rho_schedule(model)})

    if kind == "Demimartingale":
        s = partial_sum_std(model)
        alpha = np.diff(np.concatenate(([0.0], s))) / math.sqrt(2 * math.pi)
        return BoundScheme(WeightSequence.explicit(alpha), 1.0, 1.0, "demi",
                           "Christofides (2000), demisubmartingales")

    raise ValueError(f"no Kolmogorov-type bound is available for {kind} with {inequality}")


def aana_A(q: np.ndarray, n: int) -> float:
    """``q_1**2 + ... + q_{n-1}**2``."""
    return float(np.sum(np.asarray(q[: n - 1], dtype=float) ** 2))


def partial_sum_std(model: ProcessModel) -> Optional[np.ndarray]:
    """Standard deviations of ``S_1..S_n`` where closed forms are cheap, else ``None``."""
    n = model.n
    l = np.arange(1, n + 1, dtype=float)
    kind = model.kind
    if kind in ("IID", "MartingaleDiff"):
        return np.sqrt(np.cumsum(model.variances()))
    if kind == "Copies":
        return l * math.sqrt(model.marginal.variance)
    if kind == "Demimartingale":
        g = model.params["gamma"]
        return np.sqrt(l + g * l * (l - 1))
    if kind == "NAGaussian":
        c = model.params["c"]
        if model.params["structure"] == "equicorrelated":
            rho = c / (n - 1) if n > 1 else 0.0
            return np.sqrt(l - l * (l - 1) * rho)
        # pairs: each completed pair contributes -2c
        return np.sqrt(l - 2 * c * np.floor(l / 2))
    if kind == "AR1":
        a = model.params["a"]
        # Var S_l = Var S_{l-1} + 1 + 2 (a + ... + a^{l-1})
        csum = np.concatenate(([0.0], np.cumsum(a ** np.arange(1, n))))
        var = np.cumsum(1.0 + 2.0 * csum)
        return np.sqrt(var)
    if kind == "AANA":
        q = model.q
        c = q[:-1] / np.sqrt((1 + q[:-1] ** 2) * (1 + q[1:] ** 2))
        return np.sqrt(l + 2 * np.concatenate(([0.0], np.cumsum(c))))
    if kind == "LogOU" and n <= 20000:
        beta = model.params["beta"]
        # Var S_l = Var S_{l-1} + 1 + 2 sum_{j<l} (j/l)^beta
        cross = np.array([np.sum((l[:k] / l[k]) ** beta) for k in range(n)])
        return np.sqrt(np.cumsum(1.0 + 2.0 * cross))
    return None


# -- demimartingale weights ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class DemimartingaleAlpha:
    """Monte Carlo estimate of ``E S_l^+ - E S_{l-1}^+`` with bootstrap band.

    ``alpha`` clips negative MC noise at zero; ``estimate`` keeps raw values.
    ``closed_form`` is ``(s_l - s_{l-1}) / sqrt(2 pi)`` for Gaussian sums.
    """

    alpha: WeightSequence
    estimate: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    closed_form: Optional[np.ndarray]


def demimartingale_alpha(ensemble: PathEnsemble, n_boot: int = 200, level: float = 0.99,
                         seed: Optional[int] = None) -> DemimartingaleAlpha:
    if ensemble.P == 0 or ensemble.n == 0:
        raise ValueError("empty ensemble")
    pos = np.maximum(ensemble.partial_sums, 0.0)
    d = np.diff(np.concatenate((np.zeros((ensemble.P, 1)), pos), axis=1), axis=1)
    est = d.mean(axis=0)
    gen = rng.stream(rng.derive_seed(ensemble.seed if seed is None else seed, "demi-boot"), 0)
    counts = gen.multinomial(ensemble.P, np.full(ensemble.P, 1.0 / ensemble.P), size=n_boot)
    boot = counts.astype(np.float64) @ d / ensemble.P
    tail = (1.0 - level) / 2.0
    lo = np.quantile(boot, tail, axis=0)
    hi = np.quantile(boot, 1.0 - tail, axis=0)
    closed = None
    if ensemble.model is not None and (ensemble.model.kind in _GAUSSIAN_KINDS or (
            ensemble.model.kind == "IID" and ensemble.model.marginal.name == "normal")):
        s = partial_sum_std(ensemble.model)
        if s is not None:
            closed = np.diff(np.concatenate(([0.0], s))) / math.sqrt(2 * math.pi)
    return DemimartingaleAlpha(WeightSequence.explicit(np.maximum(est, 0.0)), est, lo, hi, closed)


# -- mixing coefficients ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RhoSchedule:
    """Dyadic maximal correlations ``rho(2**i)``, ``i = 0..len-1``."""

    values: np.ndarray
    partial_sums: np.ndarray
    limit: float
    stabilized_at: int


def rho_schedule(model: ProcessModel, terms: Optional[int] = None, rtol: float = 1e-5) -> RhoSchedule:
    """For Gaussian AR(1), ``rho(m) = |a|**m``.

    Default length is ``floor(log2 n) + 1`` terms (``i = 0..[log2 n]``).
    ``stabilized_at`` is the first ``i`` whose partial sum is within ``rtol``
    (relative) of the infinite limit.
    """
    if model.kind != "AR1":
        raise ValueError("rho schedule is defined for AR1 models only")
    a = abs(model.params["a"])
    if terms is None:
        terms = int(math.floor(math.log2(model.n))) + 1
    i = np.arange(terms)
    vals = a ** (2.0 ** i)
    partial = np.cumsum(vals)
    limit = 0.0
    for j in range(64):
        t = a ** (2.0 ** j)
        if t == 0.0:
            break
        limit += t
    stab = 0
    if limit > 0:
        full = np.cumsum([a ** (2.0 ** j) for j in range(64)])
        stab = int(np.argmax(limit - full <= rtol * limit))
    return RhoSchedule(vals, partial, limit, stab)


# -- dependence diagnostics -----------------------------------------------------

def _mean_se(v: np.ndarray):
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


def _cov_se(f: np.ndarray, g: np.ndarray):
    fc, gc = f - f.mean(), g - g.mean()
    return _mean_se(fc * gc)


def na_covariance_battery(ensemble: PathEnsemble, n_pairs: int = 2000, seed: int = 0):
    """Covariances of increasing orthant indicators on disjoint index sets.

    Returns an ``(n_pairs, 2)`` array of ``(cov, standard error)``; negative
    association requires every covariance ``<= 0``.
    """
    x = ensemble.increments
    n = ensemble.n
    gen = rng.stream(rng.derive_seed(seed, "na-battery"), 0)
    out = np.empty((n_pairs, 2))
    for i in range(n_pairs):
        size = gen.integers(2, min(n, 6) + 1)
        idx = gen.choice(n, size=size, replace=False)
        split = gen.integers(1, size)
        a, b = idx[:split], idx[split:]
        ta = gen.normal(0.0, 0.7, a.size)
        tb = gen.normal(0.0, 0.7, b.size)
        f = np.all(x[:, a] > ta, axis=1).astype(float)
        g = np.all(x[:, b] > tb, axis=1).astype(float)
        out[i] = _cov_se(f, g)
    return out


def demimartingale_battery(ensemble: PathEnsemble, steps=None):
    """``E[(S_{j+1} - S_j) f(S_1..S_j)]`` for non-decreasing test functions ``f``.

    Returns a list of ``(name, j, mean, standard error)``.
    """
    s = ensemble.partial_sums
    x = ensemble.increments
    n = ensemble.n
    if steps is None:
        steps = sorted({1, 2, max(1, n // 4), max(1, n // 2), n - 1})
    tests = {
        "last": lambda h: h[:, -1],
        "running_max": lambda h: h.max(axis=1),
        "positive_last": lambda h: (h[:, -1] > 0).astype(float),
        "average": lambda h: h.mean(axis=1),
        "tanh_sum": lambda h: np.tanh(h).sum(axis=1),
    }
    out = []
    for j in steps:
        if not 1 <= j < n:
            continue
        hist = s[:, :j]
        inc = x[:, j]
        for name, f in tests.items():
            m, se = _mean_se(inc * f(hist))
            out.append((name, j, m, se))
    return out


def aana_battery(ensemble: PathEnsemble, model: ProcessModel, positions=None):
    """Scaled covariances ``cov(f(X_m), g(X_{m+1..m+k})) / (sd_f sd_g)`` against ``q_m``.

    Returns a list of ``(m, k, f, g, corr, standard error, q_m)``.
    """
    x = ensemble.increments
    n = ensemble.n
    q = model.q
    if positions is None:
        positions = [(m, k) for m in (1, 2, 5, max(1, n // 2)) for k in (1, 3) if m + k <= n]
    fs = {"identity": lambda v: v, "positive": lambda v: (v > 0).astype(float), "tanh": np.tanh}
    gs = {"sum": lambda w: w.sum(axis=1), "max": lambda w: w.max(axis=1),
          "positive_sum": lambda w: (w.sum(axis=1) > 0).astype(float)}
    out = []
    for m, k in positions:
        u = x[:, m - 1]
        w = x[:, m:m + k]
        for fn, f in fs.items():
            for gn, g in gs.items():
                fu, gw = f(u), g(w)
                sf, sg = fu.std(ddof=1), gw.std(ddof=1)
                if sf == 0 or sg == 0:
                    continue
                c, se = _cov_se(fu, gw)
                out.append((m, k, fn, gn, c / (sf * sg), se / (sf * sg), float(q[m - 1])))
    return out


def empirical_correlation(ensemble: PathEnsemble, indices) -> np.ndarray:
    """Sample correlation matrix of ``X_k`` over the 1-based ``indices``."""
    cols = ensemble.increments[:, np.asarray(indices) - 1]
    return np.corrcoef(cols, rowvar=False)
