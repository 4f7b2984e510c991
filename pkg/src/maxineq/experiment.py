"""Configuration-driven runs of the check catalog.

A config is a YAML mapping::

    seed: 20240601            # mandatory (or --seed)
    paths: 10000              # default ensemble size
    workers: 1
    bootstrap: {level: 0.99, resamples: 1000}
    output: {dir: reports, format: both}
    models:
      iid: {kind: IID, n: 1000}
      rad12: {exact: true, n: 12, process: iid}
      long: {kind: LogOU, n: 100000, beta: 1.0, stream: true}
    checks:
      - {id: kolmogorov_iid, check: check_kolmogorov, model: iid, epsilons: [60]}

Each check entry names a catalog operation plus its options (see
``describe``). Rows are sorted by check id, then by their position in the
check's own parameter grid, so reports do not depend on scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import yaml

from . import inequality_verifier as iv
from . import marginals as mg
from . import rng
from . import sequence_calculus as sc
from . import slln_harness as sh
from .process_models import (KINDS, BoundScheme, PathEnsemble, ProcessModel, generate, stream_paths,
                             theoretical_bound)

__all__ = ["ConfigError", "CheckInfo", "ReportRow", "ExperimentConfig", "CATALOG", "list_checks",
           "describe", "load_config", "run_config", "run", "write_reports"]

REPORT_VERDICTS = ("Holds", "HoldsWithinCI", "Violated", "Inconclusive", "NotApplicable")
FORMATS = ("table", "structured", "both")
MIN_PATHS = 100


class ConfigError(ValueError):
    """Invalid or unreadable experiment configuration."""


@dataclass(frozen=True)
class CheckInfo:
    name: str
    citation: str
    summary: str
    options: tuple
    statistical: bool
    runner: Callable = field(repr=False, compare=False)


@dataclass(frozen=True)
class ReportRow:
    check_id: str
    check: str
    model: str
    params: dict
    statistic: str
    estimate: float
    ci_low: float
    ci_high: float
    bound: float
    verdict: str
    margin: float
    seed: int
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in REPORT_VERDICTS:
            raise ValueError(f"verdict {self.verdict!r} outside the report vocabulary")


@dataclass
class ExperimentConfig:
    seed: int
    paths: int
    workers: int
    level: float
    resamples: int
    out_dir: str
    fmt: str
    models: dict
    checks: list
    raw: dict


# -- config parsing --------------------------------------------------------------------

_TOP_KEYS = {"seed", "paths", "workers", "bootstrap", "output", "models", "checks", "name"}


def load_config(path, *, seed: Optional[int] = None, paths: Optional[int] = None,
                out: Optional[str] = None, fmt: Optional[str] = None) -> ExperimentConfig:
    """Read and validate a YAML config; keyword overrides win over the file."""
    try:
        text = Path(path).read_text()
        raw = yaml.safe_load(text)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw, seed=seed, paths=paths, out=out, fmt=fmt)


def parse_config(raw, *, seed=None, paths=None, out=None, fmt=None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    raw = dict(raw)
    if seed is not None:
        raw["seed"] = seed
    if paths is not None:
        raw["paths"] = paths
    output = dict(raw.get("output") or {})
    if out is not None:
        output["dir"] = out
    if fmt is not None:
        output["format"] = fmt
    raw["output"] = output
    if "seed" not in raw or raw["seed"] is None:
        raise ConfigError("seed is mandatory")
    try:
        s = int(raw["seed"])
    except (TypeError, ValueError):
        raise ConfigError("seed must be an integer") from None
    if not 0 <= s < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    P = int(raw.get("paths", 10000))
    f = output.get("format", "both")
    if f not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    boot = raw.get("bootstrap") or {}
    models = raw.get("models") or {}
    if not isinstance(models, dict):
        raise ConfigError("models must be a mapping of name -> spec")
    for name, spec in models.items():
        _validate_model(name, spec)
    checks = raw.get("checks")
    if not checks:
        raise ConfigError("checks list is empty")
    seen = set()
    resolved = []
    for i, entry in enumerate(checks):
        if not isinstance(entry, dict) or "check" not in entry:
            raise ConfigError(f"check #{i} needs a 'check' name")
        name = entry["check"]
        if name not in CATALOG:
            raise ConfigError(f"unknown check {name!r}")
        cid = str(entry.get("id", f"{name}#{i:03d}"))
        if cid in seen:
            raise ConfigError(f"duplicate check id {cid!r}")
        seen.add(cid)
        info = CATALOG[name]
        bad = set(entry) - {"id", "check"} - set(info.options)
        if bad:
            raise ConfigError(f"{cid}: unknown options {sorted(bad)} for {name}")
        if "model" in info.options and "model" in entry and entry["model"] not in models:
            raise ConfigError(f"{cid}: model {entry['model']!r} is not defined")
        if info.statistical and "model" in entry and not models[entry["model"]].get("exact"):
            if int(entry.get("paths", P)) < MIN_PATHS:
                raise ConfigError(f"{cid}: statistical checks need paths >= {MIN_PATHS}")
        resolved.append({**entry, "id": cid})
    return ExperimentConfig(s, P, int(raw.get("workers", 1)), float(boot.get("level", 0.99)),
                            int(boot.get("resamples", 1000)), str(output.get("dir", "reports")), f,
                            models, resolved, raw)


def _validate_model(name, spec):
    if not isinstance(spec, dict) or "n" not in spec:
        raise ConfigError(f"model {name!r} needs at least 'n'")
    if spec.get("exact"):
        if spec.get("process", "iid") not in ("iid", "martingale_diff"):
            raise ConfigError(f"model {name!r}: exact process must be iid or martingale_diff")
        if not 1 <= int(spec["n"]) <= iv.MAX_ENUMERATION:
            raise ConfigError(f"model {name!r}: exact enumeration needs n <= {iv.MAX_ENUMERATION}")
        return
    if spec.get("kind") not in KINDS:
        raise ConfigError(f"model {name!r}: kind must be one of {KINDS}")
    try:
        _model_from(spec)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"model {name!r}: {exc}") from exc


def _model_from(spec) -> ProcessModel:
    d = {k: v for k, v in spec.items() if k not in ("stream", "paths")}
    if "marginal" in d:
        d["marginal"] = mg.from_spec(d["marginal"])
    return ProcessModel.from_spec(d)


# -- execution context ------------------------------------------------------------------------

class _Context:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self._sources = {}

    def prepare(self, entry):
        """Build the source a check needs (serially, before the pool starts)."""
        if "model" not in entry:
            return
        name = entry["model"]
        spec = self.cfg.models[name]
        P = int(entry.get("paths", spec.get("paths", self.cfg.paths)))
        key = (name, P)
        if key in self._sources:
            return
        if spec.get("exact"):
            src = iv.RademacherEnumeration(int(spec["n"]), spec.get("process", "iid"))
        else:
            model = _model_from(spec)
            seed = rng.derive_seed(self.cfg.seed, "model", name, P)
            if spec.get("stream"):
                src = stream_paths(model, P, seed)
            else:
                src = generate(model, P, seed)
        self._sources[key] = src

    def source(self, entry):
        name = entry["model"]
        spec = self.cfg.models[name]
        P = int(entry.get("paths", spec.get("paths", self.cfg.paths)))
        return self._sources[(name, P)]

    def seed_for(self, entry) -> int:
        return rng.derive_seed(self.cfg.seed, "check", entry["id"])


def _weights(spec, n: int) -> sc.WeightSequence:
    if isinstance(spec, (list, tuple)):
        return sc.WeightSequence.explicit(spec)
    if "constant" in spec:
        return sc.WeightSequence.constant(float(spec["constant"]), n)
    if "power" in spec:
        c, e = spec["power"]
        return sc.WeightSequence.power(float(c), float(e), n)
    if "geometric" in spec:
        c, q = spec["geometric"]
        return sc.WeightSequence.geometric(float(c), float(q), n)
    if "values" in spec:
        return sc.WeightSequence.explicit(spec["values"])
    raise ValueError(f"cannot read weights {spec!r}")


def _norm(spec, n: int) -> Optional[sc.NormalizerSequence]:
    if spec is None:
        return None
    if spec == "identity":
        return sc.NormalizerSequence.power(1.0, 1.0, n)
    if isinstance(spec, (list, tuple)):
        return sc.NormalizerSequence.explicit(spec, unbounded=True)
    if "constant" in spec:
        return sc.NormalizerSequence.constant(float(spec["constant"]), n)
    if "power" in spec:
        c, e = spec["power"]
        return sc.NormalizerSequence.power(float(c), float(e), n)
    if "values" in spec:
        return sc.NormalizerSequence.explicit(spec["values"], unbounded=bool(spec.get("unbounded", True)))
    raise ValueError(f"cannot read normalizer {spec!r}")


def _boot(ctx, entry):
    return {"level": ctx.cfg.level, "n_boot": ctx.cfg.resamples}


def _f(x) -> float:
    return float(x)


def _record_rows(entry, records, seed) -> list:
    rows = []
    for rec in records:
        st = rec.statistic
        params = dict(rec.params)
        detail = {"bound_source": rec.bound_source, "exact": st.exact, "window": [st.lo, st.hi],
                  "r": st.r, "one_sided": st.one_sided, **({"notes": rec.notes} if rec.notes else {})}
        rows.append(ReportRow(entry["id"], entry["check"], rec.model, params, st.kind, st.estimate,
                              st.ci[0], st.ci[1], rec.bound_value, rec.verdict, rec.margin, seed, detail))
    return rows


def _rate_row(entry, rep: sh.RateCheckReport, model_label, seed) -> ReportRow:
    verdict = {"Pass": "Holds", "Fail": "Inconclusive", "NotApplicable": "NotApplicable"}[rep.status]
    est = float(rep.quantiles[-1, 0]) if rep.quantiles.size else math.nan
    detail = {"grid": rep.grid.tolist(), "levels": list(rep.levels),
              "quantiles": rep.quantiles.tolist(), "verdicts": rep.verdicts, "reason": rep.reason,
              "horizon": rep.horizon}
    if rep.secondary is not None:
        detail["secondary"] = rep.secondary.tolist()
    for k, v in rep.extra.items():
        if isinstance(v, sh.PMomentCheck):
            v = {"integral_upper": v.integral_upper, "series_partial": v.series_partial,
                 "series_tail": v.series_tail}
        detail[k] = v
    return ReportRow(entry["id"], entry["check"], model_label, _echo(entry), rep.check, est, est, est,
                     math.nan, verdict, math.nan, seed, detail)


def _echo(entry) -> dict:
    return {k: v for k, v in entry.items() if k not in ("id", "check", "model")}


def _plain_row(entry, statistic, estimate, bound, ok, seed, model="", detail=None, params=None,
               not_applicable=False) -> ReportRow:
    verdict = "NotApplicable" if not_applicable else ("Holds" if ok else "Violated")
    margin = math.inf if estimate == 0 else (bound / estimate if math.isfinite(bound) else math.nan)
    return ReportRow(entry["id"], entry["check"], model, params if params is not None else _echo(entry),
                     statistic, float(estimate), float(estimate), float(estimate), float(bound), verdict,
                     float(margin), seed, detail or {})


def _scheme(src, entry) -> BoundScheme:
    model = src.model
    scheme = theoretical_bound(model.with_length(src.n), float(entry.get("order", 2.0)),
                               entry.get("inequality", "probability"))
    if "K" in entry:
        scheme = scheme.with_constant(float(entry["K"]))
    return scheme


# -- runners ------------------------------------------------------------------------------------

def _run_kolmogorov(ctx, entry, seed):
    src = ctx.source(entry)
    windows = [tuple(w) if isinstance(w, list) else w for w in entry.get("windows", [src.n])]
    recs = iv.check_kolmogorov(src, _scheme(src, entry), windows, entry.get("epsilons"),
                               K=entry.get("K"), constant_scale=float(entry.get("constant_scale", 1.0)),
                               **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_hajek_renyi(ctx, entry, seed):
    src = ctx.source(entry)
    norm = _norm(entry.get("norm", "identity"), src.n)
    ms = entry.get("m")
    ms = ms if isinstance(ms, list) else [ms]
    recs = []
    for m in ms:
        recs += iv.check_hajek_renyi(src, _scheme(src, entry), norm, m, entry.get("epsilons"),
                                     K=entry.get("K"), C=entry.get("C"),
                                     constant_scale=float(entry.get("constant_scale", 1.0)),
                                     **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_kuczmaszewska(ctx, entry, seed):
    recs = iv.check_kuczmaszewska_4th(ctx.source(entry),
                                      constant_scale=float(entry.get("constant_scale", 1.0)),
                                      **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_shao(ctx, entry, seed):
    ps = entry.get("p", 2.0)
    recs = []
    for p in (ps if isinstance(ps, list) else [ps]):
        recs += iv.check_shao_na(ctx.source(entry), float(p),
                                 constant_scale=float(entry.get("constant_scale", 1.0)), **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_chandra_ghosal(ctx, entry, seed):
    recs = iv.check_chandra_ghosal(ctx.source(entry), entry.get("epsilons"), q=entry.get("q"),
                                   constant_scale=float(entry.get("constant_scale", 1.0)),
                                   **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_christofides(ctx, entry, seed):
    src = ctx.source(entry)
    recs = iv.check_christofides(src, _norm(entry.get("norm"), src.n), entry.get("epsilons"),
                                 constant_scale=float(entry.get("constant_scale", 1.0)),
                                 **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_kounias_weng(ctx, entry, seed):
    src = ctx.source(entry)
    rs = entry.get("r", 2.0)
    recs = []
    for r in (rs if isinstance(rs, list) else [rs]):
        recs += iv.check_kounias_weng(src, float(r), _norm(entry.get("norm"), src.n),
                                      entry.get("epsilons"),
                                      constant_scale=float(entry.get("constant_scale", 1.0)),
                                      **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_serfling(ctx, entry, seed):
    recs = iv.check_serfling(ctx.source(entry), a=int(entry.get("a", 0)), length=entry.get("length"),
                             constant_scale=float(entry.get("constant_scale", 1.0)), **_boot(ctx, entry))
    return _record_rows(entry, recs, ctx.cfg.seed)


def _run_implied(ctx, entry, seed):
    spec = ctx.cfg.models[entry["model"]]
    model = _model_from(spec)
    lengths = entry.get("lengths") or [2 ** k for k in range(7, 14)]
    P = int(entry.get("paths", ctx.cfg.paths))
    res = iv.estimate_implied_constant(model, lengths, P, seed, tol=float(entry.get("tol", 0.2)),
                                       **_boot(ctx, entry))
    detail = {"lengths": res.lengths.tolist(), "K_hat": res.K_hat.tolist(), "ci": res.ci.tolist(),
              "ratios": res.ratios.tolist(), "trend": res.verdict}
    est = float(np.max(res.ratios))
    bound = 1.0 + float(entry.get("tol", 0.2))
    verdict = "Holds" if res.verdict == "Bounded" else "Inconclusive"
    return [ReportRow(entry["id"], entry["check"], model.label, _echo(entry), "ImpliedConstantRatio", est,
                      est, est, bound, verdict, bound / est, ctx.cfg.seed, detail)]


def _run_transfer(ctx, entry, seed):
    trials = int(entry.get("trials", 200))
    n_lo, n_hi = entry.get("n_range", [3, 14])
    process = entry.get("process", "iid")
    r_choices = entry.get("r", [1.0, 1.5, 2.0, 3.0])
    gen = rng.stream(seed, 0)
    rows = []
    for t in range(trials):
        n = int(gen.integers(n_lo, n_hi + 1))
        r = float(r_choices[int(gen.integers(0, len(r_choices)))])
        alpha = gen.uniform(0.2, 3.0, n)
        norm = np.cumsum(gen.uniform(0.05, 2.0, n)) + float(gen.uniform(0.5, 2.0))
        tr = iv.transfer_trial(iv.RademacherEnumeration(n, process), alpha, norm, r)
        ratio = max(tr.C_first / sc.constant_transfer(tr.K_first, r, "prob1"),
                    tr.C_second / sc.constant_transfer(tr.K_second, r, "prob2"),
                    tr.C_first_moment / sc.constant_transfer(tr.K_first_moment, r, "moment1"))
        ok = tr.first_ok and tr.second_ok and tr.moment_ok
        detail = {"K_first": tr.K_first, "K_second": tr.K_second, "C_first": tr.C_first,
                  "C_second": tr.C_second, "K_first_moment": tr.K_first_moment,
                  "C_first_moment": tr.C_first_moment, "second_from_first_ok": tr.second_from_first_ok}
        rows.append(_plain_row(entry, "TransferRatio", ratio, 1.0, ok, ctx.cfg.seed,
                               f"exact:{process},n={n}", detail,
                               {"trial": t, "n": n, "r": r, "alpha": alpha.tolist(), "norm": norm.tolist()}))
    return rows


def _label(src) -> str:
    m = getattr(src, "model", None)
    return m.label if m is not None else "custom"


def _run_slln_decay(ctx, entry, seed):
    src = ctx.source(entry)
    alpha = _weights(entry["alpha"], src.n) if "alpha" in entry else None
    rep = sh.slln_decay(src, _norm(entry.get("norm", "identity"), src.n), entry["grid"], alpha=alpha,
                        r=float(entry.get("r", 2.0)), factor=float(entry.get("factor", 2.0)))
    return [_rate_row(entry, rep, _label(src), ctx.cfg.seed)]


def _envelope(entry, n):
    alpha = _weights(entry.get("alpha", {"constant": 1.0}), n)
    b = _norm(entry.get("norm", "identity"), n)
    r = float(entry.get("r", 2.0))
    if entry.get("phi") == "power_log":
        return sc.phi_envelope(alpha, b, r, sc.PhiFunction.power_log(), n)
    return sc.hu_hu_envelope(alpha, b, r, float(entry.get("delta", 0.5)), n)


def _run_rate_envelope(ctx, entry, seed):
    src = ctx.source(entry)
    env = _envelope(entry, src.n)
    rep = sh.rate_envelope_check(src, env, entry["grid"], start=entry.get("start"),
                                 tol=float(entry.get("tol", 0.10)))
    return [_rate_row(entry, rep, _label(src), ctx.cfg.seed)]


def _run_log_slln(ctx, entry, seed):
    src = ctx.source(entry)
    rep = sh.log_slln_check(src, entry["grid"], float(entry.get("delta", 0.45)),
                            ratio_tol=float(entry.get("ratio_tol", 1.1)))
    return [_rate_row(entry, rep, _label(src), ctx.cfg.seed)]


def _run_mz(ctx, entry, seed):
    src = ctx.source(entry)
    rep = sh.mz_slln_check(src, float(entry["p"]), entry["grid"], factor=float(entry.get("factor", 2.0)))
    return [_rate_row(entry, rep, _label(src), ctx.cfg.seed)]


def _run_pmoment(ctx, entry, seed):
    if "model" in entry:
        spec = ctx.cfg.models[entry["model"]]
        target = _model_from(spec)
        label = target.label
    else:
        target = mg.from_spec(entry["marginal"])
        label = target.name
    res = sh.pmoment_check(target, float(entry["p"]))
    detail = {"integral_ok": res.integral_ok, "integral_value": res.integral_value,
              "integral_tail": res.integral_tail, "series_ok": res.series_ok,
              "series_partial": res.series_partial, "series_tail": res.series_tail, "reason": res.reason}
    return [_plain_row(entry, "PMomentIntegral", res.integral_upper, math.inf, res.holds, ctx.cfg.seed,
                       label, detail, not_applicable=not res.holds)]


def _seq_common(entry):
    n = int(entry.get("N", 10**6))
    return n, _weights(entry.get("alpha", {"constant": 1.0}), n), _norm(entry.get("norm", "identity"), n)


def _run_series(ctx, entry, seed):
    n, alpha, b = _seq_common(entry)
    res = sc.series_ratio_sum(alpha, b, float(entry.get("r", 2.0)), n)
    detail = {"status": res.status, "tail_lower": res.tail_lower, "tail_bound": res.tail_bound}
    est = res.limit if res.limit is not None else float(res.partial_sums[-1])
    target = entry.get("target")
    if target is None:
        return [_plain_row(entry, "SeriesLimit", est, math.inf, res.status == "converged", ctx.cfg.seed,
                           detail=detail, not_applicable=res.status != "converged")]
    err = abs(est - float(target))
    return [_plain_row(entry, "SeriesLimitError", err, float(entry.get("tol", 1e-4)),
                       err <= float(entry.get("tol", 1e-4)), ctx.cfg.seed, detail=detail)]


def _run_dini(ctx, entry, seed):
    n = int(entry.get("N", 100))
    c = _weights(entry.get("c", {"geometric": [1.0, 0.5]}), n)
    res = sc.dini_transform(c, float(entry.get("delta", 0.5)), n)
    tol = float(entry.get("tol", 1e-4))
    if "target" in entry:
        err = abs(res.value - float(entry["target"]))
        return [_plain_row(entry, "DiniError", err, tol, err <= tol, ctx.cfg.seed,
                           detail={"value": res.value})]
    return [_plain_row(entry, "DiniIncrement", res.relative_increment, tol, res.relative_increment <= tol,
                       ctx.cfg.seed, detail={"value": res.value})]


def _run_hu_hu(ctx, entry, seed):
    n = int(entry.get("N", 10**4))
    env = _envelope(entry, n)
    lo, hi = entry.get("range", [10, n])
    k = np.arange(lo, hi + 1)
    target = k.astype(float) ** float(entry.get("exponent", 0.75))
    dev = float(np.max(np.abs(env.beta[lo - 1:hi] / target - 1.0)))
    tol = float(entry.get("tol", 0.15))
    return [_plain_row(entry, "EnvelopeRelativeDeviation", dev, tol, dev <= tol, ctx.cfg.seed,
                       detail={"branch": env.branch, "ratio_decreasing": env.ratio_decreasing})]


def _run_abel(ctx, entry, seed):
    n = int(entry.get("N", 10**5))
    alpha = _weights(entry.get("alpha", {"constant": 1.0}), n)
    b = _norm(entry.get("norm", "identity"), n)
    res = sc.abel_condition_check(alpha, b, float(entry.get("r", 2.0)), n)
    ok = bool(res.abel_sum_converges and res.normalized_bounded and res.series_converges)
    return [_plain_row(entry, "AbelResidual", float(res.abel_residual), float(entry.get("tol", 1e-8)),
                       ok and float(res.abel_residual) <= float(entry.get("tol", 1e-8)), ctx.cfg.seed,
                       detail={"abel_sum_converges": bool(res.abel_sum_converges),
                               "normalized_bounded": bool(res.normalized_bounded),
                               "series_converges": bool(res.series_converges)})]


def _run_kw_domination(ctx, entry, seed):
    a = sc.WeightSequence.explicit(entry["a"])
    r = float(entry["r"])
    b = _norm(entry.get("norm", {"constant": 1.0}), a.horizon)
    lhs, rhs, holds = sc.kounias_weng_domination(a, r, b)
    return [_plain_row(entry, "WeightedTransformSum", float(lhs[-1]), float(rhs[-1]), holds, ctx.cfg.seed,
                       detail={"lhs": lhs, "rhs": rhs})]


def _run_constant_transfer(ctx, entry, seed):
    K = float(entry.get("K", 1.0))
    r = float(entry.get("r", 2.0))
    rows = []
    for form, expected in sorted((entry.get("expected") or {}).items()):
        got = sc.constant_transfer(K, r, form)
        ok = abs(got - float(expected)) <= 4 * math.ulp(float(expected))
        rows.append(_plain_row(entry, "TransferConstant", got, float(expected), ok, ctx.cfg.seed,
                               params={"K": K, "r": r, "form": form}))
    if not rows:
        for form in sc.TRANSFER_FORMS:
            got = sc.constant_transfer(K, r, form)
            rows.append(_plain_row(entry, "TransferConstant", got, math.inf, True, ctx.cfg.seed,
                                   params={"K": K, "r": r, "form": form}))
    return rows


_BOOT = ("paths",)
_EPS = ("epsilons", "constant_scale")

CATALOG = {info.name: info for info in [
    CheckInfo("check_kolmogorov", "Kolmogorov-type maximal inequality (Doob; Kolmogorov)",
              "E[max|S|]^r or P(max|S|>=eps) against K * sum(alpha) on first- or second-kind windows",
              ("model", "inequality", "order", "K", "windows") + _EPS + _BOOT, True, _run_kolmogorov),
    CheckInfo("check_hajek_renyi", "Hajek & Renyi (1955); constant transfer from the Kolmogorov form",
              "weighted max |S_l/b_l| against C * sum(alpha_l/b_l^r), first or two-segment form",
              ("model", "inequality", "order", "K", "C", "norm", "m") + _EPS + _BOOT, True, _run_hajek_renyi),
    CheckInfo("check_kuczmaszewska_4th", "Kuczmaszewska (2005), fourth moment for NA sequences",
              "E[max|S|]^4 against sum E X^4 + 2 sum E X_i^2 sum_{j<i} E X_j^2",
              ("model", "constant_scale") + _BOOT, True, _run_kuczmaszewska),
    CheckInfo("check_shao_na", "Matula (1992); Shao (2000), NA moment inequalities",
              "E[max|S|]^p against 2^(3-p) sum E|X|^p (p<=2) or the Rosenthal-type form (p>2)",
              ("model", "p", "constant_scale") + _BOOT, True, _run_shao),
    CheckInfo("check_chandra_ghosal", "Chandra & Ghosal (1996), AANA maximal inequality",
              "P(max|S|>=eps) against (2/eps^2)(A+sqrt(1+A^2))^2 sum E X^2",
              ("model", "q") + _EPS + _BOOT, True, _run_chandra_ghosal),
    CheckInfo("check_christofides", "Christofides (2000), demisubmartingale inequality",
              "P(max S_l/b_l>=eps) against (1/eps) sum (E S_l^+ - E S_{l-1}^+)/b_l",
              ("model", "norm") + _EPS + _BOOT, True, _run_christofides),
    CheckInfo("check_kounias_weng", "Kounias & Weng (1969), arbitrary dependence",
              "P(max|S_l/b_l|>=eps) against eps^-r (sum (v_l/b_l^r)^(1/s))^s",
              ("model", "r", "norm") + _EPS + _BOOT, True, _run_kounias_weng),
    CheckInfo("check_serfling", "Serfling (1970), see Stout (1974); superadditive moment functions",
              "E(max_k |X_{a+1}+...+X_{a+k}|)^2 against (log 2n / log 2)^2 g(a, n)",
              ("model", "a", "length", "constant_scale") + _BOOT, True, _run_serfling),
    CheckInfo("estimate_implied_constant", "Shao (1995), rho-mixing maximal inequality",
              "trend of E[max|S|]^2 / (n max E X^2) over doubling n (constant not explicit)",
              ("model", "lengths", "tol") + _BOOT, True, _run_implied),
    CheckInfo("transfer_trial", "transfer of constants from Kolmogorov to Hajek-Renyi form",
              "exact minimal constants on random weights and normalizers; C <= 4K and C <= (1+4^(1/r))^r K",
              ("trials", "n_range", "process", "r"), False, _run_transfer),
    CheckInfo("slln_decay", "strong law S_n/b_n -> 0 under summable alpha_l/b_l^r",
              "quantiles of |S_n/b_n| over a horizon grid; decay verdict",
              ("model", "norm", "alpha", "r", "grid", "factor") + _BOOT, True, _run_slln_decay),
    CheckInfo("rate_envelope_check", "Hu & Hu (2006) rate envelope; Fazekas & Klesov (2000)",
              "quantiles of sup_k |S_k|/beta_k; bounded-trend verdict",
              ("model", "alpha", "norm", "r", "delta", "phi", "grid", "start", "tol") + _BOOT, True,
              _run_rate_envelope),
    CheckInfo("log_slln_check", "logarithmic strong law with rate (log n)^delta",
              "quantiles of |T_n| and (log n)^delta |T_n|",
              ("model", "grid", "delta", "ratio_tol") + _BOOT, True, _run_log_slln),
    CheckInfo("mz_slln_check", "Marcinkiewicz-Zygmund strong law via truncation",
              "quantiles of |S_n|/n^(1/p) gated by the tail conditions",
              ("model", "p", "grid", "factor") + _BOOT, True, _run_mz),
    CheckInfo("pmoment_check", "tail conditions of the Marcinkiewicz-Zygmund strong law",
              "int y^(p-1) G(y) dy and sum P(|X|^p > k), analytic tails",
              ("model", "marginal", "p"), False, _run_pmoment),
    CheckInfo("series_ratio_sum", "plumbing", "sum alpha_l/b_l^r with tail bound",
              ("alpha", "norm", "r", "N", "target", "tol"), False, _run_series),
    CheckInfo("dini_transform", "Dini theorem on tails of convergent series", "sum c_n / t_n^delta of tail sums",
              ("c", "delta", "N", "target", "tol"), False, _run_dini),
    CheckInfo("hu_hu_envelope", "Hu & Hu (2006) rate envelope",
              "beta_n = max_{k<=n} b_k t_k^(delta/r) against a power target",
              ("alpha", "norm", "r", "delta", "phi", "N", "range", "exponent", "tol"), False, _run_hu_hu),
    CheckInfo("abel_condition_check", "Abel summation conditions for weighted sums",
              "summation by parts identity and the implied summability", ("alpha", "norm", "r", "N", "tol"),
              False, _run_abel),
    CheckInfo("kounias_weng_domination", "Kounias & Weng (1969) weight transform",
              "sum alpha_l/b_l^r <= (sum a_l/b_l)^r for the transformed weights", ("a", "r", "norm"),
              False, _run_kw_domination),
    CheckInfo("constant_transfer", "transfer of constants from Kolmogorov to Hajek-Renyi form",
              "C from K for each transfer form", ("K", "r", "expected"), False, _run_constant_transfer),
]}


def list_checks() -> list:
    """Catalog entries sorted by name."""
    return [CATALOG[k] for k in sorted(CATALOG)]


def describe(name: str) -> str:
    if name not in CATALOG:
        raise KeyError(name)
    info = CATALOG[name]
    lines = [info.name, f"  citation: {info.citation}", f"  computes: {info.summary}",
             f"  options:  {', '.join(info.options)}",
             f"  needs simulated paths: {'yes' if info.statistical else 'no'}"]
    return "\n".join(lines)


# -- running and reporting -------------------------------------------------------------------------

@dataclass
class RunResult:
    rows: list
    timings: dict
    config: ExperimentConfig

    @property
    def violated(self) -> bool:
        return any(r.verdict == "Violated" for r in self.rows)

    @property
    def exit_code(self) -> int:
        return 1 if self.violated else 0


def run_config(cfg: ExperimentConfig, workers: Optional[int] = None) -> RunResult:
    ctx = _Context(cfg)
    for entry in cfg.checks:
        ctx.prepare(entry)

    def one(entry):
        t0 = time.perf_counter()
        rows = CATALOG[entry["check"]].runner(ctx, entry, ctx.seed_for(entry))
        return entry["id"], rows, time.perf_counter() - t0

    w = cfg.workers if workers is None else workers
    if w > 1:
        with ThreadPoolExecutor(max_workers=w) as pool:
            results = list(pool.map(one, cfg.checks))
    else:
        results = [one(e) for e in cfg.checks]
    results.sort(key=lambda t: t[0])
    rows = [r for _, rs, _ in results for r in rs]
    timings = {cid: dt for cid, _, dt in results}
    return RunResult(rows, timings, cfg)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return x


TABLE_COLUMNS = ("check_id", "check", "model", "statistic", "estimate", "ci_low", "ci_high", "bound",
                 "verdict", "margin", "seed", "params")


def table_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for r in rows:
        w.writerow([r.check_id, r.check, r.model, r.statistic, repr(float(r.estimate)), repr(float(r.ci_low)),
                    repr(float(r.ci_high)), repr(float(r.bound)), r.verdict, repr(float(r.margin)), r.seed,
                    json.dumps(_jsonable(r.params), sort_keys=True)])
    return buf.getvalue()


def structured_text(result: RunResult) -> str:
    cfg = result.config
    echo = {k: v for k, v in cfg.raw.items() if k not in ("output", "workers")}
    doc = {"seed": cfg.seed, "config": echo, "summary": _summary(result.rows),
           "rows": [{"check_id": r.check_id, "check": r.check, "model": r.model, "params": r.params,
                     "statistic": r.statistic, "estimate": r.estimate, "ci": [r.ci_low, r.ci_high],
                     "bound": r.bound, "verdict": r.verdict, "margin": r.margin, "seed": r.seed,
                     "citation": CATALOG[r.check].citation, "detail": r.detail} for r in result.rows]}
    return json.dumps(_jsonable(doc), sort_keys=True, indent=1) + "\n"


def _summary(rows) -> dict:
    counts = {v: 0 for v in REPORT_VERDICTS}
    for r in rows:
        counts[r.verdict] += 1
    return counts


def write_reports(result: RunResult, out_dir=None, fmt=None) -> list:
    cfg = result.config
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fmt = fmt or cfg.fmt
    written = []
    if fmt in ("table", "both"):
        p = out / "report.csv"
        p.write_text(table_text(result.rows))
        written.append(p)
    if fmt in ("structured", "both"):
        p = out / "report.json"
        p.write_text(structured_text(result))
        written.append(p)
    # wall times vary between runs, so they live outside the reports
    (out / "timing.json").write_text(json.dumps({k: round(v, 6) for k, v in sorted(result.timings.items())},
                                                indent=1) + "\n")
    return written


def run(config_path, *, seed=None, paths=None, out=None, fmt=None, workers=None) -> int:
    """Run a config file and write reports; returns the exit code (0, 1 or 2)."""
    try:
        cfg = load_config(config_path, seed=seed, paths=paths, out=out, fmt=fmt)
        result = run_config(cfg, workers)
    except (ConfigError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    write_reports(result)
    return result.exit_code
