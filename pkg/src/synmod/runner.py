"""Batch driver: parameter grids, suite selection, deterministic reports.

A run expands (suite x grid point) into jobs, evaluates them (optionally
on a thread pool; aggregation is order-independent), and produces a
machine-readable report whose content is byte-identical across runs and
--jobs settings, timing fields aside.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .chart import Chart, Divisor, EisensteinData
from .fields import gf, is_prime
from .outcome import FAIL, HYP_NOT_MET, INCONCLUSIVE, PASS
from .symbols import (check_graded_symbol_map, check_product_iso,
                      check_tame_base_change)
from .syntomic import (check_gr_structure, check_gr_vanishing_above,
                       check_pd_envelope, gr_case)
from .verify_derham import (check_cartier_modulus, check_connecting_identity,
                            check_graded_acyclicity, check_log_kernel,
                            check_ml_transition, check_quasi_iso_inclusion,
                            check_tm_sequences)

ALL_SUITES = ("cartier", "acyclicity", "log_kernel", "tm_sequences",
              "connecting", "ml_transition", "pd_envelope", "gr_structure",
              "symbols", "product", "base_change")


class ConfigError(ValueError):
    """Invalid run configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    p: int = 3
    s: int = 1
    dim: int = 1
    window: int = None
    mults: list = field(default_factory=lambda: [(1,)])
    eisenstein: list = field(default_factory=lambda: [(1, (1,))])
    q_values: list = None
    r_values: list = None
    suites: list = field(default_factory=lambda: list(ALL_SUITES))
    jobs: int = 1
    strict: bool = False
    symbols_per_config: int = 20
    seed: int = 0
    report_path: str = None

    def validate(self):
        if not is_prime(self.p) or self.p < 3:
            raise ConfigError("p must be an odd prime (got %r)" % (self.p,))
        if self.s < 1:
            raise ConfigError("field exponent s must be >= 1")
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if self.window is None:
            self.window = self.p ** 2
        if self.window < self.p:
            raise ConfigError("window must be >= p")
        if self.q_values is None:
            self.q_values = list(range(0, min(self.p - 1, self.dim + 1)))
        if self.r_values is None:
            self.r_values = list(range(0, self.p - 1))
        for q in self.q_values:
            if not (0 <= q <= self.p - 2):
                raise ConfigError("q=%d outside 0..p-2" % q)
        for r in self.r_values:
            if not (0 <= r <= self.p - 2):
                raise ConfigError("r=%d outside 0..p-2" % r)
        for mv in self.mults:
            if len(mv) != self.dim:
                raise ConfigError("multiplicity vector %r has arity != dim" % (mv,))
            if any(v < 0 for v in mv):
                raise ConfigError("multiplicities must be non-negative")
        for suite in self.suites:
            if suite not in ALL_SUITES:
                raise ConfigError("unknown suite %r (choose from %s)"
                                  % (suite, ", ".join(ALL_SUITES)))
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        return self

    def to_dict(self):
        return {
            "p": self.p, "s": self.s, "dim": self.dim, "window": self.window,
            "mults": [list(m) for m in self.mults],
            "eisenstein": [[e, list(c)] for e, c in self.eisenstein],
            "q_values": list(self.q_values), "r_values": list(self.r_values),
            "suites": list(self.suites), "jobs": self.jobs,
            "strict": self.strict, "symbols_per_config": self.symbols_per_config,
            "seed": self.seed,
        }


def _charts(config: RunConfig):
    out = []
    for e, coeffs in config.eisenstein:
        chart = Chart(config.p, config.dim, config.window, config.s,
                      EisensteinData(e, tuple(coeffs)))
        out.append(chart)
    return out


def build_jobs(config: RunConfig):
    """The deterministic job list for a config."""
    jobs = []
    charts = _charts(config)
    p = config.p

    def add(suite, fn, *args, **kw):
        jobs.append((len(jobs), suite, fn, args, kw))

    for chart in charts:
        eis = chart.eisenstein
        divisors = [Divisor.from_vector(chart, mv) for mv in config.mults]
        for D in divisors:
            if "cartier" in config.suites:
                for q in config.q_values:
                    add("cartier", check_cartier_modulus, chart, D, q)
                    add("cartier", check_quasi_iso_inclusion, chart, D, q)
            if "acyclicity" in config.suites:
                add("acyclicity", check_graded_acyclicity, chart, D,
                    random_forms=100, seed=config.seed)
            if "log_kernel" in config.suites:
                for q in config.q_values:
                    add("log_kernel", check_log_kernel, chart, D, q,
                        bound=min(config.window, p + 2))
            if "tm_sequences" in config.suites:
                for q in config.q_values:
                    for m in range(1, 2 * p + 1):
                        add("tm_sequences", check_tm_sequences, chart, D, m, q)
            if "connecting" in config.suites:
                for q in config.q_values:
                    for m in range(0, 2 * p + 1):
                        add("connecting", check_connecting_identity, chart, D, m, q)
            if "ml_transition" in config.suites:
                for q in config.q_values:
                    add("ml_transition", check_ml_transition, chart, D,
                        D.scale(p), q)
            if "pd_envelope" in config.suites:
                add("pd_envelope", check_pd_envelope, chart, D)
            if "gr_structure" in config.suites:
                for q in config.q_values:
                    for r in config.r_values:
                        if not (q <= r <= p - 2):
                            continue
                        mmax = -(-eis.e * p * (r - q + 1) // (p - 1)) + 1
                        for m in range(0, mmax + 1):
                            add("gr_structure", check_gr_structure,
                                chart, D, eis, q, r, m)
                        add("gr_structure", check_gr_vanishing_above,
                            chart, D, eis, q, r)
            if "symbols" in config.suites and config.s == 1:
                for q in config.q_values:
                    if q < 1:
                        continue
                    for m in range(0, p + 2):
                        add("symbols", check_graded_symbol_map, chart, D,
                            eis, q, m, n_symbols=config.symbols_per_config,
                            seed=config.seed)
            if "product" in config.suites:
                coset = chart.field.pth_power_coset()
                if eis.a0 in coset:
                    for q in config.q_values:
                        for r in config.r_values:
                            if q <= r <= p - 2:
                                add("product", check_product_iso,
                                    chart, D, eis, q, r)
            if "base_change" in config.suites:
                for q in config.q_values:
                    for r in config.r_values:
                        if not (q <= r <= p - 2):
                            continue
                        for w in (1, 2, p):
                            add("base_change", check_tame_base_change,
                                chart, D, eis, q, r, w)
    return jobs


def run(config: RunConfig):
    """Execute every (suite x grid point) job; deterministic aggregation."""
    config.validate()
    jobs = build_jobs(config)
    results = [None] * len(jobs)
    t0 = time.time()
    suite_times = {}

    def execute(job):
        idx, suite, fn, args, kw = job
        t = time.time()
        outcome = fn(*args, **kw)
        return idx, suite, outcome, time.time() - t

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            for idx, suite, outcome, dt in pool.map(execute, jobs):
                results[idx] = (suite, outcome)
                suite_times[suite] = suite_times.get(suite, 0.0) + dt
    else:
        for job in jobs:
            idx, suite, outcome, dt = execute(job)
            results[idx] = (suite, outcome)
            suite_times[suite] = suite_times.get(suite, 0.0) + dt

    checks = []
    summary = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0, HYP_NOT_MET: 0}
    for suite, outcome in results:
        entry = outcome.to_dict()
        entry["suite"] = suite
        checks.append(entry)
        summary[outcome.status] += 1
    report = {
        "version": __version__,
        "config": config.to_dict(),
        "checks": checks,
        "summary": dict(sorted(summary.items())),
        "timing": {"total_s": round(time.time() - t0, 3),
                   "per_suite_s": {k: round(v, 3)
                                   for k, v in sorted(suite_times.items())}},
    }
    return report


def report_exit_code(report, strict=False):
    s = report["summary"]
    if s.get(FAIL, 0):
        return 1
    if strict and s.get(INCONCLUSIVE, 0):
        return 1
    return 0


def strip_timing(report):
    out = dict(report)
    out.pop("timing", None)
    return out


def emit_report(report, path=None, stream=None):
    """Serialize the report (stable key order) and print a summary table."""
    stream = stream or sys.stdout
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    by_suite = {}
    for c in report["checks"]:
        key = c["suite"]
        by_suite.setdefault(key, {PASS: 0, FAIL: 0, INCONCLUSIVE: 0,
                                  HYP_NOT_MET: 0})
        by_suite[key][c["status"]] += 1
    print("suite            pass  fail  inconcl  hyp-not-met", file=stream)
    for suite in sorted(by_suite):
        s = by_suite[suite]
        print("%-16s %4d  %4d  %7d  %11d"
              % (suite, s[PASS], s[FAIL], s[INCONCLUSIVE], s[HYP_NOT_MET]),
              file=stream)
    tot = report["summary"]
    print("total: %d checks, %d fail, %d inconclusive, %d hypothesis-not-met"
          % (sum(tot.values()), tot.get(FAIL, 0), tot.get(INCONCLUSIVE, 0),
             tot.get(HYP_NOT_MET, 0)), file=stream)
    for c in report["checks"]:
        if c["status"] == FAIL:
            print("FAIL %s %s: %s" % (c["suite"], c["name"],
                                      "; ".join(c["notes"]) or c.get("witness")),
                  file=stream)
    return text


def load_report(path):
    with open(path) as fh:
        return json.load(fh)
