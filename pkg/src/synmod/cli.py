"""Command line driver.

    synmod --p 3 --dim 2 --mult 1,2 --mult 0,3 --eisenstein "e=2;a=1,2" \
           --suite cartier --suite gr_structure --report out.json

A JSON config file may supply the same fields (--config run.json); flags
override the file.  Exit codes: 0 = no failures, 1 = at least one fail
(or inconclusive under --strict), 2 = usage/config error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .runner import (ALL_SUITES, ConfigError, RunConfig, emit_report,
                     report_exit_code, run)


def parse_mult(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError("bad multiplicity vector %r (want e.g. 2,1,0)" % text)


def parse_eisenstein(text):
    """e=2;a=1,2 -> (2, (1, 2))."""
    try:
        parts = dict(kv.split("=") for kv in text.split(";"))
        e = int(parts["e"])
        coeffs = tuple(int(x) for x in parts["a"].split(","))
        return e, coeffs
    except (KeyError, ValueError):
        raise ConfigError("bad eisenstein spec %r (want e.g. e=2;a=1,2)" % text)


def parse_int_list(text):
    return [int(x) for x in text.split(",")]


def build_parser():
    ap = argparse.ArgumentParser(
        prog="synmod",
        description="verification suites for log de Rham complexes with "
                    "modulus and syntomic graded pieces")
    ap.add_argument("--config", help="JSON config file (flags override)")
    ap.add_argument("--p", type=int)
    ap.add_argument("--field-exp", type=int, dest="s",
                    help="field exponent s (scalars F_{p^s})")
    ap.add_argument("--dim", type=int, help="number of semistable coordinates d")
    ap.add_argument("--window", type=int, help="total-degree window N")
    ap.add_argument("--mult", action="append", default=None,
                    help="divisor multiplicities, e.g. 2,1,0 (repeatable)")
    ap.add_argument("--eisenstein", action="append", default=None,
                    help='Eisenstein data "e=2;a=1,2" (repeatable)')
    ap.add_argument("--q", help="comma-separated q values")
    ap.add_argument("--r", help="comma-separated r values")
    ap.add_argument("--suite", action="append", default=None,
                    choices=list(ALL_SUITES), help="suite to run (repeatable)")
    ap.add_argument("--symbols", type=int, dest="symbols_per_config",
                    help="symbols generated per configuration")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--report", help="write the JSON report here")
    ap.add_argument("--strict", action="store_true", default=None,
                    help="inconclusive outcomes fail the run")
    ap.add_argument("--jobs", type=int, help="parallel evaluation degree")
    return ap


def config_from_args(argv):
    ap = build_parser()
    ns = ap.parse_args(argv)
    data = {}
    if ns.config:
        with open(ns.config) as fh:
            data = json.load(fh)
    cfg = RunConfig()
    if "p" in data:
        cfg.p = int(data["p"])
    if "s" in data:
        cfg.s = int(data["s"])
    if "dim" in data:
        cfg.dim = int(data["dim"])
    if "window" in data:
        cfg.window = int(data["window"])
    if "mults" in data:
        cfg.mults = [tuple(m) for m in data["mults"]]
    if "eisenstein" in data:
        cfg.eisenstein = [(int(e), tuple(c)) for e, c in data["eisenstein"]]
    if "q_values" in data:
        cfg.q_values = list(data["q_values"])
    if "r_values" in data:
        cfg.r_values = list(data["r_values"])
    if "suites" in data:
        cfg.suites = list(data["suites"])
    if "jobs" in data:
        cfg.jobs = int(data["jobs"])
    if "strict" in data:
        cfg.strict = bool(data["strict"])
    if "symbols_per_config" in data:
        cfg.symbols_per_config = int(data["symbols_per_config"])
    if "seed" in data:
        cfg.seed = int(data["seed"])
    if "report" in data and not ns.report:
        cfg.report_path = data["report"]
    # flags override
    if ns.p is not None:
        cfg.p = ns.p
    if ns.s is not None:
        cfg.s = ns.s
    if ns.dim is not None:
        cfg.dim = ns.dim
    if ns.window is not None:
        cfg.window = ns.window
    if ns.mult is not None:
        cfg.mults = [parse_mult(m) for m in ns.mult]
    if ns.eisenstein is not None:
        cfg.eisenstein = [parse_eisenstein(e) for e in ns.eisenstein]
    if ns.q is not None:
        cfg.q_values = parse_int_list(ns.q)
    if ns.r is not None:
        cfg.r_values = parse_int_list(ns.r)
    if ns.suite is not None:
        cfg.suites = list(ns.suite)
    if ns.symbols_per_config is not None:
        cfg.symbols_per_config = ns.symbols_per_config
    if ns.seed is not None:
        cfg.seed = ns.seed
    if ns.report:
        cfg.report_path = ns.report
    if ns.strict is not None:
        cfg.strict = ns.strict
    if ns.jobs is not None:
        cfg.jobs = ns.jobs
    return cfg


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        cfg.validate()
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    report = run(cfg)
    emit_report(report, cfg.report_path)
    return report_exit_code(report, cfg.strict)


if __name__ == "__main__":
    sys.exit(main())
