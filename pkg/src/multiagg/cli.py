"""Batch command line: generate graphs, run the algorithms, verify against the oracles.

Reports are JSON and embed the full configuration, the seed, the graph
digest and the library version, so identical invocations give identical
reports. Exit codes: 0 ok, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from .aggregators import max_aggregate, sum_aggregate
from .centrality import InvalidEpsilon, bc_setup, cc_approx
from .congest import SimConfig, SimError
from .graph import (Graph, GraphError, gen_barbell, gen_complete, gen_cycle, gen_diamond_chain,
                    gen_lowerbound_chain, gen_path, gen_random_connected, gen_star, load_graph,
                    save_graph)
from .mrct import EmptyS, mrct, mrct_rand
from .suites import SUITES, suite_congest

OUT_ENV = "MULTIAGG_OUT"
log = logging.getLogger("multiagg")


class UsageError(Exception):
    pass


# -- graph sources ----------------------------------------------------------------------

def _generate(a) -> Graph:
    kind = a.kind
    if kind == "random":
        if a.n is None:
            raise UsageError("--kind random needs --n")
        return gen_random_connected(a.n, a.p, a.max_weight, a.seed)
    if kind == "diamond":
        return gen_diamond_chain(a.n or 10)
    if kind == "chain":
        return gen_lowerbound_chain(a.s, a.d)
    if kind == "barbell":
        return gen_barbell(a.m)
    if kind == "path":
        return gen_path(a.n or 10)
    if kind == "star":
        return gen_star((a.n or 10) - 1)
    if kind == "cycle":
        return gen_cycle(a.n or 10)
    if kind == "complete":
        return gen_complete(a.n or 10)
    raise UsageError(f"unknown generator {kind!r}")


def _graph(a) -> Graph:
    if a.graph:
        return load_graph(a.graph)
    if a.kind:
        return _generate(a)
    raise UsageError("give --graph FILE or --kind GENERATOR")


def _read_nodes(path, g: Graph) -> list[int]:
    text = Path(path).read_text(encoding="utf-8")
    out = []
    for tok in text.replace(",", " ").split():
        try:
            v = int(tok)
        except ValueError:
            raise UsageError(f"{path}: {tok!r} is not a node ID") from None
        if not 1 <= v <= g.n:
            raise UsageError(f"{path}: node {v} outside 1..{g.n}")
        out.append(v)
    if not out:
        raise UsageError(f"{path}: empty node list")
    return sorted(set(out))


def _read_values(path, g: Graph) -> dict[int, int]:
    vals = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 2:
            raise UsageError(f"{path}:{lineno}: expected 'node value'")
        vals[int(line[0])] = int(line[1])
    missing = [u for u in g.nodes if u not in vals]
    if missing:
        raise UsageError(f"{path}: no value for nodes {missing[:5]}")
    return vals


# -- reports ----------------------------------------------------------------------------

def _config(a) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in sorted(vars(a).items()) if k not in skip}


def _out_path(a, stem: str) -> Path:
    if a.out:
        return Path(a.out)
    base = Path(os.environ.get(OUT_ENV, "."))
    return base / f"{stem}.json"


def _emit(a, report: dict, stem: str, trace=None) -> None:
    path = _out_path(a, stem)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    path.write_text(text + "\n", encoding="utf-8")
    if trace is not None and a.trace:
        trace.write_csv(path.with_suffix(".trace.csv"))
        trace.write_summary(path.with_suffix(".summary.json"))
    if not a.quiet:
        print(text)
    log.info("report written to %s", path)


def _envelope(a, g: Graph | None, body: dict, command: str) -> dict:
    return {"command": command, "version": __version__, "config": _config(a),
            "seed": getattr(a, "seed", None), "graph_hash": g.digest() if g else None,
            "graph_n": g.n if g else None, "result": body}


def _cfg(a) -> SimConfig:
    return SimConfig(bit_budget=a.bit_budget, strict_bits=a.strict_bits, seed=a.seed,
                     record=bool(a.trace))


# -- commands ---------------------------------------------------------------------------

def cmd_gen(a) -> int:
    g = _generate(a) if a.kind else None
    if g is None:
        raise UsageError("gen needs --kind")
    if a.out:
        save_graph(g, a.out)
        log.info("wrote %s (n=%d, m=%d, hash %s)", a.out, g.n, g.m, g.digest()[:12])
    else:
        sys.stdout.write(g.to_text())
    return 0


def _k(a):
    if a.k is None:
        return None
    return math.inf if a.k in ("inf", "infinity") else int(a.k)


def cmd_run_agg(a) -> int:
    g = _graph(a)
    S = _read_nodes(a.s_file, g) if a.s_file else list(g.nodes)
    vals = _read_values(a.values_file, g) if a.values_file else {u: u for u in g.nodes}
    fn = max_aggregate if a.fn == "max" else sum_aggregate
    res, trace = fn(g, S, _k(a), vals, _cfg(a))
    body = {"fn": a.fn, "results": [{"root": r, "value": res[r]} for r in sorted(res)],
            "completion_round": trace.completion, "max_bits": trace.max_bits}
    _emit(a, _envelope(a, g, body, "run-agg"), f"agg-{a.fn}-{g.digest()[:10]}", trace)
    return 0


def cmd_run_bc(a) -> int:
    g = _graph(a)
    res = bc_setup(g, tau_c=a.tau_c, n_hat=a.n_hat, c=a.c, eps_prime=a.eps_prime, seed=a.seed,
                   cfg=_cfg(a), mode=a.mode, force_all=a.force_all)
    body = res.report()
    body["max_bits"] = res.trace.max_bits
    _emit(a, _envelope(a, g, body, "run-bc"), f"bc-{g.digest()[:10]}-s{a.seed}", res.trace)
    return 0


def cmd_run_cc(a) -> int:
    g = _graph(a)
    res = cc_approx(g, a.eps, seed=a.seed, cfg=_cfg(a), force_all=a.force_all)
    body = res.report()
    body["max_bits"] = res.trace.max_bits
    _emit(a, _envelope(a, g, body, "run-cc"), f"cc-{g.digest()[:10]}-s{a.seed}", res.trace)
    return 0


def cmd_run_mrct(a) -> int:
    g = _graph(a)
    S = _read_nodes(a.s_file, g)
    if a.rand:
        res = mrct_rand(g, S, a.eps, seed=a.seed, cfg=_cfg(a))
    else:
        res = mrct(g, S, _cfg(a))
    body = res.report()
    body["sampled_roots"] = res.roots
    _emit(a, _envelope(a, g, body, "run-mrct"), f"mrct-{g.digest()[:10]}-s{a.seed}", res.trace)
    return 0


def cmd_verify(a) -> int:
    names = list(SUITES) if a.suite == "all" else [a.suite]
    reports = []
    for name in names:
        fn = SUITES[name]
        kw = {"seed": a.seed}
        if a.count is not None:
            kw["runs" if name in ("bc-stats", "cc-stats") else "count"] = a.count
        if a.n_max is not None and name not in ("bc-stats", "cc-stats"):
            kw["n_max"] = a.n_max
        rep = fn(**kw)
        reports.append(rep)
        print(rep.line(), file=sys.stderr)
    if a.suite == "all":
        rep = suite_congest(reports)
        reports.append(rep)
        print(rep.line(), file=sys.stderr)
    body = {"suites": [r.as_json() for r in reports], "passed": all(r.passed for r in reports)}
    for r in body["suites"]:
        r.pop("seconds")
    _emit(a, _envelope(a, None, body, "verify"), f"verify-{a.suite}-s{a.seed}")
    return 0 if body["passed"] else 1


# -- parser -----------------------------------------------------------------------------

def _common(p, graph=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", help=f"report path (default: ${OUT_ENV} or cwd)")
    p.add_argument("--quiet", action="store_true", help="do not echo the report")
    if graph:
        p.add_argument("--graph", help="graph file ('n <count>' then 'u v w' lines)")
        _gen_flags(p)
        p.add_argument("--bit-budget", type=int, default=None)
        p.add_argument("--strict-bits", action="store_true", help="fail on oversized messages")
        p.add_argument("--trace", action="store_true", help="also write trace CSV and summary JSON")


def _gen_flags(p):
    p.add_argument("--kind", choices=["random", "diamond", "chain", "barbell", "path", "star",
                                      "cycle", "complete"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, default=0.1, help="extra edge probability (random)")
    p.add_argument("--max-weight", type=int, default=10)
    p.add_argument("--s", type=int, default=4, help="roots of the chain family")
    p.add_argument("--d", type=int, default=4, help="chain length of the chain family")
    p.add_argument("--m", type=int, default=30, help="clique size of the barbell")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multiagg", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file of default flag values")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated graph")
    _gen_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run-agg", help="k-neighborhood max or sum for a root set")
    _common(p)
    p.add_argument("--fn", choices=["max", "sum"], required=True)
    p.add_argument("--k", default=None, help="depth bound, integer or 'inf' (default: whole graph)")
    p.add_argument("--s-file", help="root IDs (default: every node)")
    p.add_argument("--values-file", help="'node value' lines (default: the node ID)")
    p.set_defaults(func=cmd_run_agg)

    p = sub.add_parser("run-bc", help="approximate betweenness by adaptive sampling")
    _common(p)
    p.add_argument("--mode", choices=["exact", "bounded"], default="bounded")
    p.add_argument("--tau-c", type=float, default=5.0)
    p.add_argument("--n-hat", type=int, default=1)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--eps-prime", type=float, default=0.1)
    p.add_argument("--force-all", action="store_true", help="sample every node once")
    p.set_defaults(func=cmd_run_bc)

    p = sub.add_parser("run-cc", help="approximate closeness from sampled roots")
    _common(p)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--mode", choices=["exact", "bounded"], default="bounded",
                   help="accepted for symmetry with run-bc; distances always fit")
    p.add_argument("--force-all", action="store_true")
    p.set_defaults(func=cmd_run_cc)

    p = sub.add_parser("run-mrct", help="low routing-cost tree spanning a node set")
    _common(p)
    p.add_argument("--s-file", required=True)
    p.add_argument("--rand", action="store_true", help="sample the candidate roots")
    p.add_argument("--eps", type=float, default=0.5)
    p.set_defaults(func=cmd_run_mrct)

    p = sub.add_parser("verify", help="compare against the oracles")
    _common(p, graph=False)
    p.add_argument("--suite", choices=[*SUITES, "all"], required=True)
    p.add_argument("--count", type=int, default=None, help="graphs or seeded runs")
    p.add_argument("--n-max", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv) -> argparse.Namespace:
    pre, _ = ap.parse_known_args(argv)
    if pre.config:
        try:
            conf = json.loads(Path(pre.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"config {pre.config}: {e}") from None
        if not isinstance(conf, dict):
            raise UsageError("config must be a JSON object")
        sub = ap._subparsers._group_actions[0].choices[pre.command]
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in conf.items()})
    return ap.parse_args(argv)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = _apply_config(ap, argv)
        logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return a.func(a)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (GraphError, InvalidEpsilon, EmptyS, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except SimError as e:
        print(f"simulation error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
