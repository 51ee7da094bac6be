"""Acceptance runs: every check at its stated tolerance, one status line each.

Statistical checks print the measured fraction next to the target. The
message-size check aggregates over every bounded-mode run made here.
"""

import pytest

from multiagg.suites import (suite_agg, suite_bc_encoding, suite_bc_exact, suite_bc_stats,
                             suite_cc_stats, suite_congest, suite_dlg, suite_mrct, suite_rounds)

PLAN = [
    ("dlg-validity", lambda: suite_dlg(count=200, n_max=40), 60),
    ("round-bound", lambda: suite_rounds(count=200, n_max=40, chain_max=16), None),
    ("aggregation", lambda: suite_agg(count=200, n_max=40), None),
    ("bc-exact", lambda: suite_bc_exact(count=50, n_max=25), None),
    ("bc-encoding", lambda: suite_bc_encoding(count=200, n_max=40, diamonds=(10, 22, 40)), 60),
    ("bc-stats", lambda: suite_bc_stats(runs=200, m=30, eps_prime=0.1), 300),
    ("cc-stats", lambda: suite_cc_stats(runs=100, n=100, eps=0.3), 300),
    ("mrct", lambda: suite_mrct(count=50, rand_runs=100, n_max=8, eps=0.5), None),
]
LIMITS = {name: limit for name, _, limit in PLAN}


@pytest.fixture(scope="module")
def reports():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = dict((n, f) for n, f, _ in PLAN)[name]()
        return cache[name]
    return get


def _announce(pytestconfig, rep, limit=None):
    line = rep.line()
    if limit is not None:
        line += f" [limit {limit}s]"
    term = pytestconfig.pluginmanager.getplugin("terminalreporter")
    if term is not None:
        term.write_line("")
        term.write_line(line)
    else:
        print(line)
    for f in rep.failures[:5]:
        msg = f"    {f}"
        term.write_line(msg) if term is not None else print(msg)


@pytest.mark.slow
@pytest.mark.parametrize("name", [p[0] for p in PLAN])
def test_acceptance(name, reports, pytestconfig):
    rep = reports(name)
    limit = LIMITS[name]
    _announce(pytestconfig, rep, limit)
    assert rep.passed, rep.failures[:5]
    if limit is not None:
        assert rep.seconds < limit


@pytest.mark.slow
def test_acceptance_congest_compliance(reports, pytestconfig):
    rep = suite_congest([reports(name) for name, _, _ in PLAN])
    _announce(pytestconfig, rep)
    assert rep.passed, rep.failures[:5]
