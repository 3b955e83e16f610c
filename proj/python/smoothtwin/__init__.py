"""Smooth twin search with the prime number lattice."""

import json

from ._core import (
    BudgetExceeded,
    PrecisionError,
    SearchFailed,
    asymptotic_estimate,
    brute_force_twins,
    chm_run,
    estimate_optimal,
    geometric_mean_logprimes,
    is_twin,
    pell_fundamental,
    rho,
    sieve_primes,
    stormer_enumerate,
)
from . import _core

__all__ = [
    "BudgetExceeded",
    "PrecisionError",
    "SearchFailed",
    "asymptotic_estimate",
    "boost_check",
    "brute_force_twins",
    "chm_run",
    "enumerate_toward_complete",
    "estimate_optimal",
    "geometric_mean_logprimes",
    "gh_ratio",
    "is_twin",
    "pell_fundamental",
    "rho",
    "search",
    "sieve_primes",
    "stormer_enumerate",
]


def _records(lines):
    out = []
    for line in lines.splitlines():
        rec = json.loads(line)
        rec["r"] = int(rec["r"])
        out.append(rec)
    return out


def search(config, workers=1):
    """Run the lattice search for a SearchConfig given as a dict; returns twin records."""
    return _records(_core.search_json(json.dumps(config), workers))


def enumerate_toward_complete(B, k_max, kappa, seed=0):
    lines, partial = _core.enumerate_json(B, k_max, kappa, seed)
    return _records(lines), partial


def gh_ratio(r, B, alpha_log2=None):
    if alpha_log2 is None:
        return json.loads(_core.gh_ratio_json(r, B))
    return json.loads(_core.gh_ratio_json(r, B, alpha_log2))


def boost_check(r, B=2048):
    rep = json.loads(_core.boost_check_json(r, B))
    for key in ("r", "p", "T"):
        rep[key] = int(rep[key])
    rep["rough_cofactors"] = [int(c) for c in rep["rough_cofactors"]]
    return rep
