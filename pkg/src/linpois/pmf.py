"""Probability evaluation for Y = A X.

P(Y = b) is a sum of independent-Poisson product terms over the
solution set of A k = b.  The solution set comes from the lattice layer
via one of three routes (single-index line, invertible singleton, or
enumeration); the terms are summed in log space with a max shift and
compensated accumulation so the result is stable and deterministic.

Also evaluates the probability generating function G(z) both in closed
form and as a truncated series, the latter backed by an exact pmf table
over a box of observations.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InternalInvariantError, MethodNotApplicableError
from .intlinalg import int_vector
from .model import PoissonModel
from .solutions import (
    MethodTag,
    SolutionFamily,
    enumerate_solutions,
    parametrize_single_index,
    solve_invertible,
)

__all__ = [
    "PmfResult",
    "log_term",
    "logsumexp",
    "solution_family",
    "pmf",
    "pmf_single_index",
    "pmf_invertible",
    "pmf_enumerate",
    "gf_eval",
    "gf_eval_series",
    "pmf_table",
]

# probabilities may exceed 1 by accumulated rounding; anything worse
# than this is a genuine bug, not roundoff
CLAMP_TOL = 1e-12

NEG_INF = float("-inf")


@dataclass(frozen=True)
class PmfResult:
    """log_prob and prob are redundant on purpose: prob may underflow
    to 0 while log_prob stays informative.  clamped marks a prob that
    was rounded down to 1 from within CLAMP_TOL."""

    log_prob: float
    prob: float
    method: MethodTag
    terms: int
    clamped: bool = False


def log_term(k, rates) -> float:
    """ln of one product term: sum_i [k_i ln l_i - l_i - ln k_i!].

    Convention 0*ln 0 = 0, so a zero-rate coordinate with k_i = 0
    contributes only through nothing at all; k_i > 0 there makes the
    whole term -inf.  Log-gamma keeps large k_i from overflowing.
    """
    try:
        counts = [operator.index(x) for x in k]
    except TypeError:
        raise InputError("counts must be integers") from None
    lam = [float(x) for x in np.asarray(rates, dtype=np.float64)]
    if len(counts) != len(lam):
        raise InputError(f"count vector length {len(counts)} != rate vector length {len(lam)}")
    out = 0.0
    dead = False
    for ki, li in zip(counts, lam):
        if ki < 0:
            raise InputError("counts must be >= 0")
        if li < 0 or not math.isfinite(li):
            raise InputError("rates must be finite and >= 0")
        if li == 0.0:
            if ki > 0:
                dead = True
            continue
        out += ki * math.log(li) - li - math.lgamma(ki + 1)
    return NEG_INF if dead else out


def logsumexp(terms) -> float:
    """ln sum_i exp(t_i), max-shifted; addends sorted descending and
    Kahan-compensated so the result does not depend on input order."""
    vals = [float(t) for t in terms]
    if not vals:
        return NEG_INF
    hi = max(vals)
    if hi == NEG_INF:
        return NEG_INF
    shifted = sorted((math.exp(t - hi) for t in vals), reverse=True)
    total = 0.0
    comp = 0.0
    for v in shifted:
        y = v - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return hi + math.log(total)


def _resolve_method(model: PoissonModel, method) -> MethodTag:
    if method is None or method == "auto":
        return model.method
    if isinstance(method, MethodTag):
        tag = method
    else:
        try:
            tag = MethodTag(method)
        except ValueError:
            raise InputError(f"unknown method {method!r}") from None
    if tag is MethodTag.ENUMERATE:
        return tag
    if tag is not model.method:
        raise MethodNotApplicableError(
            f"method '{tag}' forced but model classifies as '{model.method}'"
        )
    return tag


def _reduce_observation(model: PoissonModel, b):
    """Validated b restricted to kept rows, or None if P(Y=b) = 0 for
    sign or dependent-row-consistency reasons."""
    b = int_vector(b)
    if b.shape[0] != model.m_full:
        raise InputError(f"observation length {b.shape[0]} != row count {model.m_full}")
    if any(int(x) < 0 for x in b):
        return None
    if not model.report.is_consistent(b):
        return None
    return b[list(model.report.kept_rows)]


def solution_family(model: PoissonModel, b, method=None) -> tuple[SolutionFamily, MethodTag]:
    """Solution set of A k = b via the chosen route, plus the route used.

    method None or "auto" uses the model's classification; a forced
    method that does not apply raises MethodNotApplicableError.
    """
    tag = _resolve_method(model, method)
    reduced = _reduce_observation(model, b)
    if reduced is None:
        return SolutionFamily.empty(), tag
    if tag is MethodTag.SINGLE_INDEX:
        fam = parametrize_single_index(model.snf, reduced)
    elif tag is MethodTag.INVERTIBLE:
        fam = solve_invertible(model.inverse, reduced)
    else:
        fam = enumerate_solutions(model.a, reduced)
    return fam, tag


def _summed(log_terms: list, tag: MethodTag) -> PmfResult:
    lp = logsumexp(log_terms)
    prob = math.exp(lp)
    clamped = False
    if prob > 1.0:
        if prob <= 1.0 + CLAMP_TOL:
            prob = 1.0
            clamped = True
        else:
            raise InternalInvariantError(f"probability {prob!r} exceeds 1 beyond tolerance")
    return PmfResult(log_prob=lp, prob=prob, method=tag, terms=len(log_terms), clamped=clamped)


def pmf(model: PoissonModel, b, method=None) -> PmfResult:
    """P(Y = b), dispatching on the model's classification.

    b is given against the ORIGINAL row count.  Negative entries or a
    violated dependent-row relation give probability 0 (a valid query,
    not an error).
    """
    fam, tag = solution_family(model, b, method)
    rates = model.rates
    return _summed([log_term(k, rates) for k in fam.vectors()], tag)


def pmf_single_index(model: PoissonModel, b) -> PmfResult:
    """P(Y = b) via the one-parameter solution line."""
    return pmf(model, b, method=MethodTag.SINGLE_INDEX)


def pmf_invertible(model: PoissonModel, b) -> PmfResult:
    """P(Y = b) via the closed form k = A^-1 b."""
    return pmf(model, b, method=MethodTag.INVERTIBLE)


def pmf_enumerate(model: PoissonModel, b) -> PmfResult:
    """P(Y = b) by brute-force enumeration; reference for the others."""
    return pmf(model, b, method=MethodTag.ENUMERATE)


def _check_z(model: PoissonModel, z) -> np.ndarray:
    try:
        z = np.asarray(z, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(f"z is not numeric: {exc}") from None
    if z.ndim != 1 or z.shape[0] != model.m_full:
        raise InputError(f"z must be a vector of length {model.m_full}")
    if not np.all(np.isfinite(z)) or np.any(z < 0.0) or np.any(z > 1.0):
        raise InputError("z entries must lie in [0, 1]")
    return z


def gf_eval(model: PoissonModel, z) -> float:
    """Generating function G(z) = E[prod_i z_i^{Y_i}] in closed form.

    Equals exp(sum_j l_j prod_i z_i^{a_ij} - sum_j l_j); the subtracted
    rate total normalizes G(1) = 1.  Convention 0^0 = 1 for zero
    exponents at z_i = 0.
    """
    z = _check_z(model, z)
    a = model.a_full
    lam = model.rates_full
    s = 0.0
    for j in range(model.n_full):
        prod = 1.0
        for i in range(model.m_full):
            e = int(a[i, j])
            if e:
                prod *= float(z[i]) ** e
        s += float(lam[j]) * prod
    return math.exp(s - float(np.sum(lam)))


def pmf_table(model: PoissonModel, degree_bound: int) -> np.ndarray:
    """Exact table of P(Y = b) for every b in the box [0, B]^m.

    Built by convolving one Poisson variable at a time along its matrix
    column.  Columns are nonnegative, so partial sums of any solution
    never leave the box: each entry equals pmf(b) up to float rounding,
    not just a truncation of it.  Size is (B+1)^m; small m only.
    """
    B = int(degree_bound)
    if B < 0:
        raise InputError("degree bound must be >= 0")
    m = model.m_full
    if (B + 1) ** m > 20_000_000:
        raise InputError(f"pmf table of shape {(B + 1,) * m} is too large")
    removed = set(model.report.removed_columns)
    table = np.zeros((B + 1,) * m)
    table[(0,) * m] = math.exp(-float(np.sum(model.rates)))
    for j in range(model.n_full):
        if j in removed:
            # zero column: the variable marginalizes out entirely
            continue
        col = [int(model.a_full[i, j]) for i in range(m)]
        lam = float(model.rates_full[j])
        tmax = 0 if lam == 0.0 else min(B // c for c in col if c > 0)
        loglam = math.log(lam) if lam > 0.0 else 0.0
        nxt = np.zeros_like(table)
        for t in range(tmax + 1):
            w = 1.0 if t == 0 else math.exp(t * loglam - math.lgamma(t + 1))
            tgt = tuple(slice(t * c, B + 1) for c in col)
            src = tuple(slice(0, B + 1 - t * c) for c in col)
            nxt[tgt] += w * table[src]
        table = nxt
    return table


def gf_eval_series(model: PoissonModel, z, degree_bound: int = 40) -> float:
    """Truncated series sum_{b in [0,B]^m} P(Y=b) z^b, for cross-checks
    against gf_eval; the omitted tail is nonnegative."""
    z = _check_z(model, z)
    table = pmf_table(model, degree_bound)
    out = table
    for zi in z:
        out = np.tensordot(zi ** np.arange(degree_bound + 1), out, axes=(0, 0))
    return float(out)
