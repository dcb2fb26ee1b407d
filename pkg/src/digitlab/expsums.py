"""Exponential sums over primes and polynomial values, with bound ratios.

Provides the von Mangoldt sum, the polynomial Weyl sum and the
equidistribution min-sum as literal summations, plus sweep drivers that
compare each against its analytic right-hand side.  The implied constants
of the bounds carry no numeric content, so sweeps only record ratios; the
frozen calibration constants below were fixed by a one-time run with the
recorded seed.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Union

import numpy as np

from .errors import CapExceededError, DomainError
from .fourier import RationalFrequency
from .summation import pairwise_sum

MANGOLDT_CAP = 10 ** 9

# One-time calibration run (seed below); the sweeps in the verification
# suites must stay under these max-ratio ceilings.
CALIBRATION_SEED = 20260826
CALIBRATED_MAX_RATIO = {
    # observed maxima at the seed above: 0.674, 5.52e-5, 6.98e-4
    "equidistribution": 60.0,
    "prime": 1e-3,
    "polynomial": 1e-2,
}


@dataclass(frozen=True)
class MangoldtTable:
    """Smallest-prime-factor sieve with the nonzero Lambda support listed.

    ``entries_n`` holds the prime powers n <= limit in increasing order and
    ``entries_p`` the corresponding primes p (so Lambda(n) = log p).
    """

    limit: int
    spf: np.ndarray
    entries_n: np.ndarray
    entries_p: np.ndarray

    def lam(self, n: int) -> float:
        """Lambda(n) = log p if n = p**m, else 0."""
        if n < 2 or n > self.limit:
            return 0.0
        p = int(self.spf[n])
        m = n
        while m % p == 0:
            m //= p
        return math.log(p) if m == 1 else 0.0

    def lam_exact(self, n: int):
        """(p, multiplicity) if n = p**m, else None; exact integers."""
        if n < 2 or n > self.limit:
            return None
        p = int(self.spf[n])
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        return (p, e) if m == 1 else None


def build_mangoldt(X: int, cap: int = MANGOLDT_CAP) -> MangoldtTable:
    """Sieve smallest prime factors up to X and list the prime powers."""
    if X < 1:
        raise DomainError("X must be positive")
    if X > cap:
        raise CapExceededError(f"sieve limit {X} exceeds cap {cap}")
    spf = np.zeros(X + 1, dtype=np.int64)
    for p in range(2, X + 1):
        if spf[p] == 0:
            sl = spf[p::p]
            sl[sl == 0] = p
        if p * p > X:
            # remaining zeros are primes; fill them in one pass
            rest = np.arange(X + 1, dtype=np.int64)
            mask = (spf == 0) & (rest >= 2)
            spf[mask] = rest[mask]
            break
    ns: List[int] = []
    ps: List[int] = []
    idx = np.arange(X + 1, dtype=np.int64)
    primes = idx[(idx >= 2) & (spf == idx)]
    for p in primes.tolist():
        m = p
        while m <= X:
            ns.append(m)
            ps.append(p)
            m *= p
    order = np.argsort(np.array(ns, dtype=np.int64), kind="stable")
    entries_n = np.array(ns, dtype=np.int64)[order]
    entries_p = np.array(ps, dtype=np.int64)[order]
    return MangoldtTable(limit=X, spf=spf, entries_n=entries_n,
                         entries_p=entries_p)


Alpha = Union[float, Fraction, RationalFrequency]


def _phases_mod1(ns: np.ndarray, alpha: Alpha) -> np.ndarray:
    """(n * alpha) mod 1 for an array of integers n, exactly for rationals."""
    if isinstance(alpha, RationalFrequency):
        Q = alpha.denominator
        return ((ns.astype(object) * alpha.residue) % Q).astype(np.float64) / Q
    if isinstance(alpha, Fraction):
        num, den = alpha.numerator, alpha.denominator
        return ((ns.astype(object) * num) % den).astype(np.float64) / den
    return np.mod(ns.astype(np.float64) * float(alpha), 1.0)


def prime_expsum(table: MangoldtTable, x: int, alpha: Alpha) -> complex:
    """S(alpha) = sum over n < x of Lambda(n) e(n alpha)."""
    if x > table.limit + 1:
        raise DomainError(f"x={x} beyond sieve limit {table.limit}")
    sel = table.entries_n < x
    ns = table.entries_n[sel]
    logs = np.log(table.entries_p[sel].astype(np.float64))
    phases = _phases_mod1(ns, alpha)
    terms = logs * np.exp(2j * np.pi * phases)
    return complex(np.add.reduce(terms)) if terms.size else complex(0.0)


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients constant-first; positive lead."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)
        if self.degree < 1:
            raise DomainError("polynomial must have degree >= 1")
        if cs[-1] <= 0:
            raise DomainError("lead coefficient must be positive")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1]

    def __call__(self, n: int) -> int:
        v = 0
        for c in reversed(self.coeffs):
            v = v * n + c
        return v

    def increasing_from(self) -> int:
        """An integer N such that the polynomial is increasing on [N, oo).

        Cauchy-style bound on the roots of the derivative.
        """
        r = self.degree
        if r == 1:
            return 0
        lead = r * self.coeffs[-1]
        bound = 1 + max(
            abs(i * self.coeffs[i]) for i in range(1, r)
        ) // lead + 1
        return bound


def poly_range(P: IntPolynomial, x: int) -> List[int]:
    """All n >= 0 with P(n) < x, found by scan past the increasing point."""
    out = []
    start = P.increasing_from()
    for n in range(start + 1):
        if P(n) < x:
            out.append(n)
    n = start + 1
    while P(n) < x:
        out.append(n)
        n += 1
    return out


def poly_expsum(P: IntPolynomial, x: int, alpha: Alpha) -> complex:
    """S(alpha) = sum of e(alpha P(n)) over n >= 0 with P(n) < x."""
    ns = poly_range(P, x)
    values = np.array([P(n) for n in ns], dtype=object)
    if len(ns) == 0:
        return complex(0.0)
    if isinstance(alpha, RationalFrequency):
        Q = alpha.denominator
        phases = ((values * alpha.residue) % Q).astype(np.float64) / Q
    elif isinstance(alpha, Fraction):
        phases = ((values * alpha.numerator) % alpha.denominator).astype(
            np.float64
        ) / alpha.denominator
    else:
        phases = np.mod(values.astype(np.float64) * float(alpha), 1.0)
    terms = np.exp(2j * np.pi * phases)
    return complex(np.add.reduce(terms))


def _dist_to_int(x) -> float:
    if isinstance(x, Fraction):
        fr = x % 1
        return float(min(fr, 1 - fr))
    fr = float(x) % 1.0
    return min(fr, 1.0 - fr)


def minsum(N: int, M: float, alpha) -> float:
    """sum over 1 <= n <= N of min(M, 1/||alpha n||); M when ||..|| = 0."""
    total = []
    for n in range(1, N + 1):
        dist = _dist_to_int(alpha * n)
        total.append(M if dist == 0.0 else min(M, 1.0 / dist))
    return float(pairwise_sum(total)) if total else 0.0


# ----------------------------------------------------------------------
# Bound-ratio sweeps
# ----------------------------------------------------------------------

def _effective_dbeta(d: int, beta: float, x: float) -> float:
    # beta = 0 is measured at the 1/x resolution of the frequency grid
    # (the partial-summation convention behind the near-rational case).
    return d * max(abs(beta), 1.0 / x)


def equidistribution_rhs(N: int, M: float, d: int, beta: float) -> float:
    db = d * abs(beta)
    inv = math.inf if db == 0.0 else 1.0 / db
    return (N + N * M * db + inv + d) * math.log(N)


def prime_rhs(x: int, d: int, beta: float) -> float:
    db = _effective_dbeta(d, beta, x)
    return (x ** 0.8 + math.sqrt(x) / math.sqrt(db)
            + x * math.sqrt(db)) * math.log(x) ** 4


def poly_rhs(x: int, r: int, d: int, beta: float) -> float:
    db = _effective_dbeta(d, beta, x)
    inner = 1.0 / x + 1.0 / (x ** r * db) + db + d / x ** r
    return x * math.log(x) * inner ** (1.0 / 2 ** r)


def bound_ratio_report(kind: str, params: dict) -> List[dict]:
    """Sweep a lemma's hypotheses and record lhs, rhs and their ratio.

    Hypothesis-violating points are flagged (``admissible = False``), never
    silently dropped.  No implied constant is asserted here.
    """
    if kind == "equidistribution":
        return _equidistribution_sweep(params)
    if kind == "prime":
        return _prime_sweep(params)
    if kind == "polynomial":
        return _polynomial_sweep(params)
    raise DomainError(f"unknown sweep kind: {kind}")


def _equidistribution_sweep(params: dict) -> List[dict]:
    N = int(params.get("N", 1000))
    M = float(params.get("M", 1000.0))
    count = int(params.get("count", 50))
    dmax = int(params.get("dmax", 50))
    rng = random.Random(params.get("seed", CALIBRATION_SEED))
    rows = []
    for _ in range(count):
        d = rng.randrange(2, dmax + 1)
        a = rng.randrange(1, d)
        while math.gcd(a, d) != 1:
            a = rng.randrange(1, d)
        beta = rng.uniform(-1.0, 1.0) / (2.0 * d * d)
        admissible = math.gcd(a, d) == 1 and abs(beta) < 1.0 / d ** 2
        alpha_val = a / d + beta
        lhs = minsum(N, M, alpha_val)
        rhs = equidistribution_rhs(N, M, d, beta)
        rows.append({
            "N": N, "M": M, "a": a, "d": d, "beta": beta,
            "admissible": admissible, "lhs": lhs, "rhs": rhs,
            "ratio": lhs / rhs,
        })
    return rows


def _prime_sweep(params: dict) -> List[dict]:
    x = int(params.get("x", 10 ** 5))
    d_values: Sequence[int] = params.get("d_values", range(3, 98))
    beta = float(params.get("beta", 0.0))
    table = params.get("table") or build_mangoldt(x)
    rows = []
    for d in d_values:
        a = next(c for c in range(1, d) if math.gcd(c, d) == 1)
        admissible = abs(beta) < 1.0 / d ** 2
        alpha_val = Fraction(a, d) if beta == 0.0 else a / d + beta
        lhs = abs(prime_expsum(table, x, alpha_val))
        rhs = prime_rhs(x, d, beta)
        rows.append({
            "x": x, "a": a, "d": d, "beta": beta,
            "admissible": admissible, "lhs": lhs, "rhs": rhs,
            "ratio": lhs / rhs,
        })
    return rows


def _polynomial_sweep(params: dict) -> List[dict]:
    coeffs = tuple(params.get("coeffs", (0, 0, 1)))
    P = IntPolynomial(coeffs)
    x = int(params.get("x", 10 ** 4))
    count = int(params.get("count", 20))
    dmax = int(params.get("dmax", 40))
    rng = random.Random(params.get("seed", CALIBRATION_SEED))
    r = P.degree
    norm = P.lead * math.factorial(r)
    rows = []
    for _ in range(count):
        d = rng.randrange(2, dmax + 1)
        a = rng.randrange(1, d)
        while math.gcd(a, d) != 1:
            a = rng.randrange(1, d)
        beta = rng.uniform(-1.0, 1.0) / (2.0 * d * d)
        admissible = abs(beta) < 1.0 / d ** 2
        # frequencies are measured in the lemma's normalization:
        # lead * r! * alpha = a/d + beta
        alpha_val = (a / d + beta) / norm
        lhs = abs(poly_expsum(P, x, alpha_val))
        rhs = poly_rhs(x, r, d, beta)
        rows.append({
            "coeffs": coeffs, "x": x, "a": a, "d": d, "beta": beta,
            "admissible": admissible, "lhs": lhs, "rhs": rhs,
            "ratio": lhs / rhs,
        })
    return rows


def max_sweep_ratio(rows: Sequence[dict]) -> float:
    return max(row["ratio"] for row in rows if row["admissible"])
