"""Circle-method pipeline: arc decomposition, main terms, singular series.

The counting sum over a digit-restricted set equals (1/q**k) times the
grid sum of the set's Fourier transform against the weight's exponential
sum; every a/q**k is Dirichlet-approximated, classified major/minor and
accumulated per class.  Class totals sum to the pipeline total by
construction (one shared accumulation tree).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Union

import numpy as np

from .digits import DigitSet, contains
from .errors import CapExceededError, DomainError
from .expsums import IntPolynomial, MangoldtTable, build_mangoldt, poly_range
from .fourier import FourierContext, grid_values, GRID_CAP

PAIR_COUNT_CAP = 10 ** 7


@dataclass(frozen=True)
class RationalApprox:
    """Dirichlet approximation a/Q = ell/d + beta with d <= D0."""

    ell: int
    d: int
    beta: float
    a: int
    Q: int
    D0: int


def dirichlet_approx(a: int, Q: int, D0: int) -> RationalApprox:
    """Best continued-fraction convergent of a/Q with denominator <= D0.

    Guarantees gcd(ell, d) = 1, d <= D0 and |beta| <= 1/(d*D0).
    """
    if not 0 <= a < Q:
        raise DomainError(f"a={a} not in [0, {Q})")
    if D0 < 1:
        raise DomainError("D0 must be positive")
    h1, h2 = 1, 0  # numerators h_{n-1}, h_{n-2}
    k1, k2 = 0, 1  # denominators
    x, y = a, Q
    best = (0, 1)
    while y:
        t = x // y
        h1, h2 = t * h1 + h2, h1
        k1, k2 = t * k1 + k2, k1
        x, y = y, x - t * y
        if k1 <= D0:
            best = (h1, k1)
        else:
            break
    ell, d = best
    beta = float(Fraction(a, Q) - Fraction(ell, d))
    return RationalApprox(ell=ell, d=d, beta=beta, a=a, Q=Q, D0=D0)


class ArcClass(enum.Enum):
    MAJOR = "major"
    MINOR_DENOMINATOR = "minor_denominator"
    MINOR_OFFSET = "minor_offset"


def arc_threshold(Q: int, A_major: float) -> float:
    return math.log(Q) ** A_major


def classify(approx: RationalApprox, k: int, A_major: float) -> ArcClass:
    """Major iff max(d, q**k |beta|) is strictly below (log q**k)**A.

    Boundary points are minor; the denominator coordinate is checked first.
    """
    thr = arc_threshold(approx.Q, A_major)
    if approx.d >= thr:
        return ArcClass.MINOR_DENOMINATOR
    if approx.Q * abs(approx.beta) >= thr:
        return ArcClass.MINOR_OFFSET
    return ArcClass.MAJOR


Weight = Union[MangoldtTable, IntPolynomial]


def _weight_vector(weight: Weight, Q: int) -> np.ndarray:
    if isinstance(weight, MangoldtTable):
        if weight.limit + 1 < Q:
            raise DomainError(
                f"mangoldt table limit {weight.limit} below q^k = {Q}"
            )
        w = np.zeros(Q, dtype=np.float64)
        sel = weight.entries_n < Q
        w[weight.entries_n[sel]] = np.log(
            weight.entries_p[sel].astype(np.float64)
        )
        return w
    if isinstance(weight, IntPolynomial):
        w = np.zeros(Q, dtype=np.float64)
        for n in poly_range(weight, Q):
            v = weight(n)
            if v >= 0:
                w[v] += 1.0
        return w
    raise DomainError(f"unsupported weight: {weight!r}")


@dataclass
class ArcLedger:
    """Per-arc-class accumulators; their sum is the pipeline total."""

    sums: Dict[ArcClass, complex] = field(
        default_factory=lambda: {c: complex(0.0) for c in ArcClass}
    )
    counts: Dict[ArcClass, int] = field(
        default_factory=lambda: {c: 0 for c in ArcClass}
    )
    D0: int = 0
    A_major: float = 0.0
    threshold: float = 0.0

    @property
    def total(self) -> complex:
        return (self.sums[ArcClass.MAJOR]
                + self.sums[ArcClass.MINOR_DENOMINATOR]
                + self.sums[ArcClass.MINOR_OFFSET])


@dataclass
class PipelineResult:
    total: float
    imag: float
    ledger: ArcLedger


def _classification(Q: int, D0: int, A_major: float) -> List[ArcClass]:
    thr = arc_threshold(Q, A_major)
    out = []
    for a in range(Q):
        ap = dirichlet_approx(a, Q, D0)
        if ap.d >= thr:
            out.append(ArcClass.MINOR_DENOMINATOR)
        elif Q * abs(ap.beta) >= thr:
            out.append(ArcClass.MINOR_OFFSET)
        else:
            out.append(ArcClass.MAJOR)
    return out


def circle_pipeline(
    ds: DigitSet,
    k: int,
    weight: Weight,
    D0: Optional[int] = None,
    A_major: float = 3.0,
    cap: int = GRID_CAP,
) -> PipelineResult:
    """Full Fourier-inversion sum with per-arc-class accounting."""
    Q = ds.q ** k
    if Q > cap:
        raise CapExceededError(f"grid of {Q} points exceeds cap {cap}")
    if D0 is None:
        D0 = max(1, math.isqrt(Q))
    ctx = FourierContext(ds, k)
    fhat = grid_values(ctx, cap=cap)
    w = _weight_vector(weight, Q)
    # forward DFT: S_w(-a/Q) = sum_n w(n) e(-2 pi i a n / Q)
    s_vals = np.fft.fft(w)
    terms = fhat * s_vals / Q
    classes = _classification(Q, D0, A_major)
    ledger = ArcLedger(D0=D0, A_major=A_major,
                       threshold=arc_threshold(Q, A_major))
    idx = {c: [] for c in ArcClass}
    for a, cls in enumerate(classes):
        idx[cls].append(a)
    for cls, ids in idx.items():
        ledger.counts[cls] = len(ids)
        if ids:
            ledger.sums[cls] = complex(np.add.reduce(terms[ids]))
    total = ledger.total
    return PipelineResult(total=total.real, imag=total.imag, ledger=ledger)


def direct_count(ds: DigitSet, k: int, weight: Weight,
                 cap: int = GRID_CAP) -> float:
    """Literal weighted count: the oracle side of every pipeline test."""
    Q = ds.q ** k
    if Q > cap:
        raise CapExceededError(f"direct count over {Q} exceeds cap {cap}")
    if isinstance(weight, MangoldtTable):
        if weight.limit + 1 < Q:
            raise DomainError(
                f"mangoldt table limit {weight.limit} below q^k = {Q}"
            )
        sel = weight.entries_n < Q
        ns = weight.entries_n[sel].tolist()
        logs = np.log(weight.entries_p[sel].astype(np.float64))
        mask = np.array([contains(ds, n, k) for n in ns], dtype=bool)
        picked = logs[mask]
        return float(np.add.reduce(picked)) if picked.size else 0.0
    if isinstance(weight, IntPolynomial):
        total = 0
        for n in poly_range(weight, Q):
            v = weight(n)
            if v >= 0 and contains(ds, v, k):
                total += 1
        return float(total)
    raise DomainError(f"unsupported weight: {weight!r}")


def _totient(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def coprime_excluded_count(ds: DigitSet) -> int:
    """s' = number of excluded digits coprime to the base."""
    return sum(1 for b in ds.excluded if math.gcd(b, ds.q) == 1)


def kappa(ds: DigitSet) -> Fraction:
    """Main-term density q(phi(q) - s') / ((q-1) phi(q)), exact."""
    q = ds.q
    phi = _totient(q)
    s_prime = coprime_excluded_count(ds)
    return Fraction(q * (phi - s_prime), (q - 1) * phi)


def singular_series_pair_count(P: IntPolynomial, ds: DigitSet, J: int,
                               cap: int = PAIR_COUNT_CAP) -> int:
    """#{(n, m) : 0 <= n, m < q**J, m in the set, P(n) == m mod q**J}."""
    q = ds.q
    QJ = q ** J
    if QJ > cap:
        raise CapExceededError(f"pair counting over {QJ} exceeds cap {cap}")
    count = 0
    for n in range(QJ):
        m = P(n) % QJ
        if contains(ds, m, J):
            count += 1
    return count


def singular_series(P: IntPolynomial, ds: DigitSet, J: int,
                    cap: int = PAIR_COUNT_CAP) -> Fraction:
    """Finite-level local density: pair count over (q-s)**J, exact."""
    denom = (ds.q - ds.s) ** J
    return Fraction(singular_series_pair_count(P, ds, J, cap=cap), denom)


@dataclass
class MainTermReport:
    main_term: float
    direct: float
    deviation: float
    kappa: Optional[Fraction] = None
    singular_series_J: Optional[int] = None
    singular_series_value: Optional[Fraction] = None


def theorem_comparison(
    ds: DigitSet,
    k: int,
    weight: Weight,
    J: Optional[int] = None,
    cap: int = GRID_CAP,
) -> MainTermReport:
    """Main term vs direct count, prime or polynomial flavour."""
    q = ds.q
    members = (q - ds.s) ** k
    direct = direct_count(ds, k, weight, cap=cap)
    if isinstance(weight, MangoldtTable):
        kap = kappa(ds)
        main = float(kap) * members
        dev = abs(direct - main) / main if main else math.inf
        return MainTermReport(main_term=main, direct=direct, deviation=dev,
                              kappa=kap)
    if isinstance(weight, IntPolynomial):
        r = weight.degree
        if J is None:
            J = 1
            while q ** (J + 1) <= PAIR_COUNT_CAP and J < 4:
                J += 1
        sj = singular_series(weight, ds, J)
        main = (weight.lead ** (1.0 / r) * float(sj)
                * q ** (k / r) * members / q ** k)
        dev = abs(direct - main) / main if main else math.inf
        return MainTermReport(main_term=main, direct=direct, deviation=dev,
                              singular_series_J=J, singular_series_value=sj)
    raise DomainError(f"unsupported weight: {weight!r}")
