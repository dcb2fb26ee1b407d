"""Digit-restricted integer sets with exact counting via digit DP.

A ``DigitSet`` is a base ``q`` together with a set of excluded digits.  All
counting uses the fixed k-digit convention: an integer ``n < q**k`` is read
as exactly ``k`` base-q digits including leading zeros, so membership of 0
depends on whether the digit 0 is allowed.  Every count is exact integer
arithmetic; ranges are always half-open ``[0, q**k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .errors import CapExceededError, DomainError

ENUMERATION_CAP = 10 ** 8


@dataclass(frozen=True)
class DigitSet:
    """Base q and the sorted tuple of excluded digits."""

    q: int
    excluded: tuple

    def __post_init__(self):
        if self.q < 3:
            raise DomainError(f"base must be >= 3, got q={self.q}")
        exc = tuple(sorted(set(int(d) for d in self.excluded)))
        object.__setattr__(self, "excluded", exc)
        if not exc:
            raise DomainError("excluded digit set must be nonempty")
        if exc[0] < 0 or exc[-1] >= self.q:
            raise DomainError(f"excluded digits must lie in [0, {self.q})")
        if len(exc) > self.q - 2:
            raise DomainError(
                f"at most q-2 digits may be excluded (q={self.q}, s={len(exc)})"
            )
        if not self._has_consecutive_allowed_pair():
            raise DomainError(
                "digit set must leave two consecutive digits allowed"
            )

    def _has_consecutive_allowed_pair(self):
        # Scan the gaps between excluded digits (and the ends) for a gap of
        # width >= 2; works without materializing the allowed set.
        bounds = (-1,) + self.excluded + (self.q,)
        return any(b - a > 2 for a, b in zip(bounds, bounds[1:]))

    @property
    def s(self) -> int:
        return len(self.excluded)

    @property
    def consecutive_flag(self) -> bool:
        """True iff the excluded digits form a run of length >= 2.

        Singletons take the generic (non-run) bounds, so s=1 is not flagged.
        """
        return self.s >= 2 and self.excluded[-1] - self.excluded[0] == self.s - 1

    @cached_property
    def allowed(self) -> tuple:
        """Sorted allowed digits.  Only materialize for small q."""
        exc = set(self.excluded)
        return tuple(d for d in range(self.q) if d not in exc)

    @cached_property
    def _excluded_set(self):
        return frozenset(self.excluded)

    def is_allowed(self, digit: int) -> bool:
        return digit not in self._excluded_set


@dataclass(frozen=True)
class DigitVector:
    """Length-k digit expansion, least-significant first."""

    q: int
    digits: tuple

    @classmethod
    def from_int(cls, n: int, q: int, k: int) -> "DigitVector":
        if n < 0 or n >= q ** k:
            raise DomainError(f"n={n} not in [0, {q}^{k})")
        ds = []
        m = n
        for _ in range(k):
            ds.append(m % q)
            m //= q
        return cls(q, tuple(ds))

    @property
    def value(self) -> int:
        v = 0
        for d in reversed(self.digits):
            v = v * self.q + d
        return v


def contains(ds: DigitSet, n: int, k: int) -> bool:
    """True iff all k base-q digits of n (with leading zeros) are allowed."""
    if n < 0 or n >= ds.q ** k:
        raise DomainError(f"n={n} not in [0, {ds.q}^{k})")
    exc = ds._excluded_set
    m = n
    for _ in range(k):
        if m % ds.q in exc:
            return False
        m //= ds.q
    return True


def _msb_digits(x: int, q: int, k: int):
    """The k base-q digits of x, most significant first (x < q**k)."""
    out = []
    m = x
    for _ in range(k):
        out.append(m % q)
        m //= q
    out.reverse()
    return out


def count_below(ds: DigitSet, x: int, k: int) -> int:
    """#{n < x : contains(ds, n, k)} by digit DP, O(k*q)."""
    q = ds.q
    if x < 0 or x > q ** k:
        raise DomainError(f"x={x} not in [0, {q}^{k}]")
    full = q - ds.s
    if x == q ** k:
        return full ** k
    exc = ds._excluded_set
    # allowed_below[d] = number of allowed digits strictly less than d
    allowed_below = [0] * (q + 1)
    for d in range(q):
        allowed_below[d + 1] = allowed_below[d] + (0 if d in exc else 1)
    total = 0
    for i, xd in enumerate(_msb_digits(x, q, k)):
        rem = k - i - 1
        total += allowed_below[xd] * full ** rem
        if xd in exc:
            break
    return total


def count_in_ap(ds: DigitSet, x: int, k: int, modulus: int, residue: int) -> int:
    """#{n < x : contains(ds, n, k), n == residue (mod modulus)}.

    Digit DP carrying a residue state, O(k*q*modulus).
    """
    q = ds.q
    if modulus <= 0:
        raise DomainError("modulus must be positive")
    if not 0 <= residue < modulus:
        raise DomainError(f"residue={residue} not in [0, {modulus})")
    if modulus > q ** k:
        raise DomainError(f"modulus={modulus} exceeds q^k")
    if x < 0 or x > q ** k:
        raise DomainError(f"x={x} not in [0, {q}^{k}]")
    exc = ds._excluded_set
    allowed = ds.allowed
    # free[j][r] = #length-j allowed-digit strings (positions 0..j-1, lsb)
    #              whose value is == r (mod modulus)
    free = [[0] * modulus for _ in range(k + 1)]
    free[0][0] = 1
    place = 1  # q**(j-1) mod modulus
    for j in range(1, k + 1):
        prev, cur = free[j - 1], free[j]
        shifts = [(d * place) % modulus for d in allowed]
        for r in range(modulus):
            c = prev[r]
            if c:
                for sh in shifts:
                    cur[(r + sh) % modulus] += c
        place = (place * q) % modulus
    if x == q ** k:
        return free[k][residue]
    total = 0
    prefix = 0  # residue of the fixed high digits
    places = [pow(q, i, modulus) for i in range(k)]
    for i, xd in enumerate(_msb_digits(x, q, k)):
        pos = k - i - 1  # place value q**pos
        for d in allowed:
            if d >= xd:
                break
            need = (residue - prefix - d * places[pos]) % modulus
            total += free[pos][need]
        if xd in exc:
            break
        prefix = (prefix + xd * places[pos]) % modulus
    return total


def enumerate_members(
    ds: DigitSet, k: int, cap: int = ENUMERATION_CAP
) -> Iterator[int]:
    """Yield the members of the set in [0, q**k) in increasing order."""
    full = ds.q - ds.s
    if full ** k > cap:
        raise CapExceededError(
            f"enumeration of {full}^{k} members exceeds cap {cap}"
        )
    allowed = ds.allowed
    q = ds.q

    def rec(prefix_value: int, remaining: int) -> Iterable[int]:
        if remaining == 0:
            yield prefix_value
            return
        for d in allowed:
            yield from rec(prefix_value * q + d, remaining - 1)

    yield from rec(0, k)
