"""Prime sieve and Moebius function."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit (Eratosthenes), as an int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def moebius_table(limit: int) -> np.ndarray:
    """mu(r) for r = 0..limit (index 0 unused, set to 0)."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    primes = sieve_primes(limit)
    for p in primes:
        mu[p::p] *= -1
        sq = p * p
        if sq <= limit:
            mu[sq::sq] = 0
    return mu


def moebius(r: int) -> int:
    """mu(r) by trial division."""
    if r < 1:
        raise DomainError(f"moebius requires r >= 1, got {r}")
    result = 1
    d = 2
    while d * d <= r:
        if r % d == 0:
            r //= d
            if r % d == 0:
                return 0
            result = -result
        d += 1
    if r > 1:
        result = -result
    return result


@dataclass(frozen=True)
class PrimeSieve:
    """Immutable list of all primes up to `limit`."""

    limit: int
    primes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.limit < 2:
            raise DomainError("sieve limit must be >= 2")
        object.__setattr__(self, "primes", sieve_primes(self.limit))

    def __len__(self) -> int:
        return len(self.primes)


@dataclass(frozen=True)
class MoebiusTable:
    """Immutable table of mu(r) for 1 <= r <= limit."""

    limit: int
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.limit < 1:
            raise DomainError("table limit must be >= 1")
        object.__setattr__(self, "values", moebius_table(self.limit))

    def __getitem__(self, r: int) -> int:
        if not 1 <= r <= self.limit:
            raise DomainError(f"r = {r} outside table range 1..{self.limit}")
        return int(self.values[r])
