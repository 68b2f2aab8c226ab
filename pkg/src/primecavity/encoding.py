"""Integers as photon occupations of prime-indexed modes.

The mode labeled by a prime q oscillates at omega*log(q), so the state that
encodes N = q1^m1 * q2^m2 * ... carries m_i photons in mode q_i and has
energy hbar*omega*log(N). Unique factorization makes the level ladder
non-degenerate: one level per natural number, with the vacuum encoding 1.
Natural logarithms throughout; omega is a free scale, so the log base only
rescales it.
"""

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .units import Units

# Largest integer an occupation vector may compose to. Python ints are
# unbounded, but everything downstream treats labels as machine integers.
MAX_COMPOSED = 2**63 - 1

_sieve_limit = 0
_sieved_primes: list[int] = []


def _as_label(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"labels are positive integers, got {n!r}")
    return int(n)


def is_prime(n: int) -> bool:
    n = _as_label(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _primes_upto(limit: int) -> list[int]:
    """Cached Eratosthenes sieve; the cache grows geometrically."""
    global _sieve_limit, _sieved_primes
    if limit > _sieve_limit:
        new_limit = max(limit, 2 * _sieve_limit, 1024)
        mask = np.ones(new_limit + 1, dtype=bool)
        mask[:2] = False
        for p in range(2, math.isqrt(new_limit) + 1):
            if mask[p]:
                mask[p * p :: p] = False
        _sieved_primes = [int(p) for p in np.flatnonzero(mask)]
        _sieve_limit = new_limit
    return _sieved_primes[: bisect.bisect_right(_sieved_primes, limit)]


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit, ascending."""
    limit = _as_label(limit)
    if limit < 2:
        raise ValueError(f"no primes exist below 2 (got limit={limit})")
    return list(_primes_upto(limit))


@dataclass(frozen=True)
class OccupationVector:
    """Photon count per prime mode, as ((prime, exponent), ...) with primes ascending.

    The empty vector is the vacuum and composes to 1. Construction rejects
    non-primes, zero exponents, unordered entries, and anything composing
    past MAX_COMPOSED.
    """

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = 1
        for q, m in self.entries:
            if q <= prev:
                raise ValueError("mode primes must be strictly increasing")
            if not is_prime(q):
                raise ValueError(f"mode index {q} is not prime")
            if m < 1:
                raise ValueError("exponents must be >= 1; omit empty modes")
            prev = q
        compose(self)  # overflow guard

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    @property
    def is_vacuum(self) -> bool:
        return not self.entries

    def __str__(self) -> str:
        return format_occupation(self)


def compose(occ: OccupationVector) -> int:
    """Multiply the prime powers back into the encoded integer."""
    value = 1
    for q, m in occ.entries:
        for _ in range(m):
            value *= q
            if value > MAX_COMPOSED:
                raise OverflowError(
                    f"occupation composes past the supported width ({MAX_COMPOSED})"
                )
    return value


def factorize(n: int) -> OccupationVector:
    """Prime factorization of n as an occupation vector (sieve-backed trial division)."""
    n = _as_label(n)
    if n < 1:
        raise ValueError(f"only positive integers encode cavity states (got {n})")
    if n > MAX_COMPOSED:
        raise OverflowError(f"{n} exceeds the supported width ({MAX_COMPOSED})")
    entries = []
    rest = n
    for q in _primes_upto(max(2, math.isqrt(n))):
        if q * q > rest:
            break
        m = 0
        while rest % q == 0:
            rest //= q
            m += 1
        if m:
            entries.append((q, m))
    if rest > 1:
        entries.append((rest, 1))
    return OccupationVector(tuple(entries))


def format_occupation(occ: OccupationVector) -> str:
    """Render like 360 -> '2^3*3^2*5'; the vacuum renders as '1'."""
    if occ.is_vacuum:
        return "1"
    return "*".join(f"{q}^{m}" if m > 1 else str(q) for q, m in occ.entries)


def level_energy(n: int, units: Units = Units()) -> float:
    """E_N = hbar*omega*log(N); the vacuum sits exactly at zero."""
    n = _as_label(n)
    if n < 1:
        raise ValueError(f"labels start at 1 (got {n})")
    return units.energy_scale * math.log(n)


def upper_gap(n: int, units: Units = Units()) -> float:
    """E_{N+1} - E_N = hbar*omega*log((N+1)/N), via log1p to keep full precision."""
    n = _as_label(n)
    if n < 1:
        raise ValueError(f"labels start at 1 (got {n})")
    return units.energy_scale * math.log1p(1.0 / n)


def level_spacing(n: int, units: Units = Units()) -> float:
    """Distance from E_N to its nearest neighbor, about hbar*omega/N.

    The upper gap log((N+1)/N) is always smaller than the lower one, so the
    minimum is closed-form. N*level_spacing(N)/(hbar*omega) -> 1 from below.
    Requires N >= 2: the vacuum has no lower neighbor.
    """
    n = _as_label(n)
    if n < 2:
        raise ValueError("level spacing needs both neighbors; the vacuum has none below")
    return upper_gap(n, units)


@dataclass(frozen=True)
class SpectrumTable:
    """Level energies for N = 1..n_max; energies[N] holds E_N (slot 0 is NaN padding).

    Strictly increasing by unique factorization; degeneracy questions are
    integer questions about the labels, never float comparisons.
    """

    n_max: int
    units: Units
    energies: np.ndarray

    @classmethod
    def build(cls, n_max: int, units: Units = Units()) -> "SpectrumTable":
        n_max = _as_label(n_max)
        if n_max < 1:
            raise ValueError(f"spectrum needs at least the vacuum (got n_max={n_max})")
        e = np.empty(n_max + 1)
        e[0] = np.nan
        e[1:] = units.energy_scale * np.log(np.arange(1, n_max + 1, dtype=float))
        e.setflags(write=False)
        return cls(n_max=n_max, units=units, energies=e)

    def energy(self, n: int) -> float:
        n = _as_label(n)
        if not 1 <= n <= self.n_max:
            raise ValueError(f"label {n} outside 1..{self.n_max}")
        return float(self.energies[n])
