"""Exact Fibonacci and Lucas arithmetic.

Everything here works on Python integers. ``fib`` and ``fib_mod`` use fast
doubling; ``fib_mod`` never builds the full value of F_t.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

__all__ = [
    "Valuation",
    "fib",
    "fib_pair",
    "fib_mod",
    "lucas",
    "pisano_period",
    "pisano_cycle",
    "rank_of_apparition",
    "fib_valuation",
]


@dataclass(frozen=True)
class Valuation:
    prime: int
    index: int
    exponent: int


def _doubling(t: int, modulus: int | None) -> tuple[int, int]:
    # F(2j) = F(j) * (2F(j+1) - F(j)),  F(2j+1) = F(j)^2 + F(j+1)^2
    a, b = 0, 1
    for bit in bin(t)[2:]:
        c = a * ((b << 1) - a)
        d = a * a + b * b
        if modulus is not None:
            c %= modulus
            d %= modulus
        if bit == "1":
            a, b = d, c + d
            if modulus is not None:
                b %= modulus
        else:
            a, b = c, d
    return a, b


def _check_index(t: int) -> None:
    if t < 0:
        raise DomainError(f"Fibonacci index must be nonnegative, got {t}")


def fib_pair(t: int) -> tuple[int, int]:
    """Return ``(F_t, F_{t+1})``."""
    _check_index(t)
    return _doubling(t, None)


@lru_cache(maxsize=4096)
def fib(t: int) -> int:
    """Return the Fibonacci number F_t (F_0 = 0, F_1 = 1)."""
    _check_index(t)
    return _doubling(t, None)[0]


def lucas(t: int) -> int:
    """Return the Lucas number L_t (L_0 = 2, L_1 = 1)."""
    _check_index(t)
    f, g = _doubling(t, None)
    # L_t = F_{t-1} + F_{t+1} = 2F_{t+1} - F_t
    return 2 * g - f


def fib_mod(t: int, modulus: int) -> int:
    """Return F_t mod ``modulus`` without computing F_t."""
    _check_index(t)
    if modulus < 2:
        raise DomainError(f"invalid modulus {modulus}; need modulus >= 2")
    return _doubling(t, modulus)[0] % modulus


def pisano_period(modulus: int) -> int:
    """Period of the Fibonacci sequence modulo ``modulus``.

    Scans pairs (F_t, F_{t+1}) until the starting state (0, 1) recurs. The
    period never exceeds 6 * modulus.
    """
    if modulus < 2:
        raise DomainError(f"invalid modulus {modulus}; need modulus >= 2")
    a, b = 0, 1
    for step in range(1, 6 * modulus + 1):
        a, b = b, (a + b) % modulus
        if a == 0 and b == 1:
            return step
    raise AssertionError(f"no period found for modulus {modulus} within 6*modulus")


def pisano_cycle(modulus: int) -> list[int]:
    """One full period of F_t mod ``modulus``, starting at F_0."""
    period = pisano_period(modulus)
    out = []
    a, b = 0, 1
    for _ in range(period):
        out.append(a)
        a, b = b, (a + b) % modulus
    return out


def _legendre5(p: int) -> int:
    # (5/p) = (p/5) by reciprocity since 5 = 1 mod 4
    r = p % 5
    if r == 0:
        return 0
    return 1 if r in (1, 4) else -1


@lru_cache(maxsize=4096)
def rank_of_apparition(p: int) -> int:
    """Least t > 0 with p | F_t, for a prime ``p``.

    For p other than 2 and 5 the rank divides p - (5/p); the search strips
    prime factors from that bound while F_{bound/q} stays divisible by p.
    """
    from .numtheory import factor, is_probable_prime

    if p < 2 or not is_probable_prime(p):
        raise DomainError(f"rank_of_apparition needs a prime, got {p}")
    if p == 2:
        return 3
    if p == 5:
        return 5
    bound = p - _legendre5(p)
    fact = factor(bound)
    if fact.cofactor != 1:
        raise DomainError(f"cannot factor {bound} to find the rank of apparition of {p}")
    rank = bound
    for q, _ in fact.prime_powers:
        while rank % q == 0 and fib_mod(rank // q, p) == 0:
            rank //= q
    return rank


def _padic(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def _exponent_direct(p: int, t: int) -> int:
    """Exponent of p in F_t by repeated checks of F_t mod p^e."""
    e = 0
    pe = p
    while fib_mod(t, pe) == 0:
        e += 1
        pe *= p
    return e


def fib_valuation(p: int, t: int) -> Valuation:
    """Exact power of the prime ``p`` dividing F_t, by the law of repetition.

    For odd p: zero unless the rank of apparition a divides t, and then
    v_p(F_t) = v_p(F_a) + v_p(t / a). The prime 2 breaks that rule and is
    special-cased: v_2(F_t) is 0 for 3 not dividing t, 1 for t = 3 mod 6,
    and v_2(t) + 2 for 6 | t.
    """
    if t <= 0:
        raise DomainError(f"fib_valuation needs t > 0, got {t}")
    if p == 2:
        if t % 3:
            e = 0
        elif t % 2:
            e = 1
        else:
            e = _padic(t, 2) + 2
        return Valuation(2, t, e)
    alpha = rank_of_apparition(p)
    if t % alpha:
        return Valuation(p, t, 0)
    return Valuation(p, t, _exponent_direct(p, alpha) + _padic(t // alpha, p))
