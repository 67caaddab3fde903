"""Primality, bounded factorization, square-free parts, orders and symbols.

Factorizations may be partial: when the effort budget runs out the remaining
composite part is kept as ``cofactor``. Consumers decide what an incomplete
factorization means for them; nothing here guesses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd, isqrt, prod

from .errors import DomainError, InputError

__all__ = [
    "Effort",
    "DEFAULT_EFFORT",
    "Factorization",
    "SquarefreePart",
    "TernaryResult",
    "IncompleteFactorization",
    "small_primes",
    "is_probable_prime",
    "factor",
    "squarefree_part",
    "mult_order",
    "has_even_order",
    "jacobi",
    "exact_sqrt",
    "is_perfect_square",
    "hilbert_symbol",
    "brc_ternary_solvable",
    "WITNESS_SEARCH_BOUND",
]


class IncompleteFactorization(InputError):
    """An operation needed a complete factorization and got a partial one."""


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


_SIEVE_LIMIT = 1 << 16
_SMALL = _sieve(_SIEVE_LIMIT)


def small_primes(limit: int) -> list[int]:
    """All primes <= limit."""
    if limit <= _SIEVE_LIMIT:
        from bisect import bisect_right

        return _SMALL[: bisect_right(_SMALL, limit)]
    return _sieve(limit)


# Bases 2..37 give a deterministic Miller-Rabin test below 3.3e24 > 2**64.
_DET_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_DET_LIMIT = 3317044064679887385961981
_EXTRA_ROUNDS = 64


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test.

    Exact for n < 3.3e24 (so for every 64-bit input). Larger n additionally get
    64 rounds with bases drawn from a PRNG seeded by n, so a composite passes
    with probability below 4**-64 and the answer is reproducible.
    """
    if n < 2:
        return False
    for p in _SMALL[:60]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_strong_probable_prime(n, a, d, s) for a in _DET_BASES):
        return False
    if n < _DET_LIMIT:
        return True
    rng = random.Random(n)
    return all(
        _strong_probable_prime(n, rng.randrange(2, n - 1), d, s)
        for _ in range(_EXTRA_ROUNDS)
    )


@dataclass(frozen=True)
class Effort:
    """Budget for :func:`factor`.

    trial_limit bounds trial division; each Pollard-rho attempt runs at most
    rho_iterations steps, and rho_polys distinct polynomials x^2 + c
    (c = 1, 2, ...) are tried before a composite is given up on.
    """

    trial_limit: int = 10_000
    rho_iterations: int = 300_000
    rho_polys: int = 4

    def scaled(self, factor: int) -> "Effort":
        return Effort(self.trial_limit, self.rho_iterations * factor, self.rho_polys)


DEFAULT_EFFORT = Effort()


@dataclass(frozen=True)
class Factorization:
    value: int
    prime_powers: tuple[tuple[int, int], ...]
    cofactor: int = 1

    def __post_init__(self):
        pp = tuple(sorted((int(p), int(e)) for p, e in self.prime_powers))
        object.__setattr__(self, "prime_powers", pp)

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.prime_powers]

    def exponent(self, p: int) -> int:
        for q, e in self.prime_powers:
            if q == p:
                return e
        return 0

    def recompose(self) -> int:
        return prod(p**e for p, e in self.prime_powers) * self.cofactor

    def check(self) -> None:
        """Raise InputError unless the factorization is internally consistent."""
        if self.recompose() != self.value:
            raise InputError(f"factors do not multiply to {self.value}")
        for p, e in self.prime_powers:
            if e < 1 or not is_probable_prime(p):
                raise InputError(f"{p}^{e} is not a valid prime power")
        if self.cofactor != 1 and (self.cofactor < 2 or is_probable_prime(self.cofactor)):
            raise InputError(f"cofactor {self.cofactor} is not composite")

    def __str__(self) -> str:
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in self.prime_powers]
        if self.cofactor != 1:
            parts.append(f"C{self.cofactor}")
        return " * ".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "prime_powers": [[str(p), e] for p, e in self.prime_powers],
            "cofactor": str(self.cofactor),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Factorization":
        return cls(
            int(data["value"]),
            tuple((int(p), int(e)) for p, e in data["prime_powers"]),
            int(data["cofactor"]),
        )


def _brent(n: int, c: int, max_iter: int) -> int | None:
    """One Brent-variant Pollard rho run with f(x) = x^2 + c from x0 = 2."""
    y, r, q, g = 2, 1, 1, 1
    m = 128
    steps = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gcd(q, n)
            k += m
        steps += r
        r *= 2
        if steps > max_iter:
            break
    if g == n:
        # Backtrack one step at a time inside the last batch.
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = gcd(abs(x - ys), n)
    if 1 < g < n:
        return g
    return None


def _perfect_power(n: int) -> tuple[int, int] | None:
    for k in range(2, n.bit_length() + 1):
        root = _iroot(n, k)
        if root < 2:
            break
        if root**k == n:
            return root, k
    return None


def _iroot(n: int, k: int) -> int:
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _split(n: int, effort: Effort, primes: dict[int, int], leftovers: list[int]) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            primes[m] = primes.get(m, 0) + 1
            continue
        pw = _perfect_power(m)
        if pw is not None:
            stack.extend([pw[0]] * pw[1])
            continue
        d = None
        for c in range(1, effort.rho_polys + 1):
            d = _brent(m, c, effort.rho_iterations)
            if d is not None:
                break
        if d is None:
            leftovers.append(m)
        else:
            stack.extend([d, m // d])


def factor(n: int, effort: Effort = DEFAULT_EFFORT) -> Factorization:
    """Factor ``n`` by trial division followed by Brent's rho.

    Deterministic for a fixed budget. Whatever cannot be split within the
    budget is returned as a composite ``cofactor``; listed primes are always
    correct (up to the primality test's documented error).
    """
    if n < 1:
        raise DomainError(f"factor needs n >= 1, got {n}")
    primes: dict[int, int] = {}
    rest = n
    for p in small_primes(effort.trial_limit):
        if p * p > rest:
            break
        while rest % p == 0:
            primes[p] = primes.get(p, 0) + 1
            rest //= p
    leftovers: list[int] = []
    if rest > 1:
        _split(rest, effort, primes, leftovers)
    return _normalized(n, primes, leftovers)


def _normalized(n: int, primes: dict[int, int], leftovers: list[int]) -> Factorization:
    # Move any known prime still hiding in the unsplit part into the list, so
    # listed exponents are exact.
    cofactor = prod(leftovers)
    for p in list(primes):
        while cofactor % p == 0:
            cofactor //= p
            primes[p] += 1
    if cofactor != 1 and is_probable_prime(cofactor):
        primes[cofactor] = primes.get(cofactor, 0) + 1
        cofactor = 1
    return Factorization(n, tuple(primes.items()), cofactor)


@dataclass(frozen=True)
class SquarefreePart:
    """The square-free part z* of an integer, possibly only partly known.

    ``value`` is None when an unfactored cofactor leaves it undetermined; the
    primes in ``known_divisors`` divide z* regardless.
    """

    value: int | None
    known_divisors: frozenset[int] = field(default_factory=frozenset)

    @property
    def known(self) -> bool:
        return self.value is not None


def squarefree_part(f: Factorization) -> SquarefreePart:
    odd = frozenset(p for p, e in f.prime_powers if e % 2)
    if not f.complete:
        return SquarefreePart(None, odd)
    return SquarefreePart(prod(odd), odd)


def _odd_part(n: int) -> int:
    while n % 2 == 0:
        n //= 2
    return n


def has_even_order(a: int, p: int) -> bool:
    """True iff a has even multiplicative order modulo the odd prime p.

    Needs no factorization: the order is odd exactly when a^u = 1 (mod p) for
    u the odd part of p - 1.
    """
    if a % p == 0:
        raise DomainError(f"{a} is not a unit modulo {p}")
    return pow(a, _odd_part(p - 1), p) != 1


def mult_order(a: int, p: int, p_minus_1: Factorization | None = None) -> int:
    """Exact multiplicative order of a modulo the prime p.

    ``p_minus_1`` must be a complete factorization of p - 1; when omitted it is
    computed with the default budget.
    """
    if a % p == 0:
        raise DomainError(f"{a} is not a unit modulo {p}")
    if p_minus_1 is None:
        p_minus_1 = factor(p - 1)
    if p_minus_1.value != p - 1:
        raise InputError(f"factorization is of {p_minus_1.value}, not {p - 1}")
    if not p_minus_1.complete:
        raise IncompleteFactorization(f"p - 1 = {p - 1} is not fully factored")
    order = p - 1
    for q, _ in p_minus_1.prime_powers:
        while order % q == 0 and pow(a, order // q, p) == 1:
            order //= q
    return order


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def exact_sqrt(n: int) -> int | None:
    """Integer square root of n if n is a perfect square, else None."""
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def is_perfect_square(n: int) -> bool:
    return exact_sqrt(n) is not None


def _split_p(x: int, p: int) -> tuple[int, int]:
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e, x


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Hilbert symbol (a, b)_p for nonzero integers; p = 0 means the real place."""
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol needs nonzero arguments")
    if p == 0:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split_p(a, p)
    beta, w = _split_p(b, p)
    if p == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_w = ((w - 1) // 2) % 2
        om_u = ((u * u - 1) // 8) % 2
        om_w = ((w * w - 1) // 8) % 2
        return -1 if (eps_u * eps_w + alpha * om_w + beta * om_u) % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    leg_u = jacobi(u, p) if beta % 2 else 1
    leg_w = jacobi(w, p) if alpha % 2 else 1
    return sign * leg_u * leg_w


WITNESS_SEARCH_BOUND = 200


@dataclass(frozen=True)
class TernaryResult:
    """Decision for nontrivial rational solvability of Z^2 = nX^2 + sign*lam*Y^2.

    ``method`` is "local" when the answer comes from Hilbert symbols at every
    relevant place, or "witness" when factoring ran out of budget and a found
    solution alone settles solvability.
    """

    solvable: bool | None
    witness: tuple[int, int, int] | None
    reason: str
    method: str
    failing_place: int | None = None


def _search_witness(a: int, b: int, bound: int) -> tuple[int, int, int] | None:
    # Smallest X + Y first, so (1, 1, .) is found immediately when it works.
    for total in range(1, 2 * bound + 1):
        for x in range(max(0, total - bound), min(total, bound) + 1):
            y = total - x
            z = exact_sqrt(a * x * x + b * y * y)
            if z is not None and (x, y, z) != (0, 0, 0):
                return x, y, z
    return None


def brc_ternary_solvable(
    n: int, lam: int, sign: int, effort: Effort = DEFAULT_EFFORT
) -> TernaryResult:
    """Decide whether Z^2 = n X^2 + sign*lam Y^2 has a nontrivial rational solution.

    The equation is solvable iff the Hilbert symbol (n, sign*lam)_v is 1 at
    the real place and at every prime dividing 2*n*lam. A witness with
    0 <= X, Y <= ``WITNESS_SEARCH_BOUND`` is searched alongside; a witness
    contradicting a "not solvable" decision raises AssertionError.
    """
    if n <= 0 or lam <= 0:
        raise DomainError("brc_ternary_solvable needs n > 0 and lam > 0")
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    a, b = n, sign * lam
    witness = _search_witness(a, b, WITNESS_SEARCH_BOUND)
    fa, fb = factor(a, effort), factor(lam, effort)
    if not (fa.complete and fb.complete):
        if witness is not None:
            return TernaryResult(True, witness, "explicit witness; local test not run (partial factorization)", "witness")
        return TernaryResult(None, None, "partial factorization and no witness in search range", "none")
    places = [0] + sorted({2, *fa.primes, *fb.primes})
    for p in places:
        if hilbert_symbol(a, b, p) == -1:
            if witness is not None:
                raise AssertionError(
                    f"local test rejects Z^2={a}X^2+({b})Y^2 at {p} but {witness} solves it"
                )
            where = "the real place" if p == 0 else f"p={p}"
            return TernaryResult(False, None, f"Hilbert symbol is -1 at {where}", "local", p)
    return TernaryResult(True, witness, "Hilbert symbol is 1 at every place", "local")
