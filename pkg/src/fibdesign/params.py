"""Fibonacci design parameters and Bruck-Ryser-Chowla admissibility."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError
from .fib_core import fib
from .numtheory import (
    DEFAULT_EFFORT,
    Effort,
    brc_ternary_solvable,
    exact_sqrt,
    factor,
    is_probable_prime,
    squarefree_part,
)

__all__ = [
    "ResidualParams",
    "FibParams",
    "BrcVerdict",
    "metis_quasiresidual_from_r",
    "fibonacci_params",
    "residual_params",
    "brc_test",
    "brouwer_params",
    "brouwer_brc",
    "BROUWER_Q8_WITNESS",
]


@dataclass(frozen=True)
class ResidualParams:
    m: int
    v: int
    b: int
    r: int
    k: int
    lam: int

    def identities(self) -> dict[str, bool]:
        """Every relation a quasi-residual Metis parameter set must satisfy."""
        v, b, r, k, lam = self.v, self.b, self.r, self.k, self.lam
        return {
            "vr=bk": v * r == b * k,
            "r(k-1)=lam(v-1)": r * (k - 1) == lam * (v - 1),
            "metis v=r+k+1": v == r + k + 1,
            "quasi-residual r=k+lam": r == k + lam,
        }

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return self.v, self.b, self.r, self.k, self.lam


@dataclass(frozen=True)
class FibParams:
    m: int
    v: int
    k: int
    lam: int
    n: int

    def as_tuple(self) -> tuple[int, int, int]:
        return self.v, self.k, self.lam


def _check_m(m: int) -> None:
    if m < 3 or m % 2 == 0:
        raise DomainError(f"Fibonacci designs are indexed by odd m >= 3, got {m}")


def fibonacci_params(m: int) -> FibParams:
    """(v, k, lambda) = (F_m^2, F_{m-1}^2, F_{m-1} F_{m-3}) with order F_{m-1} F_{m-2}."""
    _check_m(m)
    f1, f2, f3 = fib(m - 1), fib(m - 2), fib(m - 3)
    return FibParams(m, fib(m) ** 2, f1 * f1, f1 * f3, f1 * f2)


def residual_params(m: int) -> ResidualParams:
    """Block residual of the Fibonacci design F_m, a quasi-residual Metis design."""
    _check_m(m)
    f0, f1, f2, f3 = fib(m), fib(m - 1), fib(m - 2), fib(m - 3)
    return ResidualParams(m, f0 * f1 + 1, fib(m + 1) * f1, f1 * f1, f1 * f2, f1 * f3)


def metis_quasiresidual_from_r(r: int) -> ResidualParams | None:
    """Quasi-residual Metis parameters with replication number r, if any.

    Such parameters exist exactly when r and 5r + 4 are both squares; then
    r = F_{2t}^2 and the set is the residual of F_{2t+1}.
    """
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    y = exact_sqrt(r)
    x = exact_sqrt(5 * r + 4)
    if x is None or y is None:
        return None
    k2 = x * y - r  # 2k = sqrt((5r+4) r) - r
    if k2 % 2:
        return None
    k = k2 // 2
    lam = r - k
    v = r + k + 1
    b, rem = divmod(v * r, k)
    if rem:
        return None
    # y = F_{2t}; recover t by walking the sequence.
    t = 1
    while fib(2 * t) < y:
        t += 1
    if fib(2 * t) != y:
        return None
    return ResidualParams(2 * t + 1, v, b, r, k, lam)


@dataclass(frozen=True)
class BrcVerdict:
    """Outcome of the Bruck-Ryser-Chowla test.

    status is one of "PassEven", "FailEven", "PassOdd", "FailOdd", or
    "UndecidedOdd" when factoring limits leave the ternary form unsettled.
    """

    status: str
    detail: dict = field(default_factory=dict)
    witness: tuple[int, int, int] | None = None

    @property
    def passed(self) -> bool:
        return self.status in ("PassEven", "PassOdd")


def brc_test(v: int, k: int, lam: int, effort: Effort = DEFAULT_EFFORT) -> BrcVerdict:
    """Bruck-Ryser-Chowla check for a symmetric (v, k, lambda) parameter set."""
    if k * (k - 1) != lam * (v - 1):
        raise DomainError(f"({v},{k},{lam}) violates k(k-1) = lambda(v-1)")
    n = k - lam
    if v % 2 == 0:
        root = exact_sqrt(n)
        if root is None:
            return BrcVerdict("FailEven", {"n": n, "reason": "v even and n is not a square"})
        return BrcVerdict("PassEven", {"n": n, "sqrt_n": root})
    sign = -1 if ((v - 1) // 2) % 2 else 1
    if lam == 0:
        # lam = 0 forces k in {0, 1}; Z^2 = k X^2 then has X = 1, Z = k.
        return BrcVerdict("PassOdd", {"n": n, "sign": sign}, (1, 0, k))
    res = brc_ternary_solvable(n, lam, sign, effort)
    detail = {"n": n, "lam": lam, "sign": sign, "method": res.method, "reason": res.reason}
    if res.solvable is None:
        return BrcVerdict("UndecidedOdd", detail)
    if not res.solvable:
        return BrcVerdict("FailOdd", detail)
    if res.witness is not None:
        x, y, z = res.witness
        assert z * z == n * x * x + sign * lam * y * y
    return BrcVerdict("PassOdd", detail, res.witness)


def _prime_power(q: int) -> tuple[int, int] | None:
    f = factor(q)
    if f.complete and len(f.prime_powers) == 1:
        return f.prime_powers[0]
    return None


def brouwer_params(q: int, t: int) -> tuple[int, int, int]:
    """v = 2q(q^t - 1)/(q - 1) + 1, k = q^t, lambda = q^(t-1)(q - 1)/2."""
    if t < 2:
        raise DomainError(f"t must be >= 2, got {t}")
    if q < 2 or _prime_power(q) is None:
        raise DomainError(f"q must be a prime power, got {q}")
    twice_lam = q ** (t - 1) * (q - 1)
    if twice_lam % 2:
        raise DomainError(f"lambda = {twice_lam}/2 is not an integer for q={q}, t={t}")
    v = 2 * q * (q**t - 1) // (q - 1) + 1
    return v, q**t, twice_lam // 2


# 2 * 12^2 = 9 * 5^2 + 7 * 3^2: solution of 2Z^2 = (q+1)X^2 + (q-1)Y^2 at q = 8.
BROUWER_Q8_WITNESS = (5, 3, 12)


def brouwer_brc(q: int, t: int) -> BrcVerdict:
    """BRC decision for the Brouwer-type family with q a power of 2.

    The Diophantine equation is 2Z^2 = q^(t-1) ((q+1) X^2 + (q-1) Y^2).
    It has the witness X = Y = 1, Z = sqrt(q^t) when q is an even power of 2
    or t is even. Otherwise q^(t-1) is a square and the equation is solvable
    iff every prime dividing the square-free part of q + 1 is 1 mod 4.
    """
    f = _prime_power(q)
    if f is None or f[0] != 2:
        raise DomainError(f"q must be a power of 2, got {q}")
    exp = f[1]
    if exp % 2 == 0 or t % 2 == 0:
        z = exact_sqrt(q**t)
        return BrcVerdict("PassOdd", {"q": q, "t": t, "case": "square q^t"}, (1, 1, z))
    star = squarefree_part(factor(q + 1))
    bad = sorted(p for p in star.known_divisors if p % 4 == 3)
    detail = {"q": q, "t": t, "case": "Legendre", "squarefree_q_plus_1": star.value, "bad_primes": bad}
    if bad:
        return BrcVerdict("FailOdd", detail)
    witness = None
    if q == 8:
        x, y, z = BROUWER_Q8_WITNESS
        s = 8 ** ((t - 1) // 2)  # q^(t-1) = s^2; scale Z accordingly
        witness = (x, y, z * s)
    return BrcVerdict("PassOdd", detail, witness)
