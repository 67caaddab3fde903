"""Factorizations of Fibonacci numbers: built-in splitting and table files.

Table files hold one index per line::

    877: 1753 * C<digits>
    25: 5^2 * 3001

Each factor is a decimal prime with optional ``^exponent``; a trailing
``C<digits>`` token is a composite part left unfactored. Lines starting with
``#`` and blank lines are ignored.
"""

from __future__ import annotations

import re
from math import gcd
from pathlib import Path
from typing import IO, Iterable, Mapping

from .errors import ParseError
from .fib_core import fib
from .numtheory import (
    DEFAULT_EFFORT,
    Effort,
    Factorization,
    factor,
    is_probable_prime,
)

__all__ = ["factor_fib", "FibFactorSource", "parse_table", "load_table", "dump_table"]

_LINE = re.compile(r"^\s*(\d+)\s*:\s*(.*?)\s*$")
_TOKEN = re.compile(r"^(\d+)(?:\^(\d+))?$")


def _divisors(t: int) -> list[int]:
    small = [d for d in range(1, int(t**0.5) + 1) if t % d == 0]
    return sorted(set(small) | {t // d for d in small})


def factor_fib(t: int, effort: Effort = DEFAULT_EFFORT, _memo: dict | None = None) -> Factorization:
    """Factor F_t, using that F_d divides F_t for every d dividing t.

    Primes already found in F_d for proper divisors d are divided out first, so
    Pollard rho only ever sees the primitive part.
    """
    memo = {} if _memo is None else _memo
    if t in memo:
        return memo[t]
    value = fib(t)
    if value <= 1:
        result = Factorization(value, ())
        memo[t] = result
        return result
    primes: dict[int, int] = {}
    rest = value
    for d in _divisors(t)[:-1]:
        if d < 3:
            continue
        sub = factor_fib(d, effort, memo)
        for p in sub.primes:
            if p in primes:
                continue
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            primes[p] = e
        if sub.cofactor != 1:
            g = gcd(rest, sub.cofactor)
            if g > 1:
                # Unsplit block shared with a divisor; try it once more on its own.
                block = factor(g, effort)
                for p, _ in block.prime_powers:
                    while rest % p == 0:
                        rest //= p
                        primes[p] = primes.get(p, 0) + 1
    tail = factor(rest, effort)
    for p, e in tail.prime_powers:
        primes[p] = primes.get(p, 0) + e
    cofactor = tail.cofactor
    result = Factorization(value, tuple((p, e) for p, e in primes.items() if e), cofactor)
    assert result.recompose() == value
    memo[t] = result
    return result


class FibFactorSource:
    """Supplies factorizations of F_t: from tables when present, else computed.

    Results are cached per instance.
    """

    def __init__(self, tables: Mapping[int, Factorization] | None = None, effort: Effort = DEFAULT_EFFORT):
        self.tables = dict(tables or {})
        self.effort = effort
        self._memo: dict[int, Factorization] = {}

    def get(self, t: int) -> Factorization:
        if t in self.tables:
            return self.tables[t]
        return factor_fib(t, self.effort, self._memo)

    def origin(self, t: int) -> str:
        return "table" if t in self.tables else "built-in"


def _parse_line(text: str, lineno: int) -> tuple[int, Factorization]:
    match = _LINE.match(text)
    if not match:
        raise ParseError(f"expected 't: factors', got {text!r}", lineno)
    t = int(match.group(1))
    body = match.group(2)
    if not body:
        raise ParseError("no factors given", lineno)
    primes: dict[int, int] = {}
    cofactor = 1
    tokens = [tok.strip() for tok in body.split("*")]
    for i, tok in enumerate(tokens):
        if tok.startswith("C"):
            if i != len(tokens) - 1 or not tok[1:].isdigit():
                raise ParseError(f"bad cofactor token {tok!r}", lineno)
            cofactor = int(tok[1:])
            if cofactor < 4 or is_probable_prime(cofactor):
                raise ParseError(f"cofactor {cofactor} is not composite", lineno)
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad factor token {tok!r}", lineno)
        p, e = int(m.group(1)), int(m.group(2) or 1)
        if e < 1:
            raise ParseError(f"exponent must be positive in {tok!r}", lineno)
        if p == 1 and e == 1 and len(tokens) == 1:
            continue
        if not is_probable_prime(p):
            raise ParseError(f"{p} is not prime", lineno)
        primes[p] = primes.get(p, 0) + e
    f = Factorization(fib(t), tuple(primes.items()), cofactor)
    if f.recompose() != f.value:
        raise ParseError(f"factors do not multiply to F_{t}", lineno)
    return t, f


def parse_table(lines: Iterable[str]) -> dict[int, Factorization]:
    table: dict[int, Factorization] = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        t, f = _parse_line(text, lineno)
        if t in table:
            raise ParseError(f"duplicate entry for index {t}", lineno)
        table[t] = f
    return table


def load_table(path: str | Path) -> dict[int, Factorization]:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh)


def dump_table(table: Mapping[int, Factorization], sink: IO[str]) -> None:
    for t in sorted(table):
        sink.write(f"{t}: {table[t]}\n")
