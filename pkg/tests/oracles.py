"""Slow, obviously-correct reference implementations used only by tests."""

from math import gcd


def fib_iter(t):
    a, b = 0, 1
    for _ in range(t):
        a, b = b, a + b
    return a


def lucas_iter(t):
    a, b = 2, 1
    for _ in range(t):
        a, b = b, a + b
    return a


def is_prime_trial(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factor_trial(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def valuation_trial(p, n):
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def order_exhaustive(a, p):
    x, k = a % p, 1
    while x != 1:
        x = x * a % p
        k += 1
    return k


def ternary_brute(a, b, bound):
    """Some nontrivial (X, Y, Z) with Z^2 = aX^2 + bY^2 and all |.| <= bound, or None."""
    squares = {z * z: z for z in range(bound + 1)}
    for x in range(bound + 1):
        for y in range(bound + 1):
            if x == y == 0:
                continue
            if gcd(x, y) != 1:
                continue
            s = a * x * x + b * y * y
            if s in squares:
                return x, y, squares[s]
    # Z = 0 solutions with X, Y not both 0 were covered (s == 0).
    return None
