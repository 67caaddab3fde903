import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fibdesign.errors import DomainError, InputError
from fibdesign.fib_core import fib
from fibdesign.numtheory import (
    WITNESS_SEARCH_BOUND,
    Effort,
    Factorization,
    IncompleteFactorization,
    brc_ternary_solvable,
    exact_sqrt,
    factor,
    has_even_order,
    hilbert_symbol,
    is_perfect_square,
    is_probable_prime,
    jacobi,
    mult_order,
    small_primes,
    squarefree_part,
)

from oracles import factor_trial, is_prime_trial, order_exhaustive, ternary_brute


@pytest.mark.parametrize("n, expected", [(233, True), (1753, True), (144, False), (0, False), (1, False), (2, True)])
def test_primality_examples(n, expected):
    assert is_probable_prime(n) is expected


def test_primality_exhaustive_small():
    for n in range(20000):
        assert is_probable_prime(n) == is_prime_trial(n)


def test_primality_strong_pseudoprimes_and_large():
    # 3215031751 is a strong pseudoprime to bases 2, 3, 5, 7.
    assert not is_probable_prime(3215031751)
    assert not is_probable_prime(3825123056546413051)
    assert is_probable_prime(2**61 - 1)
    assert is_probable_prime(2**127 - 1)
    assert not is_probable_prime((2**61 - 1) * (2**89 - 1))
    assert is_probable_prime(fib(131))
    for n in random.Random(5).sample(range(10**12, 10**13), 200):
        assert is_probable_prime(n) == sympy.isprime(n)


@pytest.mark.parametrize(
    "n, expected",
    [(75025, {5: 2, 3001: 1}), (144, {2: 4, 3: 2}), (9227465, {5: 1, 13: 1, 141961: 1}), (1, {})],
)
def test_factor_examples(n, expected):
    f = factor(n)
    assert f.complete
    assert dict(f.prime_powers) == expected == factor_trial(n)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**12))
def test_factor_round_trip(n):
    f = factor(n)
    assert f.recompose() == n
    assert f.complete
    assert all(is_probable_prime(p) for p in f.primes)


def test_factor_agrees_with_sympy_on_fibonacci_numbers():
    for t in range(3, 90):
        assert dict(factor(fib(t)).prime_powers) == sympy.factorint(fib(t)), t


def test_factor_budget_exhaustion_leaves_composite_cofactor():
    p, q = 1000000007, 998244353
    f = factor(p * q, Effort(trial_limit=100, rho_iterations=10, rho_polys=1))
    assert not f.complete
    assert f.cofactor == p * q
    f.check()


def test_factor_is_deterministic():
    n = fib(139)
    assert factor(n) == factor(n)


def test_factorization_check_rejects_bad_data():
    with pytest.raises(InputError):
        Factorization(12, ((2, 2), (3, 2))).check()
    with pytest.raises(InputError):
        Factorization(12, ((4, 1), (3, 1))).check()
    with pytest.raises(InputError):
        Factorization(14, ((2, 1),), 7).check()


def test_squarefree_part():
    assert squarefree_part(factor(12)).value == 3
    assert squarefree_part(factor(9)).value == 1
    partial = Factorization(5**3 * 1000000007 * 998244353, ((5, 3),), 1000000007 * 998244353)
    sf = squarefree_part(partial)
    assert sf.value is None and 5 in sf.known_divisors


def test_squarefree_times_square_recovers_value():
    for n in range(1, 3000):
        s = squarefree_part(factor(n)).value
        assert n % s == 0 and is_perfect_square(n // s)


@pytest.mark.parametrize("a, p, order", [(5, 1753, 584), (2, 89, 11), (89, 233, 4)])
def test_mult_order_examples(a, p, order):
    assert mult_order(a, p) == order == order_exhaustive(a, p)
    assert has_even_order(a, p) == (order % 2 == 0)


def test_mult_order_properties():
    rng = random.Random(7)
    for p in small_primes(3000)[1:]:
        a = rng.randrange(1, p)
        o = mult_order(a, p)
        assert (p - 1) % o == 0 and pow(a, o, p) == 1
        for q in factor(o).primes:
            assert pow(a, o // q, p) != 1
        assert has_even_order(a, p) == (o % 2 == 0)


def test_mult_order_errors():
    with pytest.raises(DomainError):
        mult_order(1753, 1753)
    partial = Factorization(1752, ((2, 3),), 219)
    with pytest.raises(IncompleteFactorization):
        mult_order(5, 1753, partial)


def test_jacobi_examples():
    assert jacobi(1, 3) == 1
    assert jacobi(3, 17) == -1
    assert jacobi(149, 3) == -1  # 149 = 2 (mod 3)
    with pytest.raises(DomainError):
        jacobi(3, 8)


def test_jacobi_matches_euler_criterion():
    for p in small_primes(10**4)[1:]:
        for a in (range(p) if p < 400 else random.Random(p).sample(range(p), 50)):
            e = pow(a, (p - 1) // 2, p)
            assert jacobi(a, p) == (0 if a == 0 else (1 if e == 1 else -1))


def test_perfect_square():
    assert exact_sqrt(49) == 7 and is_perfect_square(49)
    assert exact_sqrt(14) is None
    assert exact_sqrt(144) == 12
    assert exact_sqrt(-4) is None


def test_hilbert_product_formula():
    rng = random.Random(11)
    for _ in range(400):
        a = rng.choice([-1, 1]) * rng.randint(1, 500)
        b = rng.choice([-1, 1]) * rng.randint(1, 500)
        places = [0] + sorted({2, *factor(abs(a)).primes, *factor(abs(b)).primes})
        total = 1
        for p in places:
            total *= hilbert_symbol(a, b, p)
        assert total == 1


@pytest.mark.parametrize("n, lam, sign, witness", [(6, 3, 1, (1, 1, 3)), (40, 24, 1, (1, 1, 8))])
def test_brc_ternary_solvable_examples(n, lam, sign, witness):
    res = brc_ternary_solvable(n, lam, sign)
    assert res.solvable and res.witness == witness and res.method == "local"


def test_brc_ternary_unsolvable_example():
    res = brc_ternary_solvable(5, 2, -1)
    assert res.solvable is False
    assert ternary_brute(5, -2, 200) is None


def test_brc_ternary_agrees_with_brute_force():
    for n in range(1, 25):
        for lam in range(1, 25):
            for sign in (1, -1):
                res = brc_ternary_solvable(n, lam, sign)
                found = ternary_brute(n, sign * lam, 60)
                if found is not None:
                    assert res.solvable, (n, lam, sign, found)
                if res.solvable is False:
                    assert found is None
                if res.witness is not None:
                    x, y, z = res.witness
                    assert z * z == n * x * x + sign * lam * y * y
                    assert max(x, y) <= WITNESS_SEARCH_BOUND


def test_brc_ternary_rejects_bad_input():
    with pytest.raises(DomainError):
        brc_ternary_solvable(0, 1, 1)
    with pytest.raises(DomainError):
        brc_ternary_solvable(1, 1, 2)
