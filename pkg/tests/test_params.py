import pytest

from fibdesign.errors import DomainError
from fibdesign.fib_core import fib
from fibdesign.params import (
    BROUWER_Q8_WITNESS,
    brc_test,
    brouwer_brc,
    brouwer_params,
    fibonacci_params,
    metis_quasiresidual_from_r,
    residual_params,
)

from oracles import ternary_brute


@pytest.mark.parametrize("m, expected", [(3, (4, 1, 0)), (5, (25, 9, 3)), (7, (169, 64, 24))])
def test_fibonacci_params(m, expected):
    p = fibonacci_params(m)
    assert p.as_tuple() == expected
    assert p.n == p.k - p.lam


def test_fibonacci_params_satisfy_design_identity():
    for m in range(3, 151, 2):
        p = fibonacci_params(m)
        assert p.k * (p.k - 1) == p.lam * (p.v - 1)
        assert p.n == fib(m - 1) * fib(m - 2)


@pytest.mark.parametrize("m", [0, 1, 2, 4, -3])
def test_fibonacci_params_bad_index(m):
    with pytest.raises(DomainError):
        fibonacci_params(m)


def test_residual_examples():
    assert residual_params(5).as_tuple() == (16, 24, 9, 6, 3)
    # v = F_7 F_6 + 1 = 13 * 8 + 1 = 105 = r + k + 1 = 64 + 40 + 1.
    assert residual_params(7).as_tuple() == (105, 168, 64, 40, 24)


def test_residual_identities():
    for m in range(3, 101, 2):
        assert all(residual_params(m).identities().values()), m


def test_metis_from_r_round_trip():
    for m in range(5, 61, 2):
        rp = residual_params(m)
        assert metis_quasiresidual_from_r(rp.r) == rp


def test_metis_from_r_rejects_non_fibonacci():
    hits = [r for r in range(1, 5000) if metis_quasiresidual_from_r(r) is not None]
    assert hits == [fib(2 * t) ** 2 for t in range(1, 9) if fib(2 * t) ** 2 < 5000]
    with pytest.raises(DomainError):
        metis_quasiresidual_from_r(0)


def test_brc_witness_for_fibonacci_family():
    for m in range(5, 46, 2):
        if m % 6 == 3:
            continue
        p = fibonacci_params(m)
        verdict = brc_test(p.v, p.k, p.lam)
        assert verdict.status == "PassOdd"
        assert verdict.witness == (1, 1, fib(m - 1))
        f1, f2, f3 = fib(m - 1), fib(m - 2), fib(m - 3)
        assert f1 * f1 == f1 * f2 + f1 * f3


def test_brc_even_fails_for_m_3_mod_6():
    for m in range(9, 46, 6):
        p = fibonacci_params(m)
        assert brc_test(p.v, p.k, p.lam).status == "FailEven"


def test_brc_known_cases():
    assert brc_test(7, 3, 1).passed  # Fano plane
    assert brc_test(16, 6, 2).status == "PassEven"
    assert brc_test(22, 7, 2).status == "FailEven"
    assert brc_test(43, 7, 1).status == "FailOdd"  # no projective plane of order 6
    assert brc_test(111, 11, 1).passed  # order 10 survives the test
    assert brc_test(29, 8, 2).status == "FailOdd"
    with pytest.raises(DomainError):
        brc_test(10, 4, 1)


def test_brc_odd_agrees_with_brute_force():
    # every admissible odd (v, k, lambda) with small v
    for v in range(5, 120, 2):
        for k in range(2, v // 2 + 1):
            if (k * (k - 1)) % (v - 1):
                continue
            lam = k * (k - 1) // (v - 1)
            if lam == 0:
                continue
            verdict = brc_test(v, k, lam)
            sign = -1 if ((v - 1) // 2) % 2 else 1
            found = ternary_brute(k - lam, sign * lam, 60)
            if found is not None:
                assert verdict.passed, (v, k, lam)
            if verdict.status == "FailOdd":
                assert found is None


def test_brouwer_params():
    assert brouwer_params(8, 3) == (2 * 8 * 511 // 7 + 1, 512, 224)
    with pytest.raises(DomainError):
        brouwer_params(6, 3)
    assert brouwer_params(3, 2) == (25, 9, 3)
    with pytest.raises(DomainError):
        brouwer_params(8, 1)

def test_brouwer_brc_family():
    x, y, z = BROUWER_Q8_WITNESS
    assert 2 * z * z == 9 * x * x + 7 * y * y
    for t in (3, 5):
        outcomes = {q: brouwer_brc(q, t).passed for q in (2, 8, 32, 128)}
        assert outcomes == {2: False, 8: True, 32: False, 128: False}
    assert brouwer_brc(4, 3).passed and brouwer_brc(2, 2).passed


def test_brouwer_brc_agrees_with_general_test():
    for q in (2, 4, 8, 16, 32):
        for t in (2, 3):
            v, k, lam = brouwer_params(q, t)
            assert brouwer_brc(q, t).passed == brc_test(v, k, lam).passed, (q, t)
