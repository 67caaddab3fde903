import io

import pytest

from fibdesign.errors import ParseError
from fibdesign.fib_core import fib
from fibdesign.numtheory import Effort, factor
from fibdesign.tables import FibFactorSource, dump_table, factor_fib, load_table, parse_table


def test_factor_fib_complete_to_150():
    for t in range(1, 151):
        f = factor_fib(t)
        assert f.complete and f.value == fib(t), t
        f.check()


def test_factor_fib_matches_plain_factor():
    for t in range(1, 80):
        assert factor_fib(t).prime_powers == factor(fib(t)).prime_powers


def test_parse_table_roundtrip():
    table = {t: factor_fib(t) for t in (1, 2, 10, 25, 36, 99)}
    buf = io.StringIO()
    dump_table(table, buf)
    assert parse_table(buf.getvalue().splitlines()) == table


def test_parse_table_with_cofactor_and_comments():
    c = fib(877) // 1753
    text = f"# partial entry\n\n877: 1753 * C{c}\n25: 5^2 * 3001\n"
    table = parse_table(text.splitlines())
    assert table[877].primes == [1753] and table[877].cofactor == c
    assert not table[877].complete
    assert table[25].complete


@pytest.mark.parametrize(
    "text, line",
    [
        ("10: 5 * 13", 1),  # product is wrong
        ("# ok\n10: 55", 2),  # 55 is not prime
        ("12: 2^4 * 3^2\n12: 2^4 * 3^2", 2),  # duplicate
        ("13: C233", 1),  # prime cofactor
        ("x: 5", 1),
        ("10:", 1),
        ("10: C5 * 11", 1),
    ],
)
def test_parse_table_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_table(text.splitlines())
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_load_table(tmp_path):
    path = tmp_path / "t.txt"
    path.write_text("12: 2^4 * 3^2\n1: 1\n")
    table = load_table(path)
    assert table[12].recompose() == 144 and table[1].value == 1


def test_source_prefers_tables():
    entry = parse_table([f"877: 1753 * C{fib(877) // 1753}"])
    src = FibFactorSource(entry, Effort(trial_limit=10, rho_iterations=10, rho_polys=1))
    assert src.get(877) is entry[877] and src.origin(877) == "table"
    assert src.origin(876) == "built-in"
    assert src.get(10).complete
