"""Nonexistence gates for difference-set developments of Fibonacci designs.

If F_m (m = +-1 mod 6) is the development of a difference set in any group,
abelian or not, then for every prime p dividing F_m:

* p = 1 (mod 8), and
* every prime dividing the square-free part of F_{m-1} or F_{m-2} has odd
  multiplicative order modulo p.

Each gate below turns one consequence of this into a decision with a
certificate. ``verify_certificate`` re-derives every claim with ``fib_mod``,
primality tests and modular exponentiation; it never trusts the
factorization that led to the certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

from .errors import DomainError, InputError
from .fib_core import fib, fib_mod, fib_valuation, rank_of_apparition
from .numtheory import (
    Effort,
    Factorization,
    factor,
    has_even_order,
    is_probable_prime,
    mult_order,
    small_primes,
)
from .tables import FibFactorSource

__all__ = [
    "RULED_OUT",
    "PASS",
    "INCONCLUSIVE",
    "NOT_APPLICABLE",
    "GATE_ORDER",
    "GROUP_SCOPE",
    "Certificate",
    "GateResult",
    "Verdict",
    "CertificateCheck",
    "congruence_gate",
    "mod216_gate",
    "prime_divisor_gate",
    "squarefree_shortcut",
    "odd_order_gate",
    "order2_gate",
    "brc_gate",
    "development_verdict",
    "verify_certificate",
    "ScanReport",
    "scan",
]

RULED_OUT = "RuledOut"
PASS = "Pass"
INCONCLUSIVE = "Inconclusive"
NOT_APPLICABLE = "NotApplicable"

GATE_ORDER = ("congruence", "mod216", "prime_divisor", "squarefree_shortcut", "odd_order", "order2")
GROUP_SCOPE = "difference sets in any group, abelian or not"

# Small primes q tried as members of the square-free part of F_{m-1}, F_{m-2}
# through their exact valuation, without factoring those numbers.
SMALL_Q_LIMIT = 1000


@dataclass(frozen=True)
class Certificate:
    gate: str
    m: int
    witnesses: dict

    def to_json(self) -> dict:
        return {"gate": self.gate, "m": self.m, "witnesses": _jsonable(self.witnesses)}

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        return cls(data["gate"], int(data["m"]), dict(data["witnesses"]))


def _jsonable(obj):
    if isinstance(obj, Factorization):
        return obj.to_json()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


@dataclass(frozen=True)
class GateResult:
    gate: str
    status: str
    detail: str
    certificate: Certificate | None = None
    missing: tuple[str, ...] = ()

    @property
    def conclusive(self) -> bool:
        return self.status == RULED_OUT

    def to_json(self) -> dict:
        return {
            "gate": self.gate,
            "status": self.status,
            "detail": self.detail,
            "missing": list(self.missing),
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


@dataclass(frozen=True)
class Verdict:
    """status: TrivialExists, NoDesignByBrc, RuledOut or Inconclusive."""

    m: int
    status: str
    reasons: tuple[GateResult, ...]
    certificate: Certificate | None = None
    missing: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "status": self.status,
            "reasons": [r.to_json() for r in self.reasons],
            "certificate": self.certificate.to_json() if self.certificate else None,
            "missing": list(self.missing),
        }


def _check_class(m: int) -> None:
    if m < 3 or m % 2 == 0:
        raise DomainError(f"m must be odd and >= 3, got {m}")


def _not_applicable(gate: str, why: str) -> GateResult:
    return GateResult(gate, NOT_APPLICABLE, why)


def brc_gate(m: int) -> GateResult:
    """m = 3 (mod 6), m > 3: v = F_m^2 is even and the order is not a square."""
    _check_class(m)
    if m % 6 != 3 or m == 3:
        return _not_applicable("brc_even", "v = F_m^2 is odd, or m = 3")
    n = fib(m - 1) * fib(m - 2)
    root = isqrt(n)
    if root * root == n:  # never happens for m > 3, kept as a guard
        return GateResult("brc_even", PASS, f"order {n} is a square")
    cert = Certificate("brc_even", m, {"n": n, "isqrt_n": root, "fm_mod_2": fib_mod(m, 2)})
    return GateResult("brc_even", RULED_OUT, "v even and the order F_{m-1}F_{m-2} is not a square", cert)


def congruence_gate(m: int) -> GateResult:
    """m = +-1 (mod 6) but not +-1 (mod 12) forces F_m = 5 (mod 8)."""
    _check_class(m)
    if m % 6 == 3:
        return _not_applicable("congruence", "m = 3 (mod 6)")
    if m % 12 in (1, 11):
        return GateResult("congruence", PASS, f"m = {m % 12} (mod 12)")
    residue = fib_mod(m, 8)
    cert = Certificate("congruence", m, {"m_mod_12": m % 12, "fm_mod_8": residue})
    return GateResult(
        "congruence",
        RULED_OUT,
        f"F_m = {residue} (mod 8), so F_m has a prime divisor not 1 (mod 8)",
        cert,
    )


def mod216_gate(m: int, fm_factors: Factorization | None = None) -> GateResult:
    """m = 1 +- 36 (mod 216): 3 divides the square-free part of F_{m-1} while
    some prime p = 2 (mod 3) divides F_m; then 3 is a non-residue mod p."""
    _check_class(m)
    if m % 216 not in (37, 181):
        return GateResult("mod216", PASS, f"m = {m % 216} (mod 216)")
    nu3 = fib_valuation(3, m - 1).exponent
    residue = fib_mod(m, 3)
    if nu3 % 2 == 0 or residue != 2:  # cannot happen in this residue class
        raise AssertionError(f"mod-216 argument fails at m={m}: nu3={nu3}, F_m mod 3={residue}")
    witnesses = {"m_mod_216": m % 216, "nu3_fm1": nu3, "fm_mod_3": residue}
    if fm_factors is not None:
        hits = [p for p in fm_factors.primes if p % 3 == 2]
        if hits:
            witnesses["p"] = hits[0]
    cert = Certificate("mod216", m, witnesses)
    return GateResult(
        "mod216",
        RULED_OUT,
        f"3^{nu3} exactly divides F_(m-1) and F_m = 2 (mod 3)",
        cert,
    )


def _check_value(f: Factorization, t: int, label: str) -> None:
    if f.value != fib(t):
        raise InputError(f"{label}: factorization is not of F_{t}")


def prime_divisor_gate(m: int, fm_factors: Factorization) -> GateResult:
    """Every prime dividing F_m must be 1 (mod 8)."""
    _check_class(m)
    _check_value(fm_factors, m, "prime_divisor_gate")
    for p in fm_factors.primes:
        if p % 8 != 1:
            cert = Certificate("prime_divisor", m, {"p": p, "p_mod_8": p % 8})
            return GateResult("prime_divisor", RULED_OUT, f"{p} divides F_m and {p} = {p % 8} (mod 8)", cert)
    if fm_factors.complete:
        return GateResult("prime_divisor", PASS, "every prime divisor of F_m is 1 (mod 8)")
    return GateResult(
        "prime_divisor",
        INCONCLUSIVE,
        "known primes of F_m are all 1 (mod 8) but F_m is not fully factored",
        missing=(f"complete factorization of F_{m}",),
    )


def _squarefree(f: Factorization) -> bool | None:
    if any(e > 1 for _, e in f.prime_powers):
        return False
    return True if f.complete else None


def squarefree_shortcut(m: int, fm1: Factorization, fm2: Factorization) -> GateResult:
    """If F_{m-1} (or F_{m-2}) is square-free it is its own square-free part,
    yet its square is -1 modulo F_m, so it has order 4 modulo each p | F_m."""
    _check_class(m)
    _check_value(fm1, m - 1, "squarefree_shortcut")
    _check_value(fm2, m - 2, "squarefree_shortcut")
    unknown = []
    for t, f in ((m - 1, fm1), (m - 2, fm2)):
        sf = _squarefree(f)
        if sf:
            fm = fib(m)
            cert = Certificate(
                "squarefree_shortcut",
                m,
                {"index": t, "primes": list(f.primes), "square_mod_fm": (f.value * f.value) % fm},
            )
            return GateResult(
                "squarefree_shortcut",
                RULED_OUT,
                f"F_{t} is square-free and F_{t}^2 = -1 (mod F_m)",
                cert,
            )
        if sf is None:
            unknown.append(f"complete factorization of F_{t}")
    if unknown:
        return GateResult(
            "squarefree_shortcut", INCONCLUSIVE, "square-freeness not settled", missing=tuple(unknown)
        )
    return _not_applicable("squarefree_shortcut", "neither F_(m-1) nor F_(m-2) is square-free")


def _exact_exponent(q: int, t: int) -> int:
    e, qe = 0, q
    while fib_mod(t, qe) == 0:
        e += 1
        qe *= q
    return e


def _order_witness(m: int, gate: str, p: int, q: int, t: int, e: int) -> Certificate:
    witnesses = {"p": p, "q": q, "index": t, "q_exponent": e, "order_even": True}
    pm1 = factor(p - 1)
    if pm1.complete:
        witnesses["order"] = mult_order(q, p, pm1)
        witnesses["p_minus_1"] = pm1
    return Certificate(gate, m, witnesses)


def _q_index(m: int, q: int) -> tuple[int, int] | None:
    for t in (m - 1, m - 2):
        e = _exact_exponent(q, t)
        if e % 2:
            return t, e
    return None


def odd_order_gate(m: int, p: int, q: int, p_minus_1: Factorization | None = None) -> GateResult:
    """Rule out F_m when a prime q with odd exponent in F_{m-1} or F_{m-2}
    has even order modulo a prime p dividing F_m."""
    _check_class(m)
    if not is_probable_prime(p) or fib_mod(m, p) != 0:
        raise InputError(f"{p} is not a prime divisor of F_{m}")
    if not is_probable_prime(q):
        raise InputError(f"{q} is not prime")
    hit = _q_index(m, q)
    if hit is not None:
        try:
            law = fib_valuation(q, hit[0]).exponent
        except DomainError:
            law = None  # rank of apparition out of reach; direct exponent stands
        if law is not None and law != hit[1]:
            raise AssertionError(f"law of repetition disagrees for q={q}, t={hit[0]}")
    if hit is None:
        raise InputError(f"{q} has even exponent in both F_{m - 1} and F_{m - 2}")
    t, e = hit
    if not has_even_order(q, p):
        return GateResult("odd_order", PASS, f"ord_{p}({q}) is odd")
    cert = _order_witness(m, "odd_order", p, q, t, e)
    if p_minus_1 is not None and p_minus_1.complete:
        cert.witnesses["order"] = mult_order(q, p, p_minus_1)
        cert.witnesses["p_minus_1"] = p_minus_1
    order = cert.witnesses.get("order")
    shown = f"{order}" if order is not None else "even"
    return GateResult(
        "odd_order",
        RULED_OUT,
        f"{q}^{e} exactly divides F_{t} and ord_{p}({q}) = {shown}",
        cert,
    )


def _candidate_qs(m: int, fm1: Factorization | None, fm2: Factorization | None) -> list[int]:
    qs = set()
    for f in (fm1, fm2):
        if f is not None:
            qs.update(p for p, e in f.prime_powers if e % 2)
    for q in small_primes(SMALL_Q_LIMIT):
        if any(fib_valuation(q, t).exponent % 2 for t in (m - 1, m - 2)):
            qs.add(q)
    return sorted(qs)


def _odd_order_search(m: int, fm: Factorization, fm1: Factorization, fm2: Factorization) -> GateResult:
    ps = fm.primes
    if not ps:
        return GateResult(
            "odd_order", INCONCLUSIVE, "no known prime divisor of F_m", missing=(f"a prime divisor of F_{m}",)
        )
    qs = _candidate_qs(m, fm1, fm2)
    for p in ps:
        for q in qs:
            if q != p and has_even_order(q, p):
                return odd_order_gate(m, p, q)
    missing = []
    if not fm.complete:
        missing.append(f"complete factorization of F_{m}")
    for t, f in ((m - 1, fm1), (m - 2, fm2)):
        if not f.complete:
            missing.append(f"complete factorization of F_{t}")
    return GateResult(
        "odd_order",
        INCONCLUSIVE,
        f"all {len(ps) * len(qs)} known (p, q) pairs have odd order",
        missing=tuple(missing),
    )


def order2_gate(
    m: int, fm_factors: Factorization, p_minus_1_factors: dict[int, Factorization] | None = None
) -> GateResult:
    """m = -1 (mod 12): 2 exactly divides F_{m-2}, so 2 must have odd order
    modulo every prime divisor of F_m."""
    _check_class(m)
    if m % 12 != 11:
        return _not_applicable("order2", "m is not -1 (mod 12)")
    _check_value(fm_factors, m, "order2_gate")
    nu2 = fib_valuation(2, m - 2).exponent
    if nu2 != 1:
        raise AssertionError(f"expected 2 to divide F_{m - 2} exactly once, got {nu2}")
    for p in fm_factors.primes:
        if p != 2 and has_even_order(2, p):
            cert = _order_witness(m, "order2", p, 2, m - 2, nu2)
            pm1 = (p_minus_1_factors or {}).get(p)
            if pm1 is not None and pm1.complete:
                cert.witnesses["order"] = mult_order(2, p, pm1)
                cert.witnesses["p_minus_1"] = pm1
            order = cert.witnesses.get("order", "even")
            return GateResult("order2", RULED_OUT, f"ord_{p}(2) = {order}", cert)
    if fm_factors.complete:
        return GateResult("order2", PASS, "2 has odd order modulo every prime divisor of F_m")
    return GateResult(
        "order2", INCONCLUSIVE, "2 has odd order modulo every known prime of F_m",
        missing=(f"complete factorization of F_{m}",),
    )


def development_verdict(m: int, source: FibFactorSource | None = None) -> Verdict:
    """Run the gates in fixed order, stopping at the first that rules F_m out.

    Factorizations are requested from ``source`` lazily, so cheap gates never
    trigger factoring.
    """
    _check_class(m)
    if m == 3:
        return Verdict(3, "TrivialExists", (), None)
    if m % 6 == 3:
        g = brc_gate(m)
        return Verdict(m, "NoDesignByBrc", (g,), g.certificate)
    source = source or FibFactorSource()
    reasons: list[GateResult] = []

    def done(g: GateResult) -> Verdict | None:
        reasons.append(g)
        if g.conclusive:
            return Verdict(m, RULED_OUT, tuple(reasons), g.certificate)
        return None

    for step in (
        lambda: congruence_gate(m),
        lambda: mod216_gate(m, source.get(m) if m % 216 in (37, 181) else None),
        lambda: prime_divisor_gate(m, source.get(m)),
        lambda: squarefree_shortcut(m, source.get(m - 1), source.get(m - 2)),
        lambda: _odd_order_search(m, source.get(m), source.get(m - 1), source.get(m - 2)),
        lambda: order2_gate(m, source.get(m)),
    ):
        verdict = done(step())
        if verdict is not None:
            return verdict
    missing = sorted({item for g in reasons for item in g.missing})
    if not missing:
        missing = ["no gate in the pipeline applies"]
    return Verdict(m, INCONCLUSIVE, tuple(reasons), None, tuple(missing))


class CertificateCheck:
    """Result of :func:`verify_certificate`; truthy iff every claim held."""

    def __init__(self, failures: list[str]):
        self.failures = failures

    def __bool__(self) -> bool:
        return not self.failures

    @property
    def ok(self) -> bool:
        return not self.failures

    def __repr__(self) -> str:
        return "CertificateCheck(ok)" if self.ok else f"CertificateCheck(failed: {self.failures})"


def _int(w: dict, key: str) -> int:
    return int(w[key])


def verify_certificate(cert: Certificate) -> CertificateCheck:
    """Re-derive every claim of ``cert`` from scratch."""
    fails: list[str] = []

    def claim(ok: bool, text: str) -> None:
        if not ok:
            fails.append(text)

    try:
        _verify(cert, claim)
    except (KeyError, TypeError, ValueError) as exc:
        fails.append(f"malformed certificate: {exc!r}")
    return CertificateCheck(fails)


def _verify(cert: Certificate, claim) -> None:
    m, w = cert.m, cert.witnesses
    claim(m >= 3 and m % 2 == 1, "m is odd and >= 3")
    if cert.gate == "brc_even":
        n, root = _int(w, "n"), _int(w, "isqrt_n")
        claim(m % 6 == 3 and m > 3, "m = 3 (mod 6), m > 3")
        claim(fib_mod(m, 2) == 0, "F_m is even, so v = F_m^2 is even")
        claim(n == fib(m - 1) * fib(m - 2), "n = F_(m-1) F_(m-2)")
        claim(root * root < n < (root + 1) ** 2, "n lies strictly between consecutive squares")
        return
    claim(m % 6 in (1, 5), "m = +-1 (mod 6)")
    if cert.gate == "congruence":
        r = fib_mod(m, 8)
        claim(r == _int(w, "fm_mod_8"), f"F_m mod 8 = {w['fm_mod_8']} (recomputed {r})")
        claim(r != 1, "F_m is not 1 (mod 8)")
        claim(m % 12 == _int(w, "m_mod_12"), "m mod 12 as recorded")
    elif cert.gate == "mod216":
        nu3 = _int(w, "nu3_fm1")
        claim(
            fib_mod(m - 1, 3**nu3) == 0 and fib_mod(m - 1, 3 ** (nu3 + 1)) != 0,
            f"3^{nu3} exactly divides F_(m-1)",
        )
        claim(nu3 % 2 == 1, "exponent of 3 is odd")
        claim(fib_mod(m, 3) == 2 == _int(w, "fm_mod_3"), "F_m = 2 (mod 3)")
        if "p" in w:
            p = _int(w, "p")
            claim(is_probable_prime(p) and fib_mod(m, p) == 0 and p % 3 == 2, f"{p} | F_m and {p} = 2 (mod 3)")
    elif cert.gate == "prime_divisor":
        p = _int(w, "p")
        claim(is_probable_prime(p), f"{p} is prime")
        claim(fib_mod(m, p) == 0, f"{p} divides F_m")
        claim(p % 8 != 1, f"{p} is not 1 (mod 8)")
    elif cert.gate == "squarefree_shortcut":
        t = _int(w, "index")
        primes = [int(p) for p in w["primes"]]
        claim(t in (m - 1, m - 2), "index is m-1 or m-2")
        ft = fib(t)
        prod_ = 1
        for p in primes:
            prod_ *= p
        claim(len(set(primes)) == len(primes), "listed primes are distinct")
        claim(all(is_probable_prime(p) for p in primes), "listed factors are prime")
        claim(prod_ == ft, f"product of distinct primes equals F_{t}, so F_{t} is square-free")
        fm = fib(m)
        claim(fm > 1, "F_m has a prime divisor")
        claim((ft * ft + 1) % fm == 0, f"F_{t}^2 = -1 (mod F_m)")
    elif cert.gate in ("odd_order", "order2"):
        p, q, t, e = _int(w, "p"), _int(w, "q"), _int(w, "index"), _int(w, "q_exponent")
        claim(is_probable_prime(p), f"{p} is prime")
        claim(fib_mod(m, p) == 0, f"{p} divides F_m")
        claim(is_probable_prime(q), f"{q} is prime")
        claim(t in (m - 1, m - 2), "index is m-1 or m-2")
        claim(e % 2 == 1, "exponent of q is odd")
        claim(
            fib_mod(t, q**e) == 0 and fib_mod(t, q ** (e + 1)) != 0,
            f"{q}^{e} exactly divides F_{t}",
        )
        if cert.gate == "order2":
            claim(m % 12 == 11 and q == 2, "order2 certificate is for q = 2 and m = -1 (mod 12)")
        claim(q % p != 0 and has_even_order(q, p), f"{q} has even order modulo {p}")
        if "order" in w:
            order = _int(w, "order")
            claim(order % 2 == 0, "recorded order is even")
            claim(pow(q, order, p) == 1, f"{q}^{order} = 1 (mod {p})")
            pm1 = w.get("p_minus_1")
            if pm1 is not None:
                f = pm1 if isinstance(pm1, Factorization) else Factorization.from_json(pm1)
                try:
                    f.check()
                    claim(f.value == p - 1 and f.complete, "p - 1 factorization is complete")
                    claim(mult_order(q, p, f) == order, f"ord_{p}({q}) = {order}")
                except InputError as exc:
                    claim(False, f"p - 1 factorization invalid: {exc}")
    else:
        claim(False, f"unknown gate {cert.gate!r}")


@dataclass
class ScanReport:
    verdicts: list[Verdict]
    checks: dict[int, CertificateCheck] = field(default_factory=dict)

    def summary(self) -> dict:
        by_status: dict[str, int] = {}
        by_gate: dict[str, int] = {}
        for v in self.verdicts:
            by_status[v.status] = by_status.get(v.status, 0) + 1
            if v.certificate is not None:
                by_gate[v.certificate.gate] = by_gate.get(v.certificate.gate, 0) + 1
        return {
            "count": len(self.verdicts),
            "by_status": dict(sorted(by_status.items())),
            "by_gate": dict(sorted(by_gate.items())),
            "certificates_verified": all(bool(c) for c in self.checks.values()),
            "inconclusive": [v.m for v in self.verdicts if v.status == INCONCLUSIVE],
            "scope": GROUP_SCOPE,
        }

    def to_json(self) -> dict:
        rows = []
        for v in self.verdicts:
            row = v.to_json()
            check = self.checks.get(v.m)
            row["certificate_verified"] = None if check is None else check.ok
            rows.append(row)
        return {"verdicts": rows, "summary": self.summary()}


def _scan_one(args) -> tuple[Verdict, CertificateCheck | None]:
    m, tables, effort = args
    verdict = development_verdict(m, FibFactorSource(tables, effort))
    check = verify_certificate(verdict.certificate) if verdict.certificate else None
    return verdict, check


def scan(
    m_values,
    tables: dict[int, Factorization] | None = None,
    effort: Effort | None = None,
    jobs: int = 1,
) -> ScanReport:
    """Verdict and certificate check for every odd m >= 3 in ``m_values``.

    With jobs > 1 the values are spread over a process pool; the report is
    always ordered by m.
    """
    from .numtheory import DEFAULT_EFFORT

    effort = effort or DEFAULT_EFFORT
    ms = sorted({m for m in m_values if m >= 3 and m % 2})
    if jobs > 1 and len(ms) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_one, [(m, tables, effort) for m in ms]))
    else:
        source = FibFactorSource(tables, effort)
        results = []
        for m in ms:
            verdict = development_verdict(m, source)
            check = verify_certificate(verdict.certificate) if verdict.certificate else None
            results.append((verdict, check))
    report = ScanReport([v for v, _ in results])
    report.checks = {v.m: c for v, c in results if c is not None}
    return report
