"""Lines on the design variety.

The variety D in R^5 (coordinates v, b, r, k, lambda) is cut out by
vr = bk and r(k - 1) = lambda(v - 1). A line p0 + t*d lies in D iff, for both
quadratics, the t and t^2 coefficients vanish: two linear conditions on d
(gradients at p0) and two quadratic ones (pure quadratic parts at d). The
linear conditions leave a projective plane of directions where the quadratic
ones are conics; their intersection is computed with an exact resultant.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import mpmath
import sympy

from .errors import DomainError

__all__ = [
    "DesignPoint",
    "VarietyLine",
    "PLANES",
    "SAMPLE_TS",
    "RESIDUAL_LIMIT",
    "on_variety",
    "q_value",
    "plane_membership",
    "is_degenerate",
    "replication_line",
    "lines_through",
    "fisher_factor",
    "classify_line",
    "relation_along_line",
    "random_nondegenerate_points",
]

COORDS = ("v", "b", "r", "k", "lam")
SAMPLE_TS = (-2, -1, 1, 2, 5)
RESIDUAL_LIMIT = 1e-9


@dataclass(frozen=True)
class DesignPoint:
    v: Fraction
    b: Fraction
    r: Fraction
    k: Fraction
    lam: Fraction

    def __post_init__(self):
        for name in COORDS:
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def of(cls, coords: Sequence) -> "DesignPoint":
        return cls(*(Fraction(c) for c in coords))

    def coords(self) -> tuple[Fraction, ...]:
        return (self.v, self.b, self.r, self.k, self.lam)


def _g1(v, b, r, k, lam):
    return v * r - b * k


def _g2(v, b, r, k, lam):
    return r * (k - 1) - lam * (v - 1)


def on_variety(p: DesignPoint) -> bool:
    c = p.coords()
    return _g1(*c) == 0 and _g2(*c) == 0


def q_value(p: DesignPoint) -> Fraction:
    return p.r * p.r - p.b * p.lam


# Each plane: three affine equations sum(coef * coord) = rhs over (v, b, r, k, lam).
PLANES: dict[str, tuple[tuple[tuple[int, ...], int], ...]] = {
    "Pi0": (((0, 1, 0, 0, 0), 0), ((0, 0, 1, 0, 0), 0), ((0, 0, 0, 0, 1), 0)),
    "Pi1": (((0, 1, 0, 0, 0), 0), ((0, 0, 1, 0, 0), 0), ((1, 0, 0, 0, 0), 1)),
    "Pi2": (((0, 0, 1, 0, 0), 0), ((0, 0, 0, 0, 1), 0), ((0, 0, 0, 1, 0), 0)),
    "Pi3": (((0, 1, -1, 0, 0), 0), ((0, 0, 1, 0, -1), 0), ((1, 0, 0, -1, 0), 0)),
    "Pi4": (((1, 0, 0, 0, 0), 0), ((0, 0, 0, 1, 0), 0), ((0, 0, 1, 0, -1), 0)),
    "Pi5": (((1, 0, 0, 0, 0), 1), ((0, 0, 0, 1, 0), 1), ((0, 1, -1, 0, 0), 0)),
    "Pi6": (((1, 0, 0, 0, 0), 1), ((0, 0, 0, 1, 0), 0), ((0, 0, 1, 0, 0), 0)),
}


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def plane_membership(p: DesignPoint) -> set[str]:
    c = p.coords()
    return {name for name, eqs in PLANES.items() if all(_dot(coef, c) == rhs for coef, rhs in eqs)}


def is_degenerate(p: DesignPoint) -> bool:
    return bool(plane_membership(p))


@dataclass(frozen=True)
class VarietyLine:
    """base + t * direction. Exact directions are primitive integer vectors;
    numeric ones are mpmath values scaled to max-norm 1."""

    base: DesignPoint
    direction: tuple
    exact: bool = True
    multiplicity: int = 1
    residual: float = 0.0

    def point_at(self, t):
        return tuple(b + t * d for b, d in zip(self.base.coords(), self.direction))

    def contains_identically(self) -> bool:
        if self.exact:
            return all(_g1(*self.point_at(t)) == 0 and _g2(*self.point_at(t)) == 0 for t in SAMPLE_TS)
        return _residual(self.base.coords(), self.direction) < RESIDUAL_LIMIT


def _residual(base, d) -> float:
    worst = 0
    for t in SAMPLE_TS:
        pt = [mpmath.mpf(b.numerator) / b.denominator + t * x for b, x in zip(base, d)]
        worst = max(worst, abs(_g1(*pt)), abs(_g2(*pt)))
    return float(worst)


def _primitive(d: Sequence[Fraction]) -> tuple[int, ...]:
    den = lcm(*(x.denominator for x in d))
    ints = [int(x * den) for x in d]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return tuple(-x for x in ints) if lead < 0 else tuple(ints)


def _check_base(p0: DesignPoint) -> None:
    if not on_variety(p0):
        raise DomainError(f"{p0.coords()} is not on the design variety")


def replication_line(p0: DesignPoint) -> VarietyLine:
    _check_base(p0)
    d = (Fraction(0), p0.b, p0.r, Fraction(0), p0.lam)
    if not any(d):
        raise DomainError("replication direction is zero at this point")
    line = VarietyLine(p0, tuple(Fraction(x) for x in _primitive(d)))
    assert line.contains_identically()
    return line


def _gradients(p0: DesignPoint) -> list[list[Fraction]]:
    v, b, r, k, lam = p0.coords()
    return [[r, -k, v, -b, Fraction(0)], [-lam, Fraction(0), k - 1, r, 1 - v]]


# Pure quadratic parts as symmetric matrices: d^T M d.
_H = Fraction(1, 2)
_M1 = [[0, 0, _H, 0, 0], [0, 0, 0, -_H, 0], [_H, 0, 0, 0, 0], [0, -_H, 0, 0, 0], [0, 0, 0, 0, 0]]
_M2 = [[0, 0, 0, 0, -_H], [0, 0, 0, 0, 0], [0, 0, 0, _H, 0], [0, 0, _H, 0, 0], [-_H, 0, 0, 0, 0]]


def _kernel(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * c for a, c in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(vec)
    return basis


def _matmul(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _transpose(a):
    return [list(r) for r in zip(*a)]


def _det3(m) -> Fraction:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


# Univariate polynomials over Fraction: coefficient lists, lowest degree first.
def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _pneg(p):
    return [-x for x in p]


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _conic_in_z(S):
    """C(x, 1, z) = a2 z^2 + a1(x) z + a0(x)."""
    a2 = [S[2][2]]
    a1 = [2 * S[1][2], 2 * S[0][2]]
    a0 = [S[1][1], 2 * S[0][1], S[0][0]]
    return a2, a1, a0


def _resultant(c1, c2):
    a2, a1, a0 = c1
    b2, b1, b0 = c2
    s = _padd(_pmul(a2, b0), _pneg(_pmul(a0, b2)))
    t = _padd(_pmul(a2, b1), _pneg(_pmul(a1, b2)))
    u = _padd(_pmul(a1, b0), _pneg(_pmul(a0, b1)))
    return _padd(_pmul(s, s), _pneg(_pmul(t, u)))


def _transforms():
    yield [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    rng = random.Random(20240817)
    while True:
        T = [[Fraction(rng.randint(-4, 4)) for _ in range(3)] for _ in range(3)]
        if _det3(T) != 0:
            yield T


def _roots(res: list[Fraction], dps: int):
    """(root, multiplicity, exact) for the real roots of the quartic."""
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(res)], x, domain="QQ")
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        if fac.degree() == 1:
            c1, c0 = fac.all_coeffs()
            root = -Fraction(int(c0.p), int(c0.q)) / Fraction(int(c1.p), int(c1.q))
            out.append((root, mult, True))
            continue
        coeffs = [mpmath.mpf(sympy.Rational(c).p) / sympy.Rational(c).q for c in fac.all_coeffs()]
        with mpmath.workdps(dps):
            for z in mpmath.polyroots(coeffs, maxsteps=200, extraprec=dps):
                if abs(mpmath.im(z)) < mpmath.mpf(10) ** (-dps // 2):
                    out.append((mpmath.re(z), mult, False))
    return out


def lines_through(p0: DesignPoint, *, max_dps: int = 400) -> list[VarietyLine]:
    """All real lines in D through the nondegenerate point p0.

    Rational directions are exact; irrational ones are refined numerically,
    doubling precision until the residual at the sample parameters drops below
    RESIDUAL_LIMIT. Repeated intersections are returned once with their
    multiplicity.
    """
    _check_base(p0)
    if is_degenerate(p0):
        raise DomainError(f"{p0.coords()} lies on {sorted(plane_membership(p0))}; base must be nondegenerate")
    basis = _kernel(_gradients(p0), 5)
    if len(basis) != 3:
        raise DomainError("gradients of the two quadratics are dependent at this point")
    E = _transpose(basis)  # 5 x 3
    S1 = _matmul(_matmul(basis, _M1), E)
    S2 = _matmul(_matmul(basis, _M2), E)
    for T in _transforms():
        Tt = _transpose(T)
        c1 = _conic_in_z(_matmul(_matmul(Tt, S1), T))
        c2 = _conic_in_z(_matmul(_matmul(Tt, S2), T))
        if c1[0][0] == 0 or c2[0][0] == 0:
            continue
        res = _resultant(c1, c2)
        while res and res[-1] == 0:
            res.pop()
        if len(res) != 5:
            continue  # intersection at y = 0 or a common component; change coordinates
        lines = _lines_from_roots(p0, res, c1, c2, T, E, max_dps)
        if lines is not None:
            return lines
    raise AssertionError("unreachable")


def _lines_from_roots(p0, res, c1, c2, T, E, max_dps):
    dps = 50
    while True:
        roots = _roots(res, dps)
        lines = []
        ok = True
        for x0, mult, exact in roots:
            a2, a1, a0 = (_peval(p, x0) for p in c1)
            b2, b1, b0 = (_peval(p, x0) for p in c2)
            den = b2 * a1 - a2 * b1
            if den == 0 if exact else abs(den) < mpmath.mpf(10) ** (-dps // 2):
                return None  # two intersections share this x; change coordinates
            z = -(b2 * a0 - a2 * b0) / den
            u = _matmul(T, [[x0], [1], [z]])
            d = [sum(E[i][j] * u[j][0] for j in range(3)) for i in range(5)]
            if exact:
                line = VarietyLine(p0, tuple(Fraction(x) for x in _primitive(d)), True, mult)
                assert line.contains_identically()
            else:
                scale = max(d, key=abs)
                d = tuple(x / scale for x in d)
                resid = _residual(p0.coords(), d)
                if resid >= RESIDUAL_LIMIT:
                    ok = False
                    break
                line = VarietyLine(p0, d, False, mult, resid)
            lines.append(line)
        if ok:
            return sorted(lines, key=_line_key)
        if dps >= max_dps:
            raise ArithmeticError(f"could not refine irrational directions below {RESIDUAL_LIMIT}")
        dps *= 2


def _line_key(line: VarietyLine):
    return (not line.exact, tuple(float(x) for x in line.direction))


def fisher_factor(p: DesignPoint) -> Fraction:
    if p.v == 0:
        raise DomainError("Fisher factor b/v is undefined at v = 0")
    return p.b / p.v


def _is_zero(x, exact: bool) -> bool:
    return x == 0 if exact else abs(x) < RESIDUAL_LIMIT


def _meets_plane(line: VarietyLine, plane: str) -> bool:
    base, d = line.base.coords(), line.direction
    t = None
    for coef, rhs in PLANES[plane]:
        slope = _dot(coef, d)
        offset = rhs - _dot(coef, base)
        if _is_zero(slope, line.exact):
            if not _is_zero(offset, line.exact):
                return False
            continue
        here = offset / slope
        if t is not None and not _is_zero(here - t, line.exact):
            return False
        t = here
    return True


def classify_line(line: VarietyLine) -> tuple[str, str | None]:
    """Return (tag, subtag).

    tag is "replication" when v and k are constant, "fisher" when b/v stays at
    the base's Fisher factor (subtag "F1" if the line meets Pi6, else "F0"),
    otherwise "p_line".
    """
    d, ex = line.direction, line.exact
    if _is_zero(d[0], ex) and _is_zero(d[3], ex):
        return "replication", None
    if line.base.v != 0:
        f = fisher_factor(line.base)
        if _is_zero(d[1] - f * d[0], ex):
            return "fisher", "F1" if _meets_plane(line, "Pi6") else "F0"
    return "p_line", None


def relation_along_line(line: VarietyLine, coeffs: Sequence) -> bool:
    """Does V v + B b + R r + K k + L lam = A hold at every point of the line?"""
    *lin, rhs = coeffs
    at_base = _dot(lin, line.base.coords()) - rhs
    slope = _dot(lin, line.direction)
    return _is_zero(at_base, True) and _is_zero(slope, line.exact)


def random_nondegenerate_points(count: int, seed: int = 1) -> list[DesignPoint]:
    """Rational points of D from random integer (v, r, k): b = vr/k, lam = r(k-1)/(v-1)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        v, r, k = rng.randint(-30, 60), rng.randint(-30, 60), rng.randint(-30, 60)
        if k == 0 or v == 1:
            continue
        p = DesignPoint(v, Fraction(v * r, k), r, k, Fraction(r * (k - 1), v - 1))
        if is_degenerate(p) or len(_kernel(_gradients(p), 5)) != 3:
            continue
        out.append(p)
    return out
