"""Hadamard-derived symmetric designs and their automorphisms.

Sylvester matrices are indexed by binary vectors stored as integers (bit k is
coordinate k), zero vector first, with entry (-1)^<i, j>. An invertible
binary matrix A acts on the Kronecker product S_d (x) H by sending row (i, a)
to (A i, a) and column (j, a) to (A^-T j, a), which preserves every entry
and fixes row and column 0.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import lcm
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import DomainError, InputError, ParseError

__all__ = [
    "HadamardMatrix",
    "IncidenceStructure",
    "Automorphism",
    "CycleType",
    "BoundReport",
    "EqualityReport",
    "ORDER3_MATRIX",
    "ORDER4_MATRIX",
    "sylvester_hadamard",
    "kronecker",
    "hadamard_to_design",
    "gl_automorphism",
    "kronecker_family",
    "verify_automorphism",
    "cycle_structure",
    "three_block_bound",
    "equality_case_check",
    "load_design",
    "store_design",
    "load_automorphism",
    "store_automorphism",
]

# Companion matrix of x^2 + x + 1: order 3 in GL(2, 2).
ORDER3_MATRIX = ((0, 1), (1, 1))
# I + N with N^2 != 0: a single 3x3 unipotent Jordan block, order 4 in GL(3, 2).
ORDER4_MATRIX = ((1, 1, 0), (0, 1, 1), (0, 0, 1))


@dataclass(frozen=True, eq=False)
class HadamardMatrix:
    entries: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=np.int64)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DomainError("Hadamard matrix must be square")
        if not np.all(np.abs(h) == 1):
            raise DomainError("Hadamard matrix entries must be +1 or -1")
        if not np.array_equal(h @ h.T, h.shape[0] * np.eye(h.shape[0], dtype=np.int64)):
            raise DomainError("H H^T != order * I")
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    @property
    def normalized(self) -> bool:
        return bool(np.all(self.entries[0] == 1) and np.all(self.entries[:, 0] == 1))

    def __eq__(self, other) -> bool:
        return isinstance(other, HadamardMatrix) and np.array_equal(self.entries, other.entries)


def sylvester_hadamard(d: int) -> HadamardMatrix:
    """Order 2^d Sylvester matrix; d = 0 gives the 1x1 matrix [1]."""
    if d < 0:
        raise DomainError(f"d must be nonnegative, got {d}")
    idx = np.arange(1 << d)
    parity = np.zeros((1 << d, 1 << d), dtype=np.int64)
    both = idx[:, None] & idx[None, :]
    for bit in range(d):
        parity ^= (both >> bit) & 1
    return HadamardMatrix(1 - 2 * parity)


def kronecker(h1: HadamardMatrix, h2: HadamardMatrix) -> HadamardMatrix:
    return HadamardMatrix(np.kron(h1.entries, h2.entries))


@dataclass(frozen=True)
class IncidenceStructure:
    """Points 0..v-1 and blocks as sorted tuples of points.

    ``params`` is the declared (v, k, lambda) of a symmetric design, checked on
    construction.
    """

    v: int
    blocks: tuple[tuple[int, ...], ...]
    params: tuple[int, int, int] | None = None

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        for b in blocks:
            if len(set(b)) != len(b) or any(x < 0 or x >= self.v for x in b):
                raise InputError(f"block {b} is not a set of points in 0..{self.v - 1}")
        if self.params is not None:
            self.validate()

    @property
    def k(self) -> int:
        return self.params[1]

    @property
    def lam(self) -> int:
        return self.params[2]

    @property
    def n(self) -> int:
        return self.params[1] - self.params[2]

    def incidence_matrix(self) -> np.ndarray:
        """Rows are blocks, columns points."""
        N = np.zeros((len(self.blocks), self.v), dtype=np.int64)
        for i, b in enumerate(self.blocks):
            N[i, list(b)] = 1
        return N

    def validate(self) -> None:
        v, k, lam = self.params
        if v != self.v or len(self.blocks) != v:
            raise InputError(f"expected {v} points and {v} blocks")
        for i, b in enumerate(self.blocks):
            if len(b) != k:
                raise InputError(f"block {i} has {len(b)} points, expected {k}")
        N = self.incidence_matrix()
        expected = (k - lam) * np.eye(v, dtype=np.int64) + lam * np.ones((v, v), dtype=np.int64)
        if not np.array_equal(N @ N.T, expected):
            raise InputError(f"N N^T != (k - lambda) I + lambda J for ({v},{k},{lam})")


def hadamard_to_design(h: HadamardMatrix) -> IncidenceStructure:
    """Delete row and column 0 of a normalized Hadamard matrix of order 4h.

    A point (column) lies in a block (row) where the entry is +1, giving a
    symmetric (4h-1, 2h-1, h-1) design.
    """
    size = h.order
    if not h.normalized:
        raise DomainError("Hadamard matrix is not normalized")
    if size < 4 or size % 4:
        raise DomainError(f"need order divisible by 4 and >= 4, got {size}")
    quarter = size // 4
    core = h.entries[1:, 1:]
    blocks = tuple(tuple(int(x) for x in np.flatnonzero(row == 1)) for row in core)
    return IncidenceStructure(size - 1, blocks, (4 * quarter - 1, 2 * quarter - 1, quarter - 1))


@dataclass(frozen=True)
class Automorphism:
    point_perm: tuple[int, ...]
    block_perm: tuple[int, ...]

    def __post_init__(self):
        for name in ("point_perm", "block_perm"):
            perm = tuple(int(x) for x in getattr(self, name))
            if sorted(perm) != list(range(len(perm))):
                raise InputError(f"{name} is not a permutation")
            object.__setattr__(self, name, perm)

    @property
    def order(self) -> int:
        return lcm(*_cycle_lengths(self.point_perm), *_cycle_lengths(self.block_perm))

    @property
    def fixed_points(self) -> list[int]:
        return [x for x, y in enumerate(self.point_perm) if x == y]

    @classmethod
    def identity(cls, v: int) -> "Automorphism":
        return cls(tuple(range(v)), tuple(range(v)))


def _cycles(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = perm[x]
        out.append(cyc)
    return out


def _cycle_lengths(perm: Sequence[int]) -> list[int]:
    return [len(c) for c in _cycles(perm)] or [1]


def _gf2_apply(A: Sequence[Sequence[int]], x: int) -> int:
    out = 0
    for r, row in enumerate(A):
        bit = 0
        for c, a in enumerate(row):
            bit ^= a & (x >> c) & 1
        out |= bit << r
    return out


def _gf2_inverse(A: Sequence[Sequence[int]]) -> list[list[int]]:
    d = len(A)
    M = [[int(a) & 1 for a in row] + [int(r == c) for c in range(d)] for r, row in enumerate(A)]
    for col in range(d):
        pivot = next((r for r in range(col, d) if M[r][col]), None)
        if pivot is None:
            raise DomainError("matrix is singular over GF(2)")
        M[col], M[pivot] = M[pivot], M[col]
        for r in range(d):
            if r != col and M[r][col]:
                M[r] = [a ^ b for a, b in zip(M[r], M[col])]
    return [row[d:] for row in M]


def gl_automorphism(A: Sequence[Sequence[int]], partner: HadamardMatrix) -> Automorphism:
    """Automorphism of hadamard_to_design(sylvester_hadamard(d) (x) partner).

    Row (i, a) has index i * h + a. After deleting row and column 0, point and
    block indices shift down by one.
    """
    d = len(A)
    if any(len(row) != d for row in A):
        raise DomainError("A must be square")
    inv_t = [list(col) for col in zip(*_gf2_inverse(A))]
    h = partner.order
    size = (1 << d) * h

    def perm(mat) -> tuple[int, ...]:
        images = []
        for idx in range(1, size):
            i, a = divmod(idx, h)
            images.append(_gf2_apply(mat, i) * h + a - 1)
        return tuple(images)

    return Automorphism(point_perm=perm(inv_t), block_perm=perm(A))


def kronecker_family(h: int, kind: str) -> tuple[IncidenceStructure, Automorphism]:
    """Design and automorphism from S_d (x) S_log2(h) for kind "order3" or "order4".

    order3 uses the order-4 Sylvester matrix and yields a (4h-1, 2h-1, h-1)
    design with h - 1 fixed points; order4 uses the order-8 matrix and yields
    (8h-1, 4h-1, 2h-1) with 2h - 1 fixed points.
    """
    if h < 1 or h & (h - 1):
        raise DomainError(f"partner order must be a power of 2, got {h}")
    A = {"order3": ORDER3_MATRIX, "order4": ORDER4_MATRIX}.get(kind)
    if A is None:
        raise DomainError(f"unknown construction {kind!r}")
    partner = sylvester_hadamard(h.bit_length() - 1)
    design = hadamard_to_design(kronecker(sylvester_hadamard(len(A)), partner))
    return design, gl_automorphism(A, partner)


def verify_automorphism(D: IncidenceStructure, a: Automorphism) -> bool:
    if len(a.point_perm) != D.v or len(a.block_perm) != len(D.blocks):
        raise InputError("permutation sizes do not match the design")
    return all(
        tuple(sorted(a.point_perm[x] for x in b)) == D.blocks[a.block_perm[i]]
        for i, b in enumerate(D.blocks)
    )


@dataclass(frozen=True)
class CycleType:
    points: tuple[int, ...]
    blocks: tuple[int, ...]

    @property
    def match(self) -> bool:
        return self.points == self.blocks

    def counts(self) -> dict[int, int]:
        return dict(sorted(Counter(self.points).items()))


def cycle_structure(a: Automorphism) -> CycleType:
    """Sorted cycle lengths on points and on blocks.

    For a genuine automorphism of a symmetric design the two agree; a mismatch
    raises InputError.
    """
    ct = CycleType(tuple(sorted(_cycle_lengths(a.point_perm))), tuple(sorted(_cycle_lengths(a.block_perm))))
    if not ct.match:
        raise InputError(f"point cycle type {ct.points} differs from block cycle type {ct.blocks}")
    return ct


@dataclass(frozen=True)
class BoundReport:
    f: int
    bound: int
    equality: bool
    l: int
    f0: int

    @property
    def holds(self) -> bool:
        return self.f <= self.bound


def _longest_block(D: IncidenceStructure, a: Automorphism) -> list[int]:
    return max(_cycles(a.block_perm), key=len)


def three_block_bound(D: IncidenceStructure, a: Automorphism) -> BoundReport:
    """Fixed points f against v - 3n for an automorphism of order >= 3."""
    if D.params is None:
        raise DomainError("design parameters must be declared")
    if not verify_automorphism(D, a):
        raise InputError("permutation pair is not an automorphism of the design")
    if a.order < 3:
        raise DomainError(f"the bound needs automorphism order >= 3, got {a.order}")
    return _bound(D, a)


def _bound(D: IncidenceStructure, a: Automorphism) -> BoundReport:
    fixed = set(a.fixed_points)
    cycle = _longest_block(D, a)
    bound = D.v - 3 * D.n
    f0 = len(fixed & set(D.blocks[cycle[0]]))
    return BoundReport(len(fixed), bound, len(fixed) == bound, len(cycle), f0)


@dataclass(frozen=True)
class EqualityReport:
    l: int
    order: int
    f0: int
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]


def equality_case_check(D: IncidenceStructure, a: Automorphism) -> EqualityReport:
    """Check the consequences of f = v - 3n for an automorphism.

    The permutation pair is not re-verified here, so a tampered pair is
    reported through failing checks rather than rejected up front.
    """
    if D.params is None:
        raise DomainError("design parameters must be declared")
    rep = _bound(D, a)
    if not rep.equality:
        raise DomainError(f"f = {rep.f} does not meet the bound {rep.bound}")
    k, lam, n = D.k, D.lam, D.n
    cycle = _longest_block(D, a)
    base = set(D.blocks[cycle[0]])
    fixed = set(a.fixed_points)
    point_cycles = [c for c in _cycles(a.point_perm) if len(c) > 1]
    checks: dict[str, bool] = {
        "longest cycle l <= 4": rep.l <= 4,
        "order equals l": a.order == rep.l,
        "no nontrivial cycle length coprime to l": all(
            _gcd(len(c), rep.l) > 1 for c in point_cycles
        ),
        "every nontrivial point orbit meets B": all(base & set(c) for c in point_cycles),
        "B contains no whole nontrivial orbit": all(not set(c) <= base for c in point_cycles),
    }
    if rep.l >= 3:
        b1, b2, b3 = (set(D.blocks[i]) for i in cycle[:3])
        union, inter = b1 | b2 | b3, b1 & b2 & b3
        checks["|B1 u B2 u B3| = 3k - 3lambda + |B1 n B2 n B3|"] = len(union) == 3 * k - 3 * lam + len(inter)
        checks["B1 n B2 n B3 is the fixed part of B"] = inter == (fixed & base)
    if rep.l >= 4:
        checks["f0 <= k - 3n/2"] = 2 * rep.f0 <= 2 * k - 3 * n
    return EqualityReport(rep.l, a.order, rep.f0, checks)


def _gcd(x: int, y: int) -> int:
    from math import gcd

    return gcd(x, y)


def _ints(text: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ParseError(f"expected integers, got {text!r}", lineno) from None


def load_design(source: IO[str] | Iterable[str]) -> IncidenceStructure:
    """Read ``v k lambda`` then one line of 0-based sorted points per block."""
    lines = [(i, ln.strip()) for i, ln in enumerate(source, start=1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty design file", 1)
    lineno, header = lines[0]
    head = _ints(header, lineno)
    if len(head) != 3:
        raise ParseError("header must be 'v k lambda'", lineno)
    v, k, lam = head
    blocks = []
    for lineno, text in lines[1:]:
        pts = _ints(text, lineno)
        if pts != sorted(set(pts)):
            raise ParseError("block points must be distinct and ascending", lineno)
        if any(p < 0 or p >= v for p in pts):
            raise ParseError(f"point outside 0..{v - 1}", lineno)
        if len(pts) != k:
            raise ParseError(f"block has {len(pts)} points, declared k = {k}", lineno)
        blocks.append(tuple(pts))
    if len(blocks) != v:
        raise ParseError(f"expected {v} blocks, found {len(blocks)}", lines[-1][0])
    return IncidenceStructure(v, tuple(blocks), (v, k, lam))


def store_design(D: IncidenceStructure, sink: IO[str]) -> None:
    v, k, lam = D.params
    sink.write(f"{v} {k} {lam}\n")
    for b in D.blocks:
        sink.write(" ".join(map(str, b)) + "\n")


def _parse_perm(text: str, lineno: int) -> tuple[int, ...]:
    if "->" in text:
        pairs = {}
        for tok in text.replace(" -> ", "->").split():
            try:
                src, dst = (int(x) for x in tok.split("->"))
            except ValueError:
                raise ParseError(f"bad mapping {tok!r}", lineno) from None
            pairs[src] = dst
        if sorted(pairs) != list(range(len(pairs))):
            raise ParseError("mapping must cover 0..n-1 once each", lineno)
        return tuple(pairs[i] for i in range(len(pairs)))
    return tuple(_ints(text, lineno))


def load_automorphism(source: IO[str] | Iterable[str]) -> Automorphism:
    """Two lines, points then blocks; each lists img[0] img[1] ... or i->img[i] pairs."""
    lines = [(i, ln.strip()) for i, ln in enumerate(source, start=1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if len(lines) != 2:
        raise ParseError(f"expected 2 permutation lines, found {len(lines)}", lines[-1][0] if lines else 1)
    perms = [_parse_perm(text, i) for i, text in lines]
    try:
        return Automorphism(perms[0], perms[1])
    except InputError as exc:
        raise ParseError(str(exc), lines[0][0]) from None


def store_automorphism(a: Automorphism, sink: IO[str]) -> None:
    sink.write(" ".join(map(str, a.point_perm)) + "\n")
    sink.write(" ".join(map(str, a.block_perm)) + "\n")
