"""Exact integer and rational linear algebra used by the number-field layer."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = s*a + t*b = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def det3(m: Sequence[Sequence]) -> Fraction | int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def inverse3(m: Sequence[Sequence]) -> list[list[Fraction]]:
    d = Fraction(det3(m))
    if d == 0:
        raise ZeroDivisionError("singular matrix")
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]]
            cof[i][j] = (-1) ** (i + j) * minor
    return [[Fraction(cof[j][i]) / d for j in range(3)] for i in range(3)]


def vec_mat(v: Sequence, m: Sequence[Sequence]) -> list:
    return [sum(v[i] * m[i][j] for i in range(len(v))) for j in range(len(m[0]))]


class RowHNF:
    """Incrementally maintained row-style Hermite normal form of a sublattice of Z^n.

    Rows are keyed by pivot column.  Once the lattice has full rank with
    determinant D, entries are reduced modulo D (D*Z^n lies in the lattice).
    """

    def __init__(self, n: int):
        self.n = n
        self.rows: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def determinant(self) -> int | None:
        if self.rank < self.n:
            return None
        d = 1
        for i in range(self.n):
            d *= self.rows[i][i]
        return d

    def add(self, v: Sequence[int]) -> None:
        v = [int(x) for x in v]
        D = self.determinant()
        if D is not None:
            v = [x % D for x in v]
        for i in range(self.n):
            if v[i] == 0:
                continue
            row = self.rows.get(i)
            if row is None:
                if v[i] < 0:
                    v = [-x for x in v]
                self.rows[i] = v
                break
            g, s, t = xgcd(row[i], v[i])
            a, b = row[i] // g, v[i] // g
            new_row = [s * x + t * y for x, y in zip(row, v)]
            v = [a * y - b * x for x, y in zip(row, v)]
            self.rows[i] = new_row
        D = self.determinant()
        if D is not None:
            self._reduce(D)

    def _reduce(self, D: int) -> None:
        for i in sorted(self.rows):
            row = self.rows[i]
            self.rows[i] = [row[j] if j == i else row[j] % D for j in range(self.n)]
        # off-diagonal reduction above pivots
        for i in range(self.n - 1, -1, -1):
            piv = self.rows[i][i]
            for k in range(i):
                r = self.rows[k]
                q = r[i] // piv
                if q:
                    self.rows[k] = [x - q * y for x, y in zip(r, self.rows[i])]

    def matrix(self) -> list[list[int]]:
        return [self.rows[i] for i in sorted(self.rows)]


def hnf(vectors: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    h = RowHNF(n)
    for v in vectors:
        h.add(v)
    if h.rank == n:
        h._reduce(h.determinant())
    return h.matrix()


def in_lattice(H: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership of v in the full-rank lattice with upper-triangular row basis H."""
    v = list(v)
    for i, row in enumerate(H):
        if v[i] % row[i]:
            return False
        q = v[i] // row[i]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return all(x == 0 for x in v)
