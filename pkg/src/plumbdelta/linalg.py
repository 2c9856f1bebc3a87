"""Exact linear algebra over the integers and rationals.

Everything here works on plain Python ``int`` and ``fractions.Fraction``;
there is no floating point anywhere.  Matrices are small (a plumbing graph
rarely has more than a few dozen vertices), so the cubic algorithms are fine.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionMismatch, SingularMatrix

Number = int | Fraction


def _norm(x) -> Number:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, int):
        return x
    raise TypeError(f"exact entries only, got {type(x).__name__}")


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


class ExactMatrix:
    """Square matrix with exact entries and write-once caches.

    The determinant, inverse, adjugate and symmetric-elimination pivots are
    computed on first use.  Instances are treated as immutable.
    """

    def __init__(self, rows: Iterable[Iterable[Number]]):
        self.rows = tuple(tuple(_norm(x) for x in r) for r in rows)
        self.n = len(self.rows)
        for r in self.rows:
            if len(r) != self.n:
                raise DimensionMismatch("matrix must be square")

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"ExactMatrix({[list(map(str, r)) for r in self.rows]})"

    def tolist(self):
        return [list(r) for r in self.rows]

    @property
    def is_integer(self) -> bool:
        return all(isinstance(x, int) for r in self.rows for x in r)

    @property
    def is_symmetric(self) -> bool:
        n = self.n
        return all(self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i))

    @property
    def trace(self) -> Number:
        return sum(self.rows[i][i] for i in range(self.n))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> "ExactMatrix":
        cols = rows if cols is None else cols
        return ExactMatrix([[self.rows[i][j] for j in cols] for i in rows])

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> list[list[Number]]:
        """Rectangular block as nested lists (not necessarily square)."""
        return [[self.rows[i][j] for j in cols] for i in rows]

    def __neg__(self):
        return ExactMatrix([[-x for x in r] for r in self.rows])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.n != self.n:
            raise DimensionMismatch("size mismatch in product")
        cols = list(zip(*other.rows))
        return ExactMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def matvec(self, v: Sequence[Number]) -> list[Number]:
        if len(v) != self.n:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.n}x{self.n} matrix")
        return [_norm(sum(a * b for a, b in zip(r, v))) for r in self.rows]

    def bilinear(self, x: Sequence[Number], y: Sequence[Number]) -> Number:
        """x^T A y."""
        if len(x) != self.n or len(y) != self.n:
            raise DimensionMismatch(f"vector length mismatch for {self.n}x{self.n} matrix")
        total = 0
        for xi, r in zip(x, self.rows):
            if xi:
                total += xi * sum(a * b for a, b in zip(r, y) if b)
        return _norm(total)

    @cached_property
    def det(self) -> Number:
        if self.is_integer:
            return bareiss_det(self.rows)
        return _fraction_det(self.rows)

    @cached_property
    def inverse(self) -> "ExactMatrix":
        if self.det == 0:
            raise SingularMatrix("matrix is singular")
        return ExactMatrix(_gauss_jordan_inverse(self.rows))

    @cached_property
    def adjugate(self) -> "ExactMatrix":
        d = self.det
        if d == 0:
            # rank-deficient case is never needed here
            raise SingularMatrix("adjugate of a singular matrix is not supported")
        return ExactMatrix([[d * x for x in r] for r in self.inverse.rows])

    @cached_property
    def ldl_pivots(self) -> tuple[Fraction, ...]:
        """Pivots of symmetric elimination in the natural order.

        Stops at the first zero pivot, which is included as the last entry;
        so the tuple is shorter than ``n`` exactly when a leading principal
        minor vanishes.
        """
        a = [[Fraction(x) for x in r] for r in self.rows]
        n = self.n
        pivots = []
        for k in range(n):
            p = a[k][k]
            pivots.append(p)
            if p == 0:
                break
            for i in range(k + 1, n):
                f = a[i][k] / p
                if f:
                    ri, rk = a[i], a[k]
                    for j in range(k + 1, n):
                        ri[j] -= f * rk[j]
        return tuple(pivots)

    def is_negative_definite(self) -> bool:
        piv = self.ldl_pivots
        return len(piv) == self.n and all(p < 0 for p in piv)

    def is_positive_definite(self) -> bool:
        piv = self.ldl_pivots
        return len(piv) == self.n and all(p > 0 for p in piv)


def _fraction_det(rows) -> Number:
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        p = a[k][k]
        det *= p
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return _norm(det)


def _gauss_jordan_inverse(rows):
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        rk = a[k] = [x / p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], rk)]
    return [[_norm(x) for x in r[n:]] for r in a]


def solve(m: ExactMatrix, b: Sequence[Number]) -> list[Number]:
    """Exact solution of ``m x = b``."""
    return m.inverse.matvec(b)


def smith_normal_form(a: Sequence[Sequence[int]]):
    """Smith normal form ``U a V = diag(d)`` of an integer matrix.

    Returns ``(d, U, U_inv, V)`` as nested lists, with ``U`` and ``V``
    unimodular, ``d`` nonnegative and each entry dividing the next.
    """
    A = [list(r) for r in a]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= q * r[dst]

    def add_col(dst, src, q):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            if best[0] != t:
                swap_rows(t, best[0])
            if best[1] != t:
                swap_cols(t, best[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
            for r in Ui:
                r[t] = -r[t]
    d = [A[i][i] for i in range(min(m, n))]
    return d, U, Ui, V
