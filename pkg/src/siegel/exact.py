"""Exact rational/integer linear algebra.

Everything here works over Python's arbitrary-size ``int`` and
:class:`fractions.Fraction`; there is deliberately no floating point.
The two normal forms follow one fixed convention so fixtures are bit-exact:

* ``hnf`` is column-style: ``H = m @ U`` with ``U`` unimodular, pivots
  positive, and in each pivot row the entries left of the pivot reduced
  into ``[0, pivot)``.
* ``snf`` returns ``left @ m @ right = diag`` with a divisibility chain
  ``d1 | d2 | ...`` and non-negative divisors (zeros last).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import InternalCheckError, PreconditionError

Rational = Fraction  # stored in lowest terms with positive denominator by construction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise PreconditionError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable exact matrix of rationals, row-major."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise PreconditionError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise PreconditionError("entry count does not match dimensions")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        r = len(rows)
        if r == 0:
            raise PreconditionError("matrix needs at least one row")
        c = len(rows[0])
        if any(len(row) != c for row in rows):
            raise PreconditionError("ragged rows")
        return cls(r, c, tuple(_frac(x) for row in rows for x in row))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, tuple(Fraction(1 if i == j else 0) for i in range(n) for j in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def diagonal(cls, diag: Sequence) -> "RationalMatrix":
        n = len(diag)
        return cls.from_rows([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])

    # -- access ------------------------------------------------------------

    def __getitem__(self, rc) -> Fraction:
        i, j = rc
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def block(self, r0: int, c0: int, h: int, w: int) -> "RationalMatrix":
        return RationalMatrix.from_rows(
            [[self[r0 + i, c0 + j] for j in range(w)] for i in range(h)]
        )

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    # -- arithmetic ---------------------------------------------------------

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise PreconditionError("dimension mismatch in matrix product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other.entries[k * other.cols + j] for k in range(self.cols)))
        return RationalMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise PreconditionError("dimension mismatch in matrix sum")
        return RationalMatrix(
            self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> "RationalMatrix":
        c = _frac(c)
        return RationalMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            self.cols, self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise PreconditionError("determinant of a non-square matrix")
        n = self.rows
        a = [list(self.row(i)) for i in range(n)]
        det = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            det *= a[c][c]
            inv = 1 / a[c][c]
            for r in range(c + 1, n):
                if a[r][c] != 0:
                    f = a[r][c] * inv
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def inverse(self) -> "RationalMatrix":
        if self.rows != self.cols:
            raise PreconditionError("inverse of a non-square matrix")
        n = self.rows
        a = [list(self.row(i)) + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] != 0), None)
            if piv is None:
                raise PreconditionError("matrix is singular")
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for r in range(n):
                if r != c and a[r][c] != 0:
                    f = a[r][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return RationalMatrix.from_rows([row[n:] for row in a])

    # -- predicates ----------------------------------------------------------

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == RationalMatrix.identity(self.rows)

    def to_int_rows(self) -> list:
        if not self.is_integral():
            raise PreconditionError("matrix has non-integer entries")
        return [[int(e) for e in self.row(i)] for i in range(self.rows)]

    # -- serialization --------------------------------------------------------
    # The shared wire format: arrays of arrays of exact "p/q" strings.

    def to_json_obj(self) -> list:
        return [[str(e) for e in self.row(i)] for i in range(self.rows)]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "RationalMatrix":
        if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
            raise PreconditionError("matrix JSON must be a non-empty array of arrays")
        return cls.from_rows(obj)

    @classmethod
    def from_json(cls, text: str) -> "RationalMatrix":
        return cls.from_json_obj(json.loads(text))


# ---------------------------------------------------------------------------
# Hermite normal form (column style)
# ---------------------------------------------------------------------------


def hnf(m: Sequence[Sequence[int]]):
    """Column Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``H = m @ U``; the column
    lattice of ``H`` equals the column lattice of ``m``.  Zero matrices come
    back unchanged with ``U`` the identity.
    """
    rows = len(m)
    cols = len(m[0])
    H = [[int(x) for x in row] for row in m]
    U = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def add_col(dst, src, q):
        for r in range(rows):
            H[r][dst] -= q * H[r][src]
        for r in range(cols):
            U[r][dst] -= q * U[r][src]

    def swap_cols(a, b):
        for r in range(rows):
            H[r][a], H[r][b] = H[r][b], H[r][a]
        for r in range(cols):
            U[r][a], U[r][b] = U[r][b], U[r][a]

    def negate_col(a):
        for r in range(rows):
            H[r][a] = -H[r][a]
        for r in range(cols):
            U[r][a] = -U[r][a]

    pivot = 0
    for r in range(rows):
        if pivot >= cols:
            break
        while True:
            nz = [j for j in range(pivot, cols) if H[r][j] != 0]
            if len(nz) <= 1:
                break
            jmin = min(nz, key=lambda j: abs(H[r][j]))
            for j in nz:
                if j != jmin:
                    add_col(j, jmin, H[r][j] // H[r][jmin])
        if not nz:
            continue
        j0 = nz[0]
        if j0 != pivot:
            swap_cols(j0, pivot)
        if H[r][pivot] < 0:
            negate_col(pivot)
        for j in range(pivot):
            q = H[r][j] // H[r][pivot]
            if q:
                add_col(j, pivot, q)
        pivot += 1
    return H, U


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """``left @ input @ right = diag(diagonal)`` with unimodular transforms.

    ``diagonal`` is the chain of elementary divisors: non-negative, each
    dividing the next, zeros at the end.
    """

    diagonal: tuple
    left: tuple
    right: tuple

    def left_matrix(self) -> RationalMatrix:
        return RationalMatrix.from_rows([list(r) for r in self.left])

    def right_matrix(self) -> RationalMatrix:
        return RationalMatrix.from_rows([list(r) for r in self.right])


def snf(m: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form with transforms, over arbitrary-size integers."""
    rows = len(m)
    cols = len(m[0])
    A = [[int(x) for x in row] for row in m]
    L = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    R = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_op(dst, src, q):  # row dst -= q * row src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        L[dst] = [a - q * b for a, b in zip(L[dst], L[src])]

    def col_op(dst, src, q):
        for r in range(rows):
            A[r][dst] -= q * A[r][src]
        for r in range(cols):
            R[r][dst] -= q * R[r][src]

    def swap_rows(a, b):
        A[a], A[b] = A[b], A[a]
        L[a], L[b] = L[b], L[a]

    def swap_cols(a, b):
        for r in range(rows):
            A[r][a], A[r][b] = A[r][b], A[r][a]
        for r in range(cols):
            R[r][a], R[r][b] = R[r][b], R[r][a]

    k = min(rows, cols)
    for t in range(k):
        while True:
            # smallest nonzero entry of the working submatrix becomes the pivot
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            if best[0] != t:
                swap_rows(t, best[0])
            if best[1] != t:
                swap_cols(t, best[1])
            dirty = False
            for i in range(t + 1, rows):
                if A[i][t] != 0:
                    row_op(i, t, A[i][t] // A[t][t])
                    if A[i][t] != 0:
                        dirty = True
            for j in range(t + 1, cols):
                if A[t][j] != 0:
                    col_op(j, t, A[t][j] // A[t][t])
                    if A[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            # enforce divisibility: pivot must divide the remaining block
            witness = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if A[i][j] % A[t][t] != 0:
                        witness = i
                        break
                if witness is not None:
                    break
            if witness is None:
                break
            row_op(t, witness, -1)  # pulls a non-divisible entry into row t
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            L[t] = [-x for x in L[t]]

    diag = tuple(A[i][i] for i in range(k))
    for i in range(k - 1):
        if diag[i] == 0:
            if diag[i + 1] != 0:
                raise InternalCheckError("smith divisibility chain violated")
        elif diag[i + 1] % diag[i] != 0:
            raise InternalCheckError("smith divisibility chain violated")
    return SmithDecomposition(diag, tuple(tuple(r) for r in L), tuple(tuple(r) for r in R))


def integer_solve(a: Sequence[Sequence[int]], b: Sequence[int]):
    """One integer solution ``x`` of ``a @ x = b`` or ``None`` if there is none."""
    rows = len(a)
    cols = len(a[0])
    if len(b) != rows:
        raise PreconditionError("dimension mismatch in integer solve")
    dec = snf(a)
    c = [sum(dec.left[i][j] * b[j] for j in range(rows)) for i in range(rows)]
    y = [0] * cols
    for i in range(rows):
        d = dec.diagonal[i] if i < len(dec.diagonal) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            if i < cols:
                y[i] = c[i] // d
    return [sum(dec.right[i][j] * y[j] for j in range(cols)) for i in range(cols)]


def column_lattices_equal(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    """Exact column-lattice equality, by integer solvability in both directions."""
    cols_a = len(a[0])
    cols_b = len(b[0])
    for j in range(cols_b):
        if integer_solve(a, [row[j] for row in b]) is None:
            return False
    for j in range(cols_a):
        if integer_solve(b, [row[j] for row in a]) is None:
            return False
    return True


# ---------------------------------------------------------------------------
# Symplectic predicate
# ---------------------------------------------------------------------------


def is_symplectic(m: RationalMatrix, form: RationalMatrix) -> bool:
    """True iff ``m.T @ form @ m == form`` exactly.

    ``form`` must be a square antisymmetric matrix of the same size as ``m``.
    """
    if m.rows != m.cols or form.rows != form.cols or m.rows != form.rows:
        raise PreconditionError("matrix and form must be square of equal size")
    if form.transpose() != -form:
        raise PreconditionError("form is not antisymmetric")
    return m.transpose() @ form @ m == form


def standard_j(n: int = 2) -> RationalMatrix:
    """The standard symplectic form [[0, I], [-I, 0]] of size 2n."""
    rows = []
    for i in range(2 * n):
        row = [0] * (2 * n)
        if i < n:
            row[i + n] = 1
        else:
            row[i - n] = -1
        rows.append(row)
    return RationalMatrix.from_rows(rows)


def random_unimodular(n: int, rng, steps: int = 12):
    """Random unimodular integer matrix as a product of elementary operations."""
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        kind = rng.randrange(3)
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        if kind == 0:
            q = rng.randint(-2, 2)
            for c in range(n):
                m[i][c] += q * m[j][c]
        elif kind == 1:
            m[i], m[j] = m[j], m[i]
        else:
            m[i] = [-x for x in m[i]]
    return m
