"""Exact rational matrices and the row-reduction routines everything else runs on.

Entries are `fractions.Fraction`, so every result is exact: ranks, kernels and
solutions carry no tolerance.  The reduction core works on sparse rows
(dict column -> entry) because the big matrices produced by chain complexes
are very sparse; small dense matrices pay a negligible overhead.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


def rat(x) -> Fraction:
    """Coerce ints, strings like '3/7', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def _sparse_rref(rows: list[dict[int, Fraction]], ncols: int):
    """Reduced row echelon form of sparse rows.

    Returns (reduced_rows, pivots) where pivots is the ordered list of
    (column, row_index) pairs.  Zero rows are dropped.
    """
    work = [dict(r) for r in rows if r]
    pivots: list[tuple[int, int]] = []
    used: set[int] = set()
    for col in range(ncols):
        best = None
        for i, r in enumerate(work):
            if i in used or col not in r:
                continue
            if best is None or len(r) < len(work[best]):
                best = i
        if best is None:
            continue
        prow = work[best]
        inv = 1 / prow[col]
        if inv != 1:
            prow = {c: v * inv for c, v in prow.items()}
            work[best] = prow
        for i, r in enumerate(work):
            if i == best or col not in r:
                continue
            coeff = r[col]
            new = dict(r)
            for c, v in prow.items():
                acc = new.get(c, Fraction(0)) - coeff * v
                if acc:
                    new[c] = acc
                else:
                    new.pop(c, None)
            work[i] = new
        used.add(best)
        pivots.append((col, best))
    reduced = [work[i] for _, i in pivots]
    pivcols = [c for c, _ in pivots]
    return reduced, pivcols


class RationalMatrix:
    """Immutable dense matrix of exact rationals (row-major)."""

    __slots__ = ("rows", "cols", "data", "_rref")

    def __init__(self, data: Sequence[Sequence]):
        self.data = tuple(tuple(rat(x) for x in row) for row in data)
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.rows else 0
        if any(len(r) != self.cols for r in self.data):
            raise ValueError("ragged rows")
        self._rref = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        m = cls.__new__(cls)
        m.data = tuple((Fraction(0),) * cols for _ in range(rows))
        m.rows, m.cols, m._rref = rows, cols, None
        return m

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Iterable[Sequence]) -> "RationalMatrix":
        cols = [list(c) for c in cols]
        if not cols:
            return cls.zeros(0, 0)
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "RationalMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    # -- basic structure ----------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, RationalMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        return f"RationalMatrix({[list(map(str, r)) for r in self.data]})"

    def is_zero(self) -> bool:
        return all(not x for row in self.data for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def column(self, j: int) -> list[Fraction]:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self) -> list[list[Fraction]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        return RationalMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix([[-x for x in row] for row in self.data])

    def scale(self, c) -> "RationalMatrix":
        c = rat(c)
        return RationalMatrix([[c * x for x in row] for row in self.data])

    def __mul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.rows}x{self.cols} * {other.rows}x{other.cols}")
            if self.rows == 0 or other.cols == 0:
                return RationalMatrix.zeros(self.rows, other.cols)
            # sparse row-by-row product: fast on the large, very sparse
            # matrices coming from chain complexes
            brows = [
                {j: x for j, x in enumerate(row) if x} for row in other.data
            ]
            out = []
            for row in self.data:
                acc: dict[int, Fraction] = {}
                for k, a in enumerate(row):
                    if not a:
                        continue
                    for j, b in brows[k].items():
                        v = acc.get(j, Fraction(0)) + a * b
                        if v:
                            acc[j] = v
                        else:
                            acc.pop(j, None)
                out.append([acc.get(j, Fraction(0)) for j in range(other.cols)])
            return RationalMatrix(out)
        return self.scale(other)

    __matmul__ = __mul__

    def apply(self, vec: Sequence) -> list[Fraction]:
        v = [rat(x) for x in vec]
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(a * b for a, b in zip(row, v) if a and b) for row in self.data]

    # -- stacking -------------------------------------------------------

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        if self.rows == 0:
            return RationalMatrix.zeros(0, self.cols + other.cols)
        return RationalMatrix([list(r1) + list(r2) for r1, r2 in zip(self.data, other.data)])

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return RationalMatrix(list(self.data) + list(other.data))

    @classmethod
    def block_diag(cls, blocks: Sequence["RationalMatrix"]) -> "RationalMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b.data[i][j]
            r0 += b.rows
            c0 += b.cols
        return cls(out)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RationalMatrix":
        if not row_idx or not col_idx:
            return RationalMatrix.zeros(len(row_idx), len(col_idx))
        return RationalMatrix([[self.data[i][j] for j in col_idx] for i in row_idx])

    # -- reduction-based queries ----------------------------------------

    def _reduced(self):
        if self._rref is None:
            rows = [
                {j: x for j, x in enumerate(row) if x} for row in self.data
            ]
            self._rref = _sparse_rref(rows, self.cols)
        return self._rref

    def rank(self) -> int:
        return len(self._reduced()[1])

    def pivot_columns(self) -> list[int]:
        return list(self._reduced()[1])

    def kernel_basis(self) -> "RationalMatrix":
        """Columns form a basis of the right kernel.  Checks rank-nullity."""
        reduced, pivcols = self._reduced()
        pivset = set(pivcols)
        free = [j for j in range(self.cols) if j not in pivset]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for row, p in zip(reduced, pivcols):
                if f in row:
                    v[p] = -row[f]
            basis.append(v)
        assert len(pivcols) + len(free) == self.cols, "rank-nullity violated"
        return RationalMatrix.from_columns(basis) if basis else RationalMatrix.zeros(self.cols, 0)

    def column_space_basis(self) -> "RationalMatrix":
        """The pivot columns of the matrix itself (deterministic image basis)."""
        piv = self.pivot_columns_of_columns()
        return self.submatrix(range(self.rows), piv)

    def pivot_columns_of_columns(self) -> list[int]:
        return self.pivot_columns()

    def solve_matrix(self, B: "RationalMatrix"):
        """Solve self @ X = B.  Returns X (cols of B solved independently) or None."""
        if B.rows != self.rows:
            raise ValueError("shape mismatch in solve")
        aug = self.hstack(B)
        rows = [{j: x for j, x in enumerate(row) if x} for row in aug.data]
        reduced, pivcols = _sparse_rref(rows, aug.cols)
        for c in pivcols:
            if c >= self.cols:
                return None
        sol = [[Fraction(0)] * B.cols for _ in range(self.cols)]
        for row, p in zip(reduced, pivcols):
            for j in range(B.cols):
                val = row.get(self.cols + j)
                if val:
                    sol[p][j] = val
        return RationalMatrix(sol)

    def solve(self, vec: Sequence):
        X = self.solve_matrix(RationalMatrix.from_columns([list(vec)]))
        return None if X is None else X.column(0)

    def inverse(self) -> "RationalMatrix":
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        X = self.solve_matrix(RationalMatrix.identity(self.rows))
        if X is None or self.rank() < self.rows:
            raise ValueError("matrix is singular")
        return X

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.rows

    def determinant(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        work = [list(row) for row in self.data]
        det = Fraction(1)
        for col in range(n):
            piv = next((i for i in range(col, n) if work[i][col]), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                work[col], work[piv] = work[piv], work[col]
                det = -det
            det *= work[col][col]
            inv = 1 / work[col][col]
            for i in range(col + 1, n):
                if work[i][col]:
                    f = work[i][col] * inv
                    work[i] = [a - f * b for a, b in zip(work[i], work[col])]
        return det

    # -- serialization ----------------------------------------------------

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.data]

    @classmethod
    def from_json(cls, rows: list[list[str]], expect_shape=None) -> "RationalMatrix":
        m = cls(rows) if rows else cls.zeros(0, 0)
        if expect_shape is not None and (m.rows, m.cols) != tuple(expect_shape):
            raise ValueError(f"matrix shape {m.rows}x{m.cols} != expected {expect_shape}")
        return m


# -- subspace helpers (subspaces are given by matrices whose columns span) --


def span_basis(M: RationalMatrix) -> RationalMatrix:
    """Deterministic basis (pivot columns) for the column span of M."""
    return M.submatrix(range(M.rows), M.pivot_columns())


def subspace_sum(*mats: RationalMatrix) -> RationalMatrix:
    if not mats:
        raise ValueError("need at least one matrix")
    acc = mats[0]
    for m in mats[1:]:
        acc = acc.hstack(m)
    return span_basis(acc)


def subspace_dim(M: RationalMatrix) -> int:
    return M.rank()


def subspace_intersection(A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    """Basis of col(A) meet col(B); both live in the same ambient space."""
    if A.rows != B.rows:
        raise ValueError("ambient mismatch")
    if A.cols == 0 or B.cols == 0:
        return RationalMatrix.zeros(A.rows, 0)
    K = A.hstack(-B).kernel_basis()
    if K.cols == 0:
        return RationalMatrix.zeros(A.rows, 0)
    coeffs = K.submatrix(range(A.cols), range(K.cols))
    return span_basis(A * coeffs)


def preimage_basis(f: RationalMatrix, W: RationalMatrix) -> RationalMatrix:
    """Basis of {x : f(x) in col(W)}.  W may have zero columns (then ker f)."""
    if W.cols == 0:
        return f.kernel_basis()
    K = f.hstack(-W).kernel_basis()
    if K.cols == 0:
        return RationalMatrix.zeros(f.cols, 0)
    return span_basis(K.submatrix(range(f.cols), range(K.cols)))


def contains_subspace(A: RationalMatrix, B: RationalMatrix) -> bool:
    """Does col(A) contain col(B)?"""
    if B.cols == 0:
        return True
    return subspace_dim(subspace_sum(A, B)) == subspace_dim(A)
