"""Bounded cochain complexes of rational vector spaces.

A complex stores dimensions per degree and the differentials d^i mapping
degree i to i+1 (matrices act on column vectors, so d^i has shape
dims[i+1] x dims[i]).  Everything downstream (sheaf cohomology, truncations,
intersection complexes, spectral sequences) reduces to these objects.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .ratlin import (
    RationalMatrix,
    preimage_basis,
    span_basis,
    subspace_dim,
    subspace_sum,
)


class ComplexError(ValueError):
    pass


class GradedDims:
    """Finitely supported map degree -> dimension."""

    def __init__(self, dims=None):
        self.d = {int(k): int(v) for k, v in dict(dims or {}).items() if v}
        if any(v < 0 for v in self.d.values()):
            raise ValueError("negative dimension")

    @classmethod
    def from_list(cls, values, start=0):
        return cls({start + i: v for i, v in enumerate(values)})

    def __getitem__(self, i):
        return self.d.get(i, 0)

    def __eq__(self, other):
        if isinstance(other, dict):
            other = GradedDims(other)
        return isinstance(other, GradedDims) and self.d == other.d

    def __hash__(self):
        return hash(tuple(sorted(self.d.items())))

    def __bool__(self):
        return bool(self.d)

    def __repr__(self):
        return f"GradedDims({self.d})"

    def items(self):
        return sorted(self.d.items())

    def degrees(self):
        return sorted(self.d)

    def total(self):
        return sum(self.d.values())

    def shift(self, a):
        """H^i of the shifted object equals H^{i+a} of the original."""
        return GradedDims({i - a: v for i, v in self.d.items()})

    def euler(self):
        return sum((-1) ** i * v for i, v in self.d.items())

    def is_palindromic(self, center2):
        """Symmetry dims[k] == dims[center2 - k] (center2 = twice the center)."""
        degs = set(self.d)
        return all(self[k] == self[center2 - k] for k in degs)

    def to_json(self):
        return {str(k): v for k, v in self.items()}


class CochainComplex:
    def __init__(self, dims, diffs, check=True):
        self.dims = {int(k): int(v) for k, v in dims.items()}
        if any(v < 0 for v in self.dims.values()):
            raise ComplexError("negative dimension")
        self.diffs = {}
        for i, m in diffs.items():
            i = int(i)
            expected = (self.dim(i + 1), self.dim(i))
            if (m.rows, m.cols) != expected:
                raise ComplexError(
                    f"differential at degree {i} has shape {m.rows}x{m.cols}, expected {expected}"
                )
            if not m.is_zero():
                self.diffs[i] = m
        if check:
            for i in list(self.diffs):
                comp = self.diff(i + 1) * self.diffs[i]
                if not comp.is_zero():
                    raise ComplexError(f"d^{i + 1} . d^{i} != 0")

    # -- structure ------------------------------------------------------

    def dim(self, i):
        return self.dims.get(i, 0)

    def degrees(self):
        return sorted(k for k, v in self.dims.items() if v)

    def lo(self):
        degs = self.degrees()
        return degs[0] if degs else 0

    def hi(self):
        degs = self.degrees()
        return degs[-1] if degs else 0

    def diff(self, i):
        if i in self.diffs:
            return self.diffs[i]
        return RationalMatrix.zeros(self.dim(i + 1), self.dim(i))

    def total_dim(self):
        return sum(self.dims.values())

    def euler_characteristic(self):
        return sum((-1) ** i * v for i, v in self.dims.items())

    @classmethod
    def single(cls, degree, dim):
        return cls({degree: dim}, {})

    @classmethod
    def zero(cls):
        return cls({}, {})

    # -- cohomology -------------------------------------------------------

    def cohomology(self) -> GradedDims:
        out = {}
        for i in range(self.lo(), self.hi() + 1):
            n = self.dim(i)
            if n == 0:
                continue
            h = n - self.diff(i).rank() - self.diff(i - 1).rank()
            if h:
                out[i] = h
        hd = GradedDims(out)
        assert hd.euler() == self.euler_characteristic(), "Euler characteristic mismatch"
        return hd

    def cocycles(self, i) -> RationalMatrix:
        return self.diff(i).kernel_basis()

    def coboundaries(self, i) -> RationalMatrix:
        return span_basis(self.diff(i - 1))

    def cohomology_reps(self, i) -> RationalMatrix:
        """Columns are cocycles representing a basis of H^i (echelon pivots)."""
        Z = self.cocycles(i)
        B = self.coboundaries(i)
        if Z.cols == 0:
            return RationalMatrix.zeros(self.dim(i), 0)
        both = B.hstack(Z)
        piv = both.pivot_columns()
        keep = [p - B.cols for p in piv if p >= B.cols]
        return Z.submatrix(range(Z.rows), keep)

    def class_coordinates(self, i, vectors: RationalMatrix) -> RationalMatrix:
        """Coordinates of cocycle columns in the chosen H^i basis."""
        reps = self.cohomology_reps(i)
        B = self.coboundaries(i)
        basis = B.hstack(reps)
        if basis.cols == 0:
            return RationalMatrix.zeros(0, vectors.cols)
        X = basis.solve_matrix(vectors)
        if X is None:
            raise ComplexError(f"vector is not a cocycle class in degree {i}")
        return X.submatrix(range(B.cols, basis.cols), range(vectors.cols))

    # -- constructions ------------------------------------------------------

    def shift(self, a: int) -> "CochainComplex":
        """Degree i of the result holds what was degree i + a; d picks up (-1)^a."""
        sign = -1 if a % 2 else 1
        dims = {i - a: v for i, v in self.dims.items()}
        diffs = {i - a: (m.scale(sign) if sign < 0 else m) for i, m in self.diffs.items()}
        return CochainComplex(dims, diffs, check=False)

    def truncate_leq(self, k: int) -> "CochainComplex":
        """Standard truncation: degrees < k kept, degree k replaced by ker d^k."""
        if k >= self.hi():
            return self
        K = self.cocycles(k)
        dims = {i: v for i, v in self.dims.items() if i < k}
        dims[k] = K.cols
        diffs = {i: m for i, m in self.diffs.items() if i < k - 1}
        if self.dim(k - 1):
            X = K.solve_matrix(self.diff(k - 1)) if K.cols else RationalMatrix.zeros(0, self.dim(k - 1))
            if X is None:
                raise ComplexError("image of d^{k-1} not contained in ker d^k")
            diffs[k - 1] = X
        return CochainComplex(dims, diffs, check=False)

    def direct_sum(self, other: "CochainComplex") -> "CochainComplex":
        degs = set(self.dims) | set(other.dims)
        dims = {i: self.dim(i) + other.dim(i) for i in degs}
        diffs = {}
        for i in degs:
            if self.dim(i) + other.dim(i) and self.dim(i + 1) + other.dim(i + 1):
                diffs[i] = RationalMatrix.block_diag([self.diff(i), other.diff(i)])
        return CochainComplex(dims, diffs, check=False)

    # -- serialization --------------------------------------------------------

    def to_json(self):
        return {
            "dims": {str(i): v for i, v in sorted(self.dims.items())},
            "diffs": {str(i): m.to_json() for i, m in sorted(self.diffs.items())},
        }

    @classmethod
    def from_json(cls, obj) -> "CochainComplex":
        dims = {int(k): v for k, v in obj["dims"].items()}
        diffs = {}
        for k, rows in obj.get("diffs", {}).items():
            i = int(k)
            shape = (dims.get(i + 1, 0), dims.get(i, 0))
            diffs[i] = RationalMatrix.from_json(rows, expect_shape=shape) if rows else RationalMatrix.zeros(*shape)
        return cls(dims, diffs)

    def json_roundtrip_equal(self) -> bool:
        other = CochainComplex.from_json(json.loads(json.dumps(self.to_json())))
        return other.dims == {k: v for k, v in self.dims.items()} and all(
            other.diff(i) == self.diff(i) for i in range(self.lo() - 1, self.hi() + 1)
        )


class ChainMap:
    """Degreewise map of complexes commuting with the differentials."""

    def __init__(self, source: CochainComplex, target: CochainComplex, maps, check=True):
        self.source, self.target = source, target
        self.maps = {}
        for i, m in maps.items():
            i = int(i)
            expected = (target.dim(i), source.dim(i))
            if (m.rows, m.cols) != expected:
                raise ComplexError(f"chain map at degree {i}: shape {m.rows}x{m.cols} != {expected}")
            if not m.is_zero():
                self.maps[i] = m
        if check:
            lo = min(source.lo(), target.lo()) - 1
            hi = max(source.hi(), target.hi()) + 1
            for i in range(lo, hi):
                lhs = target.diff(i) * self.map_at(i)
                rhs = self.map_at(i + 1) * source.diff(i)
                if lhs != rhs:
                    raise ComplexError(f"not a chain map at degree {i}")

    def map_at(self, i) -> RationalMatrix:
        if i in self.maps:
            return self.maps[i]
        return RationalMatrix.zeros(self.target.dim(i), self.source.dim(i))

    @classmethod
    def identity(cls, C: CochainComplex) -> "ChainMap":
        return cls(C, C, {i: RationalMatrix.identity(C.dim(i)) for i in C.degrees()}, check=False)

    def induced_on_cohomology(self, i) -> RationalMatrix:
        """Matrix of H^i(source) -> H^i(target) in the canonical rep bases."""
        reps = self.source.cohomology_reps(i)
        if reps.cols == 0:
            h_t = self.target.cohomology()[i]
            return RationalMatrix.zeros(h_t, 0)
        return self.target.class_coordinates(i, self.map_at(i) * reps)


def mapping_cone(f: ChainMap) -> CochainComplex:
    """cone(f)^i = A^{i+1} (+) B^i with d(a, b) = (-d_A a, f(a) + d_B b)."""
    A, B = f.source, f.target
    degs = set()
    for i in list(A.dims) + list(B.dims):
        degs.update((i - 1, i))
    dims = {i: A.dim(i + 1) + B.dim(i) for i in degs}
    diffs = {}
    for i in degs:
        rows = dims.get(i + 1, A.dim(i + 2) + B.dim(i + 1))
        cols = dims[i]
        if rows == 0 or cols == 0:
            continue
        out = [[Fraction(0)] * cols for _ in range(rows)]
        dA = A.diff(i + 1)
        for r in range(A.dim(i + 2)):
            for c in range(A.dim(i + 1)):
                out[r][c] = -dA[r, c]
        fm = f.map_at(i + 1)
        for r in range(B.dim(i + 1)):
            for c in range(A.dim(i + 1)):
                out[A.dim(i + 2) + r][c] = fm[r, c]
        dB = B.diff(i)
        for r in range(B.dim(i + 1)):
            for c in range(B.dim(i)):
                out[A.dim(i + 2) + r][A.dim(i + 1) + c] = dB[r, c]
        diffs[i] = RationalMatrix(out)
    return CochainComplex(dims, diffs)


def check_long_exact(maps_a: dict[int, RationalMatrix], maps_b: dict[int, RationalMatrix],
                     ha: GradedDims, hb: GradedDims, hc: GradedDims) -> bool:
    """Rank bookkeeping for an exact triangle H(A) -> H(B) -> H(C) -> H(A)[1].

    maps_a[i]: H^i(A) -> H^i(B); maps_b[i]: H^i(B) -> H^i(C).  Verifies
    composite vanishing, exactness at B, and the consistency of the
    connecting ranks forced at A and C.
    """
    degs = sorted(set(ha.degrees()) | set(hb.degrees()) | set(hc.degrees()))
    if not degs:
        return True
    for i in range(degs[0] - 1, degs[-1] + 2):
        a = maps_a.get(i, RationalMatrix.zeros(hb[i], ha[i]))
        b = maps_b.get(i, RationalMatrix.zeros(hc[i], hb[i]))
        if not (b * a).is_zero():
            return False
        if a.rank() + b.rank() != hb[i]:
            return False
        a_next = maps_a.get(i + 1, RationalMatrix.zeros(hb[i + 1], ha[i + 1]))
        # rank of the connecting map H^i(C) -> H^{i+1}(A), counted both ways
        if hc[i] - b.rank() != ha[i + 1] - a_next.rank():
            return False
    return True


class FilteredComplex:
    """Decreasing filtration F^0 >= F^1 >= ... of a complex by subcomplexes.

    Step p is a per-degree matrix whose columns select the subspace; step 0
    must span everything and steps beyond the list are zero.
    """

    def __init__(self, complex: CochainComplex, steps, check=True):
        self.complex = complex
        self.steps = []
        for step in steps:
            self.steps.append({int(i): m for i, m in step.items()})
        if check:
            self._validate()

    def _validate(self):
        C = self.complex
        prev = None
        for p, step in enumerate(self.steps):
            for i in C.degrees():
                m = self.step_matrix(p, i)
                if m.rows != C.dim(i):
                    raise ComplexError(f"filtration step {p} degree {i}: ambient mismatch")
                if p == 0 and subspace_dim(m) != C.dim(i):
                    raise ComplexError("filtration step 0 must be the whole complex")
                if prev is not None:
                    big = prev[i] if i in prev else RationalMatrix.zeros(C.dim(i), 0)
                    if big.solve_matrix(m) is None:
                        raise ComplexError(f"filtration not decreasing at step {p}, degree {i}")
                img = C.diff(i) * m
                nxt = self.step_matrix(p, i + 1)
                if not img.is_zero() and nxt.solve_matrix(img) is None:
                    raise ComplexError(f"filtration step {p} is not a subcomplex at degree {i}")
            prev = {i: self.step_matrix(p, i) for i in C.degrees()}

    def depth(self):
        return len(self.steps)

    def step_matrix(self, p, i) -> RationalMatrix:
        n = self.complex.dim(i)
        if p <= 0:
            return RationalMatrix.identity(n)
        if p >= len(self.steps):
            return RationalMatrix.zeros(n, 0)
        return self.steps[p].get(i, RationalMatrix.zeros(n, 0))

    # -- spectral sequence -------------------------------------------------

    def _z_space(self, r, p, n) -> RationalMatrix:
        """F^p C^n  meet  d^{-1}(F^{p+r} C^{n+1})."""
        F = self.step_matrix(p, n)
        if F.cols == 0:
            return F
        W = self.step_matrix(p + r, n + 1)
        d = self.complex.diff(n)
        pre = preimage_basis(d * F, W)
        if pre.cols == 0:
            return RationalMatrix.zeros(self.complex.dim(n), 0)
        return span_basis(F * pre)

    def page_dims(self, r) -> dict:
        """Bigraded dims of page r (r >= 1)."""
        C = self.complex
        out = {}
        for n in C.degrees():
            for p in range(0, len(self.steps) + 1):
                z = self._z_space(r, p, n)
                if z.cols == 0:
                    continue
                below = self._z_space(r - 1, p + 1, n)
                db = self.complex.diff(n - 1) * self._z_space(r - 1, p - r + 1, n - 1)
                dim = z.cols - subspace_dim(subspace_sum(below, db, RationalMatrix.zeros(z.rows, 0)))
                if dim:
                    out[(p, n - p)] = dim
        return out

    def differential_ranks(self, r) -> dict:
        """Rank of d_r out of each (p, q) spot on page r."""
        C = self.complex
        out = {}
        for n in C.degrees():
            for p in range(0, len(self.steps) + 1):
                z = self._z_space(r, p, n)
                if z.cols == 0:
                    continue
                stable = self._z_space(r + 1, p, n)
                below = self._z_space(r - 1, p + 1, n)
                db = self.complex.diff(n - 1) * self._z_space(r - 1, p - r + 1, n - 1)
                rk = z.cols - subspace_dim(subspace_sum(stable, below, db))
                if rk:
                    out[(p, n - p)] = rk
        return out

    def infinity_dims(self) -> dict:
        """Graded dims of the induced filtration on cohomology."""
        C = self.complex
        out = {}
        for n in C.degrees():
            Z = C.cocycles(n)
            Bm = C.coboundaries(n)
            im_dim = subspace_dim(Bm)
            prev = None
            for p in range(0, len(self.steps) + 2):
                F = self.step_matrix(p, n)
                if p == 0:
                    inter = Z
                elif F.cols == 0:
                    inter = F
                else:
                    zero_target = RationalMatrix.zeros(C.dim(n + 1), 0)
                    inter = span_basis(F * preimage_basis(C.diff(n) * F, zero_target))
                cur = subspace_dim(subspace_sum(inter, Bm)) - im_dim
                if prev is not None and prev - cur:
                    out[(p - 1, n - p + 1)] = prev - cur
                prev = cur
        return out

    def stable_page(self):
        return len(self.steps) + max(1, self.complex.hi() - self.complex.lo() + 1) + 1


def spectral_pages(fc: FilteredComplex, r_max: int):
    """Pages E_1..E_{r_max} with differential ranks, plus the limit dims."""
    pages = {r: fc.page_dims(r) for r in range(1, r_max + 1)}
    ranks = {r: fc.differential_ranks(r) for r in range(1, r_max + 1)}
    einf = fc.infinity_dims()
    return SpectralPages(pages, ranks, einf)


class SpectralPages:
    def __init__(self, pages, differential_ranks, e_infinity):
        self.pages = pages
        self.differential_ranks = differential_ranks
        self.e_infinity = e_infinity

    def page(self, r):
        return self.pages[r]

    def consistent(self) -> bool:
        """E_{r+1} = H(E_r, d_r) as a dimension count at every spot."""
        rs = sorted(self.pages)
        for r in rs[:-1]:
            cur, nxt, rk = self.pages[r], self.pages[r + 1], self.differential_ranks[r]
            spots = set(cur) | set(nxt)
            for (p, q) in spots:
                out_rk = rk.get((p, q), 0)
                in_rk = rk.get((p - r, q + r - 1), 0)
                if nxt.get((p, q), 0) != cur.get((p, q), 0) - out_rk - in_rk:
                    return False
        return True

    def total_matches(self, h: GradedDims) -> bool:
        totals = {}
        for (p, q), v in self.e_infinity.items():
            totals[p + q] = totals.get(p + q, 0) + v
        return GradedDims(totals) == h


def is_e2_degenerate(fc: FilteredComplex) -> bool:
    """True iff all differentials vanish from page 2 on (E_2 dims = limit dims)."""
    return fc.page_dims(2) == fc.infinity_dims()
