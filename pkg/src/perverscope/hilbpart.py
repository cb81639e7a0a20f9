"""Partitions, the point-counting generating function, graded symmetric
powers of surface cohomology, the Hilbert-scheme Betti assembly, and the
truncated Heisenberg-relation check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .complexes import GradedDims
from .ratlin import RationalMatrix


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        if any(p <= 0 for p in self.parts):
            raise ValueError("parts must be positive")
        if any(self.parts[i] < self.parts[i + 1] for i in range(len(self.parts) - 1)):
            raise ValueError("parts must be weakly decreasing")

    @property
    def n(self):
        return sum(self.parts)

    @property
    def length(self):
        return len(self.parts)

    @property
    def colength(self):
        return self.n - self.length

    def multiplicities(self) -> dict:
        out = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return out


def partitions(n: int) -> list[Partition]:
    """All partitions of n, complete and duplicate-free."""
    if n < 0:
        raise ValueError("cannot partition a negative integer")
    out = []

    def rec(remaining, maxpart, acc):
        if remaining == 0:
            out.append(Partition(tuple(acc)))
            return
        for p in range(min(maxpart, remaining), 0, -1):
            acc.append(p)
            rec(remaining - p, p, acc)
            acc.pop()

    rec(n, n if n else 1, [])
    if n == 0:
        out = [Partition(())]
    return out


def euler_product_coeffs(N: int) -> list[int]:
    """Coefficients of prod_{j>=1} (1 - q^j)^{-1} up to q^N: partition counts."""
    if N < 0:
        raise ValueError("need a non-negative order")
    coeffs = [1] + [0] * N
    for j in range(1, N + 1):
        for m in range(j, N + 1):
            coeffs[m] += coeffs[m - j]
    return coeffs


@dataclass(frozen=True)
class SurfaceBetti:
    b: tuple

    def __post_init__(self):
        if len(self.b) != 5 or any(x < 0 for x in self.b):
            raise ValueError("surface Betti numbers are five non-negative integers")

    def __getitem__(self, q):
        return self.b[q] if 0 <= q <= 4 else 0


def sym_power_betti(s: SurfaceBetti, a: int) -> GradedDims:
    """Graded dims of the a-th graded-symmetric power: symmetric on even
    degrees, exterior on odd (the z^a coefficient of the mixed product)."""
    if a < 0:
        raise ValueError("power must be non-negative")
    # polynomials in t per z-degree
    acc = [dict() for _ in range(a + 1)]
    acc[0][0] = 1
    for q in range(5):
        b = s[q]
        if b == 0:
            continue
        factor = [dict() for _ in range(a + 1)]
        if q % 2 == 0:
            for k in range(a + 1):
                factor[k][q * k] = comb(b + k - 1, k)
        else:
            for k in range(min(a, b) + 1):
                factor[k][q * k] = comb(b, k)
        new = [dict() for _ in range(a + 1)]
        for za, ta in enumerate(acc):
            for zb, tb in enumerate(factor):
                if za + zb > a:
                    continue
                for da, ca in ta.items():
                    for db, cb in tb.items():
                        key = da + db
                        new[za + zb][key] = new[za + zb].get(key, 0) + ca * cb
        acc = new
    return GradedDims(acc[a])


def sym_power_betti_bruteforce(s: SurfaceBetti, a: int) -> GradedDims:
    """Independent oracle: dimensions of symmetric-group invariants of the
    a-th graded tensor power, with the sign rule on odd degrees."""
    from itertools import permutations, product

    degrees = []
    for q in range(5):
        degrees.extend([q] * s[q])
    if a == 0:
        return GradedDims({0: 1})
    basis = list(product(range(len(degrees)), repeat=a))
    index = {b: i for i, b in enumerate(basis)}
    perms = list(permutations(range(a)))
    n = len(basis)
    acc = [[Fraction(0)] * n for _ in range(n)]
    for perm in perms:
        for b in basis:
            target = tuple(b[perm.index(i)] for i in range(a))
            sign = _koszul_sign(b, perm, degrees)
            acc[index[target]][index[b]] += Fraction(sign, len(perms))
    proj = RationalMatrix(acc)
    # group invariant dimensions by total degree
    out = {}
    by_degree = {}
    for i, b in enumerate(basis):
        by_degree.setdefault(sum(degrees[x] for x in b), []).append(i)
    for deg, idx in by_degree.items():
        block = proj.submatrix(idx, idx)
        trace = sum(block.data[i][i] for i in range(len(idx)))
        assert trace.denominator == 1
        if trace:
            out[deg] = int(trace)
    return GradedDims(out)


def _koszul_sign(b, perm, degrees):
    """Sign of permuting graded tensor factors: count transposed odd pairs."""
    sign = 1
    positions = [perm.index(i) for i in range(len(perm))]
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            if positions[i] > positions[j] and degrees[b[i]] % 2 and degrees[b[j]] % 2:
                sign = -sign
    return sign


def gottsche(s: SurfaceBetti, n: int) -> GradedDims:
    """Betti numbers of the Hilbert scheme of n points: over each partition,
    the product of symmetric powers given by its multiplicity profile,
    shifted up by twice the colength."""
    if n < 0:
        raise ValueError("need a non-negative number of points")
    total = {}
    for part in partitions(n):
        piece = GradedDims({0: 1})
        for value, mult in sorted(part.multiplicities().items()):
            piece = _convolve(piece, sym_power_betti(s, mult))
        shift = 2 * part.colength
        for deg, dim in piece.items():
            total[deg + shift] = total.get(deg + shift, 0) + dim
    return GradedDims(total)


def _convolve(a: GradedDims, b: GradedDims) -> GradedDims:
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return GradedDims(out)


# ---------------------------------------------------------------------------
# truncated Heisenberg module
# ---------------------------------------------------------------------------


def _monomial_basis(N: int):
    """Monomials in x_1, x_2, ... of weighted degree <= N (x_i has degree i),
    encoded as partitions."""
    out = []
    for m in range(N + 1):
        out.extend(partitions(m))
    return out


def heisenberg_operators(N: int):
    """Matrices of multiplication by x_j and formal derivation by x_i on the
    degree-truncated polynomial module.  Returns (basis, mult, deriv)."""
    basis = _monomial_basis(N)
    index = {p.parts: i for i, p in enumerate(basis)}
    size = len(basis)
    mult = {}
    deriv = {}
    for j in range(1, N + 1):
        rows = [[Fraction(0)] * size for _ in range(size)]
        for i, p in enumerate(basis):
            if p.n + j <= N:
                target = tuple(sorted(p.parts + (j,), reverse=True))
                rows[index[target]][i] = Fraction(1)
        mult[j] = RationalMatrix(rows)
    for i_part in range(1, N + 1):
        rows = [[Fraction(0)] * size for _ in range(size)]
        for i, p in enumerate(basis):
            mults = p.multiplicities()
            if mults.get(i_part):
                target = list(p.parts)
                target.remove(i_part)
                rows[index[tuple(target)]][i] = Fraction(mults[i_part])
        deriv[i_part] = RationalMatrix(rows)
    return basis, mult, deriv


def heisenberg_check(N: int):
    """Commutator identities [deriv_i, mult_j] = delta_{ij} id on the
    truncation, plus the graded-dimension count.

    The commutator is compared on the monomials of degree <= N - j (where
    both composition orders stay inside the truncation).  Returns a report
    dict with a boolean verdict."""
    if N < 1:
        raise ValueError("need a positive truncation order")
    basis, mult, deriv = heisenberg_operators(N)
    index = {p.parts: i for i, p in enumerate(basis)}
    failures = []
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            comm = deriv[i] * mult[j] - mult[j] * deriv[i]
            expected = Fraction(1) if i == j else Fraction(0)
            for p in basis:
                if p.n + j > N or p.n + j - i > N:
                    continue
                col = index[p.parts]
                for q in basis:
                    row = index[q.parts]
                    want = expected if row == col else Fraction(0)
                    if comm.data[row][col] != want:
                        failures.append((i, j, p.parts))
                        break
    # commuting families: [m_i, m_j] = 0 and [d_i, d_j] = 0 where defined
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            m = mult[i] * mult[j] - mult[j] * mult[i]
            for p in basis:
                if p.n + i + j <= N and not all(
                    m.data[r][index[p.parts]] == 0 for r in range(len(basis))
                ):
                    failures.append(("mult", i, j))
                    break
            d = deriv[i] * deriv[j] - deriv[j] * deriv[i]
            if not d.is_zero():
                failures.append(("deriv", i, j))
    graded = [sum(1 for p in basis if p.n == m) for m in range(N + 1)]
    return {
        "ok": not failures,
        "failures": failures,
        "graded_dims": graded,
        "matches_euler_product": graded == euler_product_coeffs(N),
    }
