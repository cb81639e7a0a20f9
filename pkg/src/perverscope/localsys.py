"""Local systems as monodromy representations over the rationals.

Covers circle cohomology, invariants, the fibration-over-a-circle long exact
sequence, pushforward along cyclic covers, and isotypic decomposition for
representations with finite image (certified by enumerating the group).
Simplicity of the summands is certified by a splitting search over the
rationals; no passage to an algebraic closure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .complexes import GradedDims
from .ratlin import RationalMatrix, span_basis


class MonodromyError(ValueError):
    pass


@dataclass(frozen=True)
class MonodromyRep:
    rank: int
    generators: tuple

    def __post_init__(self):
        for g in self.generators:
            if (g.rows, g.cols) != (self.rank, self.rank):
                raise MonodromyError("generator size does not match the rank")
            if not g.is_invertible():
                raise MonodromyError("monodromy generators must be invertible")

    @classmethod
    def trivial(cls, rank, ngens=1):
        return cls(rank, tuple(RationalMatrix.identity(rank) for _ in range(ngens)))

    @classmethod
    def circle(cls, T: RationalMatrix):
        return cls(T.rows, (T,))


def circle_cohomology(T: RationalMatrix):
    """H^0 = ker(T - id), H^1 = coker(T - id); everything above vanishes."""
    if not T.is_square():
        raise MonodromyError("monodromy must be square")
    if not T.is_invertible():
        raise MonodromyError("monodromy must be invertible")
    n = T.rows
    delta = T - RationalMatrix.identity(n)
    h0 = delta.kernel_basis().cols
    h1 = n - delta.rank()
    assert h0 == h1  # square matrix: kernel and cokernel have equal dimension
    return h0, h1


def invariants(rep: MonodromyRep) -> RationalMatrix:
    """Basis of the simultaneous fixed space of all generators."""
    n = rep.rank
    if not rep.generators:
        return RationalMatrix.identity(n)
    stacked = None
    for g in rep.generators:
        delta = g - RationalMatrix.identity(n)
        stacked = delta if stacked is None else stacked.vstack(delta)
    return stacked.kernel_basis()


def wang(fiber_betti, operators) -> GradedDims:
    """Betti numbers of a fiber bundle over a circle from the fiber's Betti
    numbers and the degreewise monodromy: b_q = ker(T_q - 1) + coker(T_{q-1} - 1)."""
    betti = GradedDims(fiber_betti if isinstance(fiber_betti, dict) else
                       {i: v for i, v in enumerate(fiber_betti)})
    ops = {int(q): m for q, m in operators.items()}
    for q, m in ops.items():
        if (m.rows, m.cols) != (betti[q], betti[q]):
            raise MonodromyError(f"operator in degree {q} does not match the fiber dimension")
    out = {}
    degs = betti.degrees()
    if not degs:
        return GradedDims({})
    for q in range(degs[0], degs[-1] + 2):
        tq = ops.get(q, RationalMatrix.identity(betti[q]))
        tq1 = ops.get(q - 1, RationalMatrix.identity(betti[q - 1]))
        ker = (tq - RationalMatrix.identity(betti[q])).kernel_basis().cols if betti[q] else 0
        delta1 = tq1 - RationalMatrix.identity(betti[q - 1])
        coker = betti[q - 1] - delta1.rank() if betti[q - 1] else 0
        if ker + coker:
            out[q] = ker + coker
    return GradedDims(out)


def cyclic_pushforward(n: int, rep: MonodromyRep) -> MonodromyRep:
    """Direct image along the degree-n circle cover: rank multiplies by n and
    the monodromy becomes the companion-style block permutation twist."""
    if n < 1:
        raise MonodromyError("cover degree must be at least 1")
    if len(rep.generators) != 1:
        raise MonodromyError("pushforward along a circle cover needs a circle local system")
    T = rep.generators[0]
    r = rep.rank
    size = n * r
    rows = [[Fraction(0)] * size for _ in range(size)]
    # sheet i maps to sheet i+1; the last sheet wraps through T
    for i in range(n - 1):
        for a in range(r):
            rows[(i + 1) * r + a][i * r + a] = Fraction(1)
    for a in range(r):
        for b in range(r):
            if T.data[a][b]:
                rows[a][(n - 1) * r + b] = T.data[a][b]
    return MonodromyRep(size, (RationalMatrix(rows),))


# ---------------------------------------------------------------------------
# finite-image machinery
# ---------------------------------------------------------------------------


def group_closure(generators, cap=10000):
    """All group elements generated, or an error if the cap is exceeded."""
    if not generators:
        return [RationalMatrix.identity(1)]
    n = generators[0].rows
    ident = RationalMatrix.identity(n)
    seen = {ident: ident}
    frontier = [ident]
    gens = list(generators) + [g.inverse() for g in generators]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen[y] = y
                    nxt.append(y)
                    if len(seen) > cap:
                        raise MonodromyError(
                            f"monodromy image not verifiably finite (cap {cap} exceeded)"
                        )
        frontier = nxt
    return list(seen)


def averaging_projector(elements) -> RationalMatrix:
    n = elements[0].rows
    acc = RationalMatrix.zeros(n, n)
    for g in elements:
        acc = acc + g
    return acc.scale(Fraction(1, len(elements)))


@dataclass
class IsotypicPiece:
    simple_rank: int
    multiplicity: int
    endo_dim_of_simple: int
    projector: RationalMatrix

    @property
    def rank(self):
        return self.simple_rank * self.multiplicity


def _min_poly(z: RationalMatrix):
    """Minimal polynomial of a matrix, as sympy Poly over the rationals."""
    x = sympy.Symbol("x")
    n = z.rows
    powers = [RationalMatrix.identity(n)]
    while True:
        powers.append(powers[-1] * z)
        flat = RationalMatrix.from_columns(
            [[p.data[i][j] for i in range(n) for j in range(n)] for p in powers]
        )
        ker = flat.kernel_basis()
        if ker.cols:
            coeffs = ker.column(ker.cols - 1)
            poly = sum(sympy.Rational(c.numerator, c.denominator) * x ** i
                       for i, c in enumerate(coeffs))
            return sympy.Poly(poly, x, domain="QQ")


def _poly_at(poly, z: RationalMatrix) -> RationalMatrix:
    n = z.rows
    out = RationalMatrix.zeros(n, n)
    power = RationalMatrix.identity(n)
    for coeff in reversed(poly.all_coeffs()):
        c = Fraction(coeff.p, coeff.q)
        if c:
            out = out + power.scale(c)
        power = power * z
    return out


def _central_idempotents(z: RationalMatrix):
    """Orthogonal idempotents cutting the primary components of a semisimple
    commutative matrix algebra generated by z."""
    x = sympy.Symbol("x")
    m = _min_poly(z)
    factors = [f for f, _ in m.factor_list()[1]]
    if len(factors) == 1:
        return [RationalMatrix.identity(z.rows)]
    idems = []
    for f in factors:
        rest = sympy.Poly(1, x, domain="QQ")
        for g in factors:
            if g != f:
                rest = rest * g
        # invert rest modulo f, then lift: e = rest * inv mod m
        inv = sympy.invert(rest.as_expr(), f.as_expr(), x)
        e_poly = sympy.Poly(sympy.rem(sympy.expand(rest.as_expr() * inv), m.as_expr(), x),
                            x, domain="QQ")
        idems.append(_poly_at(e_poly, z))
    return idems


def _algebra_span(elements, n):
    """Basis (as flattened matrices) of the span of the given matrices."""
    flat = RationalMatrix.from_columns(
        [[g.data[i][j] for i in range(n) for j in range(n)] for g in elements]
    )
    piv = flat.pivot_columns()
    return [elements[j] for j in piv]


def _submodule_generated(basis_mats, vec, n) -> RationalMatrix:
    cols = []
    for g in basis_mats:
        cols.append(g.apply(vec))
    return span_basis(RationalMatrix.from_columns(cols))


def _invariant_complement(space: RationalMatrix, sub: RationalMatrix, form: RationalMatrix):
    """Complement of sub inside space, orthogonal for the invariant form."""
    pairing = sub.transpose() * form
    gram = pairing * space
    ker = gram.kernel_basis()
    return span_basis(space * ker)


def isotypic_decomposition(rep: MonodromyRep, cap=10000, seed=7):
    """Isotypic pieces (simple rank, multiplicity) of a finite-image rational
    representation.

    The isotypic projectors come from the primary decomposition of the center
    of the matrix algebra spanned by the group; inside each isotypic piece,
    simple summands are found by a seeded splitting search (cyclic submodules
    plus invariant orthogonal complements) and certified mutually isomorphic.
    """
    n = rep.rank
    if n == 0:
        return []
    elements = group_closure(rep.generators, cap) if rep.generators else [RationalMatrix.identity(n)]
    algebra = _algebra_span(elements, n)
    rng = random.Random(seed)

    # invariant positive-definite form: sum of g^T g
    form = RationalMatrix.zeros(n, n)
    for g in elements:
        form = form + g.transpose() * g

    # center of the algebra: elements of the span commuting with the generators
    center = _center_basis(algebra, rep.generators or [RationalMatrix.identity(n)], n)
    z = _generic_element(center, rng)
    idems = _central_idempotents(z)
    # verify: orthogonal idempotents summing to the identity
    total = RationalMatrix.zeros(n, n)
    for i, e in enumerate(idems):
        assert (e * e) == e, "central idempotent is not idempotent"
        for f in idems[i + 1:]:
            assert (e * f).is_zero() and (f * e).is_zero(), "idempotents not orthogonal"
        total = total + e
    assert total == RationalMatrix.identity(n), "idempotents do not sum to the identity"

    pieces = []
    for e in idems:
        space = _image_basis(e)
        simples = _split_into_simples(algebra, space, form, rng, n)
        first = simples[0]
        endo = _equivariant_maps(rep.generators, first, first, n).cols
        for other in simples[1:]:
            if not _are_isomorphic(rep.generators, first, other, n, rng):
                raise MonodromyError("isotypic piece contains non-isomorphic simples")
        pieces.append(
            IsotypicPiece(
                simple_rank=first.cols,
                multiplicity=len(simples),
                endo_dim_of_simple=endo,
                projector=e,
            )
        )
    assert sum(p.rank for p in pieces) == n
    return pieces


def _image_basis(m: RationalMatrix) -> RationalMatrix:
    return span_basis(m)


def _center_basis(algebra, constraints, n):
    """Basis of the center: elements of the algebra span commuting with the
    given constraint matrices (the generators suffice)."""
    rows = []
    for g in constraints:
        comms = [b * g - g * b for b in algebra]
        for i in range(n):
            for j in range(n):
                rows.append([c.data[i][j] for c in comms])
    system = RationalMatrix(rows) if rows else RationalMatrix.zeros(0, len(algebra))
    ker = system.kernel_basis()
    out = []
    for jcol in range(ker.cols):
        coeffs = ker.column(jcol)
        acc = RationalMatrix.zeros(n, n)
        for c, b in zip(coeffs, algebra):
            if c:
                acc = acc + b.scale(c)
        out.append(acc)
    return out


def _generic_element(basis, rng):
    if len(basis) == 1:
        return basis[0]
    for attempt in range(50):
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in basis]
        acc = RationalMatrix.zeros(basis[0].rows, basis[0].rows)
        for c, b in zip(coeffs, basis):
            acc = acc + b.scale(c)
        m = _min_poly(acc)
        if m.degree() == _max_center_degree(basis):
            return acc
    return acc


def _max_center_degree(basis):
    return len(basis)


def _split_into_simples(algebra, space, form, rng, n):
    """Split an invariant subspace into simple invariant summands."""
    if space.cols == 0:
        return []
    candidates = list(range(space.cols))
    best = None
    for j in candidates:
        sub = _submodule_generated(algebra, space.column(j), n)
        if best is None or sub.cols < best.cols:
            best = sub
    for _ in range(6):
        coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(space.cols)]
        vec = [sum(c * space.data[i][j] for j, c in enumerate(coeffs)) for i in range(n)]
        if all(x == 0 for x in vec):
            continue
        sub = _submodule_generated(algebra, vec, n)
        if sub.cols and sub.cols < best.cols:
            best = sub
    if best.cols == space.cols:
        return [space]
    rest = _invariant_complement(space, best, form)
    assert best.cols + rest.cols == space.cols
    return [best] + _split_into_simples(algebra, rest, form, rng, n)


def _equivariant_maps(generators, src: RationalMatrix, dst: RationalMatrix, n):
    """Basis of maps src -> dst commuting with the action (as coefficient
    kernels of the intertwining system)."""
    a, b = src.cols, dst.cols
    if a == 0 or b == 0:
        return RationalMatrix.zeros(0, 0)
    # unknowns: the b x a matrix M with  (g|dst) M = M (g|src) for all g
    restr = {}
    for g in generators:
        rs = dst_coords(src, g * src)
        rd = dst_coords(dst, g * dst)
        if rs is None or rd is None:
            raise MonodromyError("subspace is not invariant")
        restr[g] = (rs, rd)
    unknowns = a * b
    sys_rows = []
    for g in generators:
        rs, rd = restr[g]
        for i in range(b):
            for j in range(a):
                row = [Fraction(0)] * unknowns
                # (rd M - M rs)_{ij}
                for k in range(b):
                    row[k * a + j] += rd.data[i][k]
                for k in range(a):
                    row[i * a + k] -= rs.data[k][j]
                sys_rows.append(row)
    system = RationalMatrix(sys_rows) if sys_rows else RationalMatrix.zeros(0, unknowns)
    return system.kernel_basis()


def dst_coords(basis: RationalMatrix, vectors: RationalMatrix):
    return basis.solve_matrix(vectors)


def _are_isomorphic(generators, p: RationalMatrix, q: RationalMatrix, n, rng):
    if p.cols != q.cols:
        return False
    homs = _equivariant_maps(generators, p, q, n)
    if homs.cols == 0:
        return False
    a = p.cols
    for _ in range(20):
        coeffs = [Fraction(rng.randint(-5, 5)) for _ in range(homs.cols)]
        flat = [sum(c * homs.data[i][j] for j, c in enumerate(coeffs)) for i in range(homs.rows)]
        m = RationalMatrix([[flat[i * a + j] for j in range(a)] for i in range(a)])
        if m.is_invertible():
            return True
    return False
