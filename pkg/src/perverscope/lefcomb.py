"""Hard-Lefschetz checks on graded data and the h-vector pipeline for
simplicial polytopes: f/h transforms, symmetry, unimodality, the Macaulay
growth test, and toric Betti numbers."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .complexes import GradedDims
from .ratlin import RationalMatrix


class LefschetzError(ValueError):
    pass


@dataclass
class GradedOperator:
    """Graded dims over [0, 2d] with degree-two maps eta[q]: H^q -> H^{q+2}."""

    dims: GradedDims
    eta: dict

    def __post_init__(self):
        self.dims = GradedDims(self.dims if isinstance(self.dims, dict) else self.dims.d)
        self.eta = {int(q): m for q, m in self.eta.items()}
        for q, m in self.eta.items():
            if (m.rows, m.cols) != (self.dims[q + 2], self.dims[q]):
                raise LefschetzError(f"eta at degree {q} has the wrong shape")

    def eta_at(self, q) -> RationalMatrix:
        if q in self.eta:
            return self.eta[q]
        return RationalMatrix.zeros(self.dims[q + 2], self.dims[q])

    def eta_power(self, q, r) -> RationalMatrix:
        out = RationalMatrix.identity(self.dims[q])
        for step in range(r):
            out = self.eta_at(q + 2 * step) * out
        return out


def hl_check(G: GradedOperator, d: int):
    """eta^r: H^{d-r} -> H^{d+r} an isomorphism for every r >= 0.
    Returns (verdict, failing degrees)."""
    failing = []
    for r in range(0, d + 1):
        m = G.eta_power(d - r, r)
        if m.rows != m.cols or not m.is_invertible():
            failing.append(d - r)
    return (not failing, failing)


def primitive_decomposition(G: GradedOperator, d: int) -> GradedDims:
    """Primitive dims: kernel of eta^{d-q+1} on degree q, for q <= d.
    Checks the reconstruction identity H^q = sum of prim^{q-2j}."""
    ok, failing = hl_check(G, d)
    if not ok:
        raise LefschetzError(f"hard Lefschetz fails in degrees {failing}")
    prim = {}
    for q in range(0, d + 1):
        m = G.eta_power(q, d - q + 1)
        prim[q] = m.kernel_basis().cols
    out = GradedDims(prim)
    for q in range(0, d + 1):
        total = sum(out[q - 2 * j] for j in range(0, q // 2 + 1))
        if total != G.dims[q]:
            raise LefschetzError(f"primitive reconstruction fails in degree {q}")
    return out


# ---------------------------------------------------------------------------
# f- and h-vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HVector:
    d: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.d + 1:
            raise LefschetzError("an h-vector for dimension d has d+1 entries")

    def __getitem__(self, i):
        return self.entries[i]


def f_to_h(f, d: int) -> HVector:
    """h_i = sum_j C(d-j, d-i) (-1)^{i-j} f_{j-1} with f_{-1} = 1."""
    f = tuple(f)
    if len(f) != d:
        raise LefschetzError(f"an f-vector for dimension {d} has {d} entries")
    faces = (1,) + f  # index j reads f_{j-1}
    entries = []
    for i in range(d + 1):
        h = sum(comb(d - j, d - i) * (-1) ** (i - j) * faces[j] for j in range(i + 1))
        entries.append(h)
    return HVector(d, tuple(entries))


def h_to_f(h: HVector):
    """Inverse transform: f_{i-1} = sum_j C(d-j, d-i) h_j."""
    d = h.d
    faces = []
    for i in range(1, d + 1):
        faces.append(sum(comb(d - j, d - i) * h[j] for j in range(i + 1)))
    return tuple(faces)


def macaulay_bound(a: int, i: int) -> int:
    """Upper bound for the next entry of an M-sequence after value a at
    index i (binomial representation growth)."""
    if a == 0:
        return 0
    rep = []
    k = i
    rest = a
    while rest > 0 and k >= 1:
        n = k - 1
        while comb(n + 1, k) <= rest:
            n += 1
        rep.append((n, k))
        rest -= comb(n, k)
        k -= 1
    return sum(comb(n + 1, k + 1) for n, k in rep)


@dataclass
class McMullenReport:
    symmetric: bool
    unimodal: bool
    m_sequence: bool
    g_vector: tuple

    @property
    def ok(self):
        return self.symmetric and self.unimodal and self.m_sequence

    def to_json(self):
        return {
            "symmetric": self.symmetric,
            "unimodal": self.unimodal,
            "m_sequence": self.m_sequence,
            "g_vector": list(self.g_vector),
        }


def mcmullen_check(h: HVector) -> McMullenReport:
    d = h.d
    symmetric = all(h[i] == h[d - i] for i in range(d + 1))
    half = d // 2
    unimodal = all(h[i] <= h[i + 1] for i in range(half))
    g = (h[0],) + tuple(h[i] - h[i - 1] for i in range(1, half + 1))
    m_seq = g[0] == 1 and all(x >= 0 for x in g)
    for i in range(1, len(g) - 1):
        if g[i + 1] > macaulay_bound(g[i], i):
            m_seq = False
    return McMullenReport(symmetric, unimodal, m_seq, g)


def toric_betti(h: HVector) -> GradedDims:
    """Betti numbers of the associated toric model: b_{2i} = h_i, odd zero."""
    return GradedDims({2 * i: h[i] for i in range(h.d + 1)})


def diagonal_eta_model(h: HVector) -> GradedOperator:
    """A degree-two operator on the toric Betti numbers given by coordinate
    inclusions/projections; passes the hard-Lefschetz check whenever the
    h-vector is symmetric and unimodal."""
    dims = toric_betti(h)
    eta = {}
    for q in range(0, 2 * h.d - 1, 2):
        a, b = dims[q], dims[q + 2]
        m = [[1 if i == j else 0 for j in range(a)] for i in range(b)]
        eta[q] = RationalMatrix(m) if a and b else RationalMatrix.zeros(b, a)
    return GradedOperator(dims, eta)
