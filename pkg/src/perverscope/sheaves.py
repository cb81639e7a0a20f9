"""Cellular sheaves on cell sites and their cohomology.

A sheaf assigns a rational vector space to each cell and a restriction matrix
to each cover relation, functorially.  Two section models are used:

* the incidence complex (one summand per cell, graded by cell dimension)
  computes compactly supported cohomology of the model; on closure-complete
  compact models it is ordinary cohomology;
* derived sections over any up-closed subset are computed by the complex of
  strictly increasing cell chains, collapsing to the stalk when the subset
  has a minimal element (sections over a star are the stalk there).

Derived pushforward is represented by its star model: the value at a target
cell is the derived-sections complex over the preimage of its open star.
"""

from __future__ import annotations

from fractions import Fraction

from .complexes import ChainMap, CochainComplex, GradedDims, mapping_cone
from .ratlin import RationalMatrix
from .sites import CellMap, CellSite, SiteError


class SheafError(ValueError):
    pass


class CellSheaf:
    def __init__(self, site: CellSite, stalk_dim, restr, check=True):
        self.site = site
        self.stalk_dim = {c: int(stalk_dim.get(c, 0)) for c in site.cells}
        self.restr = dict(restr)
        if check:
            self._validate()

    def _validate(self):
        for (a, b), m in self.restr.items():
            if (a, b) not in self.site.covers:
                raise SheafError(f"restriction on non-cover pair ({a!r}, {b!r})")
            if (m.rows, m.cols) != (self.stalk_dim[b], self.stalk_dim[a]):
                raise SheafError(f"restriction ({a!r}, {b!r}) has wrong shape")
        for pair in self.site.covers:
            if pair not in self.restr and self.stalk_dim[pair[0]] and self.stalk_dim[pair[1]]:
                raise SheafError(f"missing restriction for cover {pair!r}")
        # functoriality: both routes around every diamond agree
        for a in self.site.cells:
            routes = {}
            for m in self._children(a):
                for b in self._children(m):
                    comp = self.restriction(m, b) * self.restriction(a, m)
                    if b in routes:
                        if routes[b] != comp:
                            raise SheafError(f"restrictions not functorial between {a!r} and {b!r}")
                    else:
                        routes[b] = comp

    def _children(self, a):
        return [b for (x, b) in self.site.covers if x == a]

    def restriction(self, a, b) -> RationalMatrix:
        """Restriction along any comparable pair, composed through covers."""
        if a == b:
            return RationalMatrix.identity(self.stalk_dim[a])
        if (a, b) in self.restr:
            return self.restr[(a, b)]
        if (a, b) in self.site.covers:
            return RationalMatrix.zeros(self.stalk_dim[b], self.stalk_dim[a])
        for m in self._children(a):
            if self.site.leq(m, b):
                return self.restriction(m, b) * self.restriction(a, m)
        raise SheafError(f"cells {a!r} and {b!r} are not comparable")

    @classmethod
    def constant(cls, site: CellSite, rank=1) -> "CellSheaf":
        dims = {c: rank for c in site.cells}
        restr = {pair: RationalMatrix.identity(rank) for pair in site.covers}
        return cls(site, dims, restr, check=False)

    @classmethod
    def skyscraper(cls, site: CellSite, cell, rank=1) -> "CellSheaf":
        dims = {c: (rank if c == cell else 0) for c in site.cells}
        restr = {
            pair: RationalMatrix.zeros(dims[pair[1]], dims[pair[0]]) for pair in site.covers
        }
        return cls(site, dims, restr, check=False)

    @classmethod
    def zero(cls, site: CellSite) -> "CellSheaf":
        return cls.skyscraper(site, None, 0)


class SheafComplex:
    """Bounded complex of cellular sheaves: cellwise differentials commuting
    with all restriction maps."""

    def __init__(self, site: CellSite, terms, diffs, check=True):
        self.site = site
        self.terms = {int(q): sheaf for q, sheaf in terms.items()}
        self.diffs = {int(q): {c: m for c, m in per_cell.items() if not m.is_zero()}
                      for q, per_cell in diffs.items()}
        self.diffs = {q: d for q, d in self.diffs.items() if d}
        if check:
            self._validate()

    def _validate(self):
        for q, per_cell in self.diffs.items():
            for c, m in per_cell.items():
                expected = (self.stalk_dim(c, q + 1), self.stalk_dim(c, q))
                if (m.rows, m.cols) != expected:
                    raise SheafError(f"differential at cell {c!r}, degree {q}: wrong shape")
        for c in self.site.cells:
            for q in self.degrees():
                comp = self.diff_at(c, q + 1) * self.diff_at(c, q)
                if not comp.is_zero():
                    raise SheafError(f"d.d != 0 at cell {c!r}, degree {q}")
        for (a, b) in self.site.covers:
            for q in self.degrees():
                lhs = self.restriction(a, b, q + 1) * self.diff_at(a, q)
                rhs = self.diff_at(b, q) * self.restriction(a, b, q)
                if lhs != rhs:
                    raise SheafError(
                        f"differential does not commute with restriction ({a!r}, {b!r}) at degree {q}"
                    )

    # -- structure ----------------------------------------------------------

    def degrees(self):
        return sorted(self.terms)

    def term(self, q) -> CellSheaf:
        if q in self.terms:
            return self.terms[q]
        return CellSheaf.zero(self.site)

    def stalk_dim(self, cell, q) -> int:
        return self.term(q).stalk_dim.get(cell, 0) if q in self.terms else 0

    def diff_at(self, cell, q) -> RationalMatrix:
        m = self.diffs.get(q, {}).get(cell)
        if m is not None:
            return m
        return RationalMatrix.zeros(self.stalk_dim(cell, q + 1), self.stalk_dim(cell, q))

    def restriction(self, a, b, q) -> RationalMatrix:
        if q in self.terms:
            return self.term(q).restriction(a, b)
        return RationalMatrix.zeros(self.stalk_dim(b, q), self.stalk_dim(a, q))

    @classmethod
    def from_sheaf(cls, sheaf: CellSheaf, degree=0) -> "SheafComplex":
        return cls(sheaf.site, {degree: sheaf}, {}, check=False)

    @classmethod
    def constant(cls, site: CellSite, rank=1, degree=0) -> "SheafComplex":
        return cls.from_sheaf(CellSheaf.constant(site, rank), degree)

    @classmethod
    def skyscraper(cls, site: CellSite, cell, rank=1, degree=0) -> "SheafComplex":
        return cls.from_sheaf(CellSheaf.skyscraper(site, cell, rank), degree)

    # -- stalks ---------------------------------------------------------------

    def stalk_complex(self, cell) -> CochainComplex:
        dims = {q: self.stalk_dim(cell, q) for q in self.degrees()}
        diffs = {q: self.diff_at(cell, q) for q in self.degrees()}
        return CochainComplex(dims, diffs, check=False)

    def stalk_restriction(self, a, b) -> ChainMap:
        maps = {q: self.restriction(a, b, q) for q in self.degrees()}
        return ChainMap(self.stalk_complex(a), self.stalk_complex(b), maps, check=False)

    # -- constructions ----------------------------------------------------------

    def shift(self, a: int) -> "SheafComplex":
        sign = -1 if a % 2 else 1
        terms = {q - a: s for q, s in self.terms.items()}
        diffs = {}
        for q, per_cell in self.diffs.items():
            diffs[q - a] = {c: (m.scale(sign) if sign < 0 else m) for c, m in per_cell.items()}
        return SheafComplex(self.site, terms, diffs, check=False)

    def truncate_leq(self, k: int) -> "SheafComplex":
        """Cellwise standard truncation; kernels stay functorial because the
        differentials commute with the restrictions."""
        degs = self.degrees()
        if not degs or k >= degs[-1]:
            return self
        kernels = {c: self.diff_at(c, k).kernel_basis() for c in self.site.cells}
        terms = {q: s for q, s in self.terms.items() if q < k}
        restr_k = {}
        for (a, b) in self.site.covers:
            img = self.restriction(a, b, k) * kernels[a]
            sol = kernels[b].solve_matrix(img)
            if sol is None:
                raise SheafError("kernel sheaf is not functorial (truncation failed)")
            restr_k[(a, b)] = sol
        terms[k] = CellSheaf(self.site, {c: kernels[c].cols for c in self.site.cells}, restr_k, check=False)
        diffs = {q: d for q, d in self.diffs.items() if q < k - 1}
        lower = {}
        for c in self.site.cells:
            d = self.diff_at(c, k - 1)
            if d.is_zero():
                continue
            sol = kernels[c].solve_matrix(d)
            if sol is None:
                raise SheafError("image of d^{k-1} escapes ker d^k (truncation failed)")
            lower[c] = sol
        if lower:
            diffs[k - 1] = lower
        return SheafComplex(self.site, terms, diffs, check=False)

    def direct_sum(self, other: "SheafComplex") -> "SheafComplex":
        if self.site is not other.site and self.site.cells != other.site.cells:
            raise SheafError("direct sum of sheaves on different sites")
        terms = {}
        for q in sorted(set(self.degrees()) | set(other.degrees())):
            dims = {c: self.stalk_dim(c, q) + other.stalk_dim(c, q) for c in self.site.cells}
            restr = {
                pair: RationalMatrix.block_diag(
                    [self.restriction(pair[0], pair[1], q), other.restriction(pair[0], pair[1], q)]
                )
                for pair in self.site.covers
            }
            terms[q] = CellSheaf(self.site, dims, restr, check=False)
        diffs = {}
        for q in sorted(set(self.degrees()) | set(other.degrees())):
            per_cell = {}
            for c in self.site.cells:
                m = RationalMatrix.block_diag([self.diff_at(c, q), other.diff_at(c, q)])
                if not m.is_zero():
                    per_cell[c] = m
            if per_cell:
                diffs[q] = per_cell
        return SheafComplex(self.site, terms, diffs, check=False)

    def restrict(self, cells, compact=None, affine=None) -> "SheafComplex":
        sub = self.site.subsite(cells, compact=compact, affine=affine)
        terms = {
            q: CellSheaf(
                sub,
                {c: s.stalk_dim[c] for c in sub.cells},
                {pair: s.restr[pair] for pair in sub.covers if pair in s.restr},
                check=False,
            )
            for q, s in self.terms.items()
        }
        diffs = {
            q: {c: m for c, m in per_cell.items() if c in sub.dims}
            for q, per_cell in self.diffs.items()
        }
        return SheafComplex(sub, terms, diffs, check=False)


# ---------------------------------------------------------------------------
# incidence (cell) model: compactly supported sections
# ---------------------------------------------------------------------------


class BlockLayout:
    """Deterministic block bookkeeping for complexes assembled from pieces."""

    def __init__(self):
        self.by_degree = {}
        self.offsets = {}

    def add(self, degree, key, size):
        if size <= 0:
            return
        blocks = self.by_degree.setdefault(degree, [])
        self.offsets[(degree, key)] = sum(s for _, s in blocks)
        blocks.append((key, size))

    def dim(self, degree):
        return sum(s for _, s in self.by_degree.get(degree, []))

    def offset(self, degree, key):
        return self.offsets.get((degree, key))

    def size(self, degree, key):
        off = self.offsets.get((degree, key))
        if off is None:
            return 0
        for k, s in self.by_degree[degree]:
            if k == key:
                return s
        return 0


def _assemble(layout: BlockLayout, entries) -> tuple[dict, dict]:
    """entries: list of (degree, src_key, dst_key, matrix) with dst at degree+1.

    Returns (dims, diffs) for a CochainComplex.
    """
    dims = {d: layout.dim(d) for d in layout.by_degree}
    raw = {}
    for degree, src, dst, m in entries:
        if m.is_zero():
            continue
        r0 = layout.offset(degree + 1, dst)
        c0 = layout.offset(degree, src)
        if r0 is None or c0 is None:
            continue
        rows = layout.dim(degree + 1)
        cols = layout.dim(degree)
        grid = raw.setdefault(degree, [[Fraction(0)] * cols for _ in range(rows)])
        for i in range(m.rows):
            row = m.data[i]
            for j in range(m.cols):
                if row[j]:
                    grid[r0 + i][c0 + j] = row[j]
    diffs = {d: RationalMatrix(g) for d, g in raw.items()}
    return dims, diffs


def sections_complex(K: SheafComplex, site: CellSite = None):
    """Total complex of the incidence double complex (cell dimension x degree).

    Computes compactly supported cohomology of the model; equals ordinary
    cohomology on compact (closure-complete) models.
    """
    site = site or K.site
    if site.cells != K.site.cells:
        raise SheafError("sheaf lives on a different site")
    layout = BlockLayout()
    for t in _incidence_degrees(K, site):
        for c in site.cells:
            q = t - site.dims[c]
            layout.add(t, (c, q), K.stalk_dim(c, q))
    entries = []
    for t in _incidence_degrees(K, site):
        for c in site.cells:
            q = t - site.dims[c]
            if K.stalk_dim(c, q) == 0:
                continue
            sign = -1 if site.dims[c] % 2 else 1
            vert = K.diff_at(c, q)
            entries.append((t, (c, q), (c, q + 1), vert.scale(sign) if sign < 0 else vert))
            for (a, b), eps in site.covers.items():
                if a != c:
                    continue
                m = K.restriction(a, b, q)
                entries.append((t, (c, q), (b, q), m.scale(eps) if eps < 0 else m))
    dims, diffs = _assemble(layout, entries)
    return CochainComplex(dims, diffs, check=False)


def _incidence_degrees(K, site):
    degs = K.degrees()
    if not degs:
        return []
    lo = min(degs)
    hi = max(degs) + max(site.dims.values(), default=0)
    return range(lo, hi + 2)


def compact_sections_complex(K: SheafComplex, site: CellSite, open_cells) -> CochainComplex:
    """Sections of the extension by zero over the ambient site.

    The ambient must be declared compact (closure-complete): compactly
    supported cohomology needs a full model of the space, there is no
    automatic compactification.
    """
    if not site.compact:
        raise SheafError(
            "compactly supported sections need a compactification: "
            "declare the ambient site compact (closure-complete) or embed the "
            "open set in one"
        )
    if not site.is_up_closed(open_cells):
        raise SheafError("compact supports are taken over an open (up-closed) subset")
    return sections_complex(K.restrict(open_cells))


# ---------------------------------------------------------------------------
# derived sections over up-closed subsets (chain model with stalk shortcut)
# ---------------------------------------------------------------------------


class SectionsModel:
    """Model of derived sections over a cell subset.

    kind == "stalk": the subset has a minimal element m and the model is the
    stalk complex there.  kind == "bar": the complex of strictly increasing
    chains with coefficients in the value at the top cell of each chain.
    """

    def __init__(self, K, site, cells, kind, complex, min_cell=None, layout=None):
        self.K = K
        self.site = site
        self.cells = frozenset(cells)
        self.kind = kind
        self.complex = complex
        self.min_cell = min_cell
        self.layout = layout

    @classmethod
    def build(cls, K: SheafComplex, cells, site: CellSite = None, reduce=True) -> "SectionsModel":
        site = site or K.site
        cells = frozenset(cells)
        if not cells:
            return cls(K, site, cells, "bar", CochainComplex.zero(), layout=BlockLayout())
        if reduce:
            minimal = [c for c in cells if all(not site.leq(d, c) for d in cells if d != c)]
            if len(minimal) == 1 and all(site.leq(minimal[0], c) for c in cells):
                m = minimal[0]
                return cls(K, site, cells, "stalk", K.stalk_complex(m), min_cell=m)
        chains = site.chains(cells)
        layout = BlockLayout()
        qs = K.degrees()
        if not qs:
            return cls(K, site, cells, "bar", CochainComplex.zero(), layout=BlockLayout())
        maxlen = max(len(ch) for ch in chains)
        for t in range(qs[0], qs[-1] + maxlen):
            for ch in chains:
                q = t - (len(ch) - 1)
                layout.add(t, (ch, q), K.stalk_dim(ch[-1], q))
        entries = []
        chain_set = set(chains)
        for t in sorted(layout.by_degree):
            for (ch, q), size in layout.by_degree[t]:
                n = len(ch) - 1
                # internal differential with Koszul sign
                vert = K.diff_at(ch[-1], q)
                if n % 2:
                    vert = vert.scale(-1)
                entries.append((t, (ch, q), (ch, q + 1), vert))
        # chain-extension part: iterate over longer chains and their faces
        for ch in chains:
            if len(ch) == 1:
                continue
            n = len(ch) - 1
            for i in range(len(ch)):
                face = ch[:i] + ch[i + 1:]
                if face not in chain_set:
                    continue
                for q in qs:
                    size = K.stalk_dim(ch[-1], q)
                    if size == 0:
                        continue
                    t = q + (len(face) - 1)
                    sign = (-1) ** i
                    if i < len(ch) - 1:
                        m = RationalMatrix.identity(size)
                    else:
                        m = K.restriction(ch[-2], ch[-1], q)
                    if layout.offset(t, (face, q)) is None:
                        continue
                    entries.append((t, (face, q), (ch, q), m.scale(sign) if sign < 0 else m))
        dims, diffs = _assemble(layout, entries)
        return cls(K, site, cells, "bar", CochainComplex(dims, diffs, check=False), layout=layout)

    # -- restriction maps between models -------------------------------------

    def restriction_to(self, other: "SectionsModel") -> ChainMap:
        """The section restriction map: other.cells must be a subset."""
        if not other.cells <= self.cells:
            raise SheafError("restriction target is not a subset")
        K = self.K
        if self.kind == "stalk" and other.kind == "stalk":
            maps = {q: K.restriction(self.min_cell, other.min_cell, q) for q in K.degrees()}
            return ChainMap(self.complex, other.complex, maps, check=False)
        if self.kind == "stalk":
            maps = {}
            for t in other.layout.by_degree:
                rows = other.complex.dim(t)
                cols = self.complex.dim(t)
                grid = [[Fraction(0)] * cols for _ in range(rows)]
                for (ch, q), size in other.layout.by_degree[t]:
                    if len(ch) != 1 or K.stalk_dim(self.min_cell, q) == 0:
                        continue
                    m = K.restriction(self.min_cell, ch[0], q)
                    r0 = other.layout.offset(t, (ch, q))
                    for i in range(m.rows):
                        for j in range(m.cols):
                            if m.data[i][j]:
                                grid[r0 + i][j] = m.data[i][j]
                maps[t] = _mat(grid, rows, cols)
            return ChainMap(self.complex, other.complex, maps, check=False)
        if other.kind == "stalk":
            m0 = other.min_cell
            maps = {}
            for t in self.layout.by_degree:
                rows = other.complex.dim(t)
                cols = self.complex.dim(t)
                grid = [[Fraction(0)] * cols for _ in range(rows)]
                off = self.layout.offset(t, ((m0,), t))
                if off is not None:
                    for i in range(rows):
                        grid[i][off + i] = Fraction(1)
                maps[t] = _mat(grid, rows, cols)
            return ChainMap(self.complex, other.complex, maps, check=False)
        maps = {}
        for t in self.layout.by_degree:
            rows = other.complex.dim(t)
            cols = self.complex.dim(t)
            grid = [[Fraction(0)] * cols for _ in range(rows)]
            for (ch, q), size in other.layout.by_degree.get(t, []):
                src = self.layout.offset(t, (ch, q))
                dst = other.layout.offset(t, (ch, q))
                if src is None:
                    continue
                for i in range(size):
                    grid[dst + i][src + i] = Fraction(1)
            maps[t] = _mat(grid, rows, cols)
        return ChainMap(self.complex, other.complex, maps, check=False)


def derived_sections(K: SheafComplex, cells=None, site: CellSite = None, reduce=True) -> CochainComplex:
    site = site or K.site
    cells = frozenset(site.cells if cells is None else cells)
    if not site.is_up_closed(cells):
        raise SheafError("derived sections are taken over open (up-closed) subsets")
    return SectionsModel.build(K, cells, site, reduce=reduce).complex


def global_cohomology(K: SheafComplex, site: CellSite = None) -> GradedDims:
    return derived_sections(K, site=site).cohomology()


def compact_cohomology(K: SheafComplex, site: CellSite = None) -> GradedDims:
    return sections_complex(K, site).cohomology()


# ---------------------------------------------------------------------------
# stalk-level operations
# ---------------------------------------------------------------------------


def derived_stalk(K: SheafComplex, cell) -> GradedDims:
    """Cohomology of sections over the open star; the star has the cell as a
    minimal element, so this is the cohomology of the stalk complex."""
    if cell not in K.site.dims:
        raise SheafError(f"unknown cell {cell!r}")
    return K.stalk_complex(cell).cohomology()


def costalk_complex(K: SheafComplex, cell) -> CochainComplex:
    """Sections supported at the cell: shifted cone of the restriction from
    the star to the punctured star, normalized so the constant sheaf on an
    n-dimensional manifold-like star lands in degree n."""
    site = K.site
    star = site.open_star(cell)
    punct = star - {cell}
    stalk = K.stalk_complex(cell)
    if not punct:
        return stalk
    target = SectionsModel.build(K, punct, site)
    source = SectionsModel(K, site, star, "stalk", stalk, min_cell=cell)
    cone = mapping_cone(source.restriction_to(target))
    return cone.shift(-1)


def costalk(K: SheafComplex, cell) -> GradedDims:
    return costalk_complex(K, cell).cohomology()


# ---------------------------------------------------------------------------
# pushforward, extension by zero
# ---------------------------------------------------------------------------


def pushforward(K: SheafComplex, f: CellMap) -> SheafComplex:
    """Derived pushforward via star models: the value at a target cell is the
    derived-sections complex over the preimage of its open star."""
    if f.source.cells != K.site.cells:
        raise SheafError("sheaf does not live on the source of the map")
    target = f.target
    models = {}
    for c in target.cells:
        pre = f.preimage(target.open_star(c))
        # full chain models keep the restriction maps strictly functorial
        # (these are plain projections); collapsing a star to its stalk is
        # only quasi-isomorphic and would break functoriality on the nose
        models[c] = SectionsModel.build(K, pre, f.source, reduce=False)
    qs = sorted({q for c in target.cells for q in models[c].complex.degrees()})
    if not qs:
        return SheafComplex(target, {}, {}, check=False)
    restro = {}
    for pair in target.covers:
        a, b = pair
        restro[pair] = models[a].restriction_to(models[b])
    terms = {}
    diffs = {}
    for q in range(qs[0], qs[-1] + 1):
        dims = {c: models[c].complex.dim(q) for c in target.cells}
        restr = {pair: cm.map_at(q) for pair, cm in restro.items()}
        terms[q] = CellSheaf(target, dims, restr, check=False)
        per_cell = {c: models[c].complex.diff(q) for c in target.cells}
        per_cell = {c: m for c, m in per_cell.items() if not m.is_zero()}
        if per_cell:
            diffs[q] = per_cell
    return SheafComplex(target, terms, diffs, check=False)


def extend_by_zero(K: SheafComplex, ambient: CellSite) -> SheafComplex:
    """j_! along the open inclusion of K's site into the ambient site."""
    inner = set(K.site.cells)
    if not inner <= set(ambient.cells):
        raise SheafError("extension target does not contain the open set")
    if not ambient.is_up_closed(inner):
        raise SheafError("extension by zero only along open (up-closed) inclusions")
    terms = {}
    diffs = {}
    for q in K.degrees():
        s = K.term(q)
        dims = {c: s.stalk_dim.get(c, 0) if c in inner else 0 for c in ambient.cells}
        restr = {}
        for pair in ambient.covers:
            if pair[0] in inner and pair[1] in inner:
                restr[pair] = s.restriction(pair[0], pair[1])
            else:
                restr[pair] = RationalMatrix.zeros(dims[pair[1]], dims[pair[0]])
        terms[q] = CellSheaf(ambient, dims, restr, check=False)
    for q, per_cell in K.diffs.items():
        diffs[q] = dict(per_cell)
    return SheafComplex(ambient, terms, diffs, check=False)


# ---------------------------------------------------------------------------
# attaching long exact sequences (rank verification)
# ---------------------------------------------------------------------------


def _mat(grid, rows, cols) -> RationalMatrix:
    return RationalMatrix(grid) if rows else RationalMatrix.zeros(rows, cols)


def _incidence_offsets(K, site, t):
    """Block offsets of the incidence complex at total degree t (sorted cells)."""
    offsets = {}
    acc = 0
    for c in site.cells:
        q = t - site.dims[c]
        size = K.stalk_dim(c, q)
        if size:
            offsets[c] = (acc, size)
            acc += size
    return offsets


def incidence_restriction_to_closed(K: SheafComplex, closed_cells) -> ChainMap:
    """Quotient map of incidence complexes onto a closed subsite."""
    site = K.site
    Z = frozenset(closed_cells)
    if not site.is_down_closed(Z):
        raise SheafError("incidence quotient only onto closed (down-closed) subsets")
    KZ = K.restrict(Z)
    cy = sections_complex(K)
    cz = sections_complex(KZ)
    maps = {}
    for t in set(list(cy.dims) + list(cz.dims)):
        rows, cols = cz.dim(t), cy.dim(t)
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        big_off = _incidence_offsets(K, site, t)
        small_off = _incidence_offsets(KZ, KZ.site, t)
        for c, (r0, size) in small_off.items():
            c0 = big_off[c][0]
            for i in range(size):
                grid[r0 + i][c0 + i] = Fraction(1)
        maps[t] = _mat(grid, rows, cols)
    return ChainMap(cy, cz, maps, check=False)


def incidence_injection_from_open(K: SheafComplex, open_cells) -> ChainMap:
    """Subcomplex map of incidence complexes from an open subsite (extension
    by zero of compactly supported cochains)."""
    site = K.site
    U = frozenset(open_cells)
    if not site.is_up_closed(U):
        raise SheafError("incidence injection only from open (up-closed) subsets")
    KU = K.restrict(U)
    cu = sections_complex(KU)
    cy = sections_complex(K)
    maps = {}
    for t in set(list(cy.dims) + list(cu.dims)):
        rows, cols = cy.dim(t), cu.dim(t)
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        big_off = _incidence_offsets(K, site, t)
        small_off = _incidence_offsets(KU, KU.site, t)
        for c, (c0, size) in small_off.items():
            r0 = big_off[c][0]
            for i in range(size):
                grid[r0 + i][c0 + i] = Fraction(1)
        maps[t] = _mat(grid, rows, cols)
    return ChainMap(cu, cy, maps, check=False)


def attaching_compact_supports(K: SheafComplex, open_cells) -> bool:
    """Exactness (checked via ranks) of ... -> H_c(U) -> H_c(Y) -> H_c(Z) -> ..."""
    from .complexes import check_long_exact

    site = K.site
    U = frozenset(open_cells)
    Z = site.closed_complement(U)
    inc = incidence_injection_from_open(K, U)
    proj = incidence_restriction_to_closed(K, Z)
    cy = inc.target
    rng = range(cy.lo() - 1, cy.hi() + 2)
    maps_a = {i: inc.induced_on_cohomology(i) for i in rng}
    maps_b = {i: proj.induced_on_cohomology(i) for i in rng}
    return check_long_exact(
        maps_a, maps_b, inc.source.cohomology(), cy.cohomology(), proj.target.cohomology()
    )


def attaching_sections(K: SheafComplex, open_cells) -> bool:
    """Exactness (via ranks) of ... -> H_Z(Y) -> H(Y) -> H(U) -> ... for U open."""
    from .complexes import check_long_exact

    site = K.site
    U = frozenset(open_cells)
    if not site.is_up_closed(U):
        raise SheafError("attaching sequence needs an open (up-closed) subset")
    my = SectionsModel.build(K, frozenset(site.cells), site, reduce=False)
    mu = SectionsModel.build(K, U, site, reduce=False)
    proj = my.restriction_to(mu)
    layout_y = my.layout
    kern_layout = BlockLayout()
    for t in sorted(layout_y.by_degree):
        for key, size in layout_y.by_degree[t]:
            ch, q = key
            if not set(ch) <= U:
                kern_layout.add(t, key, size)
    dims = {t: kern_layout.dim(t) for t in kern_layout.by_degree}
    kdiffs = {}
    for t in sorted(dims):
        rows = kern_layout.dim(t + 1)
        cols = dims[t]
        if rows == 0 or cols == 0:
            continue
        big = my.complex.diff(t)
        ridx = []
        for key, size in kern_layout.by_degree.get(t + 1, []):
            off = layout_y.offset(t + 1, key)
            ridx.extend(range(off, off + size))
        cidx = []
        for key, size in kern_layout.by_degree[t]:
            off = layout_y.offset(t, key)
            cidx.extend(range(off, off + size))
        kdiffs[t] = big.submatrix(ridx, cidx)
    ck = CochainComplex(dims, kdiffs, check=False)
    maps = {}
    for t in sorted(dims):
        cols = ck.dim(t)
        rows = my.complex.dim(t)
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        j = 0
        for key, size in kern_layout.by_degree[t]:
            off = layout_y.offset(t, key)
            for i in range(size):
                grid[off + i][j] = Fraction(1)
                j += 1
        maps[t] = _mat(grid, rows, cols)
    inc = ChainMap(ck, my.complex, maps, check=False)
    rng = range(my.complex.lo() - 1, my.complex.hi() + 2)
    maps_a = {i: inc.induced_on_cohomology(i) for i in rng}
    maps_b = {i: proj.induced_on_cohomology(i) for i in rng}
    return check_long_exact(
        maps_a, maps_b, ck.cohomology(), my.complex.cohomology(), mu.complex.cohomology()
    )
