"""Perverse and Leray filtrations on cohomology.

The geometric description works over declared-affine sites: level b of the
filtration in degree n is the kernel of the restriction to step b - n + 1 of
a flag of closed subsites.  Genericity of a flag is certified, not
synthesized: each perverse constituent must restrict injectively in degrees
<= -k and to zero above (the certificate the flag-kernel description rests
on).  Split complexes get their filtration assembled directly; the classical
Leray filtration comes from standard truncations of the star-model
pushforward.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import ChainMap, GradedDims
from .ratlin import RationalMatrix
from .sites import CellMap, CellSite, Flag
from .sheaves import (
    SectionsModel,
    SheafComplex,
    SheafError,
    global_cohomology,
    pushforward,
)
from .perversity import is_perverse


class FiltrationError(ValueError):
    pass


@dataclass
class FiltrationTable:
    """For each cohomological degree, the increasing sequence of subspace
    dimensions: jumps[n] is a sorted list of (level, cumulative dim)."""

    jumps: dict = field(default_factory=dict)

    @classmethod
    def from_cumulative(cls, data: dict) -> "FiltrationTable":
        jumps = {}
        for n, levels in data.items():
            seq = sorted(levels.items())
            acc = []
            prev = 0
            for b, dim in seq:
                if dim < prev:
                    raise FiltrationError("filtration must be monotone")
                if dim > prev:
                    acc.append((b, dim))
                    prev = dim
            if acc:
                jumps[int(n)] = acc
        return cls(jumps)

    def at(self, n, b) -> int:
        best = 0
        for level, dim in self.jumps.get(n, []):
            if level <= b:
                best = dim
        return best

    def total(self, n) -> int:
        rows = self.jumps.get(n, [])
        return rows[-1][1] if rows else 0

    def totals(self) -> GradedDims:
        return GradedDims({n: self.total(n) for n in self.jumps})

    def graded(self, n) -> dict:
        out = {}
        prev = 0
        for b, dim in self.jumps.get(n, []):
            out[b] = dim - prev
            prev = dim
        return out

    def min_level(self):
        levels = [rows[0][0] for rows in self.jumps.values() if rows]
        return min(levels) if levels else None

    def normalize(self, m=None):
        """Shift levels so the filtration starts at level zero; returns
        (table, m) with new P_b = old P_{b+m}."""
        lowest = self.min_level()
        if lowest is None:
            raise FiltrationError("cannot normalize an all-zero table")
        if m is None:
            m = lowest
        shifted = {n: [(b - m, dim) for b, dim in rows] for n, rows in self.jumps.items()}
        return FiltrationTable(shifted), m

    def __eq__(self, other):
        return isinstance(other, FiltrationTable) and self.jumps == other.jumps

    def difference_cells(self, other: "FiltrationTable"):
        """(degree, level) spots where the two tables disagree."""
        cells = []
        degrees = set(self.jumps) | set(other.jumps)
        for n in sorted(degrees):
            levels = {b for b, _ in self.jumps.get(n, [])} | {b for b, _ in other.jumps.get(n, [])}
            for b in sorted(levels):
                if self.at(n, b) != other.at(n, b):
                    cells.append((n, b))
        return cells

    def to_json(self):
        raw = {
            str(n): {str(b): dim for b, dim in rows}
            for n, rows in sorted(self.jumps.items())
        }
        normalized, m = self.normalize()
        return {
            "schema": "perverscope/table-v1",
            "raw": raw,
            "normalization_shift": m,
            "normalized": {
                str(n): {str(b): dim for b, dim in rows}
                for n, rows in sorted(normalized.jumps.items())
            },
        }

    @classmethod
    def from_json(cls, obj) -> "FiltrationTable":
        data = {
            int(n): {int(b): dim for b, dim in rows.items()}
            for n, rows in obj["raw"].items()
        }
        return cls.from_cumulative(data)


# ---------------------------------------------------------------------------
# flag-kernel description
# ---------------------------------------------------------------------------


def _restriction_kernels(K: SheafComplex, flag: Flag):
    """kernel_dims[(n, k)] of H^n(Y, K) -> H^n(Y_k, K|)."""
    site = K.site
    model = SectionsModel.build(K, frozenset(site.cells), site, reduce=False)
    h = model.complex.cohomology()
    kernels = {}
    for k in range(0, flag.depth() + 1):
        cells = flag.step(k)
        if cells == frozenset(site.cells):
            ranks = {n: h[n] for n in h.degrees()}
        elif not cells:
            ranks = {n: 0 for n in h.degrees()}
        else:
            sub = SectionsModel.build(K, cells, site, reduce=True)
            restr = model.restriction_to(sub)
            ranks = {n: restr.induced_on_cohomology(n).rank() for n in h.degrees()}
        for n in h.degrees():
            kernels[(n, k)] = h[n] - ranks[n]
    return h, kernels


def flag_kernel_filtration(K: SheafComplex, flag: Flag, site: CellSite = None) -> FiltrationTable:
    """P_b H^n = Ker(H^n(Y, K) -> H^n(Y_{b-n+1}, K|)) over a declared-affine
    site with a certified flag."""
    site = site or K.site
    if not site.affine:
        raise FiltrationError("the flag-kernel description needs a declared-affine site")
    if flag.site.cells != site.cells:
        raise FiltrationError("flag lives on a different site")
    h, kernels = _restriction_kernels(K, flag)
    data = {}
    for n in h.degrees():
        levels = {}
        for b in range(n - 1, n + flag.depth() + 1):
            k = b - n + 1
            k = max(0, min(k, flag.depth()))
            levels[b] = kernels[(n, k)]
        data[n] = levels
    return FiltrationTable.from_cumulative(data)


def check_flag_certificate(P: SheafComplex, flag: Flag, site: CellSite = None) -> bool:
    """The restriction-dichotomy certificate for one perverse constituent:
    H^*(Y, P) -> H^*(Y_k, P|) is injective for * <= -k and zero for * > -k."""
    site = site or P.site
    model = SectionsModel.build(P, frozenset(site.cells), site, reduce=False)
    h = model.complex.cohomology()
    for k in range(1, flag.depth() + 1):
        cells = flag.step(k)
        if not cells:
            continue
        sub = SectionsModel.build(P, cells, site, reduce=True)
        restr = model.restriction_to(sub)
        for n in h.degrees():
            m = restr.induced_on_cohomology(n)
            if n <= -k and m.rank() != h[n]:
                return False
            if n > -k and m.rank() != 0:
                return False
    return True


# ---------------------------------------------------------------------------
# split filtration
# ---------------------------------------------------------------------------


def split_filtration(summands, site: CellSite = None) -> FiltrationTable:
    """Filtration of a complex already split into shifted perverse pieces:
    P_b H^n = sum over declared shifts b' <= b of dim H^{n-b'}(Y, piece)."""
    if not summands:
        raise FiltrationError("need at least one summand")
    site = site or summands[0][0].site
    cohs = []
    for piece, b in summands:
        if not is_perverse(piece, site):
            raise FiltrationError(f"summand at shift {b} is not perverse")
        cohs.append((global_cohomology(piece, site), b))
    degrees = sorted({n + b for gd, b in cohs for n in gd.degrees()})
    shifts = sorted({b for _, b in cohs})
    data = {}
    for n in degrees:
        levels = {}
        for b in range(min(shifts) - 1, max(shifts) + 1):
            levels[b] = sum(gd[n - bp] for gd, bp in cohs if bp <= b)
        data[n] = levels
    return FiltrationTable.from_cumulative(data)


# ---------------------------------------------------------------------------
# classical Leray filtration via standard truncations
# ---------------------------------------------------------------------------


def _bar_map_of_inclusion(model_small: SectionsModel, model_big: SectionsModel, inc):
    """Chain map of bar models induced by a termwise sheaf inclusion.

    inc(cell, q) gives the matrix of the inclusion at that cell and degree.
    """
    maps = {}
    for t in model_small.layout.by_degree:
        rows = model_big.complex.dim(t)
        cols = model_small.complex.dim(t)
        grid = [[Fraction(0)] * cols for _ in range(rows)]
        for (ch, q), size in model_small.layout.by_degree[t]:
            dst = model_big.layout.offset(t, (ch, q))
            src = model_small.layout.offset(t, (ch, q))
            if dst is None:
                continue
            m = inc(ch[-1], q)
            for i in range(m.rows):
                for j in range(m.cols):
                    if m.data[i][j]:
                        grid[dst + i][src + j] = m.data[i][j]
        maps[t] = RationalMatrix(grid) if rows else RationalMatrix.zeros(rows, cols)
    return ChainMap(model_small.complex, model_big.complex, maps, check=False)


def leray_filtration(K: SheafComplex, f: CellMap) -> FiltrationTable:
    """Standard filtration Im(H^*(Y, trunc_{<=i} T) -> H^*(Y, T)) of the
    star-model pushforward T."""
    T = pushforward(K, f)
    site = f.target
    big = SectionsModel.build(T, frozenset(site.cells), site, reduce=False)
    h = big.complex.cohomology()
    if not h:
        return FiltrationTable({})
    degs = T.degrees()
    data = {n: {} for n in h.degrees()}
    for i in range(degs[0] - 1, degs[-1] + 1):
        Ti = T.truncate_leq(i)
        kernels = {c: Ti.term(i).stalk_dim.get(c, 0) for c in site.cells}
        small = SectionsModel.build(Ti, frozenset(site.cells), site, reduce=False)

        def inc(cell, q, _Ti=Ti, _i=i):
            if q > _i:
                return RationalMatrix.zeros(T.stalk_dim(cell, q), 0)
            if q == _i:
                return T.diff_at(cell, q).kernel_basis()
            return RationalMatrix.identity(T.stalk_dim(cell, q))

        cm = _bar_map_of_inclusion(small, big, inc)
        for n in h.degrees():
            data[n][i] = cm.induced_on_cohomology(n).rank()
    for n in h.degrees():
        data[n][degs[-1]] = h[n]
    return FiltrationTable.from_cumulative(data)
