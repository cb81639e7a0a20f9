"""Middle-perversity support/co-support checking and intersection complexes.

Conventions (fixed here once and used everywhere):

* checks run in a shifted normalization: the caller declares the shift s and
  all degrees below refer to K[s], i.e. degree i means H^{i+s} of the stored
  complex;
* support: every stratum where the derived stalk H^i is nonzero must have
  declared complex dimension <= -i;
* co-support: costalk H^k on a stratum of declared complex dimension c must
  vanish for k < -c;
* the strengthened (intersection-complex) bounds tighten both by one on
  every stratum except the dense open ones.

The intersection complex is built by walking the closure-ordered strata,
pushing forward and truncating one complex-codimension step at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .complexes import GradedDims
from .ratlin import RationalMatrix
from .sites import CellMap, CellSite, SiteError
from .sheaves import (
    CellSheaf,
    SheafComplex,
    SheafError,
    compact_cohomology,
    costalk,
    derived_stalk,
    global_cohomology,
    pushforward,
)


class NonConstructibleError(SheafError):
    def __init__(self, stratum, detail=""):
        self.stratum = stratum
        super().__init__(f"derived stalks jump along stratum {stratum!r}{detail}")


@dataclass
class PerversityReport:
    kind: str                       # "support" or "cosupport"
    shift: int
    ic_bounds: bool
    entries: list = field(default_factory=list)   # (degree, stratum, cdim, dim, ok)
    ok: bool = True

    def failures(self):
        return [e for e in self.entries if not e[4]]

    def to_json(self):
        return {
            "kind": self.kind,
            "shift": self.shift,
            "ic_bounds": self.ic_bounds,
            "ok": self.ok,
            "entries": [
                {"degree": d, "stratum": s, "cdim": c, "dim": n, "ok": ok}
                for d, s, c, n, ok in self.entries
            ],
        }


def stalk_tables(K: SheafComplex, site: CellSite, costalks=False):
    """Per-stratum graded dims of (co)stalks; errors if they jump within a
    stratum (the constructibility requirement)."""
    tables = {}
    for name, cells in sorted(site.strata.items()):
        per_cell = {}
        for c in sorted(cells):
            per_cell[c] = costalk(K, c) if costalks else derived_stalk(K, c)
        values = set(per_cell.values())
        if costalks:
            # costalks vary with the local cell structure inside a stratum
            # (interior vs corner of the model); record the union of supports
            merged = {}
            for gd in per_cell.values():
                for i, v in gd.items():
                    merged[i] = max(merged.get(i, 0), v)
            tables[name] = GradedDims(merged)
        else:
            if len(values) > 1:
                detail = "; ".join(f"{c}: {dict(per_cell[c].items())}" for c in sorted(per_cell))
                raise NonConstructibleError(name, f" ({detail})")
            tables[name] = per_cell[next(iter(sorted(per_cell)))]
    return tables


def open_strata(site: CellSite):
    """Strata that are open (up-closed): the dense pieces the strengthened
    bounds exempt."""
    return {name for name, cells in site.strata.items() if site.is_up_closed(cells)}


def check_support(K: SheafComplex, site: CellSite = None, shift=0, ic_bounds=False) -> PerversityReport:
    site = site or K.site
    tables = stalk_tables(K, site, costalks=False)
    exempt = open_strata(site) if ic_bounds else set()
    report = PerversityReport("support", shift, ic_bounds)
    for name, gd in sorted(tables.items()):
        cdim = site.strat_cdim[name]
        for j, dim in gd.items():
            i = j - shift
            bound = -i if (name in exempt or not ic_bounds) else -i - 1
            ok = cdim <= bound
            report.entries.append((i, name, cdim, dim, ok))
            report.ok = report.ok and ok
    return report


def check_cosupport(K: SheafComplex, site: CellSite = None, shift=0, ic_bounds=False) -> PerversityReport:
    site = site or K.site
    tables = stalk_tables(K, site, costalks=True)
    exempt = open_strata(site) if ic_bounds else set()
    report = PerversityReport("cosupport", shift, ic_bounds)
    for name, gd in sorted(tables.items()):
        cdim = site.strat_cdim[name]
        for j, dim in gd.items():
            k = j - shift
            floor = -cdim if (name in exempt or not ic_bounds) else -cdim + 1
            ok = k >= floor
            report.entries.append((k, name, cdim, dim, ok))
            report.ok = report.ok and ok
    return report


def is_perverse(K: SheafComplex, site: CellSite = None, shift=0) -> bool:
    return check_support(K, site, shift).ok and check_cosupport(K, site, shift).ok


def passes_ic_bounds(K: SheafComplex, site: CellSite = None, shift=0) -> bool:
    return (
        check_support(K, site, shift, ic_bounds=True).ok
        and check_cosupport(K, site, shift, ic_bounds=True).ok
    )


# ---------------------------------------------------------------------------
# the Deligne construction: iterated pushforward and truncation
# ---------------------------------------------------------------------------


def _closure_orders(site: CellSite):
    """Linear walks of the strata: orderings starting at the dense open piece
    such that every partial union is open (up-closed)."""
    names = sorted(site.strata, key=lambda n: (-site.strat_cdim[n], n))
    if len(names) > 7:
        raise SiteError("too many strata for exhaustive refinement search")
    orders = []
    for perm in permutations(names):
        acc = set()
        ok = True
        for n in perm:
            acc |= site.strata[n]
            if not site.is_up_closed(acc):
                ok = False
                break
        if ok:
            orders.append(perm)
    return orders


def deligne_ic(site: CellSite, L, open_stratum=None) -> SheafComplex:
    """Intersection complex of the site with coefficients L on the dense open
    stratum, in the unshifted normalization (L sits in degree 0).

    L is a CellSheaf on the subsite of the open stratum (or a SheafComplex
    concentrated in degree 0).  Crossing into a stratum of complex
    codimension c truncates at degree c - 1.
    """
    orders = _closure_orders(site)
    if not orders:
        raise SiteError("strata admit no closure-ordered walk (no dense open stratum)")
    results = []
    walks = orders if len(orders) == 1 else orders[:24]
    for walk in walks:
        results.append(_walk_ic(site, L, walk, open_stratum))
    if len(results) > 1:
        ref = _stalk_signature(results[0], site)
        for other in results[1:]:
            if _stalk_signature(other, site) != ref:
                raise SiteError(
                    "intersection complexes disagree across linear refinements of the strata"
                )
    return results[0]


def _stalk_signature(K: SheafComplex, site: CellSite):
    return {c: derived_stalk(K, c) for c in site.cells}


def _walk_ic(site: CellSite, L, walk, open_stratum=None):
    first = open_stratum or walk[0]
    cells = set(site.strata[first])
    top_cdim = site.strat_cdim[first]
    sub = site.subsite(cells)
    if isinstance(L, CellSheaf):
        K = SheafComplex.from_sheaf(_transport_sheaf(L, sub))
    else:
        K = _transport_complex(L, sub)
        if K.degrees() and K.degrees() != [0]:
            raise SheafError("coefficients must be concentrated in degree 0")
    for name in walk:
        if name == first:
            continue
        new_cells = cells | set(site.strata[name])
        bigger = site.subsite(new_cells)
        j = CellMap(site.subsite(cells), bigger, {c: c for c in cells}, check=False)
        K = pushforward(_transport_complex(K, j.source), j)
        codim = top_cdim - site.strat_cdim[name]
        K = K.truncate_leq(max(codim - 1, 0))
        cells = new_cells
    if len(cells) != len(site.cells):
        raise SheafError("strata walk did not exhaust the site")
    return _transport_complex(K, site)


def _transport_sheaf(L: CellSheaf, sub: CellSite) -> CellSheaf:
    if set(L.site.cells) != set(sub.cells):
        raise SheafError("coefficient sheaf does not live on the open stratum")
    return CellSheaf(sub, L.stalk_dim, L.restr, check=False)


def _transport_complex(K: SheafComplex, sub: CellSite) -> SheafComplex:
    terms = {q: CellSheaf(sub, s.stalk_dim, s.restr, check=False) for q, s in K.terms.items()}
    return SheafComplex(sub, terms, K.diffs, check=False)


# ---------------------------------------------------------------------------
# curves, duality, vanishing ranges
# ---------------------------------------------------------------------------


@dataclass
class LinkDatum:
    """Numerical record of the projective manifold at the base of a cone:
    its dimension, Betti numbers, primitive Betti numbers, and the ranks of
    the degree-two multiplication maps."""

    d: int
    betti: GradedDims
    prim: GradedDims
    eta_rank: dict

    @classmethod
    def curve(cls, g: int) -> "LinkDatum":
        betti = GradedDims({0: 1, 1: 2 * g, 2: 1})
        prim = GradedDims({0: 1, 1: 2 * g})
        return cls(1, betti, prim, {0: 1})

    def validate(self):
        for q in range(0, self.d + 1):
            expected = self.betti[q] - self.eta_rank.get(q - 2, 0)
            if self.prim[q] != expected or self.prim[q] < 0:
                raise ValueError(f"primitive dimensions inconsistent at degree {q}")

    def punctured_cone_cohomology(self) -> GradedDims:
        """H of the complement of the vertex: primitive parts in degrees
        0..d, mirrored primitive parts in degrees d+1..2d+1."""
        out = {}
        for q in range(0, self.d + 1):
            out[q] = self.prim[q]
            out[1 + self.d + q] = self.prim[self.d - q]
        return GradedDims(out)


def ic_curve(monodromies, rank: int):
    """Stalk table of the minimal extension on a curve: at each puncture the
    invariants of the local monodromy, elsewhere the full rank."""
    stalks = []
    for T in monodromies:
        if not isinstance(T, RationalMatrix) or not T.is_square():
            raise ValueError("each local monodromy must be a square matrix")
        if (T.rows, T.cols) != (rank, rank):
            raise ValueError("monodromy size does not match the rank")
        stalks.append((T - RationalMatrix.identity(rank)).kernel_basis().cols)
    return {"generic_stalk": rank, "puncture_stalks": stalks}


def numerical_selfduality(K: SheafComplex, site: CellSite = None, d: int = 0):
    """Poincare-style check dim H^k = dim H_c^{-k} after centering by d.

    Needs the site to be declared compact (closure-complete), so that the
    incidence complex legitimately computes compactly supported cohomology.
    Returns (verdict, defect table).
    """
    site = site or K.site
    if not site.compact:
        raise SheafError("self-duality needs a compact (closure-complete) declared site")
    h = global_cohomology(K).shift(d)
    hc = compact_cohomology(K).shift(d)
    degrees = sorted(set(h.degrees()) | {-k for k in hc.degrees()})
    defects = []
    for k in degrees:
        if h[k] != hc[-k]:
            defects.append((k, h[k], hc[-k]))
    return (not defects, defects)


def artin_range_check(K: SheafComplex, site: CellSite = None, d: int = None) -> bool:
    """Vanishing ranges on a declared-affine site: H in [-d, 0], H_c in [0, d]
    for a perverse input."""
    site = site or K.site
    if not site.affine:
        raise SheafError("the vanishing-range check needs a declared-affine site")
    if d is None:
        d = site.top_cdim()
    if not is_perverse(K, site):
        raise SheafError("input does not satisfy the perversity conditions")
    h = global_cohomology(K)
    hc = compact_cohomology(K)
    ok = all(-d <= i <= 0 for i in h.degrees())
    ok = ok and all(0 <= i <= d for i in hc.degrees())
    return ok
