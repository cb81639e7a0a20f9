"""Shipped model sites, sheaves and maps used by the tests, demos and CLI.

Every builder documents what the model is a combinatorial stand-in for.
Complex dimensions of strata are declared and deliberately independent of
cell dimensions: a circle of four 1-dimensional cells models a compact
complex curve of complex dimension one.
"""

from __future__ import annotations

from .ratlin import RationalMatrix
from .sites import CellMap, CellSite, Flag
from .sheaves import CellSheaf, SheafComplex


# ---------------------------------------------------------------------------
# basic sites
# ---------------------------------------------------------------------------


def circle_site(n=2, compact=True, cdim=1) -> CellSite:
    """Polygonal circle with n vertices and n edges (n >= 2).

    Default stratum: one smooth stratum of declared complex dimension 1
    (a compact smooth curve model).
    """
    if n < 2:
        raise ValueError("a regular circle model needs at least 2 vertices")
    dims = {}
    covers = {}
    for i in range(n):
        dims[f"v{i}"] = 0
        dims[f"e{i}"] = 1
        covers[(f"v{i}", f"e{i}")] = -1
        covers[(f"v{(i + 1) % n}", f"e{i}")] = 1
    return CellSite(dims, covers, {"smooth": list(dims)}, {"smooth": cdim},
                    compact=compact, comment=f"circle with {n} vertices")


def interval_site(compact=True) -> CellSite:
    """Closed interval: two vertices, one edge."""
    dims = {"v0": 0, "v1": 0, "e": 1}
    covers = {("v0", "e"): -1, ("v1", "e"): 1}
    return CellSite(dims, covers, {"smooth": list(dims)}, {"smooth": 1},
                    compact=compact, comment="closed interval")


def sphere_site(k, compact=True, cdim=None, prefix="") -> CellSite:
    """k-sphere with two cells in each dimension 0..k (iterated suspension)."""
    dims = {}
    covers = {}
    for j in range(k + 1):
        dims[f"{prefix}a{j}"] = j
        dims[f"{prefix}b{j}"] = j
        if j:
            for top in ("a", "b"):
                covers[(f"{prefix}a{j - 1}", f"{prefix}{top}{j}")] = 1
                covers[(f"{prefix}b{j - 1}", f"{prefix}{top}{j}")] = -1
    cdim = k if cdim is None else cdim
    return CellSite(dims, covers, {"smooth": list(dims)}, {"smooth": cdim},
                    compact=compact, comment=f"{k}-sphere, two cells per dimension")


def wedge_of_spheres(counts: dict[int, int], compact=True, cdim=None) -> CellSite:
    """Wedge of spheres joined at one vertex: counts maps k -> how many S^k."""
    dims = {"w": 0}
    covers = {}
    for k, howmany in sorted(counts.items()):
        if k < 1:
            raise ValueError("wedge summands must be spheres of dimension >= 1")
        for idx in range(howmany):
            p = f"s{k}_{idx}_"
            sphere = sphere_site(k, prefix=p)
            for c, d in sphere.dims.items():
                if c == f"{p}a0":
                    continue
                dims[c] = d
            for (a, b), s in sphere.covers.items():
                a2 = "w" if a == f"{p}a0" else a
                b2 = "w" if b == f"{p}a0" else b
                covers[(a2, b2)] = s
    top = max(counts) if counts else 0
    cdim = top if cdim is None else cdim
    return CellSite(dims, covers, {"smooth": list(dims)}, {"smooth": cdim},
                    compact=compact,
                    comment="wedge of spheres " + ",".join(f"{v}xS^{k}" for k, v in sorted(counts.items())))


def torus_site(compact=True) -> CellSite:
    """Product of two 2-vertex circles."""
    t = circle_site(2).product(circle_site(2), compact=compact)
    t.comment = "two-torus as a product of circles"
    return t


# ---------------------------------------------------------------------------
# cones (the stand-ins for affine cones and punctured neighborhoods)
# ---------------------------------------------------------------------------


def cone_site(link: CellSite, vertex="o", strata=None, strat_cdim=None,
              compact=True, affine=False, comment="") -> CellSite:
    """Open cone on a link model: the vertex plus one cylinder cell per link
    cell (dimension raised by one).  The punctured cone deformation-retracts
    to the link; the vertex is the unique closed point.
    """
    dims = {vertex: 0}
    covers = {}
    for c, d in link.dims.items():
        dims[f"{c}~"] = d + 1
        if d == 0:
            covers[(vertex, f"{c}~")] = 1
    for (a, b), s in link.covers.items():
        covers[(f"{a}~", f"{b}~")] = s
    if strata is None:
        strata = {"vertex": [vertex], "punctured": [f"{c}~" for c in link.dims]}
        # an odd-dimensional link of real dimension 2d-1 bounds a cone of
        # complex dimension d
        d = (max(link.dims.values(), default=1) + 1) // 2
        strat_cdim = strat_cdim or {"vertex": 0, "punctured": max(d, 1)}
    return CellSite(dims, covers, strata, strat_cdim, compact=compact,
                    affine=affine, comment=comment or "open cone on a link model")


def curve_link_site(g: int) -> CellSite:
    """Model of the link of the cone over a smooth projective curve of genus g.

    The link is a circle bundle over the curve with nonzero Euler number; its
    Betti numbers are (1, 2g, 2g, 1).  The homotopy-faithful stand-in is a
    wedge of 2g circles, 2g 2-spheres and one 3-sphere.
    """
    if g == 0:
        return sphere_site(3)
    return wedge_of_spheres({1: 2 * g, 2: 2 * g, 3: 1})


def cone_over_curve_site(g: int, affine=True) -> CellSite:
    """Two-stratum model of the affine cone over a genus-g projective curve:
    complex surface, vertex stratum of complex dimension 0, punctured cone of
    complex dimension 2."""
    link = curve_link_site(g)
    site = cone_site(
        link,
        strata={"vertex": ["o"], "punctured": [f"{c}~" for c in link.dims]},
        strat_cdim={"vertex": 0, "punctured": 2},
        compact=True,
        affine=affine,
        comment=f"affine cone over a genus-{g} curve (cone on its link model)",
    )
    return site


def punctured_line_site(affine=True) -> CellSite:
    """Model of the complex affine line with marked origin: cone on a circle.

    Strata: the origin (complex dimension 0) and the punctured line
    (complex dimension 1)."""
    link = circle_site(2)
    return cone_site(
        link,
        strata={"origin": ["o"], "punctured": [f"{c}~" for c in link.dims]},
        strat_cdim={"origin": 0, "punctured": 1},
        compact=True,
        affine=affine,
        comment="affine line, origin marked (cone on a circle)",
    )


def punctured_cells(site: CellSite) -> frozenset:
    """The open complement of the cone vertex in a cone site."""
    return frozenset(c for c in site.cells if c != "o")


def plane_site_with_collar(affine=True) -> CellSite:
    """Model of the complex affine plane: half-open cone on a 3-sphere with a
    concentric copy of the sphere, so that closed points away from the origin
    exist (needed for generic flags)."""
    link = sphere_site(3)
    dims = {"o": 0}
    covers = {}
    for c, d in link.dims.items():
        dims[f"{c}~"] = d + 1          # open cylinder cells toward the vertex
        dims[f"{c}."] = d              # concentric copy of the link
        covers[(f"{c}.", f"{c}~")] = (-1) ** d
        if d == 0:
            covers[("o", f"{c}~")] = 1
    for (a, b), s in link.covers.items():
        covers[(f"{a}~", f"{b}~")] = s
        covers[(f"{a}.", f"{b}.")] = s
    strata = {"origin": ["o"], "rest": [c for c in dims if c != "o"]}
    return CellSite(dims, covers, strata, {"origin": 0, "rest": 2},
                    compact=False, affine=affine,
                    comment="affine plane: cone on a 3-sphere with a concentric collar copy")


def affine_line_marked_site(affine=True) -> CellSite:
    """One-real-dimensional stand-in for the affine line with one marked point
    and one generic closed point: open path v0 - v1 with dangling open edges."""
    dims = {"v0": 0, "v1": 0, "el": 1, "em": 1, "er": 1}
    covers = {("v0", "el"): 1, ("v0", "em"): -1, ("v1", "em"): 1, ("v1", "er"): -1}
    strata = {"marked": ["v0"], "rest": ["v1", "el", "em", "er"]}
    return CellSite(dims, covers, strata, {"marked": 0, "rest": 1},
                    compact=False, affine=affine,
                    comment="affine line with a marked point and a generic point")


def nodal_curve_site() -> CellSite:
    """Octahedron sphere with two antipodal vertices identified: a compact
    model of a nodal curve (sphere with two points glued)."""
    # octahedron: poles n, s; equator q0..q3
    dims = {}
    covers = {}
    verts = ["n", "q0", "q1", "q2", "q3", "s"]
    for v in verts:
        dims[v] = 0
    equator = [("q0", "q1"), ("q1", "q2"), ("q2", "q3"), ("q3", "q0")]
    edges = {}
    for i, (a, b) in enumerate(equator):
        edges[f"E{i}"] = (a, b)
    for i, q in enumerate(["q0", "q1", "q2", "q3"]):
        edges[f"N{i}"] = ("n", q)
        edges[f"S{i}"] = ("s", q)
    for e, (a, b) in edges.items():
        dims[e] = 1
        covers[(a, e)] = -1
        covers[(b, e)] = 1
    # faces: triangles (pole, q_i, q_{i+1})
    for i in range(4):
        j = (i + 1) % 4
        for pole, pref in (("n", "N"), ("s", "S")):
            f = f"F{pref}{i}"
            dims[f] = 2
            # boundary cycle pole -> q_i -> q_j -> pole
            covers[(f"E{i}", f)] = 1
            covers[(f"{pref}{i}", f)] = 1
            covers[(f"{pref}{j}", f)] = -1
    sphere = CellSite(dims, covers, {"smooth": list(dims)}, {"smooth": 1}, compact=True)
    # identify n and s into the node
    node_dims = {}
    node_covers = {}
    rename = lambda c: "node" if c in ("n", "s") else c
    for c, d in dims.items():
        node_dims[rename(c)] = d
    for (a, b), s in covers.items():
        node_covers[(rename(a), rename(b))] = s
    nodal = CellSite(
        node_dims, node_covers,
        {"node": ["node"], "smooth": [c for c in node_dims if c != "node"]},
        {"node": 0, "smooth": 1},
        compact=True, comment="nodal curve: sphere with two points identified",
    )
    return nodal


def nodal_normalization_map() -> CellMap:
    """The 2-to-1-over-the-node normalization: octahedron sphere onto the
    nodal curve site."""
    nodal = nodal_curve_site()
    # rebuild the smooth sphere with the same labels as in nodal_curve_site
    dims = dict(nodal.dims)
    del dims["node"]
    dims["n"] = 0
    dims["s"] = 0
    covers = {}
    for (a, b), s in nodal.covers.items():
        if a == "node":
            pole = "n" if b.startswith("N") else "s"
            covers[(pole, b)] = s
        else:
            covers[(a, b)] = s
    sphere = CellSite(dims, covers, {"smooth": list(dims)}, {"smooth": 1}, compact=True,
                      comment="octahedron sphere (normalization of the nodal curve)")
    mapping = {c: ("node" if c in ("n", "s") else c) for c in sphere.cells}
    return CellMap(sphere, nodal, mapping)


# ---------------------------------------------------------------------------
# sheaves and maps
# ---------------------------------------------------------------------------


def circle_monodromy_sheaf(T: RationalMatrix, n=4, cdim=1) -> SheafComplex:
    """Rank-r local system on the circle: identity restrictions except one
    edge, which carries the monodromy matrix."""
    site = circle_site(n, cdim=cdim)
    r = T.rows
    if not T.is_invertible():
        raise ValueError("monodromy must be invertible")
    dims = {c: r for c in site.cells}
    restr = {}
    for (a, b) in site.covers:
        restr[(a, b)] = RationalMatrix.identity(r)
    restr[(f"v0", f"e{n - 1}")] = T
    return SheafComplex.from_sheaf(CellSheaf(site, dims, restr))


def monodromy_sheaf_on(site: CellSite, twist_cover, T: RationalMatrix) -> SheafComplex:
    """Local system on an arbitrary site: identity restrictions except one
    designated cover carrying T."""
    r = T.rows
    dims = {c: r for c in site.cells}
    restr = {pair: RationalMatrix.identity(r) for pair in site.covers}
    if twist_cover not in site.covers:
        raise ValueError(f"{twist_cover} is not a cover of the site")
    restr[twist_cover] = T
    return SheafComplex.from_sheaf(CellSheaf(site, dims, restr))


def cyclic_cover_map(n: int, base_vertices=2) -> CellMap:
    """The degree-n circle cover: a circle with n*base_vertices vertices
    winding n times around the base circle."""
    if n < 1:
        raise ValueError("cover degree must be >= 1")
    m = base_vertices
    cyclic = circle_site(n * m)
    base = circle_site(m)
    mapping = {}
    for i in range(n * m):
        mapping[f"v{i}"] = f"v{i % m}"
        mapping[f"e{i}"] = f"e{i % m}"
    return CellMap(cyclic, base, mapping)


def product_projection_map(fiber: CellSite, base: CellSite) -> CellMap:
    prod = base.product(fiber)
    mapping = {f"{a}*{b}": a for a in base.cells for b in fiber.cells}
    return CellMap(prod, base, mapping)


# ---------------------------------------------------------------------------
# polytope and surface data
# ---------------------------------------------------------------------------

POLYTOPE_F_VECTORS = {
    "simplex3": (4, 6, 4),
    "octahedron": (6, 12, 8),
    "icosahedron": (12, 30, 20),
}

SURFACE_BETTI = {
    "plane": (1, 0, 0, 0, 0),            # affine plane
    "projective_plane": (1, 0, 1, 0, 1),
    "genus1_surface": (1, 2, 2, 2, 1),   # product of an elliptic curve and a line
}


# ---------------------------------------------------------------------------
# shipped stratification records
# ---------------------------------------------------------------------------


def plane_blowup_record():
    """Blow-up of a point in the plane: dense stratum and a point with a
    one-dimensional fiber."""
    from .decomp import MapStratification, StratumRecord

    return MapStratification(2, (
        StratumRecord("dense", 2, 0),
        StratumRecord("center", 0, 1),
    ))


def threespace_blowup_record():
    """Blow-up of a point in three-space: the fiber over the center is a
    projective plane (fiber dimension 2), which breaks semismallness."""
    from .decomp import MapStratification, StratumRecord

    return MapStratification(3, (
        StratumRecord("dense", 3, 0),
        StratumRecord("center", 0, 2),
    ))


def quadric_cone_small_record():
    """Blow-up of the cone over a quadric surface along a plane through the
    vertex: fiber over the vertex is a line.  User-supplied record (the
    strictness at the vertex is certified by the arithmetic, not imported)."""
    from .decomp import MapStratification, StratumRecord

    return MapStratification(3, (
        StratumRecord("dense", 3, 0),
        StratumRecord("vertex", 0, 1),
    ))


def swap_cover_record():
    """Generically 2-to-1 map whose two sheets are exchanged by the monodromy
    of the dense stratum."""
    from .decomp import MapStratification, StratumRecord
    from .localsys import MonodromyRep

    swap = MonodromyRep(2, (RationalMatrix([[0, 1], [1, 0]]),))
    return MapStratification(1, (StratumRecord("dense", 1, 0, 2, swap),))


# ---------------------------------------------------------------------------
# JSON corpus
# ---------------------------------------------------------------------------


def write_fixture_corpus(directory):
    """Write the shipped JSON fixtures (sites, sheaves, maps, records) used
    by the CLI examples and the acceptance suite."""
    import json
    import os

    from .schemas import sheaf_to_json

    os.makedirs(directory, exist_ok=True)

    def dump(name, obj):
        with open(os.path.join(directory, name), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")

    sites = {
        "circle.json": circle_site(2),
        "circle4.json": circle_site(4),
        "interval.json": interval_site(),
        "torus.json": torus_site(),
        "punctured_line.json": punctured_line_site(),
        "cone_genus0.json": cone_over_curve_site(0),
        "cone_genus1.json": cone_over_curve_site(1),
        "cone_genus2.json": cone_over_curve_site(2),
        "nodal_curve.json": nodal_curve_site(),
        "affine_line_marked.json": affine_line_marked_site(),
        "plane_collar.json": plane_site_with_collar(),
    }
    for name, site in sites.items():
        dump(name, site.to_json())

    mobius = circle_monodromy_sheaf(RationalMatrix([[-1]]), n=2)
    dump("mobius_sheaf.json", sheaf_to_json(mobius))
    dump("constant_circle.json", sheaf_to_json(SheafComplex.constant(circle_site(2))))

    f = cyclic_cover_map(2)
    dump("double_cover_source.json", f.source.to_json())
    dump("double_cover_map.json", {
        "schema": "perverscope/map-v1",
        "comment": "degree-2 circle cover",
        "source_site": "double_cover_source.json",
        "target_site": "circle.json",
        "mapping": dict(sorted(f.mapping.items())),
    })
    dump("double_cover_sheaf.json", sheaf_to_json(SheafComplex.constant(f.source)))

    from .decomp import hilbert_chow_strat

    dump("plane_blowup.json", plane_blowup_record().to_json())
    dump("threespace_blowup.json", threespace_blowup_record().to_json())
    dump("quadric_cone_small.json", quadric_cone_small_record().to_json())
    dump("swap_cover.json", swap_cover_record().to_json())
    dump("hilbert_chow_2.json", hilbert_chow_strat(2).to_json())

    dump("rotation_matrix.json", {
        "schema": "perverscope/matrix-v1",
        "comment": "quarter-turn monodromy",
        "matrix": [["0", "-1"], ["1", "0"]],
    })
    dump("unipotent_matrix.json", {
        "schema": "perverscope/matrix-v1",
        "comment": "unipotent 2x2 block",
        "matrix": [["1", "1"], ["0", "1"]],
    })
    dump("trivial_rank1_rep.json", {
        "schema": "perverscope/rep-v1",
        "comment": "trivial rank-1 circle local system",
        "rank": 1,
        "generators": [[["1"]]],
    })
    dump("torus_fibration_wang.json", {
        "schema": "perverscope/wang-v1",
        "comment": "two-torus fiber with a unipotent twist in degree 1",
        "fiber_betti": [1, 2, 1],
        "operators": {"1": [["1", "1"], ["0", "1"]]},
    })
    dump("surface_a2.json", {
        "schema": "perverscope/surface-v1",
        "comment": "two exceptional curves in a chain",
        "points": [{"name": "p", "intersection_matrix": [["-2", "1"], ["1", "-2"]]}],
    })
    dump("surface_minus_one.json", {
        "schema": "perverscope/surface-v1",
        "comment": "a single exceptional curve of self-intersection -1",
        "points": [{"name": "p", "intersection_matrix": [["-1"]]}],
    })
    dump("surface_degenerate.json", {
        "schema": "perverscope/surface-v1",
        "comment": "degenerate intersection form (splitting obstructed)",
        "points": [{"name": "p", "intersection_matrix": [["0"]]}],
    })

    line = affine_line_marked_site()
    dump("affine_line_flag.json", {
        "schema": "perverscope/flag-v1",
        "comment": "generic point flag on the marked affine line",
        "steps": [sorted(line.cells), ["v1"]],
    })
    # skyscraper at the marked point plus the shifted-back constant piece
    # (the [1] and [-1] shifts cancel into degree zero)
    split = SheafComplex.skyscraper(line, "v0").direct_sum(SheafComplex.constant(line))
    dump("split_two_summand.json", sheaf_to_json(split))
