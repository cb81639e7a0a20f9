import pytest

from perverscope.complexes import GradedDims
from perverscope.fixtures import (
    affine_line_marked_site,
    circle_monodromy_sheaf,
    circle_site,
    cone_over_curve_site,
    curve_link_site,
    cyclic_cover_map,
    interval_site,
    nodal_curve_site,
    product_projection_map,
    punctured_cells,
    punctured_line_site,
    sphere_site,
    torus_site,
)
from perverscope.ratlin import RationalMatrix
from perverscope.sheaves import (
    CellSheaf,
    SheafComplex,
    SheafError,
    attaching_compact_supports,
    attaching_sections,
    compact_cohomology,
    compact_sections_complex,
    costalk,
    derived_sections,
    derived_stalk,
    extend_by_zero,
    global_cohomology,
    pushforward,
    sections_complex,
)
from perverscope.sites import CellMap


def test_constant_sheaf_on_circle():
    K = SheafComplex.constant(circle_site(2))
    assert sections_complex(K).cohomology() == GradedDims({0: 1, 1: 1})
    assert global_cohomology(K) == GradedDims({0: 1, 1: 1})


def test_constant_sheaf_on_interval():
    K = SheafComplex.constant(interval_site())
    assert sections_complex(K).cohomology() == GradedDims({0: 1})


def test_twisted_circle_sheaf_kills_cohomology():
    K = circle_monodromy_sheaf(RationalMatrix([[-1]]))
    assert sections_complex(K).cohomology() == GradedDims({})


def test_functoriality_enforced():
    site = interval_site()
    # mismatched restrictions around a diamond are impossible on an interval;
    # break shapes instead
    with pytest.raises(SheafError):
        CellSheaf(site, {"v0": 1, "v1": 1, "e": 1},
                  {("v0", "e"): RationalMatrix([[1], [0]]),
                   ("v1", "e"): RationalMatrix([[1]])})


def test_sphere_cohomology_models():
    for k in (1, 2, 3):
        K = SheafComplex.constant(sphere_site(k))
        assert sections_complex(K).cohomology() == GradedDims({0: 1, k: 1})


def test_genus_link_betti():
    for g in (1, 2):
        K = SheafComplex.constant(curve_link_site(g))
        expected = GradedDims({0: 1, 1: 2 * g, 2: 2 * g, 3: 1})
        assert sections_complex(K).cohomology() == expected
        assert global_cohomology(K) == expected


def test_compact_supports_of_open_edge():
    site = interval_site()
    K = SheafComplex.constant(site)
    c = compact_sections_complex(K, site, {"e"})
    assert c.cohomology() == GradedDims({1: 1})


def test_compact_supports_need_compact_ambient():
    site = interval_site(compact=False)
    K = SheafComplex.constant(site)
    with pytest.raises(SheafError, match="compactification"):
        compact_sections_complex(K, site, {"e"})


def test_compact_supports_equal_sections_on_whole_compact_site():
    site = circle_site(3)
    K = SheafComplex.constant(site)
    whole = compact_sections_complex(K, site, frozenset(site.cells))
    assert whole.cohomology() == sections_complex(K).cohomology()


def test_derived_stalks():
    site = circle_site(2)
    K = SheafComplex.constant(site)
    for c in site.cells:
        assert derived_stalk(K, c) == GradedDims({0: 1})
    sky = SheafComplex.skyscraper(site, "e0", 3)
    assert derived_stalk(sky, "e0") == GradedDims({0: 3})
    assert derived_stalk(sky, "v0") == GradedDims({})


def test_costalk_conventions():
    site = circle_site(2)
    K = SheafComplex.constant(site)
    # interior vertex of a 1-manifold model: concentrated in degree 1
    assert costalk(K, "v0") == GradedDims({1: 1})
    sky = SheafComplex.skyscraper(site, "e0", 2)
    assert costalk(sky, "e0") == derived_stalk(sky, "e0")


def test_costalk_at_boundary_vertex_vanishes():
    site = interval_site()
    K = SheafComplex.constant(site)
    assert costalk(K, "v0") == GradedDims({})


def test_costalk_at_cone_point():
    site = cone_over_curve_site(1)
    K = SheafComplex.constant(site)
    # reduced cohomology of the punctured cone, shifted by one
    assert costalk(K, "o") == GradedDims({2: 2, 3: 2, 4: 1})


def test_pushforward_identity_quasi_iso():
    site = circle_site(2)
    K = SheafComplex.constant(site)
    T = pushforward(K, CellMap.identity(site))
    assert global_cohomology(T) == global_cohomology(K)
    for c in site.cells:
        assert derived_stalk(T, c) == derived_stalk(K, c)


def test_pushforward_double_cover():
    f = cyclic_cover_map(2)
    K = SheafComplex.constant(f.source)
    T = pushforward(K, f)
    # rank-2 direct image in degree 0
    assert derived_stalk(T, "v0") == GradedDims({0: 2})
    assert global_cohomology(T) == GradedDims({0: 1, 1: 1})
    assert global_cohomology(K) == GradedDims({0: 1, 1: 1})


def test_pushforward_satisfies_leray_identity_on_fixture_maps():
    cases = []
    f = cyclic_cover_map(2)
    cases.append((f, SheafComplex.constant(f.source)))
    cases.append((f, circle_monodromy_sheaf(RationalMatrix([[-1]]), n=4)))
    f3 = cyclic_cover_map(3)
    cases.append((f3, SheafComplex.constant(f3.source)))
    fp = product_projection_map(interval_site(), circle_site(2))
    cases.append((fp, SheafComplex.constant(fp.source)))
    ft = product_projection_map(circle_site(2), circle_site(2))
    cases.append((ft, SheafComplex.constant(ft.source)))
    for f, K in cases:
        T = pushforward(K, f)
        assert global_cohomology(T) == global_cohomology(K)
        for c in f.target.cells:
            pre = f.preimage(f.target.open_star(c))
            assert derived_stalk(T, c) == derived_sections(K, pre, f.source).cohomology()


def test_pushforward_kunneth_product():
    fp = product_projection_map(interval_site(), circle_site(2))
    K = SheafComplex.constant(fp.source)
    T = pushforward(K, fp)
    assert global_cohomology(T) == GradedDims({0: 1, 1: 1})
    ft = product_projection_map(circle_site(2), circle_site(2))
    T2 = pushforward(SheafComplex.constant(ft.source), ft)
    assert global_cohomology(T2) == GradedDims({0: 1, 1: 2, 2: 1})
    assert derived_stalk(T2, "v0") == GradedDims({0: 1, 1: 1})


def test_pushforward_rejects_nonmonotone():
    from perverscope.sites import SiteError

    a, b = interval_site(), circle_site(2)
    with pytest.raises(SiteError):
        CellMap(a, b, {"v0": "e0", "v1": "v0", "e": "v0"})


def test_extend_by_zero():
    site = interval_site()
    sub = site.subsite({"e"})
    K = SheafComplex.constant(sub)
    J = extend_by_zero(K, site)
    assert sections_complex(J).cohomology() == GradedDims({1: 1})
    with pytest.raises(SheafError):
        extend_by_zero(SheafComplex.constant(site.subsite({"v0"})), site)


def test_extend_by_zero_whole_site_is_identity():
    site = circle_site(2)
    K = SheafComplex.constant(site)
    J = extend_by_zero(K, site)
    assert sections_complex(J).cohomology() == sections_complex(K).cohomology()


def test_pushforward_from_open_subsite_star_stalk():
    line = punctured_line_site()
    U = punctured_cells(line)
    sub = line.subsite(U)
    j = CellMap(sub, line, {c: c for c in sub.cells})
    K = SheafComplex.constant(sub)
    J = pushforward(K, j)
    assert derived_stalk(J, "o") == GradedDims({0: 1, 1: 1})
    assert costalk(J, "o") == GradedDims({})


def test_attaching_sequences_interval():
    K = SheafComplex.constant(interval_site())
    assert attaching_compact_supports(K, {"e"})
    assert attaching_sections(K, {"e"})


def test_attaching_sequences_cone_and_twisted():
    line = punctured_line_site()
    U = punctured_cells(line)
    K = SheafComplex.constant(line)
    assert attaching_compact_supports(K, U)
    assert attaching_sections(K, U)
    tw = circle_monodromy_sheaf(RationalMatrix([[-1]]), n=4)
    star = tw.site.open_star("v1")
    assert attaching_compact_supports(tw, star)
    assert attaching_sections(tw, star)


def test_leray_identity_for_open_inclusion():
    line = punctured_line_site()
    U = punctured_cells(line)
    sub = line.subsite(U)
    j = CellMap(sub, line, {c: c for c in sub.cells})
    K = SheafComplex.constant(sub)
    J = pushforward(K, j)
    assert global_cohomology(J) == global_cohomology(K)


def test_nodal_curve_pushforward_of_normalization():
    from perverscope.fixtures import nodal_normalization_map

    nu = nodal_normalization_map()
    K = SheafComplex.constant(nu.source)
    T = pushforward(K, nu)
    assert global_cohomology(T) == GradedDims({0: 1, 2: 1})
    assert derived_stalk(T, "node") == GradedDims({0: 2})


def test_compact_cohomology_of_cone_models():
    for g, expected in ((0, {4: 1}), (1, {2: 2, 3: 2, 4: 1})):
        K = SheafComplex.constant(cone_over_curve_site(g))
        assert compact_cohomology(K) == GradedDims(expected)
        assert global_cohomology(K) == GradedDims({0: 1})


def test_json_roundtrip_of_sheaf():
    import json

    from perverscope.schemas import check_document, load_sheaf, sheaf_to_json

    site = circle_site(2)
    K = circle_monodromy_sheaf(RationalMatrix([["1/2"]]), n=2)
    payload = sheaf_to_json(K)
    check_document(payload, "perverscope/sheaf-v1")
    import tempfile, os

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "sheaf.json")
        with open(path, "w") as fh:
            json.dump(payload, fh)
        again = load_sheaf(path, K.site)
        assert sections_complex(again).cohomology() == sections_complex(K).cohomology()
