import pytest

from perverscope.complexes import GradedDims
from perverscope.fixtures import (
    circle_monodromy_sheaf,
    circle_site,
    cone_over_curve_site,
    monodromy_sheaf_on,
    nodal_curve_site,
    nodal_normalization_map,
    punctured_cells,
    punctured_line_site,
)
from perverscope.perversity import (
    LinkDatum,
    NonConstructibleError,
    artin_range_check,
    check_cosupport,
    check_support,
    deligne_ic,
    ic_curve,
    is_perverse,
    numerical_selfduality,
    passes_ic_bounds,
)
from perverscope.ratlin import RationalMatrix
from perverscope.sheaves import (
    SheafComplex,
    SheafError,
    derived_stalk,
    extend_by_zero,
    global_cohomology,
    pushforward,
)
from perverscope.sites import CellMap, CellSite


def open_constant(site):
    """Constant coefficients on the dense open stratum of a stratified site."""
    dense = max(
        (n for n in site.strata if site.is_up_closed(site.strata[n])),
        key=lambda n: site.strat_cdim[n],
    )
    from perverscope.sheaves import CellSheaf

    return CellSheaf.constant(site.subsite(site.strata[dense]))


# -- support / cosupport ------------------------------------------------------


def test_skyscraper_at_point_stratum_is_perverse():
    site = punctured_line_site()
    sky = SheafComplex.skyscraper(site, "o")
    assert is_perverse(sky, site)


def test_unshifted_constant_sheaf_fails_support_on_curve():
    site = circle_site(2)  # one smooth stratum of complex dimension 1
    K = SheafComplex.constant(site)
    assert not check_support(K, site).ok
    assert check_support(K.shift(1), site).ok


def test_shifted_constant_sheaf_is_perverse_on_smooth_curve():
    site = circle_site(2)
    assert is_perverse(SheafComplex.constant(site).shift(1), site)


def test_extension_by_zero_is_perverse_but_fails_ic_bounds():
    site = punctured_line_site()
    U = punctured_cells(site)
    K = extend_by_zero(SheafComplex.constant(site.subsite(U)), site).shift(1)
    assert check_support(K, site).ok
    assert check_cosupport(K, site).ok
    strengthened = check_cosupport(K, site, ic_bounds=True)
    assert not strengthened.ok
    # the failing entry sits at the puncture in degree 0
    assert any(deg == 0 and stratum == "origin" for deg, stratum, *_ in strengthened.failures())


def test_full_pushforward_passes_cosupport_bounds():
    site = punctured_line_site()
    U = punctured_cells(site)
    sub = site.subsite(U)
    j = CellMap(sub, site, {c: c for c in sub.cells})
    K = pushforward(SheafComplex.constant(sub), j).shift(1)
    assert check_cosupport(K, site, ic_bounds=True).ok


def test_nonconstructible_complex_rejected():
    site = circle_site(2)
    bad = SheafComplex.skyscraper(site, "e0")  # jumps along the single stratum
    with pytest.raises(NonConstructibleError, match="smooth"):
        check_support(bad, site)


def test_q2_is_perverse_on_cone_but_not_selfdual():
    site = cone_over_curve_site(1)
    K = SheafComplex.constant(site).shift(2)
    assert is_perverse(K, site)
    ok, defects = numerical_selfduality(K, site, 0)
    assert not ok


# -- the intersection-complex construction -----------------------------------


def test_ic_of_single_stratum_site_is_the_constant_sheaf():
    site = circle_site(2)
    L = open_constant(site)
    ic = deligne_ic(site, L)
    assert ic.degrees() == [0]
    assert all(ic.stalk_dim(c, 0) == 1 for c in site.cells)


@pytest.mark.parametrize("g", [0, 1, 2])
def test_cone_ic_cohomology_sheaves(g):
    site = cone_over_curve_site(g)
    ic = deligne_ic(site, open_constant(site))
    for c in site.cells:
        stalk = derived_stalk(ic, c)
        if c == "o":
            assert stalk == GradedDims({0: 1, 1: 2 * g})
        else:
            assert stalk == GradedDims({0: 1})


def test_cone_ic_passes_strengthened_bounds():
    for g in (0, 1, 2):
        site = cone_over_curve_site(g)
        ic = deligne_ic(site, open_constant(site))
        assert passes_ic_bounds(ic, site, shift=2)
        assert is_perverse(ic, site, shift=2)


def test_ic_localization_principle():
    site = cone_over_curve_site(1)
    ic = deligne_ic(site, open_constant(site))
    U = punctured_cells(site)
    restricted = ic.restrict(U)
    direct = deligne_ic(site.subsite(U), open_constant(site.subsite(U)))
    for c in sorted(U):
        assert derived_stalk(restricted, c) == derived_stalk(direct, c)


def test_ic_normalization_principle():
    nu = nodal_normalization_map()
    nodal = nu.target
    ic = deligne_ic(nodal, open_constant(nodal))
    pushed = pushforward(SheafComplex.constant(nu.source), nu)
    for c in nodal.cells:
        assert derived_stalk(ic, c) == derived_stalk(pushed, c)
    assert derived_stalk(ic, "node") == GradedDims({0: 2})


def test_ic_of_twisted_coefficients_on_punctured_line():
    site = punctured_line_site()
    U = punctured_cells(site)
    sub = site.subsite(U)
    L = monodromy_sheaf_on(sub, ("v0~", "e1~"), RationalMatrix([[-1]])).term(0)
    ic = deligne_ic(site, L)
    assert derived_stalk(ic, "o") == GradedDims({})  # no monodromy invariants
    table = ic_curve([RationalMatrix([[-1]])], 1)
    assert table["puncture_stalks"] == [0]


def test_ic_curve_tables():
    ident = RationalMatrix.identity(2)
    assert ic_curve([ident], 2)["puncture_stalks"] == [2]
    unip = RationalMatrix([[1, 1], [0, 1]])
    assert ic_curve([unip], 2)["puncture_stalks"] == [1]
    with pytest.raises(ValueError):
        ic_curve([RationalMatrix([[1, 0]])], 2)


def test_ic_stalk_matches_monodromy_invariants():
    site = punctured_line_site()
    U = punctured_cells(site)
    sub = site.subsite(U)
    unip = RationalMatrix([[1, 1], [0, 1]])
    L = monodromy_sheaf_on(sub, ("v0~", "e1~"), unip).term(0)
    ic = deligne_ic(site, L)
    assert derived_stalk(ic, "o")[0] == 1  # one-dimensional fixed space


# -- duality and vanishing ranges ---------------------------------------------


@pytest.mark.parametrize("g", [0, 1, 2])
def test_selfduality_dichotomy(g):
    site = cone_over_curve_site(g)
    ic = deligne_ic(site, open_constant(site)).shift(2)
    ok, defects = numerical_selfduality(ic, site, 0)
    assert ok, defects
    K = SheafComplex.constant(site).shift(2)
    ok2, defects2 = numerical_selfduality(K, site, 0)
    if g == 0:
        assert ok2
    else:
        assert not ok2
        assert sorted(d[0] for d in defects2) == [-1, 0]
        assert {d[2] for d in defects2} == {2 * g}


def test_selfduality_of_shifted_constant_on_compact_curve():
    # genus-0 and genus-1 smooth compact curve models carrying their full
    # real dimension (sphere and torus); the shifted constant sheaf is
    # numerically self-dual there
    from perverscope.fixtures import sphere_site, torus_site

    for site in (sphere_site(2, cdim=1), torus_site()):
        K = SheafComplex.constant(site).shift(1)
        ok, defects = numerical_selfduality(K, site, 0)
        assert ok, defects
        assert is_perverse(K, site) or site.strat_cdim != {"smooth": 1}


def test_selfduality_requires_compact_declaration():
    site = circle_site(2, compact=False)
    K = SheafComplex.constant(site).shift(1)
    with pytest.raises(SheafError):
        numerical_selfduality(K, site, 0)


def test_artin_ranges():
    site = punctured_line_site()
    sky = SheafComplex.skyscraper(site, "o")
    assert artin_range_check(sky, site, 1)
    U = punctured_cells(site)
    jshriek = extend_by_zero(SheafComplex.constant(site.subsite(U)), site).shift(1)
    assert artin_range_check(jshriek, site, 1)
    K = SheafComplex.constant(site).shift(1)
    assert artin_range_check(K, site, 1)
    assert global_cohomology(K) == GradedDims({-1: 1})


def test_artin_requires_affine_declaration():
    site = circle_site(2)  # compact, not affine
    K = SheafComplex.constant(site).shift(1)
    with pytest.raises(SheafError):
        artin_range_check(K, site, 1)


def test_link_datum():
    d = LinkDatum.curve(2)
    d.validate()
    assert d.punctured_cone_cohomology() == GradedDims({0: 1, 1: 4, 2: 4, 3: 1})
    with pytest.raises(ValueError):
        bad = LinkDatum(1, GradedDims({0: 1, 1: 2, 2: 1}), GradedDims({0: 1, 1: 3}), {0: 1})
        bad.validate()
