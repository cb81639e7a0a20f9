import pytest

from perverscope.fixtures import (
    circle_site,
    cone_over_curve_site,
    interval_site,
    nodal_curve_site,
    punctured_line_site,
    sphere_site,
    torus_site,
    wedge_of_spheres,
)
from perverscope.sites import CellMap, CellSite, Flag, SiteError


def test_circle_site_valid():
    assert circle_site(2).verify() == []
    assert circle_site(3).verify() == []


def test_open_star_of_maximal_cell_is_itself():
    s = circle_site(2)
    assert s.open_star("e0") == {"e0"}


def test_open_star_of_vertex_on_circle():
    s = circle_site(2)
    # derived by enumerating cover relations: both edges touch each vertex
    assert s.open_star("v0") == {"v0", "e0", "e1"}


def test_star_of_cone_point_is_everything():
    s = punctured_line_site()
    assert s.open_star("o") == frozenset(s.cells)


def test_unknown_cell_errors():
    with pytest.raises(SiteError):
        circle_site(2).open_star("nope")


def test_closed_complement():
    s = interval_site()
    assert s.closed_complement(frozenset(s.cells)) == frozenset()
    assert s.closed_complement({"e"}) == {"v0", "v1"}
    with pytest.raises(SiteError):
        s.closed_complement({"v0"})


def test_cone_complement_of_open_part_is_vertex():
    s = punctured_line_site()
    u = frozenset(c for c in s.cells if c != "o")
    assert s.is_up_closed(u)
    assert s.closed_complement(u) == {"o"}


def test_sign_condition_violation_reported():
    # filled triangle with one flipped edge sign: the diamond sum becomes +-2
    dims = {"v0": 0, "v1": 0, "v2": 0, "e0": 1, "e1": 1, "e2": 1, "f": 2}
    covers = {
        ("v0", "e0"): -1, ("v1", "e0"): 1,
        ("v1", "e1"): -1, ("v2", "e1"): 1,
        ("v2", "e2"): -1, ("v0", "e2"): 1,
        ("e0", "f"): 1, ("e1", "f"): 1, ("e2", "f"): 1,
    }
    site = CellSite(dims, covers, {"all": list(dims)}, {"all": 1})
    assert site.verify() == []
    bad = dict(covers)
    bad[("v1", "e0")] = -1
    problems = CellSite(dims, bad, {"all": list(dims)}, {"all": 1}, check=False).verify()
    assert any("sign condition" in p for p in problems)


def test_locally_closed_strata_checks():
    s = interval_site()
    ok = CellSite(s.dims, s.covers, {"edge": ["e"], "ends": ["v0", "v1"]},
                  {"edge": 1, "ends": 0})
    assert ok.verify() == []
    # {v0, e} is up-and-down mixed: star({v0,e}) = {v0,e}, closure = all three;
    # the intersection is the set itself, so it is locally closed
    ok2 = CellSite(s.dims, s.covers, {"half": ["v0", "e"], "other": ["v1"]},
                   {"half": 1, "other": 0}, check=False)
    assert ok2.verify() == []
    # a stratum that skips the middle of a two-step chain is not locally closed
    tri = {"v": 0, "e": 1, "f": 2}
    cov = {("v", "e"): 1, ("e", "f"): 1}
    bad = CellSite(tri, cov, {"gap": ["v", "f"], "mid": ["e"]}, {"gap": 1, "mid": 1},
                   check=False)
    assert any("locally closed" in p for p in bad.verify())


def test_dimension_gap_in_covers_rejected():
    with pytest.raises(SiteError):
        CellSite({"v": 0, "f": 2}, {("v", "f"): 1}, {"all": ["v", "f"]}, {"all": 1})


def test_intersection_of_stars_is_union_of_stars():
    s = torus_site()
    import itertools

    for a, b in itertools.islice(itertools.combinations(s.cells, 2), 40):
        inter = s.open_star(a) & s.open_star(b)
        union = set()
        for c in inter:
            union |= s.open_star(c)
        assert inter == union


def test_skeleton_flag_is_valid():
    s = torus_site()
    flag = s.skeleton_flag()
    assert flag.step(0) == frozenset(s.cells)
    for k in range(flag.depth()):
        assert s.is_down_closed(flag.step(k))
    assert flag.step(99) == frozenset()


def test_flag_preimage_under_cellular_map():
    from perverscope.fixtures import cyclic_cover_map

    f = cyclic_cover_map(2)
    flag = f.target.skeleton_flag()
    pre = flag.preimage(f)
    assert pre.step(0) == frozenset(f.source.cells)
    for k in range(pre.depth()):
        assert f.source.is_down_closed(pre.step(k))


def test_flag_validation():
    s = interval_site()
    with pytest.raises(SiteError):
        Flag(s, [frozenset(s.cells), frozenset({"e"})])  # not down-closed
    with pytest.raises(SiteError):
        Flag(s, [frozenset({"v0"})])  # does not start with everything


def test_map_monotonicity_enforced():
    a = interval_site()
    b = circle_site(2)
    with pytest.raises(SiteError):
        CellMap(a, b, {"v0": "v0", "v1": "e0", "e": "v1"})


def test_product_torus_counts():
    t = torus_site()
    assert len(t.cells) == 16
    assert t.verify() == []


def test_wedge_and_cone_sites_valid():
    w = wedge_of_spheres({1: 2, 2: 2, 3: 1})
    assert w.verify() == []
    for g in (0, 1, 2):
        assert cone_over_curve_site(g).verify() == []
    assert nodal_curve_site().verify() == []
    assert sphere_site(3).verify() == []


def test_site_json_roundtrip():
    s = cone_over_curve_site(1)
    again = CellSite.from_json(s.to_json())
    assert again.dims == s.dims
    assert again.covers == s.covers
    assert again.strata == s.strata
    assert again.strat_cdim == s.strat_cdim
    assert again.compact == s.compact and again.affine == s.affine
