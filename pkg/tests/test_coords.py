import json

import pytest

from bihelm.coords import CATALOG, cartesian2, elliptic_hyperbolic, liouville, lookup, parabolic, polar
from bihelm.geometry import MetricError, gaussian_curvature, laplacian_apply
from bihelm.liouville import liouville_relations
from bihelm.separation import check_constraints, hs_expr
from bihelm.symbolic import ONE, ZERO, Jet, Param, is_zero, parse_expr


def test_cartesian_entry():
    e = cartesian2()
    assert e.metric.g_contra == ((ONE, ZERO), (ZERO, ONE))
    rel = dict(e.constraint("N").constraints.relations)
    assert rel[Jet(0, 3)] == parse_expr("-2*u1_2*u1_1", ["x", "y"])
    assert {kc.label for kc in e.known_constraints} == {"N", "N-y", "helmholtz"}


def test_polar_entry():
    e = polar()
    assert e.metric.g_contra[1][1] == parse_expr("1/r^2", ["r", "theta"])
    assert e.constraint("N_pol").verdict == "pass"
    kc = e.constraint("r-side")
    assert kc.verdict == "conditional" and kc.conditions == ("lambda",)
    p = [Param("p0"), Param("p1")]
    pp = [[Param("p00"), Param("p01")], [Param("p01"), Param("p11")]]
    lap = laplacian_apply(e.metric, pp, p)
    assert lap == parse_expr("p00 + p0/r + p11/r^2", ["r", "theta"], ["p0", "p1", "p00", "p01", "p11"])


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_flat(name):
    assert is_zero(gaussian_curvature(lookup(name).metric))


@pytest.mark.parametrize("make", [parabolic, elliptic_hyperbolic])
def test_liouville_entries(make):
    e = make()
    f, g = e.profiles
    rel = liouville_relations(f, g)
    assert rel.Lam_g is not None
    (kc,) = e.known_constraints
    assert kc.label == "helmholtz" and kc.verdict == "pass"
    assert kc.lam == parse_expr("gamma^2", [], ["gamma"])


def test_helmholtz_set_passes_on_parabolic():
    e = parabolic()
    kc = e.constraint("helmholtz")
    assert check_constraints(e.metric, kc.constraints, kc.lam).verdict == "pass"


def test_liouville_flatness_required():
    with pytest.raises(MetricError):
        liouville("u", "0")
    with pytest.raises(MetricError):
        liouville("v", "u")
    curved = liouville("u", "0", require_flat=False)
    assert not is_zero(gaussian_curvature(curved.metric))


def test_constant_profile_is_cartesian():
    e = liouville("1", "0")
    assert hs_expr(e.metric) == hs_expr(cartesian2().metric)


def test_lookup(tmp_path):
    assert lookup("polar").name == "polar"
    with pytest.raises(KeyError):
        lookup("spherical")
    path = tmp_path / "l.json"
    path.write_text(json.dumps({"f": "u^2", "g": "v^2"}))
    e = lookup(f"liouville:{path}")
    assert e.metric.g_contra == parabolic().metric.g_contra


def test_narrative():
    # non-trivial constrained separation exists only in the Cartesian and polar charts
    for name in CATALOG:
        labels = {kc.label for kc in lookup(name).known_constraints}
        if name in ("parabolic", "elliptic-hyperbolic"):
            assert labels == {"helmholtz"}
        else:
            assert labels > {"helmholtz"}
