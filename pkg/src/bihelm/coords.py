"""Catalog of the flat two-dimensional separable charts and their known constraint sets."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

from .geometry import Metric, MetricError, gaussian_curvature
from .separation import LAMBDA, ConstraintSet, with_consequences
from .symbolic import ZERO, Expr, Jet, Param, canonical, coordinates, is_zero, parse_expr, to_text


@dataclass(frozen=True)
class KnownConstraint:
    label: str
    constraints: ConstraintSet
    verdict: str  # "pass", "conditional" or "fail"
    lam: Expr = LAMBDA
    # parameter factors the verdict is conditional on, in text form
    conditions: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    metric: Metric
    known_constraints: Tuple[KnownConstraint, ...]
    profiles: Optional[Tuple[Expr, Expr]] = None

    def constraint(self, label: str) -> KnownConstraint:
        for kc in self.known_constraints:
            if kc.label == label:
                return kc
        raise KeyError(label)


def _p(m: Metric, text: str, extra: Sequence[str] = ()) -> Expr:
    return parse_expr(text, m.chart, list(m.params) + list(extra) + ["lambda"])


def _helmholtz(m: Metric, first: str, second: str) -> KnownConstraint:
    """Constraint set of solutions of Delta psi = gamma psi, which solve the bi-Helmholtz equation with lambda = gamma^2."""
    extra = ("c", "gamma")
    base = [(Jet(0, 2), _p(m, first, extra)), (Jet(1, 2), _p(m, second, extra))]
    cs = with_consequences(m, base, params=extra)
    return KnownConstraint("helmholtz", cs, "pass", canonical(Param("gamma") ** 2))


def _quadratic_first_integral(m: Metric, i: int, const: str) -> ConstraintSet:
    """u_i^(3) = -2 u_i u_i^(2) and its consequence, i.e. u_i^(2) + u_i^2 constant."""
    k = i + 1
    base = [(Jet(i, 3), _p(m, f"-2*u{k}_2*u{k}"))]
    return with_consequences(m, base, constants=((const, _p(m, f"u{k}_2 + u{k}^2")),))


def cartesian2() -> CatalogEntry:
    m = Metric.from_strings(["x", "y"], [["1", "0"], ["0", "1"]], name="cartesian")
    known = (
        KnownConstraint("N", _quadratic_first_integral(m, 0, "c1"), "pass"),
        KnownConstraint("N-y", _quadratic_first_integral(m, 1, "c2"), "pass"),
        _helmholtz(m, "c - u1^2", "gamma - c - u2^2"),
    )
    return CatalogEntry("cartesian", m, known)


def polar() -> CatalogEntry:
    m = Metric.from_strings(["r", "theta"], [["1", "0"], ["0", "1/r^2"]], name="polar")
    radial = with_consequences(m, [(Jet(0, 2), _p(m, "(c1 + r*u1)/r^2 - u1^2", ["c1"]))], params=("c1",))
    known = (
        KnownConstraint("N_pol", _quadratic_first_integral(m, 1, "c2"), "pass"),
        KnownConstraint("r-side", radial, "conditional", conditions=("lambda",)),
        _helmholtz(m, "gamma - u1/r - c/r^2 - u1^2", "c - u2^2"),
    )
    return CatalogEntry("polar", m, known)


def liouville(f, g, chart: Sequence[str] = ("u", "v"), params: Sequence[str] = (),
              require_flat: bool = True, name: str = "liouville") -> CatalogEntry:
    """Metric (f(u) + g(v))(du^2 + dv^2) with its Helmholtz constraint set."""
    chart = tuple(chart)
    fx = parse_expr(f, chart, params) if isinstance(f, str) else canonical(f)
    gx = parse_expr(g, chart, params) if isinstance(g, str) else canonical(g)
    if any(c != 0 for c in coordinates(fx)) or any(c != 1 for c in coordinates(gx)):
        raise MetricError("f must depend only on the first coordinate and g only on the second")
    inv = canonical((fx + gx) ** -1)
    m = Metric(chart, ((inv, ZERO), (ZERO, inv)), tuple(params), name)
    if require_flat and not is_zero(gaussian_curvature(m)):
        raise MetricError(f"Liouville metric with f = {to_text(fx)}, g = {to_text(gx)} is not flat")
    ft, gt = to_text(fx), to_text(gx)
    known = (_helmholtz(m, f"c + gamma*({ft}) - u1^2", f"-c + gamma*({gt}) - u2^2"),)
    return CatalogEntry(name, m, known, (fx, gx))


def parabolic() -> CatalogEntry:
    return liouville("u^2", "v^2", name="parabolic")


def elliptic_hyperbolic(a: str = "a") -> CatalogEntry:
    return liouville(f"{a}^2*cosh(u)^2", f"-{a}^2*cos(v)^2", params=(a,), name="elliptic-hyperbolic")


CATALOG: Dict[str, Callable[[], CatalogEntry]] = {
    "cartesian": cartesian2,
    "polar": polar,
    "parabolic": parabolic,
    "elliptic-hyperbolic": elliptic_hyperbolic,
}


def load_liouville(path: str) -> CatalogEntry:
    """Liouville entry from ``{"f": ..., "g": ..., "chart": [...], "params": [...], "require_flat": true}``."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return liouville(data["f"], data["g"], data.get("chart", ("u", "v")), data.get("params", ()),
                     data.get("require_flat", True), name=f"liouville:{path}")


def lookup(name: str) -> CatalogEntry:
    if name.startswith("liouville:"):
        return load_liouville(name.split(":", 1)[1])
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown coordinate system {name!r}; choose from "
                       + ", ".join(list(CATALOG) + ["liouville:<file>"])) from None
