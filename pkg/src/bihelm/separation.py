"""Multiplicative separation of the bi-Helmholtz equation.

With psi = exp(u) and the separated ansatz (no mixed derivatives of u), the
equation Delta^2 psi = lambda psi becomes H_s = lambda, a polynomial in the
jet variables u_i^(s).  Each D_i below is the total derivative along q^i
restricted to the equation manifold; R_i is fixed by D_i(H_s) = 0.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .geometry import Metric, bilaplacian_coeffs
from .symbolic import (
    ONE, ZERO, Const, Coord, Expr, Func, Jet, Param, Power, Product, Sum,
    canonical, is_zero, jets, parse_expr, partial, substitute, symbols,
)
from .symbolic.normal import to_fraction

LAMBDA = Param("lambda")

Monomial = Tuple[Jet, ...]


class SeparationError(ValueError):
    pass


def _jet_key(j: Jet):
    return (j.coord, j.order)


# ------------------------------------------------------------------ JetPoly

@dataclass(frozen=True)
class JetPoly:
    """Polynomial in jet variables with jet-free rational coefficients."""

    terms: Mapping[Monomial, Expr]

    @classmethod
    def from_expr(cls, e: Expr) -> "JetPoly":
        e = canonical(e)
        parts = e.terms if isinstance(e, Sum) else (e,)
        acc: Dict[Monomial, list] = {}
        for t in parts:
            factors = t.factors if isinstance(t, Product) else (t,)
            mono: List[Jet] = []
            coeff = []
            for f in factors:
                if isinstance(f, Jet):
                    mono.append(f)
                elif isinstance(f, Power) and isinstance(f.base, Jet) and f.exp > 0:
                    mono.extend([f.base] * f.exp)
                elif jets(f):
                    raise SeparationError("expression is not polynomial in the jet variables")
                else:
                    coeff.append(f)
            key = tuple(sorted(mono, key=_jet_key))
            acc.setdefault(key, []).append(Product(coeff) if coeff else ONE)
        out = {}
        for key, cs in acc.items():
            c = canonical(Sum(cs))
            if c != ZERO:
                out[key] = c
        return cls(out)

    def to_expr(self) -> Expr:
        return canonical(Sum(Product((c,) + m) for m, c in self.terms.items()))

    def coefficient(self, *jet_vars: Jet) -> Expr:
        return self.terms.get(tuple(sorted(jet_vars, key=_jet_key)), ZERO)

    @staticmethod
    def weight(mono: Monomial) -> int:
        return sum(j.order for j in mono)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)


# ------------------------------------------------------------------ H_s

def jet(i: int, s: int) -> Jet:
    return Jet(i, s)


def build_Hs(m: Metric, order_tag: Optional[Expr] = None) -> JetPoly:
    """Delta^2(e^u)/e^u for a separated u, as a jet polynomial.

    With ``order_tag`` every metric derivative is multiplied by the tag, so the
    tag's exponent counts derivatives of the metric in each coefficient.
    """
    return JetPoly.from_expr(hs_expr(m, order_tag))


def hs_expr(m: Metric, order_tag: Optional[Expr] = None) -> Expr:
    c = bilaplacian_coeffs(m, order_tag)
    n = m.dim
    A, B, C, D = c.A, c.B, c.C, c.D
    u = [[None] + [Jet(i, s) for s in range(1, 5)] for i in range(n)]
    r = range(n)
    t = []
    for i in r:
        t.append(Product((A[i, i, i, i], u[i][4])))
        t.append(Product((B[i, i, i], u[i][3])))
        t.append(Product((C[i, i], u[i][2])))
        t.append(Product((D[i], u[i][1])))
        for l in r:
            t.append(Product((Const(4), A[i, i, i, l], u[l][1], u[i][3])))
            t.append(Product((Const(3), B[i, i, l], u[l][1], u[i][2])))
            t.append(Product((Const(3), A[i, i, l, l], u[i][2], u[l][2])))
            t.append(Product((C[i, l], u[i][1], u[l][1])))
    for i, j, k in itertools.product(r, repeat=3):
        t.append(Product((Const(6), A[i, j, k, k], u[i][1], u[j][1], u[k][2])))
        t.append(Product((B[i, j, k], u[i][1], u[j][1], u[k][1])))
    for i, j, k, l in itertools.product(r, repeat=4):
        t.append(Product((A[i, j, k, l], u[i][1], u[j][1], u[k][1], u[l][1])))
    return canonical(Sum(t))


def _as_expr(e: Union[Expr, JetPoly]) -> Expr:
    return e.to_expr() if isinstance(e, JetPoly) else canonical(e)


def solve_Ri(hs: Union[Expr, JetPoly], i: int) -> Expr:
    """R_i from D_i(H_s) = 0; the u_i^(4) coefficient of H_s must not vanish."""
    h = _as_expr(hs)
    lead = partial(h, Jet(i, 4))
    if is_zero(lead):
        raise SeparationError(f"coefficient of u{i + 1}_4 vanishes")
    if jets(lead):
        raise SeparationError(f"H_s is not linear in u{i + 1}_4")
    body = [partial(h, Coord(i, ""))]
    for s in range(1, 4):
        body.append(Product((Jet(i, s + 1), partial(h, Jet(i, s)))))
    return canonical(Product((Const(-1), Sum(body), Power(lead, -1))))


def apply_Di(e: Union[Expr, JetPoly], i: int, Ri: Expr) -> Expr:
    """Lifted total derivative along coordinate i."""
    e = _as_expr(e)
    terms = [partial(e, Coord(i, ""))]
    for s in range(1, 4):
        d = partial(e, Jet(i, s))
        if d != ZERO:
            terms.append(Product((Jet(i, s + 1), d)))
    d = partial(e, Jet(i, 4))
    if d != ZERO:
        terms.append(Product((Ri, d)))
    return canonical(Sum(terms))


# ------------------------------------------------------------------ regular separation

@dataclass(frozen=True)
class SeparationReport:
    metric: str
    Hs: JetPoly
    Ri: Tuple[Expr, ...]
    obstructions: Dict[Tuple[int, int], Expr]
    obstruction_witness: Dict[Tuple[int, int], Expr]

    @property
    def regular(self) -> bool:
        return all(e == ZERO for e in self.obstructions.values())


def all_Ri(hs: Union[Expr, JetPoly], n: int) -> Tuple[Expr, ...]:
    return tuple(solve_Ri(hs, i) for i in range(n))


def regular_obstruction(m: Metric) -> SeparationReport:
    """All D_i R_j (i != j); regular separation requires every one to vanish."""
    hs = build_Hs(m)
    h = hs.to_expr()
    R = all_Ri(h, m.dim)
    obs = {}
    wit = {}
    for i, j in itertools.permutations(range(m.dim), 2):
        e = apply_Di(R[j], i, R[i])
        obs[i, j] = e
        wit[i, j] = JetPoly.from_expr(e).coefficient(Jet(i, 3), Jet(j, 3))
    return SeparationReport(m.name, hs, R, obs, wit)


def expected_witness(m: Metric, i: int, j: int) -> Expr:
    """-2(g^ii g^jj + 2 (g^ij)^2) / (g^jj)^2."""
    g = m.g
    return canonical(Product((
        Const(-2),
        Sum((Product((g(i, i), g(j, j))), Product((Const(2), g(i, j), g(i, j))))),
        Power(g(j, j), -2),
    )))


# ------------------------------------------------------------------ constraint sets

@dataclass(frozen=True)
class ConstraintSet:
    """Solved relations ``target = rhs`` describing a submanifold N of jet space.

    ``constants`` name combinations that are constant on N; they are only used
    by :func:`restrict_and_split`.
    """

    relations: Tuple[Tuple[Jet, Expr], ...]
    constants: Tuple[Tuple[str, Expr], ...] = ()
    params: Tuple[str, ...] = ()

    def __post_init__(self):
        rel = tuple((t, canonical(r)) for t, r in self.relations)
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "constants", tuple((n, canonical(e)) for n, e in self.constants))
        seen = set()
        for target, rhs in rel:
            if not isinstance(target, Jet):
                raise SeparationError("relation target must be a jet variable")
            if target in seen:
                raise SeparationError(f"target {target.name} appears more than once")
            seen.add(target)
            for v in jets(rhs):
                if v == target:
                    raise SeparationError(f"rhs of {target.name} contains its own target")
                if v.coord == target.coord and v.order > target.order:
                    raise SeparationError(
                        f"rhs of {target.name} contains the higher-order jet {v.name}")

    @property
    def targets(self) -> Tuple[Jet, ...]:
        return tuple(t for t, _ in self.relations)

    @property
    def scope(self) -> Tuple[int, ...]:
        coords = set()
        for t, r in self.relations:
            coords.add(t.coord)
            coords.update(j.coord for j in jets(r))
        return tuple(sorted(coords))

    def param_atoms(self) -> Tuple[Param, ...]:
        return tuple(Param(n) for n in self.params) + tuple(Param(n) for n, _ in self.constants)

    @classmethod
    def from_json(cls, data: dict, m: Metric) -> "ConstraintSet":
        const_names = [c["name"] for c in data.get("constants", ())]
        params = list(data.get("params", ()))
        names = list(m.params) + params + const_names + ["lambda"]
        rels = []
        for item in data.get("relations", ()):
            target = parse_expr(item["target"], m.chart, names)
            if not isinstance(target, Jet):
                raise SeparationError(f"relation target {item['target']!r} is not a jet variable")
            rels.append((target, parse_expr(item["rhs"], m.chart, names)))
        consts = [(c["name"], parse_expr(c["equals"], m.chart, names)) for c in data.get("constants", ())]
        return cls(tuple(rels), tuple(consts), tuple(params))

    def to_json(self) -> dict:
        from .symbolic import to_text
        out = {"relations": [{"target": t.name, "rhs": to_text(r)} for t, r in self.relations]}
        if self.constants:
            out["constants"] = [{"name": n, "equals": to_text(e)} for n, e in self.constants]
        if self.params:
            out["params"] = list(self.params)
        return out


def load_constraints(path: str, m: Metric) -> ConstraintSet:
    with open(path, encoding="utf-8") as fh:
        return ConstraintSet.from_json(json.load(fh), m)


def with_consequences(m: Metric, base: Sequence[Tuple[Jet, Expr]], up_to: int = 4, **kw) -> ConstraintSet:
    """Extend relations for u_i^(s) by their derivatives along q^i up to order ``up_to``."""
    rels = list(base)
    targets = {t for t, _ in rels}
    for target, rhs in base:
        cur = rhs
        order = target.order
        while order < up_to:
            order += 1
            nxt = Jet(target.coord, order)
            if nxt in targets:
                break
            cur = _restrict(apply_Di(cur, target.coord, ZERO), _resolve(dict(rels)))
            rels.append((nxt, cur))
            targets.add(nxt)
    return ConstraintSet(tuple(rels), **kw)


def _resolve(relations: Mapping[Jet, Expr]) -> Dict[Jet, Expr]:
    """Substitute the relations into each other until no rhs mentions a target."""
    cur = dict(relations)
    keys = frozenset(cur)
    for _ in range(len(cur) + 1):
        if not any(symbols(r) & keys for r in cur.values()):
            return cur
        cur = {t: substitute(r, cur) for t, r in cur.items()}
    raise SeparationError("constraint substitution does not terminate (cyclic relations)")


def _restrict(e: Expr, resolved: Mapping[Jet, Expr]) -> Expr:
    return substitute(e, resolved) if resolved else canonical(e)


def _pde_relation(h: Expr, lam: Expr, targets: Iterable[Jet], n: int):
    """Solve H_s = lambda for the highest-index u_j^(4) that is not already a target."""
    taken = set(targets)
    for j in reversed(range(n)):
        v = Jet(j, 4)
        if v in taken:
            continue
        lead = partial(h, v)
        rest = canonical(Sum((h, Product((Const(-1), lead, v)))))
        rhs = canonical(Product((Sum((lam, Product((Const(-1), rest)))), Power(lead, -1))))
        return v, rhs
    return None


# ------------------------------------------------------------------ verdicts

@dataclass(frozen=True)
class Residual:
    label: str
    expr: Expr
    # factors of the parameter content, as (factor, multiplicity); empty unless conditional
    conditions: Tuple[Tuple[Expr, int], ...] = ()

    @property
    def status(self) -> str:
        if self.expr == ZERO:
            return "zero"
        return "conditional" if self.conditions else "nonzero"


@dataclass(frozen=True)
class ConstraintReport:
    metric: str
    tangency: Tuple[Residual, ...]
    commutation: Tuple[Residual, ...]
    equation: Tuple[Residual, ...] = ()

    @property
    def residuals(self) -> Tuple[Residual, ...]:
        return self.tangency + self.commutation + self.equation

    @property
    def conditional(self) -> Tuple[Residual, ...]:
        return tuple(r for r in self.residuals if r.status == "conditional")

    @property
    def verdict(self) -> str:
        states = {r.status for r in self.residuals}
        if "nonzero" in states:
            return "fail"
        if "conditional" in states:
            return "conditional"
        return "pass"


def _is_param_atom(a: Expr) -> bool:
    if isinstance(a, Param):
        return True
    if isinstance(a, Func):
        return all(isinstance(s, Param) for s in symbols(a))
    return False


def parameter_conditions(e: Expr) -> Tuple[Tuple[Expr, int], ...]:
    """Non-constant factors common to every coefficient of ``e`` that involve only parameters."""
    e = canonical(e)
    if e == ZERO:
        return ()
    mapper, v = to_fraction(e)
    num = v.numer
    pidx = [k for k, a in enumerate(mapper.atoms) if _is_param_atom(a)]
    if not pidx:
        return ()
    ring = num.ring
    groups: Dict[tuple, dict] = {}
    for monom, coeff in num.terms():
        key = tuple(0 if k in pidx else x for k, x in enumerate(monom))
        pm = tuple(x if k in pidx else 0 for k, x in enumerate(monom))
        groups.setdefault(key, {})[pm] = coeff
    content = None
    for g in groups.values():
        p = ring(g)
        content = p if content is None else content.gcd(p)
        if content.is_ground:
            return ()
    _, factors = content.factor_list()
    out = []
    for poly, mult in factors:
        if poly.is_ground:
            continue
        expr = canonical(Sum(mapper._term(mon, Fraction(int(c.numerator), int(c.denominator)))
                             for mon, c in poly.terms()))
        out.append((expr, mult))
    return tuple(out)


def _residual(label: str, e: Expr) -> Residual:
    e = canonical(e)
    return Residual(label, e, parameter_conditions(e) if e != ZERO else ())


def check_constraints(m: Metric, N: ConstraintSet, lam: Expr = LAMBDA) -> ConstraintReport:
    """Tangency and commutation residuals of the separation distribution on N.

    The restriction also imposes H_s = lambda, solved for one fourth-order jet
    variable that N leaves free; if N fixes them all, the equation itself is
    reported as a residual.
    """
    n = m.dim
    h = hs_expr(m)
    R = all_Ri(h, n)
    rels = dict(N.relations)
    pde = _pde_relation(h, lam, rels, n)
    equation = ()
    if pde is not None:
        rels[pde[0]] = pde[1]
    resolved = _resolve(rels)
    if pde is None:
        equation = (_residual("equation", _restrict(Sum((h, Product((Const(-1), lam)))), resolved)),)
    tangency = []
    for target, rhs in N.relations:
        diff = Sum((target, Product((Const(-1), rhs))))
        for i in range(n):
            e = _restrict(apply_Di(diff, i, R[i]), resolved)
            tangency.append(_residual(f"D{i + 1}({target.name})", e))
    commutation = []
    for i, j in itertools.permutations(range(n), 2):
        e = _restrict(apply_Di(R[j], i, R[i]), resolved)
        commutation.append(_residual(f"D{i + 1}R{j + 1}", e))
    return ConstraintReport(m.name, tuple(tangency), tuple(commutation), equation)


# ------------------------------------------------------------------ restriction and splitting

@dataclass(frozen=True)
class SplitPart:
    scope: Optional[Tuple[int, ...]]
    expr: Expr


def _solve_constant(name: str, definition: Expr) -> Tuple[Jet, Expr]:
    """Solve ``name = definition`` for the highest-order jet variable in it."""
    js = jets(definition)
    if not js:
        raise SeparationError(f"constant {name} does not involve any jet variable")
    v = max(js, key=lambda j: (j.order, j.coord))
    a = partial(definition, v)
    if jets(a) & {v}:
        raise SeparationError(f"constant {name} is not linear in {v.name}")
    rest = canonical(Sum((definition, Product((Const(-1), a, v)))))
    return v, canonical(Product((Sum((Param(name), Product((Const(-1), rest)))), Power(a, -1))))


def _term_scope(t: Expr) -> frozenset:
    out = set()
    for s in symbols(t):
        if isinstance(s, Coord):
            out.add(s.index)
        elif isinstance(s, Jet):
            out.add(s.coord)
    return frozenset(out)


def restrict_and_split(m: Metric, N: ConstraintSet, lam: Expr = LAMBDA) -> List[SplitPart]:
    """H_s - lambda on N, rewritten with N's constants, grouped by coordinate."""
    h = hs_expr(m)
    e = _restrict(Sum((h, Product((Const(-1), lam)))), _resolve(dict(N.relations)))
    if N.constants:
        subs = dict(_solve_constant(name, d) for name, d in N.constants)
        e = substitute(e, _resolve(subs))
    parts: Dict[Optional[frozenset], list] = {}
    for t in (e.terms if isinstance(e, Sum) else (e,)):
        if t == ZERO:
            continue
        sc = _term_scope(t)
        if len(sc) > 1:
            raise SeparationError("restricted equation does not split: a term couples coordinates "
                                  + ", ".join(m.chart[k] for k in sorted(sc)))
        parts.setdefault(next(iter(sc)) if sc else None, []).append(t)
    const = parts.pop(None, [])
    if len(parts) == 1:
        (k, ts), = parts.items()
        parts = {k: ts + const}
    elif const or not parts:
        parts[None] = const
    out = []
    for k in sorted(parts, key=lambda x: (x is None, x)):
        out.append(SplitPart(None if k is None else (k,), canonical(Sum(parts[k]))))
    return out


# ------------------------------------------------------------------ numeric spot checks

def seeded_rng(default: int = 0):
    """Random generator seeded from BIHELM_SEED (or ``default``)."""
    import os
    import random
    return random.Random(int(os.environ.get("BIHELM_SEED", default)))


def sample_point(m: Metric, rng, names: Iterable[str] = ()) -> Dict[str, float]:
    """Random numeric values for coordinates, jet variables and parameters.

    Coordinates and parameters are drawn from [0.5, 1.5] (away from the polar
    origin and from vanishing conformal factors); jet variables from [-1, 1].
    """
    point = {c: rng.uniform(0.5, 1.5) for c in m.chart}
    for i in range(m.dim):
        for s in range(1, 5):
            point[Jet(i, s).name] = rng.uniform(-1.0, 1.0)
    for p in list(m.params) + list(names) + ["lambda"]:
        point.setdefault(p, rng.uniform(0.5, 1.5))
    return point
