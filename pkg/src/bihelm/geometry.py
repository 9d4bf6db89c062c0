"""Metric quantities needed for the Laplacian and the bi-Laplacian.

All results are canonical :class:`~bihelm.symbolic.Expr` values.  Derivatives
of metric-derived quantities can optionally be multiplied by a marker
parameter (``order_tag``) so that the number of metric derivatives carried by
every coefficient can be read off as the power of the marker.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

from .symbolic import (
    ZERO, Const, Coord, Expr, Power, Product, Sum, canonical,
    differentiate, is_zero, parse_expr,
)

Matrix = Tuple[Tuple[Expr, ...], ...]


class MetricError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Metric:
    chart: Tuple[str, ...]
    g_contra: Matrix
    params: Tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self):
        n = len(self.chart)
        if not 1 <= n <= 4:
            raise MetricError("dimension must be between 1 and 4")
        g = tuple(tuple(canonical(x) for x in row) for row in self.g_contra)
        if len(g) != n or any(len(row) != n for row in g):
            raise MetricError(f"g_contra must be {n}x{n}")
        object.__setattr__(self, "g_contra", g)
        object.__setattr__(self, "chart", tuple(self.chart))
        object.__setattr__(self, "params", tuple(self.params))
        for i in range(n):
            if is_zero(g[i][i]):
                raise MetricError(f"g^{{{i + 1}{i + 1}}} vanishes identically")
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise MetricError("g_contra is not symmetric")
        if is_zero(determinant(g)):
            raise MetricError("g_contra is singular")

    @property
    def dim(self) -> int:
        return len(self.chart)

    @cached_property
    def coords(self) -> Tuple[Coord, ...]:
        return tuple(Coord(i, name) for i, name in enumerate(self.chart))

    def g(self, i: int, j: int) -> Expr:
        return self.g_contra[i][j]

    @classmethod
    def from_strings(cls, chart: Sequence[str], rows, params: Sequence[str] = (), name: str = ""):
        return cls(tuple(chart), tuple(tuple(parse_expr(x, chart, params) for x in row) for row in rows),
                   tuple(params), name)

    @classmethod
    def from_json(cls, data: dict, name: str = ""):
        return cls.from_strings(data["chart"], data["g_contra"], data.get("params", ()), name or data.get("name", ""))

    def to_json(self) -> dict:
        return {
            "chart": list(self.chart),
            "params": list(self.params),
            "g_contra": [[str(x) for x in row] for row in self.g_contra],
        }


def load_metric(path: str) -> Metric:
    with open(path, encoding="utf-8") as fh:
        return Metric.from_json(json.load(fh), name=path)


# ------------------------------------------------------------------ algebra

def determinant(mat) -> Expr:
    n = len(mat)
    if n == 1:
        return canonical(mat[0][0])
    if n == 2:
        return canonical(mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0])
    terms = []
    for j in range(n):
        if is_zero(mat[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        sign = 1 if j % 2 == 0 else -1
        terms.append(Product((Const(sign), mat[0][j], determinant(minor))))
    return canonical(Sum(terms)) if terms else ZERO


def inverse(mat) -> Matrix:
    """Cofactor inverse of a small symbolic matrix."""
    n = len(mat)
    det = determinant(mat)
    if is_zero(det):
        raise MetricError("singular symbolic matrix")
    if n == 1:
        return ((canonical(Power(det, -1)),),)
    inv_det = Power(det, -1)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(mat) if k != i]
            sign = 1 if (i + j) % 2 == 0 else -1
            out[j][i] = canonical(Product((Const(sign), determinant(minor), inv_det)))
    return tuple(tuple(row) for row in out)


def covariant_components(m: Metric) -> Matrix:
    return _covariant(m)


_cov_cache: Dict[int, Matrix] = {}


def _covariant(m: Metric) -> Matrix:
    key = id(m)
    hit = _cov_cache.get(key)
    if hit is None or hit[0] is not m:
        hit = (m, inverse(m.g_contra))
        _cov_cache[key] = hit
    return hit[1]


def _dtag(e: Expr, i: int, tag: Optional[Expr]) -> Expr:
    d = differentiate(e, i)
    if tag is None or d == ZERO:
        return d
    return canonical(Product((tag, d)))


def contracted_christoffel(m: Metric, order_tag: Optional[Expr] = None) -> Tuple[Expr, ...]:
    """Gamma^h = 1/2 g^{ij} g^{hk} (d_i g_jk + d_j g_ik - d_k g_ij)."""
    n = m.dim
    gl = covariant_components(m)
    dg = [[[_dtag(gl[j][k], i, order_tag) for k in range(n)] for j in range(n)] for i in range(n)]
    out = []
    for h in range(n):
        terms = []
        for i, j, k in itertools.product(range(n), repeat=3):
            if is_zero(m.g(i, j)) or is_zero(m.g(h, k)):
                continue
            bracket = Sum((dg[i][j][k], dg[j][i][k], Product((Const(-1), dg[k][i][j]))))
            terms.append(Product((Const(Fraction(1, 2)), m.g(i, j), m.g(h, k), bracket)))
        out.append(canonical(Sum(terms)) if terms else ZERO)
    return tuple(out)


def laplacian_apply(m: Metric, second_derivs, first_derivs, gamma=None) -> Expr:
    """g^{ij} psi_ij - Gamma^i psi_i for caller-supplied derivative expressions."""
    n = m.dim
    if len(first_derivs) != n or len(second_derivs) != n or any(len(r) != n for r in second_derivs):
        raise MetricError("dimension mismatch between metric and derivative arrays")
    gamma = contracted_christoffel(m) if gamma is None else gamma
    terms = []
    for i in range(n):
        for j in range(n):
            terms.append(Product((m.g(i, j), second_derivs[i][j])))
        terms.append(Product((Const(-1), gamma[i], first_derivs[i])))
    return canonical(Sum(terms))


def laplacian_of(m: Metric, f: Expr, gamma=None, order_tag: Optional[Expr] = None) -> Expr:
    """Laplace-Beltrami operator applied to a jet-free expression."""
    n = m.dim
    first = [_dtag(f, i, order_tag) for i in range(n)]
    second = [[_dtag(first[i], j, order_tag) for j in range(n)] for i in range(n)]
    return laplacian_apply(m, second, first, gamma=gamma)


# -------------------------------------------------------- bi-Laplacian

class SymmetricArray:
    """Fully symmetric array stored by sorted index tuple."""

    def __init__(self, rank: int, n: int, values: Dict[tuple, Expr]):
        self.rank = rank
        self.n = n
        self._values = values

    def __getitem__(self, idx) -> Expr:
        if isinstance(idx, int):
            idx = (idx,)
        return self._values[tuple(sorted(idx))]

    def items(self):
        return self._values.items()

    def is_zero(self) -> bool:
        return all(v == ZERO for v in self._values.values())


def _symmetrize(rank: int, n: int, raw) -> SymmetricArray:
    """Normalized symmetrization (1/p!) sum over permutations of ``raw(*idx)``."""
    values = {}
    for idx in itertools.combinations_with_replacement(range(n), rank):
        perms = list(itertools.permutations(idx))
        terms = [raw(*p) for p in perms]
        values[idx] = canonical(Product((Const(Fraction(1, len(perms))), Sum(terms))))
    return SymmetricArray(rank, n, values)


@dataclass(frozen=True)
class BiLapCoeffs:
    gamma: Tuple[Expr, ...]
    A: SymmetricArray
    B: SymmetricArray
    C: SymmetricArray
    D: Tuple[Expr, ...]


def bilaplacian_coeffs(m: Metric, order_tag: Optional[Expr] = None) -> BiLapCoeffs:
    """Coefficients of Delta^2 psi = A^{ijkl} psi_ijkl + B^{ijk} psi_ijk + C^{ij} psi_ij + D^i psi_i."""
    n = m.dim
    g = m.g
    gam = contracted_christoffel(m, order_tag)
    dg = [[[_dtag(g(j, k), h, order_tag) for k in range(n)] for j in range(n)] for h in range(n)]
    ddg = [[[[_dtag(dg[h][j][k], l, order_tag) for k in range(n)] for j in range(n)] for h in range(n)]
           for l in range(n)]
    dgam = [[_dtag(gam[j], k, order_tag) for j in range(n)] for k in range(n)]  # dgam[k][j] = d_k Gamma^j
    ddgam = [[[_dtag(dgam[k][j], l, order_tag) for j in range(n)] for k in range(n)] for l in range(n)]

    A = _symmetrize(4, n, lambda i, j, k, l: Product((g(i, j), g(k, l))))

    def b_raw(i, j, k):
        terms = [Product((Const(2), g(h, i), dg[h][j][k])) for h in range(n)]
        terms.append(Product((Const(-2), g(i, j), gam[k])))
        return Sum(terms)

    B = _symmetrize(3, n, b_raw)

    def c_raw(i, j):
        terms = []
        for k in range(n):
            for l in range(n):
                terms.append(Product((g(k, l), ddg[l][k][i][j])))
            terms.append(Product((Const(-2), g(k, i), dgam[k][j])))
            terms.append(Product((Const(-1), gam[k], dg[k][i][j])))
        terms.append(Product((gam[i], gam[j])))
        return Sum(terms)

    C = _symmetrize(2, n, c_raw)

    D = []
    for i in range(n):
        terms = []
        for j in range(n):
            for k in range(n):
                terms.append(Product((Const(-1), g(j, k), ddgam[k][j][i])))
            terms.append(Product((gam[j], dgam[j][i])))
        D.append(canonical(Sum(terms)))
    return BiLapCoeffs(gam, A, B, C, tuple(D))


def bilaplacian_apply(coeffs: BiLapCoeffs, d1, d2, d3, d4) -> Expr:
    """Contract the coefficient families with derivative arrays ``d_p[i][j]...``."""
    n = len(coeffs.gamma)
    terms = []
    for idx in itertools.product(range(n), repeat=4):
        terms.append(Product((coeffs.A[idx], d4[idx[0]][idx[1]][idx[2]][idx[3]])))
    for idx in itertools.product(range(n), repeat=3):
        terms.append(Product((coeffs.B[idx], d3[idx[0]][idx[1]][idx[2]])))
    for i, j in itertools.product(range(n), repeat=2):
        terms.append(Product((coeffs.C[i, j], d2[i][j])))
    for i in range(n):
        terms.append(Product((coeffs.D[i], d1[i])))
    return canonical(Sum(terms))


def gaussian_curvature(m: Metric) -> Expr:
    """K = R_{1212} / det(g_ij) for a two-dimensional metric."""
    if m.dim != 2:
        raise MetricError("Gaussian curvature is only defined here for dimension 2")
    n = 2
    gl = covariant_components(m)
    dg = [[[differentiate(gl[j][k], i) for k in range(n)] for j in range(n)] for i in range(n)]
    # Christoffel symbols of the second kind: chr[a][b][c] = Gamma^a_{bc}
    chr_ = [[[canonical(Sum(
        Product((Const(Fraction(1, 2)), m.g(a, d), Sum((dg[b][c][d], dg[c][b][d], Product((Const(-1), dg[d][b][c]))))))
        for d in range(n))) for c in range(n)] for b in range(n)] for a in range(n)]

    def riemann_up(a, b, c, d):
        # R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
        terms = [differentiate(chr_[a][d][b], c), Product((Const(-1), differentiate(chr_[a][c][b], d)))]
        for e in range(n):
            terms.append(Product((chr_[a][c][e], chr_[e][d][b])))
            terms.append(Product((Const(-1), chr_[a][d][e], chr_[e][c][b])))
        return Sum(terms)

    r1212 = Sum(Product((gl[0][a], riemann_up(a, 1, 0, 1))) for a in range(n))
    return canonical(Product((r1212, Power(determinant(gl), -1))))
