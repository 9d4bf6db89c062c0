"""Bessel functions J_n and modified Bessel functions I_n of integer order.

Design envelope: 0 <= n <= 10, 0 <= x <= 50.  I_n comes from its ascending
series (all terms positive, summed with math.fsum).  J_n uses the series
for small x and Miller's backward recurrence, normalized by the Neumann sum
J_0 + 2 (J_2 + J_4 + ...) = 1, for larger x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

N_MAX = 10
X_MAX = 50.0
SERIES_LIMIT = 3.0  # below this J_n uses the power series, above it backward recurrence


class BesselDomainError(ValueError):
    pass


@dataclass(frozen=True)
class BesselEval:
    kind: str  # "J" or "I"
    n: int
    x: float
    value: float
    derivative: float


def _check(n, x):
    if isinstance(n, bool) or not isinstance(n, int) or not 0 <= n <= N_MAX:
        raise BesselDomainError(f"order must be an integer in [0, {N_MAX}], got {n!r}")
    if not (0.0 <= x <= X_MAX):
        raise BesselDomainError(f"argument must lie in [0, {X_MAX:g}], got {x!r}")


# ------------------------------------------------------------------ internal, unchecked

def _series(n: int, x: float, sign: int) -> float:
    """sum_k sign^k (x/2)^(2k+n) / (k! (k+n)!)."""
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    h = 0.5 * x
    q = h * h
    term = h ** n / math.factorial(n)
    terms = [term]
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        terms.append(term if sign > 0 or k % 2 == 0 else -term)
        if term == 0.0 or (term < 1e-18 * abs(terms[0]) and k > q):
            break
    return math.fsum(terms)


def _j_miller(nmax: int, x: float) -> List[float]:
    """J_0..J_nmax at x > 0 by backward recurrence."""
    start = 2 * ((max(nmax, int(x)) + 20 + int(math.sqrt(40 * max(nmax, x)))) // 2)
    vals = [0.0] * (start + 2)
    vals[start] = 1e-30
    for k in range(start, 0, -1):
        vals[k - 1] = (2 * k / x) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e250:
            scale = 1e-250
            for j in range(k - 1, start + 1):
                vals[j] *= scale
    norm = math.fsum([vals[0]] + [2 * vals[k] for k in range(2, start + 1, 2)])
    return [v / norm for v in vals[: nmax + 1]]


def _jn(n: int, x: float) -> float:
    if n < 0:
        return -_jn(-n, x) if n % 2 else _jn(-n, x)
    if x < SERIES_LIMIT:
        return _series(n, x, -1)
    return _j_miller(n, x)[n]


def _in(n: int, x: float) -> float:
    return _series(abs(n), x, 1)


def _jn_all(nmax: int, x: float) -> List[float]:
    if x < SERIES_LIMIT:
        return [_series(k, x, -1) for k in range(nmax + 1)]
    return _j_miller(nmax, x)


def _signed(vals: List[float], n: int, odd_sign: int) -> float:
    if n >= 0:
        return vals[n]
    return odd_sign * vals[-n] if n % 2 else vals[-n]


def j_scaled_derivative(n: int, k: float, r: float, p: int) -> float:
    """d^p/dr^p J_n(k r) = (k/2)^p sum_j (-1)^j C(p, j) J_{n-p+2j}(k r)."""
    x = k * r
    vals = _jn_all(abs(n) + p, x)
    total = math.fsum((-1) ** j * math.comb(p, j) * _signed(vals, n - p + 2 * j, -1) for j in range(p + 1))
    return (0.5 * k) ** p * total


def i_scaled_derivative(n: int, k: float, r: float, p: int) -> float:
    """d^p/dr^p I_n(k r) = (k/2)^p sum_j C(p, j) I_{n-p+2j}(k r)."""
    x = k * r
    total = math.fsum(math.comb(p, j) * _in(n - p + 2 * j, x) for j in range(p + 1))
    return (0.5 * k) ** p * total


# ------------------------------------------------------------------ public

def bessel_j(n: int, x: float) -> float:
    _check(n, x)
    return _jn(n, float(x))


def bessel_i(n: int, x: float) -> float:
    _check(n, x)
    return _in(n, float(x))


def bessel_j_prime(n: int, x: float) -> float:
    _check(n, x)
    x = float(x)
    if n == 0:
        return -_jn(1, x)
    return 0.5 * (_jn(n - 1, x) - _jn(n + 1, x))


def bessel_i_prime(n: int, x: float) -> float:
    _check(n, x)
    x = float(x)
    if n == 0:
        return _in(1, x)
    return 0.5 * (_in(n - 1, x) + _in(n + 1, x))


def bessel_eval(kind: str, n: int, x: float) -> BesselEval:
    if kind == "J":
        return BesselEval(kind, n, x, bessel_j(n, x), bessel_j_prime(n, x))
    if kind == "I":
        return BesselEval(kind, n, x, bessel_i(n, x), bessel_i_prime(n, x))
    raise ValueError(f"unknown Bessel kind {kind!r}")
