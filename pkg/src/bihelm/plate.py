"""Free vibration of a clamped circular plate, rho psi_tt + c Delta^2 psi = 0.

Separating psi = T(t) Theta(theta) R(r) gives T'' + omega^2 T = 0 with
omega^2 = c k^4 / rho, Theta'' = -n^2 Theta, and a radial equation whose
bounded solutions are I_n(k r) - (I_n(k a) / J_n(k a)) J_n(k r).  The edge
conditions R(a) = R'(a) = 0 fix k a = l_{n,m}, the m-th positive root of
I_n'(x) J_n(x) - J_n'(x) I_n(x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .bessel import _check, _in, _jn, i_scaled_derivative, j_scaled_derivative

DEFAULT_WINDOW = (0.5, 30.0)
SCAN_STEP = 0.05
BRACKET_WIDTH = 1e-12


class PlateError(ValueError):
    pass


@dataclass(frozen=True)
class PlateConfig:
    a: float = 1.0
    rho: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        for name in ("a", "rho", "c"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise PlateError(f"{name} must be a positive finite number, got {v!r}")


@dataclass(frozen=True)
class TimeSeparation:
    omega: float

    def T(self, t: float, G: float = 1.0, H: float = 0.0) -> float:
        return G * math.cos(self.omega * t) + H * math.sin(self.omega * t)

    def T_second(self, t: float, G: float = 1.0, H: float = 0.0) -> float:
        return -self.omega ** 2 * self.T(t, G, H)


def time_separation(cfg: PlateConfig, k: float) -> TimeSeparation:
    """omega = sqrt(c / rho) k^2, from omega^2 = c k^4 / rho."""
    if not k > 0:
        raise PlateError("wavenumber must be positive")
    return TimeSeparation(math.sqrt(cfg.c / cfg.rho) * k * k)


# ------------------------------------------------------------------ frequency equation

def _freq(n: int, x: float) -> float:
    jp = 0.5 * (_jn(n - 1, x) - _jn(n + 1, x))
    ip = 0.5 * (_in(n - 1, x) + _in(n + 1, x))
    return ip * _jn(n, x) - jp * _in(n, x)


def frequency_function(n: int, x: float) -> float:
    """I_n'(x) J_n(x) - J_n'(x) I_n(x); its positive zeros are the clamped-plate roots."""
    _check(n, x)
    return _freq(n, float(x))


def _bisect(fn: Callable[[float], float], lo: float, hi: float, flo: float) -> float:
    while hi - lo > BRACKET_WIDTH:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_roots(n: int, m_max: int, window: Tuple[float, float] = DEFAULT_WINDOW,
               step: float = SCAN_STEP) -> List[float]:
    """First ``m_max`` roots l_{n,1} < l_{n,2} < ... of the frequency equation inside ``window``."""
    lo, hi = window
    if not 0 < lo < hi:
        raise PlateError("root window must satisfy 0 < lo < hi (x = 0 is a degenerate root)")
    if m_max < 1:
        raise PlateError("m_max must be at least 1")
    _check(n, hi)

    def fn(x):
        return _freq(n, x)

    roots: List[float] = []
    x0, f0 = lo, fn(lo)
    steps = int(math.ceil((hi - lo) / step))
    for s in range(1, steps + 1):
        x1 = min(lo + s * step, hi)
        f1 = fn(x1)
        if f0 == 0.0:
            roots.append(x0)
        elif (f0 < 0) != (f1 < 0) and f1 != 0.0:
            roots.append(_bisect(fn, x0, x1, f0))
        if len(roots) == m_max:
            return roots
        x0, f0 = x1, f1
    raise PlateError(f"only {len(roots)} root(s) of order {n} in [{lo:g}, {hi:g}]; {m_max} requested")


# ------------------------------------------------------------------ modes

@dataclass(frozen=True)
class PlateMode:
    n: int
    m: int
    root: float
    a: float
    ratio: float  # A_n / C_n = -I_n(l) / J_n(l)
    omega: float

    @property
    def k(self) -> float:
        return self.root / self.a


def make_mode(n: int, m: int, cfg: PlateConfig = PlateConfig(), roots: Optional[Sequence[float]] = None) -> PlateMode:
    roots = roots if roots is not None else find_roots(n, m)
    l = roots[m - 1]
    jl = _jn(n, l)
    if abs(jl) < 1e-14:
        raise PlateError("J_n vanishes at the root; the ratio I_n/J_n is undefined")
    k = l / cfg.a
    return PlateMode(n, m, l, cfg.a, -_in(n, l) / jl, time_separation(cfg, k).omega)


def radial_derivative(mode: PlateMode, r: float, p: int = 0) -> float:
    """p-th r-derivative of R(r) = I_n(k r) - (I_n(l)/J_n(l)) J_n(k r)."""
    if not 0 <= r <= mode.a * (1 + 1e-12):
        raise PlateError("radius outside the plate")
    k = mode.k
    return i_scaled_derivative(mode.n, k, r, p) + mode.ratio * j_scaled_derivative(mode.n, k, r, p)


def radial_mode(mode: PlateMode, r: float) -> float:
    return radial_derivative(mode, r, 0)


def _radii(a: float, count: int) -> List[float]:
    return [a * (i + 0.5) / count for i in range(count)]


def boundary_residuals(mode: PlateMode, samples: int = 400) -> Tuple[float, float]:
    """|R(a)| / max|R| and |R'(a)| / max|R'| over the open disk."""
    rs = _radii(mode.a, samples)
    rmax = max(abs(radial_derivative(mode, r, 0)) for r in rs)
    dmax = max(abs(radial_derivative(mode, r, 1)) for r in rs)
    return (abs(radial_derivative(mode, mode.a, 0)) / rmax, abs(radial_derivative(mode, mode.a, 1)) / dmax)


def pde_residual(mode: PlateMode, samples: Optional[Iterable[Tuple[float, float]]] = None) -> float:
    """max |Delta^2 w - k^4 w| / max |w| for w = R(r) cos(n theta), written out in polar form."""
    if samples is None:
        samples = [(r, t) for r in _radii(mode.a, 25) for t in (0.0, 0.3, 1.1, 2.5)]
    n, k4 = mode.n, mode.k ** 4
    worst = 0.0
    wmax = 0.0
    for r, theta in samples:
        if not 0 < r < mode.a:
            raise PlateError("pde residual samples must satisfy 0 < r < a")
        c = math.cos(n * theta)
        d = [radial_derivative(mode, r, p) * c for p in range(5)]
        w, wr, wrr, wrrr, wrrrr = d
        w_tt = -n * n * w
        w_tttt = n ** 4 * w
        w_rtt = -n * n * wr
        w_rrtt = -n * n * wrr
        bilap = (wrrrr + 2 / r * wrrr - wrr / r ** 2 + wr / r ** 3 + w_tttt / r ** 4
                 + 4 * w_tt / r ** 4 - 2 * w_rtt / r ** 3 + 2 * w_rrtt / r ** 2)
        worst = max(worst, abs(bilap - k4 * w))
        wmax = max(wmax, abs(w))
    return 0.0 if wmax == 0.0 else worst / wmax


# ------------------------------------------------------------------ operator factorization

class Taylor:
    """Truncated Taylor expansion at a point: c[j] = f^(j)(r0) / j!."""

    def __init__(self, coeffs: Sequence[float]):
        self.c = list(coeffs)

    @classmethod
    def from_derivatives(cls, derivs: Sequence[float]) -> "Taylor":
        return cls([d / math.factorial(j) for j, d in enumerate(derivs)])

    @classmethod
    def inverse_power(cls, r0: float, p: int, order: int) -> "Taylor":
        """Expansion of r^-p at r0."""
        return cls([math.comb(p + j - 1, j) * (-1) ** j / r0 ** (p + j) for j in range(order + 1)])

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def deriv(self) -> "Taylor":
        return Taylor([(j + 1) * self.c[j + 1] for j in range(self.order)])

    def __mul__(self, other):
        if isinstance(other, Taylor):
            n = min(self.order, other.order)
            return Taylor([math.fsum(self.c[i] * other.c[j - i] for i in range(j + 1)) for j in range(n + 1)])
        return Taylor([other * x for x in self.c])

    __rmul__ = __mul__

    def __add__(self, other: "Taylor") -> "Taylor":
        n = min(self.order, other.order)
        return Taylor([self.c[j] + other.c[j] for j in range(n + 1)])

    def value(self) -> float:
        return self.c[0]


def bessel_operator(f: Taylor, r0: float, n: int, shift: float) -> Taylor:
    """(D^2 + D/r - n^2/r^2 + shift) f."""
    order = f.order
    d1 = f.deriv()
    d2 = d1.deriv()
    inv1 = Taylor.inverse_power(r0, 1, order)
    inv2 = Taylor.inverse_power(r0, 2, order)
    return d2 + inv1 * d1 + (-n * n) * (inv2 * f) + shift * f


def squared_operator(f: Taylor, r0: float, n: int) -> float:
    """Radial part of the bi-Laplacian: D^4 + (2/r)D^3 - (1+2n^2)/r^2 D^2 + (1+2n^2)/r^3 D - n^2(4-n^2)/r^4."""
    d = [f.c[j] * math.factorial(j) for j in range(5)]
    q = 1 + 2 * n * n
    return (d[4] + 2 / r0 * d[3] - q / r0 ** 2 * d[2] + q / r0 ** 3 * d[1]
            - n * n * (4 - n * n) / r0 ** 4 * d[0])


def sample_functions(n: int, k: float) -> List[Tuple[str, Callable[[float], List[float]]]]:
    """Radial samples with exact derivatives up to order 4."""
    def bessel_j(r):
        return [j_scaled_derivative(n, k, r, p) for p in range(5)]

    def bessel_i(r):
        return [i_scaled_derivative(n, k, r, p) for p in range(5)]

    def power(r):
        e = n + 2
        return [math.perm(e, p) * r ** (e - p) for p in range(5)]

    return [("J_n(kr)", bessel_j), ("I_n(kr)", bessel_i), (f"r^{n + 2}", power)]


def factorization_check(n: int, k: float, radii: Sequence[float] = (0.25, 0.5, 0.75, 1.0),
                        samples=None) -> float:
    """Largest difference between either ordering of (L0 + k^2)(L0 - k^2) and the direct fourth-order operator minus k^4."""
    samples = samples if samples is not None else sample_functions(n, k)
    worst = 0.0
    k2 = k * k
    for _, fn in samples:
        for r0 in radii:
            f = Taylor.from_derivatives(fn(r0))
            direct = squared_operator(f, r0, n) - k2 * k2 * f.value()
            plus_minus = bessel_operator(bessel_operator(f, r0, n, -k2), r0, n, k2).value()
            minus_plus = bessel_operator(bessel_operator(f, r0, n, k2), r0, n, -k2).value()
            worst = max(worst, abs(plus_minus - direct), abs(minus_plus - direct))
    return worst


# ------------------------------------------------------------------ full field

@dataclass(frozen=True)
class ModeAmplitude:
    mode: PlateMode
    E: float = 1.0
    F: float = 0.0
    G: float = 1.0
    H: float = 0.0


def polar_grid(a: float, nr: int, nt: int) -> List[Tuple[float, float]]:
    """nr radii from 0 to a inclusive, nt angles in [0, 2 pi)."""
    if nr < 2 or nt < 1:
        raise PlateError("grid needs at least 2 radii and 1 angle")
    return [(a * i / (nr - 1), 2 * math.pi * j / nt) for i in range(nr) for j in range(nt)]


def mode_field(modes: Sequence[ModeAmplitude], grid: Iterable[Tuple[float, float]], t: float = 0.0
               ) -> List[Tuple[float, float, float, float]]:
    """Samples (r, theta, t, psi) of sum (E cos n theta + F sin n theta)(G cos wt + H sin wt) R(r)."""
    out = []
    for r, theta in grid:
        psi = 0.0
        for ma in modes:
            m = ma.mode
            ang = ma.E * math.cos(m.n * theta) + ma.F * math.sin(m.n * theta)
            tmp = ma.G * math.cos(m.omega * t) + ma.H * math.sin(m.omega * t)
            psi += ang * tmp * radial_mode(m, min(r, m.a))
        out.append((r, theta, t, psi))
    return out
