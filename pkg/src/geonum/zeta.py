"""Rank-1 and rank-2 non-abelian zeta functions over Q.

Both are assembled as ``I(s) + I(1-s) + V / (s (s-1))`` where
``I(s) = int_{covol >= 1} (theta - 1) T^(s-1) dT dmu_tau`` runs over semistable
lattices of covolume T >= 1 and V is the volume of the semistable locus at
covolume one. The polar part equals ``V (1/(s-1) - 1/s)`` and is written in
the product form so that the assembly is exactly symmetric under s -> 1-s.

Rank 2 moduli are parametrized by tau = x + iy in the standard fundamental
domain with y <= 1, using the coordinate u = 1/y (so that dx dy / y^2 = dx du)
and folding x -> -x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import loggamma

from .errors import ConvergenceError, PoleArgument
from .field import make_field
from .lattice import MetrizedLattice, from_basis, standard_lattice
from .theta import ThetaEngine, _half_gaussian_sum_bound
from .vanishing import _C0

EPS = np.finfo(float).eps
_QQ = make_field(None)


@dataclass(frozen=True)
class ZetaEval:
    s: complex
    value: complex
    I_s: complex
    I_1ms: complex
    polar: complex
    abs_error: float
    method: str
    sample_count: int
    rank: int = 1
    T_max: float = 0.0

    def to_record(self) -> dict:
        def c(z):
            return {"re": float(z.real), "im": float(z.imag)}

        return {
            "rank": self.rank,
            "s": c(self.s),
            "value": c(self.value),
            "I_s": c(self.I_s),
            "I_1ms": c(self.I_1ms),
            "polar": c(self.polar),
            "abs_error": self.abs_error,
            "error_kind": "certified" if self.method == "quadrature" and self.rank == 1 else "estimated",
            "method": self.method,
            "sample_count": self.sample_count,
            "T_max": self.T_max,
        }


def _check_pole(s: complex) -> complex:
    s = complex(s)
    if s == 0 or s == 1:
        raise PoleArgument(f"s = {s} is a pole")
    return s


def _assemble(s, I_s, I_1ms, vol, err, method, count, rank, tmax) -> ZetaEval:
    polar = vol / (s * (s - 1))
    return ZetaEval(s, I_s + I_1ms + polar, I_s, I_1ms, polar, float(err), method, int(count), rank, float(tmax))


# completed Riemann zeta ----------------------------------------------------

_BORWEIN_N = 96


@lru_cache(maxsize=1)
def _borwein_weights() -> np.ndarray:
    """Signed weights ``w_k`` with ``eta(s) ~ sum_k w_k (k+1)^(-s)`` (Borwein's algorithm 2)."""
    n = _BORWEIN_N
    acc = Fraction(0)
    d = []
    for i in range(n + 1):
        acc += Fraction(math.factorial(n + i - 1) * 4**i, math.factorial(n - i) * math.factorial(2 * i))
        d.append(n * acc)
    dn = d[n]
    return np.array([float(-((-1) ** k) * (d[k] - dn) / dn) for k in range(n)])


def _zeta_right(s: complex) -> complex:
    """zeta(s) for Re s >= 1/2, s != 1."""
    k = np.arange(1, _BORWEIN_N + 1, dtype=float)
    eta = complex(np.sum(_borwein_weights() * np.exp(-s * np.log(k))))
    return eta / -np.expm1((1 - s) * math.log(2.0))


def xi_reference(s: complex) -> complex:
    """Completed Riemann zeta ``pi^(-s/2) Gamma(s/2) zeta(s)``, using xi(s) = xi(1-s) left of 1/2."""
    s = _check_pole(s)
    if s.real < 0.5:
        s = 1 - s
    return complex(np.exp(loggamma(s / 2) - 0.5 * s * math.log(math.pi)) * _zeta_right(s))


# quadrature helpers --------------------------------------------------------

@lru_cache(maxsize=16)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _panel_nodes(a: float, b: float, width: float, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes, weights and panel edges on [a, b]."""
    m = max(1, math.ceil((b - a) / width - 1e-12))
    edges = np.linspace(a, b, m + 1)
    x, w = _gauss_legendre(n)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1)).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes, weights, edges


def _gl_interval(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(n)
    return a + 0.5 * (b - a) * (x + 1), 0.5 * (b - a) * w


def _gaussian_moment_tail(a: float, p: float) -> float:
    """Upper bound on ``int_a^inf exp(-pi T^2) T^p dT``."""
    den = 2 * math.pi * a - max(p, 0.0) / a
    if den <= 0:
        return math.inf
    return a**p * math.exp(-math.pi * a * a) / den


def _exp_moment_tail(a: float, p: float) -> float:
    """Upper bound on ``int_a^inf exp(-pi T) T^p dT``."""
    den = math.pi - max(p, 0.0) / a
    if den <= 0:
        return math.inf
    return a**p * math.exp(-math.pi * a) / den


# rank 1 ----------------------------------------------------------------------

RANK1_PANEL = 0.25
RANK1_NODES = 30


def _rank1_panel_error(edges: np.ndarray, s: complex, n: int) -> float:
    """Bernstein-ellipse bound on the Gauss-Legendre error of ``(theta(T)-1) T^(s-1)`` per panel, summed."""
    sig, t = s.real, abs(s.imag)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        h = hi - lo
        c = 0.5 * (lo + hi)
        best = math.inf
        for rho in (1.5, 2.0, 3.0, 4.0, 6.0, 8.0):
            A = 0.25 * h * (rho + 1 / rho)
            B = 0.25 * h * (rho - 1 / rho)
            left = c - A
            re_sq = left * left - B * B
            if left <= 0 or re_sq <= 0:
                continue
            zmin, zmax = left, math.hypot(c + A, B)
            mag = max(zmin ** (sig - 1), zmax ** (sig - 1)) * math.exp(t * math.atan(B / left))
            M = 2.0 * _half_gaussian_sum_bound(math.pi * re_sq) * mag
            best = min(best, 0.5 * h * (64 / 15) * M * rho ** (-2 * n) / (rho * rho - 1))
        total += best
    return total


def _rank1_tmax(sigmas, tol: float) -> float:
    p = max(sigmas) - 1
    a = 1.5
    while 2.01 * _gaussian_moment_tail(a, p) > tol / 10:
        a += RANK1_PANEL
    return a


def _rank1_integral(s: complex, T: np.ndarray, w: np.ndarray, excess: np.ndarray) -> complex:
    return complex(np.sum(w * excess * np.exp((s - 1) * np.log(T))))


def rank1_zeta(s: complex, tol: float = 1e-12, T_max: float | None = None) -> ZetaEval:
    """Rank-1 zeta over Q; equals the completed Riemann zeta."""
    s = _check_pole(s)
    if not tol > 0:
        raise ValueError("tol must be positive")
    tmax = _rank1_tmax((s.real, 1 - s.real), tol) if T_max is None else float(T_max)
    T, w, edges = _panel_nodes(1.0, tmax, RANK1_PANEL, RANK1_NODES)
    excess, tails = ThetaEngine(standard_lattice(_QQ, 1)).profile(T * T, tol=1e-30)
    I_s = _rank1_integral(s, T, w, excess)
    I_1ms = _rank1_integral(1 - s, T, w, excess)
    err = 0.0
    for z in (s, 1 - s):
        p = z.real - 1
        absw = w * np.exp(p * np.log(T))
        err += _rank1_panel_error(edges, z, RANK1_NODES)
        err += 2.01 * _gaussian_moment_tail(tmax, p)
        err += float(np.sum(absw * tails)) + 8 * EPS * float(np.sum(absw * excess)) * len(T)
    return _assemble(s, I_s, I_1ms, 1.0, err, "quadrature", len(T), 1, tmax)


# rank 2 moduli ---------------------------------------------------------------

def _jac(x):
    """Length of the u-interval above x: ``1/sqrt(1-x^2) - 1``."""
    return 1.0 / np.sqrt(1.0 - np.square(x)) - 1.0


def rank2_basis(tau: complex, T: float = 1.0) -> np.ndarray:
    y = tau.imag
    return math.sqrt(T) * np.array([[1 / math.sqrt(y), 0.0], [tau.real / math.sqrt(y), math.sqrt(y)]])


@dataclass(frozen=True)
class ModuliPointRank2:
    tau: complex
    T: float
    lattice: MetrizedLattice
    weight: float  # density of dx dy / y^2 at tau

    @property
    def semistable_region(self) -> bool:
        return self.tau.imag <= 1 + 1e-12


def moduli_point(tau: complex, T: float = 1.0) -> ModuliPointRank2:
    tau = complex(tau)
    if tau.imag <= 0 or abs(tau.real) > 0.5 + 1e-12 or abs(tau) < 1 - 1e-12:
        raise ValueError(f"tau = {tau} lies outside the standard fundamental domain")
    if not T > 0:
        raise ValueError("T must be positive")
    L = from_basis(_QQ, 2, rank2_basis(tau, T), label=f"tau={tau}")
    return ModuliPointRank2(tau, float(T), L, 1.0 / tau.imag**2)


def sample_semistable_points(count: int, seed: int, T: float = 1.0) -> list[ModuliPointRank2]:
    """Uniform samples (for dx dy / y^2) of the semistable locus."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 2]))
    out = []
    vmax = float(_jac(0.5))
    while len(out) < count:
        x = rng.uniform(-0.5, 0.5)
        u = 1.0 + rng.uniform(0.0, vmax)
        if u <= 1.0 / math.sqrt(1 - x * x):
            out.append(moduli_point(complex(x, 1.0 / u), T))
    return out


def moduli_volume_rank2(region: str = "semistable", with_error: bool = False):
    """Hyperbolic area of part of the fundamental domain.

    ``region`` is ``"semistable"`` (y <= 1), ``"cusp"`` (y > 1, exactly 1) or
    ``"full"``. The semistable part is a Gauss-Legendre integral of the convex
    function ``1/sqrt(1-x^2) - 1``; the midpoint and trapezoid sums bracket it
    and give the certified error.
    """
    if region == "cusp":
        return (1.0, 0.0) if with_error else 1.0
    if region not in ("semistable", "full"):
        raise ValueError(f"unknown region {region!r}")
    x, w = _gl_interval(0.0, 0.5, 40)
    val = 2.0 * math.fsum(w * _jac(x))
    n = 20000
    grid = np.linspace(0.0, 0.5, n + 1)
    h = 0.5 / n
    f = _jac(grid)
    trap = 2.0 * h * (math.fsum(f) - 0.5 * (f[0] + f[-1]))
    mid = 2.0 * h * math.fsum(_jac(grid[:-1] + 0.5 * h))
    if not mid - 1e-15 <= val <= trap + 1e-15:
        raise ConvergenceError("quadrature left its certified bracket")
    err = trap - mid
    if region == "full":
        val += 1.0
    return (val, err) if with_error else val


RANK2_GRID = (24, 24, 16)


def _rank2_tmax(sigmas, tol: float) -> float:
    # e^h0 - 1 <= 1.03 * 9 * C0 * exp(-pi T) on the semistable locus for T >= 2
    p = max(sigmas) - 1
    vol = 0.05
    a = 2.0
    while 1.03 * 9 * _C0 * vol * _exp_moment_tail(a, p) > tol / 10:
        a += 1.0
    return a


@lru_cache(maxsize=8)
def _rank2_grid(nx: int, nv: int, nt: int, tmax: float):
    """Tau-node weights, T nodes and weights, and the excess table ``theta - 1``."""
    xs, wx = _gl_interval(0.0, 0.5, nx)
    vs, wv = _gl_interval(0.0, 1.0, nv)
    T, wT, _ = _panel_nodes(1.0, tmax, 1.0, nt)
    W = []
    E = []
    tails = []
    for x, a in zip(xs, wx):
        J = float(_jac(x))
        for v, b in zip(vs, wv):
            y = 1.0 / (1.0 + v * J)
            eng = ThetaEngine(from_basis(_QQ, 2, rank2_basis(complex(x, y))))
            ex, tl = eng.profile(T, tol=1e-16)
            W.append(2.0 * a * b * J)
            E.append(ex)
            tails.append(tl)
    return np.array(W), T, wT, np.array(E), np.array(tails)


def _rank2_I(s: complex, grid) -> complex:
    W, T, wT, E, _ = grid
    return complex(W @ (E @ (wT * np.exp((s - 1) * np.log(T)))))


def _rank2_mc(s: complex, samples: int, seed: int, tmax: float, nt: int) -> tuple[complex, complex, float]:
    """Monte Carlo over tau (uniform in the folded domain), Gauss-Legendre in T.

    theta is summed over the box ``|a|, |b| <= 8``; for a reduced basis and
    T >= 1 every omitted term is below ``exp(-32 pi)``.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1]))
    T, wT, _ = _panel_nodes(1.0, tmax, 1.0, nt)
    K = 8
    a, b = np.meshgrid(np.arange(-K, K + 1), np.arange(0, K + 1), indexing="ij")
    keep = (b > 0) | (a > 0)
    a, b = a[keep].astype(float), b[keep].astype(float)
    ks = wT * np.exp((s - 1) * np.log(T))
    kc = wT * np.exp(-s * np.log(T))
    vals_s, vals_c = [], []
    chunk = 4096
    for start in range(0, samples, chunk):
        m = min(chunk, samples - start)
        x = rng.uniform(0.0, 0.5, m)
        v = rng.uniform(0.0, 1.0, m)
        J = _jac(x)
        y = 1.0 / (1.0 + v * J)
        q = (np.square(a[None, :] + b[None, :] * x[:, None]) + np.square(b[None, :] * y[:, None])) / y[:, None]
        ex = 2.0 * np.exp(-math.pi * T[None, None, :] * q[:, :, None]).sum(axis=1)
        scale_ = 2.0 * 0.5 * J  # fold factor times domain area in (x, v)
        vals_s.append(scale_ * (ex @ ks))
        vals_c.append(scale_ * (ex @ kc))
    fs, fc = np.concatenate(vals_s), np.concatenate(vals_c)
    f = fs + fc
    sigma = math.sqrt((np.var(f.real) + np.var(f.imag)) / samples)
    return complex(fs.mean()), complex(fc.mean()), 3 * sigma


def rank2_zeta(s: complex, grid: tuple[int, int, int] | None = None, tol: float = 1e-8, method: str = "quadrature",
               samples: int = 20000, seed: int = 0, T_max: float | None = None) -> ZetaEval:
    """Rank-2 zeta over Q.

    The quadrature error is estimated from a second, coarser grid plus the
    rigorous truncation bound in T; it is an estimate, not a certificate.
    """
    s = _check_pole(s)
    if not tol > 0:
        raise ValueError("tol must be positive")
    tmax = _rank2_tmax((s.real, 1 - s.real), tol) if T_max is None else float(T_max)
    vol, vol_err = moduli_volume_rank2(with_error=True)
    trunc = sum(1.03 * 9 * _C0 * 0.05 * _exp_moment_tail(tmax, z - 1) for z in (s.real, 1 - s.real))
    if method == "monte-carlo":
        I_s, I_1ms, err = _rank2_mc(s, samples, seed, tmax, RANK2_GRID[2])
        return _assemble(s, I_s, I_1ms, vol, err + trunc + vol_err / abs(s * (s - 1)), "monte-carlo", samples, 2, tmax)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    nx, nv, nt = grid or RANK2_GRID
    fine = _rank2_grid(nx, nv, nt, tmax)
    coarse = _rank2_grid(max(4, nx * 2 // 3), max(4, nv * 2 // 3), max(4, nt * 2 // 3), tmax)
    I_s, I_1ms = _rank2_I(s, fine), _rank2_I(1 - s, fine)
    diff = abs(I_s - _rank2_I(s, coarse)) + abs(I_1ms - _rank2_I(1 - s, coarse))
    W, T, wT, _, tails = fine
    theta_err = sum(float(W @ (tails @ (wT * T ** (z - 1)))) for z in (s.real, 1 - s.real))
    err = diff + trunc + theta_err + vol_err / abs(s * (s - 1))
    return _assemble(s, I_s, I_1ms, vol, err, "quadrature", len(W) * len(T), 2, tmax)


def rank2_zeta_direct(s: float, grid: tuple[int, int] = (16, 16), radius: float = 120.0) -> ZetaEval:
    """Rank-2 zeta for real s > 1 without the s <-> 1-s split.

    Integrates over all covolumes at once, which turns the inner integral
    into ``Gamma(s) pi^(-s) Z(tau, s)`` with the Epstein sum
    ``Z = sum_{v != 0} Q(v)^(-s)``. Vectors with ``Q <= radius^2`` are summed
    exactly; the rest is bracketed using ``pi (r-D)^2 - 1 <= N(r) <= pi (r+D)^2``
    for the count N(r) of nonzero vectors of length at most r, where D is the
    diameter of a fundamental cell.
    """
    s = float(np.real(s))
    if not s > 1:
        raise ValueError("the direct path needs real s > 1")

    def run(nx, nv):
        xs, wx = _gl_interval(0.0, 0.5, nx)
        vs, wv = _gl_interval(0.0, 1.0, nv)
        R = radius
        total, half = 0.0, 0.0
        for x, a in zip(xs, wx):
            J = float(_jac(x))
            for v, b in zip(vs, wv):
                y = 1.0 / (1.0 + v * J)
                B = rank2_basis(complex(x, y))
                eng = ThetaEngine(from_basis(_QQ, 2, B))
                _, q = eng.short_vectors(R * R)
                count = 2 * len(q)
                head = 2.0 * math.fsum(np.exp(-s * np.log(q)))
                D = float(np.linalg.norm(B[0]) + np.linalg.norm(B[1]))

                def poly(sign):
                    return math.pi * (R ** (2 - 2 * s) / (2 * s - 2) + sign * 2 * D * R ** (1 - 2 * s) / (2 * s - 1)
                                      + D * D * R ** (-2 * s) / (2 * s))

                lo = -R ** (-2 * s) * count + 2 * s * (poly(-1) - R ** (-2 * s) / (2 * s))
                hi = -R ** (-2 * s) * count + 2 * s * poly(+1)
                wgt = 2.0 * a * b * J
                total += wgt * (head + 0.5 * (lo + hi))
                half += wgt * 0.5 * (hi - lo)
        return total, half

    pref = math.gamma(s) * math.pi ** (-s)
    val, half = run(*grid)
    val_c, _ = run(max(4, grid[0] * 2 // 3), max(4, grid[1] * 2 // 3))
    err = pref * (half + abs(val - val_c))
    v = pref * val
    return ZetaEval(complex(s), complex(v), complex(math.nan), complex(math.nan), complex(0.0), err, "direct", grid[0] * grid[1], 2, math.inf)


# poles -------------------------------------------------------------------------

def _as_complex(z) -> complex:
    return complex(z.value) if isinstance(z, ZetaEval) else complex(z)


def pole_check(zeta_fn: Callable[[complex], object], which: int, h0: float = 0.05, levels: int = 6,
               rtol: float = 1e-7) -> float | complex:
    """Residue at s = which (0 or 1) from ``(s - pole) * zeta(s)`` on ``h0 / 2^k`` with Richardson extrapolation."""
    if which not in (0, 1):
        raise ValueError("pole must be 0 or 1")
    if levels < 2:
        raise ValueError("need at least two levels")
    hs = [h0 / 2**k for k in range(levels)]
    table = [[h * _as_complex(zeta_fn(which + h))] for h in hs]
    for k in range(1, levels):
        for j in range(1, k + 1):
            f = 2.0**j
            table[k].append((f * table[k][j - 1] - table[k - 1][j - 1]) / (f - 1))
    est = table[-1][-1]
    delta = abs(est - table[-2][-2])
    if delta > rtol * max(1.0, abs(est)):
        raise ConvergenceError(f"extrapolation did not settle: last change {delta:.3g}")
    return est.real if abs(est.imag) <= rtol * max(1.0, abs(est)) else est


def rank2_closed_form(s: complex) -> complex:
    """``2 xi(2s)/(s-1) - 2 xi(2s-1)/s``: an independent evaluation used for cross-checks."""
    s = _check_pole(s)
    return 2 * xi_reference(2 * s) / (s - 1) - 2 * xi_reference(2 * s - 1) / s
