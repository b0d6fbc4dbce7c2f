"""Metrized O_F-lattices realized as full-rank lattices in calibrated Minkowski space.

A rank-n lattice over a field of degree d lives in ``R^N`` with ``N = n*d``;
coordinates are grouped by component, each component occupying one block of
``d`` Minkowski coordinates. The counting form is the Gram matrix of the
basis rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import intlinalg
from .errors import (
    DegenerateBasis,
    DimensionMismatch,
    EmptySublattice,
    FieldMismatch,
    InvalidRank,
    InvalidScale,
    NotAModule,
)
from .field import NumberField, make_field

COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class MetrizedLattice:
    field: NumberField
    n: int
    basis: np.ndarray = field(repr=False)
    # real right-multiplication matrix of w on the ambient coordinates; None over Q
    w_ambient: np.ndarray | None = field(default=None, repr=False)
    module_structure: tuple | None = field(default=None, repr=False)
    label: str | None = None

    @property
    def N(self) -> int:
        return self.basis.shape[0]

    @property
    def of_rank(self) -> int:
        return self.n

    @cached_property
    def counting_form(self) -> np.ndarray:
        B = self.basis
        return B @ B.T

    @cached_property
    def covolume(self) -> float:
        return abs(float(np.linalg.det(self.basis)))

    @cached_property
    def log_covolume(self) -> float:
        _, logdet = np.linalg.slogdet(self.basis)
        return float(logdet)

    @cached_property
    def w_action(self) -> np.ndarray | None:
        """Integer matrix A with ``w * b_i = sum_j A_ij b_j``."""
        if self.w_ambient is None:
            return None
        A = self.basis @ self.w_ambient @ np.linalg.inv(self.basis)
        Ai = np.rint(A)
        if not np.allclose(A, Ai, atol=1e-6 * max(1.0, np.abs(A).max())):
            raise NotAModule("basis is not stable under multiplication by the ring of integers")
        return Ai.astype(np.int64)

    def to_record(self) -> dict:
        rec = {"field": self.field.to_record(), "n": self.n, "basis": self.basis.tolist()}
        if self.label:
            rec["label"] = self.label
        return rec


def _make(F: NumberField, n: int, basis, w_ambient=None, label=None, module_structure=None, check=True):
    B = np.array(basis, dtype=float)
    B.setflags(write=False)
    if w_ambient is not None:
        w_ambient = np.array(w_ambient, dtype=float)
        w_ambient.setflags(write=False)
    L = MetrizedLattice(F, n, B, w_ambient, module_structure, label)
    if check:
        _ = L.w_action
    return L


def _ambient_w(F: NumberField, n: int) -> np.ndarray | None:
    m = F.w_multiplication()
    return None if m is None else np.kron(np.eye(n), m)


def degree(L: MetrizedLattice) -> float:
    return chi(L) + 0.5 * L.n * L.field.log_disc


def chi(L: MetrizedLattice) -> float:
    return -L.log_covolume


def standard_lattice(F: NumberField, n: int) -> MetrizedLattice:
    """O_F^n with the canonical metric."""
    if n < 1:
        raise InvalidRank(f"rank must be positive, got {n}")
    B = np.kron(np.eye(n), F.integral_basis_embedding)
    gens = tuple((1,) + (0,) * (F.degree - 1) for _ in range(n))
    return _make(F, n, B, _ambient_w(F, n), label=f"std{n}", module_structure=gens)


def from_basis(F: NumberField, n: int, basis, label: str | None = None) -> MetrizedLattice:
    """Lattice with the given realized basis (rows, calibrated Minkowski coordinates)."""
    if n < 1:
        raise InvalidRank(f"rank must be positive, got {n}")
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    N = n * F.degree
    if B.shape != (N, N):
        raise DimensionMismatch(f"expected a {N}x{N} basis, got {B.shape}")
    if not np.all(np.isfinite(B)):
        raise DegenerateBasis("basis has non-finite entries")
    cond = np.linalg.cond(B)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DegenerateBasis(f"basis condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    return _make(F, n, B, _ambient_w(F, n), label=label)


def diagonal_lattice(F: NumberField, scales: Sequence[float]) -> MetrizedLattice:
    """Direct sum of ``c_i * O_F``; over Q this is the diagonal lattice."""
    if not scales:
        raise InvalidRank("need at least one component")
    parts = [scale(standard_lattice(F, 1), float(c)) for c in scales]
    L = parts[0]
    for P in parts[1:]:
        L = direct_sum(L, P)
    return L


def dual_lattice(L: MetrizedLattice) -> MetrizedLattice:
    """Euclidean dual in calibrated coordinates.

    Under the trace pairing this Z-dual is already omega_F tensor the O_F-dual.
    """
    Bd = np.linalg.inv(L.basis).T
    return _make(L.field, L.n, Bd, L.w_ambient, label=None, check=False)


def omega_twist(L: MetrizedLattice) -> MetrizedLattice:
    """omega_F tensor the dual of L; degree ``n*log|disc| - deg(L)``."""
    D = dual_lattice(L)
    return MetrizedLattice(D.field, D.n, D.basis, D.w_ambient, None, "omega-dual")


def scale(L: MetrizedLattice, c: float) -> MetrizedLattice:
    if not (c > 0 and math.isfinite(c)):
        raise InvalidScale(f"scale must be positive, got {c}")
    if c == 1:
        return L
    return _make(L.field, L.n, L.basis * c, L.w_ambient, label=L.label, check=False)


def direct_sum(L1: MetrizedLattice, L2: MetrizedLattice) -> MetrizedLattice:
    if L1.field != L2.field:
        raise FieldMismatch(f"{L1.field.name} vs {L2.field.name}")

    def blk(a, b):
        if a is None:
            return None
        z = np.zeros((a.shape[0] + b.shape[0],) * 2)
        z[: a.shape[0], : a.shape[0]] = a
        z[a.shape[0] :, a.shape[0] :] = b
        return z

    return _make(L1.field, L1.n + L2.n, blk(L1.basis, L2.basis), blk(L1.w_ambient, L2.w_ambient), check=False)


def restrict_scalars(L: MetrizedLattice) -> MetrizedLattice:
    """The same realized Z-lattice viewed over Q (rank ``n*d``)."""
    if L.field.is_rational:
        return L
    return _make(make_field(None), L.N, L.basis, None, label=L.label, check=False)


@dataclass(frozen=True)
class SublatticeHandle:
    parent: MetrizedLattice = field(repr=False)
    generators: tuple[tuple[int, ...], ...]
    saturated_rank: int
    degree: float
    slope: float

    @property
    def of_rank(self) -> int:
        return self.saturated_rank // self.parent.field.degree

    @property
    def log_covolume(self) -> float:
        return -(self.degree - 0.5 * self.of_rank * self.parent.field.log_disc)


def close_under_order(L: MetrizedLattice, G) -> list[list[int]]:
    """Generators together with their images under multiplication by w."""
    G = [list(map(int, g)) for g in G]
    A = L.w_action
    if A is None:
        return G
    return G + [list(map(int, np.asarray(g, dtype=object) @ A.astype(object))) for g in G]


def sublattice_log_covolume(L: MetrizedLattice, S) -> float:
    V = np.asarray(S, dtype=float) @ L.basis
    _, logdet = np.linalg.slogdet(V @ V.T)
    return 0.5 * float(logdet)


def handle_from_saturated(L: MetrizedLattice, S) -> SublatticeHandle:
    k = len(S)
    d = L.field.degree
    r = k / d
    deg = -sublattice_log_covolume(L, S) + 0.5 * r * L.field.log_disc
    return SublatticeHandle(L, tuple(tuple(int(x) for x in row) for row in S), k, deg, deg / r)


def saturate_sublattice(L: MetrizedLattice, generators) -> SublatticeHandle:
    """Saturated O_F-sublattice spanned by integer coordinate rows in L's basis."""
    G = np.atleast_2d(np.asarray(generators, dtype=object))
    if G.shape[1] != L.N:
        raise DimensionMismatch(f"generators need {L.N} coordinates, got {G.shape[1]}")
    if not any(int(x) for x in G.ravel()):
        raise EmptySublattice("generator matrix is zero")
    S = intlinalg.saturate(close_under_order(L, G.tolist()), L.N)
    return handle_from_saturated(L, S)


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, (tuple, list)):
        return np.random.SeedSequence([int(s) for s in seed])
    return np.random.SeedSequence(int(seed))


def random_lattice(F: NumberField, n: int, degree_target: float, spread: float, seed) -> MetrizedLattice:
    """O_F^n twisted at the infinite places by ``I + spread*G`` (G Gaussian), rescaled to the target degree.

    Deterministic per ``seed`` (an int or a tuple of ints).
    """
    if n < 1:
        raise InvalidRank(f"rank must be positive, got {n}")
    if not spread > 0:
        raise ValueError("spread must be positive")
    rng = np.random.default_rng(_seed_sequence(seed))
    base = standard_lattice(F, n).basis
    d = F.degree
    r1, r2 = F.signature
    B = base.copy()
    for _ in range(100):
        B = base.copy()
        # place p occupies coordinate p (real) or coordinates (2p', 2p'+1) (complex) in every block
        for p in range(r1):
            g = np.eye(n) + spread * rng.standard_normal((n, n)) / math.sqrt(n)
            cols = [i * d + p for i in range(n)]
            B[:, cols] = base[:, cols] @ g.T
        for p in range(r2):
            g = np.eye(n) + spread * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2 * n)
            re = [i * d + r1 + 2 * p for i in range(n)]
            im = [c + 1 for c in re]
            z = (base[:, re] + 1j * base[:, im]) @ g.T
            B[:, re], B[:, im] = z.real, z.imag
        if np.linalg.cond(B) < 1e8:
            break
    L = _make(F, n, B, _ambient_w(F, n), check=False)
    c = math.exp((degree(L) - degree_target) / L.N)
    L = scale(L, c)
    # one Newton-free correction to absorb rounding in the exponent
    c2 = math.exp((degree(L) - degree_target) / L.N)
    return _make(F, n, L.basis * c2, L.w_ambient, label=f"random[{seed}]", check=False)
