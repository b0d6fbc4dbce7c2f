"""The rational field and quadratic fields with their Minkowski realization.

Coordinates of the Minkowski space are calibrated so that the counting form
``sum_v N_v |x_v|^2`` is the plain Euclidean squared norm: a real place
contributes one coordinate, a complex place contributes ``sqrt(2) * (Re, Im)``.
With this scaling ``covol(O_F) = sqrt(|disc|)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidFieldSpec

_FIELD_RE = re.compile(r"^\s*Q\s*(?:\(\s*sqrt\s*\(?\s*([+-]?\s*\d+)\s*\)?\s*\))?\s*$", re.I)


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True, eq=False)
class NumberField:
    """Q or Q(sqrt D) together with the data the lattice code consumes.

    The integral basis is ``(1,)`` for Q and ``(1, w)`` for a quadratic field,
    with ``w = (1 + sqrt D)/2`` when ``D = 1 mod 4`` and ``w = sqrt D`` otherwise.
    """

    D: int | None
    degree: int
    signature: tuple[int, int]
    abs_disc: int
    integral_basis_embedding: np.ndarray = field(repr=False)
    trace_form: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    codifferent_coords: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    # w^2 = w_sq[0] + w_sq[1] * w  (quadratic fields only)
    w_sq: tuple[Fraction, Fraction] | None = field(default=None, repr=False)

    @property
    def log_disc(self) -> float:
        return math.log(self.abs_disc)

    @property
    def is_rational(self) -> bool:
        return self.D is None

    @property
    def name(self) -> str:
        return "Q" if self.D is None else f"Q(sqrt {self.D})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NumberField) and other.D == self.D

    def __hash__(self) -> int:
        return hash(("NumberField", self.D))

    def to_record(self) -> dict:
        return {
            "kind": "rational" if self.D is None else "quadratic",
            "D": self.D,
            "disc": self.abs_disc,
            "signature": list(self.signature),
        }

    def w_multiplication(self) -> np.ndarray | None:
        """Right-multiplication matrix of ``w`` on one block of Minkowski coordinates.

        For a row vector ``v`` holding the image of ``a``, ``v @ m`` is the image of ``a*w``.
        """
        if self.D is None:
            return None
        img = self.integral_basis_embedding[1]
        if self.signature[1] == 0:
            return np.diag(img)
        # complex place: (x + iy)(a + ib) with the image of w equal to sqrt(2)*(a, b)
        a, b = img / math.sqrt(2.0)
        return np.array([[a, b], [-b, a]])


def _embedding(D: int, w_is_half: bool) -> np.ndarray:
    r = math.sqrt(abs(D))
    if D > 0:
        w = ((1 + r) / 2, (1 - r) / 2) if w_is_half else (r, -r)
        return np.array([[1.0, 1.0], list(w)])
    s2 = math.sqrt(2.0)
    w = (s2 / 2, s2 * r / 2) if w_is_half else (0.0, s2 * r)
    return np.array([[s2, 0.0], list(w)])


def make_field(D: int | None = None) -> NumberField:
    """Build Q (``D=None``) or Q(sqrt D) for squarefree ``D`` not in {0, 1}."""
    if D is None:
        one = ((Fraction(1),),)
        return NumberField(None, 1, (1, 0), 1, np.array([[1.0]]), one, one)
    if isinstance(D, bool) or not isinstance(D, (int, np.integer)):
        raise InvalidFieldSpec(f"discriminant parameter must be an integer, got {D!r}")
    D = int(D)
    if D in (0, 1) or not _squarefree(D):
        raise InvalidFieldSpec(f"D={D} is not a squarefree integer different from 0 and 1")
    half = D % 4 == 1
    if half:
        w_sq = (Fraction(D - 1, 4), Fraction(1))
        tr_w = Fraction(1)
    else:
        w_sq = (Fraction(D), Fraction(0))
        tr_w = Fraction(0)
    tr_w2 = 2 * w_sq[0] + w_sq[1] * tr_w
    T = ((Fraction(2), tr_w), (tr_w, tr_w2))
    det = T[0][0] * T[1][1] - T[0][1] * T[1][0]
    inv = ((T[1][1] / det, -T[0][1] / det), (-T[1][0] / det, T[0][0] / det))
    sig = (2, 0) if D > 0 else (0, 1)
    disc = abs(D) if half else 4 * abs(D)
    return NumberField(D, 2, sig, disc, _embedding(D, half), T, inv, w_sq)


def parse_field(text: str | dict | None) -> NumberField:
    """Parse ``"Q"``, ``"Q(sqrt D)"`` or a ``{kind, D}`` record."""
    if text is None:
        return make_field(None)
    if isinstance(text, dict):
        return make_field(text.get("D"))
    m = _FIELD_RE.match(text)
    if not m:
        raise InvalidFieldSpec(f"cannot parse field spec {text!r}")
    if m.group(1) is None:
        return make_field(None)
    return make_field(int(m.group(1).replace(" ", "")))


def minkowski_image(F: NumberField, element: Sequence) -> np.ndarray:
    """Image of ``sum_j c_j w_j`` in calibrated Minkowski coordinates."""
    c = list(element)
    if len(c) != F.degree:
        raise DimensionMismatch(f"expected {F.degree} coordinates, got {len(c)}")
    return np.asarray([float(x) for x in c]) @ F.integral_basis_embedding


def codifferent_lattice_data(F: NumberField) -> tuple[tuple[Fraction, ...], ...]:
    """Rows: a Z-basis of the inverse different, in integral-basis coordinates."""
    return F.codifferent_coords


def multiply(F: NumberField, a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Exact product in integral-basis coordinates."""
    if F.D is None:
        return (Fraction(a[0]) * Fraction(b[0]),)
    a0, a1 = map(Fraction, a)
    b0, b1 = map(Fraction, b)
    c, d = F.w_sq
    return (a0 * b0 + a1 * b1 * c, a0 * b1 + a1 * b0 + a1 * b1 * d)


def trace(F: NumberField, a: Sequence[Fraction]) -> Fraction:
    if F.D is None:
        return Fraction(a[0])
    return 2 * Fraction(a[0]) + Fraction(a[1]) * F.trace_form[0][1]
