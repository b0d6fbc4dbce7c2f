"""Lattice shorthands, JSON records and CSV dumps."""

from __future__ import annotations

import csv
import json
import math
import os
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, GeonumError
from .field import NumberField, parse_field
from .lattice import MetrizedLattice, diagonal_lattice, from_basis, random_lattice, standard_lattice


class LatticeSpecError(GeonumError, ValueError):
    code = "invalid-lattice-spec"


def _number(text: str) -> float:
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise LatticeSpecError(f"not a number: {text!r}") from exc


def parse_lattice(spec: str, F: NumberField | str | None = None) -> MetrizedLattice:
    """Build a lattice from a shorthand or a JSON file.

    Shorthands::

        diag:a,b,...            direct sum of a*O_F, b*O_F, ...
        std:n                   O_F^n
        basis:r1;r2;...         realized basis rows, entries comma separated
        random:n,deg,spread,seed
        <path>.json             a record written by lattice_record
    """
    if not isinstance(F, NumberField):
        F = parse_field(F)
    if ":" in spec and not os.path.exists(spec):
        kind, _, body = spec.partition(":")
        kind = kind.strip().lower()
        if kind == "diag":
            return diagonal_lattice(F, [_number(t) for t in body.split(",") if t.strip()])
        if kind == "std":
            return standard_lattice(F, int(body))
        if kind == "basis":
            rows = [[_number(t) for t in r.split(",")] for r in body.split(";") if r.strip()]
            N = len(rows)
            if N % F.degree:
                raise DimensionMismatch(f"{N} rows do not fit a field of degree {F.degree}")
            return from_basis(F, N // F.degree, rows)
        if kind == "random":
            parts = body.split(",")
            if len(parts) != 4:
                raise LatticeSpecError("random: needs n,deg,spread,seed")
            return random_lattice(F, int(parts[0]), _number(parts[1]), _number(parts[2]), int(parts[3]))
        raise LatticeSpecError(f"unknown lattice shorthand {kind!r}")
    if not os.path.exists(spec):
        raise LatticeSpecError(f"no such lattice file: {spec}")
    with open(spec) as fh:
        rec = json.load(fh)
    return lattice_from_record(rec)


def lattice_from_record(rec: dict) -> MetrizedLattice:
    try:
        F = parse_field(rec.get("field"))
        return from_basis(F, int(rec["n"]), rec["basis"], label=rec.get("label"))
    except KeyError as exc:
        raise LatticeSpecError(f"lattice record lacks {exc}") from exc


def lattice_record(L: MetrizedLattice) -> dict:
    return L.to_record()


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, complex):
        return {"re": _clean(x.real), "im": _clean(x.imag)}
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, non-finite floats spelled out."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
