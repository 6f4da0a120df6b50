"""Unimodular numbers, complex Hadamard matrices and their basic operations."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

TWO_PI = 2.0 * math.pi


class HadamardError(ValueError):
    pass


class ZeroEntry(HadamardError):
    pass


class DimensionMismatch(HadamardError):
    pass


class MatrixFormatError(HadamardError):
    pass


def canon_phase(theta: float) -> float:
    """Reduce a phase to [0, 2pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod of a tiny negative can round up to exactly 2pi
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class UnitComplex:
    phase: float

    def __post_init__(self):
        object.__setattr__(self, "phase", canon_phase(float(self.phase)))

    @classmethod
    def from_complex(cls, z: complex) -> UnitComplex:
        return cls(math.atan2(z.imag, z.real))

    @classmethod
    def from_turns(cls, turns: float) -> UnitComplex:
        return cls(TWO_PI * turns)

    @property
    def value(self) -> complex:
        return complex(math.cos(self.phase), math.sin(self.phase))

    @property
    def turns(self) -> float:
        return self.phase / TWO_PI

    def conjugate(self) -> UnitComplex:
        return UnitComplex(-self.phase)

    def __mul__(self, other: UnitComplex) -> UnitComplex:
        return UnitComplex(self.phase + other.phase)

    def __complex__(self) -> complex:
        return self.value


@dataclass(frozen=True)
class Tolerances:
    tol_entry: float = 1e-10
    tol_gram: float = 1e-9
    tol_lambda: float = 1e-7
    tol_equiv: float = 1e-8

    def __post_init__(self):
        for name in ("tol_entry", "tol_gram", "tol_lambda", "tol_equiv"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.tol_lambda < self.tol_entry:
            raise ValueError("tol_lambda must be >= tol_entry")


DEFAULT_TOL = Tolerances()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CHMatrix:
    """Square matrix with (nominally) unimodular complex entries.

    ``turns`` is kept when the matrix was built from exact rational phases so
    that serialization can reproduce them without an ``angle`` round trip.
    """

    entries: np.ndarray
    dephased: bool = False
    turns: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {e.shape}")
        object.__setattr__(self, "entries", _frozen(e))
        if self.turns is not None:
            t = np.asarray(self.turns, dtype=float)
            if t.shape != e.shape:
                raise DimensionMismatch("turns shape does not match entries")
            object.__setattr__(self, "turns", _frozen(t))

    @classmethod
    def from_turns(cls, turns, dephased: bool | None = None) -> CHMatrix:
        t = np.asarray(turns, dtype=float)
        e = np.exp(2j * np.pi * t)
        # exact values for quarter turns keep +-1, +-i free of rounding noise
        quarter = np.isclose(4 * t, np.round(4 * t), rtol=0, atol=1e-15)
        e[quarter] = (1j) ** np.round(4 * t[quarter]).astype(int)
        h = cls(e, dephased=False, turns=t)
        if dephased is None:
            dephased = _first_row_col_ones(h.entries, DEFAULT_TOL.tol_entry)
        return cls(e, dephased=dephased, turns=t)

    @classmethod
    def from_phases(cls, phases, dephased: bool | None = None) -> CHMatrix:
        return cls.from_turns(np.asarray(phases, dtype=float) / TWO_PI, dephased)

    @classmethod
    def from_complex(cls, entries, dephased: bool | None = None) -> CHMatrix:
        e = np.asarray(entries, dtype=complex)
        if dephased is None:
            dephased = e.ndim == 2 and e.size > 0 and _first_row_col_ones(e, DEFAULT_TOL.tol_entry)
        return cls(e, dephased=dephased)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def phases(self) -> np.ndarray:
        if self.turns is not None:
            return np.mod(self.turns, 1.0) * TWO_PI
        return np.mod(np.angle(self.entries), TWO_PI)

    def phase_turns(self) -> np.ndarray:
        if self.turns is not None:
            return np.mod(self.turns, 1.0)
        return np.mod(np.angle(self.entries) / TWO_PI, 1.0)

    def is_unimodular(self, tol: float = DEFAULT_TOL.tol_entry) -> bool:
        return bool(np.all(np.abs(np.abs(self.entries) - 1.0) <= tol))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, CHMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries.tobytes())

    def allclose(self, other: CHMatrix, atol: float) -> bool:
        return self.n == other.n and float(np.max(np.abs(self.entries - other.entries))) <= atol

    def to_json(self, form: str = "phases") -> dict[str, Any]:
        if form == "phases":
            return {"n": self.n, "phases_turns": self.phase_turns().tolist()}
        if form == "rect":
            rows = [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in self.entries]
            return {"n": self.n, "entries": rows}
        raise ValueError(f"unknown matrix format {form!r}")

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> CHMatrix:
        if not isinstance(data, dict):
            raise MatrixFormatError("matrix JSON must be an object")
        if "phases_turns" in data:
            m = cls.from_turns(np.asarray(data["phases_turns"], dtype=float))
        elif "entries" in data:
            try:
                e = [[complex(z["re"], z["im"]) for z in row] for row in data["entries"]]
            except (TypeError, KeyError) as exc:
                raise MatrixFormatError(f"bad rectangular entry: {exc}") from exc
            m = cls.from_complex(e)
        else:
            raise MatrixFormatError("matrix JSON needs 'phases_turns' or 'entries'")
        if "n" in data and int(data["n"]) != m.n:
            raise MatrixFormatError(f"declared n={data['n']} but matrix is {m.n}x{m.n}")
        return m

    def dumps(self, form: str = "phases") -> str:
        return json.dumps(self.to_json(form))

    @classmethod
    def loads(cls, text: str) -> CHMatrix:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_json(data)


def _first_row_col_ones(e: np.ndarray, tol: float) -> bool:
    return bool(np.all(np.abs(e[0, :] - 1) <= tol) and np.all(np.abs(e[:, 0] - 1) <= tol))


def as_array(H) -> np.ndarray:
    return H.entries if isinstance(H, CHMatrix) else np.asarray(H, dtype=complex)


def gram_residual(H) -> float:
    """max_ij |(H H*)_ij - n delta_ij|."""
    a = as_array(H)
    n = a.shape[0]
    return float(np.max(np.abs(a @ a.conj().T - n * np.eye(n))))


def is_hadamard(H, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = as_array(H)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    if not np.all(np.abs(np.abs(a) - 1.0) <= tol.tol_entry):
        return False
    return gram_residual(a) <= tol.tol_gram


def conjugate(H: CHMatrix) -> CHMatrix:
    turns = None if H.turns is None else -H.turns
    return CHMatrix(H.entries.conj(), dephased=H.dephased, turns=turns)


def transpose(H: CHMatrix) -> CHMatrix:
    turns = None if H.turns is None else H.turns.T
    return CHMatrix(H.entries.T, dephased=H.dephased, turns=turns)


def adjoint(H: CHMatrix) -> CHMatrix:
    turns = None if H.turns is None else -H.turns.T
    return CHMatrix(H.entries.conj().T, dephased=H.dephased, turns=turns)


def dephase(H: CHMatrix, tol: Tolerances = DEFAULT_TOL) -> tuple[CHMatrix, np.ndarray, np.ndarray]:
    """Normalize the first row and column to 1.

    Returns ``(H', d1, d2)`` with ``H' = diag(e^{i d1}) H diag(e^{i d2})``.
    Rows are divided by their first entry, then columns by the updated
    first-row entry.
    """
    a = H.entries
    if np.any(np.abs(a) < tol.tol_entry):
        raise ZeroEntry("matrix has an entry of (near) zero modulus")
    if H.turns is not None:
        t = H.turns - H.turns[:, :1]
        t = t - t[:1, :]
        d1 = -TWO_PI * H.turns[:, 0]
        d2 = -TWO_PI * (H.turns[0, :] - H.turns[0, 0])
        out = CHMatrix.from_turns(t, dephased=True)
        return out, np.mod(d1, TWO_PI), np.mod(d2, TWO_PI)
    d1 = -np.angle(a[:, 0])
    b = a * np.exp(1j * d1)[:, None]
    d2 = -np.angle(b[0, :])
    out = b * np.exp(1j * d2)[None, :]
    # snap the normalized border to exact ones
    out[0, :] = 1.0
    out[:, 0] = 1.0
    return CHMatrix(out, dephased=True), np.mod(d1, TWO_PI), np.mod(d2, TWO_PI)


def apply_diagonals(H: CHMatrix, d1, d2) -> CHMatrix:
    """diag(e^{i d1}) H diag(e^{i d2})."""
    a = H.entries * np.exp(1j * np.asarray(d1))[:, None] * np.exp(1j * np.asarray(d2))[None, :]
    return CHMatrix(a)


def permute(H: CHMatrix, rows, cols) -> CHMatrix:
    """Matrix with entry (i, j) = H[rows[i], cols[j]]."""
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    turns = None if H.turns is None else H.turns[np.ix_(rows, cols)]
    return CHMatrix(H.entries[np.ix_(rows, cols)], turns=turns)
