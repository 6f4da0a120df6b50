"""Completing a dephased Hadamard row from four known entries, and Haagerup's
reality trick for quadruples of unimodular numbers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DEFAULT_TOL, HadamardError, Tolerances, UnitComplex


class NoCompletion(HadamardError):
    pass


@dataclass(frozen=True)
class RowCompletion:
    sigma: complex
    pair: tuple[UnitComplex, UnitComplex] | None

    @property
    def degenerate(self) -> bool:
        # sigma == 0: any (w, -w) completes the row
        return self.pair is None

    def values(self) -> tuple[complex, complex]:
        if self.pair is None:
            raise ValueError("degenerate completion has a free parameter")
        return self.pair[0].value, self.pair[1].value


def completion_pair(sigma: complex, tol_entry: float = DEFAULT_TOL.tol_entry) -> tuple[complex, complex]:
    """The two unit numbers summing to ``-2*sigma``, "+" branch first.

    ``|sigma|`` up to ``1 + tol_entry`` is clamped onto the unit disc.
    """
    r = abs(sigma)
    if r > 1 + tol_entry:
        raise NoCompletion(f"|sigma| = {r:.12g} > 1")
    if r <= tol_entry:
        raise NoCompletion("sigma vanishes; completion is degenerate")
    root = math.sqrt(max(0.0, 1.0 - min(r, 1.0) ** 2))
    offset = 1j * (sigma / r) * root
    return -sigma + offset, -sigma - offset


def complete_row(x1, x2, x3, x4, tol: Tolerances = DEFAULT_TOL) -> RowCompletion:
    """Fill the last two entries of a row whose six entries must sum to zero."""
    xs = [complex(v) for v in (x1, x2, x3, x4)]
    sigma = sum(xs) / 2
    if abs(sigma) <= tol.tol_entry:
        return RowCompletion(sigma, None)
    p, m = completion_pair(sigma, tol.tol_entry)
    return RowCompletion(sigma, (UnitComplex.from_complex(p), UnitComplex.from_complex(m)))


def haagerup_product(u, v, s, t) -> complex:
    """(u + v)(conj s + conj t)(conj u s + conj v t), real for unimodular input."""
    u, v, s, t = (complex(z) for z in (u, v, s, t))
    return (u + v) * (s.conjugate() + t.conjugate()) * (u.conjugate() * s + v.conjugate() * t)
