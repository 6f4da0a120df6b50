"""Named 6x6 complex Hadamard matrices, the non-affine family M6(x), the Dita
block construction and affine families loaded from data files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .completion import completion_pair
from .core import (
    DEFAULT_TOL,
    TWO_PI,
    CHMatrix,
    DimensionMismatch,
    HadamardError,
    MatrixFormatError,
    Tolerances,
    gram_residual,
)


class SingularParameter(HadamardError):
    pass


class ValidationFailed(HadamardError):
    def __init__(self, name: str, params: np.ndarray, residual: float):
        self.params = np.asarray(params)
        self.residual = residual
        super().__init__(f"family {name!r} is not Hadamard at params={self.params.tolist()} (residual {residual:.3e})")


SQRT13 = math.sqrt(13.0)
EPS_SING = 1e-6


def fourier(n: int) -> CHMatrix:
    if n < 1:
        raise ValueError("order must be positive")
    j = np.arange(n)
    return CHMatrix.from_turns(np.mod(np.outer(j, j), n) / n, dephased=True)


# entries of S6 as exponents of omega = e^{2 pi i/3}
_S6_EXP = [
    [0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 2, 2],
    [0, 1, 0, 2, 1, 2],
    [0, 1, 2, 0, 2, 1],
    [0, 2, 1, 2, 0, 1],
    [0, 2, 2, 1, 1, 0],
]


def tao_s6() -> CHMatrix:
    """Symmetric dephased form of Tao's matrix over the cube roots of unity."""
    return CHMatrix.from_turns(np.array(_S6_EXP) / 3, dephased=True)


# limit of M6(e^{it}) as t -> 3pi/2 (from above), in quarter turns: 0=1, 1=i, 2=-1, 3=-i
_D6_QUARTERS = [
    [0, 0, 0, 0, 0, 0],
    [0, 2, 3, 3, 1, 1],
    [0, 3, 2, 1, 2, 0],
    [0, 3, 1, 2, 0, 2],
    [0, 1, 2, 0, 3, 2],
    [0, 1, 0, 2, 2, 3],
]


def dita_d6() -> CHMatrix:
    return CHMatrix.from_turns(np.array(_D6_QUARTERS) / 4, dephased=True)


def d6_symmetric(case: int = 1, u: complex = 1j) -> CHMatrix:
    """Symmetric D6-class matrices with diagonal (1, -1, -1, -1, *, *).

    ``case=1`` takes u in {i, -i}, ``case=2`` takes u in {1, -1}.
    """
    i = 1j
    allowed = {1: (1j, -1j), 2: (1, -1)}[case]
    if not any(abs(u - w) < 1e-12 for w in allowed):
        raise ValueError(f"u must be one of {allowed} in case {case}")
    if case == 1:
        r5, r6 = [1, -i, u, -u, -1, i], [1, -i, -u, u, i, -1]
    else:
        r5, r6 = [1, -i, u, -u, i, -1], [1, -i, -u, u, -1, i]
    h = [[1] * 6, [1, -1, i, i, -i, -i], [1, i, -1, -i, u, -u], [1, i, -i, -1, -u, u], r5, r6]
    return CHMatrix.from_turns(np.mod(np.round(np.angle(np.array(h, dtype=complex)) / (np.pi / 2)), 4) / 4)


def bjorck_d() -> complex:
    return complex((1 - math.sqrt(3)) / 2, math.sqrt(math.sqrt(3) / 2))


def bjorck_c6() -> CHMatrix:
    """Permuted Bjorck cyclic matrix; entries are +-d^k or +-conj(d)."""
    phi = math.atan2(bjorck_d().imag, bjorck_d().real) / TWO_PI
    # (power of d, extra half turn for a minus sign)
    table = [
        [(0, 0), (0, 0), (0, 0), (0, 0), (0, 0), (0, 0)],
        [(0, 0), (0, 1), (2, 0), (1, 1), (1, 0), (2, 1)],
        [(0, 0), (2, 0), (0, 0), (3, 1), (-1, 1), (2, 0)],
        [(0, 0), (1, 1), (3, 1), (3, 1), (1, 1), (4, 0)],
        [(0, 0), (1, 0), (-1, 1), (1, 1), (-1, 0), (0, 1)],
        [(0, 0), (2, 1), (2, 0), (4, 0), (0, 1), (4, 1)],
    ]
    turns = np.array([[k * phi + s / 2 for k, s in row] for row in table])
    return CHMatrix.from_turns(turns, dephased=True)


def m6_one() -> CHMatrix:
    """The displayed M6(1), over sixth roots of unity."""
    sixths = [
        [0, 0, 0, 0, 0, 0],
        [0, 3, 0, 0, 3, 3],
        [0, 0, 4, 2, 4, 2],
        [0, 0, 2, 4, 2, 4],
        [0, 3, 4, 2, 1, 5],
        [0, 3, 2, 4, 5, 1],
    ]
    return CHMatrix.from_turns(np.array(sixths) / 6, dephased=True)


@dataclass(frozen=True)
class M6Entries:
    x: complex
    a: complex
    b: complex
    c: complex
    t: complex
    p: complex
    q: complex


def m6_closed_forms() -> M6Entries:
    """The radical expressions for the discrete matrix (branch x1, Im x > 0)."""
    s = SQRT13
    x = complex((1 - s) / 3, math.sqrt(-5 + 2 * s) / 3)
    a = complex(-(7 - s) / 9, -math.sqrt(19 + 14 * s) / 9)
    inner = math.sqrt(-2446 + 730 * s)
    b = complex((-14 + 2 * s - math.sqrt(-58 + 34 * s)) / 18, -math.sqrt(134 + 22 * s - 8 * inner) / 18)
    c = complex((-14 + 2 * s + math.sqrt(-58 + 34 * s)) / 18, math.sqrt(134 + 22 * s + 8 * inner) / 18)
    p = complex(3 - s, -math.sqrt(-21 + 6 * s))
    q = complex((-19 + 4 * s) / 9, 2 * math.sqrt(-122 + 38 * s) / 9)
    return M6Entries(x=x, a=a, b=b, c=c, t=1.0 + 0j, p=p, q=q)


def _m6_block(x, a, b, c, p, q, d=1.0) -> np.ndarray:
    return np.array(
        [
            [1, 1, 1, 1, 1, 1],
            [1, -1, x, x, -x, -x],
            [1, x, d, a, b, c],
            [1, x, a, d, c, b],
            [1, -x, b, c, p, q],
            [1, -x, c, b, q, p],
        ],
        dtype=complex,
    )


def m6_discrete() -> CHMatrix:
    e = m6_closed_forms()
    return CHMatrix(_m6_block(e.x, e.a, e.b, e.c, e.p, e.q), dephased=True)


def m6_derived(branch: int = 1) -> CHMatrix:
    """Rebuild M6 from x alone by repeated row completion.

    ``branch=2`` takes x2 = conj(x1) and the mirrored completion order, which
    gives the complex conjugate of the branch-1 matrix.
    """
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    x = complex((1 - SQRT13) / 3, math.sqrt(-5 + 2 * SQRT13) / 3)
    if branch == 2:
        x = x.conjugate()
    a = (x * x - 2 * x - 3) / 2
    plus, minus = completion_pair((2 + x + a) / 2)
    c, b = (plus, minus) if branch == 1 else (minus, plus)
    plus, minus = completion_pair((1 - x + b + c) / 2)
    q, p = (plus, minus) if branch == 1 else (minus, plus)
    return CHMatrix(_m6_block(x, a, b, c, p, q), dephased=True)


def _pm(w: complex) -> tuple[complex, complex]:
    """(w/4, i w sqrt(16 - |w|^2) / (4|w|)) with the radicand clamped at zero."""
    r = abs(w)
    root = math.sqrt(max(0.0, 16.0 - r * r))
    return w / 4, 1j * w * root / (4 * r)


def singular_distance(t: float) -> float:
    """Distance of t (mod 2pi) from the excluded points pi/2 and 3pi/2."""
    t = t % TWO_PI
    return min(abs(t - math.pi / 2), abs(t - 3 * math.pi / 2))


def m6_family(t: float, eps_sing: float = EPS_SING) -> CHMatrix:
    """M6(x) at x = e^{it}; undefined at x = +-i."""
    if singular_distance(t) <= eps_sing:
        raise SingularParameter(f"t={t!r} is within {eps_sing:g} of a singular point (x = +-i)")
    x = complex(math.cos(t), math.sin(t))
    m, s = _pm(x * x - 2 * x - 1)
    a, d = m - s, m + s
    m, s = _pm(1 + x * x)
    b, c = -m - s, -m + s
    m, s = _pm(x * x + 2 * x - 1)
    p, q = m + s, m - s
    return CHMatrix(_m6_block(x, a, b, c, p, q, d=d), dephased=True)


def dita_construction(K: CHMatrix, H: CHMatrix, phases: Sequence[Sequence[float]]) -> CHMatrix:
    """Block matrix with block (i, j) = K_ij diag(e^{i phi_j}) H, phi_1 = 0.

    ``phases`` holds the m - 1 phase vectors (length n) for blocks 2..m.
    """
    m, n = K.n, H.n
    ph = np.asarray(phases, dtype=float)
    if ph.size == 0 and m == 1:
        ph = np.zeros((0, n))
    if ph.ndim != 2 or ph.shape != (m - 1, n):
        raise DimensionMismatch(f"expected {m - 1} phase vectors of length {n}, got shape {ph.shape}")
    ph = np.vstack([np.zeros((1, n)), ph])
    k = K.entries
    blocks = [[k[i, j] * np.exp(1j * ph[j])[:, None] * H.entries for j in range(m)] for i in range(m)]
    return CHMatrix(np.block(blocks))


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    arity: int
    domain: tuple[tuple[float, float], ...]
    constructor: Callable[[np.ndarray], CHMatrix] = field(repr=False)
    excluded: tuple[tuple[float, ...], ...] = ()

    def __call__(self, *params) -> CHMatrix:
        p = np.asarray(params, dtype=float).ravel()
        if p.size != self.arity:
            raise DimensionMismatch(f"{self.name} takes {self.arity} parameter(s), got {p.size}")
        return self.constructor(p)


@dataclass(frozen=True, eq=False)
class AffineFamilyData:
    name: str
    base: CHMatrix
    masks: tuple[np.ndarray, ...]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "base_phases_turns": self.base.phase_turns().tolist(),
            "masks": [m.astype(int).tolist() for m in self.masks],
        }

    @classmethod
    def from_json(cls, data: dict) -> AffineFamilyData:
        try:
            base = CHMatrix.from_turns(np.asarray(data["base_phases_turns"], dtype=float))
            masks = tuple(np.asarray(m) for m in data["masks"])
            name = str(data.get("name", "affine"))
        except (KeyError, TypeError, ValueError) as exc:
            raise MatrixFormatError(f"bad affine family data: {exc}") from exc
        return cls(name=name, base=base, masks=masks)

    @classmethod
    def load(cls, path) -> AffineFamilyData:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def load_affine_family(
    data: AffineFamilyData,
    n_samples: int = 16,
    rng_seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> FamilyDescriptor:
    """Wrap ``H(p) = base * exp(i sum_k p_k mask_k)`` after checking it on random samples."""
    n = data.base.n
    masks = []
    for m in data.masks:
        if m.shape != (n, n):
            raise DimensionMismatch(f"mask shape {m.shape} does not match base order {n}")
        if not np.all((m == 0) | (m == 1)):
            raise MatrixFormatError("masks must be 0/1 patterns")
        masks.append(m.astype(float))
    stack = np.array(masks).reshape(len(masks), n, n)
    base = data.base.entries

    def build(p: np.ndarray) -> CHMatrix:
        expo = np.tensordot(p, stack, axes=1) if len(masks) else np.zeros((n, n))
        return CHMatrix(base * np.exp(1j * expo))

    rng = np.random.default_rng(rng_seed)
    for _ in range(n_samples):
        p = rng.uniform(0, TWO_PI, size=len(masks))
        res = gram_residual(build(p))
        if res > tol.tol_gram:
            raise ValidationFailed(data.name, p, res)
    return FamilyDescriptor(
        name=data.name,
        arity=len(masks),
        domain=tuple((0.0, TWO_PI) for _ in masks),
        constructor=build,
    )


def dita_affine_data(K: CHMatrix, H: CHMatrix, name: str = "dita") -> AffineFamilyData:
    """The Dita construction written as an affine family.

    The first phase of every block is absorbed by dephasing, leaving
    (m - 1)(n - 1) parameters.
    """
    m, n = K.n, H.n
    base = dita_construction(K, H, np.zeros((m - 1, n)))
    masks = []
    for j in range(1, m):
        for k in range(1, n):
            mask = np.zeros((m * n, m * n), dtype=int)
            rows = [i * n + k for i in range(m)]
            mask[np.ix_(rows, range(j * n, (j + 1) * n))] = 1
            masks.append(mask)
    return AffineFamilyData(name=name, base=base, masks=tuple(masks))


def bundled_family(name: str) -> AffineFamilyData:
    """Affine family shipped in the package data directory."""
    ref = resources.files("hadamard_lab") / "data" / f"{name}.json"
    return AffineFamilyData.from_json(json.loads(ref.read_text()))


def m6_family_descriptor(eps_sing: float = EPS_SING) -> FamilyDescriptor:
    return FamilyDescriptor(
        name="m6",
        arity=1,
        domain=((0.0, TWO_PI),),
        constructor=lambda p: m6_family(float(p[0]), eps_sing),
        excluded=((math.pi / 2,), (3 * math.pi / 2,)),
    )


CATALOGUE: dict[str, Callable[[], CHMatrix]] = {
    "f6": lambda: fourier(6),
    "s6": tao_s6,
    "d6": dita_d6,
    "d6-sym": d6_symmetric,
    "c6": bjorck_c6,
    "m6": m6_discrete,
    "m6-one": m6_one,
    "f2f3": lambda: dita_construction(fourier(2), fourier(3), [[0.0, 0.0, 0.0]]),
}


def get(name: str) -> CHMatrix:
    try:
        return CATALOGUE[name]()
    except KeyError:
        raise KeyError(f"unknown catalogue matrix {name!r}; known: {', '.join(CATALOGUE)}") from None
