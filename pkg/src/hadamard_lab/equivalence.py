"""Haagerup's Lambda-set invariant and an exact search for the permutation and
diagonal matrices relating two equivalent Hadamard matrices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, TWO_PI, CHMatrix, DimensionMismatch, HadamardError, Tolerances, conjugate, dephase

DEFAULT_BUDGET = math.factorial(6) ** 2
LARGE_BUDGET = math.factorial(8) ** 2


class OrderTooLarge(HadamardError):
    pass


def _circ_dist(a, b):
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b), TWO_PI))
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True, eq=False)
class LambdaSet:
    values: np.ndarray
    source_order: int

    def __len__(self):
        return len(self.values)

    def turns(self) -> list[float]:
        return (self.values / TWO_PI).tolist()

    def distance_to(self, phase: float) -> float:
        return float(_nearest_distance(np.array([phase % TWO_PI]), self.values)[0])


def bucket_phases(phases: np.ndarray, tol: float) -> np.ndarray:
    """Merge phases on the circle by single linkage at gap ``tol``.

    Each cluster is represented by its circular mean.
    """
    p = np.sort(np.mod(np.asarray(phases, dtype=float).ravel(), TWO_PI))
    if p.size == 0:
        return p
    breaks = np.nonzero(np.diff(p) > tol)[0] + 1
    groups = np.split(p, breaks)
    if len(groups) > 1 and (p[0] + TWO_PI - p[-1]) <= tol:
        groups[0] = np.concatenate([groups[-1] - TWO_PI, groups[0]])
        groups.pop()
    elif len(groups) == 1 and (p[0] + TWO_PI - p[-1]) <= tol:
        # everything chains around the whole circle
        return np.array([0.0])
    reps = np.array([np.angle(np.mean(np.exp(1j * g))) for g in groups])
    reps = np.mod(reps, TWO_PI)
    # phases within rounding of 0 or 2pi belong at 0
    reps[(reps < 1e-15) | (reps > TWO_PI - 1e-15)] = 0.0
    return np.sort(reps)


def lambda_products(H: CHMatrix) -> np.ndarray:
    """All n^4 products h_ij conj(h_kj) h_kl conj(h_il), indexed [i, j, k, l]."""
    h = H.entries
    hc = h.conj()
    return np.einsum("ij,kj,kl,il->ijkl", h, hc, h, hc)


def lambda_set(H: CHMatrix, tol: Tolerances = DEFAULT_TOL) -> LambdaSet:
    vals = bucket_phases(np.angle(lambda_products(H)), tol.tol_lambda)
    return LambdaSet(values=vals, source_order=H.n)


def lambda_contains(L: LambdaSet, z, tol: Tolerances = DEFAULT_TOL) -> bool:
    phase = math.atan2(complex(z).imag, complex(z).real)
    return L.distance_to(phase) <= tol.tol_lambda


def _nearest_distance(values: np.ndarray, sorted_ref: np.ndarray) -> np.ndarray:
    """Circular distance from each of ``values`` to the closest point of ``sorted_ref``."""
    if sorted_ref.size == 0:
        return np.full(values.shape, np.inf)
    pos = np.searchsorted(sorted_ref, values)
    lo = sorted_ref[(pos - 1) % sorted_ref.size]
    hi = sorted_ref[pos % sorted_ref.size]
    return np.minimum(_circ_dist(values, lo), _circ_dist(values, hi))


def lambda_difference(L1: LambdaSet, L2: LambdaSet, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Phases of L1 missing from L2 and of L2 missing from L1."""
    only1 = L1.values[_nearest_distance(L1.values, L2.values) > tol.tol_lambda]
    only2 = L2.values[_nearest_distance(L2.values, L1.values) > tol.tol_lambda]
    return only1, only2


def lambda_equal(L1: LambdaSet, L2: LambdaSet, tol: Tolerances = DEFAULT_TOL) -> bool:
    if L1.source_order != L2.source_order:
        return False
    only1, only2 = lambda_difference(L1, L2, tol)
    return only1.size == 0 and only2.size == 0


@dataclass(frozen=True, eq=False)
class EquivalenceCertificate:
    """Witness of H1[i, j] = e^{i d1[i]} H2[p1[i], p2[j]] e^{i d2[j]} (0-based)."""

    p1: tuple[int, ...]
    p2: tuple[int, ...]
    d1: np.ndarray
    d2: np.ndarray

    def apply(self, H2: CHMatrix) -> CHMatrix:
        a = H2.entries[np.ix_(self.p1, self.p2)]
        return CHMatrix(a * np.exp(1j * self.d1)[:, None] * np.exp(1j * self.d2)[None, :])

    def error(self, H1: CHMatrix, H2: CHMatrix) -> float:
        return float(np.max(np.abs(self.apply(H2).entries - H1.entries)))

    def to_json(self) -> dict:
        return {
            "p1": list(self.p1),
            "p2": list(self.p2),
            "d1_turns": (np.mod(self.d1, TWO_PI) / TWO_PI).tolist(),
            "d2_turns": (np.mod(self.d2, TWO_PI) / TWO_PI).tolist(),
            "convention": "H1[i,j] = exp(2 pi i d1[i]) * H2[p1[i], p2[j]] * exp(2 pi i d2[j]), 0-based",
        }


def _check_budget(n: int, budget: int):
    if math.factorial(n) ** 2 > budget:
        raise OrderTooLarge(f"order {n} needs {math.factorial(n) ** 2} permutation pairs, budget is {budget}")


def _matching_row_orders(K: np.ndarray, A: np.ndarray, r: int, tol: float):
    """Row orders sigma (sigma[0] = r) admitting a column order tau with
    K[sigma[i], tau[j]] ~ A[i, j]; yields (sigma, tau) in lexicographic sigma order."""
    n = K.shape[0]
    rest = [i for i in range(n) if i != r]
    sigmas = np.array([(r, *s) for s in itertools.permutations(rest)], dtype=int)
    Ks = K[sigmas]  # (S, n, n)
    # diff[s, j, jj] = max_i |Ks[s, i, jj] - A[i, j]|
    diff = np.max(np.abs(Ks[:, :, None, :] - A[None, :, :, None]), axis=1)
    tau = np.argmin(diff, axis=2)
    best = np.take_along_axis(diff, tau[:, :, None], axis=2)[:, :, 0]
    ok = np.all(best <= tol, axis=1)
    for s in np.nonzero(ok)[0]:
        t = tau[s]
        if len(set(t.tolist())) == n:
            yield tuple(sigmas[s].tolist()), tuple(t.tolist())


def are_equivalent(
    H1: CHMatrix,
    H2: CHMatrix,
    tol: Tolerances = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
    use_filter: bool = True,
) -> EquivalenceCertificate | None:
    """Certificate for H1 = D1 P1 H2 P2 D2, or None.

    Exhaustive over all (P1, P2): the first row and column of P1 H2 P2 are
    chosen among the n^2 possibilities, the remaining rows are enumerated and
    the column order is read off by matching columns of the dephased forms.
    Among all certificates the lexicographically smallest (p1, p2) is returned.
    """
    n = H1.n
    if H2.n != n:
        raise DimensionMismatch(f"orders differ: {n} vs {H2.n}")
    _check_budget(n, budget)
    if use_filter and not lambda_equal(lambda_set(H1, tol), lambda_set(H2, tol), tol):
        return None
    A, a1, b1 = dephase(H1, tol)
    A = A.entries
    h2 = H2.entries
    best = None
    for r in range(n):
        for c in range(n):
            K = h2 / h2[:, c][:, None]
            K = K / K[r, :][None, :]
            for p1, p2 in _matching_row_orders(K, A, r, tol.tol_equiv):
                if best is None or (p1, p2) < best:
                    best = (p1, p2)
                break  # later sigmas for this (r, c) are lexicographically larger
        if best is not None:
            break  # any certificate with a larger p1[0] loses
    if best is None:
        return None
    p1, p2 = best
    Q = CHMatrix(h2[np.ix_(p1, p2)])
    _, a2, b2 = dephase(Q, tol)
    cert = EquivalenceCertificate(p1=p1, p2=p2, d1=np.mod(a2 - a1, TWO_PI), d2=np.mod(b2 - b1, TWO_PI))
    err = cert.error(H1, H2)
    if not err <= tol.tol_equiv * (1 + 1e-6) + 1e-13:
        raise AssertionError(f"certificate failed verification (error {err:.3e})")
    return cert


def conjugate_equivalent(H: CHMatrix, tol: Tolerances = DEFAULT_TOL, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether H is equivalent to its entrywise conjugate.

    A symmetric matrix failing this is equivalent to no self-adjoint matrix.
    """
    return are_equivalent(H, conjugate(H), tol, budget) is not None


def random_certificate(n: int, rng: np.random.Generator) -> EquivalenceCertificate:
    return EquivalenceCertificate(
        p1=tuple(rng.permutation(n).tolist()),
        p2=tuple(rng.permutation(n).tolist()),
        d1=rng.uniform(0, TWO_PI, n),
        d2=rng.uniform(0, TWO_PI, n),
    )
