"""Numerical search for dephased symmetric 6x6 complex Hadamard matrices with a
prescribed diagonal, and sorting of the solutions into equivalence classes."""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalogue import bjorck_c6, dita_d6, fourier, m6_discrete, tao_s6
from .core import TWO_PI, CHMatrix, Tolerances, conjugate
from .equivalence import are_equivalent, lambda_equal, lambda_set

FREE = None

# classification of numerically converged matrices needs looser matching
# than exact catalogue entries
CLASS_TOL = Tolerances(tol_entry=1e-10, tol_gram=1e-8, tol_lambda=1e-6, tol_equiv=1e-6)
TOL_SOLUTION = 1e-9
REAL_DIAGONAL_PATTERNS = ("1,1,1,1,*,*", "1,-1,-1,-1,*,*", "1,-1,1,1,*,*", "1,-1,-1,1,*,*")


def _worker_count() -> int:
    env = os.environ.get("HADAMARD_LAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SymmetricAnsatz:
    """Dephased symmetric matrix with some entries fixed and the rest given by
    free phases.

    ``diag`` has one slot per row: a fixed complex value or ``FREE``; slot 0
    must be 1. ``fixed`` pins upper off-diagonal entries (0-based ``(i, j)``,
    ``0 < i < j``). ``tied`` groups upper entries that share one phase, each
    with a fixed coefficient, e.g. ``(((1, 2), 1), ((1, 3), 1), ((1, 4), -1), ((1, 5), -1))``.
    Parameters are ordered: tied groups, free diagonal slots, remaining upper
    entries row by row.
    """

    diag: tuple
    fixed: tuple = ()
    tied: tuple = ()
    _base: np.ndarray = field(init=False, repr=False, compare=False)
    _coef: np.ndarray = field(init=False, repr=False, compare=False)
    _index: np.ndarray = field(init=False, repr=False, compare=False)
    _masks: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.diag)
        if n < 2:
            raise ValueError("ansatz needs order >= 2")
        if self.diag[0] is FREE or complex(self.diag[0]) != 1:
            raise ValueError("diagonal slot 0 of a dephased matrix is 1")
        base = np.ones((n, n), dtype=complex)
        coef = np.zeros((n, n), dtype=complex)
        index = -np.ones((n, n), dtype=int)
        taken = set()

        def claim(i, j):
            i, j = min(i, j), max(i, j)
            if i == 0 or j >= n:
                raise ValueError(f"entry {(i, j)} is outside the free block")
            if (i, j) in taken:
                raise ValueError(f"entry {(i, j)} assigned twice")
            taken.add((i, j))
            return i, j

        k = 0
        for group in self.tied:
            for (i, j), c in group:
                i, j = claim(i, j)
                for a, b in ((i, j), (j, i)):
                    index[a, b] = k
                    coef[a, b] = c
            k += 1
        for i in range(1, n):
            claim(i, i)
            if self.diag[i] is FREE:
                index[i, i] = k
                coef[i, i] = 1
                k += 1
            else:
                base[i, i] = complex(self.diag[i])
        for (i, j), v in self.fixed:
            i, j = claim(i, j)
            base[i, j] = base[j, i] = complex(v)
        for i in range(1, n):
            for j in range(i + 1, n):
                if (i, j) not in taken:
                    index[i, j] = index[j, i] = k
                    coef[i, j] = coef[j, i] = 1
                    k += 1
        masks = np.zeros((k, n, n))
        for m in range(k):
            masks[m][index == m] = 1.0
        object.__setattr__(self, "_base", base)
        object.__setattr__(self, "_coef", coef)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_masks", masks)

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def n_params(self) -> int:
        return self._masks.shape[0]

    def realize_batch(self, phases: np.ndarray) -> np.ndarray:
        th = np.atleast_2d(np.asarray(phases, dtype=float))
        if th.shape[1] != self.n_params:
            raise ValueError(f"expected {self.n_params} phases, got {th.shape[1]}")
        e = np.concatenate([np.exp(1j * th), np.ones((th.shape[0], 1))], axis=1)
        idx = np.where(self._index >= 0, self._index, self.n_params)
        vals = e[:, idx]
        return np.where(self._index >= 0, self._coef * vals, self._base)

    def realize(self, phases) -> CHMatrix:
        return CHMatrix(self.realize_batch(phases)[0], dephased=True)

    def phases_of(self, H: CHMatrix, atol: float = 1e-9) -> np.ndarray:
        """Phase vector realizing H, which must fit the ansatz."""
        h = H.entries
        th = np.zeros(self.n_params)
        for m in range(self.n_params):
            i, j = np.argwhere(self._index == m)[0]
            th[m] = np.angle(h[i, j] / self._coef[i, j])
        if np.max(np.abs(self.realize(th).entries - h)) > atol:
            raise ValueError("matrix does not fit this ansatz")
        return np.mod(th, TWO_PI)


def ansatz_from_pattern(pattern, tied_row2: Sequence[complex] | None = None) -> SymmetricAnsatz:
    """Build an ansatz from diagonal slots; ``tied_row2`` ties h_{2,3..n} to a
    single phase with the given coefficients."""
    diag = tuple(FREE if s is FREE else complex(s) for s in pattern)
    tied = ()
    if tied_row2 is not None:
        if len(tied_row2) != len(diag) - 2:
            raise ValueError("tied_row2 needs one coefficient per entry h_{2,3..n}")
        tied = (tuple(((1, j + 2), complex(c)) for j, c in enumerate(tied_row2)),)
    return SymmetricAnsatz(diag=diag, tied=tied)


def parse_pattern(text: str) -> list[tuple]:
    """Expand a pattern like ``1,-1,-1,-1,*,*`` into concrete diagonals.

    ``*`` runs over +1 and -1; ``f`` marks a free (unimodular) slot.
    """
    choices = []
    for tok in text.replace(" ", "").split(","):
        if tok == "*":
            choices.append((1.0, -1.0))
        elif tok.lower() in ("f", "free", "?"):
            choices.append((FREE,))
        else:
            try:
                v = float(tok)
            except ValueError:
                raise ValueError(f"bad diagonal token {tok!r}") from None
            if v not in (1.0, -1.0):
                raise ValueError(f"fixed diagonal entries must be 1 or -1, got {tok!r}")
            choices.append((v,))
    return list(itertools.product(*choices))


def _pairs(n):
    return np.triu_indices(n, 1)


def residual_batch(ansatz: SymmetricAnsatz, phases: np.ndarray) -> np.ndarray:
    H = ansatz.realize_batch(phases)
    G = H @ np.conj(np.swapaxes(H, 1, 2))
    iu, ju = _pairs(ansatz.n)
    g = G[:, iu, ju]
    out = np.empty((g.shape[0], 2 * g.shape[1]))
    out[:, 0::2] = g.real
    out[:, 1::2] = g.imag
    return out


def residual(ansatz: SymmetricAnsatz, phases) -> np.ndarray:
    """Real and imaginary parts of <r_i, r_j> for i < j, interleaved."""
    return residual_batch(ansatz, np.asarray(phases, dtype=float)[None, :])[0]


def jacobian_batch(ansatz: SymmetricAnsatz, phases: np.ndarray) -> np.ndarray:
    H = ansatz.realize_batch(phases)
    Hh = np.conj(np.swapaxes(H, 1, 2))
    dH = 1j * H[:, None, :, :] * ansatz._masks[None]
    A = dH @ Hh[:, None]
    dG = A + np.conj(np.swapaxes(A, 2, 3))
    iu, ju = _pairs(ansatz.n)
    g = dG[:, :, iu, ju]  # (S, k, pairs)
    J = np.empty((g.shape[0], 2 * g.shape[2], g.shape[1]))
    J[:, 0::2, :] = np.swapaxes(g.real, 1, 2)
    J[:, 1::2, :] = np.swapaxes(g.imag, 1, 2)
    return J


def jacobian(ansatz: SymmetricAnsatz, phases) -> np.ndarray:
    return jacobian_batch(ansatz, np.asarray(phases, dtype=float)[None, :])[0]


def levenberg_marquardt(
    ansatz: SymmetricAnsatz,
    theta0: np.ndarray,
    tol_solution: float = TOL_SOLUTION,
    max_iter: int = 400,
) -> tuple[np.ndarray, np.ndarray]:
    """Damped Gauss-Newton on the phase torus for a batch of starting points.

    Returns final phases and residual 2-norms.
    """
    theta = np.array(theta0, dtype=float, copy=True)
    S, k = theta.shape
    r = residual_batch(ansatz, theta)
    cost = np.einsum("ij,ij->i", r, r)
    lam = np.full(S, 1e-3)
    active = np.sqrt(cost) > tol_solution
    eye = np.eye(k)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        th = theta[idx]
        J = jacobian_batch(ansatz, th)
        ra = r[idx]
        JtJ = np.swapaxes(J, 1, 2) @ J
        g = np.einsum("sij,si->sj", J, ra)
        step = -np.linalg.solve(JtJ + lam[idx, None, None] * eye, g[..., None])[..., 0]
        trial = th + step
        rt = residual_batch(ansatz, trial)
        ct = np.einsum("ij,ij->i", rt, rt)
        better = ct < cost[idx]
        acc = idx[better]
        theta[acc] = trial[better]
        r[acc] = rt[better]
        cost[acc] = ct[better]
        lam[acc] = np.maximum(lam[acc] * 0.2, 1e-12)
        rej = idx[~better]
        lam[rej] *= 8.0
        done = np.sqrt(cost[idx]) <= tol_solution
        # stalled seeds: damping exploded or no progress left
        stalled = lam[idx] > 1e10
        active[idx[done | stalled]] = False
    return np.mod(theta, TWO_PI), np.sqrt(cost)


@dataclass
class Solution:
    matrix: CHMatrix
    residual: float
    phases: np.ndarray
    class_label: int = -1


@dataclass
class SolutionClass:
    label: int
    representative: CHMatrix
    matched: str | None
    size: int


@dataclass
class SolutionReport:
    pattern: str
    seeds_run: int
    converged_count: int
    best_residual: float
    solutions: list[Solution]
    classes: list[SolutionClass]

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "seeds_run": self.seeds_run,
            "converged": self.converged_count,
            "best_residual": self.best_residual,
            "classes": [
                {
                    "label": c.label,
                    "representative_matrix": c.representative.to_json("phases"),
                    "matched_catalogue_name": c.matched,
                    "size": c.size,
                }
                for c in self.classes
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @property
    def matched_names(self) -> set:
        return {c.matched for c in self.classes}

    def summary(self) -> str:
        if not self.classes:
            return f"{self.pattern}: no solution found at {self.seeds_run} seeds, best residual {self.best_residual:.3e}"
        counts: dict[str, list[int]] = {}
        for c in self.classes:
            tally = counts.setdefault(c.matched or "unmatched", [0, 0])
            tally[0] += 1
            tally[1] += c.size
        parts = ", ".join(
            f"{name} ({k} classes, {m} solutions)" if k > 1 else f"{name} x{m}" for name, (k, m) in counts.items()
        )
        return f"{self.pattern}: {self.converged_count}/{self.seeds_run} converged; classes: {parts}"


def catalogue_representatives() -> dict[str, CHMatrix]:
    m6 = m6_discrete()
    return {
        "S6": tao_s6(),
        "D6": dita_d6(),
        "F6": fourier(6),
        "C6": bjorck_c6(),
        "M6": m6,
        "M6*": conjugate(m6),
    }


def _match_catalogue(H: CHMatrix, tol: Tolerances) -> str | None:
    L = lambda_set(H, tol)
    for name, ref in catalogue_representatives().items():
        if lambda_equal(L, lambda_set(ref, tol), tol) and are_equivalent(H, ref, tol, use_filter=False):
            return name
    return None


def classify_solutions(solutions: list[Solution], tol: Tolerances = CLASS_TOL) -> list[SolutionClass]:
    """Label solutions in place by equivalence class; returns the classes."""
    reps: list[tuple[CHMatrix, object]] = []
    sizes: list[int] = []
    seen: dict[bytes, int] = {}
    for s in solutions:
        key = np.round(s.matrix.entries, 6).tobytes()
        if key in seen:
            s.class_label = seen[key]
            sizes[seen[key]] += 1
            continue
        L = lambda_set(s.matrix, tol)
        label = -1
        for j, (R, LR) in enumerate(reps):
            if lambda_equal(L, LR, tol) and are_equivalent(s.matrix, R, tol, use_filter=False) is not None:
                label = j
                break
        if label < 0:
            label = len(reps)
            reps.append((s.matrix, L))
            sizes.append(0)
        seen[key] = label
        s.class_label = label
        sizes[label] += 1
    return [
        SolutionClass(label=j, representative=R, matched=_match_catalogue(R, tol), size=sizes[j])
        for j, (R, _) in enumerate(reps)
    ]


def _run_seeds(ansatz: SymmetricAnsatz, theta0: np.ndarray, tol_solution: float):
    workers = min(_worker_count(), max(1, len(theta0) // 250))
    if workers <= 1:
        return levenberg_marquardt(ansatz, theta0, tol_solution)
    chunks = np.array_split(theta0, workers)
    with ThreadPoolExecutor(workers) as ex:
        parts = list(ex.map(lambda c: levenberg_marquardt(ansatz, c, tol_solution), chunks))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _solve_raw(ansatz: SymmetricAnsatz, n_seeds: int, rng: np.random.Generator, tol_solution: float):
    theta0 = rng.uniform(0, TWO_PI, size=(n_seeds, ansatz.n_params))
    theta, res = _run_seeds(ansatz, theta0, tol_solution)
    ok = res <= tol_solution
    sols = [
        Solution(matrix=ansatz.realize(theta[i]), residual=float(res[i]), phases=theta[i])
        for i in np.nonzero(ok)[0]
    ]
    best = float(np.min(res)) if res.size else float("inf")
    return sols, best


def _report(pattern: str, sols: list[Solution], seeds: int, best: float, tol: Tolerances) -> SolutionReport:
    sols.sort(key=lambda s: (s.residual, tuple(s.phases)))
    classes = classify_solutions(sols, tol)
    return SolutionReport(
        pattern=pattern,
        seeds_run=seeds,
        converged_count=len(sols),
        best_residual=best,
        solutions=sols,
        classes=classes,
    )


def solve(
    ansatz: SymmetricAnsatz,
    n_seeds: int = 2000,
    rng_seed: int = 0,
    tol: Tolerances = CLASS_TOL,
    tol_solution: float = TOL_SOLUTION,
) -> SolutionReport:
    """Multi-start search for Hadamard matrices fitting ``ansatz``."""
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    sols, best = _solve_raw(ansatz, n_seeds, np.random.default_rng(rng_seed), tol_solution)
    label = ",".join("f" if d is FREE else f"{complex(d).real:g}" for d in ansatz.diag)
    return _report(label, sols, n_seeds, best, tol)


def solve_pattern(
    pattern: str,
    n_seeds: int = 2000,
    rng_seed: int = 0,
    tol: Tolerances = CLASS_TOL,
    tol_solution: float = TOL_SOLUTION,
    tied_row2: Sequence[complex] | None = None,
) -> SolutionReport:
    """Run ``n_seeds`` starts for every +-1 subcase of ``pattern`` and merge."""
    subcases = parse_pattern(pattern)
    children = np.random.SeedSequence(rng_seed).spawn(len(subcases))
    all_sols: list[Solution] = []
    best = float("inf")
    for diag, ss in zip(subcases, children):
        ansatz = ansatz_from_pattern(diag, tied_row2)
        sols, b = _solve_raw(ansatz, n_seeds, np.random.default_rng(ss), tol_solution)
        all_sols.extend(sols)
        best = min(best, b)
    return _report(pattern, all_sols, n_seeds * len(subcases), best, tol)


@dataclass
class RealDiagonalReport:
    reports: dict[str, SolutionReport]

    def to_json(self) -> dict:
        return {"patterns": [r.to_json() for r in self.reports.values()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def classify_real_diagonal(
    n_seeds: int = 2000,
    rng_seed: int = 0,
    tol: Tolerances = CLASS_TOL,
    patterns: Sequence[str] = REAL_DIAGONAL_PATTERNS,
) -> RealDiagonalReport:
    seeds = np.random.SeedSequence(rng_seed).generate_state(len(patterns))
    reports = {p: solve_pattern(p, n_seeds, int(s), tol) for p, s in zip(patterns, seeds)}
    return RealDiagonalReport(reports)
