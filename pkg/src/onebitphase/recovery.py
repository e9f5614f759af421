"""Signal recovery from one-bit intensity comparisons.

Spectral estimators extract the top eigenvector of a measurement-weighted
covariance surrogate without ever materializing it; alternating minimization
refines an estimate against un-quantized intensities.  All estimators report
through :class:`RecoveryReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import ceil, log
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channels import QuantizedData, quantize, ratio_weights
from .numkit import as_complex_vector, cgls, phase_op, power_iteration
from .sensing import CdpOperator, PairedEnsemble, PlainEnsemble, substream


@dataclass
class RecoveryReport:
    """Outcome of one recovery run.

    ``trace`` holds (iteration, residual-or-objective) pairs; spectral
    estimates are unit norm, alternating-minimization estimates keep their
    least-squares scale.
    """

    estimate: np.ndarray
    lambda_hat: float
    iterations: int
    trace: list = field(default_factory=list)
    converged: bool = False


class InitKind(str, Enum):
    RANDOM = "random"
    SUBEXP = "subexp"
    ONEBIT = "onebit"
    WEIGHTED_ONEBIT = "weighted1bit"


def parse_init(name: str) -> InitKind:
    try:
        return InitKind(name.strip().lower())
    except ValueError:
        valid = ", ".join(k.value for k in InitKind)
        raise ValueError(f"unknown init kind {name!r}; expected one of {valid}")


@dataclass(frozen=True)
class MatrixOperator:
    """Measurement operator from explicit sensing rows.

    apply(x)[k] = <row_k, x> = conj(row_k) . x, matching the inner-product
    convention everywhere else.
    """

    rows: np.ndarray

    def __post_init__(self):
        if self.rows.ndim != 2:
            raise ValueError(f"rows must be 2-D, got shape {self.rows.shape}")

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    @property
    def out_dim(self) -> int:
        return self.rows.shape[0]

    def apply(self, x) -> np.ndarray:
        return self.rows.conj() @ x

    def adjoint(self, y) -> np.ndarray:
        return self.rows.T @ y


MeasurementOperator = Union[MatrixOperator, CdpOperator]


def random_init(n: int, seed) -> np.ndarray:
    """Uniformly random unit vector on the complex sphere."""
    rng = np.random.default_rng(seed)
    v = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(0.5)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# spectral estimators


def one_bit_matvec(data: QuantizedData, r) -> np.ndarray:
    """Action of (1/m) sum_i y_i (a1_i a1_i* - a2_i a2_i*) on r, in O(nm)."""
    r = as_complex_vector(r)
    ens = data.ensemble
    if r.size != ens.n:
        raise ValueError(f"r has dimension {r.size}, expected {ens.n}")
    y = np.asarray(data.y, dtype=float)
    c1 = ens.rows1.conj() @ r
    c2 = ens.rows2.conj() @ r
    return (ens.rows1.T @ (y * c1) - ens.rows2.T @ (y * c2)) / ens.m


def _pair_matvec(a1, a2, coef1, coef2, m):
    def matvec(r):
        return (a1.T @ (coef1 * (a1.conj() @ r)) - a2.T @ (coef2 * (a2.conj() @ r))) / m

    return matvec


def shift_upper_bound(ens: PairedEnsemble) -> float:
    """(1/m) sum_i (||a1_i||^2 + ||a2_i||^2), an operator-norm bound."""
    return float(
        (np.sum(np.abs(ens.rows1) ** 2) + np.sum(np.abs(ens.rows2) ** 2)) / ens.m
    )


def _resolve_shift(shift, bound: float) -> float:
    if shift is False or shift is None:
        return 0.0
    if shift is True:
        return bound
    mu = float(shift)
    if mu < 0:
        raise ValueError("spectral shift must be non-negative")
    return mu


def _power_report(matvec, n, tol, max_iters, seed, mu) -> RecoveryReport:
    if mu > 0.0:
        base = matvec

        def matvec(r, _base=base):  # noqa: F811 - shifted wrapper
            return _base(r) + mu * r

    trace: list = []
    eigval, vec, iters = power_iteration(
        matvec,
        n,
        tol=tol,
        max_iters=max_iters,
        seed=seed,
        callback=lambda j, r, delta: trace.append((j, delta)),
    )
    converged = bool(trace) and trace[-1][1] <= tol
    return RecoveryReport(
        estimate=vec,
        lambda_hat=max(eigval - mu, 0.0),
        iterations=iters,
        trace=trace,
        converged=converged,
    )


def one_bit_phase(
    data: QuantizedData,
    tol: float = 1e-8,
    max_iters: int = 1000,
    seed: int = 0,
    shift=False,
) -> RecoveryReport:
    """Top eigenvector of the signed pair surrogate via power iteration.

    ``shift=True`` adds the operator-norm bound times identity to force
    convergence to the algebraically largest eigenvector even when a negative
    eigenvalue dominates in magnitude; the reported eigenvalue subtracts the
    shift again.
    """
    if data.weights is not None:
        raise ValueError("data carries ratio weights; use weighted_one_bit_phase")
    ens = data.ensemble
    y = np.asarray(data.y, dtype=float)
    base = _pair_matvec(ens.rows1, ens.rows2, y, y, ens.m)
    mu = _resolve_shift(shift, shift_upper_bound(ens))
    return _power_report(base, ens.n, tol, max_iters, seed, mu)


def weighted_one_bit_phase(
    data: QuantizedData,
    tol: float = 1e-8,
    max_iters: int = 1000,
    seed: int = 0,
    shift=False,
) -> RecoveryReport:
    """Like :func:`one_bit_phase` but with pair ratio weights inside the sum."""
    if data.weights is None:
        raise ValueError("data carries no ratio weights; use one_bit_phase")
    ens = data.ensemble
    y = np.asarray(data.y, dtype=float)
    base = _pair_matvec(
        ens.rows1,
        ens.rows2,
        y * data.weights[:, 0],
        y * data.weights[:, 1],
        ens.m,
    )
    mu = _resolve_shift(shift, shift_upper_bound(ens))
    return _power_report(base, ens.n, tol, max_iters, seed, mu)


def subexp_phase(
    ensemble: Union[PlainEnsemble, PairedEnsemble],
    b,
    tol: float = 1e-8,
    max_iters: int = 1000,
    seed: int = 0,
) -> RecoveryReport:
    """Top eigenvector of the intensity-weighted covariance (1/m) sum b_i a_i a_i*.

    The surrogate is positive semidefinite, so no spectral shift is needed.
    Accepts a plain ensemble, or a paired one whose 2m stacked rows are
    weighted by 2m intensities.
    """
    if isinstance(ensemble, PairedEnsemble):
        rows = ensemble.stacked_rows()
    else:
        rows = ensemble.rows
    return _subexp_power(rows, b, tol, max_iters, seed)


def _subexp_power(rows, b, tol, max_iters, seed) -> RecoveryReport:
    b = np.asarray(b, dtype=float)
    if b.shape != (rows.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({rows.shape[0]},)")
    if np.any(b < 0):
        raise ValueError("intensities must be non-negative")
    m = rows.shape[0]

    def matvec(r):
        return rows.T @ (b * (rows.conj() @ r)) / m

    return _power_report(matvec, rows.shape[1], tol, max_iters, seed, 0.0)


# ---------------------------------------------------------------------------
# alternating minimization


def dense_lsq_solver(rows: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """Exact least-squares step for explicit rows, via a cached Cholesky
    factorization of the normal matrix."""
    gram = rows.T @ rows.conj()
    factor = cho_factor(gram, lower=False)

    def solve(rhs: np.ndarray) -> np.ndarray:
        return cho_solve(factor, rows.T @ rhs)

    return solve


def cdp_lsq_solver(op: CdpOperator) -> Callable[[np.ndarray], np.ndarray]:
    """Exact least-squares step for masked-DFT stacks.

    Unitary DFT blocks make the normal matrix Diag(sum_i |w_i|^2), so the
    minimizer is one adjoint plus a pointwise division.
    """
    diag = np.sum(np.abs(op.masks) ** 2, axis=0)
    if np.any(diag <= 0):
        raise ValueError("masks leave some coordinate unobserved")

    def solve(rhs: np.ndarray) -> np.ndarray:
        return op.adjoint(rhs) / diag

    return solve


def alt_min(
    op: MeasurementOperator,
    b,
    x_init,
    max_iters: int = 200,
    tol: float = 1e-12,
    cg_tol: float = 1e-10,
    cg_max_iters: Optional[int] = None,
    lsq_solver: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> RecoveryReport:
    """Alternating minimization of ||A x - Diag(sqrt(b)) u||, |u_k| = 1.

    Each iteration sets u to the exact phase of A x, then re-solves the least
    squares problem in x (warm-started CGLS by default, or an injected exact
    solver).  The objective never increases: a step that fails to improve it
    keeps the previous iterate and stops.  Trace records the objective.
    """
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise ValueError("intensities must be non-negative")
    x = as_complex_vector(x_init).copy()
    if np.linalg.norm(x) == 0.0:
        raise ValueError("x_init must be nonzero")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    sqrt_b = np.sqrt(b)
    ls_ok = True
    converged = False
    trace: list = []
    obj_prev = np.inf
    z = np.asarray(op.apply(x), dtype=np.complex128)
    if z.shape != b.shape:
        raise ValueError(f"operator output {z.shape} does not match b {b.shape}")
    iters = 0
    for k in range(1, max_iters + 1):
        rhs = sqrt_b * phase_op(z)
        # With u fixed at the exact phase minimizer, this bound already
        # improves on the previous objective.
        obj_bound = float(np.linalg.norm(z - rhs) ** 2)
        if lsq_solver is not None:
            x_new = lsq_solver(rhs)
        else:
            x_new, info = cgls(
                op.apply, op.adjoint, rhs, tol=cg_tol, max_iters=cg_max_iters, x0=x
            )
            if info != 0:
                ls_ok = False
        z_new = np.asarray(op.apply(x_new), dtype=np.complex128)
        obj = float(np.linalg.norm(z_new - rhs) ** 2)
        if obj > obj_bound:
            # Least-squares step stalled at solver precision; keep the bound.
            iters = k
            trace.append((k, min(obj_bound, obj_prev)))
            if callback is not None:
                callback(k, x)
            converged = True
            break
        x, z = x_new, z_new
        iters = k
        trace.append((k, obj))
        if callback is not None:
            callback(k, x)
        if np.isfinite(obj_prev) and obj_prev - obj <= tol * obj_prev:
            converged = True
            break
        obj_prev = obj
    return RecoveryReport(
        estimate=x,
        lambda_hat=0.0,
        iterations=iters,
        trace=trace,
        converged=converged and ls_ok,
    )


def _block_bounds(total: int, blocks: int) -> list[tuple[int, int]]:
    """Contiguous equal blocks; leftover measurements join block 0."""
    size = total // blocks
    first = size + (total - size * blocks)
    bounds = [(0, first)]
    for i in range(1, blocks):
        start = first + (i - 1) * size
        bounds.append((start, start + size))
    return bounds


def _paired_view(rows, b):
    pairs = rows.shape[0] // 2
    even = slice(0, 2 * pairs, 2)
    odd = slice(1, 2 * pairs, 2)
    return rows[even], rows[odd], b[even], b[odd]


def _init_from_block(rows, b, init: InitKind, seed, tol, max_iters, shift):
    n = rows.shape[1]
    if init is InitKind.RANDOM:
        return RecoveryReport(
            estimate=random_init(n, substream(seed, "resample-random")),
            lambda_hat=0.0,
            iterations=0,
            trace=[],
            converged=True,
        )
    if init is InitKind.SUBEXP:
        return _subexp_power(rows, b, tol, max_iters, substream(seed, "resample-power"))
    a1, a2, b1, b2 = _paired_view(rows, b)
    if a1.shape[0] == 0:
        raise ValueError("initialization block has no measurement pairs")
    y = quantize(b1, b2)
    if init is InitKind.ONEBIT:
        coef1 = coef2 = y
    else:
        r1, r2 = ratio_weights(b1, b2)
        coef1, coef2 = y * r1, y * r2
    base = _pair_matvec(a1, a2, coef1, coef2, a1.shape[0])
    bound = float((np.sum(np.abs(a1) ** 2) + np.sum(np.abs(a2) ** 2)) / a1.shape[0])
    mu = _resolve_shift(shift, bound)
    return _power_report(
        base, n, tol, max_iters, substream(seed, "resample-power"), mu
    )


def alt_min_resampled(
    ensemble: Union[PlainEnsemble, PairedEnsemble],
    b,
    epsilon: float,
    init: InitKind = InitKind.ONEBIT,
    c_stages: float = 1.0,
    tol: float = 1e-10,
    seed: int = 0,
    power_tol: float = 1e-8,
    power_max_iters: int = 1000,
    shift=False,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> RecoveryReport:
    """Staged alternating minimization on disjoint measurement blocks.

    Runs ceil(c_stages * log(1/epsilon)) refinement stages, each one exact
    phase update plus one least-squares solve on a fresh block; block 0
    (including any leftover rows) feeds the initializer.  Paired ensembles
    contribute their rows interleaved so block pairing matches the original
    pairs; ``b`` must follow the same order.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if c_stages <= 0:
        raise ValueError("c_stages must be positive")
    if isinstance(ensemble, PairedEnsemble):
        rows = ensemble.interleaved_rows()
    else:
        rows = ensemble.rows
    b = np.asarray(b, dtype=float)
    if b.shape != (rows.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({rows.shape[0]},)")
    if np.any(b < 0):
        raise ValueError("intensities must be non-negative")
    init = InitKind(init)
    n = rows.shape[1]
    total = rows.shape[0]
    stages = ceil(c_stages * log(1.0 / epsilon))
    blocks = stages + 1
    if total // blocks < n:
        raise ValueError(
            f"resampled schedule needs at least {blocks * n} measurements "
            f"({blocks} blocks of >= {n}); got {total}"
        )
    bounds = _block_bounds(total, blocks)
    lo, hi = bounds[0]
    report0 = _init_from_block(
        rows[lo:hi], b[lo:hi], init, seed, power_tol, power_max_iters, shift
    )
    x = report0.estimate
    if callback is not None:
        callback(0, x)
    trace: list = []
    converged = True
    for t, (lo, hi) in enumerate(bounds[1:], start=1):
        block_rows = rows[lo:hi]
        sqrt_b = np.sqrt(b[lo:hi])
        z = block_rows.conj() @ x
        rhs = sqrt_b * phase_op(z)
        op = MatrixOperator(block_rows)
        x, info = cgls(op.apply, op.adjoint, rhs, tol=tol, x0=x)
        if info != 0:
            converged = False
        obj = float(np.linalg.norm(block_rows.conj() @ x - rhs) ** 2)
        trace.append((t, obj))
        if callback is not None:
            callback(t, x)
    return RecoveryReport(
        estimate=x,
        lambda_hat=report0.lambda_hat,
        iterations=stages,
        trace=trace,
        converged=converged,
    )


def multi_init_select(
    candidates: Sequence[tuple],
    op: MeasurementOperator,
    b,
) -> tuple:
    """Pick the candidate with the smallest phase-consistency residual.

    The score is ||A x - Diag(sqrt(b)) Ph(A x)||^2; ties keep the earliest
    candidate.
    """
    if len(candidates) == 0:
        raise ValueError("no candidates to select from")
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise ValueError("intensities must be non-negative")
    sqrt_b = np.sqrt(b)
    best = None
    best_score = np.inf
    for kind, vec in candidates:
        z = np.asarray(op.apply(vec), dtype=np.complex128)
        score = float(np.linalg.norm(z - sqrt_b * phase_op(z)) ** 2)
        if score < best_score:
            best = (kind, vec)
            best_score = score
    return best
