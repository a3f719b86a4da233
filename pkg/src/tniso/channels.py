"""CPTP maps in Kraus form and their superoperator matrices.

The superoperator convention is fixed package-wide: COLUMN-STACKING.
``vec(X)`` stacks the columns of X, so ``vec(A X B) = (B^T kron A) vec(X)``
and a channel with Kraus operators ``{M_k}`` has superoperator
``sum_k conj(M_k) kron M_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, ConvergenceError
from .opcore import as_matrix, support_projector, trace_norm
from . import tolerances as tol


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization of a matrix."""
    return np.asarray(x, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec`."""
    cols = rows if cols is None else cols
    return np.asarray(v, dtype=complex).reshape((rows, cols), order="F")


def transpose_superoperator(d: int) -> np.ndarray:
    """Matrix K with K vec(X) = vec(X^T) for d x d operators."""
    k = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            k[a + d * b, b + d * a] = 1.0
    return k


@dataclass(eq=False)
class Superoperator:
    """Matrix form of a linear map on operator space.

    ``matrix`` has shape (dim_out**2, dim_in**2) in the column-stacking
    convention. Composition is plain matrix multiplication.
    """

    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        expected = (self.dim_out**2, self.dim_in**2)
        if self.matrix.shape != expected:
            raise ContractViolation(
                f"superoperator matrix shape {self.matrix.shape}, expected {expected}"
            )

    @classmethod
    def identity(cls, dim: int) -> "Superoperator":
        return cls(dim, dim, np.eye(dim * dim, dtype=complex))

    @classmethod
    def from_map(cls, fn, dim_in: int, dim_out: int) -> "Superoperator":
        """Build the matrix of a complex-linear map by probing matrix units."""
        m = np.zeros((dim_out**2, dim_in**2), dtype=complex)
        for b in range(dim_in):
            for a in range(dim_in):
                unit = np.zeros((dim_in, dim_in), dtype=complex)
                unit[a, b] = 1.0
                m[:, b * dim_in + a] = vec(fn(unit))
        return cls(dim_in, dim_out, m)

    def apply(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.dim_in, self.dim_in):
            raise ContractViolation(
                f"operand shape {x.shape}, expected ({self.dim_in}, {self.dim_in})"
            )
        return unvec(self.matrix @ vec(x), self.dim_out)

    def __call__(self, x) -> np.ndarray:
        return self.apply(x)

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        if self.dim_in != other.dim_out:
            raise ContractViolation("superoperator dimension mismatch in composition")
        return Superoperator(other.dim_in, self.dim_out, self.matrix @ other.matrix)

    def power(self, k: int) -> "Superoperator":
        if self.dim_in != self.dim_out:
            raise ContractViolation("powers require a square superoperator")
        return Superoperator(
            self.dim_in, self.dim_out, np.linalg.matrix_power(self.matrix, k)
        )


@dataclass(eq=False)
class KrausChannel:
    """A CPTP map given by a nonempty list of Kraus operators.

    Complete positivity is structural; trace preservation is verified at
    construction (``sum_k M_k^dag M_k = I`` within ``tp_tol``).
    """

    kraus: list[np.ndarray]
    tp_tol: float = tol.TP_TOL

    def __post_init__(self):
        if len(self.kraus) == 0:
            raise ContractViolation("Kraus list must be nonempty")
        self.kraus = [as_matrix(k) for k in self.kraus]
        shape = self.kraus[0].shape
        if any(k.shape != shape for k in self.kraus):
            raise ContractViolation("Kraus operators must share one shape")
        self._stack = np.stack(self.kraus)
        residual = self.tp_defect()
        if residual > self.tp_tol:
            raise ContractViolation(f"not trace preserving (defect {residual:.3e})")

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def tp_defect(self) -> float:
        acc = np.einsum("kij,kil->jl", self._stack.conj(), self._stack)
        return float(np.abs(acc - np.eye(self.dim_in)).max())

    @classmethod
    def identity(cls, dim: int) -> "KrausChannel":
        return cls([np.eye(dim, dtype=complex)])

    @classmethod
    def from_unitary(cls, u) -> "KrausChannel":
        return cls([as_matrix(u)])

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        if rho.shape != (self.dim_in, self.dim_in):
            raise ContractViolation(
                f"state shape {rho.shape}, expected ({self.dim_in}, {self.dim_in})"
            )
        return np.einsum("kij,jl,kml->im", self._stack, rho, self._stack.conj())

    def __call__(self, rho) -> np.ndarray:
        return self.apply(rho)

    def superoperator(self) -> Superoperator:
        m = sum(np.kron(k.conj(), k) for k in self.kraus)
        return Superoperator(self.dim_in, self.dim_out, m)

    def prune(self, norm_tol: float) -> "KrausChannel":
        """Drop Kraus operators with Frobenius norm below ``norm_tol``.

        Pruning is never automatic: it changes the TP residual.
        """
        kept = [k for k in self.kraus if np.linalg.norm(k) >= norm_tol]
        return KrausChannel(kept if kept else [self.kraus[0]], tp_tol=self.tp_tol)


def compose(e2: KrausChannel, e1: KrausChannel) -> KrausChannel:
    """The channel e2 after e1, with Kraus products {M2_j M1_i}."""
    if e2.dim_in != e1.dim_out:
        raise ContractViolation(
            f"cannot compose: {e2.dim_in} != {e1.dim_out} (inner dims)"
        )
    ops = [k2 @ k1 for k2 in e2.kraus for k1 in e1.kraus]
    return KrausChannel(ops)


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ContractViolation("weights must be a nonempty 1-D list")
    if w.min() < 0:
        raise ContractViolation("weights must be nonnegative")
    if abs(w.sum() - 1.0) > tol.WEIGHT_SUM_TOL:
        raise ContractViolation(f"weights sum to {w.sum()!r}, expected 1")
    return w


def convex_mix(weights, channels: list[KrausChannel]) -> KrausChannel:
    """Convex mixture sum_k p_k E_k as one channel, Kraus {sqrt(p_k) M_ki}."""
    w = _check_weights(weights)
    if len(channels) != w.size:
        raise ContractViolation("one weight per channel required")
    dims = {(c.dim_in, c.dim_out) for c in channels}
    if len(dims) != 1:
        raise ContractViolation("mixed channels must share dimensions")
    ops = [np.sqrt(p) * k for p, c in zip(w, channels) for k in c.kraus]
    return KrausChannel(ops)


def power_mix(channel: KrausChannel, p) -> Superoperator:
    """Superoperator of sum_i p_i E^i, with p_0 weighting the identity."""
    w = _check_weights(p)
    if channel.dim_in != channel.dim_out:
        raise ContractViolation("powers require a square channel")
    s = channel.superoperator().matrix
    acc = np.zeros_like(s)
    term = np.eye(s.shape[0], dtype=complex)
    for p_i in w:
        acc = acc + p_i * term
        term = s @ term
    return Superoperator(channel.dim_in, channel.dim_out, acc)


def _spectral_fixed_point_projector(s: np.ndarray, kernel_tol: float) -> np.ndarray:
    a = s - np.eye(s.shape[0])
    u, sv, vh = np.linalg.svd(a)
    keep = sv < kernel_tol
    if not keep.any():
        # every CPTP map has a fixed point; an empty kernel means the
        # cutoff was too tight for this matrix
        raise ConvergenceError(
            "no fixed points found within kernel tolerance", residual=float(sv.min())
        )
    right = vh.conj().T[:, keep]
    left = u[:, keep]
    return right @ np.linalg.solve(left.conj().T @ right, left.conj().T)


def cesaro_projector(
    channel: KrausChannel,
    method: str = "spectral",
    max_n: int = 2**48,
    tol_: float = 1e-8,
    kernel_tol: float = tol.KERNEL_TOL,
) -> Superoperator:
    """Projector onto the fixed points of a square channel.

    The limit of averaged channel powers ``(1/(N+1)) sum_{i<=N} E^i``
    projects onto the fixed-point set of E.

    ``spectral`` pairs the kernels of (S - I) and its adjoint into an
    idempotent projector (the eigenvalue-1 spectral projector).
    ``iterative`` evaluates the partial averages exactly at doubling N via
    ``sum_{i<2N} S^i = (I + S^N) sum_{i<N} S^i`` and stops once successive
    averages differ by less than ``tol_``. Each doubling halves the error
    until rounding in the repeated squaring takes over near 1e-8; past
    that floor the iteration aborts with the best residual reached.
    """
    if channel.dim_in != channel.dim_out:
        raise ContractViolation("fixed points require a square channel")
    s = channel.superoperator().matrix
    if method == "spectral":
        p = _spectral_fixed_point_projector(s, kernel_tol)
        return Superoperator(channel.dim_in, channel.dim_out, p)
    if method != "iterative":
        raise ContractViolation(f"unknown method {method!r}")

    avg = (np.eye(s.shape[0], dtype=complex) + s) / 2.0  # N = 1 partial average
    power = s @ s                                        # S^(N+1) for current N+1=2
    n_terms = 2
    best = float("inf")
    while n_terms <= max_n:
        nxt = (avg + power @ avg) / 2.0
        delta = float(np.abs(nxt - avg).max())
        avg = nxt
        n_terms *= 2
        if delta < tol_:
            return Superoperator(channel.dim_in, channel.dim_out, avg)
        if delta < best:
            best = delta
        elif delta > 4.0 * best:
            break  # rounding noise dominates; no further progress possible
        power = power @ power
    raise ConvergenceError(
        f"Cesaro averaging did not reach {tol_:g} within {max_n} terms",
        residual=best,
    )


def check_support_invariance(channel: KrausChannel, rho_bar, tol_: float = 1e-10):
    """Whether the channel maps states supported on supp(rho_bar) into it.

    Checks that every Kraus operator has a vanishing block from the support
    into its orthogonal complement. Returns (ok, max block residual).
    """
    if channel.dim_in != channel.dim_out:
        raise ContractViolation("support invariance requires a square channel")
    p = support_projector(rho_bar)
    comp = np.eye(channel.dim_in) - p
    residual = max(float(np.abs(comp @ k @ p).max()) for k in channel.kraus)
    return residual <= tol_, residual


def trace_norm_contraction_witness(
    channel: KrausChannel,
    samples: int,
    seed: int = 0,
    state_sampler=None,
) -> float:
    """Max observed ratio ||E(r1)-E(r2)||_1 / ||r1-r2||_1 over random pairs.

    CPTP maps never increase trace distance, so the result must not exceed
    1 beyond rounding. Pairs closer than 1e-12 in trace norm are resampled.
    ``state_sampler(rng) -> ndarray`` overrides the default Haar-mixed
    sampler (useful for restricting to encoded states).
    """
    from .sampling import random_density

    rng = np.random.default_rng(seed)
    if state_sampler is None:
        state_sampler = lambda r: random_density(channel.dim_in, r)
    worst = 0.0
    for _ in range(samples):
        for _attempt in range(100):
            r1, r2 = state_sampler(rng), state_sampler(rng)
            dist = trace_norm(r1 - r2)
            if dist > 1e-12:
                break
        else:
            raise ConvergenceError("could not sample a non-degenerate state pair")
        ratio = trace_norm(channel(r1) - channel(r2)) / dist
        worst = max(worst, ratio)
    return worst
