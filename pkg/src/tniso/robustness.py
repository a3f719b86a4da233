"""Perturbed encodings: measuring deviations and bounding iterated errors.

The perturbation size of an almost-isometric encoding is the worst
trace-norm deviation over states. Since the deviation map is linear and the
trace norm convex, pure states attain the supremum, so estimation samples
pure states and refines locally; because sampling only lower-bounds, an
operator-basis induced-norm upper bound is reported alongside and bound
checks must consume the upper end of the bracket.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, Superoperator, cesaro_projector, compose
from .codes import IsometricEncoding, PerturbedEncoding
from .errors import ContractViolation
from .opcore import as_matrix, trace_norm
from .sampling import random_density, random_pure_state


@dataclass(eq=False)
class EpsilonEstimate:
    """Bracket on the perturbation size of an almost-isometric encoding.

    ``epsilon`` is the best sampled value (a lower bound on the true
    supremum) and equals the deviation of ``witness_state`` exactly;
    ``upper_bound`` dominates the supremum.
    """

    epsilon: float
    witness_state: np.ndarray
    upper_bound: float
    samples: int
    refine_steps: int
    seed: int


def _deviation_superoperator(perturbed, nominal: IsometricEncoding) -> Superoperator:
    if isinstance(perturbed, PerturbedEncoding):
        perturbed = perturbed.superoperator()
    nom = nominal.superoperator()
    if (perturbed.dim_in, perturbed.dim_out) != (nom.dim_in, nom.dim_out):
        raise ContractViolation("perturbed and nominal encodings differ in dimensions")
    return Superoperator(nom.dim_in, nom.dim_out, perturbed.matrix - nom.matrix)


def estimate_epsilon(
    perturbed,
    nominal: IsometricEncoding,
    samples: int = 200,
    refine_steps: int = 200,
    seed: int = 0,
) -> EpsilonEstimate:
    """Estimate the worst-state trace-norm deviation from a nominal encoding.

    Random pure-state sampling followed by accept-if-better coordinate
    refinement of the best state vector. The returned ``epsilon`` is
    recomputed from the witness at emission.
    """
    delta = _deviation_superoperator(perturbed, nominal)
    d = nominal.dim_logical
    rng = np.random.default_rng(seed)

    def value(v):
        return trace_norm(delta(np.outer(v, v.conj())))

    best_v = random_pure_state(d, rng)
    best = value(best_v)
    for _ in range(samples - 1):
        v = random_pure_state(d, rng)
        val = value(v)
        if val > best:
            best, best_v = val, v
    step = 0.3
    for _ in range(refine_steps):
        prop = best_v + step * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
        prop /= np.linalg.norm(prop)
        val = value(prop)
        if val > best:
            best, best_v = val, prop
        else:
            step *= 0.95

    upper = 0.0
    for a in range(d):
        for b in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[a, b] = 1.0
            upper += trace_norm(delta(unit))
    witness = np.outer(best_v, best_v.conj())
    return EpsilonEstimate(
        epsilon=trace_norm(delta(witness)),
        witness_state=witness,
        upper_bound=float(upper),
        samples=samples,
        refine_steps=refine_steps,
        seed=seed,
    )


@dataclass(eq=False)
class SimulationTrace:
    """States and error bookkeeping for iterated noise-plus-recovery runs.

    ``errors[i]`` is the trace-norm distance of the i-th iterate from the
    initial state on the physical space; ``decoded_errors`` measures decoded
    logical states when an encoding was supplied. ``alpha_estimates[i]`` is
    the per-step contraction ratio of the residual trajectory (the part of
    each iterate outside the fixed-point set of the round map); skipped
    steps hold NaN. Bound arrays have length n+1.
    """

    states: list
    errors: np.ndarray
    decoded_errors: np.ndarray | None
    alpha_estimates: np.ndarray
    alpha_max: float | None
    epsilon: float | None
    linear_bound: np.ndarray | None
    geometric_bound: float | None

    @property
    def steps(self) -> int:
        return len(self.errors) - 1


def simulate_iterated(
    channel: KrausChannel,
    recovery: KrausChannel,
    rho0,
    n: int,
    encoding: IsometricEncoding | None = None,
    epsilon: float | None = None,
) -> SimulationTrace:
    """Iterate recovery-after-channel from an initial state for n rounds.

    The residual used for contraction estimates is the deviation of each
    iterate from its projection onto the fixed points of the round map;
    ratios are skipped once residuals fall below 1e-12.
    """
    if n < 1:
        raise ContractViolation("need at least one iteration")
    rho0 = as_matrix(rho0)
    loop = compose(recovery, channel)
    if loop.dim_in != loop.dim_out or rho0.shape != (loop.dim_in, loop.dim_in):
        raise ContractViolation("channel, recovery, and state dimensions must agree")

    p_fix = cesaro_projector(loop, method="spectral")
    states = [rho0]
    for _ in range(n):
        states.append(loop(states[-1]))

    errors = np.array([trace_norm(rho0 - s) for s in states])
    decoded = None
    if encoding is not None:
        logical = [encoding.decode(s) for s in states]
        decoded = np.array([trace_norm(logical[0] - l) for l in logical])

    residual_norms = [trace_norm(s - p_fix(s)) for s in states]
    alphas = np.full(n, np.nan)
    for i in range(n):
        if residual_norms[i] >= 1e-12:
            alphas[i] = residual_norms[i + 1] / residual_norms[i]
    finite = alphas[np.isfinite(alphas)]
    alpha_max = float(finite.max()) if finite.size else None

    linear = None
    geometric = None
    if epsilon is not None:
        linear = epsilon * np.arange(n + 1, dtype=float)
        if alpha_max is not None and alpha_max < 1.0:
            geometric = epsilon / (1.0 - alpha_max)
    return SimulationTrace(
        states=states,
        errors=errors,
        decoded_errors=decoded,
        alpha_estimates=alphas,
        alpha_max=alpha_max,
        epsilon=epsilon,
        linear_bound=linear,
        geometric_bound=geometric,
    )


def check_prop3_bound(trace: SimulationTrace, epsilon: float, slack: float = 1e-6):
    """Check the linear accumulation bound error_n <= n * epsilon.

    ``epsilon`` must be a certified per-round bound (the upper end of an
    estimate bracket), not a sampled lower bound. Returns (ok, margin)
    with margin = min over n of (n * epsilon - error_n).
    """
    n = np.arange(len(trace.errors), dtype=float)
    margins = n * epsilon - trace.errors
    return bool((trace.errors <= n * epsilon + slack).all()), float(margins.min())


@dataclass(eq=False)
class GeometricBoundResult:
    applicable: bool
    ok: bool | None
    alpha_max: float | None
    bound: float | None


def check_geometric_bound(
    trace: SimulationTrace, epsilon: float, slack: float = 1e-6
) -> GeometricBoundResult:
    """Check errors against epsilon / (1 - alpha) for strictly contractive loops.

    Not applicable when the observed contraction factor reaches 1 (or no
    residual steps were measurable).
    """
    if trace.alpha_max is None or trace.alpha_max >= 1.0:
        return GeometricBoundResult(False, None, trace.alpha_max, None)
    bound = epsilon / (1.0 - trace.alpha_max)
    ok = bool((trace.errors <= bound + slack).all())
    return GeometricBoundResult(True, ok, trace.alpha_max, bound)


def perturbed_encoding_correctability(
    perturbed: PerturbedEncoding,
    channel: KrausChannel,
    recovery: KrausChannel,
    horizon: int = 20,
    tol_: float = 1e-8,
    seed: int = 0,
    verify_states: int = 8,
):
    """Check that exact-model correction never amplifies encoding errors.

    The nominal code must be fixed by recovery-after-channel; then each
    round acts on the perturbation alone and trace-norm contraction keeps
    every iterate within the certified perturbation size of the nominal
    image. Returns (ok, max error, per-round max errors).
    """
    from .analysis import is_fixed

    nominal = perturbed.nominal
    loop = compose(recovery, channel)
    fixed_ok, fixed_res = is_fixed(nominal, loop, max(tol_, 1e-8))
    if not fixed_ok:
        raise ContractViolation(
            f"nominal code is not fixed by the correction loop (residual {fixed_res:.3e})"
        )
    rng = np.random.default_rng(seed)
    d = nominal.dim_logical
    test_states = [np.eye(d, dtype=complex) / d]
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        test_states.append(e)
    for i in range(verify_states):
        if i % 2 == 0:
            v = random_pure_state(d, rng)
            test_states.append(np.outer(v, v.conj()))
        else:
            test_states.append(random_density(d, rng))

    per_round = np.zeros(horizon + 1)
    for rho in test_states:
        target = nominal.encode(rho)
        x = perturbed.apply(rho)
        per_round[0] = max(per_round[0], trace_norm(x - target))
        for k in range(1, horizon + 1):
            x = loop(x)
            per_round[k] = max(per_round[k], trace_norm(x - target))
    max_err = float(per_round.max())
    return max_err <= perturbed.epsilon + tol_, max_err, per_round
