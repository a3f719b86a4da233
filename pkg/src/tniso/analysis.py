"""Structure detection, code classification, and recovery construction.

``detect_structure`` decides whether a linear state encoding is trace-norm
isometric and, if so, recovers its subsystem decomposition, cofactor state,
and (anti)unitary flavor. On top of it sit the code classifiers
(fixed / preserved / noiseless / correctable / protectable) and the recovery
builders (cofactor time reversal and cofactor replacement).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (
    KrausChannel,
    Superoperator,
    cesaro_projector,
    check_support_invariance,
    compose,
)
from .codes import IsometricEncoding, SubsystemDecomposition
from .errors import ContractViolation, NotCorrectableError, NumericError
from .opcore import (
    eigh_clamped,
    hermitian_basis,
    sqrt_pinv_psd,
    sqrt_psd,
    trace_norm,
)
from . import tolerances as tol


@dataclass(eq=False)
class StructureReport:
    """Outcome of subsystem-structure detection.

    When ``found``, the encoding reconstructs as
    ``basis (rho kron cofactor (+) 0) basis^dag`` (with ``rho`` transposed
    first when ``conjugation == 'anti-unitary'``), the decomposition is
    minimal, and ``residual`` is the max trace-norm reconstruction error
    over the verification states. When not found, ``stage`` names the
    first failing step.
    """

    found: bool
    stage: str
    residual: float
    conjugation: str | None = None
    weights: np.ndarray | None = None
    cofactor: np.ndarray | None = None
    decomposition: SubsystemDecomposition | None = None

    def encoding(self) -> IsometricEncoding:
        if not self.found:
            raise ContractViolation(f"no structure found (failed at {self.stage!r})")
        return IsometricEncoding(self.decomposition, self.cofactor)


def _orthonormal_completion(block: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full unitary."""
    d, n = block.shape
    if n == d:
        return block
    u, _, _ = np.linalg.svd(block)
    return np.concatenate([block, u[:, n:]], axis=1)


def _verification_states(d: int, count: int, rng: np.random.Generator):
    from .sampling import random_density, random_pure_state

    states = []
    for i in range(count):
        if i % 2 == 0:
            v = random_pure_state(d, rng)
            states.append(np.outer(v, v.conj()))
        else:
            states.append(random_density(d, rng, rank=int(rng.integers(1, d + 1))))
    return states


def _assemble_candidate(rho0_vecs, weights, offdiag_images, d_q, d_p, adjoint: bool):
    """Build the candidate block basis w_{j,m} from the reference image.

    Column m of ``rho0_vecs`` is the cofactor-weight-m eigenvector of the
    first state image; images of the (0, j) matrix units transport it to
    logical slot j. ``adjoint`` selects the transport direction, which is
    what distinguishes the unitary from the anti-unitary flavor.
    """
    r = weights.size
    cols = [rho0_vecs[:, m] for m in range(r)]
    blocks = [np.stack(cols, axis=1)]
    for j in range(1, d_q):
        x = offdiag_images[j - 1]
        x = x.conj().T if adjoint else x
        wj = np.stack([x @ rho0_vecs[:, m] / weights[m] for m in range(r)], axis=1)
        blocks.append(wj)
    block = np.concatenate(blocks, axis=1)  # (s, m) columns, row-major
    gram = block.conj().T @ block
    gram_defect = float(np.abs(gram - np.eye(d_q * r)).max())
    if gram_defect > 0.5:
        # hopeless candidate; near-isometries proceed so the verification
        # stage can report an honest trace-norm residual
        return None, gram_defect
    # polar correction makes the block exactly isometric
    u, _, vh = np.linalg.svd(block, full_matrices=False)
    return u @ vh, gram_defect


def detect_structure(
    phi: Superoperator,
    detection_tol: float | None = None,
    seed: int = 0,
    verify_samples: int = 20,
) -> StructureReport:
    """Detect the subsystem structure of a linear state encoding.

    The map must be Hermiticity- and trace-preserving. Detection proceeds
    by (1) imaging the standard logical basis states, (2) checking pairwise
    orthogonal supports, (3) checking a common spectrum, (4) aligning the
    eigenbases across logical slots through the off-diagonal matrix-unit
    images, (5) assembling the basis unitary and cofactor, and (6) verifying
    the reconstruction on random pure and mixed states under both the
    unitary and the anti-unitary reading. Never raises on well-formed
    input; failures come back as ``found=False`` with the failing stage.
    """
    dtol = tol.DETECTION_TOL if detection_tol is None else detection_tol
    d_q, d_p = phi.dim_in, phi.dim_out
    rng = np.random.default_rng(seed)

    # stage: input map must preserve Hermiticity and trace
    defect = 0.0
    for b in hermitian_basis(d_q):
        img = phi(b)
        defect = max(
            defect,
            float(np.abs(img - img.conj().T).max()),
            abs(complex(np.trace(img)) - complex(np.trace(b))),
        )
    if defect > 1e-8:
        return StructureReport(False, "input_map", defect)

    # stage: basis-state images must be states
    images = []
    for j in range(d_q):
        unit = np.zeros((d_q, d_q), dtype=complex)
        unit[j, j] = 1.0
        images.append(phi(unit))
    worst = 0.0
    spectra, vecs = [], []
    for img in images:
        w, v = np.linalg.eigh((img + img.conj().T) / 2)
        worst = max(worst, max(0.0, -float(w.min())))
        spectra.append(w[::-1])
        vecs.append(v[:, ::-1])
    if worst > max(dtol, 1e-10):
        return StructureReport(False, "state_images", worst)

    # stage: pairwise orthogonal supports
    ortho = 0.0
    for j in range(d_q):
        for k in range(j + 1, d_q):
            ortho = max(ortho, abs(complex(np.trace(images[j] @ images[k]))))
    if ortho > dtol:
        return StructureReport(False, "orthogonality", ortho)

    # stage: common spectrum across the images
    spread = max(
        float(np.abs(spectra[j] - spectra[0]).max()) for j in range(d_q)
    )
    if spread > max(dtol, 1e-9):
        return StructureReport(False, "spectrum", spread)

    weights = np.maximum(spectra[0], 0.0)
    cut = tol.RANK_TOL * max(float(weights.max()), 1e-300)
    weights = weights[weights > cut]
    if weights.size == 0 or weights.size * d_q > d_p:
        return StructureReport(False, "spectrum", float(spread))
    weights = weights / weights.sum()
    r = weights.size

    # stage: align eigenbases across logical slots via off-diagonal images
    offdiag = []
    for j in range(1, d_q):
        unit = np.zeros((d_q, d_q), dtype=complex)
        unit[0, j] = 1.0
        offdiag.append(phi(unit))
    rho0_vecs = vecs[0][:, :r]
    candidates = {}
    best_gram = float("inf")
    for flavor, adjoint in (("unitary", True), ("anti-unitary", False)):
        block, gram_defect = _assemble_candidate(
            rho0_vecs, weights, offdiag, d_q, d_p, adjoint
        )
        best_gram = min(best_gram, gram_defect)
        if block is not None:
            candidates[flavor] = block
        if d_q == 1:
            break
    if not candidates:
        return StructureReport(False, "alignment", best_gram)

    # stage: verification on random states, trying both conjugation flavors
    states = _verification_states(d_q, verify_samples, rng)
    tau = np.diag(weights).astype(complex)
    best = None
    for flavor, block in candidates.items():
        basis = _orthonormal_completion(block)
        try:
            dec = SubsystemDecomposition(d_q, r, d_p - d_q * r, basis)
            enc = IsometricEncoding(dec, tau)
        except ContractViolation:
            continue
        residual = 0.0
        for rho in states:
            probe = rho.T if flavor == "anti-unitary" else rho
            residual = max(residual, trace_norm(phi(rho) - enc.encode(probe)))
        if best is None or residual < best[0]:
            best = (residual, flavor, dec)
    if best is None:
        return StructureReport(False, "alignment", float("inf"))
    residual, flavor, dec = best
    if residual > dtol:
        return StructureReport(False, "verification", residual, conjugation=flavor)
    return StructureReport(
        True,
        "verified",
        residual,
        conjugation=flavor,
        weights=weights,
        cofactor=tau,
        decomposition=dec,
    )


def _encode_basis_images(phi, d_q: int):
    if isinstance(phi, IsometricEncoding):
        return [phi.encode(b) for b in hermitian_basis(d_q)]
    return [phi(b) for b in hermitian_basis(d_q)]


def is_fixed(phi, channel: KrausChannel, tol_: float = tol.DETECTION_TOL):
    """Whether every encoded operator is a fixed point of the channel.

    ``phi`` may be an encoding or a superoperator. Linearity makes the
    check on a Hermitian operator basis sufficient. Returns (ok, residual).
    """
    d_q = phi.dim_logical if isinstance(phi, IsometricEncoding) else phi.dim_in
    residual = 0.0
    for img in _encode_basis_images(phi, d_q):
        residual = max(residual, trace_norm(channel(img) - img))
    return residual <= tol_, residual


def is_preserved(
    encoding: IsometricEncoding,
    channel: KrausChannel,
    tol_: float = tol.DETECTION_TOL,
    seed: int = 0,
):
    """Whether the channel acts isometrically on the code. Returns (ok, report)."""
    composite = channel.superoperator() @ encoding.superoperator()
    report = detect_structure(composite, detection_tol=tol_, seed=seed)
    return report.found, report


@dataclass(eq=False)
class NoiselessCertificate:
    accepted: bool
    horizon: int
    power_found: list[bool]
    power_residuals: list[float]
    fixed_code: StructureReport | None
    fixed_residual: float


def noiseless_certificate(
    encoding: IsometricEncoding,
    channel: KrausChannel,
    horizon: int = 8,
    tol_: float = tol.DETECTION_TOL,
    seed: int = 0,
) -> NoiselessCertificate:
    """Certify that a code stays isometric under all powers of the channel.

    Accepts iff (a) every power up to ``horizon`` preserves the code and
    (b) projecting the code onto the channel's fixed-point set yields a
    valid encoding that the channel fixes. The finite-horizon sweep is a
    certificate, not a proof; (b) is the load-bearing check, and on
    acceptance the projected code realizes a common fixed decomposition.
    """
    if channel.dim_in != channel.dim_out:
        raise ContractViolation("noiseless certificate requires a square channel")
    s_e = channel.superoperator()
    s_phi = encoding.superoperator()
    power = s_phi
    found, residuals = [], []
    for _k in range(horizon):
        power = s_e @ power
        rep = detect_structure(power, detection_tol=tol_, seed=seed)
        found.append(rep.found)
        residuals.append(rep.residual)
    p_inf = cesaro_projector(channel, method="spectral")
    c_inf = p_inf @ s_phi
    rep_inf = detect_structure(c_inf, detection_tol=tol_, seed=seed)
    if rep_inf.found:
        _, fixed_residual = is_fixed(c_inf, channel, tol_)
    else:
        fixed_residual = float("inf")
    accepted = all(found) and rep_inf.found and fixed_residual <= tol_
    return NoiselessCertificate(
        accepted, horizon, found, residuals, rep_inf, fixed_residual
    )


def kraus_from_map(fn, dim_in: int, dim_out: int, cp_tol: float = 1e-8):
    """Kraus operators of a CP map given as a callable, via its Choi matrix."""
    choi = np.zeros((dim_out * dim_in, dim_out * dim_in), dtype=complex)
    for a in range(dim_in):
        for b in range(dim_in):
            unit = np.zeros((dim_in, dim_in), dtype=complex)
            unit[a, b] = 1.0
            img = fn(unit)
            ref = np.zeros((dim_in, dim_in), dtype=complex)
            ref[a, b] = 1.0
            choi += np.kron(img, ref)
    choi = (choi + choi.conj().T) / 2
    w, v = np.linalg.eigh(choi)
    if w.min() < -cp_tol:
        raise NumericError(f"map is not completely positive (eigenvalue {w.min():.3e})")
    ops = []
    for k in range(w.size):
        if w[k] > max(1e-12, 1e-12 * w.max()):
            ops.append(np.sqrt(w[k]) * v[:, k].reshape(dim_out, dim_in))
    return ops


@dataclass(eq=False)
class CorrectionDetails:
    strategy_requested: str
    strategy_used: str
    fell_back: bool
    cofactor_tp_defect: float
    cofactor_recovery_defect: float
    image_report: StructureReport


def _replace_cofactor_kraus(tau: np.ndarray, d_g: int):
    w, v = eigh_clamped(tau)
    cut = tol.RANK_TOL * max(float(w.max()), 1e-300)
    eye_g = np.eye(d_g)
    return [
        np.sqrt(w[m]) * np.outer(v[:, m], eye_g[:, i])
        for m in range(w.size)
        if w[m] > cut
        for i in range(d_g)
    ]


def _cofactor_recovery(encoding, channel, img, strategy):
    """Kraus set on (image cofactor -> code cofactor) plus validation data."""
    dec = encoding.decomposition
    d_f, d_g = dec.d_f, img.decomposition.d_f
    tau = encoding.cofactor
    sigma = img.cofactor  # diagonal, full rank on the minimal image cofactor
    if strategy == "replace":
        return _replace_cofactor_kraus(tau, d_g), 0.0, 0.0, False

    # time reversal: sandwich the adjoint Kraus operators of the induced
    # cofactor channel between sqrt(tau) and the pseudo-inverse sqrt(sigma)
    v_in = dec.block_columns[:, :d_f]                      # logical slot 0, code side
    v_out = img.decomposition.block_columns[:, :d_g]       # logical slot 0, image side
    induced = lambda y: v_out.conj().T @ channel(v_in @ y @ v_in.conj().T) @ v_out
    try:
        e_fg = kraus_from_map(induced, d_f, d_g)
        sq_tau = sqrt_psd(tau)
        sq_sigma_inv = sqrt_pinv_psd(sigma)
        ops = [sq_tau @ k.conj().T @ sq_sigma_inv for k in e_fg]
        tp = sum(k.conj().T @ k for k in ops)
        tp_defect = float(np.abs(tp - np.eye(d_g)).max())
        rec_defect = trace_norm(sum(k @ sigma @ k.conj().T for k in ops) - tau)
    except NumericError:
        tp_defect = rec_defect = float("inf")
        ops = None
    if ops is None or tp_defect > 1e-8 or rec_defect > 1e-8:
        # the printed sandwich failed validation; fall back to replacement
        return _replace_cofactor_kraus(tau, d_g), tp_defect, rec_defect, True
    return ops, tp_defect, rec_defect, False


def build_correction(
    encoding: IsometricEncoding,
    channel: KrausChannel,
    strategy: str = "time_reversal",
    tol_: float = tol.DETECTION_TOL,
    seed: int = 0,
    return_details: bool = False,
):
    """Construct a CPTP recovery that makes the code a set of fixed points.

    Requires the code to be preserved by the channel; otherwise any
    recovery would have to expand trace distances, which no CPTP map can
    do, and ``NotCorrectableError`` is raised. On the image support the
    recovery undoes the logical rotation and maps the image cofactor back
    to the code cofactor (by ``time_reversal`` or ``replace``); the
    complement is routed to a fixed encoded reference state so the result
    is trace preserving everywhere.
    """
    if strategy not in ("time_reversal", "replace"):
        raise ContractViolation(f"unknown strategy {strategy!r}")
    preserved, img = is_preserved(encoding, channel, tol_, seed)
    if not preserved:
        raise NotCorrectableError(
            "code is not preserved by the channel, so no CPTP recovery exists "
            f"(detection failed at {img.stage!r} with residual {img.residual:.3e})"
        )
    if img.conjugation != "unitary":
        raise NumericError("image structure of a CP composite must be unitary-flavored")

    dec = encoding.decomposition
    d_s, d_f = dec.d_s, dec.d_f
    d_g = img.decomposition.d_f
    ops_gf, tp_defect, rec_defect, fell_back = _cofactor_recovery(
        encoding, channel, img, strategy
    )
    u1 = dec.block_columns
    w1 = img.decomposition.block_columns
    kraus = [u1 @ np.kron(np.eye(d_s), k) @ w1.conj().T for k in ops_gf]

    # complete trace preservation: route the image complement to the
    # encoded reference state of the first logical basis vector
    d_t = img.decomposition.d_p - d_s * d_g
    if d_t:
        t_cols = img.decomposition.basis[:, d_s * d_g :]
        w_tau, v_tau = eigh_clamped(encoding.cofactor)
        cut = tol.RANK_TOL * max(float(w_tau.max()), 1e-300)
        for m in range(w_tau.size):
            if w_tau[m] <= cut:
                continue
            ref = u1[:, :d_f] @ v_tau[:, m]
            for c in range(d_t):
                kraus.append(np.sqrt(w_tau[m]) * np.outer(ref, t_cols[:, c].conj()))

    recovery = KrausChannel(kraus)
    if not return_details:
        return recovery
    details = CorrectionDetails(
        strategy_requested=strategy,
        strategy_used="replace" if fell_back else strategy,
        fell_back=fell_back,
        cofactor_tp_defect=tp_defect,
        cofactor_recovery_defect=rec_defect,
        image_report=img,
    )
    return recovery, details


def derive_protectable_code(
    encoding: IsometricEncoding,
    channel: KrausChannel,
    strategy: str = "time_reversal",
    tol_: float = tol.DETECTION_TOL,
    seed: int = 0,
):
    """The image code of a preserved encoding, fixed by channel-then-recovery.

    Returns (image structure report, recovery, residual): applying the
    recovery *before* the channel fixes every operator in the image code's
    span, so the image code is protectable with the same recovery that
    corrects the original.
    """
    recovery = build_correction(encoding, channel, strategy, tol_, seed)
    composite = channel.superoperator() @ encoding.superoperator()
    img = detect_structure(composite, detection_tol=tol_, seed=seed)
    loop = compose(channel, recovery)
    residual = 0.0
    for b in hermitian_basis(encoding.dim_logical):
        x = composite(b)
        residual = max(residual, trace_norm(loop(x) - x))
    return img, recovery, residual


def check_ns_factorization(
    channel: KrausChannel,
    dec: SubsystemDecomposition,
    tol_: float = tol.DETECTION_TOL,
    logical_unitary=None,
):
    """Whether the channel restricted to the block acts trivially on the
    logical factor.

    Requires the channel to map states on the logical-cofactor block into
    the block. Each restricted Kraus operator is split against an
    orthonormal product operator basis whose logical anchor is the
    identity; acceptance means every non-identity logical component
    vanishes within ``tol_``. Returns (ok, cofactor channel or None,
    residual). ``logical_unitary`` is absorbed (inverted) before the
    split, for channels expected to act as a known logical rotation.
    """
    d_s, d_f = dec.d_s, dec.d_f
    n = d_s * d_f
    rho_bar = dec.embed(np.eye(n) / n)
    ok, res = check_support_invariance(channel, rho_bar, max(tol_, 1e-9))
    if not ok:
        raise ContractViolation(
            f"channel does not leave the block invariant (residual {res:.3e})"
        )
    u1 = dec.block_columns
    residual = 0.0
    cof_ops = []
    for k in channel.kraus:
        m = u1.conj().T @ k @ u1
        if logical_unitary is not None:
            m = np.kron(np.asarray(logical_unitary).conj().T, np.eye(d_f)) @ m
        t = m.reshape(d_s, d_f, d_s, d_f)
        # normalized partial trace over the logical factor
        g = np.einsum("sasb->ab", t) / d_s
        residual = max(residual, float(np.linalg.norm(m - np.kron(np.eye(d_s), g))))
        cof_ops.append(g)
    accepted = residual <= tol_
    if not accepted:
        return False, None, residual
    cof = KrausChannel(cof_ops, tp_tol=max(tol.TP_TOL, 10 * residual + tol.TP_TOL))
    return True, cof, residual


@dataclass(eq=False)
class UnitaryCorrectabilityResult:
    unitarily_correctable: bool
    unitarily_recoverable: bool
    unitary: np.ndarray | None
    residual: float
    code_support_dim: int
    image_support_dim: int


def _paired_unitary(target_cols: np.ndarray, source_cols: np.ndarray, d_p: int):
    """Unitary mapping each source column onto the matching target column."""
    v = target_cols @ source_cols.conj().T
    t_comp = _orthonormal_completion(target_cols)[:, target_cols.shape[1] :]
    s_comp = _orthonormal_completion(source_cols)[:, source_cols.shape[1] :]
    return v + t_comp @ s_comp.conj().T


def unitary_correctability(
    encoding: IsometricEncoding,
    channel: KrausChannel,
    tol_: float = tol.DETECTION_TOL,
    seed: int = 0,
) -> UnitaryCorrectabilityResult:
    """Decide whether a unitary suffices to correct (or only recover) the code.

    If the image support is no larger than the code support, the pairing
    unitary pulls the image back inside the code's own cofactor space and
    the noise-plus-unitary loop is checked to act trivially on the logical
    factor: the code is then unitarily correctable (stable under
    iteration). If the image support is strictly larger, the pairing
    unitary only restores the code into a non-minimal extension of its
    decomposition: unitarily recoverable, with no guarantee under repeated
    noise-correction cycles.
    """
    preserved, img = is_preserved(encoding, channel, tol_, seed)
    if not preserved:
        raise NotCorrectableError("unitary correctability requires a preserved code")
    enc_min = encoding.minimalize()
    d_s = enc_min.decomposition.d_s
    r_f = enc_min.decomposition.d_f
    d_g = img.decomposition.d_f
    d_p = enc_min.decomposition.d_p
    code_dim, image_dim = d_s * r_f, d_s * d_g
    w1 = img.decomposition.block_columns
    u_min = enc_min.decomposition.block_columns

    if image_dim <= code_dim:
        # pair the image grid with the leading cofactor slots of the code
        target = np.stack(
            [u_min[:, s * r_f + a] for s in range(d_s) for a in range(d_g)], axis=1
        )
        v = _paired_unitary(target, w1, d_p)
        loop = compose(KrausChannel.from_unitary(v), channel)
        try:
            ns_ok, _, ns_res = check_ns_factorization(
                loop, enc_min.decomposition, tol_
            )
        except ContractViolation:
            ns_ok, ns_res = False, float("inf")
        return UnitaryCorrectabilityResult(
            ns_ok, True, v, ns_res, code_dim, image_dim
        )

    # image larger than the code: extend the cofactor grid into the
    # remainder so the image fits, then pair
    extra = d_g - r_f
    comp = _orthonormal_completion(u_min)[:, code_dim:]
    if extra * d_s > comp.shape[1]:
        raise NumericError("image support exceeds the physical space")  # unreachable
    grid = []
    for s in range(d_s):
        for a in range(d_g):
            if a < r_f:
                grid.append(u_min[:, s * r_f + a])
            else:
                grid.append(comp[:, (a - r_f) * d_s + s])
    target = np.stack(grid, axis=1)
    v = _paired_unitary(target, w1, d_p)
    # verify the loop restores an encoding on the extended decomposition
    sigma_ext = np.diag(img.weights).astype(complex)
    residual = 0.0
    for b in hermitian_basis(d_s):
        lhs = v @ channel(encoding.encode(b)) @ v.conj().T
        rhs = target @ np.kron(b, sigma_ext) @ target.conj().T
        residual = max(residual, trace_norm(lhs - rhs))
    return UnitaryCorrectabilityResult(
        False, residual <= tol_, v, residual, code_dim, image_dim
    )


@dataclass(eq=False)
class ClassificationReport:
    """Verdict table for one (code, channel) pair.

    Emitted reports always satisfy: fixed implies preserved; preserved,
    correctable, and completely_correctable coincide; unitarily_correctable
    implies correctable. ``protectable`` certifies that the image code is
    fixed by channel-after-recovery. ``horizon`` is the power sweep depth
    of the noiseless certificate.
    """

    fixed: bool
    preserved: bool
    noiseless_certificate: bool
    correctable: bool
    completely_correctable: bool
    protectable: bool
    unitarily_correctable: bool
    unitarily_recoverable: bool
    horizon: int
    residuals: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "fixed": self.fixed,
            "preserved": self.preserved,
            "noiseless_certificate": self.noiseless_certificate,
            "correctable": self.correctable,
            "completely_correctable": self.completely_correctable,
            "protectable": self.protectable,
            "unitarily_correctable": self.unitarily_correctable,
            "unitarily_recoverable": self.unitarily_recoverable,
            "horizon": self.horizon,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }


def classify(
    encoding: IsometricEncoding,
    channel: KrausChannel,
    horizon: int = 8,
    tol_: float = tol.DETECTION_TOL,
    seed: int = 0,
    strategy: str = "time_reversal",
) -> ClassificationReport:
    """Run the full classification pipeline for one code and channel."""
    fixed_ok, fixed_res = is_fixed(encoding, channel, tol_)
    preserved, rep = is_preserved(encoding, channel, tol_, seed)
    residuals = {"fixed": fixed_res, "preservation": rep.residual}

    if not preserved:
        cert_ok = False
        residuals["noiseless_power_max"] = rep.residual
        return ClassificationReport(
            fixed=fixed_ok,
            preserved=False,
            noiseless_certificate=cert_ok,
            correctable=False,
            completely_correctable=False,
            protectable=False,
            unitarily_correctable=False,
            unitarily_recoverable=False,
            horizon=horizon,
            residuals=residuals,
        )

    recovery = build_correction(encoding, channel, strategy, tol_, seed)
    _, corr_res = is_fixed(encoding, compose(recovery, channel), tol_)
    residuals["correction"] = corr_res

    # correctability means noiselessness under the corrected loop; the
    # certificate witnesses that constructively
    cert = noiseless_certificate(encoding, compose(recovery, channel), horizon, tol_, seed)
    residuals["noiseless_power_max"] = max(cert.power_residuals)
    residuals["noiseless_fixed_code"] = cert.fixed_residual

    _, _, prot_res = derive_protectable_code(encoding, channel, strategy, tol_, seed)
    residuals["protection"] = prot_res

    uc = unitary_correctability(encoding, channel, tol_, seed)
    residuals["unitary"] = uc.residual

    return ClassificationReport(
        fixed=fixed_ok,
        preserved=True,
        noiseless_certificate=cert.accepted,
        correctable=True,
        completely_correctable=True,
        protectable=prot_res <= tol_,
        unitarily_correctable=uc.unitarily_correctable,
        unitarily_recoverable=uc.unitarily_recoverable,
        horizon=horizon,
        residuals=residuals,
    )
