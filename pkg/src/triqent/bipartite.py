"""Two-qubit entanglement primitives and the 1|23 Schmidt machinery.

Everything here is phrased in terms of the symmetric bilinear form
B(u, v) = u^T (sigma_y x sigma_y) v on two-qubit states; the spin-flipped
overlap <u~|v> equals B(u, v).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    LocalUnitary,
    PureState,
    require_tripartite,
)

TOL_DEGENERATE = 1e-9

# sigma_y x sigma_y is real symmetric; rows/cols ordered |00>,|01>,|10>,|11>.
_YY = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=float,
)


def spin_flip(state: PureState) -> PureState:
    """sigma_y x sigma_y applied to the complex conjugate of a 2-qubit state."""
    if state.n_qubits != 2:
        raise ValueError("spin_flip expects a 2-qubit state")
    return PureState(2, _YY @ state.amplitudes.conj())


def _bilinear(u: np.ndarray, v: np.ndarray) -> complex:
    return complex(u @ _YY @ v)


def concurrence_pure(state: PureState) -> float:
    """Concurrence |<psi~|psi>| of a normalized 2-qubit pure state."""
    if state.n_qubits != 2:
        raise ValueError("concurrence_pure expects a 2-qubit state")
    c = abs(_bilinear(state.amplitudes, state.amplitudes))
    return float(min(c, 1.0))


def binary_entropy(x: float) -> float:
    """Binary entropy h(x) in bits with h(0) = h(1) = 0."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def eof(concurrence: float) -> float:
    """Entanglement of formation as a function of concurrence.

    Strictly increasing on [0, 1] with eof(0) = 0 and eof(1) = 1.
    """
    if concurrence < -1e-9 or concurrence > 1 + 1e-9:
        raise ValueError(f"concurrence out of range: {concurrence}")
    c = min(max(concurrence, 0.0), 1.0)
    return binary_entropy(0.5 * (1 + np.sqrt(max(1 - c * c, 0.0))))


def eof_inverse(value: float) -> float:
    """Concurrence whose entanglement of formation equals ``value``."""
    if value < -1e-12 or value > 1 + 1e-12:
        raise ValueError(f"value out of range: {value}")
    v = min(max(value, 0.0), 1.0)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if eof(mid) < v:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def binary_entropy_inverse_upper(value: float) -> float:
    """x in [1/2, 1] with h(x) = value."""
    if value < -1e-12 or value > 1 + 1e-12:
        raise ValueError(f"value out of range: {value}")
    v = min(max(value, 0.0), 1.0)
    lo, hi = 0.5, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) > v:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SchmidtSplit:
    """Normal form of the 1|23 splitting.

    The witness is a local unitary (acting on qubit 1 only) such that
    ``apply_local(input, witness)`` equals
    sqrt(p)|0>|psi0> + sqrt(1-p)|1>|psi1> exactly, with the eigenvector
    phases fixed so that c0, c1 >= 0.
    """

    p: float
    psi0: PureState
    psi1: PureState
    witness: LocalUnitary
    degenerate: bool

    def normal_state(self) -> PureState:
        amps = np.concatenate(
            [
                np.sqrt(self.p) * self.psi0.amplitudes,
                np.sqrt(1 - self.p) * self.psi1.amplitudes,
            ]
        )
        return PureState(3, amps)


@dataclass(frozen=True)
class TauMatrix:
    """Symmetric 2x2 matrix tau_ij = sqrt(p_i p_j) <psi_i~|psi_j> and scalars."""

    c0: float
    c1: float
    ctilde: complex
    tau: np.ndarray
    s1: float
    s2: float
    p: float
    degenerate: bool

    def __post_init__(self):
        t = np.asarray(self.tau, dtype=complex)
        t.flags.writeable = False
        object.__setattr__(self, "tau", t)


def _phase_fix(vec: np.ndarray, c: complex, zero_thr: float = 1e-12) -> tuple[np.ndarray, complex]:
    """Rotate a global phase so the self-overlap c becomes nonnegative.

    When c vanishes (below ``zero_thr``) the phase is undefined; fall back
    to making the first nonzero amplitude real positive.
    """
    if abs(c) > zero_thr:
        phase = np.exp(-0.5j * np.angle(c))
        return vec * phase, abs(c)
    idx = int(np.argmax(np.abs(vec) > 1e-12))
    a = vec[idx]
    phase = abs(a) / a
    return vec * phase, 0.0


def _takagi_2x2(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization t = W diag(s1, s2) W^T of a complex symmetric 2x2.

    Returns (W, s) with s1 >= s2 >= 0 and W unitary; deterministic up to the
    documented column sign fix.
    """
    u, s, vh = np.linalg.svd(t)
    v = vh.conj().T
    c = u.conj().T @ v.conj()
    if s[0] - s[1] > 1e-12 * max(s[0], 1.0):
        d = np.sqrt(np.diag(c).astype(complex))
        w = u @ np.diag(d)
    else:
        # Degenerate singular values: c is a symmetric unitary; take its
        # principal square root through an eigendecomposition.
        ev, evec = np.linalg.eig(c)
        q, _ = np.linalg.qr(evec)
        ev = np.diag(q.conj().T @ c @ q)
        d = np.exp(0.5j * np.angle(ev))
        w = u @ (q @ np.diag(d) @ q.T)
    for k in range(2):
        idx = int(np.argmax(np.abs(w[:, k])))
        a = w[idx, k]
        if abs(a) > 1e-14:
            w[:, k] *= abs(a) / a
    return w, s


def _tau_entries(p: float, psi0: np.ndarray, psi1: np.ndarray):
    c0 = _bilinear(psi0, psi0)
    c1 = _bilinear(psi1, psi1)
    ct = _bilinear(psi0, psi1)
    tau = np.array(
        [
            [p * c0, np.sqrt(p * (1 - p)) * ct],
            [np.sqrt(p * (1 - p)) * ct, (1 - p) * c1],
        ],
        dtype=complex,
    )
    return c0, c1, ct, tau


# Window below which the splitting is treated as exactly degenerate and the
# eigenbasis is rebased to its canonical representative.
_SNAP_DEGENERATE = 1e-12


def schmidt_noise_floor(p: float) -> float:
    """Error scale of quantities built from the 1|23 eigenbasis.

    The eigenvectors are determined only up to machine epsilon divided by
    the Schmidt gap |2p - 1|; overlaps smaller than this are numerical noise.
    """
    eps = np.finfo(float).eps
    return float(min(32 * eps / max(abs(2 * p - 1), eps), 1e-4))


def schmidt_split(state: PureState, tol_degenerate: float = TOL_DEGENERATE) -> SchmidtSplit:
    """1|23 Schmidt normal form of a genuinely tripartite 3-qubit state.

    The returned eigenvectors satisfy c0, c1 >= 0.  For a degenerate
    splitting (p = 1/2) the eigenbasis of the reduced state is not unique;
    it is then canonicalized from the structure of tau: the basis is kept
    as-is if tau is already in the zero-diagonal form (c0 = c1 = 0),
    otherwise it is rotated so that tau becomes diagonal (ctilde = 0).
    """
    if state.n_qubits != 3:
        raise ValueError("schmidt_split expects a 3-qubit state")
    require_tripartite(state)
    m = state.amplitudes.reshape(2, 4)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    p = float(s[0] ** 2)
    psi0 = vh[0]
    psi1 = vh[1]
    w1 = u.conj().T
    degenerate = abs(p - 0.5) <= tol_degenerate

    if abs(p - 0.5) <= _SNAP_DEGENERATE:
        p = 0.5
        _, _, _, tau = _tau_entries(p, psi0, psi1)
        zero_diag = abs(tau[0, 0]) <= 1e-12 and abs(tau[1, 1]) <= 1e-12
        if not zero_diag:
            w, _ = _takagi_2x2(tau)
            a = w.conj().T
            psi0, psi1 = a[0, 0] * psi0 + a[0, 1] * psi1, a[1, 0] * psi0 + a[1, 1] * psi1
            # New normal-form rows are a @ (old rows), so the qubit-1
            # witness picks up the same rotation.
            w1 = a @ w1

    # Self-overlaps below the eigenbasis noise floor carry no phase
    # information; the snapped degenerate basis is rebuilt cleanly, so only
    # the base threshold applies there.
    zero_thr = 1e-12 if p == 0.5 else max(1e-12, schmidt_noise_floor(p))
    c0 = _bilinear(psi0, psi0)
    c1 = _bilinear(psi1, psi1)
    psi0, _ = _phase_fix(psi0, c0, zero_thr)
    psi1, _ = _phase_fix(psi1, c1, zero_thr)
    # A phase on psi_k is compensated by the conjugate phase on |k> of
    # qubit 1, i.e. by a diagonal factor multiplying the witness.
    d0 = _phase_align(psi0, w1, state, row=0, p=p)
    d1 = _phase_align(psi1, w1, state, row=1, p=p)
    w1 = np.diag([d0, d1]) @ w1

    return SchmidtSplit(
        p=p,
        psi0=PureState(2, psi0),
        psi1=PureState(2, psi1),
        witness=LocalUnitary((w1, np.eye(2, dtype=complex), np.eye(2, dtype=complex))),
        degenerate=degenerate,
    )


def _phase_align(psi_fixed, w1, state, row: int, p: float) -> complex:
    """Diagonal witness entry aligning the rotated input with the fixed eigenvector."""
    weight = np.sqrt(p) if row == 0 else np.sqrt(1 - p)
    current = (w1 @ state.amplitudes.reshape(2, 4))[row] / weight
    ov = np.vdot(psi_fixed, current)
    return (abs(ov) / ov) if abs(ov) > 1e-14 else 1.0


def tau_matrix(split: SchmidtSplit) -> TauMatrix:
    """tau matrix and its scalars for a Schmidt split."""
    p = split.p
    c0c, c1c, ct, tau = _tau_entries(p, split.psi0.amplitudes, split.psi1.amplitudes)
    s = np.linalg.svd(tau, compute_uv=False)
    return TauMatrix(
        c0=max(float(c0c.real), 0.0),
        c1=max(float(c1c.real), 0.0),
        ctilde=ct,
        tau=tau,
        s1=float(s[0]),
        s2=float(s[1]),
        p=p,
        degenerate=split.degenerate,
    )


def concurrence_pair(tm: TauMatrix) -> tuple[float, float]:
    """(C_23, C^a_23) from the singular values of tau."""
    c23 = min(max(tm.s1 - tm.s2, 0.0), 1.0)
    ca23 = min(tm.s1 + tm.s2, 1.0)
    return c23, ca23


def concurrence_pair_closed_form(tm: TauMatrix) -> tuple[float, float]:
    """(C_23, C^a_23) from the closed form in p, c0, c1, ctilde."""
    p, c0, c1, ct = tm.p, tm.c0, tm.c1, tm.ctilde
    base = p**2 * c0**2 + (1 - p) ** 2 * c1**2
    cross = 2 * p * (1 - p)
    disc = abs(c0 * c1 - ct**2)
    cm = np.sqrt(max(base + cross * (abs(ct) ** 2 - disc), 0.0))
    cp = np.sqrt(max(base + cross * (abs(ct) ** 2 + disc), 0.0))
    return float(cm), float(cp)


def tangle(tm: TauMatrix) -> float:
    """Three-way tangle 4|det tau|."""
    return float(min(4 * abs(np.linalg.det(tm.tau)), 1.0))
