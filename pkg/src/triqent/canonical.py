"""Canonical two-branch decomposition of 3-qubit states.

Any genuinely tripartite state is written, up to local unitaries, as an
equal superposition of two biseparable branches carrying the same amount
of 2|3 entanglement:

    (|0>|psi_s> + |1> (U2 x U3)|psi_s>) / sqrt(2)

with psi_s = a|00> + b|11> (a >= b), U2 = Z(alpha) Y(beta) Z(gamma) and
U3 = Y(beta') where Z(x) = exp(i x sigma_z), Y(x) = exp(i x sigma_y).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qcore import LocalUnitary, PureState
from .bipartite import (
    SchmidtSplit,
    TauMatrix,
    _bilinear,
    concurrence_pair,
    eof,
    schmidt_noise_floor,
    schmidt_split,
    tau_matrix,
)

TOL_MAXENT = 1e-9
TOL_CASE = 1e-10
_FOLD_TOL = 1e-11

HALF_PI = np.pi / 2


def zrot(xi: float) -> np.ndarray:
    """exp(i xi sigma_z) = diag(e^{i xi}, e^{-i xi})."""
    return np.diag([np.exp(1j * xi), np.exp(-1j * xi)])


def yrot(xi: float) -> np.ndarray:
    """exp(i xi sigma_y) = [[cos, sin], [-sin, cos]]."""
    c, s = np.cos(xi), np.sin(xi)
    return np.array([[c, s], [-s, c]], dtype=complex)


def branch_unitaries(alpha: float, beta: float, gamma: float, beta_prime: float):
    """(U2, U3) for the given decomposition angles."""
    return zrot(alpha) @ yrot(beta) @ zrot(gamma), yrot(beta_prime)


def euler_zyz(u: np.ndarray) -> tuple[float, float, float]:
    """ZYZ angles of a special unitary: u = Z(alpha) Y(beta) Z(gamma).

    beta is returned in [0, pi/2]; when a matrix entry vanishes only one
    phase combination is defined and the whole of it is folded into alpha.
    """
    m00, m01 = u[0, 0], u[0, 1]
    beta = float(np.arctan2(abs(m01), abs(m00)))
    if abs(m01) <= 1e-12:
        return float(np.angle(m00)), beta, 0.0
    if abs(m00) <= 1e-12:
        return float(np.angle(m01)), beta, 0.0
    a0, a1 = np.angle(m00), np.angle(m01)
    return float((a0 + a1) / 2), beta, float((a0 - a1) / 2)


def _to_su2(m: np.ndarray) -> tuple[np.ndarray, complex]:
    """Scale a unitary to unit determinant; returns (su2, dropped phase)."""
    d = np.linalg.det(m)
    root = np.sqrt(abs(d)) * np.exp(0.5j * np.angle(d))
    return m / root, root


class OmegaCase(str, Enum):
    GENERIC = "generic"
    I = "i"
    II = "ii"
    III = "iii"


@dataclass(frozen=True)
class CanonicalForm:
    """Parameters of the two-branch decomposition plus the local-unitary witness.

    ``apply_local(input, witness)`` equals ``reconstruct_state(form)`` up to a
    global phase.
    """

    a: float
    alpha: float
    beta: float
    gamma: float
    beta_prime: float
    omega: float
    witness: LocalUnitary
    max_entangled_convention: bool
    omega_case: OmegaCase = OmegaCase.GENERIC

    @property
    def b(self) -> float:
        return float(np.sqrt(max(1.0 - self.a**2, 0.0)))

    @property
    def params(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.beta_prime)

    def concurrence_s(self) -> float:
        """Concurrence 2ab of the branch state psi_s."""
        return float(min(2 * self.a * self.b, 1.0))


def form_from_params(
    a: float,
    alpha: float,
    beta: float,
    gamma: float,
    beta_prime: float,
    omega: float = 0.0,
) -> CanonicalForm:
    """Build a form with an identity witness (for synthetic inputs)."""
    return CanonicalForm(
        a=float(a),
        alpha=float(alpha),
        beta=float(beta),
        gamma=float(gamma),
        beta_prime=float(beta_prime),
        omega=float(omega),
        witness=LocalUnitary.identity(3),
        max_entangled_convention=bool(abs(a - np.sqrt(1 - a**2)) <= TOL_MAXENT),
    )


def solve_omega(tm: TauMatrix, p: float | None = None) -> tuple[float, OmegaCase]:
    """Phase making the two measurement branches equally entangled.

    Generic case: omega = arctan(x cot(arg ctilde)) reduced to [0, pi),
    with x = (p c0 + (1-p) c1) / (p c0 - (1-p) c1).  Degenerate cases:
    i  (c0 = c1 = 0)                       -> omega = 0;
    ii (p c0 = (1-p) c1 != 0, ctilde in iR) -> omega maximizing C(psi_s);
    iii (ctilde = 0)                        -> omega maximizing C(psi_s).
    In both ii and iii the maximum sits at omega = 0.
    """
    if p is None:
        p = tm.p
    zero = max(TOL_CASE, schmidt_noise_floor(p))
    n = p * tm.c0 + (1 - p) * tm.c1
    d = p * tm.c0 - (1 - p) * tm.c1
    if n <= zero:
        return 0.0, OmegaCase.I
    if abs(tm.ctilde) <= zero:
        return 0.0, OmegaCase.III
    delta = np.angle(tm.ctilde)
    if abs(d) <= zero and abs(np.cos(delta)) <= TOL_CASE:
        return 0.0, OmegaCase.II
    omega = float(np.arctan2(n * np.cos(delta), d * np.sin(delta)))
    return omega % np.pi, OmegaCase.GENERIC


def _branch_states(split: SchmidtSplit, omega: float):
    """Equally likely measurement branches x0, x1 for the given omega."""
    p = split.p
    a0, a1 = split.psi0.amplitudes, split.psi1.amplitudes
    x0 = np.sqrt(p) * a0 + np.exp(1j * omega) * np.sqrt(1 - p) * a1
    x1 = -np.exp(-1j * omega) * np.sqrt(p) * a0 + np.sqrt(1 - p) * a1
    return x0, x1


def _normalize_half_open(x: float) -> float:
    """Reduce an angle modulo pi into (-pi/2, pi/2]."""
    y = (x + HALF_PI) % np.pi - HALF_PI
    if y <= -HALF_PI + 1e-12:
        y += np.pi
    return float(y)


def _fold_gauge(params):
    """At beta = 0 (pi/2) only alpha+gamma (alpha-gamma) is defined; fold it.

    Returns (params, flips): wrapping the folded angle by pi negates the
    second branch, which the caller must absorb as a qubit-1 sign.
    """
    alpha, beta, gamma, bp = params
    if abs(beta) <= _FOLD_TOL:
        combined = alpha + gamma
    elif abs(abs(beta) - HALF_PI) <= _FOLD_TOL:
        combined = alpha - gamma
    else:
        return (alpha, beta, gamma, bp), 0
    folded = _normalize_half_open(combined)
    flips = abs(int(round((combined - folded) / np.pi)))
    beta_out = 0.0 if abs(beta) <= _FOLD_TOL else beta
    return (folded, beta_out, 0.0, bp), flips


_SZ = np.diag([1.0 + 0j, -1.0 + 0j])
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)


def _normalize_node(params, lu: LocalUnitary):
    """Bring all four angles into (-pi/2, pi/2] modulo pi, tracking the witness.

    Shifting any angle by pi flips the sign of the second branch, which is
    the local unitary diag(1, -1) on qubit 1.
    """
    out = []
    flips = 0
    for x in params:
        y = (x + HALF_PI) % np.pi - HALF_PI
        if y <= -HALF_PI + 1e-12:
            y += np.pi
        shift = round((x - y) / np.pi)
        flips += abs(int(shift))
        # Snap to the gauge boundaries well above the dedup resolution so a
        # tiny angle and its sign flip cannot collide as distinct orbit nodes.
        if abs(y) < 1e-9:
            y = 0.0
        elif abs(y - HALF_PI) < 1e-9:
            y = HALF_PI
        out.append(float(y))
    folded, fold_flips = _fold_gauge(tuple(out))
    if (flips + fold_flips) % 2:
        lu = lu.then(LocalUnitary((_SZ, _ID2, _ID2)))
    return folded, lu


def _neighbors(params, lu: LocalUnitary):
    alpha, beta, gamma, bp = params
    u2, u3 = branch_unitaries(alpha, beta, gamma, bp)
    yield (alpha, -beta, gamma, -bp), lu.then(LocalUnitary((_ID2, _SZ, _SZ)))
    yield (alpha + HALF_PI, -beta, gamma + HALF_PI, bp), lu.then(LocalUnitary((_SZ, _ID2, _ID2)))
    yield (-gamma, -beta, -alpha, -bp), lu.then(LocalUnitary((_SX, u2.conj().T, u3.conj().T)))


def _orbit(params):
    """All parameter tuples reachable by the allowed local-unitary moves."""
    start, lu0 = _normalize_node(params, LocalUnitary.identity(3))
    key0 = tuple(np.round(start, 10) + 0.0)
    seen = {key0: (start, lu0)}
    frontier = [(start, lu0)]
    while frontier:
        node, lu = frontier.pop()
        for raw, nlu in _neighbors(node, lu):
            cand, nlu = _normalize_node(raw, nlu)
            key = tuple(np.round(cand, 10) + 0.0)
            if key not in seen:
                seen[key] = (cand, nlu)
                frontier.append((cand, nlu))
    return list(seen.values())


def _canonicalize_with_witness(raw_params) -> tuple[tuple, LocalUnitary]:
    """Canonical representative of the parameter orbit plus the LU reaching it.

    Candidates are restricted to beta, beta' in [0, pi/2]; the unique
    representative is selected by |alpha| >= |gamma| and then by the largest
    (alpha, gamma, beta, beta') tuple.
    """
    nodes = _orbit(raw_params)
    candidates = [
        ((a, 0.0 if abs(b) < 1e-12 else b, g, 0.0 if abs(v) < 1e-12 else v), lu)
        for (a, b, g, v), lu in nodes
        if b >= -1e-12 and v >= -1e-12
    ]
    candidates = [c for c in candidates if abs(c[0][0]) >= abs(c[0][2]) - 1e-12]
    if not candidates:
        raise AssertionError("parameter orbit has no canonical representative")
    key = lambda c: tuple(np.round(c[0], 10))
    return max(candidates, key=key)


def canonicalize_params(raw):
    """Canonical (alpha, beta, gamma, beta') reachable by local-unitary moves.

    Idempotent; the output differs from the input only by the allowed
    transformation group (the orientation-reversing swap that corresponds
    to complex conjugation is never applied).
    """
    params, _ = _canonicalize_with_witness(tuple(float(x) for x in raw))
    return params


def _diagonalize_su2(h: np.ndarray) -> tuple[float, np.ndarray]:
    """theta in [0, pi] and S in SU(2) with S^dag h S = Z(theta)."""
    tr = 0.5 * (h[0, 0] + h[1, 1]).real
    theta = float(np.arccos(np.clip(tr, -1.0, 1.0)))
    if np.sin(theta) < 1e-12:
        return (0.0 if tr > 0 else np.pi), _ID2.copy()
    ev, vec = np.linalg.eig(h)
    order = np.argsort(-np.angle(ev))
    vec = vec[:, order]
    q, _ = np.linalg.qr(vec)
    # Keep eigenvector directions (QR fixes orthonormality only).
    for k in range(2):
        ov = np.vdot(q[:, k], vec[:, k])
        q[:, k] *= ov / abs(ov)
    q, _ = _to_su2(q)
    return theta, q


def reconstruct_state(form: CanonicalForm) -> PureState:
    """3-qubit state of the literal two-branch decomposition."""
    a = form.a
    if not (1 / np.sqrt(2) - 1e-9 <= a <= 1 - 1e-12):
        raise ValueError(f"a = {a} outside [1/sqrt(2), 1 - 1e-12]")
    for name, val, lo, hi in (
        ("alpha", form.alpha, -HALF_PI, HALF_PI),
        ("gamma", form.gamma, -HALF_PI, HALF_PI),
        ("beta", form.beta, 0.0, HALF_PI),
        ("beta_prime", form.beta_prime, 0.0, HALF_PI),
    ):
        if not (lo - 1e-9 <= val <= hi + 1e-9):
            raise ValueError(f"{name} = {val} outside canonical range")
    b = form.b
    psi_s = np.array([a, 0, 0, b], dtype=complex)
    u2, u3 = branch_unitaries(form.alpha, form.beta, form.gamma, form.beta_prime)
    branch1 = np.kron(u2, u3) @ psi_s
    amps = np.concatenate([psi_s, branch1]) / np.sqrt(2)
    return PureState(3, amps)


def canonical_decomposition(
    state: PureState,
    omega_override: float | None = None,
) -> CanonicalForm:
    """Canonical form of a genuinely tripartite 3-qubit state.

    ``omega_override`` replaces the canonical omega (exploration only; the
    default resolves the degenerate cases by maximizing the branch
    entanglement).
    """
    split = schmidt_split(state)
    tm = tau_matrix(split)
    omega, case = solve_omega(tm)
    if omega_override is not None:
        omega = float(omega_override) % np.pi
    x0, x1 = _branch_states(split, omega)
    c_x0 = abs(_bilinear(x0, x0))
    c_x1 = abs(_bilinear(x1, x1))
    if abs(c_x0 - c_x1) > 1e-9:
        raise AssertionError(f"branch entanglement mismatch: {c_x0} vs {c_x1}")

    witness = split.witness
    u_omega = np.array(
        [[1, np.exp(1j * omega)], [-np.exp(-1j * omega), 1]], dtype=complex
    ) / np.sqrt(2)
    witness = witness.then(LocalUnitary((u_omega, _ID2, _ID2)))

    m0 = x0.reshape(2, 2)
    p0, sv, q0h = np.linalg.svd(m0)
    a, b = float(sv[0]), float(sv[1])
    l2, l3 = p0.conj().T, q0h.conj()
    witness = witness.then(LocalUnitary((_ID2, l2, l3)))
    m1 = l2 @ x1.reshape(2, 2) @ l3.T

    max_entangled = (a - b) <= TOL_MAXENT
    if max_entangled:
        # On a maximally entangled branch the whole second-branch unitary can
        # be pushed onto qubit 2 and conjugated into diagonal form.
        h_raw = m1 @ np.diag([1 / a, 1 / b])
        hu, _, hvh = np.linalg.svd(h_raw)
        h_su2, root = _to_su2(hu @ hvh)
        witness = witness.then(
            LocalUnitary((np.diag([1, root.conjugate()]), _ID2, _ID2))
        )
        theta, s = _diagonalize_su2(h_su2)
        witness = witness.then(LocalUnitary((_ID2, s.conj().T, s.T)))
        raw = (theta, 0.0, 0.0, 0.0)
        a = max(a, 1 / np.sqrt(2))
    else:
        p1, _, q1h = np.linalg.svd(m1)
        g2 = p1
        g3 = q1h.T  # conj(Q1), so that g2 @ diag(a, b) @ g3.T = m1
        g2su, r2 = _to_su2(g2)
        g3su, r3 = _to_su2(g3)
        g_phase = r2 * r3
        witness = witness.then(
            LocalUnitary((np.diag([1, g_phase.conjugate()]), _ID2, _ID2))
        )
        # Strip the leading Z of the qubit-3 factor through the Schmidt frame
        # and pass its trailing Z through psi_s onto qubit 2.
        a3, b3, c3 = euler_zyz(g3su)
        witness = witness.then(LocalUnitary((_ID2, zrot(a3), zrot(-a3))))
        u2_pre = zrot(a3) @ g2su @ zrot(c3)
        alpha, beta, gamma = euler_zyz(u2_pre)
        raw = (alpha, beta, gamma, b3)

    params, move_lu = _canonicalize_with_witness(raw)
    witness = witness.then(move_lu)
    alpha, beta, gamma, beta_prime = params

    form = CanonicalForm(
        a=min(a, 1.0),
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        beta_prime=beta_prime,
        omega=omega,
        witness=witness,
        max_entangled_convention=bool(max_entangled),
        omega_case=case,
    )
    _check_interval(form, tm)
    return form


def _check_interval(form: CanonicalForm, tm: TauMatrix) -> None:
    c23, ca23 = concurrence_pair(tm)
    e1 = eof(form.concurrence_s())
    if not (eof(c23) - 1e-9 <= e1 <= eof(ca23) + 1e-9):
        raise AssertionError(
            f"branch entanglement {e1} outside [{eof(c23)}, {eof(ca23)}]"
        )
