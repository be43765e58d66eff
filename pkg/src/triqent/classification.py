"""Standard form, polynomial invariants, and the entanglement classification.

A state is CLU when it is local-unitary equivalent to its complex
conjugate; CLU states split into four subclasses according to which
extremum of the assisted-entanglement interval the branch entanglement E1
attains.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qcore import (
    LocalUnitary,
    PureState,
    require_tripartite,
)
from .bipartite import (
    concurrence_pair,
    eof,
    schmidt_noise_floor,
    schmidt_split,
    tangle,
    tau_matrix,
)
from .canonical import canonical_decomposition

TOL_TANGLE = 1e-9
TOL_J6 = 1e-9
TOL_INV = 1e-8
_TOL_ROOT = 1e-12
_TOL_ZERO = 1e-10
# The four CLU criteria scale with different powers of the distance to the
# CLU manifold; each carries its own calibrated threshold.  Exact CLU inputs
# sit below 1e-13 on every test; random NCLU samples were never observed
# under 1e-8 on the extremality gap, 1e-9 on the polynomial residuals or
# 1e-7 on the invariant imaginary part.
TOL_CLU = 1e-10
_TOL_REALITY = 1e-10
_TOL_POLY = 1e-11
_TOL_J6_IMAG = 1e-11


class NotCLU(ValueError):
    """Operation defined only for states LU-equivalent to their conjugate."""


class StateClass(str, Enum):
    CLASS1_W = "Class1_W"
    CLASS2 = "Class2"
    CLASS3 = "Class3"
    CLASS4 = "Class4"
    NCLU = "NCLU"


@dataclass(frozen=True)
class AcinForm:
    """Standard form lambda0|000> + lambda1 e^{i phi}|100> + lambda2|101>
    + lambda3|110> + lambda4|111> with lambda_i >= 0 and phi in [0, pi]."""

    lambdas: tuple
    phi: float
    witness: LocalUnitary

    @property
    def lambda0(self) -> float:
        return self.lambdas[0]

    def amplitudes(self) -> np.ndarray:
        l0, l1, l2, l3, l4 = self.lambdas
        amps = np.zeros(8, dtype=complex)
        amps[0b000] = l0
        amps[0b100] = l1 * np.exp(1j * self.phi)
        amps[0b101] = l2
        amps[0b110] = l3
        amps[0b111] = l4
        return amps

    def state(self) -> PureState:
        return PureState(3, self.amplitudes())


@dataclass(frozen=True)
class InvariantSet:
    """Polynomial local-unitary invariants of the standard form."""

    j1: float
    j2: float
    j3: float
    j4: float
    j5: float
    j6: complex
    sigma_plus: float
    sigma_minus: float

    @property
    def reals(self) -> tuple:
        return (self.j1, self.j2, self.j3, self.j4, self.j5)


@dataclass(frozen=True)
class ClassLabel:
    clu: bool
    subclass: StateClass
    evidence: dict


def _phase_or_none(z: complex, tol: float = _TOL_ZERO):
    return None if abs(z) <= tol else float(np.angle(z))


def _standard_candidate(state: PureState, row0: np.ndarray):
    """Standard form reached from one qubit-1 rotation candidate.

    Returns (lambdas, phi_raw, witness) with phi_raw in (-pi, pi]; the
    caller keeps candidates whose phi lands in [0, pi].
    """
    r0 = row0 / np.linalg.norm(row0)
    r1 = np.array([-np.conj(r0[1]), np.conj(r0[0])], dtype=complex)
    w1 = np.vstack([r0, r1])
    t = np.tensordot(w1, state.tensor(), axes=([1], [0]))
    u, sv, vh = np.linalg.svd(t[0])
    if sv[1] > 1e-9:
        return None
    a2, a3 = u.conj().T, vh.conj()
    t0 = a2 @ t[0] @ a3.T
    t1 = a2 @ t[1] @ a3.T
    lam0 = float(sv[0])

    q1 = _phase_or_none(t1[0, 0])
    q2 = _phase_or_none(t1[0, 1])
    q3 = _phase_or_none(t1[1, 0])
    q4 = _phase_or_none(t1[1, 1])
    if q2 is not None and q3 is not None and q4 is not None:
        x = q4 - q2 - q3
        phi = 0.0 if q1 is None else float(np.angle(np.exp(1j * (q1 + x))))
        if phi <= -np.pi + 1e-9:
            phi += 2 * np.pi
    else:
        # Some amplitude vanishes; enough phase freedom remains to put phi = 0.
        x = -q1 if q1 is not None else 0.0
        phi = 0.0
    if q2 is not None and q3 is not None:
        y, z = -q3 - x, -q2 - x
    elif q2 is not None:
        z = -q2 - x
        y = (-q4 - x - z) if q4 is not None else 0.0
    elif q3 is not None:
        y = -q3 - x
        z = (-q4 - x - y) if q4 is not None else 0.0
    else:
        y = 0.0
        z = (-q4 - x) if q4 is not None else 0.0

    th10 = -float(np.angle(t0[0, 0])) if abs(t0[0, 0]) > _TOL_ZERO else 0.0
    d1 = np.diag([np.exp(1j * th10), np.exp(1j * x)])
    d2 = np.diag([1.0, np.exp(1j * y)]).astype(complex)
    d3 = np.diag([1.0, np.exp(1j * z)]).astype(complex)
    witness = LocalUnitary((w1, a2, a3)).then(LocalUnitary((d1, d2, d3)))

    lam1 = float(abs(t1[0, 0]))
    lam2 = float(abs(t1[0, 1]))
    lam3 = float(abs(t1[1, 0]))
    lam4 = float(abs(t1[1, 1]))
    return (lam0, lam1, lam2, lam3, lam4), phi, witness


def acin_standard_form(state: PureState) -> AcinForm:
    """Standard form of a genuinely tripartite state.

    The qubit-1 rotation annihilating det(T0) is a root of a quadratic;
    among the admissible roots the one with larger lambda0 is chosen, ties
    broken by smaller phi.
    """
    require_tripartite(state)
    t = state.tensor()
    t0, t1 = t[0], t[1]
    det0 = np.linalg.det(t0)
    det1 = np.linalg.det(t1)
    mixed = t0[0, 0] * t1[1, 1] + t1[0, 0] * t0[1, 1] - t0[0, 1] * t1[1, 0] - t1[0, 1] * t0[1, 0]

    rows = []
    if abs(det1) > _TOL_ROOT:
        disc = np.sqrt(mixed**2 - 4 * det1 * det0 + 0j)
        for r in ((-mixed + disc) / (2 * det1), (-mixed - disc) / (2 * det1)):
            rows.append(np.array([1.0, r], dtype=complex))
    elif abs(mixed) > _TOL_ROOT:
        # Linear case: one finite root plus the root at infinity.
        rows.append(np.array([1.0, -det0 / mixed], dtype=complex))
        rows.append(np.array([0.0, 1.0], dtype=complex))
    elif abs(det0) > _TOL_ROOT:
        # Double root at infinity.
        rows.append(np.array([0.0, 1.0], dtype=complex))
    else:
        # Fully degenerate: every combination is singular.
        rows.append(np.array([1.0, 0.0], dtype=complex))
        rows.append(np.array([0.0, 1.0], dtype=complex))

    candidates = []
    for row in rows:
        cand = _standard_candidate(state, row)
        if cand is None:
            continue
        lams, phi, witness = cand
        if -1e-12 <= phi <= np.pi + 1e-12:
            candidates.append((lams, min(max(phi, 0.0), np.pi), witness))
    if not candidates:
        raise AssertionError("no quadratic root produced a standard form")
    candidates.sort(key=lambda c: (-c[0][0], c[1]))
    lams, phi, witness = candidates[0]
    return AcinForm(lambdas=lams, phi=phi, witness=witness)


def j_invariants(form: AcinForm) -> InvariantSet:
    """Polynomial invariants of the standard form, plus the Schmidt weights."""
    l0, l1, l2, l3, l4 = form.lambdas
    phi = form.phi
    cross = l1 * l4 * np.exp(1j * phi) - l2 * l3
    j1 = float(abs(cross) ** 2)
    j2 = float(l0**2 * l2**2)
    j3 = float(l0**2 * l3**2)
    j4 = float(l0**2 * l4**2)
    j5 = float(l0**2 * (j1 + l2**2 * l3**2 - l1**2 * l4**2))
    j6 = complex(
        l0**4
        * l4**2
        * (l4 * (1 - 2 * l0**2 - 2 * l1**2) + 2 * l1 * l2 * l3 * np.exp(-1j * phi)) ** 2
    )
    disc = np.sqrt(max(1 - 4 * (j2 + j3 + j4), 0.0))
    return InvariantSet(
        j1=j1,
        j2=j2,
        j3=j3,
        j4=j4,
        j5=j5,
        j6=j6,
        sigma_plus=float((1 + disc) / 2),
        sigma_minus=float((1 - disc) / 2),
    )


def _clu_tests(state: PureState, tol_clu: float = TOL_CLU) -> dict:
    """All CLU criteria evaluated on one state."""
    split = schmidt_split(state)
    tm = tau_matrix(split)
    form = canonical_decomposition(state)
    c23, ca23 = concurrence_pair(tm)
    e1 = eof(form.concurrence_s())
    gap_min = abs(e1 - eof(c23))
    gap_max = abs(e1 - eof(ca23))
    inv = j_invariants(acin_standard_form(state))

    extremal = min(gap_min, gap_max) <= tol_clu
    ct_sq = tm.ctilde**2
    # Quantities built from the 1|23 eigenbasis are only reliable above the
    # Schmidt-gap noise floor; widen the zero detections accordingly so that
    # exactly-CLU states with nearly degenerate splittings stay CLU.
    zero = max(_TOL_ZERO, schmidt_noise_floor(tm.p))
    structural = (
        split.degenerate
        or tm.c0 <= zero
        or tm.c1 <= zero
        or abs(tm.ctilde) <= zero
    )
    reality = structural or abs(ct_sq.imag) <= _TOL_REALITY + zero
    res23 = abs(abs(inv.j5) - 2 * np.sqrt(max(inv.j1 * inv.j2 * inv.j3, 0.0)))
    res24 = abs(
        (inv.j4 + inv.j5) ** 2
        - 4 * (inv.j1 + inv.j4) * (inv.j2 + inv.j4) * (inv.j3 + inv.j4)
    )
    poly = res23 <= _TOL_POLY or res24 <= _TOL_POLY
    j6_real = abs(inv.j6.imag) <= _TOL_J6_IMAG

    return {
        "e1": e1,
        "gap_min": gap_min,
        "gap_max": gap_max,
        "tangle": tangle(tm),
        "extremal_test": extremal,
        "ctilde_reality_test": reality,
        "structural_clu": structural,
        "im_ctilde_sq": float(ct_sq.imag),
        "polynomial_test": poly,
        "res_eq23": float(res23),
        "res_eq24": float(res24),
        "j6": inv.j6,
        "im_j6_test": j6_real,
        "invariants": inv,
        "tau": tm,
        "split_degenerate": split.degenerate,
    }


# Decisive bands for the cross-criteria consistency check.  The extremality
# gap and the polynomial residuals detect the distance to the CLU manifold
# only quadratically, so small values of theirs cannot certify CLU; values
# above these bands, however, are sound NCLU proofs (exactly-CLU inputs stay
# below 1e-13 on all of them).
_NCLU_GAP = 1e-6
_NCLU_POLY = 1e-7
_NCLU_REALITY = 1e-6
_PINNED_OVERLAP = 1e-4


def is_clu(state: PureState, tol_clu: float = TOL_CLU) -> tuple[bool, dict]:
    """Whether the state is LU-equivalent to its complex conjugate.

    The production decision combines the reality of the Grassl-type
    invariant with the structural criteria (degenerate splitting or a
    vanishing overlap, whose phase freedom always permits a real cross
    overlap).  The extremality, overlap-reality and polynomial criteria are
    mandatory cross-checks: a decisive contradiction is a hard error, not a
    fallback.
    """
    ev = _clu_tests(state, tol_clu=tol_clu)
    verdict = ev["structural_clu"] or ev["im_j6_test"]
    if ev["structural_clu"] and not ev["im_j6_test"]:
        raise AssertionError(f"structural CLU proof against nonreal invariant: {ev}")
    if verdict:
        gap = min(ev["gap_min"], ev["gap_max"])
        if gap >= _NCLU_GAP:
            raise AssertionError(f"CLU verdict against extremality gap {gap}: {ev}")
        if min(ev["res_eq23"], ev["res_eq24"]) >= _NCLU_POLY:
            raise AssertionError(f"CLU verdict against polynomial residuals: {ev}")
        tm = ev["tau"]
        pinned = (
            not ev["split_degenerate"]
            and min(tm.c0, tm.c1, abs(tm.ctilde)) >= _PINNED_OVERLAP
        )
        if pinned and abs(ev["im_ctilde_sq"]) >= _NCLU_REALITY:
            raise AssertionError(f"CLU verdict against nonreal cross overlap: {ev}")
    return verdict, ev


def _det_tau_realified(tm) -> float:
    """det of tau after the sign redefinitions that make it real.

    For a real or purely imaginary ctilde the realification flips the sign
    of one diagonal overlap when needed; when an overlap vanishes its phase
    is free and ctilde is rotated real directly.
    """
    p, c0, c1, ct = tm.p, tm.c0, tm.c1, tm.ctilde
    pp = p * (1 - p)
    zero = max(_TOL_ZERO, schmidt_noise_floor(p))
    if abs(ct) <= zero:
        return pp * c0 * c1
    if c0 <= zero or c1 <= zero:
        return pp * (c0 * c1 - abs(ct) ** 2)
    ct_sq = ct**2
    if ct_sq.real >= 0:
        return pp * (c0 * c1 - abs(ct_sq))
    return pp * (-c0 * c1 - abs(ct_sq))


def det_tau_sign(state: PureState) -> tuple[int, bool]:
    """Sign of det tau after making tau real, and whether it is well defined.

    The sign is ill-defined exactly when some eigenbasis choice makes the
    cross overlap ctilde vanish: a degenerate splitting, ctilde = 0
    directly, or a vanishing Grassl-type invariant at nonzero tangle.
    """
    clu, ev = is_clu(state)
    if not clu:
        raise NotCLU("det tau sign is defined for CLU states only")
    tm = ev["tau"]
    inv = ev["invariants"]
    well_defined = not (
        ev["split_degenerate"]
        or abs(tm.ctilde) <= max(_TOL_ZERO, schmidt_noise_floor(tm.p))
        or (abs(inv.j6) <= TOL_J6 and ev["tangle"] > TOL_TANGLE)
    )
    det_r = _det_tau_realified(tm)
    if abs(det_r) <= TOL_TANGLE / 4:
        return 0, well_defined
    return (1 if det_r > 0 else -1), well_defined


def realified_det_tau(state: PureState) -> float:
    """det of the realified tau matrix (the quantity whose sign classifies)."""
    clu, ev = is_clu(state)
    if not clu:
        raise NotCLU("realified tau is defined for CLU states only")
    return _det_tau_realified(ev["tau"])


def classify(state: PureState, tol_clu: float = TOL_CLU) -> ClassLabel:
    """CLU/NCLU verdict plus the CLU subclass.

    Subclasses: vanishing tangle is the W class; a vanishing Grassl-type
    invariant (at nonzero tangle) is class 4, positive real part class 2,
    negative class 3.
    """
    clu, ev = is_clu(state, tol_clu=tol_clu)
    inv = ev["invariants"]
    evidence = {
        "e1": ev["e1"],
        "gap_min": ev["gap_min"],
        "gap_max": ev["gap_max"],
        "tangle": ev["tangle"],
        "im_j6": float(inv.j6.imag),
        "re_j6": float(inv.j6.real),
        "res_eq23": ev["res_eq23"],
        "res_eq24": ev["res_eq24"],
    }
    if not clu:
        return ClassLabel(clu=False, subclass=StateClass.NCLU, evidence=evidence)
    if ev["tangle"] <= TOL_TANGLE:
        sub = StateClass.CLASS1_W
    elif abs(inv.j6) <= TOL_J6:
        sub = StateClass.CLASS4
    elif inv.j6.real > 0:
        sub = StateClass.CLASS2
    else:
        sub = StateClass.CLASS3
    label = ClassLabel(clu=True, subclass=sub, evidence=evidence)
    _assert_branch_consistency(label)
    return label


def _assert_branch_consistency(label: ClassLabel) -> None:
    """Class 2 states sit on the maximal branch, class 3 on the minimal one."""
    ev = label.evidence
    if label.subclass is StateClass.CLASS2 and ev["gap_max"] > TOL_CLU:
        raise AssertionError(f"class-2 state off the maximal branch: {ev}")
    if label.subclass is StateClass.CLASS3 and ev["gap_min"] > TOL_CLU:
        raise AssertionError(f"class-3 state off the minimal branch: {ev}")


def lu_equivalent(s1: PureState, s2: PureState) -> tuple[bool, bool]:
    """(equal, conjugate_pair) decided through the complete invariant set."""
    inv1 = j_invariants(acin_standard_form(s1))
    inv2 = j_invariants(acin_standard_form(s2))
    reals_match = all(abs(x - y) <= TOL_INV for x, y in zip(inv1.reals, inv2.reals))
    equal = reals_match and abs(inv1.j6 - inv2.j6) <= TOL_INV
    conj_pair = (
        reals_match
        and not equal
        and abs(inv1.j6 - np.conj(inv2.j6)) <= TOL_INV
        and abs(inv1.j6.imag) > TOL_INV
    )
    return equal, conj_pair
