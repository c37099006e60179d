"""Two-qubit states, projective spin measurements and the quantum phenomena
and orthodox-quantum theories they generate.

Qubit 0 is Alice's, qubit 1 Bob's. Outcome index 0 is spin +1 along the
setting's Bloch vector, index 1 is spin -1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DecompositionMismatch, InvalidState
from .numerics import frozen
from .scenario import Phenomenon, Scenario, is_signal_local
from .theory import Theory

I2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
# (axis at 0 degrees, axis at 90 degrees)
PLANES = {"xz": (2, 0), "xy": (0, 1), "yz": (1, 2)}


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise InvalidState(f"expected a 4x4 matrix, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise InvalidState(f"trace is {np.trace(rho).real}, not 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise InvalidState("density matrix is not positive semidefinite")
        object.__setattr__(self, "rho", frozen(rho))

    @classmethod
    def pure(cls, psi) -> "TwoQubitState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def __eq__(self, other):
        if not isinstance(other, TwoQubitState):
            return NotImplemented
        return np.array_equal(self.rho, other.rho)

    __hash__ = None

    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    def reduced(self, keep: int) -> np.ndarray:
        """Partial trace onto qubit ``keep`` (0 = Alice, 1 = Bob)."""
        r = self.rho.reshape(2, 2, 2, 2)
        return np.einsum("ijkj->ik", r) if keep == 0 else np.einsum("ijil->jl", r)


@dataclass(frozen=True)
class MeasurementSetting:
    bloch: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.bloch)
        if len(v) != 3 or abs(np.linalg.norm(v) - 1) > 1e-12:
            raise InvalidState(f"setting must be a unit 3-vector, got {v}")
        object.__setattr__(self, "bloch", v)

    @classmethod
    def from_angle(cls, degrees: float, plane: str = "xz") -> "MeasurementSetting":
        """Unit vector at ``degrees`` from the first axis of ``plane`` toward the second.

        In the default xz plane, 0 degrees is +z and 90 degrees is +x.
        """
        i, j = PLANES[plane]
        th = np.deg2rad(degrees)
        v = [0.0, 0.0, 0.0]
        v[i], v[j] = np.cos(th), np.sin(th)
        return cls(tuple(v))

    def projector(self, outcome: int) -> np.ndarray:
        sign = 1 if outcome == 0 else -1
        n_sigma = sum(c * s for c, s in zip(self.bloch, PAULI))
        return (I2 + sign * n_sigma) / 2


def singlet() -> TwoQubitState:
    """|psi-> = (|01> - |10>)/sqrt 2; entries are exactly 0 and +-1/2."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = rho[2, 2] = 0.5
    rho[1, 2] = rho[2, 1] = -0.5
    return TwoQubitState(rho)


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(np.eye(4, dtype=complex) / 4)


def werner(v: float) -> TwoQubitState:
    if not 0 <= v <= 1:
        raise InvalidState(f"Werner visibility must lie in [0, 1], got {v}")
    v = float(v)
    return TwoQubitState(v * singlet().rho + (1 - v) * np.eye(4) / 4)


def product_state(alice: MeasurementSetting, bob: MeasurementSetting) -> np.ndarray:
    """Pure product state vector with each spin up along the given direction."""
    def up(n):
        vals, vecs = np.linalg.eigh(n.projector(0))
        return vecs[:, np.argmax(vals)]
    return np.kron(up(alice), up(bob))


def born_table(rho: np.ndarray, a_settings, b_settings) -> np.ndarray:
    m_a, m_b = len(a_settings), len(b_settings)
    t = np.empty((m_a, m_b, 2, 2))
    for a, sa in enumerate(a_settings):
        for b, sb in enumerate(b_settings):
            for A in range(2):
                for B in range(2):
                    op = np.kron(sa.projector(A), sb.projector(B))
                    t[a, b, A, B] = np.trace(rho @ op).real
    # clip rounding noise and renormalize each block
    t = np.clip(t, 0.0, 1.0)
    return t / t.sum(axis=(2, 3), keepdims=True)


def _settings(settings) -> list[MeasurementSetting]:
    return [s if isinstance(s, MeasurementSetting) else MeasurementSetting(s) for s in settings]


def born_phenomenon(state: TwoQubitState, a_settings, b_settings,
                    context: str = "quantum") -> Phenomenon:
    a_settings, b_settings = _settings(a_settings), _settings(b_settings)
    scen = Scenario(len(a_settings), len(b_settings), 2, 2, context=context)
    p = Phenomenon(scen, born_table(state.rho, a_settings, b_settings))
    sl = is_signal_local(p, 1e-9)
    assert sl.holds, f"Born-rule table signals: {sl}"
    return p


def oqm_theory(state: TwoQubitState, decomposition, a_settings, b_settings,
               context: str = "quantum") -> Theory:
    """Orthodox quantum theory whose hidden variable is the pure component.

    ``decomposition`` is a list of (weight, state vector) pairs that must
    reproduce ``state`` as a convex mixture.
    """
    a_settings, b_settings = _settings(a_settings), _settings(b_settings)
    weights, comps = [], []
    for w, psi in decomposition:
        if isinstance(psi, TwoQubitState):
            comp = psi
        else:
            comp = TwoQubitState.pure(psi)
        weights.append(float(w))
        comps.append(comp)
    recon = sum(w * c.rho for w, c in zip(weights, comps))
    if abs(sum(weights) - 1) > 1e-10 or np.max(np.abs(recon - state.rho)) > 1e-10:
        raise DecompositionMismatch("decomposition does not reproduce the state")
    scen = Scenario(len(a_settings), len(b_settings), 2, 2, context=context)
    kernel = np.array([born_table(c.rho, a_settings, b_settings) for c in comps])
    return Theory(scen, [f"psi{i}" for i in range(len(comps))], np.array(weights), kernel)


SINGLET_VECTOR = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def singlet_oqm_theory(a_settings, b_settings) -> Theory:
    return oqm_theory(singlet(), [(1.0, SINGLET_VECTOR)], a_settings, b_settings)


def chsh_optimal_settings(plane: str = "xz"):
    """Alice at 0 and 90 degrees, Bob at 45 and -45 degrees, in one plane.

    With these the singlet gives E00 + E01 + E10 - E11 = -2 sqrt 2.
    """
    a = [MeasurementSetting.from_angle(0, plane), MeasurementSetting.from_angle(90, plane)]
    b = [MeasurementSetting.from_angle(45, plane), MeasurementSetting.from_angle(-45, plane)]
    return a, b


BOXES_SCENARIO = Scenario(1, 1, 2, 2, context="einstein-boxes", values_a=(1, -1), values_b=(1, -1))
FOUND, EMPTY = 0, 1


def boxes_phenomenon() -> Phenomenon:
    """One particle split between two boxes, each opened once: found (0) or empty (1)."""
    t = np.empty(BOXES_SCENARIO.shape, dtype=object)
    t[0, 0] = [[Fraction(0), Fraction(1, 2)], [Fraction(1, 2), Fraction(0)]]
    return Phenomenon(BOXES_SCENARIO, t)


def boxes_oqm_theory() -> Theory:
    """Orthodox quantum theory of the boxes: the lone hidden variable is the
    pure state, so the kernel is the observed table itself."""
    kernel = boxes_phenomenon().table[None].copy()
    return Theory(BOXES_SCENARIO, ["psi"], np.array([Fraction(1)], dtype=object), kernel)
