"""Estimating a single normalised Kloosterman sum by amplitude estimation.

The operator ``B_{a,rho}`` acts on a qubit and a MULT register.  Its
``|0>|a>_x`` amplitude on ``B|0>|0>`` is ``(1 + rho*kappa(a))/2`` with
``kappa(a) = Kl(a, chi)/sqrt(N_chi)``.  Amplitude estimation with M
evaluations of B returns ``P = |1 + rho*kappa|^2 / 4`` to within e with
probability at least 1 - d, and three such estimates with rho in
{1, zeta, zeta^2} give kappa back.

Amplitude estimation itself is simulated at the level of its outcome law:
M-point phase estimation of the Grover iterate, whose eigenphases are
``+-theta/pi`` with ``sin(theta)^2 = P``, returns y with probability given by
the Fejer kernel.  ``phase_estimation_distribution`` builds the full
ancilla-plus-system state for small cases so the two can be compared.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .characters import AddChar, MultChar, require_nontrivial
from .field import FieldError, FiniteField
from .qsim import Simulator
from .sums import kloosterman, norm_constant

ZETA = cmath.exp(2j * math.pi / 3)
RHOS = (1.0 + 0j, ZETA, ZETA**2)


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class EstimationParams:
    delta: float
    epsilon: float
    q: int
    d: float
    e: float
    k: int
    M: int
    seed: int | None = None

    @classmethod
    def from_contract(cls, delta: float, epsilon: float, q: int, seed: int | None = None) -> EstimationParams:
        """Per-run targets d = 1-(1-delta)^(1/3), e = epsilon/(4 sqrt q), then k and M."""
        if not (0 < delta < 1 and 0 < epsilon < 1):
            raise EstimationError(f"delta and epsilon must lie in (0, 1), got {delta}, {epsilon}")
        d = 1 - (1 - delta) ** (1 / 3)
        e = epsilon / (4 * math.sqrt(q))
        k, M = ae_parameters(d, e)
        return cls(delta, epsilon, q, d, e, k, M, seed)

    @property
    def b_applications(self) -> int:
        """Evaluations of B over the three rho runs."""
        return 3 * self.M


def ae_parameters(d: float, e: float) -> tuple[int, int]:
    """k = ceil(1 + 1/(2d)), M = ceil(k pi / (sqrt(1+e) - 1))."""
    if not (0 < d < 1 and 0 < e < 1):
        raise EstimationError(f"d and e must lie in (0, 1), got {d}, {e}")
    k = math.ceil(1 + 1 / (2 * d))
    M = math.ceil(k * math.pi / (math.sqrt(1 + e) - 1))
    return k, M


def bhmt_error_bound(p: float, M: int, k: int) -> float:
    """Error window 2 pi k sqrt(p(1-p))/M + (pi k/M)^2 of M-point amplitude estimation.

    The estimate lands inside it with probability at least 8/pi^2 for k = 1
    and more than 1 - 1/(2(k-1)) for k >= 2.
    """
    return 2 * math.pi * k * math.sqrt(max(p * (1 - p), 0.0)) / M + (math.pi * k / M) ** 2


@dataclass(frozen=True)
class AmplitudeReading:
    rho: complex
    p_true: float
    p_est: float
    M_used: int


def kappa(field: FiniteField, psi: AddChar, a: int, chi: MultChar) -> complex:
    """Oracle amplitude Kl(a, chi)/sqrt(N_chi)."""
    if a == 0:
        raise FieldError("kappa is defined for a != 0")
    return kloosterman(field, psi, a, chi) / math.sqrt(norm_constant(field.q, chi))


def _unitary_with_first_column(v: np.ndarray) -> np.ndarray:
    """Some unitary A with A|0> = v."""
    n = len(v)
    basis = np.eye(n, dtype=complex)
    pivot = int(np.argmax(np.abs(v)))
    cols = [v] + [basis[:, i] for i in range(n) if i != pivot]
    Q, _ = np.linalg.qr(np.column_stack(cols))
    Q[:, 0] *= np.vdot(Q[:, 0], v)
    return Q


def build_B(
    sim: Simulator,
    a: int,
    chi: MultChar,
    rho: complex,
    prepared: np.ndarray | None = None,
) -> np.ndarray:
    """Matrix of B_{a,rho} on QUBIT (x) MULT, row/column index ``u*(q-1) + d``.

    ``prepared`` overrides the state A|0>, which otherwise comes from the
    simulated Kloosterman-vector algorithm.
    """
    if abs(abs(rho) - 1) > 1e-12:
        raise EstimationError(f"rho must have modulus 1, got {abs(rho)}")
    if a == 0:
        raise FieldError("B_{a,rho} needs a != 0")
    n = sim.n
    v = sim.kloosterman_amplitudes(chi) if prepared is None else np.asarray(prepared, dtype=complex)
    if len(v) != n:
        raise EstimationError(f"prepared state must have length {n}")
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise EstimationError("prepared state must be a unit vector")
    A = _unitary_with_first_column(v)
    d_a = sim.field.dlog(a)
    X_a = np.eye(n, dtype=complex)
    X_a[:, [0, d_a]] = X_a[:, [d_a, 0]]
    s = 1 / math.sqrt(2)
    prep = np.array([[s, -np.conj(rho) * s], [rho * s, s]], dtype=complex)
    H = np.array([[s, s], [s, -s]], dtype=complex)
    cond = np.zeros((2 * n, 2 * n), dtype=complex)
    cond[:n, :n] = X_a
    cond[n:, n:] = A
    I = np.eye(n)
    return np.kron(H, I) @ cond @ np.kron(prep, I)


def good_index(sim: Simulator, a: int) -> int:
    """Index of |0>|a>_x in the B basis."""
    return sim.field.dlog(a)


def grover_iterate(B: np.ndarray, good: int) -> np.ndarray:
    """Q = -B S_0 B^dagger S_good."""
    dim = B.shape[0]
    S0 = np.eye(dim, dtype=complex)
    S0[0, 0] = -1
    Sg = np.eye(dim, dtype=complex)
    Sg[good, good] = -1
    return -B @ S0 @ B.conj().T @ Sg


def phase_estimation_distribution(B: np.ndarray, good: int, M: int) -> np.ndarray:
    """Outcome probabilities of M-point phase estimation on the Grover iterate.

    Builds the full ancilla (x) system state, so only meant for small cases.
    """
    if M < 1:
        raise EstimationError("M must be positive")
    Q = grover_iterate(B, good)
    dim = B.shape[0]
    psi = B[:, 0].copy()
    powers = np.empty((M, dim), dtype=complex)
    for j in range(M):
        powers[j] = psi
        psi = Q @ psi
    state = powers / math.sqrt(M)  # sum_j |j> Q^j B|0>
    state = np.fft.fft(state, axis=0, norm="ortho")  # inverse QFT on the ancilla
    return np.sum(np.abs(state) ** 2, axis=1)


def fejer_distribution(p_true: float, M: int) -> np.ndarray:
    """Closed-form outcome law of M-point amplitude estimation at amplitude p_true."""
    if M < 1:
        raise EstimationError("M must be positive")
    if not -1e-12 <= p_true <= 1 + 1e-12:
        raise EstimationError(f"p_true must lie in [0, 1], got {p_true}")
    theta = math.asin(math.sqrt(min(max(p_true, 0.0), 1.0)))
    y = np.arange(M)
    probs = np.zeros(M)
    for omega in (theta / math.pi, -theta / math.pi):
        delta = omega - y / M
        num = np.sin(M * math.pi * delta) ** 2
        den = (M * np.sin(math.pi * delta)) ** 2
        on_grid = np.abs(np.sin(math.pi * delta)) < 1e-12
        probs += 0.5 * np.where(on_grid, 1.0, num / np.where(on_grid, 1.0, den))
    return probs / probs.sum()


def sample_outcomes(p_true: float, M: int, rng: np.random.Generator, size: int | None = None):
    """Measured phase-register values y of M-point amplitude estimation."""
    if not isinstance(M, (int, np.integer)) or M < 1:
        raise EstimationError(f"M must be a positive integer, got {M}")
    return rng.choice(M, size=size, p=fejer_distribution(p_true, M))


def amplitude_estimation(p_true: float, M: int, rng: np.random.Generator, size: int | None = None, k: int = 1):
    """Sample the estimate sin^2(pi y / M) of an M-evaluation amplitude estimation run.

    ``k`` only widens the guaranteed window (see ``bhmt_error_bound``); it does
    not change the sampled law.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise EstimationError(f"k must be a positive integer, got {k}")
    y = sample_outcomes(p_true, M, rng, size)
    return np.sin(np.pi * y / M) ** 2


def recover_kappa(p1, p_zeta, p_zeta2):
    """kappa = (4/3)(P_1 + zeta^2 P_zeta + zeta P_zeta^2)."""
    return (4 / 3) * (p1 + ZETA**2 * p_zeta + ZETA * p_zeta2)


def b_probabilities(sim: Simulator, a: int, chi: MultChar) -> list[float]:
    """P_{a,rho} = |<0,a|B_{a,rho}|0,0>|^2 for rho = 1, zeta, zeta^2, from the simulated B."""
    v = sim.kloosterman_amplitudes(chi)
    g = good_index(sim, a)
    return [float(abs(build_B(sim, a, chi, rho, prepared=v)[g, 0]) ** 2) for rho in RHOS]


def estimate_kappa(
    sim: Simulator,
    a: int,
    chi: MultChar,
    d: float,
    e: float,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Combine three amplitude estimations into an estimate of kappa(a).

    Returns ``(estimate, readings)``; with ``size`` the estimate is an array of
    independent repetitions.
    """
    k, M = ae_parameters(d, e)
    probs = b_probabilities(sim, a, chi)
    ests = [amplitude_estimation(p, M, rng, size=size, k=k) for p in probs]
    readings = [
        AmplitudeReading(rho, p, float(np.ravel(est)[0]), M) for rho, p, est in zip(RHOS, probs, ests)
    ]
    return recover_kappa(*ests), readings


@dataclass
class KloostermanEstimate:
    params: EstimationParams
    d_a: int
    m_chi: int
    estimate: complex
    oracle: complex
    readings: list[AmplitudeReading] = dc_field(default_factory=list)

    @property
    def abs_error(self) -> float:
        return abs(self.estimate - self.oracle)

    def to_json(self) -> dict:
        P = self.params
        return {
            "q": P.q,
            "a": self.d_a,
            "m_chi": self.m_chi,
            "delta": P.delta,
            "epsilon": P.epsilon,
            "d": P.d,
            "e": P.e,
            "k": P.k,
            "M": P.M,
            "estimate": {"re": self.estimate.real, "im": self.estimate.imag},
            "oracle": {"re": self.oracle.real, "im": self.oracle.imag},
            "abs_error": self.abs_error,
            "b_applications": P.b_applications,
            "seed": P.seed,
        }


def sample_kloosterman_estimates(
    sim: Simulator,
    a: int,
    chi: MultChar,
    params: EstimationParams,
    rng: np.random.Generator,
    trials: int,
) -> np.ndarray:
    """``trials`` independent estimates of Kl(a, chi)/sqrt(q)."""
    est, _ = estimate_kappa(sim, a, chi, params.d, params.e, rng, size=trials)
    q = sim.q
    return np.asarray(est) * math.sqrt(norm_constant(q, chi)) / math.sqrt(q)


def estimate_kloosterman(
    field: FiniteField,
    psi: AddChar,
    a: int,
    chi: MultChar,
    delta: float,
    epsilon: float,
    seed: int | None = None,
    sim: Simulator | None = None,
) -> KloostermanEstimate:
    """Approximate Kl(a, chi)/sqrt(q) to within epsilon with probability >= 1 - delta."""
    require_nontrivial(psi)
    if a == 0:
        raise FieldError("Kloosterman sums are defined for a != 0")
    params = EstimationParams.from_contract(delta, epsilon, field.q, seed)
    sim = sim or Simulator(field, psi)
    rng = np.random.default_rng(seed)
    est, readings = estimate_kappa(sim, a, chi, params.d, params.e, rng)
    scale = math.sqrt(norm_constant(field.q, chi)) / math.sqrt(field.q)
    oracle = kloosterman(field, psi, a, chi) / math.sqrt(field.q)
    return KloostermanEstimate(params, field.dlog(a), chi.m, complex(est) * scale, oracle, readings)
