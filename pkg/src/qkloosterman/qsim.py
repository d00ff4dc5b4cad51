"""Exact-dimension state-vector simulation of the Gauss/Kloosterman circuits.

Registers have their natural dimensions instead of qubit padding:

* ``MULT``: dimension q-1, basis ``|a>_x`` labelled by the discrete log d_a
* ``ADD``:  dimension q, basis ``|x>_+`` labelled by the element encoding
* ``CHAR``: dimension q-1, basis ``|chi>_*`` labelled by m_chi
* ``QUBIT``: dimension 2

Discrete exponentiation/logarithm are classical table permutations between a
MULT and an ADD register (``relabel_exp`` / ``relabel_log``).

Every operator checks that it preserved the norm of its input.  Controlled
operations are built by splitting a state into projections on a control
register, acting on one piece and adding the pieces back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .characters import AddChar, MultChar, require_nontrivial
from .field import FiniteField
from .sums import L_chi, M_chi, norm_constant

ISOMETRY_TOL = 1e-10
LEAKAGE_TOL = 1e-8
MAX_PIPELINE_Q = 256
MAX_REGISTER_Q = 4096


class SimulationError(RuntimeError):
    """An operator broke an invariant it must preserve."""


class PreconditionError(SimulationError, ValueError):
    """An operator was applied outside its domain."""


class Kind(str, Enum):
    MULT = "mult"
    ADD = "add"
    CHAR = "char"
    QUBIT = "qubit"


_LABEL = {Kind.MULT: "d", Kind.ADD: "x", Kind.CHAR: "m", Kind.QUBIT: "u"}


@dataclass(frozen=True)
class Register:
    kind: Kind
    dim: int

    def __post_init__(self):
        if self.kind is Kind.QUBIT and self.dim != 2:
            raise PreconditionError("a qubit register has dimension 2")


class StateVector:
    """Amplitudes over a tensor product of registers, stored with one axis per register."""

    def __init__(self, registers: Sequence[Register], amps: np.ndarray):
        self.registers = tuple(registers)
        amps = np.asarray(amps, dtype=complex)
        shape = tuple(reg.dim for reg in self.registers)
        if amps.shape != shape:
            amps = amps.reshape(shape)
        self.amps = amps

    @classmethod
    def basis(cls, registers: Sequence[Register], labels: Sequence[int]) -> StateVector:
        amps = np.zeros(tuple(reg.dim for reg in registers), dtype=complex)
        amps[tuple(labels)] = 1.0
        return cls(registers, amps)

    @property
    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def amplitude(self, *labels: int) -> complex:
        return complex(self.amps[tuple(labels)])

    def kinds(self) -> tuple[Kind, ...]:
        return tuple(reg.kind for reg in self.registers)

    def replace(self, amps: np.ndarray, index: int | None = None, register: Register | None = None) -> StateVector:
        regs = list(self.registers)
        if index is not None:
            regs[index] = register
        return StateVector(regs, amps)

    def project(self, index: int, values: Iterable[int]) -> StateVector:
        """Zero every amplitude whose label on register ``index`` is not in ``values``."""
        mask = np.zeros(self.registers[index].dim, dtype=bool)
        mask[list(values)] = True
        shape = [1] * len(self.registers)
        shape[index] = -1
        return StateVector(self.registers, self.amps * mask.reshape(shape))

    def __add__(self, other: StateVector) -> StateVector:
        if self.registers != other.registers:
            raise SimulationError("cannot add states over different registers")
        return StateVector(self.registers, self.amps + other.amps)

    def register_vector(self, index: int, labels: Sequence[int]) -> np.ndarray:
        """Amplitudes of register ``index`` with every other register fixed to ``labels``."""
        idx = list(labels)
        idx.insert(index, slice(None))
        return self.amps[tuple(idx)].copy()

    def dump(self, cutoff: float = 1e-14) -> list[dict]:
        out = []
        for labels in zip(*np.nonzero(np.abs(self.amps) > cutoff)):
            amp = self.amps[labels]
            label = ",".join(f"{_LABEL[r.kind]}={int(v)}" for r, v in zip(self.registers, labels))
            out.append({"label": label, "re": float(amp.real), "im": float(amp.imag)})
        return out


def _apply_matrix(amps: np.ndarray, index: int, matrix: np.ndarray) -> np.ndarray:
    """Act with ``matrix`` (out_dim x in_dim) on axis ``index``."""
    moved = np.moveaxis(amps, index, -1)
    return np.moveaxis(moved @ matrix.T, -1, index)


def _apply_diagonal(amps: np.ndarray, index: int, diag: np.ndarray) -> np.ndarray:
    shape = [1] * amps.ndim
    shape[index] = -1
    return amps * diag.reshape(shape)


def _check_isometry(before: StateVector, after: StateVector, what: str) -> StateVector:
    n0, n1 = before.norm(), after.norm()
    if abs(n1 - n0) > ISOMETRY_TOL * max(1.0, n0):
        raise SimulationError(f"{what} changed the norm from {n0} to {n1}")
    return after


@dataclass(frozen=True)
class RotationData:
    alpha_plus: float
    alpha_minus: float
    beta_plus: float
    beta_minus: float
    theta_chi: float
    omega_chi: float
    rho_chi: float

    @property
    def overlap(self) -> float:
        """<Gamma~ | Gamma> = alpha+ beta+ + alpha- beta-."""
        return self.alpha_plus * self.beta_plus + self.alpha_minus * self.beta_minus


def rotation_data(q: int, chi: MultChar) -> RotationData:
    L, M, N = L_chi(q, chi), M_chi(q, chi), norm_constant(q, chi)
    ap = math.sqrt(L) / (q - 1)
    am = math.sqrt(M) / (q - 1)
    bp = math.sqrt(L / ((q - 1) * N))
    bm = math.sqrt(q * M / ((q - 1) * N))
    theta = math.atan2(ap, am)
    omega = math.atan2(bp, bm)
    return RotationData(ap, am, bp, bm, theta, omega, theta - omega)


class Simulator:
    """Operators for one field and one additive character."""

    def __init__(self, field: FiniteField, psi: AddChar, max_q: int = MAX_REGISTER_Q):
        if field.q > max_q:
            raise PreconditionError(f"q = {field.q} exceeds the simulator limit {max_q}")
        self.field = field
        self.psi = psi
        self.q = field.q
        self.n = field.order

    # -- registers ----------------------------------------------------------

    def register(self, kind: Kind) -> Register:
        dims = {Kind.MULT: self.n, Kind.CHAR: self.n, Kind.ADD: self.q, Kind.QUBIT: 2}
        return Register(kind, dims[kind])

    def basis_state(self, kinds: Sequence[Kind], labels: Sequence[int]) -> StateVector:
        return StateVector.basis([self.register(k) for k in kinds], labels)

    def append_register(self, state: StateVector, kind: Kind, label: int = 0) -> StateVector:
        reg = self.register(kind)
        extra = np.zeros(reg.dim, dtype=complex)
        extra[label] = 1.0
        return StateVector(state.registers + (reg,), np.multiply.outer(state.amps, extra))

    def drop_register(self, state: StateVector, index: int, label: int = 0) -> StateVector:
        """Remove a register that has been returned to ``|label>``."""
        idx = [slice(None)] * len(state.registers)
        idx[index] = label
        kept = state.amps[tuple(idx)]
        residual = float(np.linalg.norm(np.delete(state.amps, label, axis=index)))
        if residual > LEAKAGE_TOL * max(1.0, state.norm()):
            raise SimulationError(f"register {index} is not in |{label}> (residual {residual})")
        regs = state.registers[:index] + state.registers[index + 1 :]
        return StateVector(regs, kept)

    def _expect(self, state: StateVector, index: int, kinds: Iterable[Kind]) -> Register:
        reg = state.registers[index]
        kinds = tuple(kinds)
        if reg.kind not in kinds:
            raise PreconditionError(f"register {index} is {reg.kind.value}, expected one of {[k.value for k in kinds]}")
        return reg

    # -- tables -------------------------------------------------------------

    @cached_property
    def _psi_table(self) -> np.ndarray:
        return self.psi.table(self.field)

    @cached_property
    def _psi_exponents(self) -> np.ndarray:
        return np.rint(np.angle(self._psi_table) * self.field.p / (2 * np.pi)).astype(np.int64) % self.field.p

    def _mul_row(self, xs: np.ndarray) -> np.ndarray:
        """Products x*y for x in ``xs`` (rows) and every y (columns), as encodings."""
        logs = self.field.log_table
        ys = np.arange(self.q)
        prod = self.field.exp_table[(logs[xs][:, None] + logs[ys][None, :]) % self.n]
        zero = (xs[:, None] == 0) | (ys[None, :] == 0)
        return np.where(zero, 0, prod)

    # -- single-register unitaries -----------------------------------------

    def qft_mult(self, state: StateVector, index: int, inverse: bool = False, to: Kind | None = None) -> StateVector:
        """F_{q-1}|m> = (q-1)^{-1/2} sum_d exp(2 pi i d m/(q-1)) |d>, or its adjoint."""
        reg = self._expect(state, index, (Kind.MULT, Kind.CHAR))
        moved = np.moveaxis(state.amps, index, -1)
        if inverse:
            out = np.fft.fft(moved, axis=-1, norm="ortho")
        else:
            out = np.fft.ifft(moved, axis=-1, norm="ortho")
        new = state.replace(np.moveaxis(out, -1, index), index, self.register(to) if to else reg)
        return _check_isometry(state, new, "qft_mult")

    def apply_U_psi(self, state: StateVector, index: int) -> StateVector:
        """U_psi|x>_+ = psi(x)|x>_+."""
        self._expect(state, index, (Kind.ADD,))
        new = state.replace(_apply_diagonal(state.amps, index, self._psi_table))
        return _check_isometry(state, new, "U_psi")

    def qft_additive(self, state: StateVector, index: int, inverse: bool = False, chunk: int = 256) -> StateVector:
        """F_{F,psi}|x>_+ = q^{-1/2} sum_y psi(xy)|y>_+ (symmetric matrix)."""
        self._expect(state, index, (Kind.ADD,))
        require_nontrivial(self.psi)
        p = self.field.p
        moved = np.moveaxis(state.amps, index, -1)
        out = np.empty_like(moved)
        for start in range(0, self.q, chunk):
            ys = np.arange(start, min(start + chunk, self.q))
            expo = self._psi_exponents[self._mul_row(ys)]
            block = np.exp((-2j if inverse else 2j) * np.pi * expo / p) / math.sqrt(self.q)
            out[..., ys] = moved @ block.T
        new = state.replace(np.moveaxis(out, -1, index))
        return _check_isometry(state, new, "qft_additive")

    def apply_phase(self, state: StateVector, index: int, label: int, phase: complex) -> StateVector:
        diag = np.ones(state.registers[index].dim, dtype=complex)
        diag[label] = phase
        return _check_isometry(state, state.replace(_apply_diagonal(state.amps, index, diag)), "phase")

    # -- two-register unitaries ---------------------------------------------

    def apply_W(self, state: StateVector, char_index: int, mult_index: int, inverse: bool = False) -> StateVector:
        """W|chi>_*|a>_x = chi(a)|chi>_*|a>_x, phase exp(2 pi i m d/(q-1))."""
        self._expect(state, char_index, (Kind.CHAR,))
        self._expect(state, mult_index, (Kind.MULT,))
        k = np.arange(self.n)
        phases = np.exp((-2j if inverse else 2j) * np.pi * ((k[:, None] * k[None, :]) % self.n) / self.n)
        shape = [1] * len(state.registers)
        shape[char_index] = self.n
        shape[mult_index] = self.n
        if char_index > mult_index:
            phases = phases.T
        new = state.replace(state.amps * phases.reshape(shape))
        return _check_isometry(state, new, "W")

    def shift_char(self, state: StateVector, control: int, target: int) -> StateVector:
        """|chi>_*|chi'>_* -> |chi>_*|chi^{-1} chi'>_*."""
        self._expect(state, control, (Kind.CHAR,))
        self._expect(state, target, (Kind.CHAR,))
        amps = np.moveaxis(state.amps, (control, target), (0, 1))
        out = np.empty_like(amps)
        for m in range(self.n):
            out[m] = np.roll(amps[m], -m, axis=0)  # new[m'] = old[m' + m]
        new = state.replace(np.moveaxis(out, (0, 1), (control, target)))
        return _check_isometry(state, new, "shift_char")

    # -- classical relabelling ---------------------------------------------

    def relabel_exp(self, state: StateVector, index: int) -> StateVector:
        """|a>_x -> |a>_+ : move amplitude from label d to label a1^d."""
        self._expect(state, index, (Kind.MULT,))
        moved = np.moveaxis(state.amps, index, -1)
        out = np.zeros(moved.shape[:-1] + (self.q,), dtype=complex)
        out[..., self.field.exp_table] = moved
        new = state.replace(np.moveaxis(out, -1, index), index, self.register(Kind.ADD))
        return _check_isometry(state, new, "exp_a1")

    def relabel_log(self, state: StateVector, index: int) -> StateVector:
        """|a>_+ -> |a>_x ; the register must carry no amplitude on |0>_+."""
        self._expect(state, index, (Kind.ADD,))
        moved = np.moveaxis(state.amps, index, -1)
        zero_weight = float(np.linalg.norm(moved[..., 0]))
        if zero_weight > ISOMETRY_TOL * max(1.0, state.norm()):
            raise PreconditionError(f"log_a1 applied to a state with amplitude {zero_weight} on |0>_+")
        out = moved[..., self.field.exp_table]
        new = state.replace(np.moveaxis(out, -1, index), index, self.register(Kind.MULT))
        return _check_isometry(state, new, "log_a1")

    # -- control ------------------------------------------------------------

    def controlled(
        self,
        state: StateVector,
        control: int,
        values: Iterable[int],
        op: Callable[[StateVector], StateVector],
    ) -> StateVector:
        """Apply ``op`` on the part of ``state`` whose control label is in ``values``."""
        values = sorted(set(values))
        others = [v for v in range(state.registers[control].dim) if v not in set(values)]
        acted = op(state.project(control, values))
        if acted.registers != state.registers:
            raise SimulationError("controlled operation must restore the register layout")
        return _check_isometry(state, acted + state.project(control, others), "controlled op")

    # -- algorithms ---------------------------------------------------------

    def _guard(self) -> None:
        if self.q > MAX_PIPELINE_Q:
            raise PreconditionError(f"dense pipelines are limited to q <= {MAX_PIPELINE_Q}")
        require_nontrivial(self.psi)

    def gauss_phase_steps(self, state: StateVector, char_index: int) -> StateVector:
        """Algorithm 'single Gauss sum as a phase' acting on register ``char_index``.

        A MULT ancilla is appended, the eight steps run, and the ancilla is
        removed once it is back in ``|1>_x``.  The net effect multiplies
        ``|chi>_*`` by ``q^{-1/2} G_psi(chi)``; every chi present must be nontrivial.
        """
        self._expect(state, char_index, (Kind.CHAR,))
        on_trivial = np.linalg.norm(np.take(state.amps, 0, axis=char_index))
        if on_trivial > ISOMETRY_TOL:
            raise PreconditionError("the Gauss-phase algorithm needs a non-trivial multiplicative character")
        state = self.append_register(state, Kind.MULT)
        anc = len(state.registers) - 1
        state = self._gauss_phase_body(state, char_index, anc)
        return self.drop_register(state, anc)

    def _gauss_phase_body(self, state: StateVector, c: int, a: int) -> StateVector:
        state = self.qft_mult(state, a)
        state = self.apply_W(state, c, a)
        state = self.relabel_exp(state, a)
        state = self.qft_additive(state, a)
        state = self.relabel_log(state, a)
        state = self.apply_W(state, c, a)
        return self.qft_mult(state, a, inverse=True)

    def algorithm_gauss_phase(self, chi: MultChar) -> StateVector:
        """Start from |chi>_*|1>_x and return q^{-1/2} G_psi(chi) |chi>_*|1>_x."""
        self._guard()
        if chi.trivial:
            raise PreconditionError("the Gauss-phase algorithm needs a non-trivial multiplicative character")
        state = self.basis_state((Kind.CHAR, Kind.MULT), (chi.m, 0))
        return self._gauss_phase_body(state, 0, 1)

    def gauss_vector_steps(self, state: StateVector, index: int) -> StateVector:
        """Turn register ``index`` from |1>_x into |G_psi> (a CHAR register)."""
        state = self.qft_mult(state, index)
        state = self.relabel_exp(state, index)
        state = self.apply_U_psi(state, index)
        state = self.relabel_log(state, index)
        return self.qft_mult(state, index, to=Kind.CHAR)

    def algorithm_gauss_vector(self) -> StateVector:
        """|G_psi> = (q-1)^{-1} sum_chi G_psi(chi) |chi>_*."""
        self._guard()
        return self.gauss_vector_steps(self.basis_state((Kind.MULT,), (0,)), 0)

    def gamma_tilde_steps(self, state: StateVector, chi_index: int) -> StateVector:
        """Append a register holding |Gamma~^chi> for the chi in register ``chi_index``."""
        self._expect(state, chi_index, (Kind.CHAR,))
        state = self.append_register(state, Kind.MULT)
        aux = len(state.registers) - 1
        state = self.gauss_vector_steps(state, aux)
        state = self.shift_char(state, chi_index, aux)
        state = self.controlled(state, aux, [0], lambda s: self.apply_phase(s, aux, 0, -1.0))
        return self.controlled(state, aux, range(1, self.n), lambda s: self.gauss_phase_steps(s, aux))

    def algorithm_gamma_tilde(self, chi: MultChar) -> StateVector:
        """|chi>_* |Gamma~_psi^chi>."""
        self._guard()
        return self.gamma_tilde_steps(self.basis_state((Kind.CHAR,), (chi.m,)), 0)

    @lru_cache(maxsize=None)
    def _plane(self, m: int) -> tuple[np.ndarray, np.ndarray | None]:
        """Unit vectors |Gamma>_+ and |Gamma>_- read off one run of Z_psi^chi on |0>."""
        z = self.algorithm_gamma_tilde(MultChar(m, self.n)).register_vector(1, [m])
        e_plus = np.zeros(self.n, dtype=complex)
        e_plus[0] = z[0] / abs(z[0])
        rest = z.copy()
        rest[0] = 0
        norm = np.linalg.norm(rest)
        return e_plus, (rest / norm if norm > 0 else None)

    def rotation_R(self, state: StateVector, chi: MultChar, index: int) -> StateVector:
        """R_chi: rotate by rho_chi in span{|Gamma>_+, |Gamma>_-} on register ``index``.

        Raises if the state has weight outside that plane.
        """
        self._expect(state, index, (Kind.CHAR,))
        data = rotation_data(self.q, chi)
        e_plus, e_minus = self._plane(chi.m)
        moved = np.moveaxis(state.amps, index, -1)
        x_plus = moved @ e_plus.conj()
        proj = x_plus[..., None] * e_plus
        if e_minus is not None:
            x_minus = moved @ e_minus.conj()
            proj = proj + x_minus[..., None] * e_minus
        else:
            x_minus = np.zeros_like(x_plus)
        leak = float(np.linalg.norm(moved - proj))
        if leak > LEAKAGE_TOL * max(1.0, state.norm()):
            raise PreconditionError(f"R_chi input leaks {leak} outside the Gamma plane")
        c, s = math.cos(data.rho_chi), math.sin(data.rho_chi)
        out = moved - proj + (c * x_plus - s * x_minus)[..., None] * e_plus
        if e_minus is not None:
            out = out + (s * x_plus + c * x_minus)[..., None] * e_minus
        new = state.replace(np.moveaxis(out, -1, index))
        return _check_isometry(state, new, "R_chi")

    def kloosterman_vector_steps(self, state: StateVector, chi_index: int) -> StateVector:
        state = self.gamma_tilde_steps(state, chi_index)
        target = len(state.registers) - 1
        present = np.nonzero(np.linalg.norm(np.moveaxis(state.amps, chi_index, 0).reshape(self.n, -1), axis=1) > 0)[0]
        for m in present:
            m = int(m)
            state = self.controlled(state, chi_index, [m], lambda s, m=m: self.rotation_R(s, MultChar(m, self.n), target))
        return self.qft_mult(state, target, inverse=True, to=Kind.MULT)

    def algorithm_kloosterman_vector(self, chi: MultChar) -> StateVector:
        """|chi>_* |Kl_psi^chi>, amplitudes Kl_psi(a, chi)/sqrt(N_chi) on |a>_x."""
        self._guard()
        return self.kloosterman_vector_steps(self.basis_state((Kind.CHAR,), (chi.m,)), 0)

    def kloosterman_amplitudes(self, chi: MultChar) -> np.ndarray:
        """Second-register amplitudes of the Kloosterman-vector algorithm, indexed by d_a."""
        return self.algorithm_kloosterman_vector(chi).register_vector(1, [chi.m])
