"""Angles of Kloosterman sums and Sato-Tate equidistribution checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .characters import AddChar, MultChar, eval_chi
from .field import FiniteField
from .sums import kloosterman, kloosterman_all, kloosterman_table

SMALL_SAMPLE_Q = 1000
ROOT_MODULUS_TOL = 1e-4


class AngleError(ArithmeticError):
    pass


@dataclass(frozen=True)
class KSReport:
    sample_size: int
    ks_distance: float
    threshold: float
    small_sample: bool = False

    @property
    def passed(self) -> bool:
        return self.ks_distance < self.threshold

    def to_json(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "ks_distance": self.ks_distance,
            "threshold": self.threshold,
            "pass": self.passed,
            "small_sample": self.small_sample,
        }


@dataclass(frozen=True)
class U2Report:
    radial: KSReport
    angular: KSReport

    @property
    def passed(self) -> bool:
        return self.radial.passed and self.angular.passed

    def to_json(self) -> dict:
        return {"radial": self.radial.to_json(), "angular": self.angular.to_json(), "pass": self.passed}


def su2_angle(kl: float, q: int) -> float:
    """theta in [0, pi] with Kl = 2 sqrt(q) cos(theta); clamps roundoff at |Kl| = 2 sqrt(q)."""
    return math.acos(min(1.0, max(-1.0, float(np.real(kl)) / (2 * math.sqrt(q)))))


def angle_su2(field: FiniteField, psi: AddChar, a: int) -> float:
    return su2_angle(kloosterman(field, psi, a, MultChar(0, field.order)).real, field.q)


def u2_angles(kl: complex, twist: complex, q: int) -> tuple[float, float]:
    """Arguments of the roots of t^2 - (Kl/sqrt q) t + chi(-a), smaller first."""
    b = kl / math.sqrt(q)
    disc = np.sqrt(complex(b * b - 4 * twist))
    roots = [(b + disc) / 2, (b - disc) / 2]
    for t in roots:
        if abs(abs(t) - 1) > ROOT_MODULUS_TOL:
            raise AngleError(f"root {t} of the characteristic polynomial is not unimodular")
    # atan2 returns -pi for a negative real with imaginary part -0.0
    angles = (math.atan2(t.imag, t.real) for t in roots)
    return tuple(sorted(math.pi if a == -math.pi else a for a in angles))  # type: ignore[return-value]


def angles_u2(field: FiniteField, psi: AddChar, a: int, chi: MultChar) -> tuple[float, float]:
    kl = kloosterman(field, psi, a, chi)
    return u2_angles(kl, eval_chi(field, chi, field.neg(a)), field.q)


def sato_tate_su2_cdf(theta):
    """CDF of (2/pi) sin(theta)^2 d theta on [0, pi]."""
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < -1e-12) | (theta > math.pi + 1e-12)):
        raise ValueError("theta must lie in [0, pi]")
    return (theta - np.sin(theta) * np.cos(theta)) / math.pi


def sato_tate_radial_cdf(r):
    """CDF of (1/pi) sqrt(4 - r^2) dr on [0, 2]."""
    r = np.clip(np.asarray(r, dtype=float), 0.0, 2.0)
    return ((r / 2) * np.sqrt(4 - r * r) + 2 * np.arcsin(r / 2)) / math.pi


def uniform_angle_cdf(theta):
    return (np.clip(np.asarray(theta, dtype=float), -math.pi, math.pi) + math.pi) / (2 * math.pi)


def ks_test(samples, cdf, threshold: float = 0.05, small_sample: bool = False) -> KSReport:
    samples = np.sort(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise ValueError("KS test needs at least one sample")
    dist = sps.kstest(samples, cdf).statistic
    return KSReport(int(samples.size), float(dist), threshold, small_sample)


def su2_angles(field: FiniteField, psi: AddChar) -> np.ndarray:
    kl = kloosterman_table(field, psi, MultChar(0, field.order)).real
    return np.arccos(np.clip(kl / (2 * math.sqrt(field.q)), -1.0, 1.0))


def su2_equidistribution_report(field: FiniteField, psi: AddChar, threshold: float = 0.05) -> KSReport:
    return ks_test(su2_angles(field, psi), sato_tate_su2_cdf, threshold, field.q < SMALL_SAMPLE_Q)


def u2_samples(field: FiniteField, psi: AddChar) -> np.ndarray:
    """Kl(a, chi)/sqrt(q) over every a and every chi."""
    return kloosterman_all(field, psi).ravel() / math.sqrt(field.q)


def u2_equidistribution_report(field: FiniteField, psi: AddChar, threshold: float = 0.08) -> U2Report:
    z = u2_samples(field, psi)
    small = field.q < SMALL_SAMPLE_Q
    return U2Report(
        radial=ks_test(np.abs(z), sato_tate_radial_cdf, threshold, small),
        angular=ks_test(np.angle(z), uniform_angle_cdf, threshold, small),
    )


def histogram(samples, cdf, bins: int, lo: float, hi: float) -> list[dict]:
    """Bin counts next to the model mass of each bin."""
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(np.asarray(samples, dtype=float), bins=edges)
    mass = np.diff(cdf(edges))
    return [
        {"bin_left": float(edges[i]), "bin_right": float(edges[i + 1]), "count": int(counts[i]), "model_mass": float(mass[i])}
        for i in range(bins)
    ]


def count_inversions(values) -> int:
    """Number of consecutive increases in a sequence expected to decrease."""
    return sum(1 for x, y in zip(values, values[1:]) if y > x)
