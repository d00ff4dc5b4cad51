"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a PASS/FAIL line through the ``verdict`` fixture; the lines
are repeated in the pytest terminal summary.  Run on its own with
``pytest tests/test_acceptance.py -v``.
"""

import itertools
import math
import time

import numpy as np
from scipy import stats as sps

from qkloosterman.characters import MultChar, canonical_psi, quadratic_char
from qkloosterman.estimation import EstimationParams, ae_parameters, sample_kloosterman_estimates
from qkloosterman.field import field_for_q, make_field, prime_powers_upto
from qkloosterman.qsim import MAX_PIPELINE_Q, PreconditionError, Simulator, rotation_data
from qkloosterman.stats import (
    count_inversions,
    su2_equidistribution_report,
    u2_equidistribution_report,
)
from qkloosterman.sums import (
    gamma_fn,
    gauss_sums,
    kloosterman_all,
    mult_fourier,
    norm_constant,
    salie_sum,
)

GAUSS_QS = [3, 4, 5, 7, 8, 9, 11, 13, 16]
WORK_CONSTANT = 150  # 3M <= C sqrt(q)/(delta epsilon); measured maximum on the grid is about 137


def setup(q):
    f = field_for_q(q)
    psi = canonical_psi(f)
    return f, psi, Simulator(f, psi)


def gamma_vector(f, psi, chi):
    n = f.order
    return np.array([gamma_fn(f, psi, chi, MultChar(k, n)) for k in range(n)])


def test_criterion_1_kloosterman_state(verdict):
    start = time.perf_counter()
    worst = 0.0
    for q in prime_powers_upto(64):
        f, psi, sim = setup(q)
        table = kloosterman_all(f, psi)
        for m in range(q - 1):
            chi = MultChar(m, q - 1)
            expected = table[m] / math.sqrt(norm_constant(q, chi))
            worst = max(worst, float(np.max(np.abs(sim.kloosterman_amplitudes(chi) - expected))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 120
    verdict(1, "Kloosterman-vector state vs oracle, all q <= 64, all chi", ok, f"max err {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_criterion_2_gauss_phase(verdict):
    worst_value = worst_modulus = 0.0
    for q in GAUSS_QS:
        f, psi, sim = setup(q)
        g = gauss_sums(f, psi)
        for m in range(1, q - 1):
            coeff = sim.algorithm_gauss_phase(MultChar(m, q - 1)).amplitude(m, 0)
            worst_value = max(worst_value, abs(coeff - g[m] / math.sqrt(q)))
            worst_modulus = max(worst_modulus, abs(abs(coeff) - 1))
    ok = worst_value <= 1e-9 and worst_modulus <= 1e-9
    verdict(2, "Gauss-phase coefficient and modulus", ok, f"value err {worst_value:.2e}, modulus err {worst_modulus:.2e}")
    assert ok


def test_criterion_3_gauss_vector(verdict):
    worst_fid = worst_one = 0.0
    for q in GAUSS_QS:
        f, psi, sim = setup(q)
        oracle = gauss_sums(f, psi) / (q - 1)
        state = sim.algorithm_gauss_vector()
        worst_fid = max(worst_fid, abs(np.vdot(oracle, state.vector) - 1))
        worst_one = max(worst_one, abs(state.amplitude(0) + 1 / (q - 1)))
    ok = worst_fid <= 1e-9 and worst_one <= 1e-10
    verdict(3, "Gauss-vector fidelity and trivial-character coefficient", ok, f"fidelity err {worst_fid:.2e}, coeff err {worst_one:.2e}")
    assert ok


def _rel(x, y, scale):
    return float(np.max(np.abs(np.asarray(x) - np.asarray(y)))) / max(1.0, scale)


def test_criterion_4_identities(verdict):
    tol = 1e-6
    worst = {"conjugate": 0.0, "weil": 0.0, "M psi = G": 0.0, "parseval": 0.0, "fourier": 0.0, "salie": 0.0, "N_chi": 0.0}
    for q in prime_powers_upto(199):
        f, psi, _ = setup(q)
        n = q - 1
        table = kloosterman_all(f, psi)  # [m, d]
        m = np.arange(n)[:, None]
        d = np.arange(n)[None, :]
        d_minus_one = n // 2 if q % 2 else 0
        twist = np.exp(2j * np.pi * ((m * (d + d_minus_one)) % n) / n)
        bound = 2 * math.sqrt(q)
        worst["conjugate"] = max(worst["conjugate"], _rel(table, twist * table.conj(), bound))
        worst["weil"] = max(worst["weil"], max(0.0, float(np.max(np.abs(table))) - bound) / bound)
        g = gauss_sums(f, psi)
        worst["M psi = G"] = max(worst["M psi = G"], _rel(mult_fourier(psi.table(f)[f.exp_table]), g, math.sqrt(q)))
        worst["parseval"] = max(worst["parseval"], abs(np.sum(np.abs(g) ** 2) - n * n) / (n * n))
        for k in range(n):
            chi = MultChar(k, n)
            worst["fourier"] = max(worst["fourier"], _rel(mult_fourier(table[k]), gamma_vector(f, psi, chi), q))
            N = norm_constant(q, chi)
            worst["N_chi"] = max(worst["N_chi"], abs(np.sum(np.abs(table[k]) ** 2) - N) / N)
        if q % 2:
            chi2 = quadratic_char(f)
            salie = np.array([salie_sum(f, psi, f.exp_a1(j)) for j in range(n)])
            worst["salie"] = max(worst["salie"], _rel(salie, table[chi2.m], bound))
    ok = all(v <= tol for v in worst.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(4, "identity suite for every q <= 199", ok, detail)
    assert ok


def test_criterion_5_overlap(verdict):
    worst_match = 0.0
    worst_imag = 0.0
    bounds_ok = True
    for q in prime_powers_upto(64):
        f, psi, sim = setup(q)
        for k in range(q - 1):
            chi = MultChar(k, q - 1)
            tilde = sim.algorithm_gamma_tilde(chi).register_vector(1, [k])
            gamma = gamma_vector(f, psi, chi)
            inner = np.vdot(tilde, gamma / np.linalg.norm(gamma))
            worst_match = max(worst_match, abs(inner - rotation_data(q, chi).overlap))
            worst_imag = max(worst_imag, abs(inner.imag))
    for q in prime_powers_upto(199):
        for chi in (MultChar(0, q - 1), MultChar(1, q - 1)):
            data = rotation_data(q, chi)
            if q >= 8:
                floor = 1 - q**-2 if chi.trivial else 1 - 1 / q
                bounds_ok &= data.overlap > floor
            bounds_ok &= abs(math.sin(data.rho_chi)) <= math.sin(2 * data.theta_chi)
    ok = worst_match <= 1e-10 and worst_imag <= 1e-10 and bounds_ok
    verdict(5, "closed-form overlap vs state vector, lower bounds, |sin rho| <= sin 2 theta", ok, f"match err {worst_match:.2e}")
    assert ok


def test_criterion_6_monte_carlo(verdict):
    trials = 500
    z = sps.norm.ppf(0.995)
    rows = []
    ok = True
    for q, delta, eps in itertools.product((5, 7, 9), (0.1, 0.3), (0.2, 0.4)):
        f, psi, sim = setup(q)
        params = EstimationParams.from_contract(delta, eps, q)
        rng = np.random.default_rng([q, round(delta * 100), round(eps * 100)])
        table = kloosterman_all(f, psi)
        floor = 1 - delta - z * math.sqrt(delta * (1 - delta) / trials)
        worst = 1.0
        for k in range(q - 1):
            chi = MultChar(k, q - 1)
            for j in range(q - 1):
                a = f.exp_a1(j)
                est = sample_kloosterman_estimates(sim, a, chi, params, rng, trials)
                worst = min(worst, float(np.mean(np.abs(est - table[k, j] / math.sqrt(q)) <= eps)))
        work = params.b_applications * delta * eps / math.sqrt(q)
        rows.append((q, delta, eps, worst, work))
        ok &= worst >= floor and work <= WORK_CONSTANT
    worst_rate = min(r[3] for r in rows)
    worst_work = max(r[4] for r in rows)
    verdict(
        6,
        "estimator coverage over the (q, delta, epsilon) grid and work scaling",
        ok,
        f"lowest per-(a, chi) success {worst_rate:.3f}, max 3M*delta*eps/sqrt(q) {worst_work:.1f} <= C={WORK_CONSTANT}",
    )
    assert ok


def test_criterion_7_parameter_chain(verdict):
    k, M = ae_parameters(0.5, 0.1)
    P = EstimationParams.from_contract(0.1, 0.3, 5)
    chain = (
        abs(P.d - (1 - 0.9 ** (1 / 3))) < 1e-15
        and abs(P.e - 0.3 / (4 * math.sqrt(5))) < 1e-15
        and (P.k, P.M) == ae_parameters(P.d, P.e)
    )
    ok = (k, M) == (2, 129) and chain
    verdict(7, "parameter arithmetic d=0.5, e=0.1 -> k=2, M=129", ok, f"k={k}, M={M}")
    assert ok


def test_criterion_8_equidistribution(verdict):
    distances = {}
    for q in (101, 1009, 10007):
        f = make_field(q)
        distances[q] = su2_equidistribution_report(f, canonical_psi(f)).ks_distance
    f = make_field(1009)
    u2 = u2_equidistribution_report(f, canonical_psi(f))
    inversions = count_inversions([distances[q] for q in (101, 1009, 10007)])
    ok = distances[10007] < 0.05 and u2.radial.ks_distance < 0.08 and u2.angular.ks_distance < 0.08 and inversions <= 1
    verdict(
        8,
        "Sato-Tate KS distances",
        ok,
        f"SU(2) {distances[101]:.4f} / {distances[1009]:.4f} / {distances[10007]:.4f}, "
        f"U(2) radial {u2.radial.ks_distance:.4f}, angular {u2.angular.ks_distance:.4f}, inversions {inversions}",
    )
    assert ok


def test_criterion_9_scope(verdict):
    # Informational: simulation cost is polynomial in q, so dense pipelines are capped.
    f = field_for_q(257)
    try:
        Simulator(f, canonical_psi(f)).algorithm_gauss_vector()
        capped = False
    except PreconditionError:
        capped = True
    ok = capped and MAX_PIPELINE_Q == 256
    verdict(9, "poly(log q) and hardware claims out of scope; dense pipelines capped at q <= 256", ok, "informational")
    assert ok
