"""Command-line interface: ``qkloosterman <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 an invariant or oracle check failed.
JSON output uses sorted keys so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .characters import AddChar, CharacterError, MultChar, canonical_psi
from .estimation import EstimationError, estimate_kloosterman
from .field import FieldError, FiniteField, make_field
from .qsim import SimulationError, Simulator
from .stats import (
    SMALL_SAMPLE_Q,
    AngleError,
    histogram,
    ks_test,
    sato_tate_radial_cdf,
    sato_tate_su2_cdf,
    u2_equidistribution_report,
    u2_samples,
    uniform_angle_cdf,
)
from .sums import InvariantViolation, SumRecord, gauss_sum, kloosterman_table, norm_constant

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CHECK_FAILED = 3
OUTPUT_DIR_ENV = "QKLOOSTERMAN_OUTPUT_DIR"
SIM_TOL = 1e-8


class CheckFailed(Exception):
    pass


def _field(args) -> FiniteField:
    return make_field(args.p, args.r)


def _psi(field: FiniteField, args) -> AddChar:
    if args.psi_values is None:
        return canonical_psi(field)
    pairs = json.loads(args.psi_values)
    return AddChar.from_values(field, [complex(re, im) for re, im in pairs])


def _element(field: FiniteField, args) -> int:
    if args.a_coeffs is not None:
        a = field.element(int(c) for c in args.a_coeffs.split(","))
    elif args.a_dlog is not None:
        a = field.exp_a1(args.a_dlog)
    else:
        raise FieldError("give --a-dlog or --a-coeffs")
    if a == 0:
        raise FieldError("a must be nonzero")
    return a


def _chars(field: FiniteField, args) -> list[MultChar]:
    if args.m_chi is None:
        return [MultChar(m, field.order) for m in range(field.order)]
    return [MultChar(args.m_chi, field.order)]


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_field_info(args) -> str:
    field = _field(args)
    psi = _psi(field, args)
    checks = {
        "dlog_bijective": bool(np.all(np.sort(field.log_table[1:]) == np.arange(field.order))),
        "a1_generates": len(set(field.exp_table.tolist())) == field.order,
        "psi_nontrivial": psi.nontrivial,
    }
    if not all(checks.values()):
        raise CheckFailed(f"field sanity checks failed: {checks}")
    info = field.descriptor()
    info.update(
        {
            "modulus_poly": _poly(field),
            "a1_poly": field.format_element(field.a1),
            "psi": psi.to_json(),
            "checks": checks,
        }
    )
    return _dumps(info)


def _poly(field: FiniteField) -> str:
    terms = [f"x^{field.r}" if field.r > 1 else "x"]
    for i in range(field.r - 1, -1, -1):
        c = field.modulus[i]
        if c:
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mono if c == 1 and i else (str(c) if i == 0 else f"{c}*{mono}"))
    return " + ".join(terms)


def cmd_kl(args) -> str:
    field = _field(args)
    psi = _psi(field, args)
    chars = _chars(field, args)
    if args.all_a:
        ds = range(field.order)
    else:
        ds = [field.dlog(_element(field, args))]
    rows = []
    for chi in chars:
        table = kloosterman_table(field, psi, chi)
        for d in ds:
            rec = SumRecord(field.q, d, chi.m, complex(table[d]))
            rec.check(field)
            rows.append(rec.to_json())
    if args.output == "csv":
        return _csv(rows, ["q", "m_chi", "d_a", "re", "im", "abs", "angle"])
    return _dumps({"field": field.descriptor(), "psi": psi.to_json(), "sums": rows})


def cmd_gauss(args) -> str:
    field = _field(args)
    psi = _psi(field, args)
    rows = []
    for chi in _chars(field, args):
        g = gauss_sum(field, psi, chi)
        expected = 1.0 if chi.trivial else math.sqrt(field.q)
        if abs(abs(g) - expected) > 1e-9 * max(1.0, expected):
            raise CheckFailed(f"|G(chi_1^{chi.m})| = {abs(g)}, expected {expected}")
        rows.append({"q": field.q, "m_chi": chi.m, "re": g.real, "im": g.imag, "abs": abs(g)})
    if args.output == "csv":
        return _csv(rows, ["q", "m_chi", "re", "im", "abs"])
    return _dumps({"field": field.descriptor(), "psi": psi.to_json(), "gauss_sums": rows})


def cmd_sim(args) -> str:
    field = _field(args)
    psi = _psi(field, args)
    sim = Simulator(field, psi)
    q, n = field.q, field.order
    m = args.m_chi if args.m_chi is not None else 0
    chi = MultChar(m, n)
    alg = args.algorithm
    if alg == "gauss-phase":
        state = sim.algorithm_gauss_phase(chi)
        expected = np.zeros((n, n), dtype=complex)
        expected[chi.m, 0] = gauss_sum(field, psi, chi) / math.sqrt(q)
    elif alg == "gauss-vector":
        state = sim.algorithm_gauss_vector()
        expected = np.array([gauss_sum(field, psi, MultChar(k, n)) for k in range(n)]) / n
    elif alg == "gamma-tilde":
        state = sim.algorithm_gamma_tilde(chi)
        gam = np.array([gauss_sum(field, psi, chi * MultChar(k, n)) * gauss_sum(field, psi, MultChar(k, n)) for k in range(n)])
        gam[1:] /= math.sqrt(q)
        expected = np.zeros((n, n), dtype=complex)
        expected[chi.m] = gam / n
    else:
        state = sim.algorithm_kloosterman_vector(chi)
        expected = np.zeros((n, n), dtype=complex)
        table = kloosterman_table(field, psi, chi)
        for d in range(n):
            SumRecord(q, d, chi.m, complex(table[d])).check(field)
        expected[chi.m] = table / math.sqrt(norm_constant(q, chi))
    err = float(np.max(np.abs(state.amps - expected.reshape(state.amps.shape))))
    out = {
        "q": q,
        "m_chi": chi.m,
        "algorithm": alg,
        "registers": [reg.kind.value for reg in state.registers],
        "norm": state.norm(),
        "max_error_vs_oracle": err,
        "amplitudes": state.dump(),
    }
    if err > SIM_TOL:
        sys.stdout.write(_dumps(out))
        raise CheckFailed(f"simulated state deviates from the oracle by {err}")
    return _dumps(out)


def cmd_estimate(args) -> str:
    field = _field(args)
    psi = _psi(field, args)
    a = _element(field, args)
    chi = MultChar(args.m_chi or 0, field.order)
    result = estimate_kloosterman(field, psi, a, chi, args.delta, args.epsilon, seed=args.seed)
    if abs(result.oracle) * math.sqrt(field.q) > 2 * math.sqrt(field.q) * (1 + 1e-9):
        raise CheckFailed("oracle sum violates the Weil bound")
    return _dumps(result.to_json())


def cmd_stats(args) -> str:
    field = _field(args)
    psi = _psi(field, args)
    if args.family == "su2":
        kl = kloosterman_table(field, psi, MultChar(0, field.order)).real
        kl_max = float(np.max(np.abs(kl)))
        samples = np.arccos(np.clip(kl / (2 * math.sqrt(field.q)), -1.0, 1.0))
        report = ks_test(samples, sato_tate_su2_cdf, args.threshold or 0.05, field.q < SMALL_SAMPLE_Q)
        hist = histogram(samples, sato_tate_su2_cdf, args.bins, 0.0, math.pi)
        payload = {"family": "su2", "q": field.q, "report": report.to_json()}
    else:
        z = u2_samples(field, psi)
        kl_max = float(np.max(np.abs(z))) * math.sqrt(field.q)
        report = u2_equidistribution_report(field, psi, args.threshold or 0.08)
        hist = histogram(np.abs(z), sato_tate_radial_cdf, args.bins, 0.0, 2.0)
        payload = {
            "family": "u2",
            "q": field.q,
            "report": report.to_json(),
            "angular_histogram": histogram(np.angle(z), uniform_angle_cdf, args.bins, -math.pi, math.pi),
        }
    if kl_max > 2 * math.sqrt(field.q) * (1 + 1e-6):
        raise CheckFailed("a Kloosterman sum violates the Weil bound")
    if args.output == "csv":
        sys.stderr.write(_dumps(payload["report"]))
        return _csv(hist, ["bin_left", "bin_right", "count", "model_mass"])
    payload["histogram"] = hist
    return _dumps(payload)


COMMANDS = {
    "field-info": cmd_field_info,
    "kl": cmd_kl,
    "gauss": cmd_gauss,
    "sim": cmd_sim,
    "estimate": cmd_estimate,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkloosterman", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="characteristic")
    common.add_argument("--r", type=int, default=1, help="extension degree")
    common.add_argument("--psi-values", help="JSON list of [re, im] values of psi on the power basis")
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--out", help=f"write to this file (relative paths resolve under ${OUTPUT_DIR_ENV})")

    element = argparse.ArgumentParser(add_help=False)
    element.add_argument("--a-dlog", type=int, help="a given by its discrete log")
    element.add_argument("--a-coeffs", help="a given by comma-separated basis coefficients")

    sub.add_parser("field-info", parents=[common], help="field parameters and sanity checks")

    p = sub.add_parser("kl", parents=[common, element], help="Kloosterman sums by direct enumeration")
    p.add_argument("--m-chi", type=int, help="character exponent (all characters if omitted)")
    p.add_argument("--all-a", action="store_true")

    p = sub.add_parser("gauss", parents=[common], help="Gauss sums")
    p.add_argument("--m-chi", type=int)

    p = sub.add_parser("sim", parents=[common], help="simulate one algorithm and compare with the oracle")
    p.add_argument("--algorithm", required=True, choices=("gauss-phase", "gauss-vector", "gamma-tilde", "kloosterman-vector"))
    p.add_argument("--m-chi", type=int)

    p = sub.add_parser("estimate", parents=[common, element], help="estimate Kl(a, chi)/sqrt(q)")
    p.add_argument("--m-chi", type=int, default=0)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("stats", parents=[common], help="Sato-Tate equidistribution check")
    p.add_argument("--family", choices=("su2", "u2"), default="su2")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--threshold", type=float)
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if not path.is_absolute() and os.environ.get(OUTPUT_DIR_ENV):
        path = Path(os.environ[OUTPUT_DIR_ENV]) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
    except (CheckFailed, InvariantViolation, AngleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (FieldError, CharacterError, EstimationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    _write(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
