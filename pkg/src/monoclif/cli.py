"""Batch verification driver.

Subcommands mirror the library layers:

    verify   exact identity suite for a given n (Clifford relations, action
             and equivariance checks, weight table, twisted and factorization
             certificates)
    weight   conformal-weight extraction for a named symbol
    gamma    gamma matrices / factorization reports (even and odd n)
    rarita   twisted (Rarita-Schwinger) construction report
    grid     finite-difference demonstrations on flat R^n

Reports are deterministic JSON (byte-identical for identical configurations
in exact mode) or CSV for the numeric exports.  Exit codes: 0 all checks
pass, 1 a check failed, 2 an expected-negative result (e.g. asking for the
weight of the grade-preserving symbol), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .multivector import Metric, Multivector, clifford_mul_vec, clifford_word
from .represent import (
    check_equivariance,
    check_representation,
    composite_matrix,
    conformal_weight,
    epsilon_symbol,
    spin_rep,
    std_rep_forms,
    symbol_skew,
    symbol_sym0,
    symbol_trace,
)
from .scalars import QI2, random_fraction, scalar_json_fields

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NEGATIVE = 2
EXIT_USAGE = 64

EXACT_N_MAX = 6
FLOAT_N_MAX = 8
GRID_N = (2, 3, 4)


class UsageError(Exception):
    pass


def _check(name, ok, value=None, expected=None, provenance="identity"):
    entry = {"name": name, "status": "pass" if ok else "fail",
             "provenance": provenance}
    if value is not None:
        entry["value"] = value
    if expected is not None:
        entry["expected"] = expected
    return entry


def _rand_vector(rng, n):
    return Multivector.vector(n, [random_fraction(rng) for _ in range(n)])


def _rand_mv(rng, n):
    return Multivector(n, [random_fraction(rng) for _ in range(1 << n)])


# -- verify --------------------------------------------------------------------


def cmd_verify(cfg):
    n = cfg["n"]
    if not 1 <= n <= EXACT_N_MAX:
        raise UsageError(f"verify supports 1 <= n <= {EXACT_N_MAX} (got {n})")
    rng = random.Random(cfg["seed"])
    g = Metric.euclidean(n)
    checks = []

    worst = Fraction(0)
    for _ in range(cfg["trials"]):
        u, v, e = _rand_vector(rng, n), _rand_vector(rng, n), _rand_mv(rng, n)
        s = g.inner(u.vector_components(), v.vector_components())
        lhs = (clifford_word([u, v], e) + clifford_word([v, u], e)
               + (2 * s) * e)
        worst = max(worst, *(abs(c) for c in lhs.coeffs))
    checks.append(_check("clifford_relation", worst == 0, str(worst), "0"))

    worst = Fraction(0)
    for _ in range(cfg["trials"]):
        u, v, w = (_rand_vector(rng, n) for _ in range(3))
        e = _rand_mv(rng, n)
        uv = g.inner(u.vector_components(), v.vector_components())
        uw = g.inner(u.vector_components(), w.vector_components())
        lhs = (clifford_word([u, v, w], e) - clifford_word([v, w, u], e)
               - clifford_word([u, w, v], e) + clifford_word([w, v, u], e)
               + (4 * uv) * clifford_mul_vec(w, e)
               - (4 * uw) * clifford_mul_vec(v, e))
        worst = max(worst, *(abs(c) for c in lhs.coeffs))
    checks.append(_check("four_term_identity", worst == 0, str(worst), "0"))

    worst = Fraction(0)
    for _ in range(cfg["trials"]):
        e = _rand_mv(rng, n)
        total = Multivector.zero(n)
        for i in range(1, n + 1):
            ei = Multivector.basis_vector(n, i)
            total = total + clifford_word([ei, ei], e)
        diff = total + n * e
        worst = max(worst, *(abs(c) for c in diff.coeffs))
    checks.append(_check("metric_trace_identity", worst == 0, str(worst), "0"))

    quarter = Fraction(-1, 2) if cfg["perturb"] == "sigma-const" else Fraction(-1, 4)
    sp = spin_rep(n, quarter=quarter)
    defect = check_representation(sp)
    checks.append(_check("spin_action_is_representation", defect == 0,
                         repr(defect), "0"))

    if n >= 2:
        sym = epsilon_symbol(n, rep=sp)
        eq_spin = check_equivariance(sym)
        checks.append(_check("clifford_symbol_equivariant", eq_spin == 0,
                             repr(eq_spin), "0"))

        forms_sym = epsilon_symbol(n, rep=std_rep_forms(n))
        eq_forms = check_equivariance(forms_sym)
        checks.append(_check("clifford_symbol_equivariant_forms_action",
                             eq_forms == 0, repr(eq_forms), "0"))

        if eq_spin == 0:
            rep = conformal_weight(sym)
            ok = rep.weight == Fraction(-(n - 1), 2)
            checks.append(_check("dirac_weight", ok, str(rep.weight),
                                 str(Fraction(-(n - 1), 2))))
            m = composite_matrix(sym)
            diff = m - sym.matrix.scale(Fraction(-(n - 1), 2))
            checks.append(_check("dirac_weight_matrix_identity",
                                 diff.is_zero(), repr(diff.max_abs()), "0"))
        else:
            checks.append(_check("dirac_weight", False,
                                 "symbol not equivariant"))
        if eq_forms == 0:
            hodge = conformal_weight(forms_sym)
            checks.append(_check(
                "hodge_weight_absent", hodge.weight is None and hodge.residual > 0,
                str(hodge.residual), "> 0", provenance="negative-control"))

    if n >= 3:
        for sym_fn, expect in ((symbol_skew, Fraction(-1)),
                               (symbol_sym0, Fraction(1)),
                               (symbol_trace, Fraction(-(n - 1)))):
            rep = conformal_weight(sym_fn(n))
            checks.append(_check(f"weight_table_{rep.symbol}",
                                 rep.weight == expect, str(rep.weight),
                                 str(expect)))

    from .multivector import matrix_of_left_mul
    from .linalg import matmul

    dim = 1 << n
    ls = [matrix_of_left_mul(Multivector.basis_vector(n, i)) for i in range(1, n + 1)]
    ok = True
    for c in range(n):
        total = [[Fraction(0)] * dim for _ in range(dim)]
        for a in range(n):
            prod = matmul(ls[a], matmul(ls[c], ls[a]))
            total = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(total, prod)]
        ok = ok and all(
            total[i][j] == (n - 2) * ls[c][i][j]
            for i in range(dim) for j in range(dim)
        )
    checks.append(_check("triple_product_trace_identity", ok))

    if n >= 2:
        from .rarita import verify_rs_weight

        rs = verify_rs_weight(n)
        ok = all(rs["checks"].values()) if not rs["degenerate"] else all(
            v for k, v in rs["checks"].items() if k != "theta_nonzero"
        )
        w = rs["weight"].weight
        if rs["degenerate"]:
            checks.append(_check("twisted_construction", ok,
                                 "degenerate: zero symbol", "see report",
                                 provenance="oracle"))
        else:
            ok = ok and w == Fraction(-(n - 1), 2)
            checks.append(_check("twisted_weight", ok, str(w),
                                 str(Fraction(-(n - 1), 2))))

    if n >= 2:
        from .spinor import block_decompose_even, decompose_odd

        if n % 2 == 0:
            rep = block_decompose_even(n)
            ok = (rep["defect"] == 0 and rep["construction_orders_agree"]
                  and rep["dimension_identity"])
            checks.append(_check("even_factorization", ok,
                                 f"N={rep['copies']}", f"N={1 << (n // 2)}"))
        else:
            rep = decompose_odd(n)
            ok = (rep["volume_square_defect"] == 0
                  and rep["centrality_defect"] == 0
                  and rep["copies"] == rep["copies_expected"]
                  and all(e["clifford_relation_defect"] == 0
                          for e in rep["eigenspaces"].values()))
            checks.append(_check("odd_factorization", ok,
                                 f"N={rep['copies']}",
                                 f"N={rep['copies_expected']}"))

    status = EXIT_OK if all(c["status"] == "pass" for c in checks) else EXIT_FAIL
    return {"suite": "verify", "n": n, "mode": cfg["mode"],
            "seed": cfg["seed"], "checks": checks, "exit_status": status}, status


# -- weight --------------------------------------------------------------------


def cmd_weight(cfg):
    n = cfg["n"]
    symbol = cfg["symbol"]
    if symbol in ("skew", "sym0", "trace") and n < 2:
        raise UsageError("projection symbols need n >= 2")
    if not 1 <= n <= EXACT_N_MAX:
        raise UsageError(f"weight supports 1 <= n <= {EXACT_N_MAX}")
    makers = {
        "skew": lambda: symbol_skew(n),
        "sym0": lambda: symbol_sym0(n),
        "trace": lambda: symbol_trace(n),
        "clifford": lambda: epsilon_symbol(n),
        "hodge": lambda: epsilon_symbol(n, rep=std_rep_forms(n)),
    }
    if symbol in makers:
        report = conformal_weight(makers[symbol]())
    elif symbol == "rarita":
        from .rarita import verify_rs_weight

        report = verify_rs_weight(n)["weight"]
    elif symbol == "rarita-j":
        from .rarita import verify_rs_weight_j

        report = verify_rs_weight_j(n, cfg["j"])["weight"]
    else:
        raise UsageError(f"unknown symbol {symbol!r}")
    body = report.to_json_dict()
    if symbol == "clifford":
        w = report.weight
        body["operator"] = f"E[{w}] -> E[{w - 1}]"
    if report.weight is None:
        body["message"] = "no conformal weight exists"
        return {"suite": "weight", "n": n, "report": body,
                "exit_status": EXIT_NEGATIVE}, EXIT_NEGATIVE
    return {"suite": "weight", "n": n, "report": body,
            "exit_status": EXIT_OK}, EXIT_OK


# -- gamma ---------------------------------------------------------------------


def _matrix_json(rows):
    return [[scalar_json_fields(v if isinstance(v, QI2) else QI2(v))
             for v in row] for row in rows]


def cmd_gamma(cfg):
    from .spinor import (
        block_decompose_even,
        build_phi,
        decompose_odd,
        gamma_matrix,
        make_null_splitting,
    )

    n = cfg["n"]
    exact = cfg["mode"] == "exact"
    limit = EXACT_N_MAX if exact else FLOAT_N_MAX
    if not 1 <= n <= limit:
        raise UsageError(f"gamma supports 1 <= n <= {limit} in {cfg['mode']} mode")
    if n % 2 == 0:
        split = make_null_splitting(n, exact)
        gammas = [gamma_matrix(Multivector.basis_vector(n, a), split)
                  for a in range(1, n + 1)]
        block = block_decompose_even(n, exact)
        phi = build_phi(n, exact=exact)
        body = {
            "suite": "gamma", "n": n, "mode": cfg["mode"],
            "copies": block["copies"],
            "block_defect": block["defect"],
            "construction_orders_agree": block["construction_orders_agree"],
        }
        if cfg["format"] == "csv":
            lines = ["name,row,col,re,im"]
            for a, g in enumerate(gammas, start=1):
                for r, rowvals in enumerate(g):
                    for c, v in enumerate(rowvals):
                        z = complex(v) if v else 0j
                        lines.append(f"gamma{a},{r},{c},{z.real!r},{z.imag!r}")
            phid = phi.to_dense()
            for r, rowvals in enumerate(phid):
                for c, v in enumerate(rowvals):
                    z = complex(v) if v else 0j
                    lines.append(f"phi,{r},{c},{z.real!r},{z.imag!r}")
            ok = block["defect"] == 0 if exact else block["defect"] < cfg["tolerance"]
            return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_FAIL
        if exact:
            body["gamma"] = {f"gamma{a}": _matrix_json(g)
                             for a, g in enumerate(gammas, start=1)}
            body["phi"] = _matrix_json(phi.to_dense())
        ok = block["defect"] == 0 if exact else block["defect"] < cfg["tolerance"]
        body["exit_status"] = EXIT_OK if ok else EXIT_FAIL
        return body, body["exit_status"]
    rep = decompose_odd(n)
    ok = (rep["volume_square_defect"] == 0 and rep["centrality_defect"] == 0
          and rep["copies"] == rep["copies_expected"])
    body = {"suite": "gamma", "n": n, "mode": cfg["mode"],
            "construction": "volume-idempotent (choice: no canonical odd splitting)",
            "report": {
                "volume_square_defect": rep["volume_square_defect"],
                "centrality_defect": rep["centrality_defect"],
                "spinor_dim": rep["spinor_dim"],
                "copies": rep["copies"],
                "eigenspaces": rep["eigenspaces"],
            },
            "exit_status": EXIT_OK if ok else EXIT_FAIL}
    return body, body["exit_status"]


# -- rarita --------------------------------------------------------------------


def cmd_rarita(cfg):
    from .rarita import verify_rs_weight, verify_rs_weight_j

    n = cfg["n"]
    if not 2 <= n <= EXACT_N_MAX:
        raise UsageError(f"rarita supports 2 <= n <= {EXACT_N_MAX}")
    if cfg["j"] > 1:
        rep = verify_rs_weight_j(n, cfg["j"])
    else:
        rep = verify_rs_weight(n)
    ok = all(v for k, v in rep["checks"].items()
             if k != "theta_nonzero" or not rep["degenerate"])
    body = {"suite": "rarita", "n": n, "j": cfg["j"],
            "dims": rep["dims"],
            "weight": rep["weight"].to_json_dict(),
            "checks": {k: bool(v) for k, v in rep["checks"].items()},
            "degenerate": rep["degenerate"],
            "exit_status": EXIT_OK if ok else EXIT_FAIL}
    return body, body["exit_status"]


# -- grid ----------------------------------------------------------------------


def cmd_grid(cfg):
    from . import flatfield as ff

    n = cfg["n"]
    if n not in GRID_N:
        raise UsageError(f"grid supports n in {GRID_N}")
    factor = ff.exp_factor() if cfg["omega"] == "exp" else ff.sphere_factor()
    test = cfg["test"]
    h_list = cfg["h"]
    tol = cfg["tolerance"]

    if test == "dirac-invariance":
        w = cfg["w"] if cfg["w"] is not None else Fraction(-(n - 1), 2)
        spec = ff.GridSpec.cube(n, -1.0, 1.0, h_list[0])
        rep = ff.invariance_residual(spec, ff.mixed_grade_sample(n), factor, float(w))
        expected = abs(float(w) + (n - 1) / 2.0) * rep["max_clifford_term"]
        ok = abs(rep["residual"] - expected) <= tol
        body = {"suite": "grid", "test": test, "n": n, "omega": factor.name,
                "w": str(w), "residual": rep["residual"],
                "predicted": expected,
                "exit_status": EXIT_OK if ok else EXIT_FAIL}
        return body, body["exit_status"]

    if test == "hodge-noninvariance":
        spec = ff.GridSpec.cube(n, -1.0, 1.0, h_list[0])
        rep = ff.hodge_minimized_residual(spec, ff.mixed_grade_sample(n), factor)
        # the control *passes* when the residual stays away from zero
        ok = rep["normalized_residual"] > 0.01
        body = {"suite": "grid", "test": test, "n": n, "omega": factor.name,
                "w_star": rep["w_star"],
                "normalized_residual": rep["normalized_residual"],
                "exit_status": EXIT_OK if ok else EXIT_FAIL}
        return body, body["exit_status"]

    if test in ("cauchy", "kelvin", "convergence"):
        name = {"cauchy": "cauchy", "kelvin": "kelvin-monogenic",
                "convergence": "cauchy"}[test]
        out = ff.convergence_study(name, h_list, n)
        ok = all(o >= 1.9 for o in out["orders"])
        if cfg["format"] == "csv":
            lines = ["h,residual,order"]
            for i, row in enumerate(out["rows"]):
                order = "" if i == 0 else repr(out["orders"][i - 1])
                lines.append(f"{row['h']!r},{row['residual']!r},{order}")
            return "\n".join(lines) + "\n", EXIT_OK if ok else EXIT_FAIL
        body = {"suite": "grid", "test": test, "n": n, "study": out,
                "exit_status": EXIT_OK if ok else EXIT_FAIL}
        return body, body["exit_status"]

    raise UsageError(f"unknown grid test {test!r}")


# -- plumbing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="monoclif", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", help="JSON file with default flag values")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--mode", choices=["exact", "float"], default=None)
        sp.add_argument("--format", choices=["json", "csv"], default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--tolerance", type=float, default=None)

    sp = sub.add_parser("verify", help="exact identity suite")
    common(sp)
    sp.add_argument("--perturb", choices=["sigma-const"], default=None)
    sp.add_argument("--trials", type=int, default=None)

    sp = sub.add_parser("weight", help="conformal weight extraction")
    common(sp)
    sp.add_argument("--symbol", default=None,
                    choices=["skew", "sym0", "trace", "clifford", "hodge",
                             "rarita", "rarita-j"])
    sp.add_argument("--j", type=int, default=None)

    sp = sub.add_parser("gamma", help="gamma matrices and factorization")
    common(sp)

    sp = sub.add_parser("rarita", help="twisted construction report")
    common(sp)
    sp.add_argument("--j", type=int, default=None)

    sp = sub.add_parser("grid", help="flat-space finite-difference tests")
    common(sp)
    sp.add_argument("--test", default=None,
                    choices=["dirac-invariance", "hodge-noninvariance",
                             "cauchy", "kelvin", "convergence"])
    sp.add_argument("--omega", choices=["exp", "sphere"], default=None)
    sp.add_argument("--w", default=None)
    sp.add_argument("--h", default=None,
                    help="comma-separated spacings, e.g. 0.1,0.05")

    return p


_DEFAULTS = {
    "n": 3, "mode": "exact", "format": "json", "out": None, "seed": 0,
    "tolerance": None, "perturb": None, "trials": 100, "symbol": "clifford",
    "j": 1, "test": "dirac-invariance", "omega": "exp", "w": None,
    "h": "0.1,0.05",
}


def resolve_config(args):
    cfg = dict(_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(_DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        cfg[key] = val
    if cfg["mode"] == "exact" and cfg["tolerance"] is not None:
        raise UsageError("exact mode rejects --tolerance")
    if cfg["tolerance"] is None:
        cfg["tolerance"] = 1e-9
    if isinstance(cfg["h"], str):
        try:
            cfg["h"] = [float(x) for x in cfg["h"].split(",") if x]
        except ValueError as exc:
            raise UsageError(f"bad --h list: {exc}")
    if cfg["w"] is not None and not isinstance(cfg["w"], Fraction):
        try:
            cfg["w"] = Fraction(str(cfg["w"]))
        except ValueError as exc:
            raise UsageError(f"bad --w value: {exc}")
    if cfg["j"] < 1:
        raise UsageError("--j must be >= 1")
    return cfg


def emit(result, cfg):
    if isinstance(result, str):
        text = result
    else:
        text = json.dumps(result, indent=2, default=str) + "\n"
    if cfg.get("out"):
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        handler = {
            "verify": cmd_verify,
            "weight": cmd_weight,
            "gamma": cmd_gamma,
            "rarita": cmd_rarita,
            "grid": cmd_grid,
        }[args.command]
        result, status = handler(cfg)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    emit(result, cfg)
    return status


if __name__ == "__main__":
    sys.exit(main())
