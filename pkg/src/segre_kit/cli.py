"""Batch front end: parse a morphism spec file, run the requested engines,
emit a JSON report, and run the built-in golden verification suite.

Exit codes: 0 all checks pass, 1 golden/verify mismatch, 2 parse error,
3 unsupported structure for the requested engine, 4 undecided numerics.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import List, Optional

from segre_kit import __version__
from segre_kit.cycles import (
    GeneralizedCycle,
    MovingFactor,
    VarietyKind,
    VarietyRef,
    fixed_moving_split,
    multiplicity_at,
)
from segre_kit.engine import (
    compute_Ma,
    compute_Mg,
    segre_numbers,
    singular_metric_forms,
)
from segre_kit.errors import (
    InputError,
    NumericalFailureError,
    ParseError,
    UndecidedError,
    UnsupportedInputError,
)
from segre_kit.numeric import (
    RegConfig,
    crofton_moving_multiplicity,
    epsilon_mass,
    mass_balance_check,
    perturbation_root_count,
)
from segre_kit.poly import (
    PolyMatrix,
    Polynomial,
    classify_structure,
    determinant,
    parse_polynomial,
)
from segre_kit.scalars import Scalar

ALL_TASKS = ("Mg", "segre", "distinguished", "Ma", "singular_metrics", "verify")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_UNDECIDED = 4


# ---------------------------------------------------------------------------
# morphism specs
# ---------------------------------------------------------------------------

@dataclass
class MorphismSpec:
    variables: List[str]
    matrix: PolyMatrix
    engine: str = "exact"
    points: list = field(default_factory=list)
    tasks: tuple = ("Mg", "segre")
    reg: RegConfig = field(default_factory=RegConfig)
    raw: dict = field(default_factory=dict)


def parse_scalar_text(text: str) -> Scalar:
    """Exact coordinate syntax: 'a/b', 'i', '-2', '(1+2*i)'."""
    p = parse_polynomial(str(text), 0)
    return p.constant_value()


def load_spec(data: dict) -> MorphismSpec:
    try:
        variables = list(data["variables"])
        rows = data["matrix"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"spec needs 'variables' and 'matrix': {exc}")
    n = len(variables)
    matrix = PolyMatrix([[parse_polynomial(cell, n, variables) for cell in row]
                         for row in rows])
    engine = data.get("engine", "exact")
    if engine not in ("exact", "numeric", "both"):
        raise ParseError(f"unknown engine {engine!r}")
    points = []
    for pt in data.get("points", []):
        if len(pt) != n:
            raise ParseError(f"point {pt} has wrong length (n = {n})")
        points.append(tuple(parse_scalar_text(c) for c in pt))
    tasks = tuple(data.get("tasks", ["Mg", "segre"]))
    for t in tasks:
        if t not in ALL_TASKS:
            raise ParseError(f"unknown task {t!r}")
    reg = RegConfig(**data.get("reg", {}))
    return MorphismSpec(variables, matrix, engine, points, tasks, reg, dict(data))


def read_spec_file(path: str) -> MorphismSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno,
                         column=exc.colno)
    except OSError as exc:
        raise ParseError(str(exc))
    return load_spec(data)


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

def _check(name, expected, got) -> dict:
    return {"name": name, "expected": expected, "got": got,
            "pass": expected == got}


def _approx_check(name, expected, got, tol) -> dict:
    return {"name": name, "expected": expected, "got": got,
            "pass": abs(expected - got) < tol}


def run_spec(spec: MorphismSpec, skip_numeric: bool = False) -> dict:
    report = {
        "input": spec.raw,
        "results": {},
        "checks": [],
        "versions": {"segre_kit": __version__,
                     "python": sys.version.split()[0]},
        "seed": spec.reg.seed,
    }
    res = None
    needs_exact = spec.engine in ("exact", "both") and any(
        t in spec.tasks for t in ("Mg", "segre", "distinguished",
                                  "singular_metrics"))
    if spec.engine == "numeric" and any(
            t in spec.tasks for t in ("Mg", "segre", "distinguished",
                                      "singular_metrics")):
        raise UnsupportedInputError(
            "tasks Mg/segre/distinguished/singular_metrics need the exact "
            "engine; run with engine 'exact' or 'both'",
            structure=classify_structure(spec.matrix).value)
    if needs_exact:
        res = compute_Mg(spec.matrix)

    if "Mg" in spec.tasks and res is not None:
        report["results"]["Mg"] = res.to_record()
    if "segre" in spec.tasks and res is not None:
        cfg = None if skip_numeric else spec.reg
        reports = [segre_numbers(spec.matrix, pt, cfg=cfg, result=res)
                   for pt in spec.points]
        report["results"]["segre"] = [r.to_record() for r in reports]
    if "distinguished" in spec.tasks and res is not None:
        base = res.M[0].space
        report["results"]["distinguished"] = [
            {"equations": [str(q) for q in ref.equations(base)],
             "coefficient": co, "codim": k}
            for ref, co, k in _distinguished(res)]
    if "Ma" in spec.tasks:
        ma = compute_Ma(spec.matrix, cfg=spec.reg)
        report["results"]["Ma"] = [c.to_record() for c in ma]
    if "singular_metrics" in spec.tasks and res is not None:
        out = {}
        for which in ("SEGRE_E_HAT", "CHERN_E_HAT", "SEGRE_F_HAT"):
            try:
                forms = singular_metric_forms(spec.matrix, which, result=res)
            except InputError:
                continue
            out[which] = {"cycles": [c.to_record() for c in forms.cycles],
                          "metadata": forms.metadata}
        report["results"]["singular_metrics"] = out

    if spec.engine == "both" and res is not None and not skip_numeric:
        report["results"]["comparison"] = _comparison_block(spec, res)

    if "verify" in spec.tasks:
        golden = golden_suite(skip_numeric=skip_numeric, reg=spec.reg)
        report["checks"].extend(golden["checks"])
    return report


def _distinguished(res):
    from segre_kit.engine import _distinguished_from_result

    return _distinguished_from_result(res)


def _comparison_block(spec: MorphismSpec, res) -> list:
    """Exact multiplicities re-estimated through the numeric oracles."""
    out = []
    for pt in spec.points:
        for k, cyc in enumerate(res.M):
            exact = multiplicity_at(cyc, pt, oracle=_forced_oracle(spec.reg))
            numeric = _numeric_multiplicity(cyc, pt, spec.reg)
            if numeric is None:
                continue
            out.append({"point": [str(c) for c in pt], "k": k,
                        "exact": exact, "numeric": numeric,
                        "agree": exact == numeric})
    return out


def _forced_oracle(cfg):
    def oracle(factors, fixed, point):
        return crofton_moving_multiplicity(factors, fixed, point, cfg)
    return oracle


def _numeric_multiplicity(cyc: GeneralizedCycle, point, cfg) -> Optional[int]:
    """Pure fixed terms by membership, every moving term through the oracle;
    None when some term is outside the oracle's reach."""
    total = 0
    for t in cyc.terms:
        if t.omega_power > 0:
            continue
        if not t.moving:
            total += int(t.coefficient) * t.fixed.point_multiplicity(point)
            continue
        try:
            m = crofton_moving_multiplicity(list(t.moving), t.fixed, point, cfg)
        except (UndecidedError, NumericalFailureError, InputError):
            return None
        total += int(t.coefficient) * m
    return total


# ---------------------------------------------------------------------------
# golden fixtures
# ---------------------------------------------------------------------------

def _mat(rows, n) -> PolyMatrix:
    return PolyMatrix([[parse_polynomial(s, n) for s in row] for row in rows])


def _cycle_str(c: GeneralizedCycle) -> str:
    return c.describe()


def _grid(n: int):
    from itertools import product

    return [pt for pt in product([0, 1, -1, 2], repeat=n)]


def _fixed_part_map(cyc: GeneralizedCycle) -> list:
    fixed, _ = fixed_moving_split(cyc)
    return sorted([t.fixed.describe(cyc.space), str(t.coefficient)]
                  for t in fixed.terms)


def _divisor_of_monomial(space, mono) -> list:
    return sorted([VarietyRef.coordinate_subspace([v]).describe(space), str(e)]
                  for v, e in enumerate(mono) if e)


def _random_diag_monomial(rng, n_max=3, r_max=3, exp_max=3):
    """A random permuted-diagonal monomial matrix whose gcd-reduced entries
    are pairwise coprime (the exact engine's diagonal class)."""
    import numpy as np

    n = int(rng.integers(1, n_max + 1))
    r = int(rng.integers(1, r_max + 1))
    # pairwise-coprime reduced parts: each variable belongs to one slot
    owners = [int(rng.integers(0, r + 1)) - 1 for _ in range(n)]
    common = [int(rng.integers(0, 2)) for _ in range(n)]
    entries = []
    for slot in range(r):
        exps = [0] * n
        for v in range(n):
            if owners[v] == slot:
                exps[v] = int(rng.integers(0, exp_max - common[v] + 1))
            exps[v] += common[v]
        coeff = int(rng.integers(1, 4))
        entries.append(Polynomial.monomial(n, exps, coeff))
    perm_r = list(rng.permutation(r))
    perm_c = list(rng.permutation(r))
    z = Polynomial.zero(n)
    rows = [[z] * r for _ in range(r)]
    for i in range(r):
        rows[perm_r[i]][perm_c[i]] = entries[i]
    return PolyMatrix(rows)


def golden_suite(skip_numeric: bool = False,
                 reg: Optional[RegConfig] = None) -> dict:
    """Run every golden fixture plus the property suites; returns a report."""
    t_start = time.time()
    reg = reg or RegConfig()
    checks: List[dict] = []
    base2 = None

    # --- the diagonal axes pair diag(x1, x2) ------------------------------------------------
    g_diag2 = _mat([["x1", "0"], ["0", "x2"]], 2)
    res_diag2 = compute_Mg(g_diag2)
    base2 = res_diag2.M[0].space
    checks.append(_check("diag2.M1", "[x1=0] + [x2=0]", _cycle_str(res_diag2.M[1])))
    checks.append(_check("diag2.M2", "[x1=x2=0]", _cycle_str(res_diag2.M[2])))
    checks.append(_check("diag2.ring2",
                         "[x1=a2=0] + [x1=x2=0] + [x2=a1=0]",
                         _cycle_str(res_diag2.ring_M[2])))
    checks.append(_check("diag2.segre_origin", [0, 2, 1],
                         segre_numbers(g_diag2, [0, 0], result=res_diag2).numbers))

    # --- diag(x^2, x) over C^1 ----------------------------------------------
    g_pow = _mat([["x1^2", "0"], ["0", "x1"]], 1)
    res_pow = compute_Mg(g_pow)
    checks.append(_check("diagpow.M1", "3*[x1=0]", _cycle_str(res_pow.M[1])))
    checks.append(_check("diagpow.ring1", "[x1=0]", _cycle_str(res_pow.ring_M[1])))
    checks.append(_check("diagpow.ring2", "2*[x1=a2=0]",
                         _cycle_str(res_pow.ring_M[2])))

    # --- the moving-term row [x1 x2] ------------------------------------------------------
    g_s1 = _mat([["x1", "x2"]], 2)
    res_s1 = compute_Mg(g_s1)
    checks.append(_check("row2.M0", "X", _cycle_str(res_s1.M[0])))
    checks.append(_check("row2.M1", "X ^ <dd^c log(|x1|^2 + |x2|^2)>",
                         _cycle_str(res_s1.M[1])))
    checks.append(_check("row2.M2", "0", _cycle_str(res_s1.M[2])))
    checks.append(_check("row2.mult", [[1, 1, 0], [1, 0, 0], [1, 0, 0]],
                         [segre_numbers(g_s1, pt, result=res_s1).numbers
                          for pt in ([0, 0], [1, 0], [0, 1])]))
    res_s1_alt = compute_Mg(g_s1, fiber_metric_weights=(1, 2))
    checks.append(_check("row2.alt_metric",
                         "X ^ <dd^c log(2*|x1|^2 + |x2|^2)>",
                         _cycle_str(res_s1_alt.M[1])))

    # --- the common-factor diagonal diag(x1x3, x2x3, x3^2) --------------------------------------
    g_s2 = _mat([["x1*x3", "0", "0"], ["0", "x2*x3", "0"], ["0", "0", "x3^2"]], 3)
    res_s2 = compute_Mg(g_s2)
    checks.append(_check("gcd_diag3.ring1", "[x3=0]", _cycle_str(res_s2.ring_M[1])))
    checks.append(_check("gcd_diag3.ring2",
                         "[x3=0] ^ <dd^c log(|x1*a1|^2 + |x2*a2|^2)>",
                         _cycle_str(res_s2.ring_M[2])))
    checks.append(_check(
        "gcd_diag3.ring3",
        "[x1=a2=a3=0] + [x1=x2=a3=0] + 2*[x1=x2=x3=0] + 2*[x1=x3=a2=0] "
        "+ [x2=a1=a3=0] + 2*[x2=x3=a1=0] + 2*[x3=a1=a2=0]",
        _cycle_str(res_s2.ring_M[3])))
    m2_on_x3 = [t for t in res_s2.M[2].terms
                if t.moving and t.fixed.kind == VarietyKind.COORDINATE_SUBSPACE
                and t.fixed.base_zeros == frozenset([2])]
    checks.append(_check("gcd_diag3.M2_x3_term", True,
                         len(m2_on_x3) == 1 and m2_on_x3[0].coefficient > 0))
    det_s2 = determinant(g_s2)
    checks.append(_check("gcd_diag3.det_law",
                         _divisor_of_monomial(res_s2.M[1].space,
                                              det_s2.as_monomial()[1]),
                         _fixed_part_map(res_s2.M[1])))

    # --- paragraph-10 contrast pair -------------------------------------------
    g_ideal = _mat([["x1*x2", "0"], ["0", "1"]], 2)
    res_ideal = compute_Mg(g_ideal)
    checks.append(_check("sheaf.diag_x1x2_1.M1", "[x1=0] + [x2=0]",
                         _cycle_str(res_ideal.M[1])))
    checks.append(_check("sheaf.diag_x1x2_1.M2", "0", _cycle_str(res_ideal.M[2])))
    disting_pair = sorted([t.describe(base2), int(c)]
                          for t, c in _disting_pairs(res_ideal))
    checks.append(_check("sheaf.contrast.distinguished",
                         [["[x1=0]", 1], ["[x2=0]", 1]], disting_pair))
    disting_diag2 = sorted([t.describe(base2), int(c)]
                          for t, c in _disting_pairs(res_diag2))
    checks.append(_check("sheaf.diag2.distinguished",
                         [["[x1=0]", 1], ["[x1=x2=0]", 1], ["[x2=0]", 1]],
                         disting_diag2))

    # --- direct-sum invariance --------------------------------------------------
    g_dsum = _mat([["x1", "0", "0"], ["0", "x2", "0"], ["0", "0", "1"]], 2)
    res_dsum = compute_Mg(g_dsum)
    grid2 = _grid(2)
    checks.append(_check(
        "dsum.segre_grid", True,
        all(segre_numbers(g_diag2, pt, result=res_diag2).numbers
            == segre_numbers(g_dsum, pt, result=res_dsum).numbers
            for pt in grid2)))
    checks.append(_check("dsum.distinguished", disting_diag2,
                         sorted([t.describe(base2), int(c)]
                                for t, c in _disting_pairs(res_dsum))))

    # --- comparability: permutation / scalar rescaling ----------------------------
    g_cmp = _mat([["0", "2*x2"], ["(1+1*i)*x1", "0"]], 2)
    res_cmp = compute_Mg(g_cmp)
    checks.append(_check(
        "comparability.grid", True,
        all(segre_numbers(g_diag2, pt, result=res_diag2).numbers
            == segre_numbers(g_cmp, pt, result=res_cmp).numbers
            for pt in grid2)))

    # --- determinant law on random diagonal matrices -----------------------------
    import numpy as np

    rng = np.random.default_rng(reg.seed)
    det_ok, det_total = 0, 0
    while det_total < 50:
        g_rand = _random_diag_monomial(rng)
        det = determinant(g_rand)
        if det.is_zero() or det.is_constant():
            continue
        det_total += 1
        res_rand = compute_Mg(g_rand)
        expected = _divisor_of_monomial(res_rand.M[1].space,
                                        det.as_monomial()[1])
        if _fixed_part_map(res_rand.M[1]) == expected:
            det_ok += 1
    checks.append(_check("determinant_law.random50", 50, det_ok))

    # --- non-negativity and stratum properties over the corpus ---------------------
    corpus = [(g_diag2, res_diag2), (g_pow, res_pow), (g_s1, res_s1),
              (g_s2, res_s2), (g_ideal, res_ideal), (g_dsum, res_dsum)]
    nonneg = True
    stratum = True
    for g, res in corpus:
        n = g.nvars
        for pt in _grid(n):
            for k, cyc in enumerate(res.M):
                mult = multiplicity_at(cyc, pt)
                if mult < 0:
                    nonneg = False
                _fixed, moving = fixed_moving_split(cyc)
                if not moving.is_zero() and multiplicity_at(moving, pt) != 0:
                    vanishing = sum(1 for c in pt if c == 0)
                    if vanishing < k + 1:
                        stratum = False
    checks.append(_check("property.nonnegative_multiplicities", True, nonneg))
    checks.append(_check("property.moving_stratum", True, stratum))

    # --- M^a fixtures and numeric cross-checks ------------------------------------
    if not skip_numeric:
        ma1 = compute_Ma(_mat([["x1", "x2"]], 2), cfg=reg)
        checks.append(_check("quotient.Ma(x1,x2).deg2", "-1*[point (0, 0)]",
                             _cycle_str(ma1[2])))
        checks.append(_check("quotient.Ma(x1,x2).mult", -1,
                             multiplicity_at(ma1[2], [0, 0])))
        ma2 = compute_Ma(_mat([["x1^2", "x2"]], 2), cfg=reg)
        checks.append(_check("quotient.Ma(x1^2,x2).deg2", "-2*[point (0, 0)]",
                             _cycle_str(ma2[2])))
        ma3 = compute_Ma(_mat([["x1", "x1"]], 2), cfg=reg)
        checks.append(_check("quotient.Ma(x1,x1)", ["0", "[x1=0]", "0"],
                             [_cycle_str(c) for c in ma3]))

        crofton_vals = []
        factor = MovingFactor((parse_polynomial("x1", 2),
                               parse_polynomial("x2", 2)), 1)
        for pt in ([0, 0], [1, 0], [0, 1]):
            crofton_vals.append(crofton_moving_multiplicity(
                [factor], VarietyRef.whole_space(), pt, reg))
        checks.append(_check("row2.crofton_cross", [1, 0, 0], crofton_vals))

        mb = mass_balance_check(g_pow, reg)
        checks.append(_check("mass_balance.diagpow.det", 3, mb.det_count))
        checks.append(_approx_check("mass_balance.diagpow.mass", 3.0,
                                    mb.numeric_mass, 0.1))

        for label, polys, expected in (
                ("x1,x2", ["x1", "x2"], 1),
                ("x1^2,x2", ["x1^2", "x2"], 2),
                ("x1^2-x2^3,x1x2", ["x1^2 - x2^3", "x1*x2"], 5)):
            pair = tuple(parse_polynomial(s, 2) for s in polys)
            count = perturbation_root_count(pair, reg.radius, seed=reg.seed)
            est = epsilon_mass(pair, 2, reg)
            checks.append(_check(f"br.{label}.count", expected, count))
            agree = abs(est.value - count) < 0.05 * max(count, 1) and \
                round(est.value) == count
            checks.append(_check(f"br.{label}.mass_agrees", True, agree))

        est1 = epsilon_mass([parse_polynomial("x1^3", 1)], 1, reg)
        est2 = epsilon_mass([parse_polynomial("x1^3", 1)], 1, reg)
        checks.append(_check("epsmass.x3.seed_deterministic", True,
                             est1.value == est2.value))
        checks.append(_approx_check("epsmass.x3.converges", 3.0, est1.value,
                                    0.02 * 3.0))

    elapsed = time.time() - t_start
    budget = 10.0 if skip_numeric else 300.0
    checks.append(_check("runtime_budget_seconds", True, elapsed < budget))

    return {
        "input": {"suite": "golden", "skip_numeric": skip_numeric},
        "results": {"elapsed_seconds": round(elapsed, 2)},
        "checks": checks,
        "versions": {"segre_kit": __version__,
                     "python": sys.version.split()[0]},
        "seed": reg.seed,
    }


def _disting_pairs(res):
    from segre_kit.engine import _distinguished_from_result

    return [(ref, co) for ref, co, _k in _distinguished_from_result(res)]


# ---------------------------------------------------------------------------
# the mass command
# ---------------------------------------------------------------------------

def run_mass(spec: MorphismSpec) -> dict:
    """mass_balance_check for square matrices over one variable; otherwise the
    epsilon-mass table of the entry tuple at k = 1..n."""
    g = spec.matrix
    results = {}
    if g.rows == g.cols and g.nvars == 1 and not determinant(g).is_zero():
        results["mass_balance"] = mass_balance_check(g, spec.reg).to_record()
    else:
        tup = [g.entries[i][j] for i, j in g.nonzero_positions()]
        if not tup:
            raise InputError("mass of the zero matrix is not defined")
        results["epsilon_mass"] = {
            str(k): epsilon_mass(tup, k, spec.reg).to_record()
            for k in range(1, g.nvars + 1)}
    return {
        "input": spec.raw,
        "results": results,
        "checks": [],
        "versions": {"segre_kit": __version__,
                     "python": sys.version.split()[0]},
        "seed": spec.reg.seed,
    }


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _emit(report: dict, out_path: Optional[str]):
    text = json.dumps(report, indent=2, sort_keys=False)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _apply_flag_overrides(spec: MorphismSpec, args) -> MorphismSpec:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.epsilon_schedule is not None:
        overrides["epsilon_schedule"] = tuple(
            float(e) for e in args.epsilon_schedule.split(","))
    if args.radius is not None:
        overrides["radius"] = args.radius
    if args.extrapolation is not None:
        overrides["extrapolation"] = args.extrapolation
    if overrides:
        spec.reg = spec.reg.replace(**overrides)
    if args.engine is not None:
        spec.engine = args.engine
    return spec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="segre-kit",
        description="residue currents, Segre numbers and distinguished "
                    "varieties of polynomial morphisms")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "mass"):
        sp = sub.add_parser(name)
        sp.add_argument("spec", help="path to a morphism spec (JSON)")
        _common_flags(sp)
    sp = sub.add_parser("golden")
    _common_flags(sp)
    args = parser.parse_args(argv)

    try:
        if args.command == "golden":
            reg = RegConfig()
            if args.seed is not None:
                reg = reg.replace(seed=args.seed)
            if args.samples is not None:
                reg = reg.replace(samples=args.samples)
            report = golden_suite(skip_numeric=args.skip_numeric, reg=reg)
        else:
            spec = _apply_flag_overrides(read_spec_file(args.spec), args)
            if args.command == "mass":
                report = run_mass(spec)
            else:
                report = run_spec(spec, skip_numeric=args.skip_numeric)
    except ParseError as exc:
        pos = f" (line {exc.line}, column {exc.column})" \
            if exc.line or exc.column else ""
        print(f"parse error: {exc}{pos}", file=sys.stderr)
        return EXIT_PARSE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedInputError as exc:
        print(f"unsupported input: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (UndecidedError, NumericalFailureError) as exc:
        diag = getattr(exc, "diagnostics", None)
        print(f"undecided: {exc}" + (f" [{diag}]" if diag else ""),
              file=sys.stderr)
        return EXIT_UNDECIDED

    _emit(report, args.out)
    failures = [c for c in report["checks"] if not c["pass"]]
    for c in failures:
        print(f"CHECK FAILED {c['name']}: expected {c['expected']!r}, "
              f"got {c['got']!r}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def _common_flags(sp):
    sp.add_argument("--engine", choices=("exact", "numeric", "both"),
                    default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--epsilon-schedule", default=None,
                    help="comma-separated decreasing positive floats")
    sp.add_argument("--radius", type=float, default=None)
    sp.add_argument("--extrapolation", choices=("NONE", "RICHARDSON"),
                    default=None)
    sp.add_argument("--out", default=None, help="write the report here")
    sp.add_argument("--skip-numeric", action="store_true")


if __name__ == "__main__":
    sys.exit(main())
