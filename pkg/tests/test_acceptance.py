"""Acceptance suite: one test per criterion, each printing a pass/fail line
and enforcing the stated tolerance and time budget."""

import time
from itertools import product

import numpy as np

from segre_kit.cli import _fixed_part_map, _divisor_of_monomial, _random_diag_monomial
from segre_kit.cycles import (
    MovingFactor,
    VarietyRef,
    fixed_moving_split,
    multiplicity_at,
)
from segre_kit.engine import compute_Ma, compute_Mg, segre_numbers
from segre_kit.numeric import (
    RegConfig,
    crofton_moving_multiplicity,
    epsilon_mass,
    mass_balance_check,
    perturbation_root_count,
)
from segre_kit.poly import PolyMatrix, determinant, parse_polynomial

CFG = RegConfig()


def mat(rows, n):
    return PolyMatrix([[parse_polynomial(s, n) for s in row] for row in rows])


def report(name, ok, budget, elapsed, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {name}: {status} ({elapsed:.2f}s / budget {budget:.0f}s)"
          + (f" {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"
    assert elapsed < budget, f"{name} exceeded its {budget}s budget"


def test_01_diag2_reproduction():
    t0 = time.time()
    g = mat([["x1", "0"], ["0", "x2"]], 2)
    res = compute_Mg(g)
    ok = (res.M[1].describe() == "[x1=0] + [x2=0]"
          and res.M[2].describe() == "[x1=x2=0]"
          and segre_numbers(g, [0, 0], result=res).numbers == [0, 2, 1])
    report("01 diag(x1,x2)", ok, 1.0, time.time() - t0)


def test_02_determinant_law_random():
    t0 = time.time()
    rng = np.random.default_rng(CFG.seed)
    done = 0
    ok = True
    while done < 50:
        g = _random_diag_monomial(rng, n_max=3, r_max=3, exp_max=3)
        det = determinant(g)
        if det.is_zero() or det.is_constant():
            continue
        done += 1
        res = compute_Mg(g)
        space = res.M[1].space
        if _fixed_part_map(res.M[1]) != _divisor_of_monomial(
                space, det.as_monomial()[1]):
            ok = False
    report("02 determinant-law(50)", ok, 30.0, time.time() - t0)


def test_03_moving_row():
    t0 = time.time()
    g = mat([["x1", "x2"]], 2)
    res = compute_Mg(g)
    exact_ok = (res.M[0].describe() == "X"
                and res.M[1].describe() == "X ^ <dd^c log(|x1|^2 + |x2|^2)>"
                and segre_numbers(g, [0, 0], result=res).numbers[1] == 1
                and segre_numbers(g, [1, 0], result=res).numbers[1] == 0
                and segre_numbers(g, [0, 1], result=res).numbers[1] == 0)
    factor = MovingFactor((parse_polynomial("x1", 2),
                           parse_polynomial("x2", 2)), 1)
    whole = VarietyRef.whole_space()
    oracle_ok = (
        crofton_moving_multiplicity([factor], whole, [0, 0], CFG) == 1
        and crofton_moving_multiplicity([factor], whole, [1, 0], CFG) == 0
        and crofton_moving_multiplicity([factor], whole, [0, 1], CFG) == 0)
    report("03 row [x1 x2]", exact_ok and oracle_ok, 60.0, time.time() - t0,
           f"exact={exact_ok} oracle={oracle_ok}")


def test_04_diag_powers_mass_balance():
    t0 = time.time()
    g = mat([["x1^2", "0"], ["0", "x1"]], 1)
    res = compute_Mg(g)
    exact_ok = res.M[1].describe() == "3*[x1=0]"
    mb = mass_balance_check(g, CFG.replace(samples=80000))
    ok = exact_ok and mb.det_count == 3 and abs(mb.numeric_mass - 3) < 0.1
    report("04 diag(x^2,x)", ok, 120.0, time.time() - t0,
           f"mass={mb.numeric_mass:.4f}")


def test_05_negative_multiplicity():
    t0 = time.time()
    ma1 = compute_Ma(mat([["x1", "x2"]], 2), cfg=CFG)
    ma2 = compute_Ma(mat([["x1^2", "x2"]], 2), cfg=CFG)
    count = perturbation_root_count(
        (parse_polynomial("x1^2", 2), parse_polynomial("x2", 2)), CFG.radius)
    ok = (multiplicity_at(ma1[2], [0, 0]) == -1
          and multiplicity_at(ma2[2], [0, 0]) == -2
          and count == 2)
    report("05 negative multiplicities", ok, 30.0, time.time() - t0)


def test_06_buchsbaum_rim_agreement():
    t0 = time.time()
    fixtures = [(("x1", "x2"), 1), (("x1^2", "x2"), 2),
                (("x1^2 - x2^3", "x1*x2"), 5)]
    ok = True
    details = []
    for polys, expected in fixtures:
        pair = tuple(parse_polynomial(s, 2) for s in polys)
        count = perturbation_root_count(pair, CFG.radius, seed=CFG.seed)
        est = epsilon_mass(pair, 2, CFG)
        agree = (count == expected
                 and abs(est.value - count) < 0.05 * count
                 and round(est.value) == count)
        details.append(f"{polys}: count={count} mass={est.value:.4f}")
        ok = ok and agree
    report("06 Buchsbaum-Rim agreement", ok, 180.0, time.time() - t0,
           "; ".join(details))


def test_07_sheaf_invariance():
    t0 = time.time()
    g2 = mat([["x1", "0"], ["0", "x2"]], 2)
    g3 = mat([["x1", "0", "0"], ["0", "x2", "0"], ["0", "0", "1"]], 2)
    r2, r3 = compute_Mg(g2), compute_Mg(g3)
    grid = list(product([0, 1, -1, 2], repeat=2))
    ok = all(segre_numbers(g2, pt, result=r2).numbers
             == segre_numbers(g3, pt, result=r3).numbers for pt in grid)
    d2 = sorted((t.fixed.key(), t.coefficient) for k in (1, 2)
                for t in fixed_moving_split(r2.M[k])[0].terms)
    d3 = sorted((t.fixed.key(), t.coefficient) for k in (1, 2)
                for t in fixed_moving_split(r3.M[k])[0].terms)
    ok = ok and d2 == d3
    report("07 sheaf invariance", ok, 10.0, time.time() - t0)


def test_08_determinant_ideal_contrast():
    t0 = time.time()
    res_ideal = compute_Mg(mat([["x1*x2", "0"], ["0", "1"]], 2))
    res_diag2 = compute_Mg(mat([["x1", "0"], ["0", "x2"]], 2))
    axes = {("coord", (0,), ()), ("coord", (1,), ())}
    got_ideal = {t.fixed.key() for k in (1, 2)
                 for t in fixed_moving_split(res_ideal.M[k])[0].terms}
    got_diag = {t.fixed.key() for k in (1, 2)
                for t in fixed_moving_split(res_diag2.M[k])[0].terms}
    ok = (got_ideal == axes
          and got_diag == axes | {("coord", (0, 1), ())})
    report("08 determinant-ideal contrast", ok, 10.0, time.time() - t0)


def test_09_nonnegativity_and_stratum():
    t0 = time.time()
    corpus = [
        mat([["x1", "0"], ["0", "x2"]], 2),
        mat([["x1^2", "0"], ["0", "x1"]], 1),
        mat([["x1", "x2"]], 2),
        mat([["x1*x3", "0", "0"], ["0", "x2*x3", "0"], ["0", "0", "x3^2"]], 3),
        mat([["x1*x2", "0"], ["0", "1"]], 2),
        mat([["x1", "0", "0"], ["0", "x2", "0"], ["0", "0", "1"]], 2),
    ]
    nonneg, stratum = True, True
    for g in corpus:
        res = compute_Mg(g)
        for pt in product([0, 1, -1, 2], repeat=g.nvars):
            for k, cyc in enumerate(res.M):
                m = multiplicity_at(cyc, pt)
                if m < 0 or m != int(m):
                    nonneg = False
                _f, moving = fixed_moving_split(cyc)
                if not moving.is_zero() and multiplicity_at(moving, pt) != 0:
                    if sum(1 for c in pt if c == 0) < k + 1:
                        stratum = False
    report("09 non-negativity & stratum", nonneg and stratum, 60.0,
           time.time() - t0)


def test_10_epsilon_convergence():
    t0 = time.time()
    cfg = CFG.replace(samples=min(CFG.samples, 200000))
    assert cfg.samples <= 200000
    est1 = epsilon_mass([parse_polynomial("x1^3", 1)], 1, cfg)
    est2 = epsilon_mass([parse_polynomial("x1^3", 1)], 1, cfg)
    ok = (abs(est1.value - 3) < 0.02 * 3
          and est1.value == est2.value
          and est1.per_epsilon == est2.per_epsilon)
    report("10 epsilon convergence", ok, 120.0, time.time() - t0,
           f"value={est1.value:.5f}")
