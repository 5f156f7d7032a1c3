"""The exact pipeline: lift g to the section G = g*alpha on X x P^{r-1},
run the Monge-Ampere tower there, wedge with the tautological Segre powers
and push down to the base.

Degree bookkeeping: M_k is the pushforward of the (k+r-1)-degree part of
sum_e omega^e ^ ring_M, so the list of ring currents at every level fully
determines the morphism currents.  Chart consistency is asserted for the
diagonal class: the same tower runs in every affine chart alpha_i = 1 and the
homogenized chart terms must agree with the global terms visible there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from segre_kit.cycles import (
    CycleTerm,
    GeneralizedCycle,
    MovingFactor,
    Space,
    VarietyKind,
    VarietyRef,
    base_space,
    fixed_moving_split,
    multiplicity_at,
    multiplicity_provenance,
    proj_space,
    term,
    wedge,
)
from segre_kit.errors import InputError, UnsupportedInputError
from segre_kit.poly import (
    Polynomial,
    PolyMatrix,
    StructureClass,
    classify_structure,
    determinant,
    monomial_degree,
)
from segre_kit.tower import _recognize_omega, pushforward_cycle, tower_residue

EXACT_CLASSES = (StructureClass.DIAGONAL_MONOMIAL, StructureClass.SINGLE_ROW,
                 StructureClass.COLUMN_SECTION)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectionOnPE:
    """The section G = g*alpha specialized to the affine chart alpha_chart = 1.

    ``components`` are the nonzero rows after dividing out ``common_factor``,
    the exponent-wise minimum monomial of the specialized tuple; polynomials
    live on the ambient (x_1..x_n, a_1..a_r) with the chart variable spent.
    """

    g: "PolyMatrix"
    chart: int
    components: tuple
    common_factor: tuple

    @staticmethod
    def build(g: "PolyMatrix", chart: int) -> "SectionOnPE":
        from segre_kit.poly import monomial_gcd

        n = g.nvars
        rows = [p.substitute_one(n + chart) for p in _lift_entries(g)]
        rows = [p for p in rows if not p.is_zero()]
        if not rows:
            return SectionOnPE(g, chart, (), (0,) * (n + g.cols))
        mons = [p.content_monomial() for p in rows]
        h = mons[0]
        for m in mons[1:]:
            h = monomial_gcd(h, m)
        return SectionOnPE(g, chart, tuple(p.divide_monomial(h) for p in rows), h)

    def lifted_entries(self):
        """The chart tuple itself (common factor restored)."""
        nv = self.g.nvars + self.g.cols
        h = Polynomial.monomial(nv, self.common_factor)
        return [p * h for p in self.components]


@dataclass
class MorphismResult:
    M: List[GeneralizedCycle]              # degree k = 0..n on the base
    ring_M: List[GeneralizedCycle]         # level l = 0..n+r-1 on P(E)
    Z_description: str
    engine: str = "EXACT"

    def to_record(self):
        return {
            "engine": self.engine,
            "Z": self.Z_description,
            "M": [c.to_record() for c in self.M],
            "ring_M": [c.to_record() for c in self.ring_M],
        }


@dataclass
class SegreReport:
    point: tuple
    numbers: List[int]
    distinguished: list            # (VarietyRef, int coefficient, codim)
    provenance: List[str]
    space: Space = field(default=None)

    def to_record(self):
        return {
            "point": [str(c) for c in self.point],
            "numbers": list(self.numbers),
            "distinguished": [
                {"equations": [str(q) for q in ref.equations(self.space)],
                 "coefficient": int(co), "codim": k}
                for ref, co, k in self.distinguished],
            "provenance": list(self.provenance),
        }


# ---------------------------------------------------------------------------
# the lifted section and its ring currents
# ---------------------------------------------------------------------------

def _lift_entries(g: PolyMatrix):
    """Rows of G = g*alpha as polynomials on the ambient (x, alpha)."""
    n, r, m = g.nvars, g.cols, g.rows
    nv = n + r
    rows = []
    for i in range(m):
        acc = Polynomial.zero(nv)
        for j in range(r):
            if not g.entries[i][j].is_zero():
                acc = acc + g.entries[i][j].extend(nv) * Polynomial.variable(nv, n + j)
        rows.append(acc)
    return [p for p in rows if not p.is_zero()]


def ring_M_Galpha(g: PolyMatrix) -> List[GeneralizedCycle]:
    """The list of twisted Monge-Ampere residues of G = g*alpha on P(E),
    levels 0..n+r-1, for the supported structure classes."""
    structure = classify_structure(g)
    if structure not in EXACT_CLASSES:
        raise UnsupportedInputError(
            f"structure {structure.value} is outside the exact engine; "
            "use the numeric engine", structure=structure.value)
    n, r = g.nvars, g.cols
    if r < 2:
        raise InputError("ring currents live on P(E) with rank E >= 2")
    space = proj_space(n, r)
    entries = _lift_entries(g)
    levels = space.dim + 1
    if not entries:
        # the zero morphism: Z' = P(E), only the degree-0 residue survives
        out = [GeneralizedCycle.one(space)]
        out += [GeneralizedCycle.zero(space, l) for l in range(1, levels)]
        return out
    out = [GeneralizedCycle.zero(space, 0)]
    for level in range(1, levels):
        out.append(GeneralizedCycle(space, level,
                                    tower_residue(entries, space, level)))
    if structure == StructureClass.DIAGONAL_MONOMIAL:
        _verify_charts(g, space, out)
    return out


def _verify_charts(g: PolyMatrix, space: Space, global_ring):
    """Recompute the tower in every affine chart alpha_i = 1 and check the
    homogenized chart terms against the globally visible ones."""
    n, r = space.n, space.r
    for chart in range(r):
        section = SectionOnPE.build(g, chart)
        chart_entries = section.lifted_entries()
        for level in range(1, len(global_ring)):
            local = tower_residue(chart_entries, space, level) if chart_entries else []
            local_terms = {}
            for t in local:
                ht = _homogenize_chart_term(t, space, chart)
                local_terms[ht.key()] = local_terms.get(ht.key(), Fraction(0)) \
                    + ht.coefficient
            global_visible = {}
            for t in global_ring[level].terms:
                if _visible_in_chart(t, space, chart):
                    global_visible[t.key()] = t.coefficient
            local_terms = {k: v for k, v in local_terms.items() if v != 0}
            if local_terms != global_visible:
                raise RuntimeError(
                    f"chart {chart + 1} disagrees with the global tower at "
                    f"level {level}: {local_terms} vs {global_visible}")


def _visible_in_chart(t: CycleTerm, space: Space, chart: int) -> bool:
    if t.fixed.kind == VarietyKind.COORDINATE_SUBSPACE and \
            chart in t.fixed.fiber_zeros:
        return False
    return True


def _homogenize_chart_term(t: CycleTerm, space: Space, chart: int) -> CycleTerm:
    """Map a chart-local term to global coordinates: multiply alpha-free
    moving arguments by alpha_chart and re-run the omega recognition."""
    omega = t.omega_power
    moving = []
    for f in t.moving:
        args = []
        for p in f.args:
            if any(any(m[space.n:]) for m in p.terms):
                args.append(p)
            else:
                args.append(p * Polynomial.variable(space.total_vars,
                                                    space.n + chart))
        if _recognize_omega(space, args):
            omega += f.power
        else:
            moving.append(MovingFactor(tuple(args), f.power, f.weights,
                                       f.averaged))
    return CycleTerm(t.coefficient, t.fixed, omega, tuple(moving), t.provenance)


# ---------------------------------------------------------------------------
# the morphism currents
# ---------------------------------------------------------------------------

def _strip_unit_blocks(g: PolyMatrix) -> Optional[PolyMatrix]:
    """Remove rows/columns of nonzero-constant entries that are alone in both
    their row and column: a pointwise-injective unit summand leaves M^g
    unchanged at trivial metrics.  Returns None when nothing can be removed."""
    nz = g.nonzero_positions()
    row_counts = [0] * g.rows
    col_counts = [0] * g.cols
    for i, j in nz:
        row_counts[i] += 1
        col_counts[j] += 1
    drop_rows, drop_cols = set(), set()
    for i, j in nz:
        p = g.entries[i][j]
        if p.is_constant() and row_counts[i] == 1 and col_counts[j] == 1:
            drop_rows.add(i)
            drop_cols.add(j)
    if not drop_rows or len(drop_cols) == g.cols or len(drop_rows) == g.rows:
        return None
    kept = [[g.entries[i][j] for j in range(g.cols) if j not in drop_cols]
            for i in range(g.rows) if i not in drop_rows]
    return PolyMatrix(kept)


def compute_Mg(g: PolyMatrix,
               fiber_metric_weights: Optional[Sequence] = None) -> MorphismResult:
    """All currents M^g_k, k = 0..n, for an exact-class input."""
    n, r = g.nvars, g.cols
    base = base_space(n)

    if g.is_zero():
        M = [GeneralizedCycle.one(base)]
        M += [GeneralizedCycle.zero(base, k) for k in range(1, n + 1)]
        return MorphismResult(M, [], "Z = X (zero morphism)")

    if r == 1:
        # E is a line bundle: the classical section case, no projectivization
        entries = [g.entries[i][0] for i in range(g.rows)
                   if not g.entries[i][0].is_zero()]
        M = [GeneralizedCycle(base, k, tower_residue(entries, base, k))
             if k else GeneralizedCycle.zero(base, 0) for k in range(n + 1)]
        return MorphismResult(M, [], _describe_Z(M, base))

    try:
        ring = ring_M_Galpha(g)
    except UnsupportedInputError:
        stripped = _strip_unit_blocks(g)
        if stripped is None:
            raise
        # a unit diagonal summand leaves the morphism currents unchanged
        res = compute_Mg(stripped, fiber_metric_weights)
        res.Z_description += " (computed from the unit-reduced presentation)"
        return res
    space = ring[1].space if len(ring) > 1 else proj_space(n, r)
    M = []
    for k in range(n + 1):
        acc = GeneralizedCycle.zero(base, k)
        for level, cyc in enumerate(ring):
            e = k + r - 1 - level
            if e < 0 or e > r - 1 or cyc.is_zero() or level + e > space.dim:
                continue
            part = wedge(cyc, ("omega", e)) if e else cyc
            acc = acc + pushforward_cycle(part, fiber_metric_weights)
        M.append(acc)
    return MorphismResult(M, ring, _describe_Z(M, base))


def _describe_Z(M: List[GeneralizedCycle], base: Space) -> str:
    strata = []
    for k, cyc in enumerate(M):
        if k == 0 or cyc.is_zero():
            continue
        fixed, _ = fixed_moving_split(cyc)
        for t in fixed.terms:
            strata.append(f"{t.fixed.describe(base)} (codim {k})")
    if not strata:
        return "Z is empty"
    return "Z contains " + ", ".join(dict.fromkeys(strata))


# ---------------------------------------------------------------------------
# Segre numbers and distinguished varieties
# ---------------------------------------------------------------------------

def _oracle_from_cfg(cfg):
    if cfg is None:
        return None
    from segre_kit.numeric import crofton_moving_multiplicity

    def oracle(factors, fixed, point):
        return crofton_moving_multiplicity(factors, fixed, point, cfg)

    return oracle


def segre_numbers(g: PolyMatrix, point, cfg=None,
                  result: Optional[MorphismResult] = None) -> SegreReport:
    """e_k at the query point together with the distinguished varieties."""
    res = result or compute_Mg(g)
    base = res.M[0].space
    oracle = _oracle_from_cfg(cfg)
    numbers, provenance = [], []
    for k, cyc in enumerate(res.M):
        numbers.append(multiplicity_at(cyc, point, oracle))
        provenance.append(multiplicity_provenance(cyc, point))
        if numbers[-1] < 0:
            raise RuntimeError(f"negative Segre number e_{k} = {numbers[-1]}")
    distinguished = _distinguished_from_result(res)
    return SegreReport(tuple(point), numbers, distinguished, provenance, base)


def _distinguished_from_result(res: MorphismResult):
    out = []
    for k, cyc in enumerate(res.M):
        fixed, _ = fixed_moving_split(cyc)
        for t in fixed.terms:
            if t.fixed.kind == VarietyKind.WHOLE_SPACE and k == 0:
                out.append((t.fixed, int(t.coefficient), 0))
            elif k > 0:
                out.append((t.fixed, int(t.coefficient), k))
    return out


def distinguished_varieties(g: PolyMatrix):
    """Fixed-part components over all degrees, with their coefficients."""
    res = compute_Mg(g)
    return [(ref, co) for ref, co, _k in _distinguished_from_result(res)]


# ---------------------------------------------------------------------------
# the quotient current M^a
# ---------------------------------------------------------------------------

def compute_Ma(g: PolyMatrix, cfg=None) -> List[GeneralizedCycle]:
    """The signed currents of the generically defined quotient morphism for a
    two-entry row (g1, g2); degree-n point masses may be negative."""
    if g.rows != 1 or g.cols != 2:
        raise InputError("compute_Ma expects a 1x2 matrix (g1, g2)")
    n = g.nvars
    base = base_space(n)
    g1, g2 = g.entries[0]
    if g1.is_zero() and g2.is_zero():
        raise InputError("compute_Ma needs (g1, g2) not both zero")
    out = [GeneralizedCycle.zero(base, 0)]

    if g1.is_zero() or g2.is_zero():
        live = g2 if g1.is_zero() else g1
        if live.as_monomial() is None:
            raise UnsupportedInputError(
                "single-entry quotient supported for monomial entries only")
        out.append(GeneralizedCycle(base, 1, _divisor_cycle_terms(base, live)))
        out += [GeneralizedCycle.zero(base, k) for k in range(2, n + 1)]
        return out

    from segre_kit.poly import monomial_gcd

    h1, h2 = g1.content_monomial(), g2.content_monomial()
    h = monomial_gcd(h1, h2)
    r1, r2 = g1.divide_monomial(h), g2.divide_monomial(h)

    # M^a_1 = [div h]: the exceptional component of div(a') pushes to zero
    if monomial_degree(h) > 0:
        m1_terms = [term(e, VarietyRef.coordinate_subspace([v]))
                    for v, e in enumerate(h) if e]
    else:
        m1_terms = []
    out.append(GeneralizedCycle(base, 1, m1_terms))

    if n < 2:
        return out

    point_terms = []
    zero_info = _reduced_pair_zeros(r1, r2, n, cfg)
    if zero_info == "origin":
        from segre_kit.numeric import RegConfig, perturbation_root_count

        cfg = cfg or RegConfig()
        c = perturbation_root_count((r1, r2), cfg.radius * 0.8, trials=5,
                                    seed=cfg.seed)
        origin = VarietyRef.point_at([0] * n)
        point_terms.append(term(-c, origin))

    symbolic = []
    if monomial_degree(h) > 0 and not (r1.is_constant() and r2.is_constant()):
        factor = MovingFactor((r1, r2), 1)
        for v, e in enumerate(h):
            if e:
                symbolic.append(term(-e, VarietyRef.coordinate_subspace([v]),
                                     moving=(factor,)))
    out.append(GeneralizedCycle(base, 2, point_terms + symbolic))
    out += [GeneralizedCycle.zero(base, k) for k in range(3, n + 1)]
    return out


def _divisor_cycle_terms(base: Space, p: Polynomial):
    cm = p.as_monomial()
    return [term(e, VarietyRef.coordinate_subspace([v]))
            for v, e in enumerate(cm[1]) if e]


def _reduced_pair_zeros(r1: Polynomial, r2: Polynomial, n: int, cfg):
    """Classify the common zero set of the reduced pair: 'origin', 'empty', or
    raise when it is not isolated (or cannot be confirmed)."""
    if r1.is_constant() or r2.is_constant():
        return "empty"
    m1, m2 = r1.as_monomial(), r2.as_monomial()
    if m1 is not None and m2 is not None:
        if n != 2:
            raise UnsupportedInputError(
                "reduced monomial pair has non-isolated zeros for n != 2")
        return "origin"
    # general pair: confirm numerically that the origin is the only zero
    if cfg is None:
        raise UnsupportedInputError(
            "non-monomial reduced pair needs a RegConfig for oracle confirmation")
    if n != 2:
        raise UnsupportedInputError("general-pair zero counting needs n = 2")
    if not r1.evaluate([0, 0]).is_zero() or not r2.evaluate([0, 0]).is_zero():
        raise UnsupportedInputError(
            "reduced pair does not vanish at the origin; unsupported recipe")
    from segre_kit.numeric import confirm_origin_only_zero

    if not confirm_origin_only_zero(r1, r2, cfg.radius):
        raise UnsupportedInputError(
            "reduced pair has common zeros away from the origin in the polydisk")
    return "origin"


# ---------------------------------------------------------------------------
# singular-metric Segre / Chern forms
# ---------------------------------------------------------------------------

@dataclass
class SingularMetricForms:
    which: str
    cycles: List[GeneralizedCycle]
    metadata: dict


def singular_metric_forms(g: PolyMatrix, which: str,
                          result: Optional[MorphismResult] = None
                          ) -> SingularMetricForms:
    """Forms for the singular metrics induced by g, at trivial smooth metrics:
    s(E-hat) = 1 + sum M_k (plus the smooth tail as metadata),
    c(E-hat) = 1 - sum M_k, and s(F-hat) = 1 - sum M_k for square generically
    invertible g."""
    if which not in ("SEGRE_E_HAT", "CHERN_E_HAT", "SEGRE_F_HAT"):
        raise InputError(f"unknown singular metric form {which!r}")
    if which == "SEGRE_F_HAT":
        if g.rows != g.cols:
            raise InputError("s(F-hat) needs a square matrix")
        if determinant(g).is_zero():
            raise InputError("s(F-hat) needs det g not identically zero")
    res = result or compute_Mg(g)
    base = res.M[0].space
    sign = 1 if which == "SEGRE_E_HAT" else -1
    cycles = [GeneralizedCycle.one(base)]
    for k in range(1, base.n + 1):
        cycles.append(res.M[k].scale(sign))
    metadata = {}
    if which == "SEGRE_E_HAT":
        metadata["smooth_tail"] = "1_{X\\Z} s(Im g) (not expanded; trivial metrics)"
    return SingularMetricForms(which, cycles, metadata)
