"""Generalized cycles: signed sums of varieties wedged with fiber Kaehler
powers and log-potential moving factors.

A term is ``coeff * [fixed variety] ^ omega_alpha^e ^ prod <dd^c log sum w_i|f_i|^2>^p``.
Cycles live either on the base polydisk (BASE) or on the projectivized bundle
X x P^{r-1} (PROJ); in the latter case polynomials use the ambient variable
list (x_1..x_n, a_1..a_r).

Multiplicity evaluation is rule-based: pure Lelong terms by point membership,
any positive smooth-form power contributes zero, and single first-power
moving factors with monomial arguments are evaluated by the generic-slice
order rule.  Everything else is delegated to the numeric oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from segre_kit.errors import InputError, UndecidedError, UnsupportedTermError
from segre_kit.poly import (
    Monomial,
    Polynomial,
    format_monomial,
    format_polynomial,
    monomial_degree,
    parse_polynomial,
)
from segre_kit.scalars import Scalar

EXACT = "EXACT"
ORACLE = "ORACLE"


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Space:
    """BASE = polydisk in C^n; PROJ = X x P^{r-1} with fiber coordinates."""

    kind: str  # "BASE" | "PROJ"
    n: int
    r: int = 0

    def __post_init__(self):
        if self.kind not in ("BASE", "PROJ"):
            raise InputError(f"unknown space kind {self.kind}")
        if self.kind == "PROJ" and self.r < 1:
            raise InputError("projectivization needs fiber rank >= 1")

    @property
    def total_vars(self) -> int:
        return self.n + (self.r if self.kind == "PROJ" else 0)

    @property
    def dim(self) -> int:
        return self.n + (self.r - 1 if self.kind == "PROJ" else 0)

    @property
    def fiber_dim(self) -> int:
        return self.r - 1 if self.kind == "PROJ" else 0

    def var_names(self):
        names = [f"x{i + 1}" for i in range(self.n)]
        if self.kind == "PROJ":
            names += [f"a{j + 1}" for j in range(self.r)]
        return names

    def to_record(self):
        if self.kind == "BASE":
            return {"kind": "BASE", "n": self.n}
        return {"kind": "PROJECTIVIZATION", "n": self.n, "r": self.r}

    @staticmethod
    def from_record(rec) -> "Space":
        if rec["kind"] == "BASE":
            return Space("BASE", rec["n"])
        return Space("PROJ", rec["n"], rec["r"])


def base_space(n: int) -> Space:
    return Space("BASE", n)


def proj_space(n: int, r: int) -> Space:
    return Space("PROJ", n, r)


# ---------------------------------------------------------------------------
# varieties
# ---------------------------------------------------------------------------

class VarietyKind(Enum):
    COORDINATE_SUBSPACE = "COORDINATE_SUBSPACE"
    MONOMIAL_DIVISOR = "MONOMIAL_DIVISOR"
    POINT = "POINT"
    WHOLE_SPACE = "WHOLE_SPACE"
    FIBER_HYPERSURFACE = "FIBER_HYPERSURFACE"


@dataclass(frozen=True)
class VarietyRef:
    """A supported irreducible (or monomial-divisor) variety.

    COORDINATE_SUBSPACE: base_zeros / fiber_zeros are the vanishing coordinates.
    MONOMIAL_DIVISOR: div(m) for a base monomial m (a weighted hyperplane sum).
    POINT: an explicit base point.
    FIBER_HYPERSURFACE: {sum_i f_i(x) a_i = 0} on PROJ, args = (f_1..f_r).
    """

    kind: VarietyKind
    base_zeros: frozenset = frozenset()
    fiber_zeros: frozenset = frozenset()
    monomial: Optional[Monomial] = None
    point: Optional[tuple] = None
    hypersurface: Optional[tuple] = None  # tuple of base-ambient Polynomials

    # -- constructors ------------------------------------------------------

    @staticmethod
    def whole_space() -> "VarietyRef":
        return VarietyRef(VarietyKind.WHOLE_SPACE)

    @staticmethod
    def coordinate_subspace(base_zeros=(), fiber_zeros=()) -> "VarietyRef":
        if not base_zeros and not fiber_zeros:
            return VarietyRef.whole_space()
        return VarietyRef(VarietyKind.COORDINATE_SUBSPACE,
                          base_zeros=frozenset(base_zeros),
                          fiber_zeros=frozenset(fiber_zeros))

    @staticmethod
    def monomial_divisor(m: Monomial) -> "VarietyRef":
        if monomial_degree(m) == 0:
            raise InputError("divisor of a constant monomial")
        return VarietyRef(VarietyKind.MONOMIAL_DIVISOR, monomial=tuple(m))

    @staticmethod
    def point_at(coords) -> "VarietyRef":
        return VarietyRef(VarietyKind.POINT,
                          point=tuple(Scalar.from_value(c) for c in coords))

    @staticmethod
    def fiber_hypersurface(args: Sequence[Polynomial]) -> "VarietyRef":
        if all(p.is_zero() for p in args):
            raise InputError("zero fiber hypersurface")
        return VarietyRef(VarietyKind.FIBER_HYPERSURFACE, hypersurface=tuple(args))

    # -- geometry ------------------------------------------------------------

    def codim(self, space: Space) -> int:
        k = self.kind
        if k == VarietyKind.WHOLE_SPACE:
            return 0
        if k == VarietyKind.COORDINATE_SUBSPACE:
            return len(self.base_zeros) + len(self.fiber_zeros)
        if k in (VarietyKind.MONOMIAL_DIVISOR, VarietyKind.FIBER_HYPERSURFACE):
            return 1
        if k == VarietyKind.POINT:
            return space.n
        raise InputError(f"codim of {k}")

    def is_empty(self, space: Space) -> bool:
        # all fiber coordinates cannot vanish simultaneously on P^{r-1}
        return (self.kind == VarietyKind.COORDINATE_SUBSPACE
                and space.kind == "PROJ"
                and len(self.fiber_zeros) >= space.r)

    def fiber_dimension(self, space: Space) -> int:
        """Dimension of the generic fiber of the support over the base."""
        if space.kind != "PROJ":
            return 0
        if self.kind in (VarietyKind.WHOLE_SPACE, VarietyKind.MONOMIAL_DIVISOR,
                         VarietyKind.POINT):
            return space.r - 1
        if self.kind == VarietyKind.COORDINATE_SUBSPACE:
            return space.r - 1 - len(self.fiber_zeros)
        if self.kind == VarietyKind.FIBER_HYPERSURFACE:
            return space.r - 2
        raise InputError("fiber dimension")

    def contains_point(self, point) -> bool:
        """Point membership for BASE varieties (exact coordinates)."""
        pt = [Scalar.from_value(c) for c in point]
        k = self.kind
        if k == VarietyKind.WHOLE_SPACE:
            return True
        if k == VarietyKind.COORDINATE_SUBSPACE:
            return all(pt[v].is_zero() for v in self.base_zeros)
        if k == VarietyKind.MONOMIAL_DIVISOR:
            return any(e > 0 and pt[v].is_zero()
                       for v, e in enumerate(self.monomial))
        if k == VarietyKind.POINT:
            return all((a - b).is_zero() for a, b in zip(self.point, pt))
        raise InputError(f"point membership undefined for {k}")

    def point_multiplicity(self, point) -> int:
        """Multiplicity of the associated cycle at a base point."""
        if self.kind == VarietyKind.MONOMIAL_DIVISOR:
            pt = [Scalar.from_value(c) for c in point]
            return sum(e for v, e in enumerate(self.monomial) if pt[v].is_zero())
        return 1 if self.contains_point(point) else 0

    # -- bookkeeping -----------------------------------------------------------

    def key(self):
        k = self.kind
        if k == VarietyKind.WHOLE_SPACE:
            return ("whole",)
        if k == VarietyKind.COORDINATE_SUBSPACE:
            return ("coord", tuple(sorted(self.base_zeros)),
                    tuple(sorted(self.fiber_zeros)))
        if k == VarietyKind.MONOMIAL_DIVISOR:
            return ("mdiv", self.monomial)
        if k == VarietyKind.POINT:
            return ("point", tuple((c.re, c.im) for c in self.point))
        if k == VarietyKind.FIBER_HYPERSURFACE:
            return ("fhyp", tuple(p.key() for p in self.hypersurface))
        raise InputError("key")

    def equations(self, space: Space):
        """Defining equations as polynomials in the ambient variables."""
        nv = space.total_vars
        k = self.kind
        if k == VarietyKind.WHOLE_SPACE:
            return []
        if k == VarietyKind.COORDINATE_SUBSPACE:
            eqs = [Polynomial.variable(nv, v) for v in sorted(self.base_zeros)]
            eqs += [Polynomial.variable(nv, space.n + j)
                    for j in sorted(self.fiber_zeros)]
            return eqs
        if k == VarietyKind.MONOMIAL_DIVISOR:
            m = tuple(self.monomial) + (0,) * (nv - len(self.monomial))
            return [Polynomial.monomial(nv, m)]
        if k == VarietyKind.POINT:
            return [Polynomial.variable(nv, v) - Polynomial.constant(nv, c)
                    for v, c in enumerate(self.point)]
        if k == VarietyKind.FIBER_HYPERSURFACE:
            acc = Polynomial.zero(nv)
            for j, f in enumerate(self.hypersurface):
                acc = acc + f.extend(nv) * Polynomial.variable(nv, space.n + j)
            return [acc]
        raise InputError("equations")

    def describe(self, space: Space) -> str:
        names = space.var_names()
        k = self.kind
        if k == VarietyKind.WHOLE_SPACE:
            return "X"
        if k == VarietyKind.COORDINATE_SUBSPACE:
            vs = [names[v] for v in sorted(self.base_zeros)]
            vs += [names[space.n + j] for j in sorted(self.fiber_zeros)]
            return "[" + "=".join(vs) + "=0]"
        if k == VarietyKind.MONOMIAL_DIVISOR:
            return f"[{format_monomial(self.monomial, names[:space.n])}=0]"
        if k == VarietyKind.POINT:
            return "[point (" + ", ".join(str(c) for c in self.point) + ")]"
        if k == VarietyKind.FIBER_HYPERSURFACE:
            parts = []
            base_names = names[:space.n]
            for j, f in enumerate(self.hypersurface):
                if f.is_zero():
                    continue
                parts.append(f"({format_polynomial(f, base_names)})*{names[space.n + j]}")
            return "[" + " + ".join(parts) + " = 0]"
        raise InputError("describe")


# ---------------------------------------------------------------------------
# moving factors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MovingFactor:
    """<(dd^c log sum_i w_i |f_i|^2)^power> taken outside the common zero set.

    ``weights`` realizes alternate trivial metrics (default all 1);
    ``averaged`` marks Fubini-Study-averaged pushforward representatives whose
    value-level potential differs but whose multiplicities are those of the
    stated arguments.
    """

    args: tuple  # tuple of Polynomials in the ambient of the cycle's space
    power: int = 1
    weights: tuple = ()
    averaged: bool = False

    def __post_init__(self):
        if not self.args:
            raise InputError("moving factor needs at least one argument")
        if self.power < 1:
            raise InputError("moving factor power must be >= 1")
        if self.weights and len(self.weights) != len(self.args):
            raise InputError("weights length mismatch")

    def with_power(self, p: int) -> "MovingFactor":
        return MovingFactor(self.args, p, self.weights, self.averaged)

    def key(self):
        w = tuple(Fraction(x) for x in self.weights) if self.weights else ()
        return (tuple(p.key() for p in self.args), self.power, w, self.averaged)

    def is_zero_current(self) -> bool:
        """All arguments constant: the potential is pluriharmonic, the factor is 0."""
        return all(p.is_constant() for p in self.args)

    def has_constant_arg(self) -> bool:
        return any(p.is_constant() and not p.is_zero() for p in self.args)

    def describe(self, space: Space) -> str:
        names = space.var_names()
        inner = " + ".join(
            (f"{w}*" if self.weights and self.weights[i] != 1 else "")
            + f"|{format_polynomial(p, names)}|^2"
            for i, (p, w) in enumerate(
                zip(self.args, self.weights or (1,) * len(self.args))))
        s = f"<dd^c log({inner})>"
        if self.power != 1:
            s += f"^{self.power}"
        if self.averaged:
            s += " (averaged)"
        return s

    def to_record(self, space: Space):
        names = space.var_names()
        rec = {"args": [format_polynomial(p, names) for p in self.args],
               "power": self.power}
        if self.weights:
            rec["weights"] = [str(Fraction(w)) for w in self.weights]
        if self.averaged:
            rec["averaged"] = True
        return rec


# ---------------------------------------------------------------------------
# cycle terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CycleTerm:
    coefficient: Fraction
    fixed: VarietyRef
    omega_power: int = 0
    moving: tuple = ()  # tuple of MovingFactor
    provenance: str = EXACT

    def bidegree(self, space: Space) -> int:
        return (self.fixed.codim(space) + self.omega_power
                + sum(f.power for f in self.moving))

    def key(self):
        return (self.fixed.key(), self.omega_power,
                tuple(sorted(f.key() for f in self.moving)))

    def is_pure_fixed(self) -> bool:
        return self.omega_power == 0 and not self.moving

    def describe(self, space: Space) -> str:
        parts = [self.fixed.describe(space)]
        if self.omega_power:
            parts.append(f"omega^{self.omega_power}")
        parts += [f.describe(space) for f in self.moving]
        coeff = "" if self.coefficient == 1 else f"{self.coefficient}*"
        return coeff + " ^ ".join(parts)

    def to_record(self, space: Space):
        names = space.var_names()
        return {
            "coefficient": str(self.coefficient),
            "fixed": {
                "kind": self.fixed.kind.value,
                "equations": [format_polynomial(q, names)
                              for q in self.fixed.equations(space)],
            },
            "omega_power": self.omega_power,
            "moving": [f.to_record(space) for f in self.moving],
            "bidegree": self.bidegree(space),
            "provenance": self.provenance,
        }


def term(coefficient, fixed: VarietyRef, omega_power=0, moving=(),
         provenance=EXACT) -> CycleTerm:
    return CycleTerm(Fraction(coefficient), fixed, omega_power,
                     tuple(moving), provenance)


# ---------------------------------------------------------------------------
# generalized cycles
# ---------------------------------------------------------------------------

class GeneralizedCycle:
    """A homogeneous-bidegree element of GZ(space), canonicalized."""

    __slots__ = ("space", "degree", "terms")

    def __init__(self, space: Space, degree: int, terms: Sequence[CycleTerm]):
        if degree < 0 or degree > space.dim:
            raise InputError(f"bidegree {degree} outside 0..{space.dim}")
        merged = {}
        order = {}
        for t in _expand_terms(space, terms):
            if t.coefficient == 0 or t.fixed.is_empty(space):
                continue
            if t.bidegree(space) != degree:
                raise InputError(
                    f"term {t.describe(space)} has bidegree {t.bidegree(space)}, "
                    f"cycle declares {degree}")
            k = t.key()
            if k in merged:
                old = merged[k]
                merged[k] = CycleTerm(old.coefficient + t.coefficient, old.fixed,
                                      old.omega_power, old.moving,
                                      old.provenance if old.provenance == t.provenance
                                      else ORACLE)
            else:
                merged[k] = t
                order[k] = None
        kept = [t for t in merged.values() if t.coefficient != 0]
        kept.sort(key=lambda t: (t.fixed.codim(space), t.key()))
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", tuple(kept))

    def __setattr__(self, *a):
        raise AttributeError("GeneralizedCycle is immutable")

    @staticmethod
    def zero(space: Space, degree: int) -> "GeneralizedCycle":
        return GeneralizedCycle(space, degree, [])

    @staticmethod
    def one(space: Space) -> "GeneralizedCycle":
        return GeneralizedCycle(space, 0, [term(1, VarietyRef.whole_space())])

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GeneralizedCycle") -> "GeneralizedCycle":
        if other.space != self.space or other.degree != self.degree:
            raise InputError("cannot add cycles of different space or degree")
        return GeneralizedCycle(self.space, self.degree,
                                list(self.terms) + list(other.terms))

    def scale(self, c) -> "GeneralizedCycle":
        c = Fraction(c)
        return GeneralizedCycle(self.space, self.degree,
                                [CycleTerm(t.coefficient * c, t.fixed,
                                           t.omega_power, t.moving, t.provenance)
                                 for t in self.terms])

    def __eq__(self, other):
        return (isinstance(other, GeneralizedCycle) and self.space == other.space
                and self.degree == other.degree
                and [(t.key(), t.coefficient) for t in self.terms]
                == [(t.key(), t.coefficient) for t in other.terms])

    def __hash__(self):
        return hash((self.space, self.degree,
                     tuple((t.key(), t.coefficient) for t in self.terms)))

    def describe(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(t.describe(self.space) for t in self.terms)

    def __repr__(self):
        return f"<Cycle deg {self.degree} on {self.space.kind}: {self.describe()}>"

    def to_record(self):
        return {"space": self.space.to_record(), "degree": self.degree,
                "terms": [t.to_record(self.space) for t in self.terms]}


def _expand_terms(space: Space, terms):
    """Canonical rewrites: monomial divisors expand to weighted hyperplanes,
    all-constant moving factors kill the term, and omega powers beyond the
    fiber dimension of the support vanish identically."""
    for t in terms:
        if not isinstance(t.coefficient, Fraction):
            t = CycleTerm(Fraction(t.coefficient), t.fixed, t.omega_power,
                          t.moving, t.provenance)
        if any(f.is_zero_current() for f in t.moving):
            continue
        if space.kind == "PROJ" and t.omega_power > 0:
            if t.fixed.kind == VarietyKind.FIBER_HYPERSURFACE:
                cap = space.r - 1
            elif t.fixed.kind == VarietyKind.COORDINATE_SUBSPACE:
                cap = t.fixed.fiber_dimension(space)
            else:
                cap = space.r - 1
            if t.omega_power > cap:
                continue
        if t.fixed.kind == VarietyKind.MONOMIAL_DIVISOR:
            for v, e in enumerate(t.fixed.monomial):
                if e:
                    yield CycleTerm(t.coefficient * e,
                                    VarietyRef.coordinate_subspace([v]),
                                    t.omega_power, t.moving, t.provenance)
            continue
        yield t


# ---------------------------------------------------------------------------
# wedge
# ---------------------------------------------------------------------------

def _wedge_varieties(space: Space, a: VarietyRef, b: VarietyRef) -> VarietyRef:
    if a.kind == VarietyKind.WHOLE_SPACE:
        return b
    if b.kind == VarietyKind.WHOLE_SPACE:
        return a
    ka, kb = a.kind, b.kind
    if ka == kb == VarietyKind.COORDINATE_SUBSPACE:
        if a.base_zeros & b.base_zeros or a.fiber_zeros & b.fiber_zeros:
            raise UnsupportedTermError(
                "improper intersection of coordinate subspaces")
        return VarietyRef.coordinate_subspace(a.base_zeros | b.base_zeros,
                                              a.fiber_zeros | b.fiber_zeros)
    raise UnsupportedTermError(f"wedge of {ka.value} with {kb.value} unsupported")


def wedge(c: GeneralizedCycle, factor) -> GeneralizedCycle:
    """Wedge with omega_alpha^j (pass ("omega", j)), a MovingFactor, or a
    VarietyRef.  Distributes over terms and re-canonicalizes."""
    if isinstance(factor, tuple) and len(factor) == 2 and factor[0] == "omega":
        j = factor[1]
        if c.space.kind != "PROJ":
            raise InputError("omega_alpha lives on the projectivization")
        new_deg = c.degree + j
        if new_deg > c.space.dim:
            raise InputError("bidegree overflow in wedge")
        return GeneralizedCycle(
            c.space, new_deg,
            [CycleTerm(t.coefficient, t.fixed, t.omega_power + j, t.moving,
                       t.provenance) for t in c.terms])
    if isinstance(factor, MovingFactor):
        new_deg = c.degree + factor.power
        if new_deg > c.space.dim:
            raise InputError("bidegree overflow in wedge")
        return GeneralizedCycle(
            c.space, new_deg,
            [CycleTerm(t.coefficient, t.fixed, t.omega_power,
                       t.moving + (factor,), t.provenance) for t in c.terms])
    if isinstance(factor, VarietyRef):
        new_deg = c.degree + factor.codim(c.space)
        if new_deg > c.space.dim:
            raise InputError("bidegree overflow in wedge")
        out = []
        for t in c.terms:
            for sub in _expand_terms(c.space, [term(1, factor)]):
                out.append(CycleTerm(
                    t.coefficient * sub.coefficient,
                    _wedge_varieties(c.space, t.fixed, sub.fixed),
                    t.omega_power, t.moving, t.provenance))
        return GeneralizedCycle(c.space, new_deg, out)
    raise InputError(f"cannot wedge with {factor!r}")


# ---------------------------------------------------------------------------
# fixed / moving decomposition
# ---------------------------------------------------------------------------

def fixed_moving_split(c: GeneralizedCycle):
    """Siu-type decomposition: the fixed part collects the pure Lelong terms
    whose variety has codimension exactly the cycle bidegree; the moving part
    is the remainder."""
    fixed, moving = [], []
    for t in c.terms:
        if t.is_pure_fixed() and t.fixed.codim(c.space) == c.degree:
            fixed.append(t)
        else:
            moving.append(t)
    return (GeneralizedCycle(c.space, c.degree, fixed),
            GeneralizedCycle(c.space, c.degree, moving))


# ---------------------------------------------------------------------------
# multiplicities
# ---------------------------------------------------------------------------

def _restrict_args_to_subspace(factor: MovingFactor, fixed: VarietyRef,
                               space: Space):
    """Restrict the factor's arguments to the fixed coordinate subspace;
    returns the surviving argument list or None when the restriction is
    identically zero (improper)."""
    zeros = set(fixed.base_zeros) if fixed.kind == VarietyKind.COORDINATE_SUBSPACE \
        else set()
    restricted = []
    for p in factor.args:
        q = p
        for v in zeros:
            q = q.restrict_zero(v)
        if not q.is_zero():
            restricted.append(q)
    return restricted or None


def _monomial_order_at(p: Polynomial, point) -> int:
    """ord_x of a scalar*monomial at an exact point: total exponent over the
    vanishing coordinates."""
    cm = p.as_monomial()
    if cm is None:
        raise UndecidedError("order rule needs a monomial argument")
    _, m = cm
    pt = [Scalar.from_value(c) for c in point]
    return sum(e for v, e in enumerate(m) if e and pt[v].is_zero())


def _exact_moving_multiplicity(t: CycleTerm, point, space: Space):
    """Exact rule for a single moving factor; returns an int or raises
    UndecidedError when no rule applies."""
    if len(t.moving) != 1:
        raise UndecidedError("no exact rule for products of distinct moving factors",
                             term=t)
    factor = t.moving[0]
    if factor.has_constant_arg():
        # smooth potential: positive-bidegree smooth factor has multiplicity 0
        return 0
    if any(p.as_monomial() is None for p in factor.args):
        raise UndecidedError("moving factor with non-monomial arguments", term=t)
    if t.fixed.kind not in (VarietyKind.WHOLE_SPACE,
                            VarietyKind.COORDINATE_SUBSPACE):
        raise UndecidedError("moving factor against unsupported fixed part", term=t)
    if not t.fixed.contains_point(point):
        return 0

    # strip the common monomial factor: <h f'>^p = <f'>^p outside the zero set
    from segre_kit.poly import monomial_gcd, monomial_div

    mons = [p.as_monomial()[1] for p in factor.args]
    h = mons[0]
    for m in mons[1:]:
        h = monomial_gcd(h, m)
    args = [Polynomial.monomial(p.nvars, monomial_div(m, h), p.as_monomial()[0])
            for p, m in zip(factor.args, mons)]

    reduced = MovingFactor(tuple(args), factor.power, factor.weights,
                           factor.averaged)
    if reduced.has_constant_arg():
        return 0
    s = len(reduced.args)
    if reduced.power >= s:
        # the residue-free power at or above the top level is the zero current
        return 0
    if reduced.power == 1:
        rest = _restrict_args_to_subspace(reduced, t.fixed, space)
        if rest is None:
            raise UndecidedError("fixed part inside the factor's zero set", term=t)
        return min(_monomial_order_at(p, point) for p in rest)
    raise UndecidedError("no exact rule for this moving power", term=t)


def multiplicity_at(c: GeneralizedCycle, point,
                    oracle: Optional[Callable] = None) -> int:
    """The integer multiplicity of the cycle at a base point.

    Pure fixed terms contribute their coefficient when the point lies on the
    variety; any term carrying a positive smooth-form power contributes 0;
    moving factors go through the exact order rule or the supplied oracle.
    """
    if c.space.kind != "BASE":
        raise InputError("multiplicities are evaluated on the base space")
    if len(point) != c.space.n:
        raise InputError("point dimension mismatch")
    total = Fraction(0)
    for t in c.terms:
        if t.omega_power > 0:
            continue
        if not t.moving:
            total += t.coefficient * t.fixed.point_multiplicity(point)
            continue
        try:
            m = _exact_moving_multiplicity(t, point, c.space)
        except UndecidedError:
            if oracle is None:
                raise
            m = oracle(list(t.moving), t.fixed, point)
        total += t.coefficient * m
    if total.denominator != 1:
        raise InputError(f"non-integer multiplicity {total}")
    return int(total)


def multiplicity_provenance(c: GeneralizedCycle, point) -> str:
    """EXACT when every term evaluates by rule, ORACLE otherwise."""
    for t in c.terms:
        if t.omega_power > 0 or not t.moving:
            continue
        try:
            _exact_moving_multiplicity(t, point, c.space)
        except UndecidedError:
            return ORACLE
    return EXACT


# ---------------------------------------------------------------------------
# fiber pushforward
# ---------------------------------------------------------------------------

def pushforward_fiber(c: GeneralizedCycle) -> dict:
    """Push a PROJ cycle down to the base; implemented in the engine tower
    (late import keeps the dependency one-way in module terms)."""
    from segre_kit.tower import pushforward_cycle

    return pushforward_cycle(c)


# ---------------------------------------------------------------------------
# record round-trip
# ---------------------------------------------------------------------------

def cycle_from_record(rec) -> GeneralizedCycle:
    space = Space.from_record(rec["space"])
    names = space.var_names()
    out = []
    for trec in rec["terms"]:
        fixed = _variety_from_record(trec["fixed"], space, names)
        moving = []
        for frec in trec.get("moving", []):
            args = tuple(parse_polynomial(s, space.total_vars, names)
                         for s in frec["args"])
            weights = tuple(Fraction(w) for w in frec.get("weights", [])) or ()
            moving.append(MovingFactor(args, frec.get("power", 1), weights,
                                       frec.get("averaged", False)))
        out.append(CycleTerm(Fraction(trec["coefficient"]), fixed,
                             trec.get("omega_power", 0), tuple(moving),
                             trec.get("provenance", EXACT)))
    return GeneralizedCycle(space, rec["degree"], out)


def _variety_from_record(rec, space: Space, names) -> VarietyRef:
    kind = VarietyKind(rec["kind"])
    eqs = [parse_polynomial(s, space.total_vars, names)
           for s in rec.get("equations", [])]
    if kind == VarietyKind.WHOLE_SPACE:
        return VarietyRef.whole_space()
    if kind == VarietyKind.COORDINATE_SUBSPACE:
        base, fiber = set(), set()
        for q in eqs:
            cm = q.as_monomial()
            idx = [v for v, e in enumerate(cm[1]) if e]
            v = idx[0]
            (base if v < space.n else fiber).add(v if v < space.n else v - space.n)
        return VarietyRef.coordinate_subspace(base, fiber)
    if kind == VarietyKind.MONOMIAL_DIVISOR:
        cm = eqs[0].as_monomial()
        return VarietyRef.monomial_divisor(cm[1][:space.n])
    if kind == VarietyKind.POINT:
        coords = []
        for q in eqs:
            c = -q.constant_value()
            coords.append(c)
        return VarietyRef.point_at(coords)
    if kind == VarietyKind.FIBER_HYPERSURFACE:
        eq = eqs[0]
        args = []
        for j in range(space.r):
            var = space.n + j
            part = Polynomial(space.total_vars,
                              {m: cf for m, cf in eq.terms.items() if m[var] > 0})
            coeff = Polynomial(space.total_vars,
                               {tuple(e if i != var else 0 for i, e in enumerate(m)): cf
                                for m, cf in part.terms.items()})
            args.append(coeff)
        return VarietyRef.fiber_hypersurface(args)
    raise InputError(f"cannot rebuild variety of kind {kind}")
