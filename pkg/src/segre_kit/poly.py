"""Exact multivariate polynomials over Gaussian rationals, and the input matrices.

Monomials are dense exponent tuples (ambient dimension capped at 8), terms are
kept canonical (no zero coefficients), and equality is structural, so golden
outputs are bit-stable.  The text syntax round-trips exactly:
``parse_polynomial(str(p), n) == p``.
"""

from __future__ import annotations

import itertools
import re as _re
from enum import Enum
from typing import Iterable, Optional, Sequence

from segre_kit.errors import InputError, ParseError
from segre_kit.scalars import Scalar, format_scalar

MAX_VARS = 8


# ---------------------------------------------------------------------------
# monomials
# ---------------------------------------------------------------------------

Monomial = tuple  # tuple of non-negative ints, one per ambient variable


def monomial_one(nvars: int) -> Monomial:
    return (0,) * nvars


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    """True when a | b exponent-wise."""
    return all(x <= y for x, y in zip(a, b))


def monomial_div(b: Monomial, a: Monomial) -> Monomial:
    if not monomial_divides(a, b):
        raise InputError(f"monomial {a} does not divide {b}")
    return tuple(y - x for x, y in zip(a, b))


def monomial_gcd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(min(x, y) for x, y in zip(a, b))


def monomial_degree(a: Monomial) -> int:
    return sum(a)


def format_monomial(m: Monomial, names: Optional[Sequence[str]] = None) -> str:
    if names is None:
        names = [f"x{i + 1}" for i in range(len(m))]
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def _term_sort_key(m: Monomial):
    # graded lex, used only for stable printing / hashing order
    return (-monomial_degree(m), tuple(-e for e in m))


class Polynomial:
    """A polynomial in ``nvars`` variables with Scalar coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        if nvars < 0 or nvars > MAX_VARS:
            raise InputError(f"ambient dimension {nvars} outside 0..{MAX_VARS}")
        clean = {}
        for m, c in (terms or {}).items():
            c = Scalar.from_value(c)
            if len(m) != nvars:
                raise InputError("monomial length does not match ambient dimension")
            if any(e < 0 for e in m):
                raise InputError("negative exponent")
            if not c.is_zero():
                clean[tuple(m)] = clean.get(tuple(m), Scalar(0)) + c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms",
                           {m: c for m, c in clean.items() if not c.is_zero()})

    def __setattr__(self, *a):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, {})

    @staticmethod
    def constant(nvars: int, c) -> "Polynomial":
        return Polynomial(nvars, {monomial_one(nvars): Scalar.from_value(c)})

    @staticmethod
    def variable(nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise InputError(f"variable index {index} out of range")
        m = [0] * nvars
        m[index] = 1
        return Polynomial(nvars, {tuple(m): Scalar(1)})

    @staticmethod
    def monomial(nvars: int, exponents: Iterable[int], coeff=1) -> "Polynomial":
        return Polynomial(nvars, {tuple(exponents): Scalar.from_value(coeff)})

    # -- structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(monomial_degree(m) == 0 for m in self.terms)

    def constant_value(self) -> Scalar:
        return self.terms.get(monomial_one(self.nvars), Scalar(0))

    def as_monomial(self):
        """Return (coeff, exponents) when the polynomial is a single term, else None."""
        if len(self.terms) != 1:
            return None
        (m, c), = self.terms.items()
        return c, m

    def total_degree(self) -> int:
        return max((monomial_degree(m) for m in self.terms), default=0)

    def degree_in(self, var: int) -> int:
        return max((m[var] for m in self.terms), default=0)

    def content_monomial(self) -> Monomial:
        """Exponent-wise min over terms; the largest monomial dividing the polynomial."""
        if self.is_zero():
            return monomial_one(self.nvars)
        it = iter(self.terms)
        g = next(it)
        for m in it:
            g = monomial_gcd(g, m)
        return g

    def key(self):
        """Hashable canonical form."""
        return (self.nvars,
                tuple(sorted(((m, c.re, c.im) for m, c in self.terms.items()),
                             key=lambda t: _term_sort_key(t[0]))))

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise InputError("mixed ambient dimensions")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        o = self._coerce(other)
        terms = dict(self.terms)
        for m, c in o.terms.items():
            terms[m] = terms.get(m, Scalar(0)) + c
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)) or other.__class__.__name__ == "Fraction":
            c = Scalar.from_value(other)
            return Polynomial(self.nvars, {m: v * c for m, v in self.terms.items()})
        o = self._coerce(other)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = monomial_mul(m1, m2)
                terms[m] = terms.get(m, Scalar(0)) + c1 * c2
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InputError("negative power")
        out = Polynomial.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash(self.key())

    # -- calculus ---------------------------------------------------------

    def differentiate(self, var: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``var``."""
        if not 0 <= var < self.nvars:
            raise InputError(f"variable index {var} out of range for n={self.nvars}")
        terms = {}
        for m, c in self.terms.items():
            if m[var] == 0:
                continue
            mm = list(m)
            mm[var] -= 1
            terms[tuple(mm)] = terms.get(tuple(mm), Scalar(0)) + c * m[var]
        return Polynomial(self.nvars, terms)

    def evaluate(self, point):
        """Evaluate at a point.

        Exact Scalars in, exact Scalar out; any float/complex coordinate
        switches the whole evaluation to machine complex arithmetic.
        """
        if len(point) != self.nvars:
            raise InputError(f"point has length {len(point)}, expected {self.nvars}")
        exact = all(isinstance(c, (int, Scalar)) or c.__class__.__name__ == "Fraction"
                    for c in point)
        if exact:
            pt = [Scalar.from_value(c) for c in point]
            acc = Scalar(0)
            for m, c in self.terms.items():
                v = c
                for x, e in zip(pt, m):
                    for _ in range(e):
                        v = v * x
                acc = acc + v
            return acc
        pt = [complex(c) for c in point]
        acc = 0j
        for m, c in self.terms.items():
            v = complex(c)
            for x, e in zip(pt, m):
                v *= x ** e
            acc += v
        return acc

    def eval_array(self, points):
        """Vectorised evaluation: points is an (N, nvars) complex ndarray."""
        import numpy as np

        acc = np.zeros(points.shape[0], dtype=complex)
        for m, c in self.terms.items():
            v = np.full(points.shape[0], complex(c))
            for j, e in enumerate(m):
                if e:
                    v = v * points[:, j] ** e
            acc += v
        return acc

    # -- variable plumbing -------------------------------------------------

    def restrict_zero(self, var: int) -> "Polynomial":
        """Set variable ``var`` to 0."""
        return Polynomial(self.nvars,
                          {m: c for m, c in self.terms.items() if m[var] == 0})

    def divide_monomial(self, h: Monomial) -> "Polynomial":
        return Polynomial(self.nvars,
                          {monomial_div(m, h): c for m, c in self.terms.items()})

    def extend(self, nvars: int, offset: int = 0) -> "Polynomial":
        """Re-embed into a larger ambient, shifting variable indices by ``offset``."""
        if offset + self.nvars > nvars:
            raise InputError("extension does not fit")
        terms = {}
        for m, c in self.terms.items():
            mm = [0] * nvars
            for j, e in enumerate(m):
                mm[offset + j] = e
            terms[tuple(mm)] = c
        return Polynomial(nvars, terms)

    def map_variables(self, mapping: Sequence[int], nvars: int) -> "Polynomial":
        """Send old variable j to new index mapping[j] (must be injective)."""
        terms = {}
        for m, c in self.terms.items():
            mm = [0] * nvars
            for j, e in enumerate(m):
                if e:
                    mm[mapping[j]] += e
            terms[tuple(mm)] = terms.get(tuple(mm), Scalar(0)) + c
        return Polynomial(nvars, terms)

    def substitute_one(self, var: int) -> "Polynomial":
        """Set variable ``var`` to 1 (the ambient keeps its dimension)."""
        terms = {}
        for m, c in self.terms.items():
            mm = list(m)
            mm[var] = 0
            key = tuple(mm)
            terms[key] = terms.get(key, Scalar(0)) + c
        return Polynomial(self.nvars, terms)

    # -- text ---------------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"<Polynomial {self}>"


def format_polynomial(p: Polynomial, names: Optional[Sequence[str]] = None) -> str:
    if p.is_zero():
        return "0"
    out = []
    for m in sorted(p.terms, key=_term_sort_key):
        c = p.terms[m]
        mono = format_monomial(m, names)
        # pull a leading minus out of real or purely imaginary coefficients
        sign = ""
        if c.im == 0 and c.re < 0 or (c.re == 0 and c.im < 0):
            sign, c = "-", -c
        if mono == "1":
            body = format_scalar(c)
        elif c == Scalar(1):
            body = mono
        else:
            body = f"{format_scalar(c)}*{mono}"
        if not out:
            out.append(sign + body)
        else:
            out.append(("- " if sign else "+ ") + body)
    return " ".join(out)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = _re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\^)|(\*)|(\+)|(-)|(\()|(\))|(/))")


def _tokenize(text: str):
    pos, tokens = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", column=pos)
            break
        pos = m.end()
        tok = m.group(0).strip()
        if tok:
            tokens.append((tok, m.start()))
    return tokens


class _Parser:
    def __init__(self, tokens, nvars, names):
        self.tokens = tokens
        self.i = 0
        self.nvars = nvars
        self.names = {name: j for j, name in enumerate(names)}

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, what):
        if self.peek() != what:
            col = self.tokens[self.i][1] if self.i < len(self.tokens) else -1
            raise ParseError(f"expected {what!r}", column=col)
        return self.next()

    def parse_poly(self) -> Polynomial:
        acc = Polynomial.zero(self.nvars)
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
        acc = acc + self.parse_term() * sign
        while self.peek() in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
            acc = acc + self.parse_term() * sign
        if self.i != len(self.tokens):
            raise ParseError("trailing input", column=self.tokens[self.i][1])
        return acc

    def parse_term(self) -> Polynomial:
        acc = self.parse_factor()
        while self.peek() == "*":
            self.next()
            acc = acc * self.parse_factor()
        return acc

    def parse_factor(self) -> Polynomial:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        if tok == "(":
            self.next()
            inner = self.parse_complex()
            self.expect(")")
            return Polynomial.constant(self.nvars, inner)
        if tok.isdigit():
            return Polynomial.constant(self.nvars, self.parse_rational())
        if tok == "i":
            self.next()
            return Polynomial.constant(self.nvars, Scalar(0, 1))
        if tok in self.names:
            self.next()
            var = self.names[tok]
            exp = 1
            if self.peek() == "^":
                self.next()
                e_tok, col = self.next()
                if not e_tok.isdigit():
                    raise ParseError("exponent must be a decimal integer", column=col)
                exp = int(e_tok)
            return Polynomial.variable(self.nvars, var) ** exp
        col = self.tokens[self.i][1]
        raise ParseError(f"unknown symbol {tok!r}", column=col)

    def parse_rational(self):
        num_tok, col = self.next()
        if not num_tok.isdigit():
            raise ParseError("expected a number", column=col)
        num = int(num_tok)
        if self.peek() == "/":
            self.next()
            den_tok, col = self.next()
            if not den_tok.isdigit() or int(den_tok) == 0:
                raise ParseError("bad denominator", column=col)
            from fractions import Fraction
            return Fraction(num, int(den_tok))
        return num

    def parse_complex(self) -> Scalar:
        """Inside parens: rational (+|-) rational [*] i, or a lone rational/i form."""
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
        first = self._simple_part() * sign
        if self.peek() in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
            second = self._simple_part() * sign
            return first + second
        return first

    def _simple_part(self) -> Scalar:
        if self.peek() == "i":
            self.next()
            return Scalar(0, 1)
        q = self.parse_rational()
        if self.peek() == "*":
            save = self.i
            self.next()
            if self.peek() == "i":
                self.next()
                return Scalar(0, q)
            self.i = save
        elif self.peek() == "i":
            self.next()
            return Scalar(0, q)
        return Scalar(q)


def parse_polynomial(text: str, nvars: int,
                     names: Optional[Sequence[str]] = None) -> Polynomial:
    """Parse the polynomial text syntax (terms joined by +/-, monomials like
    ``x1^2*x2``, rational coefficients ``a/b``, imaginary unit ``i``)."""
    if names is None:
        names = [f"x{i + 1}" for i in range(nvars)]
    return _Parser(_tokenize(text), nvars, list(names)).parse_poly()


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

class PolyMatrix:
    """An m x r matrix of polynomials: the morphism g in trivial frames."""

    __slots__ = ("rows", "cols", "nvars", "entries")

    def __init__(self, entries: Sequence[Sequence[Polynomial]]):
        if not entries or not entries[0]:
            raise InputError("matrix must have at least one row and one column")
        m, r = len(entries), len(entries[0])
        nvars = entries[0][0].nvars
        for row in entries:
            if len(row) != r:
                raise InputError("ragged matrix")
            for p in row:
                if p.nvars != nvars:
                    raise InputError("entries live in different ambient dimensions")
        object.__setattr__(self, "rows", m)
        object.__setattr__(self, "cols", r)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "entries", tuple(tuple(row) for row in entries))

    def __setattr__(self, *a):
        raise AttributeError("PolyMatrix is immutable")

    @staticmethod
    def diagonal(polys: Sequence[Polynomial]) -> "PolyMatrix":
        n = len(polys)
        z = Polynomial.zero(polys[0].nvars)
        return PolyMatrix([[polys[i] if i == j else z for j in range(n)]
                           for i in range(n)])

    @staticmethod
    def row(polys: Sequence[Polynomial]) -> "PolyMatrix":
        return PolyMatrix([list(polys)])

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return "[" + "; ".join(", ".join(str(p) for p in row)
                               for row in self.entries) + "]"

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def nonzero_positions(self):
        return [(i, j) for i in range(self.rows) for j in range(self.cols)
                if not self.entries[i][j].is_zero()]


def _det(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = Polynomial.zero(rows[0][0].nvars)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[row[k] for k in range(n) if k != j] for row in rows[1:]]
        term = rows[0][j] * _det(minor)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def determinant_and_minors(g: PolyMatrix, k: int):
    """All k x k minors of g, ordered lexicographically in (row subset, column
    subset).  For k = rows = cols the single entry is det g."""
    if not 1 <= k <= min(g.rows, g.cols):
        raise InputError(f"minor size {k} outside 1..{min(g.rows, g.cols)}")
    out = []
    for rs in itertools.combinations(range(g.rows), k):
        for cs in itertools.combinations(range(g.cols), k):
            out.append(_det([[g.entries[i][j] for j in cs] for i in rs]))
    return out


def determinant(g: PolyMatrix) -> Polynomial:
    if g.rows != g.cols:
        raise InputError("determinant of a non-square matrix")
    return determinant_and_minors(g, g.rows)[0]


def monomial_gcd_factor(g: PolyMatrix):
    """Split g = h * g' with h the exponent-wise min monomial over nonzero
    entries.  Entries that are not scalar multiples of monomials leave g
    unchanged with trivial factor."""
    mons = []
    for i, j in g.nonzero_positions():
        cm = g.entries[i][j].as_monomial()
        if cm is None:
            return monomial_one(g.nvars), g
        mons.append(cm[1])
    if not mons:
        return monomial_one(g.nvars), g
    h = mons[0]
    for m in mons[1:]:
        h = monomial_gcd(h, m)
    if monomial_degree(h) == 0:
        return h, g
    reduced = [[p.divide_monomial(h) if not p.is_zero() else p for p in row]
               for row in g.entries]
    return h, PolyMatrix(reduced)


class StructureClass(Enum):
    DIAGONAL_MONOMIAL = "DIAGONAL_MONOMIAL"
    SINGLE_ROW = "SINGLE_ROW"
    COLUMN_SECTION = "COLUMN_SECTION"
    GENERAL = "GENERAL"


def _pairwise_coprime(mons) -> bool:
    for a, b in itertools.combinations(mons, 2):
        if monomial_degree(monomial_gcd(a, b)) > 0:
            return False
    return True


def classify_structure(g: PolyMatrix) -> StructureClass:
    """Route the input to the exact engine's supported classes.

    DIAGONAL_MONOMIAL: each row and column carries at most one nonzero entry
    and every nonzero entry is a scalar times a monomial.
    SINGLE_ROW: one row, >= 2 nonzero monomial entries that become pairwise
    coprime after extracting the common monomial factor.
    COLUMN_SECTION: one row with exactly two nonzero entries, kept for the
    quotient-current computation even when the entries are not monomials.
    """
    nz = g.nonzero_positions()
    all_monomial = all(g.entries[i][j].as_monomial() is not None for i, j in nz)
    row_counts = [0] * g.rows
    col_counts = [0] * g.cols
    for i, j in nz:
        row_counts[i] += 1
        col_counts[j] += 1
    if all_monomial and all(c <= 1 for c in row_counts) and all(c <= 1 for c in col_counts):
        return StructureClass.DIAGONAL_MONOMIAL
    if g.rows == 1 and len(nz) >= 2 and all_monomial:
        _, red = monomial_gcd_factor(g)
        mons = [red.entries[i][j].as_monomial()[1] for i, j in nz]
        if _pairwise_coprime(mons):
            return StructureClass.SINGLE_ROW
    if g.rows == 1 and g.cols == 2 and len(nz) == 2:
        return StructureClass.COLUMN_SECTION
    return StructureClass.GENERAL
