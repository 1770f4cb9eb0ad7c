"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``nvars`` variables maps exponent tuples (one entry per
variable) to nonzero :class:`fractions.Fraction` coefficients.  Instances are
immutable.  Variables are 0-based internally; the text format names them
``x1 .. xN`` and an optional trailing ``t``.

Canonical term order is graded lexicographic, highest term first:

    >>> str(parse_polynomial("x3^2 + x1*x2 - 3*x1^2", 3))
    '-3*x1^2 + 1*x1*x2 + 1*x3^2'
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]

__all__ = [
    "Polynomial",
    "PolynomialSyntaxError",
    "parse_polynomial",
    "evaluate",
    "homogeneous_degree",
    "try_divide_exact",
    "substitute_linear",
    "support_projection",
    "grlex_key",
]


def grlex_key(e: Exponent) -> tuple[int, Exponent]:
    """Sort key for graded lexicographic order (larger key = larger term)."""
    return (sum(e), e)


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(i + j for i, j in zip(a, b))


class Polynomial:
    """Immutable exact polynomial with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} does not have length {nvars}")
                if any(k < 0 for k in e):
                    raise ValueError(f"negative exponent in {e}")
                c = Fraction(c)
                if c != 0:
                    clean[tuple(e)] = c
        self.nvars = nvars
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> "Polynomial":
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Scalar = 1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): c})

    # views

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in canonical (descending grlex) order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, e: Exponent) -> Fraction:
        return self._terms.get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self._terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self._terms), default=-1)

    def variables(self) -> set[int]:
        """Indices of variables that actually occur."""
        return {i for e in self._terms for i, k in enumerate(e) if k}

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    def homogeneous_degree(self) -> int | None:
        if not self._terms:
            raise ValueError("homogeneous degree of the zero polynomial is undefined")
        degs = {sum(e) for e in self._terms}
        return degs.pop() if len(degs) == 1 else None

    # arithmetic

    def _coerce(self, other: object) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "Polynomial":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: object) -> "Polynomial":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "Polynomial":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return Polynomial.zero(self.nvars)
            return Polynomial._raw(self.nvars, {e: v * c for e, v in self._terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = _add_exp(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # evaluation and transformations

    def evaluate(self, x: Sequence) -> object:
        """Exact value at ``x`` (rationals give rationals, floats give floats)."""
        if len(x) != self.nvars:
            raise ValueError(f"point has {len(x)} coordinates, polynomial has {self.nvars} variables")
        total: object = 0
        for e, c in self._terms.items():
            v: object = c
            for xi, k in zip(x, e):
                if k:
                    v = v * xi**k
            total = total + v
        return total

    def embed(self, nvars: int, positions: Sequence[int] | None = None) -> "Polynomial":
        """Re-home into ``nvars`` variables; variable i goes to ``positions[i]``."""
        if positions is None:
            positions = range(self.nvars)
        positions = list(positions)
        out = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    ne[positions[i]] += k
            out[tuple(ne)] = c
        return Polynomial(nvars, out)

    def truncate(self, vars_subset: Iterable[int], order: int) -> "Polynomial":
        """Drop terms whose total degree in ``vars_subset`` exceeds ``order``."""
        idx = list(vars_subset)
        return Polynomial._raw(
            self.nvars,
            {e: c for e, c in self._terms.items() if sum(e[i] for i in idx) <= order},
        )

    def to_text(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            factors = [str(c)]
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {self.to_text()!r})"


# parsing

class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+)|(t)\b|([-+*^/()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}",
                                        pos + len(text[pos:]) - len(text[pos:].lstrip()))
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("var", m.group(2), start))
        elif m.group(3):
            tokens.append(("var", "t", start))
        else:
            tokens.append(("op", m.group(4), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, nvars: int, allow_t: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.nvars = nvars
        self.allow_t = allow_t
        self.total = nvars + (1 if allow_t else 0)

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, v, pos = self.take()
        if v != value or kind != "op":
            raise PolynomialSyntaxError(f"expected {value!r}", pos)

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise PolynomialSyntaxError(f"unexpected token {v!r}", pos)
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Polynomial:
        kind, v, _ = self.peek()
        if kind == "op" and v in ("+", "-"):
            self.take()
            p = self.unary()
            return -p if v == "-" else p
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, v, pos = self.take()
            if kind != "num":
                raise PolynomialSyntaxError("exponent must be a nonnegative integer literal", pos)
            return base ** int(v)
        return base

    def atom(self) -> Polynomial:
        kind, v, pos = self.take()
        if kind == "num":
            value = Fraction(int(v))
            if self.peek()[:2] == ("op", "/"):
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "num":
                    raise PolynomialSyntaxError("denominator must be an integer literal", p2)
                if int(v2) == 0:
                    raise PolynomialSyntaxError("zero denominator", p2)
                value = Fraction(int(v), int(v2))
            return Polynomial.constant(self.total, value)
        if kind == "var":
            if v == "t":
                if not self.allow_t:
                    raise PolynomialSyntaxError("variable t not allowed here", pos)
                return Polynomial.variable(self.total, self.nvars)
            idx = int(v[1:])
            if not 1 <= idx <= self.nvars:
                raise PolynomialSyntaxError(f"variable {v} out of range 1..{self.nvars}", pos)
            return Polynomial.variable(self.total, idx - 1)
        if (kind, v) == ("op", "("):
            p = self.expr()
            self.expect(")")
            return p
        raise PolynomialSyntaxError(f"unexpected token {v!r}" if v else "unexpected end of input", pos)


def parse_polynomial(text: str, nvars: int, allow_t: bool = False) -> Polynomial:
    """Parse and fully expand ``text``.

    With ``allow_t`` the result has ``nvars + 1`` variables, ``t`` last.
    """
    return _Parser(text, nvars, allow_t).parse()


def max_variable_index(text: str) -> int:
    """Largest ``xN`` index mentioned in ``text`` (0 if none)."""
    return max((int(m) for m in re.findall(r"x(\d+)", text)), default=0)


# module-level operations

def evaluate(p: Polynomial, x: Sequence) -> object:
    return p.evaluate(x)


def homogeneous_degree(p: Polynomial) -> int | None:
    return p.homogeneous_degree()


def try_divide_exact(p: Polynomial, q: Polynomial) -> Polynomial | None:
    """Return ``r`` with ``p == q*r`` or None when ``q`` does not divide ``p``."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.nvars != q.nvars:
        raise ValueError("variable count mismatch")
    lq, cq = q.leading_term()
    rest = dict(p._terms)
    quot: dict[Exponent, Fraction] = {}
    qterms = list(q._terms.items())
    while rest:
        le = max(rest, key=grlex_key)
        if any(a < b for a, b in zip(le, lq)):
            return None
        me = tuple(a - b for a, b in zip(le, lq))
        mc = rest[le] / cq
        quot[me] = mc
        for e, c in qterms:
            k = _add_exp(me, e)
            v = rest.get(k, 0) - mc * c
            if v:
                rest[k] = v
            else:
                rest.pop(k, None)
    r = Polynomial._raw(p.nvars, quot)
    if q * r != p:  # pragma: no cover - guards the elimination loop
        raise AssertionError("exact division failed re-multiplication check")
    return r


def substitute_linear(p: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Replace variable i of ``p`` by ``images[i]`` and expand.

    The images may be arbitrary polynomials over a common variable set; changes
    of variables use linear ones, curve substitutions use products with ``t``.
    """
    if len(images) != p.nvars:
        raise ValueError(f"need {p.nvars} images, got {len(images)}")
    if p.nvars == 0:
        raise ValueError("cannot substitute into a polynomial with no variables")
    m = images[0].nvars
    if any(im.nvars != m for im in images):
        raise ValueError("images must share one variable set")
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, k: int) -> Polynomial:
        key = (i, k)
        if key not in powers:
            powers[key] = images[i] if k == 1 else power(i, k - 1) * images[i]
        return powers[key]

    acc: dict[Exponent, Fraction] = {}
    for e, c in p._terms.items():
        term = Polynomial.constant(m, c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        for te, tc in term._terms.items():
            acc[te] = acc.get(te, 0) + tc
    return Polynomial(m, acc)


def support_projection(p: Polynomial, block: Iterable[int]) -> dict[Exponent, Polynomial]:
    """Split ``p`` as sum over λ of ``x_block^λ * q_λ``.

    Keys are exponent sub-vectors over ``block`` (in the given order); each
    ``q_λ`` lives in the full variable set with zero block exponents.
    """
    block = list(block)
    if not block:
        raise ValueError("block must be nonempty")
    if any(not 0 <= i < p.nvars for i in block) or len(set(block)) != len(block):
        raise ValueError("invalid block indices")
    groups: dict[Exponent, dict[Exponent, Fraction]] = {}
    for e, c in p._terms.items():
        lam = tuple(e[i] for i in block)
        rest = list(e)
        for i in block:
            rest[i] = 0
        groups.setdefault(lam, {})[tuple(rest)] = c
    return {lam: Polynomial._raw(p.nvars, groups[lam]) for lam in sorted(groups)}
