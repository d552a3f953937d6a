"""Exact sparse polynomial arithmetic over the integers and simple quotients.

Rings supported here are Z[x1..xk], optionally cut down by an integer
modulus and by single-variable rewrite relations of the shape
``x^d -> r(x)`` with ``deg_x(r) < d`` (for example ``pi^e -> -p*theta(pi)``
or ``t^N -> 0``).  Coefficients are arbitrary-precision integers; every
operation returns a canonical form, so equality is literal equality of
term maps.  When a modulus is present coefficients are kept in
``[0, modulus)``.

Exponent vectors are packed into a single integer (a fixed bit field per
variable), which keeps monomial multiplication a plain integer addition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

# Bit width of one packed exponent field.  Exponents are validated to stay
# far below this, so adding two packed keys can never carry across fields.
_SHIFT = 32
_FIELD_MASK = (1 << _SHIFT) - 1
_MAX_EXPONENT = 1 << 31


class RingError(ValueError):
    """Malformed ring description."""


class RingMismatchError(ValueError):
    """Operands belong to different rings."""


class NonDivisibleError(ArithmeticError):
    """Exact division failed on at least one coefficient."""

    def __init__(self, monomial: tuple[int, ...], coefficient: int, divisor: int):
        self.monomial = monomial
        self.coefficient = coefficient
        self.divisor = divisor
        super().__init__(
            f"coefficient {coefficient} of monomial {monomial} "
            f"is not divisible by {divisor}"
        )


class UnboundVariableError(KeyError):
    """Substitution met a variable with no binding and no target twin."""


class PolyParseError(ValueError):
    """Syntax error in a textual polynomial, with position info."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


@dataclass(frozen=True)
class Relation:
    """Rewrite rule ``var^lead -> replacement`` used for canonical forms.

    ``replacement`` is stored as a tuple of (exponent-of-var, coefficient)
    pairs and may only involve ``var`` itself, at degrees below ``lead``;
    this keeps reduction confluent and obviously terminating.
    """

    var: str
    lead: int
    replacement: tuple[tuple[int, int], ...]


TermsLike = Union[int, "SparsePoly", Mapping[tuple[int, ...], int], str]


class RingSpec:
    """Description of a coefficient ring: variables, modulus, relations.

    >>> R = RingSpec(("pi",), modulus=27, relations={"pi": (2, {(0,): -3})})
    """

    __slots__ = ("variables", "modulus", "relations", "_index", "_packed_relations", "_hash")

    def __init__(
        self,
        variables: Sequence[str] = (),
        modulus: int | None = None,
        relations: Mapping[str, tuple[int, Mapping[tuple[int, ...], int]]] | None = None,
    ):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise RingError(f"duplicate variable names in {variables}")
        for name in variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise RingError(f"invalid variable name {name!r}")
        if modulus is not None and modulus < 2:
            raise RingError(f"modulus must be >= 2, got {modulus}")
        index = {name: k for k, name in enumerate(variables)}
        rels = []
        for name, (lead, repl) in (relations or {}).items():
            if name not in index:
                raise RingError(f"relation on unknown variable {name!r}")
            if lead < 1:
                raise RingError(f"relation on {name!r} needs leading exponent >= 1")
            pairs = []
            for expvec, coeff in repl.items():
                if coeff == 0:
                    continue
                if len(expvec) != len(variables):
                    raise RingError(
                        f"replacement exponent vector {expvec} does not match "
                        f"{len(variables)} variables"
                    )
                for k, e in enumerate(expvec):
                    if e and k != index[name]:
                        raise RingError(
                            f"replacement for {name!r} may only involve {name!r}"
                        )
                deg = expvec[index[name]]
                if deg >= lead:
                    raise RingError(
                        f"replacement for {name!r} must have degree < {lead}"
                    )
                pairs.append((deg, coeff))
            rels.append(Relation(name, lead, tuple(sorted(pairs))))
        rels.sort(key=lambda r: r.var)
        self.variables = variables
        self.modulus = modulus
        self.relations = tuple(rels)
        self._index = index
        self._packed_relations = tuple(
            (index[r.var], r.lead, tuple((d << (_SHIFT * index[r.var]), c) for d, c in r.replacement))
        for r in rels)
        self._hash = hash((variables, modulus, self.relations))

    # -- identity ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingSpec)
            and self.variables == other.variables
            and self.modulus == other.modulus
            and self.relations == other.relations
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        parts = [f"variables={self.variables!r}"]
        if self.modulus is not None:
            parts.append(f"modulus={self.modulus}")
        for r in self.relations:
            parts.append(f"{r.var}^{r.lead} -> {r.replacement}")
        return f"RingSpec({', '.join(parts)})"

    @property
    def is_torsion_free(self) -> bool:
        """No integer modulus: the ring is a free Z-module in canonical form."""
        return self.modulus is None

    # -- element construction ---------------------------------------------
    def zero(self) -> "SparsePoly":
        return SparsePoly(self, {})

    def one(self) -> "SparsePoly":
        return self.poly(1)

    def var(self, name: str) -> "SparsePoly":
        if name not in self._index:
            raise RingError(f"no variable {name!r} in {self.variables}")
        key = 1 << (_SHIFT * self._index[name])
        return SparsePoly(self, {key: 1}, _packed=True)

    def monomial(self, exponents: tuple[int, ...], coeff: int = 1) -> "SparsePoly":
        return SparsePoly(self, {exponents: coeff})

    def poly(self, source: TermsLike) -> "SparsePoly":
        """Coerce an int, mapping, textual form, or poly into this ring."""
        if isinstance(source, SparsePoly):
            if source.ring != self:
                raise RingMismatchError(f"{source.ring!r} != {self!r}")
            return source
        if isinstance(source, int):
            return SparsePoly(self, {(0,) * len(self.variables): source} if source else {})
        if isinstance(source, str):
            return parse_poly(source, self)
        return SparsePoly(self, dict(source))

    def random_element(self, rng, max_terms: int = 4, max_exp: int = 3,
                       coeff_bound: int = 9) -> "SparsePoly":
        """Small random element, used by property suites."""
        terms: dict[tuple[int, ...], int] = {}
        for _ in range(rng.randrange(max_terms + 1)):
            exps = tuple(rng.randrange(max_exp + 1) for _ in self.variables)
            terms[exps] = rng.randint(-coeff_bound, coeff_bound)
        return SparsePoly(self, terms)

    # -- packing helpers ----------------------------------------------------
    def _pack(self, exponents: Sequence[int]) -> int:
        if len(exponents) != len(self.variables):
            raise RingError(
                f"exponent vector {tuple(exponents)} does not match "
                f"{len(self.variables)} variables"
            )
        key = 0
        for k, e in enumerate(exponents):
            if e < 0 or e >= _MAX_EXPONENT:
                raise RingError(f"exponent {e} out of range")
            key |= e << (_SHIFT * k)
        return key

    def _unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_SHIFT * k)) & _FIELD_MASK for k in range(len(self.variables)))


class SparsePoly:
    """Immutable sparse polynomial attached to a :class:`RingSpec`."""

    __slots__ = ("ring", "_terms", "_hashcache")

    def __init__(self, ring: RingSpec, terms, _packed: bool = False, _canonical: bool = False):
        self.ring = ring
        if _packed:
            packed = terms if isinstance(terms, dict) else dict(terms)
        else:
            packed = {}
            for expvec, coeff in terms.items():
                key = ring._pack(expvec)
                packed[key] = packed.get(key, 0) + coeff
        if not _canonical:
            packed = _reduce(ring, packed)
        self._terms = packed
        self._hashcache = None

    # -- views --------------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        """Canonical exponent-vector -> coefficient map (a fresh dict)."""
        unpack = self.ring._unpack
        return {unpack(k): c for k, c in self._terms.items()}

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in graded-lex order (ascending), the printing order."""
        unpack = self.ring._unpack
        items = [(unpack(k), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: (sum(t[0]), t[0]))
        return items

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        unpack = self.ring._unpack
        return max(sum(unpack(k)) for k in self._terms)

    def degree_in(self, name: str) -> int:
        idx = self.ring._index[name]
        if not self._terms:
            return -1
        return max((k >> (_SHIFT * idx)) & _FIELD_MASK for k in self._terms)

    def constant_term(self) -> int:
        return self._terms.get(0, 0)

    def as_int(self) -> int:
        """The constant value, if the polynomial is constant."""
        if not self._terms:
            return 0
        if len(self._terms) == 1 and 0 in self._terms:
            return self._terms[0]
        raise ValueError(f"{self} is not constant")

    # -- arithmetic -----------------------------------------------------------
    def _check_ring(self, other: "SparsePoly") -> None:
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring!r} != {other.ring!r}")

    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            self._check_ring(other)
            return other
        if isinstance(other, int):
            return self.ring.poly(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                del out[k]
        return SparsePoly(self.ring, _reduce_coeffs_only(self.ring, out), _packed=True, _canonical=True)

    __radd__ = __add__

    def __neg__(self):
        m = self.ring.modulus
        if m is None:
            out = {k: -c for k, c in self._terms.items()}
        else:
            out = {k: (-c) % m for k, c in self._terms.items() if (-c) % m}
        return SparsePoly(self.ring, out, _packed=True, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return self.ring.zero()
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return SparsePoly(self.ring, _reduce(self.ring, out), _packed=True, _canonical=True)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def exact_div(self, divisor: int) -> "SparsePoly":
        """Divide every coefficient by ``divisor``; exactness is mandatory.

        Only meaningful over rings without an integer modulus, where the
        canonical form is a free Z-module and divisibility is termwise.
        """
        if divisor == 0:
            raise ZeroDivisionError("exact_div by zero")
        if self.ring.modulus is not None:
            raise RingError("exact_div requires a ring without integer modulus")
        out = {}
        for k, c in self._terms.items():
            q, r = divmod(c, divisor)
            if r:
                raise NonDivisibleError(self.ring._unpack(k), c, divisor)
            out[k] = q
        return SparsePoly(self.ring, out, _packed=True, _canonical=True)

    def substitute(
        self,
        bindings: Mapping[str, Union["SparsePoly", int]],
        ring: RingSpec | None = None,
    ) -> "SparsePoly":
        """Evaluate under ``var -> value`` bindings into a target ring.

        Unbound variables pass through when the target ring has a variable
        of the same name; otherwise their use (with positive exponent) is an
        :class:`UnboundVariableError`.
        """
        target = ring
        prepared: dict[str, SparsePoly] = {}
        for name, value in bindings.items():
            if name not in self.ring._index:
                raise RingError(f"binding for unknown variable {name!r}")
            if isinstance(value, SparsePoly):
                if target is None:
                    target = value.ring
                elif value.ring != target:
                    raise RingMismatchError("bindings live in different rings")
                prepared[name] = value
        if target is None:
            target = self.ring
        for name, value in bindings.items():
            if not isinstance(value, SparsePoly):
                prepared[name] = target.poly(int(value))
        for name in self.ring.variables:
            if name not in prepared and name in target._index:
                prepared[name] = target.var(name)

        power_cache: dict[tuple[str, int], SparsePoly] = {}

        def power(name: str, e: int) -> SparsePoly:
            cached = power_cache.get((name, e))
            if cached is None:
                cached = prepared[name] ** e
                power_cache[(name, e)] = cached
            return cached

        acc: dict[int, int] = {}
        nvars = len(self.ring.variables)
        for key, coeff in self._terms.items():
            piece = None
            dead = False
            for idx in range(nvars):
                e = (key >> (_SHIFT * idx)) & _FIELD_MASK
                if not e:
                    continue
                name = self.ring.variables[idx]
                bound = prepared.get(name)
                if bound is None:
                    raise UnboundVariableError(name)
                if bound.is_zero:
                    dead = True
                    break
                piece = power(name, e) if piece is None else piece * power(name, e)
            if dead:
                continue
            if piece is None:
                key0 = 0
                acc[key0] = acc.get(key0, 0) + coeff
            else:
                for k, c in piece._terms.items():
                    acc[k] = acc.get(k, 0) + coeff * c
        return SparsePoly(target, _reduce(target, acc), _packed=True, _canonical=True)

    # -- comparisons -----------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.ring.poly(other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hashcache is None:
            self._hashcache = hash((self.ring, frozenset(self._terms.items())))
        return self._hashcache

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- printing ----------------------------------------------------------------
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"<poly {format_poly(self)}>"


def _reduce_coeffs_only(ring: RingSpec, packed: dict[int, int]) -> dict[int, int]:
    """Fast path: inputs already satisfy the relation bounds."""
    m = ring.modulus
    if m is None:
        return packed
    return {k: c % m for k, c in packed.items() if c % m}


def _reduce(ring: RingSpec, packed: dict[int, int]) -> dict[int, int]:
    """Canonicalize: apply relations, reduce mod modulus, drop zeros."""
    rels = ring._packed_relations
    if rels:
        out: dict[int, int] = {}
        stack = list(packed.items())
        while stack:
            key, coeff = stack.pop()
            if not coeff:
                continue
            fired = False
            for idx, lead, repl in rels:
                e = (key >> (_SHIFT * idx)) & _FIELD_MASK
                if e >= lead:
                    base = key - (lead << (_SHIFT * idx))
                    for rkey, rcoeff in repl:
                        stack.append((base + rkey, coeff * rcoeff))
                    fired = True
                    break
            if not fired:
                out[key] = out.get(key, 0) + coeff
        packed = out
    m = ring.modulus
    if m is None:
        return {k: c for k, c in packed.items() if c}
    return {k: c % m for k, c in packed.items() if c % m}


# ---------------------------------------------------------------------------
# textual form
# ---------------------------------------------------------------------------

def format_poly(poly: SparsePoly) -> str:
    """Canonical textual form, e.g. ``1 - 3*X + 3*X^2 - X^3``."""
    items = poly.sorted_terms()
    if not items:
        return "0"
    variables = poly.ring.variables
    chunks: list[str] = []
    for expvec, coeff in items:
        factors = []
        for name, e in zip(variables, expvec):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(coeff)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if not chunks:
            chunks.append(body if coeff > 0 else f"-{body}")
        else:
            chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(chunks)


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise PolyParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = match.lastgroup
        value = match.group()
        if kind != "ws":
            tokens.append((kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = match.end()
    tokens.append(("end", "", line, col))
    return tokens


class _PolyParser:
    def __init__(self, text: str, ring: RingSpec):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ring = ring

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str):
        _, _, line, col = self.peek()
        raise PolyParseError(message, line, col)

    def expect_op(self, op: str):
        kind, value, _, _ = self.peek()
        if kind != "op" or value != op:
            self.error(f"expected {op!r}")
        self.advance()

    def parse(self) -> SparsePoly:
        result = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return result

    def expr(self) -> SparsePoly:
        kind, value, _, _ = self.peek()
        negate = False
        if kind == "op" and value in "+-":
            self.advance()
            negate = value == "-"
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            kind, value, _, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                acc = acc - rhs if value == "-" else acc + rhs
            else:
                return acc

    def term(self) -> SparsePoly:
        acc = self.factor()
        while True:
            kind, value, _, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> SparsePoly:
        base = self.atom()
        kind, value, _, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            ekind, evalue, _, _ = self.peek()
            if ekind != "int":
                self.error("expected integer exponent")
            self.advance()
            return base ** int(evalue)
        return base

    def atom(self) -> SparsePoly:
        kind, value, _, _ = self.peek()
        if kind == "int":
            self.advance()
            return self.ring.poly(int(value))
        if kind == "name":
            if value not in self.ring._index:
                self.error(f"unknown variable {value!r}")
            self.advance()
            return self.ring.var(value)
        if kind == "op" and value == "(":
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "op" and value == "-":
            self.advance()
            return -self.atom()
        self.error(f"expected polynomial atom, got {value!r}")
        raise AssertionError("unreachable")


def parse_poly(text: str, ring: RingSpec) -> SparsePoly:
    """Parse the canonical textual form back into a polynomial."""
    return _PolyParser(text, ring).parse()
