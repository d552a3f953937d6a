"""Normal forms in the log de Rham-Witt complex of F_p[t] and F_p[t]/(t^N).

Elements of level n live in degrees 0 and 1 only (the degree-1 piece is
generated over the degree-0 piece by a single logarithmic generator, so
its alternating square vanishes).  The normal form is a finite sum of
slots, each an integer residue:

  degree 0:  (0, i) for i >= 0          coefficient mod p^n
             (s, i) for 1 <= s < n,     coefficient mod p^{n-s}
                    i >= 1, p not dividing i
  degree 1:  (0, i) for i >= 0          c[t]^i dlogt, mod p^n
             (s, i) for 1 <= s < n,     dV^s(c[t]^i), mod p^{n-s}
                    i >= 1, p not dividing i

A degree-0 slot (s, i) stands for V^s(c[t]^i).  Over the truncated
algebra F_p[t]/(t^N) the coefficient of a slot with exponent i is
further reduced mod p^{v0(i)} where v0(i) is the least v with
p^v * i >= N, because p^v * [t]^i = V^v([t]^{p^v i}) dies exactly when
the exponent reaches N.

Normalization rewrites an arbitrary V^s(c[t]^i), dV^s(c[t]^i) or
V^s(c[t]^i)dlogt into slots using four facts:

  V^s(c[t]^{pi}) = V^{s-1}((pc)[t]^i)          (V eats Frobenius twists)
  V^s(c)         = p^s c as a scalar           (W(F_p) has V = p)
  d(c[t]^i)      = (ic)[t]^i dlogt
  V^s(c[t]^i)dlogt = p^s i^{-1} dV^s(c[t]^i)   (p not dividing i, s >= 1)

Products are computed from F^s V^s = p^s, V^s(x)y = V^s(x F^s(y)),
F^s d V^s = d and the Leibniz rule; each term product lands back in
the slot families.  Every rewrite can be recorded as a trace and
replayed step by step.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass

from .report import VerificationReport
from .witt import is_odd_prime, max_level

FUNC = "func"
DV = "dv"
VDLOG = "vdlog"


class DrwParseError(ValueError):
    """Syntax error in the textual form language."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at column {position + 1})")
        self.message = message
        self.position = position


@dataclass(frozen=True)
class DrwParams:
    """Level-n complex of F_p[t] (N is None) or F_p[t]/(t^N)."""

    p: int
    n: int
    N: int | None = None

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if not 1 <= self.n <= max_level():
            raise ValueError(
                f"n must be between 1 and {max_level()}, got {self.n}"
            )
        if self.N is not None and self.N < 1:
            raise ValueError(f"truncation order must be >= 1, got {self.N}")

    def shifted(self, by: int, N: int | None = "same") -> "DrwParams":
        return DrwParams(self.p, self.n + by, self.N if N == "same" else N)

    def truncation_level(self, i: int) -> int | float:
        """Least v with p^v * i >= N; +inf when nothing truncates."""
        if self.N is None or i == 0:
            return math.inf
        v = 0
        scale = i
        while scale < self.N:
            scale *= self.p
            v += 1
        return v

    def slot_modulus(self, s: int, i: int) -> int:
        bound = min(self.truncation_level(i), self.n - s)
        return self.p ** max(0, int(bound)) if bound != math.inf else self.p ** (self.n - s)


class DrwElement:
    """Inhomogeneous element: a degree-0 and a degree-1 slot family."""

    __slots__ = ("params", "funcs", "forms")

    def __init__(self, params: DrwParams, funcs=None, forms=None):
        self.params = params
        self.funcs: dict[tuple[int, int], int] = {}
        self.forms: dict[tuple[int, int], int] = {}
        for (s, i), c in (funcs or {}).items():
            _insert_slot(self.funcs, params, s, i, c)
        for (s, i), c in (forms or {}).items():
            _insert_slot(self.forms, params, s, i, c)

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero(params: DrwParams) -> "DrwElement":
        return DrwElement(params)

    @staticmethod
    def scalar(params: DrwParams, c: int) -> "DrwElement":
        return DrwElement(params, funcs={(0, 0): c})

    @staticmethod
    def monomial(params: DrwParams, i: int, c: int = 1) -> "DrwElement":
        if i < 0:
            raise ValueError(f"exponent must be >= 0, got {i}")
        return DrwElement(params, funcs={(0, i): c})

    @staticmethod
    def dlog(params: DrwParams) -> "DrwElement":
        return DrwElement(params, forms={(0, 0): 1})

    # -- structure ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.funcs and not self.forms

    def __eq__(self, other) -> bool:
        if not isinstance(other, DrwElement):
            return NotImplemented
        return (
            self.params == other.params
            and self.funcs == other.funcs
            and self.forms == other.forms
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"DrwElement({self.params}, funcs={self.funcs}, forms={self.forms})"

    def slots(self):
        """All slots as (degree, s, i, coefficient), sorted."""
        out = [(0, s, i, c) for (s, i), c in self.funcs.items()]
        out += [(1, s, i, c) for (s, i), c in self.forms.items()]
        return sorted(out)

    # -- additive group ----------------------------------------------

    def _require_same(self, other: "DrwElement"):
        if self.params != other.params:
            raise ValueError(
                f"mismatched parameters {self.params} vs {other.params}"
            )

    def __add__(self, other):
        if isinstance(other, int):
            other = DrwElement.scalar(self.params, other)
        if not isinstance(other, DrwElement):
            return NotImplemented
        self._require_same(other)
        result = self.copy()
        for (s, i), c in other.funcs.items():
            _insert_slot(result.funcs, self.params, s, i, c)
        for (s, i), c in other.forms.items():
            _insert_slot(result.forms, self.params, s, i, c)
        return result

    __radd__ = __add__

    def __neg__(self):
        return DrwElement(
            self.params,
            funcs={k: -c for k, c in self.funcs.items()},
            forms={k: -c for k, c in self.forms.items()},
        )

    def __sub__(self, other):
        if isinstance(other, int):
            other = DrwElement.scalar(self.params, other)
        if not isinstance(other, DrwElement):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def copy(self) -> "DrwElement":
        fresh = DrwElement(self.params)
        fresh.funcs = dict(self.funcs)
        fresh.forms = dict(self.forms)
        return fresh

    # -- graded product ----------------------------------------------

    def __mul__(self, other):
        if isinstance(other, int):
            other = DrwElement.scalar(self.params, other)
        if not isinstance(other, DrwElement):
            return NotImplemented
        self._require_same(other)
        params = self.params
        result = DrwElement.zero(params)
        for (s, i), c in self.funcs.items():
            for (s2, i2), c2 in other.funcs.items():
                _mul_func_func(result, params, s, i, c, s2, i2, c2)
            for (s2, i2), c2 in other.forms.items():
                _mul_func_form(result, params, s, i, c, s2, i2, c2)
        for (s, i), c in self.forms.items():
            for (s2, i2), c2 in other.funcs.items():
                _mul_func_form(result, params, s2, i2, c2, s, i, c)
        # form times form lands in degree 2, which vanishes: the degree-1
        # piece is R dlogt plus dV-towers, and both dlogt^2 and dV dV
        # collapse through d^2 = 0
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative powers are not defined")
        result = DrwElement.scalar(self.params, 1)
        for _ in range(exponent):
            result = result * self
        return result

    # -- operators ----------------------------------------------------

    def d(self) -> "DrwElement":
        """Differential; kills degree 1."""
        result = DrwElement.zero(self.params)
        for (s, i), c in self.funcs.items():
            if s == 0:
                _insert_slot(result.forms, self.params, 0, i, i * c)
            else:
                _insert_slot(result.forms, self.params, s, i, c)
        return result

    def verschiebung(self) -> "DrwElement":
        target = self.params.shifted(1)
        result = DrwElement.zero(target)
        for (s, i), c in self.funcs.items():
            normalize_function_term(target, s + 1, i, c, into=result)
        for (s, i), c in self.forms.items():
            if s == 0:
                # V(c[t]^i dlogt) = V(c[t]^i) dlogt
                normalize_v_dlog_term(target, 1, i, c, into=result)
            else:
                # V dV^s = p dV^{s+1}
                normalize_dv_term(target, s + 1, i, self.params.p * c, into=result)
        return result

    def frobenius(self) -> "DrwElement":
        if self.params.n < 2:
            raise ValueError("Frobenius needs level at least 2")
        target = self.params.shifted(-1)
        result = DrwElement.zero(target)
        for (s, i), c in self.funcs.items():
            if s == 0:
                _insert_slot(result.funcs, target, 0, self.params.p * i, c)
            else:
                # F V^s = p V^{s-1}
                normalize_function_term(
                    target, s - 1, i, self.params.p * c, into=result
                )
        for (s, i), c in self.forms.items():
            if s == 0:
                # F(dlogt) = dlogt
                _insert_slot(result.forms, target, 0, self.params.p * i, c)
            elif s == 1:
                # F dV = d
                _insert_slot(result.forms, target, 0, i, i * c)
            else:
                _insert_slot(result.forms, target, s - 1, i, c)
        return result

    def restrict(self) -> "DrwElement":
        if self.params.n < 2:
            raise ValueError("restriction needs level at least 2")
        target = self.params.shifted(-1)
        result = DrwElement.zero(target)
        for (s, i), c in self.funcs.items():
            if s <= target.n - 1:
                _insert_slot(result.funcs, target, s, i, c)
        for (s, i), c in self.forms.items():
            if s <= target.n - 1:
                _insert_slot(result.forms, target, s, i, c)
        return result

    def truncate(self, N: int) -> "DrwElement":
        """Image in the complex of F_p[t]/(t^N)."""
        if self.params.N is not None and N > self.params.N:
            raise ValueError(
                f"cannot coarsen truncation {self.params.N} to {N}"
            )
        target = self.params.shifted(0, N=N)
        result = DrwElement.zero(target)
        for (s, i), c in self.funcs.items():
            _insert_slot(result.funcs, target, s, i, c)
        for (s, i), c in self.forms.items():
            _insert_slot(result.forms, target, s, i, c)
        return result


# ---------------------------------------------------------------------------
# slot insertion and term normalization
# ---------------------------------------------------------------------------

def _insert_slot(slots, params: DrwParams, s: int, i: int, c: int):
    modulus = params.slot_modulus(s, i)
    c = (slots.get((s, i), 0) + c) % modulus
    if c:
        slots[(s, i)] = c
    else:
        slots.pop((s, i), None)


def _trace_step(trace, rule, state_before, state_after):
    if trace is not None:
        trace.append((rule, state_before, state_after))


def normalize_function_term(
    params: DrwParams, s: int, i: int, c: int, into=None, trace=None
) -> DrwElement:
    """Rewrite V^s(c[t]^i) into normal-form slots."""
    result = into if into is not None else DrwElement.zero(params)
    while True:
        if i == 0 and s > 0:
            _trace_step(trace, "v-const", (FUNC, s, i, c), (FUNC, 0, 0, params.p ** s * c))
            s, c = 0, params.p ** s * c
        elif s > 0 and i % params.p == 0:
            _trace_step(
                trace, "v-absorb",
                (FUNC, s, i, c), (FUNC, s - 1, i // params.p, params.p * c),
            )
            s, i, c = s - 1, i // params.p, params.p * c
        else:
            break
    _trace_step(trace, "emit-func", (FUNC, s, i, c), None)
    _insert_slot(result.funcs, params, s, i, c)
    return result


def normalize_dv_term(
    params: DrwParams, s: int, i: int, c: int, into=None, trace=None
) -> DrwElement:
    """Rewrite dV^s(c[t]^i) into normal-form slots (s = 0 reads d(c[t]^i))."""
    result = into if into is not None else DrwElement.zero(params)
    while True:
        if i == 0:
            # dV^s of a scalar vanishes
            _trace_step(trace, "d-scalar", (DV, s, i, c), None)
            return result
        if s > 0 and i % params.p == 0:
            _trace_step(
                trace, "dv-absorb",
                (DV, s, i, c), (DV, s - 1, i // params.p, params.p * c),
            )
            s, i, c = s - 1, i // params.p, params.p * c
        else:
            break
    if s == 0:
        _trace_step(trace, "d-monomial", (DV, 0, i, c), (VDLOG, 0, i, i * c))
        c = i * c
    _trace_step(trace, "emit-form", (VDLOG if s == 0 else DV, s, i, c), None)
    _insert_slot(result.forms, params, s, i, c)
    return result


def normalize_v_dlog_term(
    params: DrwParams, s: int, i: int, c: int, into=None, trace=None
) -> DrwElement:
    """Rewrite V^s(c[t]^i) dlogt into normal-form slots."""
    result = into if into is not None else DrwElement.zero(params)
    while True:
        if s == 0:
            break
        if i == 0:
            _trace_step(
                trace, "v-const",
                (VDLOG, s, i, c), (VDLOG, 0, 0, params.p ** s * c),
            )
            s, c = 0, params.p ** s * c
            break
        if i % params.p == 0:
            _trace_step(
                trace, "v-absorb",
                (VDLOG, s, i, c), (VDLOG, s - 1, i // params.p, params.p * c),
            )
            s, i, c = s - 1, i // params.p, params.p * c
        else:
            break
    if s == 0:
        _trace_step(trace, "emit-form", (VDLOG, 0, i, c), None)
        _insert_slot(result.forms, params, 0, i, c)
        return result
    # V^s(c[t]^i) dlogt = p^s i^{-1} dV^s(c[t]^i) once p does not divide i
    modulus = params.p ** (params.n - s)
    lifted = pow(i, -1, modulus) * params.p ** s * c
    _trace_step(trace, "dlog-to-dv", (VDLOG, s, i, c), (DV, s, i, lifted))
    _trace_step(trace, "emit-form", (DV, s, i, lifted), None)
    _insert_slot(result.forms, params, s, i, lifted)
    return result


def replay_trace(params: DrwParams, start, trace) -> DrwElement:
    """Re-run a recorded rewrite chain, checking each side condition."""
    result = DrwElement.zero(params)
    state = start
    p = params.p
    for rule, before, after in trace:
        if before != state:
            raise ValueError(f"trace step {rule} does not apply to {state}")
        family, s, i, c = state
        if rule == "v-const":
            if i != 0 or s == 0:
                raise ValueError("v-const needs a positive V-depth scalar")
            state = (family, 0, 0, p ** s * c)
        elif rule in ("v-absorb", "dv-absorb"):
            if s == 0 or i == 0 or i % p:
                raise ValueError("absorb needs s > 0 and p dividing i > 0")
            state = (family, s - 1, i // p, p * c)
        elif rule == "d-scalar":
            if i != 0:
                raise ValueError("d-scalar needs exponent 0")
            return result
        elif rule == "d-monomial":
            if s != 0 or i == 0:
                raise ValueError("d-monomial needs s = 0 and i > 0")
            state = (VDLOG, 0, i, i * c)
        elif rule == "dlog-to-dv":
            if s == 0 or i % p == 0:
                raise ValueError("dlog-to-dv needs s > 0 and p not dividing i")
            modulus = p ** (params.n - s)
            state = (DV, s, i, pow(i, -1, modulus) * p ** s * c)
        elif rule == "emit-func":
            _insert_slot(result.funcs, params, s, i, c)
            return result
        elif rule == "emit-form":
            _insert_slot(result.forms, params, s, i, c)
            return result
        else:
            raise ValueError(f"unknown rule {rule!r}")
        if after is not None and after != state:
            raise ValueError(f"trace step {rule} recorded a wrong successor")
    raise ValueError("trace ended without an emit step")


# ---------------------------------------------------------------------------
# term products
# ---------------------------------------------------------------------------

def _mul_func_func(result, params, s, i, c, s2, i2, c2):
    # V^s(z) V^{s'}(w) = V^{s'}(p^s F^{s'-s}(z) w) for s <= s'
    if s > s2:
        s, i, c, s2, i2, c2 = s2, i2, c2, s, i, c
    K = params.p ** (s2 - s) * i + i2
    normalize_function_term(params, s2, K, params.p ** s * c * c2, into=result)


def _mul_func_form(result, params, s, i, c, s2, i2, c2):
    p = params.p
    if s2 == 0:
        # V^s(z) (c2 [t]^{i2} dlogt) = V^s(z F^s([t]^{i2})) dlogt
        normalize_v_dlog_term(result.params, s, i + p ** s * i2, c * c2, into=result)
        return
    if s > s2:
        # V^s(z) dV^{s'}(w) = V^s(z F^{s-s'}(dw)) pulls the exponent in
        K = i + p ** (s - s2) * i2
        normalize_v_dlog_term(result.params, s, K, i2 * c * c2, into=result)
        return
    # s <= s': Leibniz off d(V^s(z) V^{s'}(w))
    K = p ** (s2 - s) * i + i2
    normalize_dv_term(result.params, s2, K, p ** s * c * c2, into=result)
    normalize_v_dlog_term(result.params, s2, K, -i * c * c2, into=result)


# ---------------------------------------------------------------------------
# textual form language
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<dv>dV)|(?P<v>V)|(?P<dlog>dlogt)|(?P<t>\[t\])"
    r"|(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    tokens = []
    text = text.rstrip()
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == match.start():
            raise DrwParseError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        value = match.group(kind)
        tokens.append((kind, value, match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _DrwParser:
    """expr := term (('+'|'-') term)*; term := factor ('*' factor)*."""

    def __init__(self, tokens, params: DrwParams):
        self.tokens = tokens
        self.pos = 0
        self.params = params

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        token = self.tokens[self.pos]
        if kind is not None and token[0] != kind:
            raise DrwParseError(f"expected {kind}, found {token[1]!r}", token[2])
        if value is not None and token[1] != value:
            raise DrwParseError(f"expected {value!r}, found {token[1]!r}", token[2])
        self.pos += 1
        return token

    def parse(self) -> DrwElement:
        element = self.expr(self.params)
        token = self.peek()
        if token[0] != "end":
            raise DrwParseError(f"trailing input {token[1]!r}", token[2])
        return element

    def expr(self, params) -> DrwElement:
        element = self.term(params)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take("op")[1]
            right = self.term(params)
            element = element + right if op == "+" else element - right
        return element

    def term(self, params) -> DrwElement:
        element = self.factor(params)
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take("op", "*")
            element = element * self.factor(params)
        return element

    def exponent(self) -> int:
        self.take("op", "^")
        return int(self.take("int")[1])

    def factor(self, params) -> DrwElement:
        kind, value, position = self.peek()
        if kind == "op" and value == "-":
            self.take("op", "-")
            return -self.factor(params)
        if kind == "op" and value == "(":
            self.take("op", "(")
            element = self.expr(params)
            self.take("op", ")")
            return element
        if kind == "int":
            self.take("int")
            return DrwElement.scalar(params, int(value))
        if kind == "t":
            self.take("t")
            i = 1
            if self.peek()[0] == "op" and self.peek()[1] == "^":
                i = self.exponent()
            return DrwElement.monomial(params, i)
        if kind == "dlog":
            self.take("dlog")
            return DrwElement.dlog(params)
        if kind in ("v", "dv"):
            self.take(kind)
            depth = self.exponent()
            if depth < 0 or depth >= params.n:
                raise DrwParseError(
                    f"operator depth {depth} does not fit level {params.n}",
                    position,
                )
            inner_params = DrwParams(params.p, params.n - depth, params.N)
            self.take("op", "(")
            inner = self.expr(inner_params)
            self.take("op", ")")
            for _ in range(depth):
                inner = inner.verschiebung()
            return inner.d() if kind == "dv" else inner
        raise DrwParseError(f"unexpected token {value!r}", position)


def parse_drw(text: str, params: DrwParams) -> DrwElement:
    """Parse `V^1([t]^2) * dlogt + 3` style expressions at level params.n.

    The argument of V^s or dV^s is evaluated at level n - s, matching
    V^s : W_{n-s} -> W_n.
    """
    return _DrwParser(_tokenize(text), params).parse()


def format_drw(element: DrwElement) -> str:
    """Render slots as `(q; s,i) -> value` lines; the zero element is `0`."""
    lines = [
        f"({q}; {s},{i}) -> {c}" for q, s, i, c in element.slots()
    ]
    return "\n".join(lines) if lines else "0"


# ---------------------------------------------------------------------------
# random elements and expression trees
# ---------------------------------------------------------------------------

def random_element(
    params: DrwParams, rng: random.Random, max_slots: int = 4,
    degrees=(0, 1),
) -> DrwElement:
    """Random normal-form element with small exponents."""
    result = DrwElement.zero(params)
    for _ in range(rng.randrange(1, max_slots + 1)):
        degree = rng.choice(degrees)
        s = rng.randrange(params.n)
        i = rng.randrange(0, 9)
        c = rng.randrange(1, params.p ** params.n)
        if degree == 0:
            normalize_function_term(params, s, i, c, into=result)
        elif s == 0:
            normalize_v_dlog_term(params, 0, i, c, into=result)
        else:
            normalize_dv_term(params, s, i, c, into=result)
    return result


def random_tree(rng: random.Random, depth: int):
    """Random expression tree over leaves [t]^i, scalars and dlogt."""
    if depth == 0 or rng.random() < 0.3:
        kind = rng.choice(["mono", "mono", "scalar", "dlog"])
        if kind == "mono":
            return ("mono", rng.randrange(0, 7), rng.randrange(1, 12))
        if kind == "scalar":
            return ("scalar", rng.randrange(1, 12))
        return ("dlog",)
    kind = rng.choice(["add", "add", "mul", "v", "dv"])
    if kind in ("add", "mul"):
        return (kind, random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    return (kind, 1, random_tree(rng, depth - 1))


def eval_tree(tree, params: DrwParams) -> DrwElement:
    kind = tree[0]
    if kind == "mono":
        return DrwElement.monomial(params, tree[1], tree[2])
    if kind == "scalar":
        return DrwElement.scalar(params, tree[1])
    if kind == "dlog":
        return DrwElement.dlog(params)
    if kind == "add":
        return eval_tree(tree[1], params) + eval_tree(tree[2], params)
    if kind == "mul":
        return eval_tree(tree[1], params) * eval_tree(tree[2], params)
    if kind in ("v", "dv"):
        depth = tree[1]
        if params.n - depth < 1:
            # not enough room: treat as the identity-level leaf
            inner = eval_tree(tree[2], params)
            return inner.d() if kind == "dv" else inner
        inner = eval_tree(tree[2], DrwParams(params.p, params.n - depth, params.N))
        for _ in range(depth):
            inner = inner.verschiebung()
        return inner.d() if kind == "dv" else inner
    raise ValueError(f"unknown node {kind!r}")


def shuffle_tree(tree, rng: random.Random):
    """Equivalent tree: random commutations and associativity rotations."""
    kind = tree[0]
    if kind in ("mono", "scalar", "dlog"):
        return tree
    if kind in ("v", "dv"):
        return (kind, tree[1], shuffle_tree(tree[2], rng))
    left = shuffle_tree(tree[1], rng)
    right = shuffle_tree(tree[2], rng)
    if rng.random() < 0.5:
        left, right = right, left
    # rotate ((a op b) op c) -> (a op (b op c)) when shapes allow
    if left[0] == kind and rng.random() < 0.5:
        a, b = left[1], left[2]
        return (kind, a, (kind, b, right))
    return (kind, left, right)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def check_truncation_compatibility(
    p: int, n: int, N: int, pairs: int, seed: int = 0
) -> VerificationReport:
    """Truncation is a map of differential graded rings."""
    report = VerificationReport(
        "drw-truncation", {"p": p, "n": n, "N": N, "pairs": pairs}
    )
    params = DrwParams(p, n)
    rng = random.Random(seed)
    for _ in range(pairs):
        x = random_element(params, rng)
        y = random_element(params, rng)
        product = (x * y).truncate(N)
        factored = x.truncate(N) * y.truncate(N)
        report.record(
            product == factored,
            f"truncate(x*y) with x={x!r} y={y!r}",
            repr(product),
            repr(factored),
        )
        differential = x.d().truncate(N)
        other = x.truncate(N).d()
        report.record(
            differential == other,
            f"truncate(dx) with x={x!r}",
            repr(differential),
            repr(other),
        )
    return report


def check_confluence(
    p: int, n: int, trees: int, seed: int = 0, depth: int = 4
) -> VerificationReport:
    """Reassociated and commuted expression trees share one normal form."""
    report = VerificationReport("drw-confluence", {"p": p, "n": n, "trees": trees})
    params = DrwParams(p, n)
    rng = random.Random(seed)
    for _ in range(trees):
        tree = random_tree(rng, depth)
        shuffled = shuffle_tree(tree, rng)
        left = eval_tree(tree, params)
        right = eval_tree(shuffled, params)
        report.record(
            left == right,
            f"tree {tree!r} vs {shuffled!r}",
            repr(left),
            repr(right),
        )
    return report


def check_degree_two_vanishing(
    p: int, n: int, pairs: int, seed: int = 0
) -> VerificationReport:
    """Products of two degree-1 elements normalize to zero."""
    report = VerificationReport(
        "drw-degree-two", {"p": p, "n": n, "pairs": pairs}
    )
    params = DrwParams(p, n)
    rng = random.Random(seed)
    for _ in range(pairs):
        x = random_element(params, rng, degrees=(1,))
        y = random_element(params, rng, degrees=(1,))
        product = x * y
        report.record(
            product.is_zero,
            f"x={x!r} y={y!r}",
            "0",
            repr(product),
        )
    return report


def teichmuller_residue(p: int, m: int, value: int) -> int:
    """Teichmuller representative of value mod p inside Z/p^m."""
    return pow(value, p ** (m - 1), p ** m)


def theta_product(
    p: int, n: int, e2: int, a_coords, u: int
) -> DrwElement:
    """(sum_r V^r([a_r])) * (sum_s dV^s([u][t]^{e2})) over F_p[t]/(t^{e2+1})."""
    params = DrwParams(p, n, N=e2 + 1)
    first = DrwElement.zero(params)
    for r, a_r in enumerate(a_coords):
        scalar = teichmuller_residue(p, n - r, a_r % p)
        normalize_function_term(params, r, 0, scalar, into=first)
    second = DrwElement.zero(params)
    for s in range(n):
        lift = teichmuller_residue(p, n - s, u % p)
        normalize_dv_term(params, s, e2, lift, into=second)
    return first * second


def check_theta_criterion(p: int, n: int, e2: int, u: int) -> VerificationReport:
    """The product vanishes exactly when the leading coordinate does."""
    report = VerificationReport(
        "drw-theta", {"p": p, "n": n, "e2": e2, "u": u}
    )
    coords = [0] * n
    while True:
        product = theta_product(p, n, e2, coords, u)
        expected_zero = coords[0] % p == 0
        report.record(
            product.is_zero == expected_zero,
            f"a={tuple(coords)}",
            "zero iff a_0 = 0",
            repr(product),
        )
        for idx in range(n):
            coords[idx] += 1
            if coords[idx] < p:
                break
            coords[idx] = 0
        else:
            break
    return report
