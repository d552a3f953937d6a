"""p-typical Witt vectors W_n(A) over exact coefficient rings.

Structure polynomials (sum, product, negation, Frobenius) are computed
once per (p, n) by the ghost-lift recursion: the ghost polynomials
``w_s = sum_{i<=s} p^i X_i^{p^{s-i}}`` determine each structure
polynomial coordinatewise, and the recursion divides exactly by p^s.
The exact divisions succeeding is itself the integrality proof; a
failed division raises and is a hard error.

Arithmetic on vectors runs through two routes.  Over a coefficient
ring with no integer modulus (a free Z-module in canonical form) the
ghost map is injective, so ring operations are performed on ghost
coordinates and inverted; this keeps symbolic computations in
W_n(Z[x]) feasible at n = 4.  Over rings with p-torsion the ghost map
is unavailable and coordinates are obtained by substituting into the
cached integral structure polynomials.  The two routes are
cross-checked against each other in the test suite.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .algebra import (
    PolyParseError,
    RingError,
    RingMismatchError,
    RingSpec,
    SparsePoly,
    parse_poly,
)

DEFAULT_MAX_LEVEL = 6


def max_level() -> int:
    """Level cap for n; override with the WITTFORGE_MAX_N variable."""
    raw = os.environ.get("WITTFORGE_MAX_N")
    if raw is None:
        return DEFAULT_MAX_LEVEL
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"WITTFORGE_MAX_N must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"WITTFORGE_MAX_N must be >= 1, got {value}")
    return value


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class WittParams:
    """Length and prime of a Witt vector ring W_n, p odd."""

    p: int
    n: int

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        cap = max_level()
        if self.n > cap:
            raise ValueError(
                f"n = {self.n} exceeds the level cap {cap}; "
                f"raise WITTFORGE_MAX_N to override"
            )

    def shorter(self, by: int = 1) -> "WittParams":
        return WittParams(self.p, self.n - by)

    def longer(self, by: int = 1) -> "WittParams":
        return WittParams(self.p, self.n + by)


def ghost_poly(ring: RingSpec, names: Sequence[str], s: int, p: int) -> SparsePoly:
    """w_s = sum_{i<=s} p^i * names[i]^(p^(s-i)) in the given ring."""
    acc = ring.zero()
    for i in range(s + 1):
        acc = acc + (p ** i) * (ring.var(names[i]) ** (p ** (s - i)))
    return acc


@dataclass(frozen=True)
class StructurePolyCache:
    """Integral structure polynomials of W_n for one (p, n).

    All entries live in Z[X_0..X_{n-1}, Y_0..Y_{n-1}]; negation and
    Frobenius polynomials involve only the X variables.
    """

    p: int
    n: int
    ring: RingSpec
    sum_polys: tuple[SparsePoly, ...]
    product_polys: tuple[SparsePoly, ...]
    negation_polys: tuple[SparsePoly, ...]
    frobenius_polys: tuple[SparsePoly, ...]

    @property
    def x_names(self) -> tuple[str, ...]:
        return tuple(f"X{i}" for i in range(self.n))

    @property
    def y_names(self) -> tuple[str, ...]:
        return tuple(f"Y{i}" for i in range(self.n))

    def verify_ghost_identities(self) -> list[str]:
        """Recompute every defining ghost identity from scratch.

        Returns a list of violation descriptions; empty means all
        identities hold symbolically over Z.
        """
        problems = []
        ring, p, n = self.ring, self.p, self.n
        xs, ys = self.x_names, self.y_names

        def ghost_of(coords: Sequence[SparsePoly], s: int) -> SparsePoly:
            acc = ring.zero()
            for i in range(s + 1):
                acc = acc + (p ** i) * (coords[i] ** (p ** (s - i)))
            return acc

        for s in range(n):
            wx = ghost_poly(ring, xs, s, p)
            wy = ghost_poly(ring, ys, s, p)
            if ghost_of(self.sum_polys, s) != wx + wy:
                problems.append(f"sum ghost identity fails at s={s}")
            if ghost_of(self.product_polys, s) != wx * wy:
                problems.append(f"product ghost identity fails at s={s}")
            if ghost_of(self.negation_polys, s) != -wx:
                problems.append(f"negation ghost identity fails at s={s}")
        for s in range(n - 1):
            target = ghost_poly(ring, xs, s + 1, p)
            if ghost_of(self.frobenius_polys, s) != target:
                problems.append(f"frobenius ghost identity fails at s={s}")
        return problems


@lru_cache(maxsize=None)
def build_structure_polys(p: int, n: int) -> StructurePolyCache:
    """Solve the ghost identities coordinatewise over Z and cache."""
    if not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    xs = tuple(f"X{i}" for i in range(n))
    ys = tuple(f"Y{i}" for i in range(n))
    ring = RingSpec(xs + ys)

    def solve(targets: list[SparsePoly]) -> tuple[SparsePoly, ...]:
        # coords[s] = (targets[s] - sum_{i<s} p^i coords[i]^{p^{s-i}}) / p^s
        coords: list[SparsePoly] = []
        for s, target in enumerate(targets):
            acc = target
            for i in range(s):
                acc = acc - (p ** i) * (coords[i] ** (p ** (s - i)))
            coords.append(acc.exact_div(p ** s))
        return tuple(coords)

    wx = [ghost_poly(ring, xs, s, p) for s in range(n)]
    wy = [ghost_poly(ring, ys, s, p) for s in range(n)]
    sum_polys = solve([wx[s] + wy[s] for s in range(n)])
    product_polys = solve([wx[s] * wy[s] for s in range(n)])
    negation_polys = solve([-wx[s] for s in range(n)])
    frobenius_polys = solve([wx[s + 1] for s in range(n - 1)])
    return StructurePolyCache(
        p=p,
        n=n,
        ring=ring,
        sum_polys=sum_polys,
        product_polys=product_polys,
        negation_polys=negation_polys,
        frobenius_polys=frobenius_polys,
    )


class WittVector:
    """Immutable length-n Witt vector with coordinates in one ring."""

    __slots__ = ("params", "ring", "coords")

    def __init__(self, params: WittParams, ring: RingSpec, coords: Iterable):
        self.params = params
        self.ring = ring
        prepared = []
        for c in coords:
            prepared.append(ring.poly(c))
        if len(prepared) != params.n:
            raise ValueError(
                f"expected {params.n} coordinates, got {len(prepared)}"
            )
        self.coords = tuple(prepared)

    # -- construction -------------------------------------------------------
    @staticmethod
    def zero(params: WittParams, ring: RingSpec) -> "WittVector":
        return WittVector(params, ring, [0] * params.n)

    @staticmethod
    def one(params: WittParams, ring: RingSpec) -> "WittVector":
        return teichmuller(params, ring, 1)

    # -- plumbing ------------------------------------------------------------
    def _check_compatible(self, other: "WittVector") -> None:
        if self.params != other.params:
            raise ValueError(f"params mismatch: {self.params} vs {other.params}")
        if self.ring != other.ring:
            raise RingMismatchError("Witt vectors live over different rings")

    def _coerce(self, other):
        if isinstance(other, WittVector):
            self._check_compatible(other)
            return other
        if isinstance(other, int):
            return witt_from_int(self.params, self.ring, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, WittVector):
            return NotImplemented
        return (
            self.params == other.params
            and self.ring == other.ring
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.params, self.ring, self.coords))

    def __repr__(self) -> str:
        return f"<witt {format_witt(self)}>"

    def __str__(self) -> str:
        return format_witt(self)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coords)

    # -- ghost route -----------------------------------------------------------
    def ghost(self) -> tuple[SparsePoly, ...]:
        """(w_0,...,w_{n-1}) with w_s = sum p^i a_i^{p^{s-i}}."""
        p = self.params.p
        out = []
        for s in range(self.params.n):
            acc = self.ring.zero()
            for i in range(s + 1):
                acc = acc + (p ** i) * (self.coords[i] ** (p ** (s - i)))
            out.append(acc)
        return tuple(out)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.ring.is_torsion_free:
            ga, gb = self.ghost(), other.ghost()
            return ghost_invert(self.params, self.ring, [x + y for x, y in zip(ga, gb)])
        return self._apply_binary("sum_polys", other)

    __radd__ = __add__

    def __neg__(self):
        if self.ring.is_torsion_free:
            return ghost_invert(self.params, self.ring, [-g for g in self.ghost()])
        return self._apply_unary("negation_polys")

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
        if self.ring.is_torsion_free:
            ga, gb = self.ghost(), other.ghost()
            return ghost_invert(self.params, self.ring, [x * y for x, y in zip(ga, gb)])
        return self._apply_binary("product_polys", other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative exponent")
        result = WittVector.one(self.params, self.ring)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _apply_binary(self, family: str, other: "WittVector") -> "WittVector":
        cache = build_structure_polys(self.params.p, self.params.n)
        bindings = {}
        for i, name in enumerate(cache.x_names):
            bindings[name] = self.coords[i]
        for i, name in enumerate(cache.y_names):
            bindings[name] = other.coords[i]
        polys = getattr(cache, family)
        coords = [poly.substitute(bindings, ring=self.ring) for poly in polys]
        return WittVector(self.params, self.ring, coords)

    def _apply_unary(self, family: str) -> "WittVector":
        cache = build_structure_polys(self.params.p, self.params.n)
        bindings = {name: self.coords[i] for i, name in enumerate(cache.x_names)}
        polys = getattr(cache, family)
        coords = [poly.substitute(bindings, ring=self.ring) for poly in polys]
        return WittVector(self.params, self.ring, coords)

    # -- operators -----------------------------------------------------------
    def frobenius(self) -> "WittVector":
        """F: W_n -> W_{n-1}, determined by w_s(F(a)) = w_{s+1}(a)."""
        if self.params.n < 2:
            raise ValueError("frobenius needs n >= 2")
        shorter = self.params.shorter()
        if self.ring.is_torsion_free:
            ghosts = self.ghost()[1:]
            return ghost_invert(shorter, self.ring, list(ghosts))
        cache = build_structure_polys(self.params.p, self.params.n)
        bindings = {name: self.coords[i] for i, name in enumerate(cache.x_names)}
        coords = [
            poly.substitute(bindings, ring=self.ring)
            for poly in cache.frobenius_polys
        ]
        return WittVector(shorter, self.ring, coords)

    def verschiebung(self) -> "WittVector":
        """V: W_n -> W_{n+1}, the shift (0, a_0, ..., a_{n-1})."""
        longer = self.params.longer()
        return WittVector(longer, self.ring, (self.ring.zero(),) + self.coords)

    def restrict(self) -> "WittVector":
        """R: W_n -> W_{n-1}, dropping the last coordinate."""
        if self.params.n < 2:
            raise ValueError("restrict needs n >= 2")
        return WittVector(self.params.shorter(), self.ring, self.coords[:-1])


def teichmuller(params: WittParams, ring: RingSpec, x) -> WittVector:
    """[x]_n = (x, 0, ..., 0), the multiplicative section."""
    coords = [ring.poly(x)] + [ring.zero()] * (params.n - 1)
    return WittVector(params, ring, coords)


def ghost_invert(
    params: WittParams, ring: RingSpec, ghosts: Sequence[SparsePoly]
) -> WittVector:
    """Recover coordinates from ghost components over a torsion-free ring."""
    if not ring.is_torsion_free:
        raise RingError("ghost inversion requires a torsion-free ring")
    p = params.p
    coords: list[SparsePoly] = []
    for s in range(len(ghosts)):
        acc = ring.poly(ghosts[s])
        for i in range(s):
            acc = acc - (p ** i) * (coords[i] ** (p ** (s - i)))
        coords.append(acc.exact_div(p ** s))
    return WittVector(params, ring, coords)


@lru_cache(maxsize=None)
def _int_witt_coords(p: int, n: int, c: int) -> tuple[int, ...]:
    # ghost inversion of the constant ghost vector (c, c, ..., c) over Z
    coords: list[int] = []
    for s in range(n):
        acc = c
        for i in range(s):
            acc -= (p ** i) * coords[i] ** (p ** (s - i))
        q, r = divmod(acc, p ** s)
        if r:
            raise ArithmeticError(
                f"integer Witt coordinates of {c} are not integral at s={s}"
            )
        coords.append(q)
    return tuple(coords)


def witt_from_int(params: WittParams, ring: RingSpec, c: int) -> WittVector:
    """Image of the integer c under the unique map Z -> W_n(ring)."""
    ints = _int_witt_coords(params.p, params.n, c)
    return WittVector(params, ring, [ring.poly(v) for v in ints])


def evaluate_int_poly(f: SparsePoly, w: WittVector) -> WittVector:
    """Evaluate a one-variable integer polynomial at a Witt vector.

    Uses sum_i c_i * w^i with Horner grouping; f must live over Z in a
    single variable.
    """
    if f.ring.modulus is not None or len(f.ring.variables) != 1:
        raise RingError("expected a one-variable integer polynomial")
    terms = sorted(((e[0], c) for e, c in f.terms.items()), reverse=True)
    acc = WittVector.zero(w.params, w.ring)
    prev_exp = None
    for exp, coeff in terms:
        if prev_exp is not None:
            for _ in range(prev_exp - exp):
                acc = acc * w
        acc = acc + witt_from_int(w.params, w.ring, coeff)
        prev_exp = exp
    if prev_exp is not None:
        for _ in range(prev_exp):
            acc = acc * w
    return acc


def ideal_membership(w: WittVector, generators: Sequence[SparsePoly]) -> bool:
    """True iff every coordinate lies in the monomial ideal generated.

    Each generator must be a single monomial in the coordinate ring; a
    polynomial belongs to the ideal iff each of its terms is divisible
    by some generator monomial.
    """
    gen_exps = []
    for g in generators:
        terms = g.terms
        if len(terms) != 1:
            raise ValueError(f"ideal generator {g} is not a monomial")
        gen_exps.append(next(iter(terms)))

    def term_in_ideal(expvec: tuple[int, ...]) -> bool:
        return any(
            all(e >= ge for e, ge in zip(expvec, gen))
            for gen in gen_exps
        )

    for coord in w.coords:
        for expvec in coord.terms:
            if not term_in_ideal(expvec):
                return False
    return True


# ---------------------------------------------------------------------------
# textual form: W{p=3,n=2}(x, x + x^2)
# ---------------------------------------------------------------------------

_HEAD_RE = re.compile(r"^\s*W\{p=(\d+),n=(\d+)\}\(")


def format_witt(w: WittVector) -> str:
    inner = ", ".join(str(c) for c in w.coords)
    return f"W{{p={w.params.p},n={w.params.n}}}({inner})"


def parse_witt(text: str, ring: RingSpec) -> WittVector:
    """Parse the textual Witt form back into a vector over the ring."""
    match = _HEAD_RE.match(text)
    if match is None:
        raise PolyParseError("expected W{p=..,n=..}(...) form", 1, 1)
    p, n = int(match.group(1)), int(match.group(2))
    body = text[match.end():].rstrip()
    if not body.endswith(")"):
        raise PolyParseError("unterminated Witt vector", 1, len(text))
    body = body[:-1]
    # split on commas at parenthesis depth zero
    pieces, depth, start = [], 0, 0
    for k, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append(body[start:k])
            start = k + 1
    pieces.append(body[start:])
    params = WittParams(p, n)
    if len(pieces) != n:
        raise PolyParseError(
            f"expected {n} coordinates, found {len(pieces)}", 1, 1
        )
    coords = [parse_poly(piece, ring) for piece in pieces]
    return WittVector(params, ring, coords)
