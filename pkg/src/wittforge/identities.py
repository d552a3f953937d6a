"""Machine checks for the arithmetic lemmas underlying the library.

Four families of checks live here.

* Integrality of the polynomials ``f_s(X) = p^{-s}((1-X)^{p^s} -
  (1-X^p)^{p^{s-1}})`` and the exact p-adic divisibility of the
  numerator's coefficients (p^s when p does not divide the exponent,
  p^{2s} when it does), with the Kummer carry-count description of
  v_p of binomial coefficients as an independent cross-check.
* The Teichmuller expansion ``[1-a]_n = [1]_n - [a]_n +
  sum_{0<s<n} V^s(f_s([a]_{n-s}))``, verified symbolically in
  W_n(Z[a]).
* The dlog-type congruence ``[1+x]_n - [1]_n = sum V^s([x]_{n-s})
  modulo W_n((x^2))`` in W_n(Z[x]), together with the coordinatewise
  statement a_s = x mod (x^2).
* Congruences in W_n of a finite ramified model O = Z[pi]/(pi^e +
  p*theta(pi), p^m): the Eisenstein unit congruence relating [pi]^e to
  theta([pi])V(1) modulo pW_n, the congruence p = [p] + V(1) modulo
  pVW_n, and the two ideal inclusions p*W_n(m^j) inside
  W_n(m^{min(j+e,pj)}) and W_n(m^{j+e}) inside p*W_n(m^j) for
  j >= e/(p-1).  Divisibility statements are verified by exhibiting
  explicit witness vectors found by a coordinatewise backtracking
  search in the finite model.

With the relation pi^e = -p*theta(pi), the verified unit congruence is

    [pi]^e - theta([pi])V(1) in pW_n(O),

the sign being forced: for p=3, e=1, theta=1, n=2 the vector
[pi]^e + theta([pi])V(1) = [-3] + V(1) = (-3, 1) has no halving by 3
(3*(w0,w1) = (3w0, 3w1 - 8w0^3) forces w0 = -1 mod 9, and then
3w1 = 1 + 8w0^3 = -7 mod 27, which is not divisible by 3), while
[-3] - V(1) = (-3, -1) = 3*(-1, -3).  Either sign yields the
similarity [pi]^e and V(1) agree up to the unit -theta([pi]).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algebra import RingError, RingSpec, SparsePoly
from .report import VerificationReport
from .witt import (
    WittParams,
    WittVector,
    evaluate_int_poly,
    ghost_invert,
    ideal_membership,
    teichmuller,
    witt_from_int,
)

_ZX = RingSpec(("X",))


class WitnessSearchExhausted(RuntimeError):
    """No witness vector exists in the finite model; raise m and retry."""


@dataclass(frozen=True)
class FsPolynomial:
    """The exact quotient p^{-s}((1-X)^{p^s} - (1-X^p)^{p^{s-1}})."""

    p: int
    s: int
    poly: SparsePoly


def _fs_numerator(p: int, s: int) -> SparsePoly:
    one, x = _ZX.one(), _ZX.var("X")
    return (one - x) ** (p ** s) - (one - x ** p) ** (p ** (s - 1))


def build_fs(p: int, s: int) -> FsPolynomial:
    """Construct f_s; the exact division by p^s proves integrality."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    return FsPolynomial(p, s, _fs_numerator(p, s).exact_div(p ** s))


def vp(p: int, value: int) -> int | float:
    """p-adic valuation of an integer; +inf for zero."""
    if value == 0:
        return math.inf
    v = 0
    while value % p == 0:
        value //= p
        v += 1
    return v


def check_congruence_lemma(p: int, s: int) -> VerificationReport:
    """Coefficient of X^i divisible by p^s if p does not divide i, p^{2s} if it does."""
    report = VerificationReport("congruence-lemma", {"p": p, "s": s})
    numerator = _fs_numerator(p, s)
    for (i,), coeff in sorted(numerator.terms.items()):
        required = 2 * s if i % p == 0 else s
        valuation = vp(p, coeff)
        report.record(
            valuation >= required,
            f"coefficient of X^{i}",
            f"v_{p} >= {required}",
            f"v_{p}({coeff}) = {valuation}",
        )
    # the two endpoint values vanish identically
    f = build_fs(p, s).poly
    report.record(f.substitute({"X": 0}).as_int() == 0, "f_s(0)", 0,
                  f.substitute({"X": 0}).as_int())
    report.record(f.substitute({"X": 1}).as_int() == 0, "f_s(1)", 0,
                  f.substitute({"X": 1}).as_int())
    return report


def base_p_carries(p: int, m: int, n: int) -> int:
    """Number of carries when adding m and n in base p."""
    carries = 0
    carry = 0
    while m or n or carry:
        digit = m % p + n % p + carry
        carry = 1 if digit >= p else 0
        carries += carry
        m //= p
        n //= p
    return carries


def check_kummer_valuation(p: int, bound: int) -> VerificationReport:
    """v_p(binom(m+n, m)) equals the base-p carry count of m + n."""
    report = VerificationReport("kummer-valuation", {"p": p, "bound": bound})
    for total in range(2, bound + 1):
        for m in range(1, total):
            expected = base_p_carries(p, m, total - m)
            actual = vp(p, math.comb(total, m))
            if not report.record(
                actual == expected,
                f"binom({total},{m})",
                f"{expected} carries",
                f"v_{p} = {actual}",
            ):
                if len(report.counterexamples) > 20:
                    return report
    return report


def poly_at_teichmuller(
    f: SparsePoly, params: WittParams, ring: RingSpec, x
) -> WittVector:
    """Evaluate a one-variable integer polynomial at the Teichmuller [x].

    Because the Teichmuller section is multiplicative, the ghost
    coordinates of f([x]) are f(x^{p^k}); one ghost inversion recovers
    the Witt coordinates.  Requires a torsion-free coefficient ring.
    """
    if not ring.is_torsion_free:
        raise RingError("poly_at_teichmuller needs a torsion-free ring")
    if len(f.ring.variables) != 1 or f.ring.modulus is not None:
        raise RingError("expected a one-variable integer polynomial")
    var = f.ring.variables[0]
    x = ring.poly(x)
    p = params.p
    ghosts = [
        f.substitute({var: x ** (p ** k)}, ring=ring) for k in range(params.n)
    ]
    return ghost_invert(params, ring, ghosts)


def _iterated_v(w: WittVector, times: int) -> WittVector:
    for _ in range(times):
        w = w.verschiebung()
    return w


def check_one_minus_identity(p: int, n: int) -> VerificationReport:
    """[1-a]_n = [1]_n - [a]_n + sum_{0<s<n} V^s(f_s([a]_{n-s})) in W_n(Z[a])."""
    report = VerificationReport("one-minus-identity", {"p": p, "n": n})
    ring = RingSpec(("a",))
    params = WittParams(p, n)
    a = ring.var("a")
    lhs = teichmuller(params, ring, ring.one() - a)
    rhs = teichmuller(params, ring, 1) - teichmuller(params, ring, a)
    for s in range(1, n):
        fs = build_fs(p, s).poly
        piece = poly_at_teichmuller(fs, WittParams(p, n - s), ring, a)
        rhs = rhs + _iterated_v(piece, s)
    for s in range(n):
        report.record(
            lhs.coords[s] == rhs.coords[s],
            f"coordinate {s}",
            str(lhs.coords[s]),
            str(rhs.coords[s]),
        )
    # same statement through the injective ghost map
    for s, (gl, gr) in enumerate(zip(lhs.ghost(), rhs.ghost())):
        report.record(gl == gr, f"ghost {s}", "equal", "ghost mismatch")
    return report


def check_dlog_congruence(p: int, n: int) -> VerificationReport:
    """[1+x]_n - [1]_n = sum V^s([x]_{n-s}) mod W_n((x^2)), coordinatewise a_s = x mod (x^2)."""
    report = VerificationReport("dlog-congruence", {"p": p, "n": n})
    ring = RingSpec(("x",))
    params = WittParams(p, n)
    x = ring.var("x")
    x_squared = [x * x]
    diff = teichmuller(params, ring, ring.one() + x) - teichmuller(params, ring, 1)
    for s, coord in enumerate(diff.coords):
        remainder = coord - x
        report.record(
            ideal_membership(
                WittVector(WittParams(p, 1), ring, [remainder]), x_squared
            ),
            f"a_{s} - x",
            "in (x^2)",
            str(remainder),
        )
    total = diff
    for s in range(n):
        piece = _iterated_v(teichmuller(WittParams(p, n - s), ring, x), s)
        total = total - piece
    report.record(
        ideal_membership(total, x_squared),
        "[1+x] - [1] - sum V^s([x])",
        "in W_n((x^2))",
        format(total),
    )
    return report


# ---------------------------------------------------------------------------
# finite ramified models
# ---------------------------------------------------------------------------

class DvrModel:
    """Finite model O = Z[pi]/(pi^e + p*theta(pi), p^m) of a ramified DVR.

    theta is a one-variable integer polynomial with theta(0) a unit
    modulo p (the Eisenstein condition) and degree at most e.  The
    stored rewrite relation is normalized so that pi^e has an exact
    lower-degree replacement even when theta itself has degree e.
    """

    def __init__(self, p: int, e: int, theta, m: int):
        if e < 1:
            raise ValueError(f"e must be >= 1, got {e}")
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        theta_ring = RingSpec(("x",))
        self.theta = theta_ring.poly(theta)
        if self.theta.degree_in("x") > e:
            raise ValueError("theta must have degree at most e")
        theta0 = self.theta.constant_term()
        if theta0 % p == 0:
            raise ValueError(f"theta(0) = {theta0} is not a unit mod {p}")
        self.p = p
        self.e = e
        self.m = m
        self.modulus = p ** m
        # pi^e + p*theta(pi) = 0; solve for pi^e after moving any pi^e
        # term of theta to the left: (1 + p*theta_e) pi^e = -p*(theta - theta_e x^e)
        coeffs = {exp[0]: c for exp, c in self.theta.terms.items()}
        lead = 1 + p * coeffs.pop(e, 0)
        lead_inv = pow(lead, -1, self.modulus)
        replacement = {
            (d,): (-p * c * lead_inv) % self.modulus for d, c in coeffs.items()
        }
        self.ring = RingSpec(
            ("pi",), modulus=self.modulus, relations={"pi": (e, replacement)}
        )
        self.e_prime = Fraction(p * e, p - 1)
        self.e_doubleprime = Fraction(e, p - 1)

    def __repr__(self) -> str:
        return (
            f"DvrModel(p={self.p}, e={self.e}, theta={self.theta}, m={self.m})"
        )

    @property
    def pi(self) -> SparsePoly:
        return self.ring.var("pi")

    def theta_value(self) -> SparsePoly:
        """theta(pi) as an element of the model ring."""
        return self.theta.substitute({"x": self.pi})

    def theta_at_witt(self, params: WittParams) -> WittVector:
        """theta evaluated at the Teichmuller lift [pi] in W_n(O)."""
        return evaluate_int_poly(self.theta, teichmuller(params, self.ring, self.pi))

    def valuation(self, value: SparsePoly) -> int | float:
        """pi-adic valuation via the canonical form.

        Distinct canonical terms c_d*pi^d have valuations d + e*v_p(c_d)
        in distinct residues mod e, so the minimum over terms is exact.
        """
        value = self.ring.poly(value)
        if value.is_zero:
            return math.inf
        best = math.inf
        for (d,), coeff in value.terms.items():
            best = min(best, d + self.e * vp(self.p, coeff))
        return best

    def in_maximal_power(self, value: SparsePoly, j: int) -> bool:
        """Membership in m^j = (pi^j)."""
        return self.valuation(value) >= j

    def random_element(self, rng: random.Random, j: int = 0) -> SparsePoly:
        """Random element of m^j."""
        terms = {
            (d,): rng.randrange(self.modulus) for d in range(self.e)
        }
        return (self.pi ** j) * SparsePoly(self.ring, terms)


@lru_cache(maxsize=None)
def _scalar_mult_polys(p: int, n: int, c: int) -> tuple[SparsePoly, ...]:
    # coordinates of c*(X_0,...,X_{n-1}) as integer polynomials; the
    # coordinate s is c*X_s plus a correction in X_0..X_{s-1}
    names = tuple(f"X{i}" for i in range(n))
    ring = RingSpec(names)
    params = WittParams(p, n)
    generic = WittVector(params, ring, [ring.var(name) for name in names])
    product = witt_from_int(params, ring, c) * generic
    return product.coords


def solve_scalar_multiple(
    model: DvrModel,
    params: WittParams,
    c: int,
    target: WittVector,
    membership_j: int = 0,
) -> WittVector | None:
    """Find w with c*w = target and every coordinate in m^membership_j.

    Coordinate s of c*w is c*w_s plus a correction depending only on
    w_0..w_{s-1}, so the search proceeds coordinatewise: each linear
    equation c*y = rhs in O splits over the pi-power basis into
    equations in Z/p^m whose solution sets are explicit cosets, and the
    p^{v_p(c)*e} candidates per coordinate are filtered by the
    membership constraint and extended depth-first.  Returns None when
    the search space is exhausted.
    """
    if target.ring != model.ring:
        raise RingError("target must live over the model ring")
    p, e, m = model.p, model.e, model.m
    modulus = model.modulus
    nu = vp(p, c % modulus if c % modulus else modulus)
    if nu is math.inf or nu >= m:
        raise ValueError(f"scalar {c} is zero in Z/p^{m}")
    unit_inv = pow((c // p ** nu) % modulus, -1, modulus)
    mult_polys = _scalar_mult_polys(p, params.n, c)
    names = [f"X{i}" for i in range(params.n)]

    def coordinate_candidates(rhs: SparsePoly) -> list[SparsePoly]:
        coeffs = {exp[0]: coeff for exp, coeff in rhs.terms.items()}
        digit_options: list[list[int]] = []
        for d in range(e):
            rhs_d = coeffs.get(d, 0)
            if rhs_d % (p ** nu):
                return []
            base = (rhs_d // p ** nu * unit_inv) % (p ** (m - nu))
            digit_options.append(
                [base + k * p ** (m - nu) for k in range(p ** nu)]
            )
        out = []
        indices = [0] * e
        while True:
            candidate = SparsePoly(
                model.ring,
                {(d,): digit_options[d][indices[d]] for d in range(e)},
            )
            if model.valuation(candidate) >= membership_j:
                out.append(candidate)
            for d in range(e):
                indices[d] += 1
                if indices[d] < len(digit_options[d]):
                    break
                indices[d] = 0
            else:
                break
        return out

    def extend(prefix: list[SparsePoly]) -> list[SparsePoly] | None:
        s = len(prefix)
        if s == params.n:
            return prefix
        bindings = {names[i]: prefix[i] for i in range(s)}
        for i in range(s, params.n):
            bindings[names[i]] = model.ring.zero()
        correction = mult_polys[s].substitute(bindings, ring=model.ring)
        rhs = target.coords[s] - correction
        for candidate in coordinate_candidates(rhs):
            result = extend(prefix + [candidate])
            if result is not None:
                return result
        return None

    coords = extend([])
    if coords is None:
        return None
    witness = WittVector(params, model.ring, coords)
    if not (witt_from_int(params, model.ring, c) * witness == target):
        raise AssertionError("witness verification failed")
    return witness


def _v_of_one(params: WittParams, ring: RingSpec) -> WittVector:
    coords = [0] * params.n
    coords[1] = 1
    return WittVector(params, ring, coords)


def check_dvr_congruences(
    model: DvrModel, n: int, seed: int = 0, samples: int = 3
) -> VerificationReport:
    """Witt-vector congruences of the finite ramified model at level n.

    (a) [pi]^e - theta([pi])V(1) = p*w for an explicit witness w;
    (b) p - [p] - V(1) = V(p*eta) for an explicit witness eta;
    (c) p*W_n(m^j) inside W_n(m^{min(j+e,pj)}) on sampled generators,
        and W_n(m^{j+e}) inside p*W_n(m^j) for j >= e/(p-1) with an
        explicit witness per sampled generator.
    """
    if n < 2:
        raise ValueError("congruences involve V(1); need n >= 2")
    if n > model.m:
        raise ValueError("need n <= m so that p-divisibility is meaningful")
    report = VerificationReport(
        "dvr-congruences",
        {"p": model.p, "e": model.e, "theta": str(model.theta), "n": n},
    )
    p, e = model.p, model.e
    ring = model.ring
    params = WittParams(p, n)
    rng = random.Random(seed)

    # (a) Eisenstein unit congruence
    pi_e = teichmuller(params, ring, model.pi) ** e
    target = pi_e - model.theta_at_witt(params) * _v_of_one(params, ring)
    witness = solve_scalar_multiple(model, params, p, target)
    if witness is None:
        raise WitnessSearchExhausted(
            f"no w with p*w = [pi]^e - theta([pi])V(1) in {model!r} at n={n}"
        )
    report.record(True, "[pi]^e - theta([pi])V(1) in pW_n", "witness", format(witness))

    # (b) p = [p] + V(1) modulo pVW_n
    t_vec = (
        witt_from_int(params, ring, p)
        - teichmuller(params, ring, p)
        - _v_of_one(params, ring)
    )
    report.record(
        t_vec.coords[0].is_zero,
        "coordinate 0 of p - [p] - V(1)",
        "0",
        str(t_vec.coords[0]),
    )
    shorter = WittParams(p, n - 1)
    tail = WittVector(shorter, ring, t_vec.coords[1:])
    eta = solve_scalar_multiple(model, shorter, p, tail)
    if eta is None:
        raise WitnessSearchExhausted(
            f"no eta with V(p*eta) = p - [p] - V(1) in {model!r} at n={n}"
        )
    report.record(True, "p - [p] - V(1) in pVW_n", "witness", format(eta))

    # (c) first inclusion: p*W_n(m^j) inside W_n(m^{min(j+e, pj)})
    for j in range(0, 3):
        bound = min(j + e, p * j)
        vectors = []
        for s in range(n):
            coords = [ring.zero()] * n
            coords[s] = model.pi ** j
            vectors.append(WittVector(params, ring, coords))
        for _ in range(samples):
            vectors.append(
                WittVector(
                    params, ring,
                    [model.random_element(rng, j) for _ in range(n)],
                )
            )
        for w in vectors:
            scaled = witt_from_int(params, ring, p) * w
            ok = all(model.in_maximal_power(cd, bound) for cd in scaled.coords)
            report.record(
                ok,
                f"p*w for w in W_n(m^{j})",
                f"coords in m^{bound}",
                format(scaled),
            )

    # (c) second inclusion: W_n(m^{j+e}) inside p*W_n(m^j) for j >= e''
    j_start = math.ceil(model.e_doubleprime)
    for j in (j_start, j_start + 1):
        targets = []
        for s in range(n):
            coords = [ring.zero()] * n
            coords[s] = model.pi ** (j + e)
            targets.append(WittVector(params, ring, coords))
        for _ in range(samples):
            targets.append(
                WittVector(
                    params, ring,
                    [model.random_element(rng, j + e) for _ in range(n)],
                )
            )
        for g in targets:
            witness = solve_scalar_multiple(model, params, p, g, membership_j=j)
            if witness is None:
                raise WitnessSearchExhausted(
                    f"no w in W_n(m^{j}) with p*w = {g} in {model!r}"
                )
            report.record(
                True,
                f"generator of W_n(m^{j + e})",
                f"witness in W_n(m^{j})",
                format(witness),
            )
    return report
