"""Basis and filtration combinatorics for level-n forms over a ramified base.

Two finite index sets describe the same free module of rank
binom(r+1, q) * e * sum_{s=0}^{n-1} p^{rs}:

* the standard basis Gamma, indexed by a V-depth 0 <= s < n, exponents
  0 <= i_1, ..., i_r < p^s, a base exponent 0 <= j < e, a subset of the
  r coordinate directions, and an optional dlog(pi) factor, with a case
  split on v = min of the p-adic valuations of the i_m and of j - e'
  (e' = pe/(p-1));
* the graded basis Sigma, indexed the same way except the base exponent
  0 <= j' < e' determines a threshold level v(j') via
  e'(1 - p^{-v}) <= j' < e'(1 - p^{-(v+1)}), depths run over
  0 < s < n - v(j') plus depth-free "plain" sections, and each element
  carries the filtration grade 2j' (or 2j' + 1 with a dlog(pi) factor).

The explicit bijection f between them divides (s, i, j) by p^v where
v = min{s, v_p(i_1), ..., v_p(i_r), v_p(j - e')} and sends
j' = p^{-v}(j - e') + e'; integrality of j' is automatic and checked.
The grades of Sigma stay below 2e', which is the vanishing of the
filtration from that point on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product

from .identities import vp
from .report import VerificationReport
from .witt import is_odd_prime


class NonIntegralJPrime(ArithmeticError):
    """The rebased exponent j' failed to be an integer."""


@dataclass(frozen=True)
class GeometryParams:
    """Odd prime p, ramification e, r coordinate directions, level n."""

    p: int
    e: int
    r: int
    n: int

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.e < 1:
            raise ValueError(f"e must be >= 1, got {self.e}")
        if self.r < 0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    @cached_property
    def e_prime(self) -> Fraction:
        return Fraction(self.p * self.e, self.p - 1)

    @cached_property
    def e_doubleprime(self) -> Fraction:
        return Fraction(self.e, self.p - 1)

    def lo(self, v: int) -> Fraction:
        """Lower threshold e'(1 - p^{-v}) of the level-v exponent band."""
        return self.e_prime * (1 - Fraction(1, self.p ** v))

    def threshold_v(self, j: int) -> int:
        """The unique v with lo(v) <= j < lo(v+1); requires 0 <= j < e'."""
        if not 0 <= j < self.e_prime:
            raise ValueError(f"exponent {j} outside [0, {self.e_prime})")
        v = 0
        while not self.lo(v) <= j < self.lo(v + 1):
            v += 1
        return v


@dataclass(frozen=True)
class BasisElement:
    """V^s or dV^s of [x]^i [pi]^j times chosen dlog factors.

    kind "plain" means no V at all (the depth-free sections); subset
    lists the 1-based coordinate directions whose dlog enters; dlog_pi
    records the extra dlog(pi) factor.  For Sigma elements j is the
    graded exponent j' and grade() gives the filtration grade.
    """

    kind: str
    s: int
    i: tuple
    j: int
    subset: tuple
    dlog_pi: bool

    def grade(self) -> int:
        return 2 * self.j + (1 if self.dlog_pi else 0)

    def degree(self) -> int:
        return len(self.subset) + (1 if self.dlog_pi else 0) + (
            1 if self.kind == "dV" else 0
        )


def _fraction_vp(p: int, value: Fraction) -> int | float:
    if value == 0:
        return math.inf
    return vp(p, value.numerator) - vp(p, value.denominator)


def _subsets(allowed, size):
    if size < 0:
        return ()
    return tuple(combinations(allowed, size))


def _max_p_free_index(p: int, i: tuple) -> int | None:
    """Largest 1-based position with exponent not divisible by p."""
    best = None
    for m, exponent in enumerate(i, start=1):
        if exponent % p:
            best = m
    return best


def enumerate_gamma(geom: GeometryParams, q: int) -> list:
    """The standard basis at degree q."""
    p, e, r, n = geom.p, geom.e, geom.r, geom.n
    positions = range(1, r + 1)
    out = []
    for s in range(n):
        for i in product(range(p ** s), repeat=r):
            for j in range(e):
                w = _fraction_vp(p, j - geom.e_prime)
                if any(i):
                    vals = [vp(p, im) for im in i]
                    v = min(min(vals), w)
                    if all(v < val for val in vals):
                        for sub in _subsets(positions, q):
                            out.append(BasisElement("V", s, i, j, sub, False))
                        for sub in _subsets(positions, q - 1):
                            out.append(BasisElement("dV", s, i, j, sub, False))
                    else:
                        m = max(
                            pos for pos, val in enumerate(vals, 1) if val == v
                        )
                        allowed = [pos for pos in positions if pos != m]
                        for sub in _subsets(allowed, q):
                            out.append(BasisElement("V", s, i, j, sub, False))
                        for sub in _subsets(allowed, q - 1):
                            out.append(BasisElement("V", s, i, j, sub, True))
                            out.append(BasisElement("dV", s, i, j, sub, False))
                        for sub in _subsets(allowed, q - 2):
                            out.append(BasisElement("dV", s, i, j, sub, True))
                else:
                    for sub in _subsets(positions, q):
                        out.append(BasisElement("V", s, i, j, sub, False))
                    if s > w:
                        for sub in _subsets(positions, q - 1):
                            out.append(BasisElement("dV", s, i, j, sub, False))
                    else:
                        for sub in _subsets(positions, q - 1):
                            out.append(BasisElement("V", s, i, j, sub, True))
    return out


def enumerate_gamma_prime(geom: GeometryParams, q: int) -> list:
    """The redundant generating family with no case conditions."""
    p, e, r, n = geom.p, geom.e, geom.r, geom.n
    positions = range(1, r + 1)
    out = []
    for s in range(n):
        for i in product(range(p ** s), repeat=r):
            for j in range(e):
                for sub in _subsets(positions, q):
                    out.append(BasisElement("V", s, i, j, sub, False))
                for sub in _subsets(positions, q - 1):
                    out.append(BasisElement("dV", s, i, j, sub, False))
                    out.append(BasisElement("V", s, i, j, sub, True))
                for sub in _subsets(positions, q - 2):
                    out.append(BasisElement("dV", s, i, j, sub, True))
    return out


def enumerate_gamma_double_prime(
    geom: GeometryParams, q: int, i_bound: int
) -> list:
    """Slice of the k-linear generating family with unbounded exponents."""
    positions = range(1, geom.r + 1)
    out = []
    for s in range(geom.n):
        for i in product(range(i_bound), repeat=geom.r):
            for j in range(geom.e):
                for sub in _subsets(positions, q):
                    out.append(BasisElement("V", s, i, j, sub, False))
                for sub in _subsets(positions, q - 1):
                    out.append(BasisElement("dV", s, i, j, sub, False))
                    out.append(BasisElement("V", s, i, j, sub, True))
                for sub in _subsets(positions, q - 2):
                    out.append(BasisElement("dV", s, i, j, sub, True))
    return out


def _sigma_at(geom: GeometryParams, q: int, j: int) -> list:
    """Graded basis sections with exponent j', both parities."""
    p, r, n = geom.p, geom.r, geom.n
    if j >= geom.e_prime:
        return []
    v = geom.threshold_v(j)
    if v >= n:
        return []
    positions = range(1, r + 1)
    out = []
    # even grade 2j
    for sub in _subsets(positions, q):
        out.append(BasisElement("plain", 0, (0,) * r, j, sub, False))
    for s in range(1, n - v):
        for i in product(range(p ** s), repeat=r):
            m = _max_p_free_index(p, i)
            if j % p == 0 and m is None:
                continue
            allowed = [pos for pos in positions if pos != m]
            for sub in _subsets(allowed, q):
                out.append(BasisElement("V", s, i, j, sub, False))
            for sub in _subsets(allowed, q - 1):
                out.append(BasisElement("dV", s, i, j, sub, False))
    # odd grade 2j + 1
    for sub in _subsets(positions, q - 1):
        out.append(BasisElement("plain", 0, (0,) * r, j, sub, True))
    for s in range(1, n - v):
        for i in product(range(p ** s), repeat=r):
            m = _max_p_free_index(p, i)
            if m is None:
                continue
            allowed = [pos for pos in positions if pos != m]
            for sub in _subsets(allowed, q - 1):
                out.append(BasisElement("V", s, i, j, sub, True))
            for sub in _subsets(allowed, q - 2):
                out.append(BasisElement("dV", s, i, j, sub, True))
    return out


def enumerate_sigma(geom: GeometryParams, q: int) -> list:
    """The graded basis at degree q."""
    out = []
    for j in range(math.ceil(geom.e_prime)):
        out.extend(_sigma_at(geom, q, j))
    return out


def bijection_f(geom: GeometryParams, element: BasisElement) -> BasisElement:
    """Map a standard basis element to its graded counterpart."""
    p = geom.p
    s, i, j = element.s, element.i, element.j
    w = _fraction_vp(p, j - geom.e_prime)
    v = min([s, w] + [vp(p, im) for im in i])
    j_new = Fraction(j - geom.e_prime, p ** v) + geom.e_prime
    if j_new.denominator != 1:
        raise NonIntegralJPrime(
            f"j' = {j_new} is not an integer for {element}"
        )
    j_new = int(j_new)
    if not geom.lo(v) <= j_new < geom.lo(v + 1):
        raise AssertionError(f"j' = {j_new} escapes its band for {element}")
    i_new = tuple(im // p ** v for im in i)
    if element.kind == "V" and not any(i) and v == s:
        kind, s_new = "plain", 0
    else:
        kind, s_new = element.kind, s - v
    return BasisElement(kind, s_new, i_new, j_new, element.subset, element.dlog_pi)


def bijection_f_inverse(geom: GeometryParams, element: BasisElement) -> BasisElement:
    """Map a graded basis element back to its standard counterpart."""
    p = geom.p
    v = geom.threshold_v(element.j)
    j_old = p ** v * (element.j - geom.e_prime) + geom.e_prime
    if j_old.denominator != 1:
        raise NonIntegralJPrime(
            f"j = {j_old} is not an integer for {element}"
        )
    j_old = int(j_old)
    if not 0 <= j_old < geom.e:
        raise AssertionError(f"j = {j_old} escapes [0, e) for {element}")
    i_old = tuple(p ** v * im for im in element.i)
    if element.kind == "plain":
        kind, s_old = "V", v
    else:
        kind, s_old = element.kind, element.s + v
    return BasisElement(kind, s_old, i_old, j_old, element.subset, element.dlog_pi)


def rank_formula(geom: GeometryParams, q: int) -> int:
    return (
        math.comb(geom.r + 1, q)
        * geom.e
        * sum(geom.p ** (geom.r * s) for s in range(geom.n))
    )


def rank_recursion_sides(p: int, r: int, n: int) -> tuple:
    """Both sides of the one-variable splitting of the rank.

    The left side counts the depth-free part plus, for each depth s,
    the p^{s-1}(p-1) residue classes of new exponents, each carrying a
    level n-s module over one fewer coordinate.
    """
    lhs = sum(p ** ((r - 1) * t) for t in range(n))
    lhs += sum(
        (p ** s - p ** (s - 1))
        * p ** ((r - 1) * s)
        * sum(p ** ((r - 1) * t) for t in range(n - s))
        for s in range(1, n)
    )
    rhs = sum(p ** (r * s) for s in range(n))
    return lhs, rhs


def check_rank_recursion(p: int, r: int, n: int) -> VerificationReport:
    report = VerificationReport("basis-rank-recursion", {"p": p, "r": r, "n": n})
    lhs, rhs = rank_recursion_sides(p, r, n)
    report.record(lhs == rhs, f"rank splitting at r={r}", rhs, lhs)
    return report


def check_basis_bijection(geom: GeometryParams, q: int) -> VerificationReport:
    """Sizes, ranks, the bijection and its inverse, integrality of j'."""
    report = VerificationReport(
        "basis-bijection",
        {"p": geom.p, "e": geom.e, "r": geom.r, "n": geom.n, "q": q},
    )
    gamma = enumerate_gamma(geom, q)
    sigma = enumerate_sigma(geom, q)
    rank = rank_formula(geom, q)
    report.record(len(gamma) == rank, "|Gamma|", rank, len(gamma))
    report.record(len(sigma) == rank, "|Sigma|", rank, len(sigma))
    report.record(
        len(set(gamma)) == len(gamma), "Gamma has no repeats",
        len(gamma), len(set(gamma)),
    )
    report.record(
        len(set(sigma)) == len(sigma), "Sigma has no repeats",
        len(sigma), len(set(sigma)),
    )
    try:
        image = [bijection_f(geom, element) for element in gamma]
    except NonIntegralJPrime as err:
        report.record(False, "f is defined on Gamma", "integral j'", str(err))
        return report
    report.record(
        set(image) == set(sigma), "f(Gamma) = Sigma",
        f"{len(sigma)} elements", f"{len(set(image))} matched",
    )
    report.record(
        len(set(image)) == len(image), "f is injective",
        len(image), len(set(image)),
    )
    round_trip = all(
        bijection_f_inverse(geom, f_elt) == g_elt
        for g_elt, f_elt in zip(gamma, image)
    )
    report.record(round_trip, "f_inverse after f", "identity", "mismatch")
    return report


def check_fil_vanishing(geom: GeometryParams, q: int) -> VerificationReport:
    """Grades stay below 2e' and exponent bands at level >= n are empty."""
    report = VerificationReport(
        "basis-fil-vanishing",
        {"p": geom.p, "e": geom.e, "r": geom.r, "n": geom.n, "q": q},
    )
    sigma = enumerate_sigma(geom, q)
    # the filtration dies at every integer step 2j with j >= e'
    bound = 2 * math.ceil(geom.e_prime)
    for element in sigma:
        if not report.record(
            element.grade() < bound,
            f"grade of {element}",
            f"< {bound}",
            element.grade(),
        ):
            break
    # exponents whose band sits at level >= n carry no sections
    dead = [
        j for j in range(math.ceil(geom.e_prime))
        if geom.threshold_v(j) >= geom.n
    ]
    live = {element.j for element in sigma}
    for j in dead:
        report.record(
            j not in live, f"sections at exponent {j}", "none",
            "present" if j in live else "none",
        )
    # bands beyond e' are empty by construction of the enumerator
    for j in range(math.ceil(geom.e_prime), math.ceil(geom.e_prime) + 2):
        report.record(
            _sigma_at(geom, q, j) == [], f"sections at exponent {j}",
            "none", "present",
        )
    return report


def grade_table(geom: GeometryParams, q: int) -> dict:
    """Filtration grade -> counts by kind, for the graded basis."""
    table: dict[int, dict[str, int]] = {}
    for element in enumerate_sigma(geom, q):
        row = table.setdefault(
            element.grade(), {"V": 0, "dV": 0, "plain": 0, "total": 0}
        )
        row[element.kind] += 1
        row["total"] += 1
    return dict(sorted(table.items()))
