"""Cubic nonlinearities P(u, dtdx u, dx^2 u; dt u, dx u) and their algebra.

A nonlinearity is a real-coefficient table over degree-3 monomials in the
five slots (u, dtdx u, dx^2 u, dt u, dx u), affine in the two second
derivatives.  The module computes:

* the splitting of P into parts P'_k, P''_k graded by the degree k in the
  first-derivative slots (with a sign flip on the second-derivative slots),
* the null-condition functional Phi(x) and its exact zero test,
* the long-time phase coefficient Phi_1(x),
* the exact coefficient of any cubic sign pattern v_{i1} v_{i2} v_{i3} in
  the profile-frame evolution equation,
* pointwise grid evaluation of P for the time stepper.

All symbolic results are exact elements of the half-integer-power algebra
in ``halfalg``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Dict, NamedTuple, Tuple

import numpy as np

from . import halfalg as ha
from .halfalg import HalfExpr


class DegreeError(ValueError):
    """Monomial total degree is not three."""


class QuasiLinearityError(ValueError):
    """Monomial is not affine in the second-derivative slots."""


class MonomialKey(NamedTuple):
    """Exponents of (u, dtdx u, dx^2 u, dt u, dx u)."""

    u: int
    utx: int
    uxx: int
    ut: int
    ux: int

    def check(self):
        if any(e < 0 for e in self):
            raise DegreeError(f"negative exponent in {self}")
        if sum(self) != 3:
            raise DegreeError(f"total degree of {self} is {sum(self)}, expected 3")
        if self.utx + self.uxx > 1:
            raise QuasiLinearityError(
                f"{self} is degree {self.utx + self.uxx} in second derivatives"
            )


class CubicNonlinearity:
    """Real coefficient table over MonomialKeys.

    Float coefficients are promoted to exact rationals through their
    decimal literal, so equality and the null verdict are exact with
    respect to the promoted values.
    """

    def __init__(self, terms: Dict[MonomialKey, object]):
        self.terms: Dict[MonomialKey, Fraction] = {}
        for key, coeff in terms.items():
            key = MonomialKey(*key)
            coeff = _promote(coeff)
            if coeff:
                self.terms[key] = self.terms.get(key, Fraction(0)) + coeff

    @classmethod
    def from_records(cls, records):
        """Build from [{"u":a1,"utx":a2,"uxx":a3,"ut":b1,"ux":b2,"coeff":c}]."""
        terms: Dict[MonomialKey, Fraction] = {}
        for rec in records:
            try:
                unknown = set(rec) - {"u", "utx", "uxx", "ut", "ux", "coeff"}
                if unknown:
                    raise ValueError(f"unknown fields {sorted(unknown)}")
                key = MonomialKey(
                    int(rec.get("u", 0)), int(rec.get("utx", 0)),
                    int(rec.get("uxx", 0)), int(rec.get("ut", 0)),
                    int(rec.get("ux", 0)),
                )
                coeff = _promote(rec["coeff"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"malformed nonlinearity record {rec!r}") from exc
            terms[key] = terms.get(key, Fraction(0)) + coeff
        nl = cls(terms)
        nl.validate()
        return nl

    def validate(self):
        for key in self.terms:
            key.check()

    def __repr__(self):
        return f"CubicNonlinearity({dict(self.terms)!r})"


def _promote(c) -> Fraction:
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(str(c))
    if isinstance(c, str):
        return Fraction(c)
    raise ValueError(f"coefficient {c!r} is not real")


# convenience constructors used throughout the tests

def monomial(u=0, utx=0, uxx=0, ut=0, ux=0, coeff=1) -> CubicNonlinearity:
    nl = CubicNonlinearity({MonomialKey(u, utx, uxx, ut, ux): coeff})
    nl.validate()
    return nl


# ---------------------------------------------------------------------------
# decomposition


class DecompositionTable(NamedTuple):
    """Graded parts of P.

    pprime[k] maps (a1, b1, b2) -> coeff for monomials X1^a1 Y1^b1 Y2^b2 of
    P'_k (degree k = b1+b2 in the Y slots).  pdoubleprime[k] maps
    (a1, a2, a3, b1, b2) -> coeff for P''_k (degree 1 in (X2, X3), k in Y).
    The defining identities are

        P'(X1; Y1, Y2)          = sum_k i^k P'_k(X1; -i Y1, -i Y2)
        P''(X1, X2, X3; Y1, Y2) = sum_k i^k P''_k(X1, -X2, -X3; -i Y1, -i Y2)
    """

    pprime: Tuple[dict, dict, dict, dict]
    pdoubleprime: Tuple[dict, dict, dict]


def decompose(P: CubicNonlinearity) -> DecompositionTable:
    P.validate()
    pprime = tuple({} for _ in range(4))
    pdouble = tuple({} for _ in range(3))
    for key, coeff in P.terms.items():
        k = key.ut + key.ux
        if key.utx == 0 and key.uxx == 0:
            # i^k (-i)^k = 1, so P'_k is the degree-k part verbatim
            mono = (key.u, key.ut, key.ux)
            tab = pprime[k]
            tab[mono] = tab.get(mono, Fraction(0)) + coeff
        else:
            # the single (-X2, -X3) argument flips the sign
            mono = (key.u, key.utx, key.uxx, key.ut, key.ux)
            tab = pdouble[k]
            tab[mono] = tab.get(mono, Fraction(0)) - coeff
    return DecompositionTable(pprime, pdouble)


def eval_pprime(table: dict, x1, y1, y2):
    """Evaluate one P'_k over any commutative ring (HalfExpr, float, complex)."""
    total = 0
    for (a1, b1, b2), c in table.items():
        total = total + c * x1**a1 * y1**b1 * y2**b2
    return total


def eval_pdouble(table: dict, x1, x2, x3, y1, y2):
    total = 0
    for (a1, a2, a3, b1, b2), c in table.items():
        total = total + c * x1**a1 * x2**a2 * x3**a3 * y1**b1 * y2**b2
    return total


def reconstruct(dec: DecompositionTable, x1, x2, x3, y1, y2):
    """Right-hand side of the defining identities, for oracle checks."""
    total = 0
    for k in range(4):
        total = total + (1j) ** k * eval_pprime(
            dec.pprime[k], x1, -1j * y1, -1j * y2
        )
    for k in range(3):
        total = total + (1j) ** k * eval_pdouble(
            dec.pdoubleprime[k], x1, -x2, -x3, -1j * y1, -1j * y2
        )
    return total


def evaluate_polynomial(P: CubicNonlinearity, x1, x2, x3, y1, y2):
    """Direct evaluation of P at scalar slot values."""
    total = 0
    for key, c in P.terms.items():
        total = total + (
            c * x1**key.u * x2**key.utx * x3**key.uxx * y1**key.ut * y2**key.ux
        )
    return total


# ---------------------------------------------------------------------------
# null condition and phase coefficient


class NullReport(NamedTuple):
    phi: HalfExpr
    q_coeffs: Tuple[Fraction, ...]
    verdict: bool
    phi1: HalfExpr


def null_functional(P: CubicNonlinearity) -> HalfExpr:
    """Phi(x) = P'_1(1; w0, w1) + P''_1(1, w0 w1, w1^2; w0, w1) + 3 P'_3(1; w0, w1)."""
    dec = decompose(P)
    w0, w1 = ha.OMEGA0, ha.OMEGA1
    phi = eval_pprime(dec.pprime[1], ha.ONE, w0, w1)
    phi = phi + eval_pdouble(dec.pdoubleprime[1], ha.ONE, w0 * w1, w1 * w1, w0, w1)
    phi = phi + 3 * eval_pprime(dec.pprime[3], ha.ONE, w0, w1)
    return ha._coerce(phi)


def phi_one(P: CubicNonlinearity) -> HalfExpr:
    """Phase coefficient Phi_1(x) = (1/8)(1-x^2)^2 [3 P_0 + P_2](slot values).

    The prefactor (1-x^2)^2 is <dphi(x)>^-4 with dphi = w1, <w1> = w0.
    """
    dec = decompose(P)
    w0, w1 = ha.OMEGA0, ha.OMEGA1
    slots = (ha.ONE, w0 * w1, w1 * w1, w0, w1)

    def p_k(k):
        v = eval_pprime(dec.pprime[k], slots[0], slots[3], slots[4])
        return v + eval_pdouble(dec.pdoubleprime[k], *slots)

    bracket = 3 * p_k(0) + p_k(2)
    prefactor = Fraction(1, 8) * ha.from_poly([1, 0, -2, 0, 1])  # (1-x^2)^2 / 8
    return ha._coerce(prefactor * bracket)


def check_null(P: CubicNonlinearity) -> NullReport:
    phi = null_functional(P)
    q = (ha.S**3 * phi).as_polynomial()  # (1-x^2)^{3/2} Phi is a polynomial
    return NullReport(phi=phi, q_coeffs=q, verdict=phi.is_zero(), phi1=phi_one(P))


# ---------------------------------------------------------------------------
# cubic coefficient extraction in the profile frame


def _slot_scalar(slot: str, sign: int) -> HalfExpr:
    """Value of the slot multiplier on a factor with phase sign i_k.

    In the profile-frame evolution equation each slot is a Fourier
    multiplier acting on (v ± vbar)/2; on a factor oscillating like
    exp(i i_k phi(x)/h) the multiplier m(hD) acts as the scalar
    m(i_k dphi(x)).
    """
    half = Fraction(1, 2)
    dphi, binv = ha.DPHI, ha.BRACKET_DPHI_INV
    if slot == "X1":            # <hD>^-1 (v+vbar)/2
        return half * binv
    if slot == "X2":            # hD (v-vbar)/2
        return half * dphi      # sign^2 = 1
    if slot == "X3":            # (hD)^2 <hD>^-1 (v+vbar)/2
        return half * dphi * dphi * binv
    if slot == "Y1":            # (v-vbar)/2
        return Fraction(sign, 2) * ha.ONE
    if slot == "Y2":            # hD <hD>^-1 (v+vbar)/2
        return Fraction(sign, 2) * dphi * binv
    raise AssertionError(slot)


def _pattern_sum(slots, signs) -> HalfExpr:
    """Sum over distinct assignments of the sign pattern to the slot list."""
    total = ha.ZERO
    for perm in set(permutations(signs)):
        prod = ha.ONE
        for slot, sign in zip(slots, perm):
            prod = prod * _slot_scalar(slot, sign)
        total = total + prod
    return total


def extract_coefficients(P: CubicNonlinearity, I, sigma_power: int = 0):
    """Exact coefficient of v_{i1} v_{i2} v_{i3} in the profile equation.

    I is a triple of signs ±1 (i_k = +1 for a v factor, -1 for vbar).
    The raw coefficient sums i^k times every graded part's monomials with
    multipliers evaluated at i_k dphi(x); it is then weighted by
    <(i1+i2+i3) dphi(x)>^sigma_power.  Returns (real, imag) HalfExprs.

    Raises ValueError when the weight leaves the algebra (|sum I| = 3 with
    a sigma_power that is odd or negative); callers needing those weights
    apply them numerically.
    """
    if len(I) != 3 or any(i not in (-1, 1) for i in I):
        raise ValueError(f"I must be a triple of signs, got {I!r}")
    dec = decompose(P)

    # i^k contributions routed to (real, imag) with signs +, +i, -, -i
    parts = [ha.ZERO, ha.ZERO]  # real, imag
    route = [(0, 1), (1, 1), (0, -1), (1, -1)]
    for k in range(4):
        contrib = ha.ZERO
        for (a1, b1, b2), c in dec.pprime[k].items():
            slots = ["X1"] * a1 + ["Y1"] * b1 + ["Y2"] * b2
            contrib = contrib + c * _pattern_sum(slots, I)
        if k < 3:
            for (a1, a2, a3, b1, b2), c in dec.pdoubleprime[k].items():
                slots = (
                    ["X1"] * a1 + ["X2"] * a2 + ["X3"] * a3
                    + ["Y1"] * b1 + ["Y2"] * b2
                )
                contrib = contrib + c * _pattern_sum(slots, I)
        idx, sgn = route[k]
        parts[idx] = parts[idx] + sgn * contrib

    weight = _a_weight(sum(I), sigma_power)
    return parts[0] * weight, parts[1] * weight


def _a_weight(total_sign: int, sigma_power: int) -> HalfExpr:
    """<total_sign * dphi>^sigma_power inside the algebra, when representable."""
    if sigma_power == 0:
        return ha.ONE
    m = abs(total_sign)
    if m == 1:
        if sigma_power > 0:
            return ha.BRACKET_DPHI**sigma_power
        return ha.BRACKET_DPHI_INV ** (-sigma_power)
    # <3 dphi>^p = ((1 + 8 x^2)/(1 - x^2))^{p/2}: algebra element only
    # for even p >= 0
    if sigma_power > 0 and sigma_power % 2 == 0:
        base = ha.from_poly([1, 0, 8]) * ha.S_INV * ha.S_INV
        return base ** (sigma_power // 2)
    raise ValueError(
        f"<{total_sign} dphi>^{sigma_power} is not an element of the algebra"
    )


def a_weight_numeric(total_sign: int, sigma_power: int, x: np.ndarray) -> np.ndarray:
    """Grid evaluation of <total_sign * dphi(x)>^sigma_power for any integers."""
    x = np.asarray(x, dtype=float)
    dphi = -x / np.sqrt(1.0 - x * x)
    return (1.0 + (total_sign * dphi) ** 2) ** (sigma_power / 2.0)


# ---------------------------------------------------------------------------
# grid evaluation for the solver


def evaluate_nonlinearity(P: CubicNonlinearity, u, ut, grid):
    """Pointwise P with slots (u, dx dt u, dx^2 u, dt u, dx u), spectral dx."""
    from .spectral import apply_multiplier

    u = np.asarray(u)
    ut = np.asarray(ut)
    need_ux = any(k.ux or k.utx or k.uxx for k in P.terms)
    slots = {}
    slots["u"], slots["ut"] = u, ut
    if need_ux:
        dx = lambda f: apply_multiplier(lambda k: 1j * k, f, grid).real
        slots["ux"] = dx(u)
        slots["utx"] = dx(ut)
        slots["uxx"] = dx(slots["ux"])
    out = np.zeros_like(u, dtype=float)
    for key, c in P.terms.items():
        term = float(c) * np.ones_like(u)
        for name, e in zip(("u", "utx", "uxx", "ut", "ux"), key):
            if e:
                term = term * slots[name] ** e
        out += term
    return out
