"""Exact arithmetic in the algebra Q[x, (1-x^2)^(1/2), (1-x^2)^(-1/2)].

Every element is kept in the canonical form

    (A(x) + s * B(x)) / (1 - x^2)^k ,    s = (1 - x^2)^(1/2),

with A, B polynomials over the rationals and k a minimal non-negative
integer.  This closure contains all the coefficient functions needed for
the null-condition analysis: omega0 = 1/s, omega1 = -x/s, the phase
phi = s, its derivative dphi = omega1 and the bracket <dphi> = omega0.
Because coefficients are exact rationals, deciding whether an element is
identically zero is exact, not a tolerance check.
"""

from __future__ import annotations

import math
from fractions import Fraction

# ---------------------------------------------------------------------------
# dense rational polynomials, index = degree, no trailing zeros


def _ptrim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b):
    n = max(len(a), len(b))
    return _ptrim(
        [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    )


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _ptrim(out)


def _pscale(a, c):
    c = Fraction(c)
    return () if c == 0 else _ptrim([c * ai for ai in a])


# 1 - x^2, the modulus everything is reduced against
_ONE_MINUS_X2 = (Fraction(1), Fraction(0), Fraction(-1))


def _pdiv_omx2(a):
    """Divide a by (1 - x^2); return (quotient, remainder)."""
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - 2)
    for i in range(len(a) - 1, 1, -1):
        c = -a[i]
        q[i - 2] = c
        a[i] = Fraction(0)
        a[i - 2] -= c
    return _ptrim(q), _ptrim(a)


def _peval(a, x):
    v = 0.0
    for c in reversed(a):
        v = v * x + float(c)
    return v


class HalfExpr:
    """Canonical element (A + s*B)/(1-x^2)^k of Q[x, (1-x^2)^(±1/2)]."""

    __slots__ = ("even", "odd", "denom_pow")

    def __init__(self, even=(), odd=(), denom_pow=0):
        even = _ptrim(Fraction(c) for c in even)
        odd = _ptrim(Fraction(c) for c in odd)
        k = int(denom_pow)
        if k < 0:
            # negative powers of the denominator are extra (1-x^2) factors
            lift = _pmul_pow_omx2(-k)
            even, odd, k = _pmul(even, lift), _pmul(odd, lift), 0
        # canonical: strip common (1-x^2) factors from the denominator
        while k > 0:
            qe, re = _pdiv_omx2(even)
            qo, ro = _pdiv_omx2(odd)
            if re or ro:
                break
            even, odd, k = qe, qo, k - 1
        self.even = even
        self.odd = odd
        self.denom_pow = k

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        ka, kb = self.denom_pow, other.denom_pow
        k = max(ka, kb)
        la = _pmul_pow_omx2(k - ka)
        lb = _pmul_pow_omx2(k - kb)
        return HalfExpr(
            _padd(_pmul(self.even, la), _pmul(other.even, lb)),
            _padd(_pmul(self.odd, la), _pmul(other.odd, lb)),
            k,
        )

    __radd__ = __add__

    def __neg__(self):
        return HalfExpr(_pneg(self.even), _pneg(self.odd), self.denom_pow)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        # (A1 + sB1)(A2 + sB2) = A1A2 + (1-x^2)B1B2 + s(A1B2 + A2B1)
        even = _padd(
            _pmul(self.even, other.even),
            _pmul(_ONE_MINUS_X2, _pmul(self.odd, other.odd)),
        )
        odd = _padd(_pmul(self.even, other.odd), _pmul(self.odd, other.even))
        return HalfExpr(even, odd, self.denom_pow + other.denom_pow)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers not supported; multiply by inverses")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- predicates and evaluation ------------------------------------------

    def is_zero(self):
        return not self.even and not self.odd

    def __eq__(self, other):
        return (self - _coerce(other)).is_zero()

    def __hash__(self):
        return hash((self.even, self.odd, self.denom_pow))

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Floating evaluation; |x| must be < 1."""
        if abs(x) >= 1:
            raise ValueError("HalfExpr is only defined on |x| < 1")
        omx2 = 1.0 - x * x
        s = math.sqrt(omx2)
        return (_peval(self.even, x) + s * _peval(self.odd, x)) / omx2**self.denom_pow

    def eval_array(self, x):
        """Vectorized floating evaluation on an array with |x| < 1."""
        import numpy as np

        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) >= 1):
            raise ValueError("HalfExpr is only defined on |x| < 1")
        omx2 = 1.0 - x * x
        even = np.polyval([float(c) for c in reversed(self.even)] or [0.0], x)
        odd = np.polyval([float(c) for c in reversed(self.odd)] or [0.0], x)
        return (even + np.sqrt(omx2) * odd) / omx2**self.denom_pow

    def as_polynomial(self):
        """Return the coefficient tuple if the element is a plain polynomial."""
        if self.odd or self.denom_pow:
            raise ValueError("element is not a polynomial in x")
        return self.even

    def __repr__(self):
        return f"HalfExpr(even={self.even}, odd={self.odd}, denom_pow={self.denom_pow})"


def _pmul_pow_omx2(n):
    out = (Fraction(1),)
    for _ in range(n):
        out = _pmul(out, _ONE_MINUS_X2)
    return out


def _coerce(v):
    if isinstance(v, HalfExpr):
        return v
    if isinstance(v, (int, Fraction)):
        return HalfExpr((Fraction(v),))
    raise TypeError(f"cannot coerce {type(v).__name__} to HalfExpr")


def from_rational(c):
    return HalfExpr((Fraction(c),))


def from_poly(coeffs):
    """Polynomial in x with rational coefficients, index = degree."""
    return HalfExpr(tuple(Fraction(c) for c in coeffs))


# module-level API mirroring the operation names used elsewhere

def he_add(a, b):
    return _coerce(a) + _coerce(b)


def he_mul(a, b):
    return _coerce(a) * _coerce(b)


def he_eval(e, x):
    return e.eval(x)


def he_is_zero(e):
    return e.is_zero()


ZERO = HalfExpr()
ONE = HalfExpr((Fraction(1),))
X = HalfExpr((Fraction(0), Fraction(1)))

# s = (1-x^2)^(1/2) and its inverse
S = HalfExpr((), (Fraction(1),))
S_INV = HalfExpr((), (Fraction(1),), 1)

# the named coefficient functions of the Klein-Gordon analysis
OMEGA0 = S_INV                                        # 1/sqrt(1-x^2)
OMEGA1 = HalfExpr((), (Fraction(0), Fraction(-1)), 1)  # -x/sqrt(1-x^2)
PHI = S                                               # sqrt(1-x^2)
DPHI = OMEGA1                                         # phi'(x)
BRACKET_DPHI = OMEGA0                                 # <dphi> = sqrt(1+dphi^2)
BRACKET_DPHI_INV = S                                  # <dphi>^-1
