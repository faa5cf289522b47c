"""Exact arithmetic in Q(i)(t), where t^4 = q and v = t^2 = q^(1/2).

An element is stored as (a + i*b)/d with a, b, d in Z[t] and d real.  The
canonical form has gcd(a, b, d) = 1 in Z[t] (integer content included) and a
positive leading coefficient for d.  The smallest real denominator of an
element is unique up to sign, so this form is canonical and equality is
syntactic.
"""
from __future__ import annotations

import re
from functools import lru_cache

from flint import fmpz, fmpz_poly

__all__ = [
    "Scalar", "ZERO", "ONE", "I", "T", "Q", "V", "normalize", "q_pow", "v_pow",
    "t_pow", "q_int", "q_factorial", "q_binom", "is_integral", "RING_A",
    "RING_ABAR", "RING_GAUSS_LAURENT", "parse_scalar",
]

_ZP = fmpz_poly([])
_ONEP = fmpz_poly([1])

RING_A = "A"
RING_ABAR = "Abar"
RING_GAUSS_LAURENT = "GaussLaurent"


class Scalar:
    """Element of Q(i)(t) in canonical form (a + i b)/d."""

    __slots__ = ("a", "b", "d", "_key")

    def __init__(self, a, b=None, d=None, _reduced=False):
        if not isinstance(a, fmpz_poly):
            a = fmpz_poly([a]) if isinstance(a, (int, fmpz)) else fmpz_poly(a)
        if b is not None and not isinstance(b, fmpz_poly):
            b = fmpz_poly([b]) if isinstance(b, (int, fmpz)) else fmpz_poly(b)
        if d is None:
            d = _ONEP
        elif not isinstance(d, fmpz_poly):
            d = fmpz_poly([d]) if isinstance(d, (int, fmpz)) else fmpz_poly(d)
        if b is not None and b.is_zero():
            b = None
        if not _reduced:
            if d.is_zero():
                raise ZeroDivisionError("zero denominator")
            if a.is_zero() and b is None:
                d = _ONEP
            elif not d.is_one():
                g = a.gcd(d) if not a.is_zero() else d
                if b is not None:
                    g = g.gcd(b)
                if not g.is_one():
                    a = a // g
                    d = d // g
                    if b is not None:
                        b = b // g
                if d.leading_coefficient() < 0:
                    a, d = -a, -d
                    if b is not None:
                        b = -b
            else:
                # d = 1 is already canonical
                pass
        self.a = a
        self.b = b
        self.d = d
        self._key = None

    # -- structure ------------------------------------------------------
    def key(self):
        if self._key is None:
            self._key = (
                tuple(int(c) for c in self.a.coeffs()),
                tuple(int(c) for c in self.b.coeffs()) if self.b is not None else (),
                tuple(int(c) for c in self.d.coeffs()),
            )
        return self._key

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                other = Scalar(other)
            else:
                return NotImplemented
        if self.d != other.d or self.a != other.a:
            return False
        if self.b is None or other.b is None:
            return self.b is None and other.b is None
        return self.b == other.b

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def is_zero(self):
        return self.b is None and self.a.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_one(self):
        return self.b is None and self.d.is_one() and self.a.is_one()

    def is_real(self):
        return self.b is None

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (Scalar, int)):
            return NotImplemented
        if not isinstance(other, Scalar):
            other = _coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.d == other.d:
            a = self.a + other.a
            b = _padd(self.b, other.b)
            return Scalar(a, b, self.d)
        a = self.a * other.d + other.a * self.d
        b = _padd(_pmul(self.b, other.d), _pmul(other.b, self.d))
        return Scalar(a, b, self.d * other.d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b if self.b is not None else None, self.d, _reduced=True)

    def __sub__(self, other):
        if not isinstance(other, (Scalar, int)):
            return NotImplemented
        if not isinstance(other, Scalar):
            other = _coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Scalar, int)):
            return NotImplemented
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                if other == 0:
                    return ZERO
                return Scalar(self.a * other, self.b * other if self.b is not None else None, self.d)
            other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        if self.b is None and other.b is None:
            return Scalar(self.a * other.a, None, self.d * other.d)
        a = self.a * other.a - _pmul2(self.b, other.b)
        b = _padd(_pmul(self.b, other.a), _pmul(other.b, self.a))
        return Scalar(a, b, self.d * other.d)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.b is None:
            return Scalar(self.d, None, self.a)
        # (a + ib)/d -> d (a - ib)/(a^2 + b^2)
        n = self.a * self.a + self.b * self.b
        return Scalar(self.d * self.a, -(self.d * self.b), n)

    def __truediv__(self, other):
        if not isinstance(other, (Scalar, int)):
            return NotImplemented
        if not isinstance(other, Scalar):
            other = _coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        r = ONE
        x = self
        while n:
            if n & 1:
                r = r * x
            n >>= 1
            if n:
                x = x * x
        return r

    def conjugate_i(self):
        """Image under i -> -i."""
        return Scalar(self.a, -self.b if self.b is not None else None, self.d, _reduced=True)

    # -- Gaussian presentation -----------------------------------------
    def numerator(self):
        """Numerator as {exponent of t: (re, im)} after clearing t from the denominator."""
        shift = _tval(self.d)
        num = {}
        for k, c in enumerate(self.a.coeffs()):
            if c:
                num[k - shift] = (int(c), 0)
        if self.b is not None:
            for k, c in enumerate(self.b.coeffs()):
                if c:
                    re_, _ = num.get(k - shift, (0, 0))
                    num[k - shift] = (re_, int(c))
        return num

    def denominator(self):
        """Denominator with the power of t removed, as a list of integer coefficients."""
        shift = _tval(self.d)
        return [int(c) for c in self.d.coeffs()[shift:]]

    def laurent(self):
        """Return {exp: (re, im)} if this is a Laurent polynomial in t, else None."""
        den = self.denominator()
        if den != [1]:
            return None
        return self.numerator()

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return format_scalar(self)

    def __lt__(self, other):  # deterministic ordering for sorting only
        return self.key() < other.key()


def _tval(p):
    cs = p.coeffs()
    k = 0
    while k < len(cs) and cs[k] == 0:
        k += 1
    return k


def _padd(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return x + y


def _pmul(x, y):
    if x is None:
        return None
    return x * y


def _pmul2(x, y):
    if x is None or y is None:
        return _ZP
    return x * y


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)
T = Scalar(fmpz_poly([0, 1]))


def t_pow(k: int) -> Scalar:
    return _t_pow(k)


@lru_cache(maxsize=None)
def _t_pow(k):
    if k >= 0:
        return Scalar(fmpz_poly([0] * k + [1]), None, _ONEP, _reduced=True)
    return Scalar(_ONEP, None, fmpz_poly([0] * (-k) + [1]), _reduced=True)


def q_pow(k: int) -> Scalar:
    return _t_pow(4 * k)


def v_pow(k: int) -> Scalar:
    return _t_pow(2 * k)


Q = q_pow(1)
V = v_pow(1)


def normalize(num, den) -> Scalar:
    """Build the canonical Scalar num/den.

    ``num`` and ``den`` are Scalars, integers, or coefficient lists in t
    (lowest degree first; Gaussian coefficients may be complex numbers with
    integer parts).
    """
    return _as_scalar(num) / _as_scalar(den)


def _as_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar(x)
    if isinstance(x, fmpz_poly):
        return Scalar(x)
    coeffs = list(x)
    re_ = [int(c.real) if isinstance(c, complex) else int(c) for c in coeffs]
    im_ = [int(c.imag) if isinstance(c, complex) else 0 for c in coeffs]
    return Scalar(fmpz_poly(re_), fmpz_poly(im_) if any(im_) else None)


# -- q-combinatorics ----------------------------------------------------

@lru_cache(maxsize=None)
def q_int(r: int, eps: int = 1) -> Scalar:
    """The quantum integer [r] at q_i = q^eps."""
    if eps < 1:
        raise ValueError("eps must be positive")
    if r < 0:
        return -q_int(-r, eps)
    s = ZERO
    for k in range(r):
        s = s + q_pow(eps * (r - 1 - 2 * k))
    return s


@lru_cache(maxsize=None)
def q_factorial(r: int, eps: int = 1) -> Scalar:
    if r < 0:
        raise ValueError("negative factorial")
    s = ONE
    for k in range(1, r + 1):
        s = s * q_int(k, eps)
    return s


@lru_cache(maxsize=None)
def q_binom(m: int, r: int, eps: int = 1) -> Scalar:
    """Gauss binomial [m; r] at q_i = q^eps (m may be negative)."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    num = ONE
    for k in range(r):
        num = num * q_int(m - k, eps)
    return num / q_factorial(r, eps)


# -- integrality --------------------------------------------------------

def is_integral(s: Scalar, ring: str = RING_ABAR) -> bool:
    """Exact membership in Z[q^{+-1}], Z[v^{+-1}] or Z[i][t^{+-1}]."""
    if s.is_zero():
        return True
    cs = s.d.coeffs()
    k = len(cs) - 1
    if cs[k] != 1 or any(c != 0 for c in cs[:k]):
        return False
    if ring == RING_GAUSS_LAURENT:
        return True
    if s.b is not None:
        return False
    step = {RING_A: 4, RING_ABAR: 2}[ring]
    for e, c in enumerate(s.a.coeffs()):
        if c != 0 and (e - k) % step:
            return False
    return True


def in_rational_q(s: Scalar) -> bool:
    """True iff s lies in the subfield Q(q) (real, and a function of t^4)."""
    if s.b is not None:
        return False
    return all(not c or e % 4 == 0 for p in (s.a, s.d) for e, c in enumerate(p.coeffs()))


# -- serialization --------------------------------------------------------

def _fmt_coeff(re_, im_):
    if im_ == 0:
        return str(re_)
    if re_ == 0:
        return f"{im_}i"
    sign = "+" if im_ > 0 else "-"
    return f"({re_}{sign}{abs(im_)}i)"


def _fmt_poly(terms):
    """terms: {exp: (re, im)} printed in descending exponent order."""
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, reverse=True):
        re_, im_ = terms[e]
        c = _fmt_coeff(re_, im_)
        if e == 0:
            piece = c
        else:
            mono = "t" if e == 1 else f"t^{e}"
            if c == "1":
                piece = mono
            elif c == "-1":
                piece = "-" + mono
            else:
                piece = f"{c}*{mono}"
        if out and not piece.startswith("-"):
            out.append("+" + piece)
        else:
            out.append(piece)
    return "".join(out)


def format_scalar(s: Scalar) -> str:
    num = _fmt_poly(s.numerator())
    den = s.denominator()
    if den == [1]:
        return num
    dterms = {e: (c, 0) for e, c in enumerate(den) if c}
    dstr = _fmt_poly(dterms)
    if len(dterms) > 1 or dstr.startswith("-"):
        dstr = f"({dstr})"
    if len(s.numerator()) > 1:
        num = f"({num})"
    return f"{num}/{dstr}"


_TOKEN = re.compile(r"\s*(?:(\d+)|([itqv])|(\^)|([-+*/()]))")


def parse_scalar(text: str) -> Scalar:
    """Parse the grammar produced by ``str(Scalar)``; also accepts q and v."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad scalar syntax at {pos}: {text!r}")
        toks.append(m.group(m.lastindex))
        pos = m.end()
    p = _Parser(toks)
    val = p.expr()
    if p.i != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    return val


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, tok=None):
        t = self.peek()
        if tok is not None and t != tok:
            raise ValueError(f"expected {tok!r}, got {t!r}")
        self.i += 1
        return t

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        val = self.term()
        if sign < 0:
            val = -val
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while True:
            nxt = self.peek()
            if nxt == "*":
                self.take()
                val = val * self.factor()
            elif nxt == "/":
                self.take()
                val = val / self.factor()
            elif nxt is not None and (nxt.isdigit() or nxt in "itqv("):
                val = val * self.factor()  # implicit product, e.g. 3i
            else:
                return val

    def factor(self):
        t = self.take()
        if t == "-":
            return -self.factor()
        if t == "(":
            val = self.expr()
            self.take(")")
        elif t.isdigit():
            val = Scalar(int(t))
        elif t == "i":
            val = I
        elif t in "tqv":
            base = {"t": 1, "v": 2, "q": 4}[t]
            exp = 1
            if self.peek() == "^":
                self.take()
                neg = False
                if self.peek() == "-":
                    self.take()
                    neg = True
                exp = int(self.take())
                if neg:
                    exp = -exp
            return t_pow(base * exp)
        else:
            raise ValueError(f"unexpected token {t!r}")
        if self.peek() == "^":
            self.take()
            neg = False
            if self.peek() == "-":
                self.take()
                neg = True
            exp = int(self.take())
            val = val ** (-exp if neg else exp)
        return val
