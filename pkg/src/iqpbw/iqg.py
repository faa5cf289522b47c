"""The universal iquantum group inside the Drinfeld double.

Elements are carried in two forms at once: a noncommutative polynomial in the
generator letters (the tracked expression) and its normalized value in the
double.  Letters are triples (kind, index, exponent) with kind one of

    "B"  B_i for a white node i          "k"  k_i^{e} = (K_i K'_{tau i})^{e}
    "E", "F"  E_j, F_j for a black node  "K", "Kp"  K_j^{e}, (K_j')^{e}, j black
"""
from __future__ import annotations

from .braid import braid_apply_word, pbw_algebra, sqrt_neg_q_power
from .linalg import add_into
from .rootdata import SatakeDatum
from .scalars import I, ONE, Scalar, format_scalar, in_rational_q, q_pow, t_pow
from .utilde import MODE_TILDE, UAlgebra, UElement, project_pi


class LeadingTermError(ArithmeticError):
    pass


class ParameterError(ValueError):
    pass


def letter_name(letter) -> str:
    kind, i, e = letter
    base = {"B": "B", "k": "k", "E": "E", "F": "F", "K": "K", "Kp": "K"}[kind] + str(i + 1)
    if kind == "Kp":
        base += "'"
    return base if e == 1 else f"{base}^{e}"


class IElement:
    """A tracked element: expression {word: coefficient} plus its value."""

    __slots__ = ("iq", "expr", "value")

    def __init__(self, iq: "IQuantumGroup", expr: dict, value: UElement):
        self.iq = iq
        self.expr = expr
        self.value = value

    def _other(self, other):
        if isinstance(other, IElement):
            if other.iq is not self.iq:
                raise ValueError("elements of different iquantum groups")
            return other
        if isinstance(other, (int, Scalar)):
            return self.iq.scalar(other)
        return None

    def __add__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        e = dict(self.expr)
        for w, c in other.expr.items():
            add_into(e, w, c)
        return IElement(self.iq, e, self.value + other.value)

    __radd__ = __add__

    def __neg__(self):
        return IElement(self.iq, {w: -c for w, c in self.expr.items()}, -self.value)

    def __sub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            other = Scalar(other)
        if isinstance(other, Scalar):
            if other.is_zero():
                return self.iq.zero()
            return IElement(self.iq, {w: c * other for w, c in self.expr.items()}, self.value * other)
        other = self._other(other)
        if other is None:
            return NotImplemented
        e = {}
        for w1, c1 in self.expr.items():
            for w2, c2 in other.expr.items():
                add_into(e, w1 + w2, c1 * c2)
        return IElement(self.iq, e, self.value * other.value)

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        r = self.iq.one()
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if isinstance(other, IElement):
            return self.value == other.value
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def tracked_degree(self) -> int:
        """Largest number of B letters over the words of the expression."""
        if not self.expr:
            return 0
        return max(sum(1 for l in w if l[0] == "B") for w in self.expr)

    def coefficients_in_rational_q(self) -> bool:
        """True when every coefficient of the value lies in Q(q)."""
        return all(in_rational_q(c) for c in self.value.terms.values())

    def to_sexpr(self) -> str:
        if not self.expr:
            return "0"
        parts = []
        for w, c in sorted(self.expr.items()):
            body = " ".join(letter_name(l) for l in w)
            parts.append(f"(* {format_scalar(c)}" + (f" {body})" if body else ")"))
        return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"

    def __str__(self):
        return self.to_sexpr()

    __repr__ = __str__


class IQuantumGroup:
    """Generators, sigma^imath, leading terms and central reduction for a Satake datum."""

    def __init__(self, sd: SatakeDatum, alg: UAlgebra | None = None):
        self.sd = sd
        # the relative longest word followed by w_bullet is a reduced word for w_0
        self.alg = alg if alg is not None else pbw_algebra(sd.cartan, sd.w0_word + sd.w_bullet)
        if self.alg.mode != MODE_TILDE:
            raise ValueError("the universal iquantum group lives in the Drinfeld double")
        self.n = sd.rank
        self._twisted = {}
        self._letter_vals = {}
        self._word_vals = {(): self.alg.one()}

    # -- generators
    def twisted_E(self, i: int) -> UElement:
        """T_{w_bullet}(E_{tau i}) in the positive part."""
        x = self._twisted.get(i)
        if x is None:
            x = braid_apply_word(self.sd.w_bullet, self.alg.E(self.sd.tau[i]))
            self._twisted[i] = x
        return x

    def letter_value(self, letter) -> UElement:
        v = self._letter_vals.get(letter)
        if v is not None:
            return v
        kind, i, e = letter
        a = self.alg
        black = self.sd.is_black(i)
        if kind == "B":
            if black:
                raise ValueError(f"B{i + 1}: node is black, use F")
            v = a.F(i) + self.twisted_E(i) * a.Kp(i)
        elif kind == "k":
            if black:
                raise ValueError(f"k{i + 1}: node is black")
            v = a.K(i, e) * a.Kp(self.sd.tau[i], e)
        else:
            if not black:
                raise ValueError(f"{kind}{i + 1}: node is white")
            v = {"E": lambda: a.E(i), "F": lambda: a.F(i), "K": lambda: a.K(i, e),
                 "Kp": lambda: a.Kp(i, e)}[kind]()
        self._letter_vals[letter] = v
        return v

    def word_value(self, word) -> UElement:
        v = self._word_vals.get(word)
        if v is None:
            v = self.word_value(word[:-1]) * self.letter_value(word[-1])
            self._word_vals[word] = v
        return v

    def from_expr(self, expr: dict) -> IElement:
        val = self.alg.zero()
        for w, c in expr.items():
            val = val + self.word_value(tuple(w)) * c
        return IElement(self, {tuple(w): c for w, c in expr.items() if not c.is_zero()}, val)

    def letter(self, kind: str, i: int, e: int = 1) -> IElement:
        l = (kind, i, e)
        return IElement(self, {(l,): ONE}, self.letter_value(l))

    def B(self, i: int) -> IElement:
        """B_i for white i, and F_i for black i."""
        return self.letter("F", i) if self.sd.is_black(i) else self.letter("B", i)

    def k(self, i: int, e: int = 1) -> IElement:
        return self.letter("k", i, e)

    def E(self, j: int) -> IElement:
        return self.letter("E", j)

    def F(self, j: int) -> IElement:
        return self.letter("F", j)

    def K(self, j: int, e: int = 1) -> IElement:
        return self.letter("K", j, e)

    def Kp(self, j: int, e: int = 1) -> IElement:
        return self.letter("Kp", j, e)

    def scalar(self, c) -> IElement:
        c = c if isinstance(c, Scalar) else Scalar(c)
        return IElement(self, {(): c} if not c.is_zero() else {}, self.alg.scalar(c))

    def one(self) -> IElement:
        return self.scalar(ONE)

    def zero(self) -> IElement:
        return IElement(self, {}, self.alg.zero())

    def generators(self) -> list:
        out = []
        for i in range(self.n):
            if self.sd.is_black(i):
                out += [self.E(i), self.F(i), self.K(i), self.Kp(i)]
            else:
                out += [self.B(i), self.k(i)]
        return out

    # -- sigma^imath
    def _sigma_letter(self, letter):
        kind, i, e = letter
        if kind == "k":
            return ("k", self.sd.tau[i], e)
        if kind == "K":
            return ("Kp", i, e)
        if kind == "Kp":
            return ("K", i, e)
        return letter

    def sigma_imath(self, x: IElement) -> IElement:
        if not isinstance(x, IElement):
            raise TypeError("sigma_imath needs a tracked element")
        expr = {}
        for w, c in x.expr.items():
            add_into(expr, tuple(self._sigma_letter(l) for l in reversed(w)), c)
        return self.from_expr(expr)

    # -- filtration
    def white_height(self, nu) -> int:
        return sum(nu[i] for i in range(self.n) if not self.sd.is_black(i))

    def in_imath0_lattice(self, kvec) -> bool:
        n, tau = self.n, self.sd.tau
        return all(self.sd.is_black(i) or kvec[i] == kvec[n + tau[i]] for i in range(n))

    def leading_term(self, x) -> tuple:
        """(filtration degree, top component read in the double).

        The top component consists of the terms whose negative part has the
        largest white height; it is the image under the associated graded
        isomorphism of an element of U^- (x) U_black^+ (x) U^{imath 0}.
        """
        val = x.value if isinstance(x, IElement) else x
        if val.is_zero():
            raise LeadingTermError("leading term of zero is undefined")
        h = self.alg.half
        heights = {}
        for t in val.terms:
            heights.setdefault(self.white_height(h.weight(t[0])), []).append(t)
        d = max(heights)
        top = UElement(self.alg, {t: val.terms[t] for t in heights[d]})
        for f, k, e in top.terms:
            ew = h.weight(e)
            if any(ew[i] for i in range(self.n) if not self.sd.is_black(i)):
                raise LeadingTermError("top component has a white positive part")
            if not self.in_imath0_lattice(k):
                raise LeadingTermError("top component has a Cartan part outside U^{imath 0}")
        if isinstance(x, IElement) and d > x.tracked_degree():
            raise LeadingTermError("value degree exceeds the tracked degree")
        return d, top

    def _top_words(self, top: UElement) -> dict:
        """Generator words whose values have the given top component as leading part."""
        h = self.alg.half
        n = self.n
        expr = {}
        for (f, k, e), c in top.terms.items():
            mid = []
            for i in range(n):
                if self.sd.is_black(i):
                    if k[i]:
                        mid.append(("K", i, k[i]))
                    if k[n + i]:
                        mid.append(("Kp", i, k[n + i]))
                elif k[i]:
                    mid.append(("k", i, k[i]))
            mid = tuple(mid)
            for fw, fc in h.to_words(f).items():
                head = tuple(("F", a, 1) if self.sd.is_black(a) else ("B", a, 1) for a in fw)
                for ew, ec in h.to_words(e).items():
                    add_into(expr, head + mid + tuple(("E", a, 1) for a in ew), c * fc * ec)
        return expr

    def lift(self, value: UElement) -> IElement:
        """Rewrite an element of the iquantum group as a tracked expression.

        Peels the top filtration component, lifts it to generator words and
        recurses on the remainder; the degree must drop in every round.
        """
        if value.alg is not self.alg:
            raise ValueError("value lives in a different algebra")
        expr = {}
        rem = value
        last = None
        while not rem.is_zero():
            d, top = self.leading_term(rem)
            if last is not None and d >= last:
                raise LeadingTermError(f"degree did not drop below {last} while lifting")
            last = d
            words = self._top_words(top)
            for w, c in words.items():
                add_into(expr, w, c)
                rem = rem - self.word_value(w) * c
        expr = {w: c for w, c in expr.items() if not c.is_zero()}
        return IElement(self, expr, value)

    # -- parameters and central reduction
    def check_params(self, params: dict) -> dict:
        out = {}
        for i in self.sd.white:
            if i not in params:
                raise ParameterError(f"missing parameter for node {i + 1}")
            out[i] = params[i] if isinstance(params[i], Scalar) else Scalar(params[i])
            if out[i].is_zero():
                raise ParameterError("parameters must be nonzero")
        for i in self.sd.white:
            if out[i] != out[self.sd.tau[i]]:
                raise ParameterError(f"unbalanced parameters at nodes {i + 1}, {self.sd.tau[i] + 1}")
        return out

    def central_reduction_images(self, params: dict) -> dict:
        params = self.check_params(params)
        u = self.alg.sibling_U()
        out = {}
        for i in range(self.n):
            if self.sd.is_black(i):
                for e in (1, -1):
                    out[("K", i, e)] = u.K(i, e)
                    out[("Kp", i, e)] = u.K(i, -e)
                out[("E", i, 1)] = u.E(i)
                out[("F", i, 1)] = u.F(i)
            else:
                ti = self.sd.tau[i]
                out[("B", i, 1)] = u.F(i) + project_pi(self.twisted_E(i)) * u.K(i, -1) * params[i]
                for e in (1, -1):
                    out[("k", i, e)] = u.K(i, e) * u.K(ti, -e) * params[ti] ** e
        return out

    def central_reduction(self, x: IElement, params: dict) -> UElement:
        """The homomorphism onto Letzter's iquantum group with parameters params."""
        images = self.central_reduction_images(params)
        u = self.alg.sibling_U()
        out = u.zero()
        for w, c in x.expr.items():
            y = u.one()
            for kind, i, e in w:
                if e in (1, -1):
                    y = y * images[(kind, i, e)]
                else:
                    y = y * images[(kind, i, 1 if e > 0 else -1)] ** abs(e)
            out = out + y * c
        return out


# -- distinguished and table parameters --------------------------------------------------

def varsigma_diamond(sd: SatakeDatum, i: int) -> Scalar:
    """-q^{e} for the distinguished exponent e of node i (1 on black nodes)."""
    if sd.is_black(i):
        return ONE
    e = sd.varsigma_diamond_exponent(i)
    return -t_pow(int(4 * e))


def sqrt_varsigma_diamond(sd: SatakeDatum, i: int, branch: int = 1) -> Scalar:
    if sd.is_black(i):
        return ONE
    return sqrt_neg_q_power(sd.varsigma_diamond_exponent(i), branch)


def diamond_params(sd: SatakeDatum) -> dict:
    return {i: varsigma_diamond(sd, i) for i in sd.white}


def shifted_params(sd: SatakeDatum, shifts: dict) -> dict:
    """varsigma_i = q^{a_i} varsigma_diamond_i; shifts must be tau-invariant."""
    for i in sd.white:
        if shifts.get(i, 0) != shifts.get(sd.tau[i], 0):
            raise ParameterError("shifts must be constant on tau-orbits")
    return {i: varsigma_diamond(sd, i) * q_pow(shifts.get(i, 0)) for i in sd.white}


def param_shift(sd: SatakeDatum, params: dict) -> dict:
    """The exponents a_i with params_i = q^{a_i} varsigma_diamond_i, or ParameterError."""
    out = {}
    for i in sd.white:
        r = params[i] / varsigma_diamond(sd, i)
        lau = r.laurent()
        if lau is None or len(lau) != 1:
            raise ParameterError(f"parameter at node {i + 1} is not in q^Z times the distinguished one")
        (k, coeff), = lau.items()
        if coeff != (1, 0) or k % 4:
            raise ParameterError(f"parameter at node {i + 1} is not in q^Z times the distinguished one")
        out[i] = k // 4
    return out


def varsigma_star(family_key: str) -> Scalar:
    """Balanced parameter attached to a real rank one diagram (family key as in rootdata)."""
    if family_key == "AI1":
        return q_pow(-1)
    if family_key == "AII3":
        return q_pow(1)
    if family_key == "AIII11":
        return ONE
    if family_key == "FII":
        return q_pow(5)
    name, n = family_key[:-1], int(family_key[-1])
    if name == "AIV":
        # (-q)^{n/2} q^{-1/2}, with (-q)^{1/2} = i t^2
        if n % 2 == 0:
            return q_pow((n - 2) // 2) * t_pow(2) * (-1) ** (n // 2)
        return I * q_pow((n - 1) // 2) * (-1) ** ((n - 1) // 2)
    if name == "BII":
        return q_pow(2 * n - 3)
    if name == "CII":
        return q_pow(n - 1)
    if name == "DII":
        return q_pow(n - 2)
    raise KeyError(family_key)
