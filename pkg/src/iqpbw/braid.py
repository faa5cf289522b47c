"""Lusztig's braid group symmetries on the Drinfeld double, their rescaled
versions, and PBW root vectors.

The symmetry T_i = T''_{i,1} acts on generators by

    K_mu -> K_{s_i mu},  E_i -> -F_i K_i'^{-1},  F_i -> -K_i^{-1} E_i,
    E_j -> sum_s (-1)^s q_i^{-s} E_i^{(r-s)} E_j E_i^{(s)},
    F_j -> sum_s (-1)^s q_i^{s} F_i^{(s)} F_j F_i^{(r-s)},   r = -c_ij,

and T_i^{-1} = sigma T_i sigma.
"""
from __future__ import annotations

from .linalg import add_into
from .rootdata import CartanDatum, ReducedWordError, cartan as make_cartan
from .scalars import I, Scalar, q_pow, t_pow
from .utilde import MODE_TILDE, PBWHalf, UAlgebra, UElement, WordHalf, sigma


class BraidAction:
    """Caches T_i^{+-1} images of half-algebra basis keys for one algebra."""

    def __init__(self, alg: UAlgebra):
        self.alg = alg
        self._gen = {}
        self._half = {}

    def _k_image(self, i: int, kvec) -> tuple:
        alg = self.alg
        C = alg.cartan.matrix
        n = alg.n
        k = list(kvec)
        # K_mu -> K_{s_i mu}: the exponent of K_i becomes sum_j -c_ij mu_j + mu_i
        blocks = [(0, n)] + ([(n, 2 * n)] if alg.mode == MODE_TILDE else [])
        for lo, _ in blocks:
            mu = k[lo:lo + n]
            new_i = mu[i] - sum(C[i][j] * mu[j] for j in range(n))
            k[lo + i] = new_i
        return tuple(k)

    def generator_image(self, i: int, e: int, kind: str, j: int) -> UElement:
        ck = (i, e, kind, j)
        res = self._gen.get(ck)
        if res is not None:
            return res
        alg = self.alg
        if e == -1:
            # sigma fixes E_j and F_j
            res = sigma(self.generator_image(i, 1, kind, j))
        else:
            eps = alg.cartan.eps[i]
            if j == i:
                if kind == "E":
                    res = -(alg.F(i) * alg.Kp(i, -1))
                else:
                    res = -(alg.K(i, -1) * alg.E(i))
            else:
                r = -alg.cartan.matrix[i][j]
                res = alg.zero()
                for s in range(r + 1):
                    sign = -1 if s % 2 else 1
                    if kind == "E":
                        c = q_pow(-s * eps) * sign
                        term = alg.E(i, r - s, divided=True) * alg.E(j) * alg.E(i, s, divided=True)
                    else:
                        c = q_pow(s * eps) * sign
                        term = alg.F(i, s, divided=True) * alg.F(j) * alg.F(i, r - s, divided=True)
                    res = res + term * c
        self._gen[ck] = res
        return res

    def half_image(self, i: int, e: int, kind: str, key) -> UElement:
        """Image of the half-algebra basis element key placed as E- or F-part."""
        alg = self.alg
        h = alg.half
        if h.is_unit(key):
            return alg.one()
        ck = (i, e, kind, key)
        res = self._half.get(ck)
        if res is not None:
            return res
        res = alg.zero()
        for m, g in h.left_factor(key).items():
            head = self.generator_image(i, e, kind, m)
            tail = alg.zero()
            for gk, gc in g.items():
                tail = tail + self.half_image(i, e, kind, gk) * gc
            res = res + head * tail
        self._half[ck] = res
        return res

    def apply(self, i: int, e: int, x: UElement) -> UElement:
        alg = self.alg
        out = alg.zero()
        for (f, k, ek), c in x.terms.items():
            y = self.half_image(i, e, "F", f) * alg.Kvec(self._k_image(i, k)) * self.half_image(i, e, "E", ek)
            out = out + y * c
        return out


_ACTIONS = {}


def braid_action(alg: UAlgebra) -> BraidAction:
    act = _ACTIONS.get(id(alg))
    if act is None or act.alg is not alg:
        act = BraidAction(alg)
        _ACTIONS[id(alg)] = act
    return act


def lusztig_apply(i: int, e: int, x: UElement) -> UElement:
    """T_i^{e}(x), e = +1 or -1."""
    if e not in (1, -1):
        raise ValueError("e must be +1 or -1")
    return braid_action(x.alg).apply(i, e, x)


def braid_apply_word(word, x: UElement, e: int = 1, check_reduced: bool = True) -> UElement:
    """T_w(x) = T_{i_1} ... T_{i_r}(x) for e = 1; (T_w)^{-1}(x) for e = -1."""
    word = tuple(word)
    if check_reduced and not x.alg.cartan.is_reduced(word):
        raise ReducedWordError(f"word {[a + 1 for a in word]} is not reduced")
    letters = reversed(word) if e == 1 else word
    for i in letters:
        x = lusztig_apply(i, e, x)
    return x


# -- rescaling ------------------------------------------------------------------------

def psi_scale(x: UElement, sqrt_a, inverse: bool = False) -> UElement:
    """Psi_a: K_i, K_i', E_i scaled by a_i^{1/2}; F_i fixed.  sqrt_a[i] = a_i^{1/2}.

    On the quantum group (mode U) this is Phi_a: E_i -> a_i^{1/2} E_i,
    F_i -> a_i^{-1/2} F_i, K fixed.
    """
    alg = x.alg
    h = alg.half
    n = alg.n
    s = [c.inverse() if inverse else c for c in sqrt_a]
    out = {}
    for (f, k, e), c in x.terms.items():
        ew = h.weight(e)
        if alg.mode == MODE_TILDE:
            expo = [ew[i] + k[i] + k[n + i] for i in range(n)]
        else:
            fw = h.weight(f)
            expo = [ew[i] - fw[i] for i in range(n)]
        m = c
        for i in range(n):
            if expo[i] and not s[i].is_one():
                m = m * s[i] ** expo[i]
        add_into(out, (f, k, e), m)
    return UElement(alg, out)


def rescaled_apply(i: int, e: int, x: UElement, sqrt_a) -> UElement:
    """Psi_a^{-1} o T_i^{e} o Psi_a with sqrt_a the chosen square roots of a."""
    return psi_scale(lusztig_apply(i, e, psi_scale(x, sqrt_a)), sqrt_a, inverse=True)


def rescaled_apply_word(word, x: UElement, sqrt_a, e: int = 1) -> UElement:
    y = psi_scale(x, sqrt_a)
    y = braid_apply_word(word, y, e)
    return psi_scale(y, sqrt_a, inverse=True)


# -- algebras and root vectors ----------------------------------------------------------

_WORD_ALGS = {}
_PBW_ALGS = {}


def word_algebra(c: CartanDatum | str, mode: str = MODE_TILDE) -> UAlgebra:
    """Algebra whose half uses standard Serre words (the reference model)."""
    if isinstance(c, str):
        c = make_cartan(c)
    key = (c.label, c.matrix)
    alg = _WORD_ALGS.get(key)
    if alg is None:
        alg = UAlgebra(c, WordHalf(c), MODE_TILDE)
        _WORD_ALGS[key] = alg
    return alg if mode == MODE_TILDE else alg.sibling_U()


def root_vector_E_words(c: CartanDatum, w0_word) -> list:
    """E root vectors T_{i_1}...T_{i_{k-1}}(E_{i_k}) as vectors in the word model."""
    alg = word_algebra(c)
    out = []
    w0_word = tuple(w0_word)
    c.inversion_set(w0_word)
    for k, i in enumerate(w0_word):
        x = braid_apply_word(w0_word[:k], alg.E(i), check_reduced=False)
        out.append(x.e_vector())
    return out


def pbw_algebra(c: CartanDatum | str, w0_word=None, mode: str = MODE_TILDE) -> UAlgebra:
    """Algebra with PBW normal form attached to a reduced word of the longest element."""
    if isinstance(c, str):
        c = make_cartan(c)
    w0_word = tuple(c.longest if w0_word is None else w0_word)
    key = (c.label, c.matrix, w0_word)
    alg = _PBW_ALGS.get(key)
    if alg is None:
        wa = word_algebra(c)
        half = PBWHalf(c, w0_word, root_vector_E_words(c, w0_word), wa.half)
        alg = UAlgebra(c, half, MODE_TILDE)
        _PBW_ALGS[key] = alg
    return alg if mode == MODE_TILDE else alg.sibling_U()


def root_vector_F(alg: UAlgebra, w0_word, k: int, a: int = 1) -> UElement:
    """F_{beta_k}^{(a)} = T_{i_1}...T_{i_{k-1}}(F_{i_k}^{(a)}), k 0-based."""
    w0_word = tuple(w0_word)
    if not 0 <= k < len(w0_word):
        raise IndexError(f"position {k + 1} out of range")
    return braid_apply_word(w0_word[:k], alg.F(w0_word[k], a, divided=True))


def root_vector_E(alg: UAlgebra, w0_word, k: int, a: int = 1) -> UElement:
    w0_word = tuple(w0_word)
    if not 0 <= k < len(w0_word):
        raise IndexError(f"position {k + 1} out of range")
    return braid_apply_word(w0_word[:k], alg.E(w0_word[k], a, divided=True))


def pbw_monomials_F(alg: UAlgebra, w0_word, mu) -> list:
    """Lusztig PBW monomials F_{beta_1}^{(a_1)} ... F_{beta_N}^{(a_N)} of weight mu,
    returned as (exponent tuple, element) in the order of the convex order."""
    c = alg.cartan
    roots = c.inversion_set(tuple(w0_word))
    out = []
    mu = tuple(mu)

    def rec(pos, rem, cur):
        if not any(rem):
            out.append(tuple(cur) + (0,) * (len(roots) - len(cur)))
            return
        if pos == len(roots):
            return
        b = roots[pos]
        a = 0
        r = rem
        while all(x >= 0 for x in r):
            rec(pos + 1, r, cur + [a])
            a += 1
            r = tuple(x - y for x, y in zip(r, b))

    rec(0, mu, [])
    res = []
    for ex in out:
        x = alg.one()
        for k, a in enumerate(ex):
            if a:
                x = x * root_vector_F(alg, w0_word, k, a)
        res.append((ex, x))
    return res


def sqrt_neg_q_power(e, branch: int = 1) -> Scalar:
    """Square root branch * i * t^{2e} of -q^e (2e must be an integer)."""
    e2 = 2 * e
    if e2 != int(e2):
        raise ValueError("exponent must lie in (1/2)Z")
    r = I * t_pow(int(e2))
    return r if branch == 1 else -r
