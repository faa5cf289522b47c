"""The Drinfeld double and the quantum group as computable algebras.

A half algebra (the free algebra on theta_i modulo the quantum Serre ideal)
is shared by the positive part (theta_i -> E_i) and the negative part
(theta_i -> F_i).  Two implementations exist:

* WordHalf: standard words modulo the Serre ideal, computed by a per-weight
  row echelon form.  Simple and independent; used as an oracle and to
  bootstrap root vectors.
* PBWHalf: ordered monomials in root vectors attached to a reduced word of
  the longest element.  Commutation relations between root vectors are found
  lazily by solving for the unique element with the prescribed skew
  derivatives.

Elements of the double are sums of terms f * K * e with f in the negative
half, K a monomial in K_i, K_i' (or K_i^{+-1} for the quantum group) and e in
the positive half.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from .linalg import Echelon, LinearSystemError, add_into, axpy, solve
from .rootdata import CartanDatum
from .scalars import ONE, ZERO, Scalar, format_scalar, q_binom, q_factorial, q_pow

MODE_TILDE = "tilde"
MODE_U = "U"


class ResourceCapError(RuntimeError):
    """A computation needed a weight beyond the configured cap."""


class _CartanForms:
    """Precomputed bilinear data shared by the half algebras."""

    def __init__(self, cartan: CartanDatum):
        self.cartan = cartan
        n = self.n = cartan.rank
        self.B = tuple(tuple(cartan.eps[i] * cartan.matrix[i][j] for j in range(n)) for i in range(n))
        self.simple = tuple(cartan.simple(i) for i in range(n))

    def dot_simple(self, j: int, nu) -> int:
        """(alpha_j, nu)."""
        row = self.B[j]
        return sum(row[k] * nu[k] for k in range(self.n) if nu[k])

    def form(self, a, b) -> int:
        return self.cartan.form(a, b)


def _add_w(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_w(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dmul(half, x: dict, y: dict) -> dict:
    """Product of two half-algebra elements given as dicts."""
    out: dict = {}
    for k1, c1 in x.items():
        for k2, c2 in y.items():
            axpy(out, c1 * c2, half.mul(k1, k2))
    return out


# -- word model ---------------------------------------------------------------------

def _multiset_words(mu):
    """All words with letter counts mu, in lexicographic order."""
    n = len(mu)
    total = sum(mu)
    out = []
    cur = []
    counts = list(mu)

    def rec():
        if len(cur) == total:
            out.append(tuple(cur))
            return
        for i in range(n):
            if counts[i]:
                counts[i] -= 1
                cur.append(i)
                rec()
                cur.pop()
                counts[i] += 1

    rec()
    return out


class WordHalf:
    """Half algebra with standard words as basis keys.

    A word is standard when it is not the leading (lexicographically largest)
    word of an element of the Serre ideal.  Standard words are closed under
    taking prefixes and suffixes.
    """

    kind = "word"

    def __init__(self, cartan: CartanDatum, max_words: int = 200000):
        self.cartan = cartan
        self.cf = _CartanForms(cartan)
        self.n = cartan.rank
        self.unit = ()
        self.max_words = max_words
        self._spaces = {}
        self._mul = {}
        self._r = {}
        self._rp = {}
        self._serre = self._serre_elements()

    def _serre_elements(self):
        out = []
        C = self.cartan.matrix
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    continue
                m = 1 - C[i][j]
                eps = self.cartan.eps[i]
                vec = {}
                for r in range(m + 1):
                    c = q_binom(m, r, eps)
                    if r % 2:
                        c = -c
                    add_into(vec, (i,) * r + (j,) + (i,) * (m - r), c)
                wt = tuple(m if k == i else (1 if k == j else 0) for k in range(self.n))
                out.append((wt, vec))
        return out

    def weight(self, key) -> tuple:
        w = [0] * self.n
        for a in key:
            w[a] += 1
        return tuple(w)

    def gen(self, i: int):
        return (i,)

    @staticmethod
    def is_unit(key) -> bool:
        return not key

    def _space(self, mu):
        sp = self._spaces.get(mu)
        if sp is not None:
            return sp
        if any(x < 0 for x in mu):
            raise ValueError("negative weight")
        words = _multiset_words(mu)
        if len(words) > self.max_words:
            raise ResourceCapError(f"word space at weight {mu} has {len(words)} words")
        ech = Echelon()
        for j in range(self.n):
            if mu[j]:
                sub = self._space(tuple(x - (1 if k == j else 0) for k, x in enumerate(mu)))
                for row in sub[1].rows.values():
                    ech.add({(j,) + w: c for w, c in row.items()})
        for wt, vec in self._serre:
            rest = _sub_w(mu, wt)
            if any(x < 0 for x in rest):
                continue
            for v in _multiset_words(rest):
                ech.add({w + v: c for w, c in vec.items()})
        pivots = ech.pivots()
        std = [w for w in words if w not in pivots]
        nf = {}
        for p, row in ech.rows.items():
            nf[p] = {w: -c for w, c in row.items() if w != p}
        sp = (frozenset(std), ech, nf, std)
        self._spaces[mu] = sp
        return sp

    def basis(self, mu) -> list:
        return list(self._space(tuple(mu))[3])

    def dim(self, mu) -> int:
        return len(self._space(tuple(mu))[0])

    def reduce(self, vec: dict) -> dict:
        out = {}
        for w, c in vec.items():
            std, _, nf, _ = self._space(self.weight(w))
            if w in std:
                add_into(out, w, c)
            else:
                axpy(out, c, nf[w])
        return out

    def from_word(self, word) -> dict:
        return self.reduce({tuple(word): ONE})

    def mul(self, k1, k2) -> dict:
        if not k1:
            return {k2: ONE}
        if not k2:
            return {k1: ONE}
        key = (k1, k2)
        r = self._mul.get(key)
        if r is None:
            r = self.reduce({k1 + k2: ONE})
            self._mul[key] = r
        return r

    def r(self, j: int, key) -> dict:
        """Skew derivation r_j(x x') = x r_j(x') + q^{(alpha_j,|x'|)} r_j(x) x'."""
        ck = (j, key)
        res = self._r.get(ck)
        if res is not None:
            return res
        out = {}
        suffix = [0] * self.n
        for p in range(len(key) - 1, -1, -1):
            if key[p] == j:
                c = q_pow(self.cf.dot_simple(j, suffix))
                add_into(out, key[:p] + key[p + 1:], c)
            suffix[key[p]] += 1
        res = self.reduce(out)
        self._r[ck] = res
        return res

    def rp(self, j: int, key) -> dict:
        """Skew derivation r'_j(x x') = r'_j(x) x' + q^{(alpha_j,|x|)} x r'_j(x')."""
        ck = (j, key)
        res = self._rp.get(ck)
        if res is not None:
            return res
        out = {}
        prefix = [0] * self.n
        for p in range(len(key)):
            if key[p] == j:
                c = q_pow(self.cf.dot_simple(j, prefix))
                add_into(out, key[:p] + key[p + 1:], c)
            prefix[key[p]] += 1
        res = self.reduce(out)
        self._rp[ck] = res
        return res

    def left_factor(self, key) -> dict:
        return {key[0]: {key[1:]: ONE}}

    def rev(self, key) -> dict:
        return self.reduce({tuple(reversed(key)): ONE})

    def to_words(self, key) -> dict:
        return {key: ONE}

    def key_str(self, key, letter: str) -> str:
        return "".join(f"{letter}{a + 1}" for a in key)

    def key_json(self, key):
        return [a + 1 for a in key]


# -- PBW model ------------------------------------------------------------------------

class PBWHalf:
    """Half algebra with ordered PBW monomials as basis keys.

    ``root_words[k]`` is the k-th root vector written in a WordHalf.  The
    product order is x_1^{a_1} x_2^{a_2} ... along the convex order of the
    reduced word.
    """

    kind = "pbw"

    def __init__(self, cartan: CartanDatum, w0_word, root_words, word_half: WordHalf):
        self.cartan = cartan
        self.cf = _CartanForms(cartan)
        self.n = cartan.rank
        self.word_half = word_half
        self.w0_word = tuple(w0_word)
        self.roots = tuple(cartan.inversion_set(self.w0_word))
        self.N = len(self.roots)
        if self.N != len(cartan.positive_roots):
            raise ValueError("word is not a reduced word of the longest element")
        self.root_words = list(root_words)
        self.unit = (0,) * self.N
        self.simple_pos = {}
        for k, b in enumerate(self.roots):
            if sum(b) == 1:
                self.simple_pos[b.index(1)] = k
        self.root_eps = tuple(cartan.root_eps(b) for b in self.roots)
        self._lf_root = {}
        self._lf = {}
        self._L = {}
        self._rel = {}
        self._mul = {}
        self._r = {}
        self._rp = {}
        self._r_root = {}
        self._rp_root = {}
        self._rev = {}
        self._rev_root = {}
        self._basis = {}
        self._weight = {}
        self.relations_checked = 0

    # -- basics
    def weight(self, key) -> tuple:
        w = self._weight.get(key)
        if w is None:
            w = [0] * self.n
            for k, a in enumerate(key):
                if a:
                    b = self.roots[k]
                    for i in range(self.n):
                        w[i] += a * b[i]
            w = tuple(w)
            self._weight[key] = w
        return w

    def gen(self, i: int):
        return self.monomial({self.simple_pos[i]: 1})

    @staticmethod
    def is_unit(key) -> bool:
        return not any(key)

    def monomial(self, exps: dict):
        m = [0] * self.N
        for k, a in exps.items():
            m[k] += a
        return tuple(m)

    def root_key(self, k: int, a: int = 1):
        return self.monomial({k: a})

    @staticmethod
    def _first(key):
        for k, a in enumerate(key):
            if a:
                return k
        return None

    def _dec(self, key, k):
        m = list(key)
        m[k] -= 1
        return tuple(m)

    def _inc(self, key, k):
        m = list(key)
        m[k] += 1
        return tuple(m)

    # -- multiplication
    def left_mul_root(self, k: int, key) -> dict:
        """x_k * x^key."""
        ck = (k, key)
        res = self._L.get(ck)
        if res is not None:
            return res
        j = self._first(key)
        if j is None or k <= j:
            res = {self._inc(key, k): ONE}
        else:
            rest = self._dec(key, j)
            res = {}
            for t, c in self.relation(k, j).items():
                axpy(res, c, self.mul(t, rest))
        self._L[ck] = res
        return res

    def mul(self, k1, k2) -> dict:
        if not any(k1):
            return {k2: ONE}
        if not any(k2):
            return {k1: ONE}
        ck = (k1, k2)
        res = self._mul.get(ck)
        if res is not None:
            return res
        cur = {k2: ONE}
        for k in range(self.N - 1, -1, -1):
            for _ in range(k1[k]):
                nxt = {}
                for key, c in cur.items():
                    axpy(nxt, c, self.left_mul_root(k, key))
                cur = nxt
        self._mul[ck] = cur
        return cur

    def mul_elems(self, x: dict, y: dict) -> dict:
        return _dmul(self, x, y)

    def _left_mul_elem(self, k: int, x: dict) -> dict:
        out = {}
        for key, c in x.items():
            axpy(out, c, self.left_mul_root(k, key))
        return out

    def from_word(self, word) -> dict:
        cur = {self.unit: ONE}
        for a in reversed(tuple(word)):
            cur = self._left_mul_elem(self.simple_pos[a], cur)
        return cur

    def from_word_elem(self, vec: dict) -> dict:
        out = {}
        for w, c in vec.items():
            axpy(out, c, self.from_word(w))
        return out

    # -- root vector data
    def root_left_factor(self, k: int) -> dict:
        """x_k = sum_m theta_m * g_m as {m: g_m}."""
        res = self._lf_root.get(k)
        if res is not None:
            return res
        b = self.roots[k]
        if sum(b) == 1:
            res = {b.index(1): {self.unit: ONE}}
        else:
            res = {}
            for w, c in self.root_words[k].items():
                g = res.setdefault(w[0], {})
                axpy(g, c, self.from_word(w[1:]))
            res = {m: g for m, g in res.items() if g}
        self._lf_root[k] = res
        return res

    def _r_of_root(self, j: int, k: int) -> dict:
        ck = (j, k)
        res = self._r_root.get(ck)
        if res is not None:
            return res
        res = {}
        for m, g in self.root_left_factor(k).items():
            # r_j(theta_m g) = theta_m r_j(g) + delta q^{(alpha_j,|g|)} g
            rg = self.r_elem(j, g)
            axpy(res, ONE, self._left_mul_elem(self.simple_pos[m], rg))
            if m == j:
                nu = _sub_w(self.roots[k], self.cf.simple[m])
                axpy(res, q_pow(self.cf.dot_simple(j, nu)), g)
        self._r_root[ck] = res
        return res

    def _rp_of_root(self, j: int, k: int) -> dict:
        ck = (j, k)
        res = self._rp_root.get(ck)
        if res is not None:
            return res
        res = {}
        for m, g in self.root_left_factor(k).items():
            # r'_j(theta_m g) = delta g + q^{(alpha_j,alpha_m)} theta_m r'_j(g)
            if m == j:
                axpy(res, ONE, g)
            rg = self.rp_elem(j, g)
            axpy(res, q_pow(self.cf.B[j][m]), self._left_mul_elem(self.simple_pos[m], rg))
        self._rp_root[ck] = res
        return res

    def r(self, j: int, key) -> dict:
        ck = (j, key)
        res = self._r.get(ck)
        if res is not None:
            return res
        g = self._first(key)
        if g is None:
            res = {}
        else:
            rest = self._dec(key, g)
            res = {}
            # r_j(x_g rest) = x_g r_j(rest) + q^{(alpha_j,|rest|)} r_j(x_g) rest
            if any(rest):
                axpy(res, ONE, self._left_mul_elem(g, self.r(j, rest)))
            c = q_pow(self.cf.dot_simple(j, self.weight(rest)))
            for t, tc in self._r_of_root(j, g).items():
                axpy(res, c * tc, self.mul(t, rest))
        self._r[ck] = res
        return res

    def rp(self, j: int, key) -> dict:
        ck = (j, key)
        res = self._rp.get(ck)
        if res is not None:
            return res
        g = self._first(key)
        if g is None:
            res = {}
        else:
            rest = self._dec(key, g)
            res = {}
            # r'_j(x_g rest) = r'_j(x_g) rest + q^{(alpha_j,beta_g)} x_g r'_j(rest)
            for t, tc in self._rp_of_root(j, g).items():
                axpy(res, tc, self.mul(t, rest))
            if any(rest):
                c = q_pow(self.cf.dot_simple(j, self.roots[g]))
                axpy(res, c, self._left_mul_elem(g, self.rp(j, rest)))
        self._rp[ck] = res
        return res

    def r_elem(self, j, x: dict) -> dict:
        out = {}
        for k, c in x.items():
            axpy(out, c, self.r(j, k))
        return out

    def rp_elem(self, j, x: dict) -> dict:
        out = {}
        for k, c in x.items():
            axpy(out, c, self.rp(j, k))
        return out

    # -- commutation relations
    def monomials(self, mu, allowed=None) -> list:
        """PBW monomials of weight mu using root indices in ``allowed``."""
        mu = tuple(mu)
        allowed = tuple(range(self.N)) if allowed is None else tuple(allowed)
        ck = (mu, allowed)
        res = self._basis.get(ck)
        if res is not None:
            return res
        out = []
        cur = [0] * self.N

        def rec(pos, rem):
            if not any(rem):
                out.append(tuple(cur))
                return
            if pos == len(allowed):
                return
            k = allowed[pos]
            b = self.roots[k]
            a = 0
            r = rem
            while all(x >= 0 for x in r):
                cur[k] = a
                rec(pos + 1, r)
                a += 1
                r = _sub_w(r, b)
            cur[k] = 0

        rec(0, mu)
        out.sort(reverse=True)
        self._basis[ck] = out
        return out

    def basis(self, mu) -> list:
        return self.monomials(mu)

    def dim(self, mu) -> int:
        return len(self.monomials(mu))

    def relation(self, k: int, j: int) -> dict:
        """x_k x_j (j < k) in the PBW basis."""
        ck = (k, j)
        res = self._rel.get(ck)
        if res is not None:
            return res
        mu = _add_w(self.roots[j], self.roots[k])
        cands = self.monomials(mu, range(j, k + 1))
        xj = self.root_key(j)
        eqs: dict = {}
        # skew derivatives of the product x_k x_j
        for i in range(self.n):
            lhs = {}
            axpy(lhs, ONE, self._left_mul_elem(k, self._r_of_root(i, j)))
            c = q_pow(self.cf.dot_simple(i, self.roots[j]))
            for t, tc in self._r_of_root(i, k).items():
                axpy(lhs, c * tc, self.mul(t, xj))
            for t, tc in lhs.items():
                eqs.setdefault((i, t), [{}, ZERO])[1] = tc
            for m in cands:
                for t, tc in self.r(i, m).items():
                    eqs.setdefault((i, t), [{}, ZERO])[0][m] = tc
        try:
            sol = solve([tuple(v) for v in eqs.values()], cands)
        except LinearSystemError as exc:
            raise LinearSystemError(f"commutation relation for roots {k}, {j}: {exc}") from None
        ordered = self.monomial({j: 1, k: 1})
        for m in sol:
            if m != ordered and (m[j] or m[k]):
                raise AssertionError(f"relation x_{k} x_{j} is not of Levendorskii-Soibelman form")
        self._rel[ck] = sol
        self.relations_checked += 1
        return sol

    def left_factor(self, key) -> dict:
        out = self._lf.get(key)
        if out is not None:
            return out
        g = self._first(key)
        rest = self._dec(key, g)
        out = {}
        for m, h in self.root_left_factor(g).items():
            v = {}
            for t, c in h.items():
                axpy(v, c, self.mul(t, rest))
            if v:
                out[m] = v
        self._lf[key] = out
        return out

    def rev(self, key) -> dict:
        res = self._rev.get(key)
        if res is not None:
            return res
        g = self._first(key)
        if g is None:
            return {key: ONE}
        rest = self._dec(key, g)
        res = _dmul(self, self.rev(rest), self._rev_of_root(g))
        self._rev[key] = res
        return res

    def _rev_of_root(self, k: int) -> dict:
        res = self._rev_root.get(k)
        if res is not None:
            return res
        res = {}
        for m, g in self.root_left_factor(k).items():
            for t, c in g.items():
                axpy(res, c, _dmul(self, self.rev(t), {self.gen(m): ONE}))
        self._rev_root[k] = res
        return res

    def to_words(self, key) -> dict:
        """Expansion in the word model (for cross-checks)."""
        wh = self.word_half
        cur = {(): ONE}
        for k, a in enumerate(key):
            for _ in range(a):
                cur = _dmul(wh, cur, self.root_words[k])
        return cur

    def divided_scale(self, key) -> Scalar:
        """prod_k [a_k]_{beta_k}!, so x^key = scale * (divided monomial)."""
        s = ONE
        for k, a in enumerate(key):
            if a > 1:
                s = s * q_factorial(a, self.root_eps[k])
        return s

    def key_str(self, key, letter: str) -> str:
        parts = []
        for k, a in enumerate(key):
            if a:
                b = "".join(str(x) for x in self.roots[k])
                parts.append(f"{letter}[{b}]" + (f"^{a}" if a > 1 else ""))
        return "*".join(parts)

    def key_json(self, key):
        return {"".join(str(x) for x in self.roots[k]): a for k, a in enumerate(key) if a}


# -- the algebra ---------------------------------------------------------------------

class UAlgebra:
    """The Drinfeld double (mode 'tilde') or the quantum group (mode 'U')."""

    def __init__(self, cartan: CartanDatum, half, mode: str = MODE_TILDE, height_cap: int | None = None):
        if mode not in (MODE_TILDE, MODE_U):
            raise ValueError(mode)
        self.cartan = cartan
        self.half = half
        self.mode = mode
        self.n = cartan.rank
        self.nk = 2 * self.n if mode == MODE_TILDE else self.n
        self.cf = half.cf
        self.height_cap = height_cap
        self.zero_k = (0,) * self.nk
        self._S = {}
        self._sibling = None
        self._qdiff = [q_pow(cartan.eps[i]) - q_pow(-cartan.eps[i]) for i in range(self.n)]
        self._qdiff_inv = [d.inverse() for d in self._qdiff]

    # -- K bookkeeping
    def kappa(self, kvec) -> tuple:
        """Root-lattice vector sum_i (k_i - k_i') alpha_i of a K-monomial."""
        n = self.n
        if self.mode == MODE_TILDE:
            return tuple(kvec[i] - kvec[n + i] for i in range(n))
        return tuple(kvec)

    def kdot(self, kvec, nu) -> int:
        """(kappa(kvec), nu)."""
        ka = self.kappa(kvec)
        return sum(ka[i] * self.cf.dot_simple(i, nu) for i in range(self.n) if ka[i])

    def k_unit(self, i: int, prime: bool = False, e: int = 1) -> tuple:
        k = [0] * self.nk
        if self.mode == MODE_TILDE:
            k[i + (self.n if prime else 0)] = e
        else:
            k[i] = -e if prime else e
        return tuple(k)

    # -- constructors
    def element(self, terms: dict) -> "UElement":
        return UElement(self, {t: c for t, c in terms.items() if not c.is_zero()})

    def zero(self):
        return UElement(self, {})

    def one(self):
        return self.scalar(ONE)

    def scalar(self, c):
        c = c if isinstance(c, Scalar) else Scalar(c)
        return UElement(self, {(self.half.unit, self.zero_k, self.half.unit): c} if not c.is_zero() else {})

    def E(self, i: int, a: int = 1, divided: bool = False):
        x = self.from_e({self.half.gen(i): ONE}) ** a if a != 1 else self.from_e({self.half.gen(i): ONE})
        if a == 0:
            return self.one()
        return x * q_factorial(a, self.cartan.eps[i]).inverse() if divided else x

    def F(self, i: int, a: int = 1, divided: bool = False):
        if a == 0:
            return self.one()
        g = self.from_f({self.half.gen(i): ONE})
        x = g ** a if a != 1 else g
        return x * q_factorial(a, self.cartan.eps[i]).inverse() if divided else x

    def K(self, i: int, e: int = 1):
        return UElement(self, {(self.half.unit, self.k_unit(i, False, e), self.half.unit): ONE})

    def Kp(self, i: int, e: int = 1):
        return UElement(self, {(self.half.unit, self.k_unit(i, True, e), self.half.unit): ONE})

    def Kvec(self, kvec):
        return UElement(self, {(self.half.unit, tuple(kvec), self.half.unit): ONE})

    def K_mu(self, mu, prime: bool = False):
        """K_mu (or K'_mu) for mu in the root lattice, K_mu = prod K_i^{mu_i}."""
        k = self.zero_k
        for i, a in enumerate(mu):
            if a:
                k = _add_w(k, self.k_unit(i, prime, a))
        return self.Kvec(k)

    def from_f(self, vec: dict):
        u, z = self.half.unit, self.zero_k
        return self.element({(f, z, u): c for f, c in vec.items()})

    def from_e(self, vec: dict):
        u, z = self.half.unit, self.zero_k
        return self.element({(u, z, e): c for e, c in vec.items()})

    def from_f_word(self, word):
        return self.from_f(self.half.from_word(word))

    def from_e_word(self, word):
        return self.from_e(self.half.from_word(word))

    # -- multiplication
    def _check_cap(self, nu):
        if self.height_cap is not None and sum(nu) > self.height_cap:
            raise ResourceCapError(f"weight {nu} exceeds height cap {self.height_cap}")

    def straighten(self, e, f) -> dict:
        """e * f rewritten as sum of f' K e'."""
        half = self.half
        if half.is_unit(e) or half.is_unit(f):
            return {(f, self.zero_k, e): ONE}
        ck = (e, f)
        res = self._S.get(ck)
        if res is not None:
            return res
        res = {}
        for j, g in half.left_factor(e).items():
            gen = half.gen(j)
            kj = self.k_unit(j, False)
            kpj = self.k_unit(j, True)
            cinv = self._qdiff_inv[j]
            for gk, gc in g.items():
                for (fp, kp, ep), c in self.straighten(gk, f).items():
                    cc = gc * c
                    # E_j fp = fp E_j + (K_j r'_j(fp) - r_j(fp) K'_j)/(q_j - q_j^-1)
                    s = q_pow(-self.kdot(kp, self.cf.simple[j]))
                    for ek, ec in half.mul(gen, ep).items():
                        add_into(res, (fp, kp, ek), cc * s * ec)
                    kpk = _add_w(kp, kj)
                    for y, yc in half.rp(j, fp).items():
                        s2 = q_pow(-self.cf.dot_simple(j, half.weight(y)))
                        add_into(res, (y, kpk, ep), cc * yc * s2 * cinv)
                    kpk2 = _add_w(kp, kpj)
                    for y, yc in half.r(j, fp).items():
                        add_into(res, (y, kpk2, ep), -(cc * yc * cinv))
        self._S[ck] = res
        return res

    def mul_terms(self, a: dict, b: dict) -> dict:
        half = self.half
        out = {}
        for (f1, k1, e1), c1 in a.items():
            for (f2, k2, e2), c2 in b.items():
                for (fp, kp, ep), c in self.straighten(e1, f2).items():
                    ex = -self.kdot(k1, half.weight(fp)) - self.kdot(k2, half.weight(ep))
                    coeff = c1 * c2 * c
                    if ex:
                        coeff = coeff * q_pow(ex)
                    k = _add_w(_add_w(k1, kp), k2)
                    fprod = half.mul(f1, fp)
                    eprod = half.mul(ep, e2)
                    for fk, fc in fprod.items():
                        for ek, ec in eprod.items():
                            add_into(out, (fk, k, ek), coeff * fc * ec)
        if self.height_cap is not None:
            for (f, _, e) in out:
                self._check_cap(half.weight(f))
                self._check_cap(half.weight(e))
        return out

    # -- structure maps
    def sibling_U(self) -> "UAlgebra":
        if self.mode == MODE_U:
            return self
        if self._sibling is None:
            self._sibling = UAlgebra(self.cartan, self.half, MODE_U, self.height_cap)
            self._sibling._sibling = self
        return self._sibling

    def sibling_tilde(self) -> "UAlgebra":
        if self.mode == MODE_TILDE:
            return self
        if self._sibling is None:
            self._sibling = UAlgebra(self.cartan, self.half, MODE_TILDE, self.height_cap)
            self._sibling._sibling = self
        return self._sibling

    def swap_k(self, kvec) -> tuple:
        if self.mode == MODE_TILDE:
            n = self.n
            return tuple(kvec[n:]) + tuple(kvec[:n])
        return tuple(-x for x in kvec)


class UElement:
    """Element of a UAlgebra in triangular normal form (immutable by convention)."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: UAlgebra, terms: dict):
        self.alg = alg
        self.terms = terms

    def _coerce(self, other):
        if isinstance(other, UElement):
            if other.alg is not self.alg:
                raise ValueError("elements of different algebras")
            return other
        if isinstance(other, (int, Scalar)):
            return self.alg.scalar(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        t = dict(self.terms)
        for k, c in other.terms.items():
            add_into(t, k, c)
        return UElement(self.alg, t)

    __radd__ = __add__

    def __neg__(self):
        return UElement(self.alg, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
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
                return UElement(self.alg, {})
            return UElement(self.alg, {k: c * other for k, c in self.terms.items()})
        if isinstance(other, UElement):
            if other.alg is not self.alg:
                raise ValueError("elements of different algebras")
            return UElement(self.alg, self.alg.mul_terms(self.terms, other.terms))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        r = self.alg.one()
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = self.alg.scalar(other)
        if not isinstance(other, UElement):
            return NotImplemented
        return self.alg is other.alg and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # -- gradings
    def weight_components(self) -> dict:
        """Split by weight nu_f - nu_e (so deg F_i = alpha_i, deg E_i = -alpha_i)."""
        h = self.alg.half
        out = {}
        for (f, k, e), c in self.terms.items():
            w = _sub_w(h.weight(f), h.weight(e))
            out.setdefault(w, {})[(f, k, e)] = c
        return {w: UElement(self.alg, t) for w, t in out.items()}

    def is_homogeneous(self) -> bool:
        return len(self.weight_components()) <= 1

    def f_part_heights(self):
        h = self.alg.half
        return {sum(h.weight(f)) for (f, _, _) in self.terms}

    def filter_terms(self, pred):
        return UElement(self.alg, {t: c for t, c in self.terms.items() if pred(t)})

    def in_plus(self) -> bool:
        h = self.alg.half
        return all(not any(h.weight(f)) and not any(k) for (f, k, _) in self.terms)

    def in_minus(self) -> bool:
        h = self.alg.half
        return all(not any(h.weight(e)) and not any(k) for (_, k, e) in self.terms)

    def e_vector(self) -> dict:
        if not self.in_plus():
            raise ValueError("element is not in the positive part")
        return {e: c for (_, _, e), c in self.terms.items()}

    def f_vector(self) -> dict:
        if not self.in_minus():
            raise ValueError("element is not in the negative part")
        return {f: c for (f, _, _), c in self.terms.items()}

    # -- display / serialization
    def _k_str(self, k):
        alg = self.alg
        parts = []
        n = alg.n
        for i in range(alg.nk):
            if k[i]:
                name = f"K{i % n + 1}" + ("'" if (alg.mode == MODE_TILDE and i >= n) else "")
                parts.append(name + (f"^{k[i]}" if k[i] != 1 else ""))
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        h = self.alg.half
        out = []
        for (f, k, e), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
            mono = "*".join(p for p in (h.key_str(f, "F"), self._k_str(k), h.key_str(e, "E")) if p)
            out.append(f"({format_scalar(c)})" + (f"*{mono}" if mono else ""))
        return " + ".join(out)

    __repr__ = __str__

    def to_json(self) -> list:
        h = self.alg.half
        n = self.alg.n
        out = []
        for (f, k, e), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
            kmap = {}
            for i in range(self.alg.nk):
                if k[i]:
                    name = f"K{i % n + 1}" + ("'" if (self.alg.mode == MODE_TILDE and i >= n) else "")
                    kmap[name] = k[i]
            out.append({"f": h.key_json(f), "k": kmap, "e": h.key_json(e), "c": format_scalar(c)})
        return out


# -- operations --------------------------------------------------------------------

def multiply(a: UElement, b: UElement) -> UElement:
    return a * b


def sigma(x: UElement) -> UElement:
    """Anti-involution fixing E_i, F_i and swapping K_i and K_i'."""
    alg = x.alg
    h = alg.half
    out = alg.zero()
    for (f, k, e), c in x.terms.items():
        left = alg.from_e(h.rev(e))
        mid = alg.Kvec(alg.swap_k(k))
        right = alg.from_f(h.rev(f))
        out = out + (left * mid * right) * c
    return out


def project_pi(x: UElement) -> UElement:
    """Canonical map to the quantum group: K_i' -> K_i^{-1}."""
    alg = x.alg
    if alg.mode == MODE_U:
        return x
    u = alg.sibling_U()
    n = alg.n
    t = {}
    for (f, k, e), c in x.terms.items():
        add_into(t, (f, tuple(k[i] - k[n + i] for i in range(n)), e), c)
    return UElement(u, t)


def skew_derivation_r(i: int, x: UElement, prime: bool = False) -> UElement:
    """r_i (or r'_i) on the positive part."""
    alg = x.alg
    if not x.in_plus():
        raise ValueError("skew derivation needs an element of the positive part")
    out = {}
    for (_, _, e), c in x.terms.items():
        axpy(out, c, (alg.half.rp if prime else alg.half.r)(i, e))
    return alg.from_e(out)


def weight_space_basis(alg: UAlgebra, mu, sign: int = 1) -> list:
    """Basis of the positive (sign=+1) or negative part at weight mu."""
    mu = tuple(mu)
    keys = alg.half.basis(mu)
    return [alg.from_e({k: ONE}) if sign > 0 else alg.from_f({k: ONE}) for k in keys]


def kostant_partition_count(cartan: CartanDatum, mu) -> int:
    """Number of ways to write mu as an unordered sum of positive roots."""
    roots = cartan.positive_roots

    @lru_cache(maxsize=None)
    def count(rem, idx):
        if not any(rem):
            return 1
        if idx == len(roots):
            return 0
        b = roots[idx]
        tot = 0
        r = rem
        while all(x >= 0 for x in r):
            tot += count(r, idx + 1)
            r = tuple(x - y for x, y in zip(r, b))
        return tot

    return count(tuple(mu), 0)


def weights_up_to_height(n: int, h: int):
    """All nonnegative weights of height 1..h in rank n."""
    out = []
    for tot in range(1, h + 1):
        for c in itertools.combinations_with_replacement(range(n), tot):
            w = [0] * n
            for a in c:
                w[a] += 1
            out.append(tuple(w))
    return out


def generator_images(alg: UAlgebra) -> dict:
    """The identity assignment on generators, keyed as relation_residuals expects."""
    out = {}
    for i in range(alg.n):
        out[("E", i)] = alg.E(i)
        out[("F", i)] = alg.F(i)
        out[("K", i)] = alg.K(i)
        out[("K-", i)] = alg.K(i, -1)
        if alg.mode == MODE_TILDE:
            out[("Kp", i)] = alg.Kp(i)
            out[("Kp-", i)] = alg.Kp(i, -1)
    return out


def _serre(images, kind, i, j, c) -> UElement:
    r = 1 - c.matrix[i][j]
    eps = c.eps[i]
    x, y = images[(kind, i)], images[(kind, j)]
    res = None
    for s in range(r + 1):
        term = (x ** s) * y * (x ** (r - s)) * (q_factorial(s, eps) * q_factorial(r - s, eps)).inverse()
        term = -term if s % 2 else term
        res = term if res is None else res + term
    return res


def relation_residuals(alg: UAlgebra, images: dict) -> dict:
    """Evaluate every defining relation on the given generator images.

    Returns {relation name: residual}; an algebra map has all residuals zero.
    """
    c = alg.cartan
    n = alg.n
    out = {}
    ks = [("K", i) for i in range(n)] + [("K-", i) for i in range(n)]
    if alg.mode == MODE_TILDE:
        ks += [("Kp", i) for i in range(n)] + [("Kp-", i) for i in range(n)]
    for i in range(n):
        out[f"K{i+1}*K{i+1}^-1"] = images[("K", i)] * images[("K-", i)] - 1
        if alg.mode == MODE_TILDE:
            out[f"K{i+1}'*K{i+1}'^-1"] = images[("Kp", i)] * images[("Kp-", i)] - 1
    for a in ks:
        for b in ks:
            if a < b:
                out[f"[{a[0]}{a[1]+1},{b[0]}{b[1]+1}]"] = images[a] * images[b] - images[b] * images[a]
    for i in range(n):
        for j in range(n):
            d = c.eps[i] * c.matrix[i][j]
            Ki, Ej, Fj = images[("K", i)], images[("E", j)], images[("F", j)]
            out[f"K{i+1}E{j+1}"] = Ki * Ej - Ej * Ki * q_pow(d)
            out[f"K{i+1}F{j+1}"] = Ki * Fj - Fj * Ki * q_pow(-d)
            if alg.mode == MODE_TILDE:
                Kpi = images[("Kp", i)]
                out[f"K{i+1}'E{j+1}"] = Kpi * Ej - Ej * Kpi * q_pow(-d)
                out[f"K{i+1}'F{j+1}"] = Kpi * Fj - Fj * Kpi * q_pow(d)
            comm = images[("E", i)] * Fj - Fj * images[("E", i)]
            if i == j:
                other = images[("Kp", i)] if alg.mode == MODE_TILDE else images[("K-", i)]
                qd = q_pow(c.eps[i]) - q_pow(-c.eps[i])
                comm = comm - (Ki - other) * qd.inverse()
            out[f"[E{i+1},F{j+1}]"] = comm
            if i != j:
                out[f"serreE{i+1}{j+1}"] = _serre(images, "E", i, j, c)
                out[f"serreF{i+1}{j+1}"] = _serre(images, "F", i, j, c)
    return out
