"""Relative braid group symmetries of the universal iquantum group and root vectors B_beta.

For a black node j the symmetry is Lusztig's T_j, which preserves the
iquantum group; on B_i it is given by an explicit sum of divided powers of F_j.
For a white representative i the inverse symmetry is conjugation

    T_i^{-1}(x) = Y_i * Tr_{bs_i}^{-1}(x) * Y_i^{-1}

by the rank one quasi K-matrix Y_i, where Tr is the braid symmetry rescaled by
the distinguished parameters.  Y_i is an infinite series; it is truncated at a
height cutoff that is raised until the result stops changing.  Images of
generators are lifted back to tracked expressions and cached, so applying a
symmetry to an expression is a substitution.
"""
from __future__ import annotations

import json

from .braid import lusztig_apply, rescaled_apply_word, root_vector_F
from .iqg import IElement, IQuantumGroup, LeadingTermError
from .kmatrix import diamond_sqrts, solve_rank1_quasiK, truncated_inverse
from .rootdata import SatakeDatum
from .scalars import q_factorial, q_int, q_pow
from .utilde import UElement


class StabilizationError(ArithmeticError):
    """The truncated conjugation did not stabilize below the cutoff cap."""

    def __init__(self, message, previous=None, last=None):
        super().__init__(message)
        self.previous = previous
        self.last = last
        self.roots = []


class RootNotFound(KeyError):
    pass


DEFAULT_LADDER = {"start": 2, "step": 2, "cap": 14}


def qbracket(x: IElement, y: IElement, a: int = 1) -> IElement:
    """[x, y]_{q^a} = x y - q^a y x."""
    return x * y - (y * x) * q_pow(a)


# -- the braid group action on tracked expressions -------------------------------------

class RelativeBraid:
    """T_j (j black) and the relative symmetries T_i (i a white representative) on one iquantum group."""

    def __init__(self, iq: IQuantumGroup, ladder: dict | None = None):
        self.iq = iq
        self.sd = iq.sd
        self.ladder = dict(DEFAULT_LADDER, **(ladder or {}))
        self.sqrt = diamond_sqrts(self.sd)
        self._images = {}
        self._quasiK = {}
        self.stats = {}

    # black nodes
    def _black_B_image(self, j: int, e: int, i: int) -> IElement:
        iq = self.iq
        c = self.sd.cartan
        # the acting node is j, so the exponent is -c_{ji} in the row convention
        r = -c.matrix[j][i]
        eps = c.eps[j]
        out = iq.zero()
        for s in range(r + 1):
            coef = q_pow(s * eps) * (q_factorial(s, eps) * q_factorial(r - s, eps)).inverse()
            if s % 2:
                coef = -coef
            left, right = (s, r - s) if e == 1 else (r - s, s)
            out = out + (iq.F(j) ** left * iq.B(i) * iq.F(j) ** right) * coef
        return out

    def _black_image(self, j: int, e: int, letter) -> IElement:
        kind, i, _ = letter
        if kind == "B":
            return self._black_B_image(j, e, i)
        return self.iq.lift(lusztig_apply(j, e, self.iq.letter_value(letter)))

    # white nodes
    def quasiK(self, i: int, cutoff: int):
        K = self._quasiK.get(i)
        if K is None or K.cutoff < cutoff:
            K = solve_rank1_quasiK(self.sd, i, None, cutoff, self.iq.alg)
            self._quasiK[i] = K
        return K

    def _height(self, term) -> int:
        h = self.iq.alg.half
        f, _, e = term
        return sum(h.weight(e)) - sum(h.weight(f))

    def conjugate(self, i: int, y: UElement, cutoff: int) -> UElement:
        """Y_i y Y_i^{-1}, exact in every height reachable with components of height <= cutoff."""
        if y.is_zero():
            return y
        m = min(self._height(t) for t in y.terms)
        bound = m + cutoff
        Y = self.quasiK(i, cutoff).truncated(cutoff)
        Yinv = truncated_inverse(Y, cutoff)
        z = (Y * y).filter_terms(lambda t: self._height(t) <= bound)
        return (z * Yinv).filter_terms(lambda t: self._height(t) <= bound)

    def inverse_value(self, i: int, x: UElement, accept=None):
        """T_i^{-1} on a value of the iquantum group, with the cutoff ladder.

        ``accept`` post-processes a stable result and raises LeadingTermError
        when the result is not in the iquantum group (a premature plateau); the
        ladder then keeps climbing.
        """
        if i not in self.sd.white_reps:
            raise ValueError(f"node {i + 1} is not a white representative")
        y = rescaled_apply_word(self.sd.bs_words[i], x, self.sqrt, e=-1)
        D = self.ladder["start"]
        prev, last = None, self.conjugate(i, y, D)
        while True:
            D += self.ladder["step"]
            if D > self.ladder["cap"]:
                raise StabilizationError(
                    f"conjugation at node {i + 1} did not stabilize up to cutoff {self.ladder['cap']}",
                    prev, last)
            prev, last = last, self.conjugate(i, y, D)
            if last != prev:
                continue
            try:
                out = last if accept is None else accept(last)
            except LeadingTermError:
                continue
            self.stats[i] = max(self.stats.get(i, 0), D)
            return out

    def _white_image(self, i: int, e: int, letter) -> IElement:
        iq = self.iq
        if e == -1:
            return self.inverse_value(i, iq.letter_value(letter), accept=iq.lift)
        # T_i = sigma^imath T_i^{-1} sigma^imath
        s = iq._sigma_letter(letter)
        return iq.sigma_imath(self._white_image(i, -1, s))

    # dispatch
    def letter_image(self, i: int, e: int, letter) -> IElement:
        key = (i, e, letter)
        img = self._images.get(key)
        if img is None:
            if self.sd.is_black(i):
                img = self._black_image(i, e, letter)
            else:
                img = self._white_image(i, e, letter)
            self._images[key] = img
        return img

    def apply(self, i: int, e: int, x: IElement) -> IElement:
        """T_i^{e}(x) for a black node or a white representative i."""
        if e not in (1, -1):
            raise ValueError("e must be +1 or -1")
        if not self.sd.is_black(i) and i not in self.sd.white_reps:
            raise ValueError(f"node {i + 1} is not a white representative")
        iq = self.iq
        out = iq.zero()
        for w, c in x.expr.items():
            y = iq.one()
            for l in w:
                y = y * self.letter_image(i, e, l)
            out = out + y * c
        # substitution inflates expressions; the canonical lift is much shorter
        return iq.lift(out.value)

    def apply_word(self, word, x: IElement, e: int = 1) -> IElement:
        """T_{i_1} ... T_{i_k}(x) for e = 1, and (T_{i_1} ... T_{i_k})^{-1}(x) for e = -1."""
        letters = reversed(tuple(word)) if e == 1 else tuple(word)
        for i in letters:
            x = self.apply(i, e, x)
        return x


_BRAIDS = {}


def relative_braid(iq: IQuantumGroup, ladder: dict | None = None) -> RelativeBraid:
    key = (id(iq), json.dumps(ladder or {}, sort_keys=True))
    rb = _BRAIDS.get(key)
    if rb is None or rb.iq is not iq:
        rb = RelativeBraid(iq, ladder)
        _BRAIDS[key] = rb
    return rb


def rel_braid_apply(iq: IQuantumGroup, i: int, e: int, x: IElement, ladder: dict | None = None) -> IElement:
    return relative_braid(iq, ladder).apply(i, e, x)


def black_partner(sd: SatakeDatum, i: int, j: int) -> int:
    """The black node k with T_j^{-1} T_i^{-1} = T_i^{-1} T_k^{-1}: the rank one
    diagram involution at i (from its longest element) applied to tau(j)."""
    c = sd.cartan
    w = c.longest_word({i, sd.tau[i]} | set(sd.black))
    img = c.apply_word(w, c.simple(sd.tau[j]))
    k = [a for a, x in enumerate(img) if x]
    if len(k) != 1 or img[k[0]] != -1:
        raise ValueError(f"node {j + 1} is not in the rank one subdiagram of node {i + 1}")
    return k[0]


def check_compTT(rb: RelativeBraid, i: int, x: IElement, cutoff: int) -> bool:
    """T_i^{-1}(x) Y_i = Y_i Tr_{bs_i}^{-1}(x) in all heights fixed by the cutoff."""
    lhs_x = rb.apply(i, -1, x).value
    y = rescaled_apply_word(rb.sd.bs_words[i], x.value, rb.sqrt, e=-1)
    Y = rb.quasiK(i, cutoff).truncated(cutoff)
    diff = lhs_x * Y - Y * y
    ms = [rb._height(t) for t in list(lhs_x.terms) + list(y.terms)]
    bound = min(ms) + cutoff if ms else 0
    return all(c.is_zero() or rb._height(t) > bound for t, c in diff.terms.items())


# -- rank one root vectors ------------------------------------------------------------

def _rank_one_formulas(fam, B, F, tinv, eps):
    """The list B_{beta_1}, ..., B_{beta_r} in the order of the family's reduced word.

    B(a), F(a), eps(a) take 1-based template labels; tinv(labels, x) is T_{labels}^{-1}(x).
    """
    name, n = fam.name, fam.rank_param
    inv2 = q_int(2).inverse()

    def double(a, x):
        return qbracket(qbracket(F(a), x, 2), x, 0) * inv2

    if name == "AI1":
        return [B(1)]
    if name == "AII3":
        return [B(2), tinv([1], B(2)), tinv([3], B(2)), tinv([1, 3], B(2))]
    if name == "AIII11":
        return [B(1), B(2)]
    if name == "AIV":
        out = [tinv(range(2, k + 1), B(1)) for k in range(1, n)]
        out.append(qbracket(B(n), tinv(range(2, n), B(1))))
        out += [tinv(range(n - 1, n - k, -1), B(n)) for k in range(1, n)]
        return out
    if name == "BII":
        out = [tinv(range(2, k + 1), B(1)) for k in range(1, n)]
        # the bracket parameter is q_{n-1}, the long root's q
        out.append(qbracket(F(n), out[-1], eps(n - 1)))
        out += [tinv(list(range(2, n + 1)) + list(range(n - 1, n - k, -1)), B(1)) for k in range(1, n)]
        return out
    if name == "CII":
        out = [tinv(range(3, k + 2), B(2)) for k in range(1, n - 1)]
        out.append(double(n, out[n - 3]))
        out += [tinv(list(range(3, n + 1)) + list(range(n - 1, n - k - 1, -1)), B(2)) for k in range(n - 2)]
        out.append(qbracket(tinv([1], B(2)), out[2 * n - 4]))
        out += [tinv([1] + list(range(3, k + 3)), B(2)) for k in range(n - 2)]
        # the inner root vector has weight alpha_1 + ... + alpha_{n-1}, i.e. beta_{3n-4}
        out.append(double(n, out[-1]))
        out += [tinv([1] + list(range(3, n + 1)) + list(range(n - 1, n - k - 1, -1)), B(2)) for k in range(n - 2)]
        return out
    if name == "DII":
        out = [tinv(range(2, k + 1), B(1)) for k in range(1, n)]
        out.append(tinv(list(range(2, n - 1)) + [n], B(1)))
        out.append(tinv(range(2, n + 1), B(1)))
        out += [tinv(list(range(2, n + 1)) + list(range(n - 2, n - k - 1, -1)), B(1)) for k in range(2, n - 1)]
        return out
    if name == "FII":
        b = {}
        b[1] = B(4)
        b[2] = tinv([3], B(4))
        b[3] = double(2, b[2])
        b[4] = tinv([3, 2], B(4))
        b[5] = qbracket(F(1), b[3])
        b[6] = qbracket(F(2), b[5])
        b[7] = tinv([3, 2, 1], B(4))
        b[9] = tinv([3, 2, 3], B(4))
        b[8] = qbracket(b[9], b[7])
        b[10] = double(1, b[9])
        b[11] = tinv([3, 2, 1, 3], B(4))
        b[12] = qbracket(F(2), b[10])
        b[13] = qbracket(F(1), b[12])
        b[14] = tinv([3, 2, 3, 1, 2], B(4))
        b[15] = tinv([3, 2, 3, 1, 2, 3], B(4))
        return [b[k] for k in range(1, 16)]
    raise ValueError(f"no rank one formulas for family {fam.key}")


def rank_one_table(rb: RelativeBraid, i: int) -> list:
    """[(beta, B_beta)] over the inversion set of bs_i, for a white representative i."""
    sd = rb.sd
    fam = sd.families.get(i)
    if fam is None:
        raise ValueError(f"the rank one subdiagram at node {i + 1} is not a table family")
    f, mapping = fam
    iq = rb.iq

    def node(a):
        return mapping[a - 1]

    def tinv(labels, x):
        return rb.apply_word([node(a) for a in labels], x, e=-1)

    vecs = _rank_one_formulas(f, lambda a: iq.B(node(a)), lambda a: iq.F(node(a)), tinv,
                              lambda a: sd.cartan.eps[node(a)])
    roots = sd.cartan.inversion_set(sd.bs_words[i])
    if len(vecs) != len(roots):
        raise AssertionError(f"family {f.key}: {len(vecs)} formulas for {len(roots)} roots")
    return list(zip(roots, vecs))


def rank1_root_vector(rb: RelativeBraid, i: int, beta) -> IElement:
    """B_beta for beta in the inversion set of bs_i."""
    for b, x in rank_one_table(rb, i):
        if b == tuple(beta):
            return x
    raise RootNotFound(f"{list(beta)} is not an inversion of the relative reflection at node {i + 1}")


# -- root vectors along the relative longest word -----------------------------------------

class RootVectorTable:
    """B_beta = T_{i_1} ... T_{i_{j-1}}(B_{beta_0}) for every beta in the relative inversion set."""

    def __init__(self, sd: SatakeDatum, iq: IQuantumGroup | None = None, ladder: dict | None = None):
        self.sd = sd
        self.iq = iq if iq is not None else IQuantumGroup(sd)
        self.rb = relative_braid(self.iq, ladder)
        self.relative_word = tuple(sd.w0_relative)
        self.entries = []
        prefix = ()
        pos = 0
        for j, i in enumerate(self.relative_word):
            full = tuple(a for r in prefix for a in sd.bs_words[r])
            try:
                rank_one = rank_one_table(self.rb, i)
            except StabilizationError as err:
                err.roots = [sd.cartan.apply_word(full, b) for b in sd.cartan.inversion_set(sd.bs_words[i])]
                raise
            for beta0, x in rank_one:
                beta = sd.cartan.apply_word(full, beta0)
                try:
                    y = self.rb.apply_word(prefix, x, e=1)
                except StabilizationError as err:
                    err.roots = [beta]
                    raise
                self.entries.append({"beta": beta, "position": j, "beta0": beta0,
                                     "index": pos, "element": y})
                pos += 1
            prefix = prefix + (i,)
        self._by_root = {e["beta"]: e for e in self.entries}

    @property
    def roots(self) -> list:
        return [e["beta"] for e in self.entries]

    def element(self, beta) -> IElement:
        try:
            return self._by_root[tuple(beta)]["element"]
        except KeyError:
            raise RootNotFound(f"{list(beta)} is not in the relative inversion set") from None

    def F_root(self, beta) -> UElement:
        """F_beta from the braid group action along the ambient reduced word."""
        e = self._by_root.get(tuple(beta))
        if e is None:
            raise RootNotFound(f"{list(beta)} is not in the relative inversion set")
        return root_vector_F(self.iq.alg, self.sd.w0_word, e["index"])

    def check_leading_terms(self) -> list:
        """Roots whose B_beta does not have leading term F_beta (empty when all pass)."""
        bad = []
        for e in self.entries:
            try:
                d, top = self.iq.leading_term(e["element"])
            except LeadingTermError:
                bad.append(e["beta"])
                continue
            if d != self.iq.white_height(e["beta"]) or top != self.F_root(e["beta"]):
                bad.append(e["beta"])
        return bad

    def to_json(self) -> dict:
        out = {}
        for e in self.entries:
            key = ",".join(str(a) for a in e["beta"])
            out[key] = {
                "position": e["position"] + 1,
                "relative_node": self.relative_word[e["position"]] + 1,
                "beta0": list(e["beta0"]),
                "expression": e["element"].to_sexpr(),
            }
        return {
            "satake": self.sd.name,
            "relative_word": [i + 1 for i in self.relative_word],
            "w0_word": [i + 1 for i in self.sd.w0_word],
            "root_vectors": out,
        }


def root_vector_B(table: RootVectorTable, beta) -> IElement:
    return table.element(beta)
