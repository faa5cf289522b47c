"""Cartan data, Weyl group combinatorics and Satake diagrams.

Indices are 0-based internally.  Roots are tuples of coefficients over the
simple roots; weights in X are tuples (<h_1, lam>, ..., <h_n, lam>).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

class ReducedWordError(ValueError):
    pass


def _positive_definite(m) -> bool:
    """Exact test via Gaussian elimination without pivoting (all pivots > 0)."""
    m = [row[:] for row in m]
    n = len(m)
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for r in range(k + 1, n):
            f = m[r][k] / m[k][k]
            for c in range(k, n):
                m[r][c] -= f * m[k][c]
    return True


def _cartan_simple(kind: str, n: int) -> tuple[list[list[int]], list[int]]:
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    eps = [1] * n
    if kind in "ABCD":
        for i in range(n - 1):
            C[i][i + 1] = C[i + 1][i] = -1
    if kind == "A":
        if n < 1:
            raise ValueError("A_n needs n >= 1")
    elif kind == "B":
        if n < 2:
            raise ValueError("B_n needs n >= 2")
        # alpha_n short
        C[n - 1][n - 2] = -2
        eps = [2] * (n - 1) + [1]
    elif kind == "C":
        if n < 2:
            raise ValueError("C_n needs n >= 2")
        # alpha_n long
        C[n - 2][n - 1] = -2
        eps = [1] * (n - 1) + [2]
    elif kind == "D":
        if n < 4:
            raise ValueError("D_n needs n >= 4")
        C[n - 2][n - 1] = C[n - 1][n - 2] = 0
        C[n - 3][n - 1] = C[n - 1][n - 3] = -1
    elif kind == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_n needs n in 6, 7, 8")
        # Bourbaki: 1-3-4-5-6-..., 2 attached to 4
        edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]
        for a, b in edges:
            C[a][b] = C[b][a] = -1
    elif kind == "F":
        if n != 4:
            raise ValueError("F_4 only")
        for a, b in [(0, 1), (1, 2), (2, 3)]:
            C[a][b] = C[b][a] = -1
        C[2][1] = -2  # <h_3, alpha_2> = -2: alpha_3 short
        eps = [2, 2, 1, 1]
    elif kind == "G":
        if n != 2:
            raise ValueError("G_2 only")
        # alpha_1 short
        C[0][1] = -3
        C[1][0] = -1
        eps = [1, 3]
    else:
        raise ValueError(f"unknown Cartan type {kind}")
    return C, eps


@dataclass(frozen=True)
class CartanDatum:
    """Finite type Cartan datum with c_ij = <h_i, alpha_j> and D C symmetric."""

    label: str
    matrix: tuple
    eps: tuple

    def __post_init__(self):
        n = self.rank
        C, e = self.matrix, self.eps
        for i in range(n):
            if C[i][i] != 2:
                raise ValueError("c_ii must be 2")
            for j in range(n):
                if i != j and C[i][j] > 0:
                    raise ValueError("off-diagonal entries must be <= 0")
                if e[i] * C[i][j] != e[j] * C[j][i]:
                    raise ValueError("DC is not symmetric")
        sym = [[Fraction(e[i] * C[i][j]) for j in range(n)] for i in range(n)]
        if not _positive_definite(sym):
            raise ValueError("not of finite type")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def pair(self, i: int, beta) -> int:
        """<h_i, beta> for beta in the root lattice."""
        row = self.matrix[i]
        return sum(row[j] * beta[j] for j in range(self.rank))

    def form(self, a, b) -> int:
        """Symmetric form (a, b) on the root lattice with (alpha_i, alpha_j) = eps_i c_ij."""
        n = self.rank
        return sum(a[i] * self.eps[i] * self.matrix[i][j] * b[j]
                   for i in range(n) if a[i] for j in range(n) if b[j])

    def simple(self, i: int) -> tuple:
        return tuple(1 if k == i else 0 for k in range(self.rank))

    def reflect(self, i: int, beta) -> tuple:
        c = self.pair(i, beta)
        if c == 0:
            return tuple(beta)
        b = list(beta)
        b[i] -= c
        return tuple(b)

    def reflect_weight(self, i: int, lam) -> tuple:
        """s_i on X, weights written as (<h_j, lam>)_j."""
        c = lam[i]
        if c == 0:
            return tuple(lam)
        return tuple(lam[j] - c * self.matrix[j][i] for j in range(self.rank))

    def root_to_weight(self, beta) -> tuple:
        return tuple(self.pair(j, beta) for j in range(self.rank))

    @cached_property
    def positive_roots(self) -> tuple:
        n = self.rank
        seen = {self.simple(i) for i in range(n)}
        frontier = list(seen)
        while frontier:
            new = []
            for b in frontier:
                for i in range(n):
                    c = self.reflect(i, b)
                    if all(x >= 0 for x in c) and c not in seen:
                        seen.add(c)
                        new.append(c)
            frontier = new
        return tuple(sorted(seen, key=lambda r: (sum(r), tuple(-x for x in r))))

    def is_positive(self, beta) -> bool:
        return all(x >= 0 for x in beta) and any(beta)

    def height(self, beta) -> int:
        return sum(beta)

    def root_eps(self, beta) -> int:
        """(beta, beta)/2, so q_beta = q^{root_eps}."""
        return self.form(beta, beta) // 2

    # -- Weyl group words ----------------------------------------------
    def apply_word(self, word, beta) -> tuple:
        """s_{w_1} ... s_{w_k}(beta)."""
        for i in reversed(word):
            beta = self.reflect(i, beta)
        return tuple(beta)

    def apply_word_weight(self, word, lam) -> tuple:
        for i in reversed(word):
            lam = self.reflect_weight(i, lam)
        return tuple(lam)

    def inversion_set(self, word) -> list:
        """beta_k = s_{i_1}...s_{i_{k-1}}(alpha_{i_k}); raises if word not reduced."""
        out = []
        for k, i in enumerate(word):
            b = self.apply_word(word[:k], self.simple(i))
            if not self.is_positive(b):
                raise ReducedWordError(f"word {list(word)} is not reduced")
            out.append(b)
        return out

    def is_reduced(self, word) -> bool:
        try:
            self.inversion_set(word)
            return True
        except ReducedWordError:
            return False

    def matrix_of(self, word) -> tuple:
        """Action matrix on the root lattice (columns are images of simple roots)."""
        cols = [self.apply_word(word, self.simple(i)) for i in range(self.rank)]
        return tuple(tuple(cols[j][i] for j in range(self.rank)) for i in range(self.rank))

    def length(self, word) -> int:
        m = self.matrix_of(word)
        return sum(1 for b in self.positive_roots if not self.is_positive(_matvec(m, b)))

    def reduced_word(self, mat) -> tuple:
        """Reduced word of the element with action matrix mat (right descents)."""
        word = []
        m = [list(r) for r in mat]
        n = self.rank
        while True:
            for i in range(n):
                col = tuple(m[r][i] for r in range(n))
                if not self.is_positive(col):
                    break
            else:
                break
            # m <- m s_i
            word.append(i)
            si = self.matrix_of((i,))
            m = [[sum(m[r][k] * si[k][c] for k in range(n)) for c in range(n)] for r in range(n)]
        return tuple(reversed(word))

    def longest_word(self, subset) -> tuple:
        """Reduced word of the longest element of the parabolic subgroup W_J."""
        J = sorted(subset)
        word = []
        while True:
            for j in J:
                if self.is_positive(self.apply_word(word, self.simple(j))):
                    word.append(j)
                    break
            else:
                return tuple(word)

    @cached_property
    def longest(self) -> tuple:
        return self.longest_word(range(self.rank))


def _matvec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


_LABEL = re.compile(r"([A-G])(\d+)")


def cartan(label: str) -> CartanDatum:
    """Cartan datum from a label such as 'A3', 'B2', 'G2' or 'A1xA1'."""
    parts = label.replace("×", "x").split("x")
    blocks = []
    for p in parts:
        m = _LABEL.fullmatch(p.strip())
        if not m:
            raise ValueError(f"bad Cartan label {label!r}")
        blocks.append(_cartan_simple(m.group(1), int(m.group(2))))
    n = sum(len(c) for c, _ in blocks)
    C = [[0] * n for _ in range(n)]
    eps = []
    off = 0
    for c, e in blocks:
        k = len(c)
        for i in range(k):
            for j in range(k):
                C[off + i][off + j] = c[i][j]
        eps.extend(e)
        off += k
    return CartanDatum(label, tuple(tuple(r) for r in C), tuple(eps))


# -- Satake diagrams ---------------------------------------------------------

class SatakeError(ValueError):
    """Violated admissibility condition; ``condition`` is 1, 2 or 3 (0: malformed)."""

    def __init__(self, condition: int, message: str):
        super().__init__(f"condition ({condition}): {message}")
        self.condition = condition


@dataclass(frozen=True)
class RankOneFamily:
    name: str
    cartan_label: str
    black: tuple        # 0-based
    tau: tuple          # permutation, 0-based
    white: int          # distinguished white node
    word: tuple         # reduced word of bs_white, 0-based
    rank_param: int     # the n of the family (0 if fixed)

    @property
    def key(self) -> str:
        if self.name in ("AI1", "AII3", "AIII11", "FII"):
            return self.name
        return f"{self.name}{self.rank_param}"


def _family_AI1():
    return RankOneFamily("AI1", "A1", (), (0,), 0, (0,), 1)


def _family_AII3():
    return RankOneFamily("AII3", "A3", (0, 2), (0, 1, 2), 1, (1, 0, 2, 1), 3)


def _family_AIII11():
    return RankOneFamily("AIII11", "A1xA1", (), (1, 0), 0, (0, 1), 1)


def _family_AIV(n):
    word = tuple(range(n)) + tuple(range(n - 2, -1, -1))
    return RankOneFamily("AIV", f"A{n}", tuple(range(1, n - 1)),
                         tuple(n - 1 - k for k in range(n)), 0, word, n)


def _family_BII(n):
    word = tuple(range(n)) + tuple(range(n - 2, -1, -1))
    return RankOneFamily("BII", f"B{n}", tuple(range(1, n)), tuple(range(n)), 0, word, n)


def _family_CII(n):
    up = tuple(range(1, n)) + tuple(range(n - 2, 0, -1))   # 2..n..2
    word = up + (0,) + up
    return RankOneFamily("CII", f"C{n}", (0,) + tuple(range(2, n)), tuple(range(n)), 1, word, n)


def _family_DII(n):
    word = tuple(range(n - 2)) + (n - 2, n - 1) + tuple(range(n - 3, -1, -1))
    tau = list(range(n))
    if n % 2 == 0:
        # black part D_{n-1} has odd rank, so -w_bullet swaps the two spin nodes
        tau[n - 2], tau[n - 1] = n - 1, n - 2
    return RankOneFamily("DII", f"D{n}", tuple(range(1, n)), tuple(tau), 0, word, n)


def _family_FII():
    word = tuple(int(c) - 1 for c in "432312343231234")
    return RankOneFamily("FII", "F4", (0, 1, 2), (0, 1, 2, 3), 3, word, 4)


def RANK_ONE_FAMILIES(max_rank: int = 6):
    fams = [_family_AI1(), _family_AII3(), _family_AIII11(), _family_FII()]
    fams += [_family_AIV(n) for n in range(2, max_rank + 1)]
    fams += [_family_BII(n) for n in range(2, max_rank + 1)]
    fams += [_family_CII(n) for n in range(3, max_rank + 1)]
    fams += [_family_DII(n) for n in range(4, max_rank + 1)]
    return fams


@dataclass
class SatakeDatum:
    cartan: CartanDatum
    black: frozenset
    tau: tuple
    name: str = ""
    # derived data, filled by validate_satake
    w_bullet: tuple = ()
    white_reps: tuple = ()
    bs_words: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    w0_relative: tuple = ()
    w0_word: tuple = ()

    @property
    def rank(self) -> int:
        return self.cartan.rank

    @property
    def white(self) -> tuple:
        return tuple(i for i in range(self.rank) if i not in self.black)

    def is_black(self, i) -> bool:
        return i in self.black

    def tau_root(self, beta) -> tuple:
        out = [0] * self.rank
        for i, c in enumerate(beta):
            out[self.tau[i]] += c
        return tuple(out)

    def theta(self, beta) -> tuple:
        """theta = -w_bullet o tau on the root lattice."""
        b = self.cartan.apply_word(self.w_bullet, self.tau_root(beta))
        return tuple(-x for x in b)

    def theta_weight(self, lam) -> tuple:
        lt = [0] * self.rank
        for i in range(self.rank):
            lt[self.tau[i]] = lam[i]
        b = self.cartan.apply_word_weight(self.w_bullet, tuple(lt))
        return tuple(-x for x in b)

    def theta_coweight(self, mu) -> tuple:
        """theta on Y, coweights written in the basis h_i."""
        # s_i(mu) = mu - <mu, alpha_i> h_i with <h_j, alpha_i> = c_ji
        n = self.rank
        m = [0] * n
        for i in range(n):
            m[self.tau[i]] = mu[i]
        for i in reversed(self.w_bullet):
            c = sum(m[j] * self.cartan.matrix[j][i] for j in range(n))
            m[i] -= c
        return tuple(-x for x in m)

    def orbit(self, i) -> tuple:
        return tuple(sorted({i, self.tau[i]}))

    def rank_one_nodes(self, i) -> tuple:
        """Nodes of the rank one subdiagram attached to the white node i."""
        nodes = set(self.orbit(i))
        C = self.cartan.matrix
        grow = True
        while grow:
            grow = False
            for j in self.black:
                if j not in nodes and any(C[j][k] for k in nodes):
                    nodes.add(j)
                    grow = True
        return tuple(sorted(nodes))

    def varsigma_diamond_exponent(self, i) -> Fraction:
        """Exponent e with varsigma_diamond_i = -q^e (1 on black nodes)."""
        if i in self.black:
            return None
        c = self.cartan
        b = c.apply_word(self.w_bullet, c.simple(self.tau[i]))
        val = c.pair(i, c.simple(i)) + c.pair(i, b)
        return Fraction(-c.eps[i] * val, 2)

    def relative_reflection_matrix(self, i):
        return self.cartan.matrix_of(self.bs_words[i])

    def relative_root_groups(self):
        """Positions of the W-letter word of w0 grouped by relative letter."""
        out = []
        pos = 0
        for i in self.w0_relative:
            k = len(self.bs_words[i])
            out.append((i, pos, pos + k))
            pos += k
        return out

    def positive_roots_w0(self) -> list:
        return self.cartan.inversion_set(self.w0_word)

    def black_positive_roots(self) -> list:
        return [b for b in self.cartan.positive_roots if all(b[k] == 0 or k in self.black for k in range(self.rank))]

    def x_imath_rep(self, lam) -> tuple:
        """Canonical representative of lam in X_i = X / {mu - theta(mu)}."""
        return _lattice_reduce(lam, self._xcheck_hnf)

    @cached_property
    def _xcheck_hnf(self):
        n = self.rank
        gens = []
        for i in range(n):
            e = tuple(1 if k == i else 0 for k in range(n))
            th = self.theta_weight(e)
            gens.append(tuple(e[k] - th[k] for k in range(n)))
        return _hnf(gens, n)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "cartan": self.cartan.label,
            "black": sorted(j + 1 for j in self.black),
            "tau": [self.tau[i] + 1 for i in range(self.rank)],
            "w_bullet": [j + 1 for j in self.w_bullet],
            "white_reps": [i + 1 for i in self.white_reps],
            "bs_words": {str(i + 1): [j + 1 for j in w] for i, w in self.bs_words.items()},
            "w0_relative": [i + 1 for i in self.w0_relative],
            "w0_word": [j + 1 for j in self.w0_word],
        }


def _hnf(gens, n):
    """Row-style Hermite normal form of the lattice spanned by gens in Z^n."""
    rows = [list(g) for g in gens if any(g)]
    basis = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                f = r[col] // p[col]
                for k in range(n):
                    r[k] -= f * p[k]
            rows = [r for r in rows if any(r)]
            nz = [r for r in rows if r[col] != 0]
        p = nz[0]
        if p[col] < 0:
            for k in range(n):
                p[k] = -p[k]
        basis.append((col, tuple(p)))
        rows = [r for r in rows if r is not p and any(r)]
        col += 1
    return basis


def _lattice_reduce(v, hnf):
    v = list(v)
    for col, p in hnf:
        f = v[col] // p[col]
        if f:
            for k in range(len(v)):
                v[k] -= f * p[k]
    return tuple(v)


def _tau_ok(C, tau):
    n = len(C)
    return all(C[tau[i]][tau[j]] == C[i][j] for i in range(n) for j in range(n))


def validate_satake(c: CartanDatum, black, tau=None, name: str = "") -> SatakeDatum:
    n = c.rank
    black = frozenset(black)
    if tau is None:
        tau = tuple(range(n))
    tau = tuple(tau)
    if sorted(tau) != list(range(n)) or any(tau[tau[i]] != i for i in range(n)):
        raise SatakeError(0, "tau must be an involution of the index set")
    if not _tau_ok(c.matrix, tau):
        raise SatakeError(1, "tau does not preserve the Cartan matrix")
    if any(tau[j] not in black for j in black):
        raise SatakeError(1, "tau does not preserve the black nodes")
    sd = SatakeDatum(c, black, tau, name)
    sd.w_bullet = c.longest_word(black)
    for j in black:
        img = c.apply_word(sd.w_bullet, c.simple(j))
        if img != tuple(-x for x in c.simple(tau[j])):
            raise SatakeError(2, f"w_bullet(alpha_{j + 1}) != -alpha_{tau[j] + 1}")
    bpos = sd.black_positive_roots()
    for j in range(n):
        if j in black or tau[j] != j:
            continue
        s = Fraction(0)
        for g in bpos:
            s += Fraction(2 * c.form(g, c.simple(j)), c.form(g, g))
        s /= 2
        if s.denominator != 1:
            raise SatakeError(3, f"<rho_bullet^vee, alpha_{j + 1}> = {s} is not an integer")
    sd.white_reps = tuple(i for i in range(n) if i not in black and i <= tau[i])
    lw = c.length(sd.w_bullet)
    for i in sd.white_reps:
        fam = rank_one_family(sd, i)
        sd.families[i] = fam
        if fam is not None:
            f, mapping = fam
            word = tuple(mapping[k] for k in f.word)
        else:
            word = None
        J = set(black) | {i, tau[i]}
        full = c.longest_word(J)
        # bs_i = w_{bullet,i} w_bullet
        target = c.matrix_of(full + sd.w_bullet)
        if word is None:
            word = c.reduced_word(target)
        if c.matrix_of(word) != target or len(word) != len(full) - lw:
            raise SatakeError(0, f"relative reflection word for node {i + 1} is inconsistent")
        sd.bs_words[i] = word
    sd.w0_relative = _relative_longest(sd)
    sd.w0_word = tuple(j for i in sd.w0_relative for j in sd.bs_words[i])
    if len(sd.w0_word) + lw != len(c.longest):
        raise SatakeError(0, "relative longest element has the wrong length")
    c.inversion_set(sd.w0_word)
    return sd


def _relative_longest(sd: SatakeDatum) -> tuple:
    """Left-greedy reduced word of the longest element of the relative Weyl group."""
    c = sd.cartan
    # target element u = w0 w_bullet; peel bs_i off on the left while lengths drop
    u = list(c.longest + sd.w_bullet)
    u_len = c.length(u)
    out = []
    while u_len:
        for i in sd.white_reps:
            w = sd.bs_words[i]
            cand = tuple(reversed(w)) + tuple(u)
            l2 = c.length(cand)
            if l2 == u_len - len(w):
                out.append(i)
                u = list(c.reduced_word(c.matrix_of(cand)))
                u_len = l2
                break
        else:
            raise SatakeError(0, "relative longest element not found")
    return tuple(out)


def rank_one_family(sd: SatakeDatum, i: int):
    """Identify the rank one subdiagram of white node i with a table family.

    Returns (family, mapping template node -> ambient node) or None.
    """
    nodes = sd.rank_one_nodes(i)
    k = len(nodes)
    C = sd.cartan.matrix
    for f in RANK_ONE_FAMILIES(max(k, 4)):
        fc = cartan(f.cartan_label)
        if fc.rank != k:
            continue
        if f.tau[f.white] == f.white and sd.tau[i] != i:
            continue
        for perm in _candidate_maps(fc, f, nodes, i):
            mapping = dict(zip(range(k), perm))
            if any(fc.matrix[a][b] != C[mapping[a]][mapping[b]] for a in range(k) for b in range(k)):
                continue
            if any((a in f.black) != (mapping[a] in sd.black) for a in range(k)):
                continue
            if any(mapping[f.tau[a]] != sd.tau[mapping[a]] for a in range(k)):
                continue
            return f, mapping
    return None


def _candidate_maps(fc, f, nodes, i):
    k = len(nodes)
    if k > 7:
        return
    rest = [x for x in nodes if x != i]
    for perm in itertools.permutations(rest):
        full = list(perm)
        full.insert(f.white, i)
        yield tuple(full)


# -- builtins -------------------------------------------------------------------

BUILTINS = {
    "AI1": ("A1", [], None),
    "AII3": ("A3", [1, 3], None),
    "AIII11": ("A1xA1", [], [[1, 2]]),
    "AIV2": ("A2", [], [[1, 2]]),
    "AIV3": ("A3", [2], [[1, 3]]),
    "AIV4": ("A4", [2, 3], [[1, 4], [2, 3]]),
    "BII2": ("B2", [2], None),
    "BII3": ("B3", [2, 3], None),
    "CII3": ("C3", [1, 3], None),
    "DII4": ("D4", [2, 3, 4], [[3, 4]]),
    "DII5": ("D5", [2, 3, 4, 5], None),
    "FII": ("F4", [1, 2, 3], None),
    "A2split": ("A2", [], None),
    "A3split": ("A3", [], None),
    "A3qs": ("A3", [], [[1, 3]]),
    "B2split": ("B2", [], None),
}


def _tau_from_pairs(n, pairs):
    tau = list(range(n))
    for a, b in pairs or []:
        tau[a - 1], tau[b - 1] = b - 1, a - 1
    return tuple(tau)


def satake_from_config(cfg: dict) -> SatakeDatum:
    """Build from {type, rank?, black: [1-based], tau: [[i, j], ...] or 'id'}."""
    label = cfg["type"]
    if "rank" in cfg and cfg["rank"] and not re.search(r"\d", label):
        label = f"{label}{cfg['rank']}"
    c = cartan(label)
    tau = cfg.get("tau")
    pairs = None if tau in (None, "id", []) else tau
    return validate_satake(c, [b - 1 for b in cfg.get("black", [])],
                           _tau_from_pairs(c.rank, pairs), cfg.get("name", label))


def builtin_satake(name: str) -> SatakeDatum:
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}; known: {', '.join(BUILTINS)}")
    label, black, tau = BUILTINS[name]
    return satake_from_config({"type": label, "black": black, "tau": tau, "name": name})


# -- module-level operations -------------------------------------------------------

def inversion_set(c: CartanDatum, word) -> list:
    return c.inversion_set(tuple(word))


def relative_longest(sd: SatakeDatum) -> tuple:
    """(relative word of the longest element of W_circ, its W-letter word)."""
    return sd.w0_relative, sd.w0_word


def decompose_positive_roots(sd: SatakeDatum) -> tuple:
    """Split R+ into the inversion set of the relative longest word and the black roots."""
    rel = sd.positive_roots_w0()
    blk = sd.black_positive_roots()
    allr = set(sd.cartan.positive_roots)
    if set(rel) & set(blk) or set(rel) | set(blk) != allr or len(rel) + len(blk) != len(allr):
        raise AssertionError("positive roots do not split as expected")
    # each rank one piece: R+(bs_i) lies in the span of its subdiagram and avoids black roots
    for i in sd.white_reps:
        nodes = set(sd.rank_one_nodes(i))
        for b in sd.cartan.inversion_set(sd.bs_words[i]):
            if any(b[k] for k in range(sd.rank) if k not in nodes) or b in blk:
                raise AssertionError(f"bad relative root {b} for node {i + 1}")
    return rel, blk


def theta_act(sd: SatakeDatum, mu, kind: str = "root") -> tuple:
    """theta on the root lattice ('root'), on X ('weight') or on Y ('coweight')."""
    if kind == "root":
        return sd.theta(mu)
    if kind == "weight":
        return sd.theta_weight(mu)
    if kind == "coweight":
        return sd.theta_coweight(mu)
    raise ValueError(kind)


def relative_position(sd: SatakeDatum, beta) -> tuple:
    """(j, beta0) with beta = bs_{i_1}...bs_{i_{j-1}}(beta0) and beta0 in R+(bs_{i_j}); j is 0-based."""
    c = sd.cartan
    prefix = ()
    for j, i in enumerate(sd.w0_relative):
        word = sd.bs_words[i]
        for b0 in c.inversion_set(word):
            if c.apply_word(prefix, b0) == tuple(beta):
                return j, b0
        prefix = prefix + word
    raise KeyError(f"{beta} is not in the relative inversion set")
