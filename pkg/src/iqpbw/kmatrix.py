"""Quasi K-matrices, solved weight by weight from their intertwining identities.

Two flavours share one solver:

* universal (params=None): lives in the positive part of the Drinfeld double and
  intertwines B_i = F_i + T_{w_bullet}(E_{tau i}) K_i' with
  B_i^sigma = F_i + K_i T_{w_bullet}^{-1}(E_{tau i});
* parametrized: lives in the positive part of the quantum group and intertwines
  B_i = F_i + c_i T_{w_bullet}(E_{tau i}) K_i^{-1} with its sigma image.

In both cases the components also commute with the Cartan part of the
iquantum group and with the black subalgebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .braid import braid_apply_word, pbw_algebra, rescaled_apply_word
from .iqg import sqrt_varsigma_diamond
from .linalg import LinearSystemError, add_into, solve
from .rootdata import SatakeDatum, theta_act
from .scalars import ONE, RING_ABAR, Scalar, format_scalar, is_integral, q_factorial, q_pow
from .utilde import UAlgebra, UElement, project_pi, sigma


class QuasiKError(ArithmeticError):
    pass


@dataclass
class QuasiKMatrix:
    sd: SatakeDatum
    nodes: tuple          # support nodes (rank one subdiagram or all nodes)
    params: dict | None   # None for the universal version
    cutoff: int
    alg: UAlgebra
    components: dict = field(default_factory=dict)   # weight -> element of the positive part
    tag: str = ""

    def component(self, mu) -> UElement:
        mu = tuple(mu)
        if sum(mu) > self.cutoff:
            raise QuasiKError(f"weight {mu} lies above the cutoff {self.cutoff}")
        return self.components.get(mu, self.alg.zero())

    def truncated(self, height: int | None = None) -> UElement:
        h = self.cutoff if height is None else height
        if h > self.cutoff:
            raise QuasiKError(f"requested height {h} lies above the cutoff {self.cutoff}")
        out = self.alg.zero()
        for mu, x in self.components.items():
            if sum(mu) <= h:
                out = out + x
        return out

    def support(self) -> list:
        return sorted(mu for mu, x in self.components.items() if not x.is_zero())

    def to_json(self) -> dict:
        return {
            "param": None if self.params is None
            else {str(i + 1): format_scalar(c) for i, c in sorted(self.params.items())},
            "subdiagram": [i + 1 for i in self.nodes],
            "cutoff": self.cutoff,
            "components": [{"mu": list(mu), "element": self.components[mu].to_json()}
                           for mu in self.support()],
        }


# -- the intertwining data ---------------------------------------------------------

class _Setup:
    """Generators entering the identities, for one flavour."""

    def __init__(self, sd: SatakeDatum, nodes, params, alg: UAlgebra | None):
        self.sd = sd
        self.nodes = tuple(sorted(nodes))
        self.params = params
        if alg is None:
            alg = pbw_algebra(sd.cartan, sd.w0_word + sd.w_bullet)
        alg = alg.sibling_tilde() if params is None else alg.sibling_U()
        self.alg = alg
        a = alg
        self.white = [i for i in self.nodes if not sd.is_black(i)]
        self.black = [j for j in self.nodes if sd.is_black(j)]
        tilde = a.sibling_tilde()
        self.B, self.Bs, self.shift = {}, {}, {}
        for i in self.white:
            twisted = braid_apply_word(sd.w_bullet, tilde.E(sd.tau[i]))
            if params is None:
                x = twisted * a.Kp(i)
            else:
                x = project_pi(twisted) * a.K(i, -1) * params[i]
            self.B[i] = a.F(i) + x
            self.Bs[i] = sigma(self.B[i])
            self.shift[i] = sd.cartan.apply_word(sd.w_bullet, sd.cartan.simple(sd.tau[i]))
        # elements that must commute with every component
        self.central = []
        for j in self.black:
            self.central += [("E", j, a.E(j)), ("F", j, a.F(j))]
        for i in self.white:
            if params is None:
                self.central.append(("k", i, a.K(i) * a.Kp(sd.tau[i])))
            else:
                self.central.append(("k", i, a.K(i) * a.K(sd.tau[i], -1)))
        for j in self.black:
            if params is None:
                self.central += [("K", j, a.K(j)), ("K'", j, a.Kp(j))]
            else:
                self.central.append(("K", j, a.K(j)))

    def weights(self, cutoff: int):
        """Nonnegative weights supported on the nodes, ordered by height."""
        n = self.sd.rank
        out = [(0,) * n]
        frontier = [(0,) * n]
        for _ in range(cutoff):
            nxt = set()
            for mu in frontier:
                for i in self.nodes:
                    m = list(mu)
                    m[i] += 1
                    nxt.add(tuple(m))
            frontier = sorted(nxt)
            out += frontier
        return out


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _geq0(a):
    return all(x >= 0 for x in a)


def solve_quasiK(sd: SatakeDatum, nodes=None, params: dict | None = None, cutoff: int = 4,
                 alg: UAlgebra | None = None, tag: str = "") -> QuasiKMatrix:
    """Components of height <= cutoff, solved weight by weight.

    Every weight gives one linear system in the coordinates of the positive part;
    the systems are required to have exactly one solution.
    """
    nodes = tuple(range(sd.rank)) if nodes is None else tuple(sorted(nodes))
    st = _Setup(sd, nodes, params, alg)
    a = st.alg
    h = a.half
    comps = {}
    for mu in st.weights(cutoff):
        if not any(mu):
            comps[mu] = a.one()
            continue
        keys = h.basis(mu)
        if not keys:
            continue
        basis = [a.from_e({k: ONE}) for k in keys]
        eqs = {}

        def add_eq(label, images, rhs):
            # images: list of UElements (one per basis key), rhs: UElement
            rows = {}
            for idx, img in enumerate(images):
                for t, c in img.terms.items():
                    rows.setdefault(t, {})[keys[idx]] = c
            for t, c in rhs.terms.items():
                rows.setdefault(t, {})
            for t, row in rows.items():
                eqs[(label, t)] = (row, rhs.terms.get(t, Scalar(0)))

        for i in st.white:
            prev = _sub(_sub(mu, a.cartan.simple(i)), st.shift[i])
            rhs = a.zero()
            if _geq0(prev) and prev in comps:
                y = comps[prev]
                rhs = -(st.B[i] * y - y * st.Bs[i] - (a.F(i) * y - y * a.F(i)))
            add_eq(("B", i), [a.F(i) * b - b * a.F(i) for b in basis], rhs)
        for name, j, x in st.central:
            add_eq((name, j), [x * b - b * x for b in basis], a.zero())
        try:
            sol = solve(list(eqs.values()), keys)
        except LinearSystemError as exc:
            raise QuasiKError(f"weight {mu}: {exc}") from exc
        if sol:
            comps[mu] = a.from_e(sol)
    return QuasiKMatrix(sd, nodes, None if params is None else dict(params), cutoff, a, comps, tag)


def solve_rank1_quasiK(sd: SatakeDatum, i: int, params: dict | None = None, cutoff: int = 4,
                       alg: UAlgebra | None = None) -> QuasiKMatrix:
    """Quasi K-matrix of the real rank one subdiagram through the white node i."""
    if sd.is_black(i):
        raise ValueError(f"node {i + 1} is black")
    nodes = tuple(sorted({i, sd.tau[i]} | set(sd.black)))
    sub = None
    if params is not None:
        sub = {k: params[k] for k in (i, sd.tau[i])}
    return solve_quasiK(sd, nodes, sub, cutoff, alg, tag=f"rank one at node {i + 1}")


# -- checks ----------------------------------------------------------------------------

def verify_intertwining(K: QuasiKMatrix, extra=()) -> tuple:
    """Check all identities in every degree fully determined by the cutoff.

    Returns (ok, report) where report lists the first failing relation and weight.
    ``extra`` holds additional elements that should commute with the matrix.
    """
    st = _Setup(K.sd, K.nodes, K.params, K.alg)
    a = st.alg
    h = a.half
    Y = K.truncated()
    checks = [(("B", i), st.B[i], st.Bs[i]) for i in st.white]
    checks += [((name, j), x, x) for name, j, x in st.central]
    checks += [(("extra", idx), x, x) for idx, x in enumerate(extra)]
    failures = []
    for label, left, right in checks:
        res = left * Y - Y * right
        for (f, k, e), c in res.terms.items():
            delta = _sub(h.weight(e), h.weight(f))
            # a degree is complete when every component that can reach it is below the cutoff
            if sum(delta) + 1 <= K.cutoff and not c.is_zero():
                failures.append((label, delta))
                break
    report = {
        "cutoff": K.cutoff,
        "checked": [f"{l[0]}{l[1] + 1}" for l, _, _ in checks],
        "failures": [{"relation": f"{l[0]}{l[1] + 1}", "weight": list(d)} for l, d in failures],
    }
    return not failures, report


def check_support(K: QuasiKMatrix) -> bool:
    """Nonzero components only at weights mu with theta(mu) = -mu."""
    return all(theta_act(K.sd, mu) == tuple(-x for x in mu) for mu in K.support())


def divided_pbw_coefficients(x: UElement) -> dict:
    """Coefficients of x in the divided-power PBW basis of the positive part."""
    h = x.alg.half
    out = {}
    for (_, _, e), c in x.terms.items():
        add_into(out, e, c * h.divided_scale(e))
    return out


def integrality_report(K: QuasiKMatrix, ring: str = RING_ABAR) -> tuple:
    """(ok, first failing (weight, key, coefficient) or None)."""
    for mu in K.support():
        for key, c in divided_pbw_coefficients(K.components[mu]).items():
            if not is_integral(c, ring):
                return False, (mu, K.alg.half.key_str(key, "E"), format_scalar(c))
    return True, None


# -- closed formula for type AIV ----------------------------------------------------------

def quasiK_closed_AIV(sd: SatakeDatum, params: dict, cutoff: int, alg: UAlgebra | None = None) -> QuasiKMatrix:
    """Product of two q-exponential series in T_{s_1 w_bullet}(E_n) and T_{s_n w_bullet}(E_1)."""
    fam = sd.families.get(sd.white_reps[0])
    if len(sd.white) != 2 or fam is None or not fam[0].key.startswith("AIV"):
        raise ValueError("closed formula needs a type AIV datum")
    n = sd.rank
    first, last = 0, n - 1
    if alg is None:
        alg = pbw_algebra(sd.cartan, sd.w0_word + sd.w_bullet)
    u = alg.sibling_U()
    tilde = alg.sibling_tilde()
    c = sd.cartan

    def series(node, target):
        word = (node,) + tuple(sd.w_bullet)
        x = project_pi(braid_apply_word(word, tilde.E(target)))
        ht = sum(c.apply_word(word, c.simple(target)))
        out = u.one()
        p = u.one()
        k = 1
        while k * ht <= cutoff:
            p = p * x
            coef = (-params[node]) ** k * q_pow(-k * (k - 1) // 2) * q_factorial(k).inverse()
            out = out + p * coef
            k += 1
        return out

    total = series(first, last) * series(last, first)
    comps = {}
    for w, comp in total.weight_components().items():
        mu = tuple(-x for x in w)
        if sum(mu) <= cutoff:
            comps[mu] = comp
    return QuasiKMatrix(sd, tuple(range(n)), dict(params), cutoff, u, comps, tag="closed AIV formula")


# -- partial quasi K-matrices ----------------------------------------------------------------

def truncated_inverse(x: UElement, cutoff: int) -> UElement:
    """Inverse of 1 + (positive degree part), truncated at the given height."""
    a = x.alg
    h = a.half
    if not (x - a.one()).filter_terms(lambda t: not any(h.weight(t[2]))).is_zero():
        raise QuasiKError("constant term must be 1")
    nil = (x - a.one()).filter_terms(lambda t: sum(h.weight(t[2])) <= cutoff)
    out = a.one()
    p = a.one()
    for _ in range(cutoff):
        p = (p * nil).filter_terms(lambda t: sum(h.weight(t[2])) <= cutoff) * -1
        if p.is_zero():
            break
        out = out + p
    return out


def _truncate(x: UElement, cutoff: int) -> UElement:
    h = x.alg.half
    return x.filter_terms(lambda t: sum(h.weight(t[2])) <= cutoff)


def diamond_sqrts(sd: SatakeDatum, branch: int = 1) -> list:
    return [sqrt_varsigma_diamond(sd, i, branch) for i in range(sd.rank)]


def partial_quasiK(sd: SatakeDatum, word, cutoff: int, alg: UAlgebra | None = None, cache=None) -> QuasiKMatrix:
    """Y_w = Y_{i_1} * Tr_{bs_{i_1}}^{-1}(Y_{i_2}) * ... for a relative word of white representatives."""
    word = tuple(word)
    c = sd.cartan
    full = ()
    for i in word:
        if i not in sd.white_reps:
            raise ValueError(f"node {i + 1} is not a white representative")
        full += sd.bs_words[i]
    if not c.is_reduced(full):
        raise ValueError("relative word is not reduced")
    if alg is None:
        alg = pbw_algebra(c, sd.w0_word + sd.w_bullet)
    a = alg.sibling_tilde()
    sq = diamond_sqrts(sd)
    cache = {} if cache is None else cache
    out = a.one()
    prefix = ()
    for i in word:
        # Tr_{bs_1}^{-1} ... Tr_{bs_{k-1}}^{-1} sends weight mu to w(mu) for w = bs_1 ... bs_{k-1};
        # each bs is an involution, so the reversed word applies the innermost factor first
        grow = max([1] + [sum(c.apply_word(prefix, c.simple(k))) for k in range(c.rank)])
        need = cutoff * grow
        key = (i, need)
        K = cache.get(key)
        if K is None:
            K = solve_rank1_quasiK(sd, i, None, need, a)
            cache[key] = K
        factor = a.zero()
        for mu, comp in K.components.items():
            img = rescaled_apply_word(tuple(reversed(prefix)), comp, sq, e=-1) if prefix else comp
            factor = factor + _truncate(img, cutoff)
        out = _truncate(out * factor, cutoff)
        prefix = prefix + sd.bs_words[i]
    comps = {}
    for w, comp in out.weight_components().items():
        comps[tuple(-x for x in w)] = comp
    return QuasiKMatrix(sd, tuple(range(sd.rank)), None, cutoff, a, comps,
                        tag="partial " + "".join(str(i + 1) for i in word))
