"""PBW monomials B^a F_black^c E_black^d of the universal iquantum group.

The root vectors B_beta of a RootVectorTable, multiplied in the order of the
fixed reduced word, together with ordered monomials in the black root vectors,
form a basis over the Cartan part U^{imath 0}.  Expansion in this basis peels
the top filtration component: the top of a monomial is a scalar multiple of
the corresponding PBW key of F-part, Cartan part and E-part.
"""
from __future__ import annotations

import itertools

from .iqg import IElement, LeadingTermError
from .linalg import Echelon
from .relbraid import RootVectorTable
from .scalars import ONE, Scalar
from .utilde import ResourceCapError, UElement, kostant_partition_count

MAX_MONOMIALS = 20000


class PBWMonomial:
    """B^a F_black^c (Cartan monomial) E_black^d.

    ``a`` runs over the relative inversion set, ``c`` and ``d`` over the black
    positive roots; exponents are tuples in the order of the PBW word.
    ``kvec`` is a Cartan exponent vector in the U^{imath 0} lattice.
    """

    def __init__(self, a, c, d, element: IElement, degree: int, kvec=None):
        self.a = tuple(a)
        self.c = tuple(c)
        self.d = tuple(d)
        self.kvec = kvec
        self.element = element
        self.degree = degree

    @property
    def value(self) -> UElement:
        return self.element.value

    @property
    def label(self) -> tuple:
        return (self.a, self.c, self.d, self.kvec)

    def to_json(self) -> dict:
        return {"a": list(self.a), "c": list(self.c), "d": list(self.d),
                "kvec": list(self.kvec) if self.kvec else None, "degree": self.degree}

    def __repr__(self):
        return f"PBWMonomial(a={self.a}, c={self.c}, d={self.d}, degree={self.degree})"


class PBWBasis:
    """Realization and caching of PBW monomials for one root vector table."""

    def __init__(self, table: RootVectorTable):
        self.table = table
        self.iq = table.iq
        self.alg = table.iq.alg
        self.half = self.alg.half
        self.N = self.half.N
        self.n_rel = len(table.entries)
        self.rel_roots = [e["beta"] for e in table.entries]
        self.black_roots = list(self.half.roots[self.n_rel:])
        self._cache = {}
        self._black_f = {}
        self._black_e = {}

    def degree(self, a) -> int:
        return sum(x * self.iq.white_height(b) for x, b in zip(a, self.rel_roots))

    def _black_key(self, c):
        return (0,) * self.n_rel + tuple(c)

    def _black(self, c, side) -> IElement:
        cache = self._black_f if side == "f" else self._black_e
        x = cache.get(c)
        if x is None:
            key = self._black_key(c)
            val = self.alg.from_f({key: ONE}) if side == "f" else self.alg.from_e({key: ONE})
            x = self.iq.lift(val)
            cache[c] = x
        return x

    def _cartan(self, kvec) -> IElement:
        iq = self.iq
        x = iq.one()
        if kvec is None:
            return x
        n = iq.n
        for i in range(n):
            if iq.sd.is_black(i):
                if kvec[i]:
                    x = x * iq.K(i, kvec[i])
                if kvec[n + i]:
                    x = x * iq.Kp(i, kvec[n + i])
            elif kvec[i]:
                x = x * iq.k(i, kvec[i])
        return x

    def realize(self, a, c=None, d=None, kvec=None) -> PBWMonomial:
        nb = len(self.black_roots)
        a = tuple(a)
        c = tuple(c) if c is not None else (0,) * nb
        d = tuple(d) if d is not None else (0,) * nb
        if kvec is not None and not any(kvec):
            kvec = None
        label = (a, c, d, kvec)
        m = self._cache.get(label)
        if m is not None:
            return m
        if len(a) != self.n_rel or len(c) != nb or len(d) != nb:
            raise ValueError("exponent vectors have the wrong length")
        if kvec is not None and not self.iq.in_imath0_lattice(kvec):
            raise ValueError("Cartan part is not in U^{imath 0}")
        x = self.iq.one()
        for e, k in zip(self.table.entries, a):
            if k:
                x = x * e["element"] ** k
        if any(c):
            x = x * self._black(c, "f")
        if kvec is not None:
            x = x * self._cartan(kvec)
        if any(d):
            x = x * self._black(d, "e")
        m = PBWMonomial(a, c, d, x, self.degree(a), kvec)
        self._cache[label] = m
        return m

    def split_key(self, term):
        f, k, e = term
        return f[:self.n_rel], f[self.n_rel:], e[self.n_rel:], (k if any(k) else None)


_bases = {}


def pbw_basis(table: RootVectorTable) -> PBWBasis:
    b = _bases.get(id(table))
    if b is None or b.table is not table:
        b = PBWBasis(table)
        _bases[id(table)] = b
    return b


def _exponent_vectors(weights, cap, size):
    """Exponent vectors x >= 0 with sum x_k * weights[k] <= cap, size entries."""
    out = []

    def rec(pos, rem, cur):
        if pos == size:
            out.append(tuple(cur))
            return
        w = weights[pos]
        top = rem // w if w else 0
        for x in range(top + 1):
            cur.append(x)
            rec(pos + 1, rem - x * w, cur)
            cur.pop()

    rec(0, cap, [])
    return out


def enumerate_pbw_monomials(table: RootVectorTable, degree_cap: int, black_cap: int = 0,
                            max_monomials: int = MAX_MONOMIALS) -> list:
    """All monomials of filtration degree <= degree_cap.

    The black exponents c and d are bounded separately: the heights of their
    weights are each at most black_cap.  Monomials are listed by degree.
    """
    if degree_cap < 0 or black_cap < 0:
        raise ValueError("caps must be nonnegative")
    basis = pbw_basis(table)
    iq = basis.iq
    wh = [iq.white_height(b) for b in basis.rel_roots]
    if any(w == 0 for w in wh):
        raise ValueError("a relative root has white height 0")
    avecs = _exponent_vectors(wh, degree_cap, len(wh))
    bvecs = _exponent_vectors([sum(b) for b in basis.black_roots], black_cap, len(basis.black_roots))
    total = len(avecs) * len(bvecs) ** 2
    if total > max_monomials:
        raise ResourceCapError(f"{total} monomials exceed the limit {max_monomials}")
    avecs.sort(key=lambda a: (basis.degree(a), tuple(-x for x in a)))
    return [basis.realize(a, c, d) for a in avecs for c in bvecs for d in bvecs]


def _blocks(vectors):
    """Connected components of vectors sharing a column."""
    parent = list(range(len(vectors)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner = {}
    for idx, v in enumerate(vectors):
        for col in v:
            j = owner.setdefault(col, idx)
            if j != idx:
                parent[find(idx)] = find(j)
    groups = {}
    for idx in range(len(vectors)):
        groups.setdefault(find(idx), []).append(idx)
    return list(groups.values())


def independence_rank(monomials) -> dict:
    """Rank of the realized monomials over the field, per connected weight block.

    Cartan monomials are part of the basis labels, so independence over the
    field of distinct labels is independence over U^{imath 0}.  The result names
    a maximal independent subset, the dependent monomials and duplicated labels.
    """
    vectors = [m.value.terms for m in monomials]
    seen = {}
    duplicates = []
    for idx, m in enumerate(monomials):
        if m.label in seen:
            duplicates.append((seen[m.label], idx))
        else:
            seen[m.label] = idx
    independent, dependent = [], []
    for block in _blocks(vectors):
        ech = Echelon()
        for idx in block:
            if ech.add(vectors[idx]) is None:
                dependent.append(idx)
            else:
                independent.append(idx)
    return {
        "rank": len(independent),
        "count": len(monomials),
        "independent": sorted(independent),
        "dependent": sorted(dependent),
        "duplicates": duplicates,
    }


def expand_in_pbw(x, table: RootVectorTable) -> dict:
    """Coefficients of x in the PBW basis, keyed by (a, c, d, kvec).

    kvec is None for the trivial Cartan monomial.  Raises LeadingTermError if
    the filtration degree does not drop while peeling, and checks the
    reconstruction at the end.
    """
    basis = pbw_basis(table)
    iq = basis.iq
    val = x.value if isinstance(x, IElement) else x
    if val.alg is not basis.alg:
        raise ValueError("element lives in a different algebra")
    out = {}
    rem = val
    last = None
    while not rem.is_zero():
        d, top = iq.leading_term(rem)
        if last is not None and d >= last:
            raise LeadingTermError(f"degree did not drop below {last} while expanding")
        last = d
        sub = basis.alg.zero()
        for term, c in top.terms.items():
            a, cc, dd, kvec = basis.split_key(term)
            m = basis.realize(a, cc, dd, kvec)
            md, mtop = iq.leading_term(m.value)
            lead = mtop.terms.get(term)
            if md != d or lead is None or len(mtop.terms) != 1:
                raise LeadingTermError(f"monomial {m} does not lead with its own key")
            coef = c / lead
            out[m.label] = out.get(m.label, Scalar(0)) + coef
            sub = sub + m.value * coef
        rem = rem - sub
    out = {k: v for k, v in out.items() if not v.is_zero()}
    recon = basis.alg.zero()
    for label, c in out.items():
        recon = recon + basis.realize(*label).value * c
    if recon != val:
        raise ArithmeticError("PBW expansion does not reconstruct the input")
    return out


def graded_dimensions(table: RootVectorTable, degree_cap: int) -> dict:
    """Predicted number of monomials B^a per filtration degree (black part trivial).

    Counts partitions of weights over the relative inversion set; with no black
    nodes this is the sum of Kostant partition numbers of U^- over the weights
    of that height.
    """
    sd = table.sd
    iq = table.iq
    roots = [e["beta"] for e in table.entries]
    out = {d: 0 for d in range(degree_cap + 1)}
    if not sd.black:
        n = sd.rank
        for d in range(degree_cap + 1):
            for mu in itertools.product(range(d + 1), repeat=n):
                if sum(mu) == d:
                    out[d] += kostant_partition_count(sd.cartan, mu)
        return out
    # with black nodes, count monomials directly by white height
    wh = [iq.white_height(b) for b in roots]
    for a in _exponent_vectors(wh, degree_cap, len(wh)):
        out[sum(x * w for x, w in zip(a, wh))] += 1
    return out


def verify_pbw(table: RootVectorTable, degree_cap: int, max_monomials: int = MAX_MONOMIALS) -> dict:
    """Independence of the monomials B^a with per-degree counts against graded dimensions."""
    mons = enumerate_pbw_monomials(table, degree_cap, max_monomials=max_monomials)
    expected = graded_dimensions(table, degree_cap)
    counts = {d: 0 for d in range(degree_cap + 1)}
    ranks = {d: 0 for d in range(degree_cap + 1)}
    for m in mons:
        counts[m.degree] += 1
    for d in range(degree_cap + 1):
        group = [m for m in mons if m.degree == d]
        ranks[d] = independence_rank(group)["rank"]
    total = independence_rank(mons)
    ok = total["rank"] == len(mons) and all(
        counts[d] == ranks[d] == expected[d] for d in range(degree_cap + 1))
    return {
        "cap": degree_cap,
        "counts": counts,
        "ranks": ranks,
        "expected": expected,
        "rank": total["rank"],
        "pass": ok,
    }
