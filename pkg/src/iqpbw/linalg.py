"""Sparse exact linear algebra over Scalars.

Vectors are dicts column -> Scalar with no zero entries.
"""
from __future__ import annotations

from .scalars import ZERO, Scalar


def add_into(acc: dict, key, c: Scalar) -> None:
    """acc[key] += c, dropping zeros."""
    old = acc.get(key)
    if old is None:
        if not c.is_zero():
            acc[key] = c
        return
    new = old + c
    if new.is_zero():
        del acc[key]
    else:
        acc[key] = new


def axpy(acc: dict, c: Scalar, vec: dict) -> None:
    """acc += c * vec."""
    if c.is_zero():
        return
    if c.is_one():
        for k, v in vec.items():
            add_into(acc, k, v)
    else:
        for k, v in vec.items():
            add_into(acc, k, c * v)


def scale(vec: dict, c: Scalar) -> dict:
    if c.is_zero():
        return {}
    if c.is_one():
        return dict(vec)
    return {k: c * v for k, v in vec.items()}


class Echelon:
    """Incrementally maintained reduced row echelon form.

    The pivot of a row is its largest column under ``order`` (default: the
    natural order of the column keys).  Each stored row has pivot entry 1 and
    no entries in other pivot columns.
    """

    def __init__(self, order=None):
        self.order = order or (lambda k: k)
        self.rows: dict = {}

    def reduce(self, vec: dict) -> dict:
        v = dict(vec)
        for col in [c for c in v if c in self.rows]:
            c = v.get(col)
            if c is not None:
                axpy(v, -c, self.rows[col])
        return v

    def add(self, vec: dict):
        """Insert a row; returns the new pivot column or None if dependent."""
        v = self.reduce(vec)
        if not v:
            return None
        piv = max(v, key=self.order)
        inv = v[piv].inverse()
        v = scale(v, inv)
        for col, row in self.rows.items():
            c = row.get(piv)
            if c is not None:
                axpy(row, -c, v)
        self.rows[piv] = v
        return piv

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self):
        return set(self.rows)


def rank(vectors) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank


def independent_subset(vectors, order=None) -> list:
    """Indices of a maximal independent subset (greedy in input order)."""
    e = Echelon(order)
    out = []
    for idx, v in enumerate(vectors):
        if e.add(v) is not None:
            out.append(idx)
    return out


class LinearSystemError(ArithmeticError):
    pass


_RHS = ("__rhs__",)


def solve(equations, unknowns, require_unique: bool = True) -> dict:
    """Solve sum_u a[u] x_u = b for each equation (a: dict, b: Scalar).

    Raises LinearSystemError if inconsistent or (when required) not unique.
    """
    unknowns = list(unknowns)
    pos = {u: k for k, u in enumerate(unknowns)}
    # pivot on the smallest unknown index so that back substitution is direct
    e = Echelon(order=lambda c: -1 if c == _RHS else len(unknowns) - pos[c])
    for a, b in equations:
        row = dict(a)
        if not b.is_zero():
            row[_RHS] = -b
        piv = e.add(row)
        if piv == _RHS:
            raise LinearSystemError("inconsistent linear system")
    if require_unique and e.rank < len(unknowns):
        missing = [u for u in unknowns if u not in e.rows]
        raise LinearSystemError(f"underdetermined linear system; free unknowns {missing[:5]}")
    sol = {}
    for u in unknowns:
        row = e.rows.get(u)
        if row is None:
            continue
        val = row.get(_RHS, ZERO)
        if len(row) - (1 if _RHS in row else 0) > 1 and require_unique:
            raise LinearSystemError("system not fully reduced")
        if not val.is_zero():
            sol[u] = -val
    return sol
