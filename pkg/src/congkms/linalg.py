"""Exact integer linear algebra: Smith normal form and finite abelian groups.

Matrices are lists of lists of Python ints (arbitrary precision).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Hashable, Sequence


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _copy(m: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(map(int, row)) for row in m]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)]
            for i in range(len(a))]


def smith_normal_form(m: Sequence[Sequence[int]], ncols: int | None = None):
    """Return (D, U, V) with U*M*V = D diagonal, d_i | d_{i+1}, d_i >= 0.

    U and V are unimodular. `ncols` is needed when M has no rows.
    """
    a = _copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else (ncols or 0)
    u = _identity(rows)
    v = _identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        if k:
            a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
            u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        if k:
            for row in a:
                row[dst] += k * row[src]
            for row in v:
                row[dst] += k * row[src]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute entry in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, rows):
                q = a[i][t] // p
                add_row(i, t, -q)
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // p
                add_col(j, t, -q)
                if a[t][j]:
                    done = False
            if done:
                # enforce divisibility of the rest of the block
                bad = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, 1)
                continue
            # move the smallest nonzero entry of row/col t to the pivot
            best = (t, t)
            for i in range(t, rows):
                if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, cols):
                if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                    best = (t, j)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def diagonal(d: Sequence[Sequence[int]]) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def inverse_unimodular(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix by exact Gauss-Jordan."""
    from fractions import Fraction
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    out = [[row[n + j] for j in range(n)] for row in a]
    for row in out:
        for x in row:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


@dataclass
class FiniteAbelianGroup:
    """Finite abelian group ⊕ ℤ/d_i with d_1 | d_2 | ..., all d_i > 1.

    `generators` hold the objects realizing the cyclic factors (ideals, residue
    classes, ...); `dlog` maps an element to its exponent vector.
    """
    cyclic_orders: list[int]
    generators: list = field(default_factory=list)
    dlog: Callable | None = None

    @property
    def order(self) -> int:
        n = 1
        for d in self.cyclic_orders:
            n *= d
        return n

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(x) % d for x, d in zip(vec, self.cyclic_orders))

    def add(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(u, v)])

    def neg(self, u: Sequence[int]) -> tuple[int, ...]:
        return self.reduce([-a for a in u])

    def identity(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.cyclic_orders)

    def elements(self) -> list[tuple[int, ...]]:
        out = [()]
        for d in self.cyclic_orders:
            out = [e + (i,) for e in out for i in range(d)]
        return out

    def element_order(self, u: Sequence[int]) -> int:
        n = 1
        for x, d in zip(u, self.cyclic_orders):
            k = d // gcd(d, int(x) % d)
            n = n * k // gcd(n, k)
        return n


def structure_from_relations(relations: Sequence[Sequence[int]], k: int):
    """Structure of ℤ^k / (row span of `relations`).

    Returns (orders, to_snf, from_snf): `to_snf` is a k×r integer matrix sending
    an exponent row vector v to SNF coordinates v·to_snf (mod orders), and
    `from_snf` is an r×k matrix whose rows are the SNF generators written in the
    original generators. Only factors with d > 1 are kept; raises if the
    quotient is infinite.
    """
    if k == 0:
        return [], [], []
    d, _, v = smith_normal_form(relations, ncols=k)
    diag = diagonal(d) if relations else []
    diag = diag + [0] * (k - len(diag))
    if any(x == 0 for x in diag):
        raise ValueError("relations do not define a finite group")
    vinv = inverse_unimodular(v)
    keep = [i for i, x in enumerate(diag) if x > 1]
    orders = [diag[i] for i in keep]
    to_snf = [[v[r][i] for i in keep] for r in range(k)]
    from_snf = [vinv[i] for i in keep]
    return orders, to_snf, from_snf


def enumerate_group(identity, generators: Sequence, mul: Callable, key: Callable[..., Hashable]):
    """Breadth-first closure of a finite abelian group under `generators`.

    Returns (elements, words, relations): `elements[i]` is a representative,
    `words[i]` its exponent vector over the generators, and `relations` the
    Schreier relations (rows) generating the relation lattice.
    """
    k = len(generators)
    elements = [identity]
    words = [tuple([0] * k)]
    index = {key(identity): 0}
    relations = []
    queue = 0
    while queue < len(elements):
        cur = elements[queue]
        for j, g in enumerate(generators):
            nxt = mul(cur, g)
            kk = key(nxt)
            w = list(words[queue])
            w[j] += 1
            if kk in index:
                target = words[index[kk]]
                rel = [a - b for a, b in zip(w, target)]
                if any(rel):
                    relations.append(rel)
            else:
                index[kk] = len(elements)
                elements.append(nxt)
                words.append(tuple(w))
        queue += 1
    return elements, words, relations, index
