"""Brute-force reference computations that share no code with the package.

Everything here works on plain integers: lattices are HNF triples (a, b, c)
for ℤ·a + ℤ·(b + cω) and ω² = tω − n.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd, isqrt


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, isqrt(n) + 1))


def primes_below(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if is_prime(p)]


def omega_poly(d: int) -> tuple[int, int]:
    """(t, n) with ω² = tω − n."""
    if d % 4 == 1:
        return 1, (1 - d) // 4
    return 0, -d


def discriminant(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


def lattice_is_ideal(d: int, a: int, b: int, c: int) -> bool:
    t, n = omega_poly(d)

    def inside(u, v):
        if v % c:
            return False
        return (u - (v // c) * b) % a == 0

    # ω·a = aω ; ω·(b + cω) = −cn + (b + ct)ω
    return inside(0, a) and inside(-c * n, b + c * t)


def brute_ideal_counts(d: int | None, X: int) -> list[int]:
    """Number of integral ideals of each norm n ≤ X (index 0 unused)."""
    counts = [0] * (X + 1)
    for N in range(1, X + 1):
        if d is None:
            counts[N] = 1
            continue
        for c in range(1, N + 1):
            if N % c:
                continue
            a = N // c
            counts[N] += sum(1 for b in range(a) if lattice_is_ideal(d, a, b, c))
    return counts


def kronecker(D: int, m: int) -> int:
    """Kronecker symbol (D/m) for m ≥ 1 from the definition."""
    out = 1
    q = 2
    while m > 1:
        if m % q == 0:
            m //= q
            if q == 2:
                out *= 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
            else:
                r = pow(D % q, (q - 1) // 2, q)
                out *= 0 if r == 0 else (1 if r == 1 else -1)
        else:
            q += 1
    return out


def dedekind_counts_by_character(d: int, X: int) -> list[int]:
    """aₙ = Σ_{k | n} (D/k): ζ_K = ζ·L(χ_D)."""
    D = discriminant(d)
    return [0] + [sum(kronecker(D, k) for k in range(1, n + 1) if n % k == 0) for n in range(1, X + 1)]


def reduced_form_count(D: int) -> int:
    """Class number of an imaginary quadratic discriminant by reduced forms."""
    assert D < 0
    h = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, abs(b)), c) == 1:
                h += 1
        a += 1
    return h


def fundamental_unit(d: int) -> tuple[Fraction, Fraction]:
    """Smallest unit > 1 of ℚ(√d) as (x, y) with ε = x + y√d, by search."""
    half = d % 4 == 1
    for y2 in range(1, 10 ** 6):
        # ε = (u + v√d)/2 with u ≡ v mod 2 when half, else u, v even
        v = y2 if half else 2 * y2
        for sgn in (-1, 1):
            u2 = d * v * v + 4 * sgn
            u = isqrt(u2) if u2 >= 0 else -1
            if u >= 0 and u * u == u2 and (not half or (u - v) % 2 == 0) and (half or u % 2 == 0):
                return Fraction(u, 2), Fraction(v, 2)
    raise RuntimeError("no unit found")


def unit_group_mod(d: int | None, N: int) -> int:
    """|(R/NR)*| by searching for inverses among all residues."""
    if d is None:
        return sum(1 for x in range(N) if gcd(x, N) == 1)
    t, n = omega_poly(d)

    def mul(x, y):
        return ((x[0] * y[0] - n * x[1] * y[1]) % N, (x[0] * y[1] + x[1] * y[0] + t * x[1] * y[1]) % N)

    res = list(product(range(N), repeat=2))
    return sum(1 for x in res if any(mul(x, y) == (1 % N, 0) for y in res))


def brute_fixed_points(mats: list[list[list[int]]]) -> set[tuple[Fraction, ...]]:
    """Common fixed points of θ ↦ Mθ mod 1 via the denominator |det(M − I)|."""
    n = len(mats[0])
    D = 0
    for M in mats:
        A = [[M[i][j] - (i == j) for j in range(n)] for i in range(n)]
        det = A[0][0] if n == 1 else A[0][0] * A[1][1] - A[0][1] * A[1][0]
        if det:
            D = abs(det)
            break
    if D == 0:
        raise ValueError("no generator with isolated fixed points")
    out = set()
    for js in product(range(D), repeat=n):
        th = [Fraction(j, D) for j in js]
        if all(all((sum(M[i][k] * th[k] for k in range(n)) - th[i]).denominator == 1 for i in range(n))
               for M in mats):
            out.add(tuple(th))
    return out


def brute_orbits(mats: list[list[list[int]]], N: int) -> list[int]:
    """Orbit sizes on (ℤ/N)ⁿ under the group generated by integer matrices."""
    n = len(mats[0])
    seen = set()
    sizes = []
    for p in product(range(N), repeat=n):
        if p in seen:
            continue
        orb = {p}
        stack = [p]
        while stack:
            q = stack.pop()
            for M in mats:
                r = tuple(sum(M[i][k] * q[k] for k in range(n)) % N for i in range(n))
                if r not in orb:
                    orb.add(r)
                    stack.append(r)
        seen |= orb
        sizes.append(len(orb))
    return sorted(sizes)


def represented_by_form(p: int, A: int, B: int, C: int) -> bool:
    """Whether p = A x² + B x y + C y² for a positive definite form."""
    lim = isqrt(4 * p) + 2
    return any(A * x * x + B * x * y + C * y * y == p for x in range(-lim, lim + 1) for y in range(-lim, lim + 1))
