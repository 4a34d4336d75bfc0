"""Vectorized integer arithmetic on elements u + vω stored as int64 arrays."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .field import Element, Field
from .ideals import Ideal


def int_coords(e: Element) -> tuple[int, int]:
    if not e.is_integral():
        raise ValueError(f"{e} is not integral")
    x, y = e.coords()
    return int(x), int(y)


def mul(f: Field, e: Element, U: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """e·(U + Vω) for an integral e."""
    p, q = int_coords(e)
    if f.d is None:
        return p * U, np.zeros_like(U)
    return p * U - f.n * q * V, p * V + q * U + f.t * q * V


def add(e: Element, U: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p, q = int_coords(e)
    return U + p, V + q


def reduce(I: Ideal, U: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Canonical representatives in the HNF box of an integral ideal."""
    k = V // I.c
    return (U - k * I.b) % I.a, V - k * I.c


def member(I: Ideal, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    return (V % I.c == 0) & ((U - (V // I.c) * I.b) % I.a == 0)


def coords(I: Ideal, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Coordinates (shape (dim, n)) of members of I in its HNF basis."""
    n2 = V // I.c
    n1 = (U - n2 * I.b) // I.a
    if I.field.d is None:
        return n1[None, :]
    return np.stack([n1, n2])


def residues(I: Ideal) -> tuple[np.ndarray, np.ndarray]:
    """The HNF box 0 ≤ u < a, 0 ≤ v < c (u fastest), matching Ideal.residues."""
    v, u = np.divmod(np.arange(I.a * I.c, dtype=np.int64), I.a)
    return u, v


def divisible_by(f: Field, b: Element, U: np.ndarray, V: np.ndarray):
    """(mask, U', V') with U' + V'ω = (U + Vω)/b where the quotient is integral."""
    inv = b.inverse()
    den = inv.denominator()
    Uq, Vq = mul(f, inv * den, U, V)
    mask = (Uq % den == 0) & (Vq % den == 0)
    return mask, Uq // den, Vq // den


@lru_cache(maxsize=None)
def transfer_matrix(lam: Element, src: Ideal, dst: Ideal) -> np.ndarray:
    """Integer matrix of y ↦ lam·y from src-coordinates to dst-coordinates."""
    cols = [dst.coords(lam * e) for e in src.basis()]
    return np.array(cols, dtype=np.int64).T
