"""Independent reference computations used by the tests.

Operators are applied to kets stored as ``{(n_a, n_b): amplitude}`` dicts in
the untruncated Fock space, so nothing here shares code with the library's
matrix construction.
"""
from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

SQ2 = math.sqrt(2.0)

# a word is a list of (mode, dagger) letters applied right to left
LADDER = {
    "a": [(1.0, [("A", False)])],
    "ad": [(1.0, [("A", True)])],
    "b": [(1.0, [("B", False)])],
    "bd": [(1.0, [("B", True)])],
}


def _apply_letter(letter, ket):
    mode, dagger = letter
    out = defaultdict(complex)
    for (na, nb), c in ket.items():
        n = na if mode == "A" else nb
        if dagger:
            amp, m = math.sqrt(n + 1), n + 1
        else:
            if n == 0:
                continue
            amp, m = math.sqrt(n), n - 1
        key = (m, nb) if mode == "A" else (na, m)
        out[key] += c * amp
    return out


def apply_word(word, ket):
    for letter in reversed(word):
        ket = _apply_letter(letter, ket)
    return ket


def poly_mul(p, q):
    return [(cp * cq, wp + wq) for cp, wp in p for cq, wq in q]


def poly_add(*ps):
    return [t for p in ps for t in p]


def poly_scale(c, p):
    return [(c * k, w) for k, w in p]


def quadratures(mode):
    lo, hi = (mode, False), (mode, True)
    x = [(1 / SQ2, [lo]), (1 / SQ2, [hi])]
    p = [(1 / (SQ2 * 1j), [lo]), (-1 / (SQ2 * 1j), [hi])]
    return x, p


def matrix_of(poly, n_max_a, n_max_b):
    """Matrix of a ladder polynomial, columns computed without truncation."""
    da, db = n_max_a + 1, n_max_b + 1
    m = np.zeros((da * db, da * db), dtype=complex)
    for ia in range(da):
        for ib in range(db):
            col = ia * db + ib
            for c, word in poly:
                for (na, nb), amp in apply_word(word, {(ia, ib): 1.0}).items():
                    if na < da and nb < db:
                        m[na * db + nb, col] += c * amp
    return m


def spin_polys():
    a, ad, b, bd = ("A", False), ("A", True), ("B", False), ("B", True)
    sx = [(0.5, [bd, a]), (0.5, [ad, b])]
    sy = [(1 / 2j, [bd, a]), (-1 / 2j, [ad, b])]
    sz = [(0.5, [bd, b]), (-0.5, [ad, a])]
    return sx, sy, sz


def ket_vector(amps, n_max_a, n_max_b):
    v = np.zeros((n_max_a + 1) * (n_max_b + 1), dtype=complex)
    for na, nb, c in amps:
        v[na * (n_max_b + 1) + nb] = c
    return v / np.linalg.norm(v)


def dm(v):
    return np.outer(v, v.conj())


def random_density(dim, rng, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def ptrace_loops(m, da, db, keep):
    """Partial trace written with explicit index loops."""
    if keep == "A":
        out = np.zeros((da, da), dtype=complex)
        for i in range(da):
            for j in range(da):
                out[i, j] = sum(m[i * db + k, j * db + k] for k in range(db))
    else:
        out = np.zeros((db, db), dtype=complex)
        for i in range(db):
            for j in range(db):
                out[i, j] = sum(m[k * db + i, k * db + j] for k in range(da))
    return out


def tmsv_min_variance(r):
    return math.exp(-2 * r) / 2
