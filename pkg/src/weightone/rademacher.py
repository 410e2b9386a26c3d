"""Truncated vector-valued weight-1/2 Rademacher sums.

The partial sum runs over bottom rows (c, d) with 0 <= c < K, |d| < K^2 of a
level-n group, each completed deterministically to a matrix; the c = 0
stratum contributes exactly the polar term q^(-1/4m) on the basis vector with
index 1.  The convergence kernel is the truncated half-integral exponential
series with principal-branch square roots.  No convergence is asserted
anywhere: the module reports partial sums and Cauchy differences only.

Multipliers are pluggable: any callable mapping an integer matrix to a
complex matrix works.  The default is the dual theta multiplier, evaluated
through the exact Weil matrices (with its structural zeros exact) and
corrected to the principal branch.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable

import numpy as np

from .sl2 import Mat, Sl2Word, word_decompose
from .weil import get_weil_rep, lift_class, local_spaces

TWO_PI_I = 2j * math.pi


def _e(x) -> complex:
    return cmath.exp(TWO_PI_I * complex(x))


class ThetaDualMultiplier:
    """nu(gamma) for the index-m theta vector, on the principal branch.

    The matrix is the transpose of the exact Weil matrix of the canonical
    word of gamma, with the sign corrected so the branch is the principal
    sqrt(c tau + d); entries that vanish in the field are exact complex
    zeros.  Local factors are memoized by their residue data, so sweeps over
    many representatives stay cheap.
    """

    def __init__(self, m: int):
        self.m = m
        self.spaces = local_spaces(m)
        self.reps = [get_weil_rep(sp) for sp in self.spaces]
        self._memo: list[dict] = [{} for _ in self.spaces]
        # index maps from Z/2m to the local coordinates
        n = 2 * m
        self._coords = []
        for sp in self.spaces:
            self._coords.append(np.array([x % sp.size for x in range(n)]))

    @property
    def dim(self) -> int:
        return 2 * self.m

    def _local_matrix(self, i: int, word: Sl2Word) -> np.ndarray:
        sp = self.spaces[i]
        cond = sp.conductor
        a, b, c, d = word.mat()
        key = (a % cond, b % cond, c % cond, d % cond)
        flip = 1
        if sp.kind == "D":
            bit = lift_class(word)
            stored = self._memo[i].get(key)
            if stored is None:
                mat = self.reps[i].evaluate_word(word).to_complex_array()
                self._memo[i][key] = (bit, mat)
                return mat
            bit0, mat = stored
            flip = bit * bit0
            return mat if flip == 1 else -mat
        stored = self._memo[i].get(key)
        if stored is None:
            stored = self.reps[i].evaluate_word(word).to_complex_array()
            self._memo[i][key] = stored
        return stored

    def __call__(self, gamma: Mat) -> np.ndarray:
        word = word_decompose(gamma)
        locs = [self._local_matrix(i, word) for i in range(len(self.spaces))]
        n = self.dim
        out = np.ones((n, n), dtype=complex)
        for loc, coord in zip(locs, self._coords):
            out = out * loc[np.ix_(coord, coord)]
        return word.principal_sign() * out.T


@dataclass
class RademacherParams:
    """Data of a truncated Rademacher sum."""

    level: int
    index: int
    multiplier: Callable[[Mat], np.ndarray] | None = None
    truncation: int = 5
    kernel_depth: int = 30

    def __post_init__(self):
        if self.level < 1 or self.index < 1 or self.truncation < 1 or self.kernel_depth < 1:
            raise ValueError("level, index, truncation and depth must be positive")
        if self.multiplier is None:
            self.multiplier = ThetaDualMultiplier(self.index)
        t_val = self.multiplier((1, 1, 0, 1))[1, 1]
        want = _e(Fraction(1, 4 * self.index))
        if abs(t_val - want) > 1e-9:
            raise ValueError("multiplier must send T to e(1/4m) on component 1")
        ident = self.multiplier((1, 0, 0, 1))
        if not np.allclose(ident, np.eye(ident.shape[0]), atol=1e-12):
            raise ValueError("multiplier must send the identity to the identity")


def kernel_r(alpha, gamma: Mat, tau: complex, depth: int) -> complex:
    """Convergence kernel: 1 on the translation subgroup, else the truncated
    half-integral exponential series with principal branches.

    The truncation error is bounded by the first omitted term.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    a, b, c, d = gamma
    if c == 0:
        return 1.0 + 0j
    w = complex(alpha) / (c * (c * tau + d))
    z = -TWO_PI_I * w
    if z == 0:
        return 0j
    root = cmath.sqrt(z)
    total = 0j
    term = root
    for k in range(depth):
        total += term / math.gamma(k + 1.5)
        term *= z
    return _e(w) * total


def coset_reps(level: int, K: int) -> list[Mat]:
    """One matrix per translation coset with 0 <= c < K, |d| < K^2, c = 0 mod level.

    The completion (a, b) takes the least nonnegative a inverse to d mod c;
    the c = 0 stratum contributes exactly the identity.
    """
    if K < 1:
        raise ValueError("K must be positive")
    out: list[Mat] = [(1, 0, 0, 1)]
    for c in range(level, K, level):
        for d in range(-K * K + 1, K * K):
            if gcd(c, d) != 1:
                continue
            a = pow(d, -1, c)
            b = (a * d - 1) // c
            out.append((a, b, c, d))
    return out


def truncated_sum(params: RademacherParams, tau: complex) -> np.ndarray:
    """Partial Rademacher sum at tau over the K-truncated coset list."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    m = params.index
    alpha = Fraction(-1, 4 * m)
    total = None
    for gamma in coset_reps(params.level, params.truncation):
        a, b, c, d = gamma
        nu = params.multiplier(gamma)
        if total is None:
            total = np.zeros(nu.shape[0], dtype=complex)
        col = nu[:, 1]
        phase = cmath.exp(TWO_PI_I * complex(alpha) * (a * tau + b) / (c * tau + d))
        scale = 1.0 / cmath.sqrt(c * tau + d)
        total = total + col * phase * scale * kernel_r(alpha, gamma, tau, params.kernel_depth)
    return total


def term_vectors(params: RademacherParams, tau: complex):
    """Yield the per-representative summands (diagnostic view of the sum)."""
    m = params.index
    alpha = Fraction(-1, 4 * m)
    for gamma in coset_reps(params.level, params.truncation):
        a, b, c, d = gamma
        nu = params.multiplier(gamma)
        col = nu[:, 1]
        phase = cmath.exp(TWO_PI_I * complex(alpha) * (a * tau + b) / (c * tau + d))
        scale = 1.0 / cmath.sqrt(c * tau + d)
        yield gamma, col * phase * scale * kernel_r(alpha, gamma, tau, params.kernel_depth)


def cauchy_table(params: RademacherParams, tau: complex, truncations: list[int]) -> list[tuple]:
    """Rows (K, component, real, imag, cauchy_delta) across a ladder of K values."""
    rows = []
    prev = None
    for K in truncations:
        p = RademacherParams(params.level, params.index, params.multiplier,
                             K, params.kernel_depth)
        vec = truncated_sum(p, tau)
        for r, v in enumerate(vec):
            delta = abs(v - prev[r]) if prev is not None else float("nan")
            rows.append((K, r, v.real, v.imag, delta))
        prev = vec
    return rows


def write_diagnostics_csv(path: str, rows: list[tuple]):
    with open(path, "w") as f:
        f.write("K,component,real,imag,cauchy_delta\n")
        for K, r, re, im, delta in rows:
            f.write(f"{K},{r},{re!r},{im!r},{delta!r}\n")
