"""Cartan and weight-lattice data for type A.

Everything here is rank bookkeeping: Cartan matrices (finite and affine),
pairings of fundamental weights, the rational weights lambda_{Lambda_i}
attached to an integer weight vector, the signed partial sums lambda^(i)
entering bracket formulas, and the twisted spectral parameters used by the
evaluation maps.  Weight vectors are plain tuples (lambda_1, ..., lambda_n),
1-indexed in all formulas.

Fundamental-weight pairings are exact rationals with denominator dividing
n + 1; they are returned as Fraction values and never truncated.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import RankTooSmallError


@lru_cache(maxsize=None)
def cartan_finite(n: int) -> tuple[tuple[int, ...], ...]:
    """Cartan matrix of sl(n+1): 2 on the diagonal, -1 between neighbours.

    Entry [i-1][j-1] is the pairing (alpha_i, alpha_j).
    """
    if n < 1:
        raise ValueError(f"rank must be positive, got {n}")
    return tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n))
        for i in range(n)
    )


@lru_cache(maxsize=None)
def cartan_affine(n: int) -> tuple[tuple[int, ...], ...]:
    """Affine Cartan matrix with node 0 attached to nodes 1 and n.

    Indices run 0..n; entry [i][j] is -1 exactly when |i - j| is 1 or n.
    The n = 1 case would need a doubled bond, which none of the affine
    constructions here support, so it is rejected.
    """
    if n < 2:
        raise RankTooSmallError(f"affine data needs rank n >= 2, got n={n}")
    return tuple(
        tuple(
            2 if i == j else (-1 if abs(i - j) in (1, n) else 0)
            for j in range(n + 1)
        )
        for i in range(n + 1)
    )


def weight_pairing(n: int, i: int, j: int) -> Fraction:
    """(Lambda_i, Lambda_j) = min(i,j) - ij/(n+1)."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"fundamental weight indices must lie in 1..{n}, got ({i}, {j})")
    return min(i, j) - Fraction(i * j, n + 1)


def lambda_weight(n: int, lam: tuple, i: int) -> Fraction:
    """lambda_{Lambda_i} = sum_j lambda_j (Lambda_i, Lambda_j)."""
    return sum((lam[j - 1] * weight_pairing(n, i, j) for j in range(1, n + 1)), Fraction(0))


def lambda_split(lam: tuple, pivot: int, upto: int | None = None):
    """Signed window sum: entries left of the pivot minus entries right of it.

    With the window 1..upto (upto defaults to the full length) this is
    sum_{k < pivot} lambda_k - sum_{pivot < k <= upto} lambda_k.
    """
    if upto is None:
        upto = len(lam)
    return sum(lam[k - 1] for k in range(1, pivot)) - sum(
        lam[k - 1] for k in range(pivot + 1, upto + 1)
    )


def support(lam: tuple) -> tuple[int, ...]:
    """1-based indices of the nonzero entries."""
    return tuple(i for i, x in enumerate(lam, start=1) if x)


def eval_parameter(backend, n: int, lam: tuple, a, sign: str):
    """Twisted spectral parameter fed to the evaluation map.

    Plus case: a * eps^(-lambda_{Lambda_1} + lambda_{Lambda_n} + n).
    Minus case: a * (-1)^(n+1) * eps^(lambda_{Lambda_1} - lambda_{Lambda_n} + 2n + 1).

    The weight exponents are rational; on the exact backend they must be
    admissible for eps_pow (automatic when gcd(l, n+1) = 1), otherwise
    NonInvertibleDenominatorError propagates.
    """
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    w1 = lambda_weight(n, lam, 1)
    wn = lambda_weight(n, lam, n)
    if sign == "+":
        return a * backend.eps_pow(_as_exponent(-w1 + wn + n))
    val = a * backend.eps_pow(_as_exponent(w1 - wn + 2 * n + 1))
    if (n + 1) % 2 == 0:
        return val
    return -val


def _as_exponent(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    return x
