"""Exact contact-sphere tables in rational arithmetic.

For the contact sphere ``S^{2n+1}`` and its even-dimensional great
subspheres ``S^{2m}``:

* ``phi[k][m] = phi_{2k}(S^{2m}) = 2 C(2m, 2k)``
* ``psi[k][m] = psi_{2k}(S^{2m})``, constant ``2 b_k`` for ``m >= k``
* ``c[k][j]`` with ``psi_{2k} = sum_j c[k][j] phi_{2j}``

with ``b_k = (-1)^kappa / (kappa! (2n+1)^kappa)``, ``kappa = min(k, n+1-k)``.
The ``kappa!`` factor is carried under two conventions: ``"kappa-factorial"`` keeps
it, ``"mass-normalized"`` drops it.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import matnum
from .errors import ConsistencyError, DomainError, ValidationError

VARIANTS = ("kappa-factorial", "mass-normalized")


def kappa(k: int, n: int) -> int:
    """``min(k, n + 1 - k)`` for degree ``2k`` on ``S^{2n+1}``."""
    return min(k, n + 1 - k)


def _check_n(n):
    if int(n) != n or n < 0:
        raise DomainError("n must be a non-negative integer")
    return int(n)


def _check_variant(variant):
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")


def phi_table(n: int) -> list[list[Fraction]]:
    """``phi[k][m] = 2 C(2m, 2k)``, zero for ``k > m``."""
    n = _check_n(n)
    return [[Fraction(2 * math.comb(2 * m, 2 * k)) for m in range(n + 1)]
            for k in range(n + 1)]


def b_coefficients(n: int, variant: str = "kappa-factorial") -> list[Fraction]:
    n = _check_n(n)
    _check_variant(variant)
    out = []
    for k in range(n + 1):
        kp = kappa(k, n)
        val = Fraction((-1) ** kp, (2 * n + 1) ** kp)
        if variant == "kappa-factorial":
            val /= math.factorial(kp)
        out.append(val)
    return out


def psi_table(n: int, variant: str = "kappa-factorial") -> list[list[Fraction]]:
    """``psi[k][m] = 2 b_k`` for ``k <= m``, else 0."""
    b = b_coefficients(n, variant)
    return [[2 * b[k] if k <= m else Fraction(0) for m in range(n + 1)]
            for k in range(n + 1)]


def crofton_coefficients_solve(n: int, variant: str = "kappa-factorial") -> list[list[Fraction]]:
    """``c`` from the triangular system ``psi[k][m] = sum_{j=k}^{m} c[k][j] phi[j][m]``."""
    phi = phi_table(n)
    psi = psi_table(n, variant)
    c = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for k in range(n + 1):
        for m in range(k, n + 1):
            acc = psi[k][m] - sum(c[k][j] * phi[j][m] for j in range(k, m))
            c[k][m] = acc / phi[m][m]
    return c


def crofton_coefficients_closed(n: int, variant: str = "kappa-factorial") -> list[list[Fraction]]:
    """``c[k][j] = b_k sum_{m=k}^{j} C(2j, 2m) E_{2j-2m}``."""
    b = b_coefficients(n, variant)
    e = matnum.euler_secant(n)
    return [[b[k] * sum(math.comb(2 * j, 2 * m) * e[j - m] for m in range(k, j + 1))
             if j >= k else Fraction(0) for j in range(n + 1)] for k in range(n + 1)]


def crofton_coefficients(n: int, variant: str = "kappa-factorial") -> list[list[Fraction]]:
    """Upper-triangular ``c`` matrix, computed two ways and compared exactly.

    Raises
    ------
    ConsistencyError
        If the triangular solve and the Euler-number closed form differ.
    """
    solved = crofton_coefficients_solve(n, variant)
    closed = crofton_coefficients_closed(n, variant)
    if solved != closed:
        raise ConsistencyError(f"c-matrix paths disagree for n={n}")
    return solved


def psi_from_c_phi(c, phi) -> list[list[Fraction]]:
    size = len(c)
    return [[sum(c[k][j] * phi[j][m] for j in range(size)) for m in range(size)]
            for k in range(size)]


def binomial_inverse_holds(n: int) -> bool:
    """Exact check ``A A^-1 = I`` for ``A(m, j) = C(2m, 2j)``."""
    a = matnum.binomial_even_matrix(n)
    ai = matnum.binomial_even_inverse(n)
    size = n + 1
    prod = [[sum(a[i][l] * ai[l][j] for l in range(size)) for j in range(size)]
            for i in range(size)]
    return all(prod[i][j] == (1 if i == j else 0) for i in range(size) for j in range(size))


def as_strings(table) -> list[list[str]]:
    return [[str(x) for x in row] for row in table]


def as_floats(table) -> list[list[float]]:
    return [[float(x) for x in row] for row in table]


def convexity_gap(S, m: int) -> float:
    """``C(2n, m) det(I + SJ) - tr ∧^m (I + SJ)`` for PSD ``S`` and even ``m``.

    Raises
    ------
    ValidationError
        If ``S`` is not symmetric PSD (eigenvalues below -1e-10).
    """
    S = matnum.check_symmetric(S, tol=1e-10)
    size = S.shape[0]
    if size % 2:
        raise ValidationError("S must have even size")
    if m % 2 or m < 0 or m > size:
        raise DomainError("m must be an even integer in [0, 2n]")
    if size and np.min(np.linalg.eigvalsh(S)) < -1e-10:
        raise ValidationError("S is not positive semidefinite")
    M = np.eye(size) + S @ matnum.standard_j(size // 2)
    return math.comb(size, m) * float(np.linalg.det(M)) - matnum.compound_trace(M, m)
