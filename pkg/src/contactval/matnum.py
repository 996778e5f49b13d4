"""Small dense matrix kernels: Pfaffian, skew canonical form, mixed
discriminants, compound traces, Euler secant numbers and Beta functions.

All routines are pure functions of their arguments.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import linalg, special

from .errors import DimensionError, DomainError, PoleError, ValidationError

SYMMETRY_TOL = 1e-12


def standard_j(n: int) -> np.ndarray:
    """Standard complex structure ``[[0, -I], [I, 0]]`` of size 2n."""
    if n < 0:
        raise DomainError("n must be non-negative")
    z = np.zeros((n, n))
    eye = np.eye(n)
    return np.block([[z, -eye], [eye, z]])


def sdiag(lambdas: Sequence[float]) -> np.ndarray:
    """Block-diagonal skew matrix with blocks ``[[0, l], [-l, 0]]``."""
    lam = np.asarray(lambdas, dtype=float)
    out = np.zeros((2 * lam.size, 2 * lam.size))
    for i, l in enumerate(lam):
        out[2 * i, 2 * i + 1] = l
        out[2 * i + 1, 2 * i] = -l
    return out


def check_square(a, name="matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def check_skew(a, even=True) -> np.ndarray:
    """Validate antisymmetry (1e-12 per entry) and, optionally, even size."""
    a = check_square(a, "skew matrix")
    if even and a.shape[0] % 2:
        raise DimensionError(f"skew matrix must have even size, got {a.shape[0]}")
    if a.size and np.max(np.abs(a + a.T)) > SYMMETRY_TOL:
        raise ValidationError("matrix is not antisymmetric")
    return a


def check_symmetric(a, tol=SYMMETRY_TOL) -> np.ndarray:
    a = check_square(a, "symmetric matrix")
    if a.size and np.max(np.abs(a - a.T)) > tol:
        raise ValidationError("matrix is not symmetric")
    return a


# ---------------------------------------------------------------------------
# Pfaffian
# ---------------------------------------------------------------------------

def _pf_recursive(a: np.ndarray) -> float:
    m = a.shape[0]
    if m == 0:
        return 1.0
    if m == 2:
        return a[0, 1]
    total = 0.0
    rest = np.arange(1, m)
    for j in range(1, m):
        if a[0, j] == 0.0:
            continue
        keep = rest[rest != j]
        sign = -1.0 if (j - 1) % 2 else 1.0
        total += sign * a[0, j] * _pf_recursive(a[np.ix_(keep, keep)])
    return total


def _pf_parlett_reid(a: np.ndarray) -> float:
    # Skew-preserving Gaussian elimination with pivoting.
    a = a.copy()
    m = a.shape[0]
    pf = 1.0
    for k in range(0, m - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < m:
            tau = a[k, k + 2:] / a[k, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, a[k + 2:, k + 1]) - np.outer(a[k + 2:, k + 1], tau)
    return pf


def pfaffian(a) -> float:
    """Pfaffian of an even-size antisymmetric matrix.

    Uses the recursive row expansion for sizes up to 8 and skew
    Parlett-Reid elimination beyond that.

    Parameters
    ----------
    a : array_like, shape (2N, 2N)

    Returns
    -------
    float
        ``Pf(a)``, with ``Pf(a)**2 == det(a)``.
    """
    a = check_skew(a)
    if a.shape[0] <= 8:
        return float(_pf_recursive(a))
    return float(_pf_parlett_reid(a))


def pfaffian_batch(a: np.ndarray) -> np.ndarray:
    """Vectorized Pfaffian over a stack ``(N, 2m, 2m)`` of skew matrices."""
    a = np.asarray(a, dtype=float)
    m = a.shape[-1]
    if m % 2:
        raise DimensionError("skew matrices must have even size")
    if m == 0:
        return np.ones(a.shape[:-2])
    if m == 2:
        return a[..., 0, 1]
    total = np.zeros(a.shape[:-2])
    rest = np.arange(1, m)
    for j in range(1, m):
        keep = rest[rest != j]
        sign = -1.0 if (j - 1) % 2 else 1.0
        total = total + sign * a[..., 0, j] * pfaffian_batch(a[..., keep[:, None], keep[None, :]])
    return total


# ---------------------------------------------------------------------------
# Skew canonical form
# ---------------------------------------------------------------------------

def skew_canonical(a, tol: float = 1e-12):
    """Normal form ``a = B.T @ sdiag(lam) @ B`` of a skew matrix.

    Built on the real Schur form ``a = Z T Z^T``: for a normal matrix ``T``
    is block diagonal, each 2x2 block ``[[0, l], [-l, 0]]`` giving one skew
    singular value. One-dimensional zero blocks are paired into ``lam = 0``.

    Parameters
    ----------
    a : array_like, shape (2N, 2N)
        Antisymmetric matrix.
    tol : float
        Values below ``tol`` times the largest one are treated as zero.

    Returns
    -------
    lam : ndarray, shape (N,)
        Skew singular values sorted descending.
    B : ndarray, shape (2N, 2N)
        Orthogonal matrix with ``det(B) prod(lam) = Pf(a)``.
    """
    a = check_skew(a)
    size = a.shape[0]
    if size == 0:
        return np.zeros(0), np.zeros((0, 0))
    T, Z = linalg.schur(a, output="real")
    scale = max(float(np.max(np.abs(T))), 1.0)
    pairs, kernel = [], []
    i = 0
    while i < size:
        if i + 1 < size and abs(T[i + 1, i]) > tol * scale:
            lam = 0.5 * (T[i, i + 1] - T[i + 1, i])
            u, v = Z[:, i], Z[:, i + 1]
            pairs.append((lam, u, v) if lam > 0 else (-lam, v, u))
            i += 2
        else:
            kernel.append(Z[:, i])
            i += 1
    pairs.sort(key=lambda p: -p[0])
    rows = [r for _, u, v in pairs for r in (u, v)] + kernel
    basis = np.array(rows)
    lam_out = np.zeros(size // 2)
    lam_out[:len(pairs)] = [p[0] for p in pairs]
    # Pf(a) = det(B) prod(lam); with a zero block the sign of B is free
    if kernel and np.linalg.det(basis) < 0:
        basis[-1] = -basis[-1]
    return lam_out, basis


def skew_spectrum_batch(a: np.ndarray) -> np.ndarray:
    """Skew singular values (descending) for a stack of skew matrices."""
    a = np.asarray(a, dtype=float)
    evals = np.linalg.eigvalsh(np.swapaxes(a, -1, -2) @ a)
    evals = np.clip(evals[..., ::-1], 0.0, None)
    return np.sqrt(evals[..., 0::2])


# ---------------------------------------------------------------------------
# Mixed discriminants and compound traces
# ---------------------------------------------------------------------------

def _expand_blocks(blocks):
    mats, mult = [], []
    for m, k in blocks:
        m = check_square(m)
        if int(k) != k or k < 0:
            raise DimensionError("multiplicities must be non-negative integers")
        mats.append(m)
        mult.append(int(k))
    if not mats:
        raise DimensionError("no blocks given")
    size = mats[0].shape[0]
    if any(m.shape[0] != size for m in mats):
        raise DimensionError("blocks must share a common size")
    if sum(mult) != size:
        raise DimensionError(
            f"multiplicities sum to {sum(mult)}, matrix size is {size}")
    return mats, mult, size


def mixed_discriminant_polarization(blocks) -> float:
    """Mixed discriminant by inclusion-exclusion over subsets of slots.

    ``D(A_1, ..., A_N) = (1/N!) sum_S (-1)^(N-|S|) det(sum_{i in S} A_i)``.
    """
    mats, mult, size = _expand_blocks(blocks)
    slots = [m for m, k in zip(mats, mult) for _ in range(k)]
    if size == 0:
        return 1.0
    total = 0.0
    for r in range(1, size + 1):
        sign = (-1) ** (size - r)
        for subset in itertools.combinations(range(size), r):
            total += sign * np.linalg.det(sum(slots[i] for i in subset))
    return total / math.factorial(size)


def mixed_discriminant_permutations(blocks) -> float:
    """Mixed discriminant as the average over all slot-to-column assignments.

    Brute force; intended as a test oracle for sizes up to about 6.
    """
    mats, mult, size = _expand_blocks(blocks)
    slots = [m for m, k in zip(mats, mult) for _ in range(k)]
    total = 0.0
    for tau in itertools.permutations(range(size)):
        b = np.column_stack([slots[tau[j]][:, j] for j in range(size)])
        total += np.linalg.det(b)
    return total / math.factorial(size)


def _two_block_subset(a, ka, b, kb) -> float:
    size = a.shape[0]
    total = 0.0
    for cols in itertools.combinations(range(size), kb):
        m = a.copy()
        m[:, cols] = b[:, cols]
        total += np.linalg.det(m)
    return total / math.comb(size, kb)


def mixed_discriminant(blocks) -> float:
    """Mixed discriminant ``D(M_1[m_1], ..., M_r[m_r])``.

    Parameters
    ----------
    blocks : sequence of (matrix, multiplicity)
        Multiplicities must sum to the common matrix size.

    Notes
    -----
    Two blocks use the column-subset formula
    ``D(A[N-k], B[k]) = C(N,k)^-1 sum_{|I|=k} det(A with columns I from B)``.
    Otherwise the subset-polarization formula is used.
    """
    mats, mult, size = _expand_blocks(blocks)
    live = [(m, k) for m, k in zip(mats, mult) if k > 0]
    if size == 0:
        return 1.0
    if len(live) == 1:
        return float(np.linalg.det(live[0][0]))
    if len(live) == 2:
        (a, ka), (b, kb) = live
        return float(_two_block_subset(a, ka, b, kb))
    return float(mixed_discriminant_polarization(live))


def compound_trace(a, m: int) -> float:
    """``tr ∧^m a``, the m-th elementary symmetric function of the eigenvalues.

    Read off as the coefficient of ``t^(N-m)`` in ``det(tI + a)``.
    """
    a = check_square(a)
    size = a.shape[0]
    if int(m) != m or m < 0 or m > size:
        raise DomainError(f"compound degree {m} outside [0, {size}]")
    m = int(m)
    if m == 0:
        return 1.0
    if m == size:
        return float(np.linalg.det(a))
    coeffs = np.poly(a)  # det(tI - a)
    return float(np.real((-1) ** m * coeffs[m]))


def principal_minor_sum(a, m: int) -> float:
    """Sum of all m x m principal minors (exhaustive oracle)."""
    a = check_square(a)
    if m == 0:
        return 1.0
    return float(sum(np.linalg.det(a[np.ix_(idx, idx)])
                     for idx in itertools.combinations(range(a.shape[0]), m)))


# ---------------------------------------------------------------------------
# Exact tables and special functions
# ---------------------------------------------------------------------------

def euler_secant(N: int) -> list[int]:
    """Signed Euler (secant) numbers ``E_0, E_2, ..., E_2N``.

    From the recurrence ``sum_l C(2j, 2l) E_2l = 0`` for ``j >= 1``,
    which is the statement ``sech(x) cosh(x) = 1``.
    """
    if N < 0:
        raise DomainError("N must be non-negative")
    e = [1]
    for j in range(1, N + 1):
        e.append(-sum(math.comb(2 * j, 2 * l) * e[l] for l in range(j)))
    return e


def binomial_even_matrix(n: int) -> list[list[Fraction]]:
    """Lower-triangular matrix ``A(m, j) = C(2m, 2j)`` for ``0 <= m, j <= n``."""
    return [[Fraction(math.comb(2 * m, 2 * j)) for j in range(n + 1)]
            for m in range(n + 1)]


def binomial_even_inverse(n: int) -> list[list[Fraction]]:
    """Closed-form inverse ``A^-1(j, m) = C(2j, 2m) E_{2j-2m}``."""
    e = euler_secant(n)
    return [[Fraction(math.comb(2 * j, 2 * m) * e[j - m]) if m <= j else Fraction(0)
             for m in range(n + 1)] for j in range(n + 1)]


def log_beta(a: float, b: float) -> float:
    """``log B(a, b)`` for positive arguments via log-Gamma."""
    if a <= 0 or b <= 0:
        raise DomainError("log_beta needs positive arguments; use beta_continued")
    return float(special.gammaln(a) + special.gammaln(b) - special.gammaln(a + b))


def _is_pole(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def beta_continued(a: float, b: float) -> float:
    """Beta function continued to negative non-integer arguments.

    ``B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)``; Gamma on the negative
    axis is obtained by reflection. A pole of ``Gamma(a + b)`` gives 0.

    Raises
    ------
    PoleError
        If ``a`` or ``b`` is a non-positive integer.
    """
    if _is_pole(a) or _is_pole(b):
        raise PoleError(f"Gamma pole at B({a}, {b})")
    if a > 0 and b > 0:
        return math.exp(log_beta(a, b))
    return float(special.gamma(a) * special.gamma(b) * special.rgamma(a + b))


def gamma_reflected(x: float) -> float:
    """Gamma via the reflection formula for ``x < 1/2`` (independent oracle)."""
    if _is_pole(x):
        raise PoleError(f"Gamma pole at {x}")
    if x >= 0.5:
        return math.gamma(x)
    return math.pi / (math.sin(math.pi * x) * gamma_reflected(1.0 - x))
