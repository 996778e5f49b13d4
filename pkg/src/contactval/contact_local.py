"""Contact tangency points of graph hypersurfaces and their local areas.

Model: standard contact space R^{2n+1} with form ``-dz + sum x_j dy_j``.
A hypersurface ``z = f(x, y)`` is tangent to the contact distribution
exactly where the characteristic field ``B(w) = (x, 0) + J grad f(w)``
vanishes. The linearization there, ``dB = [[I, 0], [0, 0]] + J Hess f``,
carries every local contact area.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import ndimage

from . import matnum
from .errors import ContractError, DegeneracyError, DomainError, ValidationError

GRAD_STEP = 1e-5
HESS_STEP = 1e-4
DEGENERACY_TOL = 1e-12


class NewtonDivergenceWarning(UserWarning):
    """Newton failed to converge from a grid-minimum seed."""


@dataclass
class GraphHypersurface:
    """Graph ``z = f(w)``, ``w = (x_1..x_n, y_1..y_n)``, over a box.

    Parameters
    ----------
    n : int
        Half-dimension; the graph is 2n-dimensional.
    f : callable
        Height function. May return NaN where the graph is undefined.
    domain : array_like, shape (2n, 2)
        Lower and upper bound per coordinate.
    grad_f, hess_f : callable, optional
        Analytic derivatives. Central differences are used when absent
        (step 1e-5 for gradients, 1e-4 for Hessians).
    name : str
    """

    n: int
    f: Callable[[np.ndarray], float]
    domain: np.ndarray
    grad_f: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess_f: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __post_init__(self):
        self.domain = np.asarray(self.domain, dtype=float).reshape(2 * self.n, 2)
        if np.any(self.domain[:, 0] >= self.domain[:, 1]):
            raise DomainError("domain box must have positive extent")

    def contains(self, w) -> bool:
        w = np.asarray(w, dtype=float)
        return bool(np.all(w >= self.domain[:, 0]) and np.all(w <= self.domain[:, 1]))

    def _check(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape != (2 * self.n,):
            raise DomainError(f"point must have {2 * self.n} coordinates")
        if not self.contains(w):
            raise DomainError(f"point {w} outside the domain box")
        return w

    def gradient(self, w) -> np.ndarray:
        w = self._check(w)
        if self.grad_f is not None:
            return np.asarray(self.grad_f(w), dtype=float)
        return fd_gradient(self.f, w)

    def hessian(self, w) -> np.ndarray:
        w = self._check(w)
        if self.hess_f is not None:
            return np.asarray(self.hess_f(w), dtype=float)
        return fd_hessian(self.f, w)


def fd_gradient(f, w, h=GRAD_STEP) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    g = np.empty_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = h
        g[i] = (f(w + e) - f(w - e)) / (2 * h)
    return g


def fd_hessian(f, w, h=HESS_STEP) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    m = w.size
    out = np.empty((m, m))
    f0 = f(w)
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = h
        out[i, i] = (f(w + ei) - 2 * f0 + f(w - ei)) / h**2
        for j in range(i + 1, m):
            ej = np.zeros(m)
            ej[j] = h
            v = (f(w + ei + ej) - f(w + ei - ej) - f(w - ei + ej) + f(w - ei - ej)) / (4 * h**2)
            out[i, j] = out[j, i] = v
    return out


def _diag_block(n: int) -> np.ndarray:
    d = np.zeros((2 * n, 2 * n))
    d[:n, :n] = np.eye(n)
    return d


def contact_h(n: int) -> np.ndarray:
    """Contact-distribution second fundamental form ``[[0, 0], [I, 0]]``."""
    h = np.zeros((2 * n, 2 * n))
    h[n:, :n] = np.eye(n)
    return h


def characteristic_field(F: GraphHypersurface, w) -> np.ndarray:
    """``B(w) = (x, 0) + J grad f(w)``."""
    w = F._check(w)
    n = F.n
    base = np.concatenate([w[:n], np.zeros(n)])
    return base + matnum.standard_j(n) @ F.gradient(w)


def linearized_field(F: GraphHypersurface, p) -> np.ndarray:
    """``d_pB = [[I, 0], [0, 0]] + J Hess f(p)``.

    Equivalently ``J^-1 (h - S)`` with ``h = contact_h(n)`` and
    ``S = Hess f(p)``.
    """
    return _diag_block(F.n) + matnum.standard_j(F.n) @ F.hessian(p)


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def _safe_norm(F, w) -> float:
    if not F.contains(w):
        return math.inf
    try:
        b = characteristic_field(F, w)
    except (DomainError, ValueError, ZeroDivisionError, FloatingPointError):
        return math.inf
    v = float(np.linalg.norm(b))
    return v if np.isfinite(v) else math.inf


def newton_contact(F: GraphHypersurface, seed, tol=1e-10, max_iter=50):
    """Damped Newton on ``B(w) = 0``; returns the root or None."""
    w = np.asarray(seed, dtype=float)
    r = _safe_norm(F, w)
    if not np.isfinite(r):
        return None
    polish = 0
    for _ in range(max_iter):
        if r < tol:
            polish += 1
            if polish > 2:
                break
        try:
            jac = linearized_field(F, w)
            step = np.linalg.solve(jac, -characteristic_field(F, w))
        except (np.linalg.LinAlgError, ValueError, ZeroDivisionError):
            # a singular root is still a root; the caller flags degeneracy
            return w if r < tol else None
        if not np.all(np.isfinite(step)):
            return w if r < tol else None
        t = 1.0
        for _ in range(30):
            trial = w + t * step
            rt = _safe_norm(F, trial)
            if rt < r or (rt <= tol and r <= tol):
                break
            t *= 0.5
        else:
            break
        w, r = trial, rt
    return w if r < tol else None


def grid_minima(F: GraphHypersurface, grid_per_axis: int):
    """Grid points where ``|B|`` is a local minimum over its 3^d neighbourhood."""
    axes = [np.linspace(lo, hi, grid_per_axis) for lo, hi in F.domain]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    flat = mesh.reshape(-1, 2 * F.n)
    with np.errstate(all="ignore"):
        norms = np.array([_safe_norm(F, w) for w in flat]).reshape(mesh.shape[:-1])
    norms = np.where(np.isfinite(norms), norms, np.inf)
    local = ndimage.minimum_filter(norms, size=3, mode="nearest")
    mask = (norms == local) & np.isfinite(norms)
    idx = np.argwhere(mask)
    return [(tuple(int(i) for i in cell), mesh[tuple(cell)]) for cell in idx]


@dataclass
class ContactSearch:
    points: list
    failed_cells: list = field(default_factory=list)


def search_contact_points(F: GraphHypersurface, grid_per_axis=41, tol=1e-10) -> ContactSearch:
    """Newton from every grid minimum of ``|B|``, merged and sorted.

    Seeds whose Newton run fails are collected in ``failed_cells``.

    Raises
    ------
    DegeneracyError
        A root with singular ``d_pB``.
    """
    if grid_per_axis < 4:
        raise DomainError("grid_per_axis must be at least 4")
    if tol <= 0:
        raise DomainError("tol must be positive")
    roots, failed = [], []
    with np.errstate(all="ignore"):
        for cell, seed in grid_minima(F, grid_per_axis):
            root = newton_contact(F, seed, tol=tol)
            if root is None:
                failed.append(cell)
                continue
            if all(np.linalg.norm(root - r) > 10 * tol for r in roots):
                roots.append(root)
    # second merge pass at a looser radius guards against FD jitter
    merged = []
    for r in roots:
        if all(np.linalg.norm(r - m) > 1e-7 for m in merged):
            merged.append(r)
    merged.sort(key=lambda p: tuple(np.round(p, 9)))
    for p in merged:
        d = np.linalg.det(linearized_field(F, p))
        if abs(d) < DEGENERACY_TOL:
            raise DegeneracyError(f"degenerate tangency at {p}: det dB = {d:.3e}", point=p)
    return ContactSearch(merged, failed)


def find_contact_points(F: GraphHypersurface, grid_per_axis=41, tol=1e-10) -> list:
    """Zeros of the characteristic field inside the domain.

    Newton divergence from flagged grid cells is reported as a
    ``NewtonDivergenceWarning`` listing the cells.
    """
    res = search_contact_points(F, grid_per_axis, tol)
    if res.failed_cells:
        warnings.warn(NewtonDivergenceWarning(
            f"{F.name or 'surface'}: Newton failed from grid cells {res.failed_cells}"))
    return res.points


# ---------------------------------------------------------------------------
# Local areas
# ---------------------------------------------------------------------------

@dataclass
class SecondFundamentalPair:
    """Hypersurface form ``S`` and contact-distribution form ``h``."""

    S: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        self.S = matnum.check_symmetric(self.S, tol=1e-10)
        self.h = matnum.check_square(self.h)
        if self.h.shape != self.S.shape or self.S.shape[0] % 2:
            raise ValidationError("S and h must share an even size")

    @property
    def n(self) -> int:
        return self.S.shape[0] // 2

    @property
    def A(self) -> np.ndarray:
        return self.h - self.S


def local_area_dynamical(dB, k: int) -> float:
    """``phi_k = tr ∧^{2n-k} dB / |det dB|``."""
    dB = matnum.check_square(dB)
    size = dB.shape[0]
    if k < 0 or k > size:
        raise DomainError(f"degree {k} outside [0, {size}]")
    det = np.linalg.det(dB)
    if abs(det) < DEGENERACY_TOL:
        raise DegeneracyError(f"|det dB| = {abs(det):.3e} below {DEGENERACY_TOL}")
    return matnum.compound_trace(dB, size - k) / abs(det)


def local_area_geometric(pair: SecondFundamentalPair, k: int) -> float:
    """``phi_k = C(2n,k) D((h-S)[2n-k], J[k]) / |det(h-S)|``."""
    n = pair.n
    if k < 0 or k > 2 * n:
        raise DomainError(f"degree {k} outside [0, {2 * n}]")
    a = pair.A
    det = np.linalg.det(a)
    if abs(det) < DEGENERACY_TOL:
        raise DegeneracyError(f"singular h - S (|det| = {abs(det):.3e})")
    d = matnum.mixed_discriminant([(a, 2 * n - k), (matnum.standard_j(n), k)])
    return math.comb(2 * n, k) * d / abs(det)


def odd_area_relation(pair: SecondFundamentalPair, k_odd: int, antisym_scale: float = -1.0) -> float:
    """Odd-degree area rewritten through the symmetric part of ``h``.

    With ``h = H_s + c J`` the multilinear expansion of
    ``D((H_s - S + cJ)[2n-k], J[k])`` keeps only even powers of
    ``S - H_s``::

        phi_k = C(2n,k) |det A|^-1 sum_i C(2n-k, 2i) c^(2n-k-2i) D((S-H_s)[2i], J[2n-2i])

    The default ``c = -1`` gives the sign ``(-1)^k`` in front of the sum.
    The value equals :func:`local_area_geometric` whenever the
    antisymmetric part of ``h`` is ``c J``.
    """
    if k_odd % 2 == 0:
        raise ContractError("odd_area_relation needs an odd degree")
    n = pair.n
    if k_odd < 0 or k_odd > 2 * n:
        raise DomainError(f"degree {k_odd} outside [0, {2 * n}]")
    a = pair.A
    det = np.linalg.det(a)
    if abs(det) < DEGENERACY_TOL:
        raise DegeneracyError("singular h - S")
    hs = 0.5 * (pair.h + pair.h.T)
    x = pair.S - hs
    J = matnum.standard_j(n)
    total = 0.0
    for i in range((2 * n - k_odd) // 2 + 1):
        coef = math.comb(2 * n - k_odd, 2 * i) * antisym_scale ** (2 * n - k_odd - 2 * i)
        total += coef * matnum.mixed_discriminant([(x, 2 * i), (J, 2 * n - 2 * i)])
    return math.comb(2 * n, k_odd) * total / abs(det)


def antisymmetric_scale(h) -> Optional[float]:
    """Scalar ``c`` with ``(h - h.T)/2 = c J``, or None if not proportional."""
    h = matnum.check_square(h)
    ha = 0.5 * (h - h.T)
    J = matnum.standard_j(h.shape[0] // 2)
    c = float(np.sum(ha * J) / np.sum(J * J))
    return c if np.allclose(ha, c * J, atol=1e-12) else None


@dataclass
class ContactPointReport:
    p: np.ndarray
    dB: np.ndarray
    det_dB: float
    index: int
    kind: str
    local_areas: dict
    geometric_areas: dict
    odd_areas_s_minus_h: dict
    inv_abs_det_A: float
    inv_abs_det_S: float
    chart: str = ""

    def to_dict(self) -> dict:
        return {
            "chart": self.chart,
            "p": self.p.tolist(),
            "dB": self.dB.tolist(),
            "det_dB": self.det_dB,
            "index": self.index,
            "kind": self.kind,
            "local_areas": {str(k): v for k, v in self.local_areas.items()},
            "geometric_areas": {str(k): v for k, v in self.geometric_areas.items()},
            "odd_areas_s_minus_h": {str(k): v for k, v in self.odd_areas_s_minus_h.items()},
            "inv_abs_det_A": self.inv_abs_det_A,
            "inv_abs_det_S": self.inv_abs_det_S,
        }


def contact_point_report(F: GraphHypersurface, p) -> ContactPointReport:
    """Full local data at one contact point."""
    p = np.asarray(p, dtype=float)
    n = F.n
    dB = linearized_field(F, p)
    det = float(np.linalg.det(dB))
    if abs(det) < DEGENERACY_TOL:
        raise DegeneracyError(f"degenerate tangency at {p}", point=p)
    S = F.hessian(p)
    pair = SecondFundamentalPair(0.5 * (S + S.T), contact_h(n))
    dyn = {k: local_area_dynamical(dB, k) for k in range(2 * n + 1)}
    geo = {k: local_area_geometric(pair, k) for k in range(2 * n + 1)}
    alt = {k: (-1) ** k * geo[k] for k in range(1, 2 * n + 1, 2)}
    detS = abs(np.linalg.det(pair.S))
    index = 1 if det > 0 else -1
    return ContactPointReport(
        p=p, dB=dB, det_dB=det, index=index,
        kind="elliptic" if index > 0 else "hyperbolic",
        local_areas=dyn, geometric_areas=geo, odd_areas_s_minus_h=alt,
        inv_abs_det_A=1.0 / abs(np.linalg.det(pair.A)),
        inv_abs_det_S=1.0 / detS if detS > 0 else math.inf,
        chart=F.name,
    )


def hypersurface_valuation(F: GraphHypersurface, k: int, points: Optional[Sequence] = None,
                           grid_per_axis=41, tol=1e-10) -> float:
    """Sum of ``phi_k`` over all contact points of the graph.

    Raises
    ------
    DegeneracyError
        With the offending point attached.
    """
    if points is None:
        points = find_contact_points(F, grid_per_axis, tol)
    total = 0.0
    for p in points:
        dB = linearized_field(F, p)
        try:
            total += local_area_dynamical(dB, k)
        except DegeneracyError as exc:
            raise DegeneracyError(str(exc), point=np.asarray(p)) from exc
    return total


def euler_index_sum(atlas: Sequence[GraphHypersurface], grid_per_axis=41, tol=1e-10) -> int:
    """Sum of contact indices ``sign det d_pB`` over every chart of a closed surface.

    Charts must carry disjoint sets of contact points.
    """
    total = 0
    for chart in atlas:
        for p in find_contact_points(chart, grid_per_axis, tol):
            total += int(np.sign(np.linalg.det(linearized_field(chart, p))))
    return total
