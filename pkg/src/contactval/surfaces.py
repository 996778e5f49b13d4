"""Built-in surfaces and the surface-spec mini-language.

Every surface is delivered as an atlas of graph charts in the canonical
contact model ``-dz + sum x_j dy_j``. Closed surfaces use an upper and a
lower sheet; each sheet returns NaN outside the region it covers.

Spec strings::

    sphere R            round sphere for the rotation-invariant form dz = x dy - y dx
    ellipsoid a b c     axis-aligned ellipsoid, canonical model
    torus R r           torus of revolution, canonical model, centre shifted off-axis
    quadratic q11 ... qNN   f = 1/2 w^T Q w, Q given row-major (size 2n x 2n)
    poly e,e:c e,e:c ...    polynomial term list; exponents over (x_1..x_n, y_1..y_n)

``poly`` and ``quadratic`` accept a trailing ``box=L`` to set the domain
``[-L, L]^{2n}`` (default 2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .contact_local import GraphHypersurface
from .errors import DomainError, ValidationError


@dataclass
class Surface:
    """Atlas of graph charts plus bookkeeping."""

    spec: str
    charts: list
    closed: bool = False
    euler_characteristic: Optional[int] = None
    notes: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.charts[0].n


def sphere_charts(R: float, contact_scale: float = 1.0) -> list:
    """Round sphere of radius ``R`` for the form ``dz = c (x dy - y dx)``.

    The map ``(x', y', z') = (2cx, y, z + cxy)`` carries that form to the
    canonical one, so each hemisphere becomes the graph
    ``z' = ±sqrt(R^2 - (x'/2c)^2 - y'^2) + x'y'/2``.
    """
    if R <= 0 or contact_scale <= 0:
        raise DomainError("radius and contact scale must be positive")
    c2 = contact_scale**2

    def make(sig):
        def g(w):
            return R**2 - w[0] ** 2 / (4 * c2) - w[1] ** 2

        def f(w):
            q = g(w)
            return sig * math.sqrt(q) + 0.5 * w[0] * w[1] if q > 0 else np.nan

        def grad(w):
            u, v = w
            s = np.sqrt(g(w))
            return np.array([sig * (-u / (4 * c2)) / s + v / 2, sig * (-v) / s + u / 2])

        def hess(w):
            u, v = w
            q = g(w)
            s = np.sqrt(q)
            fuu = sig * (-1 / (4 * c2 * s) - u**2 / (16 * c2**2 * q * s))
            fvv = sig * (-1 / s - v**2 / (q * s))
            fuv = sig * (-u * v / (4 * c2 * q * s)) + 0.5
            return np.array([[fuu, fuv], [fuv, fvv]])

        dom = [[-2 * contact_scale * R, 2 * contact_scale * R], [-R, R]]
        return GraphHypersurface(1, f, dom, grad, hess, name=f"sphere {'upper' if sig > 0 else 'lower'}")

    return [make(1.0), make(-1.0)]


def sphere_phi2_closed_form(R: float, contact_scale: float = 1.0) -> float:
    """``phi_2`` of the round sphere for ``dz = c (x dy - y dx)``: ``8 / (1 + c^-2 R^-2)``."""
    return 8.0 / (1.0 + 1.0 / (contact_scale**2 * R**2))


def ellipsoid_charts(a: float, b: float, c: float, center=(0.0, 0.0, 0.0)) -> list:
    """Ellipsoid ``((x-x0)/a)^2 + ((y-y0)/b)^2 + ((z-z0)/c)^2 = 1``."""
    if min(a, b, c) <= 0:
        raise DomainError("semi-axes must be positive")
    x0, y0, z0 = center

    def make(sig):
        def g(w):
            return 1 - ((w[0] - x0) / a) ** 2 - ((w[1] - y0) / b) ** 2

        def f(w):
            q = g(w)
            return z0 + sig * c * math.sqrt(q) if q > 0 else np.nan

        def grad(w):
            s = np.sqrt(g(w))
            return sig * c * np.array([-(w[0] - x0) / a**2, -(w[1] - y0) / b**2]) / s

        def hess(w):
            q = g(w)
            s = np.sqrt(q)
            dq = np.array([-2 * (w[0] - x0) / a**2, -2 * (w[1] - y0) / b**2])
            ddq = np.diag([-2 / a**2, -2 / b**2])
            return sig * c * (ddq / (2 * s) - np.outer(dq, dq) / (4 * q * s))

        dom = [[x0 - a, x0 + a], [y0 - b, y0 + b]]
        return GraphHypersurface(1, f, dom, grad, hess, name=f"ellipsoid {'upper' if sig > 0 else 'lower'}")

    return [make(1.0), make(-1.0)]


def torus_charts(R: float, r: float, center=(0.7, 0.3, 0.0)) -> list:
    """Torus of revolution about a vertical axis through ``center``.

    The axis is kept off ``x = 0``; with the axis through the origin the
    tangencies on the top and bottom circles are degenerate.
    """
    if not 0 < r < R:
        raise DomainError("need 0 < r < R")
    a, b, z0 = center
    if a == 0:
        raise DomainError("axis through x = 0 gives degenerate tangencies")

    def make(sig):
        def parts(w):
            X, Y = w[0] - a, w[1] - b
            rho = math.hypot(X, Y)
            d = rho - R
            return X, Y, rho, d, r**2 - d**2

        def f(w):
            *_, rho, d, q = parts(w)
            return z0 + sig * math.sqrt(q) if q > 0 and rho > 0 else np.nan

        def grad(w):
            X, Y, rho, d, q = parts(w)
            nrho = np.array([X, Y]) / rho
            return sig * (-d * nrho) / np.sqrt(q)

        def hess(w):
            X, Y, rho, d, q = parts(w)
            nrho = np.array([X, Y]) / rho
            hrho = (np.eye(2) - np.outer(nrho, nrho)) / rho
            s = np.sqrt(q)
            out = np.outer(nrho, nrho) / s + d * hrho / s + d**2 * np.outer(nrho, nrho) / (q * s)
            return -sig * out

        dom = [[a - R - r, a + R + r], [b - R - r, b + R + r]]
        return GraphHypersurface(1, f, dom, grad, hess, name=f"torus {'upper' if sig > 0 else 'lower'}")

    return [make(1.0), make(-1.0)]


def quadratic_chart(Q, box: float = 2.0) -> GraphHypersurface:
    """Graph ``f = 1/2 w^T Q w`` over ``[-box, box]^{2n}``."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] % 2:
        raise ValidationError("quadratic form must be an even square matrix")
    Q = 0.5 * (Q + Q.T)
    n = Q.shape[0] // 2
    dom = [[-box, box]] * (2 * n)
    return GraphHypersurface(n, lambda w: 0.5 * w @ Q @ w, dom,
                             lambda w: Q @ w, lambda w: Q, name="quadratic")


def polynomial_chart(terms: Sequence, box: float = 2.0) -> GraphHypersurface:
    """Graph of ``f = sum c * prod w_i^{e_i}`` from ``(exponents, coef)`` pairs."""
    if not terms:
        raise ValidationError("polynomial needs at least one term")
    exps = np.array([t[0] for t in terms], dtype=int)
    coefs = np.array([t[1] for t in terms], dtype=float)
    if exps.ndim != 2 or exps.shape[1] % 2 or exps.shape[1] == 0:
        raise ValidationError("exponent vectors must share an even length 2n")
    if np.any(exps < 0):
        raise ValidationError("exponents must be non-negative")
    m = exps.shape[1]

    def mono(w, e):
        return np.prod(w ** e, axis=-1)

    def f(w):
        return float(coefs @ mono(w, exps))

    def grad(w):
        g = np.zeros(m)
        for i in range(m):
            e = exps.copy()
            fac = e[:, i].astype(float)
            e[:, i] = np.maximum(e[:, i] - 1, 0)
            g[i] = np.sum(coefs * fac * mono(w, e))
        return g

    def hess(w):
        h = np.zeros((m, m))
        for i in range(m):
            for j in range(m):
                e = exps.copy()
                fac = e[:, i].astype(float)
                e[:, i] = np.maximum(e[:, i] - 1, 0)
                fac = fac * e[:, j]
                e[:, j] = np.maximum(e[:, j] - 1, 0)
                h[i, j] = np.sum(coefs * fac * mono(w, e))
        return h

    return GraphHypersurface(m // 2, f, [[-box, box]] * m, grad, hess, name="poly")


def _split_box(tokens):
    box = 2.0
    rest = []
    for t in tokens:
        if t.startswith("box="):
            box = float(t[4:])
        else:
            rest.append(t)
    return rest, box


def parse_surface(spec: str) -> Surface:
    """Build a :class:`Surface` from a spec string or a JSON file path.

    JSON files hold either ``{"surface": "<spec string>"}`` or
    ``{"terms": [[[e1, ..., e2n], coef], ...], "box": L}``.
    """
    text = spec.strip()
    path = Path(text)
    if text.endswith(".json") and path.exists():
        data = json.loads(path.read_text())
        if "surface" in data:
            return parse_surface(data["surface"])
        chart = polynomial_chart(data["terms"], float(data.get("box", 2.0)))
        return Surface(spec=text, charts=[chart])
    tokens = text.split()
    if not tokens:
        raise ValidationError("empty surface spec")
    kind, args = tokens[0].lower(), tokens[1:]
    try:
        if kind == "sphere":
            (R,) = map(float, args)
            return Surface(text, sphere_charts(R), closed=True, euler_characteristic=2,
                           notes={"phi2_closed_form": sphere_phi2_closed_form(R)})
        if kind == "ellipsoid":
            a, b, c = map(float, args)
            return Surface(text, ellipsoid_charts(a, b, c), closed=True, euler_characteristic=2)
        if kind == "torus":
            R, r = map(float, args)
            return Surface(text, torus_charts(R, r), closed=True, euler_characteristic=0)
        if kind == "quadratic":
            rest, box = _split_box(args)
            vals = np.array([float(t) for t in rest])
            size = int(round(math.sqrt(vals.size)))
            if size * size != vals.size:
                raise ValidationError("quadratic needs a square number of entries")
            return Surface(text, [quadratic_chart(vals.reshape(size, size), box)])
        if kind == "poly":
            rest, box = _split_box(args)
            terms = []
            for t in rest:
                e, c = t.split(":")
                terms.append(([int(x) for x in e.split(",")], float(c)))
            return Surface(text, [polynomial_chart(terms, box)])
    except ValueError as exc:
        if isinstance(exc, (ValidationError, DomainError)):
            raise
        raise ValidationError(f"cannot parse surface spec {spec!r}: {exc}") from exc
    raise ValidationError(f"unknown surface kind {kind!r}")
