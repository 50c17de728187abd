"""Convolution against left Haar weights.

Three execution paths:

* direct summation through the division table idx[x, y] = y^{-1} x,
* a spectral path for finite abelian models (multidimensional FFT over the
  declared cyclic factors),
* interpolated quadrature summation on the affine model.

Every result carries the fraction of product mass dropped at a truncation
boundary in its ``leak`` metadata.  The convention is convolve(a, b) = a * b
with (a*b)(x) = sum_y w_y a(y) b(y^{-1} x); the operator wrapper realizes
the right-factor map g -> g * f whose operator norm is the tempered norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceError
from .groups import (KIND_FINITE, GroupModel, _AffineCarrier, _LatticeCarrier)
from .space import GFunction, lp_norm

DENSE_CAP = 4096
_CHUNK = 256


def _fft_shape(model: GroupModel):
    factors = model.cyclic_factors
    if factors is None or model.kind != KIND_FINITE:
        return None
    return tuple(factors)


def _direct_values(g: GFunction, f: GFunction) -> np.ndarray:
    model = g.group
    idx = model.division_table()
    weighted = model.weights * g.values
    fv = np.concatenate([f.values, [0.0]])  # -1 sentinel gathers the zero pad
    out = np.empty(model.n, dtype=np.complex128)
    for start in range(0, model.n, _CHUNK):
        stop = min(start + _CHUNK, model.n)
        out[start:stop] = fv[idx[start:stop]] @ weighted
    return out


def _affine_values(g: GFunction, f: GFunction) -> np.ndarray:
    model = g.group
    carrier: _AffineCarrier = model.carrier
    iu_all, _ = carrier.split(np.arange(model.n))
    u = carrier.coords[:, 0]
    b = carrier.coords[:, 1]
    ext, cum = carrier.b_prefix(f.values)
    weighted = model.weights * g.values
    out = np.zeros(model.n, dtype=np.complex128)
    # (g*f)(x) = sum_y w_y g(y) f(y^{-1} x): the u shift u_x - u_y is exact
    # on the grid, the b argument e^{-u_y} (b_x - b_y) is averaged over the
    # compressed image of each source cell (see averaged_rows).
    for start in range(0, model.n, _CHUNK):
        stop = min(start + _CHUNK, model.n)
        rows = iu_all[None, :] - iu_all[start:stop][:, None] + carrier.k_u
        comp = np.exp(-u[start:stop])[:, None]
        tau_c = comp * (b[None, :] - b[start:stop][:, None])
        tau_h = 0.5 * comp * carrier.h_b
        block = carrier.averaged_rows(ext, cum, rows, tau_c - tau_h, tau_c + tau_h)
        out += weighted[start:stop] @ block
    return out


def _product_leak(g: GFunction, f: GFunction) -> float:
    """Fraction of |g| x |f| product mass landing outside the window."""
    model = g.group
    mg = model.weights * np.abs(g.values)
    mf = model.weights * np.abs(f.values)
    total = float(mg.sum() * mf.sum())
    if total == 0.0:
        return 0.0
    carrier = model.carrier
    leaked = 0.0
    if isinstance(carrier, _LatticeCarrier):
        support_g = np.nonzero(mg)[0]
        support_f = np.nonzero(mf)[0]
        if len(support_g) == 0 or len(support_f) == 0:
            return 0.0
        cg = carrier.to_coords(support_g)
        cf = carrier.to_coords(support_f)
        out = np.any(np.abs(cg[:, None, :] + cf[None, :, :]) > carrier.radius, axis=2)
        leaked = float(np.sum(mg[support_g][:, None] * mf[support_f][None, :] * out))
    elif isinstance(carrier, _AffineCarrier):
        support_g = np.nonzero(mg)[0]
        support_f = np.nonzero(mf)[0]
        if len(support_g) == 0 or len(support_f) == 0:
            return 0.0
        ug = carrier.coords[support_g, 0][:, None]
        bg = carrier.coords[support_g, 1][:, None]
        uf = carrier.coords[support_f, 0][None, :]
        bf = carrier.coords[support_f, 1][None, :]
        pu = ug + uf
        pb = np.exp(ug) * bf + bg
        out = ~carrier.inside(pu, pb)
        leaked = float(np.sum(mg[support_g][:, None] * mf[support_f][None, :] * out))
    return leaked / total


def convolve(g: GFunction, f: GFunction, *, path: str = "auto") -> GFunction:
    """g * f against the left Haar weights of the shared model.

    ``path`` is "auto", "direct", or "spectral"; the spectral path exists
    only on finite abelian models and agrees with the direct path to 1e-10
    relative.  The result's ``leak`` field carries the fraction of product
    mass dropped at the truncation boundary (always 0 on finite models).
    """
    g.group.require_same(f.group)
    model = g.group

    if path not in ("auto", "direct", "spectral"):
        raise ValueError(f"unknown convolution path {path!r}")

    shape = _fft_shape(model)
    if path == "spectral" and shape is None:
        raise ResourceError("spectral path needs a finite model with declared cyclic factors")

    use_spectral = shape is not None and path in ("auto", "spectral")
    if use_spectral:
        w0 = float(model.weights[0])
        gs = np.fft.fftn(g.values.reshape(shape))
        fs = np.fft.fftn(f.values.reshape(shape))
        values = w0 * np.fft.ifftn(gs * fs).reshape(-1)
        return GFunction(model, values, 0.0)

    if isinstance(model.carrier, _AffineCarrier):
        values = _affine_values(g, f)
        leak = _product_leak(g, f)
        return GFunction(model, values, leak)

    values = _direct_values(g, f)
    leak = 0.0 if model.kind == KIND_FINITE else _product_leak(g, f)
    return GFunction(model, values, leak)


@dataclass
class ConvOperator:
    """The right-convolution map g -> g * f.

    ``realization`` is "dense" (materialized matrix with entries
    M[x, y] = w_y f(y^{-1} x)) or "matvec" (apply via convolve).  Dense
    materialization is capped at n <= 4096.
    """

    f: GFunction
    realization: str = "auto"
    _matrix: np.ndarray | None = None

    def __post_init__(self):
        n = self.f.group.n
        if self.realization == "auto":
            self.realization = "dense" if n <= DENSE_CAP else "matvec"
        elif self.realization == "dense" and n > DENSE_CAP:
            raise ResourceError(f"dense operator for n={n} exceeds the cap {DENSE_CAP}")

    @property
    def group(self) -> GroupModel:
        return self.f.group

    def matrix(self) -> np.ndarray:
        if self.realization != "dense":
            raise ResourceError("operator is matrix-free; use apply()")
        if self._matrix is None:
            self._matrix = _operator_matrix(self.f)
        return self._matrix

    def weighted_matrix(self, p) -> np.ndarray:
        """D^{1/p} M D^{-1/p}: the similarity that turns the Haar-weighted
        p -> p operator norm into the plain matrix p-norm."""
        from .space import Exponent
        exp = Exponent.of(p)
        w = self.group.weights
        scale_left = w ** (1.0 / exp.p)
        scale_right = w ** (-1.0 / exp.p)
        return scale_left[:, None] * self.matrix() * scale_right[None, :]

    def apply(self, g: GFunction) -> GFunction:
        if self.realization == "dense" and self._matrix is not None:
            self.group.require_same(g.group)
            return GFunction(self.group, self._matrix @ g.values)
        return convolve(g, self.f, path="direct" if self.group.kind == KIND_FINITE else "auto")


def _operator_matrix(f: GFunction) -> np.ndarray:
    model = f.group
    n = model.n
    real_input = bool(np.all(f.values.imag == 0.0))
    dtype = np.float64 if real_input else np.complex128
    fv_base = f.values.real if real_input else f.values

    if isinstance(model.carrier, _AffineCarrier):
        carrier = model.carrier
        iu_all, _ = carrier.split(np.arange(n))
        u = carrier.coords[:, 0]
        b = carrier.coords[:, 1]
        ext, cum = carrier.b_prefix(fv_base)
        out = np.empty((n, n), dtype=dtype)
        for start in range(0, n, _CHUNK):
            stop = min(start + _CHUNK, n)
            rows = iu_all[:, None] - iu_all[start:stop][None, :] + carrier.k_u
            comp = np.exp(-u[start:stop])[None, :]
            tau_c = comp * (b[:, None] - b[start:stop][None, :])
            tau_h = 0.5 * comp * carrier.h_b
            out[:, start:stop] = carrier.averaged_rows(ext, cum, rows,
                                                       tau_c - tau_h, tau_c + tau_h)
        return out * model.weights[None, :]

    idx = model.division_table()
    fv = np.concatenate([fv_base, [0.0]])
    return fv[idx] * model.weights[None, :]


def conv_operator(f: GFunction, realization: str = "auto") -> ConvOperator:
    return ConvOperator(f, realization)


def associativity_check(f: GFunction, g: GFunction, h: GFunction) -> float:
    """L2 norm of (f*g)*h - f*(g*h); bounded by 1e-10 on finite models where
    the Fubini exchange is a finite sum.  Uses the direct summation path so
    that Dirac triples cancel exactly."""
    left = convolve(convolve(f, g, path="direct"), h, path="direct")
    right = convolve(f, convolve(g, h, path="direct"), path="direct")
    return lp_norm(left - right, 2)
