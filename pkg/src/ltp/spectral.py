"""Fourier analysis on finite abelian models: character tables, the
Plancherel transform pair, and the L2 identities that tie the tempered norm
to the sup norm of the transform.

Character phases are reduced with integer arithmetic before the complex
exponential, so orthogonality and Plancherel residuals stay near machine
precision up to n = 1024 and beyond.

Normalization pairing: counting weights on the group side pair with weights
1/n on the dual, probability weights pair with counting weights on the dual;
either way ||f||_2 = ||fhat||_2 holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import NotAbelianError, ResourceError
from .groups import (COUNTING, PROBABILITY, KIND_FINITE, GroupModel, GroupSpec,
                     _CyclicCarrier, _ProductCarrier)
from .convolve import convolve
from .space import GFunction, ess_sup, inner, lp_norm
from .tempered import tempered_norm

DUAL_CAP = 2048


@dataclass
class DualModel:
    """Character table and Plancherel normalization for a finite abelian model.

    ``characters[k, j] = chi_k(x_j)``; the dual carrier is the same product
    of cyclics with the paired Haar weights, so functions of characters are
    ordinary :class:`GFunction` values over ``dual_group``.
    """

    base: GroupModel
    dual_group: GroupModel
    characters: np.ndarray = field(repr=False)

    @property
    def dual_weights(self) -> np.ndarray:
        return self.dual_group.weights


def build_dual(model: GroupModel) -> DualModel:
    """Characters of a declared product of cyclic groups.

    Raises :class:`NotAbelianError` when the model does not expose cyclic
    factors (only declared products carry an exact character table).
    """
    cached = model._cache.get("dual")
    if cached is not None:
        return cached
    factors = model.cyclic_factors
    if model.kind != KIND_FINITE or factors is None:
        raise NotAbelianError(
            f"{model.name} is not a declared product of cyclic groups")
    n = model.n
    if n > DUAL_CAP:
        raise ResourceError(f"character table for n={n} exceeds the cap {DUAL_CAP}")

    tables = []
    for size in factors:
        j = np.arange(size, dtype=np.int64)
        phase = (np.outer(j, j) % size).astype(np.float64) / size
        tables.append(np.exp(2j * np.pi * phase))
    characters = reduce(np.kron, tables)

    if model.normalization == COUNTING:
        dual_weights = np.full(n, 1.0 / n)
        dual_norm = PROBABILITY
    else:
        dual_weights = np.ones(n)
        dual_norm = COUNTING

    if len(factors) == 1:
        dual_carrier = _CyclicCarrier(factors[0])
    else:
        dual_carrier = _ProductCarrier([_CyclicCarrier(m) for m in factors])
    dual_spec = GroupSpec(f"dual({model.spec.text})", "product" if len(factors) > 1 else "cyclic",
                          tuple(factors), dual_norm)
    dual_group = GroupModel(kind=KIND_FINITE, spec=dual_spec, carrier=dual_carrier,
                            weights=dual_weights, modular=np.ones(n),
                            normalization=dual_norm, name=dual_spec.text)
    dual = DualModel(base=model, dual_group=dual_group, characters=characters)
    model._cache["dual"] = dual
    return dual


# ---------------------------------------------------------------------------
# Transform pair
# ---------------------------------------------------------------------------


def fourier(dual: DualModel, f: GFunction) -> GFunction:
    """fhat(chi) = sum_j w_j f(x_j) conj(chi(x_j)), as a function on the dual."""
    dual.base.require_same(f.group)
    values = np.conj(dual.characters) @ (dual.base.weights * f.values)
    return GFunction(dual.dual_group, values)


def inverse_fourier(dual: DualModel, g: GFunction) -> GFunction:
    """g_check(x) = sum_k w'_k g(chi_k) chi_k(x), back on the base model."""
    dual.dual_group.require_same(g.group)
    values = dual.characters.T @ (dual.dual_weights * g.values)
    return GFunction(dual.base, values)


def character_orthogonality_residual(dual: DualModel) -> float:
    """max |<chi_k, chi_l> - c delta_kl| with c forced by the normalization."""
    weighted = dual.characters * dual.base.weights[None, :]
    gram = weighted @ np.conj(dual.characters.T)
    c = float(np.sum(dual.base.weights))
    return float(np.max(np.abs(gram - c * np.eye(dual.base.n))))


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


def convolution_theorem_check(dual: DualModel, f: GFunction, g: GFunction) -> float:
    """||(f*g)^ - fhat ghat||_2 on the dual."""
    lhs = fourier(dual, convolve(f, g))
    fg = fourier(dual, f).values * fourier(dual, g).values
    return lp_norm(GFunction(dual.dual_group, lhs.values - fg), 2)


def product_theorem_check(dual: DualModel, f: GFunction, g: GFunction) -> float:
    """||(fg)^ - fhat * ghat||_2, the dual-side convolution against dual weights."""
    lhs = fourier(dual, GFunction(f.group, f.values * g.values))
    rhs = convolve(fourier(dual, f), fourier(dual, g))
    return lp_norm(GFunction(dual.dual_group, lhs.values - rhs.values), 2)


def inverse_product_check(dual: DualModel, f: GFunction, g: GFunction) -> float:
    """||(fg)ˇ - fˇ*gˇ||_2 for f, g on the dual (the inverse-transform mirror)."""
    dual.dual_group.require_same(f.group)
    dual.dual_group.require_same(g.group)
    lhs = inverse_fourier(dual, GFunction(f.group, f.values * g.values))
    rhs = convolve(inverse_fourier(dual, f), inverse_fourier(dual, g))
    return lp_norm(GFunction(dual.base, lhs.values - rhs.values), 2)


def parseval_check(dual: DualModel, f: GFunction, g: GFunction) -> float:
    """|<f, g_check> - <fhat, g>| for f on the group and g on the dual."""
    dual.base.require_same(f.group)
    dual.dual_group.require_same(g.group)
    lhs = inner(f, inverse_fourier(dual, g))
    rhs = inner(fourier(dual, f), g)
    return abs(lhs - rhs)


def plancherel_residual(dual: DualModel, f: GFunction) -> float:
    return abs(lp_norm(f, 2) - lp_norm(fourier(dual, f), 2))


def roundtrip_residual(dual: DualModel, f: GFunction) -> float:
    back = inverse_fourier(dual, fourier(dual, f))
    return float(np.max(np.abs(back.values - f.values)))


# ---------------------------------------------------------------------------
# Tempered norms through the transform
# ---------------------------------------------------------------------------


def tempered_norm_spectral(dual: DualModel, f: GFunction, on_side: str = "group") -> float:
    """The L2 tempered norm read off the transform: max |fhat| for functions
    on the group, max |f_check| for functions on the dual."""
    if on_side == "group":
        return ess_sup(fourier(dual, f))
    if on_side == "dual":
        return ess_sup(inverse_fourier(dual, f))
    raise ValueError(f"on_side must be 'group' or 'dual', got {on_side!r}")


def mult_operator_norm(f: GFunction) -> float:
    """Operator norm of g -> f g on weighted L2: the essential sup of |f|.

    Cross-checked by the witness g = normalized indicator of an argmax cell,
    whose Rayleigh ratio attains the value exactly.
    """
    mask = f.group.weights > 0
    if not np.any(mask) or f.is_zero:
        return 0.0
    magnitudes = np.abs(f.values)
    best = int(np.argmax(np.where(mask, magnitudes, -1.0)))
    value = float(magnitudes[best])
    witness = np.zeros(f.group.n)
    witness[best] = 1.0
    g = GFunction(f.group, witness)
    attained = lp_norm(GFunction(f.group, f.values * g.values), 2) / lp_norm(g, 2)
    if abs(attained - value) > 1e-12 * max(1.0, value):
        raise AssertionError("multiplication-operator witness failed to attain the sup")
    return value


def plancherel_restricted_isometry(dual: DualModel, f: GFunction,
                                   method: str = "exact_svd") -> tuple[float, float]:
    """Both sides of the restricted-isometry identity
    ||f||_2^T + ||f||_inf  =  ||fhat||_inf + ||fhat||_2^T.

    The dual-side tempered norm is computed from the dual convolution
    operator itself (not via the cross identity), so the comparison is a
    genuine two-route check.
    """
    fhat = fourier(dual, f)
    lhs = tempered_norm(f, 2, method=method).value + ess_sup(f)
    rhs = ess_sup(fhat) + tempered_norm(fhat, 2, method=method).value
    return lhs, rhs
