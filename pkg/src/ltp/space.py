"""Functions on group models: Lp norms, weighted L1, and the elementary
transforms (reflection, modular reflection, real/imaginary/positive parts,
L1 + Linf splitting), plus Dirac translations and the empirical modular
estimate.

Norms accumulate through numpy's pairwise summation, which keeps the tight
tolerances used by the verification suites meaningful on carriers up to
2^20 cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, WindowLeakError
from .groups import (KIND_FINITE, KIND_LATTICE, KIND_QUADRATURE, OUT_OF_WINDOW,
                     GroupModel, _AffineCarrier, _LatticeCarrier)

DEFAULT_MAX_LEAK = 1e-6


# ---------------------------------------------------------------------------
# Exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponent:
    """A Lebesgue exponent p in [1, inf) with its conjugate q, 1/p + 1/q = 1.

    q is math.inf when p == 1.
    """

    p: float
    q: float

    @classmethod
    def of(cls, p) -> "Exponent":
        if isinstance(p, Exponent):
            return p
        p = float(p)
        if not (p >= 1.0) or not math.isfinite(p):
            raise DomainError(f"exponent p must lie in [1, inf), got {p}")
        q = math.inf if p == 1.0 else p / (p - 1.0)
        return cls(p, q)

    def __post_init__(self):
        if self.p < 1.0:
            raise DomainError(f"exponent p must be >= 1, got {self.p}")
        if math.isfinite(self.q):
            if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-15:
                raise DomainError(f"p={self.p} and q={self.q} are not conjugate")
        elif self.p != 1.0:
            raise DomainError("q = inf is only conjugate to p = 1")


# ---------------------------------------------------------------------------
# GFunction
# ---------------------------------------------------------------------------


@dataclass
class GFunction:
    """A complex-valued function on a group model.

    ``leak`` records the fraction of mass dropped at the truncation boundary
    by the operation that produced this function (0 for exact operations).
    """

    group: GroupModel
    values: np.ndarray
    leak: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.dtype.kind != "c":
            values = values.astype(np.complex128)
        else:
            values = values.astype(np.complex128, copy=False)
        if values.shape != (self.group.n,):
            raise DomainError(
                f"values have shape {values.shape}, expected ({self.group.n},)")
        if not np.all(np.isfinite(values.view(np.float64))):
            raise DomainError("values must be finite (no NaN/Inf)")
        self.values = values

    def copy(self) -> "GFunction":
        return GFunction(self.group, self.values.copy(), self.leak)

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.values.imag == 0.0))

    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    def __add__(self, other: "GFunction") -> "GFunction":
        self.group.require_same(other.group)
        return GFunction(self.group, self.values + other.values)

    def __sub__(self, other: "GFunction") -> "GFunction":
        self.group.require_same(other.group)
        return GFunction(self.group, self.values - other.values)

    def __mul__(self, scalar) -> "GFunction":
        return GFunction(self.group, self.values * scalar)

    __rmul__ = __mul__


def from_values(group: GroupModel, values) -> GFunction:
    return GFunction(group, np.asarray(values))


# ---------------------------------------------------------------------------
# Norms and pairings
# ---------------------------------------------------------------------------


def lp_norm(f: GFunction, p) -> float:
    """(sum_i w_i |f_i|^p)^(1/p); pass p = inf (or use ess_sup) for the sup."""
    if isinstance(p, float) and math.isinf(p):
        return ess_sup(f)
    exp = Exponent.of(p)
    absf = np.abs(f.values)
    if exp.p == 1.0:
        return float(np.sum(f.group.weights * absf))
    if exp.p == 2.0:
        return float(math.sqrt(np.sum(f.group.weights * absf * absf)))
    return float(np.sum(f.group.weights * absf ** exp.p) ** (1.0 / exp.p))


def ess_sup(f: GFunction) -> float:
    """Essential supremum: max |f| over positive-weight cells."""
    mask = f.group.weights > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(f.values[mask])))


def weighted_l1_norm(f: GFunction, q) -> float:
    """sum_i w_i |f_i| Delta(x_i)^(-1/q), the weighted-L1 norm with
    weight Delta^(-1/q).  Accepts q directly or an Exponent (whose q is used).
    """
    if isinstance(q, Exponent):
        q = q.q
    q = float(q)
    if math.isinf(q):
        omega = 1.0
    else:
        omega = f.group.modular ** (-1.0 / q)
    return float(np.sum(f.group.weights * np.abs(f.values) * omega))


def inner(f: GFunction, g: GFunction) -> complex:
    """Haar pairing sum_i w_i f_i conj(g_i)."""
    f.group.require_same(g.group)
    return complex(np.sum(f.group.weights * f.values * np.conj(g.values)))


# ---------------------------------------------------------------------------
# Elementary transforms
# ---------------------------------------------------------------------------


def decompose_l1_linf(f: GFunction) -> tuple[GFunction, GFunction]:
    """Split f = f*chi_A + f*chi_{complement} with A = {|f| <= 1}.

    The first part has ess-sup at most 1; the parts sum to f bit-exactly.
    """
    small = np.abs(f.values) <= 1.0
    bounded = np.where(small, f.values, 0.0)
    integrable = np.where(small, 0.0, f.values)
    return GFunction(f.group, bounded), GFunction(f.group, integrable)


def reflect(f: GFunction, max_leak: float = DEFAULT_MAX_LEAK) -> GFunction:
    """The reflection x -> f(x^{-1})."""
    model = f.group
    if model.kind == KIND_QUADRATURE and isinstance(model.carrier, _AffineCarrier):
        carrier = model.carrier
        u = carrier.coords[:, 0]
        b = carrier.coords[:, 1]
        ui, bi = carrier.inverse_coords(u, b)
        values = carrier.interp(f.values, ui, bi)
        leak = _affine_forward_leak(f, ui, bi)
        if leak > max_leak:
            raise WindowLeakError(
                f"support escapes the window under inversion (leak {leak:.3e})", leak)
        return GFunction(model, values, leak)
    idx = model.inverses
    return GFunction(model, f.values[idx])


def modular_reflect(f: GFunction, p, max_leak: float = DEFAULT_MAX_LEAK) -> GFunction:
    """Delta(x)^(-1/p) * f(x^{-1}); coincides with reflect on unimodular models."""
    exp = Exponent.of(p)
    reflected = reflect(f, max_leak=max_leak)
    factor = f.group.modular ** (-1.0 / exp.p)
    return GFunction(f.group, factor * reflected.values, reflected.leak)


def real_part(f: GFunction) -> GFunction:
    return GFunction(f.group, f.values.real.astype(np.complex128))


def imag_part(f: GFunction) -> GFunction:
    return GFunction(f.group, f.values.imag.astype(np.complex128))


def _require_real(f: GFunction):
    if not f.is_real:
        raise DomainError("positive/negative parts need a real-valued function")


def positive_part(f: GFunction) -> GFunction:
    _require_real(f)
    return GFunction(f.group, np.maximum(f.values.real, 0.0))


def negative_part(f: GFunction) -> GFunction:
    _require_real(f)
    return GFunction(f.group, np.maximum(-f.values.real, 0.0))


# ---------------------------------------------------------------------------
# Dirac translations
# ---------------------------------------------------------------------------

LEFT_DIRAC = "left_dirac"
RIGHT_DIRAC = "right_dirac"


def _mass(f: GFunction) -> float:
    return float(np.sum(f.group.weights * np.abs(f.values)))


def _affine_forward_leak(f: GFunction, target_u, target_b) -> float:
    """Mass fraction of f whose cells map outside the window under a map
    sending the cell at index i to exact coordinates (target_u[i], target_b[i])."""
    carrier: _AffineCarrier = f.group.carrier
    total = _mass(f)
    if total == 0.0:
        return 0.0
    outside = ~carrier.inside(target_u, target_b)
    leaked = float(np.sum((f.group.weights * np.abs(f.values))[outside]))
    return leaked / total


def _index_leak(f: GFunction, targets: np.ndarray) -> float:
    total = _mass(f)
    if total == 0.0:
        return 0.0
    outside = targets == OUT_OF_WINDOW
    leaked = float(np.sum((f.group.weights * np.abs(f.values))[outside]))
    return leaked / total


def resolve_point(model: GroupModel, x):
    """Resolve a group point given as an index, lattice coordinates, or, on
    the affine model, an (a, b) pair with a > 0.

    Returns ``("index", i)`` or ``("affine", (u, b))``; affine coordinates
    may lie off-grid.
    """
    if isinstance(x, (int, np.integer)):
        i = int(x)
        if not 0 <= i < model.n:
            raise DomainError(f"index {i} out of range for n={model.n}")
        return ("index", i)
    if isinstance(x, (tuple, list)) and isinstance(model.carrier, _AffineCarrier):
        a, b = float(x[0]), float(x[1])
        if a <= 0:
            raise DomainError("affine points need a > 0")
        return ("affine", (math.log(a), b))
    if isinstance(x, (tuple, list)) and isinstance(model.carrier, _LatticeCarrier):
        idx = int(model.carrier.from_coords(np.asarray(x, dtype=np.int64)))
        if idx == OUT_OF_WINDOW:
            raise DomainError(f"lattice point {x} lies outside the window")
        return ("index", idx)
    raise DomainError(f"cannot interpret {x!r} as a point of {model.name}")


def point_modular(model: GroupModel, x) -> float:
    """Delta at a resolved point (exact coordinates allowed on affine models)."""
    kind, value = resolve_point(model, x)
    if kind == "index":
        return float(model.modular[value])
    u, _ = value
    return math.exp(-u)


def translate(f: GFunction, x, side: str = LEFT_DIRAC,
              max_leak: float = DEFAULT_MAX_LEAK) -> GFunction:
    """Dirac translation of f by the point x.

    * ``left_dirac``: delta_x * f, i.e. t -> f(x^{-1} t)
    * ``right_dirac``: f * delta_x, i.e. t -> Delta(x)^{-1} f(t x^{-1})

    Quadrature models evaluate off-grid arguments by interpolation (exact in
    the u coordinate for on-grid x).  Raises :class:`WindowLeakError` when
    more than ``max_leak`` of the mass leaves the window.
    """
    if side not in (LEFT_DIRAC, RIGHT_DIRAC):
        raise DomainError(f"side must be left_dirac or right_dirac, got {side!r}")
    model = f.group
    kind, value = resolve_point(model, x)

    if isinstance(model.carrier, _AffineCarrier):
        return _affine_translate(f, kind, value, side, max_leak)

    i = value
    all_idx = np.arange(model.n)
    inv_x = int(model.inv(i))
    if side == LEFT_DIRAC:
        source = np.asarray(model.op(inv_x, all_idx))
        targets = np.asarray(model.op(i, all_idx))
        scale = 1.0
    else:
        source = np.asarray(model.op(all_idx, inv_x))
        targets = np.asarray(model.op(all_idx, i))
        scale = 1.0 / float(model.modular[i])

    values = np.where(source == OUT_OF_WINDOW, 0.0, f.values[np.clip(source, 0, None)])
    leak = _index_leak(f, targets)
    if leak > max_leak:
        raise WindowLeakError(
            f"translation leaks {leak:.3e} of the mass out of the window", leak)
    return GFunction(model, scale * values, leak)


def _affine_translate(f: GFunction, kind: str, value, side: str,
                      max_leak: float) -> GFunction:
    model = f.group
    carrier: _AffineCarrier = model.carrier
    if kind == "index":
        u_x = float(carrier.u_of(value))
        b_x = float(carrier.b_of(value))
    else:
        u_x, b_x = value
    u = carrier.coords[:, 0]
    b = carrier.coords[:, 1]

    if side == LEFT_DIRAC:
        # f(x^{-1} t) with x^{-1} t = (u_t - u_x, e^{-u_x} (b_t - b_x))
        eval_u = u - u_x
        eval_b = math.exp(-u_x) * (b - b_x)
        fwd_u = u + u_x
        fwd_b = math.exp(u_x) * b + b_x
        scale = 1.0
    else:
        # Delta(x)^{-1} f(t x^{-1}) with t x^{-1} = (u_t - u_x, b_t - b_x e^{u_t - u_x})
        eval_u = u - u_x
        eval_b = b - b_x * np.exp(u - u_x)
        fwd_u = u + u_x
        fwd_b = np.exp(u) * b_x + b
        scale = math.exp(u_x)

    values = scale * carrier.interp(f.values, eval_u, eval_b)
    leak = _affine_forward_leak(f, fwd_u, fwd_b)
    if leak > max_leak:
        raise WindowLeakError(
            f"translation leaks {leak:.3e} of the mass out of the window", leak)
    return GFunction(model, values, leak)


# ---------------------------------------------------------------------------
# Empirical modular estimate
# ---------------------------------------------------------------------------


def estimate_modular(model: GroupModel, x, probe: GFunction | None = None,
                     max_leak: float = DEFAULT_MAX_LEAK) -> float:
    """Estimate Delta(x) as (sum w probe) / (sum w probe(. x)).

    Finite and lattice models are unimodular and return exactly 1.0.  On
    quadrature models the probe must be supported well inside the window;
    :class:`WindowLeakError` is raised when the translated support drops
    more than ``max_leak`` of its mass.
    """
    if model.kind in (KIND_FINITE, KIND_LATTICE):
        resolve_point(model, x)
        return 1.0
    if isinstance(model.carrier, _LatticeCarrier):
        # real-line quadrature: exact integer shifts, unimodular
        resolve_point(model, x)
        return 1.0

    carrier: _AffineCarrier = model.carrier
    if probe is None:
        from .groups import _affine_bump_probe
        probe = GFunction(model, _affine_bump_probe(carrier))
    kind, value = resolve_point(model, x)
    if kind == "index":
        u_x = float(carrier.u_of(value))
        b_x = float(carrier.b_of(value))
    else:
        u_x, b_x = value

    u = carrier.coords[:, 0]
    b = carrier.coords[:, 1]
    # probe(t x) with t x = (u_t + u_x, e^{u_t} b_x + b_t)
    shifted = carrier.interp(probe.values, u + u_x, np.exp(u) * b_x + b)
    # support cells of the probe must pull back into the window: the cell at
    # s contributes iff s x^{-1} is representable
    su, sb = carrier.coords[:, 0], carrier.coords[:, 1]
    back_u = su - u_x
    back_b = sb - b_x * np.exp(su - u_x)
    leak = _affine_forward_leak(probe, back_u, back_b)
    if leak > max_leak:
        raise WindowLeakError(
            f"probe support leaks {leak:.3e} under translation", leak)

    num = float(np.sum(model.weights * probe.values.real))
    den = float(np.sum(model.weights * shifted.real))
    if den <= 0.0:
        raise WindowLeakError("translated probe has no mass left in the window", 1.0)
    return num / den


# ---------------------------------------------------------------------------
# Named generators (shared by the CLI and the suites)
# ---------------------------------------------------------------------------


def dirac(model: GroupModel, x: int | None = None) -> GFunction:
    """Indicator of a single cell (the identity by default)."""
    values = np.zeros(model.n)
    values[model.identity if x is None else int(x)] = 1.0
    return GFunction(model, values)


def dirac_measure(model: GroupModel, x: int | None = None) -> GFunction:
    """Unit point mass as a density: indicator / cell weight, so that
    convolving with it reproduces the Dirac translation."""
    i = model.identity if x is None else int(x)
    values = np.zeros(model.n)
    values[i] = 1.0 / model.weights[i]
    return GFunction(model, values)


def box_function(model: GroupModel, radius: float) -> GFunction:
    """Indicator of a coordinate box of the given radius around the identity."""
    coords = model.coords()
    if coords is not None:
        inside = np.all(np.abs(coords) <= radius, axis=1)
        return GFunction(model, inside.astype(np.float64))
    factors = model.cyclic_factors
    if factors is None:
        raise DomainError(f"box generator needs coordinates or cyclic factors, "
                          f"not available on {model.name}")
    idx = np.arange(model.n)
    inside = np.ones(model.n, dtype=bool)
    for size in reversed(factors):
        digit = idx % size
        dist = np.minimum(digit, size - digit)
        inside &= dist <= radius
        idx //= size
    return GFunction(model, inside.astype(np.float64))


def gauss_function(model: GroupModel, sigma: float) -> GFunction:
    """exp(-d^2 / (2 sigma^2)) with d the coordinate distance to the identity."""
    if sigma <= 0:
        raise DomainError("gauss width must be positive")
    coords = model.coords()
    if coords is not None:
        d2 = np.sum(coords ** 2, axis=1)
        return GFunction(model, np.exp(-0.5 * d2 / sigma ** 2))
    factors = model.cyclic_factors
    if factors is None:
        raise DomainError(f"gauss generator needs coordinates or cyclic factors, "
                          f"not available on {model.name}")
    idx = np.arange(model.n)
    d2 = np.zeros(model.n)
    for size in reversed(factors):
        digit = idx % size
        dist = np.minimum(digit, size - digit)
        d2 = d2 + dist.astype(np.float64) ** 2
        idx //= size
    return GFunction(model, np.exp(-0.5 * d2 / sigma ** 2))


def random_function(model: GroupModel, seed, *, complex_valued: bool = True,
                    positive: bool = False, support_radius: float | None = None) -> GFunction:
    """Seeded random test function; optionally positive and box-supported."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if positive:
        values = np.abs(rng.standard_normal(model.n)).astype(np.complex128)
    elif complex_valued:
        values = rng.standard_normal(model.n) + 1j * rng.standard_normal(model.n)
    else:
        values = rng.standard_normal(model.n).astype(np.complex128)
    if support_radius is not None:
        mask = box_function(model, support_radius).values.real
        values = values * mask
    return GFunction(model, values)
