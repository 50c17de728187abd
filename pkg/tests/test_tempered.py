"""Certified tempered-norm computation: exact routes, iterative bounds,
and the statement-level checks built on them.

The p = 2 oracle used here is an explicit DFT maximum computed with a
double loop, independent of the library's FFT and SVD paths.
"""

import math

import numpy as np
import pytest

import ltp
from ltp.errors import DomainError, GridTooCoarse
from ltp.tempered import (IterConfig, quasi_identity_blowup, tempered_norm,
                          upper_bound_weighted_l1)


def dft_max_oracle(model, values):
    """max_k |sum_j w_j f(j) exp(-2 pi i j k / n)| on a single cyclic factor."""
    n = model.n
    best = 0.0
    for k in range(n):
        acc = 0.0 + 0.0j
        for j in range(n):
            acc += model.weights[j] * values[j] * np.exp(-2j * np.pi * j * k / n)
        best = max(best, abs(acc))
    return best


def test_p2_phase_example():
    G = ltp.build_group("cyclic:4@counting")
    f = ltp.GFunction(G, [1, np.exp(1j * np.pi / 4), 0, 0])
    expected = 2.0 * math.cos(math.pi / 8)
    assert dft_max_oracle(G, f.values) == pytest.approx(expected, abs=1e-12)
    for method in ("auto", "spectral_abelian", "exact_svd"):
        est = tempered_norm(f, 2, method=method)
        assert est.lower == pytest.approx(expected, abs=1e-9)
        assert est.upper == pytest.approx(expected, abs=1e-9)


def test_dirac_identity_all_p():
    for spec in ("cyclic:6@counting", "z:8"):
        G = ltp.build_group(spec)
        delta = ltp.dirac(G)
        for p in (1.0, 1.5, 2.0, 3.0):
            est = tempered_norm(delta, p)
            assert est.lower == pytest.approx(1.0, abs=1e-9)
            assert est.upper == pytest.approx(1.0, abs=1e-9)


def test_truncated_z_box_symbol():
    G = ltp.build_group("z:64@counting")
    f = ltp.box_function(G, 1)
    est = tempered_norm(f, 2)
    assert abs(est.lower - 3.0) < 1e-6
    assert abs(est.upper - 3.0) < 1e-6
    # the window-section singular value stays a lower bound of the symbol sup
    section = tempered_norm(f, 2, method="exact_svd")
    assert section.lower <= est.lower + 1e-12


def test_symbol_route_z2():
    G = ltp.build_group("z2:8@counting")
    f = ltp.box_function(G, 1)  # positive: sup at the trivial frequency
    est = tempered_norm(f, 2)
    assert est.lower == pytest.approx(9.0, abs=1e-9)


def test_spectral_vs_svd_random():
    G = ltp.build_group("cyclic:12@counting")
    rng = np.random.default_rng(17)
    for _ in range(20):
        f = ltp.random_function(G, rng)
        a = tempered_norm(f, 2, method="spectral_abelian").value
        b = tempered_norm(f, 2, method="exact_svd").value
        assert abs(a - b) < 1e-10


def test_p1_equals_l1_on_unimodular():
    rng = np.random.default_rng(3)
    for spec in ("cyclic:9@counting", "cyclic:9@probability", "z:16"):
        G = ltp.build_group(spec)
        for _ in range(10):
            f = ltp.random_function(G, rng)
            est = tempered_norm(f, 1)
            assert est.lower == pytest.approx(ltp.lp_norm(f, 1), rel=1e-12)
            assert est.method == "exact_l1"


def test_zero_function():
    G = ltp.build_group("cyclic:5")
    est = tempered_norm(ltp.GFunction(G, np.zeros(5)), 2.7)
    assert est.lower == 0.0 and est.upper == 0.0 and est.converged


def test_weighted_l1_bound_examples():
    rng = np.random.default_rng(8)
    G = ltp.build_group("cyclic:8@counting")
    f = ltp.random_function(G, rng, positive=True)
    # unimodular: the bound is the plain L1 norm
    assert upper_bound_weighted_l1(f, 2) == pytest.approx(ltp.lp_norm(f, 1), rel=1e-14)
    # positive circulant symbol peaks at the trivial character: equality
    est = tempered_norm(f, 2)
    assert est.value == pytest.approx(upper_bound_weighted_l1(f, 2), abs=1e-9)
    zero = ltp.GFunction(G, np.zeros(8))
    assert upper_bound_weighted_l1(zero, 3) == 0.0


def test_lower_bound_never_exceeds_weighted_l1():
    rng = np.random.default_rng(23)
    for spec in ("cyclic:12@counting", "cyclic:12@probability", "dihedral:4",
                 "symmetric:3", "z:16", "z2:4"):
        G = ltp.build_group(spec)
        for _ in range(8):
            f = ltp.random_function(G, rng)
            for p in (1.0, 1.5, 2.0, 3.0):
                est = tempered_norm(f, p)
                assert est.lower <= upper_bound_weighted_l1(f, p) + 1e-9
                assert est.lower <= est.upper * (1 + 1e-9)


def test_witness_attains_lower_bound():
    rng = np.random.default_rng(31)
    for spec in ("cyclic:10@counting", "dihedral:3", "cyclic:10@probability"):
        G = ltp.build_group(spec)
        f = ltp.random_function(G, rng)
        for p, method in ((2.0, "exact_svd"), (2.0, "auto"), (1.0, "auto"),
                          (1.7, "auto")):
            est = tempered_norm(f, p, method=method)
            if est.witness is None:
                continue
            ratio = ltp.lp_norm(ltp.convolve(est.witness, f), p) / \
                ltp.lp_norm(est.witness, p)
            assert ratio >= est.lower * (1 - 1e-9) - 1e-12


def test_boyd_bracket_and_convergence_flag():
    G = ltp.build_group("cyclic:6@counting")
    rng = np.random.default_rng(4)
    f = ltp.random_function(G, rng)
    est = tempered_norm(f, 1.5, cfg=IterConfig(tol=1e-10, max_iters=800, restarts=8))
    assert est.method == "boyd_iteration"
    assert est.converged
    assert 0 < est.iterations <= 800
    exact2 = tempered_norm(f, 2).value
    assert est.lower <= est.upper * (1 + 1e-9)
    # p = 1.5 norm of a fixed operator is at least a positive fraction of p = 2
    assert est.lower > 0.25 * exact2


def test_wl1_bound_method():
    G = ltp.build_group("cyclic:8@counting")
    f = ltp.random_function(G, 11)
    est = tempered_norm(f, 2.5, method="bound_weighted_l1")
    assert est.method == "bound_weighted_l1"
    assert est.lower <= est.upper * (1 + 1e-9)
    assert est.upper == pytest.approx(upper_bound_weighted_l1(f, 2.5), rel=1e-14)


def test_method_validation():
    G = ltp.build_group("cyclic:4")
    f = ltp.random_function(G, 0)
    with pytest.raises(DomainError):
        tempered_norm(f, 3, method="exact_svd")
    with pytest.raises(DomainError):
        tempered_norm(f, 2, method="exact_l1")
    with pytest.raises(DomainError):
        tempered_norm(f, 2, method="nonsense")
    D = ltp.build_group("dihedral:3")
    with pytest.raises(DomainError):
        tempered_norm(ltp.random_function(D, 0), 2, method="spectral_abelian")


def test_submultiplicative_action():
    rng = np.random.default_rng(29)
    for spec in ("cyclic:9@counting", "dihedral:4"):
        G = ltp.build_group(spec)
        for _ in range(8):
            f = ltp.random_function(G, rng)
            g = ltp.random_function(G, rng)
            for p in (1.5, 2.0, 3.0):
                est = tempered_norm(f, p)
                lhs = ltp.lp_norm(ltp.convolve(g, f), p)
                assert lhs <= ltp.lp_norm(g, p) * est.upper + 1e-9


# ---------------------------------------------------------------------------
# Dirac scaling
# ---------------------------------------------------------------------------

def test_dirac_scaling_unimodular():
    rng = np.random.default_rng(6)
    G = ltp.build_group("cyclic:12@counting")
    f = ltp.random_function(G, rng)
    for x in (1, 5, 11):
        ratio, expected = ltp.dirac_scaling_check(f, x, 2)
        assert expected == 1.0
        assert ratio == pytest.approx(1.0, abs=1e-9)
    ratio, _ = ltp.dirac_scaling_check(f, G.identity, 2)
    assert ratio == pytest.approx(1.0, abs=1e-13)


def test_dirac_scaling_affine_coarse():
    G = ltp.build_group("affine:0.25:2:0.25:4")
    coords = G.coords()
    u, b = coords[:, 0], coords[:, 1]
    fu = np.where(np.abs(u + 0.3465) < 0.96,
                  np.cos(0.5 * np.pi * (u + 0.3465) / 0.96) ** 2, 0.0)
    fb = np.where(np.abs(b) < 2.0, np.cos(0.25 * np.pi * b) ** 2, 0.0)
    f = ltp.GFunction(G, fu * fb)
    ratio, expected = ltp.dirac_scaling_check(f, (2.0, 0.0), 2)
    assert expected == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert ratio == pytest.approx(expected, rel=0.05)


# ---------------------------------------------------------------------------
# Real and imaginary closure
# ---------------------------------------------------------------------------

def test_re_im_closure_real_function():
    G = ltp.build_group("cyclic:8@counting")
    f = ltp.random_function(G, 5, complex_valued=False)
    whole = tempered_norm(f, 2).value
    re_norm = tempered_norm(ltp.real_part(f), 2).value
    im_norm = tempered_norm(ltp.imag_part(f), 2).value
    assert re_norm == pytest.approx(whole, rel=1e-12)
    assert im_norm == 0.0
    result = ltp.re_im_closure_check(f, 2)
    assert result.passed


def test_re_im_closure_random_batch():
    rng = np.random.default_rng(12)
    G = ltp.build_group("cyclic:12@counting")
    for _ in range(200):
        f = ltp.random_function(G, rng)
        assert ltp.re_im_closure_check(f, 2).passed


# ---------------------------------------------------------------------------
# Quasi-identity blowup
# ---------------------------------------------------------------------------

def test_quasi_identity_sequences():
    G = ltp.build_group("r:0.05:4")
    bounds = quasi_identity_blowup(G, 2, 4)
    assert bounds == pytest.approx([1.0, math.sqrt(2), math.sqrt(3), 2.0], abs=1e-12)
    assert quasi_identity_blowup(G, 4, 16, big_k=2.0)[15] == pytest.approx(4.0, abs=1e-12)
    near_one = quasi_identity_blowup(G, 1.0001, 10)
    assert max(near_one) - min(near_one) < 2e-3
    assert all(b2 >= b1 for b1, b2 in zip(bounds, bounds[1:]))


def test_quasi_identity_grid_too_coarse():
    G = ltp.build_group("r:0.5:4")
    with pytest.raises(GridTooCoarse):
        quasi_identity_blowup(G, 2, 5)
    with pytest.raises(DomainError):
        quasi_identity_blowup(ltp.build_group("cyclic:4"), 2, 3)
