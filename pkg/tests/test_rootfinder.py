"""Winding-number root counting and subdivision-based root location."""

import numpy as np
import pytest

import hierdde as h
from hierdde.errors import DimensionError


def _poly_pair(roots):
    """Vectorized polynomial with the given roots, plus its derivative."""
    coeffs = np.poly(np.asarray(roots, dtype=complex))
    dcoeffs = np.polyder(coeffs)
    return (lambda z: np.polyval(coeffs, z)), (lambda z: np.polyval(dcoeffs, z))


def test_rectangle_basics():
    r = h.Rectangle(-1.0, 2.0, -0.5, 0.5)
    assert r.width == 3.0 and r.height == 1.0
    assert r.center == 0.5 + 0.0j
    assert r.contains(0.0 + 0.0j)
    assert not r.contains(3.0 + 0.0j)


def test_rectangle_rejects_degenerate():
    with pytest.raises(DimensionError):
        h.Rectangle(1.0, 1.0, 0.0, 2.0)
    with pytest.raises(DimensionError):
        h.Rectangle(0.0, 1.0, 2.0, 1.0)


def test_count_zeros_polynomials():
    box = h.Rectangle(-2.0, 2.0, -2.0, 2.0)
    assert h.count_zeros(lambda z: z * z + 1.0, box) == 2
    assert h.count_zeros(lambda z: z * z, box) == 2  # multiplicity counts
    assert h.count_zeros(lambda z: z - 5.0, box) == 0


def test_count_zeros_transcendental():
    box = h.Rectangle(0.0, 1.0, -1.0, 1.0)
    assert h.count_zeros(lambda z: -z + np.exp(-z), box) == 1


def test_find_roots_quadratic():
    f, fp = _poly_pair([1j, -1j])
    roots = h.find_roots(f, h.Rectangle(-2.0, 2.0, -2.0, 2.0), fprime=fp, tol=1e-10)
    assert len(roots) == 2
    locs = [r.location for r in roots]
    assert locs == sorted(locs, key=lambda z: (z.real, z.imag))
    assert abs(locs[0] + 1j) <= 1e-9 and abs(locs[1] - 1j) <= 1e-9
    assert all(r.multiplicity == 1 for r in roots)
    assert all(r.newton_converged for r in roots)
    assert all(r.residual <= 1e-9 for r in roots)


def test_find_roots_transcendental_oracle():
    f = lambda z: -z + np.exp(-z)
    fp = lambda z: -1.0 - np.exp(-z)
    roots = h.find_roots(f, h.Rectangle(0.0, 1.0, -1.0, 1.0), fprime=fp)
    assert len(roots) == 1
    assert roots[0].location == pytest.approx(0.567143290409784, abs=1e-12)


def test_double_root_with_neighbor():
    f, fp = _poly_pair([1.0, 1.0, -1j])
    box = h.Rectangle(-2.0, 4.0, -3.0, 3.0)
    for kwargs in ({"fprime": fp}, {}):
        roots = h.find_roots(f, box, **kwargs)
        bymult = {r.multiplicity: r for r in roots}
        assert set(bymult) == {1, 2}
        assert abs(bymult[2].location - 1.0) <= 1e-6
        assert abs(bymult[1].location + 1j) <= 1e-8


def test_double_root_off_axis():
    z0 = 0.3 + 0.7j
    f, fp = _poly_pair([z0, z0])
    roots = h.find_roots(f, h.Rectangle(-1.0, 1.0, -1.0, 1.5), fprime=fp)
    assert len(roots) == 1 and roots[0].multiplicity == 2
    assert abs(roots[0].location - z0) <= 1e-6


def test_triple_root_cluster():
    f, fp = _poly_pair([0.5, 0.5, 0.5])
    roots = h.find_roots(f, h.Rectangle(-1.0, 2.0, -1.0, 1.0), fprime=fp)
    assert len(roots) == 1
    assert roots[0].multiplicity == 3
    assert abs(roots[0].location - 0.5) <= 1e-4


def test_mixed_multiplicities():
    f, fp = _poly_pair([1.0, 1.0, -1j, 1.3])
    roots = h.find_roots(f, h.Rectangle(-2.0, 4.0, -3.0, 3.0), fprime=fp)
    assert sum(r.multiplicity for r in roots) == 4
    for z, m in [(-1j, 1), (1.0 + 0.0j, 2), (1.3 + 0.0j, 1)]:
        match = [r for r in roots if abs(r.location - z) <= 1e-6]
        assert len(match) == 1 and match[0].multiplicity == m


def test_root_on_window_corner_counted_once():
    f, fp = _poly_pair([0.0, 3.0])
    box = h.Rectangle(0.0, 1.0, 0.0, 1.0)
    assert h.count_zeros(f, box) == 1
    roots = h.find_roots(f, box, fprime=fp)
    assert len(roots) == 1
    assert abs(roots[0].location) <= 1e-6


def test_root_on_window_edge():
    assert h.count_zeros(lambda z: z - 0.5, h.Rectangle(0.5, 1.0, -0.5, 0.5)) == 1


def test_split_window_counts_add_up():
    roots_true = [0.4 + 0.3j, -0.6 - 0.2j, 0.1 - 0.7j]
    f, fp = _poly_pair(roots_true)
    whole = h.Rectangle(-1.0, 1.0, -1.0, 1.0)
    left = h.Rectangle(-1.0, 0.05, -1.0, 1.0)
    right = h.Rectangle(0.05, 1.0, -1.0, 1.0)
    assert h.count_zeros(f, whole) == 3
    assert h.count_zeros(f, left) + h.count_zeros(f, right) == 3
    got = sorted([r.location for r in h.find_roots(f, left, fprime=fp)]
                 + [r.location for r in h.find_roots(f, right, fprime=fp)],
                 key=lambda z: z.real)
    want = sorted(roots_true, key=lambda z: z.real)
    assert np.allclose(got, want, atol=1e-8)


def test_winding_count_equals_root_count_random():
    rng = np.random.default_rng(808)
    box = h.Rectangle(-1.5, 1.5, -1.5, 1.5)
    done = 0
    while done < 60:
        deg = int(rng.integers(1, 7))
        roots = rng.uniform(-2, 2, deg) + 1j * rng.uniform(-2, 2, deg)
        # keep roots away from the boundary so the truth is unambiguous
        near = np.minimum(np.abs(np.abs(roots.real) - 1.5),
                          np.abs(np.abs(roots.imag) - 1.5)) < 1e-3
        if near.any():
            continue
        inside = (np.abs(roots.real) < 1.5) & (np.abs(roots.imag) < 1.5)
        f, fp = _poly_pair(roots)
        assert h.count_zeros(f, box, fprime=fp) == int(inside.sum())
        done += 1


def test_find_roots_random_separated():
    rng = np.random.default_rng(909)
    box = h.Rectangle(-1.5, 1.5, -1.5, 1.5)
    done = 0
    while done < 20:
        deg = int(rng.integers(2, 6))
        roots = rng.uniform(-1.2, 1.2, deg) + 1j * rng.uniform(-1.2, 1.2, deg)
        gaps = np.abs(roots[:, None] - roots[None, :]) + 10 * np.eye(deg)
        if gaps.min() < 0.05:
            continue
        f, fp = _poly_pair(roots)
        found = h.find_roots(f, box, fprime=fp)
        assert sum(r.multiplicity for r in found) == deg
        got = np.sort_complex(np.array([r.location for r in found]))
        assert np.allclose(got, np.sort_complex(roots), atol=1e-7)
        done += 1


def test_resolution_error_when_depth_exhausted():
    # a zero-free function whose boundary phase needs several refinement
    # rounds: a depth cap of 1 cannot settle, a modest cap can
    f = lambda z: np.exp(50j * z)
    box = h.Rectangle(-1.0, 1.0, -1.0, 1.0)
    with pytest.raises(h.ResolutionError):
        h.count_zeros(f, box, max_depth=1)
    assert h.count_zeros(f, box, max_depth=6) == 0


def test_residuals_certified_small():
    f, fp = _poly_pair([0.25, -0.75j])
    roots = h.find_roots(f, h.Rectangle(-1.0, 1.0, -1.0, 1.0), fprime=fp, tol=1e-10)
    assert len(roots) == 2
    for r in roots:
        assert r.residual >= 0.0
        assert r.residual <= 1e-9
