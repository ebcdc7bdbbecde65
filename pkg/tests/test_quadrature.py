import math

import pytest

from fermipulse.quadrature import QuadratureFailure, adaptive_simpson


def test_polynomial_is_exact():
    assert adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_sine():
    assert adaptive_simpson(math.sin, 0.0, math.pi, rel_tol=1e-10) == pytest.approx(2.0, rel=1e-9)


def test_narrow_peak_with_seeds():
    w = 1e-3
    f = lambda x: math.exp(-((x / w) ** 2))
    got = adaptive_simpson(f, 0.0, math.pi, rel_tol=1e-8, seeds=[w, 4 * w, 16 * w, 128 * w])
    assert got == pytest.approx(0.5 * w * math.sqrt(math.pi), rel=1e-6)


def test_decaying_exponential():
    got = adaptive_simpson(lambda x: math.exp(-abs(x) * math.pi), -12, 12, rel_tol=1e-9)
    assert got == pytest.approx(2.0 / math.pi, rel=1e-7)


def test_zero_function():
    assert adaptive_simpson(lambda x: 0.0, 0.0, 1.0) == 0.0


def test_failure_carries_worst_panel():
    wild = lambda x: math.sin(1.0 / (x + 1e-9))
    with pytest.raises(QuadratureFailure) as info:
        adaptive_simpson(wild, 0.0, 1.0, rel_tol=1e-12, max_depth=4)
    assert info.value.a is not None
    assert info.value.b is not None
    assert info.value.err is not None


def test_rejects_empty_interval():
    with pytest.raises(ValueError):
        adaptive_simpson(math.sin, 1.0, 1.0)
