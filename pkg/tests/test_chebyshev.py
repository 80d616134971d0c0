import numpy as np
import pytest
from scipy.signal.windows import chebwin

from src.exceptions import ParameterRangeError
from src.waveforms.chebyshev import (
    chebyshev_polynomial,
    chebyshev_window,
    export_window_csv,
    sidelobe_levels_db,
)


def test_length_74_window_is_symmetric():
    window = chebyshev_window(74, 40.0)
    assert window.shape == (74,)
    assert np.isrealobj(window)
    np.testing.assert_allclose(window, window[::-1], rtol=0.0, atol=1e-15)


def test_length_3_window_is_symmetric():
    window = chebyshev_window(3, 25.0)
    assert window[0] == pytest.approx(window[2], rel=1e-14)


@pytest.mark.parametrize("length", [3, 21, 73, 74])
def test_unit_response_at_dc(length):
    assert np.sum(chebyshev_window(length, 40.0)) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("length", [5, 31, 73])
def test_odd_closed_form_matches_scipy(length):
    reference = chebwin(length, at=40.0, sym=True)
    np.testing.assert_allclose(chebyshev_window(length, 40.0), reference / reference.sum(), rtol=1e-9, atol=1e-14)


def test_peak_sidelobe_of_length_74():
    levels = sidelobe_levels_db(chebyshev_window(74, 40.0), oversampling=64)
    assert levels.size > 10
    assert np.max(levels) == pytest.approx(-40.0, abs=0.5)


@pytest.mark.parametrize("alpha_db", [30.0, 40.0, 50.0])
@pytest.mark.parametrize("length", [73, 74])
def test_sidelobes_are_equiripple(length, alpha_db):
    levels = sidelobe_levels_db(chebyshev_window(length, alpha_db), oversampling=64)
    assert levels.size > 0
    assert np.all(np.abs(levels + alpha_db) <= 0.5)


@pytest.mark.parametrize("length, alpha_db", [(1, 40.0), (74, 0.0), (74, -10.0), (74, 1e5)])
def test_invalid_parameters(length, alpha_db):
    with pytest.raises(ParameterRangeError):
        chebyshev_window(length, alpha_db)


def test_chebyshev_polynomial_branches():
    assert chebyshev_polynomial(3, 0.5) == pytest.approx(-1.0)
    assert chebyshev_polynomial(2, 2.0) == pytest.approx(7.0)
    assert chebyshev_polynomial(3, -2.0) == pytest.approx(-26.0)


def test_export_window_csv(tmp_path):
    window = chebyshev_window(74, 40.0)
    path = export_window_csv(window, tmp_path / "window.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 74
    np.testing.assert_array_equal(np.array([float(v) for v in lines]), window)
