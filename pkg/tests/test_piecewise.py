import numpy as np
import pytest

from bathtub import DataError, PiecewiseLinear
from helpers import riemann_integral


def test_interpolates_between_nodes():
    pl = PiecewiseLinear([0.0, 1.0, 3.0], [0.0, 2.0, 0.0])
    assert pl(0.5) == 1.0
    assert pl(2.0) == 1.0
    assert pl(1.0) == 2.0


def test_clamp_extension_holds_end_values():
    pl = PiecewiseLinear([1.0, 2.0], [3.0, 5.0], extend="clamp")
    assert pl(0.0) == 3.0
    assert pl(10.0) == 5.0


def test_zero_extension_vanishes_outside():
    pl = PiecewiseLinear([1.0, 2.0], [3.0, 5.0], extend="zero")
    assert pl(0.5) == 0.0
    assert pl(2.5) == 0.0
    assert pl(1.5) == 4.0


@pytest.mark.parametrize("extend", ["zero", "clamp"])
def test_integral_matches_quadrature(extend):
    pl = PiecewiseLinear([0.5, 1.0, 2.0, 2.5], [1.0, 3.0, 3.0, 0.0],
                         extend=extend)
    for t in (0.3, 0.75, 1.7, 2.5, 4.0):
        oracle = riemann_integral(pl, 0.0, t, n=100_000)
        # quadrature smears the zero-extension jump over one sample cell
        assert pl.integral(t) == pytest.approx(oracle, abs=1e-4)


def test_integral_of_negative_time_is_zero():
    pl = PiecewiseLinear([0.0, 1.0], [2.0, 2.0])
    assert pl.integral(-1.0) == 0.0


def test_rejects_unsorted_nodes():
    with pytest.raises(DataError):
        PiecewiseLinear([1.0, 1.0], [0.0, 1.0])
    with pytest.raises(DataError):
        PiecewiseLinear([0.0, 1.0], [0.0, float("nan")])


def test_vectorized_evaluation():
    pl = PiecewiseLinear([0.0, 2.0], [0.0, 4.0], extend="zero")
    out = pl(np.array([-1.0, 1.0, 3.0]))
    assert np.array_equal(out, np.array([0.0, 2.0, 0.0]))
