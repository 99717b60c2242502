import math

import numpy as np
import pytest

from oracles import kesten_moment_quad
from rmtdesign.spectra import (
    DensityKind,
    SpectralDensity,
    delta_opt,
    density_at,
    integrate_density,
    kesten_moment,
    numeric_moment,
    squared_density_moment,
    squared_moment,
)


def test_delta_opt_values():
    assert delta_opt(2) == 1.0
    assert abs(delta_opt(4) - math.sqrt(3) / 2) < 1e-15
    for s in (3, 10, 1000):
        assert abs(2 / delta_opt(s) - s / math.sqrt(s - 1)) < 1e-12
    assert delta_opt(10**8) < 1e-3
    with pytest.raises(ValueError):
        delta_opt(1)


def test_quarter_circle():
    qc = SpectralDensity("quarter_circle")
    assert abs(density_at(qc, 0.0) - 2 / math.pi) < 1e-15
    assert density_at(qc, 2.5) == 0.0 and density_at(qc, -0.1) == 0.0
    assert abs(integrate_density(qc) - 1) < 1e-8
    assert abs(numeric_moment(qc, 2) - 1) < 1e-8
    assert abs(numeric_moment(qc, 1) - 8 / (3 * math.pi)) < 1e-8


@pytest.mark.parametrize("card", [3, 4, 6])
@pytest.mark.parametrize("kind", list(DensityKind))
def test_densities_normalized(card, kind):
    sd = SpectralDensity(kind, card)
    assert abs(integrate_density(sd) - 1) < 1e-8
    xs = np.linspace(sd.support[0] - 0.5, sd.support[1] + 0.5, 301)
    assert np.all(density_at(sd, xs) >= 0)


@pytest.mark.parametrize("card", [3, 4, 6])
def test_moment_identity(card):
    sd = SpectralDensity("kesten_signed", card)
    for m in range(1, 9):
        assert abs(numeric_moment(sd, m) - kesten_moment(card, m)) < 1e-6
        assert abs(kesten_moment_quad(card, m) - kesten_moment(card, m)) < 1e-6


def test_moment_examples():
    assert kesten_moment(5, 1) == 0.0
    for n in (2, 3, 7):
        assert abs(kesten_moment(n, 2) - 1 / n) < 1e-15
    # walks of length 4 on the 3-regular tree: 3*3 + 3*2 = 15
    assert abs(kesten_moment(3, 4) - 15 / 81) < 1e-15


@pytest.mark.parametrize("card", [3, 4, 6])
def test_squared_measure(card):
    for m in range(1, 5):
        assert abs(squared_density_moment(card, m) - squared_moment(card, m)) < 1e-6
        assert abs(squared_moment(card, m) - kesten_moment(card, 2 * m)) < 1e-15
        sing = SpectralDensity("kesten_singular", card)
        assert abs(numeric_moment(sing, 2 * m) - squared_moment(card, m)) < 1e-6


def test_rescaled_approaches_quarter_circle():
    ys = np.linspace(0, 1.9, 200)
    qc = density_at(SpectralDensity("quarter_circle"), ys)
    gaps = [np.max(np.abs(density_at(SpectralDensity("kesten_rescaled", s), ys) - qc)) for s in (10, 100, 1000, 10000)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_rescaled_is_change_of_variables():
    s = 6
    sing = SpectralDensity("kesten_singular", s)
    resc = SpectralDensity("kesten_rescaled", s)
    for x in (0.1, 0.3, 0.6):
        assert abs(density_at(resc, math.sqrt(s) * x) - density_at(sing, x) / math.sqrt(s)) < 1e-12


def test_requires_card():
    with pytest.raises(ValueError):
        SpectralDensity("kesten_signed", 1)
