import math

import pytest

from listdec import bounds
from listdec.errors import InputError


def test_johnson_radius_values():
    assert bounds.johnson_radius(2, 0.375) == pytest.approx(0.25)
    assert bounds.johnson_radius(2, 0.5) == pytest.approx(0.5)
    assert bounds.johnson_radius(3, 0) == 0
    assert bounds.johnson_radius(4, 0.75) == pytest.approx(0.75)


def test_johnson_radius_is_monotone():
    xs = [i / 100 * 0.5 for i in range(101)]
    radii = [bounds.johnson_radius(2, x) for x in xs]
    assert radii == sorted(radii)
    assert all(r <= x + 1e-15 for r, x in zip(radii, xs))


def test_johnson_radius_domain():
    with pytest.raises(InputError):
        bounds.johnson_radius(2, 0.6)
    with pytest.raises(InputError):
        bounds.johnson_radius(2, -0.1)
    with pytest.raises(InputError):
        bounds.johnson_radius(1, 0.1)
    # rounding just past the endpoint is clamped
    assert bounds.johnson_radius(2, 0.5 + 1e-13) == pytest.approx(0.5)


def test_avg_johnson_bound():
    bound = bounds.avg_johnson_bound(2, 0.5, 2)
    assert bound.radius == pytest.approx(bounds.johnson_radius(2, 0.25))
    assert bound.list_size == 1
    assert bound.provenance == "avg_johnson"


def test_avg_johnson_accepts_plotkin_averages():
    # two antipodal binary words average distance 1
    bound = bounds.avg_johnson_bound(2, 1.0, 2)
    assert bound.radius == pytest.approx(0.5)
    with pytest.raises(InputError):
        bounds.avg_johnson_bound(2, -0.1, 3)
    with pytest.raises(InputError):
        bounds.avg_johnson_bound(2, 0.4, 1)


def test_simplified_johnson():
    bound = bounds.simplified_johnson(2, 0.25, 4)
    assert bound.radius == pytest.approx(0.5 * (1 - math.sqrt(0.5)))
    assert bound.list_size == 3
    with pytest.raises(InputError):
        bounds.simplified_johnson(2, 0.9, 2)
    with pytest.raises(InputError):
        bounds.simplified_johnson(2, -0.1, 3)


@pytest.mark.parametrize("q", [2, 3, 5, 16])
@pytest.mark.parametrize("L", [3, 4, 7, 20])
def test_simplified_is_below_exact_johnson(q, L):
    eps = 0.1
    delta = (1 - 1 / q) * (1 - eps)
    exact = bounds.avg_johnson_bound(q, delta, L).radius
    assert bounds.simplified_johnson(q, eps, L).radius <= exact + bounds.SLACK


@pytest.mark.parametrize("q", [2, 3, 4, 7])
@pytest.mark.parametrize("L", [3, 4, 5, 6, 10])
def test_rip_to_ld_radius_is_below_simplified(q, L):
    rip = bounds.rip_to_ld_radius(q, L)
    simplified = bounds.simplified_johnson(q, 1 / (2 * (L - 1)), L)
    assert rip.radius <= simplified.radius + bounds.SLACK
    assert rip.list_size == L - 1


def test_rip_to_ld_radius_needs_L3():
    with pytest.raises(InputError):
        bounds.rip_to_ld_radius(2, 2)
    assert bounds.rip_to_ld_radius(2, 3).radius == pytest.approx(
        0.5 * (1 - math.sqrt(0.75))
    )


def test_rip_distance_threshold():
    assert bounds.rip_distance_threshold(2, 3) == pytest.approx(0.375)
    assert bounds.rip_distance_threshold(3, 2) == pytest.approx(1 / 3)


def test_deletion_bound():
    bound = bounds.deletion_bound(2, 0.4, 2, 3)
    assert bound.radius == pytest.approx(bounds.johnson_radius(2, 0.4 - 0.4 / 3))
    assert bound.list_size == 5
    assert bound.provenance == "deletion"
    with pytest.raises(InputError):
        bounds.deletion_bound(2, 0.0, 2, 3)
    with pytest.raises(InputError):
        bounds.deletion_bound(2, 0.6, 2, 3)
    with pytest.raises(InputError):
        bounds.deletion_bound(2, 0.4, 0, 3)


@pytest.mark.parametrize("q,eta,L", [(2, 0.3, 2), (3, 0.5, 4), (5, 0.8, 3)])
def test_deletion_with_single_neighbor_is_avg_johnson(q, eta, L):
    assert bounds.deletion_bound(q, eta, 1, L).radius == pytest.approx(
        bounds.avg_johnson_bound(q, eta, L).radius, abs=1e-12
    )
    assert bounds.deletion_bound(q, eta, 1, L).list_size == L - 1


def test_deletion_avg_distance():
    assert bounds.deletion_avg_distance(0.5, 1, 3) == pytest.approx(0.5)
    assert bounds.deletion_avg_distance(0.6, 2, 3) == pytest.approx(2 * 2 * 0.6 / 5)


def test_main_rate_bound():
    value = bounds.main_rate_bound(2, 0.5, 0.5)
    # every clamped log is 1 except log2(q/eps) = 2
    assert value == pytest.approx(0.25 / 8)
    assert bounds.main_rate_bound(2, 0.1, 0.5) < value
    with pytest.raises(InputError):
        bounds.main_rate_bound(2, 0, 0.5)
    with pytest.raises(InputError):
        bounds.main_rate_bound(2, 0.5, 1)
