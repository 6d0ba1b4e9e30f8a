import math

import numpy as np
import pytest

from loopzeta import gff


def test_size_validation():
    for bad in (0, 3, 24, 8, 2**14):
        if bad == 8:
            continue
        with pytest.raises(ValueError):
            gff.sample_dgff(bad, 0)
    with pytest.raises(ValueError):
        gff.sample_dgff(8, 0)  # k = 3 below the supported range
    field = gff.sample_dgff(16, 0)
    assert field.level == 4
    assert field.values.shape == (15, 15)


def test_determinism():
    a = gff.sample_dgff(32, 123)
    b = gff.sample_dgff(32, 123)
    c = gff.sample_dgff(32, 124)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_prefix_sums_match_direct_averages():
    rng = np.random.default_rng(3)
    field = gff.field_from_values(rng.standard_normal((15, 15)))
    full = field.padded()
    cells = 0.25 * (full[:-1, :-1] + full[1:, :-1] + full[:-1, 1:] + full[1:, 1:])
    for level in (0, 1, 2, 4):
        w = 16 >> level
        for i in range(1 << level):
            for j in range(1 << level):
                direct = cells[i * w:(i + 1) * w, j * w:(j + 1) * w].mean()
                fast = gff.square_average(field, level, i, j)
                assert fast == pytest.approx(direct, abs=1e-12)


def test_square_average_guards():
    field = gff.sample_dgff(16, 0)
    with pytest.raises(ValueError, match="resolution exhausted"):
        gff.square_average(field, 5, 0, 0)
    with pytest.raises(ValueError):
        gff.square_average(field, 2, 4, 0)


def test_point_variance_matches_green_oracle():
    size, m = 16, 3000
    green = gff.green_oracle(size)
    center = (7, 7)
    target = green[center[0] * 15 + center[1], center[0] * 15 + center[1]]
    vals = np.array([gff.sample_dgff(size, 70_000 + i).values[center]
                     for i in range(m)])
    sq = vals**2
    se = sq.std(ddof=1) / math.sqrt(m)
    assert abs(sq.mean() - target) < 5 * se


def test_green_oracle_scaling():
    # the scaled Green function at the center grows like log N plus a constant
    g16 = gff.green_oracle(16)[7 * 15 + 7, 7 * 15 + 7]
    g32 = gff.green_oracle(32)[15 * 31 + 15, 15 * 31 + 15]
    assert g32 - g16 == pytest.approx(math.log(2.0), abs=0.02)
    with pytest.raises(ValueError):
        gff.green_oracle(64)


def test_poisson_solve_inverts_laplacian():
    size = 16
    rng = np.random.default_rng(11)
    rhs = rng.standard_normal((size - 1, size - 1))
    u = gff.poisson_solve(size, rhs)
    green = gff.green_oracle(size) / gff.TWO_PI
    expect = (green @ rhs.ravel()).reshape(size - 1, size - 1)
    assert np.allclose(u, expect, atol=1e-10)


def test_dirichlet_energy_expectation():
    # each of the (N-1)^2 modes contributes 1 on average in the
    # (2 pi)^-1-normalized energy
    size, m = 32, 60
    energies = [gff.dirichlet_energy(gff.sample_dgff(size, 900 + i))
                for i in range(m)]
    n_modes = (size - 1) ** 2
    se = np.std(energies, ddof=1) / math.sqrt(m)
    assert abs(np.mean(energies) - n_modes) < 5 * se


def test_field_io_round_trip(tmp_path):
    field = gff.sample_dgff(64, 5)
    path = tmp_path / "field.bin"
    gff.write_field(field, path)
    back = gff.read_field(path)
    assert back.size == 64 and back.seed == 5
    assert np.array_equal(back.values, field.values)
    assert np.array_equal(back.prefix, field.prefix)
    path.write_bytes(b"XXXX" + b"\0" * 12)
    with pytest.raises(ValueError, match="magic"):
        gff.read_field(path)


def test_field_from_values_validation():
    with pytest.raises(ValueError):
        gff.field_from_values(np.zeros((15, 14)))
    with pytest.raises(ValueError):
        gff.field_from_values(np.zeros((10, 10)))  # 11 is not a power of two
