"""Discrete Gaussian free field on a dyadic grid with Dirichlet boundary.

The field lives on the interior sites of an (N+1) x (N+1) lattice over the
unit square, N = 2^k, and is sampled spectrally in the sine eigenbasis of the
five-point Laplacian. Coefficient variances are chosen so that the field's
covariance is 2*pi times the inverse grid Laplacian; equivalently each mode
coefficient is a standard Gaussian in the Dirichlet inner product normalized
by (2*pi)^-1.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

TWO_PI = 2.0 * np.pi
_MAGIC = b"LZGF"


def _check_size(size: int) -> int:
    k = int(size).bit_length() - 1
    if size != 1 << k or not 4 <= k <= 13:
        raise ValueError("size must be 2^k with k in [4, 13]")
    return k


def _mode_eigenvalues(n: int) -> np.ndarray:
    """Eigenvalues of the Dirichlet five-point Laplacian on the (n-1)^2
    interior sites of an n x n cell grid."""
    m = np.arange(1, n)
    lam1 = 4.0 * np.sin(np.pi * m / (2 * n)) ** 2
    return lam1[:, None] + lam1[None, :]


@dataclass(frozen=True)
class GridField:
    """Sampled field values on the (size-1) x (size-1) interior sites,
    together with prefix sums for O(1) rectangle averages."""

    size: int
    seed: int
    values: np.ndarray
    prefix: np.ndarray
    normalization: float = TWO_PI

    @property
    def level(self) -> int:
        return self.size.bit_length() - 1

    def padded(self) -> np.ndarray:
        """Values on the full (size+1) x (size+1) lattice, zero on boundary."""
        full = np.zeros((self.size + 1, self.size + 1))
        full[1:-1, 1:-1] = self.values
        return full


def _build(size: int, seed: int, values: np.ndarray) -> GridField:
    # cell values = mean of the four corner sites, so square averages of
    # cells and squares of sites agree up to the same quadrature choice;
    # assembled row-by-row to keep peak memory at one extra grid-sized array
    prefix = np.zeros((size + 1, size + 1))
    prev_sites = np.zeros(size + 1)
    row_sites = np.zeros(size + 1)
    for r in range(size):
        if r < size - 1:
            row_sites[1:-1] = values[r]
        else:
            row_sites[:] = 0.0
        cells = 0.25 * (prev_sites[:-1] + prev_sites[1:]
                        + row_sites[:-1] + row_sites[1:])
        np.cumsum(cells, out=prefix[r + 1, 1:])
        prefix[r + 1, 1:] += prefix[r, 1:]
        prev_sites, row_sites = row_sites, prev_sites
    return GridField(size=size, seed=seed, values=values, prefix=prefix)


def sample_dgff(size: int, seed: int) -> GridField:
    """Sample the Dirichlet DGFF by an orthonormal DST-I mode expansion."""
    _check_size(size)
    rng = np.random.Generator(np.random.Philox(seed))
    coeff = rng.standard_normal((size - 1, size - 1))
    m = np.arange(1, size)
    lam1 = 4.0 * np.sin(np.pi * m / (2 * size)) ** 2
    for r in range(size - 1):
        coeff[r] *= np.sqrt(TWO_PI / (lam1[r] + lam1))
    values = sfft.dstn(coeff, type=1, norm="ortho", overwrite_x=True)
    del coeff
    return _build(size, seed, values)


def field_from_values(values: np.ndarray, seed: int = -1) -> GridField:
    """Wrap explicit interior values (tests, projections) as a GridField."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0] + 1
    if values.shape != (n - 1, n - 1):
        raise ValueError("values must be square")
    _check_size(n)
    return _build(n, seed, values)


def square_average(field: GridField, level: int, i: int, j: int) -> float:
    """Mean of the field over the dyadic square [i,i+1]x[j,j+1] / 2^level,
    computed from prefix sums over grid cells."""
    k = field.level
    if level > k:
        raise ValueError("resolution exhausted: square finer than the grid")
    if not (0 <= i < 1 << level and 0 <= j < 1 << level):
        raise ValueError("square outside the unit square")
    w = 1 << (k - level)
    r0, c0 = i * w, j * w
    r1, c1 = r0 + w, c0 + w
    p = field.prefix
    total = p[r1, c1] - p[r0, c1] - p[r1, c0] + p[r0, c0]
    return float(total / (w * w))


def dirichlet_energy(field: GridField) -> float:
    """(2 pi)^-1-normalized discrete Dirichlet energy of the field."""
    full = field.padded()
    dx = np.diff(full, axis=0)
    dy = np.diff(full, axis=1)
    return float((np.sum(dx * dx) + np.sum(dy * dy)) / TWO_PI)


def green_oracle(size: int) -> np.ndarray:
    """Dense normalization-scaled Green matrix 2*pi*(grid Laplacian)^-1 on the
    interior sites; small sizes only (validation use)."""
    if size > 32:
        raise ValueError("green_oracle is budgeted for size <= 32")
    _check_size(size)
    n = size - 1
    lap = np.zeros((n * n, n * n))
    idx = lambda a, b: a * n + b
    for a in range(n):
        for b in range(n):
            lap[idx(a, b), idx(a, b)] = 4.0
            for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                aa, bb = a + da, b + db
                if 0 <= aa < n and 0 <= bb < n:
                    lap[idx(a, b), idx(aa, bb)] = -1.0
    return TWO_PI * np.linalg.inv(lap)


def poisson_solve(size: int, rhs: np.ndarray) -> np.ndarray:
    """Solve (grid Laplacian) u = rhs on the interior via DST-I
    diagonalization."""
    lam = _mode_eigenvalues(size)
    coeff = sfft.dstn(rhs, type=1, norm="ortho")
    return sfft.dstn(coeff / lam, type=1, norm="ortho")


def write_field(field: GridField, path) -> None:
    """Dump: 16-byte header (magic, k, seed) then row-major little-endian
    float64 interior values."""
    header = _MAGIC + struct.pack("<iq", field.level, field.seed)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(field.values.astype("<f8").tobytes())


def read_field(path) -> GridField:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if header[:4] != _MAGIC:
            raise ValueError("bad field file magic")
        k, seed = struct.unpack("<iq", header[4:16])
        n = 1 << k
        values = np.frombuffer(fh.read(), dtype="<f8").reshape(n - 1, n - 1)
    return _build(n, int(seed), values.copy())
