"""Periodic-torus spectral discretization.

Transforms, exact spectral differential operators, Leray projection and
2/3-rule dealiasing on a uniform grid over [0, L)^dim with dim in {2, 3}.

Normalization convention: the forward transform divides by the number of
grid points, so the mode-0 coefficient equals the field mean.  Under this
convention discrete Parseval reads

    sum_x |f(x)|^2 * cell_volume == volume * sum_k |f_hat(k)|^2.

First-derivative wavenumber tables have the Nyquist mode zeroed so that
derivatives of real fields stay real-to-real symmetric.  The Laplacian and
direct second derivatives keep the Nyquist contribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "transform_forward",
    "transform_inverse",
    "gradient",
    "laplacian",
    "second_derivative",
    "divergence",
    "curl",
    "leray_project",
    "dealias",
    "l2_norm",
    "linf_norm",
]


def _axis_profile(values: np.ndarray, axis: int, dim: int) -> np.ndarray:
    """Reshape a 1-D table so it broadcasts along spatial `axis` of `dim` axes."""
    shape = [1] * dim
    shape[axis] = len(values)
    return values.reshape(shape)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with precomputed wavenumber tables.

    Parameters
    ----------
    dim : 2 or 3.
    res : samples per axis; power of two, >= 8.
    length : torus side length (default 2*pi).
    """

    dim: int
    res: int
    length: float = 2.0 * np.pi

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.res < 8 or (self.res & (self.res - 1)) != 0:
            raise ValueError(f"res must be a power of two >= 8, got {self.res}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def shape(self) -> tuple:
        return (self.res,) * self.dim

    @property
    def spatial_axes(self) -> tuple:
        """Axes of the spatial dimensions in (ncomp, *shape) arrays."""
        return tuple(range(-self.dim, 0))

    @property
    def npoints(self) -> int:
        return self.res**self.dim

    @property
    def dx(self) -> float:
        return self.length / self.res

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def volume(self) -> float:
        return self.length**self.dim

    @cached_property
    def kfreq_int(self) -> np.ndarray:
        """Integer mode indices in FFT order: 0, 1, ..., res/2-1, -res/2, ..., -1."""
        return np.rint(np.fft.fftfreq(self.res) * self.res).astype(np.int64)

    @cached_property
    def k_full(self) -> tuple:
        """Per-axis physical wavenumbers (2*pi/L scaling), Nyquist included."""
        k1 = self.kfreq_int * (2.0 * np.pi / self.length)
        return tuple(_axis_profile(k1, ax, self.dim) for ax in range(self.dim))

    @cached_property
    def k_deriv(self) -> tuple:
        """First-derivative wavenumber tables with the Nyquist mode zeroed."""
        k1 = self.kfreq_int * (2.0 * np.pi / self.length)
        k1 = k1.copy()
        k1[self.res // 2] = 0.0
        return tuple(_axis_profile(k1, ax, self.dim) for ax in range(self.dim))

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 including the Nyquist mode (used by the Laplacian and the
        integrating factors)."""
        return sum(k * k for k in self.k_full)

    @cached_property
    def k2_deriv(self) -> np.ndarray:
        """|k|^2 built from the derivative tables (used by spectral Poisson
        inversions so they stay consistent with gradient/divergence)."""
        return sum(k * k for k in self.k_deriv)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean mask keeping modes with |k_j| <= res/3 on every axis."""
        cutoff = self.res / 3.0
        keep = np.ones(self.shape, dtype=bool)
        for ax in range(self.dim):
            keep &= _axis_profile(np.abs(self.kfreq_int), ax, self.dim) <= cutoff
        return keep

    def coords(self) -> tuple:
        """Broadcastable coordinate arrays x_0, ..., x_{dim-1}."""
        x1 = np.arange(self.res) * self.dx
        return tuple(_axis_profile(x1, ax, self.dim) for ax in range(self.dim))


def _fftn(grid: Grid, phys: np.ndarray) -> np.ndarray:
    return np.fft.fftn(phys, axes=grid.spatial_axes, norm="forward")


def _ifftn(grid: Grid, spec: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(spec, axes=grid.spatial_axes, norm="forward").real


class Field:
    """Scalar or multi-component field with paired physical and spectral
    representations.

    Data layout is (ncomp, res, ..., res); scalar inputs without a component
    axis are promoted to ncomp = 1.  Representations are computed lazily and
    cached, so a Field is cheap to pass around and never transforms twice.
    Operations treat Fields as immutable values.
    """

    __slots__ = ("grid", "_phys", "_spec")

    def __init__(self, grid: Grid, phys=None, spec=None):
        if phys is None and spec is None:
            raise ValueError("Field needs a physical or spectral array")
        self.grid = grid
        self._phys = self._coerce(phys, np.float64) if phys is not None else None
        self._spec = self._coerce(spec, np.complex128) if spec is not None else None

    def _coerce(self, data, dtype) -> np.ndarray:
        arr = np.asarray(data, dtype=dtype)
        if arr.shape == self.grid.shape:
            arr = arr[np.newaxis]
        if arr.ndim != self.grid.dim + 1 or arr.shape[1:] != self.grid.shape:
            raise ValueError(
                f"array shape {arr.shape} does not match grid shape {self.grid.shape}"
            )
        return arr

    @classmethod
    def from_phys(cls, grid: Grid, phys) -> "Field":
        return cls(grid, phys=phys)

    @classmethod
    def from_spec(cls, grid: Grid, spec) -> "Field":
        return cls(grid, spec=spec)

    @classmethod
    def zeros(cls, grid: Grid, ncomp: int = 1) -> "Field":
        return cls(grid, phys=np.zeros((ncomp,) + grid.shape))

    @property
    def ncomp(self) -> int:
        return (self._phys if self._phys is not None else self._spec).shape[0]

    @property
    def has_phys(self) -> bool:
        return self._phys is not None

    @property
    def has_spec(self) -> bool:
        return self._spec is not None

    @property
    def phys(self) -> np.ndarray:
        if self._phys is None:
            self._phys = _ifftn(self.grid, self._spec)
        return self._phys

    @property
    def spec(self) -> np.ndarray:
        if self._spec is None:
            self._spec = _fftn(self.grid, self._phys)
        return self._spec


def transform_forward(f: Field) -> Field:
    """Return `f` with the spectral representation materialized."""
    f.spec
    return f


def transform_inverse(f: Field) -> Field:
    """Return `f` with the physical representation materialized."""
    f.phys
    return f


def gradient(f: Field, axis: int) -> Field:
    """Partial derivative along `axis` by multiplication with i*k in
    spectral space (Nyquist derivative zeroed)."""
    if not 0 <= axis < f.grid.dim:
        raise ValueError(f"axis {axis} out of range for dim {f.grid.dim}")
    return Field.from_spec(f.grid, 1j * f.grid.k_deriv[axis] * f.spec)


def laplacian(f: Field) -> Field:
    """Laplacian: multiplication by -|k|^2 per mode."""
    return Field.from_spec(f.grid, -f.grid.k2 * f.spec)


def second_derivative(f: Field, axis_a: int, axis_b: int) -> Field:
    """Direct second derivative d^2 f / dx_a dx_b, Nyquist retained so that
    the trace reproduces `laplacian` exactly."""
    grid = f.grid
    for ax in (axis_a, axis_b):
        if not 0 <= ax < grid.dim:
            raise ValueError(f"axis {ax} out of range for dim {grid.dim}")
    return Field.from_spec(grid, -grid.k_full[axis_a] * grid.k_full[axis_b] * f.spec)


def divergence(v: Field) -> Field:
    """Divergence of a dim-component vector field."""
    grid = v.grid
    if v.ncomp != grid.dim:
        raise ValueError(f"divergence needs {grid.dim} components, got {v.ncomp}")
    spec = sum(1j * grid.k_deriv[j] * v.spec[j] for j in range(grid.dim))
    return Field.from_spec(grid, spec[np.newaxis])


def curl(v: Field) -> Field:
    """Vorticity: 3-component curl for dim=3, scalar d1 v2 - d2 v1 for dim=2."""
    grid = v.grid
    if v.ncomp != grid.dim:
        raise ValueError(f"curl needs {grid.dim} components, got {v.ncomp}")
    ik = tuple(1j * k for k in grid.k_deriv)
    s = v.spec
    if grid.dim == 2:
        out = (ik[0] * s[1] - ik[1] * s[0])[np.newaxis]
    else:
        out = np.stack(
            [
                ik[1] * s[2] - ik[2] * s[1],
                ik[2] * s[0] - ik[0] * s[2],
                ik[0] * s[1] - ik[1] * s[0],
            ]
        )
    return Field.from_spec(grid, out)


def project_spec(grid: Grid, v_spec: np.ndarray) -> np.ndarray:
    """Array-level Leray projection P = I - k (k . v)/|k|^2.

    Modes where every derivative wavenumber vanishes (mode 0 and pure
    Nyquist modes) pass through unchanged.
    """
    k = grid.k_deriv
    k2 = grid.k2_deriv
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_k2 = np.where(k2 > 0, 1.0 / np.where(k2 > 0, k2, 1.0), 0.0)
    kdotv = sum(k[j] * v_spec[j] for j in range(grid.dim))
    return np.stack(
        [v_spec[j] - k[j] * kdotv * inv_k2 for j in range(grid.dim)]
    )


def leray_project(v: Field) -> Field:
    """Project a vector field onto its divergence-free part."""
    grid = v.grid
    if v.ncomp != grid.dim:
        raise ValueError(f"leray_project needs {grid.dim} components, got {v.ncomp}")
    return Field.from_spec(grid, project_spec(grid, v.spec))


def dealias(f: Field) -> Field:
    """Zero all modes with |k_j| > res/3 on any axis (2/3 rule)."""
    return Field.from_spec(f.grid, f.spec * f.grid.dealias_mask)


def l2_norm(f: Field) -> float:
    """L^2 norm over one torus cell, all components summed."""
    return float(np.sqrt(f.grid.cell_volume * np.sum(f.phys**2)))


def oversampled_phys(f: Field, factor: int = 2) -> np.ndarray:
    """Physical samples on a `factor`-times finer grid via spectral
    zero-padding.  Used for sharper L-infinity estimates near singular times."""
    grid = f.grid
    fine = Grid(grid.dim, grid.res * factor, grid.length)
    axes = grid.spatial_axes
    small = np.fft.fftshift(f.spec, axes=axes)
    big = np.zeros((f.ncomp,) + fine.shape, dtype=np.complex128)
    lo = (fine.res - grid.res) // 2
    sl = (slice(None),) + (slice(lo, lo + grid.res),) * grid.dim
    big[sl] = small
    big = np.fft.ifftshift(big, axes=axes)
    return _ifftn(fine, big)


def linf_norm(f: Field, oversample: bool = False) -> float:
    """Max over collocation points of the pointwise Euclidean magnitude
    across components.  With `oversample`, evaluated on a 2x zero-padded
    grid instead."""
    phys = oversampled_phys(f) if oversample else f.phys
    return float(np.sqrt(np.max(np.sum(phys**2, axis=0))))
