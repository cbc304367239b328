"""Initial-condition generators.

Each generator returns a FluidState that already satisfies the state
invariants (divergence-free velocity, unit-length director) without
further processing.

The random generator uses numpy's PCG64 bit generator with an explicit
seed, so identical seeds reproduce bit-identical states across platforms.
No generator claims finite-time blow-up; `random_smooth` with large
amplitude is a monitor-growth stress test, not a singularity candidate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnderResolvedError
from .spectral import Field, Grid, leray_project
from .state import FluidState, normalize_director

__all__ = ["ScenarioSpec", "SCENARIO_NAMES", "build_scenario",
           "taylor_green", "winding_director", "random_smooth"]


@dataclass(frozen=True)
class ScenarioSpec:
    """Scenario selection: registered name plus numeric parameters."""

    name: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in SCENARIO_NAMES:
            raise ValueError(
                f"unknown scenario {self.name!r}; known: {sorted(SCENARIO_NAMES)}"
            )


def taylor_green(grid: Grid, amplitude: float = 1.0) -> FluidState:
    """Taylor-Green vortex velocity with a constant director (0, 0, 1).

    With the director constant the coupling terms vanish identically and
    the run reduces to plain Navier-Stokes; in 2-D the velocity decays as
    exp(-2 nu t) times the initial profile.
    """
    if not amplitude > 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    x = grid.coords()
    shape = grid.shape
    u = np.zeros((grid.dim,) + shape)
    if grid.dim == 2:
        u[0] = amplitude * np.sin(x[0]) * np.cos(x[1])
        u[1] = -amplitude * np.cos(x[0]) * np.sin(x[1])
    else:
        u[0] = amplitude * np.sin(x[0]) * np.cos(x[1]) * np.cos(x[2])
        u[1] = -amplitude * np.cos(x[0]) * np.sin(x[1]) * np.cos(x[2])
    d = np.zeros((3,) + shape)
    d[2] = 1.0
    return FluidState(grid, Field.from_phys(grid, u), Field.from_phys(grid, d))


def winding_director(grid: Grid, k: int = 1) -> FluidState:
    """Quiescent fluid with the director winding k times along x_0:
    d = (cos k x_0, sin k x_0, 0).

    A stationary harmonic map: lap d = -k^2 d and |grad d|^2 = k^2, so the
    heat-flow tendency vanishes, as does the elastic forcing on u.
    """
    k = int(k)
    if abs(k) < 1:
        raise ValueError(f"winding number must satisfy |k| >= 1, got {k}")
    if abs(k) >= grid.res / 3:
        raise UnderResolvedError(
            f"winding number {k} is not resolved at res {grid.res} "
            f"(need |k| < res/3)"
        )
    x0 = grid.coords()[0]
    shape = grid.shape
    d = np.zeros((3,) + shape)
    d[0] = np.cos(k * x0)
    d[1] = np.sin(k * x0)
    u = np.zeros((grid.dim,) + shape)
    return FluidState(grid, Field.from_phys(grid, u), Field.from_phys(grid, d))


def _smooth_noise(grid: Grid, rng: np.random.Generator, ncomp: int,
                  slope: float) -> np.ndarray:
    """Real random field with spectral magnitude ~ (1 + |k|)^{-slope},
    |k| in integer mode units, truncated to the dealiased band so the
    generated data is fully resolved (pointwise renormalization of a
    near-cutoff tail would otherwise leave an O(k^2 tail) residual in the
    sphere identity)."""
    white = rng.standard_normal((ncomp,) + grid.shape)
    spec = np.fft.fftn(white, axes=grid.spatial_axes, norm="forward")
    k_int = np.sqrt(sum((k / (2.0 * np.pi / grid.length)) ** 2
                        for k in grid.k_full))
    spec *= (1.0 + k_int) ** (-slope) * grid.dealias_mask
    return np.fft.ifftn(spec, axes=grid.spatial_axes, norm="forward").real


def random_smooth(grid: Grid, seed: int = 0, slope: float = 4.0,
                  amplitude: float = 0.5) -> FluidState:
    """Random smooth divergence-free velocity and a randomly tilted
    director about (0, 0, 1).

    Both fields are drawn with spectral slope `slope` and rescaled so
    their pointwise maxima equal `amplitude`; the velocity mean is zeroed.
    """
    if not slope > grid.dim / 2 + 1:
        raise ValueError(
            f"slope must exceed dim/2 + 1 = {grid.dim / 2 + 1} for smooth data"
        )
    if not amplitude > 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    rng = np.random.Generator(np.random.PCG64(int(seed)))

    u = _smooth_noise(grid, rng, grid.dim, slope)
    u -= u.mean(axis=grid.spatial_axes, keepdims=True)
    u_field = leray_project(Field.from_phys(grid, u))
    umax = np.sqrt(np.max(np.sum(u_field.phys**2, axis=0)))
    u_field = Field.from_phys(grid, u_field.phys * (amplitude / umax))

    pert = _smooth_noise(grid, rng, 3, slope)
    pmax = np.sqrt(np.max(np.sum(pert**2, axis=0)))
    pert *= amplitude / pmax
    d = pert.copy()
    d[2] += 1.0
    state = FluidState(grid, u_field, Field.from_phys(grid, _half_band_unit(grid, d)))
    return normalize_director(state)


def _half_band_unit(grid: Grid, d: np.ndarray, passes: int = 3) -> np.ndarray:
    """Alternate band-limiting to half the Nyquist band with pointwise
    normalization.  A unit-at-collocation director limited to |k_j| <=
    (res/2 - 1)/2 has |d|^2 - 1 exactly representable on the grid, so the
    discrete sphere identity holds to near roundoff instead of being
    polluted by aliasing of near-cutoff modes."""
    cutoff = (grid.res // 2 - 1) // 2
    keep = np.ones(grid.shape, dtype=bool)
    kabs = np.abs(grid.kfreq_int)
    for ax in range(grid.dim):
        shape = [1] * grid.dim
        shape[ax] = grid.res
        keep &= kabs.reshape(shape) <= cutoff
    axes = grid.spatial_axes
    for _ in range(passes):
        spec = np.fft.fftn(d, axes=axes, norm="forward") * keep
        d = np.fft.ifftn(spec, axes=axes, norm="forward").real
        d = d / np.sqrt(np.sum(d * d, axis=0))
    return d


_BUILDERS = {
    "taylor_green": (taylor_green, {"amplitude": "amplitude"}),
    "winding_director": (winding_director, {"k": "k"}),
    "random_smooth": (random_smooth,
                      {"seed": "seed", "slope": "slope", "amplitude": "amplitude"}),
}

SCENARIO_NAMES = frozenset(_BUILDERS)


def build_scenario(grid: Grid, spec: ScenarioSpec) -> FluidState:
    """Instantiate the initial state named by `spec` on `grid`."""
    builder, accepted = _BUILDERS[spec.name]
    kwargs = {}
    for key, value in spec.parameters.items():
        if key not in accepted:
            raise ValueError(
                f"scenario {spec.name!r} does not take parameter {key!r}"
            )
        kwargs[accepted[key]] = value
    return builder(grid, **kwargs)
