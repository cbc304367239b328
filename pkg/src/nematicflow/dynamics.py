"""Right-hand-side evaluation and integrating-factor IMEX time stepping.

The semi-discrete system in spectral space is

    u_hat' = -nu |k|^2 u_hat + N_u(u, d)
    d_hat' = -    |k|^2 d_hat + N_d(u, d)

with N_u = P[-(u.grad)u - lap d . grad d] (P the Leray projection) and
N_d = |grad d|^2 d - (u.grad)d.  Diffusion is integrated exactly via the
per-mode factors exp(-nu |k|^2 dt), exp(-|k|^2 dt); the nonlinear parts are
advanced explicitly with RK2 (Heun) or classical RK4 on the transformed
variables.  Nonlinear products are formed pointwise and dealiased by the
2/3 rule; linear terms are never dealiased.

The director is renormalized to unit length once per full step, not per
substage, so the formal RK order is preserved; the radial drift removed by
renormalization is of the same order as the local truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalOverflowError
from .spectral import Field, Grid, linf_norm, project_spec
from .state import FluidState, PhysicsParams, normalize_director

__all__ = ["StepPolicy", "momentum_rhs", "director_rhs", "step", "suggest_dt"]

INTEGRATORS = ("IF-RK2", "IF-RK4")


@dataclass(frozen=True)
class StepPolicy:
    """Time step policy: either a fixed dt or a CFL factor, a final time,
    and the integrator tag."""

    t_max: float
    dt: float | None = None
    cfl_factor: float | None = 0.5
    integrator: str = "IF-RK4"

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt is None:
            if self.cfl_factor is None or not 0 < self.cfl_factor <= 1:
                raise ValueError(f"cfl_factor must be in (0, 1], got {self.cfl_factor}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")


def _ifft(grid: Grid, spec: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(spec, axes=grid.spatial_axes, norm="forward").real


def _fft(grid: Grid, phys: np.ndarray) -> np.ndarray:
    return np.fft.fftn(phys, axes=grid.spatial_axes, norm="forward")


def _nonlinear(grid: Grid, u_spec: np.ndarray, d_spec: np.ndarray,
               freeze_director: bool = False) -> tuple:
    """Explicitly-treated tendencies (N_u_hat, N_d_hat), dealiased.

    With freeze_director the director tendency is zero and only the
    elastic forcing of the frozen d acts on u (used for decoupling checks).

    Transforms are batched: one inverse FFT for the fields plus the
    director Laplacian, one for all first derivatives, one forward FFT for
    the assembled products.
    """
    dim = grid.dim
    mask = grid.dealias_mask

    fields = _ifft(grid, np.concatenate([u_spec, d_spec, -grid.k2 * d_spec]))
    u, d, lap_d = fields[:dim], fields[dim:dim + 3], fields[dim + 3:]

    ud_spec = np.concatenate([u_spec, d_spec])
    deriv = _ifft(grid, np.stack([1j * grid.k_deriv[i] * ud_spec
                                  for i in range(dim)]))
    grad_u = deriv[:, :dim]     # [j, i] = d u_i / d x_j
    grad_d = deriv[:, dim:]     # [i, m] = d d_m / d x_i

    conv = np.einsum("j...,ji...->i...", u, grad_u)
    force = np.einsum("m...,im...->i...", lap_d, grad_d)

    if freeze_director:
        n_u = project_spec(grid, _fft(grid, -(conv + force)) * mask)
        return n_u, np.zeros_like(d_spec)

    grad_sq = np.einsum("im...,im...->...", grad_d, grad_d)
    transport = np.einsum("j...,jm...->m...", u, grad_d)
    products = _fft(grid, np.concatenate([-(conv + force),
                                          grad_sq * d - transport])) * mask
    n_u = project_spec(grid, products[:dim])
    return n_u, products[dim:]


@lru_cache(maxsize=64)
def _decay(grid: Grid, coeff: float) -> np.ndarray:
    """Per-mode diffusion factor exp(-coeff |k|^2); cached because fixed-dt
    runs reuse the same factors every step."""
    out = np.exp(-coeff * grid.k2)
    out.setflags(write=False)
    return out


def momentum_rhs(s: FluidState, params: PhysicsParams) -> Field:
    """Full momentum tendency P[-(u.grad)u - lap d . grad d] + nu lap u."""
    grid = s.grid
    n_u, _ = _nonlinear(grid, s.u.spec, s.d.spec)
    return Field.from_spec(grid, n_u - params.nu * grid.k2 * s.u.spec)


def director_rhs(s: FluidState) -> Field:
    """Full director tendency lap d + |grad d|^2 d - (u.grad)d."""
    grid = s.grid
    _, n_d = _nonlinear(grid, s.u.spec, s.d.spec)
    return Field.from_spec(grid, n_d - grid.k2 * s.d.spec)


def step(s: FluidState, params: PhysicsParams, dt: float,
         integrator: str = "IF-RK4", freeze_director: bool = False) -> FluidState:
    """Advance the coupled state by one time step of size dt.

    Raises NumericalOverflowError on non-finite values (reported upstream
    as suspected blow-up or under-resolution) and propagates
    DegenerateDirectorError from the renormalization.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if integrator not in INTEGRATORS:
        raise ValueError(f"integrator must be one of {INTEGRATORS}")
    grid = s.grid
    u0, d0 = s.u.spec, s.d.spec

    def nl(u_spec, d_spec):
        return _nonlinear(grid, u_spec, d_spec, freeze_director=freeze_director)

    if integrator == "IF-RK2":
        eu = _decay(grid, params.nu * dt)
        ed = _decay(grid, dt)
        ku1, kd1 = nl(u0, d0)
        ku2, kd2 = nl(eu * (u0 + dt * ku1), ed * (d0 + dt * kd1))
        u1 = eu * u0 + 0.5 * dt * (eu * ku1 + ku2)
        d1 = ed * d0 + 0.5 * dt * (ed * kd1 + kd2)
    else:
        euh = _decay(grid, params.nu * dt / 2)
        edh = _decay(grid, dt / 2)
        euf = euh * euh
        edf = edh * edh
        ku1, kd1 = nl(u0, d0)
        ku2, kd2 = nl(euh * (u0 + 0.5 * dt * ku1), edh * (d0 + 0.5 * dt * kd1))
        ku3, kd3 = nl(euh * u0 + 0.5 * dt * ku2, edh * d0 + 0.5 * dt * kd2)
        ku4, kd4 = nl(euf * u0 + dt * euh * ku3, edf * d0 + dt * edh * kd3)
        u1 = euf * u0 + dt / 6.0 * (euf * ku1 + 2.0 * euh * (ku2 + ku3) + ku4)
        d1 = edf * d0 + dt / 6.0 * (edf * kd1 + 2.0 * edh * (kd2 + kd3) + kd4)

    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(d1))):
        raise NumericalOverflowError(
            f"non-finite values at t = {s.t + dt:.6g}; suspected blow-up or "
            "loss of resolution"
        )

    u1 = project_spec(grid, u1)  # keep div u at roundoff against drift
    out = FluidState(grid, Field.from_spec(grid, u1), Field.from_spec(grid, d1),
                     t=s.t + dt)
    if freeze_director:
        return FluidState(grid, out.u, s.d, t=out.t)
    return normalize_director(out)


def grad_linf(s: FluidState) -> float:
    """Max pointwise Frobenius norm of grad d."""
    grid = s.grid
    g = np.stack([_ifft(grid, 1j * grid.k_deriv[i] * s.d.spec)
                  for i in range(grid.dim)])
    return float(np.sqrt(np.max(np.sum(g * g, axis=(0, 1)))))


def suggest_dt(s: FluidState, policy: StepPolicy) -> float:
    """Next time step: CFL-limited by the transport speeds, capped by the
    remaining time to t_max; fixed-dt policies only apply the cap."""
    remaining = policy.t_max - s.t
    if policy.dt is not None:
        return min(policy.dt, remaining)
    speed = max(linf_norm(s.u), grad_linf(s), 1.0)
    return min(policy.cfl_factor * s.grid.dx / speed, remaining)
