"""Runtime monitors: blow-up integrands, controlled norms, energy law and
the exponential envelope fit.

The blow-up monitor integrand is dimension dependent:

    dim=3:  max|omega| + (max|grad d|)^2
    dim=2:  (max|grad d|)^2

with L-infinity norms taken as collocation maxima (optionally on a 2x
zero-padded grid).  Its running time integral B(t) is accumulated by the
trapezoid rule and drives the early-stopping rule of the runner: a finite
threshold on B(t) stands in for the unobservable divergence at the first
singular time.

The second-derivative L^2 norm of the director is evaluated as the L^2
norm of its Laplacian; the two agree exactly for periodic fields and the
identity is exercised by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields as dataclass_fields

import numpy as np

from .errors import EnvelopeUndefinedError
from .spectral import Field, curl, dealias, gradient, l2_norm, laplacian, linf_norm
from .state import FluidState, constraint_residual

__all__ = [
    "DiagnosticsRecord",
    "blowup_integrand",
    "accumulate_monitor",
    "energy_and_dissipation",
    "energy_residual",
    "lemma21_norms",
    "gronwall_envelope",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-step ledger of norms, energy budget and monitor values."""

    t: float
    u_l2: float
    grad_d_l2: float
    omega_l2: float
    omega_linf: float
    grad_d_linf: float
    hess_d_l2: float
    energy: float
    dissipation: float
    monitor_integrand: float
    monitor_accum: float
    sphere_norm_err: float
    sphere_identity_err: float

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in dataclass_fields(cls))

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in self.field_names())


def _grad_d_field(s: FluidState) -> Field:
    """All dim*3 first derivatives of the director stacked as one field,
    so component-magnitude norms give the Frobenius norm of grad d."""
    grid = s.grid
    spec = np.concatenate([1j * grid.k_deriv[i] * s.d.spec
                           for i in range(grid.dim)])
    return Field.from_spec(grid, spec)


def blowup_integrand(s: FluidState, oversample: bool = False) -> float:
    """Pointwise-supremum integrand of the blow-up monitor."""
    g = linf_norm(_grad_d_field(s), oversample=oversample)
    if s.grid.dim == 2:
        return g * g
    return linf_norm(curl(s.u), oversample=oversample) + g * g


def accumulate_monitor(prev: DiagnosticsRecord, curr_integrand: float,
                       dt: float) -> float:
    """Trapezoidal update of the accumulated monitor B."""
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    return prev.monitor_accum + 0.5 * dt * (prev.monitor_integrand + curr_integrand)


def _heat_flow_tendency(s: FluidState) -> Field:
    """lap d + |grad d|^2 d, the dissipative director tendency at u = 0."""
    grid = s.grid
    grad_sq = np.zeros(grid.shape)
    for i in range(grid.dim):
        g = gradient(s.d, i).phys
        grad_sq += np.sum(g * g, axis=0)
    cubic = dealias(Field.from_phys(grid, grad_sq * s.d.phys))
    return Field.from_spec(grid, laplacian(s.d).spec + cubic.spec)


def energy_and_dissipation(s: FluidState) -> tuple:
    """(E, D): kinetic-plus-elastic energy and twice the instantaneous
    dissipation rate, integrated over one torus cell."""
    grid = s.grid
    cell = grid.cell_volume
    energy = cell * float(np.sum(s.u.phys**2))
    grad_u = Field.from_spec(grid, np.concatenate(
        [1j * grid.k_deriv[i] * s.u.spec for i in range(grid.dim)]))
    grad_u_sq = float(np.sum(grad_u.phys**2))
    gd = _grad_d_field(s)
    energy += cell * float(np.sum(gd.phys**2))
    tension = _heat_flow_tendency(s)
    dissipation = 2.0 * cell * (grad_u_sq + float(np.sum(tension.phys**2)))
    return energy, dissipation


def energy_residual(history) -> float:
    """Max over recorded times of the relative defect in the energy
    identity E(t) + int_0^t D - E(0), with the time integral by trapezoid."""
    if len(history) == 0:
        raise ValueError("history is empty")
    times = [r.t for r in history]
    if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
        raise ValueError("history times must be strictly increasing")
    e0 = history[0].energy
    scale = max(e0, 1.0)
    worst = 0.0
    integral = 0.0
    for prev, curr in zip(history, history[1:]):
        integral += 0.5 * (curr.t - prev.t) * (prev.dissipation + curr.dissipation)
        worst = max(worst, abs(curr.energy + integral - e0) / scale)
    return worst


def lemma21_norms(s: FluidState) -> tuple:
    """(L^2 norm of the vorticity, L^2 norm of lap d).

    The latter equals the L^2 norm of the full second-derivative tensor of
    d for periodic fields, so the Hessian is never assembled.
    """
    return l2_norm(curl(s.u)), l2_norm(laplacian(s.d))


def gronwall_envelope(history) -> float:
    """Minimal C >= 0 such that

        omega_l2(t)^2 + hess_d_l2(t)^2 <= (initial value) * exp(C * B(t))

    holds at every recorded time.  Returns 0 when the left side never
    exceeds its initial value; inf when the initial value is zero but the
    left side grew.  Raises EnvelopeUndefinedError when B is identically
    zero while the left side grew (no envelope of this form exists).
    """
    if len(history) == 0:
        raise ValueError("history is empty")
    lhs0 = history[0].omega_l2 ** 2 + history[0].hess_d_l2 ** 2
    c = 0.0
    for rec in history[1:]:
        lhs = rec.omega_l2 ** 2 + rec.hess_d_l2 ** 2
        if lhs <= lhs0:
            continue
        if rec.monitor_accum <= 0.0:
            raise EnvelopeUndefinedError(
                f"monitored norms grew at t = {rec.t:.6g} while the "
                "accumulated monitor is zero"
            )
        if lhs0 == 0.0:
            return math.inf
        c = max(c, math.log(lhs / lhs0) / rec.monitor_accum)
    return c


def measure(s: FluidState, monitor_integrand: float,
            monitor_accum: float, oversample: bool = False) -> DiagnosticsRecord:
    """Evaluate every recorded norm of the current state.  The monitor
    values are accumulated by the caller (they need the step history)."""
    omega = curl(s.u)
    grad_d = _grad_d_field(s)
    energy, dissipation = energy_and_dissipation(s)
    norm_err, identity_err = constraint_residual(s)
    return DiagnosticsRecord(
        t=s.t,
        u_l2=l2_norm(s.u),
        grad_d_l2=l2_norm(grad_d),
        omega_l2=l2_norm(omega),
        omega_linf=linf_norm(omega, oversample=oversample),
        grad_d_linf=linf_norm(grad_d, oversample=oversample),
        hess_d_l2=l2_norm(laplacian(s.d)),
        energy=energy,
        dissipation=dissipation,
        monitor_integrand=monitor_integrand,
        monitor_accum=monitor_accum,
        sphere_norm_err=norm_err,
        sphere_identity_err=identity_err,
    )
