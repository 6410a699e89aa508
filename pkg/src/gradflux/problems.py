"""Problem instances for the drift-weighted least-gradient energy.

An instance collects the weight a, the drift F, the forcing H and optionally
a known exact minimizer and a scalar potential f with F = gradient(f).  The
energy being minimized over fields vanishing on the boundary is

    E(w) = integral( a |grad w + F| + H w ).

``example1`` builds the benchmark instance with the closed-form minimizer
u(x, y) = x y (1-x) (1-y); ``validate`` measures the standing hypotheses
(positive weight bounds, drift size, forcing bound).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, ScalarField, VectorField, gradient, norm

__all__ = ["ProblemData", "ValidationReport", "example1", "validate"]


@dataclass(frozen=True, eq=False)
class ProblemData:
    """One instance (a, F, H) plus optional exact solution and drift potential.

    m and M are the measured bounds of the weight (min/max over all nodes).
    When ``potential_f`` is present it must reproduce F through the discrete
    gradient; when ``exact_u`` is present it must vanish on the boundary.
    """

    grid: GridSpec
    a: ScalarField
    F: VectorField
    H: ScalarField
    exact_u: ScalarField | None = None
    potential_f: ScalarField | None = None
    name: str = "custom"
    m: float = field(init=False)
    M: float = field(init=False)

    def __post_init__(self):
        for f_ in (self.a, self.F, self.H, self.exact_u, self.potential_f):
            if f_ is not None and f_.grid != self.grid:
                raise ValueError("problem fields live on different grids")
        object.__setattr__(self, "m", float(self.a.values.min()))
        object.__setattr__(self, "M", float(self.a.values.max()))
        if self.potential_f is not None:
            drift_gap = norm(self.F - gradient(self.potential_f), "linf")
            if drift_gap > 1e-12 * max(self.M, 1.0):
                raise ValueError(
                    f"potential does not reproduce the drift: "
                    f"|F - grad f|_inf = {drift_gap:.3e}"
                )
        if self.exact_u is not None:
            if np.abs(self.exact_u.boundary_values()).max() != 0.0:
                raise ValueError("exact solution must vanish on the boundary")


@dataclass(frozen=True)
class ValidationReport:
    """Measured hypothesis data for one instance."""

    m: float
    M: float
    k1: float
    H_linf: float
    C_Omega: float | None
    poincare_ok: bool | None
    warnings: tuple[str, ...]


def example1(grid: GridSpec, analytic_drift: bool = False) -> ProblemData:
    """Benchmark instance with exact minimizer u(x, y) = x y (1-x) (1-y).

    The drift is assembled as F = (1, x+y) - gradient(u) with the discrete
    gradient, so the identity gradient(u) + F = (1, x+y) holds exactly at
    every node; the weight a = sqrt(1 + (x+y)^2) = |gradient(u) + F| then
    gives a flux with unit coefficient (sigma = 1) on the whole grid.  With
    ``analytic_drift=True`` the drift is sampled from the closed form
    -grad u + (1, x+y) instead, and the identity holds only to O(h).

    The forcing is H = div(1, x+y) = 1.  The drift is not conservative
    (curl(1, x+y) = -1), so no potential is attached.
    """
    x, y = grid.meshgrid()
    u = x * y * (1.0 - x) * (1.0 - y)
    u_field = ScalarField(grid, u)
    tx = np.ones_like(x)  # target gradient-plus-drift, x component
    ty = x + y
    if analytic_drift:
        fx = tx - y * (1.0 - y) * (1.0 - 2.0 * x)
        fy = ty - x * (1.0 - x) * (1.0 - 2.0 * y)
    else:
        gu = gradient(u_field)
        fx = tx - gu.x.values
        fy = ty - gu.y.values
    a = np.sqrt(1.0 + (x + y) ** 2)
    return ProblemData(
        grid,
        a=ScalarField(grid, a),
        F=VectorField.from_arrays(grid, fx, fy),
        H=ScalarField.full(grid, 1.0),
        exact_u=u_field,
        name="example1",
    )


def validate(p: ProblemData, C_Omega: float | None = None) -> ValidationReport:
    """Measure weight bounds, drift size and forcing bound; warn on violations.

    Violations are reported as warnings rather than errors because perturbed
    instances may sit at the edge of the hypotheses.  When ``C_Omega`` is
    supplied, the report additionally records whether |H|_inf < m / C_Omega.
    """
    warnings: list[str] = []
    m, M = p.m, p.M
    if m <= 0.0:
        warnings.append("weight not positive")
    k1 = norm(p.F, "l1")
    h_linf = norm(p.H, "linf")
    poincare_ok = None
    if C_Omega is not None:
        if C_Omega <= 0:
            raise ValueError("C_Omega must be positive")
        poincare_ok = bool(h_linf < m / C_Omega)
        if not poincare_ok:
            warnings.append("forcing bound violated: |H|_inf >= m / C_Omega")
    return ValidationReport(
        m=m,
        M=M,
        k1=k1,
        H_linf=h_linf,
        C_Omega=C_Omega,
        poincare_ok=poincare_ok,
        warnings=tuple(warnings),
    )
