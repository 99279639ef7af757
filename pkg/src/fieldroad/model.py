"""Physical parameters and the periodic KPP reaction term.

The field equation carries a nonlinearity f(x, v), L-periodic in x, that
vanishes at v = 0 and v = 1, is positive and dominated by its linearization
f_v(x, 0) * v on (0, 1), negative beyond 1, and has f(x, v)/v decreasing in v.
The canonical family is the periodic logistic f(x, v) = a(x) v (1 - v); a
callable pair can be supplied instead and vetted by :func:`kpp_check`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DomainError

__all__ = [
    "ModelParams",
    "PeriodicCoefficient",
    "ReactionSpec",
    "KppReport",
    "f_eval",
    "fv0",
    "kpp_check",
]


@dataclass(frozen=True)
class ModelParams:
    """Constants of the coupled road/field system.

    D, d are road and field diffusivities, mu the road-to-field exchange
    rate, nu the field-to-road rate, L the spatial period in x and R the
    strip width. All must be strictly positive. The carrying-capacity pair
    of the system is (nu/mu, 1).
    """

    D: float
    d: float
    mu: float
    nu: float
    L: float
    R: float

    def __post_init__(self):
        for name in ("D", "d", "mu", "nu", "L", "R"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ConfigError(f"{name} must be > 0, got {value}")

    @property
    def capacity(self) -> tuple[float, float]:
        """The constant pair (nu/mu, 1) that the half-plane system settles on."""
        return (self.nu / self.mu, 1.0)


@dataclass(frozen=True)
class PeriodicCoefficient:
    """L-periodic scalar coefficient a(x).

    Either a truncated Fourier series (mean plus cosine/sine amplitudes of the
    harmonics 2*pi*k*x/L, k = 1..len(amps)) or a sampled table on a uniform
    grid over [0, L), interpolated linearly with periodic wrap. Table
    interpolation preserves the min/max of the samples.
    """

    period: float
    mean: float = 0.0
    cos_amps: tuple[float, ...] = ()
    sin_amps: tuple[float, ...] = ()
    table: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.period <= 0:
            raise ConfigError(f"period must be > 0, got {self.period}")
        if self.table is not None and len(self.table) < 2:
            raise ConfigError("sampled table needs at least 2 points")
        object.__setattr__(self, "cos_amps", tuple(float(c) for c in self.cos_amps))
        object.__setattr__(self, "sin_amps", tuple(float(s) for s in self.sin_amps))
        if self.table is not None:
            object.__setattr__(self, "table", tuple(float(t) for t in self.table))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.table is not None:
            vals = np.asarray(self.table)
            n = len(vals)
            s = (x % self.period) / self.period * n
            i0 = np.floor(s).astype(int) % n
            i1 = (i0 + 1) % n
            w = s - np.floor(s)
            out = (1.0 - w) * vals[i0] + w * vals[i1]
        else:
            out = np.full_like(x, self.mean, dtype=float)
            for k, c in enumerate(self.cos_amps, start=1):
                out = out + c * np.cos(2.0 * np.pi * k * x / self.period)
            for k, s_amp in enumerate(self.sin_amps, start=1):
                out = out + s_amp * np.sin(2.0 * np.pi * k * x / self.period)
        return out if out.ndim else float(out)

    def extrema(self, n_samples: int = 4096) -> tuple[float, float]:
        """(min, max) over one period, by dense sampling (exact for tables)."""
        if self.table is not None:
            vals = np.asarray(self.table)
            return float(vals.min()), float(vals.max())
        x = np.linspace(0.0, self.period, n_samples, endpoint=False)
        vals = self(x)
        return float(np.min(vals)), float(np.max(vals))


def constant_coefficient(value: float, period: float) -> PeriodicCoefficient:
    return PeriodicCoefficient(period=period, mean=value)


@dataclass(frozen=True)
class ReactionSpec:
    """Periodic KPP nonlinearity and its linearization at zero.

    family "logistic": f(x, v) = a(x) v (1 - v) with a an L-periodic
    coefficient; family "custom": user callables f(x, v) and f_v(x, 0),
    accepted on the contract that :func:`kpp_check` passes.
    """

    family: str
    period: float
    coefficient: Optional[PeriodicCoefficient] = None
    f: Optional[Callable] = None
    f_v0: Optional[Callable] = None

    def __post_init__(self):
        if self.family == "logistic":
            if self.coefficient is None:
                raise ConfigError("logistic reaction needs a periodic coefficient")
            if abs(self.coefficient.period - self.period) > 1e-12 * self.period:
                raise ConfigError("coefficient period must equal the reaction period")
        elif self.family == "custom":
            if self.f is None or self.f_v0 is None:
                raise ConfigError("custom reaction needs callables f and f_v0")
        else:
            raise ConfigError(f"unknown reaction family {self.family!r}")

    @property
    def m(self) -> float:
        """min over one period of f_v(x, 0)."""
        lo, _ = self._linearization_extrema()
        return lo

    @property
    def M(self) -> float:
        """max over one period of f_v(x, 0)."""
        _, hi = self._linearization_extrema()
        return hi

    def _linearization_extrema(self, n_samples: int = 4096) -> tuple[float, float]:
        if self.family == "logistic":
            return self.coefficient.extrema(n_samples)
        x = np.linspace(0.0, self.period, n_samples, endpoint=False)
        vals = np.array([float(self.f_v0(xi)) for xi in x])
        return float(vals.min()), float(vals.max())


def logistic_reaction(a: PeriodicCoefficient) -> ReactionSpec:
    return ReactionSpec(family="logistic", period=a.period, coefficient=a)


def homogeneous_logistic(rate: float, period: float) -> ReactionSpec:
    return logistic_reaction(constant_coefficient(rate, period))


def f_eval(spec: ReactionSpec, x, v):
    """Evaluate f(x, v); x is reduced mod the period, v must be >= 0."""
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr < 0):
        raise DomainError("reaction evaluated at negative density v")
    x_arr = np.asarray(x, dtype=float) % spec.period
    if spec.family == "logistic":
        out = spec.coefficient(x_arr) * v_arr * (1.0 - v_arr)
    else:
        out = np.vectorize(spec.f, otypes=[float])(x_arr, v_arr)
    if np.ndim(out) == 0:
        return float(out)
    return out


def fv0(spec: ReactionSpec, x):
    """Evaluate the linearization zeta(x) = f_v(x, 0); x reduced mod period."""
    x_arr = np.asarray(x, dtype=float) % spec.period
    if spec.family == "logistic":
        out = spec.coefficient(x_arr)
    else:
        out = np.vectorize(spec.f_v0, otypes=[float])(x_arr)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass
class KppReport:
    ok: bool
    m: float
    M: float
    violations: list = field(default_factory=list)

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return f"kpp_check: {status}, m={self.m:.6g}, M={self.M:.6g}"


def kpp_check(spec: ReactionSpec, n_x: int = 64, n_v: int = 64, v_max: float = 10.0) -> KppReport:
    """Sample (x, v) and verify the structural reaction hypotheses.

    Checks f(x,0) = 0, f(x,1) = 0, 0 < f <= f_v(x,0) v on (0,1), f < 0 on
    (1, v_max], strict decrease of f(x,v)/v along the sampled v, and m > 0.
    Violations are reported, never raised.
    """
    if n_x < 2 or n_v < 2:
        raise ConfigError("kpp_check needs n_x, n_v >= 2")
    xs = np.linspace(0.0, spec.period, n_x, endpoint=False)
    violations = []
    tol = 1e-12

    zeta = np.array([fv0(spec, xi) for xi in xs])
    m = float(zeta.min())
    M = float(zeta.max())
    if m <= 0:
        violations.append((float(xs[int(np.argmin(zeta))]), 0.0, "m = min f_v(.,0) > 0 fails"))

    vs_unit = np.linspace(0.0, 1.0, n_v)
    vs_above = np.linspace(1.0, v_max, n_v)[1:]
    for i, xi in enumerate(xs):
        f0 = f_eval(spec, xi, 0.0)
        if abs(f0) > tol:
            violations.append((float(xi), 0.0, "f(x,0) = 0 fails"))
        f1 = f_eval(spec, xi, 1.0)
        if abs(f1) > tol:
            violations.append((float(xi), 1.0, "f(x,1) = 0 fails"))
        for vj in vs_unit[1:-1]:
            fv = f_eval(spec, xi, vj)
            if not (fv > 0.0):
                violations.append((float(xi), float(vj), "f > 0 on (0,1) fails"))
            if fv > zeta[i] * vj + tol:
                violations.append((float(xi), float(vj), "f <= f_v(.,0)v fails"))
        for vj in vs_above:
            if not (f_eval(spec, xi, vj) < 0.0):
                violations.append((float(xi), float(vj), "f < 0 on (1, v_max] fails"))
        ratios = [f_eval(spec, xi, vj) / vj for vj in vs_unit[1:]]
        diffs = np.diff(ratios)
        if np.any(diffs >= tol):
            j = int(np.argmax(diffs))
            violations.append((float(xi), float(vs_unit[1:][j]), "f(x,v)/v decreasing fails"))

    return KppReport(ok=(not violations), m=m, M=M, violations=violations)
