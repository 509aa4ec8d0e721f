from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import math

import numpy as np

from errors import DimensionMismatch, DomainError, MissingDerivativeError


def jsonable(value):
    """Convert numpy / complex values into plain JSON types"""
    if isinstance(value, (complex, np.complexfloating)):
        return {"real": float(value.real), "imag": float(value.imag)}
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class Cube:
    """Axis-aligned closed box given by its center and per-axis half-widths"""

    center: Tuple[float, ...]
    half_widths: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(
            self, "half_widths", tuple(float(h) for h in self.half_widths)
        )
        if len(self.center) != len(self.half_widths):
            raise DimensionMismatch("cube center and half-widths differ in length")
        if any(h <= 0 for h in self.half_widths):
            raise DomainError("cube half-widths must be positive")

    @classmethod
    def from_bounds(cls, lower, upper):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        return cls(tuple(0.5 * (lower + upper)), tuple(0.5 * (upper - lower)))

    @classmethod
    def around(cls, center, radius):
        center = tuple(np.atleast_1d(np.asarray(center, dtype=float)))
        return cls(center, tuple(float(radius) for _ in center))

    @property
    def dimension(self):
        return len(self.center)

    @property
    def lower(self):
        return np.asarray(self.center) - np.asarray(self.half_widths)

    @property
    def upper(self):
        return np.asarray(self.center) + np.asarray(self.half_widths)

    @property
    def radius(self):
        return max(self.half_widths)

    def intersect(self, other: "Cube") -> Optional["Cube"]:
        if other.dimension != self.dimension:
            raise DimensionMismatch("cannot intersect cubes of different dimension")
        lo = np.maximum(self.lower, other.lower)
        hi = np.minimum(self.upper, other.upper)
        if np.any(hi <= lo):
            return None
        return Cube.from_bounds(lo, hi)

    def strictly_contains(self, other: "Cube") -> bool:
        return bool(np.all(self.lower < other.lower) and np.all(other.upper < self.upper))

    def contains_points(self, points):
        points = np.asarray(points, dtype=float)
        return np.all((points >= self.lower) & (points <= self.upper), axis=-1)


@dataclass(frozen=True)
class QuadConfig:
    points_per_panel: int = 16
    max_panels_per_axis: int = 4096
    abs_tol: float = 1e-10
    # accepts a panel once the refinement change is at rounding level of its mass
    rel_tol: float = 1e-13
    breakpoints: Tuple[float, ...] = ()
    # quarter period of e^{iu}
    max_panel_width: float = math.pi / 2
    max_cube_nodes: int = 2 ** 21

    def __post_init__(self):
        if self.points_per_panel < 2:
            raise DomainError("points_per_panel must be at least 2")
        if self.abs_tol <= 0:
            raise DomainError("abs_tol must be positive")
        if self.max_panels_per_axis < 1 or self.max_cube_nodes < 1:
            raise DomainError("panel caps must be positive")
        object.__setattr__(
            self, "breakpoints", tuple(sorted(set(float(b) for b in self.breakpoints)))
        )

    def with_breakpoints(self, breakpoints):
        return replace(self, breakpoints=tuple(breakpoints))


@dataclass
class QuadResult:
    value: object
    err_est: float
    panels_used: int
    converged: bool = True

    def __post_init__(self):
        self.err_est = abs(float(self.err_est))

    def scaled(self, factor):
        return QuadResult(
            self.value * factor, self.err_est * abs(factor), self.panels_used, self.converged
        )

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class JonesParams:
    k: int
    a_k: float
    eps_k: float

    @classmethod
    def for_level(cls, k: int) -> "JonesParams":
        if int(k) != k or k < 1:
            raise DomainError(f"level must be a positive integer, got {k}")
        a_k = 3.0 * 2.0 ** (k - 1)
        return cls(int(k), a_k, math.pi / (4.0 * a_k))


@dataclass(frozen=True)
class MollifierSpec:
    k: int
    c_k: float
    support: Tuple[float, float]


@dataclass(frozen=True)
class RationalPoint:
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @property
    def dimension(self):
        return len(self.coords)

    def as_array(self):
        return np.array([float(c) for c in self.coords])

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class TestFunctionalSpec:
    m: int
    k: int
    i: int
    center: RationalPoint
    a_k: float
    eps_k: float
    t_k: float
    cube_edge: float

    __test__ = False

    @property
    def n(self):
        return self.center.dimension

    @property
    def center_array(self):
        return self.center.as_array()

    @property
    def support_box(self) -> Cube:
        """Box of half-width eps_k on which E_k is nonzero"""
        return Cube.around(self.center_array, self.eps_k)


@dataclass(frozen=True)
class FieldSampler:
    """Evaluatable scalar or vector field on R^n.

    ``eval`` maps an (N, n) array of points to (N,) (scalar) or (N, components).
    ``scale`` multiplies every value and is factored out of integrals.
    """

    n: int
    components: int
    eval: Callable[[np.ndarray], np.ndarray]
    label: str
    support: Optional[Cube] = None
    derivative_provider: Optional[Callable[[np.ndarray, Tuple[int, ...]], np.ndarray]] = None
    breakpoints: Optional[Callable[[int, float, float], Sequence[float]]] = None
    scale: complex = 1.0
    sup_norm: Optional[float] = None
    active_components: Optional[Tuple[int, ...]] = None
    params: Dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.components not in (1, self.n):
            raise DimensionMismatch(
                f"field must have 1 or {self.n} components, got {self.components}"
            )
        if self.support is not None and self.support.dimension != self.n:
            raise DimensionMismatch("support cube dimension differs from field dimension")

    @property
    def is_vector(self):
        return self.components > 1 or (self.n == 1 and self.params.get("vector", False))

    @property
    def support_radius(self):
        return math.inf if self.support is None else self.support.radius

    def _points(self, points):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, self.n) if self.n > 1 else points.reshape(-1, 1)
        if points.shape[-1] != self.n:
            raise DimensionMismatch(
                f"field {self.label} expects {self.n}-dimensional points, got {points.shape[-1]}"
            )
        return points

    def _mask(self, points, values):
        if self.support is None:
            return values
        inside = self.support.contains_points(points)
        if values.ndim > 1:
            inside = inside[:, None]
        return np.where(inside, values, 0.0)

    def evaluate_unscaled(self, points):
        points = self._points(points)
        values = np.asarray(self.eval(points), dtype=complex)
        return self._mask(points, values)

    def evaluate(self, points):
        return self.scale * self.evaluate_unscaled(points)

    def derivative_unscaled(self, points, alpha):
        if self.derivative_provider is None:
            raise MissingDerivativeError(f"field {self.label} has no derivative provider")
        points = self._points(points)
        values = np.asarray(self.derivative_provider(points, tuple(alpha)), dtype=complex)
        return self._mask(points, values)

    def derivative(self, points, alpha):
        return self.scale * self.derivative_unscaled(points, alpha)

    def axis_breakpoints(self, axis, lo, hi):
        if self.breakpoints is None:
            return []
        return [b for b in self.breakpoints(axis, lo, hi) if lo < b < hi]

    def with_scale(self, factor):
        return replace(self, scale=self.scale * factor, label=f"{factor}*{self.label}")


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite sum of weighted point masses"""

    atoms: Tuple[Tuple[np.ndarray, np.ndarray], ...]
    label: str = "measure"

    def __post_init__(self):
        atoms = []
        for point, weight in self.atoms:
            point = np.atleast_1d(np.asarray(point, dtype=float))
            weight = np.atleast_1d(np.asarray(weight, dtype=complex))
            if point.shape != weight.shape:
                raise DimensionMismatch("atom weight must be an n-vector matching its point")
            if not np.all(np.isfinite(weight)):
                raise DomainError("atom weights must be finite")
            atoms.append((point, weight))
        if atoms and len({p.shape[0] for p, _ in atoms}) != 1:
            raise DimensionMismatch("atoms live in different dimensions")
        object.__setattr__(self, "atoms", tuple(atoms))

    @property
    def n(self):
        return self.atoms[0][0].shape[0] if self.atoms else 0

    @property
    def total_mass(self):
        return float(sum(np.linalg.norm(w) for _, w in self.atoms))

    def with_scale(self, factor):
        return AtomicMeasure(
            tuple((p, w * factor) for p, w in self.atoms), f"{factor}*{self.label}"
        )


@dataclass(frozen=True)
class TruncationConfig:
    k_max: int = 12
    m_max: int = 2000
    box_radius: float = 8.0
    quad: QuadConfig = field(default_factory=QuadConfig)
    weighting: str = "level"

    def __post_init__(self):
        if self.k_max < 1 or self.m_max < 1 or self.box_radius <= 0:
            raise DomainError("truncation parameters must be positive")
        if self.k_max > 30:
            raise DomainError("k_max above 30 underflows the level weights")
        if self.weighting not in ("level", "normalized"):
            raise DomainError(f"unknown weighting {self.weighting!r}")


@dataclass
class SDNormResult:
    value: float
    p: float
    contributions: List[float]
    tail_bound: float
    quad_err: float
    converged: bool = True
    spec_indices: List[int] = field(default_factory=list)
    level_contributions: Dict[int, float] = field(default_factory=dict)
    k_max: int = 0
    m_max: int = 0
    label: str = ""

    def to_dict(self, contributions=True):
        payload = {
            "label": self.label,
            "value": self.value,
            "p": self.p,
            "k_max": self.k_max,
            "m_max": self.m_max,
            "tail_bound": self.tail_bound,
            "quad_err": self.quad_err,
            "converged": self.converged,
            "lower_bound_only": math.isinf(self.p),
            "level_contributions": self.level_contributions,
        }
        if contributions:
            payload["spec_indices"] = self.spec_indices
            payload["contributions"] = self.contributions
        return jsonable(payload)


@dataclass
class VerificationCase:
    label: str
    lhs: object
    rhs: object
    residual: float
    tolerance: float
    passed: bool
    asserted: bool = True
    ratio: Optional[float] = None
    details: Dict[str, object] = field(default_factory=dict)

    def to_dict(self):
        return jsonable(
            {
                "label": self.label,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "residual": self.residual,
                "ratio": self.ratio,
                "tolerance": self.tolerance,
                "pass": self.passed,
                "asserted": self.asserted,
                "details": self.details,
            }
        )


@dataclass
class VerificationReport:
    suite: str
    cases: List[VerificationCase] = field(default_factory=list)
    empirical_constant: Optional[float] = None
    notes: str = ""
    converged: bool = True

    def add(self, case: VerificationCase):
        self.cases.append(case)
        return case

    def check(self, label, lhs, rhs, tolerance, residual=None, asserted=True, **details):
        """Record |lhs - rhs| <= tolerance"""
        if residual is None:
            residual = float(abs(lhs - rhs))
        passed = bool(residual <= tolerance)
        return self.add(
            VerificationCase(label, lhs, rhs, residual, tolerance, passed, asserted, details=details)
        )

    def bound(self, label, lhs, rhs, tolerance=0.0, asserted=True, **details):
        """Record lhs <= rhs * (1 + tolerance)"""
        lhs_f, rhs_f = float(abs(lhs)), float(abs(rhs))
        ratio = lhs_f / rhs_f if rhs_f > 0 else (0.0 if lhs_f == 0 else math.inf)
        passed = bool(lhs_f <= rhs_f * (1.0 + tolerance) or lhs_f <= tolerance * 1e-3)
        return self.add(
            VerificationCase(
                label,
                lhs,
                rhs,
                max(0.0, lhs_f - rhs_f),
                tolerance,
                passed,
                asserted,
                ratio=ratio,
                details=details,
            )
        )

    def holds(self, label, condition, value=None, asserted=True, **details):
        """Record a yes/no property"""
        return self.add(
            VerificationCase(
                label, value, bool(condition), 0.0 if condition else 1.0, 0.0, bool(condition), asserted, details=details
            )
        )

    def finite(self, label, value, asserted=True, **details):
        return self.holds(label, math.isfinite(float(abs(value))), value, asserted, **details)

    @property
    def passed(self):
        return all(c.passed for c in self.cases if c.asserted)

    @property
    def failures(self):
        return [c for c in self.cases if c.asserted and not c.passed]

    def to_dict(self):
        return jsonable(
            {
                "suite": self.suite,
                "passed": self.passed,
                "converged": self.converged,
                "empirical_constant": self.empirical_constant,
                "notes": self.notes,
                "cases": [c.to_dict() for c in sorted(self.cases, key=lambda c: c.label)],
            }
        )


@dataclass(frozen=True)
class BVBox:
    bounds: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        if not bounds or any(a >= b for a, b in bounds):
            raise DomainError("BVBox needs a_i < b_i on every axis")
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self):
        return len(self.bounds)

    @property
    def lower(self):
        return np.array([a for a, _ in self.bounds])

    @property
    def upper(self):
        return np.array([b for _, b in self.bounds])

    def as_cube(self):
        return Cube.from_bounds(self.lower, self.upper)
