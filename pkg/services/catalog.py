"""Built-in field families and grid-backed fields.

Every family builder takes the dimension plus keyword parameters and returns a
FieldSampler with closed-form derivatives where the family admits them.
"""

from math import comb
import logging
import os

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite import hermval
import pandas as pd
from scipy.interpolate import RegularGridInterpolator
import yaml

from errors import ConfigError, DimensionMismatch, DomainError, MissingDerivativeError
from models import Cube, FieldSampler
from services.field_ops import zero_field

logger = logging.getLogger("sdspace.catalog")

EMBEDDING_FAMILIES = ("bump", "coulomb-tail", "fresnel-chirp", "gaussian", "oscillating-pack", "sinc")
# exp(1/(s^2-1)) underflows past this
SMOOTH_EDGE = 1.0 - 1.0 / 700.0


def _center(n, center):
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.size == 1:
        c = np.full(n, float(c[0]))
    if c.size != n:
        raise DimensionMismatch(f"center {center} does not match n={n}")
    return c


def _faces(support):
    def breakpoints(axis, lo, hi):
        return [b for b in (support.lower[axis], support.upper[axis]) if lo < b < hi]

    return breakpoints


def _smooth_profile(s, order):
    """d^order/ds^order of exp(1 + 1/(s^2 - 1)), zero for |s| >= 1"""
    inside = s * s < SMOOTH_EDGE
    ss = np.where(inside, s, 0.0)
    d = ss * ss - 1.0
    phi = np.exp(1.0 + 1.0 / d)
    if order == 0:
        out = phi
    else:
        q1 = -2.0 * ss / d ** 2
        if order == 1:
            out = phi * q1
        else:
            q2 = (6.0 * ss ** 2 + 2.0) / d ** 3
            if order == 2:
                out = phi * (q1 ** 2 + q2)
            elif order == 3:
                q3 = -24.0 * ss * (ss ** 2 + 1.0) / d ** 4
                out = phi * (q1 ** 3 + 3.0 * q1 * q2 + q3)
            else:
                raise MissingDerivativeError("smooth bump derivatives are available up to order 3")
    return np.where(inside, out, 0.0)


def _polynomial_profile(power):
    base = Polynomial([1.0, 0.0, -1.0]) ** power

    def profile(s, order):
        inside = np.abs(s) < 1.0
        return np.where(inside, base.deriv(order)(s) if order else base(s), 0.0)

    return profile


def bump_factor(profile_name="smooth", power=8):
    if profile_name == "smooth":
        return _smooth_profile
    if profile_name == "polynomial":
        return _polynomial_profile(int(power))
    raise ConfigError(f"unknown bump profile {profile_name!r}")


def _separable(points, center, radii, profile, alpha):
    s = (points - center) / radii
    out = np.ones(points.shape[0])
    for j in range(points.shape[1]):
        order = alpha[j] if alpha is not None else 0
        out = out * profile(s[:, j], order) / radii[j] ** order
    return out


def gaussian(n, center=0.0, sigma=1.0):
    c = _center(n, center)
    sigma = float(sigma)
    if sigma <= 0:
        raise DomainError("sigma must be positive")

    def evaluate(points):
        return np.exp(-np.sum((points - c) ** 2, axis=1) / sigma ** 2)

    def derivative(points, alpha):
        s = (points - c) / sigma
        out = np.ones(points.shape[0])
        for j, order in enumerate(alpha):
            coef = np.zeros(order + 1)
            coef[order] = 1.0
            out = out * (-1.0) ** order * hermval(s[:, j], coef) * np.exp(-s[:, j] ** 2) / sigma ** order
        return out

    return FieldSampler(
        n=n,
        components=1,
        eval=evaluate,
        label=f"gaussian(sigma={sigma:g})",
        derivative_provider=derivative,
        sup_norm=1.0,
        params={"length_scale": sigma, "center": c.tolist(), "sigma": sigma},
    )


def bump(n, center=0.0, radius=1.0, profile="smooth", power=8):
    """Separable bump; ``radius`` is one half-width or one per axis"""
    c = _center(n, center)
    radii = _center(n, radius)
    if np.any(radii <= 0):
        raise DomainError("bump radius must be positive")
    factor = bump_factor(profile, power)
    support = Cube(tuple(c), tuple(radii))
    isotropic = bool(np.all(radii == radii[0]))
    shown = f"{radii[0]:g}" if isotropic else "x".join(f"{r:g}" for r in radii)

    return FieldSampler(
        n=n,
        components=1,
        eval=lambda points: _separable(points, c, radii, factor, None),
        label=f"bump(r={shown},{profile})",
        support=support,
        derivative_provider=lambda points, alpha: _separable(points, c, radii, factor, alpha),
        breakpoints=_faces(support),
        sup_norm=1.0,
        params={
            "length_scale": float(radii.min()),
            "center": c.tolist(),
            "radius": float(radii[0]) if isotropic else radii.tolist(),
            "profile": profile,
        },
    )


def sinc(n, center=0.0, truncate=None):
    c = _center(n, center)

    def evaluate(points):
        return np.prod(np.sinc((points - c) / np.pi), axis=1)

    support = None if truncate is None else Cube.around(c, float(truncate))
    return FieldSampler(
        n=n,
        components=1,
        eval=evaluate,
        label="sinc" if truncate is None else f"sinc|{float(truncate):g}",
        support=support,
        breakpoints=None if support is None else _faces(support),
        sup_norm=1.0,
        params={"center": c.tolist(), "truncate": truncate},
    )


def fresnel_chirp(n, center=0.0, beta=1.0):
    c = _center(n, center)
    beta = float(beta)

    def evaluate(points):
        return np.exp(1j * beta * np.sum((points - c) ** 2, axis=1))

    def derivative(points, alpha):
        s = points - c
        out = np.ones(points.shape[0], dtype=complex)
        for j, order in enumerate(alpha):
            w = 2j * beta * s[:, j]
            dw = 2j * beta
            factor = {0: 1.0, 1: w, 2: dw + w ** 2, 3: 3.0 * w * dw + w ** 3}.get(order)
            if factor is None:
                raise MissingDerivativeError("chirp derivatives are available up to order 3")
            out = out * factor
        return out * evaluate(points)

    return FieldSampler(
        n=n,
        components=1,
        eval=evaluate,
        label=f"fresnel-chirp(beta={beta:g})",
        derivative_provider=derivative,
        sup_norm=1.0,
        params={"center": c.tolist(), "beta": beta},
    )


def _carrier(y, frequency, order):
    if frequency == 0:
        return np.ones_like(y) if order == 0 else np.zeros_like(y)
    return frequency ** order * np.sin(frequency * y + order * np.pi / 2.0)


def oscillating_pack(n, frequency=1.0, center=0.0, radius=6.0, profile="smooth", power=8):
    """sin(frequency * x_1) times a bump; frequency 0 gives the bare bump"""
    c = _center(n, center)
    frequency = float(frequency)
    envelope = bump(n, c, radius, profile, power)

    def evaluate(points):
        return _carrier(points[:, 0], frequency, 0) * envelope.eval(points)

    def derivative(points, alpha):
        total = 0.0
        for j in range(alpha[0] + 1):
            rest = (alpha[0] - j,) + tuple(alpha[1:])
            total = total + comb(alpha[0], j) * _carrier(points[:, 0], frequency, j) * envelope.derivative_provider(
                points, rest
            )
        return total

    return FieldSampler(
        n=n,
        components=1,
        eval=evaluate,
        label=f"oscillating-pack(m={frequency:g})",
        support=envelope.support,
        derivative_provider=derivative,
        breakpoints=envelope.breakpoints,
        sup_norm=1.0,
        params={"length_scale": min(float(radius), 1.0 / max(frequency, 1.0)), "frequency": frequency},
    )


def coulomb_tail(n, center=0.0, gamma=1.0):
    c = _center(n, center)
    gamma = float(gamma)
    if gamma <= 0:
        raise DomainError("decay exponent must be positive")

    def evaluate(points):
        return (1.0 + np.sum((points - c) ** 2, axis=1)) ** (-gamma / 2.0)

    def derivative(points, alpha):
        if sum(alpha) > 1:
            raise MissingDerivativeError("coulomb-tail has closed-form first derivatives only")
        if sum(alpha) == 0:
            return evaluate(points)
        j = alpha.index(1)
        r2 = 1.0 + np.sum((points - c) ** 2, axis=1)
        return -gamma * (points[:, j] - c[j]) * r2 ** (-gamma / 2.0 - 1.0)

    return FieldSampler(
        n=n,
        components=1,
        eval=evaluate,
        label=f"coulomb-tail(gamma={gamma:g})",
        derivative_provider=derivative,
        sup_norm=1.0,
        params={"center": c.tolist(), "gamma": gamma},
    )


def sine(n, amplitude=1.0, wave=1.0, phase=0.0):
    """amplitude * sin(wave . x + phase)"""
    k = _center(n, wave)
    amplitude, phase = float(amplitude), float(phase)

    def derivative(points, alpha):
        order = sum(alpha)
        return amplitude * np.prod(k ** np.asarray(alpha)) * np.sin(points @ k + phase + order * np.pi / 2.0)

    return FieldSampler(
        n=n,
        components=1,
        eval=lambda points: derivative(points, (0,) * n),
        label=f"sine(k={k.tolist()})",
        derivative_provider=derivative,
        sup_norm=abs(amplitude),
        params={"wave": k.tolist()},
    )


def sine_product(n, frequency=1.0):
    frequency = float(frequency)

    def derivative(points, alpha):
        out = np.ones(points.shape[0])
        for j, order in enumerate(alpha):
            out = out * frequency ** order * np.sin(frequency * points[:, j] + order * np.pi / 2.0)
        return out

    return FieldSampler(
        n=n,
        components=1,
        eval=lambda points: derivative(points, (0,) * n),
        label=f"sine-product(w={frequency:g})",
        derivative_provider=derivative,
        sup_norm=1.0,
    )


def cosine_chirp(n, beta=1.0):
    """cos(beta |x|^2)"""
    beta = float(beta)
    return FieldSampler(
        n=n,
        components=1,
        eval=lambda points: np.cos(beta * np.sum(points ** 2, axis=1)),
        label=f"cosine-chirp(beta={beta:g})",
        sup_norm=1.0,
    )


def monomial(n, powers=1, coefficient=1.0):
    p = _center(n, powers).astype(int)
    coefficient = float(coefficient)

    def derivative(points, alpha):
        out = np.full(points.shape[0], coefficient)
        for j, order in enumerate(alpha):
            if order > p[j]:
                return np.zeros(points.shape[0])
            falling = np.prod(np.arange(p[j] - order + 1, p[j] + 1)) if order else 1.0
            out = out * falling * points[:, j] ** (p[j] - order)
        return out

    return FieldSampler(
        n=n,
        components=1,
        eval=lambda points: derivative(points, (0,) * n),
        label=f"monomial({p.tolist()})",
        derivative_provider=derivative,
        params={"powers": p.tolist()},
    )


def alternating_step(n, width=1.0):
    """(-1)^floor(x_1 / width)"""
    width = float(width)
    if width <= 0:
        raise DomainError("step width must be positive")

    def evaluate(points):
        return np.where(np.floor(points[:, 0] / width) % 2 == 0, 1.0, -1.0)

    def breakpoints(axis, lo, hi):
        if axis != 0:
            return []
        first, last = int(np.ceil(lo / width)), int(np.floor(hi / width))
        return [j * width for j in range(first, last + 1)]

    return FieldSampler(
        n=n,
        components=1,
        eval=evaluate,
        label=f"alternating-step(w={width:g})",
        # zero off the jump set
        derivative_provider=lambda points, alpha: np.zeros(points.shape[0]),
        breakpoints=breakpoints,
        sup_norm=1.0,
    )


def constant(n, value=1.0, radius=None):
    value = complex(value)
    support = None if radius is None else Cube.around(np.zeros(n), float(radius))

    def derivative(points, alpha):
        if sum(alpha):
            return np.zeros(points.shape[0], dtype=complex)
        return np.full(points.shape[0], value)

    return FieldSampler(
        n=n,
        components=1,
        eval=lambda points: derivative(points, (0,) * n),
        label=f"constant({value.real:g})" if radius is None else f"constant({value.real:g})|{float(radius):g}",
        support=support,
        derivative_provider=derivative,
        breakpoints=None if support is None else _faces(support),
        sup_norm=abs(value),
    )


def zero(n):
    return zero_field(n)


FAMILIES = {
    "alternating-step": (alternating_step, "(-1)^floor(x1/width)"),
    "bump": (bump, "separable compact bump, smooth or (1-s^2)^power profile"),
    "constant": (constant, "constant value, optionally cut to [-radius, radius]^n"),
    "cosine-chirp": (cosine_chirp, "cos(beta |x|^2)"),
    "coulomb-tail": (coulomb_tail, "(1 + |x-c|^2)^(-gamma/2)"),
    "fresnel-chirp": (fresnel_chirp, "exp(i beta |x-c|^2)"),
    "gaussian": (gaussian, "exp(-|x-c|^2 / sigma^2)"),
    "monomial": (monomial, "coefficient * prod x_j^p_j"),
    "oscillating-pack": (oscillating_pack, "sin(frequency x1) * bump"),
    "sinc": (sinc, "prod sin(x_j - c_j)/(x_j - c_j), optionally truncated"),
    "sine": (sine, "amplitude * sin(wave . x + phase)"),
    "sine-product": (sine_product, "prod sin(frequency x_j)"),
    "zero": (zero, "the zero field"),
}


def _defaults(builder):
    code = builder.__code__
    names = code.co_varnames[1 : code.co_argcount]
    return dict(zip(names, builder.__defaults__ or ()))


def describe_catalog():
    rows = []
    for name in sorted(FAMILIES):
        builder, description = FAMILIES[name]
        rows.append({"family": name, "parameters": _defaults(builder), "description": description})
    return rows


def build_field(family, n, **params):
    if family not in FAMILIES:
        raise ConfigError(f"unknown field family {family!r}")
    builder, _ = FAMILIES[family]
    unknown = set(params) - set(_defaults(builder))
    if unknown:
        raise ConfigError(f"unknown parameters for {family}: {sorted(unknown)}")
    return builder(n, **params)


def parse_field_ref(ref):
    """'family' or 'family:key=value,key=value' with YAML-typed values"""
    name, _, rest = ref.partition(":")
    params = {}
    if rest:
        for item in rest.split(";") if ";" in rest else rest.split(","):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"malformed field parameter {item!r} in {ref!r}")
            params[key.strip()] = yaml.safe_load(value)
    return name.strip(), params


def field_from_ref(ref, n, catalog_params=None):
    if ref.endswith(".csv") or os.path.sep in ref:
        return load_grid_csv(ref)
    family, params = parse_field_ref(ref)
    merged = dict((catalog_params or {}).get(family, {}))
    merged.update(params)
    return build_field(family, n, **merged)


def load_grid_csv(path):
    """Grid field: header `n,components,spacing,origin`, then row-major samples"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"grid file {path} does not exist")
    header = pd.read_csv(path, nrows=1)
    expected = ["n", "components", "spacing", "origin"]
    if [c.strip() for c in header.columns] != expected:
        raise ConfigError(f"grid header must be {','.join(expected)}")
    n = int(header.iloc[0, 0])
    components = int(header.iloc[0, 1])
    spacing = float(header.iloc[0, 2])
    origin = float(header.iloc[0, 3])
    samples = pd.read_csv(path, skiprows=2, header=None).to_numpy(dtype=float)

    if samples.shape[1] == components:
        values = samples.astype(complex)
    elif samples.shape[1] == 2 * components:
        values = samples[:, 0::2] + 1j * samples[:, 1::2]
    else:
        raise ConfigError(f"grid rows need {components} or {2 * components} columns")
    per_axis = int(round(samples.shape[0] ** (1.0 / n)))
    if per_axis ** n != samples.shape[0] or per_axis < 2:
        raise ConfigError(f"{samples.shape[0]} samples do not form an n={n} grid")

    axis = origin + spacing * np.arange(per_axis)
    shape = (per_axis,) * n
    parts = []
    for c in range(components):
        grid = values[:, c].reshape(shape)
        parts.append(
            (
                RegularGridInterpolator([axis] * n, grid.real, bounds_error=False, fill_value=0.0),
                RegularGridInterpolator([axis] * n, grid.imag, bounds_error=False, fill_value=0.0),
            )
        )

    def evaluate(points):
        cols = [re(points) + 1j * im(points) for re, im in parts]
        return cols[0] if components == 1 else np.stack(cols, axis=1)

    def breakpoints(ax, lo, hi):
        return [float(x) for x in axis if lo < x < hi]

    logger.info(f"Loaded grid field {path}: n={n}, {per_axis} nodes per axis, {components} component(s)")
    return FieldSampler(
        n=n,
        components=components,
        eval=evaluate,
        label=os.path.basename(path),
        support=Cube.from_bounds(np.full(n, axis[0]), np.full(n, axis[-1])),
        breakpoints=breakpoints,
        sup_norm=float(np.linalg.norm(values, axis=-1).max()),
        params={"vector": components > 1},
    )
