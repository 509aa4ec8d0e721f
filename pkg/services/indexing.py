from fractions import Fraction
from functools import lru_cache
import hashlib
import logging
import math

import pandas as pd

from errors import DomainError
from models import JonesParams, RationalPoint, TestFunctionalSpec

logger = logging.getLogger("sdspace.indexing")

# the first diagonals as they are listed for the N x N order; serpentine from d = 6 on
ORDER_PREFIX = ((1, 1), (2, 1), (1, 2), (1, 3), (2, 2), (3, 1), (3, 2), (2, 3), (1, 4), (4, 1))
PREFIX_LOOKUP = {pair: m for m, pair in enumerate(ORDER_PREFIX, start=1)}
DEFAULT_DEPTH = 1 << 16


def serpentine_index(m):
    if int(m) != m or m < 1:
        raise DomainError(f"flat index must be a positive integer, got {m}")
    m = int(m)
    if m <= len(ORDER_PREFIX):
        return ORDER_PREFIX[m - 1]
    # smallest j with j(j+1)/2 >= m; the diagonal is d = j + 1
    j = (math.isqrt(8 * m + 1) - 1) // 2
    if j * (j + 1) // 2 < m:
        j += 1
    d = j + 1
    pos = m - (d - 1) * (d - 2) // 2
    k = pos if d % 2 == 0 else d - pos
    return k, d - k


def inverse_serpentine(k, i):
    if k < 1 or i < 1:
        raise DomainError(f"(k, i) must be positive, got ({k}, {i})")
    if (k, i) in PREFIX_LOOKUP:
        return PREFIX_LOOKUP[(k, i)]
    d = k + i
    pos = k if d % 2 == 0 else d - k
    return (d - 1) * (d - 2) // 2 + pos


def calkin_wilf():
    """1, 1/2, 2, 1/3, 3/2, 2/3, 3, ... every positive rational once"""
    q = Fraction(1)
    while True:
        yield q
        q = 1 / (2 * math.floor(q) - q + 1)


class AxisRationals:
    """Lazily grown list 0, q1, -q1, q2, -q2, ... of rationals with |q| <= radius"""

    def __init__(self, radius, depth=DEFAULT_DEPTH):
        self.radius = Fraction(radius).limit_denominator(1 << 20)
        self.depth = depth
        self.values = [Fraction(0)]
        self._source = calkin_wilf()
        self._scanned = 0

    def get(self, index):
        while len(self.values) <= index:
            if self._scanned >= self.depth:
                raise DomainError(
                    f"box radius {float(self.radius)} yields only {len(self.values)} rationals "
                    f"within depth {self.depth}"
                )
            q = next(self._source)
            self._scanned += 1
            if q <= self.radius:
                self.values.extend((q, -q))
        return self.values[index]


@lru_cache(maxsize=16)
def _axis(box_radius, depth):
    return AxisRationals(box_radius, depth)


def _product_index(m, n):
    """Zero-based per-axis indices of the m-th point of the nested serpentine product"""
    if n == 1:
        return (m - 1,)
    k, i = serpentine_index(m)
    return (k - 1,) + _product_index(i, n - 1)


def center_at(n, box_radius, index, depth=DEFAULT_DEPTH):
    axis = _axis(float(box_radius), depth)
    return RationalPoint(tuple(axis.get(j) for j in _product_index(index, n)))


def enumerate_centers(n, box_radius, count, depth=DEFAULT_DEPTH):
    if n < 1 or count < 1:
        raise DomainError("dimension and count must be positive")
    if box_radius <= 0:
        raise DomainError("box radius must be positive")
    return [center_at(n, box_radius, index, depth) for index in range(1, count + 1)]


def centers_digest(centers):
    text = ";".join(str(c) for c in centers)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def level_weight(k):
    return 2.0 ** (-k)


def make_spec(m, k, i, center):
    params = JonesParams.for_level(k)
    return TestFunctionalSpec(
        m=m,
        k=k,
        i=i,
        center=center,
        a_k=params.a_k,
        eps_k=params.eps_k,
        t_k=level_weight(k),
        cube_edge=math.pi / params.a_k,
    )


@lru_cache(maxsize=32)
def _specs(n, box_radius, k_max, m_max):
    specs = []
    for m in range(1, m_max + 1):
        k, i = serpentine_index(m)
        if k > k_max:
            continue
        specs.append(make_spec(m, k, i, center_at(n, box_radius, i)))
    logger.info(
        f"Built {len(specs)} functionals for n={n}, K_max={k_max}, M_max={m_max}, box={box_radius}"
    )
    return tuple(specs)


def functional_specs(n, box_radius, k_max, m_max):
    if k_max < 1 or m_max < 1:
        raise DomainError("K_max and M_max must be positive")
    return list(_specs(int(n), float(box_radius), int(k_max), int(m_max)))


@lru_cache(maxsize=32)
def level_counts(m_max):
    """Number of flat indices m <= m_max at each level, all levels included"""
    counts = {}
    for m in range(1, m_max + 1):
        k, _ = serpentine_index(m)
        counts[k] = counts.get(k, 0) + 1
    return counts


def specs_frame(specs):
    rows = []
    for spec in specs:
        row = {"m": spec.m, "k": spec.k, "i": spec.i}
        for j, c in enumerate(spec.center.coords):
            row[f"center_num_{j}"] = c.numerator
            row[f"center_den_{j}"] = c.denominator
        row["eps"] = spec.eps_k
        row["t"] = spec.t_k
        row["cube_edge"] = spec.cube_edge
        rows.append(row)
    return pd.DataFrame(rows)


def export_specs_csv(specs, path):
    specs_frame(specs).to_csv(path, index=False)
    logger.info(f"Wrote {len(specs)} functional specs to {path}")
