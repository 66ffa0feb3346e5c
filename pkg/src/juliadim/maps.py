"""The two quadratic families, their conjugacy and membership tests.

``f_delta(z) = (1+delta)*z + z**2`` has fixed points 0 and -delta with
multipliers 1+delta and 1-delta; ``p_eps(z) = z**2 + 1/4 + eps`` is the
shifted standard family.  The similarity ``tau(z) = z + (1+delta)/2``
conjugates f_delta to p_eps exactly when eps = -delta**2/4.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousBranchError

ESCAPE_RADIUS_DEFAULT = 4.0
MAX_ITER_DEFAULT = 10_000


class Family(enum.Enum):
    F_DELTA = "f_delta"
    P_EPSILON = "p_epsilon"


@dataclass(frozen=True)
class Param:
    """A parameter point, canonically stored as delta.

    eps is always recomputed as -delta**2/4, never stored, so the two
    representations cannot drift apart; +delta and -delta share one eps.
    """

    delta: complex

    @property
    def epsilon(self) -> complex:
        return -self.delta * self.delta / 4.0

    @property
    def t(self) -> float:
        return abs(self.delta)

    @property
    def alpha(self) -> float:
        return float(np.angle(self.delta))

    @staticmethod
    def from_epsilon(epsilon: complex) -> "Param":
        """Inverse of the eps map, picking the root with Re(delta) >= 0."""
        delta = 2.0 * np.sqrt(complex(-epsilon))
        if delta.real < 0 or (delta.real == 0 and delta.imag < 0):
            delta = -delta
        return Param(complex(delta))


@dataclass(frozen=True)
class QuadMap:
    family: Family
    param: Param

    def __call__(self, z):
        return evaluate(self, z)


def f_delta(delta: complex) -> QuadMap:
    return QuadMap(Family.F_DELTA, Param(delta))


def p_epsilon(epsilon: complex) -> QuadMap:
    return QuadMap(Family.P_EPSILON, Param.from_epsilon(epsilon))


def evaluate(qmap: QuadMap, z):
    """Value of the family polynomial at z (scalar or array)."""
    if qmap.family is Family.F_DELTA:
        return (1.0 + qmap.param.delta) * z + z * z
    return z * z + 0.25 + qmap.param.epsilon


def evaluate_deriv(qmap: QuadMap, z):
    """First derivative of the family polynomial at z."""
    if qmap.family is Family.F_DELTA:
        return (1.0 + qmap.param.delta) + 2.0 * z
    return 2.0 * z


def critical_point(qmap: QuadMap) -> complex:
    if qmap.family is Family.F_DELTA:
        return -(1.0 + qmap.param.delta) / 2.0
    return 0.0j


def fixed_points(qmap: QuadMap) -> tuple[complex, complex]:
    """Both fixed points; for F_DELTA these are 0 and -delta."""
    if qmap.family is Family.F_DELTA:
        return 0.0j, -qmap.param.delta
    d = qmap.param.delta
    # conjugate images of 0 and -delta under tau
    return conjugate_to_p(0.0j, d), conjugate_to_p(-d, d)


def conjugate_to_p(z, delta: complex):
    """The similarity tau(z) = z + (1+delta)/2 carrying f_delta to p_eps."""
    return z + (1.0 + delta) / 2.0


def conjugate_from_p(z, delta: complex):
    return z - (1.0 + delta) / 2.0


def inverse_branch(qmap: QuadMap, z: complex, hint: complex,
                   ambiguity_rtol: float = 1e-12) -> complex:
    """The preimage of z under the map that lies closest to ``hint``.

    Raises AmbiguousBranchError when both preimages are equidistant from
    the hint to within ``ambiguity_rtol`` relative tolerance, in which case
    the caller must supply a sharper hint.
    """
    w1, w2 = preimage_pair(qmap, z)
    d1, d2 = abs(w1 - hint), abs(w2 - hint)
    scale = max(d1, d2)
    if scale > 0 and abs(d1 - d2) <= ambiguity_rtol * scale:
        raise AmbiguousBranchError(
            f"preimages of {z} equidistant from hint {hint}")
    return w1 if d1 <= d2 else w2


def preimage_pair(qmap: QuadMap, z):
    """Both solutions w of qmap(w) = z (vectorized over z)."""
    if qmap.family is Family.F_DELTA:
        h = 1.0 + qmap.param.delta
        r = np.sqrt(np.asarray(h * h / 4.0 + z, dtype=complex))
        return -h / 2.0 + r, -h / 2.0 - r
    r = np.sqrt(np.asarray(z - 0.25 - qmap.param.epsilon, dtype=complex))
    return r, -r


def inverse_branch_array(qmap: QuadMap, z, hint):
    """Vectorized hint-nearest preimage; no ambiguity detection."""
    w1, w2 = preimage_pair(qmap, z)
    return np.where(np.abs(w1 - hint) <= np.abs(w2 - hint), w1, w2)


def in_mandelbrot(delta: complex, max_iter: int = MAX_ITER_DEFAULT,
                  escape_radius: float = ESCAPE_RADIUS_DEFAULT) -> bool:
    """True iff the critical orbit of f_delta stays bounded for max_iter steps.

    The orbit is iterated in the p_eps normalization (critical point 0),
    where |z| > escape_radius >= 4 certifies escape.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if escape_radius < 4.0:
        raise ValueError("escape_radius must be >= 4")
    c = 0.25 - complex(delta) ** 2 / 4.0
    z = 0.0j
    r2 = escape_radius * escape_radius
    for _ in range(max_iter):
        z = z * z + c
        if (z.real * z.real + z.imag * z.imag) > r2:
            return False
    return True


def in_mandelbrot_eps(epsilon: complex, max_iter: int = MAX_ITER_DEFAULT,
                      escape_radius: float = ESCAPE_RADIUS_DEFAULT) -> bool:
    """Membership test in the p_eps parameter plane."""
    return in_mandelbrot(Param.from_epsilon(epsilon).delta,
                         max_iter, escape_radius)


def in_main_disk(delta: complex) -> bool:
    """True iff delta lies in B(1,1), where -delta is attracting."""
    return abs(delta - 1.0) < 1.0
