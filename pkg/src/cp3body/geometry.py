"""Three-atom configurations, triangle data and light-cone classification.

Conventions: atom labels A, B, C; side lengths

    alpha = |r_B - r_C|,  beta = |r_A - r_C|,  gamma = |r_A - r_B|

with unit vectors n_bc = (r_B - r_C)/alpha, n_ac = (r_A - r_C)/beta,
n_ab = (r_A - r_B)/gamma.  Times enter as ct in the same length unit.
Everything here is a pure value type; functions are deterministic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometry
from .polarizability import PolarizabilityModel

EPS_GEOM = 1e-9
EPS_EDGE = 1e-10
_EPS_UNIT = 1e-12


def _as_point(p, name):
    v = np.array(p, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class AtomConfig:
    """Positions and polarizability models of the three atoms.

    Positions are given in one common length unit L0; atoms must be
    pairwise farther apart than eps_geom.
    """

    position_a: np.ndarray
    position_b: np.ndarray
    position_c: np.ndarray
    model_a: PolarizabilityModel
    model_b: PolarizabilityModel
    model_c: PolarizabilityModel
    eps_geom: float = EPS_GEOM

    def __post_init__(self):
        for name in ("position_a", "position_b", "position_c"):
            object.__setattr__(self, name, _as_point(getattr(self, name), name))
        pairs = [
            ("A", "B", self.position_a, self.position_b),
            ("A", "C", self.position_a, self.position_c),
            ("B", "C", self.position_b, self.position_c),
        ]
        for la, lb, pa, pb in pairs:
            if np.linalg.norm(pa - pb) <= self.eps_geom:
                raise DegenerateGeometry(
                    f"atoms {la} and {lb} closer than eps_geom={self.eps_geom:g}"
                )

    @property
    def positions(self):
        return (self.position_a, self.position_b, self.position_c)

    @property
    def models(self):
        return (self.model_a, self.model_b, self.model_c)


@dataclass(frozen=True)
class TriangleGeometry:
    """Side lengths and unit vectors of the atom triangle.

    ``collinear`` flags configurations where one triangle inequality is
    saturated within eps_geom (relative to the perimeter); such
    geometries are accepted.
    """

    alpha: float
    beta: float
    gamma: float
    n_bc: np.ndarray
    n_ac: np.ndarray
    n_ab: np.ndarray
    collinear: bool = False

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) <= 0:
            raise DegenerateGeometry("all side lengths must be positive")
        for name in ("n_bc", "n_ac", "n_ab"):
            v = _as_point(getattr(self, name), name)
            if abs(np.linalg.norm(v) - 1.0) > _EPS_UNIT:
                raise DegenerateGeometry(f"{name} is not a unit vector")
            object.__setattr__(self, name, v)

    @property
    def sides(self):
        return (self.alpha, self.beta, self.gamma)

    @property
    def max_side(self):
        return max(self.alpha, self.beta, self.gamma)


def triangle_from_points(ra, rb, rc, eps_geom=EPS_GEOM) -> TriangleGeometry:
    """Triangle data from three raw positions."""
    ra = _as_point(ra, "r_a")
    rb = _as_point(rb, "r_b")
    rc = _as_point(rc, "r_c")
    d_bc = rb - rc
    d_ac = ra - rc
    d_ab = ra - rb
    alpha = float(np.linalg.norm(d_bc))
    beta = float(np.linalg.norm(d_ac))
    gamma = float(np.linalg.norm(d_ab))
    if min(alpha, beta, gamma) <= eps_geom:
        raise DegenerateGeometry("two atoms coincide within eps_geom")
    perimeter = alpha + beta + gamma
    excess = min(
        beta + gamma - alpha,
        alpha + gamma - beta,
        alpha + beta - gamma,
    )
    collinear = excess <= eps_geom * perimeter
    return TriangleGeometry(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        n_bc=d_bc / alpha,
        n_ac=d_ac / beta,
        n_ab=d_ab / gamma,
        collinear=collinear,
    )


def triangle_from_positions(config: AtomConfig) -> TriangleGeometry:
    """Triangle data for an atom configuration."""
    return triangle_from_points(
        config.position_a, config.position_b, config.position_c, config.eps_geom
    )


def positions_from_distances(alpha, beta, gamma):
    """Embed side lengths (alpha, beta, gamma) as positions in the x-y plane.

    Returns (r_a, r_b, r_c) with A at the origin and B on the x axis.
    Raises DegenerateGeometry when the lengths violate a triangle
    inequality and therefore admit no Euclidean embedding.
    """
    if min(alpha, beta, gamma) <= 0:
        raise DegenerateGeometry("side lengths must be positive")
    x = (beta**2 - alpha**2 + gamma**2) / (2 * gamma)
    y_sq = beta**2 - x**2
    if y_sq < -EPS_GEOM * (alpha + beta + gamma) ** 2:
        raise DegenerateGeometry(
            f"side lengths ({alpha:g}, {beta:g}, {gamma:g}) violate the triangle inequality"
        )
    y = math.sqrt(max(y_sq, 0.0))
    ra = np.zeros(3)
    rb = np.array([gamma, 0.0, 0.0])
    rc = np.array([x, y, 0.0])
    return ra, rb, rc


class Window(enum.Enum):
    """Trichotomy of a side length against gamma + ct."""

    BELOW = "below"
    AT = "at"
    ABOVE = "above"


def _window(margin, eps):
    # margin = (gamma + ct) - side; "below" means side < gamma + ct
    if margin > eps:
        return Window.BELOW
    if margin < -eps:
        return Window.ABOVE
    return Window.AT


@dataclass(frozen=True)
class CausalRegion:
    """Light-cone comparisons of the triangle sides against ct.

    Booleans are strict crossings (margin beyond eps_edge); margins at
    the edge are reported in ``at_edges`` and leave the boolean False.
    Signed margins are stored in length units.
    """

    c_sees_a: bool          # ct > beta:  A's light cone has reached C
    c_sees_b: bool          # ct > alpha: B's light cone has reached C
    a_sees_b: bool          # ct > gamma: B's light cone has reached A
    window_alpha: Window    # alpha versus gamma + ct
    window_beta: Window     # beta versus gamma + ct
    ct_minus_alpha: float
    ct_minus_beta: float
    ct_minus_gamma: float
    cone_margin_alpha: float  # gamma + ct - alpha
    cone_margin_beta: float   # gamma + ct - beta
    at_edges: tuple = field(default=())

    @property
    def fully_spacelike(self) -> bool:
        return not (self.c_sees_a or self.c_sees_b or self.a_sees_b)

    @property
    def label(self) -> str:
        b = lambda v: "1" if v else "0"
        return (
            f"cA={b(self.c_sees_a)},cB={b(self.c_sees_b)},aB={b(self.a_sees_b)},"
            f"wA={self.window_alpha.value},wB={self.window_beta.value}"
        )


def classify_region(geom: TriangleGeometry, ct, eps_edge=EPS_EDGE) -> CausalRegion:
    """Classify ct >= 0 against every light-cone threshold of the triangle."""
    ct = float(ct)
    if ct < 0:
        raise ValueError("ct must be non-negative")
    m_a = ct - geom.alpha
    m_b = ct - geom.beta
    m_g = ct - geom.gamma
    cone_a = geom.gamma + ct - geom.alpha
    cone_b = geom.gamma + ct - geom.beta
    edges = []
    for name, margin in (
        ("ct-alpha", m_a),
        ("ct-beta", m_b),
        ("ct-gamma", m_g),
        ("gamma+ct-alpha", cone_a),
        ("gamma+ct-beta", cone_b),
    ):
        if abs(margin) <= eps_edge:
            edges.append(name)
    return CausalRegion(
        c_sees_a=m_b > eps_edge,
        c_sees_b=m_a > eps_edge,
        a_sees_b=m_g > eps_edge,
        window_alpha=_window(cone_a, eps_edge),
        window_beta=_window(cone_b, eps_edge),
        ct_minus_alpha=m_a,
        ct_minus_beta=m_b,
        ct_minus_gamma=m_g,
        cone_margin_alpha=cone_a,
        cone_margin_beta=cone_b,
        at_edges=tuple(edges),
    )
