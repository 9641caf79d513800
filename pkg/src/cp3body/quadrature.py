"""Semi-infinite quadrature and regularized oscillatory integrals.

``integrate_semi_infinite`` handles exponentially decaying integrands on
[0, inf): a finite window [0, 40*d] resolved by panel-doubling composite
Gauss-Legendre, geometric continuation segments for slower-than-expected
tails, and a final variable-change map for the remainder.  Integrands must
be vectorized (accept an (N,) array, return an (N,) array, real or
complex).

``integrate_oscillatory_regularized`` defines integrals of bounded
trigonometric integrands as the eta -> 0 limit of Int f(k) e^{-eta k} dk,
evaluated on a decreasing eta schedule and polynomially extrapolated to
eta = 0 (adiabatic switching).  The error estimate combines the per-eta
quadrature errors, propagated through the extrapolation weights, with the
extrapolation residual from a shifted-window extrapolant.

Convergence trouble is reported through ``IntegralResult.converged``
(still returning the best value and an honest error estimate), never by
raising; an unstable extrapolation (residual above 10x the target) simply
leaves ``converged`` False.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_PANEL_ORDER = 32
_MIN_PANELS = 16
_DEFAULT_ETA = (0.2, 0.1, 0.05, 0.025, 0.0125)
_FINITE_WINDOW = 40.0  # decay lengths covered by the primary window
_WINDOW_SPLITS = 4     # refinement sub-windows of the primary window
_MAX_TAIL_SEGMENTS = 60


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and regularization controls.

    osc_rel_tol is the declared quality bar of the eta -> 0 extrapolation:
    a regularized result is flagged converged when its (deliberately
    conservative, typically ~10x the true error) claimed error is within
    this relative target.  It is far looser than rel_tol because the
    regularized limit is extrapolation-limited, not quadrature-limited.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    eta_schedule: tuple = _DEFAULT_ETA
    extrapolation_order: int = 3
    osc_rel_tol: float = 0.1

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.osc_rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < _MIN_PANELS:
            raise ValueError(f"max_subdivisions must be at least {_MIN_PANELS}")
        etas = tuple(float(e) for e in self.eta_schedule)
        if any(e <= 0 for e in etas) or any(
            e2 >= e1 for e1, e2 in zip(etas, etas[1:])
        ):
            raise ValueError("eta_schedule must be strictly decreasing and positive")
        if self.extrapolation_order < 1:
            raise ValueError("extrapolation_order must be at least 1")
        if len(etas) < self.extrapolation_order + 1:
            raise ValueError("eta_schedule shorter than extrapolation_order + 1")
        object.__setattr__(self, "eta_schedule", etas)


@dataclass(frozen=True)
class IntegralResult:
    value: complex | float
    error_estimate: float
    evaluations: int
    converged: bool


@lru_cache(maxsize=8)
def _gl_nodes(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _composite(f, a, b, panels):
    """Composite Gauss-Legendre with `panels` equal panels on [a, b]."""
    x, w = _gl_nodes(_PANEL_ORDER)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (mid[:, None] + half * x[None, :]).ravel()
    y = np.asarray(f(nodes))
    total = half * np.sum(y.reshape(panels, _PANEL_ORDER) @ w)
    return total, nodes.size


# a doubling difference below this relative level is double-precision
# round-off noise of the composite rule, not discretization error
_MACHINE_FLOOR = 1e3 * np.finfo(float).eps


def _refine(f, a, b, target_abs, max_panels, start_panels=_MIN_PANELS):
    """Panel-doubling refinement on [a, b].

    Doubling stops when the doubling difference reaches the absolute
    target, the machine-precision floor of the range's own magnitude, or
    the panel budget.  Ranges may individually be enormously larger than
    the full integral (oscillatory boundary pieces cancel across ranges),
    so the floor is relative to the range value, and the reported error
    is always the honest last doubling difference.  Returns
    (value, error, evaluations, converged, panels_used).
    """
    # leave room for at least one confirming doubling
    panels = max(_MIN_PANELS, min(start_panels, max_panels // 2))
    value, evals = _composite(f, a, b, panels)
    diff = None
    while 2 * panels <= max_panels:
        panels *= 2
        new_value, n = _composite(f, a, b, panels)
        evals += n
        new_diff = abs(new_value - value)
        value = new_value
        if new_diff <= max(target_abs, _MACHINE_FLOOR * abs(value)):
            return value, new_diff, evals, True, panels
        diff = new_diff
    return value, diff if diff is not None else abs(value), evals, False, panels


def integrate_semi_infinite(f, spec: QuadratureSpec | None = None, decay_scale=1.0,
                            upper_limit=None) -> IntegralResult:
    """Integrate a decaying vectorized integrand over [0, inf).

    decay_scale d > 0 is the caller's estimate of the shortest decay (or
    structure) length of the integrand; the primary window is [0, 40 d]
    and geometric continuation segments pick up anything slower.  When
    ``upper_limit`` is given the integral is truncated there (hard cap for
    marginally convergent cases) and the neglected tail is charged to the
    error estimate.
    """
    spec = spec or QuadratureSpec()
    d = float(decay_scale)
    if d <= 0:
        raise ValueError("decay_scale must be positive")

    total = 0.0 + 0.0j
    err = 0.0
    evals = 0
    converged = True
    # windows cancel against each other, so per-window targets must be
    # absolute; the machine floor in _refine caps the work per window
    target = 0.25 * spec.abs_tol

    # primary window, partitioned so each refinement pass reaches the
    # spectral regime within its own panel budget
    upper0 = _FINITE_WINDOW * d if upper_limit is None else min(_FINITE_WINDOW * d, upper_limit)
    cuts = np.linspace(0.0, upper0, _WINDOW_SPLITS + 1)
    used = _MIN_PANELS
    for lo_w, hi_w in zip(cuts[:-1], cuts[1:]):
        value, seg_err, n, ok, used = _refine(f, lo_w, hi_w, target, spec.max_subdivisions)
        total += value
        err += seg_err
        evals += n
        converged &= ok

    # geometric continuation until the tail is negligible; each segment
    # starts at the panel density that resolved the previous range so
    # oscillatory structure is never sampled below resolution
    lo = upper0
    density_hint = used * _WINDOW_SPLITS  # per-upper0 density of the last sub-window
    segments = 0
    while upper_limit is None or lo < upper_limit:
        hi = 2.0 * lo
        if upper_limit is not None:
            hi = min(hi, upper_limit)
        if segments >= _MAX_TAIL_SEGMENTS:
            converged = False
            break
        start = max(_MIN_PANELS, int(density_hint * (hi - lo) / upper0))
        value, seg_err, n, ok, used = _refine(
            f, lo, hi, target, spec.max_subdivisions, start_panels=start
        )
        total += value
        err += seg_err
        evals += n
        converged &= ok
        density_hint = used * upper0 / (hi - lo)
        significant = abs(value) > 0.1 * max(spec.abs_tol, spec.rel_tol * abs(total))
        lo = hi
        segments += 1
        if not significant:
            break

    if upper_limit is None:
        # mapped remainder [lo, inf): u = lo + d * t/(1-t)
        def g(t):
            t = np.asarray(t)
            u = lo + d * t / (1.0 - t)
            return f(u) * d / (1.0 - t) ** 2

        value, n = _composite(g, 0.0, 1.0 - 1e-12, 8)
        total += value
        err += abs(value)  # remainder is charged in full; normally ~0
        evals += 8 * _PANEL_ORDER
    else:
        # truncated: charge a crude estimate of the neglected tail
        fu = np.asarray(f(np.array([upper_limit])))
        err += float(np.abs(fu[0])) * upper_limit
        converged = False

    err = float(err)
    value_out = complex(total)
    if value_out.imag == 0.0:
        value_out = value_out.real
    converged = bool(converged and err <= max(spec.rel_tol * abs(value_out), spec.abs_tol))
    return IntegralResult(value_out, err, evals, converged)


def _weighted_poly_at_zero(etas, values, sigmas, degree):
    """Weighted least-squares polynomial fit; returns (value at 0, data error).

    The fit is linear in the data, so the intercept is sum(g_i * y_i) for
    weights g determined by the design matrix; the propagated data error
    is sum(|g_i| * sigma_i) (conservative for correlated quadrature bias).
    """
    etas = np.asarray(etas, dtype=float)
    x = etas / etas.max()
    design = np.vander(x, degree + 1, increasing=True)
    w = 1.0 / np.asarray(sigmas, dtype=float)
    a = design * w[:, None]
    # intercept weights: first row of the pseudo-inverse acting on weighted data
    pinv = np.linalg.pinv(a)
    g = pinv[0] * w
    value = np.sum(g * np.asarray(values))
    data_err = float(np.sum(np.abs(g) * np.asarray(sigmas, dtype=float)))
    return value, data_err


def integrate_oscillatory_regularized(f, spec: QuadratureSpec | None = None) -> IntegralResult:
    """Regularized limit of Int_0^inf f(k) dk for trigonometric integrands.

    Evaluates I(eta) = Int f(k) e^{-eta k} dk over the eta schedule and
    extrapolates to eta = 0 with an error-weighted polynomial fit of order
    extrapolation_order (noisy small-eta points, where the damped
    integrand's dynamic range exhausts double precision, are downweighted
    automatically).  The error estimate combines the propagated quadrature
    errors with the extrapolation residual against the next-lower order.
    """
    spec = spec or QuadratureSpec()
    etas = np.asarray(spec.eta_schedule)
    values = []
    sigmas = []
    evals = 0
    for eta in etas:
        def damped(k, _eta=eta):
            return f(k) * np.exp(-_eta * k)

        res = integrate_semi_infinite(damped, spec, decay_scale=1.0 / eta)
        values.append(res.value)
        # guard against overconfident doubling estimates
        sigmas.append(max(res.error_estimate, 1e-12 * abs(res.value), spec.abs_tol))
        evals += res.evaluations
    values = np.asarray(values, dtype=complex)

    p = spec.extrapolation_order
    main, data_err = _weighted_poly_at_zero(etas, values, sigmas, p)
    lower, _ = _weighted_poly_at_zero(etas, values, sigmas, p - 1)
    residual = abs(main - lower)
    err = residual + data_err

    value_out = complex(main)
    if value_out.imag == 0.0:
        value_out = value_out.real
    target = max(spec.osc_rel_tol * abs(value_out), spec.abs_tol)
    # residual > 10x target marks the extrapolation itself as unstable
    converged = bool(err <= target and residual <= 10.0 * target)
    return IntegralResult(value_out, float(err), evals, converged)
