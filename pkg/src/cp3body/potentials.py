"""Time-dependent two- and three-body Casimir-Polder interaction energies.

Natural units hbar = c = 1: lengths in the user unit L0, polarizabilities
in L0^3, energies in hbar*c/L0.  All five quantities are piecewise
constant in time between light-cone crossings; time enters only through
step and sign gates.

Observer-response route (real wavenumber axis)
----------------------------------------------
``delta_E_C`` is the energy shift of atom C responding to the transient
field scattered by atoms A and B while all three build up their virtual
photon clouds.  Reducing the vacuum mode sum to the continuum
(sum_k -> V Int d3k/(2pi)^3, polarization sum = transverse projector, and
the solid-angle integral done in closed form by
``angular_projector_tensor``) leaves one radial integral:

    delta_E_C = -(1/2pi) Re Int_0^inf dk k^3 aA(k) aB(k) aC(k) W(k)

    W(k) = th(ct-a) th(ct-b) sum_lmn Tb[l,m] conj(Ta)[l,n] P_ab[m,n]
         - th(ct-b)          sum_lmn Tb[l,m] P_bc[l,n] Gmix(b)[m,n]
         - th(ct-a)          sum_lmn Ta[l,m] P_ac[l,n] Gmix(a)[m,n]

with a = alpha, b = beta; Tb, Ta outgoing-wave tensors over the A-C and
B-C separations, P_xy the angle-reduced projector over the remaining
separation, and the standing/running-wave mix

    Gmix(x) = Tcos(gamma) - sgn(gamma-x+ct)/2 conj(Tg) - sgn(gamma+x-ct)/2 Tg.

The result is gated to exactly zero unless C is inside the light cone of
both A and B.  The radial integral is Abel-regularized (exponential
cutoff, extrapolated to zero cutoff).

Correlation route (imaginary wavenumber axis)
---------------------------------------------
``delta_E_C_pair`` is the interaction energy of the measured pair A-B in
the presence of C, nonzero in time windows where A and B sit outside C's
light cone but C's influence on the field correlations has reached the
geometry.  Its kernels factorize per separation; growing exponentials are
evaluated with the exponential factored out so only the combined decaying
exponent e^{-u s} is ever formed:

    delta_E_C_pair = -(1/8pi) Int_0^inf du aA(iu) aB(iu) aC(iu) S(u)

    S(u) = Ga [ C(Tb-,Ta+,Tg-) e^{-u(b-a+g)} + C(Tb-,Ta-,Tg+) e^{-u(a+b-g)} ]
         + Gb [ C(Tb+,Ta-,Tg-) e^{-u(a-b+g)} + C(Tb-,Ta-,Tg+) e^{-u(a+b-g)} ]

with the gates Ga = 1 - sgn(alpha-gamma-ct), Gb = 1 - sgn(beta-gamma-ct)
and C the triple contraction sum_lmn T1[l,m] T2[l,n] T3[m,n].

``static_three_body`` is the stationary limit: every gate fully open and
the three observer roles averaged, which reproduces the known retarded
(far zone, r^-10) and triple-dipole (near zone, r^-9) regimes.

On light-cone edges sgn(0) = 0, the mean of the one-sided limits; the
step gates are strict, so an exactly-on-cone time keeps the gated value
at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ImaginaryResidue, PoleOnAxis, RegionMismatch
from .geometry import (
    EPS_EDGE,
    AtomConfig,
    CausalRegion,
    TriangleGeometry,
    classify_region,
    triangle_from_positions,
)
from .polarizability import SingleResonance, alpha_imag, alpha_real, models_identical
from .quadrature import (
    IntegralResult,
    QuadratureSpec,
    integrate_oscillatory_regularized,
    integrate_semi_infinite,
)
from .tensors import (
    angular_projector_tensor,
    exp_tensor_coeffs,
    eval_exp_tensor_poly,
    outgoing_wave_tensor,
    triple_contract_batch,
)

# Normalization. The continuum reduction of a mode sum carries
# (2*pi/V) * V/(2*pi)^3 * 4*pi = 1/pi; the mode-resolved correlation is
# single-counted (the windowed symmetrized energy then coincides with its
# independently printed closed form at one third of the observer term),
# giving the observer route -1/(2*pi).  The pair-correlation route is
# normalized to -1/(8*pi) so that its fully-open stationary symmetrized
# limit reproduces the standard triple-dipole value in the near zone and
# the observer route's own large-time limit to better than half a percent
# (the residual structural difference, half an all-decaying
# around-the-triangle term, is documented in the cross-check tests).
_OBSERVER_PREFACTOR = -1.0 / (2.0 * math.pi)
# symmetrized potential is the mean over the three observer roles
_SPACELIKE_PREFACTOR = _OBSERVER_PREFACTOR / 3.0
_PAIR_PREFACTOR = -1.0 / (8.0 * math.pi)

_IMAG_RESIDUE_TOL = 1e-8
_COLLINEAR_EXPONENT_EPS = 1e-9
_HARD_CAP_U = 1e3  # truncation for marginally convergent (collinear) cases

# observer-role permutations: slots (source1, source2, observer)
_ROLE_ORDERS = {
    "delta_E_C": (0, 1, 2),
    "delta_E_A": (1, 2, 0),
    "delta_E_B": (2, 0, 1),
}


@dataclass(frozen=True)
class PotentialResult:
    """Energy value (hbar*c/L0) with numerical and causal metadata."""

    value: float
    error_estimate: float
    region: CausalRegion
    t_input: float
    breakdown: dict | None = None
    converged: bool = True
    evaluations: int = 0
    warnings: tuple = ()


def _sgn0(x, eps=EPS_EDGE):
    """Sign with sgn(0) = 0 on a tolerance-snapped edge."""
    if abs(x) <= eps:
        return 0.0
    return math.copysign(1.0, x)


def _permuted(config: AtomConfig, order) -> AtomConfig:
    pos = config.positions
    mod = config.models
    return AtomConfig(
        position_a=pos[order[0]],
        position_b=pos[order[1]],
        position_c=pos[order[2]],
        model_a=mod[order[0]],
        model_b=mod[order[1]],
        model_c=mod[order[2]],
        eps_geom=config.eps_geom,
    )


def _real_energy(value, where):
    """Extract the real part, guarding against a large imaginary residue."""
    v = complex(value)
    scale = max(abs(v), 1e-300)
    if abs(v.imag) > _IMAG_RESIDUE_TOL * scale:
        raise ImaginaryResidue(
            f"{where}: imaginary residue {v.imag:.3e} exceeds "
            f"{_IMAG_RESIDUE_TOL:g} relative to |{abs(v):.3e}|"
        )
    return v.real


def _model_warning(config) -> tuple:
    if models_identical(*config.models):
        return ()
    return ("symmetrization applied to non-identical atoms",)


def _factor_amplitudes(models):
    """Split off the product of alpha0 amplitudes.

    Quadrature then integrates unit-amplitude shapes, which makes every
    energy exactly trilinear in the three polarizability amplitudes
    (adaptive stopping decisions would otherwise break the scaling at
    round-off level).
    """
    amp = 1.0
    unit = []
    for m in models:
        amp *= m.alpha0
        unit.append(replace(m, alpha0=1.0))
    return amp, tuple(unit)


def _check_real_axis_models(models):
    """Real-axis integrals need a pole prescription: reject undamped resonances."""
    for m in models:
        if isinstance(m, SingleResonance) and m.gamma_damp == 0.0:
            raise PoleOnAxis(
                "undamped resonance has a pole on the real wavenumber axis; "
                "use a damped resonance or a static model for observer-route quantities"
            )


def _observer_spec(spec, geom, first_term_only):
    """Interpret the regularization schedule at the geometry's phase scale.

    The regularized radial integrand oscillates with phases set by the
    triangle's causal path differences; the damped integral I(eta) is
    analytic in eta within the smallest such phase.  The default schedule
    is calibrated for a unit smallest phase, so it is rescaled by
    min(|beta-alpha+gamma|, alpha+gamma-beta, beta+gamma-alpha), clipped
    to [0.1, 5], keeping the eta-to-radius ratio (and therefore the
    extrapolation quality) geometry-independent.
    """
    phases = [geom.beta - geom.alpha + geom.gamma, geom.alpha + geom.gamma - geom.beta]
    if not first_term_only:
        phases.append(geom.beta + geom.gamma - geom.alpha)
    scale = min(max(min(abs(p) for p in phases), 0.1), 5.0)
    if scale == 1.0:
        return spec
    return replace(spec, eta_schedule=tuple(e * scale for e in spec.eta_schedule))


def _eq_observer_integrand(geom: TriangleGeometry, models, ct, first_term_only=False):
    """Radial integrand k^3 aA aB aC Re W(k) of the observer-response energy.

    Assumes the observer gates th(ct-alpha), th(ct-beta) are already open
    (the caller short-circuits otherwise); the standing/running-wave sign
    gates are evaluated here with sgn(0) = 0.
    """
    r_ac = geom.beta * geom.n_ac
    r_bc = geom.alpha * geom.n_bc
    r_ab = geom.gamma * geom.n_ab
    m_a, m_b, m_c = models
    s1b = _sgn0(geom.gamma - geom.beta + ct)
    s2b = _sgn0(geom.gamma + geom.beta - ct)
    s1a = _sgn0(geom.gamma - geom.alpha + ct)
    s2a = _sgn0(geom.gamma + geom.alpha - ct)

    def f(k):
        k = np.atleast_1d(k)
        tb = outgoing_wave_tensor(k, r_ac)
        ta = outgoing_wave_tensor(k, r_bc)
        p_ab = angular_projector_tensor(k, r_ab)
        w = triple_contract_batch(tb, ta.conj(), p_ab)
        if not first_term_only:
            tg = outgoing_wave_tensor(k, r_ab)
            tgc = tg.conj()
            tcos = 0.5 * (tg + tgc)
            p_bc = angular_projector_tensor(k, r_bc)
            p_ac = angular_projector_tensor(k, r_ac)
            gmix_b = tcos - 0.5 * s1b * tgc - 0.5 * s2b * tg
            gmix_a = tcos - 0.5 * s1a * tgc - 0.5 * s2a * tg
            w = w - triple_contract_batch(tb, p_bc, gmix_b)
            w = w - triple_contract_batch(ta, p_ac, gmix_a)
        aaa = alpha_real(m_a, k) * alpha_real(m_b, k) * alpha_real(m_c, k)
        return k**3 * aaa * np.real(w)

    return f


def delta_E_C(config: AtomConfig, ct, spec: QuadratureSpec | None = None) -> PotentialResult:
    """Energy shift of atom C from the transient fields of atoms A and B.

    Exactly zero (no quadrature) unless C lies strictly inside the light
    cones of both A and B.
    """
    spec = spec or QuadratureSpec()
    geom = triangle_from_positions(config)
    region = classify_region(geom, ct)
    if not (region.c_sees_a and region.c_sees_b):
        return PotentialResult(0.0, 0.0, region, float(ct))
    _check_real_axis_models(config.models)
    amp, unit_models = _factor_amplitudes(config.models)
    f = _eq_observer_integrand(geom, unit_models, float(ct))
    res = integrate_oscillatory_regularized(f, _observer_spec(spec, geom, False))
    value = _real_energy(amp * _OBSERVER_PREFACTOR * res.value, "delta_E_C")
    return PotentialResult(
        value=value,
        error_estimate=abs(amp * _OBSERVER_PREFACTOR) * res.error_estimate,
        region=region,
        t_input=float(ct),
        converged=res.converged,
        evaluations=res.evaluations,
    )


def delta_E3_symmetrized(config: AtomConfig, ct, spec: QuadratureSpec | None = None) -> PotentialResult:
    """Symmetrized three-body energy: mean of the three observer roles.

    The symmetrization is applied regardless of whether the atom models
    are identical; a warning is attached when they are not.
    """
    spec = spec or QuadratureSpec()
    geom = triangle_from_positions(config)
    region = classify_region(geom, ct)
    breakdown = {}
    err = 0.0
    evals = 0
    ok = True
    for name, order in _ROLE_ORDERS.items():
        part = delta_E_C(_permuted(config, order), ct, spec)
        breakdown[name] = part.value
        err += part.error_estimate
        evals += part.evaluations
        ok &= part.converged
    value = (breakdown["delta_E_A"] + breakdown["delta_E_B"] + breakdown["delta_E_C"]) / 3.0
    return PotentialResult(
        value=value,
        error_estimate=err / 3.0,
        region=region,
        t_input=float(ct),
        breakdown=breakdown,
        converged=ok,
        evaluations=evals,
        warnings=_model_warning(config),
    )


def delta_E3_spacelike_AB(config: AtomConfig, ct, spec: QuadratureSpec | None = None) -> PotentialResult:
    """Three-body energy in the window where A and B are mutually space-like.

    Valid only for alpha < ct, beta < ct, gamma > ct (both sources inside
    the observer's past light cone, sources not yet causally connected);
    there the two standing-wave terms vanish and the symmetrized energy
    reduces to one third of the single surviving observer term.
    """
    spec = spec or QuadratureSpec()
    geom = triangle_from_positions(config)
    region = classify_region(geom, ct)
    if not (region.c_sees_a and region.c_sees_b and region.ct_minus_gamma < -EPS_EDGE):
        raise RegionMismatch(
            f"requires alpha < ct, beta < ct, gamma > ct; got alpha={geom.alpha:g}, "
            f"beta={geom.beta:g}, gamma={geom.gamma:g}, ct={ct:g}"
        )
    _check_real_axis_models(config.models)
    amp, unit_models = _factor_amplitudes(config.models)
    f = _eq_observer_integrand(geom, unit_models, float(ct), first_term_only=True)
    res = integrate_oscillatory_regularized(f, _observer_spec(spec, geom, True))
    value = _real_energy(amp * _SPACELIKE_PREFACTOR * res.value, "delta_E3_spacelike_AB")
    return PotentialResult(
        value=value,
        error_estimate=abs(amp * _SPACELIKE_PREFACTOR) * res.error_estimate,
        region=region,
        t_input=float(ct),
        breakdown={"delta_E_A": 0.0, "delta_E_B": 0.0, "delta_E_C": 3.0 * value},
        converged=res.converged,
        evaluations=res.evaluations,
        warnings=_model_warning(config),
    )


def _pair_terms(geom: TriangleGeometry, gate_alpha, gate_beta):
    """Gated contraction terms of the pair-correlation energy.

    Each term is (gate, coeffs over the A-C, B-C and A-B separations,
    exponent), with polynomial tensor coefficients exponential-free and
    the combined decaying exponential e^{-u * exponent} applied once.
    """
    a, b, g = geom.alpha, geom.beta, geom.gamma
    cb_m = exp_tensor_coeffs(b * geom.n_ac, -1)
    cb_p = exp_tensor_coeffs(b * geom.n_ac, +1)
    ca_m = exp_tensor_coeffs(a * geom.n_bc, -1)
    ca_p = exp_tensor_coeffs(a * geom.n_bc, +1)
    cg_m = exp_tensor_coeffs(g * geom.n_ab, -1)
    cg_p = exp_tensor_coeffs(g * geom.n_ab, +1)
    return [
        (gate_alpha, cb_m, ca_p, cg_m, b - a + g),
        (gate_alpha, cb_m, ca_m, cg_p, a + b - g),
        (gate_beta, cb_p, ca_m, cg_m, a - b + g),
        (gate_beta, cb_m, ca_m, cg_p, a + b - g),
    ]


def _pair_decay_hint(exponents, models):
    """Structure scale of the imaginary-axis integrand (shortest feature)."""
    cands = [1.0 / s for s in exponents if s > _COLLINEAR_EXPONENT_EPS]
    cands += [1.0 / m.k0 for m in models if isinstance(m, SingleResonance)]
    return min(cands) if cands else 1.0


def _pair_quadrature(geom, models, gate_alpha, gate_beta, spec) -> IntegralResult:
    """Imaginary-axis integral shared by the pair energy and its static limit.

    Polarizability amplitudes are factored out (exact trilinearity); the
    returned value includes them.
    """
    terms = [t for t in _pair_terms(geom, gate_alpha, gate_beta) if t[0] != 0.0]
    if not terms:
        return IntegralResult(0.0, 0.0, 0, True)
    amp, (m_a, m_b, m_c) = _factor_amplitudes(models)

    def f(u):
        u = np.atleast_1d(u)
        total = np.zeros(u.shape)
        for gate, cb, ca, cg, s in terms:
            contr = triple_contract_batch(
                eval_exp_tensor_poly(cb, u),
                eval_exp_tensor_poly(ca, u),
                eval_exp_tensor_poly(cg, u),
            )
            total += gate * np.real(contr) * np.exp(-u * s)
        return total * alpha_imag(m_a, u) * alpha_imag(m_b, u) * alpha_imag(m_c, u)

    exponents = [t[4] for t in terms]
    d = _pair_decay_hint(exponents, models)
    # saturated triangle inequality: integrand only marginally convergent,
    # truncate with an explicit error charge
    cap = _HARD_CAP_U if min(exponents) <= _COLLINEAR_EXPONENT_EPS else None
    res = integrate_semi_infinite(f, spec, decay_scale=d, upper_limit=cap)
    return IntegralResult(amp * res.value, abs(amp) * res.error_estimate,
                          res.evaluations, res.converged)


def delta_E_C_pair(config: AtomConfig, ct, spec: QuadratureSpec | None = None) -> PotentialResult:
    """Interaction energy of the measured pair A-B in the presence of C.

    Valid only for alpha > ct, beta > ct, gamma < ct (pair atoms outside
    C's light cone but inside each other's).  Exactly zero while both sign
    gates are closed (alpha and beta above gamma + ct).
    """
    spec = spec or QuadratureSpec()
    geom = triangle_from_positions(config)
    ct = float(ct)
    region = classify_region(geom, ct)
    if not (region.a_sees_b and region.ct_minus_alpha < -EPS_EDGE
            and region.ct_minus_beta < -EPS_EDGE):
        raise RegionMismatch(
            f"requires alpha > ct, beta > ct, gamma < ct; got alpha={geom.alpha:g}, "
            f"beta={geom.beta:g}, gamma={geom.gamma:g}, ct={ct:g}"
        )
    gate_alpha = 1.0 - _sgn0(geom.alpha - geom.gamma - ct)
    gate_beta = 1.0 - _sgn0(geom.beta - geom.gamma - ct)
    res = _pair_quadrature(geom, config.models, gate_alpha, gate_beta, spec)
    return PotentialResult(
        value=_PAIR_PREFACTOR * res.value,
        error_estimate=abs(_PAIR_PREFACTOR) * res.error_estimate,
        region=region,
        t_input=ct,
        converged=res.converged,
        evaluations=res.evaluations,
    )


def static_three_body(config: AtomConfig, spec: QuadratureSpec | None = None) -> PotentialResult:
    """Stationary three-body energy (large-time limit).

    Every sign gate fully open (value 2) and the three observer roles
    averaged.  Serves as the reference for all large-time checks; in the
    near zone it reduces to the triple-dipole r^-9 form, in the far zone
    to the retarded r^-10 form.
    """
    spec = spec or QuadratureSpec()
    geom = triangle_from_positions(config)
    breakdown = {}
    err = 0.0
    evals = 0
    ok = True
    for name, order in _ROLE_ORDERS.items():
        sub = _permuted(config, order)
        sub_geom = triangle_from_positions(sub)
        res = _pair_quadrature(sub_geom, sub.models, 2.0, 2.0, spec)
        breakdown[name] = _PAIR_PREFACTOR * res.value
        err += abs(_PAIR_PREFACTOR) * res.error_estimate
        evals += res.evaluations
        ok &= res.converged
    value = sum(breakdown.values()) / 3.0
    return PotentialResult(
        value=value,
        error_estimate=err / 3.0,
        region=classify_region(geom, math.inf),
        t_input=math.inf,
        breakdown=breakdown,
        converged=ok,
        evaluations=evals,
        warnings=_model_warning(config),
    )
