"""Dynamical atomic polarizability models.

Two isotropic scalar models are provided.  ``Static`` is constant at all
frequencies and keeps every real-axis wavenumber integral free of poles;
``SingleResonance`` is a damped Lorentz oscillator used to probe
dispersion.  Both evaluate on the real axis (``alpha_real``) and on the
imaginary axis (``alpha_imag``), where they are real, positive and
non-increasing.

Units: lengths in the user unit L0, so alpha0 is a volume in L0^3 and
k0, gamma_damp are wavenumbers in 1/L0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import PoleOnAxis

EPS_POLE = 1e-8


@dataclass(frozen=True)
class Static:
    """Frequency-independent polarizability alpha0."""

    alpha0: float

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError("alpha0 must be positive")


@dataclass(frozen=True)
class SingleResonance:
    """Damped Lorentz oscillator: alpha0 * k0^2 / (k0^2 - k^2 - i*gamma_damp*k)."""

    alpha0: float
    k0: float
    gamma_damp: float = 0.0

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise ValueError("alpha0 must be positive")
        if not self.k0 > 0:
            raise ValueError("k0 must be positive")
        if self.gamma_damp < 0:
            raise ValueError("gamma_damp must be non-negative")


PolarizabilityModel = Union[Static, SingleResonance]


def _as_wavenumber(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError(f"{name} must be non-negative")
    return arr


def alpha_real(model: PolarizabilityModel, k):
    """Polarizability on the real wavenumber axis; complex for damped models.

    Accepts scalars or arrays.  Raises PoleOnAxis for an undamped
    resonance evaluated within EPS_POLE*k0 of its pole.
    """
    karr = _as_wavenumber(k, "k")
    if isinstance(model, Static):
        out = np.full(karr.shape, model.alpha0 + 0.0j)
    else:
        if model.gamma_damp == 0.0 and np.any(np.abs(karr - model.k0) < EPS_POLE * model.k0):
            raise PoleOnAxis(
                f"undamped resonance evaluated within {EPS_POLE:g}*k0 of k0={model.k0:g}"
            )
        denom = model.k0**2 - karr**2 - 1j * model.gamma_damp * karr
        out = model.alpha0 * model.k0**2 / denom
    if np.ndim(k) == 0:
        return complex(out)
    return out


def alpha_imag(model: PolarizabilityModel, u):
    """Polarizability at imaginary frequency k = i*u; real and positive.

    Accepts scalars or arrays.
    """
    uarr = _as_wavenumber(u, "u")
    if isinstance(model, Static):
        out = np.full(uarr.shape, model.alpha0)
    else:
        out = model.alpha0 * model.k0**2 / (model.k0**2 + uarr**2 + model.gamma_damp * uarr)
    if np.ndim(u) == 0:
        return float(out)
    return out


def models_identical(*models: PolarizabilityModel) -> bool:
    """True when all models have the same type and parameters."""
    first = models[0]
    return all(m == first for m in models[1:])
