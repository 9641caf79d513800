"""Dipole field tensors from radial kernels, and their contractions.

The generator is the differential operator

    F_ij = (-laplacian * delta_ij + d_i d_j)

applied to a radial kernel g(R).  With n = R_vec/R, D1 = 1 - n n and
D3 = 1 - 3 n n, the identity d_i d_j g = (delta_ij/R) g' + n_i n_j (g'' - g'/R)
gives F_ij g = D1_ij (-g'' - g'/R) + ... collected per kernel:

    e^{ikR}/R :  e^{ikR} [ D1 k^2/R + D3 (ik/R^2 - 1/R^3) ]
    e^{-uR}/R :  e^{-uR} [ -D1 u^2/R - D3 (u/R^2 + 1/R^3) ]
    e^{+uR}/R :  e^{+uR} [ -D1 u^2/R + D3 (u/R^2 - 1/R^3) ]
    1/R       :  -D3 / R^3
    cos(kR)/R :  D1 k^2 cos(kR)/R - D3 (k sin(kR)/R^2 + cos(kR)/R^3)

All forms are symmetric 3x3 matrices; the exponential and static kernels
give real entries.  ``angular_projector_tensor`` is the closed form of the
solid-angle average of the transverse projector with a plane-wave phase,

    (1/4pi) Int dOmega (1 - khat khat)_mn e^{i k . r}
        = D1 sin(x)/x + D3 (cos(x)/x^2 - sin(x)/x^3),   x = k r,

used to reduce vacuum mode sums to radial integrals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry
from .geometry import EPS_GEOM

_EYE = np.eye(3)


class KernelKind(enum.Enum):
    OSCILLATORY_OUT = "oscillatory_out"    # e^{ikR}/R
    EXPONENTIAL_DECAY = "exponential_decay"  # e^{-uR}/R
    EXPONENTIAL_GROW = "exponential_grow"    # e^{+uR}/R
    STATIC_COULOMB = "static_coulomb"        # 1/R
    COSINE_STANDING = "cosine_standing"      # cos(kR)/R


@dataclass(frozen=True)
class Kernel:
    """Radial kernel selector with its wavenumber (k or u, >= 0)."""

    kind: KernelKind
    rate: float = 0.0

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("kernel rate must be non-negative")


def oscillatory_out(k: float) -> Kernel:
    return Kernel(KernelKind.OSCILLATORY_OUT, float(k))


def exponential_decay(u: float) -> Kernel:
    return Kernel(KernelKind.EXPONENTIAL_DECAY, float(u))


def exponential_grow(u: float) -> Kernel:
    return Kernel(KernelKind.EXPONENTIAL_GROW, float(u))


def static_coulomb() -> Kernel:
    return Kernel(KernelKind.STATIC_COULOMB, 0.0)


def cosine_standing(k: float) -> Kernel:
    return Kernel(KernelKind.COSINE_STANDING, float(k))


@dataclass(frozen=True, eq=False)
class DipoleTensor:
    """3x3 tensor produced by the F operator on a radial kernel."""

    entries: np.ndarray
    kernel: Kernel
    r_vec: np.ndarray

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.entries)


def _split_r(r_vec):
    r_vec = np.asarray(r_vec, dtype=float).reshape(3)
    r = float(np.linalg.norm(r_vec))
    if r <= EPS_GEOM:
        raise DegenerateGeometry("tensor evaluated at (nearly) zero separation")
    n = r_vec / r
    d1 = _EYE - np.outer(n, n)
    d3 = _EYE - 3.0 * np.outer(n, n)
    return r, d1, d3


def outgoing_wave_tensor(k, r_vec) -> np.ndarray:
    """Batched F[e^{ikR}/R]; k scalar or (N,), result (...,3,3) complex."""
    r, d1, d3 = _split_r(r_vec)
    karr = np.atleast_1d(np.asarray(k, dtype=float))
    phase = np.exp(1j * karr * r)
    far = karr**2 / r
    mid = 1j * karr / r**2 - 1.0 / r**3
    out = phase[..., None, None] * (far[..., None, None] * d1 + mid[..., None, None] * d3)
    if np.ndim(k) == 0:
        return out[0]
    return out


def angular_projector_tensor(k, r_vec) -> np.ndarray:
    """Batched solid-angle-reduced transverse projector; real (...,3,3)."""
    r, d1, d3 = _split_r(r_vec)
    x = np.atleast_1d(np.asarray(k, dtype=float)) * r
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    s1 = np.where(small, 1.0 - x**2 / 6.0 + x**4 / 120.0, np.sin(xs) / xs)
    s2 = np.where(
        small,
        -1.0 / 3.0 + x**2 / 30.0 - x**4 / 840.0,
        np.cos(xs) / xs**2 - np.sin(xs) / xs**3,
    )
    out = s1[..., None, None] * d1 + s2[..., None, None] * d3
    if np.ndim(k) == 0:
        return out[0]
    return out


def exp_tensor_coeffs(r_vec, sign: int) -> np.ndarray:
    """Polynomial-in-u matrix coefficients of F[e^{sign*uR}/R] / e^{sign*uR}.

    Returns shape (3, 3, 3): [degree, i, j] with degrees u^0, u^1, u^2.
    Factoring the exponential out keeps growing kernels overflow-free in
    quadrature loops.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    r, d1, d3 = _split_r(r_vec)
    return np.stack([-d3 / r**3, sign * d3 / r**2, -d1 / r])


def eval_exp_tensor_poly(coeffs, u) -> np.ndarray:
    """Evaluate exp_tensor_coeffs at u (scalar or (N,)), giving (...,3,3)."""
    uarr = np.atleast_1d(np.asarray(u, dtype=float))
    out = (
        coeffs[0][None, :, :]
        + uarr[:, None, None] * coeffs[1]
        + (uarr**2)[:, None, None] * coeffs[2]
    )
    if np.ndim(u) == 0:
        return out[0]
    return out


def f_tensor(kernel: Kernel, r_vec) -> DipoleTensor:
    """Closed-form F-operator tensor for the given kernel at r_vec."""
    r_vec = np.asarray(r_vec, dtype=float).reshape(3)
    kind = kernel.kind
    if kind is KernelKind.OSCILLATORY_OUT:
        entries = outgoing_wave_tensor(kernel.rate, r_vec)
    elif kind is KernelKind.COSINE_STANDING:
        entries = outgoing_wave_tensor(kernel.rate, r_vec).real.copy()
    elif kind is KernelKind.STATIC_COULOMB:
        r, _, d3 = _split_r(r_vec)
        entries = -d3 / r**3
    elif kind in (KernelKind.EXPONENTIAL_DECAY, KernelKind.EXPONENTIAL_GROW):
        sign = 1 if kind is KernelKind.EXPONENTIAL_GROW else -1
        r = float(np.linalg.norm(r_vec))
        coeffs = exp_tensor_coeffs(r_vec, sign)
        entries = np.exp(sign * kernel.rate * r) * eval_exp_tensor_poly(coeffs, kernel.rate)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown kernel kind {kind}")
    return DipoleTensor(entries=entries, kernel=kernel, r_vec=r_vec)


def classical_dipole_tensor(k, r_vec) -> DipoleTensor:
    """Real standing-wave coupling tensor between oscillating dipoles."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return f_tensor(cosine_standing(k), r_vec)


def _entries(t):
    return t.entries if isinstance(t, DipoleTensor) else np.asarray(t)


def triple_contract(t1, t2, t3):
    """Sum over l, m, n of T1[l,m] * T2[l,n] * T3[m,n]."""
    return np.einsum("lm,ln,mn->", _entries(t1), _entries(t2), _entries(t3))


def triple_contract_batch(t1, t2, t3):
    """Batched triple contraction over a leading axis: (N,3,3) each -> (N,)."""
    return np.einsum("alm,aln,amn->a", t1, t2, t3, optimize=True)


def transverse_projector(k_hat) -> np.ndarray:
    """delta_mn - khat_m khat_n for a unit vector k_hat."""
    k_hat = np.asarray(k_hat, dtype=float).reshape(3)
    if abs(np.linalg.norm(k_hat) - 1.0) > 1e-10:
        raise ValueError("k_hat must be a unit vector")
    return _EYE - np.outer(k_hat, k_hat)


def double_contract_with_projector(t1, t2, k_hat, pattern="mn"):
    """Contract a tensor pair with the two-polarization transverse projector.

    pattern "mn": sum_lmn T1[l,m] T2[l,n] P[m,n]  (projector on the pair's
    open indices, tensors sharing the first index);
    pattern "ln": sum_lmn T1[l,m] T2[m,n] P[l,n]  (tensors chained through
    the middle index, projector on the outer pair).
    """
    proj = transverse_projector(k_hat)
    a, b = _entries(t1), _entries(t2)
    if pattern == "mn":
        return np.einsum("lm,ln,mn->", a, b, proj)
    if pattern == "ln":
        return np.einsum("lm,mn,ln->", a, b, proj)
    raise ValueError("pattern must be 'mn' or 'ln'")
