"""Kesten-McKay and quarter-circle spectral laws of the averaging operator."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


def delta_opt(card: int) -> float:
    """2 sqrt(|S| - 1) / |S|, the Kesten-McKay support edge."""
    if card < 2:
        raise ValueError(f"cardinality must be >= 2, got {card}")
    return 2.0 * math.sqrt(card - 1) / card


class DensityKind(enum.Enum):
    KESTEN_SIGNED = "kesten_signed"  # eigenvalues of a symmetric walk operator on [-delta, delta]
    KESTEN_SINGULAR = "kesten_singular"  # singular values on [0, delta]
    KESTEN_RESCALED = "kesten_rescaled"  # singular values of sqrt(|S|) T on [0, 2 sqrt((S-1)/S)]
    KESTEN_OPT_RESCALED = "kesten_opt_rescaled"  # singular values of (2/delta_opt) T on [0, 2]
    QUARTER_CIRCLE = "quarter_circle"


@dataclass(frozen=True)
class SpectralDensity:
    kind: DensityKind
    card: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, DensityKind):
            object.__setattr__(self, "kind", DensityKind(self.kind))
        if self.kind is not DensityKind.QUARTER_CIRCLE and self.card < 2:
            raise ValueError("Kesten-McKay densities need cardinality >= 2")

    @property
    def support(self) -> tuple[float, float]:
        k = self.kind
        if k is DensityKind.QUARTER_CIRCLE or k is DensityKind.KESTEN_OPT_RESCALED:
            return (0.0, 2.0)
        dop = delta_opt(self.card)
        if k is DensityKind.KESTEN_SIGNED:
            return (-dop, dop)
        if k is DensityKind.KESTEN_SINGULAR:
            return (0.0, dop)
        return (0.0, 2.0 * math.sqrt((self.card - 1) / self.card))

    def __call__(self, x):
        return density_at(self, x)


def density_at(sd: SpectralDensity, x):
    """Density value(s) at x; zero outside the support."""
    x = np.asarray(x, dtype=float)
    lo, hi = sd.support
    inside = (x >= lo) & (x <= hi)
    xs = np.where(inside, x, 0.0)
    s = sd.card
    k = sd.kind
    with np.errstate(divide="ignore", invalid="ignore"):
        if k is DensityKind.QUARTER_CIRCLE:
            val = np.sqrt(np.clip(4.0 - xs**2, 0.0, None)) / np.pi
        elif k is DensityKind.KESTEN_SIGNED or k is DensityKind.KESTEN_SINGULAR:
            dop2 = delta_opt(s) ** 2
            pref = 2.0 if k is DensityKind.KESTEN_SIGNED else 1.0
            val = s * np.sqrt(np.clip(dop2 - xs**2, 0.0, None)) / (pref * np.pi * (1.0 - xs**2))
        elif k is DensityKind.KESTEN_RESCALED:
            val = np.sqrt(np.clip(4.0 * (s - 1) / s - xs**2, 0.0, None)) / (np.pi * (1.0 - xs**2 / s))
        else:
            val = (s - 1) / (s * (1.0 - (s - 1) / s**2 * xs**2)) * np.sqrt(np.clip(4.0 - xs**2, 0.0, None)) / np.pi
    val = np.where(inside & np.isfinite(val), val, 0.0)
    return float(val) if val.ndim == 0 else val


def kesten_moment(card: int, m: int) -> float:
    """m-th moment of the Kesten-McKay law: closed-walk counts on the |S|-regular tree over |S|^m."""
    if card < 2 or m < 1:
        raise ValueError("need card >= 2 and m >= 1")
    if m % 2:
        return 0.0
    h = m // 2
    total = sum(
        math.comb(m - j, h) * j * card**j * (card - 1) ** (h - j) / (m - j)
        for j in range(1, h + 1)
    )
    return total / card**m


def squared_moment(card: int, m: int) -> float:
    """m-th moment of the squared-singular-value law (equal to the 2m-th Kesten moment)."""
    if card < 2 or m < 1:
        raise ValueError("need card >= 2 and m >= 1")
    total = sum(
        math.comb(2 * m - j, m) * j * card**j * (card - 1) ** (m - j) / (2 * m - j)
        for j in range(1, m + 1)
    )
    return total / card ** (2 * m)


def integrate_density(sd: SpectralDensity, f=lambda x: 1.0, tol: float = 1e-12) -> float:
    """Integral of f against the density.

    The substitution x = r sin(u) removes the square-root behaviour at the edge r.
    """
    _, r = sd.support
    # every support is [-r, r] or [0, r]
    ulo = -math.pi / 2 if sd.kind is DensityKind.KESTEN_SIGNED else 0.0

    def integrand(u):
        x = r * math.sin(u)
        return f(x) * density_at(sd, x) * r * math.cos(u)

    val, _ = integrate.quad(integrand, ulo, math.pi / 2, epsabs=tol, epsrel=tol, limit=400)
    return val


def numeric_moment(sd: SpectralDensity, m: int) -> float:
    return integrate_density(sd, lambda x: x**m)


def squared_density_moment(card: int, m: int) -> float:
    """m-th moment of y = x^2 from the squared-variable density on [0, delta_opt^2]."""
    dop2 = delta_opt(card) ** 2

    # y = dop2 sin^2(u): dy = 2 dop2 sin u cos u du and sqrt(dop2 y - y^2) = dop2 sin u cos u
    def integrand(u):
        su, cu = math.sin(u), math.cos(u)
        y = dop2 * su * su
        if y == 0.0:
            return 0.0
        dens = card * dop2 * su * cu / (2.0 * math.pi * (1.0 - y) * y)
        return y**m * dens * 2.0 * dop2 * su * cu

    val, _ = integrate.quad(integrand, 0.0, math.pi / 2, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val
