"""Catalog of concrete central potentials and their reference energies.

Four families are provided, each returning a :class:`PotentialSpec`
ready for the series solvers:

* harmonic      V(r) = omega**2/2 * r**2
* anharmonic    V(r) = z*r**2 + r**(2J)  (rescaled form; J >= 2)
* hulthen       V(r) = -delta*exp(-delta*r)/(1 - exp(-delta*r))
* kratzer       V(r) = d_m2/r**2 + d_m1/r

The Hulthen potential is expanded into its Laurent series around r=0;
the odd-power coefficients involve rational numbers computed exactly
(they are the even-order coefficients of x/(e**x - 1), up to sign and
factorials) so the alternating sums never lose digits.  The Kratzer
family has a closed-form spectrum used as a convergence benchmark, and
the anharmonic family has simple large-|z| asymptotics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .arith import DEFAULT_DPS, to_exact, to_mpf, working_dps
from .errors import DomainError
from .series import PotentialSpec

__all__ = [
    "AnharmonicSpec",
    "HulthenSpec",
    "KratzerSpec",
    "harmonic_spec",
    "anharmonic_spec",
    "hulthen_beta",
    "hulthen_g",
    "hulthen_auto_P",
    "hulthen_direct",
    "hulthen_spec",
    "kratzer_spec",
    "kratzer_exact_energy",
    "harmonic_exact_energy",
    "hulthen_exact_energy_l0",
    "asymptotic_energy",
    "effective_l",
]


def _lossy_float(x):
    """Float view of any supported numeric type, for range checks."""
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


@dataclass(frozen=True)
class AnharmonicSpec:
    """Anharmonic oscillator z*r**2 + r**(2J) in rescaled variables.

    Either give ``z`` directly (dimensionless relative harmonicity), or
    give raw ``(omega, g)`` with g > 0; then z = omega**2/2 * g**(-4/(2J+2))
    and energies scale back by the factor g**(2/(2J+2)).
    """

    J: int
    z: object = None
    omega: object = None
    g: object = None

    def __post_init__(self):
        if int(self.J) < 2 or self.J != int(self.J):
            raise DomainError("anharmonic power J must be an integer >= 2")
        object.__setattr__(self, "J", int(self.J))
        if self.z is None:
            if self.omega is None or self.g is None:
                raise DomainError("give either z or both omega and g")
            if not float(to_mpf(self.g)) > 0:
                raise DomainError("anharmonic coupling g must be positive")
        else:
            object.__setattr__(self, "z", to_exact(self.z))

    def z_value(self, dps=None):
        """z at the working precision (computed from omega, g if needed)."""
        with working_dps(dps or DEFAULT_DPS):
            if self.z is not None:
                return to_mpf(self.z)
            w = to_mpf(self.omega)
            g = to_mpf(self.g)
            return w**2 / 2 * g ** (mp.mpf(-4) / (2 * self.J + 2))

    def energy_scale(self, dps=None):
        """Factor mapping rescaled energies back to raw ones: g**(2/(2J+2))."""
        with working_dps(dps or DEFAULT_DPS):
            if self.g is None:
                return mp.mpf(1)
            return to_mpf(self.g) ** (mp.mpf(2) / (2 * self.J + 2))


@dataclass(frozen=True)
class HulthenSpec:
    """Screened Coulomb-like potential with screening parameter delta.

    The regular part of the Laurent expansion is kept through r**(2P+1);
    the expansion converges for r < rho_V = 2*pi/delta.
    """

    delta: object
    P: int = 8

    def __post_init__(self):
        object.__setattr__(self, "delta", to_exact(self.delta))
        if not _lossy_float(self.delta) > 0:
            raise DomainError("screening parameter delta must be positive")
        if int(self.P) < 0:
            raise DomainError("truncation index P must be >= 0")
        object.__setattr__(self, "P", int(self.P))


@dataclass(frozen=True)
class KratzerSpec:
    """Pure singular potential d_m2/r**2 + d_m1/r (exactly solvable)."""

    d_m2: object = 0
    d_m1: object = 0

    def __post_init__(self):
        if float(to_mpf(self.d_m2)) <= -0.125:
            raise DomainError("d_m2 must exceed -1/8")


def harmonic_spec(omega):
    """Potential spec for V(r) = omega**2/2 * r**2."""
    w = to_exact(omega)
    if not float(to_mpf(w)) > 0:
        raise DomainError("omega must be positive")
    if isinstance(w, (int, Fraction)):
        d2 = Fraction(w) ** 2 / 2
    else:
        d2 = float(w) ** 2 / 2
    return PotentialSpec(regular=(0, 0, d2), name="harmonic")


def harmonic_exact_energy(omega, n, l):
    """Unconfined oscillator level omega * (2n + l + 3/2)."""
    return to_mpf(omega) * (2 * n + to_mpf(l) + mp.mpf(3) / 2)


def anharmonic_spec(spec, dps=None):
    """Stride-2 potential spec for V(r) = z*r**2 + r**(2J).

    The even-power structure lets the series run on the index stride 2,
    halving the coefficient count for a given maximum power.
    """
    z = spec.z if spec.z is not None else spec.z_value(dps)
    regular = [0] * (2 * spec.J + 1)
    regular[2] = z
    regular[2 * spec.J] = 1
    return PotentialSpec(regular=tuple(regular), step=2,
                         name="anharmonic(J=%d)" % spec.J)


def hulthen_beta(n):
    """Exact rational value of the alternating double sum b_n.

    b_n = (-1)**n * n/(2**(2n)-1) * sum_{k=1}^{2n-1} 2**-k
          * sum_{j=1}^{k} (-1)**j C(k,j) j**(2n-1)

    computed entirely in integer arithmetic.  The first values are
    1/6, 1/30, 1/42, ... (the absolute even-index Bernoulli numbers).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    total = Fraction(0)
    for k in range(1, 2 * n):
        inner = 0
        for j in range(1, k + 1):
            inner += (-1) ** j * math.comb(k, j) * j ** (2 * n - 1)
        total += Fraction(inner, 2**k)
    return (-1) ** n * Fraction(n, 2 ** (2 * n) - 1) * total


def hulthen_g(n):
    """Exact rational expansion weight g_n = (-1)**n b_{n+1} / (2(n+1))!."""
    return (-1) ** n * hulthen_beta(n + 1) / math.factorial(2 * (n + 1))


def hulthen_direct(delta, r, dps=None):
    """Direct evaluation -delta*exp(-delta*r)/(1-exp(-delta*r))."""
    with working_dps(dps or DEFAULT_DPS):
        d = to_mpf(delta)
        r = to_mpf(r)
        x = mp.e ** (-d * r)
        return -d * x / (1 - x)


def hulthen_auto_P(delta, R, tol):
    """Smallest P whose first dropped coefficient shifts levels < 0.1*tol.

    The shift from dropping d_m r**m is bounded by |d_m| R**m for a
    state confined to (0, R), so P is grown until that bound falls
    below a tenth of the target tolerance.
    """
    d = _lossy_float(delta)
    bound = float(tol)
    P = 0
    while P < 60:
        m = 2 * (P + 1) + 1  # first dropped odd power
        dropped = abs(d ** (m + 1) * float(hulthen_g(P + 1))) * float(R) ** m
        if dropped < 0.1 * bound:
            return P
        P += 1
    return P


def hulthen_spec(spec):
    """Laurent-series potential spec for the screened Coulomb potential.

    d_m1 = -1, d_0 = delta/2, and the odd coefficients are
    d_{2n+1} = -delta**(2n+2) * g_n for n = 0..P, all exact rationals
    when delta is rational.  rho_V = 2*pi/delta.
    """
    d = spec.delta
    exact = isinstance(d, (int, Fraction))
    dF = Fraction(d) if exact else None
    regular = []
    for m in range(2 * spec.P + 2):
        if m == 0:
            regular.append(dF / 2 if exact else float(d) / 2)
        elif m % 2 == 1:
            n = (m - 1) // 2
            coeff = -(dF ** (m + 1)) * hulthen_g(n) if exact else (
                -(float(d) ** (m + 1)) * float(hulthen_g(n)))
            regular.append(coeff)
        else:
            regular.append(0)
    rho = 2 * math.pi / float(d)
    return PotentialSpec(d_m1=-1, regular=tuple(regular), rho_V=rho,
                         name="hulthen(delta=%s)" % (d,))


def hulthen_exact_energy_l0(delta, n, dps=None):
    """Closed-form l=0 level: -(1/n - n*delta/2)**2 / 2, n = 1, 2, ...

    ``n`` here is the principal index (radial index + 1).
    """
    with working_dps(dps or DEFAULT_DPS):
        d = to_mpf(delta)
        n = int(n)
        if n < 1:
            raise DomainError("principal index must be >= 1")
        return -((mp.mpf(1) / n - n * d / 2) ** 2) / 2


def kratzer_spec(spec):
    """Potential spec for d_m2/r**2 + d_m1/r."""
    return PotentialSpec(d_m2=to_exact(spec.d_m2), d_m1=to_exact(spec.d_m1),
                         name="kratzer")


def kratzer_exact_energy(spec, n, l, dps=None):
    """Closed-form level -2*d_m1**2 * (2n + 1 + sqrt((2l+1)**2 + 8*d_m2))**-2."""
    with working_dps(dps or DEFAULT_DPS):
        d1 = to_mpf(spec.d_m1)
        d2 = to_mpf(spec.d_m2)
        root = mp.sqrt((2 * to_mpf(l) + 1) ** 2 + 8 * d2)
        return -2 * d1**2 / (2 * n + 1 + root) ** 2


def asymptotic_energy(spec, n, l, direction, dps=None):
    """Large-|z| estimate of an anharmonic level.

    direction "+inf": E ~ (2n + l + 3/2) * sqrt(2z), the oscillator of
    frequency sqrt(2z) recovered as the harmonic term dominates.
    direction "-inf": E ~ -z**2/4 + (n + 1/2) * sqrt(-4z), the levels in
    the circular well of the hat-shaped quartic potential (J=2 only);
    they depend on the radial index alone.
    """
    with working_dps(dps or DEFAULT_DPS):
        z = spec.z_value()
        if direction in ("+inf", "z->+inf", "+"):
            if z <= 0:
                raise DomainError("the z->+inf branch needs z > 0")
            return (2 * n + to_mpf(l) + mp.mpf(3) / 2) * mp.sqrt(2 * z)
        if direction in ("-inf", "z->-inf", "-"):
            if z >= 0:
                raise DomainError("the z->-inf branch needs z < 0")
            if spec.J != 2:
                raise DomainError("the z->-inf estimate is quartic-specific (J=2)")
            return -(z**2) / 4 + (n + mp.mpf(1) / 2) * mp.sqrt(-4 * z)
        raise DomainError("direction must be '+inf' or '-inf'")


def effective_l(D, l):
    """Angular momentum shift mapping a D-dimensional problem to 3D:
    l -> l + (D-3)/2."""
    if D < 2:
        raise DomainError("dimension D must be >= 2")
    return l + (D - 3) / 2.0
