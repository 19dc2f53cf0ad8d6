"""
Analytic side of the spectrum.

The bound levels E > 1 of the Dirac Smorodinsky-Winternitz system solve

    sqrt((E + 1) / 2) (E - 1) = N + 3/2 + sqrt(1/4 + k (E + 1) / 2)

each with degeneracy [N/2] + 1. Here lives that root solve plus the scalars of the Higgs algebra
realized on a level: structure constants, Casimir value and the extremal weights.
"""
import dataclasses
import logging
import math

import numpy as np
import scipy.optimize

import hdl.exc

LAMBDAS = (2, 6)
ROOT_TOL = 1e-12
MAX_DOUBLINGS = 60
SCAN_POINTS = 400


@dataclasses.dataclass(frozen=True)
class EnergyLevel():
    """
    A solved level. d == n + 1 == N // 2 + 1 and lam is the weight branch of N.
    """
    N: int
    k: float
    E: float
    d: int
    n: int
    lam: int

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class HiggsScalars():
    """
    Scalars of the Higgs algebra on the level E at coupling k.

    m_under holds the lowest weight per branch lambda in LAMBDAS.
    """
    E: float
    k: float
    G: float
    F: float
    c3: float
    c1: float
    c0: float
    C: float
    m_bar: float
    m_under: dict

    def gap(self, lam):
        """ m_bar - m_under for branch lam. """
        return self.m_bar - self.m_under[lam]

    @property
    def gaps(self):
        return {lam: self.gap(lam) for lam in LAMBDAS}


def check_sqrt(value, what):
    """
    Raises:
        DomainError: value < 0.
    """
    if np.any(np.asarray(value) < 0):
        raise hdl.exc.DomainError("negative square root argument in {}: {}".format(what, value))
    return np.sqrt(value)


def spectral_fn(E, N, k):
    """
    sqrt((E+1)/2) (E-1) - (N + 3/2) - sqrt(1/4 + k (E+1)/2), vectorized over E.

    Raises:
        DomainError: Some E <= -1.
    """
    energy = np.asarray(E, dtype=float)
    if np.any(energy <= -1):
        raise hdl.exc.DomainError("spectral function needs E > -1, got {}".format(E))

    val = np.sqrt((energy + 1) / 2) * (energy - 1) - (N + 1.5) - \
        check_sqrt(0.25 + k * (energy + 1) / 2, 'level equation')
    return float(val) if val.ndim == 0 else val


def degeneracy(N):
    """ d = [N/2] + 1 """
    return N // 2 + 1


def branch_lambda(N):
    """
    Weight branch of level N: 2 for even N, 6 for odd.

    With the level equation substituted m_bar - m_under = (4N + 2 - lambda) / 8, an integer only
    for this pairing.
    """
    return 2 if N % 2 == 0 else 6


def bracket_root(func, lo=1.0, hi=2.0):
    """
    Double hi until func changes sign on [lo, hi], lo moving up to the last negative point.

    Raises:
        RootSolveError: No sign change after MAX_DOUBLINGS steps.
    """
    for _ in range(MAX_DOUBLINGS):
        if func(hi) >= 0:
            return lo, hi
        lo, hi = hi, 2 * hi

    raise hdl.exc.RootSolveError("no bracket found above E = 1")


def count_sign_changes(values):
    """ Strict sign changes along a sampled function. """
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(np.diff(signs)))


def polish_root(func, guess, lo, hi, width):
    """
    Brent refinement of guess inside [guess - 10 width, guess + 10 width], guess kept when that
    window does not bracket.
    """
    left, right = max(lo, guess - 10 * width), min(hi, guess + 10 * width)
    if func(left) * func(right) >= 0:
        return guess
    return scipy.optimize.brentq(func, left, right)


def solve_level(N, k, tol=ROOT_TOL, *, polish=False):
    """
    Solve the level equation for the N-th level by bisection.

    Args:
        N: Total quantum number >= 0.
        k: Coupling >= 0.
        tol: Absolute tolerance on E.
        polish: Refine the bisection result with Brent's method.

    Returns: An EnergyLevel.

    Raises:
        DomainError: N < 0, k < 0 or tol <= 0.
        RootSolveError: No bracket, or more than one sign change inside it.
    """
    if N < 0 or k < 0 or not tol > 0:
        raise hdl.exc.DomainError("solve_level needs N >= 0, k >= 0, tol > 0")

    def func(energy):
        return spectral_fn(energy, N, k)

    lo, hi = bracket_root(func)
    scan = spectral_fn(np.linspace(lo, hi, SCAN_POINTS), N, k)
    changes = count_sign_changes(scan)
    if changes != 1:
        raise hdl.exc.RootSolveError("multiple sign changes: {} on [{}, {}] for N={} k={}".format(
            changes, lo, hi, N, k))

    energy = scipy.optimize.bisect(func, lo, hi, xtol=tol, maxiter=500)
    if polish:
        energy = polish_root(func, energy, lo, hi, tol)
    logging.getLogger(__name__).debug("Level N=%d k=%g: E=%.12f", N, k, energy)

    return EnergyLevel(N=N, k=k, E=energy, d=degeneracy(N), n=N // 2, lam=branch_lambda(N))


def level_table(n_max, k, tol=ROOT_TOL):
    """ Levels N = 0..n_max at coupling k. """
    return [solve_level(num, k, tol) for num in range(n_max + 1)]


def nonrel_level(N, k):
    """ Nonrelativistic level N + 3/2 + sqrt(k + 1/4). """
    if k < 0:
        raise hdl.exc.DomainError("nonrel_level needs k >= 0")
    return N + 1.5 + math.sqrt(k + 0.25)


def invert_k(E, N):
    """
    The coupling k at which E is the N-th level.

    Raises:
        DomainError: E <= 1 or no k >= 0 puts E at level N.
    """
    if E <= 1:
        raise hdl.exc.DomainError("invert_k needs E > 1, got {}".format(E))
    rest = math.sqrt((E + 1) / 2) * (E - 1) - (N + 1.5)
    if rest < 0.5:
        raise hdl.exc.DomainError("E = {} lies below level {} at k = 0".format(E, N))

    return (rest ** 2 - 0.25) * 2 / (E + 1)


def k0_level(N):
    """
    Level N at k = 0 from the cubic u^3 - u - (N + 2)/2 = 0 with E = 2u^2 - 1.
    """
    roots = np.roots([1.0, 0.0, -1.0, -(N + 2) / 2])
    real = roots[np.abs(roots.imag) < 1e-9].real
    return float(2 * real.max() ** 2 - 1)


def higgs_scalars(E, k):
    """
    Structure constants, Casimir value and weights of the Higgs algebra on level E.

        G = 2(E + 1)            F = (E^2 - 1)^2 - G
        c3 = -1024 G^2          c1 = 64 (F - 2G) G + 32 k G^3
        c0 = 8 k G^2 sqrt((F + G) G)
        C = 2F(F - 8G) - 2 k G^2 (F + 4G)
        m_bar = [-4 - sqrt(4 + 8k(E+1)) + sqrt(2(E+1)) (E-1)] / 8
        m_under = [lambda - sqrt(2(E+1)) (E-1)] / 8

    Raises:
        DomainError: E <= 1, k < 0, or a negative square root argument.
    """
    if E <= 1 or k < 0:
        raise hdl.exc.DomainError("higgs_scalars needs E > 1 and k >= 0, got E={} k={}".format(
            E, k))

    G = 2 * (E + 1)
    F = (E ** 2 - 1) ** 2 - G
    root = float(check_sqrt(2 * (E + 1), 'weights')) * (E - 1)
    return HiggsScalars(
        E=E, k=k, G=G, F=F,
        c3=-1024 * G ** 2,
        c1=64 * (F - 2 * G) * G + 32 * k * G ** 3,
        c0=8 * k * G ** 2 * float(check_sqrt((F + G) * G, 'c0')),
        C=2 * F * (F - 8 * G) - 2 * k * G ** 2 * (F + 4 * G),
        m_bar=(-4 - float(check_sqrt(4 + 8 * k * (E + 1), 'm_bar')) + root) / 8,
        m_under={lam: (lam - root) / 8 for lam in LAMBDAS},
    )


def weight_gap(E, k, lam):
    """ m_bar - m_under on branch lam. """
    return higgs_scalars(E, k).gap(lam)


def s_pm_value(m, scal, sign):
    """
    C - [c3/2 m^2 (m +- 1)^2 + c1 m (m +- 1) + c0 (2m +- 1)], twice ||D+- |m>||^2.

    Args:
        m: Weight.
        scal: HiggsScalars of the level.
        sign: +1 or -1.
    """
    step = 1 if sign > 0 else -1
    return scal.C - (scal.c3 / 2 * m ** 2 * (m + step) ** 2 + scal.c1 * m * (m + step)
                     + scal.c0 * (2 * m + step))


def limit_rows(n_max, k, k_small=1e-6, tol=ROOT_TOL):
    """
    Rows of the k -> 0 and nonrelativistic comparisons for N = 0..n_max.

    Returns: list of dicts with N, E_k0 (cubic), E_small (solve at k_small), diff_k0,
             E_rel_minus_1 at k, E_nonrel, lambda, gap (m_bar - m_under on that branch).
    """
    rows = []
    for num in range(n_max + 1):
        level = solve_level(num, k, tol)
        e_k0 = k0_level(num)
        e_small = solve_level(num, k_small, tol).E
        rows += [{
            'N': num,
            'E_k0': e_k0,
            'E_small': e_small,
            'diff_k0': abs(e_small - e_k0),
            'E_rel_minus_1': level.E - 1,
            'E_nonrel': nonrel_level(num, k),
            'lambda': level.lam,
            'gap': weight_gap(level.E, k, level.lam),
        }]

    return rows
