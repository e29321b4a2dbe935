"""Pure-Python implementation of the hot numerical kernels.

Mirrors ``_ccore.pyx`` function for function. Everything here works on
plain floats in the internal unit system:

* ``k``  -- in-plane wave number k_perp (1/nm)
* ``zq`` -- zeta / (hbar c), i.e. xi/c (1/nm)
* tensor components are returned divided by hbar: Pi00 in 1/nm, Pi in 1/nm^3

A boundary ("side") is a tuple
``(kind, eps, eps_k0sq, gap, mu, v, tensor, ypsi)`` where ``eps_k0sq`` is
eps(i xi) * (xi/c)^2 with its exact zero-frequency limit.
"""
import cmath
import math

from .constants import ALPHA, HBAR_C, K_B
from .quadrature import adaptive

BARE, GRAPHENE, IDEAL = 0, 1, 2
EXACT, APPROX, ZERO_T, ORDER0 = 0, 1, 2, 3

# Fermi factors below exp(-36) are dropped.
FERMI_CUT = 36.0
# Upper end of the y = 2 a q integration, measured from its lower end.
Y_SPAN = 60.0
_Y_BREAKS = (0.0, 2.0, 6.0, 15.0, 30.0, Y_SPAN)

_PSI_SERIES = tuple(
    (-1) ** n * (4.0 * n + 4.0) / ((2.0 * n + 1.0) * (2.0 * n + 3.0)) for n in range(60)
)


def fermi(z):
    if z > 0.0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


def fermi_sum(x, m):
    """Sum over kappa = +-1 of 1 / (exp(x + kappa m) + 1)."""
    return fermi(x + m) + fermi(x - m)


def psi(x):
    if x < 0.0:
        raise ValueError("psi is defined for x >= 0")
    if x == 0.0:
        return math.pi
    if x < 3.0:
        return 2.0 * (x + (1.0 - x * x) * math.atan(1.0 / x))
    # Large-x series avoids the cancellation between x and (1-x^2) atan(1/x).
    inv2 = 1.0 / (x * x)
    term = 1.0 / x
    s = 0.0
    for c in _PSI_SERIES:
        t = c * term
        s += t
        if abs(t) < 1e-17 * abs(s):
            break
        term *= inv2
    return 2.0 * s


def _logaddexp(a, b):
    hi, lo = (a, b) if a > b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def order0(k, zq, gap, v):
    qt = math.sqrt((v * k) ** 2 + zq * zq)
    p = psi(gap / (HBAR_C * qt))
    return ALPHA * k * k * p / qt, ALPHA * k * k * qt * p


def thermal_exact(k, zq, T, gap, mu, v, tol):
    """Explicit-temperature part of the tensor for xi > 0."""
    vk = v * k
    qt = math.sqrt(vk * vk + zq * zq)
    eps = (vk / qt) ** 2
    gam = zq / qt
    D = gap / (HBAR_C * qt)
    B = HBAR_C * qt / (2.0 * K_B * T)
    m = mu / (K_B * T)
    umax = (FERMI_CUT + m) / B
    if umax <= D:
        return 0.0, 0.0, 0
    D2 = D * D
    epsD2 = eps * D2

    def f(u):
        fs = fermi_sum(B * u, m)
        u2 = u * u
        s = complex(1.0 - u2 + epsD2, 2.0 * gam * u)
        rs = cmath.sqrt(s)
        w1 = complex(1.0, gam * u)
        sw = cmath.sqrt(1.0 - eps * (u2 - D2) / (w1 * w1))
        p = w1 * sw
        if p.real >= 0.0:
            g1 = ((u2 - D2) / (w1 * (1.0 + sw))).real
        else:
            g1 = (1.0 + p.real) / eps
        rinv = rs.real / abs(s)
        return fs * (g1 + D2 * rinv), fs * (1.0 - rinv - g1)

    pts = [D]
    for b in (m / B, math.sqrt(1.0 + epsD2)):
        if D < b < umax:
            pts.append(b)
    pts.append(umax)
    pts.sort()
    ea = 0.25 * tol * psi(D)
    res, _, st = adaptive(f, pts, 2, ea, tol)
    c00 = 4.0 * ALPHA * k * k / qt
    c11 = 4.0 * ALPHA * k * k * qt
    return c00 * res[0], c11 * res[1], st


def l0(k, T, gap, mu, v, tol):
    """Full tensor at zero Matsubara frequency."""
    vk = v * k
    D0 = gap / (HBAR_C * vk)
    B0 = HBAR_C * vk / (2.0 * K_B * T)
    m = mu / (K_B * T)
    g = gap / (2.0 * K_B * T)
    W2 = 1.0 + D0 * D0
    D02 = D0 * D0
    W = math.sqrt(W2)
    phimax = math.atan2(1.0, D0)

    def f(phi):
        u = W * math.cos(phi)
        s2 = math.sin(phi) ** 2
        fs = fermi_sum(B0 * u, m)
        return fs * (W2 * s2 - D02), fs * (W2 * s2 - 1.0)

    ps = psi(D0)
    logs = _logaddexp(m, -g) + _logaddexp(-m, -g)
    log_term = 8.0 * K_B * T * logs / (HBAR_C * vk)
    pts = [0.0, phimax]
    if D0 < m / B0 < W:
        pts.insert(1, math.acos(m / B0 / W))
    ea = (0.25 * tol * (ps + log_term), 0.25 * tol * ps)
    res, _, st = adaptive(f, pts, 2, ea, tol)
    p00 = ALPHA * (k / v) * (ps + log_term - 4.0 * res[0])
    p = ALPHA * v * k ** 3 * (ps + 4.0 * res[1])
    return p00, p, st


def y_approx(zeta, T, gap, mu, tol):
    """Thermal bracket term Y of the simplified l >= 1 tensor."""
    B = zeta / (2.0 * K_B * T)
    m = mu / (K_B * T)
    Dz = gap / zeta
    Dz2 = Dz * Dz
    umax = (FERMI_CUT + m) / B
    if umax <= Dz:
        return 0.0, 0

    def f(u):
        u2 = u * u
        return (fermi_sum(B * u, m) * (u2 + Dz2) / (u2 + 1.0),)

    pts = [Dz]
    for b in (m / B, 1.0):
        if Dz < b < umax:
            pts.append(b)
    pts.append(umax)
    pts.sort()
    res, _, st = adaptive(f, pts, 1, 0.25 * tol * psi(Dz), tol)
    return 2.0 * res[0], st


def approx(k, zq, ypsi):
    return ALPHA * k * k * ypsi / zq, ALPHA * k * k * zq * ypsi


def zero_t(k, zq, gap, mu, v):
    """Tensor at zero temperature, any gap and chemical potential."""
    if 2.0 * mu <= gap:
        return order0(k, zq, gap, v)
    vk = v * k
    qt = math.sqrt(vk * vk + zq * zq)
    gam = zq / qt
    D = gap / (HBAR_C * qt)
    M = 1.0 + D * D
    y = complex(zq * HBAR_C, 2.0 * mu) / (HBAR_C * vk * math.sqrt(M))
    if abs(1.0 + y * y) < 1e-12:
        # Step off the branch point along the positive-frequency direction.
        y += 1e-9
    sq = cmath.sqrt(1.0 + y * y)
    if abs(y) >= 2.0:
        h = 1.0 / (1.0 + cmath.sqrt(1.0 + 1.0 / (y * y)))
    else:
        h = y * sq - y * y
    im_h = h.imag
    im_l = cmath.log(y + sq).imag
    k2 = k * k
    p00 = 8.0 * ALPHA * mu * k2 / (HBAR_C * qt * qt * (1.0 + gam)) - ALPHA * k2 / qt * (
        2.0 * M * im_h + (2.0 - M) * (2.0 * im_l - math.pi)
    )
    p = 8.0 * ALPHA * mu * zq * k2 / (HBAR_C * (qt + zq)) + 2.0 * ALPHA * qt * k2 * (
        M * im_h - (2.0 - M) * im_l + 0.5 * math.pi * (2.0 - M)
    )
    return p00, p


def tensor(side, k, zq, T, tol):
    """Return (pi00, pi, status) for a graphene-bearing side."""
    _, _, _, gap, mu, v, mode, ypsi = side
    if mode == ZERO_T:
        p00, p = zero_t(k, zq, gap, mu, v)
        return p00, p, 0
    if mode == ORDER0:
        p00, p = order0(k, zq, gap, v)
        return p00, p, 0
    if zq == 0.0:
        return l0(k, T, gap, mu, v, tol)
    if mode == APPROX:
        p00, p = approx(k, zq, ypsi)
        return p00, p, 0
    a00, a = order0(k, zq, gap, v)
    b00, b, st = thermal_exact(k, zq, T, gap, mu, v, tol)
    return a00 + b00, a + b, st


def coefficients(side, k, q, zq, T, tol):
    """(r_TM, r_TE, status) of one boundary."""
    kind, eps, ek2 = side[0], side[1], side[2]
    if kind == IDEAL:
        return 1.0, 1.0, 0
    kk = math.sqrt(k * k + ek2)
    if kind == BARE:
        rtm = (eps * q - kk) / (eps * q + kk)
        rte = (zq * zq - ek2) / ((q + kk) * (q + kk))
        return rtm, rte, 0
    p00, p, st = tensor(side, k, zq, T, tol)
    k2 = k * k
    g = q * kk * p00
    rtm = (k2 * (eps * q - kk) + g) / (k2 * (eps * q + kk) + g)
    nte = k2 * (zq * zq - ek2) / (q + kk)
    rte = (nte - p) / (k2 * (q + kk) + p)
    return rtm, rte, st


def term_integrand(y, zeta, a, T, side1, side2, tol):
    """Integrand in y = 2 a q for both polarizations; also returns status."""
    zq = zeta / HBAR_C
    y0 = 2.0 * a * zq
    h = 0.5 / a
    k2 = (y - y0) * h * (y + y0) * h
    if k2 <= 0.0:
        return 0.0, 0.0, 0
    k = math.sqrt(k2)
    q = y * h
    r1tm, r1te, s1 = coefficients(side1, k, q, zq, T, tol)
    r2tm, r2te, s2 = coefficients(side2, k, q, zq, T, tol)
    e = math.exp(-y)
    em = math.expm1(-y)
    y2 = y * y
    rr = r1tm * r2tm
    tm = y2 * rr * e / ((1.0 - rr) - rr * em)
    rr = r1te * r2te
    te = y2 * rr * e / ((1.0 - rr) - rr * em)
    return tm, te, max(s1, s2)


def term_integrals(zeta, a, T, side1, side2, tol):
    """Integral over k_perp of q k_perp sum_sigma [r1^-1 r2^-1 e^{2aq} - 1]^-1.

    Returns (tm, te, status) in 1/nm^3.
    """
    y0 = 2.0 * a * zeta / HBAR_C
    inner = 0.1 * tol
    worst = [0]

    def f(y):
        tm, te, st = term_integrand(y, zeta, a, T, side1, side2, inner)
        if st > worst[0]:
            worst[0] = st
        return tm, te

    pts = [y0 + b for b in _Y_BREAKS]
    res, _, st = adaptive(f, pts, 2, 1e-300, tol)
    scale = 1.0 / (8.0 * a * a * a)
    return res[0] * scale, res[1] * scale, max(st, worst[0])
