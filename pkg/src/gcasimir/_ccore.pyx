# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see ``_purecore`` for the reference twin and conventions."""
from libc.math cimport exp, expm1, log1p, sqrt, atan, atan2, acos, cos, sin, fabs, pow

from .constants import ALPHA as _ALPHA, HBAR_C as _HBAR_C, K_B as _K_B

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex clog(double complex)
    double creal(double complex)
    double cimag(double complex)
    double cabs(double complex)

cdef double ALPHA = _ALPHA
cdef double HBAR_C = _HBAR_C
cdef double K_B = _K_B
cdef double PI = 3.14159265358979323846

BARE, GRAPHENE, IDEAL = 0, 1, 2
EXACT, APPROX, ZERO_T, ORDER0 = 0, 1, 2, 3

cdef enum:
    LIMIT = 400
cdef double FERMI_CUT = 36.0
cdef double Y_SPAN = 60.0
cdef double EPMACH = 2.220446049250313e-16
cdef double UFLOW = 2.2250738585072014e-308

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]

cdef double PSI_SERIES[60]
for _n in range(60):
    PSI_SERIES[_n] = (-1) ** _n * (4.0 * _n + 4.0) / ((2.0 * _n + 1.0) * (2.0 * _n + 3.0))


ctypedef void (*fn_t)(double, void*, double*) noexcept nogil

cdef struct Side:
    int kind
    double eps
    double ek2
    double gap
    double mu
    double v
    int mode
    double ypsi


cdef void gk15(fn_t f, void* p, double a, double b, int nc, double* res, double* err) noexcept nogil:
    cdef double centr = 0.5 * (a + b)
    cdef double hl = 0.5 * (b - a)
    cdef double dhl = fabs(hl)
    cdef double fc[2]
    cdef double f1[2]
    cdef double f2[2]
    cdef double fv1[7][2]
    cdef double fv2[7][2]
    cdef double resg[2]
    cdef double resk[2]
    cdef double resabs[2]
    cdef double reskh, resasc, rabs, e, absc
    cdef int j, c, jtw
    f(centr, p, fc)
    for c in range(nc):
        resg[c] = fc[c] * WG[3]
        resk[c] = fc[c] * WGK[7]
        resabs[c] = fabs(resk[c])
    for j in range(3):
        jtw = 2 * j + 1
        absc = hl * XGK[jtw]
        f(centr - absc, p, f1)
        f(centr + absc, p, f2)
        for c in range(nc):
            fv1[jtw][c] = f1[c]
            fv2[jtw][c] = f2[c]
            resg[c] += WG[j] * (f1[c] + f2[c])
            resk[c] += WGK[jtw] * (f1[c] + f2[c])
            resabs[c] += WGK[jtw] * (fabs(f1[c]) + fabs(f2[c]))
    for j in range(4):
        jtw = 2 * j
        absc = hl * XGK[jtw]
        f(centr - absc, p, f1)
        f(centr + absc, p, f2)
        for c in range(nc):
            fv1[jtw][c] = f1[c]
            fv2[jtw][c] = f2[c]
            resk[c] += WGK[jtw] * (f1[c] + f2[c])
            resabs[c] += WGK[jtw] * (fabs(f1[c]) + fabs(f2[c]))
    for c in range(nc):
        reskh = resk[c] * 0.5
        resasc = WGK[7] * fabs(fc[c] - reskh)
        for j in range(7):
            resasc += WGK[j] * (fabs(fv1[j][c] - reskh) + fabs(fv2[j][c] - reskh))
        res[c] = resk[c] * hl
        rabs = resabs[c] * dhl
        resasc *= dhl
        e = fabs((resk[c] - resg[c]) * hl)
        if resasc != 0.0 and e != 0.0:
            e = resasc * min(1.0, pow(200.0 * e / resasc, 1.5))
        if rabs > UFLOW / (50.0 * EPMACH):
            e = max(50.0 * EPMACH * rabs, e)
        err[c] = e


cdef int adaptive(fn_t f, void* p, const double* pts, int npts, int nc,
                  const double* epsabs, double epsrel, double* out) noexcept nogil:
    cdef double lo[LIMIT]
    cdef double hi[LIMIT]
    cdef double rs[LIMIT][2]
    cdef double es[LIMIT][2]
    cdef double tot[2]
    cdef double terr[2]
    cdef double tol[2]
    cdef double r1[2]
    cdef double e1[2]
    cdef double a, b, mid, s, score, sc
    cdef int n = 0, i, c, best, done, status = 0
    for i in range(npts - 1):
        if pts[i + 1] > pts[i]:
            gk15(f, p, pts[i], pts[i + 1], nc, rs[n], es[n])
            lo[n] = pts[i]
            hi[n] = pts[i + 1]
            n += 1
    if n == 0:
        for c in range(nc):
            out[c] = 0.0
        return 0
    while True:
        for c in range(nc):
            tot[c] = 0.0
            terr[c] = 0.0
        for i in range(n):
            for c in range(nc):
                tot[c] += rs[i][c]
                terr[c] += es[i][c]
        done = 1
        for c in range(nc):
            tol[c] = max(epsabs[c], epsrel * fabs(tot[c]))
            if terr[c] > tol[c]:
                done = 0
        if done:
            break
        if n >= LIMIT:
            status = 1
            break
        best = 0
        score = -1.0
        for i in range(n):
            s = -1.0
            for c in range(nc):
                if tol[c] > 0.0:
                    sc = es[i][c] / tol[c]
                else:
                    sc = es[i][c] * 1e300
                if sc > s:
                    s = sc
            if s > score:
                best = i
                score = s
        a = lo[best]
        b = hi[best]
        mid = 0.5 * (a + b)
        if not (a < mid and mid < b):
            status = 2
            break
        gk15(f, p, a, mid, nc, r1, e1)
        gk15(f, p, mid, b, nc, rs[n], es[n])
        lo[n] = mid
        hi[n] = b
        hi[best] = mid
        for c in range(nc):
            rs[best][c] = r1[c]
            es[best][c] = e1[c]
        n += 1
    for c in range(nc):
        out[c] = tot[c]
    return status


cdef inline double fermi(double z) noexcept nogil:
    cdef double e
    if z > 0.0:
        e = exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + exp(z))


cdef inline double fermi_sum_c(double x, double m) noexcept nogil:
    return fermi(x + m) + fermi(x - m)


cdef double psi_c(double x) noexcept nogil:
    cdef double inv2, term, s, t
    cdef int n
    if x == 0.0:
        return PI
    if x < 3.0:
        return 2.0 * (x + (1.0 - x * x) * atan(1.0 / x))
    inv2 = 1.0 / (x * x)
    term = 1.0 / x
    s = 0.0
    for n in range(60):
        t = PSI_SERIES[n] * term
        s += t
        if fabs(t) < 1e-17 * fabs(s):
            break
        term *= inv2
    return 2.0 * s


cdef inline double logaddexp(double a, double b) noexcept nogil:
    if a > b:
        return a + log1p(exp(b - a))
    return b + log1p(exp(a - b))


cdef void order0_c(double k, double zq, double gap, double v, double* out) noexcept nogil:
    cdef double qt = sqrt((v * k) * (v * k) + zq * zq)
    cdef double p = psi_c(gap / (HBAR_C * qt))
    out[0] = ALPHA * k * k * p / qt
    out[1] = ALPHA * k * k * qt * p


cdef struct ThermalP:
    double B, m, eps, gam, D2, epsD2


cdef void thermal_f(double u, void* vp, double* out) noexcept nogil:
    cdef ThermalP* P = <ThermalP*>vp
    cdef double fs = fermi_sum_c(P.B * u, P.m)
    cdef double u2 = u * u
    cdef double complex s = (1.0 - u2 + P.epsD2) + 2.0j * P.gam * u
    cdef double complex rs = csqrt(s)
    cdef double complex w1 = 1.0 + 1.0j * (P.gam * u)
    cdef double complex sw = csqrt(1.0 - P.eps * (u2 - P.D2) / (w1 * w1))
    cdef double complex pp = w1 * sw
    cdef double g1, rinv
    if creal(pp) >= 0.0:
        g1 = creal((u2 - P.D2) / (w1 * (1.0 + sw)))
    else:
        g1 = (1.0 + creal(pp)) / P.eps
    rinv = creal(rs) / cabs(s)
    out[0] = fs * (g1 + P.D2 * rinv)
    out[1] = fs * (1.0 - rinv - g1)


cdef int thermal_c(double k, double zq, double T, double gap, double mu, double v,
                   double tol, double* out) noexcept nogil:
    cdef double vk = v * k
    cdef double qt = sqrt(vk * vk + zq * zq)
    cdef ThermalP P
    cdef double D = gap / (HBAR_C * qt)
    cdef double umax, b, tmp
    cdef double pts[4]
    cdef double ea[2]
    cdef double res[2]
    cdef int npts = 1, st, i, j
    P.eps = (vk / qt) * (vk / qt)
    P.gam = zq / qt
    P.B = HBAR_C * qt / (2.0 * K_B * T)
    P.m = mu / (K_B * T)
    P.D2 = D * D
    P.epsD2 = P.eps * P.D2
    umax = (FERMI_CUT + P.m) / P.B
    if umax <= D:
        out[0] = 0.0
        out[1] = 0.0
        return 0
    pts[0] = D
    b = P.m / P.B
    if D < b and b < umax:
        pts[npts] = b
        npts += 1
    b = sqrt(1.0 + P.epsD2)
    if D < b and b < umax:
        pts[npts] = b
        npts += 1
    pts[npts] = umax
    npts += 1
    # insertion sort on the interior points
    for i in range(1, npts):
        j = i
        while j > 0 and pts[j - 1] > pts[j]:
            tmp = pts[j]
            pts[j] = pts[j - 1]
            pts[j - 1] = tmp
            j -= 1
    ea[0] = 0.25 * tol * psi_c(D)
    ea[1] = ea[0]
    st = adaptive(thermal_f, &P, pts, npts, 2, ea, tol, res)
    out[0] = 4.0 * ALPHA * k * k / qt * res[0]
    out[1] = 4.0 * ALPHA * k * k * qt * res[1]
    return st


cdef struct L0P:
    double W, W2, D02, B0, m


cdef void l0_f(double phi, void* vp, double* out) noexcept nogil:
    cdef L0P* P = <L0P*>vp
    cdef double u = P.W * cos(phi)
    cdef double sp = sin(phi)
    cdef double s2 = sp * sp
    cdef double fs = fermi_sum_c(P.B0 * u, P.m)
    out[0] = fs * (P.W2 * s2 - P.D02)
    out[1] = fs * (P.W2 * s2 - 1.0)


cdef int l0_c(double k, double T, double gap, double mu, double v, double tol,
              double* out) noexcept nogil:
    cdef double vk = v * k
    cdef double D0 = gap / (HBAR_C * vk)
    cdef L0P P
    cdef double g, ps, logs, log_term, phimax, ustar
    cdef double pts[3]
    cdef double ea[2]
    cdef double res[2]
    cdef int npts, st
    P.B0 = HBAR_C * vk / (2.0 * K_B * T)
    P.m = mu / (K_B * T)
    g = gap / (2.0 * K_B * T)
    P.D02 = D0 * D0
    P.W2 = 1.0 + P.D02
    P.W = sqrt(P.W2)
    phimax = atan2(1.0, D0)
    ps = psi_c(D0)
    logs = logaddexp(P.m, -g) + logaddexp(-P.m, -g)
    log_term = 8.0 * K_B * T * logs / (HBAR_C * vk)
    pts[0] = 0.0
    npts = 1
    ustar = P.m / P.B0
    if D0 < ustar and ustar < P.W:
        pts[1] = acos(ustar / P.W)
        npts = 2
    pts[npts] = phimax
    npts += 1
    ea[0] = 0.25 * tol * (ps + log_term)
    ea[1] = 0.25 * tol * ps
    st = adaptive(l0_f, &P, pts, npts, 2, ea, tol, res)
    out[0] = ALPHA * (k / v) * (ps + log_term - 4.0 * res[0])
    out[1] = ALPHA * v * k * k * k * (ps + 4.0 * res[1])
    return st


cdef struct YP:
    double B, m, Dz2


cdef void y_f(double u, void* vp, double* out) noexcept nogil:
    cdef YP* P = <YP*>vp
    cdef double u2 = u * u
    out[0] = fermi_sum_c(P.B * u, P.m) * (u2 + P.Dz2) / (u2 + 1.0)


cdef int y_approx_c(double zeta, double T, double gap, double mu, double tol,
                    double* out) noexcept nogil:
    cdef YP P
    cdef double Dz = gap / zeta
    cdef double umax, b, tmp
    cdef double pts[4]
    cdef double ea[1]
    cdef double res[1]
    cdef int npts = 1, st, i, j
    P.B = zeta / (2.0 * K_B * T)
    P.m = mu / (K_B * T)
    P.Dz2 = Dz * Dz
    umax = (FERMI_CUT + P.m) / P.B
    if umax <= Dz:
        out[0] = 0.0
        return 0
    pts[0] = Dz
    b = P.m / P.B
    if Dz < b and b < umax:
        pts[npts] = b
        npts += 1
    b = 1.0
    if Dz < b and b < umax:
        pts[npts] = b
        npts += 1
    pts[npts] = umax
    npts += 1
    for i in range(1, npts):
        j = i
        while j > 0 and pts[j - 1] > pts[j]:
            tmp = pts[j]
            pts[j] = pts[j - 1]
            pts[j - 1] = tmp
            j -= 1
    ea[0] = 0.25 * tol * psi_c(Dz)
    st = adaptive(y_f, &P, pts, npts, 1, ea, tol, res)
    out[0] = 2.0 * res[0]
    return st


cdef void zero_t_c(double k, double zq, double gap, double mu, double v, double* out) noexcept nogil:
    cdef double vk, qt, gam, D, M, im_h, im_l, k2
    cdef double complex y, sq, h
    if 2.0 * mu <= gap:
        order0_c(k, zq, gap, v, out)
        return
    vk = v * k
    qt = sqrt(vk * vk + zq * zq)
    gam = zq / qt
    D = gap / (HBAR_C * qt)
    M = 1.0 + D * D
    y = (zq * HBAR_C + 2.0j * mu) / (HBAR_C * vk * sqrt(M))
    if cabs(1.0 + y * y) < 1e-12:
        y = y + 1e-9
    sq = csqrt(1.0 + y * y)
    if cabs(y) >= 2.0:
        h = 1.0 / (1.0 + csqrt(1.0 + 1.0 / (y * y)))
    else:
        h = y * sq - y * y
    im_h = cimag(h)
    im_l = cimag(clog(y + sq))
    k2 = k * k
    out[0] = (8.0 * ALPHA * mu * k2 / (HBAR_C * qt * qt * (1.0 + gam))
              - ALPHA * k2 / qt * (2.0 * M * im_h + (2.0 - M) * (2.0 * im_l - PI)))
    out[1] = (8.0 * ALPHA * mu * zq * k2 / (HBAR_C * (qt + zq))
              + 2.0 * ALPHA * qt * k2 * (M * im_h - (2.0 - M) * im_l + 0.5 * PI * (2.0 - M)))


cdef int tensor_c(const Side* s, double k, double zq, double T, double tol, double* out) noexcept nogil:
    cdef double b[2]
    cdef int st
    if s.mode == 2:
        zero_t_c(k, zq, s.gap, s.mu, s.v, out)
        return 0
    if s.mode == 3:
        order0_c(k, zq, s.gap, s.v, out)
        return 0
    if zq == 0.0:
        return l0_c(k, T, s.gap, s.mu, s.v, tol, out)
    if s.mode == 1:
        out[0] = ALPHA * k * k * s.ypsi / zq
        out[1] = ALPHA * k * k * zq * s.ypsi
        return 0
    order0_c(k, zq, s.gap, s.v, out)
    st = thermal_c(k, zq, T, s.gap, s.mu, s.v, tol, b)
    out[0] += b[0]
    out[1] += b[1]
    return st


cdef int coeffs_c(const Side* s, double k, double q, double zq, double T, double tol,
                  double* r) noexcept nogil:
    cdef double kk, k2, g, nte
    cdef double pt[2]
    cdef int st
    if s.kind == 2:
        r[0] = 1.0
        r[1] = 1.0
        return 0
    kk = sqrt(k * k + s.ek2)
    if s.kind == 0:
        r[0] = (s.eps * q - kk) / (s.eps * q + kk)
        r[1] = (zq * zq - s.ek2) / ((q + kk) * (q + kk))
        return 0
    st = tensor_c(s, k, zq, T, tol, pt)
    k2 = k * k
    g = q * kk * pt[0]
    r[0] = (k2 * (s.eps * q - kk) + g) / (k2 * (s.eps * q + kk) + g)
    nte = k2 * (zq * zq - s.ek2) / (q + kk)
    r[1] = (nte - pt[1]) / (k2 * (q + kk) + pt[1])
    return st


cdef struct TermP:
    Side s1
    Side s2
    double zq, y0, h, T, tol
    int worst


cdef void term_f(double y, void* vp, double* out) noexcept nogil:
    cdef TermP* P = <TermP*>vp
    cdef double k2 = (y - P.y0) * P.h * (y + P.y0) * P.h
    cdef double k, q, e, em, y2, rr
    cdef double r1[2]
    cdef double r2[2]
    cdef int st
    if k2 <= 0.0:
        out[0] = 0.0
        out[1] = 0.0
        return
    k = sqrt(k2)
    q = y * P.h
    st = coeffs_c(&P.s1, k, q, P.zq, P.T, P.tol, r1)
    if st > P.worst:
        P.worst = st
    st = coeffs_c(&P.s2, k, q, P.zq, P.T, P.tol, r2)
    if st > P.worst:
        P.worst = st
    e = exp(-y)
    em = expm1(-y)
    y2 = y * y
    rr = r1[0] * r2[0]
    out[0] = y2 * rr * e / ((1.0 - rr) - rr * em)
    rr = r1[1] * r2[1]
    out[1] = y2 * rr * e / ((1.0 - rr) - rr * em)


cdef Side make_side(tuple t):
    cdef Side s
    s.kind = t[0]
    s.eps = t[1]
    s.ek2 = t[2]
    s.gap = t[3]
    s.mu = t[4]
    s.v = t[5]
    s.mode = t[6]
    s.ypsi = t[7]
    return s


# ---------------------------------------------------------------- Python API

def fermi_sum(double x, double m):
    return fermi_sum_c(x, m)


def psi(double x):
    if x < 0.0:
        raise ValueError("psi is defined for x >= 0")
    return psi_c(x)


def order0(double k, double zq, double gap, double v):
    cdef double out[2]
    order0_c(k, zq, gap, v, out)
    return out[0], out[1]


def thermal_exact(double k, double zq, double T, double gap, double mu, double v, double tol):
    cdef double out[2]
    cdef int st
    with nogil:
        st = thermal_c(k, zq, T, gap, mu, v, tol, out)
    return out[0], out[1], st


def l0(double k, double T, double gap, double mu, double v, double tol):
    cdef double out[2]
    cdef int st
    with nogil:
        st = l0_c(k, T, gap, mu, v, tol, out)
    return out[0], out[1], st


def y_approx(double zeta, double T, double gap, double mu, double tol):
    cdef double out[1]
    cdef int st
    with nogil:
        st = y_approx_c(zeta, T, gap, mu, tol, out)
    return out[0], st


def approx(double k, double zq, double ypsi):
    return ALPHA * k * k * ypsi / zq, ALPHA * k * k * zq * ypsi


def zero_t(double k, double zq, double gap, double mu, double v):
    cdef double out[2]
    zero_t_c(k, zq, gap, mu, v, out)
    return out[0], out[1]


def tensor(tuple side, double k, double zq, double T, double tol):
    cdef Side s = make_side(side)
    cdef double out[2]
    cdef int st
    with nogil:
        st = tensor_c(&s, k, zq, T, tol, out)
    return out[0], out[1], st


def coefficients(tuple side, double k, double q, double zq, double T, double tol):
    cdef Side s = make_side(side)
    cdef double r[2]
    cdef int st
    with nogil:
        st = coeffs_c(&s, k, q, zq, T, tol, r)
    return r[0], r[1], st


def term_integrand(double y, double zeta, double a, double T, tuple side1, tuple side2, double tol):
    cdef TermP P
    cdef double out[2]
    P.s1 = make_side(side1)
    P.s2 = make_side(side2)
    P.zq = zeta / HBAR_C
    P.y0 = 2.0 * a * P.zq
    P.h = 0.5 / a
    P.T = T
    P.tol = tol
    P.worst = 0
    term_f(y, &P, out)
    return out[0], out[1], P.worst


def term_integrals(double zeta, double a, double T, tuple side1, tuple side2, double tol):
    cdef TermP P
    cdef double pts[6]
    cdef double ea[2]
    cdef double res[2]
    cdef double scale
    cdef int st
    P.s1 = make_side(side1)
    P.s2 = make_side(side2)
    P.zq = zeta / HBAR_C
    P.y0 = 2.0 * a * P.zq
    P.h = 0.5 / a
    P.T = T
    P.tol = 0.1 * tol
    P.worst = 0
    pts[0] = P.y0
    pts[1] = P.y0 + 2.0
    pts[2] = P.y0 + 6.0
    pts[3] = P.y0 + 15.0
    pts[4] = P.y0 + 30.0
    pts[5] = P.y0 + Y_SPAN
    ea[0] = 1e-300
    ea[1] = 1e-300
    with nogil:
        st = adaptive(term_f, &P, pts, 6, 2, ea, tol, res)
    scale = 1.0 / (8.0 * a * a * a)
    return res[0] * scale, res[1] * scale, max(st, P.worst)
