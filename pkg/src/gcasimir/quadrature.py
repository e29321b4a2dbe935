"""Adaptive 15-point Gauss-Kronrod quadrature for small vector integrands.

This is the pure-Python twin of the routine compiled into ``_ccore``; both
follow the same subdivision order so their results agree to rounding.
"""

XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

LIMIT = 400
_EPMACH = 2.220446049250313e-16
_UFLOW = 2.2250738585072014e-308

OK, LIMIT_REACHED, ROUNDOFF = 0, 1, 2


def gk15(f, a, b, nc):
    """One Gauss-Kronrod panel; returns (result, error) lists of length nc."""
    centr = 0.5 * (a + b)
    hl = 0.5 * (b - a)
    dhl = abs(hl)
    fc = f(centr)
    resg = [fc[c] * WG[3] for c in range(nc)]
    resk = [fc[c] * WGK[7] for c in range(nc)]
    resabs = [abs(resk[c]) for c in range(nc)]
    fv1 = [None] * 7
    fv2 = [None] * 7
    for j in range(3):
        jtw = 2 * j + 1
        absc = hl * XGK[jtw]
        f1 = f(centr - absc)
        f2 = f(centr + absc)
        fv1[jtw] = f1
        fv2[jtw] = f2
        for c in range(nc):
            resg[c] += WG[j] * (f1[c] + f2[c])
            resk[c] += WGK[jtw] * (f1[c] + f2[c])
            resabs[c] += WGK[jtw] * (abs(f1[c]) + abs(f2[c]))
    for j in range(4):
        jtwm1 = 2 * j
        absc = hl * XGK[jtwm1]
        f1 = f(centr - absc)
        f2 = f(centr + absc)
        fv1[jtwm1] = f1
        fv2[jtwm1] = f2
        for c in range(nc):
            resk[c] += WGK[jtwm1] * (f1[c] + f2[c])
            resabs[c] += WGK[jtwm1] * (abs(f1[c]) + abs(f2[c]))
    res = [0.0] * nc
    err = [0.0] * nc
    for c in range(nc):
        reskh = resk[c] * 0.5
        resasc = WGK[7] * abs(fc[c] - reskh)
        for j in range(7):
            resasc += WGK[j] * (abs(fv1[j][c] - reskh) + abs(fv2[j][c] - reskh))
        res[c] = resk[c] * hl
        rabs = resabs[c] * dhl
        resasc *= dhl
        e = abs((resk[c] - resg[c]) * hl)
        if resasc != 0.0 and e != 0.0:
            e = resasc * min(1.0, (200.0 * e / resasc) ** 1.5)
        if rabs > _UFLOW / (50.0 * _EPMACH):
            e = max(50.0 * _EPMACH * rabs, e)
        err[c] = e
    return res, err


def adaptive(f, points, nc=1, epsabs=0.0, epsrel=1e-9, limit=LIMIT):
    """Integrate ``f`` over the breakpoints ``points`` (ascending).

    ``f(x)`` must return a sequence of ``nc`` floats. ``epsabs`` may be a
    scalar or a per-component sequence.

    Returns
    -------
    result : list of float
    error : list of float
    status : int
        0 on convergence, 1 if the interval budget was exhausted, 2 if an
        interval could no longer be bisected.
    """
    if not hasattr(epsabs, "__len__"):
        epsabs = [epsabs] * nc
    lo, hi, rs, es = [], [], [], []
    for a, b in zip(points[:-1], points[1:]):
        if b > a:
            r, e = gk15(f, a, b, nc)
            lo.append(a)
            hi.append(b)
            rs.append(r)
            es.append(e)
    if not lo:
        return [0.0] * nc, [0.0] * nc, OK
    status = OK
    while True:
        tot = [0.0] * nc
        terr = [0.0] * nc
        for r, e in zip(rs, es):
            for c in range(nc):
                tot[c] += r[c]
                terr[c] += e[c]
        tol = [max(epsabs[c], epsrel * abs(tot[c])) for c in range(nc)]
        if all(terr[c] <= tol[c] for c in range(nc)):
            break
        if len(lo) >= limit:
            status = LIMIT_REACHED
            break
        best, score = 0, -1.0
        for i, e in enumerate(es):
            s = max(e[c] / tol[c] if tol[c] > 0.0 else e[c] * 1e300 for c in range(nc))
            if s > score:
                best, score = i, s
        a, b = lo[best], hi[best]
        mid = 0.5 * (a + b)
        if not (a < mid < b):
            status = ROUNDOFF
            break
        r1, e1 = gk15(f, a, mid, nc)
        r2, e2 = gk15(f, mid, b, nc)
        hi[best], rs[best], es[best] = mid, r1, e1
        lo.append(mid)
        hi.append(b)
        rs.append(r2)
        es.append(e2)
    return tot, terr, status


def quad(f, a, b, epsabs=0.0, epsrel=1e-9, points=()):
    """Scalar convenience wrapper around :func:`adaptive`."""
    pts = sorted({a, b, *[p for p in points if a < p < b]})
    res, err, status = adaptive(lambda x: (f(x),), pts, 1, epsabs, epsrel)
    return res[0], err[0], status

