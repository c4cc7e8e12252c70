# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical core.

Function-for-function twin of twostream._kernels_py with identical algorithms
and iteration counts; see that module for the contracts.
"""

from libc.math cimport INFINITY, exp, log

BACKEND_NAME = "compiled"

LINE_BISECT_ITERS = 48
LOGODDS_BISECT_ITERS = 60

KIND_EQUALITY = 0
KIND_LINE = 1
KIND_HALFPLANE_LE = 2
KIND_HALFPLANE_GE = 3
KIND_LOG_ODDS_LE = 4
KIND_LOG_ODDS_GE = 5

cdef int _LINE_ITERS = 48
cdef int _LOGODDS_ITERS = 60
cdef double _X_LO = -40.0
cdef double _X_HI = 40.0

cdef int _K_EQUALITY = 0
cdef int _K_LINE = 1
cdef int _K_HALFPLANE_LE = 2
cdef int _K_HALFPLANE_GE = 3
cdef int _K_LOG_ODDS_LE = 4
cdef int _K_LOG_ODDS_GE = 5


cdef inline double _sigma(double x) noexcept nogil:
    return 1.0 / (1.0 + exp(-x))


cdef double _bern_kl(double p, double q) noexcept nogil:
    cdef double out = 0.0
    if p == q:
        return 0.0
    if p > 0.0:
        if q == 0.0:
            return INFINITY
        out += p * log(p / q)
    if p < 1.0:
        if q == 1.0:
            return INFINITY
        out += (1.0 - p) * log((1.0 - p) / (1.0 - q))
    return out


cdef double _line_root(double s, double c, double sa, double sb, double na, double nb) noexcept nogil:
    cdef double lo, hi, mid, tb, f
    cdef int i
    if c == 0.0:
        return sa
    if c > 0.0:
        lo = max(0.0, -s / c)
        hi = min(1.0, (1.0 - s) / c)
    else:
        lo = max(0.0, (1.0 - s) / c)
        hi = min(1.0, -s / c)
    for i in range(_LINE_ITERS):
        mid = 0.5 * (lo + hi)
        tb = s + c * mid
        f = na * (-sa / mid + (1.0 - sa) / (1.0 - mid)) + nb * c * (
            -sb / tb + (1.0 - sb) / (1.0 - tb)
        )
        if f < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


cdef double _logodds_x(double delta, double sa, double sb, double na, double nb) noexcept nogil:
    cdef double lo = _X_LO
    cdef double hi = _X_HI
    cdef double mid, g
    cdef int i
    for i in range(_LOGODDS_ITERS):
        mid = 0.5 * (lo + hi)
        g = na * (_sigma(mid) - sa) + nb * (_sigma(mid + delta) - sb)
        if g < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


cdef inline double _increment(double ta, double tb, double ca, double cb,
                              double ka, double na, double kb, double nb) noexcept nogil:
    return (
        ka * log(ta / ca)
        + (na - ka) * log((1.0 - ta) / (1.0 - ca))
        + kb * log(tb / cb)
        + (nb - kb) * log((1.0 - tb) / (1.0 - cb))
    )


def bern_kl(double p, double q):
    """Bernoulli KL d(p || q); +inf when q has zero mass where p does not."""
    return _bern_kl(p, q)


def kl_block_counts(double sa, double sb, double ta, double tb, long na, long nb):
    """Block KL divergence from plain floats (na*d(sa||ta) + nb*d(sb||tb))."""
    return na * _bern_kl(sa, ta) + nb * _bern_kl(sb, tb)


def project_line_root(double s, double c, double sa, double sb, long na, long nb):
    """theta_a of the KL minimizer over the line theta_b = s + c*theta_a."""
    return _line_root(s, c, sa, sb, <double> na, <double> nb)


def project_logodds_root(double delta, double sa, double sb, long na, long nb):
    """(theta_a, theta_b) of the KL minimizer on the log-odds boundary curve."""
    cdef double x = _logodds_x(delta, sa, sb, <double> na, <double> nb)
    return _sigma(x), _sigma(x + delta)


def line_grid_increments(double[::1] s, double[::1] c,
                         const unsigned char[::1] active,
                         double ta, double tb, long ka, long kb, long na, long nb,
                         double[::1] out):
    """Per-grid-point log e-value increments for line nulls at a shared plug-in."""
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t i
    cdef double dna = <double> na
    cdef double dnb = <double> nb
    cdef double dka = <double> ka
    cdef double dkb = <double> kb
    cdef double root, cb
    with nogil:
        for i in range(n):
            out[i] = 0.0
            if active[i] == 0:
                continue
            if s[i] + c[i] * ta == tb:
                continue
            if c[i] == 0.0:
                root = ta
            else:
                root = _line_root(s[i], c[i], ta, tb, dna, dnb)
            cb = s[i] + c[i] * root
            out[i] = _increment(ta, tb, root, cb, dka, dna, dkb, dnb)


def logodds_grid_increments(double[::1] delta, const unsigned char[::1] is_ge,
                            const unsigned char[::1] active,
                            double ta, double tb, long ka, long kb, long na, long nb,
                            double[::1] out):
    """Per-grid-point increments for one-sided log-odds nulls at a shared plug-in."""
    cdef Py_ssize_t n = delta.shape[0]
    cdef Py_ssize_t i
    cdef double dna = <double> na
    cdef double dnb = <double> nb
    cdef double dka = <double> ka
    cdef double dkb = <double> kb
    cdef double lor = log(tb * (1.0 - ta)) - log((1.0 - tb) * ta)
    cdef double x
    cdef bint member
    with nogil:
        for i in range(n):
            out[i] = 0.0
            if active[i] == 0:
                continue
            if is_ge[i] != 0:
                member = lor >= delta[i]
            else:
                member = lor <= delta[i]
            if member:
                continue
            x = _logodds_x(delta[i], ta, tb, dna, dnb)
            out[i] = _increment(ta, tb, _sigma(x), _sigma(x + delta[i]), dka, dna, dkb, dnb)


def run_stream(int kind, double p1, double p2,
               const long long[::1] ka, const long long[::1] kb,
               long na, long nb,
               double aa, double ba, double ab, double bb,
               double clamp, double[::1] out):
    """Run one e-process over a whole stream of per-block one-counts."""
    cdef Py_ssize_t m = ka.shape[0]
    cdef Py_ssize_t j
    cdef double dna = <double> na
    cdef double dnb = <double> nb
    cdef long long cum_a = 0
    cdef long long cum_b = 0
    cdef double total = 0.0
    cdef double hi_clamp = 1.0 - clamp
    cdef double ta, tb, inc, t0, ca, edge, lor, x
    cdef bint member
    with nogil:
        for j in range(m):
            ta = (aa + cum_a) / (aa + ba + j * dna)
            tb = (ab + cum_b) / (ab + bb + j * dnb)
            if ta < clamp:
                ta = clamp
            elif ta > hi_clamp:
                ta = hi_clamp
            if tb < clamp:
                tb = clamp
            elif tb > hi_clamp:
                tb = hi_clamp

            inc = 0.0
            if kind == _K_EQUALITY:
                if ta != tb:
                    t0 = (dna * ta + dnb * tb) / (dna + dnb)
                    inc = _increment(ta, tb, t0, t0, <double> ka[j], dna, <double> kb[j], dnb)
            elif kind == _K_LINE:
                if p1 + p2 * ta != tb:
                    ca = _line_root(p1, p2, ta, tb, dna, dnb)
                    inc = _increment(ta, tb, ca, p1 + p2 * ca,
                                     <double> ka[j], dna, <double> kb[j], dnb)
            elif kind == _K_HALFPLANE_LE or kind == _K_HALFPLANE_GE:
                edge = p1 + p2 * ta
                if kind == _K_HALFPLANE_LE:
                    member = tb <= edge
                else:
                    member = tb >= edge
                if not member:
                    ca = _line_root(p1, p2, ta, tb, dna, dnb)
                    inc = _increment(ta, tb, ca, p1 + p2 * ca,
                                     <double> ka[j], dna, <double> kb[j], dnb)
            else:
                lor = log(tb * (1.0 - ta)) - log((1.0 - tb) * ta)
                if kind == _K_LOG_ODDS_LE:
                    member = lor <= p1
                else:
                    member = lor >= p1
                if not member:
                    x = _logodds_x(p1, ta, tb, dna, dnb)
                    inc = _increment(ta, tb, _sigma(x), _sigma(x + p1),
                                     <double> ka[j], dna, <double> kb[j], dnb)

            total += inc
            out[j] = total
            cum_a += ka[j]
            cum_b += kb[j]
