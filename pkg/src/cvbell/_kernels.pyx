# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Mirrors ``_kernels_py`` function for function."""
from libc.math cimport exp, log1p, sqrt, fabs, fma, NAN, pow

import numpy as np

SCAN_COLUMNS = (
    "bmax",
    "nl_lhs",
    "nl_rhs",
    "simon_lhs",
    "simon_rhs",
    "nu_tilde",
    "x",
    "x_prime",
    "eq13_lhs",
    "eq13_rhs",
    "eq14a_margin",
    "eq14b_margin",
    "eq15",
    "taylor_lhs",
)
TAYLOR_COLUMNS = ("taylor_lhs", "taylor_rhs", "eq15")


cdef inline double _bracket(double x) noexcept nogil:
    cdef double t = exp(-log1p(x) / (1.0 + 2.0 * x))
    return 1.0 + t * (1.0 + 2.0 * x) / (1.0 + x)


cdef inline double _gap(double n, double m, double c) noexcept nogil:
    # n m - c^2 with the rounding error of both products restored
    cdef double p = n * m
    cdef double q = c * c
    return (p - q) + (fma(n, m, -p) - fma(c, c, -q))


cdef inline double _det(double n, double m, double c1, double c2) noexcept nogil:
    return _gap(n, m, c1) * _gap(n, m, c2)


cdef inline double _nu(double n, double m, double c1, double c2) noexcept nogil:
    cdef double dt = n * n + m * m - 2.0 * c1 * c2
    cdef double det = _det(n, m, c1, c2)
    # dt^2 - 4 det, factored so that nearly equal modes do not cancel
    cdef double disc = ((n - m) * (n + m)) * ((n - m) * (n + m)) \
        + 4.0 * (n * c1 - m * c2) * (m * c1 - n * c2)
    cdef double nu2
    if disc < -1e-12:
        return NAN
    if disc < 0.0:
        disc = 0.0
    nu2 = 2.0 * det / (dt + sqrt(disc))
    if nu2 < 0.0:
        return NAN
    return sqrt(nu2)


cpdef double ray_bracket(double x):
    return _bracket(x)


cpdef double gap(double n, double m, double c):
    return _gap(n, m, c)


cpdef double det_standard(double n, double m, double c1, double c2):
    return _det(n, m, c1, c2)


def closed_form(double n, double m, double c1, double c2):
    cdef double ct = fabs(c1) if fabs(c1) > fabs(c2) else fabs(c2)
    cdef double x = ct / sqrt(n * m)
    cdef double bmax = 0.25 / sqrt(_det(n, m, c1, c2)) * _bracket(x)
    cdef double k = ct * sqrt(m / n)
    cdef double a_star = pow(m / (m + k), -1.0 / (m + 2.0 * k))
    return bmax, a_star, x, ct


def nonlocality_sides(double n, double m, double c1, double c2):
    cdef double ct = fabs(c1) if fabs(c1) > fabs(c2) else fabs(c2)
    cdef double b = _bracket(ct / sqrt(n * m))
    return b * b / 16.0, 4.0 * _det(n, m, c1, c2)


def simon_sides(double n, double m, double c1, double c2):
    return 4.0 * _det(n, m, c1, c2), n * n + m * m + 2.0 * fabs(c1 * c2) - 0.25


cpdef double ppt_nu(double n, double m, double c1, double c2):
    return _nu(n, m, c1, c2)


cdef inline double _bell(const double[:, :] v, double pref,
                         double a, double b, double c, double d) noexcept nogil:
    cdef double e_i = v[0, 0] * a * a + 2.0 * v[0, 1] * a * b + v[1, 1] * b * b
    cdef double e_s = v[2, 2] * c * c + 2.0 * v[2, 3] * c * d + v[3, 3] * d * d
    cdef double e_is = (
        v[0, 0] * a * a + v[1, 1] * b * b + v[2, 2] * c * c + v[3, 3] * d * d
        + 2.0 * (v[0, 1] * a * b + v[0, 2] * a * c + v[0, 3] * a * d
                 + v[1, 2] * b * c + v[1, 3] * b * d + v[2, 3] * c * d)
    )
    return pref * (1.0 + exp(-0.5 * e_i) + exp(-0.5 * e_s) - exp(-0.5 * e_is))


cpdef double bell_point(const double[:, :] vinv, double pref,
                        double qi, double pi, double qs, double ps):
    return _bell(vinv, pref, qi, pi, qs, ps)


def bell_points(vinv, double pref, pts):
    cdef const double[:, :] v = np.ascontiguousarray(vinv, dtype=np.float64)
    cdef const double[:, :] p = np.ascontiguousarray(pts, dtype=np.float64).reshape(-1, 4)
    cdef Py_ssize_t i, npts = p.shape[0]
    out = np.empty(npts)
    cdef double[:] o = out
    with nogil:
        for i in range(npts):
            o[i] = _bell(v, pref, p[i, 0], p[i, 1], p[i, 2], p[i, 3])
    return out


def scan_states(n, m, c1, c2):
    cdef const double[:] nn = np.ascontiguousarray(n, dtype=np.float64).ravel()
    cdef const double[:] mm = np.ascontiguousarray(m, dtype=np.float64).ravel()
    cdef const double[:] aa = np.ascontiguousarray(c1, dtype=np.float64).ravel()
    cdef const double[:] bb = np.ascontiguousarray(c2, dtype=np.float64).ravel()
    cdef Py_ssize_t i, count = nn.shape[0]
    out = np.empty((count, len(SCAN_COLUMNS)))
    cdef double[:, :] o = out
    cdef double nm, snm, a1, a2, x, xp, br, det, om, nl, g1, g2
    with nogil:
        for i in range(count):
            nm = nn[i] * mm[i]
            snm = sqrt(nm)
            a1 = fabs(aa[i])
            a2 = fabs(bb[i])
            if a1 >= a2:
                x = a1 / snm
                xp = a2 / snm
            else:
                x = a2 / snm
                xp = a1 / snm
            br = _bracket(x)
            g1 = _gap(nn[i], mm[i], aa[i])
            g2 = _gap(nn[i], mm[i], bb[i])
            det = g1 * g2
            om = (g1 if g1 < g2 else g2) / nm
            if om < 0.0:
                om = 0.0
            nl = br * br / 16.0
            o[i, 0] = 0.25 / sqrt(det) * br
            o[i, 1] = nl
            o[i, 2] = 4.0 * det
            o[i, 3] = 4.0 * det
            o[i, 4] = nn[i] * nn[i] + mm[i] * mm[i] + 2.0 * fabs(aa[i] * bb[i]) - 0.25
            o[i, 5] = _nu(nn[i], mm[i], aa[i], bb[i])
            o[i, 6] = x
            o[i, 7] = xp
            o[i, 8] = nm * (2.0 + 2.0 * x * xp - 1.0 / (4.0 * nm))
            o[i, 9] = 0.25 * (1.0 + x * x)
            if x < 1.0:
                o[i, 10] = (1.0 - 1.0 / (16.0 * nm * nm * om)) - xp * xp
                o[i, 11] = sqrt(om) - 1.0 / (4.0 * nm)
            else:
                o[i, 10] = NAN
                o[i, 11] = NAN
            o[i, 12] = 2.0 - (2.0 + x * x) * sqrt(om)
            o[i, 13] = nl
    return out


def taylor_grid(xs):
    cdef const double[:] xv = np.ascontiguousarray(xs, dtype=np.float64).ravel()
    cdef Py_ssize_t i, count = xv.shape[0]
    out = np.empty((count, len(TAYLOR_COLUMNS)))
    cdef double[:, :] o = out
    cdef double x, b, om
    with nogil:
        for i in range(count):
            x = xv[i]
            b = _bracket(x)
            om = 1.0 - x * x
            if om < 0.0:
                om = 0.0
            o[i, 0] = b * b / 16.0
            o[i, 1] = 0.25 * (1.0 + x * x)
            o[i, 2] = 2.0 - (2.0 + x * x) * sqrt(om)
    return out
