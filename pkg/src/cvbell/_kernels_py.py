"""Pure-Python kernels. Same API and arithmetic as ``_kernels.pyx``.

Everything works on standard-form quadruples (n, m, c1, c2) or on a
precomputed inverse covariance, so the scans never touch 4x4 linear algebra.
"""
import math

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


def ray_bracket(x):
    """1 + t (1+2x)/(1+x) with t = (1/(1+x))^(1/(1+2x)): the maximized bracket."""
    t = math.exp(-math.log1p(x) / (1.0 + 2.0 * x))
    return 1.0 + t * (1.0 + 2.0 * x) / (1.0 + x)


def _split(a):
    t = 134217729.0 * a  # 2^27 + 1
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    """p + e == a * b exactly (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def gap(n, m, c):
    """n m - c^2 without losing the low-order bits of either product."""
    p, e1 = _two_prod(n, m)
    q, e2 = _two_prod(c, c)
    return (p - q) + (e1 - e2)


def det_standard(n, m, c1, c2):
    return gap(n, m, c1) * gap(n, m, c2)


def closed_form(n, m, c1, c2):
    """Return (bmax, a_star, x, c_tilde)."""
    ct = max(abs(c1), abs(c2))
    x = ct / math.sqrt(n * m)
    bmax = 0.25 / math.sqrt(det_standard(n, m, c1, c2)) * ray_bracket(x)
    k = ct * math.sqrt(m / n)
    a_star = (m / (m + k)) ** (-1.0 / (m + 2.0 * k))
    return bmax, a_star, x, ct


def nonlocality_sides(n, m, c1, c2):
    ct = max(abs(c1), abs(c2))
    b = ray_bracket(ct / math.sqrt(n * m))
    return b * b / 16.0, 4.0 * det_standard(n, m, c1, c2)


def simon_sides(n, m, c1, c2):
    return 4.0 * det_standard(n, m, c1, c2), n * n + m * m + 2.0 * abs(c1 * c2) - 0.25


def ppt_nu(n, m, c1, c2):
    """Smallest symplectic eigenvalue of the partial transpose; nan if out of domain."""
    dt = n * n + m * m - 2.0 * c1 * c2
    det = det_standard(n, m, c1, c2)
    # dt^2 - 4 det, factored so that nearly equal modes do not cancel
    disc = ((n - m) * (n + m)) ** 2 + 4.0 * (n * c1 - m * c2) * (m * c1 - n * c2)
    if disc < -1e-12:
        return math.nan
    # nu_-^2 = det / nu_+^2 avoids cancellation for strongly squeezed states
    nu2 = 2.0 * det / (dt + math.sqrt(max(disc, 0.0)))
    return math.sqrt(nu2) if nu2 >= 0 else math.nan


def _quad(v, a, b, c, d):
    return (
        v[0][0] * a * a + v[1][1] * b * b + v[2][2] * c * c + v[3][3] * d * d
        + 2.0 * (v[0][1] * a * b + v[0][2] * a * c + v[0][3] * a * d
                 + v[1][2] * b * c + v[1][3] * b * d + v[2][3] * c * d)
    )


def bell_point(vinv, pref, qi, pi, qs, ps):
    """pref * [1 + exp(-q_I0/2) + exp(-q_0S/2) - exp(-q_IS/2)] with q the V^-1 quadratic forms."""
    v = vinv.tolist() if hasattr(vinv, "tolist") else vinv
    e_i = v[0][0] * qi * qi + 2.0 * v[0][1] * qi * pi + v[1][1] * pi * pi
    e_s = v[2][2] * qs * qs + 2.0 * v[2][3] * qs * ps + v[3][3] * ps * ps
    e_is = _quad(v, qi, pi, qs, ps)
    return pref * (1.0 + math.exp(-0.5 * e_i) + math.exp(-0.5 * e_s) - math.exp(-0.5 * e_is))


def bell_points(vinv, pref, pts):
    v = np.asarray(vinv, dtype=float).tolist()
    rows = np.asarray(pts, dtype=float).tolist()
    return np.array([bell_point(v, pref, *r) for r in rows])


def _chain_row(n, m, c1, c2):
    nm = n * m
    snm = math.sqrt(nm)
    a1, a2 = abs(c1), abs(c2)
    x = max(a1, a2) / snm
    xp = min(a1, a2) / snm
    bracket = ray_bracket(x)
    g1, g2 = gap(n, m, c1), gap(n, m, c2)
    det = g1 * g2
    # 1 - x^2 = (nm - c_tilde^2) / nm, taken from the accurate gap
    one_minus = max(min(g1, g2) / nm, 0.0)
    if x < 1.0:
        eq14a = (1.0 - 1.0 / (16.0 * nm * nm * one_minus)) - xp * xp
        eq14b = math.sqrt(one_minus) - 1.0 / (4.0 * nm)
    else:
        eq14a = math.nan
        eq14b = math.nan
    nl_lhs = bracket * bracket / 16.0
    return (
        0.25 / math.sqrt(det) * bracket,
        nl_lhs,
        4.0 * det,
        4.0 * det,
        n * n + m * m + 2.0 * abs(c1 * c2) - 0.25,
        ppt_nu(n, m, c1, c2),
        x,
        xp,
        nm * (2.0 + 2.0 * x * xp - 1.0 / (4.0 * nm)),
        0.25 * (1.0 + x * x),
        eq14a,
        eq14b,
        2.0 - (2.0 + x * x) * math.sqrt(one_minus),
        nl_lhs,
    )


def scan_states(n, m, c1, c2):
    """Evaluate every per-state quantity of the theorem scan; columns per SCAN_COLUMNS."""
    cols = [np.asarray(a, dtype=float).tolist() for a in (n, m, c1, c2)]
    out = [_chain_row(*row) for row in zip(*cols)]
    return np.array(out, dtype=float).reshape(len(out), len(SCAN_COLUMNS))


def taylor_grid(xs):
    out = []
    for x in np.asarray(xs, dtype=float).tolist():
        b = ray_bracket(x)
        out.append((b * b / 16.0, 0.25 * (1.0 + x * x),
                    2.0 - (2.0 + x * x) * math.sqrt(max(1.0 - x * x, 0.0))))
    return np.array(out, dtype=float).reshape(len(out), len(TAYLOR_COLUMNS))
