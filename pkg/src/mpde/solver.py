"""Normalized truncated formal solutions of moment Cauchy problems.

Solves ``P(dt, dz) u = f`` with zero initial data, where dt and dz are the
moment derivatives attached to m1 and m2.  The recursion runs level by level
in the t-order on raw coefficients, converting to normalized coordinates
through ratios of moment values, so that float mode stays finite on grids
whose normalized coefficients would overflow.

Two modes:

* ``direct``  - the top lambda coefficient is a constant; the recursion
  solves for the highest t-level directly.
* ``pseudo``  - the top lambda coefficient ``A_n(zeta)`` is a polynomial;
  each ``A_{n-a}/A_n`` is expanded at ``zeta = infinity`` into a polynomial
  part plus an inverse-power tail.  Positive powers shift z-indices up,
  inverse powers shift down with zero padding.  Truncating the tail at the
  internal grid width is exact on the grid.

The internal z-truncation is inflated to ``N2 + N1 * max_b`` so the whole
requested output window is valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import moments
from .charroots import CharPoly, branches_at_infinity
from .errors import PreconditionError, WindowError
from .exact import RationalComplex, as_fraction
from .moments import MomentFunction
from .series import Series2, apply_operator


@dataclass(frozen=True)
class CauchyProblem:
    """Problem data: operator, moment functions, inhomogeneity, truncation.

    ``rhs`` is read as the normalized right-hand side g by default
    (``rhs_is_g``), or as f itself; in the latter case g is reconstructed by
    inverting the top zeta-polynomial with free coefficients set to zero.
    ``rhs_gevrey`` is declared metadata; it never alters coefficients.
    """

    operator: CharPoly
    m1: MomentFunction
    m2: MomentFunction
    rhs: Series2
    out_shape: tuple
    rhs_is_g: bool = True
    rhs_gevrey: tuple = (Fraction(0), Fraction(0))
    mode: str = "direct"

    def __post_init__(self):
        if self.mode not in ("direct", "pseudo"):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "rhs_gevrey",
                           (as_fraction(self.rhs_gevrey[0]),
                            as_fraction(self.rhs_gevrey[1])))
        n1, n2 = self.out_shape
        if n1 < 0 or n2 < 0:
            raise PreconditionError("output truncation must be non-negative")

    @property
    def max_b(self) -> int:
        return max(len(row) - 1 for row in self.operator.coeff_polys if row)

    @property
    def inflated_n2(self) -> int:
        return self.out_shape[1] + self.out_shape[0] * self.max_b


class _Weights:
    """Moment values along one axis, float logs plus exact fractions."""

    def __init__(self, m: MomentFunction, kappa: int, n: int, exact: bool):
        vals = [moments.scaled_eval(m, Fraction(j, kappa)) for j in range(n + 1)]
        self.logs = [v.log for v in vals]
        self.fracs = [v.to_fraction() for v in vals] if exact else None
        self.exact = exact

    def ratio(self, x: int, y: int):
        if self.exact:
            return self.fracs[x] / self.fracs[y]
        return math.exp(self.logs[x] - self.logs[y])


def _zero(exact: bool):
    return RationalComplex(0) if exact else 0j


def g_from_f(p0_coeffs, m2: MomentFunction, f: Series2) -> Series2:
    """Solve ``P0(dz) g = f`` for g with the free z-coefficients set to zero.

    In z-normalized coordinates the recursion runs upward in the z-index,
    with ``G_{j,i} = 0`` for ``i < deg P0``.  Exact in rational mode.
    """
    exact = f.exact
    p = [RationalComplex.coerce(c) if exact else complex(c) for c in p0_coeffs]
    while p and not p[-1]:
        p.pop()
    if not p:
        raise PreconditionError("P0 must not be identically zero")
    deg = len(p) - 1
    J, I = f.valid
    if deg == 0:
        rows = [[f.coeffs[j][i] / p[0] for i in range(I + 1)]
                for j in range(J + 1)]
        return Series2(rows, f.kappa1, f.kappa2, exact)
    w2 = _Weights(m2, f.kappa2, I + deg, exact)
    zero = _zero(exact)
    rows = []
    for j in range(J + 1):
        g = [zero] * (I + deg + 1)
        frow = f.coeffs[j]
        for i in range(I + 1):
            acc = frow[i] * w2.ratio(i, i + deg)
            for b in range(deg):
                if p[b]:
                    acc = acc - p[b] * g[i + b] * w2.ratio(i + b, i + deg)
            g[i + deg] = acc / p[deg]
        rows.append(g)
    return Series2(rows, f.kappa1, f.kappa2, exact)


def _laurent_tail(rem, den, order: int, exact: bool):
    """Coefficients h_1..h_order of ``rem/den`` expanded in powers of 1/zeta.

    ``rem`` has degree < ``deg den``; substituting w = 1/zeta turns the
    quotient into a power series in w with zero constant term, computed by
    series division.
    """
    B = len(den) - 1
    zero = _zero(exact)
    num_w = [zero] * (order + 1)
    for mdeg, c in enumerate(rem):
        t = B - mdeg
        if t <= order:
            num_w[t] = num_w[t] + c
    den_w = [den[B - t] if t <= B else zero for t in range(order + 1)]
    h = [zero] * (order + 1)
    for t in range(order + 1):
        acc = num_w[t]
        for sidx in range(t):
            if h[sidx] and den_w[t - sidx]:
                acc = acc - h[sidx] * den_w[t - sidx]
        h[t] = acc / den_w[0]
    return h[1:]


def formal_solve(prob: CauchyProblem) -> Series2:
    """Truncated formal solution with zero initial data, determined by g.

    Output grid is exactly ``out_shape``; every returned coefficient is
    inside the valid window thanks to the internal z-inflation.
    """
    P = prob.operator
    n = P.n
    exact = prob.rhs.exact
    top = [RationalComplex.coerce(c) if exact else complex(c) for c in P.p0()]
    B = len(top) - 1
    if prob.mode == "direct" and B != 0:
        raise PreconditionError(
            "direct mode requires a constant top lambda coefficient; "
            "use pseudo mode")
    if not top[-1]:
        raise PreconditionError("top lambda coefficient has vanishing leading term")
    N1, N2 = prob.out_shape
    N2i = prob.inflated_n2
    kappa1, kappa2 = prob.rhs.kappa1, prob.rhs.kappa2

    g = prob.rhs if prob.rhs_is_g else g_from_f(top, prob.m2, prob.rhs)
    J_g, I_g = g.valid
    rows_needed = max(N1 - n, -1)
    if J_g < rows_needed or I_g < N2i:
        raise PreconditionError(
            f"insufficient rhs data: need window ({rows_needed}, {N2i}), "
            f"rhs provides ({J_g}, {I_g})")

    w1 = _Weights(prob.m1, kappa1, N1, exact)
    w2 = _Weights(prob.m2, kappa2, N2i + prob.max_b, exact)
    zero = _zero(exact)
    grid = [[zero] * (N2i + 1) for _ in range(N1 + 1)]
    windows = [N2i] * (N1 + 1)

    def coerce(c):
        return RationalComplex.coerce(c) if exact else complex(c)

    if prob.mode == "direct":
        p_top = top[0]
        lower = []  # (a, b, coeff) for lambda powers below n
        for a, row in enumerate(P.coeff_polys[:n]):
            for b, c in enumerate(row):
                if c:
                    lower.append((a, b, coerce(c)))
        g_scale = p_top  # f = P0(dz) g with constant P0
        for j in range(0, N1 - n + 1):
            tgt = j + n
            win = min(I_g, *(windows[j + a] - b for a, b, _ in lower)) \
                if lower else I_g
            win = min(win, N2i)
            windows[tgt] = win
            r1_g = w1.ratio(j, tgt)
            r1 = {a: w1.ratio(j + a, tgt) for a, _, _ in lower}
            row_out = grid[tgt]
            for i in range(win + 1):
                acc = g_scale * g.coeffs[j][i] * r1_g
                for a, b, p in lower:
                    acc = acc - p * grid[j + a][i + b] * r1[a] * w2.ratio(i + b, i)
                row_out[i] = acc / p_top
    else:
        # expansions of -A_{n-a}/A_n at infinity, one per lower lambda power
        actions = []
        for a in range(1, n + 1):
            num = [coerce(c) for c in P.coeff_polys[n - a]]
            if not any(num):
                continue
            quo, rem = _poly_divmod(num, top, exact)
            poly_part = [(b, -c) for b, c in enumerate(quo) if c]
            tail = [-h for h in _laurent_tail(rem, top, N2i, exact)]
            actions.append((a, poly_part, tail))
        for j in range(0, N1 - n + 1):
            tgt = j + n
            win = I_g
            for a, poly_part, _ in actions:
                up = max((b for b, _ in poly_part), default=0)
                win = min(win, windows[tgt - a] - up)
            win = min(win, N2i)
            if win < 0:
                raise WindowError("pseudo-mode recursion ran out of columns")
            windows[tgt] = win
            r1_g = w1.ratio(j, tgt)
            row_out = grid[tgt]
            for i in range(win + 1):
                acc = g.coeffs[j][i] * r1_g
                for a, poly_part, tail in actions:
                    src = grid[tgt - a]
                    r1 = w1.ratio(tgt - a, tgt)
                    for b, c in poly_part:
                        acc = acc + c * src[i + b] * r1 * w2.ratio(i + b, i)
                    for r in range(1, i + 1):
                        c = tail[r - 1]
                        if c:
                            acc = acc + c * src[i - r] * r1 * w2.ratio(i - r, i)
                row_out[i] = acc
    final_window = min(windows[: N1 + 1])
    if final_window < N2:
        raise WindowError(
            f"internal inflation insufficient: reached column {final_window}, "
            f"needed {N2}")
    out_rows = [row[: N2 + 1] for row in grid]
    return Series2(out_rows, kappa1, kappa2, exact)


def _poly_divmod(num, den, exact: bool):
    num = list(num)
    B = len(den) - 1
    if len(num) - 1 < B:
        return [], num
    quo = [_zero(exact)] * (len(num) - B)
    for i in range(len(num) - B - 1, -1, -1):
        factor = num[i + B] / den[B]
        quo[i] = factor
        for jj, d in enumerate(den):
            num[i + jj] = num[i + jj] - factor * d
    while num and not num[-1]:
        num.pop()
    return quo, num


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    scale: float  # largest term magnitude entering the comparison
    window: tuple
    exact_zero: bool
    relative: float


def _safe_float(x) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def _abs_companion(s: Series2) -> Series2:
    rows = [[complex(abs(c)) for c in row] for row in s.coeffs]
    return Series2(rows, s.kappa1, s.kappa2, exact=False, valid=s.valid)


def residual(prob: CauchyProblem, u_hat: Series2) -> ResidualReport:
    """Max-abs residual of ``P u - f`` on the common valid window.

    f is reconstructed as ``P0(dz) g`` by operator application when the
    problem was posed through g.  In exact mode a zero residual is exact;
    in float mode the relative residual is measured against the largest
    term magnitude (operator applied with absolute coefficients to the
    absolute series), the backward-error scale of the cancellation.
    """
    P = prob.operator
    support = P.support()
    lhs = apply_operator(support, prob.m1, prob.m2, u_hat)
    if prob.rhs_is_g:
        p0_table = {(0, b): c for b, c in enumerate(P.p0()) if c}
        f = apply_operator(p0_table, prob.m1, prob.m2, prob.rhs)
    else:
        p0_table = None
        f = prob.rhs
    J = min(lhs.valid[0], f.valid[0])
    I = min(lhs.valid[1], f.valid[1])
    if J < 0 or I < 0:
        raise WindowError("empty comparison window for the residual")
    exact = u_hat.exact and f.exact
    if exact:
        max_abs = Fraction(0)
        scale = Fraction(0)
        for j in range(J + 1):
            for i in range(I + 1):
                d = lhs.coeffs[j][i] - f.coeffs[j][i]
                max_abs = max(max_abs, d.abs1())
                scale = max(scale, f.coeffs[j][i].abs1(),
                            lhs.coeffs[j][i].abs1())
        rel = float(max_abs / scale) if scale > 0 else float(max_abs != 0)
        return ResidualReport(_safe_float(max_abs), _safe_float(scale),
                              (J, I), max_abs == 0, rel)
    abs_table = {k: abs(complex(v)) for k, v in support.items()}
    abs_lhs = apply_operator(abs_table, prob.m1, prob.m2, _abs_companion(u_hat))
    if p0_table is not None:
        abs_p0 = {k: abs(complex(v)) for k, v in p0_table.items()}
        abs_f = apply_operator(abs_p0, prob.m1, prob.m2,
                               _abs_companion(prob.rhs))
    else:
        abs_f = _abs_companion(f)
    max_abs = 0.0
    scale = 0.0
    for j in range(J + 1):
        for i in range(I + 1):
            max_abs = max(max_abs, abs(lhs.coeffs[j][i] - f.coeffs[j][i]))
            scale = max(scale, abs_lhs.coeffs[j][i].real,
                        abs_f.coeffs[j][i].real)
    rel = max_abs / scale if scale > 0.0 else max_abs
    return ResidualReport(max_abs, scale, (J, I), max_abs == 0.0, rel)


@dataclass(frozen=True)
class BranchOrder:
    q: Fraction
    gevrey_t: Fraction


@dataclass(frozen=True)
class OrdersReport:
    per_branch: tuple
    t_order: Fraction
    z_order: Fraction


def theoretical_orders(P_or_branches, s1, s2, st1=0, st2=0) -> OrdersReport:
    """Gevrey order bound per branch: ``max(q+ * (s2 + st2) - s1, st1)``.

    ``q+`` is the positive part of the pole order; the overall t-order is
    the maximum over branches and the z-order is the declared st2.
    """
    if isinstance(P_or_branches, CharPoly):
        branches = branches_at_infinity(P_or_branches)
    else:
        branches = list(P_or_branches)
    s1, s2 = as_fraction(s1), as_fraction(s2)
    st1, st2 = as_fraction(st1), as_fraction(st2)
    per = []
    for b in branches:
        q_plus = b.q if b.q > 0 else Fraction(0)
        per.append(BranchOrder(b.q, max(q_plus * (s2 + st2) - s1, st1)))
    t_order = max((bo.gevrey_t for bo in per), default=st1)
    return OrdersReport(tuple(per), t_order, st2)
