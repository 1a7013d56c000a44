"""Characteristic-root branch data at zeta = infinity.

For a polynomial ``P(lambda, zeta) = sum A_i(zeta) lambda^i`` the root
branches behave like ``lambda ~ lambda0 * zeta**q`` as ``zeta -> infinity``.
The pole orders q are the negated slopes of the upper convex hull of the
points ``(i, deg A_i)`` and the leading terms are the nonzero roots of the
edge polynomials, one per hull edge.  Multiplicities are extracted exactly
(square-free decomposition over the Gaussian rationals) when the input is
exact, by root clustering otherwise.

Only first-order data (q, lambda0, multiplicity) is computed.  A repeated
edge root means the class may split at deeper expansion orders; it is
reported with ``resolved=False`` instead of recursing.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, EvaluationError, PreconditionError
from .exact import RationalComplex

# -- dense polynomial helpers over an exact field (coefficients low -> high) --


def _trim(p):
    last = -1
    for idx, c in enumerate(p):
        if c:
            last = idx
    return p[: last + 1]


def _deg(p):
    return len(p) - 1


def _deriv(p):
    return [p[i] * i for i in range(1, len(p))]


def _divmod(num, den):
    num = list(num)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    q = [RationalComplex(0)] * max(len(num) - len(den) + 1, 0)
    inv_lead = RationalComplex(1) / den[-1]
    for i in range(len(num) - len(den), -1, -1):
        factor = num[i + len(den) - 1] * inv_lead
        q[i] = factor
        for jj, d in enumerate(den):
            num[i + jj] = num[i + jj] - factor * d
    return _trim(q), _trim(num)


def _gcd(a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if not a:
        return []
    inv = RationalComplex(1) / a[-1]
    return [c * inv for c in a]


def _squarefree_parts(p):
    """Yun decomposition: list of (multiplicity, monic square-free factor)."""
    p = _trim(list(p))
    dp = _deriv(p)
    g = _gcd(p, dp)
    if _deg(g) <= 0:
        inv = RationalComplex(1) / p[-1]
        return [(1, [c * inv for c in p])]
    c, _ = _divmod(p, g)
    d_quot, _ = _divmod(dp, g)
    d = _trim([x - y for x, y in
               zip(d_quot + [RationalComplex(0)] * len(c), _deriv(c) + [RationalComplex(0)] * len(c))])
    parts = []
    mult = 1
    while _deg(c) > 0:
        f = _gcd(c, d)
        if _deg(f) > 0:
            parts.append((mult, f))
        c, _ = _divmod(c, f if f else [RationalComplex(1)])
        d_quot, _ = _divmod(d, f if f else [RationalComplex(1)])
        pad = max(len(d_quot), len(c))
        dc = _deriv(c)
        d = _trim([(d_quot[i] if i < len(d_quot) else RationalComplex(0))
                   - (dc[i] if i < len(dc) else RationalComplex(0))
                   for i in range(pad)])
        mult += 1
    return parts


# -- public types --------------------------------------------------------------


@dataclass(frozen=True)
class CharPoly:
    """``P(lambda, zeta)`` stored by lambda power.

    ``coeff_polys[i]`` is the zeta-polynomial multiplying ``lambda**i``
    (coefficients low to high, trailing zeros trimmed, empty tuple for an
    absent power).  The top power must be present and the lambda degree at
    least 1.
    """

    coeff_polys: tuple
    exact: bool = True

    def __post_init__(self):
        rows = [_trim(list(row)) for row in self.coeff_polys]
        while rows and not rows[-1]:
            rows.pop()
        if len(rows) <= 1:
            raise PreconditionError("operator must have lambda-degree >= 1")
        object.__setattr__(self, "coeff_polys", tuple(tuple(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.coeff_polys) - 1

    @classmethod
    def from_table(cls, table, exact: bool = True) -> "CharPoly":
        """Build from a sparse ``{(lambda_pow, zeta_pow): coeff}`` mapping."""
        if not table:
            raise PreconditionError("empty operator support")
        n = max(a for a, _ in table)
        rows = [[] for _ in range(n + 1)]
        zero = RationalComplex(0) if exact else 0j
        for (a, b), c in table.items():
            row = rows[a]
            while len(row) <= b:
                row.append(zero)
            coerced = RationalComplex.coerce(c) if exact else complex(c)
            row[b] = row[b] + coerced
        return cls(tuple(tuple(r) for r in rows), exact=exact)

    def support(self) -> dict:
        out = {}
        for a, row in enumerate(self.coeff_polys):
            for b, c in enumerate(row):
                if c:
                    out[(a, b)] = c
        return out

    def p0(self):
        """Coefficient polynomial of the top lambda power (zeta coeffs)."""
        return self.coeff_polys[self.n]

    def lambda_coeffs_at(self, zeta0: complex):
        """Coefficients (high lambda power first) of ``P(., zeta0)``."""
        vals = []
        for row in self.coeff_polys[::-1]:
            acc = 0j
            for c in reversed(row):
                acc = acc * zeta0 + complex(c)
            vals.append(acc)
        return vals


@dataclass(frozen=True)
class CharBranch:
    """One branch class: all roots growing like ``lambda0 * zeta**q``.

    ``leading_terms`` enumerates every determination (one leading coefficient
    per sheet of ``zeta**(1/kappa)``) with its edge-root multiplicity.
    """

    q: Fraction
    leading_terms: tuple
    kappa: int
    resolved: bool = True

    @property
    def multiplicity(self) -> int:
        return sum(m for _, m in self.leading_terms)


def _cluster_roots(roots, rel_tol=1e-6):
    """Greedy clustering of numpy roots into (value, multiplicity) pairs."""
    items = sorted(roots, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    clusters = []
    for z in items:
        for cl in clusters:
            center = cl[0] / cl[1]
            if abs(z - center) <= rel_tol * max(1.0, abs(center)):
                cl[0] += z
                cl[1] += 1
                break
        else:
            clusters.append([z, 1])
    return [(cl[0] / cl[1], cl[1]) for cl in clusters]


def _edge_roots(edge_coeffs, exact):
    """Nonzero roots with multiplicities of an edge polynomial."""
    if exact:
        out = []
        for mult, part in _squarefree_parts(list(edge_coeffs)):
            if _deg(part) == 0:
                continue
            arr = np.array([complex(c) for c in reversed(part)])
            for r in np.roots(arr):
                out.append((complex(r), mult))
        return out
    arr = np.array([complex(c) for c in reversed(edge_coeffs)])
    return _cluster_roots(list(np.roots(arr)))


def branches_at_infinity(P: CharPoly) -> list:
    """Branch classes (q, leading terms, ramification) sorted by decreasing q.

    The upper convex hull of the points ``(i, deg A_i)`` is walked from the
    top lambda power leftwards; each edge of slope ``-q`` contributes one
    class whose leading terms are the nonzero roots of the edge polynomial
    ``E(w) = sum lc(A_i) w**(i - i_low)`` over the lattice points on the edge.
    """
    pts = []
    for i, row in enumerate(P.coeff_polys):
        if row:
            pts.append((i, len(row) - 1))
    if not pts:
        raise PreconditionError("all coefficient polynomials are zero")
    if pts[0][0] != 0:
        raise PreconditionError(
            "operator is divisible by the t-derivative: the identically zero "
            "characteristic root has no pole order; factor it out first")
    # upper convex hull, points already sorted by i
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    branches = []
    for (i1, d1), (i2, d2) in zip(hull, hull[1:]):
        q = Fraction(d1 - d2, i2 - i1)
        slope = Fraction(d2 - d1, i2 - i1)
        edge = []
        for i in range(i1, i2 + 1):
            row = P.coeff_polys[i]
            if row and Fraction(len(row) - 1) == Fraction(d1) + slope * (i - i1):
                while len(edge) <= i - i1:
                    edge.append(RationalComplex(0) if P.exact else 0j)
                edge[i - i1] = row[-1]
        while len(edge) < i2 - i1 + 1:
            edge.append(RationalComplex(0) if P.exact else 0j)
        terms = _edge_roots(edge, P.exact)
        terms.sort(key=lambda t: (t[0].real, t[0].imag))
        branches.append(CharBranch(
            q=q,
            leading_terms=tuple(terms),
            kappa=q.denominator,
            resolved=all(m == 1 for _, m in terms),
        ))
    branches.sort(key=lambda b: b.q, reverse=True)
    return branches


# -- numerical validation -------------------------------------------------------


@dataclass(frozen=True)
class BranchValidation:
    q: Fraction
    deviations: tuple  # max relative deviation per radius (None if no root landed)
    monotone: bool


@dataclass(frozen=True)
class ValidationReport:
    radii: tuple
    ray_angle: float
    branches: tuple
    unassigned: int

    @property
    def consistent(self) -> bool:
        return self.unassigned == 0 and all(b.monotone for b in self.branches)


def validate_numeric(P: CharPoly, branches, radii, ray_angle: float = 0.0
                     ) -> ValidationReport:
    """Check branch data against numerically computed roots.

    At each radius R the polynomial ``P(., R*e^{i*ray})`` is solved with the
    companion-matrix root finder; every root is assigned to the (branch,
    leading term) minimizing ``|lambda / zeta0**q - lambda0|`` and the
    per-branch maximum relative deviation is recorded.  Deviations should be
    non-increasing in R (10% jitter near machine precision is tolerated).
    """
    radii = tuple(float(R) for R in radii)
    if any(R <= 0 for R in radii):
        raise DomainError("radii must be positive")
    per_branch = [[None] * len(radii) for _ in branches]
    unassigned = 0
    for ridx, R in enumerate(sorted(radii)):
        zeta0 = R * cmath.exp(1j * ray_angle)
        coeffs = P.lambda_coeffs_at(zeta0)
        if not coeffs or coeffs[0] == 0:
            raise EvaluationError(
                f"leading lambda coefficient vanishes at |zeta| = {R}")
        try:
            roots = np.roots(np.array(coeffs, dtype=complex))
        except Exception as exc:  # pragma: no cover - numpy failure path
            raise EvaluationError(f"root finder failed at |zeta| = {R}: {exc}")
        powers = {b.q: zeta0 ** float(b.q) for b in branches}
        for lam in roots:
            best = None
            for bidx, br in enumerate(branches):
                scaled = complex(lam) / powers[br.q]
                for lam0, _ in br.leading_terms:
                    dev = abs(scaled - lam0)
                    if best is None or dev < best[0]:
                        best = (dev, bidx, abs(lam0))
            if best is None or best[0] > 0.5:
                unassigned += 1
                continue
            rel = best[0] / best[2]
            cur = per_branch[best[1]][ridx]
            per_branch[best[1]][ridx] = rel if cur is None else max(cur, rel)
    reports = []
    for br, devs in zip(branches, per_branch):
        seq = [d for d in devs if d is not None]
        monotone = all(
            later <= earlier * 1.1 + 1e-12
            for earlier, later in zip(seq, seq[1:])
        )
        reports.append(BranchValidation(br.q, tuple(devs), monotone))
    return ValidationReport(tuple(sorted(radii)), float(ray_angle),
                            tuple(reports), unassigned)
