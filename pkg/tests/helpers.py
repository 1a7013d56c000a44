"""Shared builders for randomized test corpora (all deterministic seeds)."""

import random
from fractions import Fraction

from mpde.exact import RationalComplex
from mpde.series import Series1, Series2


def random_series1(rng: random.Random, n: int, kappa: int = 1,
                   exact: bool = False) -> Series1:
    if exact:
        coeffs = [RationalComplex(Fraction(rng.randint(-9, 9), rng.randint(1, 7)),
                                  Fraction(rng.randint(-9, 9), rng.randint(1, 7)))
                  for _ in range(n + 1)]
    else:
        coeffs = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                  for _ in range(n + 1)]
    return Series1(coeffs, kappa=kappa, exact=exact)


def random_series2(rng: random.Random, n1: int, n2: int,
                   exact: bool = False) -> Series2:
    if exact:
        rows = [[RationalComplex(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                                 Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
                 for _ in range(n2 + 1)] for _ in range(n1 + 1)]
    else:
        rows = [[complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                 for _ in range(n2 + 1)] for _ in range(n1 + 1)]
    return Series2(rows, exact=exact)


def table_mul(t1: dict, t2: dict) -> dict:
    out = {}
    for (a1, b1), v1 in t1.items():
        for (a2, b2), v2 in t2.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, 0) + v1 * v2
    return {k: v for k, v in out.items() if v}


def random_factor_product(rng: random.Random, n_factors: int,
                          max_power: int = 3) -> tuple:
    """Product of (lambda - c * zeta^p) factors; returns (table, [(c, p)])."""
    table = {(0, 0): Fraction(1)}
    factors = []
    for _ in range(n_factors):
        c = Fraction(rng.choice([x for x in range(-4, 5) if x]))
        p = rng.randint(0, max_power)
        factors.append((c, p))
        table = table_mul(table, {(1, 0): Fraction(1), (0, p): -c})
    return table, factors


def series1_close(a: Series1, b: Series1, tol: float = 1e-12) -> bool:
    if len(a.coeffs) != len(b.coeffs):
        return False
    scale = max([abs(complex(c)) for c in a.coeffs] + [1.0])
    return all(abs(complex(x) - complex(y)) <= tol * scale
               for x, y in zip(a.coeffs, b.coeffs))
