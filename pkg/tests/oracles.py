"""Independent reference implementations used as test oracles.

Everything here is hand-rolled (explicit 2x2 complex arithmetic, direct
summation) so that agreement with the library is evidence, not tautology.
"""

import cmath
import math


def matmul2(u, v):
    """Explicit 2x2 complex matrix product."""
    return [
        [u[0][0] * v[0][0] + u[0][1] * v[1][0], u[0][0] * v[0][1] + u[0][1] * v[1][1]],
        [u[1][0] * v[0][0] + u[1][1] * v[1][0], u[1][0] * v[0][1] + u[1][1] * v[1][1]],
    ]


def rz_oracle(a):
    return [[cmath.exp(-1j * a / 2), 0.0], [0.0, cmath.exp(1j * a / 2)]]


def ry_oracle(a):
    return [
        [math.cos(a / 2), -math.sin(a / 2)],
        [math.sin(a / 2), math.cos(a / 2)],
    ]


def rx_oracle(a):
    return [
        [math.cos(a / 2), -1j * math.sin(a / 2)],
        [-1j * math.sin(a / 2), math.cos(a / 2)],
    ]


def rot_oracle(t1, t2, t3):
    return matmul2(rz_oracle(t3), matmul2(ry_oracle(t2), rz_oracle(t1)))


def eval_circuit_oracle(layers, angles, x):
    """Full circuit evaluation through explicit matrix products."""
    u = [[1.0, 0.0], [0.0, 1.0]]
    for layer in range(layers):
        u = matmul2(rx_oracle(x), matmul2(rot_oracle(*angles[layer]), u))
    u = matmul2(rot_oracle(*angles[layers]), u)
    return abs(u[0][0]) ** 2


def binomial_pmf(n, k, p):
    """Exact binomial mass via integer combinatorics."""
    return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


def series_eval_oracle(c0, a, b, x):
    """Direct-summation series evaluation."""
    total = c0
    for k in range(len(a)):
        w = k + 1
        total += a[k] * math.cos(w * x) + b[k] * math.sin(w * x)
    return total
