"""Reference boundary of the Fig. 1 double integrator, written independently
of the library: the two parabolic arcs evaluated in exact rational arithmetic
from the closed-form double-integrator parameterization.

Usage: python3 fig1_boundary.py GRID > fig1_boundary.csv
"""

import sys
from fractions import Fraction as F

X0 = (F(0.05), F(0.05))
ALPHA, BETA = F(-1), F(1)
T = F(2.1)


def point(sign, s):
    mu = (BETA - ALPHA) / 2
    nu = (BETA + ALPHA) / 2
    x1 = X0[0] + T * X0[1] + nu * T**2 / 2 + sign * mu * (s**2 - T**2 / 2)
    x2 = X0[1] + nu * T + sign * mu * (2 * s - T)
    return x1, x2


def main():
    n = int(sys.argv[1])
    t = float(T)
    print("block,sheet,s1,x1,x2")
    for sign in (1, -1):
        for i in range(n):
            s = t if i == n - 1 else (t * i / (n - 1) if n > 1 else 0.0)
            x1, x2 = point(sign, F(s))
            print(f"0,{sign},{s!r},{float(x1)!r},{float(x2)!r}")


if __name__ == "__main__":
    main()
