#!/usr/bin/env python3
"""Checks the Runge-Kutta order conditions of every tableau in a directory.

For each rooted tree t with |t| <= order the elementary weight b . u(t) must
equal 1 / gamma(t). Arithmetic runs at 60 digits; a tableau passes when every
residual is at most 1e-20.
"""

import argparse
import pathlib
import sys
from functools import lru_cache

import mpmath

mpmath.mp.dps = 60
TOLERANCE = mpmath.mpf("1e-20")


def parse(path):
    order = stages = None
    a, b, c = {}, None, None
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, *rest = line.split()
        if key == "order":
            order = int(rest[0])
        elif key == "stages":
            stages = int(rest[0])
        elif key == "c":
            c = [mpmath.mpf(x) for x in rest]
        elif key == "b":
            b = [mpmath.mpf(x) for x in rest]
        elif key == "a":
            a[int(rest[0])] = [mpmath.mpf(x) for x in rest[1:]]
        else:
            raise ValueError(f"{path.name}: unknown key {key!r}")
    matrix = [[mpmath.mpf(0)] * stages for _ in range(stages)]
    for i, row in a.items():
        matrix[i][: len(row)] = row
    return order, matrix, b, c


@lru_cache(maxsize=None)
def trees(n):
    """Rooted trees with n vertices, each a sorted tuple of child trees."""
    if n == 1:
        return [()]
    out = set()
    for children in forests(n - 1, n - 1):
        out.add(tuple(sorted(children)))
    return sorted(out)


@lru_cache(maxsize=None)
def forests(n, largest):
    """Multisets of trees with n vertices in total, none above `largest`."""
    if n == 0:
        return [()]
    out = []
    for size in range(min(n, largest), 0, -1):
        for t in trees(size):
            for rest in forests(n - size, size):
                if all(size > size_of(r) or (size == size_of(r) and t >= r) for r in rest):
                    out.append((t,) + rest)
    return out


def size_of(t):
    return 1 + sum(size_of(child) for child in t)


def gamma(t):
    g = size_of(t)
    for child in t:
        g *= gamma(child)
    return g


def weights(t, matrix):
    s = len(matrix)
    u = [mpmath.mpf(1)] * s
    for child in t:
        v = weights(child, matrix)
        av = [mpmath.fsum(matrix[i][j] * v[j] for j in range(s)) for i in range(s)]
        u = [u[i] * av[i] for i in range(s)]
    return u


def check(path):
    order, matrix, b, c = parse(path)
    worst = mpmath.mpf(0)
    count = 0
    for i, row in enumerate(matrix):
        worst = max(worst, abs(mpmath.fsum(row) - c[i]))
    for n in range(1, order + 1):
        for t in trees(n):
            residual = abs(mpmath.fsum(bi * ui for bi, ui in zip(b, weights(t, matrix))) - mpmath.mpf(1) / gamma(t))
            worst = max(worst, residual)
            count += 1
    return order, count, worst


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("directory", type=pathlib.Path)
    args = parser.parse_args()
    failed = False
    files = sorted(args.directory.glob("*.tab"))
    if not files:
        print(f"no tableau files in {args.directory}")
        return 1
    for path in files:
        order, count, worst = check(path)
        ok = worst <= TOLERANCE
        failed |= not ok
        print(f"{path.name}: order {order}, {count} conditions, max residual {mpmath.nstr(worst, 3)}"
              f" {'PASS' if ok else 'FAIL'}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
