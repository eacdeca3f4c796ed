"""Classical-formula oracle for the level shadows of the odd dihedral
towers (test-only; independent of the braid machinery).

For an odd prime power N >= 5 the relevant curve data is:
  index       mu = N^2/2 * prod_{q | N} (1 - 1/q^2)
  cusps       for each divisor d of N: phi(d) phi(N/d) / 2 cusps of width N/d
  genus       1 + mu/12 - (number of cusps)/2   (no elliptic points)
and the level is connected (one component).
"""

from __future__ import annotations

from math import gcd


def _phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def shadow(N: int) -> dict:
    assert N >= 5 and N % 2 == 1
    mu = N * N
    for q in _prime_divisors(N):
        mu = mu * (q * q - 1) // (q * q)
    mu //= 2
    widths = []
    d = 1
    while d <= N:
        if N % d == 0:
            cnt = _phi(d) * _phi(N // d)
            assert cnt % 2 == 0
            widths.extend([N // d] * (cnt // 2))
        d += 1
    nu = len(widths)
    num = 12 + mu - 6 * nu
    assert num % 12 == 0, "non-integral genus from the classical formulas"
    genus = num // 12
    return {
        "components": 1,
        "index": mu,
        "cusp_widths": sorted(widths),
        "genus": genus,
    }
