"""Integer q-expansions of eta products and their Hecke structure.

Each factor prod_n (1 - q^(dn)) is expanded with Euler's pentagonal number
theorem, which makes it a sparse series with +-1 coefficients; products are
formed by shifted additions against these sparse series.  Arithmetic is in
int64 and every addition is bounds-checked beforehand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, lcm

import numpy as np

from .arith import is_prime

INT64_MAX = np.iinfo(np.int64).max

F_SPEC = ((1, 2), (2, 2), (3, 2), (6, 2))


class CoefficientOverflowError(OverflowError):
    pass


@dataclass
class QExpansion:
    """Coefficients of sum a_n q^n; ``coeffs[n]`` is a_n for 0 <= n <= N."""

    coeffs: np.ndarray
    level: int = 6
    weight: int = 4
    label: str = ""

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        if not 0 <= n <= self.N:
            raise IndexError(f"a_{n} is beyond the truncation N={self.N}")
        return int(self.coeffs[n])

    def tolist(self) -> list[int]:
        """a_1, ..., a_N as Python ints."""
        return [int(c) for c in self.coeffs[1:]]


@dataclass(frozen=True)
class EulerFactor:
    """Reciprocal local polynomial: (1, -a_p, p^3) when good, (1, p) when bad."""

    p: int
    kind: str
    coeffs: tuple


def pentagonal_terms(d: int, N: int) -> list[tuple[int, int]]:
    """Sparse (exponent, sign) terms of prod_{n>=1} (1 - q^(dn)) up to q^N."""
    terms = [(0, 1)]
    k = 1
    while True:
        e1 = d * k * (3 * k - 1) // 2
        if e1 > N:
            break
        sign = -1 if k % 2 else 1
        terms.append((e1, sign))
        e2 = d * k * (3 * k + 1) // 2
        if e2 <= N:
            terms.append((e2, sign))
        k += 1
    return sorted(terms)


def _mul_sparse(dense: np.ndarray, terms, N: int) -> np.ndarray:
    out = np.zeros(N + 1, dtype=np.int64)
    step = int(np.abs(dense).max()) if dense.size else 0
    for shift, sign in terms:
        if shift > N:
            break
        if int(np.abs(out).max()) + step > INT64_MAX:
            raise CoefficientOverflowError(
                f"coefficient exceeds 64-bit range while expanding to q^{N}")
        if sign > 0:
            out[shift:] += dense[: N + 1 - shift]
        else:
            out[shift:] -= dense[: N + 1 - shift]
    return out


def eta_factor_series(d: int, e: int, N: int) -> np.ndarray:
    """Dense coefficients of prod_n (1 - q^(dn))^e through q^N (no q-shift)."""
    if d < 1 or e < 0:
        raise ValueError("need d >= 1 and e >= 0")
    series = np.zeros(N + 1, dtype=np.int64)
    series[0] = 1
    terms = pentagonal_terms(d, N)
    for _ in range(e):
        series = _mul_sparse(series, terms, N)
    return series


def truncated_mul(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """Dense product of two series truncated at q^N, with overflow detection."""
    bound = np.convolve(np.abs(a[: N + 1]).astype(float), np.abs(b[: N + 1]).astype(float))
    if bound.size and bound[: N + 1].max() >= 2.0**62:
        raise CoefficientOverflowError("product may exceed 64-bit range")
    return np.convolve(a[: N + 1], b[: N + 1])[: N + 1].astype(np.int64)


def eta_product_coeffs(spec, N: int, level: int | None = None, label: str = "") -> QExpansion:
    """Expand prod_d eta(q^d)^e_d through q^N.

    ``spec`` is a sequence of (d, e) pairs with positive exponents; the
    leading exponent sum(d*e)/24 must be a positive integer.
    """
    spec = [(int(d), int(e)) for d, e in spec]
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    if not spec or any(d < 1 or e < 1 for d, e in spec):
        raise ValueError("eta product needs positive scales and exponents")
    lead, rem = divmod(sum(d * e for d, e in spec), 24)
    if rem:
        raise ValueError(f"leading power {sum(d * e for d, e in spec)}/24 is not an integer")
    coeffs = np.zeros(N + 1, dtype=np.int64)
    if lead <= N:
        M = N - lead
        series = np.zeros(M + 1, dtype=np.int64)
        series[0] = 1
        for d, e in spec:
            terms = pentagonal_terms(d, M)
            for _ in range(e):
                series = _mul_sparse(series, terms, M)
        coeffs[lead:] = series
    weight, odd = divmod(sum(e for _, e in spec), 2)
    return QExpansion(
        coeffs=coeffs,
        level=level if level is not None else lcm(*(d for d, _ in spec)),
        weight=weight if not odd else sum(e for _, e in spec) / 2,
        label=label or "*".join(f"eta({d})^{e}" for d, e in spec),
    )


def f_coefficients(N: int) -> QExpansion:
    """The weight 4 level 6 newform (eta(q) eta(q^2) eta(q^3) eta(q^6))^2."""
    return eta_product_coeffs(F_SPEC, N, level=6, label="6.4.a.a")


# ---------------------------------------------------------------------------
# Hecke structure


@dataclass
class CheckReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, ok: bool, what: str):
        self.checked += 1
        if not ok:
            self.violations.append(what)


def hecke_check(q: QExpansion, N: int | None = None) -> CheckReport:
    """Check multiplicativity and the prime-power recursions through a_N.

    For p not dividing the level: a_{p^(r+1)} = a_p a_{p^r} - p^(k-1) a_{p^(r-1)}.
    For p dividing the level: a_{p^r} = a_p^r.
    """
    N = q.N if N is None else min(N, q.N)
    a = [int(c) for c in q.coeffs[: N + 1]]
    rep = CheckReport()
    rep.record(a[1] == 1, f"a_1 = {a[1]} != 1")
    for m in range(2, N + 1):
        for n in range(m + 1, N // m + 1):
            if gcd(m, n) == 1:
                rep.record(a[m * n] == a[m] * a[n],
                           f"a_{m * n} = {a[m * n]} != a_{m} a_{n} = {a[m] * a[n]}")
    k1 = int(q.weight) - 1
    for p in range(2, N + 1):
        if not is_prime(p):
            continue
        bad = q.level % p == 0
        pr_prev, pr = 1, p  # p^(r-1), p^r
        while pr * p <= N:
            nxt = pr * p
            if bad:
                want = a[p] * a[pr]
            else:
                want = a[p] * a[pr] - p**k1 * a[pr_prev]
            rep.record(a[nxt] == want, f"a_{nxt} = {a[nxt]} != {want} (recursion at p={p})")
            pr_prev, pr = pr, nxt
    return rep


def euler_factor(p: int, q: QExpansion) -> EulerFactor:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > q.N:
        raise IndexError(f"a_{p} is beyond the truncation N={q.N}")
    if q.level % p == 0:
        # a_p = -p at the bad primes of this form; the factor is 1 - a_p T.
        return EulerFactor(p, "bad", (1, -q[p]))
    return EulerFactor(p, "good", (1, -q[p], p ** (int(q.weight) - 1)))


def deligne_bound_check(q: QExpansion) -> CheckReport:
    """a_p^2 <= 4 p^(k-1) for every prime p not dividing the level."""
    rep = CheckReport()
    k1 = int(q.weight) - 1
    for p in range(2, q.N + 1):
        if is_prime(p) and q.level % p:
            rep.record(q[p] ** 2 <= 4 * p**k1, f"|a_{p}| = {abs(q[p])} exceeds 2 p^{k1}/2")
    return rep
