"""Point counts on the Barth-Nieto quintic, its double cover and their strata.

The quintic N lives in the hyperplane x0 + ... + x5 = 0 of P5 and is cut out
by sigma5(x) = 0.  U is the open part where every coordinate is nonzero; on U
the second equation is sum(1/x_i) = 0.  Counts of the smooth models Y and
Ytilde are obtained from #U and #Utilde by closed-form stratum corrections.

Counting kernels are pure functions of the field.  They partition the work
over the first free coordinate and add the partial counts, so the totals do
not depend on the number of threads or slices.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from itertools import combinations

import numpy as np

from .arith import PrimeField

# Rough number of array elements handled per slice of the O(p^3) kernel.
_SLICE_ELEMENTS = 1 << 21


class BadPrimeError(ValueError):
    """Raised for p in {2, 3}, where the varieties have bad reduction."""


def _check_good(fld: PrimeField) -> int:
    p = fld.p
    if p < 5:
        raise BadPrimeError(f"bad prime {p}: good reduction requires p >= 5")
    return p


# ---------------------------------------------------------------------------
# Points


@dataclass(frozen=True)
class NPoint:
    """A point (x0 : ... : x5) of the hyperplane sum(x) = 0 in P5.

    Library functions return points normalized so that the first nonzero
    coordinate is 1; use ``normalize`` to compare points projectively.
    """

    coords: tuple

    def __post_init__(self):
        if len(self.coords) != 6:
            raise ValueError("an NPoint has six coordinates")

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def normalize(coords, fld) -> NPoint:
    """Scale ``coords`` so the first nonzero entry becomes 1."""
    vals = [fld.reduce(c) for c in coords]
    for c in vals:
        if not fld.is_zero(c):
            s = fld.inv(c)
            break
    else:
        raise ValueError("the zero vector is not a projective point")
    if fld.p:
        return NPoint(tuple(v * s % fld.p for v in vals))
    return NPoint(tuple(v * s for v in vals))


def sigma5(coords, fld):
    """Sum of the six products of five coordinates."""
    xs = [fld.reduce(c) for c in coords]
    total = 0
    for i in range(6):
        prod = 1
        for j, x in enumerate(xs):
            if j != i:
                prod = prod * x
        total += prod
    return fld.reduce(total)


def on_N(coords, fld) -> bool:
    return fld.is_zero(sum(fld.reduce(c) for c in coords)) and fld.is_zero(sigma5(coords, fld))


def on_U(coords, fld) -> bool:
    return all(not fld.is_zero(c) for c in coords) and on_N(coords, fld)


# ---------------------------------------------------------------------------
# Records


@dataclass
class CountRecord:
    p: int
    n_U: int
    n_U_square: int
    n_Utilde: int
    n_Y: int
    n_Ytilde: int
    t3: int
    method: str = "fast"
    ytilde_branch: str = "proved"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StratumBreakdown:
    segre: int
    r0: int
    l0: int
    cubics: int
    u: int

    @property
    def boundary(self) -> int:
        return self.segre + self.r0 + self.l0 + self.cubics

    @property
    def total(self) -> int:
        return self.boundary + self.u


# ---------------------------------------------------------------------------
# The O(p^3) kernel for U
#
# With x5 = 1 and x0, x1, x2 fixed, the pair (x3, x4) has sum S and
# reciprocal sum R.  If S = R = 0 every x3 != 0 works with x4 = -x3; if
# exactly one vanishes there is no solution; otherwise x3, x4 are the roots
# of T^2 - S T + S/R, giving 1 + chi(S^2 - 4S/R) ordered pairs.


def _u_slice(fld: PrimeField, x0_vals: np.ndarray) -> tuple[int, int]:
    p = fld.p
    inv, chi = fld.inv_table, fld.chi_table
    rest = np.arange(1, p, dtype=np.int64)
    x0, x1, x2 = np.meshgrid(x0_vals, rest, rest, indexing="ij", copy=False)
    S = -(1 + x0 + x1 + x2) % p
    R = -(1 + inv[x0] + inv[x1] + inv[x2]) % p
    both = (S == 0) & (R == 0)
    generic = (S != 0) & (R != 0)
    prod34 = S * inv[R] % p
    disc = (S * S - 4 * prod34) % p
    pairs = np.where(generic, 1 + chi[disc], 0)
    x012 = x0 * x1 % p * x2 % p
    square = chi[x012 * prod34 % p] == 1
    n_both = int(both.sum())
    n = int(pairs.sum()) + n_both * (p - 1)
    # In the degenerate case x3*x4 = -x3^2, so the class is that of -x0*x1*x2.
    n_sq = int(pairs[square].sum())
    n_sq += int((both & (chi[-x012 % p] == 1)).sum()) * (p - 1)
    return n, n_sq


def _partition(p: int, slices: int | None) -> list[np.ndarray]:
    vals = np.arange(1, p, dtype=np.int64)
    if slices is None:
        slices = max(1, ((p - 1) ** 3) // _SLICE_ELEMENTS + 1)
    slices = max(1, min(int(slices), p - 1))
    return [chunk for chunk in np.array_split(vals, slices) if chunk.size]


def _run_sliced(fn, fld: PrimeField, threads: int, slices: int | None):
    parts = _partition(fld.p, slices)
    if threads and threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: fn(fld, c), parts))
    else:
        results = [fn(fld, c) for c in parts]
    return tuple(sum(r[i] for r in results) for i in range(len(results[0])))


def count_U_classes(fld: PrimeField, threads: int = 1, slices: int | None = None) -> tuple[int, int]:
    """Return (#U(F_p), #{x in U(F_p) : x0...x5 is a square}) in one pass."""
    _check_good(fld)
    return _run_sliced(_u_slice, fld, threads, slices)


def count_U(fld: PrimeField, threads: int = 1, slices: int | None = None) -> int:
    return count_U_classes(fld, threads, slices)[0]


def count_U_square(fld: PrimeField, threads: int = 1, slices: int | None = None) -> int:
    return count_U_classes(fld, threads, slices)[1]


def _brute_slice(fld: PrimeField, x0_vals: np.ndarray) -> tuple[int, int, int]:
    p = fld.p
    inv, chi = fld.inv_table, fld.chi_table
    rest = np.arange(1, p, dtype=np.int64)
    x1, x2, x3 = np.meshgrid(rest, rest, rest, indexing="ij", copy=False)
    total = sq = nsq = 0
    for x0 in x0_vals:
        x4 = -(1 + x0 + x1 + x2 + x3) % p
        recip = (1 + inv[x0] + inv[x1] + inv[x2] + inv[x3] + inv[x4]) % p
        hit = (x4 != 0) & (recip == 0)
        cls = chi[x0 * x1 % p * x2 % p * x3 % p * x4 % p][hit]
        total += int(hit.sum())
        sq += int((cls == 1).sum())
        nsq += int((cls == -1).sum())
    return total, sq, nsq


def count_U_classes_bruteforce(fld: PrimeField) -> tuple[int, int]:
    """(square, nonsquare) class sizes of U(F_p) by direct O(p^4) enumeration."""
    _check_good(fld)
    _, sq, nsq = _run_sliced(_brute_slice, fld, 1, 1)
    return sq, nsq


def count_U_bruteforce(fld: PrimeField) -> int:
    """#U(F_p) by enumerating x0..x3 and solving x4 from the linear equation.

    Independent of the quadratic shortcut in ``count_U``; meant as its oracle.
    """
    _check_good(fld)
    return _run_sliced(_brute_slice, fld, 1, 1)[0]


# ---------------------------------------------------------------------------
# Smooth models


def count_Y(fld: PrimeField, n_U: int | None = None, threads: int = 1) -> int:
    p = _check_good(fld)
    if n_U is None:
        n_U = count_U(fld, threads)
    return n_U + 50 * p * p + 50 * p + 20


def ytilde_correction(p: int) -> int:
    """#Ytilde - #Utilde; the p = 3 mod 4 branch has no published proof."""
    if p % 4 == 1:
        return 50 * p * p + 90 * p + 20
    return 50 * p * p + 10 * p + 20


def count_Ytilde(fld: PrimeField, n_U_square: int | None = None, threads: int = 1) -> int:
    p = _check_good(fld)
    if n_U_square is None:
        n_U_square = count_U_square(fld, threads)
    return 2 * n_U_square + ytilde_correction(p)


def trace_t3(fld: PrimeField, n_U: int | None = None, threads: int = 1) -> int:
    """Frobenius trace on H^3, p^3 - 19 - #U(F_p)."""
    p = _check_good(fld)
    if n_U is None:
        n_U = count_U(fld, threads)
    return p**3 - 19 - n_U


def strata_breakdown(fld: PrimeField, n_U: int | None = None) -> StratumBreakdown:
    p = _check_good(fld)
    if n_U is None:
        n_U = count_U(fld)
    return StratumBreakdown(
        segre=10 * p,
        r0=15 * (p * p - 3 * p + 3),
        l0=20 * (p - 2) * (p + 1),
        cubics=15 * (p * p + 7 * p + 1),
        u=n_U,
    )


def count_record(fld: PrimeField, threads: int = 1, slices: int | None = None,
                 method: str = "fast") -> CountRecord:
    p = _check_good(fld)
    if method == "fast":
        n_U, n_sq = count_U_classes(fld, threads, slices)
    elif method == "brute":
        n_sq, n_nsq = count_U_classes_bruteforce(fld)
        n_U = n_sq + n_nsq
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountRecord(
        p=p,
        n_U=n_U,
        n_U_square=n_sq,
        n_Utilde=2 * n_sq,
        n_Y=count_Y(fld, n_U),
        n_Ytilde=count_Ytilde(fld, n_sq),
        t3=trace_t3(fld, n_U),
        method=method,
        ytilde_branch="proved" if p % 4 == 1 else "unproved",
    )


# ---------------------------------------------------------------------------
# Cayley cubics


def count_cayley_c1(fld: PrimeField) -> int:
    """Points of the cubic surface e3(y0, y1, y2, y3) = 0 in P3(F_p)."""
    p = _check_good(fld)
    r = np.arange(p, dtype=np.int64)
    a, b, c = np.meshgrid(r, r, r, indexing="ij", copy=False)
    # chart y0 = 1: e3 = ab + ac + bc + abc
    n = int(((a * b + a * c + b * c + a * b % p * c) % p == 0).sum())
    # chart y0 = 0, y1 = 1: e3 = y2*y3
    b2, c2 = np.meshgrid(r, r, indexing="ij")
    n += int((b2 * c2 % p == 0).sum())
    # y0 = y1 = 0: e3 vanishes identically on the remaining p + 1 points
    return n + p + 1


def count_c2(fld: PrimeField) -> int:
    """#C2(F_p) for the Cayley cubic with its four nodes blown up."""
    p = _check_good(fld)
    return 1 + 7 * p + p * p


def cayley_cover_formula(p: int) -> int:
    return p * p + 8 * p + 1 if p % 4 == 1 else p * p + 6 * p + 1


def cayley_cover_fibration(fld: PrimeField) -> int:
    """#C3~(F_p) from the pencil of lines through a node.

    Smooth fibres give (p - 2)(p + 1) points.  Two singular fibres are trees
    of three rational lines (3p + 1 points).  In the third, two of the three
    lines are defined over F_p only when -1 is a square; otherwise they are
    conjugate and only the middle curve contributes.
    """
    p = _check_good(fld)
    split = fld.chi_table[p - 1] == 1
    return (p - 2) * (p + 1) + 2 * (3 * p + 1) + (3 * p + 1 if split else p + 1)


def _cover_open_slice(fld: PrimeField, y0_vals: np.ndarray) -> tuple[int]:
    p = fld.p
    inv, chi = fld.inv_table, fld.chi_table
    rest = np.arange(1, p, dtype=np.int64)
    y0, y1, y2 = np.meshgrid(y0_vals, rest, rest, indexing="ij", copy=False)
    on_cubic = (inv[y0] + inv[y1] + inv[y2] + 1) % p == 0
    w2 = -(y0 * y1 % p * y2) % p
    return (int((1 + chi[w2])[on_cubic].sum()),)


def count_cayley_cover_open(fld: PrimeField, threads: int = 1) -> int:
    """Points of w^2 = -y0 y1 y2 y3 over the part of C1 with no y_i = 0."""
    _check_good(fld)
    return _run_sliced(_cover_open_slice, fld, threads, None)[0]


def count_cayley_resolved_cover(fld: PrimeField, threads: int = 1) -> int:
    """#C3~(F_p), assembled from an enumeration of the open double cover.

    Boundary strata: each of the four nodal curves is in the branch locus and
    contributes its p + 1 points once; over each of the six lines joining the
    nodes the cover is a rational curve branched at the two ends, adding p - 1
    points away from the nodal curves.
    """
    p = _check_good(fld)
    return count_cayley_cover_open(fld, threads) + 4 * (p + 1) + 6 * (p - 1)


def ytilde_strata_assembly(fld: PrimeField, n_U_square: int | None = None,
                           cover: int | None = None) -> int:
    """#Ytilde(F_p) built stratum by stratum from the enumerated Cayley cover.

    Segre lines (only rational when -1 is a square), the 20 branch quadrics,
    15 open Cayley covers and 15 unramified parts of the planes F_kl.
    """
    p = _check_good(fld)
    if n_U_square is None:
        n_U_square = count_U_square(fld)
    if cover is None:
        cover = count_cayley_resolved_cover(fld)
    segre = 20 * p if fld.chi_table[p - 1] == 1 else 0
    open_cayley = cover - 4 * (p + 1)
    plane_unramified = cover - (10 * p - 2)
    return 2 * n_U_square + segre + 20 * (p + 1) ** 2 + 15 * open_cayley + 15 * plane_unramified


# ---------------------------------------------------------------------------
# Special points and sampling


def segre_points() -> list[NPoint]:
    """The ten nodes (1:1:1:-1:-1:-1) up to permutation, first coordinate +1."""
    pts = []
    for plus in combinations(range(6), 3):
        if 0 not in plus:
            continue
        pts.append(NPoint(tuple(1 if i in plus else -1 for i in range(6))))
    return pts


def points_U(fld: PrimeField) -> np.ndarray:
    """All of U(F_p) as an (n, 6) array, each row scaled so x0 = 1."""
    p = _check_good(fld)
    inv, chi, sqrt = fld.inv_table, fld.chi_table, fld.sqrt_table
    rest = np.arange(1, p, dtype=np.int64)
    x0, x1, x2 = (g.ravel() for g in np.meshgrid(rest, rest, rest, indexing="ij"))
    S = -(1 + x0 + x1 + x2) % p
    R = -(1 + inv[x0] + inv[x1] + inv[x2]) % p
    blocks = []

    both = (S == 0) & (R == 0)
    if both.any():
        b0, b1, b2 = x0[both], x1[both], x2[both]
        k = b0.size
        x3 = np.tile(rest, k)
        rep = lambda v: np.repeat(v, p - 1)
        blocks.append(np.stack([rep(b0), rep(b1), rep(b2), x3, -x3 % p, np.ones_like(x3)], axis=1))

    generic = (S != 0) & (R != 0)
    g0, g1, g2, gS, gR = x0[generic], x1[generic], x2[generic], S[generic], R[generic]
    disc = (gS * gS - 4 * gS * inv[gR]) % p
    ok = chi[disc] >= 0
    g0, g1, g2, gS, disc = g0[ok], g1[ok], g2[ok], gS[ok], disc[ok]
    root = sqrt[disc]
    half = inv[2]
    for sign in (1, -1):
        keep = np.ones(root.shape, bool) if sign == 1 else root != 0
        x3 = (gS + sign * root) * half % p
        x4 = (gS - x3) % p
        blocks.append(np.stack([g0, g1, g2, x3, x4, np.ones_like(x3)], axis=1)[keep])

    pts = np.concatenate(blocks) if blocks else np.zeros((0, 6), np.int64)
    pts = pts * inv[pts[:, :1]] % p
    return pts[np.lexsort(pts.T[::-1])]


def involution_fixpoints(fld: PrimeField) -> list[NPoint]:
    """Points of U(F_p) fixed by x -> (1/x0 : ... : 1/x5)."""
    pts = points_U(fld)
    inv_pts = fld.inv_table[pts]
    inv_pts = inv_pts * fld.inv_table[inv_pts[:, :1]] % fld.p
    fixed = np.all(inv_pts == pts, axis=1)
    return [NPoint(tuple(int(v) for v in row)) for row in pts[fixed]]


def sample_points_U(fld: PrimeField, n: int, seed: int) -> list[NPoint]:
    """``n`` points of U(F_p), reproducible from ``seed``.

    Rejection sampling over (x0, x1, x2); not uniform on U.
    """
    p = _check_good(fld)
    rng = np.random.default_rng(seed)
    out: list[NPoint] = []
    while len(out) < n:
        x0, x1, x2 = (int(v) for v in rng.integers(1, p, size=3))
        S = -(1 + x0 + x1 + x2) % p
        R = -(1 + fld.inv(x0) + fld.inv(x1) + fld.inv(x2)) % p
        if S == 0 and R == 0:
            x3 = int(rng.integers(1, p))
        elif S == 0 or R == 0:
            continue
        else:
            root = fld.sqrt((S * S - 4 * S * fld.inv(R)) % p)
            if root is None:
                continue
            if rng.integers(2):
                root = -root
            x3 = (S + root) * fld.inv(2) % p
        x4 = (S - x3) % p
        out.append(normalize((x0, x1, x2, x3, x4, 1), fld))
    return out
