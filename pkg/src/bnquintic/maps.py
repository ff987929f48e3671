"""Birational maps from the quintic N to the Beauville fibred square W and to
Verrill's threefold V.

Every map works over any object with the scalar interface of
``PrimeField``/``RationalField`` (``reduce``, ``inv``, ``is_zero``), so the
same formulas run over F_p and exactly over Q.

A birational map is undefined on a proper closed subset.  Hitting it raises
``IndeterminateError``; ``roundtrip_check`` tallies those points separately
from genuine failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import QQ, PrimeField
from .varieties import NPoint, normalize, on_N, points_U, sample_points_U, _check_good


class IndeterminateError(ArithmeticError):
    """The point lies in the indeterminacy locus of the map."""


def _norm3(triple, fld) -> tuple:
    vals = [fld.reduce(v) for v in triple]
    for v in vals:
        if not fld.is_zero(v):
            s = fld.inv(v)
            return tuple(fld.reduce(w * s) for w in vals)
    raise ValueError("the zero vector is not a projective point")


def elementary_symmetric(vals, j: int, fld=None):
    """e_j of ``vals``; reduced in ``fld`` when given."""
    vals = list(vals)
    if not 0 <= j <= len(vals):
        raise IndexError(f"e_{j} undefined for {len(vals)} values")
    e = [1] + [0] * len(vals)
    for v in vals:
        for k in range(len(vals), 0, -1):
            e[k] += e[k - 1] * v
    return fld.reduce(e[j]) if fld is not None else e[j]


# ---------------------------------------------------------------------------
# Beauville pencil


@dataclass(frozen=True)
class BeauvillePoint:
    P: tuple
    t: object
    Q: tuple


def beauville_residual(P, t, fld=QQ):
    """(X+Y)(Y+Z)(Z+X) + tXYZ at P."""
    X, Y, Z = (fld.reduce(v) for v in P)
    return fld.reduce((X + Y) * (Y + Z) * (Z + X) + fld.reduce(t) * X * Y * Z)


def pencil_parameter(triple, fld=QQ):
    """t' = (a + b + c)(1/a + 1/b + 1/c) for a triple of nonzero values."""
    a, b, c = (fld.reduce(v) for v in triple)
    return fld.reduce((a + b + c) * (fld.inv(a) + fld.inv(b) + fld.inv(c)))


def to_beauville(x, fld=QQ) -> BeauvillePoint:
    """(x0 : ... : x5) -> ((x0:x1:x2), 1 - t', (x3:x4:x5)) for x in U."""
    xs = [fld.reduce(v) for v in x]
    if any(fld.is_zero(v) for v in xs):
        raise IndeterminateError("to_beauville is defined on U only")
    t = fld.reduce(1 - pencil_parameter(xs[:3], fld))
    return BeauvillePoint(_norm3(xs[:3], fld), t, _norm3(xs[3:], fld))


def from_beauville(b: BeauvillePoint, fld=QQ) -> NPoint:
    """Rescale Q by -sum(P)/sum(Q) and glue; the result lies on N."""
    if not (fld.is_zero(beauville_residual(b.P, b.t, fld))
            and fld.is_zero(beauville_residual(b.Q, b.t, fld))):
        raise ValueError("P and Q do not lie on the same fibre of the pencil")
    P = [fld.reduce(v) for v in b.P]
    Q = [fld.reduce(v) for v in b.Q]
    sP, sQ = fld.reduce(sum(P)), fld.reduce(sum(Q))
    if fld.is_zero(sP) or fld.is_zero(sQ):
        raise IndeterminateError("coordinate sums vanish; scaling of Q is not determined")
    lam = fld.reduce(-sP * fld.inv(sQ))
    coords = P + [fld.reduce(lam * q) for q in Q]
    if not on_N(coords, fld):
        raise ValueError("glued point is not on the quintic")
    return normalize(coords, fld)


# ---------------------------------------------------------------------------
# Verrill's threefold


@dataclass(frozen=True)
class VerrillPoint:
    x: object
    y: object
    z: object
    t: object


def verrill_residual(v: VerrillPoint, fld=QQ):
    """(1+x+xy+xyz)(1+z+yz+xyz) t - (t+1)^2 xyz (cleared of the denominator t)."""
    x, y, z, t = (fld.reduce(c) for c in (v.x, v.y, v.z, v.t))
    xyz = x * y * z
    return fld.reduce((1 + x + x * y + xyz) * (1 + z + y * z + xyz) * t - (t + 1) ** 2 * xyz)


def residual_quartic(vals, t, fld=QQ):
    """t e1 e3 - (t+1)^2 e4 at (x2, x3, x4, x5)."""
    e1, e3, e4 = (elementary_symmetric(vals, j, fld) for j in (1, 3, 4))
    t = fld.reduce(t)
    return fld.reduce(t * e1 * e3 - (t + 1) ** 2 * e4)


def to_verrill(x, fld=QQ) -> VerrillPoint:
    """t = x0/x1 and (x2 : x3 : x4 : x5) = (1 : x : xy : xyz)."""
    xs = [fld.reduce(v) for v in x]
    if any(fld.is_zero(v) for v in xs[1:5]):
        raise IndeterminateError("x1..x4 must be nonzero for the Verrill chart")
    t = fld.reduce(xs[0] * fld.inv(xs[1]))
    if fld.is_zero(t) or fld.is_zero(t + 1):
        raise IndeterminateError("t in {0, -1}: degenerate member of the pencil x0 = t x1")
    x2, x3, x4, x5 = xs[2:]
    return VerrillPoint(
        fld.reduce(x3 * fld.inv(x2)),
        fld.reduce(x4 * fld.inv(x3)),
        fld.reduce(x5 * fld.inv(x4)),
        t,
    )


def from_verrill(v: VerrillPoint, fld=QQ) -> NPoint:
    x, y, z, t = (fld.reduce(c) for c in (v.x, v.y, v.z, v.t))
    if fld.is_zero(t) or fld.is_zero(t + 1):
        raise IndeterminateError("t in {0, -1}")
    if fld.is_zero(x) or fld.is_zero(y) or fld.is_zero(z):
        raise IndeterminateError("x, y, z must be nonzero")
    tail = [fld.reduce(1), x, fld.reduce(x * y), fld.reduce(x * y * z)]
    sigma = fld.reduce(sum(tail))
    if fld.is_zero(sigma):
        raise IndeterminateError("x2 + x3 + x4 + x5 = 0 forces x0 = x1 = 0")
    x1 = fld.reduce(-sigma * fld.inv(t + 1))
    x0 = fld.reduce(t * x1)
    coords = [x0, x1] + tail
    if not on_N(coords, fld):
        raise ValueError("point does not satisfy the Verrill equation")
    return normalize(coords, fld)


# ---------------------------------------------------------------------------
# Round trips


@dataclass
class MapTally:
    ok: int = 0
    indeterminate: int = 0
    failed: int = 0
    indeterminate_points: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "indeterminate": self.indeterminate,
            "failed": self.failed,
            "indeterminate_points": [list(map(int, pt)) for pt in self.indeterminate_points],
            "failures": self.failures,
        }


def _beauville_roundtrip(pt: NPoint, fld) -> None:
    b = to_beauville(pt, fld)
    if not fld.is_zero(beauville_residual(b.P, b.t, fld)):
        raise AssertionError("P off the pencil")
    if not fld.is_zero(beauville_residual(b.Q, b.t, fld)):
        raise AssertionError("Q off the pencil")
    if pencil_parameter(pt.coords[:3], fld) != pencil_parameter(pt.coords[3:], fld):
        raise AssertionError("t' differs between the two halves")
    if from_beauville(b, fld) != normalize(pt.coords, fld):
        raise AssertionError("round trip N -> W -> N moved the point")


def _verrill_roundtrip(pt: NPoint, fld) -> None:
    v = to_verrill(pt, fld)
    if not fld.is_zero(residual_quartic(pt.coords[2:], v.t, fld)):
        raise AssertionError("residual quartic does not vanish")
    if not fld.is_zero(verrill_residual(v, fld)):
        raise AssertionError("image not on V")
    if from_verrill(v, fld) != normalize(pt.coords, fld):
        raise AssertionError("round trip N -> V -> N moved the point")


def _tally(points, fld, check) -> MapTally:
    tally = MapTally()
    for pt in points:
        try:
            check(pt, fld)
        except IndeterminateError:
            tally.indeterminate += 1
            tally.indeterminate_points.append(pt.coords)
        except (AssertionError, ValueError, ZeroDivisionError) as exc:
            tally.failed += 1
            tally.failures.append({"point": [int(c) for c in pt.coords], "reason": str(exc)})
        else:
            tally.ok += 1
    return tally


def roundtrip_check(fld: PrimeField, n: int = 0, seed: int = 0, exhaustive: bool = False) -> dict:
    """Sample U(F_p) (or walk all of it) and push each point through both maps."""
    _check_good(fld)
    if exhaustive:
        points = [NPoint(tuple(int(c) for c in row)) for row in points_U(fld)]
    else:
        points = sample_points_U(fld, n, seed)
    return {
        "p": fld.p,
        "seed": None if exhaustive else seed,
        "exhaustive": exhaustive,
        "n": len(points),
        "beauville": _tally(points, fld, _beauville_roundtrip).to_dict(),
        "verrill": _tally(points, fld, _verrill_roundtrip).to_dict(),
    }


def _rational_square(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    from math import isqrt
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def rational_points_U(count: int, height: int = 6, seed: int = 0) -> list[NPoint]:
    """Points of U(Q) found by choosing x0..x3 as small integers.

    x4, x5 are then the roots of T^2 - S T + S/R, kept when the discriminant
    is a rational square.
    """
    rng = np.random.default_rng(seed)
    choices = [v for v in range(-height, height + 1) if v]
    out: list[NPoint] = []
    seen = set()
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 10**6:
            raise RuntimeError("too few rational points at this height")
        xs = [Fraction(int(v)) for v in rng.choice(choices, size=4)]
        S = -sum(xs)
        R = -sum(1 / v for v in xs)
        if S == 0 or R == 0:
            continue
        root = _rational_square(S * S - 4 * S / R)
        if root is None:
            continue
        x4 = (S + root) / 2
        x5 = S - x4
        if x4 == 0 or x5 == 0:
            continue
        pt = normalize(xs + [x4, x5], QQ)
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out
