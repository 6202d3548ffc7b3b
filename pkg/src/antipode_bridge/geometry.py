"""Exact rational geometry of the simplex and the L1 sphere.

Points are plain tuples of :class:`fractions.Fraction`.  A point with
``d + 1`` coordinates lives in dimension ``d``.  The simplex is the set of
non-negative points summing to one; the L1 sphere (the boundary of the
``(d+1)``-crosspolytope) is the set of points whose absolute values sum
to one.  The simplex sits inside the sphere as its *top* facet.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Tuple

from .errors import DomainError, InvariantError

Point = Tuple[Fraction, ...]

MAX_DIM = 6
MAX_RESOLUTION = 64

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def check_limits(d: int, n: Optional[int] = None) -> None:
    """Reject dimensions and resolutions outside the supported desk-scale range."""
    if not isinstance(d, int) or d < 1 or d > MAX_DIM:
        raise ValueError(f"dimension must be an integer in [1, {MAX_DIM}], got {d!r}")
    if n is not None and (not isinstance(n, int) or n < 1 or n > MAX_RESOLUTION):
        raise ValueError(f"resolution must be an integer in [1, {MAX_RESOLUTION}], got {n!r}")


# -- rationals ---------------------------------------------------------------

def parse_rational(text) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into a Fraction."""
    if isinstance(text, bool):
        raise InvariantError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise InvariantError(f"not a rational: {text!r}")
    try:
        q = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvariantError(f"not a rational: {text!r}") from exc
    if "." in text or "e" in text.lower():
        raise InvariantError(f"decimal notation not allowed for rationals: {text!r}")
    return q


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_point(p: Sequence[Fraction]) -> list:
    return [format_rational(Fraction(c)) for c in p]


def as_point(coords: Iterable) -> Point:
    return tuple(parse_rational(c) if isinstance(c, str) else Fraction(c) for c in coords)


def sphere_point(coords: Iterable) -> Point:
    """Build a point of the L1 sphere, checking that the absolute values sum to one."""
    p = as_point(coords)
    if len(p) < 2:
        raise InvariantError("a sphere point needs at least two coordinates")
    if sum(abs(c) for c in p) != 1:
        raise InvariantError(f"coordinates do not lie on the L1 sphere: {format_point(p)}")
    return p


def simplex_point(coords: Iterable) -> Point:
    """Build a point of the standard simplex."""
    p = as_point(coords)
    if len(p) < 2:
        raise InvariantError("a simplex point needs at least two coordinates")
    if any(c < 0 for c in p) or sum(p) != 1:
        raise InvariantError(f"coordinates do not lie on the simplex: {format_point(p)}")
    return p


def l1_distance(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    return sum((abs(a - b) for a, b in zip(p, q)), ZERO)


def linf_distance(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    return max(abs(a - b) for a, b in zip(p, q))


# -- grid --------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class GridPoint:
    """Integer vector ``k`` with ``sum(|k_i|) == n``, standing for the point ``k / n``."""

    k: Tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvariantError(f"resolution must be positive, got {self.n}")
        if sum(abs(v) for v in self.k) != self.n:
            raise InvariantError(f"grid vector {self.k} does not have L1 norm {self.n}")

    @property
    def dim(self) -> int:
        return len(self.k) - 1

    @property
    def point(self) -> Point:
        return tuple(Fraction(v, self.n) for v in self.k)

    def antipode(self) -> "GridPoint":
        return GridPoint(tuple(-v for v in self.k), self.n)

    def __str__(self):
        return "(" + ", ".join(str(Fraction(v, self.n)) for v in self.k) + ")"


class Domain(enum.Enum):
    SPHERE = "sphere"
    TOP = "top"
    BOTTOM = "bottom"


def _signed_compositions(parts: int, total: int, lo: int, hi: int) -> Iterator[Tuple[int, ...]]:
    # lo/hi are -1, 0 or 1: the allowed sign range of every coordinate
    if parts == 1:
        for v in sorted({-total if lo < 0 else total, total if hi > 0 else -total}):
            yield (v,)
        return
    for v in range(lo * total, hi * total + 1):
        for rest in _signed_compositions(parts - 1, total - abs(v), lo, hi):
            yield (v,) + rest


def grid_enumerate(d: int, n: int, domain=Domain.SPHERE) -> list:
    """All grid points of resolution ``n`` on the chosen domain, sorted lexicographically by ``k``."""
    check_limits(d, n)
    domain = Domain(domain)
    lo, hi = {Domain.SPHERE: (-1, 1), Domain.TOP: (0, 1), Domain.BOTTOM: (-1, 0)}[domain]
    return [GridPoint(k, n) for k in _signed_compositions(d + 1, n, lo, hi)]


# -- sphere maps -------------------------------------------------------------

class Region(enum.Enum):
    TOP = "Top"
    BOTTOM = "Bottom"
    MIDDLE = "Middle"


def antipode(p: Sequence[Fraction]) -> Point:
    return tuple(-c for c in p)


def pos(p: Sequence[Fraction]) -> Fraction:
    """Sum of the strictly positive coordinates."""
    return sum((c for c in p if c > 0), ZERO)


def region(p: Sequence[Fraction]) -> Region:
    if all(c >= 0 for c in p):
        return Region.TOP
    if all(c <= 0 for c in p):
        return Region.BOTTOM
    return Region.MIDDLE


def f_map(p: Sequence[Fraction]) -> Point:
    """Project a sphere point with positive mass onto the top facet.

    Negative coordinates are zeroed and the positive part is rescaled to sum
    to one, i.e. ``(x_i + |x_i|) / (2 pos(x))``.  Points of the top facet are
    fixed.
    """
    total = pos(p)
    if total == 0:
        raise DomainError("projection is undefined on the bottom facet (pos = 0)")
    return tuple(c / total if c > 0 else ZERO for c in p)


# -- collar ------------------------------------------------------------------

def barycenter(d: int) -> Point:
    return (Fraction(1, d + 1),) * (d + 1)


def on_boundary(x: Sequence[Fraction]) -> bool:
    return any(c == 0 for c in x)


def radial_depth(y: Sequence[Fraction]) -> Tuple[Fraction, Optional[Point]]:
    """Radial coordinate of a simplex point measured from the barycenter.

    Returns ``(r, z)`` where ``r = 1 - (d+1) min_i y_i`` lies in ``[0, 1]`` and
    ``z`` is the boundary point on the ray from the barycenter through ``y``
    (``None`` at the barycenter itself).
    """
    m = len(y)
    r = 1 - m * min(y)
    if r == 0:
        return r, None
    b = Fraction(1, m)
    return r, tuple(b + (c - b) / r for c in y)


@dataclass(frozen=True)
class CollarPoint:
    """A point ``(base, t)`` of the thickened simplex.

    ``t == 0`` is the original simplex; ``t > 0`` lives on the collar
    ``boundary x (0, 1]`` and so requires a base point with a zero coordinate.
    """

    base: Point
    t: Fraction

    def __post_init__(self):
        try:
            base = simplex_point(self.base)
        except InvariantError as exc:
            raise InvariantError(f"collar base is not a simplex point: {exc}") from exc
        t = Fraction(self.t)
        if not 0 <= t <= 1:
            raise InvariantError(f"collar height must lie in [0, 1], got {t}")
        if t > 0 and not on_boundary(base):
            raise InvariantError("a collar point with t > 0 must sit over the simplex boundary")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "t", t)


def collar_push(c: CollarPoint) -> Point:
    """Embed the thickened simplex back into the simplex.

    The original simplex is shrunk by half towards the barycenter and the
    collar fills the radii between one half and one.
    """
    m = len(c.base)
    b = Fraction(1, m)
    scale = (1 + c.t) / 2
    return tuple(b + scale * (x - b) for x in c.base)


def collar_pull(y: Sequence[Fraction]) -> CollarPoint:
    """Inverse of :func:`collar_push`; the seam ``r == 1/2`` resolves to ``t == 0``."""
    y = tuple(y)
    r, z = radial_depth(y)
    if r <= HALF:
        b = Fraction(1, len(y))
        return CollarPoint(tuple(b + 2 * (c - b) for c in y), ZERO)
    return CollarPoint(z, 2 * r - 1)
