"""Shared vocabulary: rectangles, surfaces, partitions and certificates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np


class DomainError(ValueError):
    """A point or rectangle lies outside the admissible domain."""


class DegenerateIntegrator(ValueError):
    """The integrator has (numerically) zero mixed increment over the panel."""


class NodeOutOfDomain(ValueError):
    """A rule node computed from the integrator falls outside the panel."""


class HypothesisError(ValueError):
    """Declared or sampled data violates a rule's hypotheses."""


class CertificateMismatch(TypeError):
    """A bound was fed the wrong kind of regularity certificate."""


class DataError(ValueError):
    """A surface produced non-finite values."""


# ---------------------------------------------------------------------------
# rectangles


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box that may be degenerate (zero width or height)."""

    a: float
    b: float
    c: float
    d: float

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def height(self) -> float:
        return self.d - self.c

    @property
    def area(self) -> float:
        return (self.b - self.a) * (self.d - self.c)

    @property
    def degenerate(self) -> bool:
        return not (self.a < self.b and self.c < self.d)

    def to_rect(self) -> "Rect":
        return Rect(self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class Rect(Box):
    """Non-degenerate rectangle Q = [a,b] x [c,d]."""

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite rectangle {vals}")
        if not (self.a < self.b and self.c < self.d):
            raise DomainError(f"degenerate rectangle [{self.a},{self.b}]x[{self.c},{self.d}]")

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.a + self.b), 0.5 * (self.c + self.d))

    def contains(self, x: float, y: float) -> bool:
        return self.a <= x <= self.b and self.c <= y <= self.d

    def scaled(self, k: float) -> "Rect":
        return Rect(k * self.a, k * self.b, k * self.c, k * self.d)


def area_of(box: Box) -> float:
    return (box.b - box.a) * (box.d - box.c)


def rect_split(q: Rect, x: float, y: float) -> tuple[Box, Box, Box, Box]:
    """Quadrants (SW, SE, NW, NE) meeting at (x, y); degenerate ones are kept."""
    if not q.contains(x, y):
        raise DomainError(f"split point ({x},{y}) outside {q}")
    return (
        Box(q.a, x, q.c, y),
        Box(x, q.b, q.c, y),
        Box(q.a, x, y, q.d),
        Box(x, q.b, y, q.d),
    )


# ---------------------------------------------------------------------------
# surfaces

Fn2 = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Surface:
    """Vectorised real function of two variables with optional exact metadata.

    ``fn`` must accept broadcastable float arrays.  ``partials`` maps a mixed
    derivative order ``(i, j)`` (i in t, j in s) to another Surface.
    ``cell_integral`` returns the exact double integral over a box.
    ``jumps_x`` / ``jumps_y`` list coordinates of lines across which the
    function may jump; quadrature and the oracle align meshes with them.
    """

    __slots__ = ("fn", "descriptor", "partials", "cell_integral", "jumps_x", "jumps_y", "domain")

    def __init__(
        self,
        fn: Fn2,
        descriptor: str = "surface",
        partials: Optional[Mapping[tuple[int, int], "Surface"]] = None,
        cell_integral: Optional[Callable[[Box], float]] = None,
        jumps_x: Sequence[float] = (),
        jumps_y: Sequence[float] = (),
        domain: Optional[Rect] = None,
    ):
        self.fn = fn
        self.descriptor = descriptor
        self.partials = dict(partials or {})
        self.cell_integral = cell_integral
        self.jumps_x = tuple(float(v) for v in jumps_x)
        self.jumps_y = tuple(float(v) for v in jumps_y)
        self.domain = domain

    def __call__(self, x, y):
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        out = np.asarray(self.fn(xa, ya), dtype=float)
        shape = np.broadcast_shapes(xa.shape, ya.shape)
        if out.shape != shape:
            out = np.broadcast_to(out, shape).copy()
        return out

    def at(self, x: float, y: float) -> float:
        return float(self(x, y))

    def partial(self, i: int, j: int) -> Optional["Surface"]:
        if (i, j) == (0, 0):
            return self
        return self.partials.get((i, j))

    def integral(self, box: Box) -> Optional[float]:
        if self.cell_integral is None:
            return None
        return float(self.cell_integral(box))

    def __repr__(self) -> str:
        return f"Surface({self.descriptor})"

    # linear combinations keep every piece of metadata that survives linearity

    def combine(self, other: "Surface", alpha: float = 1.0, beta: float = 1.0) -> "Surface":
        def fn(x, y, f=self, g=other):
            return alpha * f(x, y) + beta * g(x, y)

        parts = {}
        for key in set(self.partials) & set(other.partials):
            parts[key] = self.partials[key].combine(other.partials[key], alpha, beta)
        ci = None
        if self.cell_integral is not None and other.cell_integral is not None:
            def ci(box, f=self, g=other):
                return alpha * f.cell_integral(box) + beta * g.cell_integral(box)
        return Surface(
            fn,
            f"{alpha:g}*{self.descriptor}+{beta:g}*{other.descriptor}",
            parts,
            ci,
            sorted(set(self.jumps_x) | set(other.jumps_x)),
            sorted(set(self.jumps_y) | set(other.jumps_y)),
        )

    def scale(self, k: float) -> "Surface":
        parts = {key: s.scale(k) for key, s in self.partials.items()}
        ci = None
        if self.cell_integral is not None:
            def ci(box, f=self):
                return k * f.cell_integral(box)
        return Surface(lambda x, y, f=self: k * f(x, y), f"{k:g}*{self.descriptor}", parts, ci,
                       self.jumps_x, self.jumps_y, self.domain)

    def __add__(self, other):
        if isinstance(other, Surface):
            return self.combine(other)
        return self.combine(constant(float(other)))

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self.combine(other if isinstance(other, Surface) else constant(float(other)), 1.0, -1.0)

    def __rmul__(self, k):
        return self.scale(float(k))


def constant(k: float) -> Surface:
    zero_parts = {}

    def ci(box):
        return k * area_of(box)

    s = Surface(lambda x, y: np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), k), f"const({k:g})",
                None, ci)
    zero = Surface(lambda x, y: np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y))), "0", None,
                   lambda box: 0.0)
    for key in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]:
        zero_parts[key] = zero
    s.partials = zero_parts
    return s


def delta11(u: Surface, cell: Box) -> float:
    """Mixed increment u(a',c') - u(a',d') - u(b',c') + u(b',d')."""
    xs = np.array([cell.a, cell.a, cell.b, cell.b])
    ys = np.array([cell.c, cell.d, cell.c, cell.d])
    v = u(xs, ys)
    return float(v[0] - v[1] - v[2] + v[3])


def corners(f: Surface, q: Box) -> tuple[float, float, float, float]:
    """Values (f(a,c), f(a,d), f(b,c), f(b,d))."""
    v = f(np.array([q.a, q.a, q.b, q.b]), np.array([q.c, q.d, q.c, q.d]))
    return float(v[0]), float(v[1]), float(v[2]), float(v[3])


def grid_delta11(values: np.ndarray) -> np.ndarray:
    """Cellwise mixed increments of node values indexed [ix, iy]."""
    return values[1:, 1:] - values[1:, :-1] - values[:-1, 1:] + values[:-1, :-1]


# ---------------------------------------------------------------------------
# partitions


class TagScheme(enum.Enum):
    RESTRICTED = "restricted"
    UNRESTRICTED = "unrestricted"


@dataclass(frozen=True)
class GridPartition:
    """Node vectors plus one tag point per cell.

    ``tag_x[i, j]``, ``tag_y[i, j]`` is the tag of cell [xs[i], xs[i+1]] x [ys[j], ys[j+1]].
    """

    xs: np.ndarray
    ys: np.ndarray
    tag_x: np.ndarray
    tag_y: np.ndarray
    scheme: TagScheme = TagScheme.UNRESTRICTED

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        tx = np.asarray(self.tag_x, dtype=float)
        ty = np.asarray(self.tag_y, dtype=float)
        object.__setattr__(self, "tag_x", tx)
        object.__setattr__(self, "tag_y", ty)
        if xs.ndim != 1 or ys.ndim != 1 or len(xs) < 2 or len(ys) < 2:
            raise DomainError("node vectors need at least two entries")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise DomainError("node vectors must be strictly increasing")
        shape = (len(xs) - 1, len(ys) - 1)
        if tx.shape != shape or ty.shape != shape:
            raise DomainError(f"tag arrays must have shape {shape}")
        if np.any(tx < xs[:-1, None]) or np.any(tx > xs[1:, None]):
            raise DomainError("x tag outside its cell")
        if np.any(ty < ys[None, :-1]) or np.any(ty > ys[None, 1:]):
            raise DomainError("y tag outside its cell")
        if self.scheme is TagScheme.RESTRICTED:
            if np.any(tx != tx[:, :1]) or np.any(ty != ty[:1, :]):
                raise DomainError("restricted tags must be shared along rows and columns")

    @property
    def rect(self) -> Rect:
        return Rect(float(self.xs[0]), float(self.xs[-1]), float(self.ys[0]), float(self.ys[-1]))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.xs) - 1, len(self.ys) - 1)

    @property
    def mesh(self) -> float:
        return float(max(np.max(np.diff(self.xs)), np.max(np.diff(self.ys))))

    @classmethod
    def restricted(cls, xs, ys, zeta, eta) -> "GridPartition":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        zeta = np.asarray(zeta, dtype=float)
        eta = np.asarray(eta, dtype=float)
        tx = np.repeat(zeta[:, None], len(ys) - 1, axis=1)
        ty = np.repeat(eta[None, :], len(xs) - 1, axis=0)
        return cls(xs, ys, tx, ty, TagScheme.RESTRICTED)

    @classmethod
    def uniform(cls, q: Rect, n: int, m: Optional[int] = None, tags: str = "mid") -> "GridPartition":
        m = n if m is None else m
        xs = np.linspace(q.a, q.b, n + 1)
        ys = np.linspace(q.c, q.d, m + 1)
        return cls.from_nodes(xs, ys, tags)

    @classmethod
    def from_nodes(cls, xs, ys, tags: str = "mid", rng: Optional[np.random.Generator] = None):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if tags == "mid":
            zeta, eta = 0.5 * (xs[:-1] + xs[1:]), 0.5 * (ys[:-1] + ys[1:])
        elif tags == "lower":
            zeta, eta = xs[:-1].copy(), ys[:-1].copy()
        elif tags == "upper":
            zeta, eta = xs[1:].copy(), ys[1:].copy()
        elif tags == "random":
            rng = rng or np.random.default_rng(0)
            zeta = xs[:-1] + rng.random(len(xs) - 1) * np.diff(xs)
            eta = ys[:-1] + rng.random(len(ys) - 1) * np.diff(ys)
        else:
            raise ValueError(f"unknown tag placement {tags!r}")
        return cls.restricted(xs, ys, zeta, eta)

    def cells(self):
        for i in range(len(self.xs) - 1):
            for j in range(len(self.ys) - 1):
                yield i, j, Rect(self.xs[i], self.xs[i + 1], self.ys[j], self.ys[j + 1])


# ---------------------------------------------------------------------------
# regularity certificates


class Direction(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


def _nonneg(name, *vals):
    for v in vals:
        if not (math.isfinite(v) and v >= 0):
            raise ValueError(f"{name} constants must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class Certificate:
    """Base of all regularity certificates.

    ``source`` is "declared" (trusted) or "estimated"; estimated certificates
    record the sampling resolution that produced them.
    """

    def _check_source(self):
        if self.source not in ("declared", "estimated"):
            raise ValueError(f"unknown certificate source {self.source!r}")
        if self.source == "estimated" and self.resolution is None:
            raise ValueError("estimated certificates must record their resolution")


@dataclass(frozen=True)
class BoundedBivariation(Certificate):
    V: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        _nonneg("bivariation", self.V)
        self._check_source()


@dataclass(frozen=True)
class ArzelaVariation(Certificate):
    V_A: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        _nonneg("Arzela variation", self.V_A)
        self._check_source()


@dataclass(frozen=True)
class Holder(Certificate):
    H1: float
    H2: float
    beta1: float = 1.0
    beta2: float = 1.0
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        _nonneg("Holder", self.H1, self.H2)
        for b in (self.beta1, self.beta2):
            if not (0 < b <= 1):
                raise ValueError(f"Holder exponents must lie in (0,1], got {b}")
        self._check_source()


@dataclass(frozen=True)
class Lipschitz(Certificate):
    L1: float
    L2: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        _nonneg("Lipschitz", self.L1, self.L2)
        self._check_source()

    def as_holder(self) -> Holder:
        return Holder(self.L1, self.L2, 1.0, 1.0, self.source, self.resolution)


@dataclass(frozen=True)
class Range(Certificate):
    m: float
    M: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.M) and self.m <= self.M):
            raise ValueError(f"range needs finite m <= M, got {self.m}, {self.M}")
        self._check_source()


@dataclass(frozen=True)
class PartialRange(Certificate):
    """Slice-wise bounds: m1 <= f(t,.) <= M1 for every t and m2 <= f(.,s) <= M2 for every s."""

    m1: float
    M1: float
    m2: float
    M2: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        if not (self.m1 <= self.M1 and self.m2 <= self.M2):
            raise ValueError("partial range needs m1 <= M1 and m2 <= M2")
        self._check_source()


@dataclass(frozen=True)
class Bimonotone(Certificate):
    direction: Direction = Direction.INCREASING
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        self._check_source()


@dataclass(frozen=True)
class Monotone(Certificate):
    direction: Direction = Direction.INCREASING
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        self._check_source()


@dataclass(frozen=True)
class CornerGrowth(Certificate):
    """Growth away from each corner: |f - f(corner)| <= L_x dx^e + L_y dy^e."""

    La: float
    Lb: float
    Lc: float
    Ld: float
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        _nonneg("corner growth", self.La, self.Lb, self.Lc, self.Ld)
        for e in (self.alpha1, self.alpha2, self.beta1, self.beta2):
            if not (math.isfinite(e) and e > 0):
                raise ValueError(f"corner growth exponents must be > 0, got {e}")
        self._check_source()


@dataclass(frozen=True)
class QuadrantBivariation(Certificate):
    """Bivariation over the four quadrants meeting at (x, y), in SW, SE, NW, NE order."""

    x: float
    y: float
    V_sw: float
    V_se: float
    V_nw: float
    V_ne: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        _nonneg("quadrant bivariation", self.V_sw, self.V_se, self.V_nw, self.V_ne)
        self._check_source()


@dataclass(frozen=True)
class IncrementExtremes(Certificate):
    """Largest (S >= 0) and smallest (s <= 0) mixed increment over sub-rectangles."""

    S: float
    s: float
    source: str = "declared"
    resolution: Optional[int] = None

    def __post_init__(self):
        if not (self.S >= 0 >= self.s):
            raise ValueError("increment extremes need S >= 0 >= s")
        self._check_source()


# ---------------------------------------------------------------------------
# error certificates


@dataclass(frozen=True)
class ErrorCertificate:
    rule_id: str
    estimate: float
    bound: float
    oracle: Optional[float] = None
    residual: Optional[float] = None
    satisfied: Optional[bool] = None
    slack: float = 0.0
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not (math.isfinite(self.bound) and self.bound >= 0):
            raise ValueError(f"bound must be finite and nonnegative, got {self.bound}")
        if (self.oracle is None) != (self.satisfied is None):
            raise ValueError("satisfied is present exactly when an oracle value is")

    @classmethod
    def build(cls, rule_id: str, estimate: float, bound: float, oracle: Optional[float] = None,
              oracle_error: float = 0.0, residual: Optional[float] = None, notes=()) -> "ErrorCertificate":
        """Assemble a certificate; ``residual`` defaults to |estimate - oracle|.

        A formula can evaluate to a negative number.  The stored bound is then
        0, a note records the computed value, and ``satisfied`` is judged
        against the computed value, so such a bound fails unless it lies within
        the slack of zero.
        """
        notes = tuple(notes)
        stored = float(bound)
        if not math.isfinite(stored):
            raise ValueError(f"bound must be finite, got {bound}")
        if stored < 0:
            notes += (f"computed bound {stored!r} is negative",)
            stored = 0.0
        if oracle is None:
            return cls(rule_id, float(estimate), stored, notes=notes)
        res = abs(estimate - oracle) if residual is None else float(residual)
        slack = float(oracle_error) + 1e-9
        return cls(rule_id, float(estimate), stored, float(oracle), float(res), bool(res <= float(bound) + slack),
                   slack, notes)


@dataclass(frozen=True)
class BracketCertificate:
    """Two-sided (or one-sided, with an infinite end) enclosure of a reference value."""

    rule_id: str
    lower: float
    upper: float
    value: float
    slack: float
    satisfied: bool
    notes: tuple = field(default_factory=tuple)

    @classmethod
    def build(cls, rule_id: str, lower: float, upper: float, value: float, value_error: float = 0.0,
              notes=()) -> "BracketCertificate":
        slack = float(value_error) + 1e-9
        ok = (lower - slack <= value) and (value <= upper + slack)
        return cls(rule_id, float(lower), float(upper), float(value), slack, bool(ok), tuple(notes))

    @property
    def excess(self) -> float:
        """How far the value lies outside the enclosure (0 when inside)."""
        return max(0.0, self.lower - self.value, self.value - self.upper)


@dataclass(frozen=True)
class Measured:
    """A numerically evaluated quantity with its error estimate."""

    value: float
    error: float = 0.0
    converged: bool = True

    def __float__(self) -> float:
        return self.value
