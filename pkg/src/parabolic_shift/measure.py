"""Finite positive measures on the real line built from atoms, histogram
pieces and power-law tails.

Every moment used by the shift classifier has a closed form for these
building blocks, and divergent moments come back as ``math.inf`` (set by
the closed-form logic, never produced by floating overflow).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal, NamedTuple

import numpy as np

from .errors import UndefinedMoment
from .quadrature import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_ORDER,
    DEFAULT_RTOL,
    adaptive_gauss_legendre,
)

MomentKind = Literal["abs_neg", "abs_pos", "first", "sq_neg", "sq_pos"]
MOMENT_KINDS: tuple[str, ...] = ("abs_neg", "abs_pos", "first", "sq_neg", "sq_pos")


@dataclass(frozen=True)
class Atom:
    t: float
    mass: float

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ValueError(f"atom position must be finite, got {self.t!r}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"atom mass must be finite and > 0, got {self.mass!r}")


@dataclass(frozen=True)
class HistogramPiece:
    """Constant density ``height`` on ``[a, b]``."""

    a: float
    b: float
    height: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"piece needs finite a < b, got [{self.a!r}, {self.b!r}]")
        if not (math.isfinite(self.height) and self.height > 0):
            raise ValueError(f"piece height must be > 0, got {self.height!r}")


class TailSubstitution(NamedTuple):
    """Change of variables ``|t| = w**(-q)`` for a tail.

    On ``w in (0, w_max]`` the tail measure has density ``coef * w**power``
    with ``power >= 1``.
    """

    sign: float
    w_max: float
    q: float
    coef: float
    power: float


@dataclass(frozen=True)
class PowerTail:
    """Density ``c * |t|**(-p)`` on ``[t0, inf)`` or ``(-inf, -t0]``."""

    side: Literal["positive", "negative"]
    t0: float
    c: float
    p: float

    def __post_init__(self):
        if self.side not in ("positive", "negative"):
            raise ValueError(f"tail side must be 'positive' or 'negative', got {self.side!r}")
        if not (math.isfinite(self.t0) and self.t0 > 0):
            raise ValueError(f"tail cutoff t0 must be > 0, got {self.t0!r}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"tail coefficient c must be > 0, got {self.c!r}")
        if not (math.isfinite(self.p) and self.p > 1):
            raise ValueError(f"tail exponent p must be > 1, got {self.p!r}")

    @property
    def sign(self) -> float:
        return 1.0 if self.side == "positive" else -1.0

    def mass(self) -> float:
        return self.c * self.t0 ** (1 - self.p) / (self.p - 1)

    def abs_moment(self, k: int) -> float:
        """``int |t|**k dmu`` over the tail; ``inf`` once ``p <= k + 1``."""
        if self.p <= k + 1:
            return math.inf
        return self.c * self.t0 ** (k + 1 - self.p) / (self.p - k - 1)

    def substitution(self) -> TailSubstitution:
        # u = 1/|t| maps the tail onto (0, 1/t0]; the power change u = w**q
        # with integer q >= 2/(p-1) keeps u smooth in w and makes the density
        # exponent q*(p-1) - 1 at least 1.
        p = self.p
        q = float(max(2, math.ceil(2.0 / (p - 1) - 1e-12)))
        return TailSubstitution(
            sign=self.sign,
            w_max=self.t0 ** (-1.0 / q),
            q=q,
            coef=self.c * q,
            power=q * (p - 1) - 1,
        )


class PackedMeasure(NamedTuple):
    """Flat float arrays consumed by the orbit kernels."""

    atom_t: np.ndarray
    atom_m: np.ndarray
    piece_a: np.ndarray
    piece_b: np.ndarray
    piece_h: np.ndarray
    tail_sign: np.ndarray
    tail_wmax: np.ndarray
    tail_q: np.ndarray
    tail_coef: np.ndarray
    tail_power: np.ndarray


def _arr(values) -> np.ndarray:
    out = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RealMeasure:
    atoms: tuple[Atom, ...] = ()
    pieces: tuple[HistogramPiece, ...] = ()
    tails: tuple[PowerTail, ...] = ()

    def __post_init__(self):
        # accept lists for convenience, store tuples so the measure is hashable
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "tails", tuple(self.tails))

    @classmethod
    def from_dict(cls, data: dict) -> "RealMeasure":
        """Build from the config literal ``{atoms: [{t, mass}], pieces: [{a, b, height}],
        tails: [{side, t0, c, p}]}``; missing keys mean empty lists."""
        return cls(
            atoms=tuple(Atom(float(d["t"]), float(d["mass"])) for d in data.get("atoms", ())),
            pieces=tuple(
                HistogramPiece(float(d["a"]), float(d["b"]), float(d["height"]))
                for d in data.get("pieces", ())
            ),
            tails=tuple(
                PowerTail(str(d["side"]), float(d["t0"]), float(d["c"]), float(d["p"]))
                for d in data.get("tails", ())
            ),
        )

    def to_dict(self) -> dict:
        return {
            "atoms": [{"t": a.t, "mass": a.mass} for a in self.atoms],
            "pieces": [{"a": p.a, "b": p.b, "height": p.height} for p in self.pieces],
            "tails": [{"side": s.side, "t0": s.t0, "c": s.c, "p": s.p} for s in self.tails],
        }

    @property
    def is_empty(self) -> bool:
        return not (self.atoms or self.pieces or self.tails)

    @property
    def is_atomic(self) -> bool:
        return not (self.pieces or self.tails)

    def scaled(self, factor: float) -> "RealMeasure":
        """The measure multiplied by ``factor > 0``."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return RealMeasure(
            atoms=tuple(Atom(a.t, a.mass * factor) for a in self.atoms),
            pieces=tuple(HistogramPiece(p.a, p.b, p.height * factor) for p in self.pieces),
            tails=tuple(PowerTail(s.side, s.t0, s.c * factor, s.p) for s in self.tails),
        )

    @cached_property
    def packed(self) -> PackedMeasure:
        subs = [s.substitution() for s in self.tails]
        return PackedMeasure(
            atom_t=_arr([a.t for a in self.atoms]),
            atom_m=_arr([a.mass for a in self.atoms]),
            piece_a=_arr([p.a for p in self.pieces]),
            piece_b=_arr([p.b for p in self.pieces]),
            piece_h=_arr([p.height for p in self.pieces]),
            tail_sign=_arr([s.sign for s in subs]),
            tail_wmax=_arr([s.w_max for s in subs]),
            tail_q=_arr([s.q for s in subs]),
            tail_coef=_arr([s.coef for s in subs]),
            tail_power=_arr([s.power for s in subs]),
        )


def total_mass(m: RealMeasure) -> float:
    return (
        math.fsum(a.mass for a in m.atoms)
        + math.fsum(p.height * (p.b - p.a) for p in m.pieces)
        + math.fsum(s.mass() for s in m.tails)
    )


def _piece_moment(piece: HistogramPiece, k: int, negative: bool) -> float:
    # int |t|**k h dt over the part of [a, b] on the requested side of 0
    if negative:
        lo, hi = piece.a, min(piece.b, 0.0)
        if lo >= hi:
            return 0.0
        lo, hi = -hi, -lo
    else:
        lo, hi = max(piece.a, 0.0), piece.b
        if lo >= hi:
            return 0.0
    return piece.height * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)


def _side_moment(m: RealMeasure, k: int, negative: bool) -> float:
    parts = [
        abs(a.t) ** k * a.mass for a in m.atoms if (a.t < 0 if negative else a.t > 0)
    ]
    parts += [_piece_moment(p, k, negative) for p in m.pieces]
    side = "negative" if negative else "positive"
    tail_parts = [s.abs_moment(k) for s in m.tails if s.side == side]
    if any(math.isinf(v) for v in tail_parts):
        return math.inf
    return math.fsum(parts + tail_parts)


def moment(m: RealMeasure, kind: MomentKind) -> float:
    """Closed-form moment of ``m``.

    ``abs_neg``/``abs_pos`` integrate ``|t|`` over ``(-inf, 0)``/``(0, inf)``,
    ``sq_neg``/``sq_pos`` integrate ``t**2`` there, and ``first`` is the signed
    ``int t dmu``.  Divergent integrals return ``math.inf``.

    Raises:
        UndefinedMoment: ``kind == "first"`` while an absolute moment diverges.
    """
    if kind == "abs_neg":
        return _side_moment(m, 1, True)
    if kind == "abs_pos":
        return _side_moment(m, 1, False)
    if kind == "sq_neg":
        return _side_moment(m, 2, True)
    if kind == "sq_pos":
        return _side_moment(m, 2, False)
    if kind == "first":
        neg, pos = _side_moment(m, 1, True), _side_moment(m, 1, False)
        if math.isinf(neg) or math.isinf(pos):
            raise UndefinedMoment(
                f"int |t| dmu diverges (negative side {neg}, positive side {pos})"
            )
        return pos - neg
    raise ValueError(f"unknown moment kind {kind!r}; expected one of {MOMENT_KINDS}")


def integrate_kernel(
    m: RealMeasure,
    k: Callable[[np.ndarray], np.ndarray],
    *,
    order: int = DEFAULT_ORDER,
    rtol: float = DEFAULT_RTOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> complex:
    """``int k(t) dmu(t)`` for a vectorized kernel ``k``.

    Atoms are summed exactly, pieces go through adaptive Gauss-Legendre, and
    tails are integrated in the substituted variable ``w`` (``|t| = w**-q``),
    so ``k`` must stay bounded at infinity on any side carrying a tail.  The
    Herglotz kernel, which grows like ``|t|``, has its own path in
    :mod:`parabolic_shift.halfplane`.
    """
    total = 0.0 + 0.0j
    if m.atoms:
        ts = np.array([a.t for a in m.atoms])
        ms = np.array([a.mass for a in m.atoms])
        total += complex(np.sum(ms * np.asarray(k(ts))))
    opts = dict(order=order, rtol=rtol, max_depth=max_depth)
    for p in m.pieces:
        total += p.height * adaptive_gauss_legendre(k, p.a, p.b, **opts)
    for tail in m.tails:
        s = tail.substitution()

        def integrand(w, s=s):
            return s.coef * w**s.power * np.asarray(k(s.sign * w ** (-s.q)))

        total += adaptive_gauss_legendre(integrand, 0.0, s.w_max, **opts)
    return total
