from fractions import Fraction

import numpy as np
import pytest

from parabolic_shift import Atom, HistogramPiece, ParabolicMap, PowerTail, RealMeasure


def tail_measure(p, side="positive", t0=1.0, c=1.0):
    return RealMeasure(tails=[PowerTail(side, t0, c, p)])


def atom_map(beta, *atoms):
    return ParabolicMap(beta, RealMeasure(atoms=[Atom(t, m) for t, m in atoms]))


def random_mixed_measure(rng: np.random.Generator) -> RealMeasure:
    """One to three of each building block, tails on either side."""
    atoms = [Atom(float(rng.uniform(-5, 5)), float(rng.uniform(0.1, 2)))
             for _ in range(rng.integers(0, 4))]
    pieces = []
    for _ in range(rng.integers(0, 3)):
        a = float(rng.uniform(-5, 4))
        pieces.append(HistogramPiece(a, a + float(rng.uniform(0.1, 3)), float(rng.uniform(0.1, 1))))
    tails = [PowerTail(str(rng.choice(["positive", "negative"])), float(rng.uniform(0.5, 3)),
                       float(rng.uniform(0.1, 2)), float(rng.uniform(1.2, 4.5)))
             for _ in range(rng.integers(0, 3))]
    if not (atoms or pieces or tails):
        atoms = [Atom(0.0, 1.0)]
    return RealMeasure(atoms, pieces, tails)


class QComplex:
    """Exact complex arithmetic over the rationals."""

    def __init__(self, re, im=0):
        self.re, self.im = Fraction(re), Fraction(im)

    def __add__(self, o):
        o = _q(o)
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _q(o)
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _q(o) - self

    def __mul__(self, o):
        o = _q(o)
        return QComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _q(o)
        d = o.re * o.re + o.im * o.im
        return QComplex((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __complex__(self):
        return complex(float(self.re), float(self.im))


def _q(v):
    if isinstance(v, QComplex):
        return v
    v = complex(v)
    return QComplex(Fraction(v.real), Fraction(v.imag))


def rational_atom_eval(fmap: ParabolicMap, z: complex) -> complex:
    """``f(z)`` for an atom-only map, exact until the final rounding."""
    zq = _q(z)
    acc = zq + Fraction(fmap.beta)
    for a in fmap.mu.atoms:
        t = Fraction(a.t)
        acc = acc + Fraction(a.mass) * ((1 + t * zq) / (_q(complex(a.t)) - zq))
    return complex(acc)


@pytest.fixture
def translation():
    return ParabolicMap(1.0)


@pytest.fixture
def unit_atom():
    return atom_map(1.0, (0.0, 1.0))


@pytest.fixture
def zero_step_map():
    return atom_map(0.0, (0.0, 1.0))


@pytest.fixture
def tail25():
    return ParabolicMap(0.0, tail_measure(2.5))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
