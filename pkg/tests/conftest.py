"""Shared hypothesis strategies: small spaces and lattice-valued functions."""

from fractions import Fraction

import hypothesis.strategies as st

from rearrange_lab.spaces import DiscreteSpace, SimpleFunction, equal_space


@st.composite
def spaces(draw, min_atoms=1, max_atoms=6, equal_only=False):
    n = draw(st.integers(min_atoms, max_atoms))
    if equal_only or draw(st.booleans()):
        return equal_space(n)
    numerators = draw(
        st.lists(st.integers(1, 64), min_size=n, max_size=n)
    )
    total = sum(numerators)
    return DiscreteSpace(tuple(Fraction(k, total) for k in numerators))


def lattice_values(n, lo=-8, hi=8, den=4):
    return st.lists(
        st.integers(lo, hi), min_size=n, max_size=n
    ).map(lambda ks: tuple(Fraction(k, den) for k in ks))


@st.composite
def functions(draw, space=None, **space_kwargs):
    sp = space if space is not None else draw(spaces(**space_kwargs))
    values = draw(lattice_values(sp.n))
    return SimpleFunction(values, sp)


@st.composite
def function_pairs(draw, **space_kwargs):
    sp = draw(spaces(**space_kwargs))
    f = SimpleFunction(draw(lattice_values(sp.n)), sp)
    g = SimpleFunction(draw(lattice_values(sp.n)), sp)
    return f, g


@st.composite
def function_triples(draw, **space_kwargs):
    sp = draw(spaces(**space_kwargs))
    f = SimpleFunction(draw(lattice_values(sp.n)), sp)
    g = SimpleFunction(draw(lattice_values(sp.n)), sp)
    h = SimpleFunction(draw(lattice_values(sp.n)), sp)
    return f, g, h
