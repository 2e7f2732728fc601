from fractions import Fraction as F

import hypothesis.strategies as st
import pytest
from hypothesis import given

from conftest import functions, lattice_values, spaces
from rearrange_lab.errors import InputError
from rearrange_lab.spaces import (DiscreteSpace, SimpleFunction, add, center,
                                  equal_space, instance_from_json,
                                  instance_to_json, integrate, multiply,
                                  pos_neg_parts, scale, simple, support)


def test_integrate_fixtures():
    sp = equal_space(2)
    assert integrate(simple((1, -1), sp)) == 0
    sp3 = DiscreteSpace((F(1, 5), F(3, 10), F(1, 2)))
    assert integrate(simple((3, -1, 2), sp3)) == F(13, 10)
    assert integrate(simple((F(7, 3),) * 3, sp3)) == F(7, 3)


def test_center_fixtures():
    sp = equal_space(2)
    assert center(simple((2, 0), sp)).values == (1, -1)
    assert center(simple((0, 0), sp)).values == (0, 0)
    sp3 = DiscreteSpace((F(1, 5), F(3, 10), F(1, 2)))
    assert center(simple((3, -1, 2), sp3)).values == (
        F(17, 10), F(-23, 10), F(7, 10))


def test_support_fixtures():
    sp = equal_space(3)
    assert support(simple((1, 0, -2), sp)) == {0, 2}
    assert support(simple((0, 0, 0), sp)) == set()
    assert support(simple((1, 1, 1), sp)) == {0, 1, 2}


def test_pos_neg_fixtures():
    sp = equal_space(3)
    plus, minus = pos_neg_parts(simple((3, -1, 0), sp))
    assert plus.values == (3, 0, 0) and minus.values == (0, 1, 0)
    plus, minus = pos_neg_parts(simple((1, 2, 3), sp))
    assert plus.values == (1, 2, 3) and minus.values == (0, 0, 0)
    sp2 = equal_space(2)
    plus, minus = pos_neg_parts(simple((-2, -2), sp2))
    assert plus.values == (0, 0) and minus.values == (2, 2)


def test_weight_validation():
    with pytest.raises(InputError):
        DiscreteSpace((F(1, 2), F(1, 4)))
    with pytest.raises(InputError):
        DiscreteSpace((F(3, 2), F(-1, 2)))
    with pytest.raises(InputError):
        DiscreteSpace(())
    with pytest.raises(InputError):
        SimpleFunction((F(1),), equal_space(2))


def test_equal_atoms_flag():
    assert equal_space(4).equal_atoms
    assert not DiscreteSpace((F(1, 4), F(3, 4))).equal_atoms


@given(functions(), st.integers(-5, 5), st.integers(-5, 5))
def test_integrate_linear(f, a, b):
    g = SimpleFunction(tuple(reversed(f.values)), f.space)
    combo = add(scale(f, a), scale(g, b))
    assert integrate(combo) == a * integrate(f) + b * integrate(g)


@given(functions())
def test_center_idempotent_and_kills_constants(f):
    c = center(f)
    assert integrate(c) == 0
    assert center(c).values == c.values
    const = SimpleFunction((F(7, 3),) * f.space.n, f.space)
    assert center(const).values == (0,) * f.space.n


@given(functions())
def test_pos_neg_parts_properties(f):
    plus, minus = pos_neg_parts(f)
    assert all(v >= 0 for v in plus.values)
    assert all(v >= 0 for v in minus.values)
    assert all(p * m == 0 for p, m in zip(plus.values, minus.values))
    assert tuple(p - m for p, m in zip(plus.values, minus.values)) == f.values
    assert support(plus) & support(minus) == set()


@given(functions())
def test_instance_json_roundtrip(f):
    doc = instance_to_json(f.space, {"f": f})
    space, funcs = instance_from_json(doc)
    assert space.weights == f.space.weights
    assert funcs["f"].values == f.values


def test_multiply_pointwise():
    sp = equal_space(2)
    assert multiply(simple((2, 0), sp), simple((1, -1), sp)).values == (2, 0)
