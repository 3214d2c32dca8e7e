import random

from hypothesis import given, settings
from hypothesis import strategies as st

from colfw.substitution import (
    erase,
    simple_type_check,
    spine_apply,
    subst_cantype,
    subst_canonical,
    subst_context,
)
from colfw.syntax import BASE, STUB, Arrow, Pi, alpha_equal, atom, const, fits_depth, lam, truncate, var
from colfw.unfolding import eq_at_depth
from generators import SIMPLE_CONSTANTS, random_canonical, random_simple_type
from oracles import oracle_subst

BIG = 1 << 30


def test_erase_dependent_function_type():
    assert str(erase(Pi("x", atom("a"), atom("a2", var("x"))))) == "* -> *"
    assert erase(atom("nat")) == BASE


def test_depth_zero_is_unobservable():
    assert subst_canonical(const("z"), "x", BASE, var("x"), 0) is STUB


def test_variable_head_reduces_hereditarily():
    n = lam("y", const("s", var("y")))
    m = var("x", const("z"))
    assert subst_canonical(n, "x", Arrow(BASE, BASE), m, 5) == const("s", const("z"))


def test_constant_spines_are_observed_one_level_lower():
    m = const("s", const("s", var("x")))
    assert subst_canonical(const("z"), "x", BASE, m, 1) == const("s", STUB)
    assert subst_canonical(const("z"), "x", BASE, m, 2) == const("s", const("s", STUB))
    assert subst_canonical(const("z"), "x", BASE, m, 3) == const("s", const("s", const("z")))


def test_spine_apply_undefined_on_type_mismatch():
    assert spine_apply((), Arrow(BASE, BASE), lam("y", var("y")), 3) is None
    assert spine_apply((const("z"),), BASE, const("z"), 3) is None
    assert spine_apply((const("z"),), Arrow(BASE, BASE), lam("y", var("y")), 3) == const("z")


def test_substitution_avoids_capture():
    n = var("y")
    m = lam("y", var("x"))
    out = subst_canonical(n, "x", BASE, m, 5)
    assert out.var != "y" and out.body == var("y")


def test_subst_into_types_and_contexts():
    ty = Pi("y", atom("vec", var("x")), atom("vec", const("s", var("x"))))
    out = subst_cantype(const("z"), "x", BASE, ty, 3)
    assert out == Pi("y", atom("vec", const("z")), atom("vec", const("s", const("z"))))
    ctx = (("v", atom("vec", var("x"))),)
    assert subst_context(const("z"), "x", BASE, ctx, 3) == (("v", atom("vec", const("z"))),)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_naive_substitution_and_normalisation(seed):
    rng = random.Random(seed)
    tx = random_simple_type(rng, 3)
    tau = random_simple_type(rng, 2)
    ctx = {"a": BASE, "g": Arrow(BASE, BASE)}
    n = random_canonical(rng, ctx, tx, 6)
    m = random_canonical(rng, {**ctx, "x": tx}, tau, 12)
    delta = {**ctx, **SIMPLE_CONSTANTS}
    assert simple_type_check({**delta, "x": tx}, m, tau, BIG)
    got = subst_canonical(n, "x", tx, m, BIG)
    expected = oracle_subst(n, "x", m)
    assert got is not None and expected is not None
    assert alpha_equal(got, expected)
    assert simple_type_check(delta, got, tau, BIG)


CTX = {"a": BASE, "g": Arrow(BASE, BASE)}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_result_respects_observation_depth(seed, k):
    rng = random.Random(seed)
    tx, tau = random_simple_type(rng, 2), random_simple_type(rng, 2)
    n = random_canonical(rng, CTX, tx, 8)
    m = truncate(random_canonical(rng, {**CTX, "x": tx}, tau, 12), BIG, k)
    out = subst_canonical(n, "x", tx, m, k)
    assert out is not None and fits_depth(out, k)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_substitutions_commute(seed, k):
    rng = random.Random(seed)
    t1, t2, tau = (random_simple_type(rng, 2) for _ in range(3))
    n1 = random_canonical(rng, CTX, t1, 8)
    n2 = random_canonical(rng, {**CTX, "x": t1}, t2, 8)
    m = random_canonical(rng, {**CTX, "x": t1, "z": t2}, tau, 12)
    left = subst_canonical(n1, "x", t1, subst_canonical(n2, "z", t2, m, k), k)
    n2x = subst_canonical(n1, "x", t1, n2, BIG)
    right = subst_canonical(n2x, "z", t2, subst_canonical(n1, "x", t1, m, k), k)
    assert eq_at_depth(left, right, k)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 8))
def test_terminates_on_ill_typed_input(seed, k):
    rng = random.Random(seed)
    # the claimed type of x is unrelated to the type n was built at
    n = random_canonical(rng, CTX, random_simple_type(rng, 2), 8)
    m = random_canonical(rng, {**CTX, "x": random_simple_type(rng, 2)}, random_simple_type(rng, 2), 12)
    out = subst_canonical(n, "x", random_simple_type(rng, 3), m, k)
    assert out is None or fits_depth(out, k)
    # self application never normalises but still stops
    omega = lam("y", var("y", var("y")))
    assert subst_canonical(omega, "x", Arrow(BASE, BASE), var("x", omega), k) is None or k == 0
