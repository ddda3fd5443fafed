"""Shared fixtures and hypothesis strategies (small jet spaces)."""
from __future__ import annotations

import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jetnoether.forms import basis, Form
from jetnoether.jet import JetContext
from jetnoether.models import load_model

settings.register_profile(
    "props", max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("props")

PROPERTY_CASES = 200

INDEPENDENT = ("x", "t")
DEPENDENT = ("u", "v")


@st.composite
def contexts(draw, min_k=1, max_k=4):
    m = draw(st.integers(1, 2))
    n = draw(st.integers(1, 2))
    k = draw(st.integers(min_k, max_k))
    return JetContext(INDEPENDENT[:m], DEPENDENT[:n], k)


coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def exprs(draw, ctx, max_order=None, max_degree=3, max_terms=4, base_only=False):
    """Random polynomial of total degree <= max_degree in coordinates of order <= max_order."""
    pool = [i for i, c in enumerate(ctx.coords)
            if (max_order is None or c.order <= max_order) and not (base_only and c.kind == "y")]
    out = ctx.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(coefficients)
        deg = draw(st.integers(0, max_degree))
        term = ctx.const(c)
        for _ in range(deg):
            term = term * ctx.var(draw(st.sampled_from(pool)))
        out = out + term
    return out


@st.composite
def forms(draw, ctx, degree, max_terms=3, max_order=None):
    b = basis(ctx)
    ids = list(range(len(b.items)))
    out = Form(ctx, degree, {})
    for _ in range(draw(st.integers(0, max_terms))):
        w = draw(st.lists(st.sampled_from(ids), min_size=degree, max_size=degree, unique=True))
        out = out + Form.basis_wedge(ctx, w, draw(exprs(ctx, max_order=max_order, max_degree=2, max_terms=2)))
    return out


@pytest.fixture(scope="session")
def oscillator():
    return load_model("builtin:oscillator")


@pytest.fixture(scope="session")
def wave():
    return load_model("builtin:wave")


@pytest.fixture(scope="session")
def free_particle():
    return load_model("builtin:free-particle")


@pytest.fixture(scope="session")
def maxwell():
    return load_model("builtin:maxwell")


def q(x) -> Fraction:
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
