import math

import numpy as np
import pytest

from accelmirror import SolverState, TraceRecord, primal
from accelmirror._common import (
    DUAL_NORM,
    ConfigError,
    DimensionError,
    DomainError,
    as_float_vector,
    dual_norm,
    frozen,
    validate_geometry,
    validate_positive,
    validate_same_length,
)
from accelmirror._random import NORMAL_SAMPLER_ID, PRNG_ID, SeededStream


def test_dual_norm_is_an_involution():
    for kind in DUAL_NORM:
        assert dual_norm(dual_norm(kind)) == kind
    assert dual_norm("l1") == "linf"
    with pytest.raises(ValueError):
        dual_norm("l3")  # type: ignore[arg-type]


def test_validate_geometry():
    assert validate_geometry("simplex") == "simplex"
    with pytest.raises(ConfigError):
        validate_geometry("ball")


def test_as_float_vector_copies_and_validates():
    src = np.array([1, 2, 3])
    out = as_float_vector(src)
    assert out.dtype == np.float64
    out[0] = 9.0
    assert src[0] == 1

    with pytest.raises(DimensionError):
        as_float_vector([[1.0]], name="x")
    with pytest.raises(DomainError, match="zeta"):
        as_float_vector([math.nan], name="zeta")


def test_validate_same_length_and_positive():
    validate_same_length(np.zeros(2), np.ones(2))
    with pytest.raises(DimensionError):
        validate_same_length(np.zeros(2), np.ones(3))

    assert validate_positive(2, "h") == 2.0
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(DomainError):
            validate_positive(bad, "h")


def test_frozen_marks_arrays_read_only():
    arr = frozen(np.zeros(2))
    with pytest.raises(ValueError):
        arr[0] = 1.0


# ---------------------------
# Seeded stream
# ---------------------------


def test_seeded_stream_is_deterministic():
    a, b = SeededStream(42), SeededStream(42)
    np.testing.assert_array_equal(a.uniform(10), b.uniform(10))
    np.testing.assert_array_equal(a.normal(7), b.normal(7))
    assert not np.array_equal(SeededStream(1).uniform(5), SeededStream(2).uniform(5))


def test_uniform_draws_are_pcg64_doubles():
    expected = np.random.Generator(np.random.PCG64(9)).random(6)
    np.testing.assert_array_equal(SeededStream(9).uniform(6), expected)


def test_normal_draws_use_box_muller_on_the_uniform_stream():
    u = SeededStream(3).uniform(4)
    r0 = math.sqrt(-2.0 * math.log(1.0 - u[0]))
    r1 = math.sqrt(-2.0 * math.log(1.0 - u[2]))
    expected = [
        r0 * math.cos(2.0 * math.pi * u[1]),
        r0 * math.sin(2.0 * math.pi * u[1]),
        r1 * math.cos(2.0 * math.pi * u[3]),
    ]
    np.testing.assert_allclose(SeededStream(3).normal(3), expected, rtol=1e-14, atol=1e-15)


def test_odd_normal_counts_consume_a_whole_pair():
    s = SeededStream(5)
    s.normal(3)
    assert s.uniform(1)[0] == SeededStream(5).uniform(5)[4]


def test_normal_sample_statistics():
    z = SeededStream(0).normal(200_000)
    assert abs(float(z.mean())) < 0.01
    assert abs(float(z.std()) - 1.0) < 0.01


def test_seeded_stream_describe_and_validation():
    info = SeededStream(7).describe()
    assert info == {"prng": PRNG_ID, "normal_sampler": NORMAL_SAMPLER_ID, "seed": 7}
    assert SeededStream(np.uint64(2**64 - 1)).seed == 2**64 - 1
    for bad in (-1, 2**64, 1.5, True, "3"):
        with pytest.raises(ConfigError):
            SeededStream(bad)  # type: ignore[arg-type]


# ---------------------------
# Trace records and solver state
# ---------------------------


def test_trace_record_finite():
    assert TraceRecord(0, 1.0).finite
    assert TraceRecord(1, 1.0, 2.0, None).finite
    assert not TraceRecord(2, math.inf).finite
    assert not TraceRecord(3, 1.0, math.nan, 0.0).finite
    assert TraceRecord(4, 0.5, None, 1.0) == TraceRecord(4, 0.5, None, 1.0)


def test_solver_state_evolve_returns_a_copy():
    x = primal([0.5, 0.5])
    state = SolverState(k=0, x=x, zeta=None, y=x)
    nxt = state.evolve(k=1, gamma=2.0)
    assert (state.k, state.gamma) == (0, 1.0)
    assert (nxt.k, nxt.gamma) == (1, 2.0)
    assert nxt.x is x
    assert nxt.z is None
