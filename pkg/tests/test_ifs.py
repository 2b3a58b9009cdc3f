import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from favlab.errors import ConfigError, SymbolOutOfRange
from favlab.ifs import (
    IFS,
    IDENTITY,
    Similitude,
    TailWord,
    compose_geoms,
    geom_power,
    norm_angle,
    parse_word,
    similarity_dimension,
    word_str,
)


def fig1():
    return IFS.from_json("configs/fig1.json")


# ---------------------------------------------------------------- dimension


def test_dimension_exact_values():
    # [TRIVIAL] closed forms of the Moran equation
    assert abs(similarity_dimension([1 / 3] * 3) - 1.0) < 1e-12
    assert abs(similarity_dimension([1 / 2] * 4) - 2.0) < 1e-12
    assert abs(similarity_dimension([1 / 2] * 2) - 1.0) < 1e-12


def test_dimension_mixed_ratios():
    # [DERIVED] (1/2)^g + (1/4)^g = 1 => x + x^2 = 1 with x = 2^-g,
    # so x = (sqrt(5)-1)/2 and g = log(x)/log(1/2)
    x = (math.sqrt(5.0) - 1.0) / 2.0
    expected = math.log(x) / math.log(0.5)
    assert abs(similarity_dimension([0.5, 0.25]) - expected) < 1e-12


def test_dimension_fast():
    t0 = time.perf_counter()
    for _ in range(100):
        similarity_dimension([0.5, 0.25, 0.125])
    assert (time.perf_counter() - t0) / 100 < 1e-3


@given(st.lists(st.floats(0.05, 0.8), min_size=2, max_size=6))
def test_dimension_solves_moran(ratios):
    g = similarity_dimension(ratios)
    assert abs(sum(r**g for r in ratios) - 1.0) < 1e-9


def test_dimension_rejects_bad_ratios():
    with pytest.raises(ConfigError):
        similarity_dimension([1.0, 0.5])
    with pytest.raises(ConfigError):
        similarity_dimension([])


# ---------------------------------------------------------------- words


def test_parse_word_roundtrip():
    assert parse_word("123") == (1, 2, 3)
    assert word_str((1, 2, 3)) == "123"
    assert parse_word("") == ()


def test_geom_symbol_range():
    ifs = fig1()
    with pytest.raises(SymbolOutOfRange):
        ifs.geom(0)
    with pytest.raises(SymbolOutOfRange):
        ifs.geom(4)


# ---------------------------------------------------------------- geometry


def _matrix_oracle(geoms):
    """[DERIVED] oracle: brute 3x3 homogeneous-matrix product."""
    M = np.eye(3)
    for g in geoms:
        c, s = math.cos(g.theta), math.sin(g.theta)
        A = np.array(
            [
                [g.r * c, -g.r * g.orient * s, g.tx],
                [g.r * s, g.r * g.orient * c, g.ty],
                [0.0, 0.0, 1.0],
            ]
        )
        M = M @ A
    return M


sim_geoms = st.builds(
    Similitude,
    r=st.floats(0.1, 0.9),
    theta=st.floats(0.0, 2 * math.pi, exclude_max=True),
    orient=st.sampled_from([1, -1]),
    tx=st.floats(-2.0, 2.0),
    ty=st.floats(-2.0, 2.0),
)


@settings(max_examples=200)
@given(st.lists(sim_geoms, min_size=1, max_size=5))
def test_compose_matches_matrix_product(sims):
    ifs_like = [
        compose_geoms(IDENTITY, IFS.from_maps([s, s]).geom(1)) for s in sims
    ]
    g = IDENTITY
    for h in ifs_like:
        g = compose_geoms(g, h)
    M = _matrix_oracle(ifs_like)
    c, s = math.cos(g.theta), math.sin(g.theta)
    got = np.array(
        [
            [g.r * c, -g.r * g.orient * s, g.tx],
            [g.r * s, g.r * g.orient * c, g.ty],
            [0.0, 0.0, 1.0],
        ]
    )
    assert np.allclose(got, M, atol=1e-9)


def test_geom_power_matches_repeated_compose():
    ifs = fig1()
    g = ifs.compose((1, 2))
    acc = IDENTITY
    for k in range(7):
        p = geom_power(g, k)
        assert abs(p.r - acc.r) < 1e-12
        assert abs(norm_angle(p.theta - acc.theta)) < 1e-9 or abs(
            norm_angle(p.theta - acc.theta) - 2 * math.pi
        ) < 1e-9
        acc = compose_geoms(acc, g)


def test_fixed_point():
    ifs = fig1()
    for f in ifs.maps:
        x, y = f.fixed_point()
        fx, fy = f.apply((x, y))
        assert abs(fx - x) < 1e-12 and abs(fy - y) < 1e-12
    assert ifs.maps[1].fixed_point() == pytest.approx((1.0, 0.0))
    assert ifs.maps[2].fixed_point() == pytest.approx((0.0, 1.0))


# ---------------------------------------------------------------- tail words


def test_tailword_canonical_period():
    # [TRIVIAL] (121212)~ == (12)~ and prefix absorption
    assert TailWord((), (1, 2, 1, 2)) == TailWord((), (1, 2))
    assert TailWord((1, 2), (1, 2)) == TailWord((), (1, 2))
    assert TailWord((1,), (2, 1)) == TailWord((), (1, 2))


def test_tailword_head():
    w = TailWord((3,), (1, 2))
    assert w.head(5) == (3, 1, 2, 1, 2)
    assert w.head(0) == ()


@given(
    st.lists(st.integers(1, 3), min_size=1, max_size=4),
    st.integers(1, 4),
    st.integers(0, 3),
)
def test_tailword_repeat_invariance(period, reps, shift):
    base = TailWord((), tuple(period))
    repeated = TailWord((), tuple(period) * reps)
    assert base == repeated
    shifted = TailWord(tuple(period)[:shift] if shift <= len(period) else (),
                       tuple(period))
    assert shifted.head(12) == shifted.head(12)  # head is deterministic
    assert base.head(20) == repeated.head(20)


# ---------------------------------------------------------------- measure


def test_mu_mass_additivity():
    ifs = fig1()
    # [TRIVIAL] masses of the children of a cylinder sum to its mass
    for u in [(), (1,), (2, 3)]:
        total = sum(ifs.mu_mass(u + (i,)) for i in (1, 2, 3))
        assert abs(total - ifs.mu_mass(u)) < 1e-12


def test_mass_band_matches_enumeration():
    ifs = fig1()
    # [DERIVED] oracle: exhaustive enumeration, homogeneous ratios => bands
    # are exactly the words of a fixed length
    for k in (1, 2, 3, 4):
        band = sorted(ifs.mass_band(1.5 * (1 / 3) ** k))
        assert band == sorted(
            __import__("itertools").product((1, 2, 3), repeat=k)
        )


def test_pi_point_fixed_tails():
    ifs = fig1()
    # [TRIVIAL] the tail 2~ codes the fixed point of map 2
    (x, y), err = ifs.pi_point((), TailWord((), (2,)))
    assert abs(x - 1.0) < 1e-9 and abs(y) < 1e-9 and err < 1e-9
    # prefixing applies the word's map
    (x, y), err = ifs.pi_point((3,), TailWord((), (2,)))
    fx, fy = ifs.maps[2].apply((1.0, 0.0))
    assert abs(x - fx) < 1e-9 and abs(y - fy) < 1e-9


def test_enclosing_disk_invariant():
    ifs = fig1()
    cx, cy = ifs.center
    for f in ifs.maps:
        fx, fy = f.apply((cx, cy))
        # F_i(disk) has center F_i(c) and radius r_i R0; containment:
        assert math.hypot(fx - cx, fy - cy) + f.r * ifs.R0 <= ifs.R0 + 1e-12


# ---------------------------------------------------------------- config


def test_from_dict_rejects_bad_configs():
    good = {"maps": [{"r": 0.5, "theta": 0.0, "tx": 0.0, "ty": 0.0}] * 2}
    IFS.from_dict(good)
    for bad in [
        {},
        {"maps": []},
        {"maps": [{"r": 0.5, "tx": 0.0, "ty": 0.0}]},
        {"maps": [{"r": 0.5, "theta": 0.0, "theta_over_pi": 0.0,
                   "tx": 0.0, "ty": 0.0}]},
        {"maps": [{"r": 0.5, "theta": 0.0, "tx": 0.0, "ty": 0.0,
                   "bogus": 1}]},
        {"maps": [{"r": 1.5, "theta": 0.0, "tx": 0.0, "ty": 0.0}]},
    ]:
        with pytest.raises(ConfigError):
            IFS.from_dict(bad)
