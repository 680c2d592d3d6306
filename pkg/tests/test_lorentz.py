import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tachyonqft.lorentz import (
    METRIC, Boost, ElasticKinematics, FourVector, boost_apply, find_sign_flipping_boost,
    minkowski_dot, offshell_counterexample, onshell_tachyon, pole_scan, verify_onshell_invariance,
)

WITNESS = FourVector(0.75, (1.25, 0, 0))


def test_dot_examples():
    assert minkowski_dot(FourVector(1, (0, 0, 0)), FourVector(1, (0, 0, 0))) == 1
    assert minkowski_dot(FourVector(0, (1, 0, 0)), FourVector(0, (1, 0, 0))) == -1
    assert WITNESS.square == pytest.approx(-1.0, abs=1e-15)


def test_onshell_tachyon():
    k = onshell_tachyon((1.25, 0, 0), 1.0)
    assert k.e0 == pytest.approx(0.75, abs=1e-15)
    assert onshell_tachyon((5, 0, 0), 0.0).e0 == 5.0
    with pytest.raises(ValueError):
        onshell_tachyon((1.0, 0, 0), 1.0)


def test_boost_rejects_superluminal():
    with pytest.raises(ValueError):
        Boost((1.0, 0, 0))
    with pytest.raises(ValueError):
        Boost((0.6, 0.6, 0.6))


def test_witness_energy_flips():
    kp = boost_apply(Boost((0.8, 0, 0)), WITNESS)
    # gamma = 5/3: e0' = 5/3 (0.75 - 1), k' = 5/3 (1.25 - 0.6)
    assert kp.e0 == pytest.approx(-5 / 12, abs=1e-12)
    assert kp.evec[0] == pytest.approx(13 / 12, abs=1e-12)


def test_identity_boost():
    k = FourVector(1, (0, 0, 0))
    assert boost_apply(Boost((0, 0, 0)), k) == k


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-0.57, 0.57), min_size=3, max_size=3))
def test_boost_matrix_is_lorentz(u):
    lam = Boost(u).matrix()
    assert np.allclose(lam.T @ METRIC @ lam, METRIC, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 10), st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.lists(st.floats(-0.57, 0.57), min_size=3, max_size=3))
def test_timelike_energy_sign_kept(e_extra, kvec, u):
    kn = float(np.linalg.norm(kvec))
    k = FourVector(kn + e_extra, kvec)
    assert boost_apply(Boost(u), k).e0 > 0


def test_invariance_report():
    rep = verify_onshell_invariance(WITNESS, Boost((0.8, 0, 0)))
    assert rep.passed and rep.k_prime_norm == pytest.approx(13 / 12, abs=1e-12)
    rep0 = verify_onshell_invariance(WITNESS, Boost((0, 0, 0)))
    assert rep0.k_prime_norm == pytest.approx(1.25)


@pytest.mark.parametrize("kvec,u", [((1.25, 0, 0), 0.8), ((2, 0, 0), 0.5)])
def test_offshell_counterexample(kvec, u):
    kp = offshell_counterexample(kvec, (1, 0, 0), u)
    assert kp.pnorm < 1e-12


def test_offshell_rejects_non_parallel():
    with pytest.raises(ValueError):
        offshell_counterexample((1, 0, 0), (0, 1, 0), 0.5)


def test_sign_flipping_boost():
    b = find_sign_flipping_boost(WITNESS)
    v = 1.25 / 0.75
    assert 1 / v < b.speed < 1
    assert boost_apply(b, WITNESS).e0 < 0
    assert 0.8 * v > 1  # the default u = 0.8 also works
    with pytest.raises(ValueError):
        find_sign_flipping_boost(FourVector(1, (0.5, 0, 0)))


def test_no_flip_for_timelike_scan():
    k = FourVector(1, (0.5, 0, 0))
    for speed in np.linspace(0, 1 - 1e-6, 2001):
        assert boost_apply(Boost.along((1, 0, 0), speed), k).e0 > 0


def test_pole_scan_examples():
    poles = pole_scan(ElasticKinematics(1.0, 1.0, 1.0))
    assert [(p.channel, p.cos_theta) for p in poles] == [("t", 0.5), ("u", -0.5)]
    assert pole_scan(ElasticKinematics(0.4, 1.0, 1.0)) == []
    edge = pole_scan(ElasticKinematics(0.5, 1.0, 1.0))
    assert [(p.channel, p.cos_theta) for p in edge] == [("t", -1.0), ("u", 1.0)]


@given(st.floats(0.01, 10), st.floats(0, 5), st.floats(0.01, 10))
def test_pole_scan_properties(p, mpsi, mphi):
    kin = ElasticKinematics(p, mpsi, mphi)
    poles = pole_scan(kin)
    assert (poles == []) == (4 * p * p < mphi * mphi)
    for pole in poles:
        inv = kin.t(pole.cos_theta) if pole.channel == "t" else kin.u(pole.cos_theta)
        assert inv == pytest.approx(-mphi * mphi, rel=1e-12)
        if 4 * p * p > mphi * mphi * (1 + 1e-9):
            assert abs(pole.cos_theta) < 1


def test_mandelstam_sum():
    kin = ElasticKinematics(0.7, 1.3, 1.0)
    for c in np.linspace(-1, 1, 11):
        assert kin.s + kin.t(c) + kin.u(c) == pytest.approx(4 * 1.3**2)
        assert -4 * 0.7**2 - 1e-15 <= kin.t(c) <= 0
