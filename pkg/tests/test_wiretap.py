import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wiretap_kit.dists import ExactDist, condition, distance_from_uniform, marginal
from wiretap_kit.errors import DomainError, ShapeMismatch
from wiretap_kit.expander import cycle
from wiretap_kit.sfext import SfextParams, sfext_measured_error
from wiretap_kit.wiretap import (
    WiretapProtocol,
    aont_error,
    colex_subsets,
    decode,
    duality_sides,
    encode,
    equivocation,
    from_invertible_extractor,
    identity_protocol,
    observation_report,
    one_time_pad,
    threshold_for_gamma,
    conditional_profile,
    verify_resilience,
)


def brute_worst_distance(P, S):
    """Max over observations w of δ(X | Y|_S = w, U), via generic conditioning."""
    weights = Counter()
    for x in itertools.product(range(P.q), repeat=P.m):
        for z in range(P.seed_space):
            y = P.encode_raw(x, z)
            weights[x + tuple(y[i] for i in S)] += 1
    joint = ExactDist.from_weights(P.q, P.m + len(S), weights)
    obs = range(P.m, P.m + len(S))
    worst = Fraction(0)
    for w in {k[P.m:] for k in weights}:
        cond = marginal(condition(joint, obs, w), range(P.m))
        worst = max(worst, distance_from_uniform(cond))
    return worst


@pytest.fixture(scope="module")
def sf_protocol():
    ext = SfextParams(cycle(4), 2, 8, 2)
    err = sfext_measured_error(ext, 5)
    return from_invertible_extractor(ext, 5, err)


def test_otp_shape():
    P = one_time_pad()
    rows = {(x, z): P.encode_raw((x,), z) for x in range(2) for z in range(2)}
    for (x, z), y in rows.items():
        assert set(y) <= {0, 1} and (y[0] ^ y[1]) == x
    assert P.check_decodability()
    assert P.declared() == {"t": 1, "epsilon": "0/1", "gamma": "0/1"}


def test_otp_perfect():
    P = one_time_pad()
    rep = verify_resilience(P, 1)
    assert rep.gamma_measured == 0 and rep.epsilon_measured == 0 and rep.max_distance == 0
    assert rep.equivocation == pytest.approx(1.0)
    assert aont_error(P, 1, rep).value == 0
    assert equivocation(P, 1, rep)[0] == pytest.approx(P.m)


def test_identity_leaks():
    P = identity_protocol()
    rep = verify_resilience(P, 1)
    assert rep.gamma_measured == 1 and not rep.passed
    assert rep.equivocation == 0
    assert rep.max_distance == Fraction(1, 2)
    assert aont_error(P, 1, rep).value == 1


def test_declared_targets_from_perfect_inverter(sf_protocol):
    assert sf_protocol.gamma == 0
    assert sf_protocol.t == 3
    assert sf_protocol.params["inverter_distance"] == "0/1"


def test_colex_order():
    assert list(colex_subsets(3, 2)) == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    assert sum(1 for _ in colex_subsets(6, 3)) == sum(math.comb(6, j) for j in range(4))


def test_measured_distances_match_generic_oracle():
    ext = SfextParams(cycle(4), 2, 5, 2)
    P = from_invertible_extractor(ext, 3, sfext_measured_error(ext, 3))
    rep = verify_resilience(P, 2)
    for rec in rep.subsets:
        assert rec.max_distance == brute_worst_distance(P, rec.S)


def test_sf_protocol_resilient(sf_protocol):
    rep = verify_resilience(sf_protocol, 3)
    assert rep.gamma_measured == 0
    assert rep.epsilon_measured <= sf_protocol.eps
    assert rep.passed
    value, floor, applicable = equivocation(sf_protocol, 3, rep)
    assert value >= 0
    aont = aont_error(sf_protocol, 3, rep)
    assert aont.duality_exact and aont.value <= aont.bound
    assert aont.pairwise <= aont.value


def test_restrict_matches_direct(sf_protocol):
    full = verify_resilience(sf_protocol, 3)
    small = verify_resilience(sf_protocol, 1)
    assert full.restrict(1).to_json() == small.to_json()


def test_duality_sides_equal(sf_protocol):
    for S in [(0,), (1, 5), (0, 3, 7)]:
        lhs, rhs = duality_sides(sf_protocol, S)
        assert lhs == rhs


def test_encode_decode_round_trip(sf_protocol):
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = tuple(int(v) for v in rng.integers(0, 2, 2))
        assert decode(sf_protocol, encode(sf_protocol, x, rng)) == x


def test_validation():
    P = one_time_pad()
    with pytest.raises(ShapeMismatch):
        P.encode_raw((0, 1), 0)
    with pytest.raises(DomainError):
        P.encode_raw((0,), 5)
    with pytest.raises(DomainError):
        verify_resilience(P, 3)
    with pytest.raises(DomainError):
        WiretapProtocol(2, 0, 1, 1, None, None)


def test_zero_threshold_trivially_resilient():
    rep = verify_resilience(identity_protocol(), 0)
    assert rep.gamma_measured == 0 and rep.passed


def test_observation_report_projection_consistent(sf_protocol):
    S = (2, 6)
    rec = observation_report(sf_protocol, lambda y: ((y >> (7 - 2)) & 1) * 2 + ((y >> (7 - 6)) & 1), 4)
    rep = verify_resilience(sf_protocol, 2)
    direct = next(r for r in rep.subsets if r.S == S)
    assert rec.max_distance == direct.max_distance and rec.bad_mass == direct.bad_mass


@given(st.lists(st.lists(st.integers(0, 5), min_size=3, max_size=3), min_size=1, max_size=5),
       st.fractions(0, 1))
def test_threshold_for_gamma_minimal(rows, gamma):
    counts = np.array(rows)
    if counts.sum() == 0:
        return
    prof = conditional_profile(counts)
    eps = threshold_for_gamma(prof, gamma)
    assert sum((o.mass for o in prof if o.distance > eps), Fraction(0)) <= gamma
    for o in prof:
        if o.distance < eps:
            assert sum((p.mass for p in prof if p.distance > o.distance), Fraction(0)) > gamma


def test_report_json_is_exact_strings():
    doc = verify_resilience(one_time_pad(), 1).to_json()
    assert doc["gamma"] == "0/1" and doc["epsilon_measured"] == "0/1"
    assert doc["passed"] is True
