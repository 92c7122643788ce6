import itertools
from fractions import Fraction

import numpy as np
import pytest

from wiretap_kit.channels import (
    GeneralAdversary,
    SideChannelProtocol,
    code_from_json,
    compose_decode,
    compose_encode,
    composed_protocol,
    decoder_probe_adversary,
    general_adversary_report,
    general_decode,
    general_encode,
    hamming74,
    linear_observation_report,
    parity_adversary,
    projection_adversary,
    random_observation,
    reed_solomon,
)
from wiretap_kit.dists import SourceDescriptor
from wiretap_kit.errors import DomainError, ShapeMismatch, TooManyErrors
from wiretap_kit.expander import cycle
from wiretap_kit.gf import field, rank
from wiretap_kit.linext import strongness_of, toeplitz_family
from wiretap_kit.sfext import SfextParams, sfext_measured_error
from wiretap_kit.wiretap import WiretapProtocol, from_invertible_extractor, verify_resilience


@pytest.fixture(scope="module")
def sf8():
    ext = SfextParams(cycle(4), 2, 8, 2)
    return from_invertible_extractor(ext, 5, sfext_measured_error(ext, 5))


def test_hamming_corrects_every_single_flip():
    C = hamming74()
    for msg in itertools.product(range(2), repeat=4):
        word = C.encode(msg)
        assert C.decode(word) == msg
        for i in range(7):
            bad = list(word)
            bad[i] ^= 1
            assert C.decode(bad) == msg


def test_hamming_is_distance_three():
    C = hamming74()
    words = [C.encode(m) for m in itertools.product(range(2), repeat=4)]
    assert min(sum(a != b for a, b in zip(u, v)) for u, v in itertools.combinations(words, 2)) == 3


def test_reed_solomon_two_errors():
    C = reed_solomon(10, 6, 16)
    F = field(16)
    rng = np.random.default_rng(0)
    for _ in range(100):
        msg = tuple(int(v) for v in rng.integers(0, 16, 6))
        word = list(C.encode(msg))
        for pos in rng.choice(10, 2, replace=False):
            word[pos] = F.add(word[pos], int(rng.integers(1, 16)))
        assert C.decode(word) == msg
    assert C.min_distance == 5 and C.radius == 2


def test_reed_solomon_three_errors_detected_or_wrong():
    C = reed_solomon(10, 6, 16)
    msg = (1, 2, 3, 4, 5, 6)
    word = list(C.encode(msg))
    for pos in (0, 4, 9):
        word[pos] ^= 7
    try:
        assert C.decode(word) != msg
    except TooManyErrors:
        pass


def test_reed_solomon_prime_field():
    C = reed_solomon(6, 3, 7)
    msg = (3, 0, 5)
    word = list(C.encode(msg))
    word[2] = (word[2] + 1) % 7
    assert C.decode(word) == msg


def test_code_validation():
    with pytest.raises(DomainError):
        reed_solomon(16, 4, 16)
    with pytest.raises(DomainError):
        code_from_json({"kind": "golay"})
    assert code_from_json(hamming74().to_json()).N == 7
    assert code_from_json(reed_solomon(10, 6, 16).to_json()).K == 6


def test_composition_rate():
    P = WiretapProtocol(16, 3, 6, 16**3, encoder=lambda x, z: x, decoder=lambda y: y[:3])
    C = reed_solomon(10, 6, 16)
    comp = composed_protocol(P, C)
    assert comp.params["rate"] == "3/10"
    assert P.rate * C.rate == Fraction(1, 2) * Fraction(6, 10)


def test_composed_round_trip_with_errors(sf8):
    C = hamming74()
    rng = np.random.default_rng(1)
    for _ in range(30):
        x = tuple(int(v) for v in rng.integers(0, 2, 2))
        word = list(compose_encode(sf8, C, x, rng))
        word[int(rng.integers(0, 7))] ^= 1
        word[7 + int(rng.integers(0, 7))] ^= 1
        assert compose_decode(C, sf8, word) == x
    with pytest.raises(ShapeMismatch):
        compose_decode(C, sf8, [0] * 13)


def test_linear_observation_zero(sf8):
    rep = linear_observation_report(sf8, hamming74(), np.zeros((0, 14), dtype=int))
    assert rep.max_distance == 0 and rep.rank == 0


def test_linear_observation_projection_matches_subset(sf8):
    C = hamming74()
    comp = composed_protocol(sf8, C)
    S = (1, 9)
    L = np.zeros((2, 14), dtype=int)
    for r, i in enumerate(S):
        L[r, i] = 1
    rep = linear_observation_report(sf8, C, L)
    direct = next(r for r in verify_resilience(comp, 2).subsets if r.S == S)
    assert rep.max_distance == direct.max_distance
    assert [o.distance for o in rep.profile] == [o.distance for o in direct.profile]


def test_random_observations_are_affine(sf8):
    rng = np.random.default_rng(2)
    for _ in range(5):
        L = random_observation(2, 2, 14, rng, max_rank=2)
        assert rank(field(2), L) <= 2
        rep = linear_observation_report(sf8, hamming74(), L)
        assert rep.affine_conditionals


def test_side_channel_round_trip():
    P = SideChannelProtocol(toeplitz_family(8, 2))
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = tuple(int(v) for v in rng.integers(0, 2, 2))
        main, side = general_encode(P, x, rng)
        assert general_decode(P, main, side) == x
    with pytest.raises(ShapeMismatch):
        general_decode(P, (0,) * 8, (0,))


def test_constant_main_channel_gives_strongness():
    E = toeplitz_family(6, 2)
    P = SideChannelProtocol(E)
    A = GeneralAdversary(np.zeros(64, dtype=int), np.arange(1 << E.t), 0, E.t)
    rep = general_adversary_report(P, A)
    full = SourceDescriptor.symbol_fixing(2, 6, {})
    assert rep.strongness == strongness_of(E, full)
    assert rep.classifier_mass == 0 and rep.leakage_bounded


@pytest.mark.parametrize("make", [
    lambda E: projection_adversary(E.n, E.t, 2),
    lambda E: parity_adversary(E.n, E.t, 2),
    lambda E: decoder_probe_adversary(E, 0),
])
def test_balanced_adversaries_have_no_classifier_mass(make):
    E = toeplitz_family(8, 2)
    rep = general_adversary_report(SideChannelProtocol(E), make(E))
    assert rep.classifier_mass == 0
    assert rep.leakage_bounded
    assert rep.threshold == 2.0 ** (8 * (1 - 2 / 8 - 1 / 8))


def test_unbalanced_adversary_hits_classifier():
    E = toeplitz_family(6, 2)
    c1 = np.zeros(64, dtype=int)
    c1[0] = 1  # one observation with a single preimage
    A = GeneralAdversary(c1, np.arange(1 << E.t), 1, E.t)
    rep = general_adversary_report(SideChannelProtocol(E), A)
    assert rep.classifier_mass == Fraction(1, 64)
    assert rep.leakage_bounded


def test_adversary_json_round_trip():
    A = parity_adversary(8, 9, 2)
    B = GeneralAdversary.from_json(A.to_json())
    assert np.array_equal(A.c1, B.c1) and np.array_equal(A.c2, B.c2) and B.t == A.t
    with pytest.raises(DomainError):
        GeneralAdversary([0, 4], [0, 1], 2, 1)
