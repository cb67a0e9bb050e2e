from itertools import product

import numpy as np
import pytest

from prppsm.modem import demap_symbol, make_alphabet, map_bits, quantize

NAMES = ["BPSK", "QAM4", "QAM8", "QAM16", "QAM32", "QAM64", "PSK8"]


def test_bpsk_points():
    a = make_alphabet("BPSK")
    np.testing.assert_array_equal(a.symbols, [1, -1])
    assert a.bits_per_symbol == 1


def test_qam4_unnormalized_points():
    a = make_alphabet("QAM4")
    np.testing.assert_allclose(
        a.symbols * np.sqrt(2), [1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], atol=1e-15
    )


def test_qam8_is_rectangular_grid():
    pts = make_alphabet("QAM8").symbols * np.sqrt(6)
    assert sorted(set(np.round(pts.real, 12))) == [-3, -1, 1, 3]
    assert sorted(set(np.round(pts.imag, 12))) == [-1, 1]


@pytest.mark.parametrize("name", NAMES)
def test_unit_energy_and_distinct(name):
    a = make_alphabet(name)
    assert np.mean(np.abs(a.symbols) ** 2) == pytest.approx(1.0, abs=1e-12)
    assert len(set(np.round(a.symbols, 12))) == a.size
    assert a.size == 2**a.bits_per_symbol


def test_qam8_energy_by_hand():
    raw = np.array([x + 1j * y for x in (-3, -1, 1, 3) for y in (-1, 1)])
    assert np.mean(raw.real**2 + raw.imag**2) == 6.0
    pts = make_alphabet("QAM8").symbols
    np.testing.assert_allclose(sorted(np.abs(pts) ** 2), sorted(np.abs(raw) ** 2 / 6.0), atol=1e-12)


def test_unknown_name():
    with pytest.raises(ValueError):
        make_alphabet("QAM7")
    with pytest.raises(ValueError):
        make_alphabet("OOK")


@pytest.mark.parametrize("bits,value", [([0], 1), ([1], -1)])
def test_bpsk_mapping(bits, value):
    assert map_bits(make_alphabet("BPSK"), bits) == value


def test_wrong_word_length():
    with pytest.raises(ValueError):
        map_bits(make_alphabet("QAM8"), [0, 1])


@pytest.mark.parametrize("name", NAMES)
def test_round_trip_exhaustive(name):
    a = make_alphabet(name)
    seen = set()
    for word in product((0, 1), repeat=a.bits_per_symbol):
        s = map_bits(a, word)
        seen.add(np.round(s, 12))
        idx, bits = demap_symbol(a, s)
        assert tuple(bits) == word
    assert len(seen) == a.size


@pytest.mark.parametrize("name", ["QAM4", "QAM8", "QAM16", "QAM64", "PSK8"])
def test_gray_nearest_neighbours_differ_in_one_bit(name):
    a = make_alphabet(name)
    pts = a.symbols
    dist = np.abs(pts[:, None] - pts[None, :])
    dmin = dist[dist > 0].min()
    pairs = np.argwhere(np.isclose(dist, dmin, rtol=1e-9))
    assert len(pairs) > 0
    for i, j in pairs:
        assert bin(int(i) ^ int(j)).count("1") == 1


def test_quantizer_nearest_and_tie():
    a = make_alphabet("BPSK")
    assert demap_symbol(a, 0.3)[0] == 0
    assert demap_symbol(a, -0.01 + 5j)[0] == 1
    assert demap_symbol(a, 0.0)[0] == 0


@pytest.mark.parametrize("name", NAMES)
def test_quantizer_matches_brute_force(rng, name):
    a = make_alphabet(name)
    z = (rng.standard_normal(500) + 1j * rng.standard_normal(500)) * 1.5
    got = quantize(a, z)
    for zi, gi in zip(z, got):
        best = min(range(a.size), key=lambda k: abs(zi - a.symbols[k]) ** 2)
        assert gi == best
