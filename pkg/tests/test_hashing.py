import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exhaustive_threshold, naive_dct2_separable_check
from somiap import synthetic
from somiap.errors import ContractError
from somiap.hashing import (
    HashAlgo,
    HashDigest,
    calibrate,
    calibrate_distances,
    color_hash,
    compute_hash,
    dhash_gray,
    hamming,
    phash_gray,
)
from somiap.imagecore import resize_bilinear

bits64 = st.integers(0, 2**64 - 1)


def test_dhash_constant_is_zero():
    assert dhash_gray(np.full((40, 30), 90, np.uint8)).bits == 0


def test_dhash_increasing_rows_all_ones():
    img = np.tile(np.arange(0, 90, 10, dtype=np.uint8), (8, 1))
    assert dhash_gray(img).bits == 2**64 - 1


def test_dhash_alternating_rows():
    row = np.array([0, 255] * 4 + [0], np.uint8)
    d = dhash_gray(np.tile(row, (8, 1)))
    assert [d.bit(i) for i in range(64)] == [1, 0] * 32


def test_phash_constant_has_single_dc_bit():
    d = phash_gray(np.full((50, 50), 140, np.uint8))
    assert d.bits.bit_count() == 1 and d.bit(0) == 1


def test_phash_bits_follow_dct_oracle(rng):
    img = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
    low = naive_dct2_separable_check(resize_bilinear(img, 32, 32).astype(float))[:8, :8]
    ac_mean = (low.sum() - low[0, 0]) / 63
    expected = [int(v > ac_mean) for v in low.ravel()]
    d = phash_gray(img)
    assert [d.bit(i) for i in range(64)] == expected


def test_phash_self_distance_zero(rng):
    img = rng.integers(0, 256, size=(33, 47), dtype=np.uint8)
    assert hamming(phash_gray(img), phash_gray(img)) == 0


def test_phash_noise_monotone(rng):
    low, high = [], []
    for seed in range(20):
        img = synthetic.scene(seed, 64, 64, shapes=12)
        base = compute_hash(img, HashAlgo.PHASH_GRAY)
        low.append(hamming(base, compute_hash(synthetic.add_noise(img, 5, seed), HashAlgo.PHASH_GRAY)))
        high.append(hamming(base, compute_hash(synthetic.add_noise(img, 30, seed), HashAlgo.PHASH_GRAY)))
    assert np.median(low) <= np.median(high)


def test_color_hash_equal_planes(rng):
    gray = rng.integers(0, 256, size=(20, 20), dtype=np.uint8)
    img = np.stack([gray] * 3, axis=2)
    for base in ("dhash", "phash"):
        d = color_hash(img, base)
        segs = [(d.bits >> s) & (2**64 - 1) for s in (128, 64, 0)]
        assert segs[0] == segs[1] == segs[2]


def test_color_hash_segments_are_channel_hashes(rng):
    img = rng.integers(0, 256, size=(24, 31, 3), dtype=np.uint8)
    d = color_hash(img, "dhash")
    for k, shift in enumerate((128, 64, 0)):
        assert (d.bits >> shift) & (2**64 - 1) == dhash_gray(img[..., k].copy()).bits


def test_color_constant_dhash_zero():
    d = color_hash(np.full((10, 10, 3), (10, 200, 30), np.uint8), "dhash")
    assert d.bits == 0 and d.width == 192


def test_color_hash_unknown_base():
    with pytest.raises(ContractError):
        color_hash(np.zeros((4, 4, 3), np.uint8), "ahash")


def test_hamming_examples():
    zero = HashDigest(HashAlgo.DHASH_GRAY, 0)
    ones = HashDigest(HashAlgo.DHASH_GRAY, 2**64 - 1)
    assert hamming(zero, zero) == 0
    assert hamming(zero, ones) == 64
    flipped = HashDigest(HashAlgo.DHASH_GRAY, (1 << 3) | (1 << 40) | (1 << 63))
    assert hamming(zero, flipped) == 3


def test_hamming_rejects_mixed_algos():
    with pytest.raises(ContractError):
        hamming(HashDigest(HashAlgo.DHASH_GRAY, 0), HashDigest(HashAlgo.PHASH_GRAY, 0))


@settings(max_examples=200)
@given(bits64, bits64, bits64)
def test_hamming_is_a_metric(a, b, c):
    da, db, dc = (HashDigest(HashAlgo.PHASH_GRAY, v) for v in (a, b, c))
    assert hamming(da, db) == hamming(db, da)
    assert (hamming(da, db) == 0) == (a == b)
    assert hamming(da, dc) <= hamming(da, db) + hamming(db, dc)


def test_digest_text_round_trip():
    d = HashDigest(HashAlgo.DHASH_COLOR, 12345)
    assert str(d).startswith("dhash_color:") and len(d.to_hex()) == 48
    assert HashDigest.parse(str(d)) == d
    with pytest.raises(ContractError):
        HashDigest.parse("dhash_gray:ff")
    with pytest.raises(ContractError):
        HashDigest(HashAlgo.DHASH_GRAY, 2**64)


def test_calibrate_separated():
    r = calibrate_distances([2, 3, 4], [10, 11, 12], HashAlgo.DHASH_GRAY)
    assert (r.threshold, r.accuracy, r.weight_similar, r.weight_different) == (4, 1.0, 3.0, 11.0)


def test_calibrate_indistinguishable_takes_smallest():
    r = calibrate_distances([5], [5], HashAlgo.DHASH_GRAY)
    assert r.accuracy == 0.5 and r.threshold == 0


def test_calibrate_matches_exhaustive_scan(rng):
    for width, algo in ((64, HashAlgo.PHASH_GRAY), (192, HashAlgo.PHASH_COLOR)):
        for _ in range(10):
            sim = rng.integers(0, width // 2, size=20).tolist()
            diff = rng.integers(width // 4, width + 1, size=20).tolist()
            r = calibrate_distances(sim, diff, algo)
            assert (r.threshold, r.accuracy) == exhaustive_threshold(sim, diff, width)


def test_calibrate_rejects_bad_input():
    with pytest.raises(ContractError):
        calibrate_distances([], [1], HashAlgo.DHASH_GRAY)
    with pytest.raises(ContractError):
        calibrate_distances([65], [1], HashAlgo.DHASH_GRAY)


def test_calibrate_on_image_pairs():
    scenes = [synthetic.scene(s, 64, 64, shapes=15) for s in range(8)]
    similar = [(s, synthetic.add_noise(s, 3, i)) for i, s in enumerate(scenes)]
    different = [(scenes[i], scenes[i + 1]) for i in range(7)]
    r = calibrate(similar, different, "phash_gray")
    assert r.accuracy >= 0.9 and r.n_similar == 8 and r.n_different == 7
