"""
Perceptual hashing and threshold calibration
============================================

Hash a few synthetic scenes, compare them, and pick a distance threshold
from labelled pairs.
"""

import numpy as np

from somiap import synthetic
from somiap.hashing import HashAlgo, calibrate, compute_hash, hamming

# A scene and a lightly noised copy should land close together, an unrelated
# scene far away.
a = synthetic.scene(1)
a_noisy = synthetic.add_noise(a, 4, seed=0)
b = synthetic.scene(2)

for algo in HashAlgo:
    da, dn, db = (compute_hash(img, algo) for img in (a, a_noisy, b))
    print(f"{algo.value:12s} width {algo.bit_width:3d}  near {hamming(da, dn):3d}  far {hamming(da, db):3d}")

# Digests print as "<algo>:<hex>" and parse back.
d = compute_hash(a, "phash_gray")
print(d)

###############################################################################
# Calibration: the threshold is swept over every distance and the one with
# the best accuracy wins, ties going to the smallest value.

scenes = [synthetic.scene(10 + i, 96, 96, shapes=20) for i in range(8)]
similar = [(s, synthetic.add_noise(s, 3, seed=i)) for i, s in enumerate(scenes)]
different = [(scenes[i], scenes[(i + 1) % 8]) for i in range(8)]
rep = calibrate(similar, different, HashAlgo.PHASH_GRAY)
print(rep)

# Color hashes are three gray hashes side by side, so they cost about three
# times as much to compute.
print(np.array([compute_hash(a, "dhash_color").bits >> s & (2**64 - 1) for s in (128, 64, 0)]))
