"""
ORB keypoints under rotation
============================

Detect and describe keypoints on a textured scene, rotate it by a quarter
turn and count how many descriptors still find their partner.
"""

import numpy as np

from somiap import synthetic
from somiap.features import match_descriptors, orb_detect_describe
from somiap.imagecore import to_gray

img = to_gray(synthetic.scene(5))
keys = orb_detect_describe(img)
print(len(keys), "keypoints,", keys.descriptors.shape[1] * 8, "bit descriptors")

rotated = np.ascontiguousarray(np.rot90(img))
keys_rot = orb_detect_describe(rotated)

# The ratio test keeps a match only when the best Hamming distance is well
# below the second best.
rep = match_descriptors(keys_rot, keys)
print(f"{rep.good_count} good matches, match-back {rep.good_count / min(len(keys), len(keys_rot)):.0%}")

###############################################################################
# A different scene gives far fewer survivors.
other = orb_detect_describe(to_gray(synthetic.scene(6)))
print("unrelated scene:", match_descriptors(other, keys).good_count, "good matches")
