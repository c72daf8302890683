"""Sampling pattern for the binary descriptor.

256 point pairs ``(x1, y1, x2, y2)`` relative to the keypoint, drawn from an
isotropic Gaussian (sigma = 31 / 5) clipped to the 31x31 patch. Generated
once with ``numpy.random.default_rng(20200819)``; do not edit by hand.
"""

PATTERN = (
    (-2, 13, -3, 0), (-2, -3, 2, 1), (6, 12, 6, -4), (2, 2, -5, 2),
    (-6, -2, 1, 0), (-5, -6, -1, -5), (-2, -2, -2, 2), (14, -8, 5, 10),
    (-3, -4, -4, -4), (-3, -2, -10, 7), (5, -1, 4, -9), (7, 4, -7, -2),
    (-4, -12, 3, 5), (-4, -1, 13, 12), (3, -3, 7, -15), (1, 3, -3, -1),
    (5, 7, -5, -5), (-7, -2, -4, -1), (-3, -2, -2, 7), (3, 9, 4, 3),
    (1, 5, 2, -1), (-3, -11, -2, 10), (3, -2, 0, -1), (-1, 5, -3, -4),
    (-2, -2, 3, 1), (3, 8, -3, -5), (-3, -8, -7, 2), (9, 14, -1, -8),
    (-15, 0, 4, -7), (4, -5, -11, -7), (-6, -12, 1, -1), (-8, 6, 2, 6),
    (1, 8, -2, 7), (11, 0, -11, -1), (9, -5, -4, -3), (6, 14, 8, 0),
    (-2, -3, -5, -1), (-4, -6, -1, 3), (12, -3, 8, 4), (0, 0, -5, 0),
    (3, 0, 3, 3), (3, -2, 3, 1), (-4, 5, 7, 2), (-1, -2, 2, -7),
    (-3, 4, 4, -5), (-1, 4, -4, 3), (5, -3, 5, -2), (-4, 4, 1, 5),
    (-4, -3, 2, 8), (1, 10, 3, 3), (-13, 1, -5, 3), (5, 9, -5, -7),
    (5, -4, -15, -7), (-2, 9, 1, -3), (3, 5, -4, 2), (-4, -6, -4, 8),
    (-4, 4, 6, 3), (-1, -6, 6, -1), (-10, 8, 3, -9), (-3, -4, -13, -5),
    (-1, 10, -2, 5), (-1, 6, -3, -10), (-2, 6, -9, -2), (5, -5, 8, 11),
    (6, -4, -1, -3), (7, 3, 3, -7), (-7, -3, 0, -6), (-2, -15, -11, 8),
    (5, -4, 0, 4), (-12, -5, 4, 11), (-6, -8, 0, 1), (0, 0, 13, 9),
    (-6, 8, 4, -12), (6, 3, -5, 8), (-5, 15, -2, 9), (0, 4, -6, 8),
    (-4, 11, -13, -1), (-5, -5, -7, 3), (2, 6, -5, 4), (-2, -4, 2, -4),
    (4, 0, -4, 0), (-2, -3, -7, -12), (5, 7, 7, -5), (12, 7, 3, 0),
    (1, 0, 5, 2), (-1, -6, -10, -2), (0, 2, 3, 5), (5, 0, 0, 2),
    (-15, -5, -1, 0), (-6, 0, -4, -2), (0, -5, -5, -7), (-10, -2, 1, 6),
    (-5, 11, -12, -10), (-3, 9, -10, -4), (7, 1, 1, 3), (8, 6, -9, -3),
    (-8, 1, 5, 4), (-2, -4, -6, 8), (-13, 9, 2, -2), (-12, -1, 0, -5),
    (6, -4, 8, 4), (2, 6, 7, 1), (4, 6, -10, 10), (2, -6, -4, -3),
    (9, -2, -2, 9), (2, -4, 5, 4), (-1, -2, 12, 9), (-1, -15, 6, 3),
    (1, 15, 10, -8), (-9, 8, 8, -2), (-7, 5, -6, -2), (-2, 14, 3, 5),
    (-9, -7, 9, 4), (4, 2, 4, 1), (-4, 4, 8, 10), (0, 3, -13, -2),
    (14, -3, -6, 5), (-2, -5, -5, -5), (8, -4, -4, 3), (-2, 6, -4, -1),
    (-14, -3, -2, -5), (-9, -3, 2, 1), (1, 9, 4, 1), (-1, 7, 6, 9),
    (-1, 4, 0, 0), (0, -9, -2, 3), (6, 5, 10, 6), (-3, -2, -6, -14),
    (6, 7, 3, 2), (-6, -5, 1, -8), (10, 9, -7, 1), (-2, -1, 5, 4),
    (-7, -1, -3, 5), (-4, -1, -3, 3), (-14, -12, -3, -4), (-5, -6, -3, 2),
    (-7, -5, 1, 4), (5, -5, -7, 1), (4, 9, 3, -1), (-7, -5, 0, 2),
    (1, -5, -15, -7), (-2, -8, 2, -2), (-3, -6, -10, 8), (-1, -2, 2, 5),
    (-7, 2, 7, -5), (5, -2, 5, -1), (10, 3, 1, 3), (0, 3, -1, 3),
    (-6, -7, -1, 6), (-7, 2, 9, 6), (5, -6, -6, -4), (7, 1, 4, -4),
    (5, 0, 4, 11), (-7, 13, -7, 3), (-4, -7, -2, 9), (-3, -10, 0, 2),
    (0, 2, 0, 7), (4, 0, 13, 5), (-8, 2, 3, -1), (-3, -5, -7, 7),
    (4, -11, 2, -1), (9, 0, 7, 0), (-12, 3, -10, -3), (1, 4, 4, 0),
    (0, 10, 11, -2), (-1, 6, 5, 1), (-6, 0, -4, 5), (-1, 8, -14, 8),
    (-8, 2, -7, -1), (4, -3, 5, 3), (-1, 13, 14, 13), (-2, 3, -6, -1),
    (5, -5, -15, -5), (-6, 9, 4, -5), (1, 15, -2, -4), (-12, -2, 6, -2),
    (2, -4, 6, -10), (-5, 3, -1, 7), (7, -5, 5, -8), (2, 1, -1, -6),
    (-5, -4, -4, 3), (10, -6, 1, 3), (-6, -5, -6, 9), (-11, -8, -7, 4),
    (2, 7, -14, 11), (4, -3, 1, -7), (-4, 2, 12, -15), (0, 9, 2, 3),
    (5, 0, -2, 0), (-1, 6, 1, -1), (0, 5, -4, -2), (-4, 3, -9, 2),
    (1, -8, -9, 8), (-2, 13, -2, 3), (7, 8, 4, 7), (-7, 4, 15, 5),
    (-1, -7, 0, -4), (1, -2, 5, -2), (8, -9, 13, 5), (10, 2, 2, -1),
    (-2, 3, -4, -3), (4, -5, 8, 3), (-6, 2, 6, 4), (3, -6, 7, -7),
    (-6, 2, 0, -7), (-1, 2, -2, -9), (-1, -4, -3, -5), (0, -11, 2, 5),
    (0, -1, -4, -3), (-7, 8, -12, -8), (10, 1, 2, 9), (0, -7, 15, -10),
    (3, -7, 2, 15), (0, -12, 2, 9), (7, 0, 0, 10), (-7, -2, -1, 5),
    (6, -2, 7, 3), (2, 6, 9, -6), (-9, 3, -15, 8), (-2, 8, -3, 8),
    (-6, -2, -5, 8), (8, 8, 0, 1), (-12, -5, -2, -5), (-10, -3, 1, 12),
    (2, 2, 9, -4), (7, 6, -4, -14), (-7, 5, -9, 4), (4, 0, 6, -9),
    (-3, -6, -9, -8), (-3, -5, 3, 6), (-2, 3, -2, 7), (7, -13, -5, -6),
    (3, 1, 13, -4), (-5, 1, -8, 3), (3, 0, 13, -4), (-4, 5, -3, 2),
    (0, -12, -5, -4), (7, -9, -1, -4), (12, -1, -4, -3), (1, -4, -4, 0),
    (-6, -3, -6, 2), (-1, -10, -4, -8), (2, 3, -1, 5), (1, 2, -14, -15),
    (2, 5, 1, 1), (3, 13, 13, 8), (-6, 12, -5, 13), (-8, 2, 5, 1),
    (7, 10, 2, -6), (-4, -13, 1, -1), (0, -6, -7, 6), (5, -5, 4, -8),
    (4, -11, 0, -2), (-10, 2, -3, 7), (-11, -3, -6, -2), (4, -9, -3, -1),
)
