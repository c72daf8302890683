"""
Eigenfaces, Fisherfaces and LBPH
================================

Train all three recognizers on a small gallery of textures and ask each to
name a slightly shifted probe.
"""

import numpy as np

from somiap import synthetic
from somiap.facerecog import Gallery, predict, select_recognizer, train
from somiap.numerics import jacobi_eigh

rng = np.random.default_rng(0)
pairs = []
for c in range(3):
    base = synthetic.texture(100 + c, 64, 8).astype(int)
    for _ in range(4):
        noisy = np.clip(base + rng.integers(-6, 7, size=base.shape), 0, 255).astype(np.uint8)
        pairs.append((f"person{c}", noisy))
gallery = Gallery.from_pairs(pairs)

# The probe is person1 moved by one pixel. Eigenfaces compares pixels in a
# linear subspace and can be fooled by the shift; LBPH histograms are built to
# tolerate it.
probe = np.roll(synthetic.texture(101, 64, 8), 1, axis=1)
for algo in ("eigen", "fisher", "lbph"):
    model = train(gallery, algo)
    print(algo, predict(model, probe))

print("auto picks", select_recognizer("auto", gallery))

###############################################################################
# The PCA and LDA steps run on a Jacobi eigensolver written in numpy.
a = rng.normal(size=(6, 6))
dec = jacobi_eigh(a + a.T)
print(np.round(dec.values, 4))
