"""
Haar cascade face detection
===========================

Load the OpenCV frontal-face cascade and run it over the portrait fixture.
Fetch a cascade with ``somiap cascade-fetch`` or point SOMIAP_CASCADE at one.
"""

from pathlib import Path

from somiap import facedetect
from somiap.imagecore import integral, read_image, to_gray

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

cascade = facedetect.load_cascade(FIXTURES / "haarcascade_frontalface_default.xml")
print(f"{len(cascade.stages)} stages, {cascade.window_w}x{cascade.window_h} window")

gray = to_gray(read_image(FIXTURES / "portrait.png"))
raw = facedetect.raw_detections(cascade, gray)
print(len(raw), "raw windows accepted")

# Overlapping hits are merged; groups with too few members are dropped.
for det in facedetect.detect_multiscale(cascade, gray):
    print("face at", det.rect, "from", det.neighbors, "windows")

###############################################################################
# A single window can be checked on its own against the integral image.
ii = integral(gray)
r = raw[0]
print(facedetect.eval_window(cascade, ii, r.x, r.y, r.w / cascade.window_w))
