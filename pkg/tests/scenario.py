"""The place + identity scenario shared by the pipeline, CLI and acceptance tests.

Ten synthetic scenes form the place index. The face gallery has three
labels: the astronaut from the portrait fixture (seen through the detector
at five resolutions) and two faces from ``fixtures/faces``. The composite
query pastes the astronaut's head into scene 4.
"""

from functools import lru_cache

import numpy as np

from conftest import CASCADE_PATH, FIXTURES, PORTRAIT_PATH
from somiap import facedetect, facerecog, synthetic
from somiap.imagecore import Rect, read_image, resize_bilinear, to_gray
from somiap.pipeline import PlaceIndex, enroll_place

N_SCENES = 10
QUERY_SCENE = 4
HEAD_BOX = (57, 50, 140, 150)  # x, y, w, h around the face in portrait.png
HEAD_SIZE = 64
HEAD_AT = (150, 150)
TRAIN_SIDES = (256, 160, 112, 80, 64)
OTHER_FACES = {"lfw_a": "lfw_003.png", "lfw_b": "lfw_017.png"}


def scene(i):
    return synthetic.scene(100 + i)


def resize_color(img, w, h):
    return np.stack(
        [resize_bilinear(np.ascontiguousarray(img[..., c]), w, h) for c in range(3)], axis=2
    )


@lru_cache(maxsize=None)
def place_index():
    index = PlaceIndex()
    for i in range(N_SCENES):
        index = enroll_place(index, scene(i), f"scene{i}", f"Scene {i}")
    return index


@lru_cache(maxsize=None)
def cascade():
    return facedetect.load_cascade(CASCADE_PATH)


def astronaut_faces():
    gray = to_gray(read_image(PORTRAIT_PATH))
    faces = []
    for side in TRAIN_SIDES:
        img = gray if side == gray.shape[0] else resize_bilinear(gray, side, side)
        det = facedetect.largest(facedetect.detect_multiscale(cascade(), img))
        faces.append(facerecog.normalize_face(img, det.rect))
    return faces


def other_faces(filename):
    face = to_gray(read_image(FIXTURES / "faces" / filename))
    jitter = [(0, 0, 0), (2, 0, 0), (0, 2, 0), (-2, -2, 4), (1, -1, -2)]
    return [facerecog.normalize_face(face, Rect(2 + dx, 2 + dy, 60 + ds, 60 + ds))
            for dx, dy, ds in jitter]


@lru_cache(maxsize=None)
def gallery():
    pairs = [("astronaut", f) for f in astronaut_faces()]
    for label, filename in OTHER_FACES.items():
        pairs += [(label, f) for f in other_faces(filename)]
    return facerecog.Gallery.from_pairs(pairs)


def composite_query():
    portrait = read_image(PORTRAIT_PATH)
    x, y, w, h = HEAD_BOX
    head = resize_color(portrait[y : y + h, x : x + w], HEAD_SIZE, round(HEAD_SIZE * h / w))
    return synthetic.paste(scene(QUERY_SCENE), head, *HEAD_AT)
