from pathlib import Path

import numpy as np
import pytest

from somiap import facedetect
from somiap.imagecore import Rect, read_image

FIXTURES = Path(__file__).parent / "fixtures"
CASCADE_PATH = FIXTURES / "haarcascade_frontalface_default.xml"
PORTRAIT_PATH = FIXTURES / "portrait.png"
# annotated by hand: the face box in portrait.png
PORTRAIT_FACE = Rect(82, 78, 90, 94)


@pytest.fixture(scope="session")
def cascade():
    return facedetect.load_cascade(CASCADE_PATH)


@pytest.fixture(scope="session")
def portrait():
    return read_image(PORTRAIT_PATH)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def hand_cascade_xml(stage_threshold=0.5, feature_type="HAAR", width=4, height=4):
    """One stage, one stump on a left/right two-rect feature."""
    return f"""<?xml version="1.0"?>
<opencv_storage>
<cascade type_id="opencv-cascade-classifier">
  <stageType>BOOST</stageType>
  <featureType>{feature_type}</featureType>
  <height>{height}</height>
  <width>{width}</width>
  <stageNum>1</stageNum>
  <stages>
    <_>
      <maxWeakCount>1</maxWeakCount>
      <stageThreshold>{stage_threshold}</stageThreshold>
      <weakClassifiers>
        <_><internalNodes>0 -1 0 0.5</internalNodes><leafValues>1.0 -1.0</leafValues></_>
      </weakClassifiers></_>
  </stages>
  <features>
    <_><rects><_>0 0 4 4 -1.</_><_>0 0 2 4 2.</_></rects></_>
  </features></cascade>
</opencv_storage>
"""


# one "PASS/FAIL criterion N: ..." line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
