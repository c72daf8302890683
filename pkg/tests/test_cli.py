import json

import numpy as np
import pytest

import scenario
from conftest import CASCADE_PATH, PORTRAIT_PATH
from somiap import cli, facedetect, manifest, synthetic
from somiap.cli import EXIT_IO, EXIT_MODEL, EXIT_OK, EXIT_USAGE, main
from somiap.imagecore import read_image, resize_bilinear, to_gray, write_image


@pytest.fixture(autouse=True)
def cascade_env(monkeypatch):
    monkeypatch.setenv(facedetect.CASCADE_ENV, str(CASCADE_PATH))


@pytest.fixture
def scenes(tmp_path):
    paths = []
    for i in range(3):
        p = tmp_path / f"scene{i}.png"
        write_image(p, scenario.scene(i))
        paths.append(p)
    return paths


def test_enroll_fresh_and_repeat(tmp_path, scenes, capsys):
    idx = tmp_path / "index.json"
    assert main(["enroll-place", str(idx), str(scenes[0]), "--id", "s0", "--name", "Zero"]) == EXIT_OK
    data = json.loads(idx.read_text())
    assert len(data["places"]) == 1 and data["places"][0]["name"] == "Zero"
    before = idx.read_bytes()
    assert main(["enroll-place", str(idx), str(scenes[1]), "--id", "s0"]) == EXIT_MODEL
    assert idx.read_bytes() == before
    assert "already enrolled" in capsys.readouterr().err


def test_enroll_unreadable_path(tmp_path, capsys):
    missing = tmp_path / "nope.png"
    assert main(["enroll-place", str(tmp_path / "i.json"), str(missing), "--id", "x"]) == EXIT_IO
    assert str(missing) in capsys.readouterr().err
    assert not (tmp_path / "i.json").exists()


def test_enroll_undecodable(tmp_path, capsys):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"\x89PNG\r\n\x1a\nrubbish")
    assert main(["enroll-place", str(tmp_path / "i.json"), str(bad), "--id", "x"]) == EXIT_IO
    assert "bad.png" in capsys.readouterr().err


def test_usage_error():
    assert main(["enroll-place"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE
    assert main(["--help"]) == EXIT_OK


def write_face_dirs(root, labels):
    for label, faces in labels.items():
        d = root / label
        d.mkdir(parents=True)
        for k, face in enumerate(faces):
            write_image(d / f"{k}.png", np.stack([face] * 3, axis=2))


def test_train_three_labels_cropped(tmp_path):
    g = scenario.gallery()
    by_label = {}
    for s in g.samples:
        by_label.setdefault(s.label, []).append(s.image)
    write_face_dirs(tmp_path / "faces", by_label)
    idx = tmp_path / "index.json"
    args = ["train-faces", str(idx), str(tmp_path / "faces"), "--assume-cropped"]
    assert main(args + ["--algo", "lbph"]) == EXIT_OK
    model = manifest.load(idx).face_model
    assert model.algorithm == "lbph" and sorted(set(model.labels)) == ["astronaut", "lfw_a", "lfw_b"]
    assert len(model.labels) == 15
    assert main(args + ["--algo", "auto"]) == EXIT_OK


def test_train_with_detection_reports_faceless_label(tmp_path, capsys):
    gray = to_gray(read_image(PORTRAIT_PATH))
    small = resize_bilinear(gray, 96, 96)
    blank = np.full((96, 96), 128, np.uint8)
    write_face_dirs(tmp_path / "faces", {"astro": [small], "ghost": [blank, blank]})
    idx = tmp_path / "index.json"
    code = main(["train-faces", str(idx), str(tmp_path / "faces"), "--algo", "lbph"])
    err = capsys.readouterr().err
    assert code == EXIT_MODEL and "ghost" in err and "0.png" in err and "1.png" in err
    assert not idx.exists()


def test_train_failures_leave_manifest_alone(tmp_path, scenes):
    idx = tmp_path / "index.json"
    assert main(["enroll-place", str(idx), str(scenes[0]), "--id", "s0"]) == EXIT_OK
    before = idx.read_bytes()
    (tmp_path / "empty").mkdir()
    assert main(["train-faces", str(idx), str(tmp_path / "empty"), "--assume-cropped"]) != EXIT_OK
    write_face_dirs(tmp_path / "one", {"solo": [synthetic.texture(i) for i in range(3)]})
    code = main(["train-faces", str(idx), str(tmp_path / "one"), "--algo", "fisher", "--assume-cropped"])
    assert code == EXIT_MODEL
    assert idx.read_bytes() == before


def test_train_missing_cascade(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(facedetect.CASCADE_ENV, str(tmp_path / "absent.xml"))
    write_face_dirs(tmp_path / "faces", {"a": [synthetic.texture(1)]})
    assert main(["train-faces", str(tmp_path / "i.json"), str(tmp_path / "faces")]) == EXIT_IO
    assert "cascade-fetch" in capsys.readouterr().err


def test_analyze_enrolled_and_blank(tmp_path, scenes, capsys):
    idx = tmp_path / "index.json"
    for i, p in enumerate(scenes):
        assert main(["enroll-place", str(idx), str(p), "--id", f"s{i}"]) == EXIT_OK
    capsys.readouterr()
    assert main(["analyze", str(idx), str(scenes[1])]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["place"]["entry_id"] == "s1" and report["place"]["hash_distance"] == 0
    assert report["version"] == 1

    blank = tmp_path / "blank.png"
    write_image(blank, np.zeros((100, 100, 3), np.uint8))
    assert main(["analyze", str(idx), str(blank)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["place"] is None and report["faces"] == []

    assert main(["analyze", str(idx), str(scenes[2]), "--format", "text"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert sum(line.startswith("candidate ") for line in lines) == 3
    assert lines[1] == "place s2"


def test_analyze_without_manifest(tmp_path, scenes, capsys):
    assert main(["analyze", str(tmp_path / "none.json"), str(scenes[0])]) == EXIT_IO
    assert "no manifest" in capsys.readouterr().err


def test_analyze_corrupt_manifest(tmp_path, scenes):
    idx = tmp_path / "index.json"
    idx.write_text('{"version": 7}')
    assert main(["analyze", str(idx), str(scenes[0])]) == EXIT_MODEL


def write_pairs(tmp_path, n=6):
    rows = ["path_a,path_b,label"]
    for i in range(n):
        img = synthetic.scene(200 + i, 96, 96, shapes=20)
        write_image(tmp_path / f"o{i}.png", img)
        write_image(tmp_path / f"n{i}.png", synthetic.add_noise(img, 4, seed=i))
        rows.append(f"o{i}.png,n{i}.png,similar")
    for i in range(n):
        rows.append(f"o{i}.png,o{(i + 1) % n}.png,different")
    (tmp_path / "pairs.csv").write_text("\n".join(rows) + "\n")
    return tmp_path / "pairs.csv"


def test_calibrate_separable_set(tmp_path, capsys):
    pairs = write_pairs(tmp_path)
    assert main(["calibrate", str(pairs), "--format", "json"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert [r["algo"] for r in rows] == ["dhash_gray", "dhash_color", "phash_gray", "phash_color"]
    assert all(r["accuracy"] >= 0.9 for r in rows)
    assert main(["calibrate", str(pairs)]) == EXIT_OK
    header = capsys.readouterr().out.splitlines()[0]
    for col in ("Weight similar", "Weight different", "Threshold", "Accuracy"):
        assert col in header


def test_calibrate_label_typo(tmp_path, capsys):
    write_image(tmp_path / "a.png", synthetic.scene(1, 40, 40))
    (tmp_path / "p.csv").write_text("a.png,a.png,similar\na.png,a.png,simillar\n")
    assert main(["calibrate", str(tmp_path / "p.csv")]) == EXIT_IO
    assert "p.csv:2" in capsys.readouterr().err


def test_calibrate_single_identical_pair(tmp_path, capsys):
    write_image(tmp_path / "a.png", synthetic.scene(1, 40, 40))
    (tmp_path / "p.csv").write_text("a.png,a.png,similar\n")
    assert main(["calibrate", str(tmp_path / "p.csv"), "--algo", "phash_gray", "--format", "json"]) == 0
    (row,) = json.loads(capsys.readouterr().out)
    assert (row["weight_similar"], row["threshold"], row["accuracy"]) == (0.0, 0, 1.0)


def test_bench(tmp_path, capsys):
    for i in range(10):
        write_image(tmp_path / f"c{i}.png", synthetic.scene(i, 64, 64, shapes=10))
    (tmp_path / "p").mkdir()
    pairs = write_pairs(tmp_path / "p", 3)
    assert main(["bench", str(tmp_path), "--format", "json", "--pairs", str(pairs)]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 4
    for r in rows:
        assert r["min_ms"] <= r["mean_ms"] <= r["max_ms"] and r["n_images"] == 10
        assert r["threshold"] is not None
    assert main(["bench", str(tmp_path), "--algo", "dhash_gray"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "dhash_gray" in out and "phash_gray" not in out


def test_bench_empty_corpus(tmp_path):
    (tmp_path / "empty").mkdir()
    assert main(["bench", str(tmp_path / "empty")]) == EXIT_IO
    assert main(["bench", str(tmp_path / "missing")]) == EXIT_IO


def test_cascade_fetch_from_local_source(tmp_path, capsys):
    dest = tmp_path / "c" / "cascade.xml"
    assert main(["cascade-fetch", "--source", str(CASCADE_PATH), "--dest", str(dest)]) == EXIT_OK
    assert dest.read_bytes() == CASCADE_PATH.read_bytes()
    code = main(["cascade-fetch", "--source", str(CASCADE_PATH), "--dest", str(dest), "--sha256", "0" * 64])
    assert code == EXIT_IO and "checksum" in capsys.readouterr().err
    junk = tmp_path / "junk.xml"
    junk.write_text("<opencv_storage/>")
    assert main(["cascade-fetch", "--source", str(junk), "--dest", str(dest), "--sha256", ""]) == EXIT_MODEL
    assert dest.read_bytes() == CASCADE_PATH.read_bytes()


def test_default_checksum_matches_fixture():
    import hashlib

    assert hashlib.sha256(CASCADE_PATH.read_bytes()).hexdigest() == cli.CASCADE_SHA256
