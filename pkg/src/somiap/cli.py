"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 IO or decode failure, 3 model or contract failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import shutil
import sys
import tempfile
import urllib.request
from pathlib import Path

from . import bench, facedetect, facerecog, manifest
from .errors import (
    ConflictError,
    ContractError,
    DecodeError,
    ManifestError,
    ModelParseError,
    SomiapError,
)
from .hashing import HashAlgo
from .imagecore import Rect, read_image, to_gray
from .pipeline import StageError, analyze, enroll_place

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_MODEL = 0, 1, 2, 3

CASCADE_URL = (
    "https://raw.githubusercontent.com/opencv/opencv/4.x/data/haarcascades/"
    "haarcascade_frontalface_default.xml"
)
CASCADE_SHA256 = "0f7d4527844eb514d4a4948e822da90fbb16a34a0bbbbc6adc6498747a5aafb0"
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".ppm", ".pgm"}


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(f"somiap: {msg}", file=sys.stderr)


def _read(path) -> object:
    try:
        return read_image(path)
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    except DecodeError as exc:
        raise CommandError(f"cannot decode {path}: {exc}", EXIT_IO) from None


def _load_manifest(path, must_exist=False):
    try:
        if must_exist:
            return manifest.load(path)
        return manifest.load_or_new(path)
    except FileNotFoundError:
        raise CommandError(f"no manifest at {path}", EXIT_IO) from None
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}", EXIT_IO) from None
    except ManifestError as exc:
        raise CommandError(f"{path}: {exc}", EXIT_MODEL) from None


def _save_manifest(path, value) -> None:
    try:
        manifest.save(path, value)
    except OSError as exc:
        raise CommandError(f"cannot write {path}: {exc}", EXIT_IO) from None


def _load_cascade(path=None):
    path = Path(path) if path else facedetect.default_cascade_path()
    try:
        return facedetect.load_cascade(path)
    except OSError:
        raise CommandError(
            f"cascade not found at {path}; run `somiap cascade-fetch` or set "
            f"{facedetect.CASCADE_ENV}", EXIT_IO) from None
    except ModelParseError as exc:
        raise CommandError(f"{path}: {exc}", EXIT_MODEL) from None


# --------------------------------------------------------------------------
# commands


def cmd_enroll_place(args) -> int:
    img = _read(args.image)
    with manifest.locked(args.index):
        current = _load_manifest(args.index)
        try:
            index = enroll_place(current.index, img, args.id, args.name or args.id)
        except ConflictError as exc:
            raise CommandError(str(exc), EXIT_MODEL) from None
        _save_manifest(args.index, manifest.Manifest(index, current.face_model))
    print(f"enrolled {args.id} ({len(index)} places)")
    return EXIT_OK


def _face_images(root: Path):
    if not root.is_dir():
        raise CommandError(f"faces directory {root} does not exist", EXIT_IO)
    layout = {}
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        files = sorted(p for p in sub.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        if files:
            layout[sub.name] = files
    if not layout:
        raise CommandError(f"{root} holds no label directories with images", EXIT_IO)
    return layout


def cmd_train_faces(args) -> int:
    layout = _face_images(Path(args.faces_dir))
    cascade = None if args.assume_cropped else _load_cascade(args.cascade)
    size = facerecog.CANONICAL_SIZE
    pairs, missing = [], {}
    for label, files in layout.items():
        found = 0
        for f in files:
            gray = to_gray(_read(f))
            if cascade is None:
                rect = Rect(0, 0, gray.shape[1], gray.shape[0])
            else:
                det = facedetect.largest(facedetect.detect_multiscale(cascade, gray))
                if det is None:
                    missing.setdefault(label, []).append(str(f))
                    continue
                rect = det.rect
            pairs.append((label, facerecog.normalize_face(gray, rect, size)))
            found += 1
        if found == 0:
            missing.setdefault(label, [])
    empty = [lbl for lbl in layout if lbl in missing and len(missing[lbl]) == len(layout[lbl])]
    if empty:
        listing = "; ".join(f"{lbl}: {', '.join(missing[lbl])}" for lbl in empty)
        raise CommandError(f"no detectable face for label(s) {listing}", EXIT_MODEL)
    for lbl, files in missing.items():
        for f in files:
            _err(f"warning: no face detected in {f} (label {lbl}), skipped")
    gallery = facerecog.Gallery.from_pairs(pairs)
    try:
        model = facerecog.train(gallery, args.algo)
    except ContractError as exc:
        raise CommandError(f"training failed: {exc}", EXIT_MODEL) from None
    with manifest.locked(args.index):
        current = _load_manifest(args.index)
        _save_manifest(args.index, manifest.Manifest(current.index, model))
    print(f"trained {model.algorithm} on {len(gallery.samples)} faces, {len(gallery.labels)} labels")
    return EXIT_OK


def cmd_analyze(args) -> int:
    current = _load_manifest(args.index, must_exist=True)
    img = _read(args.image)
    cascade = None if args.no_faces else _load_cascade(args.cascade)
    try:
        report = analyze(current.index, cascade, current.face_model, img)
    except StageError as exc:
        raise CommandError(str(exc), EXIT_MODEL) from None
    if args.format == "json":
        print(report.to_json(indent=2))
    else:
        print(report.to_text())
    return EXIT_OK


def _json_safe(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _algos(choice: str):
    return list(HashAlgo) if choice == "all" else [HashAlgo(choice)]


def cmd_calibrate(args) -> int:
    try:
        rows = bench.read_pairs(args.pairs_file)
    except OSError as exc:
        raise CommandError(f"cannot read {args.pairs_file}: {exc}", EXIT_IO) from None
    except bench.PairFileError as exc:
        for line, msg in exc.problems:
            _err(f"{args.pairs_file}:{line}: {msg}")
        return EXIT_IO
    if not rows:
        raise CommandError(f"{args.pairs_file} has no pair rows", EXIT_IO)
    try:
        reports = bench.calibrate_rows(rows, _algos(args.algo))
    except DecodeError as exc:
        raise CommandError(str(exc), EXIT_IO) from None
    if args.format == "json":
        out = [
            {"algo": r.algo.value, "weight_similar": _json_safe(r.weight_similar),
             "weight_different": _json_safe(r.weight_different), "threshold": r.threshold,
             "accuracy": r.accuracy, "n_similar": r.n_similar, "n_different": r.n_different}
            for r in reports
        ]
        print(json.dumps(out, indent=2))
    else:
        print(bench.format_calibration(reports))
    return EXIT_OK


def cmd_bench(args) -> int:
    root = Path(args.corpus_dir)
    if not root.is_dir():
        raise CommandError(f"corpus directory {root} does not exist", EXIT_IO)
    files = sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise CommandError(f"{root} holds no images", EXIT_IO)
    if len(files) < 10:
        _err(f"warning: only {len(files)} images; timings will be noisy")
    images = [_read(f) for f in files]
    report = bench.time_hashes(images, _algos(args.algo), repeats=args.repeats)
    if args.pairs:
        try:
            rows = bench.read_pairs(args.pairs)
        except OSError as exc:
            raise CommandError(f"cannot read {args.pairs}: {exc}", EXIT_IO) from None
        except bench.PairFileError as exc:
            for line, msg in exc.problems:
                _err(f"{args.pairs}:{line}: {msg}")
            return EXIT_IO
        bench.attach_calibration(report, bench.calibrate_rows(rows, _algos(args.algo)))
    if args.format == "json":
        out = [
            {k: _json_safe(v) for k, v in dataclasses.asdict(r).items()} | {"algo": r.algo.value}
            for r in report.rows
        ]
        print(json.dumps(out, indent=2))
    else:
        print(bench.format_bench(report))
    return EXIT_OK


def cmd_cascade_fetch(args) -> int:
    dest = Path(args.dest) if args.dest else facedetect.default_cascade_path()
    dest.parent.mkdir(parents=True, exist_ok=True)
    try:
        if args.source:
            payload = Path(args.source).read_bytes()
        else:
            with urllib.request.urlopen(args.url, timeout=60) as resp:
                payload = resp.read()
    except OSError as exc:
        raise CommandError(f"cannot fetch cascade: {exc}", EXIT_IO) from None
    digest = hashlib.sha256(payload).hexdigest()
    if args.sha256 and digest != args.sha256:
        raise CommandError(f"checksum mismatch: got {digest}, expected {args.sha256}", EXIT_IO)
    try:
        facedetect.parse_cascade(payload)
    except ModelParseError as exc:
        raise CommandError(f"downloaded cascade is invalid: {exc}", EXIT_MODEL) from None
    with tempfile.NamedTemporaryFile(dir=dest.parent, delete=False) as tmp:
        tmp.write(payload)
    shutil.move(tmp.name, dest)
    print(f"cascade saved to {dest}")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="somiap", description="Place and face analysis of photos")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enroll-place", help="add a known-location image to an index")
    p.add_argument("index")
    p.add_argument("image")
    p.add_argument("--id", required=True)
    p.add_argument("--name")
    p.set_defaults(func=cmd_enroll_place)

    p = sub.add_parser("train-faces", help="train the face recognizer from <dir>/<label>/*.png")
    p.add_argument("index")
    p.add_argument("faces_dir")
    p.add_argument("--algo", choices=["eigen", "fisher", "lbph", "auto"], default="lbph")
    p.add_argument("--cascade", help="cascade XML (default: $SOMIAP_CASCADE or the fetched one)")
    p.add_argument("--assume-cropped", action="store_true",
                   help="treat every image as an already cropped face")
    p.set_defaults(func=cmd_train_faces)

    p = sub.add_parser("analyze", help="locate the place and identify faces in a photo")
    p.add_argument("index")
    p.add_argument("image")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--cascade")
    p.add_argument("--no-faces", action="store_true", help="skip face detection")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("calibrate", help="derive hash thresholds from a labeled pair CSV")
    p.add_argument("pairs_file")
    p.add_argument("--algo", choices=["all"] + [a.value for a in HashAlgo], default="all")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("bench", help="time every hash algorithm over a corpus")
    p.add_argument("corpus_dir")
    p.add_argument("--algo", choices=["all"] + [a.value for a in HashAlgo], default="all")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--pairs", help="pair CSV; adds the calibration columns to each row")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("cascade-fetch", help="download the standard frontal-face cascade")
    p.add_argument("--url", default=CASCADE_URL)
    p.add_argument("--source", help="install from a local file instead of downloading")
    p.add_argument("--dest")
    p.add_argument("--sha256", default=CASCADE_SHA256,
                   help="expected checksum; pass an empty string to skip verification")
    p.set_defaults(func=cmd_cascade_fetch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except CommandError as exc:
        _err(str(exc))
        return exc.code
    except ManifestError as exc:
        _err(str(exc))
        return EXIT_MODEL
    except SomiapError as exc:
        _err(str(exc))
        return EXIT_MODEL
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
