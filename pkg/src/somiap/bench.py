"""Threshold calibration over labeled pair lists and hash timing benchmarks."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .hashing import (
    CalibrationReport,
    HashAlgo,
    calibrate_distances,
    color_hash,
    dhash_gray,
    hamming,
    compute_hash,
    phash_gray,
)
from .imagecore import read_image, to_gray

LABELS = ("similar", "different")


class PairRow(NamedTuple):
    line: int
    path_a: Path
    path_b: Path
    label: str


class PairFileError(ValueError):
    def __init__(self, problems):
        self.problems = problems
        super().__init__("; ".join(f"line {n}: {msg}" for n, msg in problems))


def read_pairs(path) -> list[PairRow]:
    """Parse ``pathA,pathB,label`` rows; relative paths resolve against the file.

    Every bad row is collected and reported together with its line number.
    """
    path = Path(path)
    base = path.parent
    rows, problems = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec or (len(rec) == 1 and not rec[0].strip()) or rec[0].startswith("#"):
                continue
            if len(rec) != 3:
                problems.append((lineno, f"expected 3 fields, got {len(rec)}"))
                continue
            a, b, label = (f.strip() for f in rec)
            if lineno == 1 and label.lower() == "label":
                continue
            if label not in LABELS:
                problems.append((lineno, f"label must be 'similar' or 'different', got {label!r}"))
                continue
            pa, pb = base / a, base / b
            missing = [str(p) for p in (pa, pb) if not p.is_file()]
            if missing:
                problems.append((lineno, "unreadable " + ", ".join(missing)))
                continue
            rows.append(PairRow(lineno, pa, pb, label))
    if problems:
        raise PairFileError(problems)
    return rows


def calibrate_rows(rows: Iterable[PairRow], algos: Iterable[HashAlgo]) -> list[CalibrationReport]:
    rows = list(rows)
    cache: dict = {}

    def digest(p, algo):
        key = (p, algo)
        if key not in cache:
            if p not in cache:
                cache[p] = read_image(p)
            cache[key] = compute_hash(cache[p], algo)
        return cache[key]

    reports = []
    for algo in algos:
        algo = HashAlgo(algo)
        sim, diff = [], []
        for r in rows:
            d = hamming(digest(r.path_a, algo), digest(r.path_b, algo))
            (sim if r.label == "similar" else diff).append(d)
        if not sim or not diff:
            reports.append(_one_sided(algo, sim, diff))
        else:
            reports.append(calibrate_distances(sim, diff, algo))
    return reports


def _one_sided(algo: HashAlgo, sim, diff) -> CalibrationReport:
    # the smallest threshold that classifies every pair of the present kind
    if sim:
        t, acc = max(sim), 1.0
    else:
        t, acc = 0, float(np.mean(np.asarray(diff) > 0))
    return CalibrationReport(
        algo=algo,
        weight_similar=float(np.mean(sim)) if sim else float("nan"),
        weight_different=float(np.mean(diff)) if diff else float("nan"),
        threshold=int(t),
        accuracy=acc,
        n_similar=len(sim),
        n_different=len(diff),
    )


# --------------------------------------------------------------------------
# timing


@dataclass
class BenchRow:
    algo: HashAlgo
    mean_ms: float
    max_ms: float
    min_ms: float
    n_images: int
    weight_similar: float | None = None
    weight_different: float | None = None
    threshold: int | None = None
    accuracy: float | None = None


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    def row(self, algo) -> BenchRow:
        algo = HashAlgo(algo)
        return next(r for r in self.rows if r.algo == algo)


_TIMED = {
    HashAlgo.DHASH_GRAY: dhash_gray,
    HashAlgo.PHASH_GRAY: phash_gray,
    HashAlgo.DHASH_COLOR: lambda img: color_hash(img, "dhash"),
    HashAlgo.PHASH_COLOR: lambda img: color_hash(img, "phash"),
}


def time_hashes(images, algos=tuple(HashAlgo), repeats: int = 3) -> BenchReport:
    """Per-image hash time in milliseconds; decoding and gray conversion are excluded.

    Each image is hashed ``repeats`` times and the fastest run is kept, which
    strips scheduler noise without hiding algorithmic cost.
    """
    images = [np.asarray(img) for img in images]
    grays = [to_gray(img) for img in images]
    report = BenchReport()
    for algo in algos:
        algo = HashAlgo(algo)
        fn = _TIMED[algo]
        inputs = images if algo.is_color else grays
        fn(inputs[0])  # warm caches (DCT basis, allocator)
        times = []
        for img in inputs:
            best = float("inf")
            for _ in range(repeats):
                t0 = time.perf_counter()
                fn(img)
                best = min(best, time.perf_counter() - t0)
            times.append(best * 1000.0)
        report.rows.append(
            BenchRow(algo, float(np.mean(times)), float(np.max(times)), float(np.min(times)), len(times))
        )
    return report


def attach_calibration(report: BenchReport, calibrations: Iterable[CalibrationReport]) -> BenchReport:
    for cal in calibrations:
        row = report.row(cal.algo)
        row.weight_similar = cal.weight_similar
        row.weight_different = cal.weight_different
        row.threshold = cal.threshold
        row.accuracy = cal.accuracy
    return report


def format_calibration(reports: Iterable[CalibrationReport]) -> str:
    lines = [f"{'Tests':<14}{'Weight similar':>16}{'Weight different':>18}{'Threshold':>11}{'Accuracy':>10}"]
    for r in reports:
        lines.append(
            f"{r.algo.value:<14}{r.weight_similar:>16.2f}{r.weight_different:>18.2f}"
            f"{r.threshold:>11d}{r.accuracy * 100:>9.1f}%"
        )
    return "\n".join(lines)


def format_bench(report: BenchReport) -> str:
    calibrated = any(r.threshold is not None for r in report.rows)
    head = f"{'Tests':<14}"
    if calibrated:
        head += f"{'Weight similar':>16}{'Weight different':>18}{'Threshold':>11}{'Accuracy':>10}"
    lines = [head + f"{'Mean ms':>10}{'Max ms':>10}{'Min ms':>10}"]
    for r in report.rows:
        line = f"{r.algo.value:<14}"
        if calibrated:
            line += (f"{r.weight_similar:>16.2f}{r.weight_different:>18.2f}"
                     f"{r.threshold:>11d}{r.accuracy * 100:>9.1f}%")
        lines.append(line + f"{r.mean_ms:>10.3f}{r.max_ms:>10.3f}{r.min_ms:>10.3f}")
    return "\n".join(lines)
