"""Slow, direct re-implementations used as references by the tests.

None of these import the code under test beyond plain data containers.
"""

import math

import numpy as np


def naive_dct2(block):
    """Orthonormal 2-D DCT-II straight from the double-sum definition."""
    x = np.asarray(block, dtype=np.float64)
    n = x.shape[0]
    out = np.zeros((n, n))
    for u in range(n):
        for v in range(n):
            au = math.sqrt(1.0 / n) if u == 0 else math.sqrt(2.0 / n)
            av = math.sqrt(1.0 / n) if v == 0 else math.sqrt(2.0 / n)
            s = 0.0
            for i in range(n):
                cu = math.cos(math.pi * (2 * i + 1) * u / (2 * n))
                for j in range(n):
                    s += x[i, j] * cu * math.cos(math.pi * (2 * j + 1) * v / (2 * n))
            out[u, v] = au * av * s
    return out


def naive_dct2_separable_check(block):
    """O(N^4) in vectorised form, for larger blocks where the pure loop is too slow."""
    x = np.asarray(block, dtype=np.float64)
    n = x.shape[0]
    i = np.arange(n)
    u = np.arange(n)
    cos = np.cos(np.pi * (2 * i[None, :] + 1) * u[:, None] / (2 * n))  # (u, i)
    alpha = np.where(u == 0, math.sqrt(1.0 / n), math.sqrt(2.0 / n))
    # full 4-index tensor, no separable factorisation of the sum
    t = cos[:, None, :, None] * cos[None, :, None, :] * x[None, None, :, :]
    return alpha[:, None] * alpha[None, :] * t.sum(axis=(2, 3))


def scalar_resize(img, out_w, out_h):
    """Bilinear resize one pixel at a time with pixel-centre alignment."""
    src = [[int(v) for v in row] for row in np.asarray(img)]
    h, w = len(src), len(src[0])
    out = np.zeros((out_h, out_w), dtype=np.uint8)
    for oy in range(out_h):
        sy = min(max((oy + 0.5) * (h / out_h) - 0.5, 0.0), h - 1)
        y0 = int(math.floor(sy))
        y1 = min(y0 + 1, h - 1)
        fy = sy - y0
        for ox in range(out_w):
            sx = min(max((ox + 0.5) * (w / out_w) - 0.5, 0.0), w - 1)
            x0 = int(math.floor(sx))
            x1 = min(x0 + 1, w - 1)
            fx = sx - x0
            top = src[y0][x0] * (1 - fx) + src[y0][x1] * fx
            bot = src[y1][x0] * (1 - fx) + src[y1][x1] * fx
            v = top * (1 - fy) + bot * fy
            out[oy, ox] = min(255, max(0, int(math.floor(v + 0.5))))
    return out


def naive_rect_sum(img, x, y, w, h, power=1):
    total = 0
    for yy in range(y, y + h):
        for xx in range(x, x + w):
            total += int(img[yy][xx]) ** power
    return total


def exhaustive_threshold(similar, different, width):
    """Try every threshold; keep the first one reaching the best accuracy."""
    best_t, best_correct = None, -1
    for t in range(width + 1):
        correct = sum(d <= t for d in similar) + sum(d > t for d in different)
        if correct > best_correct:
            best_t, best_correct = t, correct
    return best_t, best_correct / (len(similar) + len(different))


def closure_groups(rects, eps=0.2):
    """Transitive closure of the rect similarity relation, by repeated merging."""
    def similar(a, b):
        d = eps * min(a[2], b[2])
        return (abs(a[0] - b[0]) <= d and abs(a[1] - b[1]) <= d
                and max(a[2], b[2]) <= (1 + eps) * min(a[2], b[2])
                and max(a[3], b[3]) <= (1 + eps) * min(a[3], b[3]))

    groups = [{i} for i in range(len(rects))]
    changed = True
    while changed:
        changed = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(similar(rects[a], rects[b]) for a in groups[i] for b in groups[j]):
                    groups[i] |= groups.pop(j)
                    changed = True
                    break
            if changed:
                break
    return sorted(sorted(g) for g in groups)


def direct_cascade_accepts(model, img, x, y, scale):
    """Evaluate a Haar cascade on one window by summing pixels directly.

    Uses the same geometric conventions as the detector: rects and the
    window scale by ``floor(v * s + 0.5)``, the normalisation window is the
    scan window inset by one scaled pixel, the first rect weight is re-derived
    so the scaled feature stays zero-sum, and a stump votes left when
    ``value < threshold * sigma * inner_area``.
    """
    def rnd(v):
        return int(math.floor(v + 0.5))

    px = np.asarray(img, dtype=np.int64)
    win_w, win_h = rnd(model.window_w * scale), rnd(model.window_h * scale)
    inset = rnd(scale)
    nw, nh = max(1, win_w - 2 * inset), max(1, win_h - 2 * inset)
    inner = px[y + inset : y + inset + nh, x + inset : x + inset + nw]
    area = nw * nh
    total = int(inner.sum())
    sq = int((inner * inner).sum())
    mean = total / area
    var = sq / area - mean * mean
    sigma = math.sqrt(max(var, 0.0))
    if sigma < 1.0:
        sigma = 1.0

    for stage in model.stages:
        votes = 0.0
        for wc in stage.weak:
            rects = model.features[wc.feature].rects
            scaled = []
            for r, wt in rects:
                x0, y0 = rnd(r.x * scale), rnd(r.y * scale)
                x1, y1 = rnd((r.x + r.w) * scale), rnd((r.y + r.h) * scale)
                scaled.append((x0, y0, x1, y1, wt))
            areas = [(x1 - x0) * (y1 - y0) for x0, y0, x1, y1, _ in scaled]
            w0 = -sum(s[4] * a for s, a in zip(scaled[1:], areas[1:])) / areas[0]
            value = 0.0
            for k, (x0, y0, x1, y1, wt) in enumerate(scaled):
                s = int(px[y + y0 : y + y1, x + x0 : x + x1].sum())
                value += s * (w0 if k == 0 else wt)
            votes += wc.left_value if value < wc.threshold * (sigma * area) else wc.right_value
        if votes < stage.stage_threshold:
            return False
    return True


def lbp_code_positional(patch):
    """LBP code of the centre of a 3x3 patch, walking neighbours clockwise from top-left."""
    c = patch[1][1]
    order = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0)]
    code = 0
    for r, col in order:
        code = (code << 1) | (1 if patch[r][col] >= c else 0)
    return code
