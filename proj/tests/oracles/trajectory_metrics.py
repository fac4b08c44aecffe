#!/usr/bin/env python3
"""Brute-force reference for ATE / RPE on TUM trajectories.

Alignment uses Horn's closed-form quaternion method (eigenvector of the 4x4
N matrix), not an SVD, so it shares no code path with the C++ version.
Timestamp matching scans every reference stamp.

    trajectory_metrics.py generate <dir>     write the fixture pair
    trajectory_metrics.py eval <est> <ref>   print ATE and RPE (delta 1 and 3)
"""

import math
import sys
from pathlib import Path

import numpy as np

MAX_GAP = 0.02


def read_tum(path):
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([float(v) for v in line.split()])
    return rows


def quat_to_matrix(qx, qy, qz, qw):
    n = math.sqrt(qx * qx + qy * qy + qz * qz + qw * qw)
    x, y, z, w = qx / n, qy / n, qz / n, qw / n
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def to_pose(row):
    t = np.array(row[1:4])
    r = quat_to_matrix(*row[4:8])
    m = np.eye(4)
    m[:3, :3] = r
    m[:3, 3] = t
    return m


def match(est, ref):
    pairs = []
    for i, e in enumerate(est):
        best, gap = None, MAX_GAP
        for j, r in enumerate(ref):
            g = abs(r[0] - e[0])
            if g <= gap:
                best, gap = j, g
        if best is not None:
            pairs.append((i, best))
    return pairs


def horn(src, dst):
    ms, md = src.mean(axis=0), dst.mean(axis=0)
    s = (src - ms).T @ (dst - md)
    sxx, sxy, sxz = s[0]
    syx, syy, syz = s[1]
    szx, szy, szz = s[2]
    n = np.array([
        [sxx + syy + szz, syz - szy, szx - sxz, sxy - syx],
        [syz - szy, sxx - syy - szz, sxy + syx, szx + sxz],
        [szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy],
        [sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz],
    ])
    vals, vecs = np.linalg.eigh(n)
    qw, qx, qy, qz = vecs[:, np.argmax(vals)]
    r = quat_to_matrix(qx, qy, qz, qw)
    return r, md - r @ ms


def ate(est, ref):
    pairs = match(est, ref)
    src = np.array([est[i][1:4] for i, _ in pairs])
    dst = np.array([ref[j][1:4] for _, j in pairs])
    r, t = horn(src, dst)
    res = (src @ r.T + t) - dst
    return math.sqrt((res ** 2).sum(axis=1).mean())


def rpe(est, ref, delta):
    pairs = match(est, ref)
    total, count = 0.0, 0
    for k in range(len(pairs) - delta):
        p0, p1 = to_pose(est[pairs[k][0]]), to_pose(est[pairs[k + delta][0]])
        q0, q1 = to_pose(ref[pairs[k][1]]), to_pose(ref[pairs[k + delta][1]])
        err = np.linalg.inv(np.linalg.inv(q0) @ q1) @ (np.linalg.inv(p0) @ p1)
        total += float(err[:3, 3] @ err[:3, 3])
        count += 1
    return math.sqrt(total / count)


def rot(axis, angle):
    axis = np.asarray(axis, float) / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * k @ k


def matrix_to_quat(r):
    w = math.sqrt(max(0.0, 1 + r[0, 0] + r[1, 1] + r[2, 2])) / 2
    x = math.copysign(math.sqrt(max(0.0, 1 + r[0, 0] - r[1, 1] - r[2, 2])) / 2, r[2, 1] - r[1, 2])
    y = math.copysign(math.sqrt(max(0.0, 1 - r[0, 0] + r[1, 1] - r[2, 2])) / 2, r[0, 2] - r[2, 0])
    z = math.copysign(math.sqrt(max(0.0, 1 - r[0, 0] - r[1, 1] + r[2, 2])) / 2, r[1, 0] - r[0, 1])
    return x, y, z, w


def line(t, r, p):
    qx, qy, qz, qw = matrix_to_quat(r)
    return "%.6f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n" % (t, *p, qx, qy, qz, qw)


def generate(out):
    # Deterministic closed-form curves; the estimate is the reference seen
    # through a rigid offset plus a smooth drift, with small stamp jitter and
    # one estimate stamp that has no partner.
    out = Path(out)
    offset_r = rot([0.3, -0.5, 0.8], 0.4)
    offset_t = np.array([0.7, -0.2, 1.1])
    ref_lines, est_lines = [], []
    for k in range(24):
        t = 1.0 + 0.05 * k
        p = np.array([math.cos(0.3 * k), 0.5 * math.sin(0.21 * k), 0.02 * k])
        r = rot([0.1, 1.0, 0.2 * math.sin(k)], 0.05 * k)
        ref_lines.append(line(t, r, p))
        if k == 17:
            t_est = t + 0.026
        else:
            t_est = t + 0.004 * math.sin(1.7 * k)
        drift = np.array([0.01 * math.sin(0.5 * k), 0.004 * k, -0.006 * math.cos(0.4 * k)])
        r_est = offset_r @ rot([1.0, 0.2, -0.3], 0.01 * k) @ r
        p_est = offset_r @ (p + drift) + offset_t
        est_lines.append(line(t_est, r_est, p_est))
    (out / "metrics_ref.txt").write_text("# timestamp tx ty tz qx qy qz qw\n" + "".join(ref_lines))
    (out / "metrics_est.txt").write_text("".join(est_lines))


def main(argv):
    if len(argv) == 3 and argv[1] == "generate":
        generate(argv[2])
        return 0
    if len(argv) == 4 and argv[1] == "eval":
        est, ref = read_tum(argv[2]), read_tum(argv[3])
        print("ATE_RMSE %.17g" % ate(est, ref))
        print("RPE1_RMSE %.17g" % rpe(est, ref, 1))
        print("RPE3_RMSE %.17g" % rpe(est, ref, 3))
        print("MATCHED %d" % len(match(est, ref)))
        return 0
    print(__doc__, file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
