#!/usr/bin/env python3
"""Greedy lifting of one-dimensional line-field sequences.

On an interval a line field can always be oriented without creating new
jumps: walk the sequence and pick, for each value, the representative closer
to the previous choice.  Every step then has sphere distance equal to the
projective distance (at most a right angle), so the geodesic TV is preserved
exactly, and the Euclidean TV obeys the sharp bound sqrt(2) x tensor TV.
"""

import itertools

import numpy as np

from bvlift import (canonicalize, dist_proj, dist_sphere, eucl_jump_cost,
                    lift_1d, random_unit_vectors)


def planar(degrees):
    a = np.deg2rad(degrees)
    return canonicalize(np.stack([np.cos(a), np.sin(a)], axis=-1))


print("== a line rotating through 180 degrees ==")
reps = planar([0, 60, 120, 180])
n = lift_1d(reps)
print("line angles:   0, 60, 120, 180")
print("lifted vector angles:", np.round(np.degrees(np.arctan2(n[:, 1], n[:, 0])), 1))
tv = dist_sphere(n[:-1], n[1:]).sum()
print(f"sphere TV {tv:.5f} = projective TV "
      f"{dist_proj(reps[:-1], reps[1:]).sum():.5f} = pi\n")

print("== greedy matches exhaustive search over all sign choices ==")
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(25):
    seq = canonicalize(random_unit_vectors(3, 8, rng))
    greedy = dist_sphere(*(lambda m: (m[:-1], m[1:]))(lift_1d(seq))).sum()
    best = min(
        dist_sphere((seq * np.array(s)[:, None])[:-1],
                    (seq * np.array(s)[:, None])[1:]).sum()
        for s in itertools.product((1.0, -1.0), repeat=len(seq)))
    worst = max(worst, abs(greedy - best))
print(f"max |greedy - brute force| over 25 random sequences: {worst:.2e}\n")

print("== the sqrt(2) Euclidean bound ==")
seqs = canonicalize(random_unit_vectors(3, 2000 * 12, rng).reshape(2000, 12, 3))
lifted = lift_1d(seqs)
euc = np.linalg.norm(np.diff(lifted, axis=1), axis=-1).sum(axis=1)
tens = eucl_jump_cost(seqs[:, :-1], seqs[:, 1:]).sum(axis=1)
ratio = euc / tens
print(f"Euclidean TV / tensor TV over 2000 random sequences: "
      f"max {ratio.max():.5f} <= sqrt(2) = {np.sqrt(2):.5f}")
single = planar([0, 90])
pair = lift_1d(single)
print(f"equality at a single right-angle jump: "
      f"{np.linalg.norm(pair[1] - pair[0]):.5f} = sqrt(2) x "
      f"{eucl_jump_cost(single[0], single[1]):.0f}")
