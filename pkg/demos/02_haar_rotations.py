#!/usr/bin/env python3
"""Uniform random rotations and the averaging identities they satisfy.

Rotations drawn from the invariant (Haar) distribution push any fixed
direction forward to a uniform point of the sphere.  Averaging the folded
distance dist(F(Rn), F(Rm)) over rotations has the closed form
(2/pi) theta (pi - theta); the probability that Rn and Rm land on opposite
sides of the equator is theta / (2 pi).  Both are checked by Monte Carlo.
"""

import numpy as np
from scipy import stats

from bvlift import (avg_eucl_jump, avg_eucl_jump_closed, avg_lifted_dist,
                    avg_lifted_dist_closed, haar_rotations, psi_closed,
                    psi_estimate)

d = 3
size = 200_000

print("== pushforward of a fixed direction ==")
n = np.eye(d)[0]
t = (haar_rotations(d, size, rng=0) @ n)[:, -1]
cdf = stats.beta((d - 1) / 2, (d - 1) / 2).cdf
ks = stats.kstest(t, lambda x: cdf((x + 1) / 2)).statistic
print(f"KS distance of (Rn).e to the uniform-sphere coordinate law: "
      f"{ks:.5f} (1% critical value {1.628 / np.sqrt(size):.5f})\n")

print("== averaged folded distance ==")
print(f"{'theta':>8} {'monte carlo':>12} {'closed form':>12} {'sigmas':>7}")
for theta in (np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3):
    m = np.cos(theta) * np.eye(d)[-1] + np.sin(theta) * np.eye(d)[-2]
    res = avg_lifted_dist(np.eye(d)[-1], m, size, seed=1)
    closed = avg_lifted_dist_closed(theta)
    sig = abs(res.value - closed) / res.error_estimate if res.error_estimate else 0.0
    print(f"{theta:8.4f} {res.value:12.5f} {closed:12.5f} {sig:7.2f}")

print("\n== hemisphere-split measure ==")
for theta in (np.pi / 4, np.pi / 2, 3 * np.pi / 4):
    res = psi_estimate(theta, d, size, seed=2)
    print(f"theta={theta:6.4f}  measured={res.value:.5f}  "
          f"closed theta/(2 pi)={psi_closed(theta):.5f}")
print("at a right angle the measure is exactly 1/4\n")

print("== averaged Euclidean jump of the folded pair ==")
for theta in (np.pi / 3, np.pi / 2, 2 * np.pi / 3):
    res = avg_eucl_jump(theta, size, seed=3, d=d)
    print(f"theta={theta:6.4f}  measured={res.value:.5f}  "
          f"closed={avg_eucl_jump_closed(theta):.5f}  "
          f"bound (1+2/pi) sin={((1 + 2 / np.pi) * np.sin(theta)):.5f}")
