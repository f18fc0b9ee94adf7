"""Pointwise geometry of the sphere, the projective space and their lifting maps.

Conventions used throughout the package:

* a *unit vector* is a float array of shape ``(..., d)`` with Euclidean norm 1
  (within 1e-12), a point of the sphere S^{d-1};
* a *projective point* (line direction) is stored as a canonical unit
  representative of the class {+-n}, see :func:`canonicalize`;
* a *rotation* is a ``(d, d)`` orthogonal matrix with determinant +1.

All functions are pure and vectorized over leading axes.
"""

import numpy as np

__all__ = [
    "canonicalize",
    "dist_sphere",
    "dist_proj",
    "embed_tensor",
    "uniaxial_q",
    "eucl_jump_cost",
    "lift_map_F",
    "lift_map_F_eps",
    "lift_map_LR",
    "lift_sign",
    "haar_sample",
    "haar_rotations",
    "random_unit_vectors",
]


def canonicalize(v):
    """Canonical representative of the projective class {+-v}.

    The representative is chosen so that the coordinate of largest absolute
    value (lowest index on ties) is nonnegative.  This is numerically stable
    everywhere on the sphere, unlike a first-nonzero-coordinate rule, and it
    is exactly sign-invariant: canonicalize(v) == canonicalize(-v) bit for
    bit, and idempotent.
    """
    v = np.asarray(v, dtype=float)
    idx = np.argmax(np.abs(v), axis=-1)
    lead = np.take_along_axis(v, idx[..., None], axis=-1)[..., 0]
    sign = np.where(lead < 0, -1.0, 1.0)
    return v * sign[..., None]


def _check_same_dim(n, m):
    if n.shape[-1] != m.shape[-1]:
        raise ValueError(
            f"dimension mismatch: {n.shape[-1]} vs {m.shape[-1]}")


def dist_sphere(n, m):
    """Geodesic distance on S^{d-1}, arccos of the clamped dot product.

    Returns values in [0, pi].  Dot products are clamped to [-1, 1] since
    rounding can push them slightly outside.
    """
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    _check_same_dim(n, m)
    dot = np.clip(np.einsum("...k,...k->...", n, m), -1.0, 1.0)
    return np.arccos(dot)


def dist_proj(u, v):
    """Geodesic distance on the projective space: min(theta, pi - theta).

    Invariant under sign flips of either representative; values in [0, pi/2].
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_same_dim(u, v)
    dot = np.abs(np.einsum("...k,...k->...", u, v))
    return np.arccos(np.minimum(dot, 1.0))


def embed_tensor(u):
    """Tensor embedding of a projective point: (1/sqrt 2) n (x) n.

    Sign independent; the image has Frobenius norm 1/sqrt(2).  Returns an
    array of shape ``(..., d, d)``.
    """
    u = np.asarray(u, dtype=float)
    return u[..., :, None] * u[..., None, :] / np.sqrt(2.0)


def uniaxial_q(u, s_star):
    """Uniaxial Q-tensor with order parameter ``s_star``: s (n (x) n - I/d).

    Symmetric and traceless; sign independent in the representative.
    """
    u = np.asarray(u, dtype=float)
    d = u.shape[-1]
    return s_star * (u[..., :, None] * u[..., None, :] - np.eye(d) / d)


def eucl_jump_cost(u, v):
    """Euclidean jump cost of two projective points: sin(theta).

    Equals the Frobenius distance of the tensor embeddings,
    ``|embed_tensor(u) - embed_tensor(v)|_F``, by the identity
    (1/sqrt2)|n(x)n - m(x)m| = sin(arccos|n.m|).  Evaluated through the
    wedge-product components, which keeps full absolute accuracy for nearly
    parallel pairs where sqrt(1 - (u.v)^2) would cancel.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_same_dim(u, v)
    outer = u[..., :, None] * v[..., None, :]
    skew = outer - np.swapaxes(outer, -1, -2)
    return np.linalg.norm(skew, axis=(-2, -1)) / np.sqrt(2.0)


def lift_map_F(n):
    """Symmetric folding map onto the upper hemisphere: n if n.e_d > 0, else -n.

    On the equator (n.e_d == 0, measure zero) the canonical representative is
    returned, which keeps F(n) == F(-n) exact everywhere.
    """
    n = np.asarray(n, dtype=float)
    last = n[..., -1]
    out = np.where((last > 0)[..., None], n, -n)
    eq = last == 0
    if np.any(eq):
        out = np.where(eq[..., None], canonicalize(n), out)
    return out


def lift_map_F_eps(eps, n):
    """Lipschitz regularization of :func:`lift_map_F`.

    Equals n where n.e_d >= eps, -n where n.e_d <= -eps, and
    ((n.e_d)/eps) n in the equatorial band.  Values have norm <= 1 and
    converge pointwise to F off the equator as eps -> 0.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    n = np.asarray(n, dtype=float)
    last = n[..., -1]
    scale = np.clip(last / eps, -1.0, 1.0)
    return n * scale[..., None]


def lift_sign(R, u):
    """Sign s in {-1, +1} such that lift_map_LR(R, u) == s * u.

    The sign is +1 where (R u).e_d > 0, -1 where it is < 0, and on the
    equator the one that yields the canonical representative.
    """
    R = np.asarray(R, dtype=float)
    u = np.asarray(u, dtype=float)
    w_last = np.einsum("k,...k->...", R[-1, :], u)
    s = np.where(w_last > 0, 1.0, -1.0)
    eq = w_last == 0
    if np.any(eq):
        # canonical tie-break: sign that makes the largest-|coord| entry >= 0
        idx = np.argmax(np.abs(u), axis=-1)
        lead = np.take_along_axis(u, idx[..., None], axis=-1)[..., 0]
        s = np.where(eq, np.where(lead < 0, -1.0, 1.0), s)
    return s


def lift_map_LR(R, u):
    """Rotated lifting map R^{-1} F(R n) applied to a projective point.

    Since F(Rn) is an exact sign flip of Rn, the composition equals
    ``lift_sign(R, u) * u`` exactly; it is evaluated that way so the result
    reproduces the input class bit for bit.
    """
    R = np.asarray(R, dtype=float)
    u = np.asarray(u, dtype=float)
    if R.shape[-1] != u.shape[-1]:
        raise ValueError(
            f"dimension mismatch: rotation is {R.shape[-1]}x{R.shape[-1]}, "
            f"point has d={u.shape[-1]}")
    return u * lift_sign(R, u)[..., None]


def haar_rotations(d, size, rng):
    """Batch of Haar-distributed SO(d) matrices, shape ``(size, d, d)``.

    Columns of a standard normal matrix are orthonormalized by (twice-applied)
    modified Gram-Schmidt with positive normalization factors, which gives the
    Haar measure on O(d); the last column's sign is flipped where the
    determinant is -1, mapping the reflection coset onto SO(d) measure
    preservingly.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    rng = np.random.default_rng(rng)
    A = rng.standard_normal((size, d, d))
    Q = np.empty_like(A)
    for j in range(d):
        v = A[:, :, j].copy()
        for _ in range(2):  # second pass keeps orthogonality ~1e-15
            for k in range(j):
                proj = np.einsum("ij,ij->i", Q[:, :, k], v)
                v -= proj[:, None] * Q[:, :, k]
        Q[:, :, j] = v / np.linalg.norm(v, axis=1)[:, None]
    det = np.linalg.det(Q)
    Q[det < 0, :, -1] *= -1.0
    return Q


def haar_sample(d, seed=None):
    """One Haar-distributed rotation of SO(d); deterministic given ``seed``."""
    return haar_rotations(d, 1, seed)[0]


def random_unit_vectors(d, size, rng):
    """Uniformly distributed points of S^{d-1}, shape ``(size, d)``."""
    rng = np.random.default_rng(rng)
    v = rng.standard_normal((size, d))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
