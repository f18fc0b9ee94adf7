"""Constructive lifting algorithms for line fields on grids.

A lifting of a projective-valued field u assigns a sign to each cell's
representative so the resulting sphere-valued field n satisfies [n] = u
exactly.  Three constructions are provided: a rotation-averaging search that
makes the existential bound algorithmic (:func:`lift_rotation_search`), the
greedy one-dimensional lifting that never creates extra jumps
(:func:`lift_1d`), and a boundary-prescribed lifting through a thresholded
harmonic extension (:func:`lift_with_boundary`).
"""

from dataclasses import dataclass

import numpy as np

from .fields import EnergyReport, GridField, embedded_tv
from .geometry import canonicalize, dist_proj, haar_rotations, lift_sign

__all__ = [
    "LiftResult",
    "lift_rotation_search",
    "lift_1d",
    "lift_with_boundary",
    "lift_eps_regularized",
    "boundary_cells",
    "solve_laplace",
]


@dataclass
class LiftResult:
    field: GridField          # unit-valued lifting
    energy: EnergyReport
    rotation: np.ndarray = None   # set by the rotation search
    projection_check: float = 0.0  # max over cells of dist_proj([n], u)


def _projection_check(n_field, u_field):
    inside = u_field.inside()
    if not inside.any():
        return 0.0
    # identical canonical representatives are at distance 0 by definition;
    # evaluating arccos on stored norms would manufacture ~1e-8 of roundoff
    same = np.all(canonicalize(n_field.values) == u_field.values, axis=-1)
    if same[inside].all():
        return 0.0
    dist = np.where(same, 0.0, dist_proj(n_field.values, u_field.values))
    return float(dist[inside].max())


def _ranking_metric(metric):
    # lifted fields are sphere valued: both Euclidean requests rank by the
    # sphere chord energy (the tensor energy of a lifting is that of its
    # projection, identical across candidates)
    return "geodesic" if metric == "geodesic" else "euclidean_sphere"


def lift_rotation_search(u, trials=64, seed=0, metric="geodesic"):
    """Best-of-``trials`` Haar-sampled rotation liftings of a line field.

    Each rotation R induces the cellwise lifting with sign
    sgn((R u).e_d); candidates are ranked by the finite-difference energy of
    the lifted field in the requested metric and the minimizer is returned.
    The expected energy of a random candidate already satisfies the averaging
    bound, so the sample minimum does with margin.
    """
    if u.kind != "proj":
        raise ValueError("rotation search expects a proj field")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rots = haar_rotations(u.d, trials, seed)
    rank_metric = _ranking_metric(metric)
    best = None
    for R in rots:
        s = lift_sign(R, u.values)
        n = u.with_values(u.values * s[..., None], kind="unit")
        rep = embedded_tv(n, rank_metric)
        if best is None or rep.total < best[1].total:
            best = (n, rep, R)
    n, rep, R = best
    return LiftResult(field=n, energy=rep, rotation=R,
                      projection_check=_projection_check(n, u))


def lift_1d(seq):
    """Greedy lifting of a sequence of projective points.

    The first value is the canonical representative; each next value takes
    the sign closest to its predecessor, so every sphere step equals the
    projective step (<= pi/2) and the sphere TV equals the projective TV
    exactly.  Ties at exactly pi/2 keep the canonical representative.

    Accepts shape ``(L, d)`` or a batch ``(B, L, d)``; returns the same shape.
    """
    seq = np.asarray(seq, dtype=float)
    if seq.ndim < 2 or seq.shape[-2] < 1:
        raise ValueError("need a nonempty sequence of points")
    reps = canonicalize(seq)
    batched = reps.ndim == 3
    r = reps if batched else reps[None]
    signs = np.ones(r.shape[:-1])
    for k in range(1, r.shape[1]):
        # c = n_{k-1} . rep_k; the closer sign is sgn(c), canonical on ties
        c = np.einsum("bk,bk->b", r[:, k - 1], r[:, k]) * signs[:, k - 1]
        signs[:, k] = np.where(c < 0, -1.0, 1.0)
    out = r * signs[..., None]
    return out if batched else out[0]


def boundary_cells(mask):
    """Cells inside the mask adjacent to the outside or to the grid edge."""
    mask = np.asarray(mask, dtype=bool)
    padded = np.pad(mask, 1, constant_values=False)
    interior = padded.copy()
    for a in range(mask.ndim):
        for shift in (1, -1):
            interior &= np.roll(padded, shift, axis=a)
    inner = interior[(slice(1, -1),) * mask.ndim]
    return mask & ~inner


def solve_laplace(boundary_values, boundary, interior, tol=1e-10,
                  max_sweeps=1_000_000):
    """Five-point Laplace relaxation on a masked 2D grid.

    Boundary cells hold ``boundary_values`` fixed; interior cells (all of
    whose four neighbors are in the domain) are relaxed by red-black SOR
    until the maximal residual |mean(neighbors) - phi| drops below ``tol``.
    """
    n1, n2 = boundary.shape
    phi = np.zeros((n1 + 2, n2 + 2))
    core = (slice(1, -1), slice(1, -1))
    phi[core][boundary] = boundary_values[boundary]
    if not interior.any():
        return phi[core]
    omega = 2.0 / (1.0 + np.sin(np.pi / max(n1, n2)))
    ii, jj = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    parity = (ii + jj) % 2
    masks = [interior & (parity == 0), interior & (parity == 1)]
    for sweep in range(max_sweeps):
        for m in masks:
            nb = 0.25 * (phi[2:, 1:-1] + phi[:-2, 1:-1]
                         + phi[1:-1, 2:] + phi[1:-1, :-2])
            phi[core][m] += omega * (nb - phi[core])[m]
        nb = 0.25 * (phi[2:, 1:-1] + phi[:-2, 1:-1]
                     + phi[1:-1, 2:] + phi[1:-1, :-2])
        res = np.abs((nb - phi[core])[interior]).max()
        if res < tol:
            return phi[core]
    raise RuntimeError(
        f"Laplace relaxation did not reach residual {tol} in {max_sweeps} sweeps")


def lift_with_boundary(u, n0, trials=64, seed=0):
    """Lifting of a 2D line field matching a prescribed boundary orientation.

    Steps: (i) find any lifting by rotation search; (ii) form the boundary
    sign f, the dot product of that lifting with the prescribed trace;
    (iii) extend f harmonically into the interior; (iv) threshold the
    extension at 0 to a sign field; (v) flip the lifting by it.  The output
    carries ``n0`` verbatim on every boundary cell and projects to u
    everywhere.
    """
    if u.kind != "proj":
        raise ValueError("expects a proj field")
    if u.N != 2:
        raise ValueError("boundary lifting is implemented for N = 2 grids")
    if n0.kind != "unit" or n0.dims != u.dims:
        raise ValueError("boundary data must be a unit field on the same grid")
    inside = u.inside()
    bnd = boundary_cells(inside)
    if not bnd.any():
        raise ValueError("empty mask")
    # the prescribed trace must be a lifting of u on the boundary
    rep_diff = np.linalg.norm(canonicalize(n0.values) - u.values, axis=-1)
    bad = bnd & (rep_diff > 1e-10)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ValueError(
            f"boundary data is not a lifting of the field at cell {idx}")

    base = lift_rotation_search(u, trials=trials, seed=seed, metric="geodesic")
    ntilde = base.field.values
    f = np.zeros(u.dims)
    dots = np.einsum("...k,...k->...", ntilde, n0.values)
    f[bnd] = np.where(dots[bnd] >= 0, 1.0, -1.0)

    interior = inside & ~bnd
    phi = solve_laplace(f, bnd, interior)
    fbar = np.where(phi > 0.0, 1.0, -1.0)
    fbar[bnd] = f[bnd]

    n_vals = ntilde * fbar[..., None]
    n_vals[bnd] = n0.values[bnd]
    n = u.with_values(n_vals, kind="unit")
    return LiftResult(field=n,
                      energy=embedded_tv(n, "euclidean_sphere"),
                      rotation=None,
                      projection_check=_projection_check(n, u))


def lift_eps_regularized(u, R, eps):
    """Cellwise regularized lifting: values scaled through the equator band.

    Applies the Lipschitz map n -> clip((Rn).e_d / eps, -1, 1) n, which equals
    the rotated regularized folding map exactly and converges cellwise to the
    sharp rotation lifting off the equator set as eps -> 0.  The result is
    vector valued with norms <= 1.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must be in (0, 1]")
    if u.kind != "proj":
        raise ValueError("expects a proj field")
    R = np.asarray(R, dtype=float)
    w_last = np.einsum("k,...k->...", R[-1, :], u.values)
    scale = np.clip(w_last / eps, -1.0, 1.0)
    return u.with_values(u.values * scale[..., None], kind="vector")
