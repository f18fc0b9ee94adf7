import filecmp
import os

import numpy as np
import pytest

from bvlift.constants import k_const
from bvlift.fields import (GridField, Mollifier, avg_directional_energy,
                           default_jump_threshold, detect_jumps,
                           directional_tv, embedded_tv, metric_distance,
                           mollified_energy, mollified_energy_extrapolated,
                           read_field, write_field)
from bvlift.verify import make_half_vortex, make_half_vortex_lifting

K2 = k_const(2).value


def angle_field(grid, angle_fn, box=((0.0, 1.0), (0.0, 1.0)), kind="proj",
                mask=None):
    (x0, x1), (y0, y1) = box
    h = (x1 - x0) / grid
    gy = int(round((y1 - y0) / h))
    cx = x0 + (np.arange(grid) + 0.5) * h
    cy = y0 + (np.arange(gy) + 0.5) * h
    X, Y = np.meshgrid(cx, cy, indexing="ij")
    g = angle_fn(X, Y)
    vals = np.stack([np.cos(g), np.sin(g)], axis=-1)
    return GridField((grid, gy), h, (x0, y0), kind, vals, mask)


def constant_field(grid=32, d=2, kind="proj"):
    vals = np.zeros((grid, grid, d))
    vals[..., 0] = 1.0
    return GridField((grid, grid), 1.0 / grid, (0.0, 0.0), kind, vals)


def jump_field(grid=128):
    return angle_field(grid, lambda X, Y: np.where(X < 0, 0.0, np.pi / 2),
                       box=((-0.5, 0.5), (-0.5, 0.5)))


class TestGridField:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridField((4, 4), 0.0, (0, 0), "proj", np.zeros((4, 4, 2)))
        with pytest.raises(ValueError):
            GridField((4, 4), 0.1, (0, 0), "nope", np.zeros((4, 4, 2)))
        with pytest.raises(ValueError):
            GridField((4, 4), 0.1, (0, 0), "unit", np.zeros((4, 4, 2)))
        with pytest.raises(ValueError):
            GridField((4, 4), 0.1, (0, 0), "proj", np.ones((3, 4, 2)))

    def test_proj_values_are_canonicalized(self):
        vals = np.zeros((2, 2, 2))
        vals[..., 0] = -1.0
        f = GridField((2, 2), 0.5, (0, 0), "proj", vals)
        assert np.all(f.values[..., 0] == 1.0)

    def test_cell_centers(self):
        f = constant_field(4)
        assert np.allclose(f.cell_centers(0), [0.125, 0.375, 0.625, 0.875])


class TestFieldFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        u = make_half_vortex(64)
        p1 = tmp_path / "a.fld"
        p2 = tmp_path / "b.fld"
        write_field(u, p1)
        u2 = read_field(p1)
        write_field(u2, p2)
        assert filecmp.cmp(p1, p2, shallow=False)
        assert np.array_equal(u.values, u2.values)
        assert np.array_equal(u.mask, u2.mask)
        assert u2.spacing == u.spacing and u2.origin == u.origin

    def test_round_trip_without_mask(self, tmp_path):
        f = constant_field(8)
        p = tmp_path / "c.fld"
        write_field(f, p)
        g = read_field(p)
        assert g.mask is None
        assert np.array_equal(f.values, g.values)

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "bad.fld"
        p.write_text("not json\n1,0\n")
        with pytest.raises(ValueError):
            read_field(p)

    def test_wrong_cell_count(self, tmp_path):
        p = tmp_path / "short.fld"
        p.write_text('{"d":2,"dims":[2,2],"kind":"proj","mask":"none",'
                     '"origin":[0,0],"spacing":0.5,"version":1}\n1,0\n1,0\n')
        with pytest.raises(ValueError):
            read_field(p)


class TestMollified:
    def test_constant_field_is_zero(self):
        f = constant_field(32)
        rep = mollified_energy(f, Mollifier(8 * f.spacing), "geodesic")
        assert rep.total == 0.0

    def test_under_resolved_eps_raises(self):
        f = constant_field(32)
        with pytest.raises(ValueError, match="under-resolved"):
            mollified_energy(f, Mollifier(f.spacing), "geodesic")

    def test_empty_mask_raises(self):
        f = constant_field(8)
        g = GridField(f.dims, f.spacing, f.origin, "proj", f.values,
                      np.zeros(f.dims, bool))
        with pytest.raises(ValueError, match="mask"):
            mollified_energy(g, Mollifier(2 * f.spacing), "geodesic")

    def test_one_dimensional_jump(self):
        # exact 1D TV oracle: a single projective jump of angle pi/2 has
        # total variation pi/2 regardless of the mollifier, as eps -> 0
        m = 256
        h = 1.0 / m
        x = (np.arange(m) + 0.5) * h
        g = np.where(x < 0.5, 0.0, np.pi / 2)
        vals = np.stack([np.cos(g), np.sin(g)], axis=-1)
        f = GridField((m,), h, (0.0,), "proj", vals)
        rep = mollified_energy_extrapolated(f, "geodesic", (4, 8, 16))
        assert rep.total == pytest.approx(np.pi / 2, rel=0.05)

    def test_half_vortex_geodesic(self):
        u = make_half_vortex(128)
        rep = mollified_energy_extrapolated(u, "geodesic")
        assert rep.total == pytest.approx(K2 * np.pi, rel=0.05)

    def test_interior_jump_is_exact_in_1d(self):
        # discrete kernel normalization makes an interior 1D jump exact
        m = 64
        h = 1.0 / m
        x = (np.arange(m) + 0.5) * h
        g = np.where(x < 0.5, 0.0, np.pi / 4)
        vals = np.stack([np.cos(g), np.sin(g)], axis=-1)
        f = GridField((m,), h, (0.0,), "proj", vals)
        rep = mollified_energy(f, Mollifier(8 * h), "geodesic")
        assert rep.total == pytest.approx(np.pi / 4, rel=1e-12)


class TestDirectional:
    def test_constant_zero(self):
        f = constant_field(32)
        for w in ([1.0, 0.0], [0.0, 1.0], [0.6, 0.8]):
            assert directional_tv(f, np.array(w), "geodesic") == 0.0

    def test_axis_jump_exact(self):
        f = jump_field(128)
        tv = directional_tv(f, np.array([1.0, 0.0]), "geodesic")
        assert tv == pytest.approx(np.pi / 2, abs=1e-12)

    def test_transverse_direction_zero(self):
        f = jump_field(128)
        assert directional_tv(f, np.array([0.0, 1.0]), "geodesic") == 0.0

    def test_oblique_direction(self):
        f = jump_field(256)
        w = np.array([np.cos(0.5), np.sin(0.5)])
        tv = directional_tv(f, w, "geodesic")
        assert tv == pytest.approx(np.cos(0.5) * np.pi / 2, rel=0.02)

    def test_average_jump_field(self):
        f = jump_field(128)
        rep = avg_directional_energy(f, directions=64, seed=5,
                                     metric="geodesic")
        assert rep.total == pytest.approx(K2 * np.pi / 2, rel=0.03)

    def test_average_smooth_slope_field(self):
        s = 1.3
        f = angle_field(128, lambda X, Y: s * X)
        rep = avg_directional_energy(f, directions=64, seed=6,
                                     metric="geodesic")
        assert rep.total == pytest.approx(K2 * s, rel=0.03)

    def test_one_dimensional_average(self):
        m = 128
        h = 1.0 / m
        x = (np.arange(m) + 0.5) * h
        g = np.where(x < 0.5, 0.0, np.pi / 3)
        vals = np.stack([np.cos(g), np.sin(g)], axis=-1)
        f = GridField((m,), h, (0.0,), "proj", vals)
        rep = avg_directional_energy(f, metric="geodesic")
        assert rep.total == pytest.approx(np.pi / 3, abs=1e-12)  # K_1 = 1

    def test_metric_monotonicity_projective_below_sphere(self):
        # projection is 1-Lipschitz: proj TV <= sphere TV of any lifting
        n = make_half_vortex_lifting(64)
        u = make_half_vortex(64)
        rng = np.random.default_rng(7)
        for _ in range(5):
            w = rng.standard_normal(2)
            w /= np.linalg.norm(w)
            tv_u = directional_tv(u, w, "geodesic")
            tv_n = directional_tv(n, w, "geodesic")
            assert tv_u <= tv_n + 1e-12

    def test_empty_mask_raises(self):
        f = constant_field(8)
        g = GridField(f.dims, f.spacing, f.origin, "proj", f.values,
                      np.zeros(f.dims, bool))
        with pytest.raises(ValueError):
            directional_tv(g, np.array([1.0, 0.0]), "geodesic")


class TestEmbedded:
    def test_constant_zero(self):
        rep = embedded_tv(constant_field(32), "euclidean_tensor")
        assert rep.total == 0.0 and rep.ac_part == 0.0 and rep.jump_part == 0.0

    def test_half_vortex_tensor(self):
        u = make_half_vortex(256)
        rep = embedded_tv(u, "euclidean_tensor")
        assert rep.total == pytest.approx(np.pi, rel=0.03)
        assert rep.jump_part == 0.0  # the embedded field is continuous

    def test_sphere_jump_two(self):
        grid = 128
        h = 1.0 / grid
        c = (np.arange(grid) + 0.5) * h - 0.5
        X, _ = np.meshgrid(c, c, indexing="ij")
        vals = np.where((X < 0)[..., None], [1.0, 0.0], [-1.0, 0.0])
        f = GridField((grid, grid), h, (-0.5, -0.5), "unit", vals)
        rep = embedded_tv(f, "euclidean_sphere")
        assert rep.total == pytest.approx(2.0, rel=0.03)
        assert rep.ac_part == 0.0

    def test_decomposition_is_consistent(self):
        n = make_half_vortex_lifting(128)
        rep = embedded_tv(n, "euclidean_sphere")
        assert rep.total == pytest.approx(rep.ac_part + rep.jump_part,
                                          abs=1e-9)
        assert rep.ac_part >= 0 and rep.jump_part > 0

    def test_proj_field_rejects_sphere_metric(self):
        with pytest.raises(ValueError):
            embedded_tv(constant_field(8), "euclidean_sphere")

    def test_lifted_half_vortex_ratio(self):
        # axis-aligned seam: (ac + jump)/(tensor total) ~ 1 + 2/pi
        u = make_half_vortex(256)
        n = make_half_vortex_lifting(256)
        e_n = embedded_tv(n, "euclidean_sphere")
        e_u = embedded_tv(u, "euclidean_tensor")
        assert e_n.total / e_u.total == pytest.approx(1 + 2 / np.pi, rel=0.02)


class TestDetectJumps:
    def test_constant_empty(self):
        assert detect_jumps(constant_field(16), "geodesic") == []

    def test_smooth_below_threshold_empty(self):
        f = angle_field(64, lambda X, Y: 0.5 * X)
        assert detect_jumps(f, "geodesic") == []

    def test_half_vortex_lifting_seam(self):
        # the canonical lifting jumps between antipodes across theta = 0
        n = make_half_vortex_lifting(128)
        faces = detect_jumps(n, "euclidean_sphere")
        assert len(faces) > 0
        costs = np.array([c for _, _, c in faces])
        h = n.spacing
        assert np.all(costs >= 2.0 - 8 * h)
        # seam sits along the positive x axis: y-index just below center
        for (i, j), axis, _ in faces:
            assert axis == 1
            assert j in (63, 64)
            assert i >= 64

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            detect_jumps(constant_field(8), "geodesic", threshold=0.0)

    def test_default_thresholds(self):
        assert default_jump_threshold("geodesic") == pytest.approx(np.pi / 4)
        assert default_jump_threshold("euclidean_sphere") == pytest.approx(
            2 * np.sin(np.pi / 8))
        assert default_jump_threshold("euclidean_tensor") == pytest.approx(
            np.sin(np.pi / 4))


class TestScaling:
    def test_jump_energy_scales_with_area(self):
        # dilating the domain scales jump energies by lambda^{N-1}
        f1 = jump_field(64)
        lam = 3.0
        f2 = GridField(f1.dims, lam * f1.spacing,
                       tuple(lam * o for o in f1.origin), "proj", f1.values)
        for metric in ("geodesic", "euclidean_tensor"):
            e1 = embedded_tv(f1, metric).total
            e2 = embedded_tv(f2, metric).total
            assert e2 == pytest.approx(lam * e1, rel=1e-12)
            t1 = directional_tv(f1, np.array([1.0, 0.0]), metric)
            t2 = directional_tv(f2, np.array([1.0, 0.0]), metric)
            assert t2 == pytest.approx(lam * t1, rel=1e-12)

    def test_smooth_profile_scales_the_same_way(self):
        # fixed index-space profile: integral of the gradient also picks up
        # exactly lambda^{N-1} = h^N (1/h) scaling
        f1 = angle_field(64, lambda X, Y: 1.1 * X)
        lam = 2.0
        f2 = GridField(f1.dims, lam * f1.spacing,
                       tuple(lam * o for o in f1.origin), "proj", f1.values)
        e1 = embedded_tv(f1, "euclidean_tensor").total
        e2 = embedded_tv(f2, "euclidean_tensor").total
        assert e2 == pytest.approx(lam * e1, rel=1e-12)

    def test_mollified_scales_with_proportional_eps(self):
        f1 = jump_field(64)
        lam = 2.0
        f2 = GridField(f1.dims, lam * f1.spacing,
                       tuple(lam * o for o in f1.origin), "proj", f1.values)
        e1 = mollified_energy(f1, Mollifier(8 * f1.spacing), "geodesic").total
        e2 = mollified_energy(f2, Mollifier(8 * f2.spacing), "geodesic").total
        assert e2 == pytest.approx(lam * e1, rel=1e-12)


class TestMetricDispatch:
    def test_unknown_metric(self):
        with pytest.raises(ValueError):
            metric_distance("l1", "unit")

    def test_proj_chord_is_min_over_signs(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((64, 3))
        a /= np.linalg.norm(a, axis=-1, keepdims=True)
        b = rng.standard_normal((64, 3))
        b /= np.linalg.norm(b, axis=-1, keepdims=True)
        chord = metric_distance("euclidean_sphere", "proj")(a, b)
        direct = np.minimum(np.linalg.norm(a - b, axis=-1),
                            np.linalg.norm(a + b, axis=-1))
        assert np.allclose(chord, direct, atol=1e-12)
