import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose

from scenegen.errors import BoundaryError, ConfigurationError, DimensionError, InvariantViolation
from scenegen.gaussians import Camera, rasterize
from scenegen.numerics import rel_l1
from scenegen.reconstruction import (
    DepthMap,
    PlaneSpec,
    ReconConfig,
    SceneSpec,
    Texture,
    TrajectoryKind,
    TrajectorySpec,
    canonical_scene,
    depth_stub,
    estimate_pose_stub,
    evaluate_interpolation,
    interior_timesteps,
    lift_to_gaussians,
    novel_view_eval,
    ray_cast,
    reconstruct_frame,
    reconstruct_sequence,
    render_ground_truth,
)
from scenegen.storage import FrameStore


def wall_scene(z=4.0):
    return SceneSpec(planes=[PlaneSpec(point=(0.0, 0.0, z), normal=(0.0, 0.0, -1.0),
                                       texture=Texture(color=(0.5, 0.4, 0.3), amplitude=0.0))])


def small_trajectory(**overrides):
    params = dict(frames=5, width=48, height=32)
    params.update(overrides)
    return TrajectorySpec(**params)


class TestTrajectory(unittest.TestCase):

    def test_pose_out_of_range(self):
        trajectory = small_trajectory()
        with self.assertRaises(BoundaryError):
            estimate_pose_stub(5, 0, trajectory)
        with self.assertRaises(BoundaryError):
            estimate_pose_stub(0, 2, trajectory)

    def test_static_rig_does_not_move(self):
        trajectory = small_trajectory()
        first, last = estimate_pose_stub(0, 1, trajectory), estimate_pose_stub(4, 1, trajectory)
        assert_allclose(first.R, last.R)
        assert_allclose(first.center, last.center)

    def test_linear_rig_moves_by_velocity(self):
        trajectory = small_trajectory(kind=TrajectoryKind.LINEAR, velocity=(0.0, 0.0, 0.2))
        assert_allclose(estimate_pose_stub(3, 0, trajectory).center, [0.0, 0.0, 0.6], atol=1e-12)

    def test_circular_rig_keeps_radius(self):
        trajectory = small_trajectory(kind=TrajectoryKind.CIRCULAR, angular_step_deg=10.0)
        for frame in range(trajectory.frames):
            center = estimate_pose_stub(frame, 0, trajectory).center
            self.assertAlmostEqual(np.linalg.norm(center - np.array(trajectory.pivot)), trajectory.radius)

    def test_views_are_yawed(self):
        trajectory = small_trajectory(view_yaws_deg=[0.0, 90.0])
        forward = estimate_pose_stub(0, 1, trajectory).R.T @ np.array([0.0, 0.0, 1.0])
        assert_allclose(forward, [1.0, 0.0, 0.0], atol=1e-12)

    def test_at_resolution(self):
        self.assertEqual(small_trajectory().at_resolution(16, 8).width, 16)


class TestDepthAndLifting(unittest.TestCase):

    def setUp(self):
        self.trajectory = small_trajectory()
        self.cam = Camera.from_fov(48, 32, 60.0)

    def test_depth_of_fronto_parallel_wall(self):
        depth = depth_stub(wall_scene(4.0), self.cam)
        self.assertEqual(depth.shape, (32, 48))
        assert_allclose(depth.values, np.full((32, 48), 4.0), atol=1e-9)

    def test_depth_map_rejects_non_positive(self):
        with self.assertRaises(InvariantViolation):
            DepthMap(np.zeros((4, 4)))
        with self.assertRaises(DimensionError):
            DepthMap(np.ones(4))

    def test_lifted_gaussians_project_to_their_pixels(self):
        image, _ = ray_cast(wall_scene(), self.cam)
        fg = lift_to_gaussians(image, depth_stub(wall_scene(), self.cam), self.cam, ReconConfig(), t=3)
        self.assertEqual(len(fg), 32 * 48)
        self.assertEqual(fg.t, 3)
        x_cam = self.cam.world_to_camera(fg.means)
        assert_allclose(x_cam[:, 2], 4.0, atol=1e-9)
        u, v = self.cam.pixel_grid()
        assert_allclose(self.cam.fx * x_cam[:, 0] / x_cam[:, 2] + self.cam.cx, u.ravel(), atol=1e-9)
        assert_allclose(self.cam.fy * x_cam[:, 1] / x_cam[:, 2] + self.cam.cy, v.ravel(), atol=1e-9)

    def test_stride_and_alpha(self):
        image, _ = ray_cast(wall_scene(), self.cam)
        fg = lift_to_gaussians(image, depth_stub(wall_scene(), self.cam), self.cam,
                               ReconConfig(per_pixel_stride=4), alpha=0.25)
        self.assertEqual(len(fg), 8 * 12)
        assert_allclose(fg.alphas, 0.25)

    def test_mismatched_shapes(self):
        with self.assertRaises(DimensionError):
            lift_to_gaussians(np.zeros((10, 10, 3)), depth_stub(wall_scene(), self.cam), self.cam, ReconConfig())


class TestSequence(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()
        self.scene = canonical_scene()

    def tearDown(self):
        shutil.rmtree(self.tmpdir, ignore_errors=True)

    def test_interior_timesteps(self):
        self.assertEqual(interior_timesteps(10, 2), [2, 3, 4, 5, 6, 7])
        with self.assertRaises(ConfigurationError) as ctx:
            interior_timesteps(2, 1)
        self.assertEqual(ctx.exception.key, "recon.delta")

    def test_triplet_needs_both_neighbours(self):
        trajectory = small_trajectory()
        frames = render_ground_truth(self.scene, trajectory)
        for t in (0, 4):
            with self.assertRaises(BoundaryError):
                reconstruct_frame(frames, t, ReconConfig(), trajectory, self.scene)

    def test_sequence_writes_one_scene_per_interior_timestep(self):
        trajectory = small_trajectory(frames=10, width=16, height=12)
        frames = render_ground_truth(self.scene, trajectory)
        recon = reconstruct_sequence(frames, ReconConfig(delta=2, per_pixel_stride=4), trajectory, self.scene,
                                     output_dir=Path(self.tmpdir))
        self.assertEqual([fg.t for fg in recon], [2, 3, 4, 5, 6, 7])
        self.assertEqual(len(list(Path(self.tmpdir).glob("*.sgf"))), 6)

    def test_worker_pool_matches_serial(self):
        trajectory = small_trajectory(width=16, height=12)
        frames = render_ground_truth(self.scene, trajectory)
        serial = reconstruct_sequence(frames, ReconConfig(), trajectory, self.scene)
        pooled = reconstruct_sequence(frames, ReconConfig(workers=3), trajectory, self.scene)
        for a, b in zip(serial, pooled):
            self.assertEqual(a.t, b.t)
            assert_allclose(a.means, b.means)

    def test_neighbour_weight_zero_keeps_only_centre(self):
        trajectory = small_trajectory(width=16, height=12)
        frames = render_ground_truth(self.scene, trajectory)
        fg = reconstruct_frame(frames, 2, ReconConfig(neighbor_weight=0.0), trajectory, self.scene)
        self.assertEqual(len(fg), 2 * 16 * 12)
        self.assertEqual(frames.timesteps_read(), {2})

    def test_attenuated_neighbours(self):
        trajectory = small_trajectory(width=16, height=12)
        frames = render_ground_truth(self.scene, trajectory)
        fg = reconstruct_frame(frames, 2, ReconConfig(), trajectory, self.scene)
        self.assertEqual(len(fg), 3 * 2 * 16 * 12)
        self.assertEqual(sorted(set(fg.alphas)), [0.5, 1.0])

    def test_round_trip_quality(self):
        trajectory = small_trajectory()
        cfg = ReconConfig()
        frames = render_ground_truth(self.scene, trajectory)
        recon = reconstruct_sequence(frames, cfg, trajectory, self.scene)
        for fg in recon:
            result = novel_view_eval(recon, frames, fg.t, trajectory, cfg)
            self.assertGreaterEqual(result.mean_psnr, 30.0)
            self.assertGreaterEqual(result.mean_ssim, 0.95)

    def test_static_scene_is_temporally_consistent(self):
        trajectory = small_trajectory(frames=6, width=16, height=12)
        cfg = ReconConfig()
        recon = reconstruct_sequence(render_ground_truth(self.scene, trajectory), cfg, trajectory, self.scene)
        cam = estimate_pose_stub(0, 0, trajectory)
        renders = [rasterize(fg, cam, background=cfg.background, tile_size=cfg.tile_size).color for fg in recon]
        for previous, current in zip(renders, renders[1:]):
            self.assertLessEqual(rel_l1(previous, current), 1e-3)

    def test_missing_reconstruction(self):
        trajectory = small_trajectory()
        frames = render_ground_truth(self.scene, trajectory)
        with self.assertRaises(BoundaryError):
            novel_view_eval([], frames, 2, trajectory, ReconConfig())


class TestHeldOutEvaluation(unittest.TestCase):

    def setUp(self):
        self.scene = canonical_scene()
        self.trajectory = small_trajectory()
        self.frames = render_ground_truth(self.scene, self.trajectory)

    def test_held_out_reconstruction_reads_only_neighbours(self):
        reconstruct_frame(self.frames, 2, ReconConfig(), self.trajectory, self.scene, include_center=False)
        self.assertEqual(self.frames.timesteps_read(), {1, 3})

    def test_static_rig_interpolation(self):
        results = evaluate_interpolation(self.frames, ReconConfig(), self.trajectory, self.scene)
        self.assertEqual([r.t for r in results], [1, 2, 3])
        for result in results:
            self.assertGreaterEqual(result.mean_psnr, 28.0)
            record = result.to_record()
            self.assertEqual(len(record["views"]), 2)

    def test_frame_store_bounds(self):
        store = FrameStore.from_nested([[np.zeros((2, 2, 3))]])
        with self.assertRaises(BoundaryError):
            store.get(1, 0)


if __name__ == "__main__":
    unittest.main()
