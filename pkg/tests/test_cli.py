import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from minksum.cli import main
from minksum.steiner import area_sum_2d_pair
from minksum.spd import SpdMatrix

EXAMPLE_SCENE = {
    "dimension": 2,
    "ellipsoids": [
        {"matrix": [[5.0, 0.0], [0.0, 0.5]]},
        {"matrix": [[2.0, 2.0], [2.0, 5.0]]},
    ],
}

UNIT_BALL_2D = {"dimension": 2, "ellipsoids": [{"matrix": [[1.0, 0.0], [0.0, 1.0]]}]}


@pytest.fixture
def runner():
    return CliRunner()


def write_scene(tmp_path, obj, name="scene.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def shoelace(points):
    x, y = points[:, 0], points[:, 1]
    return 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class TestBoundaryCommand:
    def test_unit_ball_rows(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(main, ["boundary", path, "--samples", "4"])
        assert res.exit_code == 0
        lines = res.output.strip().split("\n")
        assert lines[0] == "n_1,n_2,x_1,x_2,kappa_1"
        assert len(lines) == 5
        for line in lines[1:]:
            vals = [float(v) for v in line.split(",")]
            assert vals[0] == pytest.approx(vals[2], abs=1e-15)
            assert vals[1] == pytest.approx(vals[3], abs=1e-15)
            assert vals[4] == pytest.approx(1.0, abs=1e-15)

    def test_shoelace_area(self, runner, tmp_path):
        # 720 samples: with normal-uniform vertices the low-curvature arcs
        # carry long chords, so 360 points leave a ~2e-4 area deficit
        path = write_scene(tmp_path, EXAMPLE_SCENE)
        res = runner.invoke(main, ["boundary", path, "--samples", "720"])
        assert res.exit_code == 0
        rows = np.array(
            [
                [float(v) for v in line.split(",")]
                for line in res.output.strip().split("\n")[1:]
            ]
        )
        area = shoelace(rows[:, 2:4])
        exact = area_sum_2d_pair(
            SpdMatrix(np.array(EXAMPLE_SCENE["ellipsoids"][0]["matrix"])),
            SpdMatrix(np.array(EXAMPLE_SCENE["ellipsoids"][1]["matrix"])),
        )
        assert area == pytest.approx(exact, rel=1e-4)

    def test_single_ellipse_on_boundary(self, runner, tmp_path):
        mat = [[2.0, 0.5], [0.5, 1.0]]
        path = write_scene(tmp_path, {"dimension": 2, "ellipsoids": [{"matrix": mat}]})
        res = runner.invoke(main, ["boundary", path, "--samples", "32"])
        assert res.exit_code == 0
        a = np.array(mat)
        inv2 = np.linalg.inv(a @ a)
        for line in res.output.strip().split("\n")[1:]:
            vals = [float(v) for v in line.split(",")]
            x = np.array(vals[2:4])
            assert x @ inv2 @ x == pytest.approx(1.0, abs=1e-10)

    def test_3d_boundary(self, runner, tmp_path):
        path = write_scene(
            tmp_path,
            {"dimension": 3, "ellipsoids": [{"matrix": np.eye(3).tolist()}]},
        )
        res = runner.invoke(main, ["boundary", path, "--samples", "50"])
        assert res.exit_code == 0
        lines = res.output.strip().split("\n")
        assert lines[0] == "n_1,n_2,n_3,x_1,x_2,x_3,kappa_1,kappa_2"
        assert len(lines) == 51


class TestVolumeCommand:
    def test_divergence_single(self, runner, tmp_path):
        path = write_scene(
            tmp_path,
            {"dimension": 2, "ellipsoids": [{"matrix": [[2.0, 0.0], [0.0, 3.0]]}]},
        )
        res = runner.invoke(main, ["volume", path])
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert payload["method"] == "divergence"
        assert payload["value"] == pytest.approx(6 * math.pi, rel=1e-10)
        assert abs(payload["refinement_delta"]) < 1e-10

    def test_steiner_2d(self, runner, tmp_path):
        path = write_scene(tmp_path, EXAMPLE_SCENE)
        res = runner.invoke(main, ["volume", path, "--method", "steiner"])
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert payload["exact"] is True
        assert payload["value"] == pytest.approx(134.64183305, rel=1e-8)

    def test_steiner_3d_triple_bounds(self, runner, tmp_path):
        scene = {
            "dimension": 3,
            "ellipsoids": [
                {"matrix": np.eye(3).tolist()},
                {"matrix": (2 * np.eye(3)).tolist()},
                {"matrix": np.diag([1.0, 1.0, 1.5]).tolist()},
            ],
        }
        path = write_scene(tmp_path, scene)
        res = runner.invoke(main, ["volume", path, "--method", "steiner"])
        assert res.exit_code == 0
        payload = json.loads(res.output)
        div = json.loads(
            runner.invoke(main, ["volume", path, "--method", "divergence"]).output
        )
        assert payload["lower"] <= div["value"] * (1 + 1e-9)
        assert div["value"] <= payload["upper"] * (1 + 1e-9)

    def test_montecarlo_requires_seed(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(main, ["volume", path, "--method", "montecarlo"])
        assert res.exit_code == 2

    def test_montecarlo_with_seed(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(
            main,
            ["volume", path, "--method", "montecarlo", "--samples", "100000", "--seed", "5"],
        )
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert abs(payload["value"] - math.pi) <= 4 * payload["std_error"]
        assert payload["seed"] == 5

    def test_methods_mutually_consistent(self, runner, tmp_path):
        path = write_scene(tmp_path, EXAMPLE_SCENE)
        div = json.loads(runner.invoke(main, ["volume", path]).output)["value"]
        ste = json.loads(
            runner.invoke(main, ["volume", path, "--method", "steiner"]).output
        )["value"]
        mc = json.loads(
            runner.invoke(
                main,
                [
                    "volume",
                    path,
                    "--method",
                    "montecarlo",
                    "--samples",
                    "200000",
                    "--seed",
                    "9",
                ],
            ).output
        )
        assert ste == pytest.approx(div, rel=1e-6)
        assert abs(mc["value"] - div) <= 4 * mc["std_error"]


class TestBoundsCommand:
    def test_example_pair_fields(self, runner, tmp_path):
        path = write_scene(tmp_path, EXAMPLE_SCENE)
        res = runner.invoke(main, ["bounds", path])
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert math.pi * payload["inner_john_det"] == pytest.approx(113.14, rel=5e-3)
        assert math.pi * payload["inner_sum_det"] == pytest.approx(108.38, rel=5e-3)
        assert payload["lower_volume"] <= payload["upper_volume"]
        assert len(payload["bm_chain"]) == 4

    def test_homothetic_chain_collapse(self, runner, tmp_path):
        scene = {
            "dimension": 2,
            "ellipsoids": [
                {"matrix": [[1.0, 0.2], [0.2, 2.0]]},
                {"matrix": [[2.0, 0.4], [0.4, 4.0]]},
            ],
        }
        path = write_scene(tmp_path, scene)
        payload = json.loads(runner.invoke(main, ["bounds", path]).output)
        chain = payload["bm_chain"]
        assert chain[1] == pytest.approx(chain[2], abs=1e-10)
        assert chain[2] == pytest.approx(chain[3], abs=1e-10)

    def test_random_triple_sandwich(self, runner, tmp_path):
        rng = np.random.default_rng(90)
        q = np.linalg.qr(rng.normal(size=(2, 2)))[0]
        mats = [
            (q @ np.diag(rng.uniform(0.5, 2.0, 2)) @ q.T).tolist() for _ in range(3)
        ]
        path = write_scene(tmp_path, {"dimension": 2, "ellipsoids": [{"matrix": m} for m in mats]})
        payload = json.loads(runner.invoke(main, ["bounds", path]).output)
        div = json.loads(runner.invoke(main, ["volume", path]).output)["value"]
        assert payload["lower_volume"] <= div * (1 + 1e-9)
        assert div <= payload["upper_volume"] * (1 + 1e-9)


class TestPlotCommand:
    def test_example_curve_count_and_colors(self, runner, tmp_path):
        path = write_scene(tmp_path, EXAMPLE_SCENE)
        res = runner.invoke(main, ["plot", path])
        assert res.exit_code == 0
        svg = res.output
        assert svg.count("<polyline") == 5
        for color in ("black", "green", "blue", "red"):
            assert f'stroke="{color}"' in svg

    def test_single_ball(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(main, ["plot", path, "--show", "sum"])
        assert res.exit_code == 0
        assert res.output.count("<polyline") == 2
        assert 'stroke="black"' in res.output
        assert 'stroke="green"' in res.output

    def test_3d_rejected(self, runner, tmp_path):
        path = write_scene(
            tmp_path, {"dimension": 3, "ellipsoids": [{"matrix": np.eye(3).tolist()}]}
        )
        res = runner.invoke(main, ["plot", path])
        assert res.exit_code == 4

    def test_unknown_curve(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(main, ["plot", path, "--show", "sum,bogus"])
        assert res.exit_code == 2


class TestOracleCommand:
    def test_requires_seed(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(main, ["oracle", path])
        assert res.exit_code == 2

    def test_estimate(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(main, ["oracle", path, "--samples", "100000", "--seed", "3"])
        assert res.exit_code == 0
        payload = json.loads(res.output)
        assert abs(payload["value"] - math.pi) <= 4 * payload["std_error"]


class TestErrorHandling:
    def test_missing_file(self, runner):
        res = runner.invoke(main, ["volume", "/nonexistent/scene.json"])
        assert res.exit_code == 3

    def test_invalid_json(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        res = runner.invoke(main, ["volume", str(path)])
        assert res.exit_code == 1

    def test_schema_error(self, runner, tmp_path):
        path = write_scene(tmp_path, {"dimension": 2})
        res = runner.invoke(main, ["volume", path])
        assert res.exit_code == 1

    def test_numeric_validation_error(self, runner, tmp_path):
        path = write_scene(
            tmp_path,
            {"dimension": 2, "ellipsoids": [{"matrix": [[1.0, 0.0], [0.0, -1.0]]}]},
        )
        res = runner.invoke(main, ["volume", path])
        assert res.exit_code == 2

    def test_write_failure(self, runner, tmp_path):
        path = write_scene(tmp_path, UNIT_BALL_2D)
        res = runner.invoke(main, ["volume", path, "--out", "/nonexistent/dir/out.json"])
        assert res.exit_code == 3


class TestDeterminism:
    COMMANDS = [
        ["boundary", "--samples", "64"],
        ["volume"],
        ["volume", "--method", "steiner"],
        ["volume", "--method", "montecarlo", "--samples", "50000", "--seed", "42"],
        ["bounds"],
        ["plot"],
        ["oracle", "--samples", "50000", "--seed", "42"],
    ]

    def test_byte_identical_runs(self, runner, tmp_path):
        path = write_scene(tmp_path, EXAMPLE_SCENE)
        for cmd in self.COMMANDS:
            args = [cmd[0], path] + cmd[1:]
            first = runner.invoke(main, args)
            second = runner.invoke(main, args)
            assert first.exit_code == 0, f"{cmd}: {first.output}"
            assert first.stdout_bytes == second.stdout_bytes, f"differs: {cmd}"
