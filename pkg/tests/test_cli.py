"""End-to-end tests for the command-line front end.

Everything drives cli.run() directly: fixtures are written to a shared tmp
directory, reports land in per-test files, and exit codes plus report
fields are asserted against library-level recomputation.
"""

import json

import numpy as np
import pytest

from qwiener import LaurentQSeries, Quaternion, QMatrix
from qwiener import cli
from qwiener.halfline import (
    ConvolutionOperator,
    DifferenceOperator,
    GridFunction,
    apply_convolution,
)
from qwiener.quaternions import hprod
from qwiener.realize import RationalQMatrix


def _q(w, x=0.0, y=0.0, z=0.0):
    m = np.zeros((1, 1, 4))
    m[0, 0] = [w, x, y, z]
    return QMatrix(m)


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)


@pytest.fixture(scope="module")
def box(tmp_path_factory):
    """Directory of input files shared by the CLI tests."""
    d = tmp_path_factory.mktemp("cli_fixtures")

    def put(name, obj):
        path = d / name
        path.write_text(json.dumps(obj))
        return path

    put("id.json", LaurentQSeries.identity(2).as_json())

    # z - q with |q| = 1: the embedded determinant has both roots on the
    # unit circle, so the symbol sits exactly on the invertibility boundary
    q = Quaternion(0.5, 0.5, 0.5, 0.5)
    pm = LaurentQSeries(
        1, {1: QMatrix.identity(1), 0: QMatrix.identity(1).left_mul(q * -1.0)}
    )
    put("pm_q_unit.json", pm.as_json())

    nice = LaurentQSeries(
        1,
        {
            0: QMatrix.identity(1),
            1: QMatrix.identity(1).left_mul(Quaternion(0.1, 0.2, -0.1, 0.05)),
        },
    )
    put("nice.json", nice.as_json())

    put(
        "rat.json",
        RationalQMatrix(1, {0: _q(-3.0), 1: _q(1.0)}, [3.0, 1.0]).as_json(),
    )

    # (1 + q1/p)(1 + q2 p) in the disc variable: canonical by construction
    q1 = np.zeros((1, 1, 4))
    q1[0, 0] = [0.3, 0.1, 0.0, 0.0]
    q2 = np.zeros((1, 1, 4))
    q2[0, 0] = [0.2, 0.0, -0.1, 0.0]
    mid = np.zeros((1, 1, 4))
    mid[0, 0, 0] = 1.0
    canon = RationalQMatrix(
        1,
        {0: QMatrix(q1), 1: QMatrix(mid + hprod(q1, q2)), 2: QMatrix(q2)},
        [0.0, 1.0],
    )
    put("canon.json", canon.as_json())

    put("shift1.json", DifferenceOperator({1: ONE}).as_json())
    boxfn = GridFunction.from_callable(lambda t: 1.0 if t <= 1.0 else 0.0, 8, 16)
    boxfn.to_csv(d / "box01.csv")

    atom = RationalQMatrix(1, {0: _q(1.0), 1: _q(1.0)}, [-1.0, 1.0])
    vop = ConvolutionOperator.from_callable(
        ONE,
        lambda u: -1.0 if u == 0.0 else (-2.0 * np.exp(-u) if u > 0 else 0.0),
        L=16,
        s=64,
        rational=atom,
    )
    put("vop.json", vop.as_json())
    psi = GridFunction.from_callable(lambda t: np.exp(-t), 32, 64)
    apply_convolution(vop, psi).to_csv(d / "vrhs.csv")

    put("junk.json", {"neither": "series", "nor": "rational"})
    (d / "garbage.json").write_text("{this is not json")
    return d


def run_to(args, out):
    code = cli.run(args + ["--out", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


class TestSpecExamples:
    def test_factorize_identity_all_zero_indices(self, box, tmp_path):
        code, rep = run_to(["factorize", "--symbol", str(box / "id.json")], tmp_path / "r.json")
        assert code == 0
        assert rep["status"] == "ok"
        assert rep["indices"] == [0, 0]

    def test_invert_check_unit_q_obstruction(self, box, tmp_path):
        code, rep = run_to(
            ["invert-check", "--symbol", str(box / "pm_q_unit.json")], tmp_path / "r.json"
        )
        assert code == 2
        assert rep["status"] == "obstruction"
        assert not rep["invertible"]
        # oracle: embedded det is z^2 - 2 Re(q) z + |q|^2; both roots on the
        # unit circle, so the symbol vanishes on it and the sampled minimum
        # sits at grid-resolution distance from an exact zero
        roots = np.roots([1.0, -1.0, 1.0])
        assert np.allclose(np.abs(roots), 1.0, atol=1e-12)
        cert = rep["certificate"]
        assert cert["min_modulus"] < 1e-2

    def test_solve_difference_box_unsolvable(self, box, tmp_path):
        code, rep = run_to(
            [
                "solve-difference",
                "--op", str(box / "shift1.json"),
                "--rhs", str(box / "box01.csv"),
            ],
            tmp_path / "r.json",
        )
        assert code == 2
        assert rep["status"] == "obstruction"
        assert rep["report"]["verdict"] == "unsolvable: nonzero on (0,1]"
        assert rep["report"]["certificates"]["band_max"] > 0.5


class TestReports:
    def test_byte_identical_reruns(self, box, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert cli.run(["factorize", "--symbol", str(box / "nice.json"),
                            "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_schema_version_everywhere(self, box, tmp_path):
        cases = [
            ["invert-check", "--symbol", str(box / "nice.json")],
            ["winding", "--symbol", str(box / "rat.json")],
            ["realize", "--symbol", str(box / "rat.json")],
        ]
        for i, args in enumerate(cases):
            code, rep = run_to(args, tmp_path / f"r{i}.json")
            assert code == 0
            assert rep["schema_version"] == 1
            assert rep["status"] == "ok"
            assert rep["frame"]["i"] == [0.0, 1.0, 0.0, 0.0]

    def test_report_to_stdout_when_no_out(self, box, capsys):
        assert cli.run(["winding", "--symbol", str(box / "nice.json")]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["index"] == 0

    def test_solution_csv_written_next_to_report(self, box, tmp_path):
        out = tmp_path / "conv.json"
        code, rep = run_to(
            ["solve-convolution", "--op", str(box / "vop.json"),
             "--rhs", str(box / "vrhs.csv")],
            out,
        )
        assert code == 0
        assert rep["solution_csv"] == "conv.solution.csv"
        side = tmp_path / "conv.solution.csv"
        assert side.exists()
        psi = GridFunction.from_csv(side)
        embedded = np.asarray(rep["solution"]["samples"])
        assert np.array_equal(psi.samples, embedded)


class TestSubcommands:
    def test_star_invert_report(self, box, tmp_path):
        code, rep = run_to(
            ["star-invert", "--symbol", str(box / "nice.json")], tmp_path / "r.json"
        )
        assert code == 0
        assert rep["residual"] < 1e-8
        inv = LaurentQSeries.from_json(rep["inverse"])
        assert inv.n == 1

    def test_factorize_continuous_domain(self, box, tmp_path):
        code, rep = run_to(
            ["factorize", "--symbol", str(box / "rat.json")], tmp_path / "r.json"
        )
        assert code == 0
        assert rep["domain"] == "continuous"
        assert rep["indices"] == [-1]
        assert rep["residual"] < 1e-8

    def test_canonical_factorize_report(self, box, tmp_path):
        code, rep = run_to(
            ["canonical-factorize", "--symbol", str(box / "canon.json")],
            tmp_path / "r.json",
        )
        assert code == 0
        assert rep["residual"] < 1e-8
        assert set(rep["factors"]) == {"f_minus", "f_plus", "f_minus_inv", "f_plus_inv"}
        assert rep["projections"]["symmetry_residual"] < 1e-8

    def test_realize_self_check(self, box, tmp_path):
        code, rep = run_to(
            ["realize", "--symbol", str(box / "rat.json")], tmp_path / "r.json"
        )
        assert code == 0
        assert rep["self_check"]["max_relative_error"] < 1e-10
        assert rep["self_check"]["points"] >= 10
        assert rep["state_size"] == rep["realization"]["A"]["rows"]

    def test_winding_discrete_and_rational(self, box, tmp_path):
        code, rep = run_to(
            ["winding", "--symbol", str(box / "nice.json")], tmp_path / "a.json"
        )
        assert code == 0 and rep["index"] == 0
        code, rep = run_to(
            ["winding", "--symbol", str(box / "rat.json")], tmp_path / "b.json"
        )
        assert code == 0 and rep["index"] == -1

    def test_solve_convolution_solvable(self, box, tmp_path):
        code, rep = run_to(
            ["solve-convolution", "--op", str(box / "vop.json"),
             "--rhs", str(box / "vrhs.csv")],
            tmp_path / "r.json",
        )
        assert code == 0
        inner = rep["report"]
        assert inner["verdict"] == "solvable"
        assert inner["index"] == 1
        assert inner["residual"] < 1e-4
        assert inner["moments"][0] < 1e-6


class TestVerify:
    @pytest.mark.parametrize(
        "args",
        [
            ["invert-check", "--symbol", "nice.json"],
            ["invert-check", "--symbol", "pm_q_unit.json"],
            ["star-invert", "--symbol", "nice.json"],
            ["factorize", "--symbol", "nice.json"],
            ["factorize", "--symbol", "rat.json"],
            ["canonical-factorize", "--symbol", "canon.json"],
            ["realize", "--symbol", "rat.json"],
            ["winding", "--symbol", "rat.json"],
            ["solve-difference", "--op", "shift1.json", "--rhs", "box01.csv"],
            ["solve-convolution", "--op", "vop.json", "--rhs", "vrhs.csv"],
        ],
        ids=lambda a: "-".join([a[0]] + [w for w in a if w.endswith(".json") or w.endswith(".csv")]),
    )
    def test_roundtrip(self, box, tmp_path, args):
        resolved = [str(box / w) if w.endswith((".json", ".csv")) else w for w in args]
        out = tmp_path / "rep.json"
        code = cli.run(resolved + ["--out", str(out)])
        assert code in (0, 2)
        vout = tmp_path / "ver.json"
        vcode = cli.run(["verify", "--json", str(out), "--out", str(vout)])
        ver = json.loads(vout.read_text())
        assert vcode == 0, ver["checks"]
        assert ver["verified"]
        assert all(c["passed"] for c in ver["checks"])

    def test_tampered_report_fails(self, box, tmp_path):
        out = tmp_path / "rep.json"
        assert cli.run(["factorize", "--symbol", str(box / "nice.json"),
                        "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        rep["indices"] = [1]
        out.write_text(json.dumps(rep))
        vout = tmp_path / "ver.json"
        assert cli.run(["verify", "--json", str(out), "--out", str(vout)]) == 2
        assert not json.loads(vout.read_text())["verified"]

    def test_tampered_solution_fails(self, box, tmp_path):
        out = tmp_path / "rep.json"
        assert cli.run(["solve-convolution", "--op", str(box / "vop.json"),
                        "--rhs", str(box / "vrhs.csv"), "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        rep["solution"]["samples"][10][0] += 0.25
        out.write_text(json.dumps(rep))
        assert cli.run(["verify", "--json", str(out)]) == 2


class TestErrorPaths:
    def test_missing_file(self, box, capsys):
        assert cli.run(["invert-check", "--symbol", str(box / "nope.json")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unparseable_json(self, box, capsys):
        assert cli.run(["invert-check", "--symbol", str(box / "garbage.json")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unrecognized_symbol_shape(self, box, capsys):
        assert cli.run(["invert-check", "--symbol", str(box / "junk.json")]) == 1
        assert "unrecognized symbol" in capsys.readouterr().err

    def test_star_invert_rejects_rational(self, box, capsys):
        assert cli.run(["star-invert", "--symbol", str(box / "rat.json")]) == 1
        assert "discrete series" in capsys.readouterr().err

    def test_bad_frame_spec(self, box, capsys):
        assert cli.run(["winding", "--symbol", str(box / "nice.json"),
                        "--frame", "i=1,0,0"]) == 1
        capsys.readouterr()

    def test_degenerate_frame_rejected(self, box, capsys):
        assert cli.run(["winding", "--symbol", str(box / "nice.json"),
                        "--frame", "i=0,1,0,0;j=0,1,0,0"]) == 1
        capsys.readouterr()

    def test_nonpositive_tol_rejected(self, box, capsys):
        assert cli.run(["invert-check", "--symbol", str(box / "nice.json"),
                        "--tol=-1e-9"]) == 1
        assert "positive" in capsys.readouterr().err

    def test_unknown_subcommand_usage_error(self, box, capsys):
        assert cli.run(["frobnicate"]) == 1
        capsys.readouterr()

    def test_verify_unknown_report(self, box, tmp_path, capsys):
        p = tmp_path / "odd.json"
        p.write_text(json.dumps({"subcommand": "mystery", "status": "ok", "frame": {
            "i": [0, 1, 0, 0], "j": [0, 0, 1, 0]}}))
        assert cli.run(["verify", "--json", str(p)]) == 1
        assert "cannot verify" in capsys.readouterr().err


class TestFrameFlag:
    def test_rotated_frame_same_index(self, box, tmp_path):
        base = tmp_path / "a.json"
        rot = tmp_path / "b.json"
        assert cli.run(["winding", "--symbol", str(box / "nice.json"),
                        "--out", str(base)]) == 0
        assert cli.run(["winding", "--symbol", str(box / "nice.json"),
                        "--frame", "i=0,0.6,0.8,0;j=0,-0.8,0.6,0",
                        "--out", str(rot)]) == 0
        a = json.loads(base.read_text())
        b = json.loads(rot.read_text())
        assert a["index"] == b["index"]
        assert b["frame"]["i"] == [0.0, 0.6, 0.8, 0.0]

    def test_frame_echoed_in_report_verifies(self, box, tmp_path):
        out = tmp_path / "r.json"
        assert cli.run(["factorize", "--symbol", str(box / "nice.json"),
                        "--frame", "i=0,0.6,0.8,0;j=0,-0.8,0.6,0",
                        "--out", str(out)]) == 0
        assert cli.run(["verify", "--json", str(out)]) == 0
