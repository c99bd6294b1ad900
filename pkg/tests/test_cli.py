import json
import math

import pytest

from seqassign import asymptotic_profile, fair_dice
from seqassign.cli import main


@pytest.fixture
def dice_path(tmp_path):
    path = tmp_path / "dice.json"
    path.write_text(json.dumps({"support": [1, 2, 3, 4, 5, 6], "probs": [1 / 6] * 6}))
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestHappyPaths:
    def test_profile(self, capsys, dice_path):
        code, out, err = run(capsys, ["profile", "--dist", dice_path])
        assert code == 0 and err == ""
        lines = out.strip().splitlines()
        assert lines[0] == "i,d"
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert values == list(asymptotic_profile(fair_dice()).d)

    def test_thresholds(self, capsys, dice_path):
        code, out, _ = run(capsys, ["thresholds", "--dist", dice_path, "--n", "3"])
        assert code == 0
        assert out == "n,a\n1,2.75\n2,4.25\n"

    def test_locations(self, capsys, dice_path):
        code, out, _ = run(capsys, ["locations", "--dist", dice_path, "--n", "3"])
        assert code == 0
        ells = [int(line.split(",")[2]) for line in out.strip().splitlines()[1:]]
        assert ells == [1, 1, 2, 2, 3, 3]

    def test_converge(self, capsys, dice_path):
        code, out, _ = run(capsys, ["converge", "--dist", dice_path, "--n", "5,10"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "N,i,ell,ell_over_N,d,gap"
        assert len(lines) == 1 + 2 * 6

    def test_rates(self, capsys, dice_path):
        code, out, _ = run(capsys, ["rates", "--dist", dice_path, "--i", "3", "--grid", "5"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "y,rate_minus,rate_plus"
        assert len(lines) == 6
        first = [float(c) for c in lines[1].split(",")]
        last = [float(c) for c in lines[-1].split(",")]
        # the grid spans the mass band, where exactly one rate vanishes per end
        assert first[1] == 0.0 and first[2] > 0.0
        assert last[1] > 0.0 and last[2] == 0.0

    def test_simulate(self, capsys, dice_path):
        code, out, _ = run(
            capsys,
            ["simulate", "--dist", dice_path, "--n", "6", "--trials", "200", "--seed", "3"],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "policy,trials,mean,variance,std_error,target,abs_gap"
        cells = lines[1].split(",")
        assert cells[0] == "optimal" and int(cells[1]) == 200
        assert math.isfinite(float(cells[5]))

    def test_simulate_random_policy_has_no_target(self, capsys, dice_path):
        code, out, _ = run(
            capsys,
            ["simulate", "--dist", dice_path, "--n", "4", "--policy", "random",
             "--trials", "50"],
        )
        assert code == 0
        cells = out.strip().splitlines()[1].split(",")
        assert cells[0] == "uniform_random"
        assert cells[5] == "" and cells[6] == ""

    def test_oracle(self, capsys, dice_path):
        code, out, _ = run(capsys, ["oracle", "--dist", dice_path, "--n", "5"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "oracle,engine,rel_gap"
        oracle, engine, gap = (float(c) for c in lines[1].split(","))
        assert gap < 1e-9 and oracle == pytest.approx(engine)

    def test_audit_clean(self, capsys, dice_path):
        code, out, _ = run(capsys, ["audit", "--dist", dice_path, "--n", "50"])
        assert code == 0
        assert out == "N,i,delta\n"

    def test_rewards_file(self, capsys, dice_path, tmp_path):
        rfile = tmp_path / "r.json"
        rfile.write_text("[1.5, 2.5, 10]")
        code, out, _ = run(capsys, ["oracle", "--dist", dice_path, "--rewards", str(rfile)])
        assert code == 0
        assert float(out.strip().splitlines()[1].split(",")[2]) < 1e-9

    def test_out_file_matches_stdout(self, capsys, dice_path, tmp_path):
        _, out, _ = run(capsys, ["thresholds", "--dist", dice_path, "--n", "5"])
        target = tmp_path / "t.csv"
        code = main(["thresholds", "--dist", dice_path, "--n", "5", "--out", str(target)])
        capsys.readouterr()
        assert code == 0
        assert target.read_bytes() == out.encode()

    def test_byte_identical_reruns(self, capsys, dice_path):
        argv = ["simulate", "--dist", dice_path, "--n", "5", "--trials", "100"]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second


class TestExitCodes:
    def test_usage_errors_exit_2(self, capsys, dice_path):
        for argv in (
            ["thresholds", "--dist", dice_path, "--n", "0"],
            ["thresholds", "--dist", dice_path],
            ["converge", "--dist", dice_path, "--n", "5,3"],
            ["rates", "--dist", dice_path, "--i", "1"],
            ["simulate", "--dist", dice_path, "--n", "4", "--policy", "greedy"],
            ["simulate", "--dist", dice_path],  # preset rewards need --n
            ["nosuchcommand"],
            [],
        ):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            capsys.readouterr()
            assert exc.value.code == 2, argv

    def test_missing_dist_file_exits_1(self, capsys, tmp_path):
        code, out, err = run(capsys, ["profile", "--dist", str(tmp_path / "no.json")])
        assert code == 1 and out == ""
        assert err.startswith("InvalidDistributionFile:")

    def test_interior_index_out_of_range_exits_1(self, capsys, dice_path):
        code, _, err = run(capsys, ["rates", "--dist", dice_path, "--i", "6"])
        assert code == 1
        assert err.startswith("IndexOutOfRange:")

    def test_bad_rewards_file_exits_1(self, capsys, dice_path, tmp_path):
        rfile = tmp_path / "r.json"
        rfile.write_text('{"not": "array"}')
        code, _, err = run(capsys, ["oracle", "--dist", dice_path, "--rewards", str(rfile)])
        assert code == 1
        assert err.startswith("UnsortedRewards:")

    def test_oracle_too_many_slots_exits_1(self, capsys, dice_path):
        code, _, err = run(capsys, ["oracle", "--dist", dice_path, "--n", "13"])
        assert code == 1
        assert err.startswith("TooManySlots:")

    def test_help_exits_0(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        capsys.readouterr()
        assert exc.value.code == 0
