"""Command-line behaviour: exit codes, reports, determinism, figures."""
import json
import subprocess
import sys

import pytest

from normweave.cli import main

RUN = [sys.executable, "-m", "normweave.cli"]


def run_cli(args, stdin: str = ""):
    proc = subprocess.run(
        RUN + args, input=stdin, capture_output=True, text=True, timeout=300
    )
    return proc.returncode, proc.stdout, proc.stderr


class TestGen:
    def test_ordered_example(self):
        code, out, _ = run_cli(["gen", "ordered", "--alphabet", "01", "--n", "2"])
        assert code == 0
        assert out.strip() == "00011011"

    def test_eulerian_and_nested(self):
        code, out, _ = run_cli(
            ["gen", "eulerian", "--alphabet", "012", "--n", "2", "--k", "2"]
        )
        assert code == 0 and len(out.strip()) == 18
        code, out, _ = run_cli(
            ["gen", "nested", "--alphabet", "01", "--n", "2", "--k", "2"]
        )
        assert code == 0 and out.strip() == "00110110"

    def test_stream_perfect_length(self):
        code, out, _ = run_cli(
            ["gen", "stream-perfect", "--alphabet", "01", "--length", "300"]
        )
        assert code == 0
        assert len("".join(out.split())) == 300

    def test_missing_argument_is_usage_error(self):
        code, _, err = run_cli(["gen", "ordered", "--alphabet", "01"])
        assert code == 2
        assert "error" in err

    def test_byte_determinism(self):
        a = run_cli(["gen", "eulerian", "--alphabet", "01", "--n", "4", "--k", "3"])
        b = run_cli(["gen", "eulerian", "--alphabet", "01", "--n", "4", "--k", "3"])
        assert a == b


class TestVerify:
    def test_perfect_pass(self):
        code, out, _ = run_cli(
            ["verify", "perfect", "--alphabet", "01", "--n", "2", "--k", "2"],
            stdin="00011011",
        )
        assert code == 0
        assert json.loads(out)["is_perfect"] is True

    def test_perfect_fail_exits_one(self):
        code, out, _ = run_cli(
            ["verify", "perfect", "--alphabet", "01", "--n", "2", "--k", "2"],
            stdin="00011110",
        )
        assert code == 1
        payload = json.loads(out)
        assert payload["is_perfect"] is False
        assert "violation_word" in payload

    def test_malformed_symbol_position(self):
        code, _, err = run_cli(
            ["verify", "perfect", "--alphabet", "01", "--n", "2", "--k", "2"],
            stdin="0001x011",
        )
        assert code == 2
        assert "position 5" in err

    def test_nested(self):
        code, out, _ = run_cli(
            ["verify", "nested", "--alphabet", "01", "--n", "2", "--k", "2"],
            stdin="00110110",
        )
        assert code == 0 and json.loads(out)["is_nested"] is True

    def test_crucial(self):
        code, out, _ = run_cli(
            ["verify", "crucial", "--alphabet", "01", "--n", "2", "--k", "2",
             "--point3"],
            stdin="00110110",
        )
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_gaps_with_bound(self):
        code, out, _ = run_cli(
            ["verify", "gaps", "--sigma", "s", "--bound", "4", "--mode", "linear"],
            stdin="0s0001s110ss01ss11",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["max_gap"] == 4 and payload["pass"] is True

    def test_subsequence(self):
        import tempfile, os

        with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as f:
            f.write("0011")
            needle = f.name
        try:
            code, out, _ = run_cli(
                ["verify", "subsequence", "--needle", needle, "--sigma-only",
                 "--sigma", "s"],
                stdin="0s0s11",
            )
            assert code == 0
            assert json.loads(out)["skipped_all_sigma"] is True
        finally:
            os.unlink(needle)


class TestInsertPipeline:
    def test_liberal_pipe_to_gaps(self, tmp_path):
        v = tmp_path / "v.txt"
        v.write_text("00011011")
        code, out, err = run_cli(
            ["insert", "liberal", "--alphabet", "01", "--sigma", "s",
             "--n", "2", "--k", "2", "--in", str(v)]
        )
        assert code == 0
        report = json.loads(err.strip().splitlines()[-1])
        assert report["perfect"] is True and report["max_gap"] <= 4
        word = "".join(out.split())
        code2, out2, _ = run_cli(
            ["verify", "gaps", "--sigma", "s", "--bound", "4"], stdin=word
        )
        assert code2 == 0

    def test_one_symbol_roundtrip(self):
        code, out, err = run_cli(
            ["insert", "one-symbol", "--alphabet", "01", "--sigma", "s",
             "--schedule", "paper", "--perfect", "--length", "1800"]
        )
        assert code == 0
        text = "".join(out.split())
        code2, retracted, _ = run_cli(["retract", "--sigma", "s"], stdin=text)
        retracted = "".join(retracted.split())
        code3, source, _ = run_cli(
            ["gen", "stream-perfect", "--alphabet", "01", "--length",
             str(len(retracted))]
        )
        assert retracted == "".join(source.split())

    def test_sigma_positions_command(self):
        code, out, _ = run_cli(
            ["sigma-positions", "--alphabet", "01", "--sigma", "s",
             "--schedule", "paper", "--upto", "18"]
        )
        assert code == 0
        assert [int(x) for x in out.split()] == [6, 12, 13, 15, 17, 18]

    def test_sigma_positions_match_stream_output(self):
        code, out, _ = run_cli(
            ["insert", "one-symbol", "--alphabet", "01", "--sigma", "s",
             "--schedule", "scaled", "--t", "2,2", "--perfect",
             "--length", "800"]
        )
        text = "".join(out.split())
        code, pos_out, _ = run_cli(
            ["sigma-positions", "--alphabet", "01", "--sigma", "s",
             "--schedule", "scaled", "--t", "2,2", "--upto", "800"]
        )
        want = [i + 1 for i, ch in enumerate(text) if ch == "s"]
        assert [int(x) for x in pos_out.split()] == want


class TestStats:
    def test_delta(self):
        code, out, _ = run_cli(
            ["stats", "delta", "--alphabet", "01", "--ell", "2"],
            stdin="00011011",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["delta"] == 0.0 and payload["delta_exact"] == "0"

    def test_ps(self):
        code, out, _ = run_cli(
            ["stats", "ps", "--alphabet", "01", "--max-len", "1"],
            stdin="01" * 400,
        )
        assert code == 0
        assert json.loads(out)["statistic"] == pytest.approx(1.0, abs=0.01)

    def test_stard(self):
        code, out, _ = run_cli(
            ["stats", "stard", "--alphabet", "01", "--N", "64"],
            stdin="0110100110010110100101100110100110010110011010010110100110010110"
            + "0" * 128,
        )
        assert code == 0
        assert 0 < json.loads(out)["star_discrepancy"] <= 1

    def test_plot_file_created(self, tmp_path):
        fig = tmp_path / "gaps.png"
        code, out, _ = run_cli(
            ["verify", "gaps", "--sigma", "s", "--plot", str(fig)],
            stdin="0s0001s110ss01ss11",
        )
        assert code == 0
        assert fig.exists() and fig.stat().st_size > 1000

    def test_delta_plot(self, tmp_path):
        fig = tmp_path / "delta.png"
        code, out, _ = run_cli(
            ["stats", "delta", "--alphabet", "01", "--ell", "1",
             "--plot", str(fig)],
            stdin="01" * 200,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["figure"] == str(fig)
        assert fig.exists() and fig.stat().st_size > 1000

    def test_text_format(self):
        code, out, _ = run_cli(
            ["stats", "delta", "--alphabet", "01", "--ell", "1",
             "--format", "text"],
            stdin="0011",
        )
        assert code == 0
        assert "delta=" in out


class TestInProcessEntry:
    def test_main_returns_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", __import__("io").StringIO("00011011"))
        assert main(["verify", "perfect", "--alphabet", "01", "--n", "2",
                     "--k", "2"]) == 0

    def test_usage_error_returns_two(self, capsys):
        assert main(["gen", "arith", "--alphabet", "01", "--n", "2",
                     "--r", "2"]) == 2
