import json
import subprocess
import sys

import pytest

from sortnet import persist
from sortnet.cli import main
from sortnet.generate import generate_up_to

SEC4 = ("0:1,1:2,0:3", "0:1,0:2,1:3")
SEC5 = ("0:1,2:3,1:3,0:4,0:2", "0:1,2:3,0:2,2:4,0:2")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_sorting(capsys):
    code, out, _ = run(capsys, "verify", "0:1,2:3,1:3,0:2,1:2")
    assert code == 0
    assert "sorting=yes" in out and "output_size=5" in out


def test_verify_non_sorting_with_explicit_n(capsys):
    code, out, _ = run(capsys, "verify", "0:1,2:3", "-n", "4")
    assert code == 0
    assert "sorting=no" in out and "cluster_sizes=1,2,3,2,1" in out


def test_check_subsumes_with_witness(capsys):
    code, out, _ = run(capsys, "check", *SEC4, "--variant", "permutation")
    assert code == 0
    assert "subsumes=yes witness=(0,1,3,2)" in out


def test_check_rejected_by_st3(capsys):
    code, out, _ = run(capsys, "check", *SEC5, "--compare")
    assert code == 0
    assert "subsumes=no rejected_by=ST3" in out
    assert "permutation: subsumes=no" in out and "matching: subsumes=no" in out


def test_check_compare_counts(capsys):
    _, out, _ = run(capsys, "check", *SEC4, "--compare")
    lines = dict(line.split(": ", 1) for line in out.splitlines() if ": " in line)
    assert "verified=" in lines["permutation"] and "verified=" in lines["matching"]


def test_search_small(capsys):
    code, out, err = run(capsys, "search", "-n", "4")
    assert code == 0
    assert "s=5" in out and "verified=yes inputs=16" in out
    assert err.count("k=") == 5


def test_search_ceiling_exit_code(capsys):
    code, _, err = run(capsys, "search", "-n", "5", "--k-ceiling", "8")
    assert code == 3
    assert "no sorting network" in err


def test_generate_to_stdout(capsys):
    code, out, err = run(capsys, "generate", "-n", "5", "-k", "6")
    assert code == 0
    *_, (last, _) = generate_up_to(5, 6)
    assert out == persist.dumps_text(last)
    assert len(err.strip().splitlines()) == 6


@pytest.mark.parametrize("fmt", ["text", "binary"])
def test_generate_to_directory_with_stats(capsys, tmp_path, fmt):
    stats = tmp_path / "stats.jsonl"
    code, out, _ = run(capsys, "generate", "-n", "5", "-k", "4", "--out", str(tmp_path / "lv"), "--format", fmt, "--stats", str(stats))
    assert code == 0 and out == ""
    files = sorted(p.name for p in (tmp_path / "lv").iterdir())
    ext = "txt" if fmt == "text" else "snf"
    assert files == [f"n5_k{k}.{ext}" for k in range(1, 5)]
    recs = [json.loads(line) for line in stats.read_text().splitlines()]
    assert [r["level"] for r in recs] == [1, 2, 3, 4]
    assert all(r["n"] == 5 and r["variant"] == "matching" for r in recs)
    levels = [lv for lv, _ in generate_up_to(5, 4)]
    for k in range(1, 5):
        assert persist.read_filter_set(tmp_path / "lv" / f"n5_k{k}.{ext}") == levels[k - 1]


def test_resume_equals_uninterrupted(capsys, tmp_path):
    full, part = tmp_path / "full", tmp_path / "part"
    assert run(capsys, "generate", "-n", "6", "-k", "7", "--out", str(full))[0] == 0
    assert run(capsys, "generate", "-n", "6", "-k", "3", "--out", str(part))[0] == 0
    code, _, _ = run(capsys, "generate", "-n", "6", "-k", "7", "--out", str(part), "--resume", str(part / "n6_k3.txt"))
    assert code == 0
    for k in range(1, 8):
        name = f"n6_k{k}.txt"
        assert (part / name).read_bytes() == (full / name).read_bytes()


def test_resume_errors(capsys, tmp_path):
    bad = tmp_path / "bad.snf"
    bad.write_bytes(b"SNF1" + b"\x00" * 10)
    code, _, err = run(capsys, "generate", "-n", "5", "-k", "3", "--resume", str(bad))
    assert code == 2 and "corrupt" in err
    good = tmp_path / "n4.txt"
    *_, (lv, _) = generate_up_to(4, 2)
    persist.write_filter_set(lv, good)
    code, _, err = run(capsys, "generate", "-n", "5", "-k", "3", "--resume", str(good))
    assert code == 2 and "n=4" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["generate", "-n", "1", "-k", "3"],
        ["generate", "-n", "12", "-k", "3"],
        ["generate", "-n", "5", "-k", "0"],
        ["search", "-n", "5", "--workers", "0"],
        ["verify", "0:1,1:0"],
        ["check", "0:1", "0:1,0:2", "-n", "2"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sortnet", "verify", "0:1,0:2,1:2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "sorting=yes" in proc.stdout
