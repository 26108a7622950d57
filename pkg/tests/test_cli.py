import csv
import os

import numpy as np
import pytest

from sbrecon.cli import main, read_summary
from sbrecon.io import read_raw, write_raw
from sbrecon.solver import ConvergenceLog

SMALL = """\
[problem]
kind = fourier
phantom = piecewise-affine
n = 32
lines = 12

[transform]
type = wavelet
family = haar
levels = 2

[solver]
reweight = {reweight}
const_lambda = 100
max_iter = 3

[output]
name = {name}
"""


def write_cfg(tmp_path, name="a", reweight="ml-max", text=None):
    path = tmp_path / f"{name}.ini"
    path.write_text(text if text is not None else SMALL.format(name=name, reweight=reweight))
    return str(path)


def test_phantom_command(tmp_path, capsys):
    out = tmp_path / "p.raw"
    assert main(["phantom", "shepp-logan", "--n", "32", "--out", str(out), "--preview"]) == 0
    img = read_raw(out)
    assert img.shape == (32, 32) and img.max() <= 1.0
    assert (tmp_path / "p.png").exists()
    assert str(out) in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["phantom", "lena"], ["phantom", "shepp-logan", "--n", "8"]])
def test_phantom_errors(argv, capsys):
    assert main(argv) == 1
    assert "config error" in capsys.readouterr().err


def test_reconstruct_writes_artifacts(tmp_path):
    out = tmp_path / "run"
    assert main(["reconstruct", "--config", write_cfg(tmp_path), "--out", str(out),
                 "--test-mode"]) == 0
    for name in ("rec.raw", "rec.png", "log.csv", "summary.txt"):
        assert (out / name).exists()
    summary = read_summary(out / "summary.txt")
    assert summary["iterations"] == "3" and summary["name"] == "a"
    assert summary["backend"] in ("cython", "python")
    log = ConvergenceLog.from_csv(out / "log.csv")
    assert len(log) == 3
    assert float(summary["re"]) == pytest.approx(log.re[-1])
    assert read_raw(out / "rec.raw").shape == (32, 32)


def test_reconstruct_is_reproducible(tmp_path):
    cfg = write_cfg(tmp_path)
    for tag in ("x", "y"):
        assert main(["reconstruct", "--config", cfg, "--out", str(tmp_path / tag),
                     "--test-mode"]) == 0
    a = read_summary(tmp_path / "x" / "summary.txt")
    b = read_summary(tmp_path / "y" / "summary.txt")
    assert a["re"] == b["re"] and a["ssim"] == b["ssim"]
    assert np.array_equal(read_raw(tmp_path / "x" / "rec.raw"),
                          read_raw(tmp_path / "y" / "rec.raw"))


def test_reconstruct_from_image_file(tmp_path):
    img = np.zeros((32, 32))
    img[8:24, 8:24] = 1.0
    write_raw(tmp_path / "sq.raw", img)
    text = SMALL.format(name="sq", reweight="ml-max").replace(
        "phantom = piecewise-affine", "image = sq.raw")
    assert main(["reconstruct", "--config", write_cfg(tmp_path, "sq", text=text),
                 "--out", str(tmp_path / "o")]) == 0


def test_reconstruct_iht(tmp_path):
    text = """\
[problem]
kind = inpaint
phantom = texture-mix
n = 32
keep = 0.6
[transform]
type = wavelet
family = db2
levels = 2
[solver]
method = iht
iht_iters = 5
"""
    out = tmp_path / "o"
    assert main(["reconstruct", "--config", write_cfg(tmp_path, "iht", text=text),
                 "--out", str(out)]) == 0
    assert read_summary(out / "summary.txt")["method"] == "iht"
    assert len(ConvergenceLog.from_csv(out / "log.csv")) == 5


def test_compare(tmp_path):
    a = write_cfg(tmp_path, "ml", "ml-max")
    b = write_cfg(tmp_path, "flat", "none")
    out = tmp_path / "cmp"
    assert main(["compare", "--config", a, b, "--out", str(out), "--test-mode"]) == 0
    with open(out / "compare.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["name"] for r in rows] == ["ml", "flat"]
    assert (out / "compare.png").exists()
    assert (out / "ml" / "summary.txt").exists() and (out / "flat" / "log.csv").exists()


def test_compare_rejects_mismatched_setups(tmp_path, capsys):
    a = write_cfg(tmp_path, "a")
    b = write_cfg(tmp_path, "b", text=SMALL.format(name="b", reweight="none").replace(
        "lines = 12", "lines = 14"))
    assert main(["compare", "--config", a, "--config", b, "--out", str(tmp_path / "c")]) == 1
    assert "same image" in capsys.readouterr().err
    assert main(["compare", "--config", a]) == 1


def test_oracle(tmp_path):
    ref = tmp_path / "ref.raw"
    assert main(["phantom", "piecewise-affine", "--n", "32", "--out", str(ref)]) == 0
    out = tmp_path / "orc"
    assert main(["oracle", "--config", write_cfg(tmp_path), "--reference", str(ref),
                 "--out", str(out)]) == 0
    for name in ("log_const.csv", "log_ml.csv", "oracle.csv", "oracle.png"):
        assert (out / name).exists()
    with open(out / "oracle.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3 and "re_ml" in rows[0]


def test_oracle_reference_shape_checked(tmp_path):
    ref = tmp_path / "ref.raw"
    write_raw(ref, np.zeros((64, 64)))
    assert main(["oracle", "--config", write_cfg(tmp_path), "--reference", str(ref)]) == 1


def test_config_error_exit_code(tmp_path, capsys):
    bad = write_cfg(tmp_path, "bad", text="[problem]\nkind = fourier\nn = abc\n")
    assert main(["reconstruct", "--config", bad]) == 1
    err = capsys.readouterr().err
    assert f"{bad}:3:" in err
    assert main(["reconstruct", "--config", str(tmp_path / "missing.ini")]) == 1


def test_numeric_abort_exit_code(tmp_path, monkeypatch, capsys):
    from sbrecon import experiment
    from sbrecon.solver import NumericalAbort

    def boom(*a, **k):
        raise NumericalAbort("non-finite values")

    monkeypatch.setattr(experiment, "split_bregman_reconstruct", boom)
    assert main(["reconstruct", "--config", write_cfg(tmp_path), "--out",
                 str(tmp_path / "o")]) == 2
    assert "numerical abort" in capsys.readouterr().err


def test_seed_override_changes_inpainting_mask(tmp_path):
    text = """\
[problem]
kind = inpaint
n = 32
keep = 0.5
[transform]
family = haar
levels = 2
[solver]
max_iter = 2
"""
    cfg = write_cfg(tmp_path, "inp", text=text)
    for seed in ("1", "2"):
        assert main(["reconstruct", "--config", cfg, "--seed", seed,
                     "--out", str(tmp_path / seed)]) == 0
    assert not np.array_equal(read_raw(tmp_path / "1" / "rec.raw"),
                              read_raw(tmp_path / "2" / "rec.raw"))


def test_console_script_installed():
    import shutil
    import subprocess

    exe = shutil.which("sbrecon")
    if exe is None:
        pytest.skip("console script not on PATH")
    res = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "reconstruct" in res.stdout
    assert os.path.basename(exe) == "sbrecon"
