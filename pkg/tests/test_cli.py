import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from jchbound.cli import COLUMNS, fmt, main, render
from jchbound.model import ModelParams
from jchbound.oracle import sector_project_spectrum
from jchbound.sector import solve_sector


def run(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_spectrum_strong_coupling_has_two_bound_rows_per_sector(tmp_path):
    code, out = run(tmp_path, "spectrum", "--n", "50", "--delta", "0", "--g-over-j", "5", "--sectors", "odd")
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(COLUMNS["spectrum"])
    for p in range(1, 50, 2):
        group = [r for r in rows if int(r["P"]) == p]
        assert len(group) == 99
        assert sum(r["is_bound"] == "true" for r in group) == 2


def test_spectrum_weak_coupling_has_no_bound_rows(tmp_path):
    code, out = run(tmp_path, "spectrum", "--n", "50", "--g-over-j", "0.1", "--sectors", "odd")
    assert code == 0
    assert not any(r["is_bound"] == "true" for r in read_csv(out))


def test_spectrum_row_count_matches_oracle(tmp_path):
    code, out = run(tmp_path, "spectrum", "--n", "6", "--g-over-j", "2", "--sectors", "all")
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 72
    oracle = sector_project_spectrum(ModelParams(6, 0.0, 1.0, 2.0))
    for p in range(6):
        lam = [float(r["lambda"]) for r in rows if int(r["P"]) == p]
        assert len(lam) == len(oracle.by_sector[p])
        np.testing.assert_allclose(lam, oracle.by_sector[p], atol=1e-9)


def test_spectrum_several_couplings_write_one_file_each(tmp_path):
    code, out = run(tmp_path, "spectrum", "--n", "8", "--g-over-j", "0.5", "--g-over-j", "2", "--sectors", "1")
    assert code == 0
    assert (tmp_path / "out_g0.5.csv").exists() and (tmp_path / "out_g2.csv").exists()
    assert main(["spectrum", "--n", "8", "--g-over-j", "0.5", "--g-over-j", "2"]) == 1


def test_output_is_deterministic(tmp_path):
    args = ("spectrum", "--n", "12", "--g-over-j", "3", "--sectors", "all")
    _, a = run(tmp_path, *args, name="a.csv")
    _, b = run(tmp_path, *args, name="b.csv")
    assert a.read_bytes() == b.read_bytes()
    assert b"\r\n" not in a.read_bytes()


def test_csv_round_trip(tmp_path):
    _, out = run(tmp_path, "spectrum", "--n", "8", "--g-over-j", "2", "--sectors", "3")
    rows = read_csv(out)
    sol = solve_sector(ModelParams(8, 0.0, 1.0, 2.0), 3)
    for r, lam in zip(rows, sol.physical_eigenvalues):
        assert float(r["lambda"]) == pytest.approx(lam, rel=1e-11, abs=1e-300)
        assert fmt(float(r["lambda"])) == r["lambda"]


def test_formatting():
    assert fmt(1.0 / 3.0) == "0.333333333333"
    assert fmt(0.0) == "0" and fmt(math.nan) == "nan" and fmt(True) == "true"
    text = render([(1, 0.5)], ("a", "b"), "json")
    assert json.loads(text) == [{"a": 1, "b": 0.5}]


def test_json_mirrors_csv(tmp_path):
    _, c = run(tmp_path, "spectrum", "--n", "6", "--g-over-j", "2", "--sectors", "1", name="s.csv")
    _, j = run(tmp_path, "spectrum", "--n", "6", "--g-over-j", "2", "--sectors", "1", "--format", "json", name="s.json")
    rows, objs = read_csv(c), json.loads(j.read_text())
    assert len(rows) == len(objs)
    for r, o in zip(rows, objs):
        assert float(r["lambda"]) == o["lambda"]
        assert (r["is_bound"] == "true") == o["is_bound"]


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# odd-sector sweep\nn = 8\ng_over_j = 2\nsectors = 1\n")
    code, out = run(tmp_path, "spectrum", "--config", str(cfg))
    assert code == 0 and len(read_csv(out)) == 15
    code, out = run(tmp_path, "spectrum", "--config", str(cfg), "--n", "10", name="o.csv")
    assert code == 0 and len(read_csv(out)) == 19
    cfg.write_text("bogus = 1\n")
    assert main(["spectrum", "--config", str(cfg)]) == 1


@pytest.mark.parametrize(
    "args",
    [
        ["spectrum", "--n", "2"],
        ["spectrum", "--j", "0"],
        ["spectrum", "--n", "6", "--sectors", "7"],
        ["spectrum", "--sectors", "banana"],
        ["spectrum", "--unknown-flag"],
        ["probs", "--n", "50", "--sectors", "all", "--g-over-j", "5"],
    ],
)
def test_configuration_errors_exit_one(args):
    assert main(args) == 1


def test_probs_localized_at_strong_coupling(tmp_path):
    code, out = run(tmp_path, "probs", "--n", "50", "--sectors", "1", "--g-over-j", "5")
    assert code == 0
    rows = read_csv(out)
    assert {r["branch"] for r in rows} == {"lower", "upper"}
    for branch in ("lower", "upper"):
        sel = [r for r in rows if r["branch"] == branch]
        assert [int(r["d"]) for r in sel] == list(range(-24, 26))
        tot = {int(r["d"]): float(r["p_ff"]) + float(r["p_fa"]) + float(r["p_aa"]) for r in sel}
        assert sum(tot.values()) == pytest.approx(1.0, abs=1e-10)
        assert sum(tot[d] for d in (-1, 0, 1)) >= 0.985
        assert max(tot, key=tot.get) in (-1, 0, 1)


def test_probs_exit_code_without_bound_state():
    assert main(["probs", "--n", "50", "--sectors", "1", "--g-over-j", "1.0"]) == 3


def test_bands_samples(tmp_path):
    code, out = run(tmp_path, "bands", "--n", "50", "--sectors", "15", "--g-over-j", "2")
    assert code == 0
    bands = [(float(r["lo"]), float(r["hi"])) for r in read_csv(out)]
    samples = read_csv(tmp_path / "out_gsamples.csv")
    lam = np.array([float(r["lambda"]) for r in samples])
    val = np.array([float(r["G"]) for r in samples])
    sol = solve_sector(ModelParams(50, 0.0, 1.0, 2.0), 15)
    gaps = [(bands[i][1], bands[i + 1][0]) for i in range(len(bands) - 1)]

    def region(x):
        for i, (lo, hi) in enumerate(gaps):
            if lo < x < hi:
                return i
        return None

    crossings = np.flatnonzero(np.sign(val[:-1]) != np.sign(val[1:]))
    in_gap = [i for i in crossings if region(lam[i]) is not None and region(lam[i]) == region(lam[i + 1])]
    assert in_gap
    for i in in_gap:
        inside = (sol.eigenvalues > lam[i]) & (sol.eigenvalues < lam[i + 1])
        assert inside.any()
    outside = [i for i in crossings if lam[i + 1] < bands[0][0] or lam[i] > bands[-1][1]]
    assert not outside


def test_bands_without_coupling_give_constant_g(tmp_path):
    code, _ = run(tmp_path, "bands", "--n", "20", "--sectors", "3", "--g-over-j", "0")
    assert code == 0
    samples = read_csv(tmp_path / "out_gsamples.csv")
    assert {r["G"] for r in samples} == {"1"}


def test_gcrit_rows(tmp_path):
    code, out = run(tmp_path, "gcrit", "--p-angle-grid", "8", "--resolution", "1024")
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 8
    gmax = [float(r["g_c_max"]) for r in rows]
    assert gmax[0] == pytest.approx(math.sqrt(3), rel=0.01)
    for i in range(1, 8):
        assert gmax[i] == pytest.approx(gmax[8 - i], abs=1e-6)
    for r in rows:
        assert float(r["g_c_max"]) == max(float(r["g_c_upper_branch"]), float(r["g_c_lower_branch"]))


def test_check_single_size(tmp_path):
    code, out = run(tmp_path, "check", "--n-list", "4")
    assert code == 0
    rows = read_csv(out)
    assert all("N4" in r["test_name"] for r in rows)
    assert all(r["pass"] == "true" for r in rows)
    assert any(r["test_name"].startswith("identity_") for r in rows)


def test_check_detects_injected_fault(tmp_path):
    code, out = run(tmp_path, "check", "--n-list", "4", "--inject-fault")
    assert code == 2
    assert any(r["pass"] == "false" for r in read_csv(out))


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "jchbound", "spectrum", "--n", "4", "--g-over-j", "1", "--sectors", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(COLUMNS["spectrum"])
