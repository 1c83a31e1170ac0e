import json
import math
from fractions import Fraction

import numpy as np
import pytest

from bilane.cli import main
from bilane.coeffs import Params, compute_coefficients
from bilane.fileio import (
    CsvFormatError,
    parse_exact,
    read_profile_csv,
    read_trajectory_csv,
    sidecar_path,
    write_profile_csv,
    write_trajectory_csv,
)
from bilane.ode import State, equilibrium_state, integrate

P57 = Params(5, 7)
CPN = float(compute_coefficients(P57).C_pn)


class TestParseExact:
    def test_rational(self):
        assert parse_exact("5/2") == Fraction(5, 2)
        assert parse_exact(" -7/3 ") == Fraction(-7, 3)

    def test_integer(self):
        v = parse_exact("7")
        assert isinstance(v, Fraction) and v == 7

    def test_decimal_is_exact(self):
        assert parse_exact("1.5") == Fraction(3, 2)
        assert parse_exact("1e-6") == Fraction(1, 10**6)

    def test_inf(self):
        assert parse_exact("inf") == math.inf
        assert parse_exact("-inf") == -math.inf

    def test_rejects_garbage(self):
        for bad in ("abc", "1/0", "", "1/2/3"):
            with pytest.raises(ValueError):
                parse_exact(bad)


class TestCsvRoundTrips:
    def test_trajectory(self, tmp_path):
        st = equilibrium_state(P57)
        init = State(t=0.0, y=(st.w + 1e-6, 0, 0, 0))
        traj = integrate(P57, init, -3.0)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(path, traj)
        back = read_trajectory_csv(path, P57)
        assert back.termination == traj.termination
        assert back.steps == traj.steps
        assert len(back) == len(traj)
        assert np.array_equal(back.t_array(), traj.t_array())
        assert np.array_equal(back.y_array(), traj.y_array())

    def test_profile(self, tmp_path):
        r = np.logspace(-6, -1, 40)
        u = CPN * r**(-2 / 3)
        path = tmp_path / "prof.csv"
        write_profile_csv(path, r, u)
        r2, u2 = read_profile_csv(path)
        assert np.array_equal(r, r2)
        assert np.array_equal(u, u2)

    def test_bad_header_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(CsvFormatError) as err:
            read_profile_csv(path)
        assert err.value.line == 1

    def test_bad_value_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("r,u\n0.1,1.0\n0.2,oops\n")
        with pytest.raises(CsvFormatError) as err:
            read_profile_csv(path)
        assert err.value.line == 3

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("r,u\n0.1,1.0,9\n")
        with pytest.raises(CsvFormatError) as err:
            read_profile_csv(path)
        assert err.value.line == 2


class TestCliCoeffs:
    def test_exact_output(self, capsys):
        assert main(["coeffs", "--n", "5", "--p", "7", "--exact"]) == 0
        out = capsys.readouterr().out
        assert "K0 = 112/81" in out
        assert "K1 = 58/27" in out
        assert "J1 = -22/9" in out

    def test_rejects_p_one(self, capsys):
        assert main(["coeffs", "--n", "5", "--p", "1"]) == 1
        assert "p must exceed 1" in capsys.readouterr().err

    def test_endpoint_needs_flag(self, capsys):
        assert main(["coeffs", "--n", "6", "--p", "5"]) == 1
        assert main(["coeffs", "--n", "6", "--p", "5", "--allow-endpoint"]) == 0
        out = capsys.readouterr().out
        assert "K1 = 0.0" in out
        assert "K3 = 0.0" in out

    def test_json_mode(self, capsys):
        assert main(["coeffs", "--n", "5", "--p", "7", "--json", "--exact"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["K0"] == "112/81"
        assert data["C_pn"] == pytest.approx(CPN)

    def test_usage_error(self, capsys):
        assert main(["coeffs", "--n", "5"]) == 1


class TestCliSymbolCheck:
    def test_pass(self, capsys):
        assert main(["symbol-check", "--n", "5", "--p", "7",
                     "--trials", "32", "--seed", "1"]) == 0
        assert "32/32 exact" in capsys.readouterr().out


class TestCliIntegrate:
    def test_near_equilibrium_and_determinism(self, tmp_path, capsys):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        argv = ["integrate", "--n", "5", "--p", "7", "--t0", "0", "--t1", "-10",
                "--state", "1.05549,0,0,0", "--out", None]
        for out in (out1, out2):
            argv[-1] = str(out)
            assert main(list(argv)) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert sidecar_path(out1).read_bytes() == sidecar_path(out2).read_bytes()
        # a 6-digit initial state sits ~2e-6 off the saddle: the run hovers
        # near w* initially, then the unstable mode takes over and the
        # sign change is recorded rather than suppressed
        back = read_trajectory_csv(out1, P57)
        t, w = back.t_array(), back.w_array()
        hover = np.abs(w[t >= -2.0] - CPN)
        assert np.max(hover) < 1e-3
        meta = json.loads(sidecar_path(out1).read_text())
        assert meta["termination"] == "went_negative"

    def test_diverged_exit_code(self, tmp_path):
        code = main(["integrate", "--n", "5", "--p", "7", "--t0", "0", "--t1", "20",
                     "--state", "2,1,1,1", "--wmax", "10",
                     "--out", str(tmp_path / "t.csv")])
        assert code == 2

    def test_negative_initial_w_rejected(self, capsys):
        assert main(["integrate", "--n", "5", "--p", "7", "--t0", "0",
                     "--t1", "1", "--state", "-1,0,0,0"]) == 1

    def test_svg_emitted(self, tmp_path):
        svg = tmp_path / "w.svg"
        assert main(["integrate", "--n", "5", "--p", "7", "--t0", "0", "--t1", "-5",
                     "--state", "1.05549,0,0,0", "--svg", str(svg)]) == 0
        text = svg.read_text()
        assert text.startswith("<svg")
        assert "<polyline" in text
        assert "ln r" in text


class TestCliShoot:
    def test_shoot_and_rate(self, tmp_path, capsys):
        t0 = math.log(1e-6) / (2.0 / 3.0)
        code = main(["shoot", "--n", "5", "--p", "7", "--u0", "1",
                     "--t0", repr(t0), "--t1", repr(t0 + 6.0),
                     "--out", str(tmp_path / "shot.csv")])
        assert code == 0
        out = capsys.readouterr().out
        assert "initial_rate=" in out
        rate = float(out.split("initial_rate=")[1].split()[0])
        assert rate == pytest.approx(2.0 / 3.0, rel=0.02)


class TestCliEnergy:
    def test_pipeline(self, tmp_path, capsys):
        traj_csv = tmp_path / "traj.csv"
        st = equilibrium_state(P57)
        w0 = repr(st.w + 1e-6)
        assert main(["integrate", "--n", "5", "--p", "7", "--t0", "0", "--t1", "-6",
                     "--state", f"{w0},0,0,0", "--wmax", "100", "--hmax", "0.005",
                     "--out", str(traj_csv)]) == 0
        energy_csv = tmp_path / "energy.csv"
        svg = tmp_path / "E.svg"
        assert main(["energy", "--n", "5", "--p", "7", "--traj", str(traj_csv),
                     "--out", str(energy_csv), "--svg", str(svg)]) == 0
        meta = json.loads(sidecar_path(energy_csv).read_text())
        assert meta["monotone"] is True
        assert meta["median_identity_gap"] < 1e-4
        header = energy_csv.read_text().splitlines()[0]
        assert header == "t,E,dE_formula,dE_numeric"
        assert svg.read_text().startswith("<svg")

    def test_malformed_traj_csv(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,w,w1,w2,w3\n0,1,0,0\n")
        assert main(["energy", "--n", "5", "--p", "7", "--traj", str(bad)]) == 1
        assert ":2:" in capsys.readouterr().err


class TestCliClassify:
    def _write_profile(self, path, c):
        r = np.logspace(-6, -1, 60)
        write_profile_csv(path, r, c * r**(-2.0 / 3.0))

    def test_singular_profile(self, tmp_path, capsys):
        prof = tmp_path / "prof.csv"
        self._write_profile(prof, CPN)
        report = tmp_path / "report.json"
        assert main(["classify", "--n", "5", "--p", "7", "--profile", str(prof),
                     "--out", str(report), "--svg", str(tmp_path / "c.svg")]) == 0
        data = json.loads(report.read_text())
        assert data["verdict"] == "Singular"
        assert data["fitted_limit"] == pytest.approx(CPN, abs=1e-10)
        assert data["fitted_rate"] == pytest.approx(-2.0 / 3.0, abs=1e-10)

    def test_undetermined_exits_zero(self, tmp_path, capsys):
        prof = tmp_path / "prof.csv"
        self._write_profile(prof, 0.5 * CPN)
        assert main(["classify", "--n", "5", "--p", "7",
                     "--profile", str(prof)]) == 0
        assert "verdict=Undetermined" in capsys.readouterr().out

    def test_determinism(self, tmp_path):
        prof = tmp_path / "prof.csv"
        self._write_profile(prof, CPN)
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        for rp in (r1, r2):
            assert main(["classify", "--n", "5", "--p", "7", "--profile", str(prof),
                         "--out", str(rp)]) == 0
        assert r1.read_bytes() == r2.read_bytes()


class TestCliSweep:
    def test_sweep_coeffs(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("BILANE_THREADS", "2")
        out = tmp_path / "sweepdir"
        assert main(["sweep", "--n", "5", "--p-min", "11/2", "--p-max", "13/2",
                     "--steps", "4", "--task", "coeffs", "--out", str(out)]) == 0
        index = json.loads((out / "index.json").read_text())
        assert len(index["files"]) == 4
        first = json.loads((out / "coeffs_0000.json").read_text())
        assert first["p"] == "11/2"

    def test_sweep_determinism(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BILANE_THREADS", "3")
        outs = []
        for name in ("s1", "s2"):
            out = tmp_path / name
            assert main(["sweep", "--n", "6", "--p-min", "7/2", "--p-max", "9/2",
                         "--steps", "5", "--task", "spectrum", "--out", str(out)]) == 0
            outs.append(b"".join(sorted(
                f.read_bytes() for f in out.iterdir())))
        assert outs[0] == outs[1]

    def test_sweep_rejects_window_violation(self, capsys):
        assert main(["sweep", "--n", "5", "--p-min", "4", "--p-max", "6",
                     "--steps", "3", "--task", "signs", "--out", "/tmp/nope"]) == 1

    def test_sweep_levels_and_signs(self, tmp_path):
        for task in ("levels", "signs"):
            out = tmp_path / task
            assert main(["sweep", "--n", "5", "--p-min", "6", "--p-max", "8",
                         "--steps", "2", "--task", task, "--out", str(out)]) == 0
            files = sorted(f.name for f in out.iterdir())
            assert f"{task}_0000.json" in files
