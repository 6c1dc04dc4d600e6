"""Tests de l'interface en ligne de commande."""

import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from src.errors import ValidationError
from src.main import RunConfig, build_parser, main, parse_sequence


def read_stdout_csv(capsys) -> pd.DataFrame:
    out = capsys.readouterr().out
    return pd.read_csv(io.StringIO(out), float_precision="round_trip")


class TestRunConfig:
    def test_from_args(self):
        args = build_parser().parse_args(["kernel", "--t", "0.5", "2", "--mmax", "4"])
        config = RunConfig.from_args(args)
        assert config.options == {"t": [0.5, 2.0], "mmax": 4}
        assert config.metadata()["alpha"] == 0.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            RunConfig("kernel", 0.0, 0.0, threads=0)
        with pytest.raises(ValidationError):
            RunConfig("kernel", 0.0, 0.0, tol=0.0)
        with pytest.raises(ValidationError):
            RunConfig("kernel", -1.0, 0.0)
        with pytest.raises(ValidationError):
            RunConfig("inconnue", 0.0, 0.0)

    def test_parse_sequence(self):
        assert parse_sequence("1, 2.5,0", None).to_list() == [1.0, 2.5, 0.0]
        assert parse_sequence(None, 2).to_list() == [0.0, 0.0, 1.0]
        assert parse_sequence(None, None).to_list() == [1.0]
        with pytest.raises(ValidationError):
            parse_sequence("1,x", None)


class TestCommands:
    def test_kernel_matrix_file(self, tmp_path):
        output = tmp_path / "noyau.csv"
        code = main(["kernel", "--alpha", "0.5", "--beta", "0.2", "--t", "1.0",
                     "--mmax", "10", "-o", str(output)])
        assert code == 0
        frame = pd.read_csv(output, float_precision="round_trip")
        assert list(frame.columns) == ["m"] + [str(n) for n in range(11)]
        matrix = frame.drop(columns="m").to_numpy()
        assert matrix.shape == (11, 11)
        assert np.array_equal(matrix, matrix.T)
        meta = json.loads((tmp_path / "noyau.csv.meta.json").read_text(encoding="utf-8"))
        assert meta["alpha"] == 0.5
        assert meta["options"]["mmax"] == 10

    def test_kernel_several_times(self, capsys):
        assert main(["kernel", "--t", "0.5", "1.0", "--mmax", "2"]) == 0
        frame = read_stdout_csv(capsys)
        assert list(frame.columns) == ["t", "m", "n", "value"]
        assert len(frame) == 18

    def test_apply_json(self, tmp_path):
        output = tmp_path / "trace.json"
        code = main(["apply", "--f", "1,-1", "--t", "0", "1", "--truncation", "5",
                     "-f", "json", "-o", str(output)])
        assert code == 0
        payload = json.loads(output.read_text(encoding="utf-8"))
        rows = payload["rows"]
        assert len(rows) == 12
        assert rows[0] == {"t": 0.0, "n": 0, "value": pytest.approx(1.0, abs=1e-11)}

    def test_poisson_legendre(self, capsys):
        code = main(["poisson", "--delta", "0", "--t", "1", "--truncation", "5",
                     "--method", "kernel"])
        assert code == 0
        frame = read_stdout_csv(capsys)
        root = math.sqrt(2.0)
        expected = 1.0 - math.exp(-root) * (1.0 + root)
        assert frame["value"].iloc[0] == pytest.approx(expected, abs=1e-10)

    def test_poisson_default_method(self, capsys):
        code = main(["poisson", "--delta", "0", "--t", "1", "--truncation", "5"])
        assert code == 0
        frame = read_stdout_csv(capsys)
        root = math.sqrt(2.0)
        expected = 1.0 - math.exp(-root) * (1.0 + root)
        assert frame["value"].iloc[0] == pytest.approx(expected, abs=1e-6)

    def test_maximal(self, capsys):
        code = main(["maximal", "--delta", "1", "--grid-min", "0.01", "--grid-max", "1",
                     "--grid-points", "4", "--truncation", "8", "--no-poisson"])
        assert code == 0
        frame = read_stdout_csv(capsys)
        assert list(frame.columns) == ["n", "f", "heat"]
        assert frame["heat"].iloc[1] == pytest.approx(1.0)

    @pytest.mark.slow
    def test_maximal_default_grid(self, capsys):
        # grille 1e-3..1e3 à 60 points, troncature 357
        code = main(["maximal", "--delta", "0", "--no-poisson"])
        assert code == 0
        frame = read_stdout_csv(capsys)
        assert len(frame) == 358
        assert frame["heat"].iloc[0] == pytest.approx(1.0, abs=1e-12)
        assert frame["heat"].between(0.0, 1.0 + 1e-12).all()

    def test_linearize(self, capsys):
        assert main(["linearize", "--m", "2", "--n", "3"]) == 0
        frame = read_stdout_csv(capsys)
        assert frame["k"].tolist() == [1, 2, 3, 4, 5]
        assert (frame["coefficient"] >= -1e-12).all()

    def test_quadrature(self, capsys):
        assert main(["quadrature", "--nodes", "5"]) == 0
        frame = read_stdout_csv(capsys)
        assert len(frame) == 5
        assert frame["weight"].sum() == pytest.approx(2.0, abs=1e-14)

    def test_verify(self, capsys, tmp_path):
        output = tmp_path / "rapport.json"
        assert main(["verify", "kronecker", "-o", str(output)]) == 0
        assert "✅ kronecker" in capsys.readouterr().out
        payload = json.loads(output.read_text(encoding="utf-8"))
        assert payload["report"][0]["passed"] is True


class TestExitCodes:
    def test_invalid_parameters(self, capsys):
        assert main(["kernel", "--alpha", "-1.5"]) == 1
        assert "❌" in capsys.readouterr().err

    def test_negative_time(self):
        assert main(["kernel", "--t", "-1"]) == 1

    def test_argument_errors(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["kernel", "--inconnu"])
        assert excinfo.value.code == 1
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 1

    def test_invariant_violation(self, capsys):
        code = main(["verify", "positivity", "--alpha", "-0.6", "--beta", "-0.9",
                     "--cases", "2"])
        assert code == 3
        err = capsys.readouterr().err
        assert "Violation d'invariant" in err
        assert "in_region_v = False" in err
