"""Tests du gestionnaire d'export."""

import json

import numpy as np
import pandas as pd
import pytest

from src.analysis import BoundReport
from src.export import ExportManager, convert_numpy_types


class TestConvertNumpyTypes:
    def test_nested_structures(self):
        data = {
            "array": np.arange(3),
            "scalar": np.float64(0.5),
            "flag": np.bool_(True),
            "nested": [(np.int64(2), {"x": np.float32(1.5)})],
        }
        converted = convert_numpy_types(data)
        assert converted == {
            "array": [0, 1, 2],
            "scalar": 0.5,
            "flag": True,
            "nested": [[2, {"x": 1.5}]],
        }
        assert type(converted["scalar"]) is float


class TestExportManager:
    def setup_method(self):
        self.manager = ExportManager(verbose=False)

    def test_csv_with_metadata(self, tmp_path):
        frame = pd.DataFrame({"n": [0, 1], "value": [0.1, 1.0 / 3.0]})
        path = self.manager.export_csv(frame, str(tmp_path / "grille.csv"),
                                       {"alpha": np.float64(0.5)})
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "n,value"
        assert lines[2] == "1,0.33333333333333331"
        meta = json.loads((tmp_path / "grille.csv.meta.json").read_text(encoding="utf-8"))
        assert meta == {"alpha": 0.5}

    def test_csv_round_trips_exactly(self, tmp_path):
        values = np.random.default_rng(0).standard_normal(20)
        path = self.manager.export_csv(pd.DataFrame({"v": values}), str(tmp_path / "v"))
        assert path.suffix == ".csv"
        restored = pd.read_csv(path, float_precision="round_trip")["v"].to_numpy()
        assert np.array_equal(restored, values)
        assert not (tmp_path / "v.csv.meta.json").exists()

    def test_json(self, tmp_path):
        path = self.manager.export_json({"é": np.arange(2)}, str(tmp_path / "out.txt"))
        assert path.name == "out.json"
        assert json.loads(path.read_text(encoding="utf-8")) == {"é": [0, 1]}

    def test_matrix(self, tmp_path):
        matrix = np.array([[1.0, 0.5], [0.5, 1.0]])
        path = self.manager.export_matrix(matrix, str(tmp_path / "k.csv"))
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["m", "0", "1"]
        assert frame["1"].tolist() == [0.5, 1.0]

    def test_table_as_json(self, tmp_path):
        frame = pd.DataFrame({"t": [1.0], "value": [2.0]})
        path = self.manager.export_table(frame, str(tmp_path / "table"), "json",
                                         {"seed": 7})
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload == {"metadata": {"seed": 7}, "rows": [{"t": 1.0, "value": 2.0}]}

    def test_report(self, tmp_path):
        reports = [BoundReport("lemma31", 1.5, (1, 2, 0.1), {"t_count": 3})]
        path = self.manager.export_report(reports, str(tmp_path / "rapport.json"))
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["report"][0]["bound_kind"] == "lemma31"
        assert payload["report"][0]["argmax"] == [1, 2, 0.1]

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "fichier"
        blocker.write_text("x")
        with pytest.raises(RuntimeError):
            self.manager.export_json({}, str(blocker / "out.json"))
