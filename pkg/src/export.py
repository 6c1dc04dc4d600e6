"""
Gestionnaire d'export des résultats numériques.
Supporte les formats JSON et CSV ; chaque CSV est accompagné d'un fichier
annexe `.meta.json` reprenant les paramètres du calcul.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


def convert_numpy_types(obj: Any) -> Any:
    """
    Convertit récursivement les types numpy en types Python natifs.

    Args:
        obj: Objet à convertir (dict, liste, tuple, scalaire ou tableau numpy)

    Returns:
        Objet sérialisable en JSON
    """
    if isinstance(obj, dict):
        return {str(key): convert_numpy_types(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [convert_numpy_types(item) for item in obj]
    if isinstance(obj, np.ndarray):
        return convert_numpy_types(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


class ExportManager:
    """Classe pour l'export des grilles, traces, règles et rapports."""

    def __init__(self, verbose: bool = True):
        """
        Initialise le gestionnaire d'export.

        Args:
            verbose: Affiche un message après chaque export
        """
        self.verbose = verbose

    def _prepare_path(self, output_path: str, suffix: str) -> Path:
        output_file = Path(output_path)
        if output_file.suffix.lower() != suffix:
            output_file = output_file.with_suffix(suffix)
        output_file.parent.mkdir(parents=True, exist_ok=True)
        return output_file

    def export_json(self, data: Dict[str, Any], output_path: str) -> Path:
        """
        Exporte des données au format JSON.

        Args:
            data: Données structurées
            output_path: Chemin de sortie du fichier JSON

        Returns:
            Chemin effectivement écrit
        """
        try:
            output_file = self._prepare_path(output_path, ".json")
            with open(output_file, "w", encoding="utf-8") as f:
                json.dump(
                    convert_numpy_types(data),
                    f,
                    ensure_ascii=False,
                    indent=2,
                    sort_keys=False,
                )
            if self.verbose:
                print(f"📄 JSON exporté : {output_file}")
            return output_file

        except Exception as e:
            raise RuntimeError(f"Erreur lors de l'export JSON : {str(e)}")

    def export_csv(
        self,
        frame: pd.DataFrame,
        output_path: str,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> Path:
        """
        Exporte un DataFrame au format CSV, avec son fichier de métadonnées.

        Args:
            frame: Données tabulaires
            output_path: Chemin de sortie du fichier CSV
            metadata: Paramètres du calcul, écrits dans `<fichier>.meta.json`

        Returns:
            Chemin effectivement écrit
        """
        try:
            output_file = self._prepare_path(output_path, ".csv")
            frame.to_csv(
                output_file,
                index=False,
                encoding="utf-8",
                float_format=FLOAT_FORMAT,
                lineterminator="\n",
            )
            if metadata is not None:
                meta_file = output_file.with_name(output_file.name + ".meta.json")
                with open(meta_file, "w", encoding="utf-8") as f:
                    json.dump(convert_numpy_types(metadata), f, ensure_ascii=False, indent=2)
            if self.verbose:
                print(f"📊 CSV exporté : {output_file}")
            return output_file

        except Exception as e:
            raise RuntimeError(f"Erreur lors de l'export CSV : {str(e)}")

    def export_matrix(
        self,
        matrix: np.ndarray,
        output_path: str,
        metadata: Optional[Dict[str, Any]] = None,
        row_label: str = "m",
    ) -> Path:
        """
        Exporte une matrice en CSV (une ligne par indice, colonnes 0..N).
        """
        frame = pd.DataFrame(np.asarray(matrix))
        frame.columns = [str(c) for c in frame.columns]
        frame.insert(0, row_label, np.arange(frame.shape[0]))
        return self.export_csv(frame, output_path, metadata)

    def export_table(
        self,
        frame: pd.DataFrame,
        output_path: str,
        fmt: str,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> Path:
        """
        Exporte des données tabulaires en CSV (avec métadonnées annexes) ou en
        JSON (métadonnées et lignes dans un même document).
        """
        if fmt == "json":
            payload = {
                "metadata": metadata or {},
                "rows": frame.to_dict(orient="records"),
            }
            return self.export_json(payload, output_path)
        return self.export_csv(frame, output_path, metadata)

    def export_report(self, report: Any, output_path: str,
                      metadata: Optional[Dict[str, Any]] = None) -> Path:
        """
        Exporte un rapport (objet muni de `to_dict`, dict, ou liste) en JSON.
        """
        if hasattr(report, "to_dict"):
            body = report.to_dict()
        elif isinstance(report, Sequence) and not isinstance(report, str):
            body = [item.to_dict() if hasattr(item, "to_dict") else item for item in report]
        else:
            body = report
        return self.export_json({"metadata": metadata or {}, "report": body}, output_path)
