"""
Artifact CRUD
Reading and writing of JSON configs/results/manifests and CSV tables.
"""
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Generic, List, Optional, Sequence, Type, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel

from app.core.config import settings
from app.core.exceptions import ConfigError, DomainError
from app.schemas.schemas import ExperimentConfig, RunManifest, SimulationResult

logger = logging.getLogger(__name__)

SchemaType = TypeVar("SchemaType", bound=BaseModel)

CSV_FLOAT_FORMAT = "%.12g"

# Settings a rerun must reproduce to get identical results
RESULT_SETTINGS = (
    "TRIAL_BLOCK_SIZE",
    "QUANTILE_TOL",
    "BRACKET_MAX_DOUBLINGS",
    "SERIES_TOL",
    "TAIL_FACTOR",
    "FAILURE_FACTOR",
    "ACCURACY_FACTOR",
    "DELTA_FLOOR",
)


class JSONArtifactCRUD(Generic[SchemaType]):
    def __init__(self, schema: Type[SchemaType]):
        self.schema = schema

    def read(self, path) -> SchemaType:
        """Load and validate one artifact"""
        path = Path(path)
        try:
            raw = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"Cannot read {path}: {exc}") from exc
        return self.schema.model_validate_json(raw)

    def dumps(self, obj: SchemaType) -> str:
        # sorted keys and a trailing newline keep reruns byte-identical
        payload = obj.model_dump(mode="json")
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def write(self, path, obj: SchemaType) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(obj), encoding="utf-8")
        logger.info(f"Wrote {self.schema.__name__} to {path}")
        return path


class ManifestCRUD(JSONArtifactCRUD[RunManifest]):
    @staticmethod
    def path_for(result_path) -> Path:
        """results/run.json -> results/run.manifest.json"""
        result_path = Path(result_path)
        return result_path.with_name(f"{result_path.stem}.manifest.json")

    def create(self, command: str, config: Dict[str, Any], seed: Optional[int] = None) -> RunManifest:
        return RunManifest(
            command=command,
            config=config,
            seed=seed,
            timestamp=datetime.now(timezone.utc),
            artifact_version=settings.ARTIFACT_VERSION,
            settings={name: getattr(settings, name) for name in RESULT_SETTINGS},
        )

    def write_for(self, result_path, command: str, config: Dict[str, Any], seed: Optional[int] = None) -> Path:
        return self.write(self.path_for(result_path), self.create(command, config, seed))


class CSVTableCRUD:
    """Numeric CSV tables with 12 significant digits and '\\n' line endings"""

    def frame(self, header: Sequence[str], rows: List[Sequence[Any]]) -> pd.DataFrame:
        return pd.DataFrame(list(rows), columns=list(header))

    def dumps(self, header: Sequence[str], rows: List[Sequence[Any]]) -> str:
        return self.frame(header, rows).to_csv(
            index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
        )

    def write(self, path, header: Sequence[str], rows: List[Sequence[Any]]) -> Optional[Path]:
        """Write to ``path``; ``None`` or "-" writes to stdout."""
        text = self.dumps(header, rows)
        if path is None or str(path) == "-":
            sys.stdout.write(text)
            return None
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {len(rows)} rows to {path}")
        return path


class SampleTableCRUD:
    """Per-distribution sample tables: header row of labels, one sample row per line"""

    def read(self, path) -> np.ndarray:
        try:
            frame = pd.read_csv(path)
        except FileNotFoundError as exc:
            raise ConfigError(f"Sample table {path} not found") from exc
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
            raise DomainError(f"Sample table {path} is malformed: {exc}") from exc
        if frame.isna().to_numpy().any():
            raise DomainError(f"Sample table {path} is ragged or has empty cells")
        try:
            table = frame.to_numpy(dtype=float)
        except ValueError as exc:
            raise DomainError(f"Sample table {path} has non-numeric cells: {exc}") from exc
        if table.shape[0] == 0:
            raise DomainError(f"Sample table {path} has no sample rows")
        logger.info(f"Loaded {table.shape[0]} x {table.shape[1]} sample table from {path}")
        return table

    def write(self, path, table: np.ndarray, labels: Optional[Sequence[str]] = None) -> Path:
        table = np.asarray(table, dtype=float)
        labels = list(labels) if labels is not None else [f"D{k + 1}" for k in range(table.shape[1])]
        return csv_table_crud.write(path, labels, table.tolist())


# Create CRUD instances
config_crud = JSONArtifactCRUD(ExperimentConfig)
result_crud = JSONArtifactCRUD(SimulationResult)
manifest_crud = ManifestCRUD(RunManifest)
csv_table_crud = CSVTableCRUD()
sample_table_crud = SampleTableCRUD()
