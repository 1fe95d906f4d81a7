"""Module to read and write datasets, tables and config files."""
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.dataset.dataset import Dataset
from src.exceptions import ContractError, DataFormatError
from src.utils import LOGGER as logger

FLOAT_FORMAT = "%.17g"


class Data:
    """Class to get data from csv files and write results back"""

    @staticmethod
    def load_csv(
        path: str,
        response_cols: Sequence[str],
        drop_constant: bool = False,
        categorical: bool = False,
        standardize: bool = False,
    ) -> Dataset:  # pylint: disable=too-many-arguments
        """Load a numeric csv with header and split responses from predictors.
        ----
        Params:
        - path: str
        - response_cols: Sequence[str]
            columns holding the response
        - drop_constant: bool
            drop predictor columns taking a single value
        - categorical: bool
            read a single response column as integer labels
        - standardize: bool
            z-score the predictors
        """
        if not os.path.isfile(path):
            logger.error(f"[ETL] File {path} not found")
            raise FileNotFoundError(path)
        try:
            df = pd.read_csv(path, float_precision="round_trip")
        except pd.errors.EmptyDataError as error:
            logger.error(f"[ETL] File {path} is empty")
            raise DataFormatError(f"{path} is empty") from error
        if df.empty:
            logger.error(f"[ETL] File {path} is empty")
            raise DataFormatError(f"{path} has a header but no rows")
        missing = [col for col in response_cols if col not in df.columns]
        if missing:
            raise ContractError(
                f"[ETL] response columns {missing} not in header {list(df.columns)}"
            )
        values = Data.__to_numeric(df, path)

        predictor_cols = [col for col in values.columns if col not in response_cols]
        dropped: List[str] = []
        if drop_constant:
            dropped = [col for col in predictor_cols if values[col].nunique() <= 1]
            predictor_cols = [col for col in predictor_cols if col not in dropped]
            if dropped:
                logger.info(f"[ETL] Dropped {len(dropped)} constant columns: {dropped}")
        meta = {
            "source": os.path.basename(path),
            "columns": predictor_cols,
            "response_columns": list(response_cols),
            "dropped_columns": dropped,
            "n_rows": len(values),
        }
        X = values[predictor_cols].to_numpy(dtype=np.float64)
        if categorical:
            if len(response_cols) != 1:
                raise ContractError("[ETL] a categorical response needs one column")
            raw_labels = values[response_cols[0]].to_numpy(dtype=np.float64)
            fractional = np.flatnonzero(raw_labels != np.round(raw_labels))
            if fractional.size:
                row = int(fractional[0])
                logger.error(f"[ETL] Non-integer class label in {path}")
                raise DataFormatError(
                    f"class label {raw_labels[row]!r} is not an integer in {path}",
                    row=row + 1,
                    column=response_cols[0],
                )
            data = Dataset(X=X, labels=raw_labels.astype(np.int64), meta=meta)
        else:
            data = Dataset(
                X=X, Y=values[list(response_cols)].to_numpy(dtype=np.float64), meta=meta
            )
        if standardize:
            data, _, _ = data.standardized()
        logger.info(f"[ETL] Loaded {data} from {path}")
        return data

    @staticmethod
    def __to_numeric(df: pd.DataFrame, path: str) -> pd.DataFrame:
        """Convert every cell to float, reporting the first bad cell."""
        numeric = df.apply(pd.to_numeric, errors="coerce")
        bad = numeric.isna().to_numpy()
        if bad.any():
            row, col = np.argwhere(bad)[0]
            logger.error(f"[ETL] Non-numeric cell in {path}")
            raise DataFormatError(
                f"non-numeric value {df.iat[row, col]!r} in {path}",
                row=int(row) + 1,
                column=str(df.columns[col]),
            )
        return numeric.astype(np.float64)

    @staticmethod
    def write_dataset(path: str, data: Dataset) -> None:
        """Write X and the response as csv (x1..xp, y1..yq or label)."""
        columns = data.meta.get("columns") or [f"x{j + 1}" for j in range(data.d_x)]
        df = pd.DataFrame(data.X, columns=columns)
        if data.is_categorical:
            df["label"] = data.labels
        else:
            for j in range(data.d_y):
                df[f"y{j + 1}" if data.d_y > 1 else "y"] = data.Y[:, j]
        Data.write_table(path, df)

    @staticmethod
    def write_table(path: str, df: pd.DataFrame, header_line: Optional[str] = None) -> None:
        """Write a table as csv (UTF-8, LF, %.17g), optionally after a comment line."""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            if header_line:
                file.write(f"# {header_line}\n")
            df.to_csv(file, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    @staticmethod
    def read_config_file(path: str) -> Dict[str, str]:
        """Read a flat key=value file; `#` starts a comment."""
        if not os.path.isfile(path):
            logger.error(f"[ETL] Config file {path} not found")
            raise FileNotFoundError(path)
        config: Dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as file:
            for number, raw in enumerate(file, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DataFormatError(f"expected key=value in {path}", row=number)
                key, value = line.split("=", 1)
                config[key.strip().replace("-", "_")] = value.strip()
        return config

    @staticmethod
    def write_config_file(path: str, config: Dict[str, Any]) -> None:
        """Write a flat key=value file in sorted key order."""
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            for key in sorted(config):
                file.write(f"{key}={config[key]}\n")
