import csv
import json
import os
from fractions import Fraction
from typing import Any, Dict, List

from app.exactnum.cyclotomic import CycNum
from app.utils.errors import FileWriteError
from app.utils.logger import logger


def to_jsonable(value: Any) -> Any:
    """Exact numbers become strings; containers are converted recursively."""
    if isinstance(value, (CycNum, Fraction)):
        return str(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if hasattr(value, "item"):
        return value.item()
    return value


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True)


class ReportWriter:
    """Writes run reports as JSON and residual tables as CSV."""

    def __init__(self, output_path: str):
        self.output_path = output_path
        if not os.path.exists(self.output_path):
            os.makedirs(self.output_path, exist_ok=True)

    def save_json(self, payload: Dict[str, Any], filename: str) -> str:
        file_path = os.path.join(self.output_path, filename)
        logger.info(f"Saving report to {file_path}...")
        try:
            with open(file_path, mode="w", encoding="utf-8") as f:
                f.write(dumps(payload))
                f.write("\n")
        except OSError as e:
            raise FileWriteError(f"Failed to write JSON file {file_path}: {e}")
        return file_path

    def save_to_csv(self, data: List[Dict[str, Any]], filename: str):
        """Saves a list of dictionaries to a CSV file."""
        if not data:
            logger.warning(f"No data to save for {filename}")
            return

        file_path = os.path.join(self.output_path, filename)
        logger.info(f"Saving data to {file_path}...")

        try:
            fieldnames = data[0].keys()
            with open(file_path, mode='w', newline='', encoding='utf-8') as f:
                writer = csv.DictWriter(f, fieldnames=fieldnames)
                writer.writeheader()
                writer.writerows(data)
            logger.info(f"Successfully saved {len(data)} rows to {filename}")
        except OSError as e:
            raise FileWriteError(f"Failed to write CSV file {file_path}: {e}")
