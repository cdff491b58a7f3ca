# src/utils/result_io.py
import json
import logging
import os
import tempfile
from typing import Any, Dict

import pandas as pd

from src.utils.exceptions import InputError

logger = logging.getLogger(__name__)


def pydantic_encoder(obj):
    if hasattr(obj, 'model_dump') and callable(getattr(obj, 'model_dump')):
        return obj.model_dump()
    if hasattr(obj, 'to_dict') and callable(getattr(obj, 'to_dict')):
        return obj.to_dict()
    raise TypeError(f"Object of type {type(obj)} is not JSON serializable")


class ResultIO:
    """Reads problem and coefficient files and writes results atomically.

    Every write goes to a temporary file in the target directory first and is
    moved into place with os.replace, so readers never observe a partial file.
    """

    def _atomic_write(self, path: str, write) -> str:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(dir=directory, suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
                write(f)
            os.replace(tmp_path, path)
        except Exception as e:
            logger.error(f"writing {path} failed: {str(e)}")
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
        return path

    def save_json(self, path: str, data: Any) -> str:
        self._atomic_write(
            path, lambda f: json.dump(data, f, ensure_ascii=False, indent=2, default=pydantic_encoder)
        )
        logger.info(f"saved {path}")
        return path

    def save_csv(self, path: str, frame: pd.DataFrame) -> str:
        self._atomic_write(path, lambda f: frame.to_csv(f, index=False))
        logger.info(f"saved {len(frame)} rows to {path}")
        return path

    def load_json(self, path: str) -> Dict[str, Any]:
        if not os.path.exists(path):
            logger.error(f"file not found: {path}")
            raise InputError(f"file not found: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            logger.error(f"malformed JSON in {path}: {str(e)}")
            raise InputError(f"malformed JSON in {path}: {e}") from e
