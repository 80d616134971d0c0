import json
import logging
import os
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from src.services.config_service import data_dir

logger = logging.getLogger(__name__)


class ResultStorageService:
    """Service for writing result tables and the run operation log."""

    def __init__(self, base_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(base_dir) if base_dir is not None else data_dir()
        self.results_dir = self.base_dir / "results"
        self.logs_dir = self.base_dir / "logs"

    def _get_log_file(self) -> Path:
        """Get log file path."""
        timestamp = datetime.now().strftime("%Y-%m-%d")
        return self.logs_dir / f"run_log_{timestamp}.json"

    def resolve_output(self, path: Optional[Union[str, Path]], default_name: str) -> Path:
        """Explicit paths are used as given; otherwise the file goes under <data_dir>/results."""
        if path:
            return Path(path)
        return self.results_dir / default_name

    def write_csv(self, frame: pd.DataFrame, path: Union[str, Path], operation: str = "write_csv") -> Path:
        """
        Write `frame` atomically: a temporary file in the target directory is
        renamed over the destination, so a failed write leaves nothing behind.
        Floats use 17 significant digits, '.' decimals and '\\n' line endings.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                frame.to_csv(fh, index=False, float_format="%.17g", lineterminator="\n")
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise
        logger.info("Wrote %d rows to %s", len(frame), path)
        self._log_operation(operation, {"path": str(path), "rows": len(frame), "columns": list(frame.columns)})
        return path

    def _log_operation(self, operation: str, data: Dict[str, Any]):
        """Append an entry to today's run log; never fails the caller."""
        try:
            self.logs_dir.mkdir(parents=True, exist_ok=True)
            log_file = self._get_log_file()
            log_entry = {
                "timestamp": datetime.now().isoformat(),
                "operation": operation,
                "data": data,
            }

            logs = []
            if log_file.exists():
                with open(log_file, "r", encoding="utf-8") as f:
                    logs = json.load(f)

            logs.append(log_entry)

            with open(log_file, "w", encoding="utf-8") as f:
                json.dump(logs, f, indent=2, ensure_ascii=False)
        except Exception as e:
            logger.debug("Run log not written: %s", e)

    def log_error(self, operation: str, error_message: str):
        """Log an error."""
        self._log_operation(f"{operation}_error", {"error": error_message})
