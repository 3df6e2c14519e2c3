"""
Hardware Detection - Worker counts and memory-bounded chunk sizes
"""

import psutil
from typing import Dict, Optional, Union

from .config import CHUNK_BUDGET_BYTES


class HardwareDetector:
    def detect(self) -> Dict:
        """Detect system capabilities."""
        ram = psutil.virtual_memory()

        return {
            "total_ram_gb": ram.total / (1024**3),
            "available_ram_gb": ram.available / (1024**3),
            "cpu_cores": psutil.cpu_count(logical=False) or psutil.cpu_count() or 1,
        }

    def workers(self, setting: Union[str, int] = "auto") -> int:
        """Number of worker threads for data-parallel evaluation."""
        if setting != "auto":
            return max(1, int(setting))
        return max(1, min(self.detect()["cpu_cores"], 8))

    def chunk_rows(
        self, row_bytes: int, setting: Union[str, int] = "auto", workers: Optional[int] = None
    ) -> int:
        """
        Rows per chunk so that all in-flight chunks fit the memory budget.

        The budget is the smaller of CHUNK_BUDGET_BYTES and a tenth of the
        available RAM, shared between the workers.
        """
        if setting != "auto":
            return max(1, int(setting))

        workers = workers or self.workers()
        available = psutil.virtual_memory().available
        budget = min(CHUNK_BUDGET_BYTES, available // 10) // workers
        return max(1, int(budget // max(1, row_bytes)))
