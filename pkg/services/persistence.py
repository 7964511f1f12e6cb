"""
File persistence for run outputs
CSV, JSON and aligned-text writers behind a single-writer lock
"""

import csv
import json
import os
import threading
from typing import Iterable, List, Optional, Sequence

import numpy as np

from config import logger
from models.manifest import RunManifest
from models.profile import RadialProfile


def _format(value) -> str:
    """Round-trip float formatting; identical inputs give identical bytes"""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    return value


def render_table(headers: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Aligned-column text table"""
    cells: List[List[str]] = [[str(h) for h in headers]]
    for row in rows:
        cells.append([f"{v:.6g}" if isinstance(v, (float, np.floating)) else str(v) for v in row])
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


class OutputWriter:
    """
    Writes every output file of a run

    All writes go through one lock so concurrent workers never interleave a
    file; every written path is recorded on the manifest when one is given.
    """

    def __init__(self, directory: str, manifest: Optional[RunManifest] = None):
        self.directory = directory
        self.manifest = manifest
        self._lock = threading.Lock()
        os.makedirs(directory, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.directory, name)

    def _record(self, path: str) -> None:
        if self.manifest is not None:
            self.manifest.add_output(os.path.basename(path))
        logger.debug(f"Wrote {path}")

    # ================================================
    # WRITERS
    # ================================================

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
        path = self.path(name)
        with self._lock:
            with open(path, 'w', newline='', encoding='utf-8') as handle:
                writer = csv.writer(handle, lineterminator='\n')
                writer.writerow(header)
                for row in rows:
                    writer.writerow([_format(v) for v in row])
            self._record(path)
        return path

    def write_json(self, name: str, payload) -> str:
        path = self.path(name)
        with self._lock:
            with open(path, 'w', encoding='utf-8') as handle:
                json.dump(_jsonable(payload), handle, indent=2, sort_keys=True, ensure_ascii=False)
                handle.write('\n')
            self._record(path)
        return path

    def write_text(self, name: str, text: str) -> str:
        path = self.path(name)
        with self._lock:
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write(text)
            self._record(path)
        return path

    def write_profile(self, profile: RadialProfile, stem: str) -> List[str]:
        """Profile as CSV (r, value) plus a JSON sidecar with d, t, mass and flags"""
        csv_path = self.write_csv(f"{stem}.csv", ['r', 'value'], zip(profile.grid, profile.values))
        sidecar_path = self.write_json(f"{stem}.json", profile.sidecar())
        return [csv_path, sidecar_path]

    def write_manifest(self) -> Optional[str]:
        """manifest.json is never listed in its own outputs"""
        if self.manifest is None:
            return None
        path = self.path('manifest.json')
        with self._lock:
            with open(path, 'w', encoding='utf-8') as handle:
                json.dump(_jsonable(self.manifest.to_dict()), handle, indent=2, sort_keys=True)
                handle.write('\n')
        return path


def read_json(path: str):
    with open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)
