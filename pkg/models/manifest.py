"""
RunManifest model
Represents one CLI run: its inputs, hash and output files
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List, Optional

import config
from utils.hashing import canonical_hash


@dataclass
class RunManifest:
    """Record of a CLI run; the hash covers every input"""

    command: str
    spec_id: str
    parameters: dict
    seed: Optional[int]
    tool_version: str = config.TOOL_VERSION
    started_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    finished_at: Optional[datetime] = None
    outputs: List[str] = field(default_factory=list)
    status: str = 'running'

    @property
    def input_hash(self) -> str:
        return canonical_hash({
            'command': self.command,
            'spec_id': self.spec_id,
            'parameters': self.parameters,
            'seed': self.seed,
            'tool_version': self.tool_version,
        })

    def add_output(self, path: str) -> None:
        if path not in self.outputs:
            self.outputs.append(path)

    def finish(self, status: str) -> None:
        self.status = status
        self.finished_at = datetime.now(timezone.utc)

    @classmethod
    def from_dict(cls, data: dict) -> 'RunManifest':
        """Create RunManifest from a manifest.json payload"""
        finished = data.get('finished_at')
        return cls(
            command=data['command'],
            spec_id=data.get('spec_id', ''),
            parameters=data.get('parameters', {}),
            seed=data.get('seed'),
            tool_version=data.get('tool_version', config.TOOL_VERSION),
            started_at=datetime.fromisoformat(data['started_at']),
            finished_at=datetime.fromisoformat(finished) if finished else None,
            outputs=list(data.get('outputs', [])),
            status=data.get('status', 'unknown'),
        )

    def to_dict(self) -> dict:
        """Convert to dictionary"""
        return {
            'tool': config.TOOL_NAME,
            'command': self.command,
            'spec_id': self.spec_id,
            'parameters': self.parameters,
            'seed': self.seed,
            'tool_version': self.tool_version,
            'input_hash': self.input_hash,
            'started_at': self.started_at.isoformat(),
            'finished_at': self.finished_at.isoformat() if self.finished_at else None,
            'outputs': self.outputs,
            'status': self.status,
        }

    def __str__(self) -> str:
        return f"{self.command} {self.spec_id} [{self.status}] -> {len(self.outputs)} files"
