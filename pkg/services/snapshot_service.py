import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from constants.output import SNAPSHOT_FLOAT_FORMAT
from schemas.geometry import Field, PolarGrid, RadialDomain

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = "rotasym-snapshot v1"
REQUIRED_HEADERS = ("t", "domain", "r_inner", "r_outer", "nr", "ntheta")


class SnapshotService:
    """Decimal text snapshots: `# key: value` header lines, then nr rows of ntheta values."""

    @staticmethod
    def _format(value: float) -> str:
        return SNAPSHOT_FLOAT_FORMAT % value

    def write(self, field: Field, path: Union[str, Path], extra: Optional[Dict[str, str]] = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        grid = field.grid
        header = [
            SNAPSHOT_MAGIC,
            f"t: {self._format(field.t)}",
            f"domain: {grid.domain.kind.value}",
            f"r_inner: {self._format(grid.domain.r_inner)}",
            f"r_outer: {self._format(grid.domain.r_outer)}",
            f"nr: {grid.nr}",
            f"ntheta: {grid.ntheta}",
        ]
        for key, value in sorted((extra or {}).items()):
            header.append(f"{key}: {value}")

        np.savetxt(path, field.values, fmt=SNAPSHOT_FLOAT_FORMAT, header="\n".join(header), comments="# ")
        logger.debug("Snapshot t=%.6g written to %s", field.t, path)
        return path

    @staticmethod
    def _read_header(path: Path) -> Dict[str, str]:
        header: Dict[str, str] = {}
        with path.open() as handle:
            for line in handle:
                if not line.startswith("#"):
                    break
                content = line[1:].strip()
                if ":" in content:
                    key, value = content.split(":", 1)
                    header[key.strip()] = value.strip()
        return header

    def read(self, path: Union[str, Path]) -> Field:
        path = Path(path)
        try:
            header = self._read_header(path)
            missing = [key for key in REQUIRED_HEADERS if key not in header]
            if missing:
                raise ValueError(f"missing header keys: {', '.join(missing)}")

            domain = RadialDomain(
                kind=header["domain"],
                r_inner=float(header["r_inner"]),
                r_outer=float(header["r_outer"]),
            )
            grid = PolarGrid(domain=domain, nr=int(header["nr"]), ntheta=int(header["ntheta"]))
            values = np.loadtxt(path, comments="#", ndmin=2)
            return Field(grid=grid, values=values, t=float(header["t"]))
        except (OSError, ValueError) as e:
            logger.error("Invalid snapshot file %s: %s", path, e)
            raise ValueError(f"Invalid snapshot file {path}: {e}") from e

    def read_many(self, paths: Sequence[Union[str, Path]]) -> List[Field]:
        if not paths:
            raise ValueError("No snapshot files given")
        fields = [self.read(path) for path in paths]
        grid = fields[0].grid
        for path, field in zip(paths, fields):
            if field.grid != grid:
                logger.error("Snapshot %s is on a different grid than %s", path, paths[0])
                raise ValueError(f"Grid mismatch: {path} does not share the grid of {paths[0]}")
        return fields


def get_snapshot_service() -> SnapshotService:
    return SnapshotService()
