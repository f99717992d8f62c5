import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from constants.output import PGM_MAX_VALUE, PGM_DEGENERATE_VALUE, PGM_OUTSIDE_VALUE
from core.config import settings
from schemas.geometry import Field
from services.geometry_service import get_geometry_service

logger = logging.getLogger(__name__)


class RenderService:

    def __init__(self, size: Optional[int] = None):
        self.size = size or settings.RENDER_SIZE
        if self.size <= 0:
            raise ValueError("Raster size must be positive")
        self.geometry = get_geometry_service()

    def raster(self, field: Field) -> np.ndarray:
        """Square raster over [-R, R]^2, row 0 at y = +R; -1 marks pixels outside the domain."""
        grid = field.grid
        radius = grid.domain.r_outer
        centres = -radius + (np.arange(self.size) + 0.5) * (2.0 * radius / self.size)

        low, high = float(field.values.min()), float(field.values.max())
        span = high - low

        pixels = np.full((self.size, self.size), -1, dtype=int)
        for row in range(self.size):
            y = centres[self.size - 1 - row]
            for col in range(self.size):
                cell = self.geometry.cartesian_sample(grid, float(centres[col]), float(y))
                if cell is None:
                    continue
                if span == 0:
                    pixels[row, col] = PGM_DEGENERATE_VALUE
                else:
                    scaled = (field.values[cell] - low) / span * PGM_MAX_VALUE
                    pixels[row, col] = int(np.clip(np.rint(scaled), 0, PGM_MAX_VALUE))
        return pixels

    def render(self, field: Field) -> str:
        pixels = self.raster(field)
        masked = bool(np.any(pixels < 0))
        pixels = np.where(pixels < 0, PGM_OUTSIDE_VALUE, pixels)
        grid = field.grid

        lines = [
            "P2",
            f"# t: {field.t:.17g}",
            f"# grid: {grid.domain.kind.value} r_inner={grid.domain.r_inner:.17g} r_outer={grid.domain.r_outer:.17g} "
            f"nr={grid.nr} ntheta={grid.ntheta}",
            f"# min: {float(field.values.min()):.17g}",
            f"# max: {float(field.values.max()):.17g}",
        ]
        if float(field.values.max()) == float(field.values.min()):
            lines.append(f"# degenerate range: every in-domain pixel is {PGM_DEGENERATE_VALUE}")
        if masked:
            lines.append(f"# mask: pixels outside the domain are {PGM_OUTSIDE_VALUE}")
        lines.append(f"{self.size} {self.size}")
        lines.append(str(PGM_MAX_VALUE))
        lines.extend(" ".join(str(value) for value in row) for row in pixels)
        return "\n".join(lines) + "\n"

    def write(self, field: Field, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(field))
        logger.debug("Heatmap for t=%.6g written to %s", field.t, path)
        return path


def get_render_service(size: Optional[int] = None) -> RenderService:
    return RenderService(size)
