import logging
from pathlib import Path
from typing import Dict, Tuple, Union

from pydantic import ValidationError

from core.exceptions import ConfigError
from schemas.scenario import ScenarioConfig

logger = logging.getLogger(__name__)


class ConfigService:
    """
    Scenario files: one `section.key = value` pair per line, `#` starts a comment.
    Values stay strings until the pydantic models coerce them.
    """

    def parse_text(self, text: str) -> Tuple[Dict[str, Dict[str, str]], Dict[str, int]]:
        sections: Dict[str, Dict[str, str]] = {}
        lines: Dict[str, int] = {}

        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("expected 'section.key = value'", line=number)

            key, value = (part.strip() for part in line.split("=", 1))
            if "." not in key:
                raise ConfigError("keys must be dotted as section.key", line=number, field=key)
            section, name = key.split(".", 1)
            if not section or not name or "." in name:
                raise ConfigError("keys must have exactly one dot", line=number, field=key)
            if not value:
                raise ConfigError("missing value", line=number, field=key)
            if key in lines:
                raise ConfigError(f"duplicate key, first set on line {lines[key]}", line=number, field=key)

            sections.setdefault(section, {})[name] = value
            lines[key] = number

        return sections, lines

    @staticmethod
    def _dotted_field(loc: Tuple) -> str:
        parts = [str(part) for part in loc if part != "params"]
        return ".".join(parts)

    def validate(self, sections: Dict[str, Dict[str, str]], lines: Dict[str, int]) -> ScenarioConfig:
        try:
            return ScenarioConfig.model_validate(sections)
        except ValidationError as e:
            error = e.errors()[0]
            field = self._dotted_field(error["loc"])
            # model-level errors point at the section, fall back to its first line
            line = lines.get(field)
            if line is None and field:
                section_lines = [n for key, n in lines.items() if key.startswith(field.split(".")[0] + ".")]
                line = min(section_lines) if section_lines else None
            if field == "" and "e_start" in error["msg"]:
                field, line = "analysis.e_start", lines.get("analysis.e_start")
            message = error["msg"].removeprefix("Value error, ")
            logger.error("Scenario validation failed at %s: %s", field or "<root>", message)
            raise ConfigError(message, line=line, field=field or None) from e

    def load(self, path: Union[str, Path]) -> ScenarioConfig:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            logger.error("Cannot read scenario file %s: %s", path, e)
            raise ConfigError(f"cannot read {path}: {e.strerror}") from e

        sections, lines = self.parse_text(text)
        config = self.validate(sections, lines)
        logger.info("Loaded scenario %s (%d keys)", path, len(lines))
        return config


def get_config_service() -> ConfigService:
    return ConfigService()
