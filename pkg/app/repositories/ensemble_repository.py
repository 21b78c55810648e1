"""Ensemble JSON repository."""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from pydantic import ValidationError

from app.core.config import settings
from app.core.constants import TOOL_NAME, TOOL_VERSION
from app.core.exceptions import ConfigurationError
from app.models.ensemble import SubaggedEnsemble

logger = logging.getLogger(__name__)


class EnsembleRepository:
    """Fitted ensembles stored as JSON (masks, weights, member parameters).

    A document is {tool, version, config, ensemble}. Threshold sentinels are
    infinite, so documents use the JSON ``Infinity`` extension that ``json``
    reads back.
    """

    def __init__(self, cache_dir: Optional[Path] = None):
        self.cache_dir = Path(cache_dir or settings.SUBAG_CACHE_DIR)

    @staticmethod
    def dumps(ensemble: SubaggedEnsemble, config: Optional[Mapping[str, Any]] = None) -> str:
        document = {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "config": dict(config or {}),
            "ensemble": ensemble.model_dump(mode="python"),
        }
        return json.dumps(document, sort_keys=True, indent=2) + "\n"

    def save(self, ensemble: SubaggedEnsemble, path: Optional[Union[str, Path]] = None,
             config: Optional[Mapping[str, Any]] = None) -> Path:
        """
        Store an ensemble.

        Args:
            ensemble: Fitted ensemble
            path: Destination; defaults to a content-addressed file in the cache dir
            config: Run configuration echoed into the document

        Returns:
            The written path
        """
        document = self.dumps(ensemble, config)
        if path is None:
            digest = hashlib.sha256(document.encode("utf-8")).hexdigest()[:16]
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            path = self.cache_dir / f"ensemble-{digest}.json"
        path = Path(path)
        path.write_text(document, encoding="utf-8")
        logger.info(f"Saved ensemble with {ensemble.size} members to {path}")
        return path

    def load(self, path: Union[str, Path]) -> SubaggedEnsemble:
        """
        Load an ensemble written by ``save``.

        Args:
            path: Ensemble JSON file

        Returns:
            The ensemble
        """
        try:
            document = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"ensemble file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"ensemble file {path} is not JSON: {e}")
        if not isinstance(document, dict) or "ensemble" not in document:
            raise ConfigurationError(f"{path} is not an ensemble document")
        if document.get("tool") != TOOL_NAME:
            logger.warning(f"{path} was written by {document.get('tool')!r}, not {TOOL_NAME}")
        try:
            return SubaggedEnsemble.model_validate(document["ensemble"])
        except ValidationError as e:
            raise ConfigurationError(f"ensemble file {path} is invalid: {e}")
