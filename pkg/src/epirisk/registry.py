"""File-backed model registry.

Layout: <root>/<schema-id>/v<N>.json holds immutable model versions;
<root>/<schema-id>/ACTIVE holds the active version number. Activation
swaps the pointer atomically (os.replace), so concurrent readers see the
old or the new version, never a mixture.
"""

from __future__ import annotations

import os
import re
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from epirisk.errors import RegistryError, SchemaMismatchError
from epirisk.jsonutil import canonical_bytes
from epirisk.models import LogisticModel, RiskModel, model_from_dict, model_to_dict, parse_model
from epirisk.schema import QuestionnaireSchema

_VERSION_FILE = re.compile(r"^v(\d+)\.json$")
_ACTIVE = "ACTIVE"


def model_feature_set(model: RiskModel) -> set[str]:
    if isinstance(model, LogisticModel):
        return set(model.main_coefs)
    return set(model.attribute_lr) | set(model.transmission) | set(model.modifiers)


def check_feature_match(model: RiskModel, schema: QuestionnaireSchema) -> None:
    extra = model_feature_set(model) - set(schema.feature_ids())
    if extra:
        raise SchemaMismatchError(
            f"model features not declared by schema {schema.id!r}: {', '.join(sorted(extra))}"
        )


class ModelRegistry:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _schema_dir(self, schema_id: str) -> Path:
        if not re.fullmatch(r"[a-z0-9][a-z0-9-]*", schema_id):
            raise RegistryError(f"invalid schema id: {schema_id!r}")
        return self.root / schema_id

    def versions(self, schema_id: str) -> list[int]:
        directory = self._schema_dir(schema_id)
        if not directory.is_dir():
            return []
        found: list[int] = []
        for name in os.listdir(directory):
            match = _VERSION_FILE.match(name)
            if match:
                found.append(int(match.group(1)))
        return sorted(found)

    def register(self, schema_id: str, model: RiskModel | Mapping[str, Any]) -> int:
        """Persist a new immutable version; returns its number."""
        if isinstance(model, Mapping):
            doc = dict(model)
            model_from_dict(doc)  # reject malformed documents before writing
        else:
            doc = model_to_dict(model)
        directory = self._schema_dir(schema_id)
        directory.mkdir(parents=True, exist_ok=True)
        payload = canonical_bytes(doc)
        while True:
            version = (self.versions(schema_id) or [0])[-1] + 1
            path = directory / f"v{version}.json"
            try:
                fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL, 0o644)
            except FileExistsError:
                continue  # lost a race; take the next number
            with os.fdopen(fd, "wb") as handle:
                handle.write(payload)
            return version

    def get(self, schema_id: str, version: int) -> RiskModel:
        path = self._schema_dir(schema_id) / f"v{version}.json"
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise RegistryError(f"no version {version} for schema {schema_id!r}") from None
        return parse_model(text)

    def active_version(self, schema_id: str) -> int | None:
        path = self._schema_dir(schema_id) / _ACTIVE
        try:
            text = path.read_text(encoding="utf-8").strip()
        except FileNotFoundError:
            return None
        try:
            return int(text)
        except ValueError:
            raise RegistryError(f"corrupt active pointer for schema {schema_id!r}: {text!r}") from None

    def active_model(self, schema_id: str) -> RiskModel | None:
        version = self.active_version(schema_id)
        if version is None:
            return None
        return self.get(schema_id, version)

    def activate(self, schema_id: str, version: int, schema: QuestionnaireSchema) -> None:
        """Atomically point the schema at an existing version.

        Refuses models whose feature set is not covered by the schema.
        """
        model = self.get(schema_id, version)
        check_feature_match(model, schema)
        directory = self._schema_dir(schema_id)
        tmp = directory / f".{_ACTIVE}.tmp.{os.getpid()}.{version}"
        tmp.write_text(str(version), encoding="utf-8")
        os.replace(tmp, directory / _ACTIVE)

    def ensure_defaults(self, schemas: Mapping[str, QuestionnaireSchema]) -> None:
        """Seed shipped default models for schemas with no versions yet."""
        for schema_id, schema in schemas.items():
            if self.versions(schema_id):
                if self.active_version(schema_id) is None:
                    self.activate(schema_id, self.versions(schema_id)[-1], schema)
                continue
            ref = resources.files("epirisk") / "models" / f"{schema_id}.json"
            try:
                text = ref.read_text(encoding="utf-8")
            except FileNotFoundError:
                continue
            model = parse_model(text)
            version = self.register(schema_id, model_to_dict(model))
            self.activate(schema_id, version, schema)
