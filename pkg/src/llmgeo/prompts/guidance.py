"""Categorized guidance registry for operation code generation.

The registry ships as a TSV asset (id, category, text) so the guidance
lines stay auditable as data rather than string constants. ``general``
items are always selected; the other categories are opt-in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from llmgeo.errors import LlmGeoError


class GuidanceCategory(str, enum.Enum):
    GENERAL = "general"
    VECTOR = "vector"
    TABLE_JOIN = "table_join"
    SPATIAL_JOIN = "spatial_join"
    VISUALIZATION = "visualization"


ALL_CATEGORIES = frozenset(GuidanceCategory)


class GuidanceRegistryError(LlmGeoError):
    code = "TEMPLATE_MISSING"


@dataclass(frozen=True)
class GuidanceItem:
    id: int
    category: GuidanceCategory
    text: str


@lru_cache(maxsize=1)
def load_registry() -> tuple[GuidanceItem, ...]:
    try:
        path = resources.files("llmgeo.prompts") / "templates" / "guidance.tsv"
        raw = path.read_text(encoding="utf-8")
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise GuidanceRegistryError("guidance registry asset not found") from exc

    items: list[GuidanceItem] = []
    seen_ids: set[int] = set()
    for line in raw.splitlines():
        if not line.strip():
            continue
        try:
            raw_id, raw_category, text = line.split("\t", 2)
        except ValueError as exc:
            raise GuidanceRegistryError(f"malformed registry line: {line!r}") from exc
        item = GuidanceItem(id=int(raw_id), category=GuidanceCategory(raw_category), text=text)
        if not item.text:
            raise GuidanceRegistryError(f"guidance item {item.id} has empty text")
        if item.id in seen_ids:
            raise GuidanceRegistryError(f"duplicate guidance id {item.id}")
        seen_ids.add(item.id)
        items.append(item)
    return tuple(sorted(items, key=lambda i: i.id))


def select_guidance(categories: set[GuidanceCategory] | frozenset[GuidanceCategory]) -> list[GuidanceItem]:
    """Items whose category is requested or general, in id order."""
    wanted = set(categories) | {GuidanceCategory.GENERAL}
    return [item for item in load_registry() if item.category in wanted]
