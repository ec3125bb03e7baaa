"""
Three-source video game benchmark with complete ground truth.

Every entity has one canonical set of values. Each source renders the
entities it carries in its own layout: different headers (one source with
``Attribute_n`` headers), date formats, scale words, platform aliases and list
delimiters. Value noise is always recoverable by a resolver: every attribute of
an entity has one appearance with the true value, developer noise only shortens
the name, and genre noise only drops genres.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.datamodel import AttributeDescriptor, TargetSchema, ValueType, save_target_schema
from src.oracle import record_key

logger = logging.getLogger(__name__)

ADJECTIVES = (
    "Silent", "Crimson", "Hidden", "Frozen", "Golden", "Broken", "Shadow", "Iron", "Savage",
    "Endless", "Lost", "Burning", "Hollow", "Ancient", "Electric", "Wild", "Velvet", "Stellar",
    "Rusty", "Midnight", "Emerald", "Neon", "Quiet", "Scarlet", "Cobalt", "Distant", "Forgotten",
    "Glass", "Hungry", "Lucky", "Mighty", "Noble", "Phantom", "Radiant", "Secret", "Twisted",
    "Untamed", "Vivid", "Wandering", "Amber", "Brave", "Clever", "Dusty", "Eternal", "Fierce",
    "Gentle", "Hazy", "Icy", "Jagged", "Kind", "Lunar", "Mystic", "Northern", "Obsidian",
    "Polar", "Restless", "Solar", "Thunder", "Urban", "Violet",
)
NOUNS = (
    "Harbor", "Forge", "Kingdom", "Citadel", "Rift", "Orchard", "Frontier", "Labyrinth",
    "Galaxy", "Outpost", "Reef", "Summit", "Canyon", "Empire", "Garden", "Horizon", "Island",
    "Jungle", "Keep", "Lagoon", "Meadow", "Nebula", "Oasis", "Pinnacle", "Quarry", "River",
    "Sanctum", "Temple", "Underworld", "Valley", "Wasteland", "Abyss", "Bastion", "Cathedral",
    "Dungeon", "Expanse", "Fortress", "Glacier", "Haven", "Inferno", "Junction", "Knight",
    "Lighthouse", "Monolith", "Nomad", "Odyssey", "Paradox", "Quest", "Realm", "Spire",
    "Tundra", "Utopia", "Vortex", "Warden", "Arena", "Beacon", "Colony", "Desert", "Echo",
    "Falcon",
)
ENDINGS = (
    "Chronicles", "Legends", "Tactics", "Saga", "Rising", "Origins", "Reborn", "Online",
    "Arcade", "Deluxe", "Unleashed", "Remastered",
)
STUDIO_WORDS = (
    "Blue Lantern", "Pixel Harbor", "Northwind", "Iron Owl", "Moonlit", "Red Comet", "Sable",
    "Brightforge", "Tin Soldier", "Quiet Fox", "Cloudline", "Deep Root", "Granite", "Lumen",
    "Paper Crane", "Stonegate", "Tidal", "Wildflower",
)
STUDIO_SUFFIXES = ("Studios", "Games", "Interactive", "Entertainment", "Works")
GENRES = (
    "Action", "Adventure", "RPG", "Strategy", "Simulation", "Puzzle", "Racing", "Sports",
    "Shooter", "Platformer", "Fighting", "Horror",
)
PLATFORMS = ("PC", "PlayStation 4", "PlayStation 5", "Xbox One", "Nintendo Switch")
PLATFORM_ALIASES = {
    "PC": "Windows",
    "PlayStation 4": "PS4",
    "PlayStation 5": "PS5",
    "Xbox One": "XB1",
    "Nintendo Switch": "Switch",
}
ATTRIBUTES = ("name", "platform", "release_date", "developer", "genres", "sales", "rating")

NULL_RATE = 0.08
DEVELOPER_NOISE_RATE = 0.3
GENRE_NOISE_RATE = 0.3
_FIRST_DAY = date(2000, 1, 1)
_DAYS = (date(2023, 12, 31) - _FIRST_DAY).days


@dataclass(frozen=True, slots=True)
class GameEntity:
    key: str
    name: str
    platform: str
    release_date: date
    developer: str
    genres: Tuple[str, ...]
    sales: float
    rating: float

    def value(self, attribute: str) -> object:
        return getattr(self, attribute)

    def truth(self, attribute: str) -> object:
        value = self.value(attribute)
        if isinstance(value, date):
            return value.isoformat()
        if isinstance(value, tuple):
            return list(value)
        return value


@dataclass(frozen=True)
class SourceLayout:
    """How one source names its columns and renders each attribute."""

    name: str
    id_column: str
    id_prefix: str
    columns: Mapping[str, str]
    render: Mapping[str, Callable[[object], str]]


def _shop_sales(value: object) -> str:
    return f"{float(value) / 1e6:g} million"


def _wiki_sales(value: object) -> str:
    return str(int(round(float(value))))


def _catalog_sales(value: object) -> str:
    return f"{float(value) / 1e6:g}M"


def _wiki_date(value: object) -> str:
    assert isinstance(value, date)
    return f"{value:%B} {value.day}, {value.year}"


def _catalog_date(value: object) -> str:
    assert isinstance(value, date)
    return value.strftime("%m/%d/%Y")


LAYOUTS: Tuple[SourceLayout, ...] = (
    SourceLayout(
        name="shop",
        id_column="sku",
        id_prefix="S",
        columns={
            "name": "title",
            "platform": "console",
            "release_date": "released",
            "developer": "studio",
            "genres": "genre",
            "sales": "units_sold",
            "rating": "score",
        },
        render={
            "release_date": lambda value: value.isoformat(),  # type: ignore[attr-defined]
            "genres": lambda value: "; ".join(value),  # type: ignore[arg-type]
            "sales": _shop_sales,
            "rating": lambda value: f"{value:.1f}",
        },
    ),
    SourceLayout(
        name="wiki",
        id_column="game_id",
        id_prefix="W",
        columns={
            "name": "Name",
            "platform": "Platform",
            "release_date": "Release Date",
            "developer": "Developer",
            "genres": "Genres",
            "sales": "Sales",
            "rating": "Rating",
        },
        render={
            "name": lambda value: str(value).upper(),
            "release_date": _wiki_date,
            "genres": lambda value: ", ".join(value),  # type: ignore[arg-type]
            "sales": _wiki_sales,
            "rating": lambda value: f"{value:.1f}",
        },
    ),
    SourceLayout(
        name="catalog",
        id_column="Attribute_1",
        id_prefix="C",
        columns={
            "name": "Attribute_2",
            "platform": "Attribute_3",
            "release_date": "Attribute_4",
            "developer": "Attribute_5",
            "genres": "Attribute_6",
            "sales": "Attribute_7",
        },
        render={
            "platform": lambda value: PLATFORM_ALIASES[str(value)],
            "release_date": _catalog_date,
            "genres": lambda value: "|".join(value),  # type: ignore[arg-type]
            "sales": _catalog_sales,
        },
    ),
)


def target_schema() -> TargetSchema:
    return TargetSchema(
        attributes=(
            AttributeDescriptor("id", ValueType.STRING, "Identifier of the integrated record"),
            AttributeDescriptor("name", ValueType.STRING, "Title of the video game"),
            AttributeDescriptor(
                "platform",
                ValueType.CATEGORICAL,
                "Hardware platform the game was released on",
                PLATFORMS,
            ),
            AttributeDescriptor("release_date", ValueType.DATE, "First release date"),
            AttributeDescriptor("developer", ValueType.STRING, "Studio that developed the game"),
            AttributeDescriptor("genres", ValueType.LIST, "Genres of the game"),
            AttributeDescriptor("sales", ValueType.NUMBER, "Units sold worldwide"),
            AttributeDescriptor("rating", ValueType.NUMBER, "Average critic score out of 10"),
        ),
        id_attribute="id",
    )


@dataclass
class Appearance:
    entity: GameEntity
    source: str
    record_id: str
    values: Dict[str, Optional[object]] = field(default_factory=dict)


@dataclass
class BenchmarkFiles:
    root: Path
    config: Path
    target_schema: Path
    mock_tables: Path
    schema_gold: Path
    gold_test: Path
    fusion_test: Path
    sources: Dict[str, Path] = field(default_factory=dict)
    entities: int = 0


def _entities(count: int, rng: np.random.Generator) -> List[GameEntity]:
    capacity = len(ADJECTIVES) * len(NOUNS)
    if count > capacity:
        raise ValueError(f"the name vocabulary supports at most {capacity} entities")
    combos = rng.permutation(capacity)[:count]
    entities = []
    for index, combo in enumerate(combos):
        adjective, noun = ADJECTIVES[combo // len(NOUNS)], NOUNS[combo % len(NOUNS)]
        ending = ENDINGS[rng.integers(len(ENDINGS))]
        genres = rng.choice(len(GENRES), size=int(rng.integers(1, 4)), replace=False)
        entities.append(
            GameEntity(
                key=f"game-{index + 1:05d}",
                name=f"{adjective} {noun} {ending}",
                platform=PLATFORMS[rng.integers(len(PLATFORMS))],
                release_date=_FIRST_DAY + timedelta(days=int(rng.integers(_DAYS + 1))),
                developer=(
                    f"{STUDIO_WORDS[rng.integers(len(STUDIO_WORDS))]} "
                    f"{STUDIO_SUFFIXES[rng.integers(len(STUDIO_SUFFIXES))]}"
                ),
                genres=tuple(GENRES[int(position)] for position in sorted(genres)),
                sales=round(float(rng.uniform(0.05, 25.0)), 2) * 1e6,
                rating=round(float(rng.uniform(5.0, 9.9)), 1),
            )
        )
    return entities


def _membership(records_per_source: int) -> List[Tuple[str, ...]]:
    """Source sets per entity: 40% of each source shared by all, 20% per pair, 20% alone."""

    names = [layout.name for layout in LAYOUTS]
    shared = round(0.4 * records_per_source)
    paired = round(0.2 * records_per_source)
    alone = records_per_source - shared - 2 * paired
    groups: List[Tuple[str, ...]] = [tuple(names)] * shared
    for left in range(len(names)):
        for right in range(left + 1, len(names)):
            groups.extend([(names[left], names[right])] * paired)
    for name in names:
        groups.extend([(name,)] * alone)
    return groups


def _noisy_appearances(
    entity: GameEntity, sources: Sequence[str], rng: np.random.Generator
) -> List[Appearance]:
    layouts = {layout.name: layout for layout in LAYOUTS}
    appearances = [Appearance(entity, source, "") for source in sources]
    for attribute in ATTRIBUTES:
        carriers = [
            appearance
            for appearance in appearances
            if attribute in layouts[appearance.source].columns
        ]
        if not carriers:
            continue
        anchor = carriers[int(rng.integers(len(carriers)))]
        for appearance in carriers:
            value: Optional[object] = entity.value(attribute)
            if appearance is not anchor:
                if attribute != "name" and rng.random() < NULL_RATE:
                    value = None
                elif attribute == "developer" and rng.random() < DEVELOPER_NOISE_RATE:
                    value = " ".join(entity.developer.split()[:-1])
                elif (
                    attribute == "genres"
                    and len(entity.genres) > 1
                    and rng.random() < GENRE_NOISE_RATE
                ):
                    value = entity.genres[:-1]
            appearance.values[attribute] = value
    return appearances


def _source_frame(layout: SourceLayout, appearances: Sequence[Appearance]) -> pd.DataFrame:
    header = [layout.id_column] + list(layout.columns.values())
    rows = []
    for appearance in appearances:
        row = [appearance.record_id]
        for attribute in layout.columns:
            value = appearance.values.get(attribute)
            if value is None:
                row.append("")
                continue
            render = layout.render.get(attribute, str)
            row.append(render(value))
        rows.append(row)
    return pd.DataFrame(rows, columns=header, dtype=object)


def _gold_pairs(
    by_source: Mapping[str, List[Appearance]], rng: np.random.Generator, share: float
) -> Dict[Tuple[str, str], pd.DataFrame]:
    """Held-out test pairs per dataset pair: a share of the true matches, each with a decoy."""

    names = sorted(by_source)
    tables: Dict[Tuple[str, str], pd.DataFrame] = {}
    for left_index, left in enumerate(names):
        for right in names[left_index + 1 :]:
            right_by_entity = {item.entity.key: item for item in by_source[right]}
            matches = [
                (item, right_by_entity[item.entity.key])
                for item in by_source[left]
                if item.entity.key in right_by_entity
            ]
            keep = sorted(
                rng.choice(len(matches), size=int(len(matches) * share), replace=False).tolist()
            )
            rows = []
            others = by_source[right]
            for index in keep:
                item, partner = matches[index]
                rows.append((item.record_id, partner.record_id, "match"))
                decoy = others[int(rng.integers(len(others)))]
                if decoy.entity.key != item.entity.key:
                    rows.append((item.record_id, decoy.record_id, "non-match"))
            tables[(left, right)] = pd.DataFrame(rows, columns=["id_a", "id_b", "label"])
    return tables


def _write_json(path: Path, document: object) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def generate_benchmark(
    out_dir: Path | str,
    records_per_source: int = 2000,
    seed: int = 7,
    *,
    holdout_share: float = 0.5,
) -> BenchmarkFiles:
    """
    Write sources, target schema, mock truth tables, gold sets and a run config.

    Each source holds exactly ``records_per_source`` records. The mock oracle's
    ``well_known`` list excludes the entities of the held-out fusion test set.
    """

    if records_per_source < 5:
        raise ValueError("records_per_source must be at least 5")
    root = Path(out_dir)
    rng = np.random.default_rng(seed)
    groups = _membership(records_per_source)
    entities = _entities(len(groups), rng)

    by_source: Dict[str, List[Appearance]] = {layout.name: [] for layout in LAYOUTS}
    for entity, sources in zip(entities, groups):
        for appearance in _noisy_appearances(entity, sources, rng):
            by_source[appearance.source].append(appearance)

    files = BenchmarkFiles(
        root=root,
        config=root / "config.json",
        target_schema=root / "target_schema.json",
        mock_tables=root / "mock_tables.json",
        schema_gold=root / "schema_gold.json",
        gold_test=root / "gold_test",
        fusion_test=root / "fusion_test.json",
        entities=len(entities),
    )
    entity_tokens: Dict[str, str] = {}
    for layout in LAYOUTS:
        appearances = by_source[layout.name]
        order = rng.permutation(len(appearances))
        appearances[:] = [appearances[int(index)] for index in order]
        for number, appearance in enumerate(appearances, start=1):
            appearance.record_id = f"{layout.id_prefix}{number:05d}"
            entity_tokens[record_key(layout.name, appearance.record_id)] = appearance.entity.key
        path = root / "sources" / f"{layout.name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        _source_frame(layout, appearances).to_csv(path, index=False, encoding="utf-8")
        files.sources[layout.name] = path

    save_target_schema(target_schema(), files.target_schema)

    carried: Dict[str, set[str]] = {}
    for layout in LAYOUTS:
        for appearance in by_source[layout.name]:
            carried.setdefault(appearance.entity.key, set()).update(layout.columns)
    entity_values = {
        entity.key: {
            attribute: entity.truth(attribute)
            for attribute in ATTRIBUTES
            if attribute in carried.get(entity.key, set())
        }
        for entity in entities
    }
    shared = [entity.key for entity, sources in zip(entities, groups) if len(sources) > 1]
    held_out = set(
        shared[int(index)]
        for index in rng.choice(len(shared), size=int(len(shared) * holdout_share), replace=False)
    )

    _write_json(
        files.mock_tables,
        {
            "synonyms": {
                f"{layout.name}.{column}": attribute
                for layout in LAYOUTS
                for attribute, column in layout.columns.items()
            },
            "taxonomy": {
                "platform": {alias: canonical for canonical, alias in PLATFORM_ALIASES.items()}
            },
            "entities": entity_tokens,
            "entity_values": entity_values,
            "well_known": sorted(key for key in entity_values if key not in held_out),
            "strategy": {
                "name": "voting",
                "platform": "voting",
                "release_date": "voting",
                "developer": "longest_string",
                "genres": "union_list",
                "sales": "median",
                "rating": "average",
            },
        },
    )
    _write_json(
        files.schema_gold,
        [
            {"source_dataset": layout.name, "source_attribute": column, "target_attribute": name}
            for layout in LAYOUTS
            for name, column in layout.columns.items()
        ],
    )
    for (left, right), frame in _gold_pairs(by_source, rng, holdout_share).items():
        path = files.gold_test / f"{left}__{right}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, encoding="utf-8")
    _write_json(
        files.fusion_test,
        {
            "entities": entity_tokens,
            "entity_values": {key: entity_values[key] for key in sorted(held_out)},
        },
    )
    _write_json(
        files.config,
        {
            "sources": [
                {
                    "path": f"sources/{layout.name}.csv",
                    "name": layout.name,
                    "id_attribute": layout.id_column,
                }
                for layout in LAYOUTS
            ],
            "target_schema": "target_schema.json",
            "output_dir": "out",
            "seed": seed,
            "oracle": {
                "mode": "mock",
                "mock_tables": "mock_tables.json",
                "name_attribute": "name",
                "embedding_dimension": 512,
            },
            "schema_matching": {"matcher": "oracle", "gold": "schema_gold.json"},
            "blocking": {"k": 10},
            "matching": {"search_budget": 3, "gold_test": "gold_test"},
            "fusion": {"test_truth": "fusion_test.json"},
        },
    )
    logger.info(
        "Wrote benchmark with %d entities and %d records per source to %s",
        len(entities),
        records_per_source,
        root,
    )
    return files
