"""Flat key-value run configuration with CLI-over-file-over-default precedence."""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from songmood.regressors import DEFAULT_GRIDS


@dataclass
class RunConfig:
    dataset_csv: str = ""
    lyrics_dir: str = ""
    audio_store: str = ""
    sentiment_lexicon: str = ""      # empty -> bundled lexicon
    affect_lexicon: str = ""         # empty -> bundled stub
    output_dir: str = "out"
    seed: int = 0
    split_ratios: tuple[float, float, float] = (0.6, 0.2, 0.2)
    max_vocab: int = 20000
    pca_k: int = 100
    alpha: float = 0.05
    rfe_keep: int = 10
    audio_subset: str = "paper"      # paper | auto | comma,separated,names
    folds: int = 5
    jobs: int = 1
    grids: dict = field(default_factory=lambda: {
        f: dict(g) for f, g in DEFAULT_GRIDS.items()
    })

    def require_paths(self, *names: str) -> None:
        for name in names:
            value = getattr(self, name)
            if not value:
                raise ValueError(f"config key {name} is required")
            if not Path(value).exists():
                raise ValueError(f"{name} path does not exist: {value}")


_SCALARS = {
    "dataset_csv": str, "lyrics_dir": str, "audio_store": str,
    "sentiment_lexicon": str, "affect_lexicon": str, "output_dir": str,
    "seed": int, "max_vocab": int, "pca_k": int, "alpha": float,
    "rfe_keep": int, "audio_subset": str, "folds": int, "jobs": int,
}


def _parse_value(raw: str, kind):
    return kind(raw.strip())


def _parse_list(raw: str) -> list:
    out = []
    for item in raw.split(","):
        item = item.strip()
        try:
            value: Any = int(item)
        except ValueError:
            try:
                value = float(item)
            except ValueError:
                value = item
        out.append(value)
    return out


def parse_config_file(path: str | Path) -> dict:
    """Read `key = value` lines; '#' starts a comment. Grid entries use
    dotted keys like `grid.rfr.n_trees = 100,300`."""
    raw: dict[str, Any] = {}
    grids: dict[str, dict] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key.startswith("grid."):
            _, family, param = key.split(".", 2)
            grids.setdefault(family, {})[param] = _parse_list(value)
        elif key == "split_ratios":
            ratios = tuple(float(v) for v in value.split(","))
            if len(ratios) != 3:
                raise ValueError(f"{path}:{lineno}: split_ratios needs 3 values")
            raw[key] = ratios
        elif key in _SCALARS:
            raw[key] = _parse_value(value, _SCALARS[key])
        else:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    if grids:
        raw["grids"] = grids
    return raw


def load_config(config_path: str | Path | None = None,
                overrides: dict | None = None) -> RunConfig:
    """Defaults, then config file values, then non-None CLI overrides."""
    config = RunConfig()
    values = parse_config_file(config_path) if config_path else {}
    for f in fields(RunConfig):
        if f.name in values:
            if f.name == "grids":
                merged = {k: dict(v) for k, v in config.grids.items()}
                for family, grid in values["grids"].items():
                    merged[family] = grid
                config.grids = merged
            else:
                setattr(config, f.name, values[f.name])
    for name, value in (overrides or {}).items():
        if value is not None:
            setattr(config, name, value)
    return config
