"""CSV and Markdown renderings of the evaluation report artifacts."""
from __future__ import annotations

import csv
from pathlib import Path

from songmood.evaluation import MODALITIES, TARGETS
from songmood.regressors import FAMILIES


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_markdown(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    for row in rows:
        lines.append("| " + " | ".join(str(v) for v in row) + " |")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _fmt(value) -> str:
    return f"{value:.4f}" if isinstance(value, float) else str(value)


def write_modality_grid(cells: dict, out_dir: Path, stem: str = "modality_grid") -> None:
    header = ["mode", "model", "valence", "arousal"]
    rows = []
    for modality in MODALITIES:
        for family in FAMILIES:
            row = [modality, family]
            for target in TARGETS:
                cell = cells.get(f"{modality}/{family}/{target}")
                if cell is None:
                    row.append("")
                elif cell.get("status") == "ok":
                    row.append(_fmt(cell["r2"]))
                else:
                    row.append("failed")
            rows.append(row)
    _write_csv(out_dir / f"{stem}.csv", header, rows)
    _write_markdown(out_dir / f"{stem}.md", header, rows)


def write_coefficients(table: dict, out_dir: Path, stem: str = "coefficients") -> None:
    header = ["feature"] + [f"{t} (p)" for t in TARGETS]
    by_feature: dict[str, list[str]] = {}
    for target in TARGETS:
        for row in table.get(target, []):
            star = "*" if row["significant"] else ""
            text = f"{row['coefficient']:.4f}{star}"
            by_feature.setdefault(row["feature"], []).append(text)
    rows = [[feature] + vals for feature, vals in by_feature.items()]
    _write_csv(out_dir / f"{stem}.csv", header, rows)
    _write_markdown(out_dir / f"{stem}.md", header, rows)


def write_subset_comparison(table: list, out_dir: Path,
                            stem: str = "feature_subsets") -> None:
    header = ["modality", "feature_set", "n_columns"] + [f"{t}_r2" for t in TARGETS]
    rows = [
        [r["modality"], r["feature_set"], r["n_columns"]]
        + [_fmt(r[f"{t}_r2"]) for t in TARGETS]
        for r in table
    ]
    _write_csv(out_dir / f"{stem}.csv", header, rows)
    _write_markdown(out_dir / f"{stem}.md", header, rows)


def write_combinations(table: list, out_dir: Path,
                       stem: str = "lyric_combinations") -> None:
    if not table:
        return
    score_keys = list(table[0]["scores"].keys())
    header = ["features"] + score_keys + ["mean_rank"]
    rows = [
        [r["combination"]] + [_fmt(r["scores"][k]) for k in score_keys]
        + [_fmt(r["mean_rank"])]
        for r in table
    ]
    _write_csv(out_dir / f"{stem}.csv", header, rows)
    _write_markdown(out_dir / f"{stem}.md", header, rows)


def write_rfe(results: dict, out_dir: Path, stem: str = "rfe") -> None:
    for target, entry in results.items():
        header = ["rank", "eliminated_feature"]
        rows = [[i + 1, name] for i, name in enumerate(entry["eliminated"])]
        _write_csv(out_dir / f"{stem}_{target}_elimination.csv", header, rows)
        survivors = [[name] for name in entry["survivors"]]
        _write_csv(out_dir / f"{stem}_{target}_survivors.csv", ["feature"], survivors)
        _write_markdown(out_dir / f"{stem}_{target}_survivors.md", ["feature"], survivors)


def write_all(report_dict: dict, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if report_dict.get("cells"):
        write_modality_grid(report_dict["cells"], out_dir)
    if report_dict.get("coefficient_table"):
        write_coefficients(report_dict["coefficient_table"], out_dir)
    if report_dict.get("feature_subset_table"):
        write_subset_comparison(report_dict["feature_subset_table"], out_dir)
    if report_dict.get("combination_table"):
        write_combinations(report_dict["combination_table"], out_dir)
    if report_dict.get("rfe"):
        write_rfe(report_dict["rfe"], out_dir)
