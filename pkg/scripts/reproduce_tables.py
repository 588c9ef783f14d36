"""Recount the shipped reference codes and print the cycle and object statistics tables."""
from __future__ import annotations

import argparse
import logging

import pandas as pd

from grade_ao.evaluation import statistics_frame, tanner_statistics
from grade_ao.io_utils import read_matrix, save_report
from grade_ao.settings import load_settings

CYCLE_CODES = ("gd_4_29", "unf_4_29")
OBJECT_CODES = (
    "nlm_gd_4_24",
    "nlm_tc_4_24",
    "nlm_unf_4_24",
    "bsc_gd_4_24",
    "bsc_tc_4_24",
    "bsc_unf_4_24",
    "gd_4_20",
    "tc_4_20",
    "unf_4_20",
)


def code_frame(names: tuple[str, ...], codes_dir: str) -> pd.DataFrame:
    rows = []
    for name in names:
        partitioning = read_matrix(f"{codes_dir}/{name}.P.txt")
        lifting = read_matrix(f"{codes_dir}/{name}.L.txt")
        params = partitioning.header.params()
        logging.info("counting %s (%d,%d) m=%d", name, params.gamma, params.kappa, params.memory)
        rows.append(
            tanner_statistics(partitioning.entries, lifting.entries, params, label=name)
        )
    return statistics_frame(rows).set_index("label")


def main() -> None:
    settings, paths = load_settings()
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--codes-dir", default=paths.codes_dir)
    parser.add_argument("--report", help="Also write both tables to this JSON file.")
    parser.add_argument("--cycles-only", action="store_true")
    args = parser.parse_args()
    logging.basicConfig(level=settings.log_level)

    cycles = code_frame(CYCLE_CODES, args.codes_dir)[["cycles6", "cycles8"]]
    print("Cycle statistics")
    print(cycles.to_string())
    report = {"cycles": cycles.to_dict(orient="index")}
    if not args.cycles_only:
        objects = code_frame(OBJECT_CODES, args.codes_dir)[
            ["cycles6", "t212", "t222", "t213", "t313"]
        ]
        print("\nConcatenated-cycle statistics")
        print(objects.to_string())
        report["objects"] = objects.to_dict(orient="index")
    if args.report:
        save_report(report, args.report)


if __name__ == "__main__":
    main()
