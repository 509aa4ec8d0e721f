"""Report files: one JSON and one CSV per suite, a summary table and run.json."""

from datetime import datetime, timezone
import json
import logging
import os

import pandas as pd

from errors import ConfigError
from models import jsonable

logger = logging.getLogger("sdspace.reports")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNCONVERGED = 2
EXIT_ASSERTION = 3

CASE_COLUMNS = ["label", "lhs", "rhs", "residual", "ratio", "tolerance", "pass", "asserted"]
SUMMARY_COLUMNS = ["suite", "cases", "asserted", "failed", "passed", "converged", "empirical_constant"]


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {path}: {str(e)}")
    return path


def write_json(path, payload):
    try:
        with open(path, "w") as handle:
            json.dump(jsonable(payload), handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {str(e)}")
    return path


def _cell(value):
    if isinstance(value, complex):
        return str(value) if value.imag else value.real
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(jsonable(value), sort_keys=True)
    return value


def cases_frame(report):
    rows = []
    for case in sorted(report.cases, key=lambda c: c.label):
        row = {**vars(case), "pass": case.passed}
        rows.append({column: _cell(row[column]) for column in CASE_COLUMNS})
    return pd.DataFrame(rows, columns=CASE_COLUMNS)


def summary_frame(reports):
    rows = []
    for report in reports:
        asserted = [c for c in report.cases if c.asserted]
        rows.append(
            {
                "suite": report.suite,
                "cases": len(report.cases),
                "asserted": len(asserted),
                "failed": len(report.failures),
                "passed": report.passed,
                "converged": report.converged,
                "empirical_constant": report.empirical_constant,
            }
        )
    frame = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    return frame.sort_values("suite").reset_index(drop=True)


def write_suite_reports(reports, out_dir):
    """<suite>.json, <suite>.csv and summary.csv under out_dir; returns the written paths"""
    ensure_dir(out_dir)
    paths = []
    for report in reports:
        paths.append(write_json(os.path.join(out_dir, f"{report.suite}.json"), report.to_dict()))
        csv_path = os.path.join(out_dir, f"{report.suite}.csv")
        cases_frame(report).to_csv(csv_path, index=False)
        paths.append(csv_path)
    summary_path = os.path.join(out_dir, "summary.csv")
    summary_frame(reports).to_csv(summary_path, index=False)
    paths.append(summary_path)
    logger.info(f"Wrote {len(paths)} report file(s) to {out_dir}")
    return paths


def write_norm_result(result, out_dir, name="norm", contributions=False):
    ensure_dir(out_dir)
    payload = result.to_dict(contributions=contributions)
    path = write_json(os.path.join(out_dir, f"{name}.json"), payload)
    if contributions:
        frame = pd.DataFrame({"m": result.spec_indices, "contribution": result.contributions})
        frame.to_csv(os.path.join(out_dir, f"{name}_contributions.csv"), index=False)
    return path


def write_run_meta(out_dir, command, settings, exit_code):
    """run.json is the only file carrying a timestamp"""
    ensure_dir(out_dir)
    meta = {
        "command": command,
        "exit_code": exit_code,
        "finished_at": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "settings": settings,
    }
    return write_json(os.path.join(out_dir, "run.json"), meta)


def exit_code_for(reports):
    if any(not r.passed for r in reports):
        return EXIT_ASSERTION
    if any(not r.converged for r in reports):
        return EXIT_UNCONVERGED
    return EXIT_OK


def format_summary(reports):
    frame = summary_frame(reports)
    if frame.empty:
        return "no suites run"
    return frame.to_string(index=False)
