"""Shared helpers for the experiment scripts."""

import csv
import io


def summarize(report, keys=("k", "snr_db")):
    """Print one line per (block, algorithm) mean row."""
    rows = [r for r in csv.DictReader(io.StringIO(report.to_csv())) if r["row_type"] == "mean"]
    head = "  ".join(f"{k:>8}" for k in keys)
    print(f"{head}  {'algorithm':>10}  {'k_hat':>8}  {'mse':>10}  {'objective':>10}")
    for r in rows:
        lead = "  ".join(f"{float(r[k]):8.2f}" for k in keys)
        print(f"{lead}  {r['algorithm']:>10}  {float(r['k_hat']):8.2f}  "
              f"{float(r['mse']):10.5f}  {float(r['objective']):10.4f}")
