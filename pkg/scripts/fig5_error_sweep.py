#!/usr/bin/env python3
"""Broadband reconstruction-error sweep over 200-1700 Hz for several probe radii.

Writes out/fig5/sweep.csv and prints the in-band median and the 1600 Hz error
for the outermost probe radius.
"""
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from roomtf import pipeline  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    cfg = pipeline.load_config(os.path.join(HERE, "..", "configs", "fig5_sweep.yaml"))
    mt = pipeline.run_measure(cfg)
    cset = pipeline.run_extract(cfg, mt)
    errors = pipeline.sweep_errors(cfg, cset)
    os.makedirs(cfg.output_dir, exist_ok=True)
    out = os.path.join(cfg.output_dir, "sweep.csv")
    pipeline.write_sweep_csv(out, cset.frequencies, errors)
    print(f"wrote {out}")

    R = max(errors)
    freqs = cset.frequencies
    in_band = (freqs >= 200.0) & (freqs <= 1000.0)
    median = float(np.median(errors[R][in_band]))
    e1600 = float(errors[R][np.argmin(np.abs(freqs - 1600.0))])
    print(f"R = {R:g}: median E(200-1000 Hz) = {median:.4f}, E(1600 Hz) = {e1600:.4f}")


if __name__ == "__main__":
    main()
