# Copyright 2026 The HenonNets Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Plot the loss curve and rollout error of one or more run directories."""

import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("runs", nargs="+", type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("runs.png"))
    args = ap.parse_args()

    fig, (ax_loss, ax_err) = plt.subplots(1, 2, figsize=(11, 4))
    for run in args.runs:
        log = run / "train_log.csv"
        if log.exists():
            df = pd.read_csv(log)
            ax_loss.semilogy(df["epoch"], df["loss"], label=run.name)
        roll = run / "rollout.csv"
        if roll.exists():
            df = pd.read_csv(roll)
            ax_err.semilogy(df["t"], df["rel_err"], label=run.name)
    ax_loss.set(xlabel="epoch", ylabel="training MSE")
    ax_err.set(xlabel="t", ylabel="relative rollout error")
    for ax in (ax_loss, ax_err):
        ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
