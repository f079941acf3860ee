import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

sns.set(style="whitegrid")

METRIC_COLUMNS = ["OC (↑)", "SH (↓)", "OH (↓)", "RH (↓)"]


def load_report_csv(report_csv):
    """Rendered report table back to numbers; 'undefined' cells become NaN, '<0.01 %' becomes 0.01."""
    df = pd.read_csv(report_csv)
    for column in METRIC_COLUMNS:
        values = df[column].astype(str).str.replace(r"[%<]", "", regex=True).str.strip()
        df[column] = pd.to_numeric(values, errors="coerce")
    return df


def plot_comparison(report_csv, out_png=None):
    df = load_report_csv(report_csv)
    if out_png is None:
        out_png = os.path.splitext(report_csv)[0] + ".png"

    long = df.melt(id_vars=["Configuration"], value_vars=METRIC_COLUMNS, var_name="Metric", value_name="Percent")

    plt.figure(figsize=(max(6, 2 + 1.5 * len(df)), 4))
    sns.barplot(x="Metric", y="Percent", hue="Configuration", data=long)
    plt.title("Ontology conformance and hallucination rates")
    plt.xlabel("Metric")
    plt.ylabel("Percent of triplets")
    plt.ylim(0, 100)
    plt.tight_layout()
    plt.savefig(out_png)
    plt.close()

    print(f"📊 Plot saved to {out_png}")
    return out_png


if __name__ == "__main__":
    import sys

    plot_comparison(sys.argv[1] if len(sys.argv) > 1 else "runs/latest/report.csv")
