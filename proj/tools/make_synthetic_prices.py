"""Writes data/synthetic_prices.csv: a seeded daily close series on business
days from 2015-04-17 to 2020-05-28 with a volatility crisis from late
February to April 2020."""

import argparse
import pathlib

import numpy as np
import pandas as pd


def simulate(seed: int) -> pd.DataFrame:
    rng = np.random.default_rng(seed)
    dates = pd.bdate_range("2015-04-17", "2020-05-28")
    n = len(dates)
    vol = np.full(n, 0.009)
    crisis = (dates >= "2020-02-24") & (dates <= "2020-04-15")
    vol[crisis] = 0.045
    recovery = dates > "2020-04-15"
    vol[recovery] = 0.02
    drift = np.where(crisis, -0.004, 0.0003)
    shocks = rng.standard_t(df=5, size=n) / np.sqrt(5.0 / 3.0)
    returns = drift + vol * shocks
    returns[0] = 0.0
    closes = 2000.0 * np.exp(np.cumsum(returns))
    return pd.DataFrame({"Date": dates.strftime("%Y-%m-%d"), "Close": np.round(closes, 4)})


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20200101)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic_prices.csv")
    args = parser.parse_args()
    simulate(args.seed).to_csv(args.out, index=False)


if __name__ == "__main__":
    main()
