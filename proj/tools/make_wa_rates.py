#!/usr/bin/env python3
"""Build the Washington county rate matrix consumed by `aracusum replay`.

Inputs are the JHU CSSE US time series files:
  csse_covid_19_data/csse_covid_19_time_series/time_series_covid19_confirmed_US.csv
  csse_covid_19_data/csse_covid_19_time_series/time_series_covid19_deaths_US.csv
(the deaths file carries the Population column).

rate[t][k] = max(new cases of county k on day t, 0) / population of county k
"""

import argparse

import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--confirmed", required=True)
    ap.add_argument("--deaths", required=True, help="used for county populations")
    ap.add_argument("--state", default="Washington")
    ap.add_argument("--start", default="2020-01-23")
    ap.add_argument("--end", default="2020-09-13")
    ap.add_argument("--out", default="data/wa_rates.csv")
    args = ap.parse_args()

    conf = pd.read_csv(args.confirmed)
    deaths = pd.read_csv(args.deaths)
    keep = lambda df: df[(df["Province_State"] == args.state) & (df["FIPS"].notna()) & (df["FIPS"] < 80000)
                         & ~df["Admin2"].isin(["Unassigned"]) & ~df["Admin2"].astype(str).str.startswith("Out of")]
    conf, deaths = keep(conf), keep(deaths)

    date_cols = [c for c in conf.columns if c.count("/") == 2]
    cum = conf.set_index("Admin2")[date_cols].T
    cum.index = pd.to_datetime(cum.index, format="%m/%d/%y")
    # Day one has no predecessor inside the window, so difference from the full series first.
    daily = cum.diff().fillna(cum.iloc[0]).clip(lower=0)
    daily = daily.loc[args.start:args.end]

    pop = deaths.set_index("Admin2")["Population"].reindex(daily.columns)
    if pop.isna().any() or (pop <= 0).any():
        raise SystemExit("missing population for: " + ", ".join(pop[pop.isna() | (pop <= 0)].index))
    rates = daily / pop
    rates.index = rates.index.strftime("%Y-%m-%d")
    rates.index.name = "date"
    rates.to_csv(args.out, float_format="%.10g")
    print(f"{args.out}: {rates.shape[0]} days x {rates.shape[1]} counties")


if __name__ == "__main__":
    main()
