#!/usr/bin/env python3
"""Write daily S&P 500 closes for a date window as a Date,Close CSV.

The source is the openintro `sp500_1950_2018` table shipped inside the
`rdatasets` wheel on PyPI, so only pip access is needed.

    python3 scripts/fetch_sp500.py data/sp500_1980_2013.csv
"""
import argparse
import glob
import lzma
import pickle
import subprocess
import sys
import tempfile
import zipfile

TABLE = "rdatasets/_data/openintro/sp500_1950_2018.pkl.compress"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--start", default="1980-01-02")
    ap.add_argument("--end", default="2013-05-10")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "rdatasets==0.2.10", "-d", tmp],
            check=True,
            stdout=subprocess.DEVNULL,
        )
        wheel = glob.glob(f"{tmp}/rdatasets-*.whl")[0]
        frame = pickle.loads(lzma.decompress(zipfile.ZipFile(wheel).read(TABLE)))

    rows = frame[(frame.Date >= args.start) & (frame.Date <= args.end)]
    with open(args.out, "w", newline="\n") as f:
        f.write("Date,Close\n")
        for date, close in zip(rows.Date, rows.Close):
            f.write(f"{date},{close}\n")
    print(f"{len(rows)} rows -> {args.out}")


if __name__ == "__main__":
    main()
