"""Rewrite R's datasets::sunspot.month (monthly mean sunspot numbers,
1749-01 .. 2013-09) into the semicolon-delimited monthly layout read by
load_sunspots:

    year;month;decimal_year;value;std;observations;marker

Columns that the source does not carry are written as -1 (std, observations)
and 1 (marker).

Usage: python3 tools/convert_sunspots.py data/sunspot_month_v1.csv
"""

import sys

import rdatasets


def main(out_path: str) -> None:
    frame = rdatasets.data("datasets", "sunspot.month")
    with open(out_path, "w", encoding="ascii") as out:
        for i, value in enumerate(frame["value"]):
            year, month = 1749 + i // 12, i % 12 + 1
            decimal = year + (month - 0.5) / 12.0
            out.write(f"{year:4d};{month:02d};{decimal:8.3f};{value:6.1f};  -1.0;   -1;1\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/sunspot_month_v1.csv")
