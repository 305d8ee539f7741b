#!/usr/bin/env python3
"""Write crates/core/data/odlyzko_totally_real.tsv.

Only n = 34 carries a quoted unconditional bound.  The unconditional bounds
for totally real fields increase with n, so the n = 34 value is also a valid
lower bound for every larger degree; those rows are tagged accordingly.
"""
import pathlib

QUOTED = {34: 28.82}
LAST = 60

rows = ["# totally real root discriminant lower bounds m_r(n)", "n\tbound\tsource"]
for n in range(34, LAST + 1):
    if n in QUOTED:
        rows.append(f"{n}\t{QUOTED[n]:.2f}\tquoted (Odlyzko, unconditional)")
    else:
        rows.append(f"{n}\t{QUOTED[34]:.2f}\tmonotone extension of n=34")

out = pathlib.Path(__file__).resolve().parent.parent / "crates/core/data/odlyzko_totally_real.tsv"
out.write_text("\n".join(rows) + "\n")
print(out)
