"""The same authors, read from four export formats.

Each format spells names differently ("Sorel, FG", "F. G. Sorel", ...).
After normalization they all reduce to a last name plus initials.
"""

from pathlib import Path

from authornet import build_area_list, normalize_author, read_records

fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

for raw in ["Sorel, F.G.", "F. G. Sorel", "Sorel, FG", "van der Berg, Jan Pieter", "Müller-Lyer, A."]:
    print(f"{raw!r:>28} -> {normalize_author(raw)}")

print()
for name, fmt in [("five.wos.txt", "wos-plain"), ("five.ris", "ris"), ("five.csv", "csv"), ("five.lst", "author-lines")]:
    records = read_records(fixtures / name, fmt)
    area = build_area_list(records, name)
    names = ", ".join(sorted(str(a) for a in area.authors))
    print(f"{fmt:>12}: {len(records)} records, {area.size} unique authors: {names}")
