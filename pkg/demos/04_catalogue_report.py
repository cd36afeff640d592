"""
The catalogue at a glance
=========================

Character counts, the a -> -a pairing of generators, and round-tripping
an evaluated vector through the JSON file format.
"""

import tempfile
from pathlib import Path

from siccat import build_fiducial, list_entries, lookup, verify_fiducial
from siccat.catalogue import character_count, galois_pairing_report
from siccat.fileio import read_fiducial, write_fiducial

for label in list_entries():
    r = lookup(label).recipe
    print(f"{label:>5}  d={r.d:<4} characters={character_count(r)}")

# %%
for p in galois_pairing_report(lookup("39i").recipe):
    print(p.generator, "->", p.partner)

# %%
fid = build_fiducial(lookup("12b").recipe, digits=50)
path = Path(tempfile.mkdtemp()) / "12b.json"
write_fiducial(fid, path)
back = read_fiducial(path)
print(path.read_text()[:200], "...")
print("verdict after import:", verify_fiducial(back, probe=False).verdict)
