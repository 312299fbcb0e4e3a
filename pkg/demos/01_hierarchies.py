"""Generalisation hierarchies: the building block of every anonymiser.

A value generalisation hierarchy (VGH) maps each leaf value to coarser
ancestors, up to the fully suppressed root "*". Categorical VGHs come from
semicolon-delimited files; numerical ones are nested interval ladders.
"""

from pathlib import Path
from tempfile import TemporaryDirectory

from anonylat import build_interval_hierarchy, parse_hierarchy_file
from anonylat.tabular import AttributeSchema

POSTAL_FILE = """\
3500;350*;*
3506;350*;*
3104;310*;*
3105;310*;*
"""

with TemporaryDirectory() as tmp:
    path = Path(tmp) / "zip.csv"
    path.write_text(POSTAL_FILE, encoding="utf-8")
    zip_vgh = parse_hierarchy_file(
        path, AttributeSchema("zip", "categorical", "qid"))

print("postal-code VGH, height", zip_vgh.height)
for level in range(zip_vgh.height + 1):
    print(f"  generalise('3500', {level}) ->",
          zip_vgh.generalise("3500", level).label)

print("\nleaves under each node:")
for label in ("3500", "350*", "*"):
    print(f"  {label!r:7} covers {zip_vgh.subtree_leaf_count(label)} leaves")

# Numerical attributes use nested half-open buckets. Widths must multiply
# so every bucket sits inside its parent; the root spans the observed range.
ages = [float(a) for a in range(18, 70)]
age_vgh = build_interval_hierarchy(ages, level_widths=[5, 10, 20], origin=0,
                                   attribute="age")
print("\nage interval hierarchy, height", age_vgh.height)
for level in range(age_vgh.height + 1):
    gv = age_vgh.generalise(23.0, level)
    print(f"  level {level}: {gv.label:10} interval={gv.interval}")

# The stored interval, not the label text, is what downstream encoding
# uses; the label is only for display and CSV export.
gv = age_vgh.generalise(23.0, 2)
print("\nmidpoint of", gv.label, "is", gv.midpoint())
