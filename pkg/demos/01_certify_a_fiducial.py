"""
Certifying a fiducial vector
============================

Build the d = 7 vector from its recipe, then check every overlap.
"""

from siccat import build_fiducial, lookup, verify_fiducial

recipe = lookup("7b").recipe
print(f"{recipe.label}: d = {recipe.d}, generators {[g.name for g in recipe.generators]}")

# %%
# Evaluate at 120 significant digits.  The components are mpmath numbers
fid = build_fiducial(recipe, digits=120)
for k, c in enumerate(fid.components, start=1):
    print(k, str(c.real)[:25])

# %%
# All 48 non-identity overlaps should have squared modulus 1/8
rep = verify_fiducial(fid, recipe)
print("target", rep.target)
print("worst deviation", rep.to_dict()["max_deviation"], "at", rep.worst_label)
print("relations", rep.to_dict()["relation_residues"])
print("verdict", rep.verdict)

# %%
# The vector is real, so complex conjugation maps it to itself
label, phase = rep.conjugation_match
print("conjugate matches D", label, "with phase", phase)
