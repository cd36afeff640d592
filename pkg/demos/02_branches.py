"""
Which root of the cubic?
========================

The d = 28 recipe leaves one real root of a cubic open.  Certification
tries all three and keeps those whose vector is equiangular.
"""

from siccat import certified_recipe, certify_branches, lookup, parse_recipe
from siccat.catalogue.recipe import serialize
from siccat.evaluation import candidate_roots, evaluate_generators
from siccat.numeric import kernel

recipe = lookup("28c").recipe
print("search generators:", [g.name for g in recipe.search_generators])

# the three real roots of 7t^3 - 42t - (27 - a) with a = sqrt(29)
k = kernel(40)
env = evaluate_generators(recipe, {"c2": 0}, 40)
for i, r in enumerate(candidate_roots(recipe.generator("c2"), env.values, k)):
    print(i, k.ctx.nstr(r, 15))

# %%
recipe, certs = certified_recipe(recipe, digits=60)
for c in certs:
    print(dict(c.branches), c.verdict, k.ctx.nstr(c.max_deviation, 3))
print("canonical:", dict(recipe.canonical_branches))

# %%
# A deliberately broken recipe has no passing branch at all
broken = parse_recipe(serialize(lookup("7b").recipe).replace("component 2 = -etainv", "component 2 = etainv"))
(cert,) = certify_branches(broken, 60)
print("broken 7b:", cert.verdict, k.ctx.nstr(cert.max_deviation, 3))
