import pytest

from siccat.catalogue import INVARIANT, UNPAIRED, galois_pairing_report, lookup, parse_recipe


def table(label):
    return {p.generator: p.partner for p in galois_pairing_report(lookup(label).recipe)}


@pytest.mark.parametrize("label", ["28c", "52d", "124a"])
def test_cubic_entries_fully_paired(label):
    t = table(label)
    assert t["b1"] == "b2" and t["b2"] == "b1"
    assert t["c1"] == "c2" and t["c2"] == "c1"
    assert t["m1"] == "m2" and t["m2"] == "m1"
    assert UNPAIRED not in t.values()


def test_52d_second_pair():
    t = table("52d")
    assert (t["b3"], t["b4"]) == ("b4", "b3")


def test_39i_has_unpaired_generators():
    t = table("39i")
    assert t["b3"] == UNPAIRED and t["b4"] == UNPAIRED


def test_7b_m2_unpaired():
    assert table("7b") == {"a": INVARIANT, "m2": UNPAIRED}


def test_false_partner_declaration_is_caught():
    text = """\
entry 4z dim 4 layout 4
gen a = sqrt(5)
gen p = sqrt(2+a) partner q
gen q = sqrt(3-a) partner p
component 1 = 1
component 2 = p
component 3 = q
component 4 = a
norm = 1
"""
    t = {p.generator: p.partner for p in galois_pairing_report(parse_recipe(text))}
    assert t["p"] == UNPAIRED and t["q"] == UNPAIRED
    fixed = {p.generator: p.partner for p in galois_pairing_report(parse_recipe(text.replace("3-a", "2-a")))}
    assert fixed["p"] == "q" and fixed["q"] == "p"
