import json

import pytest

from conftest import fiducial
from siccat.fileio import FiducialFileError, dumps, fiducial_to_dict, loads, read_fiducial, write_fiducial

DIGITS = 50


def test_round_trip_is_bit_identical(tmp_path):
    fid = fiducial("12b", DIGITS)
    path = tmp_path / "12b.json"
    write_fiducial(fid, path)
    back = read_fiducial(path)
    # the decimal strings are the exact content; re-export reproduces them
    assert dumps(back) == path.read_text()
    again = loads(dumps(back))
    assert again.components == back.components
    assert back.layout == (3, 4) and back.digits == DIGITS


def test_fields():
    d = fiducial_to_dict(fiducial("28c", DIGITS))
    assert d["basis"] == "paper-monomial"
    assert d["block_layout"] == [7, 4]
    assert d["branches"] == {"c1": 0, "c2": 0}
    assert len(d["components"]) == 28
    assert all(isinstance(x, str) for pair in d["components"] for x in pair)


def test_reading_at_other_precision():
    text = dumps(fiducial("7b", DIGITS))
    assert loads(text, 30).digits == 30


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(format_version=99),
    lambda d: d.update(basis="standard"),
    lambda d: d["components"].pop(),
    lambda d: d.update(block_layout=[5]),
    lambda d: d["components"][0].__setitem__(0, "one"),
    lambda d: d.pop("d"),
])
def test_invalid_files(mutate):
    data = json.loads(dumps(fiducial("7b", DIGITS)))
    mutate(data)
    with pytest.raises((FiducialFileError, ValueError)):
        loads(json.dumps(data))


def test_not_json():
    with pytest.raises(FiducialFileError):
        loads("{not json")
    with pytest.raises(FiducialFileError):
        loads("[1, 2]")
