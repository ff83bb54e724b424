from __future__ import annotations

import numpy as np
import pytest

from lpaf.algebra import SsfdAlgebra
from lpaf.homs import apply_hom, homs_agree
from lpaf.io import (
    FormatError,
    dumps,
    element_from_dict,
    group_system_from_dict,
    load_document,
    system_from_dict,
    system_to_dict,
)


def test_round_trip_with_order_and_similarity():
    doc = {
        "p": 3,
        "levels": [[1, 1], [3]],
        "maps": [{"mult": [[1, 2]], "order": [[2, 1, 2]],
                  "similarity": [{"perm": [3, 1, 2], "phases": [[0, 1], [1, 0], [-1, 0]]}]}],
    }
    s = system_from_dict(doc)
    h = s.maps[0]
    assert h.multiplicity().tolist() == [[1, 2]]
    x = s.levels[0].identity()
    x = type(x)(s.levels[0], [np.array([[2]]), np.array([[5]])])
    img = apply_hom(h, x).blocks[0]
    assert sorted(np.abs(np.diag(img)).tolist()) == [2, 5, 5]
    again = system_from_dict(system_to_dict(s))
    assert homs_agree(again.maps[0], h)


@pytest.mark.parametrize("doc, where", [
    ({"levels": [[1]], "maps": []}, "p"),
    ({"p": 0.5, "levels": [[1]], "maps": []}, "p"),
    ({"p": 3, "levels": [[0]], "maps": []}, "levels[0][0]"),
    ({"p": 3, "levels": [[1], [2]], "maps": []}, "maps"),
    ({"p": 3, "levels": [[1], [2]], "maps": [{"mult": [[1.0]]}]}, "maps[0].mult[0][0]"),
    ({"p": 3, "levels": [[1], [2]], "maps": [{"mult": [[3]]}]}, "maps[0]"),
    ({"p": 3, "levels": [[1], [2]], "maps": [{"mult": [[1]], "order": [[1, 1]]}]}, "maps[0].order[0]"),
    ({"p": 3, "levels": [[1], [2]], "maps": [{"mult": [[1]], "similarity": [{"perm": [1, 1]}]}]},
     "maps[0].similarity[0]"),
])
def test_errors_are_located(doc, where):
    with pytest.raises(FormatError) as err:
        system_from_dict(doc)
    assert str(err.value).startswith(where)


def test_group_documents():
    g = group_system_from_dict({"levels": [[1], [2]], "maps": [{"mult": [[2]]}]})
    assert g.maps[0].matrix.tolist() == [[2]]
    with pytest.raises(FormatError, match="maps\\[0\\]"):
        group_system_from_dict({"levels": [[1], [2]], "maps": [{"mult": [[3]]}]})


def test_load_reports_json_position(tmp_path):
    path = tmp_path / "x.json"
    path.write_text('{"p": 3,\n  "levels": [}')
    with pytest.raises(FormatError, match="x.json:2:"):
        load_document(path)
    with pytest.raises(FormatError):
        load_document(tmp_path / "missing.json")


def test_elements():
    alg = SsfdAlgebra(3, [1, 2])
    blocks = element_from_dict({"blocks": [[[1]], [[[0, 1], 0], [0, 1]]]}, alg)
    assert blocks[1][0, 0] == 1j
    with pytest.raises(FormatError, match="blocks\\[1\\]"):
        element_from_dict([[[1]], [[1]]], alg)
    assert element_from_dict([[[1, 0], [0, 1]], np.eye(4).tolist()], alg, n=2)[1].shape == (4, 4)


def test_dumps_is_deterministic():
    doc = {"b": np.int64(2), "a": [np.float64(1.5), np.bool_(True)], "c": np.eye(2)}
    assert dumps(doc) == dumps(dict(reversed(list(doc.items()))))
