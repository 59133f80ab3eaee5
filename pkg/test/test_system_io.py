import json

import numpy as np
import pytest

from common.errors import SystemFormatError
from data.system_io import load_system, save_system, system_from_dict, system_to_dict


def test_demo_file_loads(demo_system):
    assert (demo_system.n, demo_system.d, demo_system.N) == (2, 2, 3)
    assert demo_system.A.tolist() == [
        [1.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 1.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 1.0],
    ]
    assert demo_system.y.tolist() == [2.0, 0.0, 1.0]
    assert not np.any(demo_system.b)


def test_save_and_load_preserve_system(tmp_path, demo_system):
    path = tmp_path / "nested" / "system.json"
    save_system(demo_system, str(path))
    loaded = load_system(str(path))
    assert np.array_equal(loaded.A, demo_system.A)
    assert np.array_equal(loaded.y, demo_system.y)


def test_dense_layout():
    system = system_from_dict({"n": 1, "d": 2, "A": [[1.0, 2.0]], "b": [0.5], "y": [3.5]})
    assert system.A.tolist() == [[1.0, 2.0]]
    assert system.b.tolist() == [0.5]
    assert system_from_dict({"n": 1, "d": 1, "A": [[1.0]], "y": [1.0]}).b.tolist() == [0.0]


def test_repeated_terms_are_summed():
    payload = {
        "n": 2,
        "d": 2,
        "equations": [
            {
                "y": 1.0,
                "terms": [
                    {"alpha": [1, 1], "coeff": 2.0},
                    {"alpha": [1, 1], "coeff": 0.5},
                ],
            }
        ],
    }
    system = system_from_dict(payload)
    assert system.A[0, 3] == 2.5
    assert system_to_dict(system)["equations"][0]["terms"] == [
        {"alpha": [1, 1], "coeff": 2.5}
    ]


@pytest.mark.parametrize(
    "alpha,message",
    [([0, 0], "outside [1, 2]"), ([2, 1], "outside [1, 2]"), ([1], "nonnegative exponents")],
)
def test_bad_multi_index(alpha, message):
    payload = {"n": 2, "d": 2, "equations": [{"y": 1.0, "terms": [{"alpha": alpha, "coeff": 1}]}]}
    with pytest.raises(SystemFormatError, match="equations.0.terms.0.alpha") as info:
        system_from_dict(payload)
    assert message in str(info.value)


def test_schema_errors_name_the_field():
    with pytest.raises(SystemFormatError, match="field 'n'"):
        system_from_dict({"n": 0, "d": 2, "equations": [{"y": 0.0}]})
    with pytest.raises(SystemFormatError, match="either 'equations' or the dense"):
        system_from_dict({"n": 2, "d": 2})
    with pytest.raises(SystemFormatError, match="equations.0.y"):
        system_from_dict({"n": 2, "d": 2, "equations": [{"terms": []}]})


def test_dense_shape_mismatch():
    with pytest.raises(SystemFormatError):
        system_from_dict({"n": 2, "d": 2, "A": [[1.0, 2.0]], "y": [1.0]})


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 2,\n "d": }')
    with pytest.raises(SystemFormatError, match="line 2, column"):
        load_system(str(path))
    path.write_text(json.dumps([1, 2]))
    with pytest.raises(SystemFormatError, match="JSON object"):
        load_system(str(path))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_system(str(tmp_path / "absent.json"))
