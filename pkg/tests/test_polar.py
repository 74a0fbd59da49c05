import json

import numpy as np
import pytest

from polarlink.polar import (
    CodeConfig,
    encode,
    encode_split,
    generator_matrix,
)


def test_generator_matrix_kernel():
    assert generator_matrix(1).tolist() == [[1, 0], [1, 1]]


def test_generator_matrix_trivial():
    assert generator_matrix(0).tolist() == [[1]]


def test_generator_matrix_second_power():
    # hand Kronecker product of the kernel with itself
    expected = [
        [1, 0, 0, 0],
        [1, 1, 0, 0],
        [1, 0, 1, 0],
        [1, 1, 1, 1],
    ]
    assert generator_matrix(2).tolist() == expected


def test_generator_matrix_rejects_oversize():
    with pytest.raises(ValueError):
        generator_matrix(17)
    with pytest.raises(ValueError):
        generator_matrix(-1)


def test_encode_zero_fixed_point():
    assert encode([0, 0, 0, 0]).tolist() == [0, 0, 0, 0]


def test_encode_row_sum():
    assert encode([1, 1]).tolist() == [0, 1]


def test_encode_last_row():
    assert encode([0, 0, 0, 1]).tolist() == [1, 1, 1, 1]


def test_encode_rejects_bad_lengths():
    with pytest.raises(ValueError):
        encode([0, 1, 1])
    with pytest.raises(ValueError):
        encode([])


def test_encode_rejects_non_bits():
    with pytest.raises(ValueError):
        encode([0, 2])


def test_encode_matches_matrix_product():
    rng = np.random.default_rng(11)
    for n in range(0, 9):
        size = 1 << n
        g = generator_matrix(n)
        if n <= 4:
            us = np.array(
                [[(i >> b) & 1 for b in range(size)] for i in range(1 << size)],
                dtype=np.uint8,
            )
        else:
            us = rng.integers(0, 2, size=(64, size), dtype=np.uint8)
        expected = (us @ g) % 2
        assert (encode(us) == expected).all()


def test_encode_involution():
    rng = np.random.default_rng(7)
    for n in list(range(0, 11)) + [14]:
        u = rng.integers(0, 2, size=1 << n, dtype=np.uint8)
        assert (encode(encode(u)) == u).all()


def test_encode_linearity():
    rng = np.random.default_rng(9)
    for _ in range(20):
        u = rng.integers(0, 2, 256, dtype=np.uint8)
        v = rng.integers(0, 2, 256, dtype=np.uint8)
        assert (encode(u ^ v) == (encode(u) ^ encode(v))).all()


def test_encode_batch_matches_single():
    rng = np.random.default_rng(13)
    us = rng.integers(0, 2, size=(17, 128), dtype=np.uint8)
    batch = encode(us)
    for row, u in zip(batch, us):
        assert (row == encode(u)).all()


def test_encode_split_full_rate_is_encode():
    rng = np.random.default_rng(3)
    u = rng.integers(0, 2, 16, dtype=np.uint8)
    cfg = CodeConfig(n=4, info_set=np.arange(16))
    assert (encode_split(u, cfg) == encode(u)).all()


def test_encode_split_all_frozen_zero():
    cfg = CodeConfig(n=3, info_set=np.array([], dtype=int))
    out = encode_split(np.array([], dtype=np.uint8), cfg)
    assert out.tolist() == [0] * 8


def test_encode_split_scatter():
    cfg = CodeConfig(n=2, info_set=[3])
    out = encode_split([1], cfg)
    assert out.tolist() == [1, 1, 1, 1]
    # cross-check against the matching generator row
    assert out.tolist() == generator_matrix(2)[3].tolist()


def test_encode_split_nonzero_frozen():
    cfg = CodeConfig(n=2, info_set=[3], frozen_values=[1, 0, 0])
    u = np.zeros(4, dtype=np.uint8)
    u[[0, 1, 2]] = [1, 0, 0]
    u[3] = 1
    assert (encode_split([1], cfg) == encode(u)).all()


def test_encode_split_length_mismatch():
    cfg = CodeConfig(n=2, info_set=[1, 3])
    with pytest.raises(ValueError):
        encode_split([1], cfg)


def test_code_config_validation():
    with pytest.raises(ValueError):
        CodeConfig(n=2, info_set=[1, 1])
    with pytest.raises(ValueError):
        CodeConfig(n=2, info_set=[4])
    with pytest.raises(ValueError):
        CodeConfig(n=2, info_set=[0], frozen_values=[0, 0])
    with pytest.raises(ValueError):
        CodeConfig(n=-1, info_set=[])


def test_code_config_properties():
    cfg = CodeConfig(n=3, info_set=[1, 5, 7])
    assert cfg.N == 8 and cfg.K == 3
    assert cfg.rate == pytest.approx(3 / 8)
    assert cfg.frozen_set().tolist() == [0, 2, 3, 4, 6]


def test_code_config_json_roundtrip(tmp_path):
    cfg = CodeConfig(n=4, info_set=[2, 3, 9, 15], frozen_values=[1] + [0] * 11)
    path = tmp_path / "code.json"
    cfg.save(path)
    data = json.loads(path.read_text())
    assert set(data) == {"n", "K", "A", "frozen_values"}
    assert data["A"] == [2, 3, 9, 15]
    assert data["frozen_values"] == "1" + "0" * 11
    loaded = CodeConfig.load(path)
    assert loaded.n == cfg.n
    assert (loaded.info_set == cfg.info_set).all()
    assert (loaded.frozen_values == cfg.frozen_values).all()


def test_code_config_json_rejects_bad_k(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2, "K": 3, "A": [0], "frozen_values": "000"}')
    with pytest.raises(ValueError):
        CodeConfig.load(path)
