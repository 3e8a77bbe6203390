import json
from pathlib import Path

import pytest

from ghostlist import fixtures
from ghostlist.config import GenParams
from ghostlist.errors import GraphFormatError
from ghostlist.generator import generate_graph
from ghostlist.graph_io import (
    dumps_graph,
    graph_to_document,
    load_graph,
    loads_graph,
    save_graph,
)


def create_mock_graph_file(tmp_path: Path, document: dict) -> Path:
    path = tmp_path / "graph.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_save_then_load_generated_graph(tmp_path: Path):
    graph = generate_graph(GenParams(n_users=40, mean_degree=6, n_pages=30), 11)
    path = tmp_path / "nested" / "g.json"
    save_graph(graph, path)
    assert load_graph(path) == graph


def test_save_is_byte_stable(tmp_path: Path):
    graph = fixtures.world_w3()
    save_graph(graph, tmp_path / "a.json")
    save_graph(load_graph(tmp_path / "a.json"), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_document_layout():
    document = graph_to_document(fixtures.world_w1())
    assert list(document) == ["users", "pages", "groups", "pictures", "seed"]
    assert document["users"][0]["friends"] == [2, 3]
    assert document["users"][0]["privacy"]["likes_visible"] is True
    assert document["pages"][1] == {"id": 2, "fans": [1, 3, 5, 6]}
    assert dumps_graph(fixtures.world_w1()).endswith("\n")


def test_unknown_key_is_rejected(tmp_path: Path):
    document = graph_to_document(fixtures.world_w1())
    document["users"][3]["nickname"] = "dora"
    path = create_mock_graph_file(tmp_path, document)
    with pytest.raises(GraphFormatError, match=r"users\[3\]: unknown keys"):
        load_graph(path)


def test_unsorted_ids_are_rejected(tmp_path: Path):
    document = graph_to_document(fixtures.world_w1())
    document["users"][0]["friends"] = [3, 2]
    path = create_mock_graph_file(tmp_path, document)
    with pytest.raises(GraphFormatError, match=r"users\[0\]\.friends"):
        load_graph(path)


def test_duplicate_ids_are_rejected(tmp_path: Path):
    document = graph_to_document(fixtures.world_w1())
    document["pages"][1]["id"] = 1
    path = create_mock_graph_file(tmp_path, document)
    with pytest.raises(GraphFormatError, match="duplicate id 1"):
        load_graph(path)


def test_bad_visibility_is_rejected():
    document = graph_to_document(fixtures.world_w3())
    document["groups"][0]["visibility"] = "secret"
    with pytest.raises(GraphFormatError, match=r"groups\[0\]\.visibility"):
        loads_graph(json.dumps(document))


def test_booleans_are_not_ids():
    document = graph_to_document(fixtures.world_w1())
    document["users"][0]["likes"] = [True, 2]
    with pytest.raises(GraphFormatError, match="non-negative integer"):
        loads_graph(json.dumps(document))


def test_broken_json_names_line_and_column(tmp_path: Path):
    path = tmp_path / "broken.json"
    path.write_text('{"users": [\n  {"id": 1,,}\n]}', encoding="utf-8")
    with pytest.raises(GraphFormatError, match=r"broken\.json: line 2 column"):
        load_graph(path)


def test_missing_file(tmp_path: Path):
    with pytest.raises(FileNotFoundError):
        load_graph(tmp_path / "nope.json")
