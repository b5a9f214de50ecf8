"""End-to-end command-line behavior via main(argv) return codes."""

import numpy as np
import pytest

from hspclassify import classify_knn, load_dataset, load_fvecs, load_labels
from hspclassify.cli import main

GEN_SPEC = ('{"num_classes": 3, "points_per_class": 60, "dimension": 4,'
            ' "class_separation": 5.0, "seed": 12}')


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One generated dataset shared by the pipeline tests."""
    root = tmp_path_factory.mktemp("cli")
    paths = {
        "data": str(root / "train.fvecs"),
        "labels": str(root / "train.labels"),
        "queries": str(root / "queries.csv"),
        "root": root,
    }
    assert main(["gen", "--spec", GEN_SPEC, "--out", paths["data"],
                 "--labels-out", paths["labels"]]) == 0
    rng = np.random.default_rng(5)
    lines = [",".join(f"{v:.6f}" for v in row)
             for row in rng.standard_normal((12, 4))]
    (root / "queries.csv").write_text("\n".join(lines) + "\n")
    return paths


class TestGen:
    def test_writes_loadable_files(self, workspace, capsys):
        vecs = load_fvecs(workspace["data"])
        labels = load_labels(workspace["labels"])
        assert vecs.shape == (180, 4)
        assert np.bincount(labels).tolist() == [60, 60, 60]

    def test_spec_from_file(self, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(GEN_SPEC)
        code = main(["gen", "--spec", str(spec_path),
                     "--out", str(tmp_path / "d.fvecs"),
                     "--labels-out", str(tmp_path / "d.labels")])
        assert code == 0
        assert load_fvecs(tmp_path / "d.fvecs").shape == (180, 4)

    def test_same_spec_same_bytes(self, workspace, tmp_path, capsys):
        code = main(["gen", "--spec", GEN_SPEC,
                     "--out", str(tmp_path / "again.fvecs"),
                     "--labels-out", str(tmp_path / "again.labels")])
        assert code == 0
        with open(workspace["data"], "rb") as fh:
            first = fh.read()
        assert (tmp_path / "again.fvecs").read_bytes() == first


class TestHspCommands:
    def test_graph_export(self, workspace, tmp_path, capsys):
        out = tmp_path / "graph.txt"
        code = main(["hsp", "graph", "--data", workspace["data"],
                     "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 180
        assert lines[0].split(":")[0] == "0"

    def test_verify_passes(self, workspace, capsys):
        code = main(["hsp", "verify", "--data", workspace["data"]])
        out = capsys.readouterr().out
        assert code == 0
        assert "survivor/elimination invariants: ok" in out
        assert "minimum spanning tree containment: ok" in out
        assert "max stretch" in out


class TestClassify:
    def test_all_classifiers_run(self, workspace, capsys):
        for name in ("knn", "pknn", "hsp", "ahsp", "pahsp"):
            argv = ["classify", "--data", workspace["data"],
                    "--labels", workspace["labels"],
                    "--queries", workspace["queries"],
                    "--classifier", name]
            if name != "hsp":
                argv += ["--k", "5"]
            assert main(argv) == 0, name
            out = capsys.readouterr().out.splitlines()
            assert len(out) == 12
            assert all(line.strip().isdigit() for line in out)

    def test_output_matches_library(self, workspace, capsys):
        assert main(["classify", "--data", workspace["data"],
                     "--labels", workspace["labels"],
                     "--queries", workspace["queries"],
                     "--classifier", "knn", "--k", "7",
                     "--rule", "dudani"]) == 0
        got = [int(x) for x in capsys.readouterr().out.split()]
        data = load_dataset(workspace["data"], workspace["labels"])
        queries = np.loadtxt(workspace["queries"], delimiter=",",
                             dtype=np.float32)
        want = [classify_knn(data, q, 7, "dudani").label for q in queries]
        assert got == want

    def test_csv_dataset_without_labels_flag(self, workspace, tmp_path, capsys):
        data = load_dataset(workspace["data"], workspace["labels"])
        rows = [",".join(f"{v:.6f}" for v in data.vector(i)) + f",{data.labels[i]}"
                for i in range(data.n)]
        csv_path = tmp_path / "train.csv"
        csv_path.write_text("\n".join(rows) + "\n")
        assert main(["classify", "--data", str(csv_path),
                     "--queries", workspace["queries"],
                     "--classifier", "hsp"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 12


class TestIndexCommands:
    def test_build_and_info(self, workspace, tmp_path, capsys):
        idx = tmp_path / "train.idx"
        assert main(["index", "build", "--data", workspace["data"],
                     "--out", str(idx), "--m", "8", "--ef-construction", "60",
                     "--seed", "3"]) == 0
        capsys.readouterr()
        assert main(["index", "info", "--index", str(idx)]) == 0
        out = capsys.readouterr().out
        assert "max_neighbors: 8" in out
        assert "ef_construction: 60" in out
        assert "seed: 3" in out
        assert "level 0: 180 nodes" in out
        # clustered data need not leave the whole base layer reachable, but
        # the count is always reported and bounded by the node count
        reachable = int(out.split("level-0 reachable from entry: ")[1].split()[0])
        assert 1 <= reachable <= 180

    def test_build_is_deterministic(self, workspace, tmp_path, capsys):
        a, b = tmp_path / "a.idx", tmp_path / "b.idx"
        for p in (a, b):
            assert main(["index", "build", "--data", workspace["data"],
                         "--out", str(p), "--m", "8"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_info_on_garbage_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.idx"
        bad.write_bytes(b"not an index file")
        assert main(["index", "info", "--index", str(bad)]) == 3


class TestBench:
    CONFIG = ('{"generator": {"num_classes": 2, "points_per_class": 40,'
              ' "dimension": 3, "class_separation": 4.0, "seed": 1},'
              ' "test_count": 16, "k_max": 5,'
              ' "classifiers": ["knn", "hsp"], "rules": ["majority"]}')

    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        assert main(["bench", "--config", self.CONFIG,
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("classifier,rule,k,accuracy")
        assert len(lines) == 1 + 5 + 1  # header + knn sweep + hsp row
        err = capsys.readouterr().err
        assert "knn/majority" in err

    def test_rerun_byte_identical(self, tmp_path, capsys):
        p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        assert main(["bench", "--config", self.CONFIG, "--out", str(p1)]) == 0
        assert main(["bench", "--config", self.CONFIG, "--out", str(p2)]) == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_config_from_file(self, tmp_path, capsys):
        cfg = tmp_path / "bench.json"
        cfg.write_text(self.CONFIG)
        out = tmp_path / "results.csv"
        assert main(["bench", "--config", str(cfg), "--out", str(out)]) == 0
        assert out.exists()


class TestExitCodes:
    def test_no_arguments_is_usage(self, capsys):
        assert main([]) == 2

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_help_is_success(self, capsys):
        assert main(["--help"]) == 0

    def test_missing_k_for_knn(self, workspace, capsys):
        assert main(["classify", "--data", workspace["data"],
                     "--labels", workspace["labels"],
                     "--queries", workspace["queries"],
                     "--classifier", "knn"]) == 2
        assert "requires --k" in capsys.readouterr().err

    def test_missing_data_file(self, workspace, capsys):
        assert main(["hsp", "verify", "--data", "/nonexistent/file.fvecs"]) == 3

    def test_malformed_spec_json(self, tmp_path, capsys):
        assert main(["gen", "--spec", "{broken", "--out",
                     str(tmp_path / "x.fvecs"),
                     "--labels-out", str(tmp_path / "x.labels")]) == 3

    def test_unknown_spec_field(self, tmp_path, capsys):
        assert main(["gen", "--spec", '{"sigma": 2}', "--out",
                     str(tmp_path / "x.fvecs"),
                     "--labels-out", str(tmp_path / "x.labels")]) == 3

    def test_bad_index_parameter(self, workspace, tmp_path, capsys):
        assert main(["index", "build", "--data", workspace["data"],
                     "--out", str(tmp_path / "x.idx"), "--m", "1"]) == 2

    def test_query_dimension_mismatch(self, workspace, tmp_path, capsys):
        q = tmp_path / "bad.csv"
        q.write_text("1.0,2.0\n")
        assert main(["classify", "--data", workspace["data"],
                     "--labels", workspace["labels"],
                     "--queries", str(q),
                     "--classifier", "knn", "--k", "3"]) == 3

    def test_truncated_fvecs(self, tmp_path, capsys):
        bad = tmp_path / "cut.fvecs"
        bad.write_bytes(b"\x02\x00\x00\x00\x00\x00")
        assert main(["hsp", "graph", "--data", str(bad),
                     "--out", str(tmp_path / "g.txt")]) == 3
