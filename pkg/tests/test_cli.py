import json
from pathlib import Path

import numpy as np
import pytest

from hash2vec.cli import main
from hash2vec.embedder import EmbeddingTable, read_table, write_table

DATA = Path(__file__).resolve().parent.parent / "data"
TINY = str(DATA / "tiny.txt")
TINY_DATASET = str(DATA / "tiny_similarity.csv")
STOPLIST = str(DATA / "stoplist.txt")


def run(*argv) -> int:
    return main(list(argv))


class TestTrain:
    def test_writes_table_with_matching_header(self, tmp_path):
        out = tmp_path / "t.vec"
        assert run("train", "--input", TINY, "--output", str(out),
                   "--n", "64", "--k", "3", "--seed", "9") == 0
        header = out.read_text().splitlines()[0].split()
        assert header[:3] == ["hash2vec", "64", "3"]
        assert header[5] == "9"

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.vec", tmp_path / "b.vec"
        args = ["--input", TINY, "--n", "32", "--k", "4", "--seed", "3"]
        assert run("train", "--output", str(a), *args) == 0
        assert run("train", "--output", str(b), *args) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.vec", tmp_path / "b.vec"
        assert run("train", "--input", TINY, "--output", str(a), "--n", "32", "--k", "3",
                   "--seed", "1") == 0
        assert run("train", "--input", TINY, "--output", str(b), "--n", "32", "--k", "3",
                   "--seed", "2") == 0
        assert a.read_bytes() != b.read_bytes()

    @pytest.mark.parametrize("shards", [2, 3, 8])
    def test_sharded_training_identical(self, tmp_path, shards):
        single, sharded = tmp_path / "s1.vec", tmp_path / "sN.vec"
        args = ["--input", TINY, "--n", "32", "--k", "3", "--seed", "5"]
        assert run("train", "--output", str(single), *args) == 0
        assert run("train", "--output", str(sharded), "--shards", str(shards), *args) == 0
        assert single.read_bytes() == sharded.read_bytes()

    def test_env_seed_default(self, tmp_path, monkeypatch):
        out = tmp_path / "t.vec"
        monkeypatch.setenv("HASH2VEC_SEED", "271")
        assert run("train", "--input", TINY, "--output", str(out), "--n", "16", "--k", "2") == 0
        assert out.read_text().splitlines()[0].split()[5] == "271"

    def test_config_file_defaults_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n=16\nk=2\nseed=40\nweight=constant\n")
        out1, out2 = tmp_path / "a.vec", tmp_path / "b.vec"
        assert run("train", "--config", str(cfg), "--input", TINY, "--output", str(out1)) == 0
        header = out1.read_text().splitlines()[0].split()
        assert header[1:6] == ["16", "2", "constant", "0", "40"]
        # explicit flag beats the file
        assert run("train", "--config", str(cfg), "--input", TINY, "--output", str(out2),
                   "--seed", "99") == 0
        assert out2.read_text().splitlines()[0].split()[5] == "99"

    def test_preprocessing_flags(self, tmp_path):
        out = tmp_path / "t.vec"
        assert run("train", "--input", TINY, "--output", str(out), "--n", "16", "--k", "2",
                   "--stoplist", STOPLIST, "--percentile", "0.95",
                   "--sample-prob", "0.9", "--seed", "2") == 0
        table = read_table(str(out))
        assert "the" not in table


class TestMergeCommand:
    def test_merge_with_empty_table_is_identity(self, tmp_path):
        trained = tmp_path / "a.vec"
        assert run("train", "--input", TINY, "--output", str(trained),
                   "--n", "16", "--k", "2", "--seed", "4") == 0
        params = read_table(str(trained)).params
        empty = tmp_path / "empty.vec"
        write_table(EmbeddingTable(params, [], np.zeros((0, 16))), str(empty))
        merged = tmp_path / "m.vec"
        assert run("merge", str(trained), str(empty), "--output", str(merged)) == 0
        assert merged.read_bytes() == trained.read_bytes()

    def test_merge_of_halves_equals_whole(self, tmp_path):
        lines = Path(TINY).read_text().splitlines(keepends=True)
        half1, half2 = tmp_path / "h1.txt", tmp_path / "h2.txt"
        half1.write_text("".join(lines[: len(lines) // 2]))
        half2.write_text("".join(lines[len(lines) // 2 :]))
        args = ["--n", "24", "--k", "3", "--seed", "6"]
        whole, p1, p2, merged = (tmp_path / x for x in ("w.vec", "p1.vec", "p2.vec", "m.vec"))
        assert run("train", "--input", TINY, "--output", str(whole), *args) == 0
        assert run("train", "--input", str(half1), "--output", str(p1), *args) == 0
        assert run("train", "--input", str(half2), "--output", str(p2), *args) == 0
        assert run("merge", str(p1), str(p2), "--output", str(merged)) == 0
        assert merged.read_bytes() == whole.read_bytes()

    def test_mismatched_params_is_domain_error(self, tmp_path, capsys):
        a, b = tmp_path / "a.vec", tmp_path / "b.vec"
        run("train", "--input", TINY, "--output", str(a), "--n", "16", "--k", "2")
        run("train", "--input", TINY, "--output", str(b), "--n", "16", "--k", "3")
        assert run("merge", str(a), str(b), "--output", str(tmp_path / "m.vec")) == 3
        assert "error" in capsys.readouterr().err


@pytest.fixture(scope="module")
def table_path(tmp_path_factory):
    out = tmp_path_factory.mktemp("tables") / "tiny.vec"
    assert run("train", "--input", TINY, "--output", str(out),
               "--n", "128", "--k", "5", "--seed", "1",
               "--stoplist", STOPLIST) == 0
    return str(out)


class TestQueryCommands:
    def test_query_json_lines(self, table_path, capsys):
        assert run("query", "--table", table_path, "--word", "king", "--topk", "3") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        rows = [json.loads(l) for l in lines]
        assert [r["rank"] for r in rows] == [1, 2, 3]
        assert all(set(r) == {"word", "score", "rank"} for r in rows)
        assert rows[0]["score"] >= rows[1]["score"]

    def test_query_unknown_word_is_domain_error(self, table_path, capsys):
        assert run("query", "--table", table_path, "--word", "qqqqzz", "--topk", "3") == 3
        err = capsys.readouterr().err
        assert "unknown word" in err

    def test_analogy_json_lines(self, table_path, capsys):
        assert run("analogy", "--table", table_path, "--x", "paris", "--y", "france",
                   "--z", "moscow", "--topk", "4") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 4
        parsed = json.loads(lines[0])
        assert parsed["rank"] == 1

    def test_evaluate_key_value_output(self, table_path, capsys):
        assert run("evaluate", "--table", table_path, "--dataset", TINY_DATASET) == 0
        out = capsys.readouterr().out
        values = dict(line.split("=", 1) for line in out.strip().splitlines())
        assert set(values) == {"spearman_rho", "covered", "skipped"}
        assert -1.0 <= float(values["spearman_rho"]) <= 1.0
        assert int(values["covered"]) >= 2

    def test_export_tsv(self, table_path, tmp_path):
        out = tmp_path / "vectors.tsv"
        assert run("export", "--input", table_path, "--output", str(out), "--limit", "10") == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 10
        fields = lines[0].split("\t")
        assert len(fields) == 129  # word + 128 components
        float(fields[1])


class TestPreprocess:
    def test_writes_one_sentence_per_line(self, tmp_path):
        out = tmp_path / "clean.txt"
        assert run("preprocess", "--input", TINY, "--output", str(out),
                   "--stoplist", STOPLIST) == 0
        lines = out.read_text().splitlines()
        assert lines
        assert all(line == line.lower() and " ." not in line for line in lines)
        assert not any("the" in line.split() for line in lines)

    def test_phrases_join_frequent_pairs(self, tmp_path):
        corpus = tmp_path / "c.txt"
        # varied neighbors; discount 1 suppresses the singleton bigrams
        corpus.write_text("".join(f"w{i} new york w{i + 100}.\n" for i in range(30)))
        out = tmp_path / "clean.txt"
        assert run("preprocess", "--input", str(corpus), "--output", str(out),
                   "--phrases", "--phrase-threshold", "0.001", "--phrase-discount", "1") == 0
        assert "new_york" in out.read_text()


class TestSweepCommands:
    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "curve.csv"
        assert run("sweep", "--input", TINY, "--dataset", TINY_DATASET, "--output", str(out),
                   "--dims", "16,64", "--k", "3", "--seed", "2") == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,rho,rho_oracle,covered,skipped"
        assert len(lines) == 3

    def test_oracle_compare_wider_is_better(self, tmp_path):
        out = tmp_path / "cmp.csv"
        assert run("oracle-compare", "--input", TINY, "--output", str(out),
                   "--n", "64", "--n", "4096", "--k", "3", "--seed", "3",
                   "--pairs", "120", "--stoplist", STOPLIST) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        narrow = dict(zip(lines[0].split(","), lines[1].split(",")))
        wide = dict(zip(lines[0].split(","), lines[2].split(",")))
        assert float(wide["median_rel_err"]) < float(narrow["median_rel_err"])


class TestExitCodes:
    def test_usage_error(self, capsys):
        assert run("train", "--input", TINY) == 1  # missing required flags
        capsys.readouterr()

    def test_unknown_command_usage_error(self, capsys):
        assert run("frobnicate") == 1
        capsys.readouterr()

    def test_missing_input_io_error(self, tmp_path, capsys):
        assert run("train", "--input", str(tmp_path / "nope.txt"),
                   "--output", str(tmp_path / "o.vec"), "--n", "8", "--k", "2") == 2
        assert "error" in capsys.readouterr().err

    def test_malformed_table_io_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.vec"
        bad.write_text("not a table\n")
        assert run("query", "--table", str(bad), "--word", "x", "--topk", "1") == 2
        capsys.readouterr()

    def test_invalid_percentile_usage_error(self, tmp_path, capsys):
        assert run("train", "--input", TINY, "--output", str(tmp_path / "o.vec"),
                   "--n", "8", "--k", "2", "--percentile", "1.5") == 1
        capsys.readouterr()
