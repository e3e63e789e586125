import numpy as np
import pytest

from subsel import (
    EmbeddingMatrix,
    FormatError,
    ScoreTable,
    SelectionResult,
    TokenProbRecord,
    load_embeddings,
    load_scores,
    load_selection,
    load_token_probs,
    write_embeddings,
    write_scores,
    write_selection,
    write_token_probs,
)


class TestEmbeddingFile:
    def test_single_row(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("EMB 1 2\n1.0 0.0\n")
        emb = load_embeddings(path)
        assert emb.n == 1 and emb.d == 2
        assert np.array_equal(emb.values, [[1.0, 0.0]])

    def test_row_length_mismatch(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("EMB 1 2\n1.0 0.0 2.0\n")
        with pytest.raises(FormatError, match=r"emb\.txt:2"):
            load_embeddings(path)

    def test_zero_row_named_line(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("EMB 2 2\n1 0\n0 0\n")
        with pytest.raises(FormatError, match=r":3: row 1 is all zeros"):
            load_embeddings(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("EMB 1 2\n1.0 inf\n")
        with pytest.raises(FormatError, match="finite"):
            load_embeddings(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("EMBED 1 2\n1.0 0.0\n")
        with pytest.raises(FormatError, match="header"):
            load_embeddings(path)

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        original = EmbeddingMatrix(rng.normal(size=(5, 4)))
        path = tmp_path / "emb.txt"
        write_embeddings(original, path)
        loaded = load_embeddings(path)
        assert np.array_equal(loaded.values, original.values)

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("# produced by a scorer\nEMB 1 2\n\n1.0 2.0\n")
        assert load_embeddings(path).n == 1


class TestScoreFile:
    def test_basic_parse(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("SCORES 2\n0 2.0 0.5\n1 4.0 0.25\n")
        table = load_scores(path)
        assert np.array_equal(table.ppl, [2.0, 4.0])
        assert np.array_equal(table.cot_loss, [0.5, 0.25])
        assert table.utility is None

    def test_rows_any_order(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("SCORES 2\n1 4.0 0.25\n0 2.0 0.5\n")
        assert np.array_equal(load_scores(path).ppl, [2.0, 4.0])

    def test_ppl_below_one(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("SCORES 1\n0 0.5 0.1\n")
        with pytest.raises(FormatError, match="ppl for id 0"):
            load_scores(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("SCORES 2\n0 2 0.1\n0 3 0.2\n")
        with pytest.raises(FormatError, match="duplicate id 0"):
            load_scores(path)

    def test_missing_id(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("SCORES 2\n1 2 0.1\n1 3 0.2\n")
        with pytest.raises(FormatError):
            load_scores(path)

    def test_mixed_utility_columns(self, tmp_path):
        path = tmp_path / "scores.txt"
        path.write_text("SCORES 2\n0 2 0.1 0.5\n1 3 0.2\n")
        with pytest.raises(FormatError, match="utility column"):
            load_scores(path)

    def test_round_trip_with_utility(self, tmp_path):
        rng = np.random.default_rng(11)
        table = ScoreTable(
            1.0 + rng.uniform(0, 5, size=6),
            rng.uniform(0, 2, size=6),
            rng.uniform(0, 1, size=6),
        )
        path = tmp_path / "scores.txt"
        write_scores(table, path)
        loaded = load_scores(path)
        assert np.array_equal(loaded.ppl, table.ppl)
        assert np.array_equal(loaded.cot_loss, table.cot_loss)
        assert np.array_equal(loaded.utility, table.utility)

    def test_empty_table(self, tmp_path):
        path = tmp_path / "scores.txt"
        write_scores(ScoreTable([], []), path)
        assert load_scores(path).n == 0


class TestTokenProbFile:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        records = [
            TokenProbRecord(
                int(rng.integers(0, 5)),
                int(rng.integers(0, 5)),
                rng.uniform(0.05, 1.0, size=t),
                rng.uniform(0.05, 1.0, size=t),
            )
            for t in (1, 3, 7)
        ]
        path = tmp_path / "probs.txt"
        write_token_probs(records, path)
        loaded = load_token_probs(path)
        assert len(loaded) == 3
        for a, b in zip(loaded, records):
            assert (a.i, a.j) == (b.i, b.j)
            assert np.array_equal(a.base_probs, b.base_probs)
            assert np.array_equal(a.cond_probs, b.cond_probs)

    def test_zero_probability_rejected(self, tmp_path):
        path = tmp_path / "probs.txt"
        path.write_text("PAIRPROBS 1\n0 1 2\n0.5 0\n0.5 0.5\n")
        with pytest.raises(FormatError, match=r"outside \(0, 1\]"):
            load_token_probs(path)

    def test_token_count_mismatch(self, tmp_path):
        path = tmp_path / "probs.txt"
        path.write_text("PAIRPROBS 1\n0 1 2\n0.5\n0.5 0.5\n")
        with pytest.raises(FormatError, match="expected T=2"):
            load_token_probs(path)


class TestSelectionFile:
    def test_empty_selection(self, tmp_path):
        path = tmp_path / "sel.txt"
        write_selection(SelectionResult("random", 0, (), (), 0.0, {"seed": 5}), path)
        loaded = load_selection(path)
        assert loaded.selected == () and loaded.objective == 0.0

    def test_order_preserved(self, tmp_path):
        path = tmp_path / "sel.txt"
        write_selection(SelectionResult("m", 2, (2, 0), (1.5, 0.5), 2.0), path)
        body = path.read_text().splitlines()
        assert body[2].startswith("2 ") and body[3].startswith("0 ")
        assert load_selection(path).selected == (2, 0)

    def test_round_trip_randomized(self, tmp_path):
        rng = np.random.default_rng(23)
        ids = tuple(int(i) for i in rng.permutation(20)[:6])
        gains = tuple(float(g) for g in rng.normal(size=6))
        original = SelectionResult(
            "greedy-facility-location",
            8,
            ids,
            gains,
            float(rng.normal()),
            {"variant": "facility-location", "eta": 0.1234567890123456, "seed": 42},
        )
        path = tmp_path / "sel.txt"
        write_selection(original, path)
        assert load_selection(path) == original

    def test_unwritable_path(self, tmp_path):
        result = SelectionResult("m", 0, (), (), 0.0)
        with pytest.raises(OSError):
            write_selection(result, tmp_path / "missing" / "sel.txt")
