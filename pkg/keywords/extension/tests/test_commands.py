import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from keywords.conftest import HOTEL_KEYWORDS
from keywords.extension.models import EvaluationRun
from keywords.extension.utils.manifest import RunManifest
from keywords.extension.utils.manifest import manifest_path

TEXAS = "the best hotel in texas"
TOKYO = "the best hotel of tokyo"


def run(*args):
    out = StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


def fails(*args):
    with pytest.raises(CommandError) as excinfo:
        run(*args)
    return excinfo.value


@pytest.fixture
def pairs_path(tmp_path):
    path = tmp_path / "train.tsv"
    path.write_text(
        "texas hotel\tthe best hotel in texas\n"
        "toronto hotel\tthe best hotel in toronto\n"
        "tokyo hotel\tthe best hotel of tokyo\n"
        "texas\tthe best hotel in texas\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def dataset_path(tmp_path):
    path = tmp_path / "test.tsv"
    path.write_text(f"hotel\t{TEXAS}\ttrap\nbest hotel\t{TEXAS} || {TOKYO}\tfork\n", encoding="utf-8")
    return path


def evaluate_args(paths, dataset, *extra):
    return (
        "evaluate",
        "--trie", str(paths["trie"]),
        "--scorer", str(paths["scorer"]),
        "--vocab", str(paths["vocab"]),
        "--dataset", str(dataset),
        *extra,
    )  # fmt: skip


class TestBuildVocab:
    def test_counts_tokens_and_writes_manifest(self, hotel_paths, tmp_path):
        out = tmp_path / "vocab.out"
        output = run("build_vocab", "--corpus", str(hotel_paths["keywords"]), "--out", str(out))
        assert "tokens: 11" in output
        assert out.read_text(encoding="utf-8").splitlines()[:3] == ["<s>", "</s>", "<unk>"]
        manifest = RunManifest.read(manifest_path(out))
        assert manifest.command == "build_vocab"
        assert set(manifest.inputs) == {"corpus_0"}

    def test_size_cap(self, hotel_paths, tmp_path):
        output = run("build_vocab", "--corpus", str(hotel_paths["keywords"]), "--max-size", "5", "--out", str(tmp_path / "v"))
        assert "tokens: 5" in output

    def test_missing_corpus(self, tmp_path):
        error = fails("build_vocab", "--corpus", str(tmp_path / "absent.txt"), "--out", str(tmp_path / "v"))
        assert error.returncode == 2
        assert "file not found" in str(error)


class TestBuildTrie:
    def test_duplicates_count_once(self, hotel_paths, tmp_path):
        keywords = tmp_path / "dupes.txt"
        keywords.write_text("\n".join([*HOTEL_KEYWORDS, HOTEL_KEYWORDS[0], ""]) + "\n", encoding="utf-8")
        out = tmp_path / "library.trie"
        output = run("build_trie", "--keywords", str(keywords), "--vocab", str(hotel_paths["vocab"]), "--out", str(out))
        assert "keywords: 3" in output
        assert out.read_bytes()[:4] == b"TRIE"
        assert set(RunManifest.read(manifest_path(out)).inputs) == {"keywords", "vocab"}

    def test_missing_keywords_file(self, hotel_paths, tmp_path):
        error = fails(
            "build_trie", "--keywords", str(tmp_path / "absent.txt"), "--vocab", str(hotel_paths["vocab"]), "--out", str(tmp_path / "t")
        )
        assert error.returncode == 2


class TestTrainScorer:
    def train(self, pairs, vocab, out, *extra):
        return run("train_scorer", "--pairs", str(pairs), "--vocab", str(vocab), "--out", str(out), *extra)

    def test_retraining_is_byte_identical(self, hotel_paths, pairs_path, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        output = self.train(pairs_path, hotel_paths["vocab"], first, "--order", "2", "--beta", "2")
        self.train(pairs_path, hotel_paths["vocab"], second, "--order", "2", "--beta", "2")
        assert "n-grams:" in output
        assert first.read_bytes() == second.read_bytes()

    def test_manifest_echoes_configuration(self, hotel_paths, pairs_path, tmp_path):
        out = tmp_path / "scorer.json"
        self.train(pairs_path, hotel_paths["vocab"], out, "--order", "2", "--beta", "2")
        config = RunManifest.read(manifest_path(out)).config
        assert config["markov_order"] == 2
        assert config["copy_bonus_beta"] == 2.0
        assert config["interpolation_weights"] == pytest.approx([0.2, 0.8])

    def test_explicit_weights(self, hotel_paths, pairs_path, tmp_path):
        out = tmp_path / "scorer.json"
        self.train(pairs_path, hotel_paths["vocab"], out, "--order", "2", "--weights", "0.5,0.5")
        assert json.loads(out.read_text(encoding="utf-8"))["config"]["interpolation_weights"] == [0.5, 0.5]

    def test_bad_weights(self, hotel_paths, pairs_path, tmp_path):
        error = fails(
            "train_scorer", "--pairs", str(pairs_path), "--vocab", str(hotel_paths["vocab"]),
            "--order", "2", "--weights", "0.7,0.7", "--out", str(tmp_path / "s.json"),
        )  # fmt: skip
        assert error.returncode == 2
        assert "sum to 1" in str(error)

    def test_empty_pairs(self, hotel_paths, tmp_path):
        empty = tmp_path / "empty.tsv"
        empty.write_text("", encoding="utf-8")
        error = fails("train_scorer", "--pairs", str(empty), "--vocab", str(hotel_paths["vocab"]), "--out", str(tmp_path / "s"))
        assert error.returncode == 2
        assert "empty training set" in str(error)


class TestExtend:
    def extend(self, paths, *extra):
        return run(
            "extend",
            "--trie", str(paths["trie"]),
            "--scorer", str(paths["scorer"]),
            "--vocab", str(paths["vocab"]),
            "--query", "hotel",
            *extra,
        )  # fmt: skip

    def test_lookahead_picks_the_likely_suffix(self, hotel_paths):
        lines = self.extend(hotel_paths, "--beam", "1", "--ngram", "2", "--lambda", "0.5").splitlines()
        score, keyword = lines[0].split("\t")
        assert keyword == TEXAS
        assert float(score) < 0

    def test_plain(self, hotel_paths):
        lines = self.extend(hotel_paths, "--beam", "1", "--ngram", "2", "--lambda", "0.5", "--plain").splitlines()
        assert lines[0].endswith(f"\t{TOKYO}")

    def test_wide_beam_lists_every_keyword(self, hotel_paths):
        lines = self.extend(hotel_paths, "--beam", "3", "--ngram", "2").splitlines()
        assert sorted(line.split("\t")[1] for line in lines) == sorted(HOTEL_KEYWORDS)

    def test_several_queries_keep_their_order(self, hotel_paths):
        single = self.extend(hotel_paths, "--beam", "1", "--ngram", "2", "--lambda", "0.5").splitlines()
        output = self.extend(
            hotel_paths, "--query", "best hotel", "--query", "hotel",
            "--beam", "1", "--ngram", "2", "--lambda", "0.5", "--workers", "2",
        )  # fmt: skip
        blocks = [block.splitlines() for block in output.strip().split("\n\n")]
        assert [block[0] for block in blocks] == ["[hotel]", "[best hotel]", "[hotel]"]
        assert blocks[0][1:] == blocks[2][1:] == single

    def test_lambda_out_of_range(self, hotel_paths):
        error = fails(
            "extend",
            "--trie", str(hotel_paths["trie"]),
            "--scorer", str(hotel_paths["scorer"]),
            "--vocab", str(hotel_paths["vocab"]),
            "--query", "hotel",
            "--lambda", "1.5",
        )  # fmt: skip
        assert error.returncode == 2
        assert "lambda must be in [0,1]" in str(error)

    def test_ngram_above_scorer_order(self, hotel_paths):
        error = fails(
            "extend",
            "--trie", str(hotel_paths["trie"]),
            "--scorer", str(hotel_paths["scorer"]),
            "--vocab", str(hotel_paths["vocab"]),
            "--query", "hotel",
            "--ngram", "3",
        )  # fmt: skip
        assert error.returncode == 2

    def test_vocabulary_from_trie_manifest(self, hotel_paths, tmp_path):
        trie = tmp_path / "built.trie"
        run("build_trie", "--keywords", str(hotel_paths["keywords"]), "--vocab", str(hotel_paths["vocab"]), "--out", str(trie))
        output = run(
            "extend", "--trie", str(trie), "--scorer", str(hotel_paths["scorer"]),
            "--query", "hotel", "--beam", "1", "--lambda", "0.5",
        )  # fmt: skip
        assert output.splitlines()[0].endswith(f"\t{TEXAS}")

    def test_no_vocabulary_anywhere(self, hotel_paths):
        error = fails("extend", "--trie", str(hotel_paths["trie"]), "--scorer", str(hotel_paths["scorer"]), "--query", "hotel")
        assert error.returncode == 2


class TestSynth:
    def write_spec(self, tmp_path, payload):
        path = tmp_path / "spec.json"
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
        return path

    def test_same_seed_same_files(self, tmp_path):
        spec = self.write_spec(tmp_path, {"queries": 15})
        run("synth", "--seed", "4", "--spec", str(spec), "--out-dir", str(tmp_path / "a"))
        output = run("synth", "--seed", "4", "--spec", str(spec), "--out-dir", str(tmp_path / "b"))
        assert "queries: 15" in output
        for name in ("keywords.txt", "train.tsv", "test.tsv", "vocab.txt"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        first = RunManifest.read(tmp_path / "a.manifest.json")
        second = RunManifest.read(tmp_path / "b.manifest.json")
        assert first.seed == 4
        assert first.comparable() == second.comparable()

    def test_malformed_spec(self, tmp_path):
        spec = self.write_spec(tmp_path, "{queries: 5")
        error = fails("synth", "--seed", "1", "--spec", str(spec), "--out-dir", str(tmp_path / "out"))
        assert error.returncode == 2
        assert "invalid JSON" in str(error)

    def test_zero_queries(self, tmp_path):
        spec = self.write_spec(tmp_path, {"queries": 0})
        error = fails("synth", "--seed", "1", "--spec", str(spec), "--out-dir", str(tmp_path / "out"))
        assert error.returncode == 2
        assert "queries" in str(error)


class TestEvaluate:
    def test_single_configuration_row(self, hotel_paths, dataset_path):
        output = run(*evaluate_args(hotel_paths, dataset_path, "--beams", "1,3", "--ngrams", "2", "--lambdas", "0.5"))
        assert "n=2 lambda=0.5" in output
        assert "R@1" in output
        assert "MAP@3" in output
        assert "[trap]" in output

    def test_baseline_and_merge_rows(self, hotel_paths, dataset_path):
        output = run(
            *evaluate_args(hotel_paths, dataset_path, "--beams", "1", "--ngrams", "2", "--lambdas", "1.0", "--bm25", "--merge")
        )
        assert "n=2 plain" in output
        assert "BM25" in output
        assert "Merged(n=2 plain + BM25)" in output

    def test_merge_needs_two_systems(self, hotel_paths, dataset_path):
        error = fails(*evaluate_args(hotel_paths, dataset_path, "--ngrams", "2", "--lambdas", "0.5", "--merge"))
        assert error.returncode == 2

    def test_golden_outside_library(self, hotel_paths, tmp_path):
        dataset = tmp_path / "bad.tsv"
        dataset.write_text(f"hotel\t{TEXAS}\nhotel\tthe best hotel in tokyo\n", encoding="utf-8")
        error = fails(*evaluate_args(hotel_paths, dataset, "--ngrams", "2"))
        assert error.returncode == 3
        assert "2" in str(error).rsplit(":", 1)[-1]

    def test_lambda_sweep_report(self, hotel_paths, dataset_path, tmp_path):
        report = tmp_path / "report.json"
        run(*evaluate_args(hotel_paths, dataset_path, "--beams", "1", "--ngrams", "1,2", "--lambdas", "0.5,1.0", "--report", str(report)))
        payload = json.loads(report.read_text(encoding="utf-8"))
        names = [system["name"] for system in payload["systems"]]
        assert names == ["n=1 plain", "n=2 lambda=0.5", "n=2 plain"]
        recall = {system["name"]: system["recall"]["1"] for system in payload["systems"]}
        assert recall["n=2 lambda=0.5"] > recall["n=2 plain"]
        assert manifest_path(report).is_file()

    @pytest.mark.django_db
    def test_record(self, hotel_paths, dataset_path):
        run(*evaluate_args(hotel_paths, dataset_path, "--beams", "1", "--ngrams", "2", "--record", "--name", "hotel"))
        evaluation = EvaluationRun.objects.get(name="hotel")
        assert evaluation.status == "completed"
        assert evaluation.query_count == 2
        assert [system["name"] for system in evaluation.report["systems"]] == ["n=2 lambda=0.4", "n=2 lambda=0.6", "n=2 lambda=0.8"]
        assert evaluation.processing_time is not None

    @pytest.mark.django_db
    def test_record_marks_the_run_running_before_decoding(self, hotel_paths, dataset_path, monkeypatch):
        seen = []
        mark_running = EvaluationRun.mark_running

        def spy(run):
            mark_running(run)
            seen.append(EvaluationRun.objects.get(pk=run.pk).status)

        monkeypatch.setattr(EvaluationRun, "mark_running", spy)
        run(*evaluate_args(hotel_paths, dataset_path, "--beams", "1", "--ngrams", "2", "--lambdas", "0.5", "--record"))
        assert seen == ["running"]
        assert EvaluationRun.objects.get().status == "completed"

    @pytest.mark.django_db
    def test_queue_records_every_cell(self, hotel_paths, dataset_path):
        output = run(
            *evaluate_args(hotel_paths, dataset_path, "--beams", "1", "--ngrams", "2", "--lambdas", "0.5,1.0", "--queue", "--record")
        )
        assert output.count("Queued") == 2
        evaluation = EvaluationRun.objects.get()
        assert evaluation.status == "completed"
        assert {system["name"] for system in evaluation.report["systems"]} == {"n=2 lambda=0.5", "n=2 plain"}


def test_lambda_sweep_on_a_synthetic_benchmark(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"queries": 40}), encoding="utf-8")
    data = tmp_path / "synth"
    run("synth", "--seed", "11", "--spec", str(spec), "--out-dir", str(data))
    trie, scorer, report = tmp_path / "library.trie", tmp_path / "scorer.json", tmp_path / "sweep.json"
    run("build_trie", "--keywords", str(data / "keywords.txt"), "--vocab", str(data / "vocab.txt"), "--out", str(trie))
    run("train_scorer", "--pairs", str(data / "train.tsv"), "--vocab", str(data / "vocab.txt"), "--beta", "3", "--out", str(scorer))

    output = run(
        "evaluate", "--trie", str(trie), "--scorer", str(scorer), "--dataset", str(data / "test.tsv"),
        "--beams", "1,5,10", "--ngrams", "3", "--lambdas", "0.4,0.6,0.8", "--workers", "2", "--report", str(report),
    )  # fmt: skip
    payload = json.loads(report.read_text(encoding="utf-8"))
    assert [system["name"] for system in payload["systems"]] == ["n=3 lambda=0.4", "n=3 lambda=0.6", "n=3 lambda=0.8"]
    for system in payload["systems"]:
        recall = [system["recall"][k] for k in ("1", "5", "10")]
        assert recall == sorted(recall)
        assert set(system["map"]) == {"1", "5", "10"}
    assert payload["table"] in output
