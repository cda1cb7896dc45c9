import json
import time

import pytest

from crisisnet.cli import main

from _synth import make_corpus


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    tweets, edges = make_corpus(d, n_users=250, n_edges=2500, seed=3)
    return d, tweets, edges


@pytest.fixture(scope="module")
def ingested(corpus):
    d, tweets, edges = corpus
    out = d / "base"
    assert run("ingest", "--tweets", tweets, "--out", out) == 0
    return out / "activity.csv", edges


def _read(path):
    return path.read_bytes()


class TestIngest:
    def test_stats_match_hand_count(self, tmp_path):
        tweets = tmp_path / "t.jsonl"
        rows = [
            {"user_id": "u1", "text": "sandy one", "lang": "en"},
            {"user_id": "u1", "text": "sandy two", "lang": "en"},
            {"user_id": "u2", "text": "sandy", "lang": "en"},
            {"user_id": "u3", "text": "no keyword", "lang": "en"},
            {"user_id": "u4", "text": "sandy", "lang": "de"},
        ]
        tweets.write_text("\n".join(json.dumps(r) for r in rows) + "\nnot json\n")
        out = tmp_path / "out"
        assert run("ingest", "--tweets", tweets, "--out", out) == 0
        stats = json.loads((out / "ingest_stats.json").read_text())
        assert stats["parsed"] == 5
        assert stats["skipped"] == 1
        assert stats["relevant_tweets"] == 3
        assert stats["users"] == 2
        activity = (out / "activity.csv").read_text().splitlines()
        assert activity == ["user_id,af", "u1,2", "u2,1"]

    def test_missing_file_is_input_error(self, tmp_path, capsys):
        rc = run("ingest", "--tweets", tmp_path / "absent.jsonl", "--out", tmp_path)
        assert rc == 2
        assert "absent.jsonl" in capsys.readouterr().err

    def test_writes_manifest(self, corpus, tmp_path):
        d, tweets, edges = corpus
        out = tmp_path / "m"
        assert run("ingest", "--tweets", tweets, "--out", out) == 0
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["command"] == "ingest"
        assert doc["config_hash"]
        assert [s["name"] for s in doc["stages"]] == ["ingest"]
        assert all(s["wall_seconds"] >= 0 for s in doc["stages"])
        # inputs maps path -> sha256 checksum
        assert any(p.endswith("tweets.jsonl") for p in doc["inputs"])
        assert all(len(h) == 64 for h in doc["inputs"].values())


class TestSweep:
    def test_single_threshold_single_row(self, ingested, tmp_path):
        activity, edges = ingested
        out = tmp_path / "s1"
        assert run("sweep", "--activity", activity, "--edges", edges,
                   "--thresholds", "2", "--out", out) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert len(lines) == 2
        assert (out / "sweep.png").exists()

    def test_monotone_and_rerun_identical(self, ingested, tmp_path):
        activity, edges = ingested
        out1, out2 = tmp_path / "a", tmp_path / "b"
        args = ("sweep", "--activity", activity, "--edges", edges,
                "--thresholds", "1,2,5,10,20,50")
        assert run(*args, "--out", out1) == 0
        assert run(*args, "--out", out2) == 0
        assert _read(out1 / "sweep.csv") == _read(out2 / "sweep.csv")
        rows = (out1 / "sweep.csv").read_text().splitlines()[1:]
        ns = [int(r.split(",")[1]) for r in rows]
        ms = [int(r.split(",")[2]) for r in rows]
        assert ns == sorted(ns, reverse=True)
        assert ms == sorted(ms, reverse=True)


@pytest.fixture(scope="module")
def analyzed(ingested, tmp_path_factory):
    activity, edges = ingested
    out = tmp_path_factory.mktemp("analyzed")
    started = time.perf_counter()
    rc = run("analyze", "--activity", activity, "--edges", edges,
             "--threshold", "2", "--out", out)
    elapsed = time.perf_counter() - started
    assert rc == 0
    return out, elapsed


class TestAnalyze:
    def test_completes_quickly(self, analyzed):
        _, elapsed = analyzed
        assert elapsed < 10.0

    def test_artifacts_present(self, analyzed):
        out, _ = analyzed
        for name in ("metrics.csv", "summary.json", "fit_report.json",
                     "regression.json", "ccdf_activity.csv", "ccdf_degree.csv",
                     "dist_activity.png", "dist_degree.png", "manifest.json"):
            assert (out / name).exists(), name

    def test_band_csv_next_to_figures(self, analyzed):
        out, _ = analyzed
        doc = json.loads((out / "regression.json").read_text())
        for reg, entry in doc["univariate"].items():
            if "error" in entry:
                continue
            assert (out / f"band_{reg}.csv").exists()
            assert (out / f"spreading_{reg}.png").exists()

    def test_metrics_header(self, analyzed):
        out, _ = analyzed
        from crisisnet.metrics import METRICS_COLUMNS

        assert (out / "metrics.csv").read_text().splitlines()[0] == METRICS_COLUMNS

    def test_summary_consistent_with_metrics(self, analyzed):
        out, _ = analyzed
        summary = json.loads((out / "summary.json").read_text())
        n_rows = len((out / "metrics.csv").read_text().splitlines()) - 1
        assert n_rows == summary["n_lcc"]

    def test_rerun_byte_identical(self, ingested, analyzed, tmp_path):
        activity, edges = ingested
        out1, _ = analyzed
        out2 = tmp_path / "again"
        assert run("analyze", "--activity", activity, "--edges", edges,
                   "--threshold", "2", "--out", out2) == 0
        for name in ("metrics.csv", "summary.json", "fit_report.json",
                     "regression.json", "ccdf_activity.csv"):
            assert _read(out1 / name) == _read(out2 / name), name

    def test_cache_reused(self, ingested, analyzed):
        out, _ = analyzed
        caches = list((out / "cache").glob("graph_*_t2.bin"))
        assert len(caches) == 1

    def test_empty_threshold_is_analysis_error(self, ingested, tmp_path, capsys):
        activity, edges = ingested
        rc = run("analyze", "--activity", activity, "--edges", edges,
                 "--threshold", "100000", "--out", tmp_path / "x")
        assert rc == 1
        assert "threshold" in capsys.readouterr().err

    def test_bad_betweenness_flag(self, ingested, tmp_path):
        activity, edges = ingested
        rc = run("analyze", "--activity", activity, "--edges", edges,
                 "--betweenness", "wrong", "--out", tmp_path / "x")
        assert rc == 2

    def test_sampled_betweenness_reproducible(self, ingested, tmp_path):
        activity, edges = ingested
        outs = []
        for name in ("s1", "s2"):
            out = tmp_path / name
            assert run("analyze", "--activity", activity, "--edges", edges,
                       "--threshold", "1", "--betweenness", "sampled:16",
                       "--seed", "5", "--out", out) == 0
            outs.append(_read(out / "metrics.csv"))
        assert outs[0] == outs[1]


class TestConfig:
    def test_flags_override_config(self, corpus, tmp_path):
        d, tweets, edges = corpus
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"keyword": "zzzqqq", "out": str(tmp_path / "ignored")}))
        out = tmp_path / "flagwin"
        assert run("ingest", "--config", config, "--tweets", tweets,
                   "--keyword", "sandy", "--out", out) == 0
        stats = json.loads((out / "ingest_stats.json").read_text())
        assert stats["relevant_tweets"] > 0
        assert not (tmp_path / "ignored").exists()

    def test_config_alone_applies(self, corpus, tmp_path):
        d, tweets, edges = corpus
        out = tmp_path / "cfgout"
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"keyword": "zzzqqq", "tweets": str(tweets),
                                      "out": str(out)}))
        assert run("ingest", "--config", config) == 0
        stats = json.loads((out / "ingest_stats.json").read_text())
        assert stats["users"] == 0  # config keyword applied, nothing matched

    def test_unknown_config_key_rejected(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"keyward": "oops"}))
        assert run("ingest", "--config", config) == 2


class TestOtherCommands:
    def test_fit_dist(self, ingested, tmp_path):
        activity, _ = ingested
        out = tmp_path / "fd"
        assert run("fit-dist", "--activity", activity, "--out", out) == 0
        rep = json.loads((out / "fit_report.json").read_text())
        assert "power_law" in rep["fits"]
        assert (out / "ccdf.csv").exists() and (out / "dist.png").exists()

    def test_regress_from_metrics(self, ingested, tmp_path):
        activity, edges = ingested
        base = tmp_path / "an"
        assert run("analyze", "--activity", activity, "--edges", edges,
                   "--threshold", "1", "--out", base) == 0
        out = tmp_path / "rg"
        assert run("regress", "--metrics", base / "metrics.csv",
                   "--censor", "1", "--out", out) == 0
        doc = json.loads((out / "regression.json").read_text())
        assert doc["censor"] == 1.0
        assert "tobit" in doc and "univariate" in doc

    def test_export_edges(self, ingested, tmp_path):
        activity, edges = ingested
        out = tmp_path / "ex"
        assert run("export-edges", "--activity", activity, "--edges", edges,
                   "--threshold", "2", "--out", out) == 0
        lines = (out / "edges_t2.csv").read_text().splitlines()
        assert lines[0] == "src,dst,src_af,dst_af"
        for row in lines[1:]:
            src, dst, saf, daf = row.split(",")
            assert src != dst
            assert int(saf) >= 2 and int(daf) >= 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("--version")
        assert exc.value.code == 0
        from crisisnet import __version__

        assert __version__ in capsys.readouterr().out
