import hashlib
import json

import numpy as np
import pytest

from shapeqc.cli import main


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One small corpus driven through every command, shared by the tests."""
    root = tmp_path_factory.mktemp("pipe")
    corpus = root / "corpus"
    sampled = root / "sampled"
    features = root / "features.csv"
    split = root / "split.csv"
    models = root / "models"
    report = root / "report"
    shap = root / "shap"

    assert main(["synth", "--good", "16", "--bad", "16", "--seed", "5", "--out", str(corpus)]) == 0
    assert (
        main(
            [
                "sample",
                "--corpus",
                str(corpus),
                "--points",
                "600",
                "--seed",
                "5",
                "--out",
                str(sampled),
            ]
        )
        == 0
    )
    assert main(["featurize", "--corpus", str(sampled), "--out", str(features)]) == 0
    assert (
        main(
            [
                "split",
                "--features",
                str(features),
                "--fractions",
                "0.70,0.10,0.20",
                "--seed",
                "5",
                "--out",
                str(split),
            ]
        )
        == 0
    )
    assert (
        main(
            [
                "train",
                "--features",
                str(features),
                "--split",
                str(split),
                "--model",
                "all",
                "--seed",
                "5",
                "--out",
                str(models),
            ]
        )
        == 0
    )
    assert (
        main(
            [
                "eval",
                "--models",
                str(models),
                "--features",
                str(features),
                "--split",
                str(split),
                "--out",
                str(report),
            ]
        )
        == 0
    )
    assert (
        main(
            [
                "explain",
                "--model",
                str(models / "decision_tree.json"),
                "--features",
                str(features),
                "--split",
                str(split),
                "--background",
                "8",
                "--seed",
                "5",
                "--out",
                str(shap),
            ]
        )
        == 0
    )
    return {
        "root": root,
        "corpus": corpus,
        "sampled": sampled,
        "features": features,
        "split": split,
        "models": models,
        "report": report,
        "shap": shap,
    }


class TestPipelineOutputs:
    def test_corpus_layout(self, pipeline):
        assert (pipeline["corpus"] / "manifest.json").exists()
        meshes = list((pipeline["corpus"] / "meshes").glob("*.obj"))
        assert len(meshes) == 32

    def test_sampled_clouds(self, pipeline):
        clouds = list((pipeline["sampled"] / "clouds").glob("*.xyz"))
        assert len(clouds) == 32
        manifest = json.loads((pipeline["sampled"] / "manifest.json").read_text())
        assert all(item["cloud_path"] for item in manifest["items"])

    def test_features_rows(self, pipeline):
        lines = pipeline["features"].read_text().strip().splitlines()
        assert len(lines) == 33
        assert lines[0].startswith("id,label,min_x")

    def test_split_partition(self, pipeline):
        lines = pipeline["split"].read_text().strip().splitlines()[1:]
        names = [l.split(",")[1] for l in lines]
        assert len(lines) == 32
        assert names.count("train") == 23 and names.count("val") == 3 and names.count("test") == 6

    def test_models_written(self, pipeline):
        assert len(list(pipeline["models"].glob("*.json"))) == 11
        assert (pipeline["models"] / "run_manifest.json").exists()

    def test_report_files(self, pipeline):
        csv = (pipeline["report"] / "report.csv").read_text()
        assert csv.splitlines()[0] == "model,acc,f1,good_pct,bad_pct,kappa"
        assert len(csv.strip().splitlines()) == 12
        assert (pipeline["report"] / "report.txt").exists()
        assert (pipeline["report"] / "report.json").exists()

    def test_explain_files(self, pipeline):
        for name in ("attributions.csv", "summary.csv", "beeswarm.svg", "beeswarm.csv"):
            assert (pipeline["shap"] / name).exists()
        lines = (pipeline["shap"] / "attributions.csv").read_text().strip().splitlines()
        assert len(lines) == 7

    def test_every_command_writes_manifest(self, pipeline):
        for key in ("corpus", "sampled", "models", "report", "shap"):
            assert (pipeline[key] / "run_manifest.json").exists()
        assert (pipeline["root"] / "features.csv.run.json").exists()
        assert (pipeline["root"] / "split.csv.run.json").exists()


class TestReplay:
    @pytest.mark.parametrize(
        "manifest_key,artifacts",
        [
            ("corpus", ["manifest.json", "meshes/good_0000.obj"]),
            ("sampled", ["manifest.json", "clouds/good_0000.xyz"]),
            ("models", ["random_forest.json", "mlp.json", "svm.json"]),
            ("report", ["report.csv", "report.txt"]),
            ("shap", ["attributions.csv", "beeswarm.svg", "beeswarm.csv"]),
        ],
    )
    def test_byte_identical(self, pipeline, manifest_key, artifacts):
        base = pipeline[manifest_key]
        before = {a: digest(base / a) for a in artifacts}
        assert main(["replay", str(base / "run_manifest.json")]) == 0
        after = {a: digest(base / a) for a in artifacts}
        assert before == after

    def test_file_output_replay(self, pipeline):
        features = pipeline["features"]
        before = digest(features)
        assert main(["replay", str(features) + ".run.json"]) == 0
        assert digest(features) == before


class TestExitCodes:
    def test_usage_error_missing_out(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "--good", "1", "--bad", "1"])
        assert exc.value.code == 2

    def test_usage_error_bad_mix(self):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "--good", "1", "--bad", "1", "--mix", "dents=1", "--out", "x"])
        assert exc.value.code == 2

    def test_usage_error_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["polish"])
        assert exc.value.code == 2

    def test_runtime_error_missing_model(self, pipeline, tmp_path, capsys):
        code = main(
            [
                "explain",
                "--model",
                str(pipeline["models"] / "absent.json"),
                "--features",
                str(pipeline["features"]),
                "--out",
                str(tmp_path / "x"),
            ]
        )
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_split_ids_listed(self, pipeline, tmp_path, capsys):
        bad = tmp_path / "bad_split.csv"
        bad.write_text("id,split\nghost_a,train\nghost_b,test\n")
        code = main(
            [
                "train",
                "--features",
                str(pipeline["features"]),
                "--split",
                str(bad),
                "--out",
                str(tmp_path / "m"),
            ]
        )
        assert code == 1
        err = capsys.readouterr().err
        assert "ghost_a" in err and "ghost_b" in err

    def test_partial_failure_lists_and_exits_1(self, pipeline, tmp_path, capsys):
        good = pipeline["corpus"] / "meshes" / "good_0000.obj"
        broken = tmp_path / "broken.obj"
        broken.write_text("v 0 0 0\nf 1 2 3\n")
        out = tmp_path / "clouds_out"
        code = main(
            ["sample", str(good), str(broken), "--points", "40", "--out", str(out)]
        )
        assert code == 1
        assert "broken" in capsys.readouterr().err
        assert (out / "clouds" / "good_0000.xyz").exists()
        assert not (out / "clouds" / "broken.xyz").exists()

    def test_eval_reference_length_mismatch(self, pipeline, tmp_path, capsys):
        ref = tmp_path / "ref.csv"
        ref.write_text("id,label\ngood_0000,Good\n")
        code = main(
            [
                "eval",
                "--models",
                str(pipeline["models"]),
                "--features",
                str(pipeline["features"]),
                "--reference",
                str(ref),
                "--out",
                str(tmp_path / "r"),
            ]
        )
        assert code == 1


class TestGeneratedSetMode:
    def test_reference_eval(self, pipeline, tmp_path):
        lines = pipeline["features"].read_text().strip().splitlines()[1:]
        ids = [l.split(",")[0] for l in lines]
        ref = tmp_path / "ref.csv"
        ref.write_text("id,label\n" + "".join(f"{i},Good\n" for i in ids))
        out = tmp_path / "genrep"
        code = main(
            [
                "eval",
                "--models",
                str(pipeline["models"]),
                "--features",
                str(pipeline["features"]),
                "--reference",
                str(ref),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        csv = (out / "report.csv").read_text().strip().splitlines()
        assert csv[-1] == "reference,,,100.00,0.00,"

    def test_explain_specific_instances(self, pipeline, tmp_path):
        out = tmp_path / "inst"
        code = main(
            [
                "explain",
                "--model",
                str(pipeline["models"] / "lda.json"),
                "--features",
                str(pipeline["features"]),
                "--instances",
                "good_0000,bad_trunc_0000",
                "--background",
                "8",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        lines = (out / "attributions.csv").read_text().strip().splitlines()
        assert [l.split(",")[0] for l in lines[1:]] == ["good_0000", "bad_trunc_0000"]

    def test_explain_sampled_mode_recorded(self, pipeline, tmp_path):
        out = tmp_path / "perm"
        code = main(
            [
                "explain",
                "--model",
                str(pipeline["models"] / "lda.json"),
                "--features",
                str(pipeline["features"]),
                "--instances",
                "good_0001",
                "--permutations",
                "16",
                "--background",
                "8",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["config"]["permutations"] == 16
