"""Command line pipeline: synth, sample, featurize, split, train, eval, explain.

Every command resolves its options into a plain-dict config, runs, and writes
a run manifest next to its outputs; `shapeqc replay <manifest>` re-executes
the recorded config and reproduces the outputs byte for byte. Exit codes:
0 success, 1 runtime or data failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ._kernels import BACKEND
from .beeswarm import render_beeswarm
from .classifiers import DEFAULTS, KINDS, fit, load_model, predict_batch, save_model
from .corpus import (
    CorpusManifest,
    LabeledDataset,
    label_name,
    read_features_csv,
    read_reference_csv,
    read_split_csv,
    split_dataset,
    write_features_csv,
    write_split_csv,
)
from .errors import LengthMismatchError, ShapeQCError
from .explain import (
    DEFAULT_BACKGROUND,
    BackgroundSet,
    shapley_exact,
    shapley_sampled,
    summary_table,
    write_attributions_csv,
    write_summary_csv,
)
from .features import N_FEATURES, extract_features
from .manifest import RunManifest
from .mesh_io import load_mesh, load_point_cloud, save_point_cloud
from .metrics import AgreementReport, agreement_row, labels_from_predictions, prediction_rates
from .numeric import spawn_seeds, worker_count
from .sampler import SamplerConfig, sample_surface
from .synth import DEFAULT_DEFECT_MIX, write_corpus

_MIX_ALIASES = {
    "truncate": "truncate_inferior",
    "trunc": "truncate_inferior",
    "truncate_inferior": "truncate_inferior",
    "fragment": "fragment",
    "frag": "fragment",
    "spike": "spikes",
    "spikes": "spikes",
    "scale": "scale_anomaly",
    "scale_anomaly": "scale_anomaly",
    "slab": "slab_nonorgan",
    "slab_nonorgan": "slab_nonorgan",
}

_SPLIT_CHOICES = ("train", "val", "test", "all")


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive_int(text: str) -> int:
    v = _nonneg_int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _mix_arg(text: str) -> dict:
    """Parse 'truncate=0.4,fragment=0.3,...' into a defect-mix dict."""
    mix: dict[str, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        kind = _MIX_ALIASES.get(key.strip().lower())
        if not sep or kind is None:
            raise argparse.ArgumentTypeError(
                f"bad mix entry {part!r}; expected kind=weight with kind one of "
                f"{sorted(set(_MIX_ALIASES))}"
            )
        try:
            w = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad mix weight {value!r}") from None
        if w < 0:
            raise argparse.ArgumentTypeError(f"mix weight must be >= 0, got {w}")
        mix[kind] = mix.get(kind, 0.0) + w
    if not mix or sum(mix.values()) <= 0:
        raise argparse.ArgumentTypeError("defect mix needs at least one positive weight")
    return mix


def _fractions_arg(text: str) -> list:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected train,val,test fractions")
    try:
        fracs = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fractions {text!r}") from None
    return fracs


def _fail(message: str) -> int:
    print(f"shapeqc: error: {message}", file=sys.stderr)
    return 1


def _report_failures(failures: list) -> None:
    for item_id, message in failures:
        print(f"shapeqc: failed {item_id}: {message}", file=sys.stderr)


def _map_items(fn, items: list) -> list:
    """Apply fn to items, in parallel when more than one worker is allowed.

    Results come back in input order, so output files and CSV rows do not
    depend on scheduling.
    """
    workers = min(worker_count(), max(len(items), 1))
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _write_run_manifest(path, command: str, master_seed, inputs, outputs, config) -> None:
    RunManifest(
        command=command,
        master_seed=master_seed,
        inputs=inputs,
        outputs=outputs,
        config=config,
        backend=BACKEND,
    ).save(path)


# ---------------------------------------------------------------------------
# Runners. Each takes the resolved config dict (what the run manifest stores)
# and returns an exit code; replay calls these directly.


def _run_synth(cfg: dict) -> int:
    out = Path(cfg["out_dir"])
    manifest = write_corpus(
        out, cfg["n_good"], cfg["n_bad"], defect_mix=cfg["mix"], seed=cfg["seed"]
    )
    outputs = {
        "manifest": str(out / "manifest.json"),
        "meshes": [str(out / it.mesh_path) for it in manifest.items],
    }
    _write_run_manifest(
        out / "run_manifest.json", "synth", cfg["seed"], {}, outputs, cfg
    )
    print(f"wrote {len(manifest.items)} meshes under {out}")
    return 0


def _run_sample(cfg: dict) -> int:
    out = Path(cfg["out_dir"])
    (out / "clouds").mkdir(parents=True, exist_ok=True)
    fmt = cfg["format"]

    if cfg["corpus_dir"] is not None:
        corpus_dir = Path(cfg["corpus_dir"])
        manifest = CorpusManifest.load(corpus_dir / "manifest.json")
        jobs = [
            (it.id, corpus_dir / it.mesh_path, it) for it in manifest.items
        ]
    else:
        paths = [Path(p) for p in cfg["meshes"]]
        stems = [p.stem for p in paths]
        dup = {s for s in stems if stems.count(s) > 1}
        if dup:
            return _fail(f"duplicate mesh ids from file stems: {sorted(dup)}")
        jobs = [(stem, path, None) for stem, path in zip(stems, paths)]

    seeds = spawn_seeds(cfg["seed"], len(jobs))

    def one(arg):
        (item_id, mesh_path, item), item_seed = arg
        try:
            mesh = load_mesh(mesh_path)
            cloud = sample_surface(mesh, SamplerConfig(cfg["points"], item_seed))
            rel = f"clouds/{item_id}.{fmt}"
            save_point_cloud(cloud, out / rel, format=fmt)
            return item, rel, None
        except (ShapeQCError, OSError) as exc:
            return item, None, (item_id, str(exc))

    results = _map_items(one, list(zip(jobs, seeds)))
    failures = [err for _, _, err in results if err is not None]

    outputs: dict = {"clouds": [str(out / rel) for _, rel, err in results if err is None]}
    if cfg["corpus_dir"] is not None:
        kept = tuple(
            dataclasses.replace(item, cloud_path=rel)
            for item, rel, err in results
            if err is None
        )
        sampled = CorpusManifest(cfg["seed"], kept)
        sampled.save(out / "manifest.json")
        outputs["manifest"] = str(out / "manifest.json")

    _write_run_manifest(
        out / "run_manifest.json",
        "sample",
        cfg["seed"],
        {"corpus_dir": cfg["corpus_dir"], "meshes": cfg["meshes"]},
        outputs,
        cfg,
    )
    _report_failures(failures)
    print(f"sampled {len(results) - len(failures)}/{len(results)} clouds under {out}")
    return 1 if failures else 0


def _run_featurize(cfg: dict) -> int:
    out = Path(cfg["out_csv"])
    out.parent.mkdir(parents=True, exist_ok=True)

    if cfg["corpus_dir"] is not None:
        corpus_dir = Path(cfg["corpus_dir"])
        manifest = CorpusManifest.load(corpus_dir / "manifest.json")
        jobs = []
        failures: list = []
        for it in manifest.items:
            if it.cloud_path is None:
                failures.append((it.id, "manifest item has no cloud_path; run sample first"))
            else:
                jobs.append((it.id, corpus_dir / it.cloud_path, int(it.label)))
    else:
        paths = [Path(p) for p in cfg["clouds"]]
        stems = [p.stem for p in paths]
        dup = {s for s in stems if stems.count(s) > 1}
        if dup:
            return _fail(f"duplicate cloud ids from file stems: {sorted(dup)}")
        jobs = [(stem, path, -1) for stem, path in zip(stems, paths)]
        failures = []

    def one(job):
        item_id, cloud_path, label = job
        try:
            cloud = load_point_cloud(cloud_path)
            return item_id, extract_features(cloud), label, None
        except (ShapeQCError, OSError) as exc:
            return item_id, None, label, (item_id, str(exc))

    results = _map_items(one, jobs)
    failures.extend(err for _, _, _, err in results if err is not None)
    kept = [(i, fv, lab) for i, fv, lab, err in results if err is None]

    ds = LabeledDataset(
        tuple(i for i, _, _ in kept),
        np.asarray([fv.values for _, fv, _ in kept], dtype=np.float64).reshape(
            len(kept), N_FEATURES
        ),
        np.asarray([lab for _, _, lab in kept], dtype=np.int64),
    )
    write_features_csv(ds, out)

    _write_run_manifest(
        Path(str(out) + ".run.json"),
        "featurize",
        None,
        {"corpus_dir": cfg["corpus_dir"], "clouds": cfg["clouds"]},
        {"features_csv": str(out)},
        cfg,
    )
    _report_failures(failures)
    print(f"wrote {ds.n} feature rows to {out}")
    return 1 if failures else 0


def _run_split(cfg: dict) -> int:
    ds = read_features_csv(cfg["features_csv"])
    ds = split_dataset(ds, tuple(cfg["fractions"]), seed=cfg["seed"])
    out = Path(cfg["out_csv"])
    out.parent.mkdir(parents=True, exist_ok=True)
    write_split_csv(ds, out)
    _write_run_manifest(
        Path(str(out) + ".run.json"),
        "split",
        cfg["seed"],
        {"features_csv": cfg["features_csv"]},
        {"split_csv": str(out)},
        cfg,
    )
    sizes = {name: sum(1 for s in ds.split.values() if s == name) for name in ("train", "val", "test")}
    print(f"split {ds.n} rows: {sizes['train']} train / {sizes['val']} val / {sizes['test']} test")
    return 0


def _apply_split(ds: LabeledDataset, split_csv) -> LabeledDataset:
    split = read_split_csv(split_csv)
    unknown = sorted(set(split) - set(ds.ids))
    missing = sorted(set(ds.ids) - set(split))
    if unknown:
        raise LengthMismatchError(f"split references unknown ids: {unknown}")
    if missing:
        raise LengthMismatchError(f"split omits ids: {missing}")
    return ds.with_split(split)


def _run_train(cfg: dict) -> int:
    ds = _apply_split(read_features_csv(cfg["features_csv"]), cfg["split_csv"])
    train = ds.subset("train")
    unlabeled = [i for i, lab in zip(train.ids, train.y) if lab < 0]
    if unlabeled:
        return _fail(f"training rows without labels: {unlabeled}")

    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    kinds = list(KINDS) if cfg["model"] == "all" else [cfg["model"]]
    outputs = {}
    for kind in kinds:
        model = fit(kind, train.X, train.y, seed=cfg["seed"])
        path = out / f"{kind}.json"
        save_model(model, path)
        outputs[kind] = str(path)
        print(f"trained {kind} on {train.n} rows -> {path}")

    _write_run_manifest(
        out / "run_manifest.json",
        "train",
        cfg["seed"],
        {"features_csv": cfg["features_csv"], "split_csv": cfg["split_csv"]},
        outputs,
        cfg,
    )
    return 0


def _load_models(models_dir) -> list:
    """All model JSONs in a directory, ordered by (canonical kind, file name)."""
    models_dir = Path(models_dir)
    paths = sorted(p for p in models_dir.glob("*.json") if p.name != "run_manifest.json")
    if not paths:
        raise ShapeQCError(f"no model files found in {models_dir}")
    loaded = [(p.stem, load_model(p)) for p in paths]
    loaded.sort(key=lambda nm: (KINDS.index(nm[1].kind), nm[0]))
    return loaded


def _run_eval(cfg: dict) -> int:
    ds = read_features_csv(cfg["features_csv"])
    if cfg["reference_csv"] is not None:
        ref_ids, ref_labels = read_reference_csv(cfg["reference_csv"])
        if len(ref_ids) != ds.n:
            raise LengthMismatchError(
                f"reference has {len(ref_ids)} rows, features have {ds.n}"
            )
        unknown = sorted(set(ref_ids) - set(ds.ids))
        if unknown:
            raise LengthMismatchError(f"reference references unknown ids: {unknown}")
        by_id = dict(zip(ref_ids, ref_labels))
        reference = [by_id[i] for i in ds.ids]
        eval_ds = ds
    else:
        if cfg["split_csv"] is None:
            return _fail("eval needs either --split (test mode) or --reference")
        eval_ds = _apply_split(ds, cfg["split_csv"]).subset("test")
        unlabeled = [i for i, lab in zip(eval_ds.ids, eval_ds.y) if lab < 0]
        if unlabeled:
            return _fail(f"test rows without labels: {unlabeled}")
        reference = [int(v) for v in eval_ds.y]

    rows = []
    for name, model in _load_models(cfg["models_dir"]):
        preds = labels_from_predictions(predict_batch(model, eval_ds.X))
        rows.append(agreement_row(name, reference, preds))
    report = AgreementReport(tuple(rows), prediction_rates(reference))

    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    print(report.to_text(), end="")

    _write_run_manifest(
        out / "run_manifest.json",
        "eval",
        None,
        {
            "models_dir": cfg["models_dir"],
            "features_csv": cfg["features_csv"],
            "split_csv": cfg["split_csv"],
            "reference_csv": cfg["reference_csv"],
        },
        {
            "report_csv": str(out / "report.csv"),
            "report_json": str(out / "report.json"),
            "report_txt": str(out / "report.txt"),
        },
        cfg,
    )
    return 0


def _run_explain(cfg: dict) -> int:
    model = load_model(cfg["model_file"])
    ds = read_features_csv(cfg["features_csv"])
    if cfg["split_csv"] is not None:
        ds = _apply_split(ds, cfg["split_csv"])

    spec = cfg["instances"]
    if spec in ("train", "val", "test"):
        if ds.split is None:
            return _fail(f"--instances {spec} needs --split")
        inst = ds.subset(spec)
    elif spec == "all":
        inst = LabeledDataset(ds.ids, ds.X, ds.y)
    else:
        wanted = [s.strip() for s in spec.split(",") if s.strip()]
        unknown = sorted(set(wanted) - set(ds.ids))
        if unknown:
            return _fail(f"unknown instance ids: {unknown}")
        index = {i: k for k, i in enumerate(ds.ids)}
        keep = [index[i] for i in wanted]
        inst = LabeledDataset(tuple(wanted), ds.X[keep], ds.y[keep])
    if inst.n == 0:
        return _fail("no instances selected to explain")

    bg_pool = ds.subset("train") if ds.split is not None else ds
    bg_seed, perm_root = spawn_seeds(cfg["seed"], 2)
    bg = BackgroundSet.from_rows(bg_pool.X, n=cfg["background"], seed=bg_seed)

    if cfg["permutations"] is None:
        attrs = [
            shapley_exact(model, inst.X[i], bg, instance_id=inst.ids[i])
            for i in range(inst.n)
        ]
    else:
        inst_seeds = spawn_seeds(perm_root, inst.n)
        attrs = [
            shapley_sampled(
                model,
                inst.X[i],
                bg,
                cfg["permutations"],
                seed=inst_seeds[i],
                instance_id=inst.ids[i],
            )
            for i in range(inst.n)
        ]

    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    write_attributions_csv(attrs, out / "attributions.csv")
    summary = summary_table(attrs, [inst.X[i] for i in range(inst.n)])
    write_summary_csv(summary, out / "summary.csv")
    render_beeswarm(summary, out / "beeswarm.svg")

    _write_run_manifest(
        out / "run_manifest.json",
        "explain",
        cfg["seed"],
        {
            "model_file": cfg["model_file"],
            "features_csv": cfg["features_csv"],
            "split_csv": cfg["split_csv"],
        },
        {
            "attributions_csv": str(out / "attributions.csv"),
            "summary_csv": str(out / "summary.csv"),
            "beeswarm_svg": str(out / "beeswarm.svg"),
            "beeswarm_csv": str(out / "beeswarm.csv"),
        },
        cfg,
    )
    mode = "exact" if cfg["permutations"] is None else f"{cfg['permutations']} permutations"
    print(f"explained {inst.n} instances ({mode}, background {bg.size}) -> {out}")
    return 0


_RUNNERS = {
    "synth": _run_synth,
    "sample": _run_sample,
    "featurize": _run_featurize,
    "split": _run_split,
    "train": _run_train,
    "eval": _run_eval,
    "explain": _run_explain,
}


def _run_replay(cfg: dict) -> int:
    manifest = RunManifest.load(cfg["manifest"])
    runner = _RUNNERS.get(manifest.command)
    if runner is None:
        return _fail(f"manifest names unknown command {manifest.command!r}")
    return runner(manifest.config)


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapeqc",
        description="Shape quality assessment for organ point clouds.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("synth", help="generate a synthetic labeled mesh corpus")
    p.add_argument("--good", type=_nonneg_int, required=True, help="number of Good shapes")
    p.add_argument("--bad", type=_nonneg_int, required=True, help="number of Bad shapes")
    p.add_argument(
        "--mix",
        type=_mix_arg,
        default=None,
        help="defect mix, e.g. truncate=0.4,fragment=0.3,spikes=0.15,scale=0.15",
    )
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--out", required=True, help="output corpus directory")

    p = sub.add_parser("sample", help="sample surface point clouds from meshes")
    p.add_argument("meshes", nargs="*", help="mesh files (omit when using --corpus)")
    p.add_argument("--corpus", default=None, help="corpus directory with manifest.json")
    p.add_argument("--points", type=_positive_int, default=20000)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--format", choices=("xyz", "csv", "ply"), default="xyz")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("featurize", help="extract 14-value feature rows from clouds")
    p.add_argument("clouds", nargs="*", help="cloud files (omit when using --corpus)")
    p.add_argument("--corpus", default=None, help="sampled corpus directory with manifest.json")
    p.add_argument("--out", required=True, help="output features CSV path")

    p = sub.add_parser("split", help="assign stratified train/val/test splits")
    p.add_argument("--features", required=True, help="features CSV")
    p.add_argument(
        "--fractions",
        type=_fractions_arg,
        default=[0.80, 0.05, 0.15],
        help="train,val,test fractions (default 0.80,0.05,0.15)",
    )
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--out", required=True, help="output split CSV path")

    p = sub.add_parser("train", help="fit classifiers on the train split")
    p.add_argument("--features", required=True, help="features CSV")
    p.add_argument("--split", required=True, help="split CSV")
    p.add_argument("--model", choices=KINDS + ("all",), default="all")
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--out", required=True, help="output model directory")

    p = sub.add_parser("eval", help="score models against test labels or a reference rater")
    p.add_argument("--models", required=True, help="directory of trained model JSONs")
    p.add_argument("--features", required=True, help="features CSV")
    p.add_argument("--split", default=None, help="split CSV (test mode)")
    p.add_argument("--reference", default=None, help="reference rater CSV id,label (generated-set mode)")
    p.add_argument("--out", required=True, help="output report directory")

    p = sub.add_parser("explain", help="Shapley attributions plus beeswarm summary")
    p.add_argument("--model", required=True, help="trained model JSON")
    p.add_argument("--features", required=True, help="features CSV")
    p.add_argument("--split", default=None, help="split CSV")
    p.add_argument(
        "--instances",
        default=None,
        help="train|val|test|all or comma-separated ids (default: test with --split, else all)",
    )
    p.add_argument("--background", type=_positive_int, default=DEFAULT_BACKGROUND)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", help="exact enumeration (default)")
    group.add_argument("--permutations", type=_positive_int, default=None)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("replay", help="re-run a recorded command from its run manifest")
    p.add_argument("manifest", help="run manifest JSON written by a previous command")

    return parser


def _config_from_args(args: argparse.Namespace) -> dict:
    if args.command == "synth":
        mix = args.mix if args.mix is not None else dict(DEFAULT_DEFECT_MIX)
        return {
            "out_dir": args.out,
            "n_good": args.good,
            "n_bad": args.bad,
            "mix": mix,
            "seed": args.seed,
        }
    if args.command == "sample":
        return {
            "corpus_dir": args.corpus,
            "meshes": list(args.meshes),
            "points": args.points,
            "seed": args.seed,
            "format": args.format,
            "out_dir": args.out,
        }
    if args.command == "featurize":
        return {
            "corpus_dir": args.corpus,
            "clouds": list(args.clouds),
            "out_csv": args.out,
        }
    if args.command == "split":
        return {
            "features_csv": args.features,
            "fractions": list(args.fractions),
            "seed": args.seed,
            "out_csv": args.out,
        }
    if args.command == "train":
        return {
            "features_csv": args.features,
            "split_csv": args.split,
            "model": args.model,
            "seed": args.seed,
            "out_dir": args.out,
        }
    if args.command == "eval":
        return {
            "models_dir": args.models,
            "features_csv": args.features,
            "split_csv": args.split,
            "reference_csv": args.reference,
            "out_dir": args.out,
        }
    if args.command == "explain":
        instances = args.instances
        if instances is None:
            instances = "test" if args.split is not None else "all"
        return {
            "model_file": args.model,
            "features_csv": args.features,
            "split_csv": args.split,
            "instances": instances,
            "background": args.background,
            "permutations": args.permutations,
            "seed": args.seed,
            "out_dir": args.out,
        }
    return {"manifest": args.manifest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "sample":
        if (args.corpus is None) == (len(args.meshes) == 0):
            parser.error("sample needs either --corpus or mesh files, not both or neither")
    if args.command == "featurize":
        if (args.corpus is None) == (len(args.clouds) == 0):
            parser.error("featurize needs either --corpus or cloud files, not both or neither")

    cfg = _config_from_args(args)
    runner = _run_replay if args.command == "replay" else _RUNNERS[args.command]
    try:
        return runner(cfg)
    except (ShapeQCError, OSError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
