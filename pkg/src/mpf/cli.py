"""Command-line entry point: ``mpf {project,evaluate,gridsearch,bench,synth,augment,convert-class-map}``."""
from __future__ import annotations

import argparse
import csv
import glob
import json
import math
import os
import platform
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import augment, bev, fusion, io, postprocess, spherical, synthetic
from .errors import MPFError
from .metrics import ConfusionMatrix, DistanceBinner, write_bins_csv, write_iou_csv
from .model import BEV, SPHERICAL, VIEWS, BevConfig, PostProcessConfig, SphericalConfig
from .segmenter import external_segment, oracle_segment
from .validation import check_extent

PROJECTORS = {SPHERICAL: spherical.project, BEV: bev.project}

THROUGHPUT_CAVEAT = (
    "Score-map production (the neural network) is excluded from all timings; "
    "published scans/sec figures include GPU inference and are not directly comparable."
)


class CommandError(MPFError):
    pass


# ---------------------------------------------------------------- plumbing

def find_scans(scan_dir) -> list:
    """Sorted ``(scan_id, path)`` pairs of the ``.bin`` files in ``scan_dir``."""
    if not os.path.isdir(scan_dir):
        raise CommandError(f"scan directory not found: {scan_dir}")
    paths = sorted(glob.glob(os.path.join(scan_dir, "*.bin")))
    return [(os.path.splitext(os.path.basename(p))[0], p) for p in paths]


def default_labels_dir(scan_dir):
    sibling = os.path.join(os.path.dirname(os.path.normpath(scan_dir)), "labels")
    return sibling if os.path.isdir(sibling) else None


def label_path(labels_dir, scan_id):
    path = os.path.join(labels_dir, scan_id + ".label")
    if not os.path.isfile(path):
        raise CommandError(f"missing label file: {path}")
    return path


def scores_path(scores_dir, scan_id):
    path = os.path.join(scores_dir, scan_id + ".mpfs")
    if not os.path.isfile(path):
        raise CommandError(f"missing score file: {path}")
    return path


def build_configs(args) -> dict:
    sph = SphericalConfig.from_degrees(args.height, args.width, args.fov_up_deg, args.fov_down_deg)
    bev_cfg = BevConfig(args.bev_size[0], args.bev_size[1], *check_extent(args.bev_extent))
    return {SPHERICAL: sph, BEV: bev_cfg}


def build_postprocess(args, sigma_sph=None, sigma_bev=None, metric=None) -> dict:
    sigma_sph = args.sigma if sigma_sph is None else sigma_sph
    if sigma_bev is None:
        sigma_bev = args.sigma if args.sigma_bev is None else args.sigma_bev
    metric = metric or args.metric
    return {
        SPHERICAL: PostProcessConfig(args.k, sigma_sph, metric, args.wrap),
        BEV: PostProcessConfig(args.k, sigma_bev, metric, False),
    }


def config_dict(cfg) -> dict:
    return {k: (v if not isinstance(v, float) else float(v)) for k, v in vars(cfg).items()}


def load_class_map(args):
    return io.load_class_map(args.class_map) if args.class_map else io.default_class_map()


def run_jobs(fn, tasks, jobs):
    """Map ``fn`` over ``tasks``; results come back in task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


# ---------------------------------------------------------------- project

def _project_scan(task):
    scan_id, path, out_dir, view, proj, labels_file, class_map, smoothing = task
    try:
        cloud = io.read_scan(path)
        img = PROJECTORS[view](cloud, proj)
        meta = {
            "scan": scan_id,
            "view": view,
            "height": img.shape[0],
            "width": img.shape[1],
            "channels": list(img.channels),
            "n_points": len(cloud),
            "n_valid": img.n_valid,
            "projection": config_dict(proj),
        }
        if labels_file is not None:
            labels = io.read_labels(labels_file, class_map, cloud)
            scores = oracle_segment(img, labels, smoothing)
            io.write_scores(os.path.join(out_dir, scan_id + ".mpfs"), scores)
            meta.update(scores=scan_id + ".mpfs", n_classes=scores.n_classes, smoothing=smoothing)
        with open(os.path.join(out_dir, scan_id + ".json"), "w") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")
        return meta
    except MPFError as e:
        raise CommandError(f"scan {scan_id}: {type(e).__name__}: {e}") from e


def cmd_project(args):
    scans = find_scans(args.scan_dir)
    proj = build_configs(args)[args.view]
    class_map = load_class_map(args)
    labels_dir = args.labels_dir or default_labels_dir(args.scan_dir)
    if args.oracle:
        if labels_dir is None:
            raise CommandError("--oracle needs label files; pass --labels-dir")
        label_files = [label_path(labels_dir, sid) for sid, _ in scans]
    else:
        label_files = [None] * len(scans)
    os.makedirs(args.out_dir, exist_ok=True)
    tasks = [(sid, p, args.out_dir, args.view, proj, lf, class_map, args.smoothing)
             for (sid, p), lf in zip(scans, label_files)]
    metas = run_jobs(_project_scan, tasks, args.jobs)
    print(f"projected {len(metas)} scan(s) to {args.view} {proj.shape[0]}x{proj.shape[1]} -> {args.out_dir}")
    return 0


# ---------------------------------------------------------------- evaluate / gridsearch

def _load_scan_inputs(scan_id, path, labels_dir, score_dirs, projections, class_map):
    cloud = io.read_scan(path)
    labels = io.read_labels(label_path(labels_dir, scan_id), class_map, cloud)
    images, score_maps = {}, {}
    for view, d in score_dirs.items():
        images[view] = PROJECTORS[view](cloud, projections[view])
        score_maps[view] = external_segment(images[view], scores_path(d, scan_id), class_map.n_classes)
    return cloud, labels, images, score_maps


def _evaluate_scan(task):
    scan_id, path, labels_dir, score_dirs, projections, post, class_map, ignore, bin_width = task
    try:
        cloud, labels, images, score_maps = _load_scan_inputs(
            scan_id, path, labels_dir, score_dirs, projections, class_map)
        n_classes = class_map.n_classes
        per_view = {
            v: postprocess.back_project(cloud, images[v], score_maps[v], post[v], projections[v])
            for v in score_dirs
        }
        results = {}
        named = dict(per_view)
        if len(per_view) > 1:
            named["fused"] = fusion.fuse(list(per_view.values()))
        for name, scores in named.items():
            pred = fusion.predict(scores, ignore)
            cm = ConfusionMatrix(n_classes, ignore).accumulate(pred, labels)
            binner = DistanceBinner(bin_width, n_classes, ignore).accumulate(cloud, pred, labels)
            results[name] = (cm, binner)
        return scan_id, results
    except MPFError as e:
        raise CommandError(f"scan {scan_id}: {type(e).__name__}: {e}") from e


def _score_dirs(args) -> dict:
    dirs = {}
    if args.scores_spherical:
        dirs[SPHERICAL] = args.scores_spherical
    if args.scores_bev:
        dirs[BEV] = args.scores_bev
    if not dirs:
        raise CommandError("pass --scores-spherical and/or --scores-bev")
    return dirs


def _eval_setup(args):
    scans = find_scans(args.scan_dir)
    if not scans:
        raise CommandError(f"no .bin scans in {args.scan_dir}")
    labels_dir = args.labels_dir or default_labels_dir(args.scan_dir)
    if labels_dir is None:
        raise CommandError("no labels directory; pass --labels-dir")
    return scans, labels_dir, _score_dirs(args), build_configs(args), load_class_map(args)


def _summary(cm: ConfusionMatrix) -> dict:
    from .errors import AllUndefined

    try:
        miou = cm.miou()
    except AllUndefined:
        miou = None
    return {"miou": miou, "accuracy": cm.accuracy(), "points": cm.total}


def evaluate(args) -> dict:
    scans, labels_dir, score_dirs, projections, class_map = _eval_setup(args)
    post = build_postprocess(args)
    tasks = [(sid, p, labels_dir, score_dirs, projections, post, class_map, args.ignore_class, args.bin_width)
             for sid, p in scans]
    results = sorted(run_jobs(_evaluate_scan, tasks, args.jobs), key=lambda r: r[0])
    names = list(results[0][1])
    totals = {n: (ConfusionMatrix(class_map.n_classes, args.ignore_class),
                  DistanceBinner(args.bin_width, class_map.n_classes, args.ignore_class)) for n in names}
    per_scan = []
    for scan_id, res in results:
        row = {"scan": scan_id}
        for n, (cm, binner) in res.items():
            totals[n][0].merge(cm)
            totals[n][1].merge(binner)
            row[n] = cm.accuracy()
        per_scan.append(row)
    main_name = "fused" if "fused" in names else names[0]
    mode = "fused" if main_name == "fused" else f"single-view ({main_name})"
    return {
        "mode": mode,
        "views": list(score_dirs),
        "scans": len(results),
        "postprocess": {v: config_dict(post[v]) for v in score_dirs},
        "miou": _summary(totals[main_name][0])["miou"],
        "accuracy": totals[main_name][0].accuracy(),
        "by_prediction": {n: _summary(totals[n][0]) for n in names},
        "per_scan_accuracy": per_scan,
        "_totals": totals,
        "_main": main_name,
        "_class_names": class_map.class_names,
    }


def cmd_evaluate(args):
    report = evaluate(args)
    totals, main_name = report.pop("_totals"), report.pop("_main")
    class_names = report.pop("_class_names")
    os.makedirs(args.out, exist_ok=True)
    write_iou_csv(os.path.join(args.out, "iou.csv"), totals[main_name][0], class_names)
    for n, (cm, _) in totals.items():
        write_iou_csv(os.path.join(args.out, f"iou_{n}.csv"), cm, class_names)
    write_bins_csv(os.path.join(args.out, "bins.csv"), {n: b.bins() for n, (_, b) in totals.items()})
    with open(os.path.join(args.out, "report.json"), "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    print(f"mode: {report['mode']}")
    print(f"scans: {report['scans']}")
    for n, s in report["by_prediction"].items():
        print(f"{n:10s} mIoU={_fmt(s['miou'])} accuracy={_fmt(s['accuracy'])}")
    return 0


def _fmt(v):
    return "n/a" if v is None else f"{v:.6f}"


def _gridsearch_scan(task):
    scan_id, path, labels_dir, score_dirs, projections, args_k, wrap, sig_s, sig_b, metrics, class_map, ignore = task
    try:
        cloud, labels, images, score_maps = _load_scan_inputs(
            scan_id, path, labels_dir, score_dirs, projections, class_map)
        n_classes = class_map.n_classes
        cells = {}
        for metric in metrics:
            sph = {s: postprocess.back_project(cloud, images[SPHERICAL], score_maps[SPHERICAL],
                                               PostProcessConfig(args_k, s, metric, wrap), projections[SPHERICAL])
                   for s in sig_s}
            bv = {s: postprocess.back_project(cloud, images[BEV], score_maps[BEV],
                                              PostProcessConfig(args_k, s, metric, False), projections[BEV])
                  for s in sig_b}
            for s1 in sig_s:
                for s2 in sig_b:
                    pred = fusion.predict(fusion.fuse(sph[s1], bv[s2]), ignore)
                    cells[(metric, s1, s2)] = ConfusionMatrix(n_classes, ignore).accumulate(pred, labels)
        return scan_id, cells
    except MPFError as e:
        raise CommandError(f"scan {scan_id}: {type(e).__name__}: {e}") from e


def gridsearch(args) -> dict:
    """mIoU per ``(metric, sigma_spherical, sigma_bev)`` over all scans."""
    scans, labels_dir, score_dirs, projections, class_map = _eval_setup(args)
    if set(score_dirs) != {SPHERICAL, BEV}:
        raise CommandError("gridsearch needs both --scores-spherical and --scores-bev")
    tasks = [(sid, p, labels_dir, score_dirs, projections, args.k, args.wrap, args.sigmas_spherical,
              args.sigmas_bev, args.metrics, class_map, args.ignore_class) for sid, p in scans]
    results = sorted(run_jobs(_gridsearch_scan, tasks, args.jobs), key=lambda r: r[0])
    totals = {}
    for _, cells in results:
        for key, cm in cells.items():
            totals.setdefault(key, ConfusionMatrix(class_map.n_classes, args.ignore_class)).merge(cm)
    return {key: cm.miou() for key, cm in totals.items()}


def write_grid_csv(path, grid, sigmas_spherical, sigmas_bev, metrics):
    """One block per metric: rows are spherical sigmas, columns bird's-eye sigmas."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["metric", "sigma_spherical"] + [f"sigma_bev={s:g}" for s in sigmas_bev])
        for metric in metrics:
            for s1 in sigmas_spherical:
                w.writerow([metric, f"{s1:g}"] + [repr(grid[(metric, s1, s2)]) for s2 in sigmas_bev])


def read_grid_csv(path) -> dict:
    grid = {}
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    sig_b = [float(h.split("=", 1)[1]) for h in rows[0][2:]]
    for row in rows[1:]:
        for s2, v in zip(sig_b, row[2:]):
            grid[(row[0], float(row[1]), s2)] = float(v)
    return grid


def cmd_gridsearch(args):
    grid = gridsearch(args)
    out = args.out
    if os.path.dirname(out):
        os.makedirs(os.path.dirname(out), exist_ok=True)
    write_grid_csv(out, grid, args.sigmas_spherical, args.sigmas_bev, args.metrics)
    best = max(grid, key=grid.get)
    print(f"{len(grid)} cells -> {out}")
    print(f"best: metric={best[0]} sigma_spherical={best[1]:g} sigma_bev={best[2]:g} mIoU={grid[best]:.6f}")
    return 0


# ---------------------------------------------------------------- bench

STAGES = ("spherical_projection", "bev_projection", "postprocess_spherical", "postprocess_bev", "fusion", "end_to_end")


def _bench_inputs(args):
    """Clouds plus precomputed score maps (score production is not timed)."""
    projections = build_configs(args)
    if args.synthetic:
        pairs = [synthetic.make_scan(args.seed + i) for i in range(args.synthetic)]
    else:
        scans = find_scans(args.scan_dir)
        labels_dir = args.labels_dir or default_labels_dir(args.scan_dir)
        class_map = load_class_map(args)
        pairs = []
        for sid, p in scans:
            cloud = io.read_scan(p)
            lf = os.path.join(labels_dir, sid + ".label") if labels_dir else None
            labels = io.read_labels(lf, class_map, cloud) if lf and os.path.isfile(lf) else None
            pairs.append((cloud, labels))
    if len(pairs) < 10:
        raise CommandError(f"bench needs at least 10 scans, got {len(pairs)}")
    rng = np.random.default_rng(args.seed)
    inputs = []
    for cloud, labels in pairs:
        maps = {}
        for view in VIEWS:
            img = PROJECTORS[view](cloud, projections[view])
            if labels is not None:
                maps[view] = oracle_segment(img, labels)
            else:
                maps[view] = _random_scores(img, rng)
        inputs.append((cloud, maps))
    return inputs, projections


def _random_scores(img, rng, n_classes=20):
    from .model import ScoreMap

    s = rng.random(img.shape + (n_classes,))
    s /= s.sum(axis=2, keepdims=True)
    return ScoreMap(s.astype(np.float32) / s.astype(np.float32).sum(axis=2, keepdims=True), img.valid)


def _time_pass(inputs, projections, post, ignore) -> dict:
    t = dict.fromkeys(STAGES, 0.0)
    clock = time.perf_counter
    sph_cfg, bev_cfg = projections[SPHERICAL], projections[BEV]
    for cloud, maps in inputs:
        t0 = clock()
        si = spherical.project(cloud, sph_cfg)
        t1 = clock()
        bi = bev.project(cloud, bev_cfg)
        t2 = clock()
        ps = postprocess.back_project(cloud, si, maps[SPHERICAL], post[SPHERICAL], sph_cfg)
        t3 = clock()
        pb = postprocess.back_project(cloud, bi, maps[BEV], post[BEV], bev_cfg)
        t4 = clock()
        fusion.predict(fusion.fuse(ps, pb), ignore)
        t5 = clock()
        for name, dt in zip(STAGES, (t1 - t0, t2 - t1, t3 - t2, t4 - t3, t5 - t4)):
            t[name] += dt
    # end to end as one uninterrupted pass
    t0 = clock()
    for cloud, maps in inputs:
        si = spherical.project(cloud, sph_cfg)
        bi = bev.project(cloud, bev_cfg)
        ps = postprocess.back_project(cloud, si, maps[SPHERICAL], post[SPHERICAL], sph_cfg)
        pb = postprocess.back_project(cloud, bi, maps[BEV], post[BEV], bev_cfg)
        fusion.predict(fusion.fuse(ps, pb), ignore)
    t["end_to_end"] = clock() - t0
    return t


def _bench_worker(task):
    args_ns, chunk = task
    inputs, projections = _bench_inputs(args_ns)
    inputs = [inputs[i] for i in chunk]
    post = build_postprocess(args_ns)
    _time_pass(inputs[:1], projections, post, args_ns.ignore_class)
    return _time_pass(inputs, projections, post, args_ns.ignore_class)["end_to_end"]


def bench(args) -> dict:
    inputs, projections = _bench_inputs(args)
    post = build_postprocess(args)
    n = len(inputs)
    for _ in range(args.warmup):
        _time_pass(inputs, projections, post, args.ignore_class)
    reps = [_time_pass(inputs, projections, post, args.ignore_class) for _ in range(args.repetitions)]
    rates = {s: [n / r[s] for r in reps] for s in STAGES}
    report = {
        "caveat": THROUGHPUT_CAVEAT,
        "scans": n,
        "repetitions": args.repetitions,
        "warmup": args.warmup,
        "points_per_scan": float(np.mean([len(c) for c, _ in inputs])),
        "spherical": [projections[SPHERICAL].height, projections[SPHERICAL].width],
        "bev": [projections[BEV].rows, projections[BEV].cols],
        "machine": {"platform": platform.platform(), "cpus": os.cpu_count()},
        "scans_per_sec": {s: statistics.median(v) for s, v in rates.items()},
        "scans_per_sec_all": rates,
    }
    if args.jobs > 1:
        chunks = [list(range(i, n, args.jobs)) for i in range(args.jobs)]
        per_rep = []
        for _ in range(max(args.repetitions, 1)):
            t0 = time.perf_counter()
            elapsed = run_jobs(_bench_worker, [(args, c) for c in chunks], args.jobs)
            wall = time.perf_counter() - t0
            per_rep.append(n / max(elapsed))
        report["parallel"] = {"jobs": args.jobs, "scans_per_sec": statistics.median(per_rep),
                              "note": "scans / slowest worker's timed loop; input loading excluded", "last_wall_s": wall}
    if args.baseline and os.path.isfile(args.baseline):
        report["regression"] = compare_to_baseline(report, args.baseline, args.tolerance)
    return report


def compare_to_baseline(report, baseline_path, tolerance=0.25) -> dict:
    with open(baseline_path) as f:
        base = json.load(f)["scans_per_sec"]
    out = {}
    for stage, ref in base.items():
        cur = report["scans_per_sec"].get(stage)
        if cur is None:
            continue
        ratio = cur / ref
        out[stage] = {"baseline": ref, "current": cur, "ratio": ratio,
                      "status": "ok" if abs(ratio - 1) <= tolerance else ("faster" if ratio > 1 else "REGRESSION")}
    return out


def cmd_bench(args):
    if not args.synthetic and not args.scan_dir:
        raise CommandError("pass a scan directory or --synthetic N")
    report = bench(args)
    print(f"# {report['caveat']}")
    print(f"# {report['scans']} scans, {report['points_per_scan']:.0f} points/scan, "
          f"median of {report['repetitions']} repetitions (warmup {report['warmup']})")
    for s in STAGES:
        print(f"{s:24s} {report['scans_per_sec'][s]:10.2f} scans/s")
    if "parallel" in report:
        print(f"{'end_to_end x' + str(args.jobs) + ' jobs':24s} {report['parallel']['scans_per_sec']:10.2f} scans/s")
    for stage, r in report.get("regression", {}).items():
        print(f"baseline {stage:24s} {r['ratio']:6.2f}x  {r['status']}")
    if args.out:
        with open(args.out, "w") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
    return 0


# ---------------------------------------------------------------- small utilities

def cmd_synth(args):
    seq_dir = synthetic.write_sequence(args.out_dir, args.n, args.sequence, args.seed)
    print(f"wrote {args.n} synthetic scan(s) to {seq_dir}")
    return 0


def cmd_augment(args):
    """Export augmented copies of scans (and their raw labels) in dataset layout."""
    scans = find_scans(args.scan_dir)
    labels_dir = args.labels_dir or default_labels_dir(args.scan_dir)
    os.makedirs(os.path.join(args.out_dir, "velodyne"), exist_ok=True)
    if labels_dir:
        os.makedirs(os.path.join(args.out_dir, "labels"), exist_ok=True)
    class_map = load_class_map(args)
    fn = augment.augment_cloud_spherical if args.view == SPHERICAL else augment.augment_cloud_bev
    for i, (sid, p) in enumerate(scans):
        rng = np.random.default_rng([args.seed, i])
        cloud = io.read_scan(p)
        labels = io.read_labels(label_path(labels_dir, sid), class_map, cloud) if labels_dir else None
        cloud2, _ = fn(cloud, labels, rng)
        io.write_scan(os.path.join(args.out_dir, "velodyne", sid + ".bin"), cloud2)
        if labels_dir:
            with open(label_path(labels_dir, sid), "rb") as src, \
                    open(os.path.join(args.out_dir, "labels", sid + ".label"), "wb") as dst:
                dst.write(src.read())
    print(f"augmented {len(scans)} scan(s) -> {args.out_dir}")
    return 0


def cmd_convert_class_map(args):
    text = io.class_map_from_yaml(args.yaml)
    io.parse_class_map(text)
    with open(args.out, "w") as f:
        f.write(text)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("projection")
    g.add_argument("--width", type=int, default=2048, help="spherical image width")
    g.add_argument("--height", type=int, default=64, help="spherical image height")
    g.add_argument("--fov-up-deg", type=float, default=3.0)
    g.add_argument("--fov-down-deg", type=float, default=25.0)
    g.add_argument("--bev-extent", type=float, nargs="+", default=[50.0], metavar="M",
                   help="E for [-E, E]^2, or x_min x_max y_min y_max (meters)")
    g.add_argument("--bev-size", type=int, nargs=2, default=[256, 256], metavar=("ROWS", "COLS"))
    g = p.add_argument_group("post-processing")
    g.add_argument("--k", type=int, default=3, help="window size (odd)")
    g.add_argument("--sigma", type=float, default=1.0)
    g.add_argument("--sigma-bev", type=float, default=None, help="bird's-eye sigma (default: --sigma)")
    g.add_argument("--metric", choices=["euclidean", "manhattan"], default="manhattan")
    g.add_argument("--wrap", action="store_true", help="let spherical windows wrap across the image seam")
    g = p.add_argument_group("general")
    g.add_argument("--ignore-class", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--class-map", default=None, help="class-map text file (default: SemanticKITTI)")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--labels-dir", default=None, help="default: ../labels next to the scan directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project scans; with --oracle also write MPFS score maps")
    p.add_argument("scan_dir")
    p.add_argument("out_dir")
    p.add_argument("--view", choices=VIEWS, default=SPHERICAL)
    p.add_argument("--oracle", action="store_true", help="write ground-truth score maps")
    p.add_argument("--smoothing", type=float, default=0.0, help="oracle label smoothing")
    _common(p)
    p.set_defaults(func=cmd_project)

    for name, func, helptext in (
        ("evaluate", cmd_evaluate, "back-project, fuse and score against labels"),
        ("gridsearch", cmd_gridsearch, "mIoU over a sigma x sigma x metric grid"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("scan_dir")
        p.add_argument("--scores-spherical", default=None)
        p.add_argument("--scores-bev", default=None)
        _common(p)
        p.set_defaults(func=func)
        if name == "evaluate":
            p.add_argument("--out", required=True, help="report directory")
            p.add_argument("--bin-width", type=float, default=10.0)
        else:
            p.add_argument("--out", required=True, help="grid CSV path")
            p.add_argument("--sigmas-spherical", type=float, nargs="+", default=[0.5, 1.0, 2.0])
            p.add_argument("--sigmas-bev", type=float, nargs="+", default=[0.5, 1.0, 2.0])
            p.add_argument("--metrics", nargs="+", choices=["euclidean", "manhattan"],
                           default=["euclidean", "manhattan"])

    p = sub.add_parser("bench", help="throughput of projection, voting and fusion")
    p.add_argument("scan_dir", nargs="?")
    p.add_argument("--synthetic", type=int, default=0, metavar="N", help="benchmark N synthetic scans")
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--baseline", default=None, help="baseline JSON to compare against")
    p.add_argument("--tolerance", type=float, default=0.25)
    p.add_argument("--out", default=None, help="write the report as JSON")
    _common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write synthetic labelled scans in dataset layout")
    p.add_argument("out_dir")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--sequence", default="08")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("augment", help="export augmented scans")
    p.add_argument("scan_dir")
    p.add_argument("out_dir")
    p.add_argument("--view", choices=VIEWS, default=SPHERICAL)
    _common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("convert-class-map", help="semantic-kitti.yaml -> class-map text file")
    p.add_argument("yaml")
    p.add_argument("out")
    p.set_defaults(func=cmd_convert_class_map)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MPFError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
