"""Command-line front end: ``tsdict <command> ...``.

Data goes to stdout or named files; progress and errors go to stderr.
The exit status is 0 only when every requested piece of work succeeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .bagging import Approx, BagConfig, Disc, bag_dataset, format_bags
from .botsw import BOTSW, BotswGrid
from .classifiers import VARIANTS, DictionaryClassifier, ParameterGrid, variant_config
from .data import generate_dictionary_data, read_ucr, read_ucr_split, stratified_resample, write_generated
from .evaluation import rank_report, read_results, write_results
from .persistence import load_model, save_model
from .pyramid import SpatialPyramidBOSS

log = logging.getLogger("tsdict")

OTHER_CLASSIFIERS = ("SP-HI", "SP-BD", "BOTSW", "BOTSW-HI")


class UsageError(Exception):
    pass


# -- helpers --------------------------------------------------------------------


def _grid(args) -> ParameterGrid:
    kw = {}
    if args.windows:
        kw["windows"] = tuple(args.windows)
    if args.word_lengths:
        kw["word_lengths"] = tuple(args.word_lengths)
    if args.alphas:
        kw["alphas"] = tuple(args.alphas)
    if args.min_window is not None:
        kw["min_window"] = args.min_window
    return ParameterGrid(**kw)


def canonical_name(name: str) -> str:
    key = name.replace("−", "-").strip().lower()
    for known in (*VARIANTS, *OTHER_CLASSIFIERS):
        if known.lower() == key:
            return known
    raise UsageError(f"unknown classifier {name!r}; choose from {', '.join((*VARIANTS, *OTHER_CLASSIFIERS))}")


def make_classifier(name: str, grid: ParameterGrid, threads: int = 1, max_ensemble=None, seed: int = 0):
    name = canonical_name(name)
    if name in VARIANTS:
        return DictionaryClassifier(variant_config(name, grid), max_ensemble=max_ensemble, n_jobs=threads)
    if name.startswith("SP-"):
        kw = {} if max_ensemble is None else {"max_ensemble": max_ensemble}
        return SpatialPyramidBOSS("hi" if name == "SP-HI" else "boss", grid, **kw)
    return BOTSW("hi" if name == "BOTSW-HI" else "boss", BotswGrid(), seed=seed)


def _test_path(train: Path) -> Path:
    name = train.name
    for a, b in (("_TRAIN", "_TEST"), ("_train", "_test"), ("TRAIN", "TEST")):
        if a in name:
            return train.with_name(name.replace(a, b))
    raise UsageError(f"{train}: cannot infer the test file (expected *_TRAIN.*)")


def resolve_datasets(paths) -> list[tuple[Path, Path]]:
    """TRAIN files, or directories searched for ``*_TRAIN.*``; test files sit beside them."""
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            found = sorted(q for q in p.rglob("*_TRAIN.*") if not q.name.endswith(".json"))
            if not found:
                raise UsageError(f"{p}: no *_TRAIN files found")
            out += [(q, _test_path(q)) for q in found]
        else:
            out.append((p, _test_path(p)))
    for tr, te in out:
        for f in (tr, te):
            if not f.exists():
                raise UsageError(f"{f}: no such file")
    return out


def _summary_params(model) -> str:
    members = getattr(model, "members_", [])
    info = {"n_members": len(members)}
    if members:
        info["best"] = members[0].params
    return json.dumps(info, sort_keys=True)


# -- commands -------------------------------------------------------------------


def cmd_bag(args) -> int:
    data = read_ucr(args.dataset)
    if args.window > data.series_length:
        raise ValueError(f"window exceeds series length ({args.window} > {data.series_length})")
    cfg = BagConfig(
        w=args.window, l=args.word_length, alpha=args.alpha, p=not args.keep_mean,
        approx=Approx(args.approx), disc=Disc(args.disc), numerosity=not args.no_numerosity,
    )
    bags, model = bag_dataset(data, cfg)
    text = format_bags(bags)
    if args.output:
        Path(args.output).write_text(text)
        if args.breakpoints and model is not None:
            Path(args.breakpoints).write_text(model.to_text())
    else:
        sys.stdout.write(text)
    return 0


def cmd_train(args) -> int:
    data = read_ucr(args.dataset)
    t0 = time.perf_counter()
    model = make_classifier(args.classifier, _grid(args), args.threads, args.max_ensemble, args.seed)
    model.fit(data)
    meta = dict(classifier=canonical_name(args.classifier), dataset=data.name, train_time_s=time.perf_counter() - t0)
    save_model(model, args.model, classes=data.classes, meta=meta)
    log.info("trained %s on %s: %d members in %.1fs", meta["classifier"], data.name, len(model.members_),
             meta["train_time_s"])
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    data = read_ucr(args.dataset, classes=model.classes or None)
    pred = model.predict(data.X)
    names = model.classes or tuple(str(i) for i in range(model.n_classes_))
    text = "".join(f"{names[p]}\n" for p in pred)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    log.info("accuracy %.4f on %d series", float(np.mean(pred == data.y)), len(data))
    return 0


def _done_cells(path: Path) -> set:
    if not path.exists() or path.stat().st_size == 0:
        return set()
    with open(path, newline="") as fh:
        return {(r["classifier"], r["dataset"], int(r["resample"])) for r in csv.DictReader(fh)}


def _run_cell(cell, grid, threads, max_ensemble):
    name, (tr_path, te_path), r, seed = cell
    train, test = read_ucr_split(tr_path, te_path)
    train, test = stratified_resample(train, test, seed)
    t0 = time.perf_counter()
    model = make_classifier(name, grid, threads, max_ensemble, seed)
    model.fit(train)
    elapsed = time.perf_counter() - t0
    acc = model.score(test.X, test.y)
    return dict(classifier=name, dataset=train.name, resample=r, accuracy=f"{acc:.6f}",
                train_time_s=f"{elapsed:.3f}", params=_summary_params(model))


def run_experiment(classifiers, datasets, resamples, seed_base, out, grid, threads=1, max_ensemble=None) -> int:
    """Run every (classifier, dataset, resample) cell not already in ``out``."""
    if resamples < 1:
        raise UsageError("resamples must be >= 1")
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    done = _done_cells(out)
    names = {}
    for tr, te in datasets:
        names[tr] = read_ucr(tr).name
    cells = [
        (c, ds, r, seed_base + r)
        for ds in datasets
        for c in classifiers
        for r in range(resamples)
        if (c, names[ds[0]], r) not in done
    ]
    log.info("%d cells to run (%d already done)", len(cells), len(done))
    # grid threads only when cells run one at a time, so total workers <= threads
    inner = threads if len(cells) <= 1 else 1
    status = 0

    def safe(cell):
        try:
            return _run_cell(cell, grid, inner, max_ensemble)
        except Exception as err:  # keep the sweep going
            return err

    accs: dict = {}
    with ThreadPoolExecutor(max_workers=max(1, min(threads, len(cells) or 1))) as pool:
        for cell, res in zip(cells, pool.map(safe, cells)):
            name, ds, r, _ = cell
            if isinstance(res, Exception):
                log.error("%s / %s / resample %d failed: %s", name, names[ds[0]], r, res)
                status = 1
                continue
            write_results([res], out)
            accs.setdefault((names[ds[0]], name), []).append(float(res["accuracy"]))
            log.info("%s / %s / resample %d: %s", name, res["dataset"], r, res["accuracy"])
    for (ds, name), vals in sorted(accs.items()):
        log.info("summary %s %s: mean accuracy %.4f over %d new resamples", ds, name, np.mean(vals), len(vals))
    return status


def cmd_experiment(args) -> int:
    classifiers = [canonical_name(c) for c in args.classifiers]
    return run_experiment(classifiers, resolve_datasets(args.datasets), args.resamples, args.seed_base,
                          args.output, _grid(args), args.threads, args.max_ensemble)


def cmd_ablation(args) -> int:
    names = list(VARIANTS)
    if args.variants:
        names = []
        for v in args.variants:
            c = canonical_name(v)
            if c not in VARIANTS:
                raise UsageError(f"{v!r} is not one of the ten ablation variants")
            names.append(c)
    return run_experiment(names, resolve_datasets(args.datasets), args.resamples, args.seed_base,
                          args.output, _grid(args), args.threads, args.max_ensemble)


def cmd_ranks(args) -> int:
    report = rank_report(read_results(args.results), args.alpha)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "ranks.csv").write_text(report.ranks_csv())
    (out / "friedman.json").write_text(report.friedman_text())
    (out / "pairwise_p.csv").write_text(report.pairwise_csv())
    (out / "cliques.txt").write_text(report.cliques_text())
    sys.stdout.write(report.cliques_text())
    return 0


def cmd_generate(args) -> int:
    data = generate_dictionary_data(
        args.n_per_class, args.length, tuple(args.counts), args.noise_std, args.seed, args.amplitude,
        args.shapelet_length,
    )
    write_generated(data, args.output)
    log.info("wrote %d series of length %d to %s", len(data), args.length, args.output)
    return 0


# -- parser -------------------------------------------------------------------


def _add_grid(p):
    g = p.add_argument_group("search grid")
    g.add_argument("--windows", type=int, nargs="+", help="window lengths (default: every length from --min-window)")
    g.add_argument("--min-window", type=int, help="smallest window when --windows is not given (default 10)")
    g.add_argument("--word-lengths", type=int, nargs="+", help="default 8 10 12 14 16")
    g.add_argument("--alphas", type=int, nargs="+", help="default 4")
    g.add_argument("--max-ensemble", type=int, help="cap on retained members")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--seed", type=int, default=0, help="k-means seed (BOTSW)")


def _add_sweep(p):
    p.add_argument("datasets", nargs="+", help="*_TRAIN files or directories holding them")
    p.add_argument("-o", "--output", required=True, help="results CSV (appended, resumable)")
    p.add_argument("--resamples", type=int, default=1)
    p.add_argument("--seed-base", type=int, default=0)
    _add_grid(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsdict", description="Dictionary-based time series classification.")
    ap.add_argument("--config", help="JSON file of option defaults; command-line flags override it")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bag", help="write the word histograms of a dataset")
    p.add_argument("dataset")
    p.add_argument("-w", "--window", type=int, required=True)
    p.add_argument("-l", "--word-length", type=int, required=True)
    p.add_argument("-a", "--alpha", type=int, default=4)
    p.add_argument("--approx", choices=[a.value for a in Approx], default="dft")
    p.add_argument("--disc", choices=[d.value for d in Disc], default="mcb")
    p.add_argument("--keep-mean", action="store_true", help="keep the first Fourier coefficient")
    p.add_argument("--no-numerosity", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--breakpoints", help="also write the fitted breakpoint table here")
    p.set_defaults(func=cmd_bag)

    p = sub.add_parser("train", help="fit a classifier and save it")
    p.add_argument("dataset")
    p.add_argument("-c", "--classifier", default="BOSS")
    p.add_argument("-m", "--model", required=True, help="output model directory")
    _add_grid(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict labels with a saved model")
    p.add_argument("model")
    p.add_argument("dataset")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", help="resampled train/test runs")
    p.add_argument("-c", "--classifiers", nargs="+", default=["BOSS"])
    _add_sweep(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("ablation", help="the ten BOP/BOSS component-swap variants")
    p.add_argument("--variants", nargs="+", help="subset of the ten variants")
    _add_sweep(p)
    p.set_defaults(func=cmd_ablation)

    p = sub.add_parser("ranks", help="average ranks, Friedman test and cliques")
    p.add_argument("results")
    p.add_argument("-o", "--output-dir", default=".")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_ranks)

    p = sub.add_parser("generate", help="synthetic two-class dictionary data")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-n", "--n-per-class", type=int, default=50)
    p.add_argument("-m", "--length", type=int, default=500)
    p.add_argument("--counts", type=int, nargs=2, default=[5, 1])
    p.add_argument("--noise-std", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=2.0)
    p.add_argument("--shapelet-length", type=int, default=29)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return ap


def _parse(ap, argv):
    args = ap.parse_args(argv)
    if args.config:
        defaults = json.loads(Path(args.config).read_text())
        sub = ap._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in defaults.items()})
        args = ap.parse_args(argv)
    return args


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _parse(ap, argv)
    except (OSError, json.JSONDecodeError) as err:
        print(f"tsdict: error: bad --config: {err}", file=sys.stderr)
        return 2
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as err:
        print(f"tsdict {args.command}: error: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as err:
        msg = err.args[0] if isinstance(err, KeyError) and err.args else err
        print(f"tsdict {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
