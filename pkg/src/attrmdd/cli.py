"""Command-line front end.

Subcommands: map, loss, grad-check, decode, align, mdd-eval, train-toy,
report.  Exit codes: 0 success, 1 validation failure, 2 I/O failure.  Data
outputs are byte-identical across runs for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import ctc, fileio
from .alignment import align
from .decoding import decode_all, greedy_decode_phoneme
from .errors import AttrMddError
from .inventory import (
    PHONEMES,
    TokenSequence,
    builtin_table,
    load_attribute_table_path,
    phoneme_sequence,
    phonemes_to_attribute_sequence,
)
from .mdd import (
    AnnotatedUtterance,
    MddCounts,
    attribute_level_mdd,
    classify_positions,
    compute_rates,
    diagnosis_report,
)
from .sctc import (
    CategoryLayout,
    MultiLabelTarget,
    make_layout,
    sctc_sb_loss,
    targets_from_phonemes,
)
from .trainer import TrainConfig, evaluate, generate_corpus, train


def _table(args):
    if getattr(args, "attr_table", None):
        return load_attribute_table_path(args.attr_table)
    return builtin_table()


def _emit(args, payload, text_renderer):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text_renderer(payload), end="")


def _rates_dict(counts):
    rates = compute_rates(counts)
    out = rates.to_dict()
    return {k: v if isinstance(v, str) else round(v, 2) for k, v in out.items()}


def _cmd_map(args):
    table = _table(args)
    phonemes = phoneme_sequence(" ".join(args.phonemes))
    sequences = [
        phonemes_to_attribute_sequence(table, name, phonemes)
        for name in table.attribute_names
    ]
    payload = {
        "phonemes": list(phonemes.tokens),
        "attributes": {
            name: list(seq.tokens)
            for name, seq in zip(table.attribute_names, sequences)
        },
    }
    _emit(args, payload, lambda p: fileio.format_decoded_attributes(sequences))
    return 0


def _cmd_loss(args):
    table = _table(args)
    logits = fileio.read_logits_csv(args.logits)
    target = phoneme_sequence(args.target)
    if args.level == "phoneme":
        indices = [PHONEMES.index(ph) for ph in target.tokens]
        total = ctc.ctc_loss_value(logits, indices)
        payload = {"level": "phoneme", "total": total}
    else:
        layout = make_layout(table.attribute_order)
        result = sctc_sb_loss(
            logits, layout, targets_from_phonemes(table, target), with_grad=False
        )
        payload = {"level": "attribute", "total": result.total_neg_log_likelihood}
        if args.per_category:
            payload["per_category"] = {
                name: float(v)
                for name, v in zip(layout.names, result.per_category_nll)
            }

    def render(p):
        lines = [f"total\t{p['total']!r}"]
        for name, v in p.get("per_category", {}).items():
            lines.append(f"{name}\t{v!r}")
        return "\n".join(lines) + "\n"

    _emit(args, payload, render)
    return 0


def _random_instance(rng, n_categories):
    t_len = int(rng.integers(4, 11))
    u_len = int(rng.integers(0, 4))
    logits = rng.normal(size=(t_len, 2 * n_categories + 1))
    indicator = rng.integers(0, 2, size=(n_categories, u_len))
    return logits, indicator


def _cmd_grad_check(args):
    table = _table(args)
    worst = 0.0
    if args.logits:
        logits = fileio.read_logits_csv(args.logits)
        target = phoneme_sequence(args.target)
        layout = make_layout(table.attribute_order)
        multi = targets_from_phonemes(table, target)
        analytic = sctc_sb_loss(logits, layout, multi).grad
        numeric = ctc.finite_difference_gradient(
            lambda lg: sctc_sb_loss(
                lg, layout, multi, with_grad=False
            ).total_neg_log_likelihood,
            logits,
        )
        worst = ctc.max_relative_error(analytic, numeric)
    else:
        rng = np.random.default_rng(args.seed)
        for _ in range(args.trials):
            n_cat = int(rng.choice([1, 2, 5]))
            logits, indicator = _random_instance(rng, n_cat)
            layout = CategoryLayout(
                categories=tuple((i, n_cat + i) for i in range(n_cat)),
                blank_index=2 * n_cat,
            )
            multi = MultiLabelTarget(indicator=indicator)
            analytic = sctc_sb_loss(logits, layout, multi).grad
            numeric = ctc.finite_difference_gradient(
                lambda lg: sctc_sb_loss(
                    lg, layout, multi, with_grad=False
                ).total_neg_log_likelihood,
                logits,
            )
            worst = max(worst, ctc.max_relative_error(analytic, numeric))
    payload = {"max_relative_error": worst}
    _emit(args, payload, lambda p: f"max_relative_error\t{p['max_relative_error']!r}\n")
    return 0


def _cmd_decode(args):
    table = _table(args)
    logits = fileio.read_logits_csv(args.logits)
    if args.level == "phoneme":
        seq = greedy_decode_phoneme(logits)
        payload = {"level": "phoneme", "phonemes": list(seq.tokens)}
        _emit(args, payload, lambda p: fileio.format_decoded_phonemes(seq))
    else:
        layout = make_layout(table.attribute_order)
        sequences = decode_all(logits, layout)
        payload = {
            "level": "attribute",
            "attributes": {
                name: list(seq.tokens)
                for name, seq in zip(layout.names, sequences)
            },
        }
        _emit(args, payload, lambda p: fileio.format_decoded_attributes(sequences))
    return 0


def _sequence_arg(text):
    tokens = text.split()
    if len(tokens) == 1 and len(tokens[0]) > 1:
        tokens = list(tokens[0])  # unspaced word: treat as characters
    return TokenSequence("token", tuple(tokens))


def _cmd_align(args):
    result = align(_sequence_arg(args.ref), _sequence_arg(args.hyp))
    payload = {
        "ops": [
            {"op": o.op, "ref": o.ref_token, "hyp": o.hyp_token}
            for o in result.ops
        ],
        "S": result.substitutions,
        "D": result.deletions,
        "I": result.insertions,
        "M": result.matches,
        "distance": result.distance,
    }

    def render(p):
        lines = [
            "\t".join(
                (o["op"], o["ref"] if o["ref"] else "", o["hyp"] if o["hyp"] else "")
            )
            for o in p["ops"]
        ]
        lines.append(
            f"S={p['S']} D={p['D']} I={p['I']} M={p['M']} distance={p['distance']}"
        )
        return "\n".join(lines) + "\n"

    _emit(args, payload, render)
    return 0


def _level_block(counts):
    return {"counts": counts.to_dict(), "rates": _rates_dict(counts)}


def _cmd_mdd_eval(args):
    table = _table(args)
    utterances = fileio.read_evaluation_file(args.input)
    payload = {"utterances": len(utterances), "level": args.level}
    if args.level in ("phoneme", "both"):
        total = MddCounts()
        for u in utterances:
            total = total + classify_positions(u)
        payload["phoneme"] = _level_block(total)
    if args.level in ("attribute", "both"):
        per_attr = {}
        overall = MddCounts()
        for name in table.attribute_names:
            acc = MddCounts()
            for u in utterances:
                acc = acc + attribute_level_mdd(table, u, name)
            per_attr[name] = _level_block(acc)
            overall = overall + acc
        payload["attribute"] = {
            "overall": _level_block(overall),
            "per_attribute": per_attr,
        }

    def render(p):
        lines = [f"utterances\t{p['utterances']}"]
        for level in ("phoneme", "attribute"):
            if level not in p:
                continue
            block = p[level] if level == "phoneme" else p[level]["overall"]
            counts = " ".join(f"{k}={v}" for k, v in block["counts"].items())
            rates = " ".join(f"{k}={v}" for k, v in block["rates"].items())
            lines.append(f"{level}\t{counts}")
            lines.append(f"{level}\t{rates}")
        return "\n".join(lines) + "\n"

    _emit(args, payload, render)
    return 0


def _cmd_train_toy(args):
    table = _table(args)
    config = TrainConfig(
        learning_rate=args.learning_rate,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        batch_size=args.batch_size,
        warmup_fraction=args.warmup_fraction,
        seed=args.seed,
    )
    # Held-out utterances must share the training corpus's cluster centers,
    # so generate one corpus and split it rather than reseeding.
    full = generate_corpus(
        seed=args.seed,
        n_utterances=args.utterances + args.heldout,
        feature_dim=args.feature_dim,
        noise_scale=args.noise_scale,
    )
    corpus, heldout = full.split(args.utterances)
    model, curve = train(corpus, table, config)
    report = evaluate(model, heldout, table)
    if args.checkpoint:
        fileio.save_checkpoint(args.checkpoint, model.weights, model.bias)
    if args.corpus_dir:
        fileio.save_corpus(args.corpus_dir, corpus)
    payload = {
        "epochs": config.epochs,
        "first_epoch_loss": curve[0],
        "final_epoch_loss": curve[-1],
        "heldout_mean_error_rate": report.mean_error_rate,
        "per_attribute_error_rate": {
            s.name: s.error_rate for s in report.per_attribute
        },
    }

    def render(p):
        lines = [
            f"first_epoch_loss\t{p['first_epoch_loss']!r}",
            f"final_epoch_loss\t{p['final_epoch_loss']!r}",
            f"heldout_mean_error_rate\t{p['heldout_mean_error_rate']!r}",
        ]
        return "\n".join(lines) + "\n"

    _emit(args, payload, render)
    return 0


def _cmd_report(args):
    table = _table(args)
    canonical = phoneme_sequence(args.canonical)
    if args.decoded:
        with open(args.decoded, encoding="utf-8") as f:
            sequences = fileio.parse_decoded_attributes(f.read())
    elif args.annotated:
        annotated = phoneme_sequence(args.annotated)
        sequences = [
            phonemes_to_attribute_sequence(table, name, annotated)
            for name in table.attribute_names
        ]
    else:
        raise AttrMddError("report needs --decoded FILE or --annotated TOKENS")
    u = _utterance_for_report(canonical)
    rep = diagnosis_report(table, u, sequences)
    payload = rep.to_dict()

    def render(p):
        text = rep.to_text()
        return (text + "\n") if text else "no attribute mismatches detected\n"

    _emit(args, payload, render)
    return 0


def _utterance_for_report(canonical):
    # diagnosis_report only reads the canonical side; reuse it for the rest.
    return AnnotatedUtterance(
        canonical=canonical, annotated=canonical, recognized=canonical
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="attrmdd",
        description="Speech-attribute CTC losses, decoding, and "
        "mispronunciation scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, table=True, fmt="text"):
        if table:
            p.add_argument(
                "--attr-table",
                metavar="PATH",
                help="attribute table TSV (defaults to the packaged table)",
            )
        p.add_argument(
            "--format", choices=("text", "json"), default=fmt,
            help=f"output format (default {fmt})",
        )

    p = sub.add_parser("map", help="decompose phonemes into attribute sequences")
    p.add_argument("phonemes", nargs="+", help="phoneme tokens")
    common(p)
    p.set_defaults(func=_cmd_map)

    p = sub.add_parser("loss", help="loss of a logits file against a target")
    p.add_argument("--logits", required=True, metavar="PATH")
    p.add_argument("--target", required=True, help="space-separated phonemes")
    p.add_argument("--level", choices=("attribute", "phoneme"), default="attribute")
    p.add_argument(
        "--per-category", action="store_true", help="print each category's loss"
    )
    common(p)
    p.set_defaults(func=_cmd_loss)

    p = sub.add_parser("grad-check", help="finite-difference gradient check")
    p.add_argument("--logits", metavar="PATH", help="optional supplied instance")
    p.add_argument("--target", help="phonemes for the supplied instance")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_grad_check)

    p = sub.add_parser("decode", help="greedy best-path decode of a logits file")
    p.add_argument("--logits", required=True, metavar="PATH")
    p.add_argument("--level", choices=("attribute", "phoneme"), default="attribute")
    common(p)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("align", help="edit-distance alignment of two sequences")
    p.add_argument("ref", help="space-separated tokens (or an unspaced word)")
    p.add_argument("hyp")
    common(p, table=False)
    p.set_defaults(func=_cmd_align)

    p = sub.add_parser("mdd-eval", help="score canonical|annotated|recognized file")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument(
        "--level", choices=("phoneme", "attribute", "both"), default="phoneme"
    )
    common(p, fmt="json")
    p.set_defaults(func=_cmd_mdd_eval)

    p = sub.add_parser("train-toy", help="train on a synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--utterances", type=int, default=200)
    p.add_argument("--heldout", type=int, default=50)
    p.add_argument("--feature-dim", type=int, default=128)
    p.add_argument("--noise-scale", type=float, default=0.05)
    p.add_argument("--learning-rate", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--weight-decay", type=float, default=TrainConfig.weight_decay)
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument(
        "--warmup-fraction", type=float, default=TrainConfig.warmup_fraction
    )
    p.add_argument("--checkpoint", metavar="PATH", help="save the trained model")
    p.add_argument("--corpus-dir", metavar="PATH", help="save the training corpus")
    common(p)
    p.set_defaults(func=_cmd_train_toy)

    p = sub.add_parser("report", help="per-position attribute diagnosis")
    p.add_argument("canonical", help="space-separated canonical phonemes")
    p.add_argument("--decoded", metavar="PATH", help="decoded attributes TSV")
    p.add_argument("--annotated", help="annotated phonemes (derive detections)")
    common(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AttrMddError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
