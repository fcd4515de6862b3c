"""Unified command line: verification, scoring, training, corpus tooling,
audits, and the HTTP service.

Exit codes: 0 ok, 2 configuration error, 3 model-load error.
"""

from __future__ import annotations

import json
import sys

import click

from .config import (
    ConfigError,
    EngineConfig,
    EXIT_CONFIG_ERROR,
    EXIT_MODEL_ERROR,
)
from .fixtures import CANONICAL_SAMPLES
from .fusion import best_of_n, reward
from .judge import JudgeUnavailable
from .pipeline import (
    AuditConfig,
    audit_batch,
    confusion_matrix,
    corpus_stats,
    dedup,
    run_protocol,
    stratified_sample,
)
from .records import (
    SampleRecord,
    load_corpus,
    read_jsonl,
    save_corpus,
    write_jsonl,
)
from .ses import extract_claims, verify
from .synth import make_corpus
from .vrm import (
    CorruptorConfig,
    TrainConfig,
    TrainingExample,
    VrmModel,
    build_oracle_dataset,
    check_feature_compatibility,
    prepare_batch,
    train as train_model,
)


def _load_model(path: str) -> VrmModel:
    try:
        model = VrmModel.load(path)
        check_feature_compatibility(model)
        return model
    except Exception as exc:
        click.echo(f"error: cannot load model {path!r}: {exc}", err=True)
        sys.exit(EXIT_MODEL_ERROR)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, ensure_ascii=False, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None, help="global deterministic seed")
@click.option("--lambda-fail", type=float, default=None, help="lambda(-1) trust floor")
@click.option("--zeta", type=float, default=None, help="semantic pass threshold")
@click.option("--tau", type=float, default=None, help="audit rejection threshold")
@click.option("--upsilon", type=float, default=None, help="dedup similarity threshold")
@click.pass_context
def main(ctx, config_path, seed, lambda_fail, zeta, tau, upsilon):
    """Verification-aware reward engine for quantum-mechanics reasoning."""
    try:
        config = (
            EngineConfig.from_file(config_path) if config_path else EngineConfig()
        )
        ctx.obj = config.override(
            seed=seed, lambda_fail=lambda_fail, zeta=zeta, tau=tau, upsilon=upsilon
        )
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)


@main.command("verify")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_obj
def verify_cmd(config: EngineConfig, in_path, out_path):
    """Run the deterministic checks over a corpus (no judge, no fusion)."""
    rows = []
    for record in load_corpus(in_path):
        v, reports = verify(record, config.check_config())
        bundle = extract_claims(record.answer)
        rows.append(
            {
                "id": record.id,
                "v": v.to_json_dict(),
                "reports": [r.to_json_dict() for r in reports],
                "unparsable": bundle.unparsable,
            }
        )
    if out_path:
        write_jsonl(out_path, rows)
        click.echo(f"verified {len(rows)} records -> {out_path}")
    else:
        for row in rows:
            click.echo(json.dumps(row, ensure_ascii=False))


@main.command("score")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--question", required=True)
@click.option("--answer", required=True)
@click.option("--reference", default=None)
@click.option("--mode", type=click.Choice(["vrm", "passthrough"]), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_obj
def score_cmd(config: EngineConfig, model_path, question, answer, reference, mode, out_path):
    """Score one (question, answer) pair into a reward breakdown."""
    model = _load_model(model_path)
    try:
        breakdown = reward(
            question,
            answer,
            model,
            config.make_backend(),
            config.lambda_map(),
            mode=mode or config.mode,
            check_config=config.check_config(),
            reference=reference,
            seed=config.seed,
        )
    except JudgeUnavailable as exc:
        click.echo(f"error: judge unavailable: {exc}", err=True)
        sys.exit(1)
    _emit(breakdown.to_json_dict(), out_path)


@main.command("bon")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--question", required=True)
@click.option(
    "--candidates",
    "candidates_path",
    type=click.Path(exists=True),
    required=True,
    help="JSONL: one {'answer': ...} per line, or a JSON array of strings",
)
@click.option("--reference", default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_obj
def bon_cmd(config: EngineConfig, model_path, question, candidates_path, reference, out_path):
    """Best-of-N rerank: select the highest-reward candidate."""
    model = _load_model(model_path)
    with open(candidates_path, encoding="utf-8") as fh:
        text = fh.read().strip()
    if text.startswith("["):
        candidates = [str(c) for c in json.loads(text)]
    else:
        candidates = [json.loads(line)["answer"] for line in text.splitlines() if line]
    selected, breakdowns = best_of_n(
        question,
        candidates,
        model,
        config.make_backend(),
        config.lambda_map(),
        mode=config.mode,
        check_config=config.check_config(),
        reference=reference,
        seed=config.seed,
    )
    _emit(
        {
            "selected": selected,
            "totals": [b.total for b in breakdowns],
            "breakdowns": [b.to_json_dict() for b in breakdowns],
        },
        out_path,
    )


@main.command("train")
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--epochs", type=int, default=4, show_default=True)
@click.option("--batch-size", type=int, default=64, show_default=True)
@click.option("--lr", type=float, default=None, help="overrides --lr-preset")
@click.option(
    "--lr-preset",
    type=click.Choice(["desk", "backbone-finetune"]),
    default="desk",
    show_default=True,
)
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--hidden", type=int, default=64, show_default=True)
@click.pass_obj
def train_cmd(config, data_path, out_path, epochs, batch_size, lr, lr_preset, beta, hidden):
    """Train the reward model on an oracle-annotated JSONL dataset."""
    from .vrm.training import LR_PRESETS

    examples = [TrainingExample.from_json_dict(obj) for obj in read_jsonl(data_path)]
    if not examples:
        click.echo("error: dataset is empty", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    batch = prepare_batch(examples, config.check_config())
    cfg = TrainConfig(
        epochs=epochs,
        batch_size=batch_size,
        lr=lr if lr is not None else LR_PRESETS[lr_preset],
        beta=beta,
        seed=config.seed,
        hidden=hidden,
    )
    result = train_model(batch, cfg)
    result.model.save(out_path)
    click.echo(
        json.dumps(
            {
                "examples": len(examples),
                "epochs": epochs,
                "epoch_losses": result.epoch_losses,
                "model": out_path,
            }
        )
    )


@main.command("build-oracle")
@click.option("--fixtures", "fixtures_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--rate", type=float, default=1.0, show_default=True,
              help="corruption emission rate (0 = positives only)")
@click.pass_obj
def build_oracle_cmd(config: EngineConfig, fixtures_path, out_path, rate):
    """Annotate fixtures (and corrupted copies) into a training dataset."""
    records = load_corpus(fixtures_path)
    examples = build_oracle_dataset(
        records,
        config.make_backend(),
        CorruptorConfig(rate=rate, seed=config.seed),
        config.check_config(),
    )
    write_jsonl(out_path, (e.to_json_dict() for e in examples))
    click.echo(f"wrote {len(examples)} training examples -> {out_path}")


@main.command("dedup")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--dropped", "dropped_path", type=click.Path(), default=None)
@click.pass_obj
def dedup_cmd(config: EngineConfig, in_path, out_path, dropped_path):
    """Drop near-duplicate questions (greedy, first kept)."""
    records = load_corpus(in_path)
    kept, dropped = dedup(records, upsilon=config.upsilon)
    save_corpus(out_path, kept)
    if dropped_path:
        write_jsonl(
            dropped_path,
            (
                {"dropped": d.dropped_id, "kept": d.kept_id, "similarity": d.similarity}
                for d in dropped
            ),
        )
    click.echo(f"kept {len(kept)} of {len(records)} records -> {out_path}")


@main.command("protocol")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.pass_obj
def protocol_cmd(config: EngineConfig, in_path, out_path, workers):
    """Layer-1 automated verification: checks + judge + zeta rule."""
    records = load_corpus(in_path)
    results = run_protocol(
        records,
        config.make_backend(),
        zeta=config.zeta,
        check_config=config.check_config(),
        max_workers=workers,
    )
    write_jsonl(out_path, (r.to_json_dict() for r in results))
    verdicts = {}
    for r in results:
        verdicts[r.verdict] = verdicts.get(r.verdict, 0) + 1
    click.echo(json.dumps({"records": len(results), "verdicts": verdicts}))


@main.group("audit")
def audit_group():
    """Layer-2 human batch audit (sample, review, decide)."""


@audit_group.command("sample")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--fraction", type=float, default=None)
@click.pass_obj
def audit_sample_cmd(config: EngineConfig, in_path, out_path, fraction):
    """Draw the seeded stratified review sample."""
    records = load_corpus(in_path)
    cfg = AuditConfig(
        tau=config.tau,
        sample_fraction=fraction if fraction is not None else config.sample_fraction,
        seed=config.seed,
    )
    sampled = stratified_sample(records, cfg)
    save_corpus(out_path, sampled)
    click.echo(f"sampled {len(sampled)} of {len(records)} records -> {out_path}")


@audit_group.command("review")
@click.option("--sample", "sample_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def audit_review_cmd(sample_path, out_path):
    """Sequential CLI review of the sampled records -> annotations JSONL."""
    rows = []
    for record in load_corpus(sample_path):
        click.echo(f"\n--- {record.id} [{record.task_type}] ---")
        click.echo(f"Q: {record.question}")
        click.echo(f"A: {record.answer}")
        verdict = click.prompt(
            "verdict", type=click.Choice(["ok", "error"]), default="ok"
        )
        note = click.prompt("note", default="", show_default=False)
        rows.append({"id": record.id, "verdict": verdict, "note": note})
    write_jsonl(out_path, rows)
    click.echo(f"wrote {len(rows)} annotations -> {out_path}")


@audit_group.command("decide")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option("--annotations", "annotations_path", type=click.Path(exists=True), required=True)
@click.option("--fraction", type=float, default=None)
@click.pass_obj
def audit_decide_cmd(config: EngineConfig, in_path, annotations_path, fraction):
    """Recompute the seeded sample and apply the tau rejection rule."""
    records = load_corpus(in_path)
    verdicts = {
        row["id"]: row["verdict"] for row in read_jsonl(annotations_path)
    }
    cfg = AuditConfig(
        tau=config.tau,
        sample_fraction=fraction if fraction is not None else config.sample_fraction,
        seed=config.seed,
    )
    decision = audit_batch(records, verdicts, cfg)
    click.echo(json.dumps(decision.to_json_dict()))


@main.command("stats")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True,
              help="verification-record JSONL from `protocol`")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_obj
def stats_cmd(config: EngineConfig, in_path, out_path):
    """Corpus statistics: pass rates, verdicts, confusion matrix."""
    from .pipeline import VerificationRecord

    results = [VerificationRecord.from_json_dict(obj) for obj in read_jsonl(in_path)]
    stats = corpus_stats(results, zeta=config.zeta)
    stats["confusion"] = confusion_matrix(results, zeta=config.zeta).to_json_dict()
    _emit(stats, out_path)


@main.command("synth")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--concepts/--no-concepts", default=True, show_default=True)
@click.option("--canonical/--no-canonical", default=True, show_default=True,
              help="include the two canonical hand-built fixtures")
@click.pass_obj
def synth_cmd(config: EngineConfig, out_path, n, concepts, canonical):
    """Emit a seeded synthetic corpus (plus the canonical fixtures)."""
    records = list(CANONICAL_SAMPLES) if canonical else []
    records.extend(make_corpus(n, seed=config.seed, with_concepts=concepts))
    save_corpus(out_path, records)
    click.echo(f"wrote {len(records)} records -> {out_path}")


@main.command("serve")
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--mode", type=click.Choice(["vrm", "passthrough"]), default=None)
@click.pass_obj
def serve_cmd(config: EngineConfig, model_path, host, port, mode):
    """Run the HTTP reward service."""
    from .service import serve

    config = config.override(
        model_path=model_path,
        host=host,
        port=port,
        mode=mode,
    )
    model = None
    if config.mode == "vrm":
        if not config.model_path:
            click.echo("error: vrm mode requires --model", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
        model = _load_model(config.model_path)
    try:
        serve(config, model=model)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)


if __name__ == "__main__":
    main()
