"""Ranking metrics (MAP / MRR) over candidate-answer lists.

Candidates are ranked by descending model score with ties broken by
ascending answer id, which makes every evaluation deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .data import QADataset
from .embedding import Vocabulary, tokenize
from .errors import DataError
from .matcher import represent, score
from .model import ParameterSet, TrainerConfig


def average_precision(labels: list[int]) -> float:
    """Mean of precision-at-i over the positions i holding positives."""
    if not any(labels):
        raise DataError("average precision needs at least one positive label")
    hits = 0
    precisions = []
    for i, label in enumerate(labels, start=1):
        if label == 1:
            hits += 1
            precisions.append(hits / i)
    return float(np.mean(precisions))


def reciprocal_rank(labels: list[int]) -> float:
    """1 / rank of the first positive."""
    for i, label in enumerate(labels, start=1):
        if label == 1:
            return 1.0 / i
    raise DataError("reciprocal rank needs at least one positive label")


@dataclass
class RankedCandidate:
    answer_id: int
    score: float
    label: int


def rank_candidates(
    scores: list[float], answer_ids: list[int], labels: list[int]
) -> list[RankedCandidate]:
    """Sort by score descending, answer id ascending on score ties."""
    rows = [
        RankedCandidate(answer_id=a, score=s, label=l)
        for s, a, l in zip(scores, answer_ids, labels)
    ]
    rows.sort(key=lambda r: (-r.score, r.answer_id))
    return rows


@dataclass
class QuestionResult:
    question_id: str
    average_precision: float
    reciprocal_rank: float


@dataclass
class MetricReport:
    split: str
    map: float
    mrr: float
    per_question: list[QuestionResult]

    def format_table(self) -> str:
        lines = [
            f"split: {self.split}",
            f"questions: {len(self.per_question)}",
            f"MAP: {self.map:.4f}",
            f"MRR: {self.mrr:.4f}",
            "",
            "question_id\tAP\tRR",
        ]
        for row in self.per_question:
            lines.append(
                f"{row.question_id}\t{row.average_precision:.6f}"
                f"\t{row.reciprocal_rank:.6f}"
            )
        return "\n".join(lines) + "\n"

    def write_jsonl(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {
                        "kind": "summary",
                        "split": self.split,
                        "map": self.map,
                        "mrr": self.mrr,
                        "questions": len(self.per_question),
                    }
                )
                + "\n"
            )
            for row in self.per_question:
                fh.write(
                    json.dumps(
                        {
                            "kind": "question",
                            "question_id": row.question_id,
                            "ap": row.average_precision,
                            "rr": row.reciprocal_rank,
                        }
                    )
                    + "\n"
                )

    @classmethod
    def read_jsonl(cls, path: str) -> "MetricReport":
        summary = None
        rows = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                record = json.loads(line)
                if record["kind"] == "summary":
                    summary = record
                else:
                    rows.append(
                        QuestionResult(
                            question_id=record["question_id"],
                            average_precision=record["ap"],
                            reciprocal_rank=record["rr"],
                        )
                    )
        if summary is None:
            raise DataError(f"{path}: no summary record found")
        return cls(
            split=summary["split"], map=summary["map"], mrr=summary["mrr"],
            per_question=rows,
        )


def evaluate(
    params: ParameterSet,
    dataset: QADataset,
    config: TrainerConfig,
    vocab: Vocabulary,
) -> MetricReport:
    """Deterministic MAP/MRR of the model over one split (eval mode)."""
    results = []
    aps = []
    rrs = []
    for q in dataset.questions:
        rep_q = represent(vocab.encode(tokenize(q.text)), params, config)
        scores, ids, labels = [], [], []
        for cand in q.candidates:
            rep_a = represent(vocab.encode(tokenize(cand.text)), params, config)
            scores.append(score(rep_q, rep_a))
            ids.append(cand.answer_id)
            labels.append(cand.label)
        ranked = rank_candidates(scores, ids, labels)
        ordered_labels = [r.label for r in ranked]
        ap = average_precision(ordered_labels)
        rr = reciprocal_rank(ordered_labels)
        aps.append(ap)
        rrs.append(rr)
        results.append(
            QuestionResult(
                question_id=q.question_id, average_precision=ap, reciprocal_rank=rr
            )
        )
    if not results:
        raise DataError(f"split {dataset.split!r} has no questions to evaluate")
    return MetricReport(
        split=dataset.split,
        map=float(np.mean(aps)),
        mrr=float(np.mean(rrs)),
        per_question=results,
    )
