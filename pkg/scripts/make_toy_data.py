#!/usr/bin/env python3
"""Write synthetic QA corpora as canonical TSV files."""

import argparse
from pathlib import Path

from qmatch.data import write_canonical_tsv
from qmatch.synthetic import order_corpus, topic_corpus, toy_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", choices=("toy", "topic", "order"),
                        default="topic")
    parser.add_argument("--out", type=Path, default=Path("data"))
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    if args.corpus == "toy":
        splits = {"toy": toy_corpus()}
    elif args.corpus == "topic":
        train, dev = topic_corpus(seed=args.seed)
        splits = {"train": train, "dev": dev}
    else:
        train, dev = order_corpus(seed=args.seed)
        splits = {"train": train, "dev": dev}

    for name, dataset in splits.items():
        path = args.out / f"{args.corpus}_{name}.tsv"
        write_canonical_tsv(dataset, path)
        print(f"{path}: {dataset.num_questions} questions, "
              f"{dataset.num_pairs} pairs")


if __name__ == "__main__":
    main()
