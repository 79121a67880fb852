"""Pretrain disease embeddings on a big unlabeled corpus, then reuse them to
predict a future diagnosis on a small labeled cohort.

The classifier predicts whether a target code appears in a patient's final
six months, from the diagnosis counts recorded before that window.  Both arms
share the identical network and data; they differ only in how the disease
embedding block is initialised -- CBOW vectors pretrained on 6000 unlabeled
patients versus a fresh random matrix.  Labels are kept scarce (a 10% train
split) because that is the regime transfer learning is for; the test split is
kept large so average precision is measured with some statistical backbone.

Run:  python3 demos/transfer.py        (a minute or two)
"""

import numpy as np

from embench.corpus import GeneratorConfig, generate_corpus
from embench.downstream import ClassifierConfig, build_task, train_classifier
from embench.trainers import run_trainer
from embench.trainers.cbow import CBOWConfig

TARGET = "A07"


def main() -> None:
    pretrain_corpus, _ = generate_corpus(
        GeneratorConfig(n_patients=6000, vocab_size=100, n_clusters=10,
                        cluster_affinity=0.9, seed=0)
    )
    task_corpus, _ = generate_corpus(
        GeneratorConfig(n_patients=1200, vocab_size=100, n_clusters=10,
                        cluster_affinity=0.9, seed=1)
    )

    print("pretraining CBOW on 6000 unlabeled patients ...")
    cbow = run_trainer("CBOW", pretrain_corpus, CBOWConfig(dim=50, epochs=3, seed=0)).embeddings

    task = build_task(task_corpus, TARGET)
    labels = [y for _, y in task.examples]
    print(f"task: will {TARGET} appear in the last 183 days?  "
          f"{len(task.examples)} patients, prevalence {np.mean(labels):.3f}\n")

    print(f"  {'seed':<6}{'pretrained AP':<16}{'random-init AP':<16}{'test size'}")
    pre, rand = [], []
    for seed in range(3):
        cfg = ClassifierConfig(seed=seed, split=(0.1, 0.1, 0.8))
        a = train_classifier(task, cfg, disease_embeddings=cbow)
        b = train_classifier(task, cfg)
        pre.append(a.average_precision)
        rand.append(b.average_precision)
        print(f"  {seed:<6}{a.average_precision:<16.4f}{b.average_precision:<16.4f}{a.n_test}")

    print(f"\n  {'median':<6}{np.median(pre):<16.4f}{np.median(rand):<16.4f}")
    print(
        "\nWith only ~120 labeled training patients the classifier that starts"
        "\nfrom pretrained disease vectors is typically ahead of the one that"
        "\nmust learn its embedding from scratch."
    )


if __name__ == "__main__":
    main()
