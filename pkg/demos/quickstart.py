"""Generate a synthetic visit corpus, train two embedding methods on it, and
inspect what they learned.

The generator plants cluster structure: the 60-code vocabulary is split into
6 blocks of 10, and 90% of each patient's diagnoses stay inside one block.
A good embedding should place block-mates near each other, so we look at
nearest neighbours of a probe code and at the hit-rate curve over the planted
within-block pairs.

Run:  python3 demos/quickstart.py        (about half a minute)
"""

import numpy as np

from embench.corpus import GeneratorConfig, corpus_stats, format_corpus_stats, generate_corpus, planted_clusters
from embench.embeddings import nearest_neighbours, random_embeddings
from embench.hitrate import hit_rate_curve
from embench.trainers import run_trainer
from embench.trainers.autoencoder import AEConfig
from embench.trainers.cbow import CBOWConfig


def main() -> None:
    gcfg = GeneratorConfig(n_patients=2000, vocab_size=60, n_clusters=6, seed=0)
    corpus, pairs = generate_corpus(gcfg)
    print(format_corpus_stats(corpus_stats(corpus)))
    print(f"planted pairs: {len(pairs)} within-block comorbidity pairs\n")

    print("training CBOW (skip-window context, negative sampling) ...")
    cbow = run_trainer("CBOW", corpus, CBOWConfig(dim=30, epochs=3, seed=0)).embeddings
    print("training AE (denoising autoencoder on patient count vectors) ...")
    ae = run_trainer("AE", corpus, AEConfig(hidden=10, epochs=5, seed=0)).embeddings

    probe = "A23"
    block = next(blk for blk in planted_clusters(gcfg) if probe in blk)
    print(f"\nnearest neighbours of {probe} (its planted block is {block[0]}..{block[-1]}):")
    for name, emb in (("CBOW", cbow), ("AE", ae)):
        hood = nearest_neighbours(emb, probe, 5)
        marked = [f"{code}{'*' if code in block else ' '} {value:+.3f}" for code, value in hood]
        in_block = sum(code in block for code, _ in hood)
        print(f"  {name:<5} {'  '.join(marked)}   ({in_block}/5 in block, * = block-mate)")

    print("\nhit rate on planted pairs (either member in the other's top-L):")
    rand = random_embeddings(corpus.vocabulary, 30, seed=0)
    curves = {name: hit_rate_curve(e, pairs, 3, 20) for name, e in
              (("CBOW", cbow), ("AE", ae), ("random", rand))}
    v = len(corpus.vocabulary)
    print(f"  {'L':<4} {'CBOW':<7}{'AE':<7}{'random':<8}chance")
    for L in (3, 5, 10, 20):
        chance = 1.0 - (1.0 - L / (v - 1)) ** 2
        row = "".join(f"{curves[name].rate_at(L):<7.3f}" for name in ("CBOW", "AE", "random"))
        print(f"  {L:<4} {row} {chance:.3f}")
    print(
        "\nThe context model recovers the planted structure even at this small"
        "\nscale; the count-based autoencoder needs far more patients, and the"
        "\nrandom baseline stays at chance."
    )


if __name__ == "__main__":
    main()
