"""Map a trained embedding space in 2-D and measure how reproducible it is.

Part 1 runs the exact t-SNE projection on CBOW vectors and draws the result
as an ASCII scatter: each code is plotted as the index of its planted block,
so well-separated digits mean the embedding preserved the block geometry.

Part 2 asks a reliability question: if we retrain on resampled patient
subsets, how much do pairwise cosine similarities wobble?  The sweep reports
sigma (the mean per-pair similarity s.d. across runs) at several sample
fractions; more data means a steadier geometry, and pinning every run to one
seed reproduces the training bit for bit, so sigma collapses to exactly zero.

Run:  python3 demos/embedding_map.py       (about two minutes)
"""

from embench.corpus import GeneratorConfig, generate_corpus, planted_clusters
from embench.projection import TsneConfig, tsne
from embench.reliability import run_variability, sample_size_sweep
from embench.trainers import run_trainer
from embench.trainers.cbow import CBOWConfig


def ascii_scatter(points, width: int = 64, height: int = 20) -> str:
    xs = [x for x, _, _ in points]
    ys = [y for _, y, _ in points]
    span_x = max(xs) - min(xs) or 1.0
    span_y = max(ys) - min(ys) or 1.0
    grid = [[" "] * width for _ in range(height)]
    for x, y, mark in points:
        col = min(width - 1, int((x - min(xs)) / span_x * (width - 1)))
        row = min(height - 1, int((y - min(ys)) / span_y * (height - 1)))
        grid[row][col] = mark
    return "\n".join("".join(row) for row in grid)


def main() -> None:
    gcfg = GeneratorConfig(n_patients=2000, vocab_size=60, n_clusters=6, seed=0)
    corpus, _ = generate_corpus(gcfg)
    block_of = {code: str(i) for i, block in enumerate(planted_clusters(gcfg)) for code in block}

    def cbow_trainer(sub, seed):
        return run_trainer("CBOW", sub, CBOWConfig(dim=30, epochs=3, seed=seed)).embeddings

    print("training CBOW and projecting with exact t-SNE ...")
    emb = cbow_trainer(corpus, 0)
    proj = tsne(emb, TsneConfig(perplexity=10.0, seed=0))
    print(f"KL divergence: {proj.kl_init:.3f} at start -> {proj.kl_final:.3f} after optimisation\n")
    points = [(x, y, block_of[code]) for code, x, y, _ in proj.rows]
    print(ascii_scatter(points))
    print("\nEach digit is one code, labelled by its planted block (0-5).")

    print("\nretraining on resampled subsets to measure stability ...")
    for report in sample_size_sweep(cbow_trainer, corpus, fractions=(0.25, 0.5, 1.0),
                                    n_runs=3, max_pairs=200, method="CBOW"):
        bar = "#" * round(report.sigma * 200)
        print(f"  fraction {report.sample_fraction:.2f}  sigma {report.sigma:.4f}  {bar}")

    pinned = run_variability(cbow_trainer, corpus, all_block_pairs(gcfg), n_runs=3,
                             seeds=[0, 0, 0], train_fraction=0.5, method="CBOW")
    print(f"  pinned seeds       sigma {pinned.sigma}  (identical runs, exactly zero)")


def all_block_pairs(gcfg):
    from embench.pairs import DiseasePair, PairList

    block = planted_clusters(gcfg)[0]
    return PairList(
        DiseasePair(block[i], block[j], "demo", "comorbid")
        for i in range(len(block)) for j in range(i + 1, len(block))
    )


if __name__ == "__main__":
    main()
