#!/usr/bin/env python3
"""Walkthrough: what the similarity threshold tau actually does.

Low tau lets paraphrased components ("rainfall") reach labels they don't
literally equal ("rain"); tau = 1.0 collapses the engine to pure exact
matching. The sweep below shows recall falling once tau rises past the
point where the needed semantic match stops firing.
"""

from pathlib import Path

import hyperrag as hr

DATA = Path(__file__).resolve().parent.parent / "data" / "hurricane_mini"

corpus = hr.load_corpus(DATA / "corpus.jsonl")
gazetteer = hr.load_gazetteer(DATA / "gazetteer.jsonl")
encoder = hr.TrigramEncoder()
index = hr.build_index(corpus, hr.extract_all(corpus, gazetteer), encoder=encoder)

component = "rainfall"
print(f"semantic neighbors of {component!r} in the THEME vocabulary:")
for tau in (0.3, 0.5, 0.7, 0.9, 1.0):
    hits = hr.semantic_neighbors(component, "THEME", index, encoder, tau)
    print(f"  tau={tau:<4} -> {hits if hits else '(nothing clears the bar)'}")

queries = hr.load_queries(DATA / "queries.jsonl")
print("\nrecall against gold documents as tau rises:")
print("  tau   recall@1  recall@3  MRR")
for tau in (0.3, 0.5, 0.7, 0.9, 1.0):
    report = hr.eval_recall(index, encoder, queries, k=3, tau=tau)
    print(
        f"  {tau:<5} {report.recall_at[1]:<9.2f} {report.recall_at[3]:<9.2f} {report.mrr:.2f}"
    )

print(
    "\nThe Melbourne Beach query needs rainfall->rain, which scores ~0.577 "
    "under the trigram encoder: it matches at tau 0.5 and is refused beyond."
)
