"""
Training a gender classifier end to end, in library code
========================================================

Real profiling corpora are license-gated, so this walk-through plants
its own signal: one class always carries emoticons, the other carries
character flooding. The pipeline has to recover that from raw text.
"""

from styloprof.corpus import (Document, LabeledDocument, group_into_samples,
                              stratified_split)
from styloprof.experiment import run_single
from styloprof.features import default_policy
from styloprof.learner import TrainConfig
from styloprof.metrics import render_report
from styloprof.normalize import default_rules, normalize
from styloprof.pos import fallback_tag, relabel, simple_tokenize
from styloprof.synthetic import marker_corpus

docs = marker_corpus(n_docs=300, seed=0)
print("first two comments:")
for d in docs[:2]:
    print(f"  {d.labels.gender:<7}", d.document.text)

# attach normalized text and a tag stream to every document, then pool
# comments into per-class samples (k=1 keeps one comment per sample)
rules = default_rules("es")


def prepare(doc):
    text = normalize(doc.document.text, rules).text
    tags = relabel(fallback_tag(simple_tokenize(text), {}))
    return Document(id=doc.document.id, text=text, pos_tags=tuple(tags))


pooled = group_into_samples(
    [LabeledDocument(document=prepare(doc), labels=doc.labels) for doc in docs],
    k=1)

# a seeded stratified split keeps the class ratio on both sides
train, test = stratified_split(pooled, 0.7, seed=0, key="gender")
print(f"{len(train)} train samples, {len(test)} test samples")

outcome = run_single("gender", train, test, default_policy("es"),
                     min_df=2, tc=TrainConfig())
print(render_report(outcome.class_report))

# the fitted bundle makes per-sample calls too
sid, label, margin = outcome.predictions[0]
print(f"sample {sid}: predicted {label} with margin {margin:+.3f}")
model = outcome.bundle.model
print("decision rule: positive margin ->", model.label_positive)
