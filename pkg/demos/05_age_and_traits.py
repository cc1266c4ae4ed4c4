"""
Age bands (one-vs-rest) and personality traits (regression)
===========================================================

The same feature pipeline drives three model families. Gender is one
binary margin; age is one margin per band decided by argmax; each of
the five traits E N A C O gets its own epsilon-insensitive regressor
over values in [-0.5, 0.5].
"""

import random

from styloprof.corpus import Document, LabelSet, Sample, stratified_split
from styloprof.experiment import run_single
from styloprof.features import default_policy
from styloprof.learner import TrainConfig

rng = random.Random(4)
BANDS = ("18-24", "25-34", "35-49", "50-XX")
# each band leans on its own filler phrase so there is signal to find
PHRASES = {"18-24": "jaja netflix uni", "25-34": "curro gym finde",
           "35-49": "peques cole trabajo", "50-XX": "nietos huerto misa"}

samples = []
for i in range(48):
    band = BANDS[i % 4]
    extroversion = 0.3 if band in ("18-24", "25-34") else -0.2
    words = (PHRASES[band] + " hola gente bueno").split()
    rng.shuffle(words)
    samples.append(Sample(
        id=f"a{i:02d}",
        documents=[Document(id=f"a{i:02d}/0", text=" ".join(words),
                            pos_tags=("N",) * len(words))],
        labels=LabelSet(gender="Female" if i % 2 == 0 else "Male",
                        age_band=band,
                        traits={"E": extroversion, "N": 0.0, "A": 0.1,
                                "C": -0.1, "O": 0.2}),
    ))

train, test = stratified_split(samples, 0.7, seed=1, key="age_band")

age = run_single("age", train, test, default_policy("es"), min_df=1,
                 tc=TrainConfig())
print("age bands:", [s.label for s in age.class_report.per_class])
print(f"age accuracy on {age.n_test} held-out authors:",
      f"{age.class_report.accuracy:.3f}")
# per-sample output is (id, band, winning margin)
print("  e.g.", age.predictions[0])

traits = run_single("traits", train, test, default_policy("es"), min_df=1,
                    tc=TrainConfig())
print("\nper-trait RMSE:")
for name, value in traits.trait_report.per_trait.items():
    print(f"  {name}  {value:.3f}")
print(f"mean {traits.trait_report.mean:.3f}")
sid, values = traits.predictions[0]
print(f"sample {sid} predicted E = {values['E']:+.3f}")
