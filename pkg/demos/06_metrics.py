"""
Scoring: confusion matrix, per-class P/R/F, accuracy, trait RMSE
================================================================

"""

from styloprof.metrics import (confusion, render_report, render_trait_report,
                               report, rmse, trait_rmse_report)

truth = ["F", "F", "F", "M", "M", "M", "M", "F", "F", "F"]
pred_ = ["F", "F", "M", "M", "M", "M", "F", "F", "F", "F"]

cm = confusion(truth, pred_, classes=["F", "M"])
print("rows are truth, columns are predictions:")
for label, row in zip(cm.classes, cm.counts):
    print(f"  {label} {row}")

rep = report(cm)
print(render_report(rep))
# exact fractions live on the report object; rendering rounds to 3 places
first = rep.per_class[0]
print("class F exact precision:", first.precision)

# degenerate classes score 0 instead of dividing by zero, with a warning
empty = report(confusion(["F", "F"], ["F", "F"], classes=["F", "M"]))
print("warnings:", empty.warnings)

# regression quality is root mean squared error per trait, then the mean
print(rmse([0.1, 0.3], [0.2, 0.2]))
table = trait_rmse_report(
    {"E": [0.11, 0.2], "N": [0.0, 0.1], "A": [0.25, 0.3], "C": [0.4, 0.1],
     "O": [-0.1, 0.0]},
    {"E": [0.2, 0.2], "N": [0.1, 0.1], "A": [0.3, 0.3], "C": [0.3, 0.2],
     "O": [0.0, 0.0]},
)
print(render_trait_report(table))
