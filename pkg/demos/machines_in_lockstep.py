"""
Abstract machines in lockstep with processes
=============================================

Each machine transition is matched by a fixed number of silent steps of
the translated process. We run Church numeral two applied to a function
and watch the two sides move together.
"""

from pathlib import Path

from lampi.cli import load_corpus_file
from lampi.verify import check_step_correspondence, fresh_covariable

entry = load_corpus_file(Path(__file__).parent.parent / "corpus" / "church2.lmu")

for strategy in ("cbn-int", "cbv-classical"):
    report = check_step_correspondence(entry.term, strategy, alpha=fresh_covariable(entry))
    print(f"== {entry.name} under {strategy}: {report.steps} machine steps, "
          f"{report.transitions} silent steps, terminal shape {report.terminal_shape}")
    for rec in report.records:
        rule = rec.rule or "start"
        print(f"{rec.step:3d} {rule:6s} {len(rec.labels)} tau  {rec.exec}")
        print(f"                   {rec.process}")
