"""Regenerate the lockstep trace goldens: golden/<strategy>/<name>.trace.

Run from the repository root after an intended change in the trace format:

    python3 tools/make_goldens.py
"""

from pathlib import Path

from lampi.cli import load_corpus
from lampi.verify import LOCKSTEP, check_step_correspondence, fresh_covariable

ROOT = Path(__file__).resolve().parent.parent


def main():
    for e in load_corpus(ROOT / "corpus"):
        for st in e.strategies:
            if st not in LOCKSTEP:
                continue
            report = check_step_correspondence(e.term, st, alpha=fresh_covariable(e))
            if not report.ok:
                raise SystemExit(f"{e.name} under {st} fails: {report.mismatches}")
            out = ROOT / "golden" / st / f"{e.name}.trace"
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text("\n".join(report.lines()) + "\n", encoding="utf-8")
            print(f"{out.relative_to(ROOT)}: {report.steps} steps")


if __name__ == "__main__":
    main()
