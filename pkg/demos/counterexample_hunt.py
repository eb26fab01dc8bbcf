"""Hunt for sign changes of the shifted Turanian at small shifts.

For 1F2 with a close to b1*b2/(b1+b2) the decreasing ESP chain holds, yet
for shifts below 1 the Turanian can take the "wrong" sign.  The default scan
searches a micro-grid and every witness is re-checked at doubled precision.

    python demos/counterexample_hunt.py
"""
import io
import json
from contextlib import redirect_stdout

from pfqturan.cli import main
from pfqturan.scan import ScanConfig, run_scan

cfg = ScanConfig(target="counterexample_small_shifts")
report = run_scan(cfg)
print(f"{len(report.results)} grid points, outcome: {report.outcome}")

for w in report.witnesses[:3]:
    inp = w["inputs"]
    print(f"a={inp['upper']} b={inp['lower']} mu={inp['mu']} alpha={inp['alpha']} "
          f"beta={inp['beta']}: {w['kind']} = {w['value'][:14]}")
    buf = io.StringIO()
    with redirect_stdout(buf):
        main(w["cli"] + ["--digits", str(2 * cfg.digits)])
    again = json.loads(buf.getvalue())
    print(f"  re-checked at {2 * cfg.digits} digits: {len(again['violations'])} violation(s)")
    print("  reproduce with: pfqturan " + " ".join(repr(a) if a == "" else a for a in w["cli"]))
