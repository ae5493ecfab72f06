"""Write the JSON spec files under demos/specs from the reference corpus.

Run from the repository root::

    python3 demos/make_specs.py [OUTDIR]

Every file written here is accepted by ``sfk validate`` except ``bad_nut.json``,
which carries a nut outside the admissible cone on purpose.
"""

import json
import sys
from pathlib import Path

from sfk import corpus


def _num(v):
    v = float(v)
    return int(v) if v.is_integer() else v


def spec_dict(P, nut=None, name=None):
    out = {"name": name or P.name,
           "normals": [list(n) for n in P.normals],
           "offsets": [_num(v) for v in P.offsets]}
    if nut is not None:
        out["nut"] = [_num(v) for v in nut]
    return out


def specs():
    o2 = corpus.o_minus(2)
    o3 = corpus.o_minus(3)
    yield "quadrant", spec_dict(corpus.quadrant())
    for p in range(1, 5):
        yield f"o{p}", spec_dict(corpus.o_minus(p))
    yield "o2_taubnut", spec_dict(o2, (1, -1), "O(-2) multi Taub-NUT")
    yield "o2_generalized", spec_dict(o2, (0.5, -0.45), "O(-2) generalized Taub-NUT")
    yield "o3_nut", spec_dict(o3, (2, -1), "O(-3) with nut")
    yield "a2", spec_dict(corpus.a_series(2))
    yield "a3", spec_dict(corpus.a_series(3))
    yield "five_edge", spec_dict(corpus.five_edge())
    yield "s2r2", spec_dict(corpus.s2r2())
    yield "bad_nut", spec_dict(o2, (-1, 0), "bad nut")


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0]) if argv else Path(__file__).parent / "specs"
    out.mkdir(parents=True, exist_ok=True)
    for stem, spec in specs():
        (out / f"{stem}.json").write_text(json.dumps(spec) + "\n")
        print(out / f"{stem}.json")


if __name__ == "__main__":
    main()
