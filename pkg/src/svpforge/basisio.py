"""Text formats for lattice bases and their JSON sidecars.

A basis file holds one bracketed row per line inside an outer bracket pair
(the layout common to lattice tools):

    [[1 0 3]
    [0 2 -1]
    ]

The sidecar is a JSON object carrying everything needed to reconstruct the
reduction output exactly: the profile, the embedded source instance text,
row provenance, and column spans.  All rationals are serialized as
"numerator/denominator" strings.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .csp import emit_csp, parse_csp
from .errors import SvpforgeError
from .reduction import INFINITY, GapSvpInstance, ReductionProfile

FORMAT_NAME = "svpforge-basis"
FORMAT_VERSION = 1

_ROW_RE = re.compile(r"\[([^\[\]]*)\]")


def emit_basis(basis: Sequence[Sequence[int]]) -> str:
    if not basis:
        raise SvpforgeError("refusing to emit an empty basis")
    lines = ["[" + " ".join(str(x) for x in row) + "]" for row in basis]
    return "[" + "\n".join(lines) + "\n]\n"


def parse_basis(text: str) -> tuple[tuple[int, ...], ...]:
    stripped = text.strip()
    if not (stripped.startswith("[") and stripped.endswith("]")):
        raise SvpforgeError("basis text must be wrapped in an outer [ ... ] pair")
    inner = stripped[1:-1]
    rows = []
    tail = []
    pos = 0
    for m in _ROW_RE.finditer(inner):
        tail.append(inner[pos : m.start()])
        pos = m.end()
        try:
            rows.append(tuple(int(tok) for tok in m.group(1).split()))
        except ValueError:
            raise SvpforgeError(f"non-integer basis entry in row {len(rows)}") from None
    tail.append(inner[pos:])
    if any(part.strip() for part in tail):
        raise SvpforgeError("unexpected text between basis rows")
    if not rows:
        raise SvpforgeError("basis text holds no rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or 0 in widths:
        raise SvpforgeError("basis rows must share one positive width")
    return tuple(rows)


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _p_json(p: Optional[int]):
    return INFINITY if p is None else p


def _p_from_json(value) -> Optional[int]:
    if value == INFINITY:
        return None
    if isinstance(value, int) and value >= 1:
        return value
    raise SvpforgeError(f"bad norm index {value!r} in sidecar")


def profile_to_json(prof: ReductionProfile) -> dict:
    return {
        "p": _p_json(prof.p),
        "prime": prof.prime,
        "scale": prof.scale,
        "consistency_width": prof.consistency_width,
        "support_width": prof.support_width,
        "mode": prof.mode,
        "soundness": _frac_str(prof.soundness),
        "num_vars": prof.num_vars,
        "num_constraints": prof.num_constraints,
        "arity": prof.arity,
        "alphabet_size": prof.alphabet_size,
        "degree": prof.degree,
        "padded_alphabet": prof.padded_alphabet,
    }


def profile_from_json(d: dict) -> ReductionProfile:
    try:
        return ReductionProfile(
            p=_p_from_json(d["p"]),
            prime=d["prime"],
            scale=d["scale"],
            consistency_width=d["consistency_width"],
            support_width=d["support_width"],
            mode=d["mode"],
            soundness=Fraction(d["soundness"]),
            num_vars=d["num_vars"],
            num_constraints=d["num_constraints"],
            arity=d["arity"],
            alphabet_size=d["alphabet_size"],
            degree=d["degree"],
            padded_alphabet=d["padded_alphabet"],
        )
    except KeyError as exc:
        raise SvpforgeError(f"sidecar profile is missing {exc.args[0]!r}") from None


def sidecar_json(
    inst: GapSvpInstance, basis_file: str, seed: Optional[int] = None
) -> dict:
    prof = inst.profile
    gap = prof.gap_factor
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "basis_file": basis_file,
        "profile": profile_to_json(prof),
        "threshold": {"nprime": prof.nprime, "p": _p_json(prof.p)},
        "gap_factor": {
            "base": _frac_str(gap.base),
            "exponent": _frac_str(gap.exponent),
            "floor": gap.floor(),
            "approx": gap.as_float(),
        },
        "shape": {"rows": inst.num_rows, "cols": inst.num_cols},
        "col_spans": {
            "consistency": list(inst.consistency_span),
            "support": list(inst.support_span),
            "spread": list(inst.spread_span),
        },
        "row_provenance": [[t, list(tup)] for t, tup in inst.row_provenance],
        "csp": emit_csp(inst.csp),
        "seed": seed,
    }


def save_instance(
    inst: GapSvpInstance, basis_path, seed: Optional[int] = None
) -> tuple[Path, Path]:
    """Write the basis and its sidecar; the sidecar sits next to the basis."""
    basis_path = Path(basis_path)
    sidecar_path = basis_path.with_name(basis_path.name + ".json")
    basis_path.write_text(emit_basis(inst.basis))
    payload = sidecar_json(inst, basis_path.name, seed=seed)
    sidecar_path.write_text(json.dumps(payload, indent=2) + "\n")
    return basis_path, sidecar_path


def load_instance(basis_path, sidecar_path=None) -> GapSvpInstance:
    """Rebuild a reduction output from a basis file and its sidecar."""
    basis_path = Path(basis_path)
    if sidecar_path is None:
        sidecar_path = basis_path.with_name(basis_path.name + ".json")
    try:
        payload = json.loads(Path(sidecar_path).read_text())
    except json.JSONDecodeError as exc:
        raise SvpforgeError(f"sidecar is not valid JSON: {exc}") from None
    if payload.get("format") != FORMAT_NAME:
        raise SvpforgeError("sidecar format tag does not match")
    if payload.get("version") != FORMAT_VERSION:
        raise SvpforgeError(f"unsupported sidecar version {payload.get('version')!r}")

    csp = parse_csp(payload["csp"])
    prof = profile_from_json(payload["profile"])
    basis = parse_basis(basis_path.read_text())
    provenance = tuple(
        (int(t), tuple(int(a) for a in tup)) for t, tup in payload["row_provenance"]
    )
    if len(provenance) != len(basis):
        raise SvpforgeError("row provenance length does not match the basis")
    if len(basis[0]) != prof.nprime:
        raise SvpforgeError("basis width does not match the profile")
    for t, tup in provenance:
        if not (0 <= t < csp.num_constraints):
            raise SvpforgeError(f"provenance names a missing constraint {t}")
        if tup not in csp.constraints[t].accepted_set:
            raise SvpforgeError(f"provenance tuple {tup} is not accepted by constraint {t}")
    return GapSvpInstance(
        csp=csp, profile=prof, basis=basis, row_provenance=provenance
    )
