"""On-disk build bundles.

A bundle directory holds::

    config.txt        normalised build parameters
    alpha.json        the r generators
    witnesses.json    every intermediate set and map
    balls/ball_NN.json, ball_NN.dot, ball_NN_partial.dot
    reports.json      verification reports
    provenance.log    one line per construction choice
    manifest.json     version, config digest, output digests, timing

Every file except the ``timing`` entry of the manifest is a pure function
of the configuration.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import __version__
from .builder import BuildParams, BuildResult, Report
from .errors import SerializationError
from .exactmaps import IntervalSet, PiecewiseTranslation, parse_rat_strict, rat_str
from .precycles import PreCycle
from .schreier import MarkedAction, PartialAction, to_dot


def _dump(data) -> str:
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def witnesses_json(res: BuildResult) -> dict:
    return {
        "Y": res.Y.to_json(),
        "C": res.C.to_json(),
        "Cn": [x.to_json() for x in res.Cn],
        "Bn": [x.to_json() for x in res.Bn],
        "blocks": [[b.to_json() for b in by_vertex] for by_vertex in res.blocks],
        "A": res.A.to_json(),
        "B": res.B.to_json(),
        "D": res.D.to_json(),
        "T": res.T.to_json(),
        "V": res.V.to_json(),
        "W": res.W.to_json(),
        "I": res.I.to_json(),
        "psi": res.psi.to_json(),
        "phi": [pc.to_json() for pc in res.phi],
        "U": [u.to_json() for u in res.U],
        "alpha_inf": [t.to_json() for t in res.alpha_inf],
        "eta": rat_str(res.eta),
        "m0": res.m0,
        "v_level": res.v_level,
        "v_root": res.v_root.to_json(),
        "y_measure": rat_str(res.y_measure),
    }


def alpha_json(res: BuildResult) -> dict:
    return {"generators": {f"a{i + 1}": t.to_json() for i, t in enumerate(res.alpha)}}


def bundle_files(res: BuildResult, reports: list[Report]) -> dict[str, bytes]:
    files = {
        "config.txt": res.params.to_text(),
        "alpha.json": _dump(alpha_json(res)),
        "witnesses.json": _dump(witnesses_json(res)),
        "reports.json": _dump([r.to_json() for r in reports]),
        "provenance.log": "\n".join(res.log) + "\n",
    }
    for n, (g, completed) in enumerate(res.balls, start=1):
        files[f"balls/ball_{n:02d}.json"] = _dump({"ball": g.to_json(), "completed": completed.to_json()})
        files[f"balls/ball_{n:02d}.dot"] = to_dot(completed, f"ball_{n:02d}")
        files[f"balls/ball_{n:02d}_partial.dot"] = to_dot(g, f"ball_{n:02d}_partial")
    return {k: v.encode() for k, v in files.items()}


def write_bundle(res: BuildResult, reports: list[Report], out: Path, timing: dict | None = None) -> dict:
    out = Path(out)
    files = bundle_files(res, reports)
    for name, data in sorted(files.items()):
        path = out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    manifest = {
        "tool_version": __version__,
        "config_sha256": sha256(files["config.txt"]),
        "outputs": {name: sha256(data) for name, data in sorted(files.items())},
        "timing": timing or {},
    }
    (out / "manifest.json").write_text(_dump(manifest))
    return manifest


def _read_json(root: Path, name: str):
    path = root / name
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SerializationError(f"{name}: not JSON ({exc})") from exc


def _field(name: str, loader, data):
    try:
        return loader(data)
    except (SerializationError, ValueError, KeyError, TypeError) as exc:
        raise SerializationError(f"{name}: {exc}") from exc


def load_bundle(path) -> BuildResult:
    """Rebuild a build result from disk.

    Raises ``FileNotFoundError`` for missing files and
    :class:`SerializationError` naming the offending file and field.
    """
    try:
        return _load(path)
    except (KeyError, TypeError, AttributeError) as exc:
        raise SerializationError(f"bundle is missing or mangles field {exc}") from exc


def _load(path) -> BuildResult:
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"no bundle directory at {root}")
    params = BuildParams.from_text((root / "config.txt").read_text())
    wit = _read_json(root, "witnesses.json")
    alpha_data = _read_json(root, "alpha.json")
    sets = {k: _field(f"witnesses.json:{k}", IntervalSet.from_json, wit[k]) for k in ("Y", "C", "A", "B", "D")}
    maps = {k: _field(f"witnesses.json:{k}", PiecewiseTranslation.from_json, wit[k]) for k in ("T", "V", "W", "I", "psi", "v_root")}
    gens = alpha_data.get("generators", {}) if isinstance(alpha_data, dict) else {}
    alpha = []
    for i in range(params.r):
        key = f"a{i + 1}"
        if key not in gens:
            raise SerializationError(f"alpha.json: generator {key} missing")
        alpha.append(_field(f"alpha.json:{key}", PiecewiseTranslation.from_json, gens[key]))
    balls = []
    for n in range(1, len(wit["Cn"]) + 1):
        name = f"balls/ball_{n:02d}.json"
        data = _read_json(root, name)
        balls.append((_field(name, PartialAction.from_json, data["ball"]), _field(name, MarkedAction.from_json, data["completed"])))
    return BuildResult(
        params=params,
        alpha=alpha,
        alpha_inf=[_field("witnesses.json:alpha_inf", PiecewiseTranslation.from_json, t) for t in wit["alpha_inf"]],
        Y=sets["Y"],
        C=sets["C"],
        Cn=[_field("witnesses.json:Cn", IntervalSet.from_json, x) for x in wit["Cn"]],
        blocks=[[_field("witnesses.json:blocks", IntervalSet.from_json, b) for b in row] for row in wit["blocks"]],
        Bn=[_field("witnesses.json:Bn", IntervalSet.from_json, x) for x in wit["Bn"]],
        A=sets["A"],
        B=sets["B"],
        D=sets["D"],
        T=maps["T"],
        V=maps["V"],
        W=maps["W"],
        I=maps["I"],
        psi=maps["psi"],
        phi=[_field("witnesses.json:phi", PreCycle.from_json, pc) for pc in wit["phi"]],
        U=[_field("witnesses.json:U", PiecewiseTranslation.from_json, u) for u in wit["U"]],
        balls=balls,
        eta=_field("witnesses.json:eta", parse_rat_strict, wit["eta"]),
        m0=int(wit["m0"]),
        v_level=int(wit["v_level"]),
        v_root=maps["v_root"],
        log=(root / "provenance.log").read_text().splitlines() if (root / "provenance.log").exists() else [],
    )


def output_digests(path) -> dict[str, str]:
    """Digests recorded in a bundle's manifest."""
    return json.loads((Path(path) / "manifest.json").read_text())["outputs"]


def recompute_digests(path) -> dict[str, str]:
    root = Path(path)
    return {
        str(p.relative_to(root)): sha256(p.read_bytes())
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name != "manifest.json"
    }

