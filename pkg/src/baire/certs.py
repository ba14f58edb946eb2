"""Flat-file run artifacts: manifest, commitment log and one file per certificate.

Points and group elements are written as compact JSON arrays; their tuple
structure is decoded again by the action and group that produced them.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from . import __version__
from .engine import FaithfulnessWitness, FolnerCertificate, TransitivityWitness


def dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def cert_kind(cert) -> str:
    if isinstance(cert, TransitivityWitness):
        return "transitive"
    if isinstance(cert, FolnerCertificate):
        return "folner"
    if isinstance(cert, FaithfulnessWitness):
        return "faithful"
    raise TypeError(type(cert).__name__)


def render_certificate(cert, group) -> str:
    kind = cert_kind(cert)
    lines = [f"kind {kind}", f"engine {cert.engine}"]
    if kind == "transitive":
        lines += [
            f"word {dump(cert.word)}",
            f"formatted {group.format(cert.word)}",
            f"source {dump(cert.source)}",
            f"target {dump(cert.target)}",
        ]
    elif kind == "folner":
        w = cert.witness
        lines += [f"m {cert.m}", f"bound {w.bound}", f"strict {int(w.strict)}", f"size {w.size}"]
        for label, g, count in zip(w.labels, cert.elements, w.counts):
            lines.append(f"gen {label}\t{dump(g)}\t{count}")
        lines += [f"point {dump(p)}" for p in w.points]
    else:
        lines += [
            f"word {dump(cert.element)}",
            f"formatted {group.format(cert.element)}",
            f"point {dump(cert.point)}",
            f"image {dump(cert.image)}",
        ]
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> dict:
    """Raw fields of a certificate file; JSON fields stay undecoded."""
    out: dict = {"gens": [], "points": []}
    for line in text.splitlines():
        key, _, value = line.partition(" ")
        if key == "gen":
            label, elem, count = value.split("\t")
            out["gens"].append((label, json.loads(elem), int(count)))
        elif key == "point" and out.get("kind") == "folner":
            out["points"].append(json.loads(value))
        elif key in ("word", "source", "target", "point", "image"):
            out[key] = json.loads(value)
        elif key in ("m", "strict", "size"):
            out[key] = int(value)
        elif key == "bound":
            out[key] = Fraction(value)
        else:
            out[key] = value
    return out


def render_log(engines: dict) -> str:
    return "".join(
        f"{name}\t{dump(x)}\t{dump(z)}\n" for name, e in engines.items() for x, z in e.log
    )


def parse_log(text: str) -> dict:
    """Engine name -> list of raw (x, w(x)) pairs, in commitment order."""
    out: dict = {}
    for line in text.splitlines():
        if not line:
            continue
        name, x, z = line.split("\t")
        out.setdefault(name, []).append((json.loads(x), json.loads(z)))
    return out


def write_run(out: Path, input_text: str, composition, certificates, budget: int) -> Path:
    out = Path(out)
    certs_dir = out / "certs"
    certs_dir.mkdir(parents=True, exist_ok=True)
    for old in certs_dir.glob("*.txt"):
        old.unlink()
    files: dict = {}

    def put(rel: str, text: str):
        data = text.encode()
        (out / rel).write_bytes(data)
        files[rel] = sha256(data)

    put("input.txt", input_text)
    put("wlog.txt", render_log(composition.engines))
    groups = {name: e.group for name, e in composition.engines.items()}
    for i, cert in enumerate(certificates, start=1):
        put(f"certs/{i:04d}-{cert_kind(cert)}.txt", render_certificate(cert, groups[cert.engine]))
    lines = [
        f"engine-version {__version__}",
        f"input-sha256 {sha256(input_text.encode())}",
        f"budget {budget}",
    ]
    lines += [f"step {s.line()}" for s in composition.plan]
    lines += [f"ledger {e.vertex} {dump(e.element)}" for e in composition.ledger]
    lines.append(f"certificates {len(certificates)}")
    lines.append(f"wlog-sha256 {files['wlog.txt']}")
    lines += [f"file {rel} {digest}" for rel, digest in sorted(files.items())]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")
    return out / "manifest.txt"


def read_manifest(run_dir: Path) -> dict:
    run_dir = Path(run_dir)
    info: dict = {"files": {}, "steps": []}
    for line in (run_dir / "manifest.txt").read_text().splitlines():
        key, _, value = line.partition(" ")
        if key == "file":
            rel, digest = value.split(" ")
            info["files"][rel] = digest
        elif key == "step":
            info["steps"].append(value)
        else:
            info[key] = value
    return info
