"""Certificate checking against the commitment log alone.

The evaluator here reads ``w`` from the exported log and refuses to guess: any
point that a certificate needs but the log never decided is a failure. It shares
the reference actions with the builder but none of the engine code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .actions import Action, reference_space
from .certs import parse_certificate, parse_log, read_manifest, sha256
from .composed import HNNGroup
from .composer import compose, prepare_vertex_action
from .errors import CertificateFailure
from .graph import GraphOfGroups, Leaf, parse


class FrozenStep:
    def __init__(self, name: str, group, bases, raw_entries):
        self.name = name
        self.group = group
        self.X = reference_space(group, bases)
        if isinstance(group, HNNGroup):
            self.hnn = True
            self.dom = [group.embed(s) for s in group.sigma_sub.images]
            self.rng = [group.embed(s) for s in group.theta_sub.images]
        else:
            self.hnn = False
            self.dom = self.rng = [group.sigma_element(s) for s in range(group.sigma.order)]
        self.entries = [(self.X.decode_point(x), self.X.decode_point(z)) for x, z in raw_entries]
        self.fwd = dict(self.entries)
        self.bwd = {z: x for x, z in self.entries}

    def w(self, x):
        try:
            return self.fwd[x]
        except KeyError:
            raise CertificateFailure(f"{self.name}: w undefined at a point the certificate uses") from None

    def w_inv(self, z):
        try:
            return self.bwd[z]
        except KeyError:
            raise CertificateFailure(f"{self.name}: w^-1 undefined at a point the certificate uses") from None

    def evaluate(self, g, x):
        G, X = self.group, self.X
        if self.hnn:
            for eps, c in reversed(g.tail):
                x = X.apply(G.embed(c), x)
                x = self.w(x) if eps == 1 else self.w_inv(x)
            return X.apply(G.embed(g.head), x)
        for side, c in reversed(g.syllables):
            h = G.embed(side, c)
            x = X.apply(h, x) if side == 1 else self.w_inv(X.apply(h, self.w(x)))
        return X.apply(G.sigma_element(g.sigma), x)

    def equivariance_failures(self) -> list[str]:
        bad = []
        if len(self.fwd) != len(self.entries) or len(self.bwd) != len(self.entries):
            bad.append(f"{self.name}: log is not injective")
        for x, z in self.entries:
            for a, b in zip(self.dom, self.rng):
                if self.fwd.get(self.X.apply(a, x)) != self.X.apply(b, z):
                    bad.append(f"{self.name}: equivariance fails at an entry")
                    break
        return bad


class FrozenAction(Action):
    def __init__(self, step: FrozenStep):
        self.step = step
        self.group = step.group
        self.guarantees = {}

    def apply(self, g, x):
        return self.step.evaluate(g, x)

    def decode_point(self, obj):
        return self.step.X.decode_point(obj)


class Verifier:
    def __init__(self, graph: GraphOfGroups, logs: dict):
        self.graph = graph
        self.steps: dict = {}

        def build(node):
            if isinstance(node, Leaf):
                return prepare_vertex_action(graph, node.vertex)
            bases = [build(c) for c in node.children]
            name = node.edge.id
            step = FrozenStep(name, node.group, bases, logs.get(name, []))
            self.steps[name] = step
            return FrozenAction(step)

        build(graph.root)
        self.top = graph.root.edge.id

    def check(self, cert: dict) -> None:
        step = self.steps.get(cert.get("engine"))
        if step is None:
            raise CertificateFailure(f"unknown engine {cert.get('engine')!r}")
        G, X = step.group, step.X
        kind = cert.get("kind")
        if kind == "transitive":
            g = G.decode(cert["word"])
            if step.evaluate(g, X.decode_point(cert["source"])) != X.decode_point(cert["target"]):
                raise CertificateFailure("witness word does not reach the target")
        elif kind == "folner":
            points = [X.decode_point(p) for p in cert["points"]]
            members = set(points)
            if not points or len(members) != len(points) or len(points) != cert["size"]:
                raise CertificateFailure("Følner set is empty, repeats points or has the wrong size")
            bound = cert["bound"]
            for label, elem, count in cert["gens"]:
                g = G.decode(elem)
                inside = sum(1 for p in points if step.evaluate(g, p) in members)
                recount = 2 * (len(points) - inside)
                if recount != count:
                    raise CertificateFailure(f"generator {label}: recorded {count}, recount {recount}")
                r = Fraction(recount, len(points))
                if not (r < bound if cert["strict"] else r <= bound):
                    raise CertificateFailure(f"generator {label}: ratio {r} misses bound {bound}")
        elif kind == "faithful":
            g = G.decode(cert["word"])
            p = X.decode_point(cert["point"])
            q = step.evaluate(g, p)
            if q == p or q != X.decode_point(cert["image"]):
                raise CertificateFailure("faithfulness witness does not move its point")
        else:
            raise CertificateFailure(f"unknown certificate kind {kind!r}")

    def equivariance_failures(self) -> list[str]:
        return [msg for s in self.steps.values() for msg in s.equivariance_failures()]


@dataclass
class Report:
    lines: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.lines.append((name, ok, detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.lines)

    def render(self) -> str:
        return "".join(
            f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "") + "\n"
            for name, ok, detail in self.lines
        )


def faithful_targets(group, depth: int) -> list:
    """Nontrivial elements of word length at most ``depth`` in the standard generators."""
    return [g for g in group.ball(depth) if g != group.identity] if depth > 0 else []


def verify_run(run_dir, mode: str = "all", depth: int = 0) -> Report:
    run_dir = Path(run_dir)
    report = Report()
    manifest = read_manifest(run_dir)
    for rel, digest in manifest["files"].items():
        path = run_dir / rel
        actual = sha256(path.read_bytes()) if path.exists() else "missing"
        if actual != digest:
            report.add(f"digest {rel}", False, "file differs from the manifest")
    graph = parse((run_dir / "input.txt").read_text())
    logs = parse_log((run_dir / "wlog.txt").read_text())
    verifier = Verifier(graph, logs)
    kinds = {"folner", "transitive", "faithful"} if mode == "all" else {mode}
    certs = []
    for path in sorted((run_dir / "certs").glob("*.txt")):
        cert = parse_certificate(path.read_text())
        certs.append(cert)
        if cert.get("kind") in kinds:
            try:
                verifier.check(cert)
                report.add(path.name, True)
            except CertificateFailure as exc:
                report.add(path.name, False, str(exc))
    if mode in ("equivariance", "all"):
        bad = verifier.equivariance_failures()
        total = sum(len(s.entries) for s in verifier.steps.values())
        report.add("equivariance", not bad, f"{total} log entries" if not bad else bad[0])
    if mode in ("faithful", "all"):
        report.add(*_faithful_sweep(graph, logs, verifier, certs, depth))
    return report


def _faithful_sweep(graph, logs, verifier, certs, depth):
    top = verifier.steps[verifier.top]
    targets = faithful_targets(top.group, depth)
    covered = {
        top.group.decode(c["word"])
        for c in certs
        if c.get("kind") == "faithful" and c.get("engine") == verifier.top
    }
    missing = [g for g in targets if g not in covered]
    name = f"faithful depth {depth}"
    if not missing:
        return name, True, f"{len(targets)} elements already certified"
    # extend a replayed copy of the run for the uncovered elements, then check from its log
    comp = compose(graph)
    for ename, engine in comp.engines.items():
        X = engine.X
        engine.restore([(X.decode_point(x), X.decode_point(z)) for x, z in logs.get(ename, [])])
    witnesses = [comp.top.extend_faithful(g) for g in missing]
    grown = {
        ename: [(_plain(x), _plain(z)) for x, z in e.log] for ename, e in comp.engines.items()
    }
    fresh = Verifier(graph, grown)
    step = fresh.steps[fresh.top]
    for w in witnesses:
        if step.evaluate(w.element, w.point) == w.point:
            return name, False, f"no moved point for {step.group.format(w.element)}"
    return name, True, f"{len(targets)} elements, {len(missing)} certified during verification"


def _plain(obj):
    """Tuples to lists, as a JSON round trip would give."""
    if isinstance(obj, tuple):
        return [_plain(v) for v in obj]
    return obj
