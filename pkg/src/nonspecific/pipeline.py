"""Input loading, end-to-end analysis and report emission.

Input files are JSON::

    {
      "version": 1,
      "action_frame": ["bo", "bi", "ro", "ri"],
      "events": ["E1", "E2"],
      "labels": {"B": ["bo", "bi"], ...},          # optional names for action sets
      "domain_prior": {"1": 0.6, "2": 0.4},
      "evidence": [
        {"id": "e1", "focal": [{"action": ["bo"], "events": ["E1"], "mass": 0.8}]},
        ...
      ]
    }

Whatever mass a piece of evidence leaves unassigned goes to the whole frame.
"""

from __future__ import annotations

import copy
import json
import math
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .assignment import AssignmentResult, assign_events, project_events
from .core import (
    DEFAULT_PRODUCT_CAP,
    EPS,
    Evidence,
    EvidenceStore,
    Frame,
    MassFunction,
    Proposition,
    belief,
    combine,
    plausibility,
)
from .discounting import discount_store, subset_credibilities, subset_discount
from .errors import InputError, MassSumError, NonspecificError, SchemaError, UsageError
from .metaconflict import DomainPrior, minimize
from .specifier import specify_all

INPUT_VERSION = 1
REPORT_VERSION = 1
REFINED = "refined"
OVERCONFIDENT = "overconfident"


@dataclass(frozen=True)
class Inputs:
    frame: Frame
    prior: DomainPrior
    evidences: tuple[Evidence, ...]
    labels: dict[str, frozenset] = field(default_factory=dict)


@dataclass(frozen=True)
class RunConfig:
    restarts: int = 32
    seed: int = 0
    exact_threshold: int = 8
    queries: tuple[str, ...] | None = None
    cap: int = DEFAULT_PRODUCT_CAP


# -- loading ---------------------------------------------------------------

def _fail(path: str, msg: str, exc=SchemaError):
    raise exc(f"{path}: {msg}")


def _str_list(value, path: str, allowed: Sequence[str] | None = None) -> list[str]:
    if not isinstance(value, list) or not value:
        _fail(path, "expected a nonempty list of strings")
    for i, v in enumerate(value):
        if not isinstance(v, str) or not v:
            _fail(f"{path}[{i}]", f"expected a nonempty string, got {v!r}")
        if allowed is not None and v not in allowed:
            _fail(f"{path}[{i}]", f"unknown label {v!r}")
    if len(set(value)) != len(value):
        _fail(path, "duplicate entries")
    return value


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        _fail(path, f"expected a finite number, got {value!r}")
    return float(value)


def parse_inputs(doc: Any) -> Inputs:
    if not isinstance(doc, dict):
        _fail("$", "top level must be an object")
    allowed = {"version", "description", "action_frame", "events", "labels",
               "domain_prior", "evidence"}
    extra = set(doc) - allowed
    if extra:
        _fail("$", f"unknown fields {sorted(extra)}")
    for key in ("version", "action_frame", "events", "domain_prior", "evidence"):
        if key not in doc:
            _fail("$", f"missing field {key!r}")
    if doc["version"] != INPUT_VERSION or isinstance(doc["version"], bool):
        _fail("$.version", f"unsupported input version {doc['version']!r} (supported: {INPUT_VERSION})")

    atoms = _str_list(doc["action_frame"], "$.action_frame")
    events = _str_list(doc["events"], "$.events")
    frame = Frame(tuple(atoms), tuple(events))

    labels: dict[str, frozenset] = {}
    raw_labels = doc.get("labels", {})
    if not isinstance(raw_labels, dict):
        _fail("$.labels", "expected an object")
    for name, members in raw_labels.items():
        labels[name] = frozenset(_str_list(members, f"$.labels.{name}", atoms))

    raw_prior = doc["domain_prior"]
    if not isinstance(raw_prior, dict) or not raw_prior:
        _fail("$.domain_prior", "expected a nonempty object mapping counts to probabilities")
    prior_masses = {}
    for key, val in raw_prior.items():
        p = f"$.domain_prior.{key}"
        if not str(key).isdigit() or int(key) < 1:
            _fail(p, "subset count must be a positive integer")
        m = _number(val, p)
        if m < 0:
            _fail(p, "probability must be >= 0")
        prior_masses[int(key)] = m
    total = math.fsum(prior_masses.values())
    if abs(total - 1.0) > EPS:
        _fail("$.domain_prior", f"probabilities sum to {total:.12g}, expected 1", MassSumError)
    prior = DomainPrior(prior_masses)

    raw_ev = doc["evidence"]
    if not isinstance(raw_ev, list) or not raw_ev:
        _fail("$.evidence", "expected a nonempty list")
    evidences, seen = [], set()
    for i, item in enumerate(raw_ev):
        p = f"$.evidence[{i}]"
        if not isinstance(item, dict) or set(item) - {"id", "focal"}:
            _fail(p, "expected an object with fields 'id' and 'focal'")
        eid = item.get("id")
        if not isinstance(eid, str) or not eid:
            _fail(f"{p}.id", "expected a nonempty string")
        if eid in seen:
            _fail(f"{p}.id", f"duplicate evidence id {eid!r}")
        seen.add(eid)
        focal = item.get("focal")
        if not isinstance(focal, list):
            _fail(f"{p}.focal", "expected a list")
        pairs = []
        for j, f in enumerate(focal):
            fp = f"{p}.focal[{j}]"
            if not isinstance(f, dict) or set(f) != {"action", "events", "mass"}:
                _fail(fp, "expected an object with fields 'action', 'events', 'mass'")
            action = _str_list(f["action"], f"{fp}.action", atoms)
            evs = _str_list(f["events"], f"{fp}.events", events)
            mass = _number(f["mass"], f"{fp}.mass")
            if not 0.0 < mass <= 1.0:
                _fail(f"{fp}.mass", f"focal mass must lie in (0, 1], got {mass!r}")
            pairs.append((frame.proposition(action, evs), mass))
        msum = math.fsum(m for _, m in pairs)
        if msum > 1.0 + EPS:
            _fail(f"{p}.focal", f"masses sum to {msum:.12g} > 1", MassSumError)
        evidences.append(Evidence(eid, MassFunction(frame, pairs)))
    return Inputs(frame, prior, tuple(evidences), labels)


def load_inputs(path) -> Inputs:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read input ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return parse_inputs(doc)
    except InputError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def load_evidence(path) -> tuple[Frame, DomainPrior, list[Evidence]]:
    inputs = load_inputs(path)
    return inputs.frame, inputs.prior, list(inputs.evidences)


def bakers_fixture_path() -> Path:
    return Path(str(resources.files("nonspecific") / "data" / "bakers.json"))


def load_bakers() -> Inputs:
    return load_inputs(bakers_fixture_path())


# -- naming and queries ----------------------------------------------------

def action_name(inputs: Inputs, action: frozenset) -> str:
    for name, members in inputs.labels.items():
        if members == action:
            return name
    if len(action) == len(inputs.frame.action_atoms):
        return "*"
    return "{" + ",".join(a for a in inputs.frame.action_atoms if a in action) + "}"


def proposition_name(inputs: Inputs, p: Proposition) -> str:
    if p.is_theta:
        return "Theta"
    e = "|".join(x for x in inputs.frame.events if x in p.events)
    if len(p.events) == len(inputs.frame.events):
        return action_name(inputs, p.action)
    if len(p.action) == len(inputs.frame.action_atoms):
        return e
    return f"{action_name(inputs, p.action)}@{e}"


def default_queries(inputs: Inputs) -> list[tuple[str, Proposition]]:
    """Every labelled action set, every focal action part, then every event."""
    frame = inputs.frame
    out: dict[Proposition, str] = {}
    for name, members in inputs.labels.items():
        out.setdefault(frame.proposition(members, None), name)
    for e in inputs.evidences:
        for p in e.bpa.focal:
            q = frame.proposition(p.action, None)
            if not q.is_theta:
                out.setdefault(q, action_name(inputs, p.action))
    for ev in frame.events:
        out.setdefault(frame.proposition(None, [ev]), ev)
    return [(name, p) for p, name in out.items()]


def parse_query(inputs: Inputs, token: str) -> Proposition:
    """``ACTION[@EV1|EV2]`` where ACTION is a label, an atom or ``*``; a bare
    event label queries that event."""
    frame = inputs.frame
    token = token.strip()
    if token in frame.events and token not in inputs.labels and token not in frame.action_atoms:
        return frame.proposition(None, [token])
    action_tok, _, event_tok = token.partition("@")
    if action_tok == "*":
        action = None
    elif action_tok in inputs.labels:
        action = inputs.labels[action_tok]
    elif action_tok in frame.action_atoms:
        action = [action_tok]
    else:
        raise UsageError(f"unknown query {token!r}")
    events = None
    if event_tok:
        events = event_tok.split("|")
        unknown = [x for x in events if x not in frame.events]
        if unknown:
            raise UsageError(f"unknown events {unknown} in query {token!r}")
    return frame.proposition(action, events)


def resolve_queries(inputs: Inputs, queries: Sequence[str] | None) -> list[tuple[str, Proposition]]:
    if queries is None:
        return default_queries(inputs)
    return [(q.strip(), parse_query(inputs, q)) for q in queries if q.strip()]


# -- reports ---------------------------------------------------------------

@dataclass
class AnalysisReport:
    """JSON-native record of one run; ``stages`` keeps the live objects."""

    mode: str
    settings: dict
    evidence_ids: list
    partition: list
    conflict_profile: dict
    evidence: list
    subsets: list
    assignment: dict | None
    version: int = REPORT_VERSION
    stages: dict | None = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)
                if f.name != "stages"}

    @classmethod
    def from_dict(cls, d: dict) -> AnalysisReport:
        if d.get("version") != REPORT_VERSION:
            raise SchemaError(f"unsupported report version {d.get('version')!r}")
        return cls(**{k: d[k] for k in ("mode", "settings", "evidence_ids", "partition",
                                         "conflict_profile", "evidence", "subsets",
                                         "assignment", "version")})


@contextmanager
def _stage(name: str):
    try:
        yield
    except NonspecificError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def _bpa_rows(inputs: Inputs, bpa: MassFunction) -> list[dict]:
    frame = inputs.frame
    return [{"action": [a for a in frame.action_atoms if a in p.action],
             "events": [e for e in frame.events if e in p.events],
             "mass": m} for p, m in bpa.focal.items()]


def bpa_from_rows(inputs: Inputs, rows: list[dict]) -> MassFunction:
    frame = inputs.frame
    return MassFunction(frame, [(frame.proposition(r["action"], r["events"]), r["mass"])
                                for r in rows])


def _intervals(bpa: MassFunction, queries) -> list[dict]:
    return [{"query": name, "bel": belief(bpa, p), "pls": plausibility(bpa, p)}
            for name, p in queries]


def _settings(config: RunConfig, queries) -> dict:
    return {"restarts": config.restarts, "seed": config.seed,
            "exact_threshold": config.exact_threshold,
            "queries": [name for name, _ in queries]}


def _partition(inputs: Inputs, store, config: RunConfig):
    with _stage("partition"):
        return minimize(store, inputs.prior, restarts=config.restarts, seed=config.seed,
                        exact_threshold=config.exact_threshold, cap=config.cap)


def run_partition(inputs: Inputs, config: RunConfig = RunConfig()) -> AnalysisReport:
    partition, profile = _partition(inputs, inputs.evidences, config)
    return AnalysisReport(
        mode="partition", settings=_settings(config, []),
        evidence_ids=[e.id for e in inputs.evidences],
        partition=[list(b) for b in partition.blocks],
        conflict_profile={"c0": profile.c0, "subset_conflicts": list(profile.subset_conflicts),
                          "mcf": profile.mcf},
        evidence=[], subsets=[], assignment=None,
        stages={"partition": partition, "profile": profile})


def run_refined(inputs: Inputs, config: RunConfig = RunConfig(),
                assign: bool = True) -> AnalysisReport:
    """Partition, specify, discount for falsity and credibility, combine per
    subset and finally assign events to subsets."""
    queries = resolve_queries(inputs, config.queries)
    store = EvidenceStore(inputs.evidences)
    partition, profile = _partition(inputs, store, config)
    with _stage("specify"):
        specs = specify_all(partition, inputs.prior, store, config.cap)
    with _stage("falsity-discount"):
        falsity_alpha = discount_store(store, specs)
    with _stage("credibility"):
        creds = {s.q: subset_credibilities(s) for s in specs}
    discounted = {e.id: e for e in store}
    spec_by_id = {s.q: s for s in specs}

    subsets, combined = [], {}
    with _stage("combine"):
        for j in range(1, partition.r + 1):
            used = [eid for eid in (e.id for e in inputs.evidences)
                    if spec_by_id[eid].pls(j) > 0.0]
            bpas = [subset_discount(discounted[eid], creds[eid], j).bpa for eid in used]
            bpa, k = combine(bpas, config.cap) if bpas else (MassFunction.vacuous(inputs.frame), 0.0)
            combined[j] = bpa
            subsets.append({"index": j, "members": list(partition.block(j)), "used": used,
                            "conflict": k, "bpa": _bpa_rows(inputs, bpa),
                            "theta": bpa.theta_mass, "intervals": _intervals(bpa, queries)})

    assignment = None
    result = None
    if assign:
        with _stage("assign-events"):
            result = assign_events([project_events(combined[j], j) for j in combined],
                                   inputs.frame.events)
        assignment = _assignment_dict(result)

    evidence = []
    for e in inputs.evidences:
        s = spec_by_id[e.id]
        evidence.append({
            "id": e.id, "home": s.home, "case": s.case,
            "membership": {str(j): [b, p] for j, (b, p) in s.per_subset.items()},
            "falsity": s.falsity, "falsity_alpha": falsity_alpha[e.id],
            "credibility": {str(j): a for j, a in creds[e.id].alpha.items()},
            "discounted_bpa": _bpa_rows(inputs, discounted[e.id].bpa),
        })
    return AnalysisReport(
        mode=REFINED, settings=_settings(config, queries),
        evidence_ids=[e.id for e in inputs.evidences],
        partition=[list(b) for b in partition.blocks],
        conflict_profile={"c0": profile.c0, "subset_conflicts": list(profile.subset_conflicts),
                          "mcf": profile.mcf},
        evidence=evidence, subsets=subsets, assignment=assignment,
        stages={"partition": partition, "profile": profile, "specs": specs,
                "credibilities": creds, "discounted": discounted, "combined": combined,
                "assignment": result, "queries": queries})


def run_overconfident(inputs: Inputs, config: RunConfig = RunConfig()) -> AnalysisReport:
    """Partition and combine each subset's original evidence, nothing more."""
    queries = resolve_queries(inputs, config.queries)
    partition, profile = _partition(inputs, inputs.evidences, config)
    by_id = {e.id: e for e in inputs.evidences}
    subsets, combined = [], {}
    with _stage("combine"):
        for j, block in enumerate(partition.blocks, start=1):
            bpa, k = combine([by_id[x].bpa for x in block], config.cap)
            combined[j] = bpa
            subsets.append({"index": j, "members": list(block), "used": list(block),
                            "conflict": k, "bpa": _bpa_rows(inputs, bpa),
                            "theta": bpa.theta_mass, "intervals": _intervals(bpa, queries)})
    home = partition.assignment
    return AnalysisReport(
        mode=OVERCONFIDENT, settings=_settings(config, queries),
        evidence_ids=[e.id for e in inputs.evidences],
        partition=[list(b) for b in partition.blocks],
        conflict_profile={"c0": profile.c0, "subset_conflicts": list(profile.subset_conflicts),
                          "mcf": profile.mcf},
        evidence=[{"id": e.id, "home": home[e.id]} for e in inputs.evidences],
        subsets=subsets, assignment=None,
        stages={"partition": partition, "profile": profile, "combined": combined,
                "queries": queries})


def run(inputs: Inputs, mode: str = REFINED, config: RunConfig = RunConfig()) -> AnalysisReport:
    if mode == REFINED:
        return run_refined(inputs, config)
    if mode == OVERCONFIDENT:
        return run_overconfident(inputs, config)
    raise UsageError(f"unknown mode {mode!r}")


def _assignment_dict(result: AssignmentResult) -> dict:
    subsets = result.bpa.subsets

    def as_map(a):
        return {str(s): ev for s, ev in zip(subsets, a)}

    return {
        "conflict": result.conflict,
        "focal": [{"assignments": [as_map(a) for a in sorted(s, key=list(result.intervals).index)],
                   "mass": m} for s, m in result.bpa.focal.items()],
        "intervals": [{"assignment": as_map(a), "bel": b, "pls": p}
                      for a, (b, p) in result.intervals.items()],
        "best": as_map(result.best()),
    }


# -- emission --------------------------------------------------------------

def emit_report(report: AnalysisReport, format: str = "structured",
                inputs: Inputs | None = None) -> bytes:
    if format == "structured":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")
    if format == "human":
        return _human(report, inputs).encode("utf-8")
    raise UsageError(f"unknown report format {format!r} (use 'structured' or 'human')")


def parse_report(data: bytes | str) -> AnalysisReport:
    try:
        return AnalysisReport.from_dict(json.loads(data))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SchemaError(f"not a structured report: {exc}") from exc


def _f(x: float) -> str:
    return f"{x:.4f}"


def _focal_name(row: dict, inputs: Inputs | None) -> str:
    if inputs is None:
        return "{" + ",".join(row["action"]) + "} & {" + "|".join(row["events"]) + "}"
    p = inputs.frame.proposition(row["action"], row["events"])
    a = action_name(inputs, p.action)
    return f"{a} & {'|'.join(x for x in inputs.frame.events if x in p.events)}"


def _human(report: AnalysisReport, inputs: Inputs | None) -> str:
    out = [f"mode: {report.mode}"]
    prof = report.conflict_profile
    out.append(f"partition: Mcf = {_f(prof['mcf'])}, c0 = {_f(prof['c0'])}")
    for i, (block, c) in enumerate(zip(report.partition, prof["subset_conflicts"]), start=1):
        out.append(f"  subset {i}: {', '.join(block)}  (conflict {_f(c)})")
    if report.mode == REFINED:
        out.append("specification:")
        for ev in report.evidence:
            q = ev["id"]
            out.append(f"  {q}: home subset {ev['home']} ({ev['case']}), "
                       f"falsity {_f(ev['falsity'])}, falsity credibility {_f(ev['falsity_alpha'])}")
            for j, (b, p) in ev["membership"].items():
                out.append(f"    Bel({q} in subset {j}) = {_f(b)}")
                out.append(f"    Pls({q} in subset {j}) = {_f(p)}")
                out.append(f"    alpha({q} in subset {j}) = {_f(ev['credibility'][j])}")
    for s in report.subsets:
        out.append(f"subset {s['index']}: combined from {', '.join(s['used']) or 'nothing'} "
                   f"(k = {_f(s['conflict'])})")
        for row in s["bpa"]:
            out.append(f"  m({_focal_name(row, inputs)}) = {_f(row['mass'])}")
        out.append(f"  m(Theta) = {_f(s['theta'])}")
        for iv in s["intervals"]:
            name = iv["query"]
            out.append(f"  [Bel({name}), Pls({name})] = [{_f(iv['bel'])}, {_f(iv['pls'])}]")
    if report.assignment is not None:
        a = report.assignment
        out.append(f"event assignment: k = {_f(a['conflict'])}")

        def fmt(m):
            return ", ".join(f"subset {s} -> {ev}" for s, ev in m.items())

        for iv in a["intervals"]:
            out.append(f"  [{fmt(iv['assignment'])}] = [{_f(iv['bel'])}, {_f(iv['pls'])}]")
        out.append(f"  most believed: {fmt(a['best'])}")
    return "\n".join(out) + "\n"
