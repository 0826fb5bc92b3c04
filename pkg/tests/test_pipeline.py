import copy
import json

import pytest

from nonspecific import cli, pipeline
from nonspecific.core import belief, plausibility
from nonspecific.errors import (
    FrameMismatchError,
    InputError,
    MassSumError,
    NonspecificError,
    SchemaError,
    UsageError,
)
from nonspecific.pipeline import RunConfig

BAKERS = json.loads(pipeline.bakers_fixture_path().read_text())


@pytest.fixture(scope="module")
def refined(bakers):
    return pipeline.run_refined(bakers)


@pytest.fixture(scope="module")
def overconfident(bakers):
    return pipeline.run_overconfident(bakers)


def write(tmp_path, doc, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return p


def mutated(fn):
    doc = copy.deepcopy(BAKERS)
    fn(doc)
    return doc


def test_fixture_loads(bakers):
    frame, prior, evs = pipeline.load_evidence(pipeline.bakers_fixture_path())
    assert frame.action_atoms == ("bo", "bi", "ro", "ri") and frame.events == ("E1", "E2")
    assert prior.masses == {1: 0.6, 2: 0.4}
    assert [e.id for e in evs] == ["e1", "e2", "e3", "e4"]


@pytest.mark.parametrize("change, exc, where", [
    (lambda d: d["domain_prior"].update({"2": 0.3}), MassSumError, "$.domain_prior"),
    (lambda d: d["evidence"][0]["focal"][0].update(mass=0), SchemaError, "$.evidence[0].focal[0].mass"),
    (lambda d: d["evidence"][1].update(id="e1"), SchemaError, "$.evidence[1].id"),
    (lambda d: d["evidence"][2]["focal"][0].update(action=["xx"]), InputError, "$.evidence[2].focal[0].action"),
    (lambda d: d["evidence"][2]["focal"][0].update(events=["E9"]), InputError, "$.evidence[2].focal[0].events"),
    (lambda d: d.update(version=2), SchemaError, "$.version"),
    (lambda d: d.pop("events"), SchemaError, "missing field 'events'"),
    (lambda d: d["domain_prior"].update({"0": 0.0}), SchemaError, "$.domain_prior.0"),
    (lambda d: d["evidence"][0]["focal"].append(
        {"action": ["bi"], "events": ["E1"], "mass": 0.5}), MassSumError, "$.evidence[0].focal"),
])
def test_load_errors(tmp_path, change, exc, where):
    with pytest.raises(exc) as info:
        pipeline.load_inputs(write(tmp_path, mutated(change)))
    assert where in str(info.value)
    assert info.value.exit_code == 2


def test_bad_json_reports_position(tmp_path):
    with pytest.raises(SchemaError, match="line 3"):
        pipeline.load_inputs(write(tmp_path, '{\n "version": 1,\n oops\n}'))
    with pytest.raises(InputError):
        pipeline.load_inputs(tmp_path / "missing.json")


def test_partition_and_modes_agree(refined, overconfident):
    assert refined.partition == overconfident.partition == [["e2", "e3"], ["e1", "e4"]]
    assert refined.conflict_profile == overconfident.conflict_profile
    assert refined.conflict_profile["mcf"] == pytest.approx(0.768)


def _interval(report, subset, query):
    row = next(r for r in report.subsets[subset - 1]["intervals"] if r["query"] == query)
    return row["bel"], row["pls"]


def test_refined_intervals(refined):
    assert _interval(refined, 2, "BO") == pytest.approx((0.5298, 0.9046), abs=5e-4)
    assert _interval(refined, 1, "B") == pytest.approx((0.3664, 0.8771), abs=5e-4)
    assert refined.assignment["best"] == {"1": "E2", "2": "E1"}


def test_overconfident_intervals(overconfident):
    assert _interval(overconfident, 1, "BI") == pytest.approx((0.483, 0.69), abs=5e-3)
    assert _interval(overconfident, 1, "I") == pytest.approx((0.483, 1.0), abs=5e-3)
    assert overconfident.subsets[0]["used"] == ["e2", "e3"]
    assert overconfident.evidence == [{"id": "e1", "home": 2}, {"id": "e2", "home": 1},
                                      {"id": "e3", "home": 1}, {"id": "e4", "home": 2}]


def test_report_regenerates_from_stored_masses(bakers, refined):
    queries = dict(pipeline.resolve_queries(bakers, None))
    for sub in refined.subsets:
        bpa = pipeline.bpa_from_rows(bakers, sub["bpa"])
        assert bpa.theta_mass == pytest.approx(sub["theta"], abs=1e-12)
        for row in sub["intervals"]:
            p = queries[row["query"]]
            assert belief(bpa, p) == pytest.approx(row["bel"], abs=1e-9)
            assert plausibility(bpa, p) == pytest.approx(row["pls"], abs=1e-9)
    stored = refined.stages["combined"]
    for sub in refined.subsets:
        assert stored[sub["index"]].isclose(pipeline.bpa_from_rows(bakers, sub["bpa"]), 1e-12)


def test_structured_round_trip(refined):
    data = pipeline.emit_report(refined, "structured")
    back = pipeline.parse_report(data)
    assert back == refined
    assert pipeline.emit_report(back, "structured") == data
    with pytest.raises(SchemaError):
        pipeline.parse_report(json.dumps({**json.loads(data), "version": 99}))


def test_human_format(bakers, refined):
    text = pipeline.emit_report(refined, "human", bakers).decode()
    assert "Pls(e1 in subset 1) = 0.3655" in text
    assert "[Bel(BO), Pls(BO)] = [0.5300, 0.9046]" in text
    assert "most believed: subset 1 -> E2, subset 2 -> E1" in text
    with pytest.raises(UsageError):
        pipeline.emit_report(refined, "yaml")


def test_determinism(bakers):
    a = pipeline.emit_report(pipeline.run_refined(bakers, RunConfig(seed=0)), "structured")
    b = pipeline.emit_report(pipeline.run_refined(bakers, RunConfig(seed=0)), "structured")
    assert a == b


def test_single_evidence(tmp_path):
    doc = mutated(lambda d: d.update(evidence=d["evidence"][:1], domain_prior={"1": 1.0}))
    inputs = pipeline.load_inputs(write(tmp_path, doc))
    report = pipeline.run_refined(inputs)
    assert report.partition == [["e1"]]
    row, = report.evidence
    assert row["falsity"] == 0.0 and row["falsity_alpha"] == 1.0
    assert report.subsets[0]["used"] == ["e1"]
    over = pipeline.run_overconfident(inputs)
    assert over.partition == [["e1"]] and len(over.subsets) == 1


def test_queries(bakers):
    assert [n for n, _ in pipeline.default_queries(bakers)] == ["BO", "BI", "B", "R", "I", "O", "E1", "E2"]
    p = pipeline.parse_query(bakers, "R@E2")
    assert p.action == frozenset({"ro", "ri"}) and p.events == frozenset({"E2"})
    assert pipeline.parse_query(bakers, "E1").action == frozenset(bakers.frame.action_atoms)
    assert pipeline.parse_query(bakers, "bo@E1|E2").events == frozenset({"E1", "E2"})
    with pytest.raises(UsageError):
        pipeline.parse_query(bakers, "nobody")
    report = pipeline.run_refined(bakers, RunConfig(queries=("B", "R@E2")))
    assert [r["query"] for r in report.subsets[0]["intervals"]] == ["B", "R@E2"]


def test_errors_carry_stage(tmp_path):
    # two flatly contradictory pieces of evidence, but the prior forbids a split
    doc = mutated(lambda d: d.update(domain_prior={"1": 1.0}, evidence=[
        {"id": "a", "focal": [{"action": ["bo"], "events": ["E1"], "mass": 1.0}]},
        {"id": "b", "focal": [{"action": ["ri"], "events": ["E1"], "mass": 1.0}]},
    ]))
    inputs = pipeline.load_inputs(write(tmp_path, doc))
    with pytest.raises(NonspecificError) as info:
        pipeline.run_refined(inputs)
    assert info.value.stage is not None
    assert info.value.exit_code == 3


def run_cli(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def fixture_arg():
    return str(pipeline.bakers_fixture_path())


@pytest.mark.parametrize("command", ["partition", "specify", "analyze", "assign-events"])
def test_cli_commands(capsys, fixture_arg, command):
    code, out, _ = run_cli(capsys, command, "--input", fixture_arg)
    assert code == 0
    doc = json.loads(out)
    assert doc["partition"] == [["e2", "e3"], ["e1", "e4"]]
    if command == "partition":
        assert doc["evidence"] == []
    if command == "specify":
        assert doc["subsets"] == [] and doc["assignment"] is None


def test_cli_overconfident_human(capsys, fixture_arg):
    code, out, _ = run_cli(capsys, "analyze", "--input", fixture_arg, "--mode", "overconfident",
                           "--format", "human", "--queries", "BI,I")
    assert code == 0
    assert "mode: overconfident" in out and "[Bel(I), Pls(I)]" in out


def test_cli_oracle(capsys, fixture_arg):
    code, out, _ = run_cli(capsys, "oracle", "--input", fixture_arg)
    assert code == 0 and json.loads(out)["agree"] is True


def test_cli_exit_codes(capsys, tmp_path, fixture_arg):
    bad = write(tmp_path, mutated(lambda d: d["domain_prior"].update({"2": 0.3})))
    code, _, err = run_cli(capsys, "analyze", "--input", str(bad))
    assert code == 2 and "$.domain_prior" in err
    clash = write(tmp_path, mutated(lambda d: d.update(domain_prior={"1": 1.0}, evidence=[
        {"id": "a", "focal": [{"action": ["bo"], "events": ["E1"], "mass": 1.0}]},
        {"id": "b", "focal": [{"action": ["ri"], "events": ["E1"], "mass": 1.0}]},
    ])), "clash.json")
    assert run_cli(capsys, "analyze", "--input", str(clash))[0] == 3
    assert run_cli(capsys, "analyze", "--input", fixture_arg, "--queries", "zz")[0] == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["analyze", "--input", fixture_arg, "--format", "yaml"])
    assert info.value.code == 2


def test_cli_resource_cap(capsys, tmp_path):
    ev = [{"id": f"x{i}", "focal": [{"action": ["bo"], "events": ["E1"], "mass": 0.5}]} for i in range(13)]
    path = write(tmp_path, mutated(lambda d: d.update(evidence=ev, domain_prior={"1": 1.0})))
    assert run_cli(capsys, "oracle", "--input", str(path))[0] == 4


def test_frame_mismatch_is_input_error():
    assert issubclass(FrameMismatchError, InputError)
