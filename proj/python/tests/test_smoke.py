import dtwin
import pytest


@pytest.fixture(scope="module")
def plant():
    return dtwin.generate()


@pytest.fixture(scope="module")
def merged(plant):
    plc = dtwin.analyze_plc(plant["plc_xml"])
    dyn, _ = dtwin.analyze_dynamics(
        plant["plc_xml"], plant["io_csv"], plant["rtls_csv"], plant["labeled_rtls_csv"]
    )
    return dtwin.merge(plc, dyn)


def test_plc_graph(plant):
    g = dtwin.analyze_plc(plant["plc_xml"])
    assert g.count("Sensor") == 2
    assert g.count("Actuator") == 2
    assert g.has_node("FunctionalGroup:Warehouse")


def test_dynamics_assignments(plant):
    _, assignments = dtwin.analyze_dynamics(
        plant["plc_xml"], plant["io_csv"], plant["rtls_csv"], plant["labeled_rtls_csv"]
    )
    assert len(assignments) == 4


def test_graph_text_round_trip(merged):
    back = dtwin.Graph.from_text(merged.to_text())
    assert back.same_content(merged)
    assert back.node_count == merged.node_count


def test_mining_and_evaluation(plant, merged):
    patterns = dtwin.mine(merged, max_nodes=8)
    assert any("Sensor" in p["code"] and p["support"] == 2 for p in patterns)
    twin = dtwin.mark_templates(merged, max_nodes=8)
    metrics = dtwin.evaluate(twin, plant["ground_truth"])
    assert metrics["ari"] == 1.0
    assert metrics["classification_accuracy"] == 1.0


def test_aml_round_trip(merged):
    xml = dtwin.export_aml(merged)
    assert dtwin.validate_aml(xml) == []
    assert dtwin.import_aml(xml).same_content(merged)


def test_dtw_and_ari():
    a = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]
    b = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, 0.0)]
    assert dtwin.dtw_distance(a, b) == 0.0
    assert dtwin.dtw_distance(a, [(3.0, 4.0, 0.0)]) == pytest.approx(5.0 + 4.47213595499958)
    assert dtwin.ari({"a": "1", "b": "1"}, {"a": "x", "b": "x"}) == 1.0


def test_errors():
    with pytest.raises(dtwin.Error) as info:
        dtwin.analyze_plc("<broken")
    assert info.value.code == "XmlSyntax"
    with pytest.raises(dtwin.Error):
        dtwin.mine(dtwin.Graph(), min_support=1)


def test_run_all(tmp_path):
    (tmp_path / "mini.plantspec").write_text(dtwin.mini_plantspec())
    timings = dtwin.run_all("plantspec = mini.plantspec\noutDir = out\n", tmp_path)
    assert timings[0][0] == "synth"
    assert (tmp_path / "out" / "twin.aml").exists()
