#include "dtwin/aml/aml.hpp"
#include "dtwin/dynamics/analysis.hpp"
#include "dtwin/dynamics/classify.hpp"
#include "dtwin/error.hpp"
#include "dtwin/graph/persistence.hpp"
#include "dtwin/mining/templates.hpp"
#include "dtwin/pipeline/pipeline.hpp"
#include "dtwin/plc/analysis.hpp"
#include "dtwin/synth/metrics.hpp"
#include "dtwin/synth/plant.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <tuple>

namespace py = pybind11;
using namespace dtwin;

namespace {

using Xyz = std::tuple<double, double, double>;

dynamics::PositionSeries to_series(const std::string& owner, const std::vector<Xyz>& pts) {
    std::vector<dynamics::Point3> p;
    p.reserve(pts.size());
    for (const auto& [x, y, z] : pts) p.push_back({x, y, z});
    return dynamics::make_series(owner, p);
}

py::dict pattern_dict(const mining::Pattern& p) {
    py::dict d;
    d["code"] = mining::to_string(p.code);
    d["support"] = p.support;
    d["vertices"] = p.vertex_count();
    d["edges"] = p.edge_count();
    d["maximal"] = p.maximal;
    return d;
}

graph::NodeKind kind_of(const std::string& text) {
    auto k = graph::parse_node_kind(text);
    if (!k) throw Error(ErrorCode::InvalidArgument, "unknown node kind: " + text);
    return *k;
}

mining::ProjectionConfig projection(const std::optional<std::vector<std::string>>& excluded) {
    mining::ProjectionConfig pc;
    if (!excluded) return pc;
    pc.excludedKinds.clear();
    for (const auto& k : *excluded) pc.excludedKinds.insert(kind_of(k));
    return pc;
}

}  // namespace

PYBIND11_MODULE(_dtwin, m) {
    m.doc() = "Digital twin skeleton reconstruction";

    static py::handle error_type = py::exception<Error>(m, "Error").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::class_<graph::PropertyGraph>(m, "Graph")
        .def(py::init<>())
        .def_property_readonly("node_count", &graph::PropertyGraph::node_count)
        .def_property_readonly("edge_count", &graph::PropertyGraph::edge_count)
        .def("has_node", &graph::PropertyGraph::has_node)
        .def("node_ids", [](const graph::PropertyGraph& g) {
            std::vector<std::string> ids;
            for (const auto& [id, n] : g.nodes()) ids.push_back(id);
            return ids;
        })
        .def("count", [](const graph::PropertyGraph& g, const std::string& kind) {
            return g.query({{kind_of(kind)}, {}, {}}).size();
        })
        .def("to_text", &graph::serialize_graph)
        .def_static("from_text", py::overload_cast<const std::string&>(&graph::deserialize_graph))
        .def("save", &graph::save_graph)
        .def_static("load", &graph::load_graph)
        .def("same_content", &graph::same_content);

    m.def("merge", &graph::merge, py::arg("a"), py::arg("b"));

    m.def(
        "generate",
        [](const std::string& spec_text) {
            auto spec = spec_text.empty() ? synth::PlantSpec::mini() : synth::parse_plantspec(spec_text);
            auto p = synth::generate(spec);
            py::dict d;
            d["plc_xml"] = p.plcXml;
            d["io_csv"] = p.ioCsv;
            d["rtls_csv"] = p.rtlsCsv;
            d["labeled_rtls_csv"] = p.labeledRtlsCsv;
            d["ground_truth"] = p.groundTruth.to_json();
            return d;
        },
        py::arg("plantspec") = "", "Synthetic plant from plantspec text; the small fixture when empty.");
    m.def("mini_plantspec", [] { return synth::format_plantspec(synth::PlantSpec::mini()); });
    m.def("full_plantspec", [] { return synth::format_plantspec(synth::PlantSpec::full_scale()); });

    m.def("analyze_plc", [](const std::string& xml) { return plc::analyze_plc(xml).graph; }, py::arg("xml"));

    m.def(
        "analyze_dynamics",
        [](const std::string& xml, const std::string& io, const std::string& rtls, const std::string& labeled,
           std::optional<std::size_t> band) {
            auto project = plc::prepare(plc::parse_project(xml));
            dynamics::DynamicsInputs in;
            in.rootName = project.name;
            in.tags = dynamics::tag_infos(project);
            in.io = dynamics::parse_io_trace(io).samples;
            in.rtls = dynamics::parse_rtls_trace(rtls).samples;
            in.labeledRtls = dynamics::parse_rtls_trace(labeled).samples;
            dynamics::DynamicsConfig config;
            config.dtw.band = band;
            auto r = dynamics::analyze_dynamics(in, config);
            return py::make_tuple(r.graph, r.assignments);
        },
        py::arg("xml"), py::arg("io_csv"), py::arg("rtls_csv"), py::arg("labeled_rtls_csv"), py::arg("band") = py::none());

    m.def(
        "dtw_distance",
        [](const std::vector<Xyz>& a, const std::vector<Xyz>& b, std::optional<std::size_t> band) {
            return dynamics::dtw_distance(to_series("a", a), to_series("b", b), band);
        },
        py::arg("a"), py::arg("b"), py::arg("band") = py::none());

    m.def(
        "mine",
        [](const graph::PropertyGraph& g, std::int64_t min_support, std::size_t min_nodes, std::size_t max_nodes,
           std::optional<std::vector<std::string>> excluded, bool select) {
            mining::MiningParams p;
            p.minSupport = min_support;
            p.minNodes = min_nodes;
            p.maxNodes = max_nodes;
            auto patterns = mining::mine(mining::project_for_mining(g, projection(excluded)), p);
            if (select) patterns = mining::select_templates(patterns);
            py::list out;
            for (const auto& pt : patterns) out.append(pattern_dict(pt));
            return out;
        },
        py::arg("graph"), py::arg("min_support") = 2, py::arg("min_nodes") = 3, py::arg("max_nodes") = 12,
        py::arg("excluded_kinds") = py::none(), py::arg("select") = true);

    m.def(
        "mark_templates",
        [](const graph::PropertyGraph& g, std::int64_t min_support, std::size_t max_nodes,
           std::optional<std::vector<std::string>> excluded) {
            mining::MiningParams p;
            p.minSupport = min_support;
            p.maxNodes = max_nodes;
            auto mg = mining::project_for_mining(g, projection(excluded));
            return mining::mark_templates(g, mg, mining::select_templates(mining::mine(mg, p))).graph;
        },
        py::arg("graph"), py::arg("min_support") = 2, py::arg("max_nodes") = 12, py::arg("excluded_kinds") = py::none());

    m.def("export_aml", [](const graph::PropertyGraph& g) { return aml::export_aml(g).xml; }, py::arg("graph"));
    m.def("import_aml", [](const std::string& xml) { return aml::import_aml(xml); }, py::arg("xml"));
    m.def("validate_aml", [](const std::string& xml) { return aml::validate_aml(xml); }, py::arg("xml"));

    m.def("ari", &synth::ari, py::arg("a"), py::arg("b"));
    m.def("pairwise_f1", &synth::pairwise_f1, py::arg("truth"), py::arg("predicted"));

    m.def(
        "evaluate",
        [](const graph::PropertyGraph& g, const std::string& ground_truth_json) {
            auto r = synth::evaluate(g, synth::GroundTruth::from_json(ground_truth_json));
            py::dict d;
            d["ari"] = r.ari;
            d["physical_ari"] = r.physicalAri;
            d["pairwise_f1"] = r.pairwiseF1;
            d["classification_accuracy"] = r.classificationAccuracy;
            d["template_recovery"] = r.templateRecovery;
            d["components"] = r.components;
            d["physical_groups"] = r.physicalGroups;
            return d;
        },
        py::arg("graph"), py::arg("ground_truth_json"));

    m.def(
        "run_all",
        [](const std::string& config_text, const std::filesystem::path& base_dir) {
            auto config = pipeline::parse_config(config_text, base_dir);
            std::vector<std::pair<std::string, double>> out;
            {
                py::gil_scoped_release release;
                for (const auto& t : pipeline::run_all(config)) out.emplace_back(t.stage, t.seconds);
            }
            return out;
        },
        py::arg("config_text"), py::arg("base_dir") = std::filesystem::path{},
        "Runs every stage from a key = value configuration; returns (stage, seconds) pairs.");
}
