#include "dtwin/synth/metrics.hpp"

#include "dtwin/error.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace dtwin::synth {

using graph::EdgeKind;
using graph::NodeKind;

namespace {

double pairs(double n) { return n * (n - 1) / 2; }

void same_universe(const Partition& a, const Partition& b) {
    bool same = a.size() == b.size();
    for (auto ia = a.begin(), ib = b.begin(); same && ia != a.end(); ++ia, ++ib) same = ia->first == ib->first;
    if (!same) fail(ErrorCode::UniverseMismatch, "partitions cover different elements");
}

std::string device_id(const graph::PropertyGraph& g, const std::string& tag) {
    auto s = graph::node_id(NodeKind::Sensor, tag);
    if (g.has_node(s)) return s;
    auto a = graph::node_id(NodeKind::Actuator, tag);
    if (g.has_node(a)) return a;
    return {};
}

}  // namespace

double ari(const Partition& a, const Partition& b) {
    same_universe(a, b);
    std::map<std::pair<std::string, std::string>, double> cells;
    std::map<std::string, double> rows, cols;
    for (const auto& [e, la] : a) {
        const auto& lb = b.at(e);
        cells[{la, lb}] += 1;
        rows[la] += 1;
        cols[lb] += 1;
    }
    double index = 0, sa = 0, sb = 0;
    for (const auto& [k, n] : cells) index += pairs(n);
    for (const auto& [k, n] : rows) sa += pairs(n);
    for (const auto& [k, n] : cols) sb += pairs(n);
    const double total = pairs(static_cast<double>(a.size()));
    const double expected = total > 0 ? sa * sb / total : 0.0;
    const double maximum = (sa + sb) / 2;
    if (maximum == expected) return 1.0;
    return (index - expected) / (maximum - expected);
}

double pairwise_f1(const Partition& truth, const Partition& predicted) {
    same_universe(truth, predicted);
    std::vector<std::pair<const std::string*, const std::string*>> items;
    for (const auto& [e, l] : truth) items.emplace_back(&l, &predicted.at(e));
    double both = 0, in_truth = 0, in_pred = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            bool t = *items[i].first == *items[j].first;
            bool p = *items[i].second == *items[j].second;
            in_truth += t;
            in_pred += p;
            both += t && p;
        }
    }
    if (in_truth == 0 && in_pred == 0) return 1.0;
    if (both == 0) return 0.0;
    double precision = both / in_pred, recall = both / in_truth;
    return 2 * precision * recall / (precision + recall);
}

double template_recovery(const std::vector<ExpectedTemplate>& expected, const std::vector<mining::Pattern>& mined) {
    if (expected.empty()) return 1.0;
    std::size_t found = 0;
    for (const auto& e : expected) {
        for (const auto& p : mined) {
            if (p.support == e.support && mining::isomorphic(p.code, e.code)) {
                ++found;
                break;
            }
        }
    }
    return static_cast<double>(found) / static_cast<double>(expected.size());
}

Partition functional_partition(const graph::PropertyGraph& g, const GroundTruth& truth) {
    Partition out;
    for (const auto& [tag, path] : truth.functionalPartition) {
        auto id = device_id(g, tag);
        std::string group = "<missing>";
        if (!id.empty()) {
            std::vector<std::string> chain;
            for (auto p = g.parent(id); p; p = g.parent(*p)) {
                const auto& n = g.node(*p);
                if (n.kind == NodeKind::FunctionalGroup) chain.push_back(n.name);
            }
            group.clear();
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) group += (group.empty() ? "" : "/") + *it;
        }
        out[tag] = group;
    }
    return out;
}

Partition physical_partition(const graph::PropertyGraph& g, const GroundTruth& truth) {
    Partition out;
    for (const auto& [tag, label] : truth.physicalPartition) {
        auto id = device_id(g, tag);
        if (id.empty()) continue;
        for (const auto* e : g.out_edges(id)) {
            if (e->kind == EdgeKind::MemberOfPhysical) {
                out[tag] = g.node(e->target).name;
                break;
            }
        }
    }
    return out;
}

std::vector<mining::Pattern> marked_templates(const graph::PropertyGraph& g) {
    std::vector<mining::Pattern> out;
    for (const auto& n : g.query({{NodeKind::TemplatePattern}, {}, {}})) {
        auto code = n.labels.find("code");
        auto support = n.labels.find(graph::label::support);
        if (code == n.labels.end() || support == n.labels.end()) continue;
        mining::Pattern p;
        p.code = mining::parse_code(graph::label_to_string(code->second));
        if (const auto* v = std::get_if<std::int64_t>(&support->second)) p.support = *v;
        p.maximal = true;
        out.push_back(std::move(p));
    }
    return out;
}

MetricsReport evaluate(const graph::PropertyGraph& g, const GroundTruth& truth, double runtimeSeconds) {
    MetricsReport r;
    r.runtimeSeconds = runtimeSeconds;
    r.components = static_cast<std::int64_t>(truth.functionalPartition.size());
    r.ari = ari(truth.functionalPartition, functional_partition(g, truth));

    auto predicted = physical_partition(g, truth);
    Partition expected;
    std::set<std::string> groups;
    std::int64_t correct = 0;
    for (const auto& [tag, label] : predicted) {
        expected[tag] = truth.physicalPartition.at(tag);
        groups.insert(label);
        correct += label == expected[tag];
    }
    for (const auto& [tag, label] : truth.physicalPartition) {
        auto id = device_id(g, tag);
        if (!id.empty() && g.node(id).labels.contains(graph::label::position_x)) ++r.knownComponents;
    }
    r.physicalGroups = static_cast<std::int64_t>(groups.size());
    r.physicalAri = predicted.empty() ? 0.0 : ari(expected, predicted);
    r.pairwiseF1 = predicted.empty() ? 0.0 : pairwise_f1(expected, predicted);
    r.classificationAccuracy =
        r.knownComponents ? static_cast<double>(correct) / static_cast<double>(r.knownComponents) : 0.0;

    auto mined = marked_templates(g);
    r.templatesExpected = static_cast<std::int64_t>(truth.templates.size());
    r.templatesMined = static_cast<std::int64_t>(mined.size());
    r.templateRecovery = template_recovery(truth.templates, mined);
    return r;
}

std::string format_metrics(const MetricsReport& r, bool withRuntime) {
    auto num = [](double v) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "ari = " << num(r.ari) << "\n";
    os << "physicalAri = " << num(r.physicalAri) << "\n";
    os << "pairwiseF1 = " << num(r.pairwiseF1) << "\n";
    os << "classificationAccuracy = " << num(r.classificationAccuracy) << "\n";
    os << "templateRecovery = " << num(r.templateRecovery) << "\n";
    if (withRuntime) os << "runtimeSeconds = " << num(r.runtimeSeconds) << "\n";
    os << "components = " << r.components << "\n";
    os << "knownComponents = " << r.knownComponents << "\n";
    os << "physicalGroups = " << r.physicalGroups << "\n";
    os << "templatesExpected = " << r.templatesExpected << "\n";
    os << "templatesMined = " << r.templatesMined << "\n";
    return os.str();
}

}  // namespace dtwin::synth
