#include "dtwin/synth/plant.hpp"

#include "dtwin/error.hpp"
#include "dtwin/graph/property_graph.hpp"
#include "dtwin/mining/mining_graph.hpp"
#include "dtwin/plc/project.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace dtwin::synth {

using dynamics::Point3;
using graph::EdgeKind;
using graph::NodeKind;

std::string_view to_string(Granularity g) noexcept {
    switch (g) {
        case Granularity::Place: return "Place";
        case Granularity::Row: return "Row";
        case Granularity::Level: return "Level";
    }
    return "?";
}

std::string_view to_string(ExtraScope s) noexcept {
    switch (s) {
        case ExtraScope::Row: return "row";
        case ExtraScope::Level: return "level";
        case ExtraScope::Plant: return "plant";
    }
    return "?";
}

PlantSpec PlantSpec::mini() { return PlantSpec{}; }

PlantSpec PlantSpec::full_scale() {
    PlantSpec s;
    s.levels = 2;
    s.rowsPerLevel = 4;
    s.placesPerRow = 2;
    s.extraComponents = {{ExtraScope::Level, true, 8},
                         {ExtraScope::Level, false, 4},
                         {ExtraScope::Plant, true, 3},
                         {ExtraScope::Plant, false, 1}};
    s.trayCount = 4;
    s.materialKinds = 4;
    s.rtlsNoiseSigmaM = 0.05;
    s.simDurationS = 1800;
    s.seed = 7;
    s.locationGranularity = Granularity::Row;
    return s;
}

void validate(const PlantSpec& s) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorCode::InvalidSpec, what);
    };
    need(!s.name.empty(), "name must not be empty");
    need(s.levels >= 1, "levels must be at least 1");
    need(s.rowsPerLevel >= 1, "rowsPerLevel must be at least 1");
    need(s.placesPerRow >= 1, "placesPerRow must be at least 1");
    need(s.trayCount >= 1, "trayCount must be at least 1");
    need(s.materialKinds >= 1, "materialKinds must be at least 1");
    need(std::isfinite(s.rtlsRateHz) && s.rtlsRateHz > 0 && s.rtlsRateHz <= 250, "rtlsRateHz must be in (0, 250]");
    need(std::isfinite(s.rtlsNoiseSigmaM) && s.rtlsNoiseSigmaM >= 0, "rtlsNoiseSigmaM must be non-negative");
    need(std::isfinite(s.simDurationS) && s.simDurationS > 0, "simDurationS must be positive");
    need(std::isfinite(s.traySpeedMps) && s.traySpeedMps > 0, "traySpeedMps must be positive");
    need(s.dwellMs >= 1, "dwellMs must be positive");
    for (const auto& e : s.extraComponents) {
        need(e.count >= 1, "extra component counts must be at least 1");
        need(e.scope != ExtraScope::Level || s.levels >= 2, "level extras need at least two levels");
    }
}

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& key, const std::string& v) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        fail(ErrorCode::InvalidSpec, "key '" + key + "': '" + v + "' is not a number");
    }
    return out;
}

std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

ExtraComponent parse_extra(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() != 3) fail(ErrorCode::InvalidSpec, "extra component '" + text + "' is not scope:kind:count");
    ExtraComponent e;
    if (parts[0] == "row") {
        e.scope = ExtraScope::Row;
    } else if (parts[0] == "level") {
        e.scope = ExtraScope::Level;
    } else if (parts[0] == "plant") {
        e.scope = ExtraScope::Plant;
    } else {
        fail(ErrorCode::InvalidSpec, "unknown extra scope '" + parts[0] + "'");
    }
    if (parts[1] == "sensor") {
        e.sensor = true;
    } else if (parts[1] == "actuator") {
        e.sensor = false;
    } else {
        fail(ErrorCode::InvalidSpec, "unknown extra kind '" + parts[1] + "'");
    }
    e.count = number<int>("extraComponents", parts[2]);
    return e;
}

}  // namespace

PlantSpec parse_plantspec(std::string_view text) {
    PlantSpec s;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorCode::InvalidSpec, "line " + std::to_string(lineno) + ": expected key = value");
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        if (key == "name") {
            s.name = value;
        } else if (key == "levels") {
            s.levels = number<int>(key, value);
        } else if (key == "rowsPerLevel") {
            s.rowsPerLevel = number<int>(key, value);
        } else if (key == "placesPerRow") {
            s.placesPerRow = number<int>(key, value);
        } else if (key == "extraComponents") {
            s.extraComponents.clear();
            if (!value.empty()) {
                for (const auto& item : split(value, ',')) s.extraComponents.push_back(parse_extra(item));
            }
        } else if (key == "trayCount") {
            s.trayCount = number<int>(key, value);
        } else if (key == "materialKinds") {
            s.materialKinds = number<int>(key, value);
        } else if (key == "rtlsRateHz") {
            s.rtlsRateHz = number<double>(key, value);
        } else if (key == "rtlsNoiseSigmaM") {
            s.rtlsNoiseSigmaM = number<double>(key, value);
        } else if (key == "simDurationS") {
            s.simDurationS = number<double>(key, value);
        } else if (key == "seed") {
            s.seed = number<std::uint64_t>(key, value);
        } else if (key == "locationGranularity") {
            if (value == "Place") {
                s.locationGranularity = Granularity::Place;
            } else if (value == "Row") {
                s.locationGranularity = Granularity::Row;
            } else if (value == "Level") {
                s.locationGranularity = Granularity::Level;
            } else {
                fail(ErrorCode::InvalidSpec, "locationGranularity must be Place, Row or Level");
            }
        } else if (key == "traySpeedMps") {
            s.traySpeedMps = number<double>(key, value);
        } else if (key == "dwellMs") {
            s.dwellMs = number<std::int64_t>(key, value);
        } else {
            fail(ErrorCode::InvalidSpec, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    validate(s);
    return s;
}

std::string format_plantspec(const PlantSpec& s) {
    std::ostringstream os;
    os << "name = " << s.name << "\n";
    os << "levels = " << s.levels << "\n";
    os << "rowsPerLevel = " << s.rowsPerLevel << "\n";
    os << "placesPerRow = " << s.placesPerRow << "\n";
    os << "extraComponents = ";
    for (std::size_t i = 0; i < s.extraComponents.size(); ++i) {
        const auto& e = s.extraComponents[i];
        os << (i ? ", " : "") << to_string(e.scope) << ":" << (e.sensor ? "sensor" : "actuator") << ":" << e.count;
    }
    os << "\n";
    os << "trayCount = " << s.trayCount << "\n";
    os << "materialKinds = " << s.materialKinds << "\n";
    os << "rtlsRateHz = " << shortest(s.rtlsRateHz) << "\n";
    os << "rtlsNoiseSigmaM = " << shortest(s.rtlsNoiseSigmaM) << "\n";
    os << "simDurationS = " << shortest(s.simDurationS) << "\n";
    os << "seed = " << s.seed << "\n";
    os << "locationGranularity = " << to_string(s.locationGranularity) << "\n";
    os << "traySpeedMps = " << shortest(s.traySpeedMps) << "\n";
    os << "dwellMs = " << s.dwellMs << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------

std::string GroundTruth::to_json() const {
    nlohmann::json j;
    j["functionalPartition"] = functionalPartition;
    j["physicalPartition"] = physicalPartition;
    auto& pos = j["truePositions"] = nlohmann::json::object();
    for (const auto& [tag, p] : truePositions) pos[tag] = {p.x, p.y, p.z};
    auto& tpl = j["templates"] = nlohmann::json::array();
    for (const auto& t : templates) {
        nlohmann::json code = nlohmann::json::array();
        for (const auto& e : t.code) code.push_back({e.from, e.to, e.fromLabel, e.edgeLabel, e.toLabel});
        tpl.push_back({{"name", t.name}, {"support", t.support}, {"code", code}});
    }
    j["trays"] = trays;
    j["counts"] = counts;
    j["positionBound"] = positionBound;
    return j.dump(2) + "\n";
}

GroundTruth GroundTruth::from_json(std::string_view text) {
    GroundTruth gt;
    try {
        auto j = nlohmann::json::parse(text);
        gt.functionalPartition = j.at("functionalPartition").get<std::map<std::string, std::string>>();
        gt.physicalPartition = j.at("physicalPartition").get<std::map<std::string, std::string>>();
        for (const auto& [tag, p] : j.at("truePositions").items()) {
            gt.truePositions[tag] = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
        }
        for (const auto& t : j.at("templates")) {
            ExpectedTemplate e;
            e.name = t.at("name").get<std::string>();
            e.support = t.at("support").get<std::int64_t>();
            for (const auto& c : t.at("code")) {
                e.code.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<std::string>(),
                                  c.at(3).get<std::string>(), c.at(4).get<std::string>()});
            }
            gt.templates.push_back(std::move(e));
        }
        gt.trays = j.at("trays").get<std::map<std::string, std::string>>();
        gt.counts = j.at("counts").get<std::map<std::string, std::int64_t>>();
        gt.positionBound = j.at("positionBound").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MalformedRecord, std::string("ground truth: ") + e.what());
    }
    return gt;
}

// ---------------------------------------------------------------------------

namespace {

struct Instance {
    std::string name;
    std::string fbType;
    int parent = -1;  // -1: called from OB1
    std::string path;
    int level = 0, row = 0, place = 0;  // location scope; 0 = unbounded
};

struct Component {
    std::string tag;
    bool sensor = true;
    int owner = -1;  // instance index
    int level = 0, row = 0;
    int place = 0;  // >= 1 storage place, 0 row entrance, -1 handover
    Point3 pos;
    std::string label;
};

/// Portable noise: mt19937_64 plus the Marsaglia polar method.
class Noise {
public:
    explicit Noise(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (spare_) {
            double v = *spare_;
            spare_.reset();
            return v;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        return u * m;
    }

    std::int64_t between(std::int64_t lo, std::int64_t hi) { return lo + static_cast<std::int64_t>(rng_() % (hi - lo + 1)); }

private:
    std::mt19937_64 rng_;
    std::optional<double> spare_;
};

const Point3 kHandover{-1.0, 0.0, 0.0};

bool same(const Point3& a, const Point3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

std::vector<Point3> route(const Point3& a, const Point3& b) {
    std::vector<Point3> raw{a};
    if (a.y == b.y && a.z == b.z) {
        raw.push_back(b);
    } else if (a.z == b.z) {
        raw.insert(raw.end(), {{-1.0, a.y, a.z}, {-1.0, b.y, b.z}, b});
    } else {
        raw.insert(raw.end(), {{-1.0, a.y, a.z}, {-1.0, 0.0, a.z}, {-1.0, 0.0, b.z}, {-1.0, b.y, b.z}, b});
    }
    std::vector<Point3> out;
    for (const auto& p : raw) {
        if (out.empty() || !same(out.back(), p)) out.push_back(p);
    }
    return out;
}

double length(const std::vector<Point3>& path) {
    double l = 0;
    for (std::size_t i = 1; i < path.size(); ++i) l += dynamics::distance(path[i - 1], path[i]);
    return l;
}

Point3 along(const std::vector<Point3>& path, double s) {
    for (std::size_t i = 1; i < path.size(); ++i) {
        double d = dynamics::distance(path[i - 1], path[i]);
        if (s <= d) {
            double f = d > 0 ? s / d : 0.0;
            const auto& a = path[i - 1];
            const auto& b = path[i];
            return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), a.z + f * (b.z - a.z)};
        }
        s -= d;
    }
    return path.back();
}

/// Arc lengths at which the path runs through `q`.
std::vector<double> passes(const std::vector<Point3>& path, const Point3& q) {
    std::vector<double> out;
    double acc = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto& a = path[i - 1];
        const auto& b = path[i];
        double d = dynamics::distance(a, b);
        double da = dynamics::distance(a, q), db = dynamics::distance(q, b);
        if (std::abs(da + db - d) < 1e-9 && db > 1e-12) out.push_back(acc + da);
        acc += d;
    }
    return out;
}

struct Event {
    std::int64_t t;
    std::string tag;
    int value;
};

struct Fix {
    std::int64_t t;
    std::string tracker;
    Point3 p;
    std::string label;  // empty: unlabeled
};

class Plant {
public:
    explicit Plant(const PlantSpec& s)
        : s_(s),
          period_(std::max<std::int64_t>(1, std::llround(1000.0 / s.rtlsRateHz))),
          schedule_(s.seed),
          noise_(s.seed ^ 0x9E3779B97F4A7C15ULL) {
        build();
    }

    GeneratedPlant run() {
        GeneratedPlant out;
        out.plcXml = plc::serialize_project(project());
        simulate();
        survey();
        out.ioCsv = io_csv();
        out.rtlsCsv = rtls_csv(fixes_, false);
        out.labeledRtlsCsv = rtls_csv(survey_, true);
        out.groundTruth = truth();
        return out;
    }

private:
    std::string location_label(const Component& c) const {
        if (c.place < 0) return "Handover";
        std::string level = "L" + std::to_string(c.level);
        std::string row = level + "R" + std::to_string(c.row);
        switch (s_.locationGranularity) {
            case Granularity::Level: return level;
            case Granularity::Row: return row;
            case Granularity::Place: return row + (c.place == 0 ? std::string("E") : "P" + std::to_string(c.place));
        }
        return row;
    }

    void add_component(std::string tag, bool sensor, int owner, int level, int row, int place) {
        Component c{std::move(tag), sensor, owner, level, row, place, {}, {}};
        if (place < 0) {
            c.pos = kHandover;
        } else {
            c.pos = {static_cast<double>(place), static_cast<double>(row), static_cast<double>(level - 1)};
        }
        c.label = location_label(c);
        components_.push_back(std::move(c));
    }

    int add_instance(std::string name, std::string fbType, int parent, int level, int row, int place) {
        Instance in{std::move(name), std::move(fbType), parent, {}, level, row, place};
        in.path = (parent < 0 ? s_.name + "/OB1" : instances_[parent].path) + "/" + in.name;
        instances_.push_back(std::move(in));
        return static_cast<int>(instances_.size()) - 1;
    }

    void build() {
        validate(s_);
        const int R = s_.rowsPerLevel;
        for (int l = 1; l <= s_.levels; ++l) {
            int level_inst = s_.levels > 1 ? add_instance("Level_" + std::to_string(l), "FB_Level", -1, l, 0, 0) : -1;
            for (int r = 1; r <= R; ++r) {
                int k = (l - 1) * R + r;
                auto ks = std::to_string(k);
                int row_inst = add_instance("Row_" + ks, "FB_Row", level_inst, l, r, 0);
                rows_.push_back(row_inst);
                for (int p = 1; p <= s_.placesPerRow; ++p) {
                    auto suffix = ks + "_" + std::to_string(p);
                    int place_inst = add_instance("Place_" + suffix, "FB_Place", row_inst, l, r, p);
                    places_.push_back(place_inst);
                    add_component("S_occ_" + suffix, true, place_inst, l, r, p);
                    add_component("A_eject_" + suffix, false, place_inst, l, r, p);
                }
                for (const auto& e : s_.extraComponents) {
                    if (e.scope != ExtraScope::Row) continue;
                    for (int i = 1; i <= e.count; ++i) {
                        add_component(std::string(e.sensor ? "S_row_" : "A_row_") + ks + "_" + std::to_string(i), e.sensor,
                                      row_inst, l, r, 0);
                    }
                }
            }
            for (const auto& e : s_.extraComponents) {
                if (e.scope != ExtraScope::Level) continue;
                for (int i = 1; i <= e.count; ++i) {
                    int r = (i - 1) % R + 1;
                    add_component(std::string(e.sensor ? "S_lift_" : "A_lift_") + std::to_string(l) + "_" + std::to_string(i),
                                  e.sensor, level_inst, l, r, 0);
                }
            }
        }
        bool plant_extras = std::any_of(s_.extraComponents.begin(), s_.extraComponents.end(),
                                        [](const ExtraComponent& e) { return e.scope == ExtraScope::Plant; });
        if (plant_extras) {
            int safety = add_instance("Safety", "FB_Safety", -1, 0, 0, 0);
            for (const auto& e : s_.extraComponents) {
                if (e.scope != ExtraScope::Plant) continue;
                for (int i = 1; i <= e.count; ++i) {
                    add_component(std::string(e.sensor ? "S_safety_" : "A_safety_") + std::to_string(i), e.sensor, safety, 0,
                                  0, -1);
                }
            }
        }
        std::set<std::string> seen;
        for (auto& c : components_) {
            if (!seen.insert(c.tag).second) fail(ErrorCode::InvalidSpec, "duplicate component name '" + c.tag + "'");
        }
        for (int t = 1; t <= s_.trayCount; ++t) {
            trays_.push_back("Tray" + std::to_string(t));
            materials_.push_back("Sheet" + std::to_string((t - 1) % s_.materialKinds + 1));
        }
    }

    plc::PlcProject project() const {
        plc::PlcProject p;
        p.name = s_.name;
        p.devices.push_back({"PLC1", plc::DeviceType::Plc, "PLC1", 0});
        std::int64_t inputs = 0, outputs = 0;
        for (const auto& c : components_) {
            plc::IoTag tag;
            tag.name = c.tag;
            tag.dataType = plc::DataType::Bool;
            std::int64_t& n = c.sensor ? inputs : outputs;
            std::int64_t module = n / 8 + 1;
            tag.deviceId = (c.sensor ? "DI" : "DO") + std::to_string(module);
            tag.channelIndex = n % 8;
            tag.address = std::string(c.sensor ? "%I" : "%Q") + std::to_string(n / 8) + "." + std::to_string(n % 8);
            ++n;
            p.tags.push_back(std::move(tag));
        }
        for (std::int64_t m = 1; m <= (inputs + 7) / 8; ++m) {
            p.devices.push_back({"DI" + std::to_string(m), plc::DeviceType::DigitalIn, "DI module " + std::to_string(m), 8});
        }
        for (std::int64_t m = 1; m <= (outputs + 7) / 8; ++m) {
            p.devices.push_back({"DO" + std::to_string(m), plc::DeviceType::DigitalOut, "DO module " + std::to_string(m), 8});
        }

        plc::Block ob;
        ob.name = "OB1";
        ob.blockType = plc::BlockType::OrganizationBlock;
        std::set<std::string> types;
        std::vector<plc::Block> dbs;
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            const auto& in = instances_[i];
            types.insert(in.fbType);
            plc::Block db;
            db.name = in.name;
            db.blockType = plc::BlockType::InstanceDataBlock;
            db.ofType = in.fbType;
            for (std::size_t j = 0; j < instances_.size(); ++j) {
                if (instances_[j].parent == static_cast<int>(i)) db.calls.push_back({instances_[j].fbType, instances_[j].name});
            }
            for (const auto& c : components_) {
                if (c.owner == static_cast<int>(i)) {
                    db.tagAccesses.push_back({c.tag, c.sensor ? plc::AccessMode::Read : plc::AccessMode::Write});
                }
            }
            if (in.parent < 0) ob.calls.push_back({in.fbType, in.name});
            dbs.push_back(std::move(db));
        }
        p.blocks.push_back(std::move(ob));
        for (const auto& t : types) {
            plc::Block fb;
            fb.name = t;
            fb.blockType = plc::BlockType::FunctionBlockType;
            p.blocks.push_back(std::move(fb));
        }
        for (auto& db : dbs) p.blocks.push_back(std::move(db));
        return p;
    }

    Point3 noisy(const Point3& p) {
        if (s_.rtlsNoiseSigmaM == 0) return p;
        double x = p.x + s_.rtlsNoiseSigmaM * noise_.normal();
        double y = p.y + s_.rtlsNoiseSigmaM * noise_.normal();
        double z = p.z + s_.rtlsNoiseSigmaM * noise_.normal();
        return {x, y, z};
    }

    std::int64_t travel_ms(const std::vector<Point3>& path) const {
        return std::llround(length(path) / s_.traySpeedMps * 1000.0);
    }

    /// Samples every period from t0 on plus one at arrival; returns arrival time.
    std::int64_t move(std::vector<Fix>& out, const std::string& tracker, const std::vector<Point3>& path, std::int64_t t0) {
        const double l = length(path);
        const std::int64_t T = travel_ms(path);
        for (std::int64_t dt = 0; dt < T; dt += period_) {
            out.push_back({t0 + dt, tracker, noisy(along(path, l * static_cast<double>(dt) / static_cast<double>(T))), {}});
        }
        out.push_back({t0 + T, tracker, noisy(path.back()), {}});
        return t0 + T;
    }

    void pulse(const std::string& tag, std::int64_t on, std::int64_t off) {
        events_.push_back({on, tag, 1});
        events_.push_back({off, tag, 0});
    }

    /// Row and level extras fire whenever a tray runs through their spot.
    void entrance_pulses(const std::vector<Point3>& path, std::int64_t t0) {
        const double l = length(path);
        const std::int64_t T = travel_ms(path);
        const std::int64_t q = std::max<std::int64_t>(1, period_ / 4);
        for (const auto& c : components_) {
            if (c.place != 0) continue;
            for (double s : passes(path, c.pos)) {
                std::int64_t t = t0 + std::llround(s / l * static_cast<double>(T));
                pulse(c.tag, t - q, t + q);
            }
        }
    }

    void simulate() {
        const std::int64_t limit = std::llround(s_.simDurationS * 1000.0);
        std::deque<int> order;
        std::int64_t t = 1000;
        for (std::size_t mission = 0;; ++mission) {
            if (order.empty()) {
                std::vector<int> round(places_.begin(), places_.end());
                for (std::size_t i = round.size(); i > 1; --i) {
                    std::swap(round[i - 1], round[static_cast<std::size_t>(schedule_.between(0, static_cast<std::int64_t>(i) - 1))]);
                }
                order.assign(round.begin(), round.end());
            }
            const auto& place = instances_[order.front()];
            const std::int64_t dwell = schedule_.between(2000, 4000);
            const std::int64_t gap = schedule_.between(3000, 6000);
            const Point3 target{static_cast<double>(place.place), static_cast<double>(place.row),
                                static_cast<double>(place.level - 1)};
            auto in = route(kHandover, target);
            auto back = route(target, kHandover);
            if (t + travel_ms(in) + dwell + travel_ms(back) > limit) break;
            order.pop_front();

            const auto& tray = trays_[mission % trays_.size()];
            auto suffix = place.name.substr(std::string("Place_").size());
            entrance_pulses(in, t);
            const std::int64_t arrive = move(fixes_, tray, in, t);
            events_.push_back({arrive, "S_occ_" + suffix, 1});
            const std::int64_t leave = arrive + dwell;
            pulse("A_eject_" + suffix, leave, leave + period_);
            events_.push_back({leave + period_, "S_occ_" + suffix, 0});
            entrance_pulses(back, leave);
            const std::int64_t home = move(fixes_, tray, back, leave);
            for (const auto& c : components_) {
                if (c.place < 0) pulse(c.tag, home + gap / 2 - 100, home + gap / 2 + 100);
            }
            t = home + gap;
            ++missions_;
        }
    }

    /// Labeled session: one tray visits every device location and rests there.
    void survey() {
        std::map<std::string, std::set<std::tuple<double, double, double>>> spots;
        for (const auto& c : components_) {
            if (c.place >= 0) spots[c.label].insert({c.pos.x, c.pos.y, c.pos.z});
        }
        const std::string tracker = trays_.front();
        Point3 here = kHandover;
        std::int64_t t = 0;
        for (const auto& [label, set] : spots) {
            for (const auto& [x, y, z] : set) {
                Point3 there{x, y, z};
                if (!same(here, there)) t = move(survey_, tracker, route(here, there), t);
                const std::int64_t samples = std::max<std::int64_t>(1, s_.dwellMs / period_);
                for (std::int64_t k = 1; k <= samples; ++k) survey_.push_back({t + k * period_, tracker, noisy(there), label});
                t += (samples + 1) * period_;
                here = there;
            }
        }
    }

    std::string io_csv() {
        std::vector<Event> all;
        for (const auto& c : components_) all.push_back({0, c.tag, 0});
        all.insert(all.end(), events_.begin(), events_.end());
        std::stable_sort(all.begin(), all.end(), [](const Event& a, const Event& b) {
            return std::tie(a.t, a.tag) < std::tie(b.t, b.tag);
        });
        io_samples_ = static_cast<std::int64_t>(all.size());
        std::string out = "timestamp_ms,tag,value\n";
        for (const auto& e : all) out += std::to_string(e.t) + "," + e.tag + "," + std::to_string(e.value) + "\n";
        return out;
    }

    static std::string coord(double v) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        std::string s(buf);
        if (s == "-0.000000") s = "0.000000";
        return s;
    }

    std::string rtls_csv(std::vector<Fix>& fixes, bool labeled) {
        std::stable_sort(fixes.begin(), fixes.end(), [](const Fix& a, const Fix& b) {
            return std::tie(a.t, a.tracker) < std::tie(b.t, b.tracker);
        });
        std::string out = labeled ? "timestamp_ms,tracker_id,x_m,y_m,z_m,location_label\n" : "timestamp_ms,tracker_id,x_m,y_m,z_m\n";
        for (const auto& f : fixes) {
            out += std::to_string(f.t) + "," + f.tracker + "," + coord(f.p.x) + "," + coord(f.p.y) + "," + coord(f.p.z);
            if (labeled) out += "," + f.label;
            out += "\n";
        }
        return out;
    }

    /// The functional structure one instance spans: its groups, components and devices.
    mining::DfsCode unit_code(int unit) const {
        std::vector<std::string> labels;
        std::vector<mining::MiningEdge> edges;
        auto vertex = [&](NodeKind k) {
            labels.emplace_back(graph::to_string(k));
            return labels.size() - 1;
        };
        auto edge = [&](std::size_t a, std::size_t b, EdgeKind k) { edges.push_back({a, b, std::string(graph::to_string(k))}); };

        std::map<int, std::size_t> fg;
        std::map<std::string, std::size_t> device;
        std::vector<int> members{unit};
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = 0; j < instances_.size(); ++j) {
                if (instances_[j].parent == members[i]) members.push_back(static_cast<int>(j));
            }
        }
        for (int m : members) {
            auto g = fg[m] = vertex(NodeKind::FunctionalGroup);
            auto sc = vertex(NodeKind::SoftwareComponent);
            edge(g, sc, EdgeKind::Contains);
            if (m != unit) edge(fg.at(instances_[m].parent), g, EdgeKind::Contains);
            for (const auto& c : components_) {
                if (c.owner != m) continue;
                auto d = device[c.tag] = vertex(c.sensor ? NodeKind::Sensor : NodeKind::Actuator);
                edge(g, d, EdgeKind::Contains);
                edge(sc, d, c.sensor ? EdgeKind::Reads : EdgeKind::Writes);
            }
        }
        return mining::graph_code(mining::make_mining_graph(labels, edges));
    }

    std::pair<int, int> owned(int inst) const {
        int sensors = 0, actuators = 0;
        for (const auto& c : components_) {
            if (c.owner == inst) (c.sensor ? sensors : actuators) += 1;
        }
        return {sensors, actuators};
    }

    /// Instances that embed the structure of `unit`: at least its own devices
    /// and enough children that embed its children. Under minimum image
    /// support the group vertex is the scarcest image, so this is the support.
    std::int64_t motif_count(int unit) const {
        std::function<bool(int, int)> embeds = [&](int v, int u) {
            auto [vs, va] = owned(v);
            auto [us, ua] = owned(u);
            if (vs < us || va < ua) return false;
            std::vector<int> need, have;
            for (std::size_t j = 0; j < instances_.size(); ++j) {
                if (instances_[j].parent == u) need.push_back(static_cast<int>(j));
                if (instances_[j].parent == v) have.push_back(static_cast<int>(j));
            }
            // Children of one unit are alike, so a greedy assignment suffices.
            std::vector<bool> used(have.size(), false);
            for (int n : need) {
                bool found = false;
                for (std::size_t h = 0; h < have.size() && !found; ++h) {
                    if (!used[h] && embeds(have[h], n)) used[h] = found = true;
                }
                if (!found) return false;
            }
            return true;
        };
        std::int64_t count = 0;
        for (std::size_t v = 0; v < instances_.size(); ++v) count += embeds(static_cast<int>(v), unit);
        return count;
    }

    GroundTruth truth() const {
        GroundTruth gt;
        for (const auto& c : components_) {
            gt.functionalPartition[c.tag] = instances_[c.owner].path;
            gt.physicalPartition[c.tag] = c.label;
            gt.truePositions[c.tag] = c.pos;
        }
        auto place_support = motif_count(places_.front());
        if (place_support >= 2) gt.templates.push_back({"place", place_support, unit_code(places_.front())});
        auto row_support = motif_count(rows_.front());
        if (row_support >= 2) gt.templates.push_back({"row", row_support, unit_code(rows_.front())});
        for (std::size_t i = 0; i < trays_.size(); ++i) gt.trays[trays_[i]] = materials_[i];
        std::int64_t sensors = std::count_if(components_.begin(), components_.end(), [](const Component& c) { return c.sensor; });
        gt.counts["sensors"] = sensors;
        gt.counts["actuators"] = static_cast<std::int64_t>(components_.size()) - sensors;
        gt.counts["fbInstances"] = static_cast<std::int64_t>(instances_.size());
        gt.counts["missions"] = missions_;
        gt.counts["ioSamples"] = io_samples_;
        gt.counts["rtlsSamples"] = static_cast<std::int64_t>(fixes_.size());
        gt.counts["labeledSamples"] = static_cast<std::int64_t>(survey_.size());
        gt.positionBound = static_cast<double>(period_) / 1000.0 * s_.traySpeedMps;
        return gt;
    }

    const PlantSpec& s_;
    std::int64_t period_;
    Noise schedule_;
    Noise noise_;
    std::vector<Instance> instances_;
    std::vector<Component> components_;
    std::vector<int> places_;
    std::vector<int> rows_;
    std::vector<std::string> trays_;
    std::vector<std::string> materials_;
    std::vector<Event> events_;
    std::vector<Fix> fixes_;
    std::vector<Fix> survey_;
    std::int64_t missions_ = 0;
    std::int64_t io_samples_ = 0;
};

}  // namespace

GeneratedPlant generate(const PlantSpec& spec) { return Plant(spec).run(); }

}  // namespace dtwin::synth
