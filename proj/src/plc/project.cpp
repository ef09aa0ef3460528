#include "dtwin/plc/project.hpp"

#include "dtwin/error.hpp"
#include "dtwin/xml/xml.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <regex>
#include <set>

namespace dtwin::plc {

std::string_view to_string(DeviceType t) noexcept {
    switch (t) {
    case DeviceType::Plc: return "Plc";
    case DeviceType::DigitalIn: return "DigitalIn";
    case DeviceType::DigitalOut: return "DigitalOut";
    case DeviceType::AnalogIn: return "AnalogIn";
    case DeviceType::AnalogOut: return "AnalogOut";
    }
    return "?";
}

std::string_view to_string(DataType t) noexcept {
    switch (t) {
    case DataType::Bool: return "Bool";
    case DataType::Int: return "Int";
    case DataType::Real: return "Real";
    }
    return "?";
}

std::string_view to_string(AccessMode m) noexcept { return m == AccessMode::Read ? "Read" : "Write"; }

bool is_input(DeviceType t) noexcept { return t == DeviceType::DigitalIn || t == DeviceType::AnalogIn; }
bool is_output(DeviceType t) noexcept { return t == DeviceType::DigitalOut || t == DeviceType::AnalogOut; }

const Block* PlcProject::find_block(std::string_view n) const {
    for (const auto& b : blocks) {
        if (b.name == n) return &b;
    }
    return nullptr;
}

const IoTag* PlcProject::find_tag(std::string_view n) const {
    for (const auto& t : tags) {
        if (t.name == n) return &t;
    }
    return nullptr;
}

const HardwareDevice* PlcProject::find_device(std::string_view id) const {
    for (const auto& d : devices) {
        if (d.id == id) return &d;
    }
    return nullptr;
}

namespace {

[[noreturn]] void violation(const xml::Element& e, const std::string& what) {
    fail(ErrorCode::SchemaViolation,
         "<" + e.name + "> at line " + std::to_string(e.line) + ": " + what);
}

/// Checks the attribute set is exactly `required` (+ `optional`), returns values in order.
std::vector<std::string> attributes(const xml::Element& e, std::initializer_list<const char*> required,
                                    std::initializer_list<const char*> optional = {}) {
    for (const auto& [k, _] : e.attributes) {
        bool known = std::any_of(required.begin(), required.end(), [&](const char* r) { return k == r; }) ||
                     std::any_of(optional.begin(), optional.end(), [&](const char* o) { return k == o; });
        if (!known) violation(e, "unknown attribute '" + k + "'");
    }
    std::vector<std::string> out;
    for (const char* r : required) {
        const std::string* v = e.attribute(r);
        if (!v) violation(e, std::string("missing attribute '") + r + "'");
        if (v->empty()) violation(e, std::string("attribute '") + r + "' must not be empty");
        out.push_back(*v);
    }
    return out;
}

void no_text(const xml::Element& e) {
    if (!e.text.empty()) violation(e, "unexpected text content");
}

void leaf_only(const xml::Element& e) {
    no_text(e);
    if (!e.children.empty()) violation(e.children.front(), "unexpected element inside <" + e.name + ">");
}

std::int64_t integer(const xml::Element& e, const std::string& attr, const std::string& text) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        violation(e, "attribute '" + attr + "' is not an integer: '" + text + "'");
    }
    return v;
}

DeviceType device_type(const xml::Element& e, const std::string& s) {
    for (auto t : {DeviceType::Plc, DeviceType::DigitalIn, DeviceType::DigitalOut, DeviceType::AnalogIn,
                   DeviceType::AnalogOut}) {
        if (to_string(t) == s) return t;
    }
    violation(e, "unknown device type '" + s + "'");
}

DataType data_type(const xml::Element& e, const std::string& s) {
    for (auto t : {DataType::Bool, DataType::Int, DataType::Real}) {
        if (to_string(t) == s) return t;
    }
    violation(e, "unknown data type '" + s + "'");
}

void check_address(const xml::Element& e, const IoTag& tag) {
    static const std::regex bit_address(R"(%([IQ])(\d+)\.(\d+))");
    static const std::regex word_address(R"(%([IQ])W(\d+))");
    std::smatch m;
    if (std::regex_match(tag.address, m, bit_address)) {
        if (std::stoi(m[3].str()) > 7) violation(e, "bit offset out of range in address '" + tag.address + "'");
        if (tag.dataType != DataType::Bool) violation(e, "bit address '" + tag.address + "' requires dataType Bool");
    } else if (std::regex_match(tag.address, m, word_address)) {
        if (tag.dataType == DataType::Bool) violation(e, "word address '" + tag.address + "' cannot hold a Bool");
    } else {
        violation(e, "address '" + tag.address + "' is not a %I/%Q address");
    }
}

Call parse_call(const xml::Element& e) {
    leaf_only(e);
    auto a = attributes(e, {"callee", "instanceDb"});
    return Call{a[0], a[1]};
}

TagAccess parse_access(const xml::Element& e) {
    leaf_only(e);
    auto a = attributes(e, {"tag", "mode"});
    if (a[1] != "Read" && a[1] != "Write") violation(e, "mode must be Read or Write, got '" + a[1] + "'");
    return TagAccess{a[0], a[1] == "Read" ? AccessMode::Read : AccessMode::Write};
}

Block parse_block(const xml::Element& e) {
    no_text(e);
    Block b;
    if (e.name == "OrganizationBlock") {
        b.name = attributes(e, {"name"})[0];
        b.blockType = BlockType::OrganizationBlock;
    } else if (e.name == "FunctionBlock") {
        b.name = attributes(e, {"name"})[0];
        b.blockType = BlockType::FunctionBlockType;
    } else if (e.name == "DataBlock") {
        auto a = attributes(e, {"name", "ofType"});
        b.name = a[0];
        b.ofType = a[1];
        b.blockType = BlockType::InstanceDataBlock;
    } else {
        violation(e, "unknown block element");
    }
    for (const auto& c : e.children) {
        if (c.name == "Call") {
            b.calls.push_back(parse_call(c));
        } else if (c.name == "TagAccess") {
            b.tagAccesses.push_back(parse_access(c));
        } else {
            violation(c, "unknown element inside <" + e.name + ">");
        }
    }
    return b;
}

}  // namespace

PlcProject parse_project(std::string_view text) {
    xml::Element root = xml::parse(text);
    if (root.name != "PlcProject") violation(root, "root element must be <PlcProject>");
    no_text(root);

    PlcProject p;
    p.name = attributes(root, {"name"})[0];

    std::set<std::string> seen_sections;
    std::vector<std::pair<const xml::Element*, std::size_t>> tag_elements;
    for (const auto& section : root.children) {
        if (!seen_sections.insert(section.name).second) violation(section, "section appears twice");
        no_text(section);
        if (!section.attributes.empty()) violation(section, "unexpected attributes");
        if (section.name == "HardwareConfig") {
            for (const auto& d : section.children) {
                if (d.name != "Device") violation(d, "unknown element inside <HardwareConfig>");
                leaf_only(d);
                auto a = attributes(d, {"id", "type", "name", "channels"});
                HardwareDevice dev{a[0], device_type(d, a[1]), a[2], integer(d, "channels", a[3])};
                if (dev.channelCount < 0) violation(d, "channels must be non-negative");
                if (dev.deviceType != DeviceType::Plc && dev.channelCount == 0) {
                    violation(d, "IO device '" + dev.id + "' needs at least one channel");
                }
                if (p.find_device(dev.id)) violation(d, "duplicate device id '" + dev.id + "'");
                p.devices.push_back(std::move(dev));
            }
        } else if (section.name == "TagTable") {
            for (const auto& t : section.children) {
                if (t.name != "Tag") violation(t, "unknown element inside <TagTable>");
                leaf_only(t);
                auto a = attributes(t, {"name", "dataType", "address", "device", "channel"});
                IoTag tag{a[0], data_type(t, a[1]), a[2], a[3], integer(t, "channel", a[4])};
                check_address(t, tag);
                if (p.find_tag(tag.name)) violation(t, "duplicate tag name '" + tag.name + "'");
                tag_elements.emplace_back(&t, p.tags.size());
                p.tags.push_back(std::move(tag));
            }
        } else if (section.name == "Blocks") {
            for (const auto& b : section.children) {
                Block block = parse_block(b);
                if (p.find_block(block.name)) violation(b, "duplicate block name '" + block.name + "'");
                p.blocks.push_back(std::move(block));
            }
        } else {
            violation(section, "unknown element inside <PlcProject>");
        }
    }

    std::size_t plc_count = std::count_if(p.devices.begin(), p.devices.end(),
                                          [](const auto& d) { return d.deviceType == DeviceType::Plc; });
    if (plc_count != 1) {
        violation(root, "expected exactly one Plc device, found " + std::to_string(plc_count));
    }

    // Range and direction checks need the device table, which may follow the tags.
    for (const auto& [elem, idx] : tag_elements) {
        const IoTag& tag = p.tags[idx];
        const HardwareDevice* dev = p.find_device(tag.deviceId);
        if (!dev) continue;  // reported by prepare()
        if (tag.is_input() ? !is_input(dev->deviceType) : !is_output(dev->deviceType)) {
            violation(*elem, "address '" + tag.address + "' does not match " +
                                 std::string(to_string(dev->deviceType)) + " device '" + dev->id + "'");
        }
        bool analog_dev = dev->deviceType == DeviceType::AnalogIn || dev->deviceType == DeviceType::AnalogOut;
        if (analog_dev == (tag.dataType == DataType::Bool)) {
            violation(*elem, "data type " + std::string(to_string(tag.dataType)) + " does not fit device '" +
                                 dev->id + "'");
        }
        if (tag.channelIndex < 0 || tag.channelIndex >= dev->channelCount) {
            violation(*elem, "channel " + std::to_string(tag.channelIndex) + " out of range for device '" +
                                 dev->id + "' with " + std::to_string(dev->channelCount) + " channels");
        }
    }
    return p;
}

std::string serialize_project(const PlcProject& project) {
    xml::Writer w;
    w.open("PlcProject", {{"name", project.name}});
    w.open("HardwareConfig");
    for (const auto& d : project.devices) {
        w.leaf("Device", {{"id", d.id},
                          {"type", std::string(to_string(d.deviceType))},
                          {"name", d.name},
                          {"channels", std::to_string(d.channelCount)}});
    }
    w.close();
    w.open("TagTable");
    for (const auto& t : project.tags) {
        w.leaf("Tag", {{"name", t.name},
                       {"dataType", std::string(to_string(t.dataType))},
                       {"address", t.address},
                       {"device", t.deviceId},
                       {"channel", std::to_string(t.channelIndex)}});
    }
    w.close();
    w.open("Blocks");
    for (const auto& b : project.blocks) {
        std::vector<std::pair<std::string, std::string>> attrs{{"name", b.name}};
        const char* element = "OrganizationBlock";
        if (b.blockType == BlockType::FunctionBlockType) element = "FunctionBlock";
        if (b.blockType == BlockType::InstanceDataBlock) {
            element = "DataBlock";
            attrs.emplace_back("ofType", b.ofType.value_or(""));
        }
        if (b.calls.empty() && b.tagAccesses.empty()) {
            w.leaf(element, attrs);
            continue;
        }
        w.open(element, attrs);
        for (const auto& c : b.calls) w.leaf("Call", {{"callee", c.calleeName}, {"instanceDb", c.instanceDbName}});
        for (const auto& a : b.tagAccesses) {
            w.leaf("TagAccess", {{"tag", a.tagName}, {"mode", std::string(to_string(a.mode))}});
        }
        w.close();
    }
    w.close();
    return w.finish();
}

PlcProject prepare(PlcProject p) {
    std::map<std::string, std::size_t, std::less<>> block_index;
    for (std::size_t i = 0; i < p.blocks.size(); ++i) block_index.emplace(p.blocks[i].name, i);
    std::map<std::string, std::size_t, std::less<>> tag_index;
    for (std::size_t i = 0; i < p.tags.size(); ++i) tag_index.emplace(p.tags[i].name, i);

    std::set<std::string> dangling;
    std::vector<std::string> mismatches;

    auto lookup_block = [&](const std::string& name, BlockType expected) -> std::size_t {
        auto it = block_index.find(name);
        if (it == block_index.end() || p.blocks[it->second].blockType != expected) {
            dangling.insert(name);
            return kUnresolved;
        }
        return it->second;
    };

    for (auto& tag : p.tags) {
        tag.device = kUnresolved;
        for (std::size_t i = 0; i < p.devices.size(); ++i) {
            if (p.devices[i].id == tag.deviceId) tag.device = i;
        }
        if (tag.device == kUnresolved) dangling.insert(tag.deviceId);
    }

    std::map<std::size_t, int> instance_uses;
    for (auto& b : p.blocks) {
        if (b.blockType == BlockType::InstanceDataBlock) {
            b.type = lookup_block(*b.ofType, BlockType::FunctionBlockType);
        }
        for (auto& c : b.calls) {
            c.callee = lookup_block(c.calleeName, BlockType::FunctionBlockType);
            c.instanceDb = lookup_block(c.instanceDbName, BlockType::InstanceDataBlock);
            if (c.instanceDb != kUnresolved) {
                ++instance_uses[c.instanceDb];
                const Block& db = p.blocks[c.instanceDb];
                if (c.callee != kUnresolved && db.ofType != c.calleeName) {
                    mismatches.push_back("instance DB '" + db.name + "' is of type '" + db.ofType.value_or("") +
                                         "' but is called as '" + c.calleeName + "'");
                }
            }
        }
        for (auto& a : b.tagAccesses) {
            auto it = tag_index.find(a.tagName);
            a.tag = it == tag_index.end() ? kUnresolved : it->second;
            if (a.tag == kUnresolved) dangling.insert(a.tagName);
        }
    }

    if (!dangling.empty()) {
        std::string names;
        for (const auto& n : dangling) names += (names.empty() ? "" : ", ") + n;
        fail(ErrorCode::UnresolvedReference, "unresolved references: [" + names + "]");
    }
    if (!mismatches.empty()) fail(ErrorCode::SchemaViolation, mismatches.front());

    for (auto& b : p.blocks) b.sharedInstance = false;
    for (const auto& [idx, uses] : instance_uses) {
        if (uses > 1) p.blocks[idx].sharedInstance = true;
    }
    for (const auto& b : p.blocks) {
        if (b.name == p.name) {
            fail(ErrorCode::SchemaViolation, "block '" + b.name + "' clashes with the project name");
        }
    }
    p.prepared = true;
    return p;
}

}  // namespace dtwin::plc
