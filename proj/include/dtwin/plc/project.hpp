#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtwin::plc {

inline constexpr std::size_t kUnresolved = std::numeric_limits<std::size_t>::max();

enum class DeviceType { Plc, DigitalIn, DigitalOut, AnalogIn, AnalogOut };
enum class DataType { Bool, Int, Real };
enum class BlockType { OrganizationBlock, FunctionBlockType, InstanceDataBlock };
enum class AccessMode { Read, Write };

std::string_view to_string(DeviceType t) noexcept;
std::string_view to_string(DataType t) noexcept;
std::string_view to_string(AccessMode m) noexcept;

bool is_input(DeviceType t) noexcept;
bool is_output(DeviceType t) noexcept;

struct HardwareDevice {
    std::string id;
    DeviceType deviceType = DeviceType::Plc;
    std::string name;
    std::int64_t channelCount = 0;
};

struct IoTag {
    std::string name;
    DataType dataType = DataType::Bool;
    std::string address;  // %I<byte>.<bit>, %Q<byte>.<bit>, %IW<n>, %QW<n>
    std::string deviceId;
    std::int64_t channelIndex = 0;

    std::size_t device = kUnresolved;  // set by prepare()

    bool is_input() const { return address.size() > 1 && address[1] == 'I'; }
};

struct Call {
    std::string calleeName;
    std::string instanceDbName;

    std::size_t callee = kUnresolved;      // FunctionBlockType index into blocks
    std::size_t instanceDb = kUnresolved;  // InstanceDataBlock index into blocks
};

struct TagAccess {
    std::string tagName;
    AccessMode mode = AccessMode::Read;

    std::size_t tag = kUnresolved;
};

struct Block {
    std::string name;
    BlockType blockType = BlockType::OrganizationBlock;
    std::optional<std::string> ofType;
    std::vector<Call> calls;
    std::vector<TagAccess> tagAccesses;

    std::size_t type = kUnresolved;  // InstanceDataBlock -> its FunctionBlockType
    bool sharedInstance = false;     // instance DB referenced by more than one call site
};

struct PlcProject {
    std::string name;
    std::vector<HardwareDevice> devices;
    std::vector<IoTag> tags;
    std::vector<Block> blocks;
    bool prepared = false;

    const Block* find_block(std::string_view name) const;
    const IoTag* find_tag(std::string_view name) const;
    const HardwareDevice* find_device(std::string_view id) const;
};

/// Parses the vendor-neutral project schema. Unknown elements or attributes
/// are rejected with Error(SchemaViolation); malformed XML raises XmlSyntax.
PlcProject parse_project(std::string_view xml);

/// Writes a project back to the schema (attribute order fixed, blocks in
/// input order). parse_project(serialize_project(p)) reproduces p.
std::string serialize_project(const PlcProject& project);

/// Resolves every callee, instance DB, type and tag reference to an index and
/// flags shared instance DBs. All dangling names are reported at once via
/// Error(UnresolvedReference).
PlcProject prepare(PlcProject project);

}  // namespace dtwin::plc
