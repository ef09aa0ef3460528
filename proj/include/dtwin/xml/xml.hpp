#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtwin::xml {

/// Minimal element tree; text content is kept only for leaf elements.
struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;  // document order
    std::vector<Element> children;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;

    const std::string* attribute(std::string_view key) const;
};

/// Parses a UTF-8 document. Throws Error(XmlSyntax) with "line L, column C".
Element parse(std::string_view document);

std::string escape(std::string_view text);

/// Indented writer producing deterministic output.
class Writer {
public:
    Writer();

    void open(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attributes = {});
    void leaf(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attributes = {},
              std::optional<std::string_view> text = std::nullopt);
    void close();

    std::string finish();

private:
    void indent();
    void write_attributes(const std::vector<std::pair<std::string, std::string>>& attributes);

    std::string out_;
    std::vector<std::string> stack_;
};

}  // namespace dtwin::xml
