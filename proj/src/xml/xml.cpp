#include "dtwin/xml/xml.hpp"

#include "dtwin/error.hpp"

#include <expat.h>

#include <memory>

namespace dtwin::xml {

const std::string* Element::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

struct ParseState {
    XML_Parser parser = nullptr;
    std::vector<Element> stack;
    std::optional<Element> root;
};

void on_start(void* user, const XML_Char* name, const XML_Char** atts) {
    auto* st = static_cast<ParseState*>(user);
    Element e;
    e.name = name;
    e.line = XML_GetCurrentLineNumber(st->parser);
    e.column = XML_GetCurrentColumnNumber(st->parser) + 1;
    for (int i = 0; atts[i]; i += 2) e.attributes.emplace_back(atts[i], atts[i + 1]);
    st->stack.push_back(std::move(e));
}

void on_end(void* user, const XML_Char*) {
    auto* st = static_cast<ParseState*>(user);
    Element e = std::move(st->stack.back());
    st->stack.pop_back();
    if (!e.children.empty()) e.text.clear();
    if (st->stack.empty()) {
        st->root = std::move(e);
    } else {
        st->stack.back().children.push_back(std::move(e));
    }
}

void on_text(void* user, const XML_Char* s, int len) {
    auto* st = static_cast<ParseState*>(user);
    if (!st->stack.empty()) st->stack.back().text.append(s, static_cast<std::size_t>(len));
}

std::string trim(std::string s) {
    auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    std::size_t b = 0, e = s.size();
    while (b < e && ws(s[b])) ++b;
    while (e > b && ws(s[e - 1])) --e;
    return s.substr(b, e - b);
}

void trim_text(Element& e) {
    e.text = trim(std::move(e.text));
    for (auto& c : e.children) trim_text(c);
}

}  // namespace

Element parse(std::string_view document) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreate("UTF-8"), &XML_ParserFree);
    if (!parser) fail(ErrorCode::Internal, "cannot create XML parser");
    ParseState st;
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) ==
        XML_STATUS_ERROR) {
        fail(ErrorCode::XmlSyntax,
             "line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) + ", column " +
                 std::to_string(XML_GetCurrentColumnNumber(parser.get()) + 1) + ": " +
                 XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (!st.root) fail(ErrorCode::XmlSyntax, "line 1, column 1: no root element");
    trim_text(*st.root);
    return std::move(*st.root);
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

Writer::Writer() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void Writer::indent() { out_.append(stack_.size() * 2, ' '); }

void Writer::write_attributes(const std::vector<std::pair<std::string, std::string>>& attributes) {
    for (const auto& [k, v] : attributes) {
        out_ += ' ';
        out_ += k;
        out_ += "=\"";
        out_ += escape(v);
        out_ += '"';
    }
}

void Writer::open(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attributes) {
    indent();
    out_ += '<';
    out_ += name;
    write_attributes(attributes);
    out_ += ">\n";
    stack_.emplace_back(name);
}

void Writer::leaf(std::string_view name, const std::vector<std::pair<std::string, std::string>>& attributes,
                  std::optional<std::string_view> text) {
    indent();
    out_ += '<';
    out_ += name;
    write_attributes(attributes);
    if (text) {
        out_ += '>';
        out_ += escape(*text);
        out_ += "</";
        out_ += name;
        out_ += ">\n";
    } else {
        out_ += "/>\n";
    }
}

void Writer::close() {
    std::string name = std::move(stack_.back());
    stack_.pop_back();
    indent();
    out_ += "</";
    out_ += name;
    out_ += ">\n";
}

std::string Writer::finish() {
    while (!stack_.empty()) close();
    return std::move(out_);
}

}  // namespace dtwin::xml
