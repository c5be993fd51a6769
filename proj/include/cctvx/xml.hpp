#pragma once

// Minimal namespace-agnostic XML reader and canonical writer, enough for
// GPX documents: elements, attributes, character data, CDATA, comments,
// and processing instructions. Elements are addressed by local name
// (namespace prefixes stripped). Mixed content is flattened: an
// element's character data is concatenated into a single text field.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace cctvx {

struct XmlNode {
    std::string name;  // local name
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<XmlNode> children;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;

    const std::string* attribute(std::string_view key) const {
        for (const auto& [k, v] : attributes)
            if (k == key) return &v;
        return nullptr;
    }

    const XmlNode* child(std::string_view local) const {
        for (const auto& c : children)
            if (c.name == local) return &c;
        return nullptr;
    }

    std::vector<const XmlNode*> children_named(std::string_view local) const {
        std::vector<const XmlNode*> out;
        for (const auto& c : children)
            if (c.name == local) out.push_back(&c);
        return out;
    }

    // First descendant (depth-first) with the given local name.
    const XmlNode* find(std::string_view local) const {
        for (const auto& c : children) {
            if (c.name == local) return &c;
            if (const XmlNode* hit = c.find(local)) return hit;
        }
        return nullptr;
    }

    std::string trimmed_text() const {
        std::size_t b = text.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        std::size_t e = text.find_last_not_of(" \t\r\n");
        return text.substr(b, e - b + 1);
    }
};

namespace xml_detail {

class Parser {
public:
    explicit Parser(std::string_view input) : in_(input) {}

    XmlNode run() {
        skip_misc();
        if (eof()) fail("document has no root element");
        XmlNode root = parse_element();
        skip_misc();
        if (!eof()) fail("content after the root element");
        return root;
    }

private:
    std::string_view in_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    bool starts_with(std::string_view s) const {
        return in_.compare(pos_, s.size(), s) == 0;
    }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < in_.size(); ++i, ++pos_) {
            if (in_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
        }
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw GpxError("XML parse error at line " + std::to_string(line_) +
                       ", column " + std::to_string(column_) + ": " + message);
    }

    void skip_whitespace() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                          peek() == '\n'))
            advance();
    }

    void skip_until(std::string_view terminator, const char* what) {
        while (!eof() && !starts_with(terminator)) advance();
        if (eof()) fail(std::string("unterminated ") + what);
        advance(terminator.size());
    }

    // Prolog, comments, PIs, and DOCTYPE between elements.
    void skip_misc() {
        for (;;) {
            skip_whitespace();
            if (starts_with("<?"))
                skip_until("?>", "processing instruction");
            else if (starts_with("<!--"))
                skip_until("-->", "comment");
            else if (starts_with("<!DOCTYPE") || starts_with("<!doctype"))
                skip_until(">", "DOCTYPE declaration");
            else
                return;
        }
    }

    static bool name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
               (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.' ||
               c == ':';
    }

    std::string read_name() {
        std::size_t begin = pos_;
        while (!eof() && name_char(peek())) advance();
        if (pos_ == begin) fail("expected a name");
        return std::string(in_.substr(begin, pos_ - begin));
    }

    static std::string local_name(const std::string& qualified) {
        std::size_t colon = qualified.rfind(':');
        return colon == std::string::npos ? qualified
                                          : qualified.substr(colon + 1);
    }

    void append_decoded(std::string_view raw, std::string& out) {
        for (std::size_t i = 0; i < raw.size();) {
            if (raw[i] != '&') {
                out.push_back(raw[i++]);
                continue;
            }
            std::size_t end = raw.find(';', i);
            if (end == std::string::npos) fail("unterminated entity reference");
            std::string_view entity = raw.substr(i + 1, end - i - 1);
            if (entity == "lt")
                out.push_back('<');
            else if (entity == "gt")
                out.push_back('>');
            else if (entity == "amp")
                out.push_back('&');
            else if (entity == "apos")
                out.push_back('\'');
            else if (entity == "quot")
                out.push_back('"');
            else if (!entity.empty() && entity[0] == '#') {
                int base = 10;
                std::string_view digits = entity.substr(1);
                if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
                    base = 16;
                    digits = digits.substr(1);
                }
                unsigned long code = 0;
                if (digits.empty()) fail("empty character reference");
                for (char c : digits) {
                    int v;
                    if (c >= '0' && c <= '9')
                        v = c - '0';
                    else if (base == 16 && c >= 'a' && c <= 'f')
                        v = c - 'a' + 10;
                    else if (base == 16 && c >= 'A' && c <= 'F')
                        v = c - 'A' + 10;
                    else
                        fail("malformed character reference");
                    code = code * base + static_cast<unsigned long>(v);
                }
                append_utf8(code, out);
            } else {
                fail("unknown entity reference");
            }
            i = end + 1;
        }
    }

    static void append_utf8(unsigned long code, std::string& out) {
        if (code < 0x80) {
            out.push_back(static_cast<char>(code));
        } else if (code < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (code >> 6)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else if (code < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (code >> 12)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (code >> 18)));
            out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        }
    }

    XmlNode parse_element() {
        if (eof() || peek() != '<') fail("expected an element");
        XmlNode node;
        node.line = line_;
        node.column = column_;
        advance();  // '<'
        node.name = local_name(read_name());

        for (;;) {
            skip_whitespace();
            if (eof()) fail("unterminated start tag");
            if (peek() == '>') {
                advance();
                break;
            }
            if (starts_with("/>")) {
                advance(2);
                return node;
            }
            std::string attr = read_name();
            skip_whitespace();
            if (eof() || peek() != '=') fail("expected '=' in attribute");
            advance();
            skip_whitespace();
            if (eof() || (peek() != '"' && peek() != '\''))
                fail("expected a quoted attribute value");
            char quote = peek();
            advance();
            std::size_t begin = pos_;
            while (!eof() && peek() != quote) advance();
            if (eof()) fail("unterminated attribute value");
            std::string value;
            append_decoded(in_.substr(begin, pos_ - begin), value);
            advance();  // closing quote
            if (attr.rfind("xmlns", 0) != 0) attr = local_name(attr);
            node.attributes.emplace_back(std::move(attr), std::move(value));
        }

        // Content until the matching end tag.
        for (;;) {
            std::size_t begin = pos_;
            while (!eof() && peek() != '<') advance();
            if (eof()) fail("unterminated element <" + node.name + ">");
            if (pos_ > begin)
                append_decoded(in_.substr(begin, pos_ - begin), node.text);

            if (starts_with("</")) {
                advance(2);
                std::string closing = local_name(read_name());
                if (closing != node.name)
                    fail("mismatched end tag </" + closing + "> for <" +
                         node.name + ">");
                skip_whitespace();
                if (eof() || peek() != '>') fail("malformed end tag");
                advance();
                return node;
            }
            if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("<![CDATA[")) {
                advance(9);
                std::size_t data_begin = pos_;
                while (!eof() && !starts_with("]]>")) advance();
                if (eof()) fail("unterminated CDATA section");
                node.text.append(in_.substr(data_begin, pos_ - data_begin));
                advance(3);
            } else if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else {
                node.children.push_back(parse_element());
            }
        }
    }
};

}  // namespace xml_detail

inline XmlNode xml_parse(std::string_view input) {
    return xml_detail::Parser(input).run();
}

inline void xml_escape(std::string_view s, std::string& out) {
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    xml_escape(s, out);
    return out;
}

// Compact canonical form: attributes in stored order, character data
// emitted before child elements. Reparsing the output reproduces the
// node, so serialization is idempotent after one round.
inline void xml_serialize(const XmlNode& node, std::string& out) {
    out.push_back('<');
    out.append(node.name);
    for (const auto& [k, v] : node.attributes) {
        out.push_back(' ');
        out.append(k);
        out.append("=\"");
        xml_escape(v, out);
        out.push_back('"');
    }
    if (node.text.empty() && node.children.empty()) {
        out.append("/>");
        return;
    }
    out.push_back('>');
    xml_escape(node.text, out);
    for (const XmlNode& c : node.children) xml_serialize(c, out);
    out.append("</");
    out.append(node.name);
    out.push_back('>');
}

inline std::string xml_serialize(const XmlNode& node) {
    std::string out;
    xml_serialize(node, out);
    return out;
}

}  // namespace cctvx
