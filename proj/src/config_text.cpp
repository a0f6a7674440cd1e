#include "config_text.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "microgrid/errors.hpp"

namespace microgrid::config {
namespace {

[[noreturn]] void syntax(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_name(std::string_view s, bool dotted) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        (dotted && c == '.');
        if (!ok) return false;
    }
    return true;
}

// Strips a trailing comment that is not inside a string literal.
std::string_view strip_comment(std::string_view s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
        } else if (c == '"') {
            in_string = true;
        } else if (c == '#') {
            return s.substr(0, i);
        }
    }
    return s;
}

double parse_number(std::string_view tok, int line) {
    const std::string buf(tok);
    if (buf.empty()) syntax(line, "missing value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || errno == ERANGE) syntax(line, "invalid number '" + buf + "'");
    return v;
}

std::string parse_string(std::string_view tok, int line) {
    std::string out;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        const char c = tok[i];
        if (c == '"') {
            if (i + 1 != tok.size()) syntax(line, "unexpected text after string");
            return out;
        }
        if (c == '\\') {
            if (++i == tok.size()) break;
            switch (tok[i]) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default: syntax(line, "unknown escape in string");
            }
        } else {
            out.push_back(c);
        }
    }
    syntax(line, "unterminated string");
}

Value parse_value(std::string_view tok, int line) {
    if (tok.empty()) syntax(line, "missing value");
    if (tok.front() == '"') return parse_string(tok, line);
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.front() == '[') {
        if (tok.back() != ']') syntax(line, "unterminated list");
        std::vector<double> list;
        std::string_view body = trim(tok.substr(1, tok.size() - 2));
        while (!body.empty()) {
            const auto comma = body.find(',');
            list.push_back(parse_number(trim(body.substr(0, comma)), line));
            if (comma == std::string_view::npos) break;
            body = trim(body.substr(comma + 1));
            if (body.empty()) break;  // trailing comma
        }
        return list;
    }
    return parse_number(tok, line);
}

}  // namespace

std::vector<Table> parse(std::string_view text) {
    std::vector<Table> tables(1);
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        line = trim(strip_comment(line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            const bool repeated = line.starts_with("[[");
            const std::size_t open = repeated ? 2 : 1;
            if (line.size() < 2 * open + 1 || !line.ends_with(repeated ? "]]" : "]")) {
                syntax(line_no, "malformed table header");
            }
            const std::string_view name = trim(line.substr(open, line.size() - 2 * open));
            if (!valid_name(name, true)) syntax(line_no, "invalid table name");
            tables.push_back(Table{std::string(name), repeated, line_no, {}});
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) syntax(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        if (!valid_name(key, false)) syntax(line_no, "invalid key '" + std::string(key) + "'");
        Table& table = tables.back();
        for (const auto& e : table.entries) {
            if (e.key == key) syntax(line_no, "duplicate key '" + std::string(key) + "'");
        }
        table.entries.push_back(Entry{std::string(key), parse_value(trim(line.substr(eq + 1)), line_no), line_no});
    }
    return tables;
}

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

}  // namespace microgrid::config
