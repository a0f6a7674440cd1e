#pragma once

// Minimal sectioned key = value format:
//
//   # comment
//   key = 1.5
//   [table]
//   name = "text"
//   flag = true
//   list = [0, 3, 6]
//   [[repeated]]
//   [[repeated.child]]

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace microgrid::config {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry {
    std::string key;
    Value value;
    int line = 0;
};

struct Table {
    std::string name;  // empty for the root table
    bool repeated = false;
    int line = 0;
    std::vector<Entry> entries;
};

/// Tables in file order; the root table always comes first.
/// Throws ConfigError("line N: ...") on malformed input.
std::vector<Table> parse(std::string_view text);

std::string format_number(double v);
std::string quote(std::string_view s);

}  // namespace microgrid::config
