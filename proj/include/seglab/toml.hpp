#pragma once

// Minimal TOML subset reader, just enough for experiment configs:
// [section] headers, bare keys, strings, numbers, booleans, and (possibly
// nested) arrays. Comments start with '#'. Errors carry line numbers.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace seglab::toml {

class Value;
using Array = std::vector<Value>;

class Value {
  public:
    Value() : v_(0.0) {}
    explicit Value(std::string s) : v_(std::move(s)) {}
    explicit Value(double d) : v_(d) {}
    explicit Value(bool b) : v_(b) {}
    explicit Value(Array a) : v_(std::move(a)) {}

    bool is_string() const { return std::holds_alternative<std::string>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }

    const std::string& as_string() const {
        if (!is_string()) throw std::runtime_error("toml: expected a string");
        return std::get<std::string>(v_);
    }
    double as_number() const {
        if (!is_number()) throw std::runtime_error("toml: expected a number");
        return std::get<double>(v_);
    }
    int as_int() const {
        const double d = as_number();
        if (d != double(long(d))) throw std::runtime_error("toml: expected an integer");
        return int(d);
    }
    bool as_bool() const {
        if (!is_bool()) throw std::runtime_error("toml: expected a boolean");
        return std::get<bool>(v_);
    }
    const Array& as_array() const {
        if (!is_array()) throw std::runtime_error("toml: expected an array");
        return std::get<Array>(v_);
    }
    std::vector<double> as_number_array() const {
        std::vector<double> out;
        for (const auto& e : as_array()) out.push_back(e.as_number());
        return out;
    }

  private:
    std::variant<std::string, double, bool, Array> v_;
};

// key -> value per section; root-level keys live in section "".
using Table = std::map<std::string, std::map<std::string, Value>>;

namespace detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline Value parse_value(const std::string& s, std::size_t& i, int line);

inline Value parse_array(const std::string& s, std::size_t& i, int line) {
    ++i;  // '['
    Array out;
    for (;;) {
        skip_ws(s, i);
        if (i >= s.size())
            throw std::runtime_error("toml: unterminated array on line " + std::to_string(line));
        if (s[i] == ']') {
            ++i;
            return Value(std::move(out));
        }
        out.push_back(parse_value(s, i, line));
        skip_ws(s, i);
        if (i < s.size() && s[i] == ',') ++i;
    }
}

inline Value parse_value(const std::string& s, std::size_t& i, int line) {
    skip_ws(s, i);
    if (i >= s.size())
        throw std::runtime_error("toml: missing value on line " + std::to_string(line));
    const char c = s[i];
    if (c == '[') return parse_array(s, i, line);
    if (c == '"') {
        std::string out;
        ++i;
        while (i < s.size() && s[i] != '"') {
            if (s[i] == '\\' && i + 1 < s.size()) ++i;
            out.push_back(s[i++]);
        }
        if (i >= s.size())
            throw std::runtime_error("toml: unterminated string on line " + std::to_string(line));
        ++i;
        return Value(std::move(out));
    }
    if (s.compare(i, 4, "true") == 0 &&
        (i + 4 == s.size() || !std::isalnum((unsigned char)s[i + 4]))) {
        i += 4;
        return Value(true);
    }
    if (s.compare(i, 5, "false") == 0 &&
        (i + 5 == s.size() || !std::isalnum((unsigned char)s[i + 5]))) {
        i += 5;
        return Value(false);
    }
    std::size_t j = i;
    while (j < s.size() && (std::isdigit((unsigned char)s[j]) || s[j] == '+' || s[j] == '-' ||
                            s[j] == '.' || s[j] == 'e' || s[j] == 'E' || s[j] == '_'))
        ++j;
    std::string num = s.substr(i, j - i);
    num.erase(std::remove(num.begin(), num.end(), '_'), num.end());
    try {
        std::size_t used = 0;
        const double d = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument("trailing");
        i = j;
        return Value(d);
    } catch (const std::exception&) {
        throw std::runtime_error("toml: bad value '" + s.substr(i, j - i) + "' on line " +
                                 std::to_string(line));
    }
}

inline std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

}  // namespace detail

inline Table parse(const std::string& text) {
    Table out;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = detail::strip_comment(raw);
        std::size_t i = 0;
        detail::skip_ws(s, i);
        if (i >= s.size() || s[i] == '\r') continue;
        if (s[i] == '[') {
            const auto close = s.find(']', i);
            if (close == std::string::npos)
                throw std::runtime_error("toml: unterminated section header on line " +
                                         std::to_string(line));
            section = s.substr(i + 1, close - i - 1);
            continue;
        }
        const auto eq = s.find('=', i);
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value on line " +
                                     std::to_string(line));
        std::string key = s.substr(i, eq - i);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        if (key.empty())
            throw std::runtime_error("toml: empty key on line " + std::to_string(line));
        std::size_t vi = eq + 1;
        out[section][key] = detail::parse_value(s, vi, line);
        detail::skip_ws(s, vi);
        if (vi < s.size() && s[vi] != '\r')
            throw std::runtime_error("toml: trailing content on line " + std::to_string(line));
    }
    return out;
}

}  // namespace seglab::toml
