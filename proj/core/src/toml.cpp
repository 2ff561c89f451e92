#include "formbound/toml.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "formbound/errors.hpp"

namespace formbound::toml {

bool Value::as_bool() const {
    if (auto* b = std::get_if<bool>(&v_)) return *b;
    throw ConfigError("expected a boolean value");
}

std::int64_t Value::as_int() const {
    if (auto* i = std::get_if<std::int64_t>(&v_)) return *i;
    throw ConfigError("expected an integer value");
}

double Value::as_double() const {
    if (auto* d = std::get_if<double>(&v_)) return *d;
    if (auto* i = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*i);
    throw ConfigError("expected a numeric value");
}

const std::string& Value::as_string() const {
    if (auto* s = std::get_if<std::string>(&v_)) return *s;
    throw ConfigError("expected a string value");
}

const Array& Value::as_array() const {
    if (auto* a = std::get_if<Array>(&v_)) return *a;
    throw ConfigError("expected an array value");
}

const Table& Value::as_table() const {
    if (auto* t = std::get_if<Table>(&v_)) return *t;
    throw ConfigError("expected a table value");
}

Array& Value::as_array() {
    if (auto* a = std::get_if<Array>(&v_)) return *a;
    throw ConfigError("expected an array value");
}

Table& Value::as_table() {
    if (auto* t = std::get_if<Table>(&v_)) return *t;
    throw ConfigError("expected a table value");
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line;

    bool done() const { return i >= s.size(); }
    char peek() const { return s[i]; }
    void skip_ws() {
        while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line); }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
    std::string key;
    while (!c.done() && is_bare_key_char(c.peek())) key.push_back(c.s[c.i++]);
    if (key.empty()) c.fail("expected a key");
    return key;
}

std::string parse_string(Cursor& c) {
    ++c.i;  // opening quote
    std::string out;
    while (!c.done()) {
        char ch = c.s[c.i++];
        if (ch == '"') return out;
        if (ch == '\\') {
            if (c.done()) break;
            char esc = c.s[c.i++];
            switch (esc) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default: c.fail(std::string("unknown escape \\") + esc);
            }
        } else {
            out.push_back(ch);
        }
    }
    c.fail("unterminated string");
}

Value parse_number(Cursor& c) {
    const std::size_t start = c.i;
    while (!c.done() && (std::isalnum(static_cast<unsigned char>(c.peek())) ||
                         c.peek() == '+' || c.peek() == '-' || c.peek() == '.'))
        ++c.i;
    std::string tok = c.s.substr(start, c.i - start);
    if (tok.empty()) c.fail("expected a value");
    if (tok == "true") return Value(true);
    if (tok == "false") return Value(false);
    std::string body = tok;
    double sign = 1.0;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
        if (body[0] == '-') sign = -1.0;
        body = body.substr(1);
    }
    if (body == "inf") return Value(sign * std::numeric_limits<double>::infinity());
    if (body == "nan") return Value(std::numeric_limits<double>::quiet_NaN());
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    try {
        std::size_t used = 0;
        if (is_float) {
            const double d = std::stod(tok, &used);
            if (used != tok.size()) c.fail("malformed number '" + tok + "'");
            return Value(d);
        }
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) c.fail("malformed number '" + tok + "'");
        return Value(static_cast<std::int64_t>(v));
    } catch (const std::exception&) {
        c.fail("malformed number '" + tok + "'");
    }
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
    ++c.i;  // '['
    Array arr;
    c.skip_ws();
    if (!c.done() && c.peek() == ']') {
        ++c.i;
        return Value(std::move(arr));
    }
    while (true) {
        c.skip_ws();
        arr.push_back(parse_value(c));
        c.skip_ws();
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ',') {
            ++c.i;
            c.skip_ws();
            if (!c.done() && c.peek() == ']') {  // trailing comma
                ++c.i;
                return Value(std::move(arr));
            }
            continue;
        }
        if (c.peek() == ']') {
            ++c.i;
            return Value(std::move(arr));
        }
        c.fail("expected ',' or ']' in array");
    }
}

Value parse_value(Cursor& c) {
    c.skip_ws();
    if (c.done()) c.fail("expected a value");
    const char ch = c.peek();
    if (ch == '"') return Value(parse_string(c));
    if (ch == '[') return parse_array(c);
    return parse_number(c);
}

// Strip a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (ch == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (ch == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_path(const std::string& path, int line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : path) {
        if (ch == '.') {
            if (cur.empty()) throw ConfigError("empty table path segment", line);
            parts.push_back(cur);
            cur.clear();
        } else if (is_bare_key_char(ch)) {
            cur.push_back(ch);
        } else {
            throw ConfigError(std::string("bad character '") + ch + "' in table path", line);
        }
    }
    if (cur.empty()) throw ConfigError("empty table path segment", line);
    parts.push_back(cur);
    return parts;
}

// Walk/create a path from the root; array segments resolve to their last
// element, TOML style.
Table* navigate(Table& root, const std::vector<std::string>& path, int line,
                bool final_is_array) {
    Table* cur = &root;
    for (std::size_t j = 0; j < path.size(); ++j) {
        const bool last = j + 1 == path.size();
        auto it = cur->find(path[j]);
        if (it == cur->end()) {
            if (last && final_is_array) {
                it = cur->emplace(path[j], Value(Array{})).first;
                it->second.as_array().emplace_back(Table{});
                return &it->second.as_array().back().as_table();
            }
            it = cur->emplace(path[j], Value(Table{})).first;
            cur = &it->second.as_table();
            continue;
        }
        Value& v = it->second;
        if (last && final_is_array) {
            if (!v.is_array()) throw ConfigError("'" + path[j] + "' is not an array of tables", line);
            v.as_array().emplace_back(Table{});
            return &v.as_array().back().as_table();
        }
        if (v.is_table()) {
            cur = &v.as_table();
        } else if (v.is_array()) {
            if (v.as_array().empty() || !v.as_array().back().is_table())
                throw ConfigError("'" + path[j] + "' is not a table", line);
            cur = &v.as_array().back().as_table();
        } else {
            throw ConfigError("'" + path[j] + "' is not a table", line);
        }
    }
    return cur;
}

}  // namespace

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    std::istringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            const bool is_array = line.size() > 1 && line[1] == '[';
            const std::string close = is_array ? "]]" : "]";
            if (line.size() < close.size() + (is_array ? 2 : 1) ||
                line.substr(line.size() - close.size()) != close)
                throw ConfigError("malformed table header", line_no);
            const std::string inner =
                trim(line.substr(is_array ? 2 : 1,
                                 line.size() - 2 * (is_array ? 2 : 1)));
            current = navigate(root, split_path(inner, line_no), line_no, is_array);
            continue;
        }
        Cursor c{line, 0, line_no};
        const std::string key = parse_bare_key(c);
        c.skip_ws();
        if (c.done() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
        ++c.i;
        Value v = parse_value(c);
        c.skip_ws();
        if (!c.done()) c.fail("trailing characters after value");
        if (!current->emplace(key, std::move(v)).second)
            throw ConfigError("duplicate key '" + key + "'", line_no);
    }
    return root;
}

Table parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

namespace {

std::string format_double(double d) {
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    if (std::isnan(d)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(ch);
        }
    }
    out.push_back('"');
    return out;
}

std::string scalar_text(const Value& v);

std::string array_text(const Array& a) {
    std::string out = "[";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ", ";
        out += scalar_text(a[i]);
    }
    out += "]";
    return out;
}

std::string scalar_text(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
            else if constexpr (std::is_same_v<T, double>) return format_double(x);
            else if constexpr (std::is_same_v<T, std::string>) return quote(x);
            else if constexpr (std::is_same_v<T, Array>) return array_text(x);
            else throw ConfigError("cannot serialize a nested table as a value");
        },
        v.storage());
}

bool is_table_array(const Value& v) {
    if (!v.is_array()) return false;
    const Array& a = v.as_array();
    if (a.empty()) return false;
    for (const auto& e : a)
        if (!e.is_table()) return false;
    return true;
}

void emit_table(std::string& out, const Table& t, const std::string& path) {
    for (const auto& [k, v] : t)
        if (!v.is_table() && !is_table_array(v))
            out += k + " = " + scalar_text(v) + "\n";
    for (const auto& [k, v] : t) {
        const std::string sub = path.empty() ? k : path + "." + k;
        if (v.is_table()) {
            out += "\n[" + sub + "]\n";
            emit_table(out, v.as_table(), sub);
        } else if (is_table_array(v)) {
            for (const auto& e : v.as_array()) {
                out += "\n[[" + sub + "]]\n";
                emit_table(out, e.as_table(), sub);
            }
        }
    }
}

}  // namespace

std::string serialize(const Table& root) {
    std::string out;
    emit_table(out, root, "");
    return out;
}

const Value* find(const Table& t, const std::string& key) {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

double get_double(const Table& t, const std::string& key, double fallback) {
    const Value* v = find(t, key);
    return v ? v->as_double() : fallback;
}

std::int64_t get_int(const Table& t, const std::string& key, std::int64_t fallback) {
    const Value* v = find(t, key);
    return v ? v->as_int() : fallback;
}

bool get_bool(const Table& t, const std::string& key, bool fallback) {
    const Value* v = find(t, key);
    return v ? v->as_bool() : fallback;
}

std::string get_string(const Table& t, const std::string& key, const std::string& fallback) {
    const Value* v = find(t, key);
    return v ? v->as_string() : fallback;
}

std::vector<double> get_double_array(const Table& t, const std::string& key,
                                     std::vector<double> fallback) {
    const Value* v = find(t, key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& e : v->as_array()) out.push_back(e.as_double());
    return out;
}

}  // namespace formbound::toml
