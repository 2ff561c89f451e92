#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace formbound::toml {

/// Minimal TOML subset: bare keys, strings, integers, floats (inf/nan),
/// booleans, single-line arrays, [table] and [[array-of-tables]] headers.
/// Enough for the experiment config; parse errors carry line numbers.
class Value;
using Table = std::map<std::string, Value>;
using Array = std::vector<Value>;

class Value {
  public:
    using Storage = std::variant<bool, std::int64_t, double, std::string, Array, Table>;

    Value() : v_(std::int64_t{0}) {}
    Value(bool b) : v_(b) {}
    Value(std::int64_t i) : v_(i) {}
    Value(int i) : v_(static_cast<std::int64_t>(i)) {}
    Value(double d) : v_(d) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(Array a) : v_(std::move(a)) {}
    Value(Table t) : v_(std::move(t)) {}

    bool is_table() const { return std::holds_alternative<Table>(v_); }
    bool is_array() const { return std::holds_alternative<Array>(v_); }

    bool as_bool() const;
    std::int64_t as_int() const;
    double as_double() const;  // accepts integers
    const std::string& as_string() const;
    const Array& as_array() const;
    const Table& as_table() const;
    Array& as_array();
    Table& as_table();

    bool operator==(const Value& o) const { return v_ == o.v_; }

    const Storage& storage() const { return v_; }

  private:
    Storage v_;
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);
std::string serialize(const Table& root);

/// Lookup helpers; all throw ConfigError on type mismatch, the ones without
/// a default also throw when the key is missing.
const Value* find(const Table& t, const std::string& key);
double get_double(const Table& t, const std::string& key, double fallback);
std::int64_t get_int(const Table& t, const std::string& key, std::int64_t fallback);
bool get_bool(const Table& t, const std::string& key, bool fallback);
std::string get_string(const Table& t, const std::string& key, const std::string& fallback);
std::vector<double> get_double_array(const Table& t, const std::string& key,
                                     std::vector<double> fallback);

}  // namespace formbound::toml
