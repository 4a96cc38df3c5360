#pragma once

// Strict accessors over a JSON document that report failures as JSON pointers.

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>

#include "harmony_tools/problem.hpp"

namespace harmony::service::detail {

inline std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

/// A JSON value paired with its location.
class Node {
 public:
  Node(const Json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

  const Json& value() const { return value_; }
  const std::string& pointer() const { return pointer_; }

  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(pointer_, what); }

  Node at(const std::string& key) const {
    require_object();
    if (!value_.contains(key)) Node(value_, pointer_ + "/" + escape_token(key)).fail("required property is missing");
    return Node(value_.at(key), pointer_ + "/" + escape_token(key));
  }
  Node at(std::size_t index) const { return Node(value_.at(index), pointer_ + "/" + std::to_string(index)); }

  bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

  void require_object() const {
    if (!value_.is_object()) fail("expected an object");
  }
  void require_array(std::size_t min_items = 0) const {
    if (!value_.is_array()) fail("expected an array");
    if (value_.size() < min_items) fail("expected at least " + std::to_string(min_items) + " item(s)");
  }
  std::size_t size() const { return value_.size(); }

  /// Rejects properties outside the allowed set.
  void only(std::initializer_list<const char*> allowed) const {
    require_object();
    for (const auto& [key, _] : value_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) Node(value_, pointer_ + "/" + escape_token(key)).fail("unknown property");
    }
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  bool boolean() const {
    if (!value_.is_boolean()) fail("expected a boolean");
    return value_.get<bool>();
  }
  std::int64_t integer(std::int64_t lo = std::numeric_limits<std::int64_t>::min(),
                       std::int64_t hi = std::numeric_limits<std::int64_t>::max()) const {
    if (!value_.is_number_integer()) fail("expected an integer");
    std::int64_t v;
    if (value_.is_number_unsigned()) {
      auto u = value_.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) fail("integer out of range");
      v = static_cast<std::int64_t>(u);
    } else {
      v = value_.get<std::int64_t>();
    }
    if (v < lo || v > hi) {
      fail("expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
  }
  /// A rational given as a string ("3/4", "0.75") or a JSON number. Numbers
  /// are read from their decimal text, never through binary floating point.
  Rational rational() const {
    try {
      if (value_.is_string()) return parse_rational(value_.get<std::string>());
      if (value_.is_number_integer()) return Rational(integer());
      if (value_.is_number_float()) return parse_rational(value_.dump());
    } catch (const InputError& e) {
      fail(e.what());
    }
    fail("expected a rational (string like \"3/4\" or a number)");
  }

 private:
  const Json& value_;
  std::string pointer_;
};

}  // namespace harmony::service::detail
