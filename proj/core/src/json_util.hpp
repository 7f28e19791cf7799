#pragma once

#include "wabe/core/error.hpp"
#include "wabe/core/types.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>

namespace wabe::json_detail {

using Json = nlohmann::ordered_json;

/// Field-path aware reader that rejects anything it was not told about.
class Reader {
 public:
  Reader(const Json& node, std::string path, const std::string& origin)
      : node_(node), path_(std::move(path)), origin_(origin) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(origin_ + ": " + (path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!node_.is_object()) fail("expected an object");
    for (const auto& item : node_.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || item.key() == a;
      if (!known) {
        throw Error(origin_ + ": unknown field '" + child_path(item.key()) + "'");
      }
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  Reader at(const char* key) const {
    if (!node_.contains(key)) {
      throw Error(origin_ + ": missing field '" + child_path(key) + "'");
    }
    return Reader(node_.at(key), child_path(key), origin_);
  }

  Reader at(std::size_t i) const {
    return Reader(node_.at(i), path_ + "[" + std::to_string(i) + "]", origin_);
  }

  std::size_t array_size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    const double v = node_.get<double>();
    if (!std::isfinite(v)) fail("number is not finite");
    return v;
  }

  std::int64_t integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    if (node_.is_number_unsigned()) {
      const auto u = node_.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) fail("integer out of range");
      return static_cast<std::int64_t>(u);
    }
    return node_.get<std::int64_t>();
  }

  int int32() const {
    const std::int64_t v = integer();
    if (v < INT32_MIN || v > INT32_MAX) fail("integer out of range");
    return static_cast<int>(v);
  }

  std::uint64_t uint64() const {
    if (!node_.is_number_unsigned() && !(node_.is_number_integer() && node_.get<std::int64_t>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return node_.get<std::uint64_t>();
  }

  bool boolean() const {
    if (!node_.is_boolean()) fail("expected true or false");
    return node_.get<bool>();
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec() const {
    if (array_size() != static_cast<std::size_t>(N)) {
      fail("expected " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) v[i] = at(static_cast<std::size_t>(i)).number();
    return v;
  }

  const Json& node() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const Json& node_;
  std::string path_;
  const std::string& origin_;
};

inline Json parse_document(std::string_view text, const std::string& origin) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(origin + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline double finite_out(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(std::string("cannot serialize non-finite ") + what);
  return v;
}

template <typename Derived>
Json vec_json(const Eigen::MatrixBase<Derived>& v, const char* what) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(finite_out(v[i], what));
  return a;
}

}  // namespace wabe::json_detail
