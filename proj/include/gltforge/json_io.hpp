#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gltforge/curves.hpp"
#include "gltforge/poly.hpp"

namespace gltforge {

using Json = nlohmann::json;

/// Read-only view of a config value that knows its JSON pointer, so every
/// validation failure can name the offending location.
class Node {
 public:
  explicit Node(const Json& j, std::string pointer = "") : j_(&j), ptr_(std::move(pointer)) {}

  const Json& json() const { return *j_; }
  const std::string& pointer() const { return ptr_; }
  std::string where() const { return ptr_.empty() ? "/" : ptr_; }

  [[noreturn]] void fail(const std::string& message) const;

  void expect_object() const;
  void expect_array(std::size_t min_size = 0) const;
  /// Rejects keys outside `allowed`.
  void only_keys(std::initializer_list<const char*> allowed) const;

  bool has(const std::string& key) const;
  Node at(const std::string& key) const;  // required member
  std::optional<Node> find(const std::string& key) const;
  Node at(std::size_t i) const;
  std::size_t size() const;

  double number() const;
  double number_in(double lo, double hi) const;
  long integer(long lo, long hi) const;
  bool boolean() const;
  std::string string() const;
  std::string one_of(std::initializer_list<const char*> allowed) const;
  /// [re, im] or a bare real number.
  Complex complex() const;

  double number_or(const std::string& key, double fallback) const;
  long integer_or(const std::string& key, long lo, long hi, long fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;

 private:
  const Json* j_;
  std::string ptr_;
};

Json to_json(Complex c);
Json to_json(const CVector& v);
Json to_json(const CMatrix& m);
Json to_json(const PolyZ& p);
Json to_json(const CurveEq& p);
Json to_json(const Path& p);
Json to_json(const Cycle& c);

CVector vector_from(const Node& n);
/// Array of rows, each an array of complex entries.
CMatrix matrix_from(const Node& n);
PolyZ poly_from(const Node& n);
/// {"d": 2, "alphas": [[...], ...]}
CurveEq curve_from(const Node& n);
/// [A_0, A_1, ...] of equal square matrices.
MatPoly matpoly_from(const Node& n);
Path path_from(const Node& n);
/// {"loops": [...], "chain": false, "anti_invariant": false} or the
/// single-loop shorthand {"legs": [...]}.
Cycle cycle_from(const Node& n);

}  // namespace gltforge
