#include "gltforge/json_io.hpp"

#include <cmath>

namespace gltforge {
namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

const char* type_name(const Json& j) { return j.type_name(); }

}  // namespace

void Node::fail(const std::string& message) const { throw Error(ErrorKind::Config, where() + ": " + message); }

void Node::expect_object() const {
  if (!j_->is_object()) fail(std::string("expected an object, got ") + type_name(*j_));
}

void Node::expect_array(std::size_t min_size) const {
  if (!j_->is_array()) fail(std::string("expected an array, got ") + type_name(*j_));
  if (j_->size() < min_size) fail("expected at least " + std::to_string(min_size) + " elements");
}

void Node::only_keys(std::initializer_list<const char*> allowed) const {
  expect_object();
  for (auto it = j_->begin(); it != j_->end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) Node(it.value(), ptr_ + "/" + escape_token(it.key())).fail("unknown property '" + it.key() + "'");
  }
}

bool Node::has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

Node Node::at(const std::string& key) const {
  expect_object();
  if (!j_->contains(key)) fail("missing required property '" + key + "'");
  return Node((*j_)[key], ptr_ + "/" + escape_token(key));
}

std::optional<Node> Node::find(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return Node((*j_)[key], ptr_ + "/" + escape_token(key));
}

Node Node::at(std::size_t i) const {
  expect_array();
  if (i >= j_->size()) fail("index " + std::to_string(i) + " out of range");
  return Node((*j_)[i], ptr_ + "/" + std::to_string(i));
}

std::size_t Node::size() const {
  expect_array();
  return j_->size();
}

double Node::number() const {
  if (!j_->is_number()) fail(std::string("expected a number, got ") + type_name(*j_));
  const double v = j_->get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

double Node::number_in(double lo, double hi) const {
  const double v = number();
  if (v < lo || v > hi) fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
  return v;
}

long Node::integer(long lo, long hi) const {
  if (!j_->is_number_integer()) fail(std::string("expected an integer, got ") + type_name(*j_));
  const long v = j_->get<long>();
  if (v < lo || v > hi)
    fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

bool Node::boolean() const {
  if (!j_->is_boolean()) fail(std::string("expected a boolean, got ") + type_name(*j_));
  return j_->get<bool>();
}

std::string Node::string() const {
  if (!j_->is_string()) fail(std::string("expected a string, got ") + type_name(*j_));
  return j_->get<std::string>();
}

std::string Node::one_of(std::initializer_list<const char*> allowed) const {
  const std::string s = string();
  std::string list;
  for (const char* a : allowed) {
    if (s == a) return s;
    list += list.empty() ? a : std::string(", ") + a;
  }
  fail("'" + s + "' is not one of {" + list + "}");
}

Complex Node::complex() const {
  if (j_->is_number()) return {number(), 0.0};
  if (!j_->is_array() || j_->size() != 2) fail("expected a complex number [re, im]");
  return {at(0).number(), at(1).number()};
}

double Node::number_or(const std::string& key, double fallback) const {
  const auto n = find(key);
  return n ? n->number() : fallback;
}

long Node::integer_or(const std::string& key, long lo, long hi, long fallback) const {
  const auto n = find(key);
  return n ? n->integer(lo, hi) : fallback;
}

bool Node::boolean_or(const std::string& key, bool fallback) const {
  const auto n = find(key);
  return n ? n->boolean() : fallback;
}

Json to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(to_json(v(k)));
  return out;
}

Json to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

Json to_json(const PolyZ& p) {
  Json out = Json::array();
  for (Complex c : p.coeffs()) out.push_back(to_json(c));
  return out;
}

Json to_json(const CurveEq& p) {
  Json alphas = Json::array();
  for (const PolyZ& a : p.alphas()) alphas.push_back(to_json(a));
  return {{"d", p.d()}, {"alphas", alphas}};
}

Json to_json(const Path& p) {
  Json out;
  if (p.kind == PathKind::Segment) {
    out = {{"kind", "segment"}, {"from", to_json(p.a)}, {"to", to_json(p.b)}};
  } else {
    out = {{"kind", "arc"},         {"center", to_json(p.center)}, {"radius", p.radius},
           {"theta0", p.theta0}, {"theta1", p.theta1}};
  }
  if (p.tau) out["tau"] = true;
  auto anchor = [](const Anchor& a) { return Json{{"p", a.p}, {"q", a.q}, {"guess", to_json(a.guess)}}; };
  if (p.anchor_a) out["anchor_from"] = anchor(*p.anchor_a);
  if (p.anchor_b) out["anchor_to"] = anchor(*p.anchor_b);
  return out;
}

Json to_json(const Cycle& c) {
  Json loops = Json::array();
  for (const auto& l : c.loops) {
    Json legs = Json::array();
    for (const auto& leg : l.legs) {
      Json j = {{"component", leg.component}, {"path", to_json(leg.path)}};
      if (leg.start_eta) j["start_eta"] = to_json(*leg.start_eta);
      if (leg.start_sheet >= 0) j["start_sheet"] = leg.start_sheet;
      legs.push_back(j);
    }
    loops.push_back({{"legs", legs}, {"weight", l.weight}});
  }
  return {{"loops", loops}, {"chain", c.chain}};
}

CVector vector_from(const Node& n) {
  n.expect_array();
  CVector v(static_cast<Eigen::Index>(n.size()));
  for (std::size_t k = 0; k < n.size(); ++k) v(static_cast<Eigen::Index>(k)) = n.at(k).complex();
  return v;
}

CMatrix matrix_from(const Node& n) {
  n.expect_array(1);
  const std::size_t rows = n.size();
  const std::size_t cols = n.at(0).size();
  if (cols == 0) n.fail("matrix rows must be non-empty");
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const Node row = n.at(i);
    if (row.size() != cols) row.fail("ragged matrix row");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).complex();
  }
  return m;
}

PolyZ poly_from(const Node& n) {
  n.expect_array(1);
  std::vector<Complex> c;
  for (std::size_t k = 0; k < n.size(); ++k) c.push_back(n.at(k).complex());
  return PolyZ(std::move(c));
}

CurveEq curve_from(const Node& n) {
  n.only_keys({"d", "alphas"});
  const int d = static_cast<int>(n.integer_or("d", 1, 16, 2));
  const Node alphas = n.at("alphas");
  alphas.expect_array(1);
  std::vector<PolyZ> ps;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    PolyZ p = poly_from(alphas.at(i));
    const int bound = d * static_cast<int>(i + 1);
    if (p.deg_bound() > bound) alphas.at(i).fail("alpha_" + std::to_string(i + 1) + " has more than " +
                                                 std::to_string(bound + 1) + " coefficients");
    ps.push_back(p.with_bound(bound));
  }
  try {
    return CurveEq(d, std::move(ps));
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

MatPoly matpoly_from(const Node& n) {
  n.expect_array(1);
  std::vector<CMatrix> mats;
  for (std::size_t i = 0; i < n.size(); ++i) {
    CMatrix m = matrix_from(n.at(i));
    if (m.rows() != m.cols()) n.at(i).fail("matrix coefficient must be square");
    if (!mats.empty() && m.rows() != mats.front().rows()) n.at(i).fail("matrix coefficients differ in size");
    mats.push_back(std::move(m));
  }
  return MatPoly(std::move(mats));
}

Path path_from(const Node& n) {
  n.only_keys({"kind", "from", "to", "center", "radius", "theta0", "theta1", "tau", "anchor_from", "anchor_to"});
  const std::string kind = n.at("kind").one_of({"segment", "arc", "circle"});
  Path p;
  if (kind == "segment") {
    p = Path::segment(n.at("from").complex(), n.at("to").complex());
  } else {
    const Complex center = n.at("center").complex();
    const double radius = n.at("radius").number();
    if (!(radius > 0.0)) n.at("radius").fail("radius must be positive");
    const double t0 = n.number_or("theta0", 0.0);
    p = kind == "circle" ? Path::circle(center, radius, t0)
                         : Path::arc(center, radius, t0, n.number_or("theta1", t0 + 2.0 * kPi));
  }
  p.tau = n.boolean_or("tau", false);
  auto anchor = [](const Node& a) {
    a.only_keys({"p", "q", "guess"});
    return Anchor{static_cast<int>(a.at("p").integer(0, 64)), static_cast<int>(a.at("q").integer(0, 64)),
                  a.at("guess").complex()};
  };
  if (auto a = n.find("anchor_from")) p.anchor_a = anchor(*a);
  if (auto a = n.find("anchor_to")) p.anchor_b = anchor(*a);
  return p;
}

namespace {

Loop loop_from(const Node& n) {
  n.only_keys({"legs", "weight"});
  Loop l;
  l.weight = n.number_or("weight", 1.0);
  const Node legs = n.at("legs");
  legs.expect_array(1);
  for (std::size_t k = 0; k < legs.size(); ++k) {
    const Node j = legs.at(k);
    j.only_keys({"component", "path", "start_eta", "start_sheet"});
    Leg leg;
    leg.component = static_cast<int>(j.integer_or("component", 0, 64, 0));
    leg.path = path_from(j.at("path"));
    if (auto e = j.find("start_eta")) leg.start_eta = e->complex();
    leg.start_sheet = static_cast<int>(j.integer_or("start_sheet", -1, 64, -1));
    l.legs.push_back(std::move(leg));
  }
  return l;
}

}  // namespace

Cycle cycle_from(const Node& n) {
  n.only_keys({"loops", "legs", "weight", "chain", "anti_invariant"});
  Cycle c;
  if (n.has("loops")) {
    if (n.has("legs")) n.fail("give either 'loops' or 'legs', not both");
    const Node loops = n.at("loops");
    loops.expect_array(1);
    for (std::size_t k = 0; k < loops.size(); ++k) c.loops.push_back(loop_from(loops.at(k)));
  } else {
    Json single = {{"legs", n.at("legs").json()}, {"weight", n.number_or("weight", 1.0)}};
    c.loops.push_back(loop_from(Node(single, n.pointer())));
  }
  c.chain = n.boolean_or("chain", false);
  if (n.boolean_or("anti_invariant", false)) {
    try {
      c = c.anti_invariant();
    } catch (const Error& e) {
      n.fail(e.what());
    }
  }
  return c;
}

}  // namespace gltforge
