#include "gltforge/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gltforge/algebra.hpp"
#include "gltforge/battery.hpp"
#include "gltforge/fixtures.hpp"
#include "gltforge/flows.hpp"
#include "gltforge/hkverify.hpp"
#include "gltforge/sweep.hpp"

namespace gltforge {

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw Error(ErrorKind::SizeMismatch, "csv row width differs from header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  auto quoted = [](const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string s;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) s += ',';
      s += quoted(r[k]);
    }
    s += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return s;
}

std::string CsvTable::field(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string CsvTable::field(long v) { return std::to_string(v); }

namespace {

using Row = std::vector<std::string>;

std::string f(double v) { return CsvTable::field(v); }
std::string f(long v) { return CsvTable::field(v); }
std::string f(int v) { return CsvTable::field(static_cast<long>(v)); }

void push_complex(Row& row, Complex c) {
  row.push_back(f(c.real()));
  row.push_back(f(c.imag()));
}

void push_complex_header(Row& h, const std::string& name) {
  h.push_back(name + "_re");
  h.push_back(name + "_im");
}

struct OutputSpec {
  std::optional<std::string> path;
  std::string format;
};

struct Context {
  std::uint64_t seed = 1;
  int threads = 1;
  OutputSpec output;
  std::ostream* out = nullptr;
  std::ostream* log = nullptr;
};

OutputSpec parse_output(const Node& root, std::initializer_list<const char*> formats) {
  OutputSpec o;
  o.format = *formats.begin();
  if (auto n = root.find("output")) {
    n->only_keys({"path", "format"});
    if (auto p = n->find("path")) {
      o.path = p->string();
      if (o.path->empty()) p->fail("path must be non-empty");
    }
    if (auto fm = n->find("format")) o.format = fm->one_of(formats);
  }
  return o;
}

void emit(const Context& ctx, const std::string& content) {
  if (!ctx.output.path) {
    *ctx.out << content;
    ctx.out->flush();
    return;
  }
  std::ofstream file(*ctx.output.path, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidArgument, "cannot open output file '" + *ctx.output.path + "'");
  file << content;
  if (!file) throw Error(ErrorKind::InvalidArgument, "failed writing '" + *ctx.output.path + "'");
  *ctx.log << "wrote " << *ctx.output.path << "\n";
}

// ---------------------------------------------------------------- GLT specs

struct SpecPlan {
  GltSpec spec;
  std::optional<CVector> guess;
  std::optional<ChartPoint> base_chart;
  std::optional<SliceSpec> slice;
};

std::vector<int> int_list(const Node& n, long lo, long hi) {
  n.expect_array(1);
  std::vector<int> out;
  for (std::size_t k = 0; k < n.size(); ++k) out.push_back(static_cast<int>(n.at(k).integer(lo, hi)));
  return out;
}

SpecPlan parse_spec(const Node& n) {
  SpecPlan plan;
  if (n.json().is_string()) {
    const std::string name = n.one_of({"flat-quartic", "cubic-harmonic"});
    plan.spec = name == "flat-quartic" ? flat_quartic() : cubic_harmonic();
    return plan;
  }
  n.only_keys({"name", "n", "k", "components", "mu", "cycle", "guess", "fixture_seed", "freeze_last_component",
               "quad"});
  const std::string name =
      n.at("name").one_of({"flat-quartic", "cubic-harmonic", "monopole", "asymptotic-monopole", "su-n", "orbit"});
  if (name == "flat-quartic" || name == "cubic-harmonic") {
    n.only_keys({"name"});
    plan.spec = name == "flat-quartic" ? flat_quartic() : cubic_harmonic();
    return plan;
  }

  if (auto fs = n.find("fixture_seed")) {
    if (name != "monopole") fs->fail("fixture_seed is only available for the monopole spec");
    if (n.has("cycle") || n.has("n")) fs->fail("fixture_seed replaces 'cycle' and 'n'");
    const MonopoleFixture fx = monopole_fixture(static_cast<std::uint64_t>(fs->integer(0, 1L << 40)));
    plan.spec = fx.spec;
    plan.guess = fx.w;
    plan.base_chart = fx.chart;
  } else {
    Cycle c = cycle_from(n.at("cycle"));
    if (name == "monopole") {
      plan.spec = monopole(static_cast<int>(n.at("n").integer(1, 8)), std::move(c));
    } else if (name == "asymptotic-monopole") {
      plan.spec = asymptotic_monopole(int_list(n.at("components"), 1, 8), std::move(c));
    } else if (name == "su-n") {
      const Node mu_n = n.at("mu");
      mu_n.expect_array(2);
      std::vector<double> mu;
      for (std::size_t k = 0; k < mu_n.size(); ++k) mu.push_back(mu_n.at(k).number());
      const std::vector<int> ms = int_list(n.at("components"), 1, 8);
      if (mu.size() != ms.size() + 1) mu_n.fail("needs one more mass than components");
      plan.spec = su_n(mu, ms, std::move(c));
    } else {
      plan.spec = orbit(static_cast<int>(n.at("k").integer(1, 6)), std::move(c));
    }
    for (const auto& loop : plan.spec.cycle->cycle.loops)
      for (const auto& leg : loop.legs)
        if (leg.component >= static_cast<int>(plan.spec.components.size()))
          n.at("cycle").fail("leg refers to component " + std::to_string(leg.component) + " which does not exist");
  }
  if (auto g = n.find("guess")) {
    plan.guess = vector_from(*g);
    if (plan.guess->size() != plan.spec.size())
      g->fail("guess needs " + std::to_string(plan.spec.size()) + " coefficients");
    if (!is_tau_real(*plan.guess, plan.spec.rs, 1e-9)) g->fail("guess is not tau-real");
  }
  if (!plan.guess) n.fail("curve specs need a 'guess' (or 'fixture_seed')");
  if (auto q = n.find("quad")) {
    q->only_keys({"rel_tol", "max_panels"});
    plan.spec.quad.rel_tol = q->number_or("rel_tol", plan.spec.quad.rel_tol);
    plan.spec.quad.max_panels = static_cast<int>(q->integer_or("max_panels", 4, 1L << 20, plan.spec.quad.max_panels));
  }
  if (n.boolean_or("freeze_last_component", false)) {
    plan.slice = SliceSpec{last_component_multiplets(plan.spec), *plan.guess};
  }
  return plan;
}

ChartPoint parse_point(const Node& n, int multiplets) {
  n.only_keys({"u", "z"});
  ChartPoint c{CVector(multiplets), CVector(multiplets)};
  for (const char* key : {"u", "z"}) {
    const Node v = n.at(key);
    v.expect_array();
    if (static_cast<int>(v.size()) != multiplets)
      v.fail("needs one entry per multiplet (" + std::to_string(multiplets) + ")");
    for (int i = 0; i < multiplets; ++i)
      (key[0] == 'u' ? c.u : c.z)(i) = v.at(static_cast<std::size_t>(i)).complex();
  }
  return c;
}

std::vector<double> axis(const Node& n) {
  if (n.json().is_number()) return {n.number()};
  n.expect_array();
  if (n.size() != 3) n.fail("axis must be a number or [lo, hi, count]");
  const double lo = n.at(0).number(), hi = n.at(1).number();
  const long count = n.at(2).integer(1, 10000);
  std::vector<double> out;
  for (long k = 0; k < count; ++k) out.push_back(count == 1 ? lo : lo + (hi - lo) * k / static_cast<double>(count - 1));
  return out;
}

std::vector<ChartPoint> parse_points(const Node& root, const SpecPlan& plan) {
  const int nm = plan.spec.multiplets();
  std::vector<ChartPoint> pts;
  if (root.has("points") && root.has("grid")) root.fail("give either 'points' or 'grid', not both");
  if (auto p = root.find("points")) {
    p->expect_array(1);
    for (std::size_t k = 0; k < p->size(); ++k) pts.push_back(parse_point(p->at(k), nm));
    return pts;
  }
  if (auto g = root.find("grid")) {
    if (nm != 1) g->fail("grids are defined for single-multiplet specs; use 'points'");
    std::vector<double> ur, ui, zr, zi;
    if (g->json().is_array()) {
      if (g->size() != 2) g->fail("grid shorthand is [n_u, n_z]");
      ur = axis(Node(Json::array({0.5, 2.5, g->at(0).integer(1, 1000)}), g->pointer() + "/0"));
      zr = axis(Node(Json::array({-0.5, 0.5, g->at(1).integer(1, 1000)}), g->pointer() + "/1"));
      ui = {0.2};
      zi = {0.1};
    } else {
      g->only_keys({"u_re", "u_im", "z_re", "z_im"});
      ur = axis(g->at("u_re"));
      ui = g->has("u_im") ? axis(g->at("u_im")) : std::vector<double>{0.0};
      zr = axis(g->at("z_re"));
      zi = g->has("z_im") ? axis(g->at("z_im")) : std::vector<double>{0.0};
    }
    for (double a : ur)
      for (double b : ui)
        for (double c : zr)
          for (double d : zi) {
            ChartPoint cp{CVector(1), CVector(1)};
            cp.u(0) = {a, b};
            cp.z(0) = {c, d};
            pts.push_back(cp);
          }
    return pts;
  }
  if (plan.base_chart) return {*plan.base_chart};
  root.fail("missing required property 'points' (or 'grid')");
}

Json chart_json(const ChartPoint& c) { return {{"u", to_json(c.u)}, {"z", to_json(c.z)}}; }

void push_chart(Row& row, const ChartPoint& c) {
  for (Eigen::Index i = 0; i < c.u.size(); ++i) {
    push_complex(row, c.u(i));
    push_complex(row, c.z(i));
  }
}

void push_chart_header(Row& h, int nm) {
  for (int i = 0; i < nm; ++i) {
    push_complex_header(h, "u" + std::to_string(i));
    push_complex_header(h, "z" + std::to_string(i));
  }
}

template <class T, class F>
std::vector<T> sweep_points(const Context& ctx, std::size_t n, F&& one) {
  return sweep_parallel(
      n,
      [&](std::size_t k) {
        try {
          return one(k);
        } catch (const Error& e) {
          throw Error(e.kind(), "point " + std::to_string(k) + ": " + e.what());
        }
      },
      ctx.threads);
}

// ---------------------------------------------------------------- glt-solve

struct SolvePlan {
  SpecPlan spec;
  std::vector<ChartPoint> points;
  SolveOptions opt;
};

SolvePlan parse_glt_solve(const Node& root) {
  root.only_keys({"kind", "seed", "output", "spec", "points", "grid", "tol", "max_iter"});
  SolvePlan p;
  p.spec = parse_spec(root.at("spec"));
  p.points = parse_points(root, p.spec);
  if (auto t = root.find("tol")) p.opt.tol = t->number_in(1e-15, 1e-2);
  p.opt.max_iter = static_cast<int>(root.integer_or("max_iter", 1, 1000, p.opt.max_iter));
  return p;
}

struct SolveRecord {
  SolveResult s;
  double k = 0.0;
  FValue F;
  NondegReport nd;
  TwistorData tw;
};

int run_glt_solve(const SolvePlan& p, const Context& ctx) {
  const auto recs = sweep_points<SolveRecord>(ctx, p.points.size(), [&](std::size_t k) {
    SolveRecord r;
    r.s = solve_constraints(p.spec.spec, p.points[k], p.spec.guess, p.spec.slice, p.opt);
    r.k = kahler_potential(p.spec.spec, r.s);
    r.F = eval_F(p.spec.spec, r.s.w);
    r.nd = nondegeneracy(p.spec.spec, r.s);
    r.tw = twistor_first_order(p.spec.spec, r.s);
    return r;
  });
  const int nm = p.spec.spec.multiplets();
  if (ctx.output.format == "csv") {
    Row h{"index"};
    push_chart_header(h, nm);
    for (const char* c : {"K", "F_re", "F_im", "residual", "iterations", "jacobian_cond", "nondegeneracy"})
      h.push_back(c);
    for (int k = 0; k < p.spec.spec.size(); ++k) push_complex_header(h, "w" + std::to_string(k));
    CsvTable t(h);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      Row row{f(static_cast<long>(k))};
      push_chart(row, r.s.chart);
      row.insert(row.end(), {f(r.k), f(r.F.value), f(r.F.imag), f(r.s.residual), f(r.s.iterations),
                             f(r.s.jacobian_cond), to_string(r.nd.verdict)});
      for (Eigen::Index q = 0; q < r.s.w.size(); ++q) push_complex(row, r.s.w(q));
      t.add_row(row);
    }
    emit(ctx, t.str());
  } else {
    Json out = {{"kind", "glt-solve"}, {"spec", p.spec.spec.name}, {"records", Json::array()}};
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      out["records"].push_back({{"index", k},
                                {"chart", chart_json(r.s.chart)},
                                {"w", to_json(r.s.w)},
                                {"K", r.k},
                                {"F", to_json(r.F.full)},
                                {"residual", r.s.residual},
                                {"iterations", r.s.iterations},
                                {"jacobian_cond", r.s.jacobian_cond},
                                {"nondegeneracy",
                                 {{"verdict", to_string(r.nd.verdict)},
                                  {"smin", r.nd.smin},
                                  {"smax", r.nd.smax},
                                  {"printed_smin", r.nd.printed_smin},
                                  {"ranges_disagree", r.nd.ranges_disagree}}},
                                {"twistor", {{"dK_du", to_json(r.tw.dK_du)}, {"dK_dz", to_json(r.tw.dK_dz)}}}});
    }
    emit(ctx, out.dump(2) + "\n");
  }
  *ctx.log << "glt-solve: " << recs.size() << " points solved\n";
  return kExitOk;
}

// ---------------------------------------------------------------- hk-verify

struct HkPlan {
  SpecPlan spec;
  std::vector<ChartPoint> points;
  SecondDerivOptions opt;
};

HkPlan parse_hk_verify(const Node& root) {
  root.only_keys({"kind", "seed", "output", "spec", "points", "grid", "h", "inner_ratio"});
  HkPlan p;
  p.spec = parse_spec(root.at("spec"));
  p.points = parse_points(root, p.spec);
  if (auto h = root.find("h")) p.opt.h = h->number_in(1e-8, 1.0);
  if (auto r = root.find("inner_ratio")) p.opt.inner_ratio = r->number_in(0.1, 1.0);
  p.opt.guess = p.spec.guess;
  p.opt.slice = p.spec.slice;
  return p;
}

struct HkRecord {
  SecondDerivs sd;
  SpResult sp;
  JResult j;
  MetricReport g;
};

int run_hk_verify(const HkPlan& p, const Context& ctx) {
  const auto recs = sweep_points<HkRecord>(ctx, p.points.size(), [&](std::size_t k) {
    HkRecord r;
    r.sd = second_derivs(p.spec.spec, p.points[k], p.opt);
    r.sp = sp_check(r.sd);
    r.j = j_structure(r.sd, r.sp.lambda);
    r.g = extract_metric(r.sd);
    return r;
  });
  const int nm = p.spec.spec.multiplets();
  double lo = INFINITY, hi = -INFINITY, worst_sp = 0.0, worst_j = 0.0;
  for (const auto& r : recs) {
    lo = std::min(lo, r.sp.lambda);
    hi = std::max(hi, r.sp.lambda);
    worst_sp = std::max(worst_sp, r.sp.residual);
    worst_j = std::max(worst_j, r.j.residual);
  }
  if (ctx.output.format == "csv") {
    Row h{"index"};
    push_chart_header(h, nm);
    for (const char* c : {"K", "lambda", "lambda_im", "sp_residual", "j_residual", "schwarz", "sig_pos", "sig_neg",
                          "sig_null"})
      h.push_back(c);
    const int dim = recs.empty() ? 0 : static_cast<int>(recs.front().g.g.rows());
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) push_complex_header(h, "g" + std::to_string(a) + std::to_string(b));
    CsvTable t(h);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      Row row{f(static_cast<long>(k))};
      push_chart(row, r.sd.at);
      row.insert(row.end(), {f(r.sd.k_value), f(r.sp.lambda), f(r.sp.lambda_imag), f(r.sp.residual), f(r.j.residual),
                             f(r.sd.schwarz), f(r.g.positive), f(r.g.negative), f(r.g.null)});
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) push_complex(row, r.g.g(a, b));
      t.add_row(row);
    }
    emit(ctx, t.str());
  } else {
    Json out = {{"kind", "hk-verify"}, {"spec", p.spec.spec.name}, {"records", Json::array()}};
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      out["records"].push_back({{"index", k},
                                {"chart", chart_json(r.sd.at)},
                                {"K", r.sd.k_value},
                                {"lambda", {r.sp.lambda, r.sp.lambda_imag}},
                                {"sp_residual", r.sp.residual},
                                {"j_residual", r.j.residual},
                                {"schwarz", r.sd.schwarz},
                                {"signature", {r.g.positive, r.g.negative, r.g.null}},
                                {"metric", to_json(r.g.g)}});
    }
    out["summary"] = {{"lambda_min", lo}, {"lambda_max", hi}, {"worst_sp_residual", worst_sp},
                      {"worst_j_residual", worst_j}};
    emit(ctx, out.dump(2) + "\n");
  }
  *ctx.log << "hk-verify: " << recs.size() << " points, lambda in [" << lo << ", " << hi
           << "], worst sp residual " << worst_sp << ", worst J residual " << worst_j << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- flow-run

struct FlowPlan {
  FlowKind kind = FlowKind::Eta2;
  int n = 2;
  int ensemble = 1;
  double s0 = 0.0, s1 = 0.2;
  IntegrateOptions opt;
  std::optional<FlowState> initial;
  bool backward = false;
};

FlowPlan parse_flow_run(const Node& root) {
  root.only_keys({"kind", "seed", "output", "flow", "n", "s_span", "tol", "ensemble", "initial", "return_check"});
  FlowPlan p;
  p.kind = flow_kind_from(root.at("flow").one_of({"eta2", "nahm"}));
  p.n = static_cast<int>(root.integer_or("n", 1, 32, 2));
  p.ensemble = static_cast<int>(root.integer_or("ensemble", 1, 100000, 1));
  if (auto s = root.find("s_span")) {
    s->expect_array(2);
    if (s->size() != 2) s->fail("s_span is [s0, s1]");
    p.s0 = s->at(0).number();
    p.s1 = s->at(1).number();
  }
  if (auto t = root.find("tol")) p.opt.tol = t->number_in(1e-14, 1e-3);
  p.backward = root.boolean_or("return_check", false);
  if (auto init = root.find("initial")) {
    init->only_keys({"t1", "t2", "t3"});
    FlowState t{matrix_from(init->at("t1")), matrix_from(init->at("t2")), matrix_from(init->at("t3")), p.s0};
    for (const char* key : {"t1", "t2", "t3"}) {
      const CMatrix& m = key[1] == '1' ? t.t1 : key[1] == '2' ? t.t2 : t.t3;
      if (m.rows() != m.cols() || m.rows() != t.t1.rows()) init->at(key).fail("matrices must be square, equal size");
    }
    if (p.ensemble != 1) init->fail("explicit initial data allows only ensemble = 1");
    p.n = static_cast<int>(t.t1.rows());
    p.initial = t;
  }
  return p;
}

struct FlowRecord {
  FlowState start;
  Trajectory traj;
  std::vector<double> inv_drift;
  std::vector<double> herm_drift;
  std::optional<double> return_error;
};

int run_flow(const FlowPlan& p, const Context& ctx) {
  const auto recs = sweep_points<FlowRecord>(ctx, static_cast<std::size_t>(p.ensemble), [&](std::size_t k) {
    FlowRecord r;
    if (p.initial) {
      r.start = *p.initial;
    } else {
      auto rng = instance_rng(ctx.seed, 7, k);
      r.start = random_skew_state(p.n, rng);
    }
    r.start.s = p.s0;
    r.traj = integrate_flow(p.kind, r.start, p.s1, p.opt);
    const CVector inv0 = spectral_invariants(r.start, p.kind);
    for (const auto& pt : r.traj.points) {
      const FlowState st = from_state(pt.y, pt.s);
      r.inv_drift.push_back(invariant_drift(st, inv0, p.kind));
      r.herm_drift.push_back(hermiticity_drift(st));
    }
    if (p.backward && r.traj.completed()) {
      const auto& end = r.traj.points.back();
      const Trajectory back = integrate(t_rhs(p.kind), end.y, end.s, p.s0, p.opt);
      double err = 0.0;
      for (std::size_t q = 0; q < 3; ++q) err = std::max(err, (back.points.back().y[q] - r.traj.points.front().y[q]).cwiseAbs().maxCoeff());
      r.return_error = err;
    }
    return r;
  });

  double worst_inv = 0.0, worst_herm = 0.0;
  std::string text;
  if (ctx.output.format == "csv") {
    Row h{"trajectory", "step", "s", "invariant_drift", "hermiticity_drift"};
    for (const char* name : {"t1", "t2", "t3"})
      for (int a = 0; a < p.n; ++a)
        for (int b = 0; b < p.n; ++b) push_complex_header(h, std::string(name) + "_" + std::to_string(a) + std::to_string(b));
    CsvTable t(h);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      for (std::size_t q = 0; q < r.traj.points.size(); ++q) {
        const auto& pt = r.traj.points[q];
        Row row{f(static_cast<long>(k)), f(static_cast<long>(q)), f(pt.s), f(r.inv_drift[q]), f(r.herm_drift[q])};
        for (const auto& m : pt.y)
          for (int a = 0; a < p.n; ++a)
            for (int b = 0; b < p.n; ++b) push_complex(row, m(a, b));
        t.add_row(row);
      }
    }
    text = t.str();
  } else {
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      for (std::size_t q = 0; q < r.traj.points.size(); ++q) {
        const auto& pt = r.traj.points[q];
        Json line = {{"trajectory", k},         {"step", q},
                     {"s", pt.s},               {"invariant_drift", r.inv_drift[q]},
                     {"hermiticity_drift", r.herm_drift[q]}, {"t1", to_json(pt.y[0])},
                     {"t2", to_json(pt.y[1])},  {"t3", to_json(pt.y[2])}};
        text += line.dump() + "\n";
      }
      Json end = {{"trajectory", k},
                  {"end", true},
                  {"completed", r.traj.completed()},
                  {"blew_up", r.traj.blew_up},
                  {"underflow", r.traj.underflow},
                  {"diagnosis", r.traj.diagnosis},
                  {"rejected_steps", r.traj.rejected}};
      if (r.traj.blowup_bracket)
        end["blowup_bracket"] = {r.traj.blowup_bracket->first, r.traj.blowup_bracket->second};
      if (r.return_error) end["return_error"] = *r.return_error;
      text += end.dump() + "\n";
    }
  }
  int incomplete = 0;
  for (const auto& r : recs) {
    for (double d : r.inv_drift) worst_inv = std::max(worst_inv, d);
    for (double d : r.herm_drift) worst_herm = std::max(worst_herm, d);
    if (!r.traj.completed()) ++incomplete;
  }
  emit(ctx, text);
  *ctx.log << "flow-run (" << to_string(p.kind) << ", n = " << p.n << "): " << recs.size() << " trajectories, "
           << incomplete << " stopped early, worst invariant drift " << worst_inv << ", worst hermiticity drift "
           << worst_herm << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- gz-analyze

struct GzPlan {
  std::optional<MatPoly> matrix;
  int n = 3;
  int degree = 2;
  int samples = 32;
  bool all_minors = true;
};

GzPlan parse_gz(const Node& root) {
  root.only_keys({"kind", "seed", "output", "matrix", "random", "samples", "all_minors"});
  GzPlan p;
  if (root.has("matrix") == root.has("random")) root.fail("give exactly one of 'matrix' or 'random'");
  if (auto m = root.find("matrix")) {
    p.matrix = matpoly_from(*m);
  } else {
    const Node r = root.at("random");
    r.only_keys({"n", "degree"});
    p.n = static_cast<int>(r.integer_or("n", 1, 12, 3));
    p.degree = static_cast<int>(r.integer_or("degree", 0, 6, 2));
  }
  p.samples = static_cast<int>(root.integer_or("samples", 1, 100000, 32));
  p.all_minors = root.boolean_or("all_minors", true);
  return p;
}

int run_gz(const GzPlan& p, const Context& ctx) {
  MatPoly a;
  if (p.matrix) {
    a = *p.matrix;
  } else {
    auto rng = instance_rng(ctx.seed, 11, 0);
    a = random_matpoly(p.n, p.degree, rng);
  }
  const auto curves = gz_curves(a);
  Json out = {{"kind", "gz-analyze"}, {"size", a.size()}, {"degree", a.degree()}};
  out["curves"] = Json::array();
  for (const auto& c : curves) out["curves"].push_back({{"m", c.m()}, {"genus", c.genus()}, {"curve", to_json(c)}});
  out["intersections"] = Json::array();
  for (int m = 1; m < a.size(); ++m) {
    const PolyZ r = resultant_eta(curves[static_cast<std::size_t>(m - 1)], curves[static_cast<std::size_t>(m)]);
    const int deg = r.effective_degree(1e-10);
    Json roots = Json::array();
    if (deg > 0)
      for (Complex z : poly_roots(r)) roots.push_back(to_json(z));
    out["intersections"].push_back({{"m", m},
                                    {"degree", deg},
                                    {"bound", std::max(a.degree(), 0) * m * (m + 1)},
                                    {"shared_component", deg < 0},
                                    {"resultant", to_json(r)},
                                    {"zeta_roots", roots}});
  }
  const RegularityReport reg = regularity_scan(a, p.samples, p.all_minors, ctx.seed);
  out["regularity"] = {{"verdict", to_string(reg.verdict)},
                       {"points_tested", reg.points_tested},
                       {"failing_minor", reg.failing_minor},
                       {"detail", reg.detail}};
  if (reg.witness) out["regularity"]["witness"] = to_json(*reg.witness);

  if (a.size() >= 2) {
    auto rng = instance_rng(ctx.seed, 12, 0);
    double wa = 0.0, adj = 0.0;
    for (int k = 0; k < 8; ++k) {
      const Complex zeta = random_complex(rng), eta = random_complex(rng);
      const CMatrix m = a(zeta);
      const double scale = std::pow(std::abs(eta) + m.operatorNorm(), static_cast<double>(m.rows()));
      wa = std::max(wa, std::abs(wa_residual(a, zeta, eta)) / scale);
      const AdjColumnResidual r = adjugate_column_check(a, zeta, eta);
      adj = std::max({adj, r.column / r.scale, r.transposed / r.scale});
    }
    out["identities"] = {{"wa_relative", wa}, {"adjugate_relative", adj}, {"points", 8}};
  }
  emit(ctx, out.dump(2) + "\n");
  *ctx.log << "gz-analyze: size " << a.size() << ", regularity " << to_string(reg.verdict) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- identity-suite

BatteryOptions parse_identity(const Node& root) {
  root.only_keys({"kind", "seed", "output", "count", "sizes", "degree"});
  BatteryOptions b;
  b.count = static_cast<int>(root.integer_or("count", 1, 1000000, 100));
  b.degree = static_cast<int>(root.integer_or("degree", 0, 6, 2));
  if (auto s = root.find("sizes")) {
    s->expect_array(2);
    if (s->size() != 2) s->fail("sizes is [min, max]");
    b.min_size = static_cast<int>(s->at(0).integer(2, 12));
    b.max_size = static_cast<int>(s->at(1).integer(b.min_size, 12));
  }
  return b;
}

int run_identity(BatteryOptions b, const Context& ctx) {
  b.seed = ctx.seed;
  b.threads = ctx.threads;
  const auto rows = identity_battery(b);
  bool all = true;
  std::ostream& table = ctx.output.path ? *ctx.out : *ctx.log;
  table << std::left << std::setw(22) << "identity" << std::setw(11) << "instances" << std::setw(14) << "worst"
        << std::setw(12) << "tolerance"
        << "status\n";
  for (const auto& r : rows) {
    all = all && r.pass;
    table << std::left << std::setw(22) << r.name << std::setw(11) << r.instances << std::setw(14)
          << std::setprecision(4) << r.worst << std::setw(12) << r.tolerance << (r.pass ? "pass" : "FAIL");
    if (!r.note.empty()) table << "  (" << r.note << ")";
    table << "\n";
  }
  if (ctx.output.format == "csv") {
    CsvTable t({"identity", "instances", "worst", "tolerance", "pass", "note"});
    for (const auto& r : rows)
      t.add_row({r.name, f(r.instances), f(r.worst), f(r.tolerance), r.pass ? "true" : "false", r.note});
    if (ctx.output.path) emit(ctx, t.str());
  } else {
    Json out = {{"kind", "identity-suite"}, {"seed", ctx.seed}, {"rows", Json::array()}};
    for (const auto& r : rows)
      out["rows"].push_back({{"identity", r.name},
                             {"instances", r.instances},
                             {"worst", r.worst},
                             {"tolerance", r.tolerance},
                             {"pass", r.pass},
                             {"note", r.note}});
    if (ctx.output.path) emit(ctx, out.dump(2) + "\n");
  }
  return all ? kExitOk : kExitModuleError;
}

// ---------------------------------------------------------------- dispatch

struct Parsed {
  std::string kind;
  std::uint64_t seed = 1;
  OutputSpec output;
};

Parsed parse_common(const Node& root) {
  root.expect_object();
  Parsed p;
  p.kind = root.at("kind").one_of({"glt-solve", "hk-verify", "flow-run", "gz-analyze", "identity-suite"});
  p.seed = static_cast<std::uint64_t>(root.integer_or("seed", 0, std::numeric_limits<long>::max(), 1));
  if (p.kind == "flow-run") {
    p.output = parse_output(root, {"jsonl", "csv"});
  } else if (p.kind == "hk-verify") {
    p.output = parse_output(root, {"csv", "json"});
  } else if (p.kind == "gz-analyze") {
    p.output = parse_output(root, {"json"});
  } else {
    p.output = parse_output(root, {"json", "csv"});
  }
  return p;
}

}  // namespace

void validate_experiment(const Json& config) {
  const Node root(config);
  const Parsed p = parse_common(root);
  if (p.kind == "glt-solve") {
    parse_glt_solve(root);
  } else if (p.kind == "hk-verify") {
    parse_hk_verify(root);
  } else if (p.kind == "flow-run") {
    parse_flow_run(root);
  } else if (p.kind == "gz-analyze") {
    parse_gz(root);
  } else {
    parse_identity(root);
  }
}

int run_experiment(const Json& config, const Overrides& ov, std::ostream& out, std::ostream& log) {
  const Node root(config);
  Context ctx;
  ctx.out = &out;
  ctx.log = &log;
  try {
    const Parsed p = parse_common(root);
    ctx.seed = ov.seed ? *ov.seed : p.seed;
    ctx.threads = resolve_threads(ov.threads);
    ctx.output = p.output;
    if (ov.out) ctx.output.path = *ov.out;

    if (p.kind == "glt-solve") {
      const SolvePlan plan = parse_glt_solve(root);
      return run_glt_solve(plan, ctx);
    }
    if (p.kind == "hk-verify") {
      const HkPlan plan = parse_hk_verify(root);
      return run_hk_verify(plan, ctx);
    }
    if (p.kind == "flow-run") {
      const FlowPlan plan = parse_flow_run(root);
      return run_flow(plan, ctx);
    }
    if (p.kind == "gz-analyze") {
      const GzPlan plan = parse_gz(root);
      return run_gz(plan, ctx);
    }
    return run_identity(parse_identity(root), ctx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) {
      log << "config error: " << e.what() << "\n";
      return kExitConfigError;
    }
    log << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitModuleError;
  }
}

int run_experiment_file(const std::string& path, const Overrides& ov, std::ostream& out, std::ostream& log) {
  std::ifstream in(path);
  if (!in) {
    log << "config error: cannot read '" << path << "'\n";
    return kExitConfigError;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  Json config;
  try {
    config = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    log << "config error: " << path << " is not valid JSON: " << e.what() << "\n";
    return kExitConfigError;
  }
  return run_experiment(config, ov, out, log);
}

}  // namespace gltforge
