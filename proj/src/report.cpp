#include "ssf/report.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <numbers>
#include <sstream>

#include "ssf/errors.hpp"
#include "ssf/invariants.hpp"
#include "ssf/scattering_1d.hpp"
#include "ssf/scattering_radial3d.hpp"

namespace ssf {

namespace {

namespace fs = std::filesystem;
using Cplx = std::complex<double>;

[[noreturn]] void usage(const std::string& what) { fail(ErrorKind::usage, "config: " + what); }

void check_keys(const OrderedJson& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) usage(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      usage("unknown key '" + key + "' in " + where);
  }
}

double number_at(const OrderedJson& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) usage(where + "." + key + " must be a number");
  double v = obj[key].get<double>();
  if (!std::isfinite(v)) usage(where + "." + key + " must be finite");
  return v;
}

double positive_at(const OrderedJson& obj, const char* key, double fallback, const std::string& where) {
  double v = number_at(obj, key, fallback, where);
  if (!(v > 0.0)) usage(where + "." + key + " must be positive");
  return v;
}

int integer_at(const OrderedJson& obj, const char* key, int fallback, int lo, int hi, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) usage(where + "." + key + " must be an integer");
  long v = obj[key].get<long>();
  if (v < lo || v > hi) usage(where + "." + key + fmt::format(" must lie in [{}, {}]", lo, hi));
  return static_cast<int>(v);
}

std::vector<int> integers_at(const OrderedJson& obj, const char* key, std::vector<int> fallback, int lo, int hi,
                             const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_array()) usage(where + "." + key + " must be an array of integers");
  std::vector<int> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number_integer() || v.get<long>() < lo || v.get<long>() > hi)
      usage(where + "." + key + fmt::format(" entries must be integers in [{}, {}]", lo, hi));
    out.push_back(v.get<int>());
  }
  return out;
}

std::vector<double> increasing(std::vector<double> v, const std::string& where) {
  if (v.empty()) usage(where + " is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) usage(where + " has a non-finite entry");
    if (i > 0 && !(v[i] > v[i - 1])) usage(where + " must be strictly increasing");
  }
  return v;
}

// Either an explicit list or {min, max, points, spacing}.
std::vector<double> grid_at(const OrderedJson& obj, const char* key, std::vector<double> fallback,
                            const std::string& where) {
  const std::string w = where + "." + key;
  if (!obj.contains(key)) return fallback;
  const auto& g = obj[key];
  std::vector<double> out;
  if (g.is_array()) {
    for (const auto& v : g) {
      if (!v.is_number()) usage(w + " entries must be numbers");
      out.push_back(v.get<double>());
    }
  } else {
    check_keys(g, {"min", "max", "points", "spacing"}, w);
    double lo = positive_at(g, "min", 0.01, w), hi = positive_at(g, "max", 100.0, w);
    int n = integer_at(g, "points", 200, 0, 100000, w);
    std::string spacing = g.value("spacing", std::string("log"));
    if (spacing != "log" && spacing != "linear") usage(w + ".spacing must be 'log' or 'linear'");
    if (n == 0) usage(w + " is empty");
    if (!(hi > lo) && n > 1) usage(w + ".max must exceed min");
    for (int i = 0; i < n; ++i) {
      double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out.push_back(spacing == "log" ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
    }
  }
  out = increasing(std::move(out), w);
  if (!(out.front() > 0.0)) usage(w + " must be positive");
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

OrderedJson grid_json(const std::vector<double>& g) {
  OrderedJson a = OrderedJson::array();
  for (double x : g) a.push_back(x);
  return a;
}

PotentialSpec parse_potential(const OrderedJson& obj) {
  check_keys(obj, {"dim", "family", "expression", "params", "rho", "support_radius_hint"}, "potential");
  PotentialSpec s;
  s.dim = integer_at(obj, "dim", 1, 1, 3, "potential");
  if (obj.contains("family") == obj.contains("expression")) usage("potential needs exactly one of family or expression");
  if (obj.contains("family")) {
    if (!obj["family"].is_string()) usage("potential.family must be a string");
    const std::string f = obj["family"];
    if (f == "zero") s.family = Family::zero;
    else if (f == "poschl_teller") s.family = Family::poschl_teller;
    else if (f == "gaussian_well") s.family = Family::gaussian_well;
    else if (f == "square_well") s.family = Family::square_well;
    else if (f == "exponential_well") s.family = Family::exponential_well;
    else usage("unknown potential family '" + f + "'");
  } else {
    if (!obj["expression"].is_string()) usage("potential.expression must be a string");
    s.family = Family::expression;
    s.expression = obj["expression"];
  }
  if (obj.contains("params")) {
    if (!obj["params"].is_object()) usage("potential.params must be an object");
    for (const auto& [k, v] : obj["params"].items()) {
      if (!v.is_number()) usage("potential.params." + k + " must be a number");
      s.params[k] = v.get<double>();
    }
  }
  if (obj.contains("rho")) s.rho = positive_at(obj, "rho", 1.0, "potential");
  if (obj.contains("support_radius_hint")) s.support_radius_hint = positive_at(obj, "support_radius_hint", 1.0, "potential");
  if (s.family == Family::poschl_teller) {
    double n = s.params.count("n") ? s.params["n"] : 1.0;
    if (n < 1.0 || n != std::floor(n)) usage("poschl_teller needs a positive integer n");
  }
  return s;
}

TaskKind parse_kind(const std::string& k) {
  if (k == "invariants") return TaskKind::invariants;
  if (k == "ssf") return TaskKind::ssf;
  if (k == "identities") return TaskKind::identities;
  if (k == "heat") return TaskKind::heat;
  if (k == "resolvent") return TaskKind::resolvent;
  if (k == "birman_krein") return TaskKind::birman_krein;
  if (k == "levinson") return TaskKind::levinson;
  if (k == "check-all") return TaskKind::check_all;
  usage("unknown task kind '" + k + "'");
}

// Defaults depend on the dimension: radial d = 3 budgets are looser.
OrderedJson normalize_task(TaskKind kind, const OrderedJson& t, int dim, const std::string& where) {
  OrderedJson p;
  const bool one = dim == 1;
  switch (kind) {
    case TaskKind::invariants: {
      check_keys(t, {"kind", "max_n"}, where);
      p["max_n"] = integer_at(t, "max_n", 4, 0, 5, where);
      break;
    }
    case TaskKind::ssf: {
      check_keys(t, {"kind", "lambda_grid"}, where);
      p["lambda_grid"] = grid_json(grid_at(t, "lambda_grid", log_grid(0.01, 100.0, 200), where));
      break;
    }
    case TaskKind::identities: {
      check_keys(t, {"kind", "integer_orders", "half_orders", "tolerance"}, where);
      p["integer_orders"] = integers_at(t, "integer_orders", one ? std::vector<int>{1, 2} : std::vector<int>{1}, 1, 3, where);
      p["half_orders"] = integers_at(t, "half_orders", one ? std::vector<int>{0, 1} : std::vector<int>{}, 0, 3, where);
      if (!one && !p["half_orders"].empty()) usage(where + ".half_orders: half-integer identities need d = 1");
      p["tolerance"] = positive_at(t, "tolerance", one ? 1e-4 : 1e-2, where);
      break;
    }
    case TaskKind::heat: {
      check_keys(t, {"kind", "times", "tolerance", "series_max_t"}, where);
      std::vector<double> times = one ? std::vector<double>{0.01, 0.05, 0.2} : std::vector<double>{0.05, 0.2};
      if (t.contains("times")) {
        if (!t["times"].is_array()) usage(where + ".times must be an array of numbers");
        times.clear();
        for (const auto& v : t["times"]) {
          if (!v.is_number()) usage(where + ".times entries must be numbers");
          times.push_back(v.get<double>());
        }
      }
      times = increasing(std::move(times), where + ".times");
      if (!(times.front() > 0.0)) usage(where + ".times must be positive");
      p["times"] = grid_json(times);
      p["tolerance"] = positive_at(t, "tolerance", 0.02, where);
      p["series_max_t"] = positive_at(t, "series_max_t", 1.0, where);
      break;
    }
    case TaskKind::resolvent: {
      check_keys(t, {"kind", "points", "m", "terms", "tolerance", "compare"}, where);
      OrderedJson pts = OrderedJson::array();
      if (t.contains("points")) {
        if (!t["points"].is_array() || t["points"].empty()) usage(where + ".points must be a non-empty array of [re, im]");
        for (const auto& z : t["points"]) {
          if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
            usage(where + ".points entries must be [re, im]");
          pts.push_back(z);
        }
      } else {
        pts.push_back({-100.0, 0.0});
      }
      p["points"] = pts;
      p["m"] = integer_at(t, "m", dim == 1 ? 1 : 2, 1, 6, where);
      if (2 * (p["m"].get<int>() + 1) <= dim) usage(where + ".m must satisfy 2(m+1) > d");
      p["terms"] = integer_at(t, "terms", 2, 1, 4, where);
      p["tolerance"] = positive_at(t, "tolerance", 1e-3, where);
      std::string cmp = t.value("compare", std::string("series"));
      if (cmp != "series" && cmp != "oracle") usage(where + ".compare must be 'series' or 'oracle'");
      p["compare"] = cmp;
      break;
    }
    case TaskKind::birman_krein: {
      check_keys(t, {"kind", "lambda_grid", "tolerance"}, where);
      p["lambda_grid"] = grid_json(grid_at(t, "lambda_grid", log_grid(0.1, 100.0, 40), where));
      p["tolerance"] = positive_at(t, "tolerance", one ? 1e-6 : 1e-3, where);
      break;
    }
    case TaskKind::levinson: {
      check_keys(t, {"kind", "tolerance"}, where);
      p["tolerance"] = positive_at(t, "tolerance", one ? 1e-3 : 1e-2, where);
      break;
    }
    case TaskKind::check_all: {
      check_keys(t, {"kind"}, where);
      break;
    }
  }
  return p;
}

// ------------------------------------------------------------------ output

std::string csv_number(double x) { return std::isfinite(x) ? fmt::format("{:.12e}", x) : std::string(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::usage, "cannot write " + path.string());
  out << text;
}

OrderedJson error_json(const Error& e) {
  OrderedJson j;
  j["kind"] = to_string(e.kind());
  j["message"] = e.what();
  return j;
}

struct Context {
  const RunConfig& config;
  Potential potential;
  fs::path directory;
  bool write = true;
  std::unique_ptr<SsfModel> model;

  const SsfModel& ssf() {
    if (!model) model = std::make_unique<SsfModel>(potential);
    return *model;
  }
  void require_numeric_dim() const {
    if (potential.dim() == 2) fail(ErrorKind::unsupported, "d = 2 numerics are out of scope");
  }
};

OrderedJson base_report(const Context& ctx, TaskKind kind, std::size_t index) {
  OrderedJson r;
  r["task"] = to_string(kind);
  r["index"] = index;
  r["config_sha256"] = ctx.config.sha256;
  r["potential"] = ctx.potential.describe();
  r["dim"] = ctx.potential.dim();
  return r;
}

// Report tags name the quantities a report contains.
OrderedJson tags(std::initializer_list<const char*> t) {
  OrderedJson a = OrderedJson::array();
  for (const char* s : t) a.push_back(s);
  return a;
}

TaskResult run_invariants(Context& ctx, const OrderedJson& p, std::size_t index) {
  TaskResult res;
  res.kind = TaskKind::invariants;
  const int d = ctx.potential.dim();
  const int max_n = p["max_n"];
  OrderedJson r = base_report(ctx, TaskKind::invariants, index);
  r["quantities"] = tags({"heat_invariant_g_n", "taylor_operator_X_n", "integrated_heat_invariant"});
  OrderedJson rows = OrderedJson::array();
  bool agree = true;
  for (int n = 0; n <= max_n; ++n) {
    JetPoly closed = heat_invariant_closed(n, d);
    bool same = closed == heat_invariant_recurrence(n, d, n).diagonal();
    agree = agree && same;
    OrderedJson row;
    row["n"] = n;
    row["g_n"] = closed.to_string();
    row["routes_agree"] = same;
    if (n == 0) {
      // g_0 = 1 integrates to the (infinite) volume.
      row["integrated"] = nullptr;
      row["integrated_error"] = nullptr;
    } else if (d != 2 && !ctx.potential.is_zero()) {
      auto c = heat_coefficient(ctx.potential, n);
      row["integrated"] = report_number(c.value);
      row["integrated_error"] = report_number(c.abs_error);
    } else {
      row["integrated"] = report_number(0.0);
      row["integrated_error"] = report_number(0.0);
    }
    rows.push_back(row);
  }
  r["invariants"] = rows;
  r["pass"] = agree;
  if (ctx.write) {
    fs::path f = ctx.directory / fmt::format("{:02d}_invariants_d{}.txt", index, d);
    write_text(f, invariant_tables_text(d, max_n));
    res.files.push_back(f);
  }
  res.pass = agree;
  res.report = r;
  return res;
}

// Samples v on a grid: true if v >= 0 everywhere sampled.
bool nonnegative_potential(const Potential& pot) {
  const double R = 2.0 * pot.support_radius();
  for (int i = 0; i <= 2000; ++i) {
    double x = pot.dim() == 1 ? -R + 2.0 * R * i / 2000.0 : R * i / 2000.0;
    if (pot(x) < 0.0) return false;
  }
  return true;
}

TaskResult run_ssf(Context& ctx, const OrderedJson& p, std::size_t index) {
  TaskResult res;
  res.kind = TaskKind::ssf;
  ctx.require_numeric_dim();
  const auto grid = p["lambda_grid"].get<std::vector<double>>();
  const SsfModel& model = ctx.ssf();
  const bool one = ctx.potential.dim() == 1;
  OrderedJson r = base_report(ctx, TaskKind::ssf, index);
  r["quantities"] = tags({"spectral_shift_xi", "high_energy_coefficients_xi_n", "bound_states",
                          one ? "log_modulus_perturbation_determinant" : "partial_wave_phase_sum"});
  std::vector<double> xi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) xi[i] = model.xi_k(std::sqrt(grid[i]));
  double min_xi = *std::min_element(xi.begin(), xi.end());
  OrderedJson coeffs = OrderedJson::array();
  for (double c : model.coefficients()) coeffs.push_back(report_number(c));
  OrderedJson eig = OrderedJson::array();
  for (double e : model.eigenvalues()) eig.push_back(report_number(e));
  r["coefficients"] = coeffs;
  r["eigenvalues"] = eig;
  r["grid_points"] = grid.size();
  r["xi_first"] = report_number(xi.front());
  r["xi_last"] = report_number(xi.back());
  r["xi_min"] = report_number(min_xi);
  bool pass = true;
  if (nonnegative_potential(ctx.potential)) {
    bool sign_ok = min_xi >= -1e-6;
    r["sign_check"] = {{"applies", true}, {"min_xi", report_number(min_xi)}, {"bound", -1e-6}, {"pass", sign_ok}};
    pass = sign_ok;
  } else {
    r["sign_check"] = {{"applies", false}};
  }
  r["pass"] = pass;
  if (ctx.write) {
    std::ostringstream csv;
    csv << (one ? "lambda [energy],xi [count],ln_abs_D [1]\r\n" : "lambda [energy],xi [count]\r\n");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv << csv_number(grid[i]) << "," << csv_number(xi[i]);
      if (one) csv << "," << csv_number(model.one_dimensional()->ln_abs_a(std::sqrt(grid[i])));
      csv << "\r\n";
    }
    fs::path f = ctx.directory / fmt::format("{:02d}_ssf.csv", index);
    write_text(f, csv.str());
    res.files.push_back(f);
  }
  res.pass = pass;
  res.report = r;
  return res;
}

OrderedJson identity_or_error(const std::function<IdentityReport()>& f, bool& pass) {
  try {
    IdentityReport rep = f();
    pass = pass && rep.pass;
    return to_json(rep);
  } catch (const Error& e) {
    pass = false;
    OrderedJson j;
    j["pass"] = false;
    j["error"] = error_json(e);
    return j;
  }
}

TaskResult run_identities(Context& ctx, const OrderedJson& p, std::size_t index) {
  TaskResult res;
  res.kind = TaskKind::identities;
  ctx.require_numeric_dim();
  const SsfModel& model = ctx.ssf();
  IdentityOptions opts{p["tolerance"].get<double>()};
  OrderedJson r = base_report(ctx, TaskKind::identities, index);
  r["quantities"] = tags({"integer_order_trace_identity", "half_integer_trace_identity", "asymptotic_constant_gamma",
                          "heat_coefficient_c_n"});
  // Each order is independent; the model's xi memo is shared under its lock.
  std::vector<std::future<IdentityReport>> jobs;
  for (int n : p["integer_orders"].get<std::vector<int>>())
    jobs.push_back(std::async(std::launch::async, [&model, n, opts] { return trace_identity_integer(model, n, opts); }));
  for (int n : p["half_orders"].get<std::vector<int>>())
    jobs.push_back(std::async(std::launch::async, [&model, n, opts] { return trace_identity_half(model, n, opts); }));
  bool pass = true;
  OrderedJson list = OrderedJson::array();
  for (auto& job : jobs) list.push_back(identity_or_error([&] { return job.get(); }, pass));
  r["identities"] = list;
  try {
    AsymptoticConstants c = asymptotic_constants(model, 0, opts);
    r["gamma"] = report_number(c.gamma);
    r["gamma_error"] = report_number(c.gamma_error);
  } catch (const Error& e) {
    r["gamma"] = nullptr;
    r["gamma_error"] = error_json(e);
  }
  r["pass"] = pass;
  res.pass = pass;
  res.report = r;
  return res;
}

bool within(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-14; }

TaskResult run_heat(Context& ctx, const OrderedJson& p, std::size_t index) {
  TaskResult res;
  res.kind = TaskKind::heat;
  ctx.require_numeric_dim();
  const SsfModel& model = ctx.ssf();
  const double tol = p["tolerance"];
  const double series_max_t = p["series_max_t"];
  OrderedJson r = base_report(ctx, TaskKind::heat, index);
  r["quantities"] = tags({"heat_trace_difference", "small_time_heat_series"});
  OrderedJson rows = OrderedJson::array();
  bool pass = true;
  std::ostringstream csv;
  csv << "t [1/energy],via_ssf [1],via_oracle [1],via_series [1]\r\n";
  for (double t : p["times"].get<std::vector<double>>()) {
    HeatTrace h = heat_trace_diff(model, t);
    const bool use_series = t <= series_max_t;
    bool ok = within(h.via_ssf.value, h.via_oracle.value, tol);
    if (use_series)
      ok = ok && within(h.via_ssf.value, h.via_series.value, tol) && within(h.via_oracle.value, h.via_series.value, tol);
    pass = pass && ok;
    OrderedJson row;
    row["t"] = report_number(t);
    row["via_ssf"] = report_number(h.via_ssf.value);
    row["via_ssf_error"] = report_number(h.via_ssf.error);
    row["via_oracle"] = report_number(h.via_oracle.value);
    row["via_oracle_error"] = report_number(h.via_oracle.error);
    row["via_series"] = report_number(h.via_series.value);
    row["via_series_error"] = report_number(h.via_series.error);
    row["series_compared"] = use_series;
    row["pass"] = ok;
    rows.push_back(row);
    csv << csv_number(t) << "," << csv_number(h.via_ssf.value) << "," << csv_number(h.via_oracle.value) << ","
        << csv_number(h.via_series.value) << "\r\n";
  }
  r["relative_tolerance"] = report_number(tol);
  r["rows"] = rows;
  r["pass"] = pass;
  if (ctx.write) {
    fs::path f = ctx.directory / fmt::format("{:02d}_heat.csv", index);
    write_text(f, csv.str());
    res.files.push_back(f);
  }
  res.pass = pass;
  res.report = r;
  return res;
}

OrderedJson complex_json(Cplx z) { return OrderedJson::array({report_number(z.real()), report_number(z.imag())}); }

TaskResult run_resolvent(Context& ctx, const OrderedJson& p, std::size_t index) {
  TaskResult res;
  res.kind = TaskKind::resolvent;
  ctx.require_numeric_dim();
  const SsfModel& model = ctx.ssf();
  const int m = p["m"], terms = p["terms"];
  const double tol = p["tolerance"];
  const bool vs_series = p["compare"] == "series";
  OrderedJson r = base_report(ctx, TaskKind::resolvent, index);
  r["quantities"] = tags({"resolvent_trace_difference", "resolvent_series_r_n"});
  OrderedJson rows = OrderedJson::array();
  bool pass = true;
  for (const auto& zp : p["points"]) {
    Cplx z(zp[0].get<double>(), zp[1].get<double>());
    OrderedJson row;
    row["z"] = complex_json(z);
    try {
      ResolventTrace t = resolvent_trace_diff(model, z, m, terms);
      Cplx other = vs_series ? t.via_series.value : t.via_oracle.value;
      double scale = std::abs(t.via_ssf.value);
      double rel = std::abs(t.via_ssf.value - other) / (scale > 0.0 ? scale : 1.0);
      bool ok = rel <= tol;
      pass = pass && ok;
      row["via_ssf"] = complex_json(t.via_ssf.value);
      row["via_ssf_error"] = report_number(t.via_ssf.error);
      row["via_oracle"] = complex_json(t.via_oracle.value);
      row["via_oracle_error"] = report_number(t.via_oracle.error);
      row["via_series"] = complex_json(t.via_series.value);
      row["via_series_error"] = report_number(t.via_series.error);
      row["relative_difference"] = report_number(rel);
      row["pass"] = ok;
    } catch (const Error& e) {
      pass = false;
      row["pass"] = false;
      row["error"] = error_json(e);
    }
    rows.push_back(row);
  }
  r["m"] = m;
  r["series_terms"] = terms;
  r["compared_with"] = vs_series ? "series" : "oracle";
  r["relative_tolerance"] = report_number(tol);
  r["rows"] = rows;
  r["pass"] = pass;
  res.pass = pass;
  res.report = r;
  return res;
}

TaskResult run_single_identity(Context& ctx, TaskKind kind, const std::function<IdentityReport()>& f,
                               std::initializer_list<const char*> quantity_tags, std::size_t index) {
  TaskResult res;
  res.kind = kind;
  OrderedJson r = base_report(ctx, kind, index);
  r["quantities"] = tags(quantity_tags);
  bool pass = true;
  r["identity"] = identity_or_error(f, pass);
  r["pass"] = pass;
  res.pass = pass;
  res.report = r;
  return res;
}

TaskResult run_task(Context& ctx, const TaskConfig& task, std::size_t index);

TaskResult run_check_all(Context& ctx, std::size_t index) {
  TaskResult res;
  res.kind = TaskKind::check_all;
  OrderedJson r = base_report(ctx, TaskKind::check_all, index);
  r["quantities"] = tags({"all"});
  const int d = ctx.potential.dim();
  std::vector<TaskKind> kinds{TaskKind::invariants};
  if (d != 2) {
    for (TaskKind k : {TaskKind::ssf, TaskKind::identities, TaskKind::heat, TaskKind::resolvent,
                       TaskKind::birman_krein, TaskKind::levinson})
      kinds.push_back(k);
  }
  OrderedJson parts = OrderedJson::array();
  bool pass = true;
  for (TaskKind k : kinds) {
    OrderedJson stub;
    stub["kind"] = to_string(k);
    TaskConfig sub{k, normalize_task(k, stub, d, "check-all")};
    TaskResult part = run_task(ctx, sub, index);
    pass = pass && part.pass;
    for (auto& f : part.files) res.files.push_back(f);
    parts.push_back(part.report);
  }
  r["parts"] = parts;
  r["pass"] = pass;
  res.pass = pass;
  res.report = r;
  return res;
}

TaskResult run_task(Context& ctx, const TaskConfig& task, std::size_t index) {
  const auto& p = task.params;
  try {
    switch (task.kind) {
      case TaskKind::invariants: return run_invariants(ctx, p, index);
      case TaskKind::ssf: return run_ssf(ctx, p, index);
      case TaskKind::identities: return run_identities(ctx, p, index);
      case TaskKind::heat: return run_heat(ctx, p, index);
      case TaskKind::resolvent: return run_resolvent(ctx, p, index);
      case TaskKind::birman_krein: {
        ctx.require_numeric_dim();
        const SsfModel& model = ctx.ssf();
        auto grid = p["lambda_grid"].get<std::vector<double>>();
        double tol = p["tolerance"];
        return run_single_identity(ctx, task.kind, [&] { return birman_krein_check(model, grid, tol); },
                                   {"scattering_matrix_determinant", "spectral_shift_xi"}, index);
      }
      case TaskKind::levinson: {
        ctx.require_numeric_dim();
        const SsfModel& model = ctx.ssf();
        double tol = p["tolerance"];
        return run_single_identity(ctx, task.kind, [&] { return levinson_check(model, tol); },
                                   {"spectral_shift_at_threshold", "bound_states"}, index);
      }
      case TaskKind::check_all: return run_check_all(ctx, index);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::usage) throw;
    TaskResult res;
    res.kind = task.kind;
    res.report = base_report(ctx, task.kind, index);
    res.report["error"] = error_json(e);
    res.report["pass"] = false;
    return res;
  }
  fail(ErrorKind::usage, "unhandled task kind");
}

}  // namespace

const char* to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::invariants: return "invariants";
    case TaskKind::ssf: return "ssf";
    case TaskKind::identities: return "identities";
    case TaskKind::heat: return "heat";
    case TaskKind::resolvent: return "resolvent";
    case TaskKind::birman_krein: return "birman_krein";
    case TaskKind::levinson: return "levinson";
    case TaskKind::check_all: return "check-all";
  }
  return "unknown";
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::accuracy, "SHA-256 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

RunConfig parse_run_config(const std::string& text) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    usage(std::string("not valid JSON: ") + e.what());
  }
  check_keys(doc, {"potential", "tasks", "output"}, "config");
  if (!doc.contains("potential")) usage("missing potential section");
  if (!doc.contains("tasks") || !doc["tasks"].is_array() || doc["tasks"].empty()) usage("tasks must be a non-empty array");
  RunConfig cfg;
  cfg.sha256 = sha256_hex(text);
  cfg.potential = parse_potential(doc["potential"]);
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    check_keys(o, {"directory", "formats"}, "output");
    if (o.contains("directory")) {
      if (!o["directory"].is_string() || o["directory"].get<std::string>().empty())
        usage("output.directory must be a non-empty string");
      cfg.output_directory = o["directory"];
    }
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) usage("output.formats must be an array");
      cfg.write_json = cfg.write_csv = false;
      for (const auto& f : o["formats"]) {
        if (f == "json") cfg.write_json = true;
        else if (f == "csv") cfg.write_csv = true;
        else usage("output.formats entries must be 'json' or 'csv'");
      }
    }
  }
  std::size_t i = 0;
  for (const auto& t : doc["tasks"]) {
    const std::string where = fmt::format("tasks[{}]", i++);
    if (!t.is_object() || !t.contains("kind") || !t["kind"].is_string()) usage(where + " needs a string kind");
    TaskKind kind = parse_kind(t["kind"]);
    try {
      cfg.tasks.push_back({kind, normalize_task(kind, t, cfg.potential.dim, where)});
    } catch (const nlohmann::json::exception& e) {
      usage(where + ": " + e.what());
    }
  }
  // Construct once so family parameter errors surface as usage errors.
  try {
    Potential check(cfg.potential);
  } catch (const Error& e) {
    usage(std::string("potential: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::usage, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

fs::path resolve_output_directory(const std::string& configured) {
  fs::path dir(configured);
  const char* root = std::getenv("SSF_LAB_OUTPUT_ROOT");
  if (root && *root) return fs::path(root) / (dir.is_absolute() ? dir.filename() : dir);
  return dir;
}

RunResult run(const RunConfig& config, bool write_files) {
  RunResult out;
  out.directory = resolve_output_directory(config.output_directory);
  if (write_files) fs::create_directories(out.directory);
  Context ctx{config, Potential(config.potential), out.directory, write_files && config.write_csv, nullptr};

  // Symbolic tables first, then scattering curves, then everything that uses them.
  auto stage = [](TaskKind k) {
    switch (k) {
      case TaskKind::invariants: return 0;
      case TaskKind::ssf: return 1;
      default: return 2;
    }
  };
  std::vector<std::size_t> order(config.tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return stage(config.tasks[a].kind) < stage(config.tasks[b].kind); });
  out.tasks.resize(config.tasks.size());
  for (std::size_t i : order) out.tasks[i] = run_task(ctx, config.tasks[i], i);

  OrderedJson summary;
  summary["config_sha256"] = config.sha256;
  summary["potential"] = ctx.potential.describe();
  OrderedJson list = OrderedJson::array();
  bool all = true;
  for (std::size_t i = 0; i < out.tasks.size(); ++i) {
    auto& t = out.tasks[i];
    all = all && t.pass;
    list.push_back({{"index", i}, {"task", to_string(t.kind)}, {"pass", t.pass}});
    if (write_files && config.write_json) {
      fs::path f = out.directory / fmt::format("{:02d}_{}.json", i, to_string(t.kind));
      write_text(f, t.report.dump(2) + "\n");
      t.files.push_back(f);
    }
  }
  summary["tasks"] = list;
  summary["pass"] = all;
  if (write_files && config.write_json) write_text(out.directory / "summary.json", summary.dump(2) + "\n");
  out.exit_status = all ? 0 : 1;
  return out;
}

std::string invariant_tables_text(int dim, int max_n) {
  if (max_n < 0 || max_n > 5) fail(ErrorKind::capability, "invariant tables are capped at order 5");
  std::ostringstream os;
  for (int n = 0; n <= max_n; ++n) os << "g_" << n << " (d=" << dim << ") = " << heat_invariant_closed(n, dim).to_string() << "\n";
  for (int n = 0; n <= std::min(max_n, 3); ++n) os << "X_" << n << " (d=" << dim << ") = " << xn(n, dim).to_string() << "\n";
  return os.str();
}

OrderedJson report_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(fmt::format("{:.11e}", x));
}

OrderedJson to_json(const IdentityReport& r) {
  OrderedJson j;
  j["tag"] = r.tag;
  j["dim"] = r.dim;
  j["order"] = r.order;
  j["potential"] = r.potential;
  OrderedJson lhs = OrderedJson::array();
  for (const auto& p : r.lhs) lhs.push_back({{"name", p.name}, {"value", report_number(p.value)}});
  j["lhs"] = lhs;
  j["lhs_total"] = report_number(r.lhs_total());
  j["rhs"] = report_number(r.rhs);
  j["residual"] = report_number(r.residual);
  j["error_budget"] = report_number(r.error_budget);
  j["tolerance"] = report_number(r.tolerance);
  OrderedJson extra = OrderedJson::object();
  for (const auto& p : r.extra) extra[p.name] = report_number(p.value);
  j["extra"] = extra;
  j["pass"] = r.pass;
  return j;
}

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "ssf") return PlotKind::ssf;
  if (name == "log_det") return PlotKind::log_det;
  if (name == "phase_shifts") return PlotKind::phase_shifts;
  if (name == "residuals") return PlotKind::residuals;
  if (name == "heat") return PlotKind::heat;
  fail(ErrorKind::usage, "unknown plot kind '" + name + "' (ssf, log_det, phase_shifts, residuals, heat)");
}

std::string plot_data_csv(PlotKind kind, const RunConfig& config) {
  Potential pot(config.potential);
  if (pot.dim() == 2) fail(ErrorKind::unsupported, "d = 2 numerics are out of scope");
  // The lambda grid comes from the first ssf task, else a default.
  std::vector<double> grid = log_grid(0.01, 100.0, 200);
  std::vector<double> times{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  for (const auto& t : config.tasks) {
    if (t.kind == TaskKind::ssf) {
      grid = t.params["lambda_grid"].get<std::vector<double>>();
      break;
    }
  }
  for (const auto& t : config.tasks) {
    if (t.kind == TaskKind::heat) {
      times = t.params["times"].get<std::vector<double>>();
      break;
    }
  }
  if (grid.empty()) fail(ErrorKind::usage, "plot: empty grid");
  std::ostringstream csv;
  switch (kind) {
    case PlotKind::ssf: {
      SsfModel model(pot);
      csv << "lambda [energy],xi [count]\r\n";
      for (double l : grid) csv << csv_number(l) << "," << csv_number(model.xi_k(std::sqrt(l))) << "\r\n";
      break;
    }
    case PlotKind::log_det: {
      if (pot.dim() != 1) fail(ErrorKind::unsupported, "log_det plot needs d = 1");
      Ssf1d s(pot);
      csv << "lambda [energy],ln_abs_D [1],arg_D_over_pi [1]\r\n";
      for (double l : grid) {
        double k = std::sqrt(l);
        csv << csv_number(l) << "," << csv_number(s.ln_abs_a(k)) << "," << csv_number(s.xi_k(k)) << "\r\n";
      }
      break;
    }
    case PlotKind::phase_shifts: {
      if (pot.dim() != 3) fail(ErrorKind::unsupported, "phase_shifts plot needs d = 3");
      const int waves = 6;
      csv << "k [1/length]";
      for (int l = 0; l < waves; ++l) csv << ",delta_" << l << " [rad]";
      csv << "\r\n";
      for (double lam : grid) {
        double k = std::sqrt(lam);
        PhaseShiftTable t = phase_shift_table(pot, k, waves);
        csv << csv_number(k);
        for (int l = 0; l < waves; ++l) csv << "," << csv_number(t.delta.at(static_cast<std::size_t>(l)));
        csv << "\r\n";
      }
      break;
    }
    case PlotKind::residuals: {
      SsfModel model(pot);
      csv << "tolerance [1],integer_n1_residual [1],error_budget [1]\r\n";
      for (double tol : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
        IdentityReport r = trace_identity_integer(model, 1, {tol});
        csv << csv_number(tol) << "," << csv_number(std::abs(r.residual)) << "," << csv_number(r.error_budget) << "\r\n";
      }
      break;
    }
    case PlotKind::heat: {
      SsfModel model(pot);
      csv << "t [1/energy],via_ssf [1],via_oracle [1],via_series [1]\r\n";
      for (double t : times) {
        HeatTrace h = heat_trace_diff(model, t);
        csv << csv_number(t) << "," << csv_number(h.via_ssf.value) << "," << csv_number(h.via_oracle.value) << ","
            << csv_number(h.via_series.value) << "\r\n";
      }
      break;
    }
  }
  return csv.str();
}

}  // namespace ssf
