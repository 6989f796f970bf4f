#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polydyn/config.hpp"
#include "polydyn/discrep.hpp"
#include "polydyn/genseq.hpp"
#include "polydyn/spectra.hpp"
#include "polydyn/trisys.hpp"

using namespace polydyn;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config_path;
  std::string seed, n_points, nu, L, k, abox, advance, out, format;
  std::string term_cap, step_cap, enum_cap, work_cap;
};

void add_common(CLI::App* cmd, Overrides& o, bool config_required = true) {
  auto* c = cmd->add_option("config", o.config_path, "system/experiment config file");
  if (config_required) c->required();
  cmd->add_option("--seed", o.seed, "initial state: zero or comma-separated residues");
  cmd->add_option("-N,--points", o.n_points, "number of points");
  cmd->add_option("--nu", o.nu, "comma-separated nu values for envelopes");
  cmd->add_option("-L,--L", o.L, "coefficient bound for the Koksma-Szusz sum");
  cmd->add_option("--abox", o.abox, "coefficient box half-width for exponential sums");
  cmd->add_option("--advance", o.advance, "auto or none");
  cmd->add_option("-o,--out", o.out, "output path (stdout if absent)");
  cmd->add_option("--format", o.format, "csv or binary");
  cmd->add_option("--term-cap", o.term_cap, "symbolic term budget");
  cmd->add_option("--step-cap", o.step_cap, "cycle search step budget");
  cmd->add_option("--enum-cap", o.enum_cap, "brute-force enumeration budget");
  cmd->add_option("--work-cap", o.work_cap, "discrepancy work budget");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load(const Overrides& o) {
  if (o.config_path.empty()) throw Error(Errc::MissingField, "a config file is required");
  std::string text = read_file(o.config_path);
  RawConfig raw;
  try {
    raw = parse_config_text(text);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), o.config_path + ":" + e.location());
  }
  auto put = [&](const char* section, const char* key, const std::string& v) {
    if (!v.empty()) raw.set(section, key, v);
  };
  put("run", "seed", o.seed);
  put("run", "N", o.n_points);
  put("run", "nu", o.nu);
  put("run", "L", o.L);
  put("run", "k", o.k);
  put("run", "abox", o.abox);
  put("run", "advance", o.advance);
  put("run", "out", o.out);
  put("run", "format", o.format);
  put("budgets", "term_cap", o.term_cap);
  put("budgets", "step_cap", o.step_cap);
  put("budgets", "enum_cap", o.enum_cap);
  put("budgets", "work_cap", o.work_cap);
  try {
    return resolve_config(raw);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), o.config_path + ":" + e.location());
  }
}

// stdout unless a path is configured.
class Output {
 public:
  Output(const std::string& path, bool binary) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
    if (!*file_) throw Error(Errc::Io, "cannot write '" + path + "'", path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw Error(Errc::Io, "write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

json error_json(const Error& e) {
  json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  j["location"] = e.location().empty() ? json(nullptr) : json(e.location());
  return j;
}

json big_json(const BigInt& x) {
  if (x <= BigInt(UINT64_MAX)) return json(static_cast<std::uint64_t>(x));
  return json(x.str());
}

void warn(const std::string& msg) { std::cerr << json{{"warning", msg}}.dump() << "\n"; }

// The periodic entry point when requested; falls back to w0 if the cycle
// search runs out of budget.
StateVector start_state(const ExperimentConfig& cfg) {
  if (!cfg.run.advance) return cfg.run.seed;
  try {
    return advance_to_cycle(cfg.system, cfg.run.seed, cfg.budgets.step_cap);
  } catch (const Error& e) {
    if (e.code() != Errc::StepBudgetExceeded) throw;
    warn(std::string("cycle search exceeded the step budget; using the seed state: ") + e.what());
    return cfg.run.seed;
  }
}

json degrees_json(const ExperimentConfig& cfg, std::string* csv) {
  const TriangularSystem& sys = cfg.system;
  const std::size_t m = sys.m();
  SymbolicOrbit orbit(sys, cfg.budgets.term_cap);
  bool budget_hit = false;
  json rows = json::array();
  std::ostringstream os;
  os << "k";
  for (std::size_t i = 0; i <= m; ++i) os << ",d" << i;
  for (std::size_t i = 0; i < m; ++i) os << ",lead" << i;
  os << ",symbolic\n";
  for (std::uint64_t k = 0; k <= cfg.run.k; ++k) {
    DegreeVector dv = degree_vector(sys, k);
    std::string flag = "budget";
    if (!budget_hit) {
      try {
        const auto& it = orbit.iterate(k);
        bool match = true;
        for (std::size_t i = 0; i <= m; ++i) match = match && BigInt(it[i].total_degree()) == dv.d[i];
        flag = match ? "match" : "mismatch";
      } catch (const Error& e) {
        if (e.code() != Errc::TermBudgetExceeded) throw;
        budget_hit = true;
      }
    }
    json row{{"k", k}, {"symbolic", flag}};
    os << k;
    for (const BigInt& d : dv.d) {
      os << ',' << d;
      row["d"].push_back(big_json(d));
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::string lead = predicted_leading(sys, i).at(k).str();
      os << ',' << lead;
      row["lead"].push_back(lead);
    }
    os << ',' << flag << '\n';
    rows.push_back(row);
  }
  if (csv) *csv = os.str();
  return rows;
}

json period_json(const ExperimentConfig& cfg) {
  CycleInfo info = find_cycle(cfg.system, cfg.run.seed, cfg.budgets.step_cap);
  return json{{"lambda", info.preperiod}, {"period", info.period}};
}

ExpSumMaxReport expsum_run(const ExperimentConfig& cfg) {
  const TriangularSystem& sys = cfg.system;
  PointBuffer stream = collect(sys, start_state(cfg), cfg.run.n_points, true);
  auto coeffs = coefficient_box(sys.field(), sys.m(), cfg.run.abox);
  return exp_sum_max(sys.field(), stream, cfg.run.n_points, coeffs);
}

json weil_entry(const Field& field, const Polynomial& f, std::uint64_t cap, const std::string& name) {
  json j{{"name", name}, {"poly", f.to_string()}};
  WeilResult r = weil_bruteforce(field, f, cap);
  j["abs"] = r.abs;
  j["bound"] = r.bound;
  j["bound_ok"] = r.bound_ok;
  j["degree"] = r.degree;
  j["points"] = r.points;
  return j;
}

json weil_json(const ExperimentConfig& cfg, bool keep_going) {
  json out = json::array();
  const auto& f = cfg.system.f();
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::string name = "f" + std::to_string(i);
    try {
      out.push_back(weil_entry(cfg.system.field(), f[i], cfg.budgets.enum_cap, name));
    } catch (const Error& e) {
      if (!keep_going) throw;
      out.push_back(json{{"name", name}, {"skipped", error_json(e)}});
    }
  }
  return out;
}

json discrepancy_json(const DiscrepancyReport& r, bool have_p) {
  json j;
  j["p"] = have_p ? json(r.p) : json(nullptr);
  j["m"] = r.m;
  j["nu"] = have_p ? json(r.nu) : json(nullptr);
  j["N"] = r.n_points;
  if (r.exact) j["exact"] = *r.exact;
  if (r.exact_extreme) j["exact_extreme"] = *r.exact_extreme;
  j["ks_bound"] = r.ks_bound;
  j["L"] = r.L;
  j["envelope"] = have_p ? json(r.envelope) : json(nullptr);
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

DiscrepancyReport discrepancy_run(const ExperimentConfig& cfg) {
  PointBuffer stream = collect(cfg.system, start_state(cfg), cfg.run.n_points, true);
  return discrepancy_report(cfg.system.field(), stream, cfg.run.nus.front(), cfg.run.L,
                            cfg.budgets.work_cap);
}

DiscrepancyReport discrepancy_from_points(const std::string& path, std::uint64_t L,
                                          std::uint64_t work_cap) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'", path);
  PointSet pts;
  try {
    pts = read_points_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), path + ":" + e.location());
  }
  auto start = std::chrono::steady_clock::now();
  DiscrepancyReport r;
  r.m = pts.dim;
  r.n_points = pts.size();
  r.L = L;
  if (r.m <= 3 && r.n_points <= 2000) r.exact = star_discrepancy_exact(pts, work_cap);
  if (r.m <= 2 && r.n_points <= 500) r.exact_extreme = extreme_discrepancy_exact(pts, work_cap);
  r.ks_bound = koksma_szusz_bound(pts, L, work_cap);
  r.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int exit_code(Errc code) {
  if (is_budget_error(code)) return 2;
  if (code == Errc::Io) return 3;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triangular polynomial dynamical systems over prime fields"};
  app.require_subcommand(1);
  Overrides o;

  auto* validate = app.add_subcommand("validate", "check a system and echo its canonical form");
  add_common(validate, o);

  auto* degrees = app.add_subcommand("degrees", "degree table of the iterates");
  add_common(degrees, o);
  degrees->add_option("--k", o.k, "largest iterate index");

  auto* generate = app.add_subcommand("generate", "emit the point stream u_n");
  add_common(generate, o);
  bool full_state = false;
  generate->add_flag("--full-state", full_state, "emit w_n instead of u_n");

  auto* period = app.add_subcommand("period", "pre-period and period of the orbit");
  add_common(period, o);

  auto* expsum = app.add_subcommand("expsum", "exponential sums over a coefficient box");
  add_common(expsum, o);

  auto* weil = app.add_subcommand("weil", "brute-force Weil-bound checks");
  add_common(weil, o, false);
  std::string poly_text;
  std::uint64_t poly_p = 0;
  std::size_t poly_vars = 1;
  weil->add_option("--poly", poly_text, "check this polynomial instead of the system maps");
  weil->add_option("--p", poly_p, "prime for --poly");
  weil->add_option("--vars", poly_vars, "number of variables for --poly");

  auto* discrepancy = app.add_subcommand("discrepancy", "discrepancy report");
  add_common(discrepancy, o, false);
  std::string points_path;
  discrepancy->add_option("--points-csv", points_path, "measure points from a CSV file instead");

  auto* report = app.add_subcommand("report", "all experiments as one JSON document");
  add_common(report, o);
  report->add_option("--k", o.k, "largest iterate index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "ParseError"}, {"message", e.what()}, {"location", "arguments"}}.dump()
              << "\n";
    return 1;
  }

  try {
    if (validate->parsed()) {
      ExperimentConfig cfg = load(o);
      std::cout << cfg.system.to_config();
    } else if (degrees->parsed()) {
      ExperimentConfig cfg = load(o);
      std::string csv;
      degrees_json(cfg, &csv);
      Output out(cfg.run.out, false);
      out.stream() << csv;
      out.finish();
    } else if (generate->parsed()) {
      ExperimentConfig cfg = load(o);
      bool binary = cfg.run.format == "binary";
      Output out(cfg.run.out, binary);
      if (binary)
        write_points_binary(out.stream(), cfg.system, cfg.run.seed, cfg.run.n_points, !full_state);
      else
        write_points_csv(out.stream(), cfg.system, cfg.run.seed, cfg.run.n_points, !full_state);
      out.finish();
    } else if (period->parsed()) {
      ExperimentConfig cfg = load(o);
      std::cout << period_json(cfg).dump() << "\n";
    } else if (expsum->parsed()) {
      ExperimentConfig cfg = load(o);
      ExpSumMaxReport rep = expsum_run(cfg);
      Output out(cfg.run.out, false);
      write_expsum_csv(out.stream(), cfg.system.m(), cfg.system.field().modulus(), rep.sums,
                       cfg.run.nus);
      out.finish();
    } else if (weil->parsed()) {
      json result;
      if (!poly_text.empty()) {
        std::uint64_t cap = kDefaultEnumCap;
        std::uint64_t p = poly_p;
        if (!o.config_path.empty()) {
          ExperimentConfig cfg = load(o);
          cap = cfg.budgets.enum_cap;
          if (!p) p = cfg.system.field().modulus();
        } else if (!o.enum_cap.empty()) {
          cap = std::stoull(o.enum_cap);
        }
        if (!p) throw Error(Errc::MissingField, "--poly needs --p or a config", "arguments");
        Field field(p);
        Polynomial f = Polynomial::parse(Ring(field, poly_vars), poly_text);
        result = json::array({weil_entry(field, f, cap, "poly")});
      } else {
        result = weil_json(load(o), false);
      }
      std::cout << result.dump(2) << "\n";
    } else if (discrepancy->parsed()) {
      json j;
      if (!points_path.empty()) {
        std::uint64_t L = o.L.empty() ? 64 : std::stoull(o.L);
        std::uint64_t cap = o.work_cap.empty() ? kDefaultWorkCap : std::stoull(o.work_cap);
        j = discrepancy_json(discrepancy_from_points(points_path, L, cap), false);
      } else {
        j = discrepancy_json(discrepancy_run(load(o)), true);
      }
      std::cout << j.dump(2) << "\n";
    } else if (report->parsed()) {
      ExperimentConfig cfg = load(o);
      json r;
      r["system"] = cfg.system.to_config();
      r["kind"] = cfg.system.kind() == SystemKind::Fast ? "fast" : "general";
      r["degrees"] = degrees_json(cfg, nullptr);
      auto guarded = [&](auto&& fn) -> json {
        try {
          return fn();
        } catch (const Error& e) {
          if (!is_budget_error(e.code())) throw;
          return json{{"skipped", error_json(e)}};
        }
      };
      r["period"] = guarded([&] { return period_json(cfg); });
      r["expsum"] = guarded([&] {
        ExpSumMaxReport rep = expsum_run(cfg);
        json j{{"N", cfg.run.n_points}, {"abox", cfg.run.abox}, {"max_abs", rep.max_abs}};
        j["argmax"] = rep.sums.empty() ? json(nullptr) : json(rep.sums[rep.argmax].a);
        for (std::uint64_t nu : cfg.run.nus) {
          j["envelopes"]["nu" + std::to_string(nu)] = expsum_envelope(
              BoundEnvelope(cfg.system.m(), nu), cfg.system.field().modulus(), cfg.run.n_points);
        }
        return j;
      });
      r["weil"] = weil_json(cfg, true);
      r["discrepancy"] = guarded([&] { return discrepancy_json(discrepancy_run(cfg), true); });
      Output out(cfg.run.out, false);
      out.stream() << r.dump(2) << "\n";
      out.finish();
    }
  } catch (const Error& e) {
    std::cerr << error_json(e).dump() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InvalidArgument"}, {"message", e.what()}, {"location", nullptr}}.dump()
              << "\n";
    return 1;
  }
  return 0;
}
