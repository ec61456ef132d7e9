#include "feigdim/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "feigdim/dimension.hpp"
#include "feigdim/error.hpp"
#include "feigdim/parabolic.hpp"
#include "feigdim/presentation.hpp"
#include "feigdim/unimodal_system.hpp"

#ifndef FEIGDIM_VERSION
#define FEIGDIM_VERSION "unknown"
#endif

namespace feigdim::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::vector<int> parse_ell_range(std::string_view spec) {
  auto bad = [&] {
    return Error(ErrorCode::UsageError, "bad ell range '" + std::string(spec) + "' (want a:step:b)");
  };
  std::vector<int> parts;
  std::string token;
  std::stringstream ss{std::string(spec)};
  while (std::getline(ss, token, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(token, &used));
      if (used != token.size()) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  std::vector<int> out;
  if (parts.size() == 1) {
    out.push_back(parts[0]);
  } else if (parts.size() == 3 && parts[1] > 0 && parts[0] <= parts[2] &&
             (parts[2] - parts[0]) % parts[1] == 0) {
    for (int l = parts[0]; l <= parts[2]; l += parts[1]) out.push_back(l);
  } else {
    throw bad();
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 2 || out[i] % 2 != 0) throw Error(ErrorCode::UsageError, "ell must be even and >= 2");
  }
  return out;
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Replaces `path` only once the new content is complete.
void write_atomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::UsageError, "cannot write " + tmp.string());
    f << content;
    if (!f) throw Error(ErrorCode::UsageError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

class RunContext {
 public:
  RunContext(const RunConfig& cfg, std::vector<std::string> argv) : cfg_(cfg), argv_(std::move(argv)) {}

  void note_input(const fs::path& p) { inputs_[p.string()] = file_checksum(p); }

  void write_output(const fs::path& path, const std::string& content, json extra = json::object()) {
    write_atomically(path, content);
    json m;
    m["tool"] = "feigdim";
    m["version"] = FEIGDIM_VERSION;
    m["created"] = utc_now();
    m["command"] = cfg_.command;
    m["argv"] = argv_;
    m["config"] = config_json();
    json ins = json::array();
    for (const auto& [p, sum] : inputs_) ins.push_back({{"path", p}, {"fnv1a64", sum}});
    m["inputs"] = ins;
    m["output"] = {{"path", path.string()}, {"bytes", content.size()}, {"fnv1a64", file_checksum(path)}};
    m["compiler"] = __VERSION__;
    if (!extra.empty()) m["diagnostics"] = std::move(extra);
    write_atomically(path.string() + ".manifest.json", m.dump(2) + "\n");
  }

 private:
  json config_json() const {
    json c;
    if (cfg_.ell) c["ell"] = *cfg_.ell;
    c["ells"] = cfg_.ells;
    c["p"] = cfg_.p;
    c["degree"] = cfg_.degree;
    c["K"] = cfg_.K;
    c["nc"] = cfg_.nc;
    c["tol"] = cfg_.tol;
    c["cache"] = cfg_.cache_dir.string();
    c["precision"] = cfg_.precision == Precision::extended ? "extended" : "double";
    if (cfg_.seed_file) c["seed_file"] = cfg_.seed_file->string();
    return c;
  }

  const RunConfig& cfg_;
  std::vector<std::string> argv_;
  std::map<std::string, std::string> inputs_;
};

// Cached, revalidated fixed points along the continuation chain 2, 4, ..., ell.
class FixedPointStore {
 public:
  FixedPointStore(const RunConfig& cfg, RunContext& ctx, std::ostream& err)
      : cfg_(cfg), ctx_(ctx), err_(err) {
    opts_.degree = cfg.degree;
    opts_.tol = cfg.tol;
    opts_.precision = cfg.precision;
    dir_ = cfg.precision == Precision::extended ? cfg.cache_dir / "extended" : cfg.cache_dir;
    if (cfg.seed_file) {
      const FixedPointMap s = load_fixed_point(*cfg.seed_file);
      seed_ = FixedPointSeed{s.coeffs(), s.alpha(), cfg.seed_file->string()};
      seed_ell_ = s.ell();
      ctx_.note_input(*cfg.seed_file);
    }
  }

  fs::path path_for(int ell) const { return dir_ / cache_file_name(cfg_.p, ell, cfg_.degree); }

  const FixedPointMap& get(int ell) {
    for (int l = 2; l <= ell; l += 2) {
      if (memo_.count(l)) continue;
      memo_.emplace(l, acquire(l));
    }
    return memo_.at(ell);
  }

 private:
  FixedPointMap acquire(int ell) {
    const fs::path path = path_for(ell);
    if (fs::exists(path)) {
      try {
        FixedPointMap fp = load_fixed_point(path);
        if (fp.ell() != ell || fp.combinatorics().p != cfg_.p) {
          throw Error(ErrorCode::SchemaMismatch, "cache entry describes a different system");
        }
        if (fp.meta().tol > cfg_.tol) {
          throw Error(ErrorCode::InvariantViolation, "cache entry solved to a looser tolerance");
        }
        revalidate_fixed_point(fp);
        ctx_.note_input(path);
        return fp;
      } catch (const Error& e) {
        err_ << "feigdim: stale cache entry " << path.string() << " (" << e.what()
             << "); re-solving\n";
      }
    }
    FixedPointMap fp = solve(ell);
    write_atomically(path, to_json(fp));
    ctx_.note_input(path);
    return fp;
  }

  FixedPointMap solve(int ell) {
    Combinatorics comb{cfg_.p, Orientation::reversing};
    if (seed_ && seed_ell_ == ell) {
      SolverOptions o = opts_;
      o.initial_guess = seed_;
      return solve_fixed_point(comb, ell, o);
    }
    if (ell == 2) return solve_fixed_point(comb, 2, opts_);
    return continue_in_ell(memo_.at(ell - 2), ell, opts_);
  }

  const RunConfig& cfg_;
  RunContext& ctx_;
  std::ostream& err_;
  SolverOptions opts_;
  fs::path dir_;
  std::optional<FixedPointSeed> seed_;
  int seed_ell_ = 0;
  std::map<int, FixedPointMap> memo_;
};

DimensionOptions dimension_options(const RunConfig& cfg) {
  DimensionOptions d;
  d.K = cfg.K;
  d.nodes = cfg.nc;
  d.threads = cfg.threads;
  return d;
}

void emit(RunContext& ctx, const RunConfig& cfg, std::ostream& out, const std::string& content,
          json extra = json::object()) {
  if (cfg.out) {
    ctx.write_output(*cfg.out, content, std::move(extra));
  } else {
    out << content;
  }
}

int cmd_solve(const RunConfig& cfg, RunContext& ctx, std::ostream& out, std::ostream& err) {
  FixedPointStore store(cfg, ctx, err);
  std::ostringstream csv;
  csv << "ell,alpha,tau,residual,degree,path\n";
  char buf[512];
  for (int ell : cfg.ells) {
    const FixedPointMap& fp = store.get(ell);
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.3g,%zu,%s\n", ell, fp.alpha(), fp.tau(),
                  fp.residual(), fp.degree(), store.path_for(ell).string().c_str());
    csv << buf;
  }
  emit(ctx, cfg, out, csv.str());
  return 0;
}

int cmd_dim(const RunConfig& cfg, RunContext& ctx, std::ostream& out, std::ostream& err) {
  FixedPointStore store(cfg, ctx, err);
  DimensionReport rep;
  rep.rows.push_back(dimension_row(store.get(*cfg.ell), dimension_options(cfg)));
  std::ostringstream csv;
  rep.write_csv(csv);
  emit(ctx, cfg, out, csv.str());
  if (!rep.rows[0].ok) {
    err << "feigdim: dimension failed at ell=" << *cfg.ell << ": " << rep.rows[0].error << "\n";
    return 2;
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, RunContext& ctx, std::ostream& out, std::ostream& err) {
  FixedPointStore store(cfg, ctx, err);
  SweepOptions so;
  so.dim = dimension_options(cfg);
  so.threads = cfg.threads;
  const DimensionReport rep =
      sweep(cfg.ells, so, [&](int ell, const FixedPointMap*) { return store.get(ell); });
  std::ostringstream csv;
  rep.write_csv(csv);

  json diag = json::array();
  const auto dt = rep.delta_tau();
  const auto dh = rep.delta_hd();
  int failures = 0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    json row{{"ell", rep.rows[i].ell}};
    if (std::isfinite(dt[i])) row["delta_tau"] = dt[i];
    if (std::isfinite(dh[i])) row["delta_hd"] = dh[i];
    if (!rep.rows[i].ok) {
      row["error"] = rep.rows[i].error;
      err << "feigdim: ell=" << rep.rows[i].ell << " failed: " << rep.rows[i].error << "\n";
      ++failures;
    }
    diag.push_back(row);
    if (std::isfinite(dt[i])) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "ell=%d delta_tau=%.6g delta_hd=%.6g\n", rep.rows[i].ell, dt[i], dh[i]);
      err << buf;
    }
  }
  emit(ctx, cfg, out, csv.str(), diag);
  return failures ? 2 : 0;
}

int cmd_diagnose(const RunConfig& cfg, RunContext& ctx, std::ostream& out, std::ostream& err) {
  FixedPointStore store(cfg, ctx, err);
  std::vector<UnimodalSystem> systems;
  for (int ell : cfg.ells) systems.emplace_back(store.get(ell));
  if (systems.size() < 2) throw Error(ErrorCode::UsageError, "diagnose needs at least two ell values");

  std::ostringstream dom;
  dominance_table(systems).write_csv(dom);

  const std::vector<double> sigmas{1.0, 1.001, 1.01, 1.1};
  std::ostringstream c2;
  c2 << "p,sigma,w0,i_max,M\n";
  for (double p : {1.25, 1.5, 2.0}) {
    std::ostringstream part;
    affine_derivative_scan(p, 2.0, sigmas, 100000).write_csv(part);
    const std::string s = part.str();
    c2 << s.substr(s.find('\n') + 1);
  }

  std::ostringstream pt;
  pt << "ell,t,V_radius,partial_sum,tail_estimate,total\n";
  char buf[256];
  for (const UnimodalSystem& sys : systems) {
    const double x = default_petal_point(sys);
    for (double t : {0.75, 0.5}) {
      for (double r : {0.05, 0.025}) {
        const PoincareTail tail = poincare_tail(sys, t, x, r, 100000);
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", sys.ell(), t, r,
                      tail.partial_sum, tail.tail_estimate, tail.total);
        pt << buf;
      }
    }
  }

  const int K = cfg.K > 0 ? cfg.K : default_kmax(systems.front().ell());
  const PresentationSystem ps(systems.front(), K);
  std::ostringstream cyl;
  write_cylinders_csv(ps, cyl);

  if (cfg.out) {
    const fs::path dir = *cfg.out;
    ctx.write_output(dir / "dominance.csv", dom.str());
    ctx.write_output(dir / "affine_scan.csv", c2.str());
    ctx.write_output(dir / "poincare.csv", pt.str());
    ctx.write_output(dir / ("cylinders_l" + std::to_string(systems.front().ell()) + ".csv"), cyl.str());
  } else {
    out << dom.str();
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feigenbaum attractor dimension toolkit", "feigdim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FEIGDIM_VERSION);

  RunConfig cfg;
  std::string ell_range, precision = "double", cache, outp, seed;
  int ell = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "Renormalization period (2)")->capture_default_str();
    sub->add_option("--degree", cfg.degree, "Chebyshev degree of E")->capture_default_str();
    sub->add_option("--K", cfg.K, "Alphabet truncation (0 = automatic)")->capture_default_str();
    sub->add_option("--nc", cfg.nc, "Collocation nodes")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "Fixed-point residual tolerance")->capture_default_str();
    sub->add_option("--cache", cache, "Fixed-point cache directory");
    sub->add_option("--out", outp, "Output file (directory for diagnose)");
    sub->add_option("--precision", precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}));
    sub->add_option("--seed-file", seed, "Fixed-point JSON used as the Newton seed");
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve and cache fixed points");
  add_common(solve);
  auto* solve_ell = solve->add_option("--ell", ell, "Criticality order");
  auto* solve_ells = solve->add_option("--ells", ell_range, "Range a:step:b");
  solve_ell->excludes(solve_ells);

  CLI::App* dim = app.add_subcommand("dim", "Hausdorff dimension at one ell");
  add_common(dim);
  dim->add_option("--ell", ell, "Criticality order")->required();

  CLI::App* sw = app.add_subcommand("sweep", "Dimension sweep over ell");
  add_common(sw);
  sw->add_option("--ells", ell_range, "Range a:step:b")->required();

  CLI::App* diag = app.add_subcommand("diagnose", "Dominance, affine derivative scan and Poincare diagnostics");
  add_common(diag);
  diag->add_option("--ells", ell_range, "Range a:step:b (default 2:2:20)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? 0 : 1;
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "solve" && solve_ell->count() == 0 && solve_ells->count() == 0) {
      throw Error(ErrorCode::UsageError, "solve needs --ell or --ells");
    }
    if (cfg.command == "diagnose" && ell_range.empty()) ell_range = "2:2:20";
    if (!ell_range.empty()) {
      cfg.ells = parse_ell_range(ell_range);
    } else {
      cfg.ells = parse_ell_range(std::to_string(ell));
      cfg.ell = ell;
    }
    if (!(cfg.tol > 0.0)) throw Error(ErrorCode::UsageError, "--tol must be positive");
    if (cfg.nc < 2) throw Error(ErrorCode::UsageError, "--nc must be at least 2");
    if (cfg.K < 0) throw Error(ErrorCode::UsageError, "--K must be non-negative");
    Combinatorics{cfg.p, Orientation::reversing}.validate();
    cfg.precision = precision == "extended" ? Precision::extended : Precision::standard;
    if (!cache.empty()) {
      cfg.cache_dir = cache;
    } else if (const char* env = std::getenv("FEIGDIM_CACHE"); env && *env) {
      cfg.cache_dir = env;
    } else {
      cfg.cache_dir = "feigdim-cache";
    }
    fs::create_directories(cfg.cache_dir);
    if (!outp.empty()) cfg.out = fs::path(outp);
    if (!seed.empty()) cfg.seed_file = fs::path(seed);
  } catch (const Error& e) {
    err << "feigdim: " << e.what() << "\n" << app.help();
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "feigdim: cache directory not usable: " << e.what() << "\n";
    return 1;
  }

  RunContext ctx(cfg, args);
  try {
    if (cfg.command == "solve") return cmd_solve(cfg, ctx, out, err);
    if (cfg.command == "dim") return cmd_dim(cfg, ctx, out, err);
    if (cfg.command == "sweep") return cmd_sweep(cfg, ctx, out, err);
    return cmd_diagnose(cfg, ctx, out, err);
  } catch (const Error& e) {
    err << "feigdim: " << e.what() << "\n";
    return e.code() == ErrorCode::UsageError ? 1 : 2;
  } catch (const std::exception& e) {
    err << "feigdim: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace feigdim::cli
