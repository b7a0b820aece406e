#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "steerfid/benchmarks.hpp"
#include "steerfid/errors.hpp"
#include "steerfid/oracle.hpp"
#include "steerfid/states.hpp"
#include "steerfid/vqsa.hpp"

namespace steerfid::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
  std::string state;
  std::string config;
  std::string out = ".";
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
  std::string shots;
  std::string reward;
  std::optional<int> benchmark;
  std::string partitions;
  bool with_vqsa = false;
};

// Thrown when `compare` finds the oracle above a benchmark.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + ": top level must be an object");
  return j;
}

const Json& section(const Json& cfg, const char* name) {
  static const Json empty = Json::object();
  if (!cfg.contains(name)) return empty;
  const Json& s = cfg.at(name);
  if (!s.is_object()) throw ConfigError(std::string("config: '") + name + "' must be an object");
  return s;
}

template <typename T>
T field(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

std::size_t count_field(const Json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("config: field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<Labels> parse_partitions(const std::string& text) {
  std::vector<Labels> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, '|')) {
    Labels labels;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      if (!item.empty()) labels.push_back(item);
    }
    if (labels.empty()) throw ConfigError("--partitions: empty group in '" + text + "'");
    out.push_back(std::move(labels));
  }
  if (out.size() < 2) throw ConfigError("--partitions needs at least two groups separated by '|'");
  return out;
}

struct ResolvedState {
  DensityMatrix rho;
  std::string name;
  std::vector<Labels> partitions;
};

ResolvedState resolve_state(const Options& opt, const Json& cfg) {
  std::string source = opt.state;
  if (source.empty()) source = field<std::string>(cfg, "state", "");
  if (source.empty()) throw ConfigError("no state given (use --state <path|name>)");

  std::optional<DensityMatrix> rho;
  std::vector<Labels> parts;
  if (fs::exists(source)) {
    rho = load_state_file(source);
    for (const auto& s : rho->layout().subsystems()) parts.push_back({s.label});
  } else {
    const NamedStateSpec spec = parse_state_name(source);
    rho = build_state(spec);
    parts = default_partitions(spec);
  }
  if (!opt.partitions.empty()) {
    parts = parse_partitions(opt.partitions);
  } else if (cfg.contains("partitions")) {
    try {
      parts = cfg.at("partitions").get<std::vector<Labels>>();
    } catch (const Json::exception&) {
      throw ConfigError("config: 'partitions' must be a list of label lists");
    }
  }
  return {*rho, source, parts};
}

BipartiteSplit bipartite(const std::vector<Labels>& parts) {
  if (parts.size() != 2) {
    throw ConfigError("benchmarks need exactly two partitions, got " + std::to_string(parts.size()) +
                      " (use --partitions \"A...|B...\")");
  }
  return {parts[0], parts[1]};
}

std::uint64_t seed_of(const Options& opt, const Json& cfg) {
  if (opt.seed) return *opt.seed;
  if (!cfg.contains("seed")) return 0;
  const Json& v = cfg.at("seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError("config: 'seed' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::optional<std::size_t> parse_shots(const std::string& text) {
  if (text == "exact") return std::nullopt;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || v == 0 || text.front() == '-') {
    throw ConfigError("shots must be a positive integer or 'exact', got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

RewardKind parse_reward(const std::string& text) {
  if (text == "global") return RewardKind::global;
  if (text == "local") return RewardKind::local;
  throw ConfigError("reward must be 'global' or 'local', got '" + text + "'");
}

VqsaConfig vqsa_config(const Options& opt, const Json& cfg, std::uint64_t seed) {
  const Json& v = section(cfg, "vqsa");
  VqsaConfig c;
  c.layers_w = count_field(v, "layers_w", c.layers_w);
  c.layers_u = count_field(v, "layers_u", c.layers_u);
  c.ref_dim = count_field(v, "ref_dim", c.ref_dim);
  c.restarts = count_field(v, "restarts", c.restarts);
  c.init_spread = field<double>(v, "init_spread", c.init_spread);
  c.spsa.iterations = count_field(v, "iterations", c.spsa.iterations);
  c.spsa.a = field<double>(v, "a", c.spsa.a);
  c.spsa.c = field<double>(v, "c", c.spsa.c);
  c.spsa.A = field<double>(v, "A", c.spsa.A);
  c.spsa.alpha = field<double>(v, "alpha", c.spsa.alpha);
  c.spsa.gamma = field<double>(v, "gamma", c.spsa.gamma);
  if (v.contains("shots")) {
    const Json& s = v.at("shots");
    c.shots = s.is_string() ? parse_shots(s.get<std::string>()) : parse_shots(std::to_string(count_field(v, "shots", 0)));
  }
  if (v.contains("reward")) c.reward = parse_reward(field<std::string>(v, "reward", "global"));
  if (!opt.shots.empty()) c.shots = parse_shots(opt.shots);
  if (!opt.reward.empty()) c.reward = parse_reward(opt.reward);
  c.seed = seed;
  return c;
}

OracleConfig oracle_config(const Json& cfg, std::uint64_t seed) {
  const Json& o = section(cfg, "oracle");
  OracleConfig c;
  c.restarts = count_field(o, "restarts", c.restarts);
  c.inner_tol = field<double>(o, "inner_tol", c.inner_tol);
  c.max_inner_iter = count_field(o, "max_inner_iter", c.max_inner_iter);
  c.decomposition_dim = count_field(o, "decomposition_dim", c.decomposition_dim);
  c.seed = seed;
  c.validate();
  return c;
}

SdpOptions sdp_options(const Json& cfg) {
  const Json& b = section(cfg, "benchmark");
  SdpOptions s;
  s.gap_tol = field<double>(b, "gap_tol", s.gap_tol);
  s.feas_tol = field<double>(b, "feas_tol", s.feas_tol);
  s.max_iter = count_field(b, "max_iter", s.max_iter);
  return s;
}

std::size_t extension_level(const Options& opt, const Json& cfg) {
  if (opt.k) return *opt.k;
  return count_field(section(cfg, "benchmark"), "k", 2);
}

Json partitions_json(const std::vector<Labels>& parts) {
  Json j = Json::array();
  for (const auto& p : parts) j.push_back(p);
  return j;
}

Json residuals_json(const SdpResiduals& r) { return {{"primal", r.primal}, {"dual", r.dual}, {"gap", r.gap}}; }

Json bracket_json(const FsBracket& b) {
  return {{"lower", b.lower}, {"upper", b.upper}, {"vacuous", b.vacuous}, {"benchmark_upper", b.benchmark_upper}};
}

fs::path output_dir(const Options& opt) {
  const fs::path dir(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + opt.out + ": " + ec.message());
  return dir;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

int cmd_estimate(const Options& opt, std::ostream& out) {
  const Json cfg = load_config(opt.config);
  const std::uint64_t seed = seed_of(opt, cfg);
  const ResolvedState st = resolve_state(opt, cfg);
  const VqsaConfig vc = vqsa_config(opt, cfg, seed);
  const fs::path dir = output_dir(opt);

  const VqsaTrace trace = run_vqsa(st.rho, st.partitions, vc);

  std::ofstream csv(dir / "trace.csv");
  if (!csv) throw ConfigError("cannot write " + (dir / "trace.csv").string());
  csv << "iteration,reward,best_reward\n" << std::setprecision(12);
  for (const auto& r : trace.records) csv << r.iteration << ',' << r.reward << ',' << r.best_reward << '\n';

  Json config = {
      {"state", st.name},
      {"partitions", partitions_json(st.partitions)},
      {"layers_w", vc.layers_w},
      {"layers_u", vc.layers_u},
      {"ref_dim", vc.ref_dim},
      {"shots", vc.shots ? Json(*vc.shots) : Json("exact")},
      {"reward", vc.reward == RewardKind::global ? "global" : "local"},
      {"restarts", vc.restarts},
      {"init_spread", vc.init_spread},
      {"spsa",
       {{"iterations", vc.spsa.iterations},
        {"a", vc.spsa.a},
        {"c", vc.spsa.c},
        {"A", vc.spsa.A},
        {"alpha", vc.spsa.alpha},
        {"gamma", vc.spsa.gamma}}},
  };
  write_json(dir / "summary.json",
             {{"final", trace.final_reward}, {"best", trace.best_reward}, {"config", config}, {"seed", seed}});
  out << "final " << trace.final_reward << "\nbest " << trace.best_reward << '\n';
  return kOk;
}

int cmd_benchmark(const Options& opt, std::ostream& out, std::ostream& err) {
  const Json cfg = load_config(opt.config);
  const ResolvedState st = resolve_state(opt, cfg);
  const BipartiteSplit split = bipartite(st.partitions);
  const std::size_t k = extension_level(opt, cfg);
  const int which = opt.benchmark ? *opt.benchmark : static_cast<int>(count_field(section(cfg, "benchmark"), "which", 1));
  if (which != 1 && which != 2) throw ConfigError("--benchmark must be 1 or 2");
  const SdpOptions so = sdp_options(cfg);
  const fs::path dir = output_dir(opt);

  const BenchmarkResult r = which == 1 ? benchmark1(st.rho, split, k, so) : benchmark2(st.rho, split, k, so);
  Json j = {{"value", r.value},
            {"k", k},
            {"benchmark", which},
            {"solver_status", to_string(r.status)},
            {"residuals", residuals_json(r.residuals)},
            {"iterations", r.iterations}};
  if (which == 1) {
    j["bounds"] = bracket_json(bound_gap1(st.rho.layout().dim_of(split.b), k, r.value));
  } else {
    j["bounds"] = nullptr;
  }
  write_json(dir / "benchmark.json", j);
  out << "benchmark" << which << " k=" << k << " value " << r.value << " (" << to_string(r.status) << ")\n";
  if (r.status != SdpStatus::optimal) {
    err << "solver did not converge: status " << to_string(r.status) << ", residuals primal " << r.residuals.primal
        << " dual " << r.residuals.dual << " gap " << r.residuals.gap << '\n';
    return kSolverError;
  }
  return kOk;
}

int cmd_oracle(const Options& opt, std::ostream& out) {
  const Json cfg = load_config(opt.config);
  const std::uint64_t seed = seed_of(opt, cfg);
  const ResolvedState st = resolve_state(opt, cfg);
  const OracleConfig oc = oracle_config(cfg, seed);
  const fs::path dir = output_dir(opt);

  const OracleReport rep = fs_bruteforce_report(st.rho, st.partitions, oc);
  write_json(dir / "oracle.json", {{"value", rep.value},
                                   {"rank", rep.rank},
                                   {"branches", rep.branch_probs.size()},
                                   {"restart_values", rep.restart_values},
                                   {"state", st.name},
                                   {"partitions", partitions_json(st.partitions)},
                                   {"seed", seed}});
  out << "oracle " << rep.value << '\n';
  return kOk;
}

int cmd_compare(const Options& opt, std::ostream& out, std::ostream& err) {
  const Json cfg = load_config(opt.config);
  const std::uint64_t seed = seed_of(opt, cfg);
  const ResolvedState st = resolve_state(opt, cfg);
  const BipartiteSplit split = bipartite(st.partitions);
  const std::size_t k = extension_level(opt, cfg);
  const OracleConfig oc = oracle_config(cfg, seed);
  const SdpOptions so = sdp_options(cfg);
  const bool with_vqsa = opt.with_vqsa || field<bool>(section(cfg, "compare"), "vqsa", false);
  const fs::path dir = output_dir(opt);

  const double oracle = fs_bruteforce(st.rho, st.partitions, oc);
  const BenchmarkResult b1 = benchmark1(st.rho, split, k, so);
  const BenchmarkResult b2 = benchmark2(st.rho, split, k, so);

  Json rows = Json::array();
  rows.push_back({{"pipeline", "oracle"}, {"value", oracle}});
  rows.push_back({{"pipeline", "benchmark1"}, {"value", b1.value}, {"solver_status", to_string(b1.status)}});
  rows.push_back({{"pipeline", "benchmark2"}, {"value", b2.value}, {"solver_status", to_string(b2.status)}});
  if (with_vqsa) {
    const VqsaTrace t = run_vqsa(st.rho, st.partitions, vqsa_config(opt, cfg, seed));
    rows.push_back({{"pipeline", "vqsa"}, {"value", t.best_reward}});
  }
  const bool solved = b1.status == SdpStatus::optimal && b2.status == SdpStatus::optimal;
  const bool ordered = oracle <= b1.value + kOrderingTolerance && oracle <= b2.value + kOrderingTolerance;
  write_json(dir / "compare.json", {{"state", st.name},
                                    {"k", k},
                                    {"seed", seed},
                                    {"rows", rows},
                                    {"ordering_tolerance", kOrderingTolerance},
                                    {"ordering_ok", ordered},
                                    {"solvers_ok", solved}});

  out << std::left << std::setw(12) << "pipeline" << "value\n";
  for (const auto& r : rows) out << std::setw(12) << r["pipeline"].get<std::string>() << r["value"].get<double>() << '\n';
  if (!solved) {
    err << "benchmark solver did not converge\n";
    return kSolverError;
  }
  if (!ordered) throw ConsistencyError("oracle value exceeds a benchmark by more than the tolerance");
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fidelity-of-separability estimation: variational steering, SDP benchmarks and oracles"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&opt](CLI::App* sub) {
    sub->add_option("--state", opt.state, "State JSON file or named state");
    sub->add_option("--config", opt.config, "JSON configuration file");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_option("--partitions", opt.partitions, "Party grouping, e.g. \"A1,A2|B1,B2\"");
  };
  const auto extension = [&opt](CLI::App* sub) { sub->add_option("--k", opt.k, "Extension level"); };
  const auto steering = [&opt](CLI::App* sub) {
    sub->add_option("--shots", opt.shots, "Shots per evaluation or 'exact'");
    sub->add_option("--reward", opt.reward, "global or local");
  };

  CLI::App* estimate = app.add_subcommand("estimate", "Run the variational steering algorithm");
  common(estimate);
  steering(estimate);
  CLI::App* benchmark = app.add_subcommand("benchmark", "Evaluate an SDP benchmark");
  common(benchmark);
  extension(benchmark);
  benchmark->add_option("--benchmark", opt.benchmark, "1 (PPT k-extendible states) or 2 (k-extendible channels)");
  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force fidelity of separability");
  common(oracle);
  CLI::App* compare = app.add_subcommand("compare", "Cross-check oracle and benchmarks");
  common(compare);
  extension(compare);
  steering(compare);
  compare->add_flag("--with-vqsa", opt.with_vqsa, "Also run the variational algorithm");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (estimate->parsed()) return cmd_estimate(opt, out);
    if (benchmark->parsed()) return cmd_benchmark(opt, out, err);
    if (oracle->parsed()) return cmd_oracle(opt, out);
    return cmd_compare(opt, out, err);
  } catch (const ConsistencyError& e) {
    err << "consistency error: " << e.what() << '\n';
    return kConsistencyError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << '\n';
    return kUnexpected;
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace steerfid::cli
