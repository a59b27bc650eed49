#include "stoprule/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stoprule/checks.hpp"
#include "stoprule/errors.hpp"
#include "stoprule/instance_io.hpp"
#include "stoprule/odds.hpp"
#include "stoprule/oracle.hpp"
#include "stoprule/policy.hpp"
#include "stoprule/reduction.hpp"
#include "stoprule/simulate.hpp"

namespace stoprule::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kMonotoneTolerance = 1e-8;
constexpr unsigned kSimChunks = 64;
// Exact rational DP is used for `oracle` when the instance is at most this large.
constexpr std::size_t kExactOracleMaxN = 6;
constexpr std::size_t kExactOracleMaxSupport = 4;

/// Raised by a subcommand that produced a report but flagged it.
struct Flagged {
  int code;
};

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

void round_floats(Json& j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) round_floats(child);
  }
}

std::string format_csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void emit(std::ostream& out, Json report) {
  round_floats(report);
  out << report.dump() << '\n';
}

Json error_object(const std::string& type, const std::string& message, int code) {
  return Json{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
}

struct Settings {
  EngineConfig engine;
  SimConfig sim;
  std::string format = "json";
};

/// Applies a `--config` JSON file over the built-in defaults.
void apply_config_file(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    auto need_number = [&] {
      if (!value.is_number()) throw ValidationError("config key '" + key + "' must be a number");
    };
    auto need_count = [&] {
      if (!value.is_number_unsigned()) throw ValidationError("config key '" + key + "' must be a nonnegative integer");
    };
    if (key == "grid_points") {
      need_count();
      if (value.get<std::uint64_t>() > (1u << 24)) throw ValidationError("grid_points is unreasonably large");
      s.engine.grid_points = value.get<int>();
    } else if (key == "tail_epsilon") {
      need_number();
      s.engine.tail_epsilon = value.get<double>();
    } else if (key == "threshold_tolerance") {
      need_number();
      s.engine.threshold_tolerance = value.get<double>();
    } else if (key == "tie_tolerance") {
      need_number();
      s.engine.tie_tolerance = value.get<double>();
    } else if (key == "value_tolerance") {
      need_number();
      s.engine.value_tolerance = value.get<double>();
    } else if (key == "trials") {
      need_count();
      s.sim.trials = value.get<std::uint64_t>();
    } else if (key == "seed") {
      need_count();
      s.sim.seed = value.get<std::uint64_t>();
    } else if (key == "format") {
      if (!value.is_string()) throw ValidationError("config key 'format' must be a string");
      s.format = value.get<std::string>();
    } else {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }
}

unsigned threads_from_env() {
  const char* raw = std::getenv("STOPRULE_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 0 || v > 4096) throw ValidationError("STOPRULE_THREADS must be an integer in [0, 4096]");
  return static_cast<unsigned>(v);
}

/// Accepts integers, decimals ("0.25" is read as 25/100) and fractions ("1/11").
Rational parse_rational(const std::string& token) {
  try {
    const auto slash = token.find('/');
    if (slash != std::string::npos) {
      return Rational(boost::multiprecision::cpp_int(token.substr(0, slash)),
                      boost::multiprecision::cpp_int(token.substr(slash + 1)));
    }
    const auto dot = token.find('.');
    if (dot == std::string::npos) return Rational(boost::multiprecision::cpp_int(token));
    std::string digits = token.substr(0, dot) + token.substr(dot + 1);
    if (digits.empty() || digits == "-" || digits == "+") throw std::runtime_error("empty");
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t i = dot + 1; i < token.size(); ++i) den *= 10;
    return Rational(boost::multiprecision::cpp_int(digits), den);
  } catch (const std::exception&) {
    throw ValidationError("cannot read '" + token + "' as an exact probability");
  }
}

double parse_double(const std::string& token) {
  if (token.find('/') != std::string::npos) return to_double(parse_rational(token));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty()) throw ValidationError("cannot read '" + token + "' as a number");
  return v;
}

std::vector<std::string> probabilities_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open odds file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("odds file '" + path + "' is not valid JSON: " + e.what());
  }
  const auto it = doc.is_object() ? doc.find("p") : doc.end();
  if (it == doc.end() || !it->is_array()) throw ValidationError("odds file needs a 'p' array");
  std::vector<std::string> tokens;
  for (const auto& item : *it) {
    if (item.is_string()) tokens.push_back(item.get<std::string>());
    else if (item.is_number()) tokens.push_back(item.dump());
    else throw ValidationError("odds file entries must be numbers or fraction strings");
  }
  return tokens;
}

template <class Scalar>
Json odds_report(const BasicOddsVector<Scalar>& odds) {
  const auto sol = solve_odds(odds);
  const auto bounds = verify_odds_bounds(odds);
  Json r{{"s", sol.s},
         {"v", to_double(sol.v)},
         {"sum_odds", to_double(sol.sum_odds)},
         {"bound_b", to_double(bounds.bound)},
         {"bound_holds", bounds.bound_holds},
         {"applicable", bounds.applicable},
         {"attained", bounds.attained},
         {"m", odds.size()}};
  if constexpr (std::is_same_v<Scalar, Rational>) {
    r["v_exact"] = sol.v.str();
    r["exact"] = true;
  } else {
    r["exact"] = false;
  }
  return r;
}

Json thresholds_json(const ThresholdPolicy& p) {
  Json arr = Json::array();
  for (double x : p.thresholds) arr.push_back(x);
  return arr;
}

Json anomalies(const ThresholdPolicy& p) {
  Json list = Json::array();
  for (std::size_t k = 0; k < p.saturated.size(); ++k) {
    if (p.saturated[k]) list.push_back("threshold " + std::to_string(k + 1) + " saturated at the grid end");
  }
  if (p.monotonicity_violation() > kMonotoneTolerance)
    list.push_back("thresholds increase by " + format_csv_number(p.monotonicity_violation()));
  return list;
}

void require_format(const std::string& format, bool csv_allowed) {
  if (format == "json") return;
  if (format == "csv" && csv_allowed) return;
  throw ValidationError(csv_allowed ? "--format must be json or csv" : "this subcommand only emits json");
}

std::vector<double> parse_list(const std::vector<std::string>& tokens) {
  std::vector<double> out;
  for (const auto& t : tokens) out.push_back(parse_double(t));
  return out;
}

class Cli {
 public:
  Cli(std::ostream& out) : out_(out) {
    app_.name("stoprule");
    app_.description("Best-choice stopping rules for independent observations");
    app_.require_subcommand(1);
    app_.set_help_all_flag("--help-all", "Expand all help");

    add_solve_odds();
    add_bounds();
    add_engine_command("value", "Optimal win probability and thresholds of an atomless instance", [this] { value(); });
    add_engine_command("thresholds", "Optimal thresholds x_1* >= ... >= x_{n-1}*", [this] { thresholds(); }, true);
    add_engine_command("reduce", "Two-point reduction of an instance and its verification", [this] { reduce(); });
    add_oracle();
    add_simulate();
    add_extremal();
    add_check();
  }

  CLI::App& app() { return app_; }

  int execute() {
    settings_ = Settings{};
    if (!config_path_.empty()) apply_config_file(config_path_, settings_);
    if (grid_) settings_.engine.grid_points = *grid_;
    if (trials_) settings_.sim.trials = *trials_;
    if (seed_) settings_.sim.seed = *seed_;
    if (format_) settings_.format = *format_;
    settings_.sim.max_threads = threads_from_env();
    settings_.sim.parallel_chunks = kSimChunks;
    settings_.engine.validate();
    settings_.sim.validate();
    try {
      action_();
    } catch (const Flagged& f) {
      return f.code;
    }
    return kOk;
  }

 private:
  void common(CLI::App* sub, bool csv) {
    sub->add_option("--config", config_path_, "JSON file of defaults (flags take precedence)");
    sub->add_option("--format", format_, csv ? "json or csv" : "json")->check(CLI::IsMember({"json", "csv"}));
  }

  void engine_flags(CLI::App* sub) {
    sub->add_option("--instance", instance_path_, "Instance JSON file")->required();
    sub->add_option("--grid", grid_, "Quadrature grid points (>= 16)");
  }

  ProblemInstance instance() const { return load_instance(instance_path_); }

  void add_solve_odds() {
    auto* sub = app_.add_subcommand("solve-odds", "Stop on the last success among independent indicators");
    auto* p = sub->add_option("--p", p_tokens_, "Comma-separated success probabilities")->delimiter(',');
    auto* f = sub->add_option("--file", odds_file_, "JSON file {\"p\": [...]}");
    p->excludes(f);
    sub->add_flag("--exact", exact_, "Rational arithmetic (accepts fractions like 1/11)");
    common(sub, false);
    sub->callback([this] { action_ = [this] { solve_odds_cmd(); }; });
  }

  void solve_odds_cmd() {
    require_format(settings_.format, false);
    auto tokens = odds_file_.empty() ? p_tokens_ : probabilities_from_file(odds_file_);
    if (tokens.empty()) throw ValidationError("give probabilities with --p or --file");
    if (exact_) {
      std::vector<Rational> p;
      for (const auto& t : tokens) p.push_back(parse_rational(t));
      emit(out_, odds_report(ExactOddsVector(std::move(p))));
    } else {
      emit(out_, odds_report(OddsVector(parse_list(tokens))));
    }
  }

  void add_bounds() {
    auto* sub = app_.add_subcommand("bounds", "Table of b_n = (1 - 1/n)^(n-1)");
    sub->add_option("--n-max", n_max_, "Largest n")->default_val(20);
    common(sub, true);
    sub->callback([this] { action_ = [this] { bounds(); }; });
  }

  void bounds() {
    require_format(settings_.format, true);
    if (n_max_ < 1) throw ValidationError("--n-max must be >= 1");
    if (settings_.format == "csv") {
      out_ << "n,b_n\n";
      for (long long n = 1; n <= n_max_; ++n) out_ << n << ',' << format_csv_number(bound_b(n)) << '\n';
      return;
    }
    Json rows = Json::array();
    for (long long n = 1; n <= n_max_; ++n) rows.push_back({{"n", n}, {"b_n", bound_b(n)}});
    emit(out_, Json{{"bounds", rows}});
  }

  void add_engine_command(const std::string& name, const std::string& help, std::function<void()> fn,
                          bool csv = false) {
    auto* sub = app_.add_subcommand(name, help);
    engine_flags(sub);
    common(sub, csv);
    sub->callback([this, fn] { action_ = fn; });
  }

  void value() {
    require_format(settings_.format, false);
    const auto inst = instance();
    const auto sol = solve_policy(inst, settings_.engine);
    const auto flags = anomalies(sol.policy);
    emit(out_, Json{{"n", inst.size()},
                    {"value", sol.value},
                    {"bound_b", bound_b(static_cast<long long>(inst.size()))},
                    {"thresholds", thresholds_json(sol.policy)},
                    {"anomalies", flags}});
    if (!flags.empty()) throw Flagged{kNumericalAnomaly};
  }

  void thresholds() {
    require_format(settings_.format, true);
    const auto sol = solve_policy(instance(), settings_.engine);
    const auto flags = anomalies(sol.policy);
    if (settings_.format == "csv") {
      out_ << "k,x_star\n";
      for (std::size_t k = 0; k < sol.policy.thresholds.size(); ++k)
        out_ << k + 1 << ',' << format_csv_number(sol.policy.thresholds[k]) << '\n';
    } else {
      Json rows = Json::array();
      for (std::size_t k = 0; k < sol.policy.thresholds.size(); ++k)
        rows.push_back({{"k", k + 1},
                        {"x_star", sol.policy.thresholds[k]},
                        {"ambiguity_width", sol.policy.ambiguity_width[k]},
                        {"saturated", static_cast<bool>(sol.policy.saturated[k])}});
      emit(out_, Json{{"thresholds", rows}, {"anomalies", flags}});
    }
    if (!flags.empty()) throw Flagged{kNumericalAnomaly};
  }

  void reduce() {
    require_format(settings_.format, false);
    const auto r = verify_reduction(instance(), settings_.engine);
    Json vs{{"a", r.v_sequence.a}, {"b", r.v_sequence.b}, {"p_high", r.v_sequence.p_high}};
    Json report{{"x1_star", r.x1_star},
                {"ambiguity_width", r.ambiguity_width},
                {"c", r.c},
                {"v_sequence", vs},
                {"value_original", r.value_original},
                {"value_reduced", r.value_reduced},
                {"inequality_holds", r.inequality_holds},
                {"oracle_value", r.oracle_value ? Json(*r.oracle_value) : Json(nullptr)},
                {"oracle_agrees", r.oracle_agrees}};
    emit(out_, report);
    if (!r.inequality_holds || !r.oracle_agrees) throw Flagged{kNumericalAnomaly};
  }

  void add_oracle() {
    auto* sub = app_.add_subcommand("oracle", "Exact DP optimum of a finite-support instance");
    sub->add_option("--instance", instance_path_, "Instance JSON file")->required();
    sub->add_option("--capacity", capacity_, "Limit on (total support) * n")->default_val(1'000'000);
    common(sub, false);
    sub->callback([this] { action_ = [this] { oracle(); }; });
  }

  void oracle() {
    require_format(settings_.format, false);
    const auto discrete = to_discrete(instance());
    OracleOptions opt;
    opt.capacity = capacity_;
    bool small = discrete.size() <= kExactOracleMaxN;
    for (const auto& var : discrete.variables()) small = small && var.size() <= kExactOracleMaxSupport;
    Json report{{"n", discrete.size()}};
    if (small) {
      const auto res = oracle_optimal_value(to_exact(discrete), opt);
      report["value"] = to_double(res.value);
      report["value_exact"] = res.value.str();
      report["exact"] = true;
    } else {
      const auto res = oracle_optimal_value(discrete, opt);
      report["value"] = res.value;
      report["exact"] = false;
    }
    emit(out_, report);
  }

  void add_simulate() {
    auto* sub = app_.add_subcommand("simulate", "Monte Carlo win probability of a threshold rule");
    sub->add_option("--instance", instance_path_, "Instance JSON file")->required();
    sub->add_option("--trials", trials_, "Number of trials");
    sub->add_option("--seed", seed_, "Base seed");
    sub->add_option("--grid", grid_, "Quadrature grid points for the engine policy");
    sub->add_option("--thresholds", given_thresholds_, "Comma-separated x_1*..x_{n-1}* instead of the engine policy")
        ->delimiter(',');
    common(sub, false);
    sub->callback([this] { action_ = [this] { simulate(); }; });
  }

  void simulate() {
    require_format(settings_.format, false);
    const auto inst = instance();
    ThresholdPolicy policy;
    std::optional<double> engine_value;
    if (!given_thresholds_.empty()) {
      policy.thresholds = parse_list(given_thresholds_);
      policy.saturated.assign(policy.thresholds.size(), false);
      policy.ambiguity_width.assign(policy.thresholds.size(), 0.0);
    } else {
      auto sol = solve_policy(inst, settings_.engine);
      policy = std::move(sol.policy);
      engine_value = sol.value;
    }
    const auto r = simulate_win_probability(inst, policy, settings_.sim);
    emit(out_, Json{{"estimate", r.estimate},
                    {"standard_error", r.standard_error},
                    {"ci95", {r.ci95_lo, r.ci95_hi}},
                    {"trials", r.trials},
                    {"seed", r.seed},
                    {"wins", r.wins},
                    {"policy", engine_value ? "engine" : "given"},
                    {"engine_value", engine_value ? Json(*engine_value) : Json(nullptr)}});
  }

  void add_extremal() {
    auto* sub = app_.add_subcommand("extremal", "Instance on which the bound b_n is attained");
    sub->add_option("--n", extremal_n_, "Number of observations")->required();
    common(sub, false);
    sub->callback([this] { action_ = [this] { emit(out_, Json(to_json(make_extremal_instance(extremal_n_)))); }; });
  }

  void add_check() {
    auto* sub = app_.add_subcommand("check", "Run the property suite; exits 1 on any violation");
    sub->add_option("--seed", seed_, "Seed for the random cases");
    sub->add_option("--instances", check_instances_, "Random continuous instances")->default_val(100);
    sub->add_option("--grid", grid_, "Quadrature grid points");
    common(sub, false);
    sub->callback([this] { action_ = [this] { check(); }; });
  }

  void check() {
    require_format(settings_.format, false);
    CheckOptions opt;
    opt.engine = settings_.engine;
    if (seed_) opt.seed = *seed_;
    opt.continuous_instances = check_instances_;
    const auto results = run_property_checks(opt);
    bool all = true;
    Json list = Json::array();
    for (const auto& r : results) {
      all = all && r.passed;
      list.push_back({{"name", r.name},
                      {"passed", r.passed},
                      {"cases", r.cases},
                      {"failures", r.failures},
                      {"detail", r.detail}});
    }
    emit(out_, Json{{"passed", all}, {"checks", list}});
    if (!all) throw Flagged{kPropertyViolation};
  }

  std::ostream& out_;
  CLI::App app_;
  std::function<void()> action_;
  Settings settings_;

  std::string config_path_;
  std::optional<std::string> format_;
  std::string instance_path_;
  std::optional<int> grid_;
  std::optional<std::uint64_t> trials_;
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> p_tokens_;
  std::string odds_file_;
  bool exact_ = false;
  long long n_max_ = 20;
  std::size_t capacity_ = 1'000'000;
  std::vector<std::string> given_thresholds_;
  int extremal_n_ = 0;
  std::size_t check_instances_ = 100;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&](const std::string& type, const std::string& message, int code) {
    err << error_object(type, message, code).dump() << '\n';
    return code;
  };
  try {
    Cli cli(out);
    if (!args.empty() && !args.front().starts_with('-')) {
      bool known = false;
      for (const auto* sub : cli.app().get_subcommands({})) known = known || sub->get_name() == args.front();
      if (!known) return fail("usage", "unknown subcommand '" + args.front() + "'", kUsage);
    }
    std::vector<const char*> argv{"stoprule"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      cli.app().parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << cli.app().help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << cli.app().help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      return fail("usage", e.what(), kUsage);
    }
    return cli.execute();
  } catch (const CapacityError& e) {
    return fail("capacity", e.what(), kCapacity);
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), kUsage);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), kUsage);
  } catch (const ContinuityError& e) {
    return fail("continuity", e.what(), kUsage);
  } catch (const DegenerateSupportError& e) {
    return fail("degenerate_support", e.what(), kUsage);
  } catch (const nlohmann::json::exception& e) {
    return fail("validation", e.what(), kUsage);
  }
}

}  // namespace stoprule::cli
