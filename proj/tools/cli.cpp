// Copyright 2026 The fdpaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdp/auditing.hpp"
#include "fdp/curve.hpp"
#include "fdp/errors.hpp"
#include "fdp/guarantees.hpp"
#include "fdp/mechanisms.hpp"
#include "fdp/threading.hpp"
#include "fdp/version.hpp"

namespace fdp::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameterError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content,
                std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidParameterError("cannot write file: " + path);
  f << content;
}

// Values from --config file.json fill in options the command line left at
// their defaults (flag precedence).
void merge_config(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  const auto j = nlohmann::json::parse(read_file(config_path));
  if (!j.is_object()) {
    throw InvalidParameterError("--config must contain a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw InvalidParameterError("--config: unknown option: " + key);
    }
    if (opt->count() > 0) continue;  // command line wins
    std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

std::string config_comment(const nlohmann::json& config) {
  return std::string("# ") + kVersion + " schema=" +
         std::to_string(kSchemaVersion) + "\n# config: " + config.dump() +
         "\n";
}

struct GuaranteeArgs {
  std::string mode;
  GuaranteeRequest request;
};

GuaranteeResult dispatch_guarantee(const GuaranteeArgs& a) {
  const GuaranteeRequest& r = a.request;
  if (a.mode == "sgm") {
    GuaranteeResult res;
    res.curve = sgm_baseline(r.q, r.sigma);
    res.estimator = "closed-form";
    return res;
  }
  if (a.mode == "easgm-upper") return easgm_upper(r.dataset_size, r.dim, r);
  if (a.mode == "asgm-upper") return asgm_upper(r.dataset_size, r.q, r.dim, r);
  if (a.mode == "feasgm-upper") return feasgm_upper(r);
  if (a.mode == "easgm-per-pair" || a.mode == "asgm-per-pair" ||
      a.mode == "feasgm-per-pair") {
    GuaranteeRequest rr = r;
    rr.mode = mode_from_name(a.mode.substr(0, a.mode.find('-')));
    return per_pair_guarantee(rr);
  }
  if (a.mode == "easgm-multi-round" || a.mode == "feasgm-multi-round") {
    GuaranteeRequest rr = r;
    rr.mode = mode_from_name(a.mode.substr(0, a.mode.find('-')));
    return multi_round_upper(rr);
  }
  throw InvalidParameterError("unknown guarantee mode: " + a.mode);
}

nlohmann::json request_json(const std::string& mode,
                            const GuaranteeRequest& r) {
  return {{"command", "guarantee"}, {"mode", mode},     {"N", r.dataset_size},
          {"q", r.q},               {"sigma", r.sigma}, {"n", r.dim},
          {"rounds", r.rounds},     {"grid", r.grid_size},
          {"mc_samples", r.mc_samples},                 {"seed", r.seed}};
}

// A compare series is "[label=]spec" where spec is either "file:<path>" or
// "<mode>:key=value,..." with the guarantee modes above.
struct Series {
  std::string label;
  TradeoffCurve curve;
};

Series parse_series(const std::string& text, const GuaranteeRequest& base) {
  std::string label = text;
  std::string spec = text;
  const auto eq = text.find('=');
  const auto colon = text.find(':');
  if (eq != std::string::npos && (colon == std::string::npos || eq < colon)) {
    label = text.substr(0, eq);
    spec = text.substr(eq + 1);
  }
  Series s;
  s.label = label;
  const auto c = spec.find(':');
  const std::string mode = spec.substr(0, c);
  if (mode == "file") {
    if (c == std::string::npos) {
      throw InvalidParameterError("series file spec needs a path");
    }
    s.curve = TradeoffCurve::from_json(read_file(spec.substr(c + 1)));
    return s;
  }
  GuaranteeArgs a;
  a.mode = mode;
  a.request = base;
  if (c != std::string::npos) {
    std::stringstream ss(spec.substr(c + 1));
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      const auto e = kv.find('=');
      if (e == std::string::npos) {
        throw InvalidParameterError("series parameter needs key=value: " + kv);
      }
      const std::string key = kv.substr(0, e);
      const double value = std::stod(kv.substr(e + 1));
      if (key == "N") a.request.dataset_size = static_cast<uint64_t>(value);
      else if (key == "q") a.request.q = value;
      else if (key == "sigma") a.request.sigma = value;
      else if (key == "n") a.request.dim = static_cast<uint64_t>(value);
      else if (key == "T") a.request.rounds = static_cast<uint64_t>(value);
      else throw InvalidParameterError("unknown series parameter: " + key);
    }
  }
  s.curve = dispatch_guarantee(a).curve;
  return s;
}

int cmd_guarantee(const GuaranteeArgs& args, const std::string& format,
                  const std::string& out_path, std::ostream& out) {
  const GuaranteeResult res = dispatch_guarantee(args);
  std::string content;
  if (format == "json") {
    GuaranteeRequest r = args.request;
    auto j = nlohmann::json::parse(res.to_json(r));
    j["request"]["mode"] = args.mode;
    content = j.dump() + "\n";
  } else {
    content = config_comment(request_json(args.mode, args.request)) +
              res.curve.to_csv(args.request.grid_size);
  }
  write_file(out_path, content, out);
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& series_specs,
                const GuaranteeRequest& base, const std::string& format,
                const std::string& out_path, std::ostream& out) {
  if (series_specs.size() < 2) {
    throw InvalidParameterError("compare needs at least two --curve series");
  }
  std::vector<Series> series;
  for (const auto& text : series_specs) series.push_back(parse_series(text, base));

  const int grid = base.grid_size;
  std::vector<std::vector<double>> values(series.size());
  std::vector<double> alphas(grid);
  for (int i = 0; i < grid; ++i) alphas[i] = static_cast<double>(i) / (grid - 1);
  for (size_t s = 0; s < series.size(); ++s) {
    values[s].reserve(grid);
    for (double a : alphas) values[s].push_back(series[s].curve(a));
  }

  // Alpha intervals where series i sits strictly below series j.
  nlohmann::json crossings = nlohmann::json::array();
  for (size_t i = 0; i < series.size(); ++i) {
    for (size_t j = 0; j < series.size(); ++j) {
      if (i == j) continue;
      nlohmann::json intervals = nlohmann::json::array();
      int run_start = -1;
      for (int g = 0; g < grid; ++g) {
        const bool below = values[i][g] < values[j][g];
        if (below && run_start < 0) run_start = g;
        if ((!below || g == grid - 1) && run_start >= 0) {
          const int run_end = below ? g : g - 1;
          intervals.push_back({alphas[run_start], alphas[run_end]});
          run_start = -1;
        }
      }
      if (!intervals.empty()) {
        crossings.push_back({{"below", series[i].label},
                             {"above", series[j].label},
                             {"alpha_intervals", intervals}});
      }
    }
  }

  nlohmann::json config = {{"command", "compare"},
                           {"grid", grid},
                           {"mc_samples", base.mc_samples},
                           {"seed", base.seed},
                           {"series", series_specs}};
  std::string content;
  if (format == "json") {
    nlohmann::json table = nlohmann::json::array();
    for (size_t s = 0; s < series.size(); ++s) {
      for (int g = 0; g < grid; ++g) {
        table.push_back({alphas[g], values[s][g], series[s].label});
      }
    }
    const nlohmann::json j = {{"schema_version", kSchemaVersion},
                              {"version", kVersion},
                              {"config", config},
                              {"table", table},
                              {"crossings", crossings}};
    content = j.dump() + "\n";
  } else {
    std::string text = config_comment(config);
    text += "# crossings: " + crossings.dump() + "\n";
    text += "alpha,beta,series\n";
    char buf[128];
    for (size_t s = 0; s < series.size(); ++s) {
      for (int g = 0; g < grid; ++g) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", alphas[g],
                      values[s][g]);
        text += buf;
        text += series[s].label;
        text += "\n";
      }
    }
    content = std::move(text);
  }
  write_file(out_path, content, out);
  return kExitOk;
}

struct AuditArgs {
  AuditConfig config;
  std::string data_path;
  std::string differing_path;
  std::string claim_path;
};

int cmd_audit(const AuditArgs& args, const std::string& format,
              const std::string& out_path, std::ostream& out) {
  GradientDataset data =
      args.data_path.empty()
          ? GradientDataset::canary(args.config.mechanism.dataset_size,
                                    args.config.mechanism.dim,
                                    args.config.mechanism.clip)
          : GradientDataset::from_json(read_file(args.data_path));
  std::vector<double> differing;
  if (args.differing_path.empty()) {
    differing = GradientDataset::canary_record(args.config.mechanism.dim,
                                               args.config.mechanism.clip);
  } else {
    differing = nlohmann::json::parse(read_file(args.differing_path))
                    .get<std::vector<double>>();
  }
  AuditConfig config = args.config;
  config.mechanism.dataset_size = data.vectors.size();
  const TradeoffCurve claimed =
      args.claim_path.empty()
          ? sgm_baseline(config.mechanism.q, config.mechanism.sigma)
          : TradeoffCurve::from_json(read_file(args.claim_path));

  const Distinguisher probe = Distinguisher::build(
      config.mechanism, data, differing, config.test_level);
  (void)probe;  // fail on validation errors before entering the game

  AuditReport report;
  try {
    report = run_audit(config, data, differing, claimed);
  } catch (const InvalidParameterError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("audit infrastructure: ") + e.what());
  }

  std::string content;
  if (format == "json") {
    content = report.to_json() + "\n";
  } else {
    content = AuditReport::csv_header() + "\n" + report.to_csv_row() + "\n";
  }
  write_file(out_path, content, out);
  return kExitOk;
}

struct SimulateArgs {
  MechanismConfig config;
  uint64_t trials = 1;
  uint64_t seed = 0;
  std::string data_path;
};

int cmd_simulate(const SimulateArgs& args, const std::string& out_path,
                 std::ostream& out) {
  const GradientDataset data =
      args.data_path.empty()
          ? GradientDataset::canary(args.config.dataset_size, args.config.dim,
                                    args.config.clip)
          : GradientDataset::from_json(read_file(args.data_path));
  const nlohmann::json header = {
      {"config",
       {{"command", "simulate"},
        {"mode", mode_name(args.config.mode)},
        {"N", data.vectors.size()},
        {"q", args.config.q},
        {"C", args.config.clip},
        {"sigma", args.config.sigma},
        {"n", args.config.dim},
        {"trials", args.trials},
        {"seed", args.seed},
        {"version", kVersion},
        {"schema_version", kSchemaVersion}}}};
  std::string content = header.dump() + "\n";
  for (uint64_t trial = 0; trial < args.trials; ++trial) {
    const MechanismOutput o =
        run_mechanism(args.config, data, mix_seed(args.seed, trial));
    content += output_jsonl_line(args.seed, trial, o) + "\n";
  }
  write_file(out_path, content, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{std::string(kVersion) +
               " - f-DP accounting and auditing for normalized DP-SGD"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string out_path;
  std::string config_path;
  const int env_threads = default_threads();

  // guarantee
  GuaranteeArgs g;
  g.request.threads = env_threads;
  auto* guarantee = app.add_subcommand(
      "guarantee", "Compute a guarantee curve (baseline, upper bound, "
                   "per-pair envelope, or multi-round bound)");
  guarantee->add_option("--mode", g.mode,
                        "sgm | easgm-upper | asgm-upper | feasgm-upper | "
                        "{easgm,asgm,feasgm}-per-pair | "
                        "{easgm,feasgm}-multi-round")
      ->required();
  guarantee->add_option("--N", g.request.dataset_size, "dataset size N");
  guarantee->add_option("--q", g.request.q, "sampling ratio");
  guarantee->add_option("--sigma", g.request.sigma, "noise multiplier");
  guarantee->add_option("--n", g.request.dim, "output dimension");
  guarantee->add_option("--T", g.request.rounds, "rounds");
  guarantee->add_option("--grid", g.request.grid_size, "alpha grid size");
  guarantee->add_option("--samples", g.request.mc_samples, "MC samples");
  guarantee->add_option("--seed", g.request.seed, "RNG seed");
  guarantee->add_option("--threads", g.request.threads, "MC threads");
  guarantee->add_option("--format", format, "json | csv");
  guarantee->add_option("--out", out_path, "output path (default stdout)");
  guarantee->add_option("--config", config_path, "JSON defaults file");

  // audit
  AuditArgs a;
  a.config.threads = env_threads;
  auto* audit = app.add_subcommand(
      "audit", "Run the tight-auditing game against a claimed curve");
  audit->add_option("--mode",
                    [&a](const std::vector<std::string>& v) {
                      a.config.mechanism.mode = mode_from_name(v[0]);
                      return true;
                    },
                    "sgm | easgm | asgm | feasgm")
      ->required();
  audit->add_option("--N", a.config.mechanism.dataset_size, "dataset size N");
  audit->add_option("--q", a.config.mechanism.q, "sampling ratio");
  audit->add_option("--C", a.config.mechanism.clip, "clipping bound");
  audit->add_option("--sigma", a.config.mechanism.sigma, "noise multiplier");
  audit->add_option("--n", a.config.mechanism.dim, "output dimension");
  audit->add_option("--trials", a.config.trials, "auditing trials (>= 100)");
  audit->add_option("--confidence", a.config.confidence, "CI level");
  audit->add_option("--eps", a.config.fixed_eps, "fixed eps for delta_L");
  audit->add_option("--delta", a.config.fixed_delta, "fixed delta for eps_L");
  audit->add_option("--level", a.config.test_level, "normality-test level");
  audit->add_option("--seed", a.config.seed, "RNG seed");
  audit->add_option("--threads", a.config.threads, "trial threads");
  audit->add_option("--data", a.data_path, "dataset JSON (default: canary)");
  audit->add_option("--differing", a.differing_path,
                    "differing record JSON array (default: canary record)");
  audit->add_option("--claim", a.claim_path,
                    "claimed curve JSON (default: SGM baseline)");
  audit->add_option("--format", format, "json | csv");
  audit->add_option("--out", out_path, "output path (default stdout)");
  audit->add_option("--config", config_path, "JSON defaults file");

  // compare
  std::vector<std::string> series_specs;
  GuaranteeArgs cmp;
  cmp.request.threads = env_threads;
  auto* compare = app.add_subcommand(
      "compare", "Tabulate two or more curves with a crossing summary");
  compare->add_option("--curve", series_specs,
                      "series spec: [label=]mode:key=value,... or file:path")
      ->required();
  compare->add_option("--grid", cmp.request.grid_size, "alpha grid size");
  compare->add_option("--samples", cmp.request.mc_samples, "MC samples");
  compare->add_option("--seed", cmp.request.seed, "RNG seed");
  compare->add_option("--threads", cmp.request.threads, "MC threads");
  compare->add_option("--format", format, "json | csv");
  compare->add_option("--out", out_path, "output path (default stdout)");
  compare->add_option("--config", config_path, "JSON defaults file");

  // simulate
  SimulateArgs s;
  auto* simulate = app.add_subcommand(
      "simulate", "Stream mechanism outputs as JSON lines");
  simulate->add_option("--mode",
                       [&s](const std::vector<std::string>& v) {
                         s.config.mode = mode_from_name(v[0]);
                         return true;
                       },
                       "sgm | easgm | asgm | feasgm")
      ->required();
  simulate->add_option("--N", s.config.dataset_size, "dataset size N");
  simulate->add_option("--q", s.config.q, "sampling ratio");
  simulate->add_option("--C", s.config.clip, "clipping bound");
  simulate->add_option("--sigma", s.config.sigma, "noise multiplier");
  simulate->add_option("--n", s.config.dim, "output dimension");
  simulate->add_option("--trials", s.trials, "number of outputs");
  simulate->add_option("--seed", s.seed, "RNG seed");
  simulate->add_option("--data", s.data_path, "dataset JSON (default: canary)");
  simulate->add_option("--out", out_path, "output path (default stdout)");
  simulate->add_option("--config", config_path, "JSON defaults file");

  // CLI11 consumes arguments from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {  // --help
        out << app.help();
        return kExitOk;
      }
      err << e.what() << "\n";
      return kExitValidation;
    }
    if (guarantee->parsed()) {
      merge_config(guarantee, config_path);
      return cmd_guarantee(g, format, out_path, out);
    }
    if (audit->parsed()) {
      merge_config(audit, config_path);
      return cmd_audit(a, format, out_path, out);
    }
    if (compare->parsed()) {
      merge_config(compare, config_path);
      return cmd_compare(series_specs, cmp.request, format, out_path, out);
    }
    merge_config(simulate, config_path);
    return cmd_simulate(s, out_path, out);
  } catch (const InvalidParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitAuditInfra;
  }
}

}  // namespace fdp::cli
