#include "biaslearn/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "biaslearn/booldim.hpp"
#include "biaslearn/bounds.hpp"
#include "biaslearn/format.hpp"
#include "cli_util.hpp"

namespace biaslearn::cli {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

env::Environment environment_from_config(const Config& cfg) {
  if (cfg.has("environment", "file"))
    return env::env_from_text(read_file(cfg.get_str("environment", "file")));
  const std::string kind = cfg.get_str("environment", "kind");
  if (kind == "shared-feature") {
    return env::make_shared_feature_env(
        static_cast<int>(cfg.get_int("environment", "d")),
        static_cast<int>(cfg.get_int("environment", "l")),
        static_cast<int>(cfg.get_int("environment", "k")),
        cfg.get_double("environment", "head_bound", 1.0),
        cfg.get_double("environment", "noise_std"),
        static_cast<std::uint64_t>(cfg.get_int("environment", "env_seed", 0)),
        cfg.get_double("environment", "feature_scale", 1.0));
  }
  throw ConfigError("unsupported inline environment kind '" + kind +
                    "' (use an env file)");
}

booldim::BooleanFamily family_from_config(const Config& cfg) {
  if (cfg.has("family", "file"))
    return booldim::family_from_text(read_file(cfg.get_str("family", "file")));
  if (cfg.has("family", "preset")) {
    const std::string preset = cfg.get_str("family", "preset");
    const int q = static_cast<int>(cfg.get_int("family", "domain", 2));
    if (preset == "full")
      return booldim::make_family({booldim::full_class(q)});
    if (preset == "constants")
      return booldim::make_family({booldim::constants_class(q)});
    if (preset == "two-singleton")
      return booldim::make_family({booldim::singleton_class(q, 1),
                                   booldim::singleton_class(q, -1)});
    throw ConfigError("unknown family preset '" + preset + "'");
  }
  if (cfg.get_str("family", "kind", "") == "threshold") {
    const int d = static_cast<int>(cfg.get_int("family", "d"));
    const int l = static_cast<int>(cfg.get_int("family", "l"));
    const int k = static_cast<int>(cfg.get_int("family", "k"));
    const auto flat = cfg.get_doubles("family", "points");
    if (flat.empty() || flat.size() % d != 0)
      throw ConfigError("family points must be a multiple of d values");
    std::vector<Eigen::VectorXd> pts;
    for (std::size_t i = 0; i < flat.size(); i += d) {
      Eigen::VectorXd p(d);
      for (int c = 0; c < d; ++c) p(c) = flat[i + c];
      pts.push_back(std::move(p));
    }
    booldim::ThresholdEnumOptions opts;
    opts.seed = static_cast<std::uint64_t>(cfg.get_int("family", "seed", 0));
    return booldim::enumerate_threshold_family(d, l, k, pts, opts);
  }
  throw ConfigError("[family] needs file=, preset=, or kind=threshold");
}

// ---------------------------------------------------------------------------
// bounds subcommand

namespace {

using ParamMap = std::map<std::string, double>;
using Evaluator = std::function<bounds::BoundReport(const ParamMap&)>;

struct CalcSpec {
  std::vector<std::string> params;
  Evaluator eval;
};

bounds::BoundReport scalar_report(const std::string& name, const ParamMap& in,
                                  const std::string& value_name, double value,
                                  bool vacuous = false) {
  bounds::BoundReport r;
  r.name = name;
  for (const auto& [k, v] : in) r.inputs.emplace_back(k, v);
  r.values.emplace_back(value_name, value);
  r.vacuous = vacuous;
  return r;
}

bounds::CapacityInputs caps_from(const ParamMap& p) {
  bounds::CapacityInputs caps;
  if (p.count("logcap_hstar")) caps.log_cap_hstar = p.at("logcap_hstar");
  if (p.count("logcap_hln")) caps.log_cap_hln = p.at("logcap_hln");
  if (p.count("logcap_hl")) caps.log_cap_hl = p.at("logcap_hl");
  if (p.count("n")) caps.n = static_cast<int>(p.at("n"));
  return caps;
}

const std::map<std::string, CalcSpec>& calculator_table() {
  static const std::map<std::string, CalcSpec> table = {
      {"dnu",
       {{"nu", "x", "y"},
        [](const ParamMap& p) {
          return scalar_report("dnu", p, "value",
                               bounds::dnu(p.at("nu"), p.at("x"), p.at("y")));
        }}},
      {"thm26_sizes",
       {{"alpha", "nu", "delta", "logcap_hstar", "logcap_hln", "n"},
        [](const ParamMap& p) {
          return bounds::thm26_sizes(p.at("alpha"), p.at("nu"), p.at("delta"),
                                     caps_from(p));
        }}},
      {"thm2_sizes",
       {{"eps", "delta", "logcap_hstar", "logcap_hln", "n"},
        [](const ParamMap& p) {
          return bounds::thm2_sizes(p.at("eps"), p.at("delta"), caps_from(p));
        }}},
      {"thm3_m",
       {{"eps", "delta", "logcap_hl"},
        [](const ParamMap& p) {
          bounds::BoundReport r;
          bounds::thm3_m(p.at("eps"), p.at("delta"), p.at("logcap_hl"), &r);
          return r;
        }}},
      {"thm4_m",
       {{"eps", "delta", "n", "logcap_hln"},
        [](const ParamMap& p) {
          bounds::BoundReport r;
          bounds::thm4_m(p.at("eps"), p.at("delta"),
                         static_cast<int>(p.at("n")), p.at("logcap_hln"), &r);
          return r;
        }}},
      {"nn_capacity_logs",
       {{"eps", "k", "n", "W", "b"},
        [](const ParamMap& p) {
          const auto logs = bounds::nn_capacity_logs(
              p.at("eps"), static_cast<int>(p.at("k")),
              static_cast<int>(p.at("n")),
              static_cast<long long>(p.at("W")), p.at("b"));
          bounds::BoundReport r;
          r.name = "nn_capacity_logs";
          for (const auto& [k2, v] : p) r.inputs.emplace_back(k2, v);
          r.values = {{"log_cap_hln", logs.log_cap_hln},
                      {"log_cap_hstar", logs.log_cap_hstar}};
          if (logs.clamped_hln || logs.clamped_hstar)
            r.flags.push_back("eps>=kappa");
          return r;
        }}},
      {"thm8_sizes",
       {{"eps", "delta", "k", "W", "n", "b"},
        [](const ParamMap& p) {
          return bounds::thm8_sizes(p.at("eps"), p.at("delta"),
                                    static_cast<int>(p.at("k")),
                                    static_cast<long long>(p.at("W")),
                                    static_cast<int>(p.at("n")), p.at("b"));
        }}},
      {"thm12_prob",
       {{"eps", "n", "m", "growth"},
        [](const ParamMap& p) {
          return bounds::thm12_prob(p.at("eps"), static_cast<int>(p.at("n")),
                                    static_cast<int>(p.at("m")),
                                    p.at("growth"));
        }}},
      {"cor13_m",
       {{"eps", "delta", "n", "dhn"},
        [](const ParamMap& p) {
          bounds::BoundReport r;
          bounds::cor13_m(p.at("eps"), p.at("delta"),
                          static_cast<int>(p.at("n")),
                          static_cast<int>(p.at("dhn")), &r);
          return r;
        }}},
      {"thm14_m_lower",
       {{"eps", "delta", "n", "dhn"},
        [](const ParamMap& p) {
          return scalar_report(
              "thm14_m_lower", p, "m_threshold",
              bounds::thm14_m_lower(p.at("eps"), p.at("delta"),
                                    static_cast<int>(p.at("n")),
                                    static_cast<int>(p.at("dhn"))));
        }}},
      {"thm15_dhn_upper",
       {{"d", "l", "k", "n"},
        [](const ParamMap& p) {
          return scalar_report(
              "thm15_dhn_upper", p, "upper",
              bounds::thm15_dhn_upper(
                  static_cast<int>(p.at("d")), static_cast<int>(p.at("l")),
                  static_cast<int>(p.at("k")), static_cast<int>(p.at("n"))));
        }}},
      {"thm16_dhn_lower",
       {{"d", "l", "k", "n"},
        [](const ParamMap& p) {
          return scalar_report(
              "thm16_dhn_lower", p, "lower",
              bounds::thm16_dhn_lower(
                  static_cast<int>(p.at("d")), static_cast<int>(p.at("l")),
                  static_cast<int>(p.at("k")), static_cast<int>(p.at("n"))));
        }}},
      {"realizable_sizes",
       {{"eps", "delta", "alpha", "logcap_hstar", "logcap_hln", "n"},
        [](const ParamMap& p) {
          return bounds::realizable_sizes(p.at("eps"), p.at("delta"),
                                          p.at("alpha"), caps_from(p));
        }}},
      {"lemma30_bound",
       {{"m", "beta"},
        [](const ParamMap& p) {
          return scalar_report(
              "lemma30_bound", p, "prob_floor",
              bounds::lemma30_bound(static_cast<long long>(p.at("m")),
                                    p.at("beta")));
        }}},
      {"sauer",
       {{"m", "d"},
        [](const ParamMap& p) {
          const auto [sum, upper] = bounds::sauer(static_cast<int>(p.at("m")),
                                                  static_cast<int>(p.at("d")));
          bounds::BoundReport r;
          r.name = "sauer";
          for (const auto& [k2, v] : p) r.inputs.emplace_back(k2, v);
          r.values = {{"exact_sum", static_cast<double>(sum)},
                      {"upper", upper}};
          return r;
        }}},
      {"bad_task_prob",
       {{"er_upper", "gamma"},
        [](const ParamMap& p) {
          const double v = bounds::bad_task_prob(p.at("er_upper"), p.at("gamma"));
          return scalar_report("bad_task_prob", p, "prob", v, v >= 1.0);
        }}},
  };
  return table;
}

std::string join_pairs(const std::vector<std::pair<std::string, double>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out += ';';
    out += k + "=" + fmt_double(v);
  }
  return out;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

}  // namespace

Artifacts cmd_bounds(const Config& cfg, const RunOptions&) {
  std::ostringstream csv;
  csv << "name,inputs,values,vacuous,flags,error\n";
  std::vector<std::string> calcs;
  if (cfg.has("bounds", "calculators"))
    calcs = cfg.tokens("bounds", "calculators");
  std::vector<std::vector<std::string>> table_rows;

  for (const auto& name : calcs) {
    const auto it = calculator_table().find(name);
    if (it == calculator_table().end())
      throw ConfigError("unknown calculator '" + name + "'");
    const auto& spec = it->second;
    // Cross-product over the configured value lists, last parameter fastest.
    std::vector<std::vector<double>> lists;
    for (const auto& p : spec.params) lists.push_back(cfg.get_doubles("bounds", p));
    std::vector<std::size_t> idx(lists.size(), 0);
    bool any_empty = false;
    for (const auto& l : lists) any_empty |= l.empty();
    while (!any_empty) {
      ParamMap pm;
      for (std::size_t i = 0; i < lists.size(); ++i)
        pm[spec.params[i]] = lists[i][idx[i]];
      std::string error;
      bounds::BoundReport rep;
      try {
        rep = spec.eval(pm);
      } catch (const std::invalid_argument& e) {
        rep.name = name;
        for (const auto& [k, v] : pm) rep.inputs.emplace_back(k, v);
        error = e.what();
      }
      csv << rep.name << ',' << join_pairs(rep.inputs) << ','
          << join_pairs(rep.values) << ',' << (rep.vacuous ? 1 : 0) << ','
          << join_flags(rep.flags) << ',' << error << '\n';
      table_rows.push_back({rep.name, join_pairs(rep.inputs),
                            join_pairs(rep.values),
                            rep.vacuous ? "vacuous" : "", join_flags(rep.flags),
                            error});
      int pos = static_cast<int>(idx.size()) - 1;
      while (pos >= 0 && ++idx[pos] == lists[pos].size()) idx[pos--] = 0;
      if (pos < 0) break;
    }
  }

  // Aligned text table on stdout.
  const std::vector<std::string> headers = {"name", "inputs", "values",
                                            "vacuous", "flags", "error"};
  std::vector<std::size_t> widths;
  for (const auto& h : headers) widths.push_back(h.size());
  for (const auto& row : table_rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  std::ostringstream table;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      table << row[c] << std::string(widths[c] - row[c].size(), ' ');
      table << (c + 1 < row.size() ? "  " : "");
    }
    table << '\n';
  };
  emit_row(headers);
  for (const auto& row : table_rows) emit_row(row);

  return {{"bounds.csv", csv.str()}, {"bounds.txt", table.str()}};
}

// ---------------------------------------------------------------------------
// dim subcommand

Artifacts cmd_dim(const Config& cfg, const RunOptions&) {
  const auto fam = family_from_config(cfg);
  booldim::EnumCaps caps;
  caps.max_domain = static_cast<int>(cfg.get_int("dim", "max_domain", caps.max_domain));
  caps.max_n = static_cast<int>(cfg.get_int("dim", "max_n", caps.max_n));
  caps.max_m = static_cast<int>(cfg.get_int("dim", "max_m", caps.max_m));
  std::vector<long long> ns = {1, 2};
  std::vector<long long> ms = {1, 2, 3};
  if (cfg.has("dim", "n")) ns = cfg.get_ints("dim", "n");
  if (cfg.has("dim", "m")) ms = cfg.get_ints("dim", "m");

  std::ostringstream csv;
  csv << "record,space,n,m,value,verdict\n";
  for (std::size_t s = 0; s < fam.spaces.size(); ++s)
    csv << "vcdim," << s << ",,," << booldim::vcdim(fam.spaces[s], caps)
        << ",\n";
  const auto [dbar, dunder] = booldim::family_dims(fam, caps);
  csv << "dbar,,,," << dbar << ",\n";
  csv << "dunder,,,," << dunder << ",\n";
  if (fam.subfamily) csv << "note,,,,subfamily-lower-estimate,\n";
  for (long long n : ns)
    for (long long m : ms)
      csv << "growth,," << n << ',' << m << ','
          << booldim::growth_family(fam, static_cast<int>(n),
                                    static_cast<int>(m), caps)
          << ",\n";
  for (long long n : ns) {
    const int cap = std::min(fam.domain_size, caps.max_m);
    csv << "dhn,," << n << ",,"
        << booldim::dhn(fam, static_cast<int>(n), cap, caps) << ",\n";
  }
  for (long long n : ns)
    csv << "lemma10,," << n << ",,,"
        << (booldim::lemma10_holds(fam, static_cast<int>(n), caps) ? "pass"
                                                                   : "fail")
        << '\n';
  for (long long n : ns)
    for (long long m : ms)
      csv << "lemma11,," << n << ',' << m << ",,"
          << (booldim::lemma11_holds(fam, static_cast<int>(n),
                                     static_cast<int>(m), caps)
                  ? "pass"
                  : "fail")
          << '\n';
  return {{"dim.csv", csv.str()}};
}

// ---------------------------------------------------------------------------
// entry point

Artifacts run_experiment(const Config& cfg, const RunOptions& opts) {
  const std::string kind = cfg.get_str("experiment", "kind");
  if (kind == "curve") return cmd_curve(cfg, opts);
  if (kind == "transfer") return cmd_transfer(cfg, opts);
  if (kind == "bounds") return cmd_bounds(cfg, opts);
  if (kind == "dim") return cmd_dim(cfg, opts);
  if (kind == "hard") return cmd_hard(cfg, opts);
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"biaslearn: multi-task bias-learning laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_prefix;
  int threads = 1;
  std::int64_t seed = -1;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")
        ->required();
    sub->add_option("--out", out_prefix,
                    "output path prefix (default: config path stem)");
    sub->add_option("--threads", threads, "worker threads for sweep cells");
    sub->add_option("--seed", seed, "override [experiment] seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  add_common(app.add_subcommand(
      "curve",
      "learning-curve sweep; CSV columns n,seed,m_star,final_train_loss,"
      "test_err (m_star = smallest sweep m with test error <= tau, else "
      "the literal not-reached)"));
  add_common(app.add_subcommand(
      "transfer",
      "novel-task transfer; CSV columns n,m_novel,trial,err_transfer,"
      "err_scratch"));
  add_common(app.add_subcommand(
      "bounds",
      "bound calculators over a config grid; CSV columns name,inputs,"
      "values,vacuous,flags,error"));
  add_common(app.add_subcommand(
      "dim",
      "Boolean family dimension report; CSV columns record,space,n,m,"
      "value,verdict"));
  add_common(app.add_subcommand(
      "hard",
      "hard-instance lower-bound experiment; CSV columns m,trial,er_erm,"
      "opt,excess,pr_excess_gt_eps"));

  try {
    std::vector<std::string> argv_copy(args);
    std::reverse(argv_copy.begin(), argv_copy.end());
    app.parse(argv_copy);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    Config cfg = Config::load(config_path);
    const std::string cfg_kind = cfg.get_str("experiment", "kind", sub);
    if (cfg_kind != sub)
      throw ConfigError("config kind '" + cfg_kind +
                        "' does not match subcommand '" + sub + "'");
    RunOptions opts;
    opts.threads = threads;
    if (seed_set) opts.seed_override = static_cast<std::uint64_t>(seed);

    const Artifacts artifacts = [&] {
      if (sub == "curve") return cmd_curve(cfg, opts);
      if (sub == "transfer") return cmd_transfer(cfg, opts);
      if (sub == "bounds") return cmd_bounds(cfg, opts);
      if (sub == "dim") return cmd_dim(cfg, opts);
      return cmd_hard(cfg, opts);
    }();

    std::string prefix = out_prefix;
    if (prefix.empty()) {
      prefix = config_path;
      const auto dot = prefix.find_last_of('.');
      if (dot != std::string::npos && prefix.find('/', dot) == std::string::npos)
        prefix = prefix.substr(0, dot);
    }
    // Plot scripts reference the CSV by the name it is written under.
    std::string base = prefix;
    if (const auto slash = base.find_last_of('/'); slash != std::string::npos)
      base = base.substr(slash + 1);
    for (const auto& [name, raw] : artifacts) {
      std::string content = raw;
      const std::string placeholder = "%CSV%";
      if (auto pos = content.find(placeholder); pos != std::string::npos)
        content.replace(pos, placeholder.size(), base + "_" + sub + ".csv");
      const std::string path = prefix + "_" + name;
      std::ofstream out(path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << path << '\n';
        return 1;
      }
      out << content;
      // The bounds table also goes to stdout for interactive use.
      if (name == "bounds.txt") std::cout << content;
      std::cout << "wrote " << path << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const booldim::ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kExitResourceCap;
  } catch (const std::invalid_argument& e) {
    // Bad user-supplied inputs (malformed family/env files, out-of-range
    // parameters) are configuration problems.
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace biaslearn::cli
