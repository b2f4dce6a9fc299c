// xxzent: thermal entanglement of XXZ spin rings from the command line.
//
// Subcommands:
//   negativity  one thermal negativity evaluation, JSON record to stdout
//   profile     negativity vs temperature curves, CSV per (delta, partition)
//   border      limit-temperature curves vs anisotropy, CSV per partition
//   partitions  list the distinct bipartitions of a ring
//   verify      run the analytic-vs-numeric cross-check suite
//
// Exit codes: 0 ok, 1 runtime error, 2 config error, 3 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xxzent/xxzent.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xxzent;

namespace {

int worker_count() {
  if (const char* env = std::getenv("XXZENT_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

// "min:max:count" -> evenly spaced inclusive grid
std::vector<double> parse_range(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.rfind(':');
  if (c1 == std::string::npos || c2 == c1)
    throw ValidationError("range '" + text + "' must be min:max:count");
  const double lo = std::stod(text.substr(0, c1));
  const double hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const int count = std::stoi(text.substr(c2 + 1));
  if (count < 1) throw ValidationError("range needs at least one point");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return out;
}

struct RunConfig {
  int n = 4;
  std::string topology = "cyclic-nn";
  int v_sign = +1;
  double vx_mag = 1.0;  // coupling magnitude |v_x|, used by raw-unit output
  std::vector<double> bbar = {0.0};
  bool raw_units = false;

  std::string delta_spec;  // comma list or min:max:count
  double t_min = 1e-3;
  double t_max = 50.0;
  int t_points = 400;
  std::vector<std::string> partitions = {"all-global"};

  double tol = 1e-6;
  double eps_neg = kDefaultEpsNeg;
  double scan_ceiling = 50.0;

  std::string out_dir = "out";
  std::string formats = "csv,json";

  void validate() const {
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    if (!(eps_neg > 0.0)) throw ValidationError("eps-neg must be positive");
    if (!(t_min > 0.0) || !(t_max > t_min))
      throw ValidationError("need 0 < t-min < t-max");
    if (!(scan_ceiling > t_min))
      throw ValidationError("scan-ceiling must exceed t-min");
    if (t_points < 1) throw ValidationError("t-points must be at least 1");
    if (v_sign != 1 && v_sign != -1) throw ValidationError("v-sign must be +1 or -1");
    if (!(vx_mag > 0.0)) throw ValidationError("vx magnitude must be positive");
  }

  // Raw-unit output multiplies every energy-like column by |v_x|; the
  // computation itself is scale invariant and runs in reduced units.
  double unit_scale() const { return raw_units ? vx_mag : 1.0; }

  std::vector<double> deltas() const {
    if (delta_spec.empty()) throw ValidationError("no anisotropy grid configured");
    const auto grid = delta_spec.find(':') != std::string::npos
                          ? parse_range(delta_spec)
                          : parse_double_list(delta_spec);
    if (grid.empty()) throw ValidationError("empty anisotropy grid");
    return grid;
  }

  std::vector<Bipartition> resolve_partitions() const {
    std::vector<Bipartition> out;
    for (const auto& item : partitions) {
      if (item == "all-global") {
        const auto all = all_global_bipartitions(n);
        out.insert(out.end(), all.begin(), all.end());
      } else if (item == "all-reduced") {
        const auto all = all_reduced_bipartitions(n);
        out.insert(out.end(), all.begin(), all.end());
      } else {
        out.push_back(Bipartition::parse(item, n));
      }
    }
    if (out.empty()) throw ValidationError("no partitions configured");
    return out;
  }

  LimitOptions limit_options() const {
    LimitOptions lo;
    lo.t_min = t_min;
    lo.t_max = scan_ceiling;
    lo.tol = tol;
    lo.eps_neg = eps_neg;
    return lo;
  }

  json to_json() const {
    return json{{"model", {{"n", n},
                           {"topology", topology},
                           {"v-sign", v_sign},
                           {"vx", vx_mag},
                           {"bbar", bbar}}},
                {"sweep", {{"delta", delta_spec},
                           {"t-min", t_min},
                           {"t-max", t_max},
                           {"t-points", t_points},
                           {"partitions", partitions}}},
                {"numeric", {{"tol", tol},
                             {"eps-neg", eps_neg},
                             {"scan-ceiling", scan_ceiling}}},
                {"output", {{"dir", out_dir},
                            {"formats", formats},
                            {"raw-units", raw_units}}}};
  }
};

// Flat INI with [model]/[sweep]/[numeric]/[output] sections; '#' and ';'
// start comments. Command-line flags override file values.
std::map<std::string, std::string> read_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line is not key = value: '" + line + "'");
    kv[section + "." + trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_ini(const std::map<std::string, std::string>& kv, RunConfig& cfg,
               const CLI::App* cmd) {
  auto set = [&](const char* key, const char* flag, auto&& apply) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    if (flag && cmd->count(flag) > 0) return;  // explicit flag wins
    apply(it->second);
  };
  set("model.n", "--n", [&](const std::string& v) { cfg.n = std::stoi(v); });
  set("model.topology", "--topology", [&](const std::string& v) { cfg.topology = v; });
  set("model.v-sign", "--v-sign", [&](const std::string& v) { cfg.v_sign = std::stoi(v); });
  set("model.vx", "--vx", [&](const std::string& v) { cfg.vx_mag = std::stod(v); });
  set("model.bbar", "--bbar", [&](const std::string& v) { cfg.bbar = parse_double_list(v); });
  set("sweep.delta", "--delta", [&](const std::string& v) { cfg.delta_spec = v; });
  set("sweep.t-min", "--t-min", [&](const std::string& v) { cfg.t_min = std::stod(v); });
  set("sweep.t-max", "--t-max", [&](const std::string& v) { cfg.t_max = std::stod(v); });
  set("sweep.t-points", "--t-points",
      [&](const std::string& v) { cfg.t_points = std::stoi(v); });
  set("sweep.partitions", "--partitions",
      [&](const std::string& v) { cfg.partitions = split_list(v); });
  set("numeric.tol", "--tol", [&](const std::string& v) { cfg.tol = std::stod(v); });
  set("numeric.eps-neg", "--eps-neg",
      [&](const std::string& v) { cfg.eps_neg = std::stod(v); });
  set("numeric.scan-ceiling", "--scan-ceiling",
      [&](const std::string& v) { cfg.scan_ceiling = std::stod(v); });
  set("output.dir", "--out-dir", [&](const std::string& v) { cfg.out_dir = v; });
  set("output.formats", nullptr, [&](const std::string& v) { cfg.formats = v; });
  set("output.raw-units", "--raw-units",
      [&](const std::string& v) { cfg.raw_units = v == "true" || v == "1"; });
}

void add_config_flags(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "INI config file (flags override it)");
  cmd->add_option("--n", cfg.n, "site count");
  cmd->add_option("--topology", cfg.topology, "cyclic-nn | fully-connected | single-pair");
  cmd->add_option("--v-sign", cfg.v_sign, "sign of v_x (+1 or -1)");
  cmd->add_option("--vx", cfg.vx_mag, "coupling magnitude |v_x| for raw-unit output");
  cmd->add_option("--bbar", cfg.bbar, "reduced fields |b/v| (repeatable)");
  cmd->add_option("--delta", cfg.delta_spec, "anisotropy grid: comma list or min:max:count");
  cmd->add_option("--t-min", cfg.t_min, "profile grid start (reduced units)");
  cmd->add_option("--t-max", cfg.t_max, "profile grid end");
  cmd->add_option("--t-points", cfg.t_points, "profile grid size");
  cmd->add_option("--partitions", cfg.partitions,
                  "partition labels, or all-global / all-reduced");
  cmd->add_option("--tol", cfg.tol, "limit-temperature bisection tolerance");
  cmd->add_option("--eps-neg", cfg.eps_neg, "zero-negativity threshold");
  cmd->add_option("--scan-ceiling", cfg.scan_ceiling, "upper end of the limit scan");
  cmd->add_option("--out-dir", cfg.out_dir, "output directory");
  cmd->add_flag("--raw-units", cfg.raw_units,
                "emit energy/temperature columns in raw units (times |v_x|)");
}

std::string reentry_json(const LimitTemperature& lt, double scale) {
  json arr = json::array();
  for (const auto& [on, off] : lt.reentry_intervals)
    arr.push_back(json::array({scale * on, scale * off}));
  return arr.dump();
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& files) {
  json manifest{{"tool", "xxzent"},
                {"version", kVersion},
                {"command", command},
                {"config", cfg.to_json()},
                {"files", files}};
  std::ofstream out(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
}

std::string bbar_suffix(const RunConfig& cfg, double bbar) {
  if (cfg.bbar.size() == 1) return "";
  return "_b" + fmt_g12(bbar);
}

int cmd_border(const RunConfig& cfg) {
  cfg.validate();
  const auto deltas = cfg.deltas();
  const auto partitions = cfg.resolve_partitions();
  const Topology topo = topology_from_string(cfg.topology);
  fs::create_directories(cfg.out_dir);

  std::vector<std::string> files;
  bool had_error = false;
  for (double bbar : cfg.bbar) {
    const auto curves = border_curves(cfg.n, topo, cfg.v_sign, partitions, deltas, bbar,
                                      cfg.limit_options(), worker_count());
    for (std::size_t p = 0; p < partitions.size(); ++p) {
      const double scale = cfg.unit_scale();
      CsvTable table;
      table.header = cfg.raw_units
                         ? std::vector<std::string>{"vz", "T_limit", "k_at_limit",
                                                    "reentry_intervals"}
                         : std::vector<std::string>{"delta", "t_limit", "k_at_limit",
                                                    "reentry_intervals"};
      for (const auto& point : curves[p]) {
        if (point.error) {
          if (p == 0)
            std::cerr << "border: delta=" << fmt_g12(point.delta) << " failed: "
                      << *point.error << "\n";
          had_error = true;
          continue;
        }
        table.rows.push_back({fmt_g12(scale * point.delta),
                              fmt_g12(scale * point.limit.t_limit.value_or(0.0)),
                              std::to_string(point.k_at_limit),
                              reentry_json(point.limit, scale)});
      }
      const std::string name =
          "border_" + partitions[p].label() + bbar_suffix(cfg, bbar) + ".csv";
      write_csv((fs::path(cfg.out_dir) / name).string(), table);
      files.push_back(name);
    }
  }
  write_manifest(cfg, "border", files);
  return had_error ? 1 : 0;
}

int cmd_profile(const RunConfig& cfg) {
  cfg.validate();
  const auto deltas = cfg.deltas();
  const auto partitions = cfg.resolve_partitions();
  const Topology topo = topology_from_string(cfg.topology);
  const auto grid = cfg.t_points == 1 ? std::vector<double>{cfg.t_min}
                                      : log_spaced_grid(cfg.t_min, cfg.t_max, cfg.t_points);
  fs::create_directories(cfg.out_dir);

  std::vector<std::string> files;
  for (double delta : deltas) {
    for (double bbar : cfg.bbar) {
      const ThermalNegativityEngine engine(
          ChainSpec::reduced(cfg.n, topo, cfg.v_sign, delta, bbar));
      const auto profiles = negativity_profiles(engine, partitions, grid, cfg.eps_neg);
      for (const auto& profile : profiles) {
        CsvTable table;
        table.header = cfg.raw_units ? std::vector<std::string>{"T", "negativity", "k"}
                                     : std::vector<std::string>{"t", "negativity", "k"};
        for (const auto& s : profile.samples)
          table.rows.push_back({fmt_g12(cfg.unit_scale() * s.t), fmt_g12(s.value),
                                std::to_string(s.k)});
        const std::string name = "profile_" + profile.partition.label() + "_d" +
                                 fmt_g12(delta) + bbar_suffix(cfg, bbar) + ".csv";
        write_csv((fs::path(cfg.out_dir) / name).string(), table);
        files.push_back(name);
      }
    }
  }
  write_manifest(cfg, "profile", files);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-state entanglement of XXZ spin rings"};
  app.require_subcommand(1);

  // negativity
  auto* neg = app.add_subcommand("negativity", "single thermal negativity evaluation");
  struct {
    int n = 3;
    std::string topology = "cyclic-nn";
    double vx = 1.0, vz = 0.0, b = 0.0, temperature = 1.0;
    std::string partition;
    double eps_neg = kDefaultEpsNeg;
  } neg_args;
  neg->add_option("--n", neg_args.n, "site count")->required();
  neg->add_option("--topology", neg_args.topology, "coupling topology");
  neg->add_option("--vx", neg_args.vx, "XX coupling")->required();
  neg->add_option("--vz", neg_args.vz, "ZZ coupling")->required();
  neg->add_option("--b", neg_args.b, "uniform field");
  neg->add_option("--T", neg_args.temperature, "temperature (energy units)")->required();
  neg->add_option("--partition", neg_args.partition, "bipartition label, e.g. a-bc")
      ->required();
  neg->add_option("--eps-neg", neg_args.eps_neg, "zero-negativity threshold");

  // partitions
  auto* parts = app.add_subcommand("partitions", "list distinct bipartitions of a ring");
  int parts_n = 4;
  bool parts_reduced = false;
  parts->add_option("--n", parts_n, "site count")->required();
  parts->add_flag("--reduced", parts_reduced, "list reduced-system splits instead");

  // border / profile
  RunConfig border_cfg, profile_cfg;
  std::string border_config_path, profile_config_path;
  auto* border = app.add_subcommand("border", "limit-temperature curves vs anisotropy");
  add_config_flags(border, border_cfg, border_config_path);
  auto* profile = app.add_subcommand("profile", "negativity vs temperature curves");
  add_config_flags(profile, profile_cfg, profile_config_path);

  // verify
  auto* verify = app.add_subcommand("verify", "analytic-vs-numeric cross-check suite");
  VerifyOptions verify_opts;
  std::string verify_out;
  verify->add_option("--max-n", verify_opts.max_n, "largest chain in randomized checks");
  verify->add_option("--draws", verify_opts.draws, "random draws per check");
  verify->add_option("--seed", verify_opts.seed, "RNG seed");
  verify->add_option("--out", verify_out, "also write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*neg) {
      ChainSpec spec;
      spec.n = neg_args.n;
      spec.topology = topology_from_string(neg_args.topology);
      spec.vx = neg_args.vx;
      spec.vz = neg_args.vz;
      spec.b = neg_args.b;
      spec.validate();
      const Bipartition partition = Bipartition::parse(neg_args.partition, spec.n);
      const DensityMatrix rho =
          thermal_state(eigendecompose(build_hamiltonian(spec)), neg_args.temperature);
      const NegativityReport report = negativity(rho, partition, neg_args.eps_neg);
      json params{{"n", spec.n},
                  {"topology", to_string(spec.topology)},
                  {"vx", spec.vx},
                  {"vz", spec.vz},
                  {"b", spec.b},
                  {"T", neg_args.temperature}};
      if (spec.vx != 0.0) {
        params["delta"] = spec.delta();
        params["bbar"] = spec.reduced_field();
        params["t"] = neg_args.temperature / std::abs(spec.vx);
      }
      json record{{"value", report.value},
                  {"k", report.negative_count},
                  {"partition", partition.label()},
                  {"params", params}};
      std::cout << record.dump() << "\n";
      return 0;
    }
    if (*parts) {
      const auto list = parts_reduced ? all_reduced_bipartitions(parts_n)
                                      : all_global_bipartitions(parts_n);
      for (const auto& p : list) std::cout << p.label() << "\n";
      return 0;
    }
    if (*border) {
      if (!border_config_path.empty())
        apply_ini(read_ini(border_config_path), border_cfg, border);
      return cmd_border(border_cfg);
    }
    if (*profile) {
      if (!profile_config_path.empty())
        apply_ini(read_ini(profile_config_path), profile_cfg, profile);
      return cmd_profile(profile_cfg);
    }
    if (*verify) {
      const auto results = run_verification(verify_opts);
      bool all_pass = true;
      json checks = json::array();
      for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        checks.push_back(json{{"name", r.name},
                              {"pass", r.pass},
                              {"deviation", r.deviation},
                              {"threshold", r.threshold},
                              {"detail", r.detail}});
      }
      json report{{"version", kVersion}, {"all_pass", all_pass}, {"checks", checks}};
      const std::string text = report.dump(2) + "\n";
      std::cout << text;
      if (!verify_out.empty()) {
        std::ofstream out(verify_out, std::ios::binary);
        out << text;
      }
      return all_pass ? 0 : 3;
    }
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
