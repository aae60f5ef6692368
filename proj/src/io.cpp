#include "pbg/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pbg/data.hpp"

namespace pbg {

namespace fs = std::filesystem;

const std::vector<std::string> kGameKeys{"n",     "p",      "bias_row", "tables",  "p0",
                                         "beta",  "gamma",  "gammas",   "n_H",     "gamma_H",
                                         "gamma_L", "c"};

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Config, path.string() + ": " + e.what());
  }
}

void reject_unknown(const json& j, const std::vector<std::string>& allowed) {
  if (!j.is_object()) throw Error(Errc::Config, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw Error(Errc::Config, "unknown key '" + it.key() + "'");
    }
  }
}

namespace {

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::Config, std::string("key '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

}  // namespace

GameConfig game_from_json(const json& j) {
  std::vector<double> p;
  if (j.contains("p")) {
    p = get<std::vector<double>>(j, "p");
  } else if (j.contains("bias_row")) {
    const BiasTables& t = bundled_tables(get_or<std::string>(j, "tables", "paper-tables-v1"));
    const std::string row = get<std::string>(j, "bias_row");
    if (row == "A") p = t.type_A;
    else if (row == "B") p = t.type_B;
    else if (row == "C") p = t.type_C;
    else throw Error(Errc::Config, "bias_row must be A, B or C");
  } else {
    throw Error(Errc::Config, "config needs 'p' or 'bias_row'");
  }
  const double beta = get<double>(j, "beta");
  const double p0 = get_or<double>(j, "p0", 0.0);
  const std::vector<double> c = get_or<std::vector<double>>(j, "c", {});
  GameConfig cfg;
  if (j.contains("n_H")) {
    cfg = make_binary(p, get<int>(j, "n_H"), get<double>(j, "gamma_H"),
                      get<double>(j, "gamma_L"), beta, c, p0);
  } else if (j.contains("gammas")) {
    cfg = make_symmetric(p, 1.0, beta, c, p0);
    cfg.cost.gammas = get<std::vector<double>>(j, "gammas");
  } else {
    cfg = make_symmetric(p, get<double>(j, "gamma"), beta, c, p0);
  }
  if (j.contains("n") && get<int>(j, "n") != cfg.n) {
    throw Error(Errc::LengthMismatch, "'n' does not match the bias vector");
  }
  validate_config(cfg);
  return cfg;
}

json game_to_json(const GameConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["p"] = cfg.biases.p;
  j["p0"] = cfg.biases.p0;
  j["beta"] = cfg.cost.beta;
  if (cfg.split) {
    j["n_H"] = cfg.split->n_H;
    j["gamma_H"] = cfg.split->gamma_H;
    j["gamma_L"] = cfg.split->gamma_L;
  } else if (cfg.symmetric_costs()) {
    j["gamma"] = cfg.cost.gammas.front();
  } else {
    j["gammas"] = cfg.cost.gammas;
  }
  if (!cfg.c.empty()) j["c"] = cfg.c;
  return j;
}

void write_strategy_csv(const fs::path& path, const MixedStrategy& s) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Config, "cannot write " + path.string());
  out << std::setprecision(17) << "x,F,atom\n";
  const auto& g = s.grid();
  const auto& F = s.cdf_values();
  for (std::size_t k = 0; k < g.size(); ++k) {
    out << g[k] << ',' << F[k] << ',' << s.atom_at(g[k]) << '\n';
  }
}

MixedStrategy read_strategy_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "x,F,atom") throw Error(Errc::Config, path.string() + ": unexpected header");
  std::vector<double> x, F;
  std::vector<MixedStrategy::Atom> atoms;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    double a, b, m;
    char c1, c2;
    if (!(ss >> a >> c1 >> b >> c2 >> m) || c1 != ',' || c2 != ',') {
      throw Error(Errc::Config, path.string() + ": malformed row '" + line + "'");
    }
    x.push_back(a);
    F.push_back(b);
    if (m > 0.0) atoms.push_back({a, m});
  }
  return MixedStrategy(std::move(x), std::move(F), std::move(atoms));
}

void write_equilibrium(const fs::path& dir, json header, const std::vector<StrategyGroup>& groups,
                       const std::vector<double>& effective_p, double beta) {
  fs::create_directories(dir);
  header["beta"] = beta;
  header["effective_p"] = effective_p;
  json gs = json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::string file = "strategy_" + std::to_string(g) + ".csv";
    write_strategy_csv(dir / file, groups[g].strategy);
    gs.push_back({{"count", groups[g].count}, {"gamma", groups[g].gamma}, {"file", file}});
  }
  header["groups"] = gs;
  std::ofstream out(dir / "equilibrium.json");
  if (!out) throw Error(Errc::Config, "cannot write " + (dir / "equilibrium.json").string());
  out << header.dump(2) << '\n';
}

EquilibriumFiles read_equilibrium(const fs::path& dir) {
  EquilibriumFiles ef;
  ef.header = load_json(dir / "equilibrium.json");
  ef.beta = get<double>(ef.header, "beta");
  ef.effective_p = get<std::vector<double>>(ef.header, "effective_p");
  int total = 0;
  for (const json& g : ef.header.at("groups")) {
    StrategyGroup sg;
    sg.count = get<int>(g, "count");
    sg.gamma = get<double>(g, "gamma");
    sg.strategy = read_strategy_csv(dir / get<std::string>(g, "file"));
    total += sg.count;
    ef.groups.push_back(std::move(sg));
  }
  if (total != static_cast<int>(ef.effective_p.size())) {
    throw Error(Errc::LengthMismatch, "group counts do not match the bias vector");
  }
  return ef;
}

json fit_to_json(const PbmFit& fit) {
  json j;
  json rb = json::object(), sb = json::object(), x = json::object();
  for (const auto& [i, v] : fit.rank_bias) rb[std::string(1, interface_code(i))] = v;
  for (const auto& [i, v] : fit.slot_bias) sb[std::string(1, interface_code(i))] = v;
  for (const auto& [page, v] : fit.attractiveness) x[std::to_string(page)] = v;
  j["rank_bias"] = rb;
  j["slot_bias"] = sb;
  j["p0"] = fit.p0 ? json(*fit.p0) : json(nullptr);
  j["attractiveness"] = x;
  j["log_likelihood"] = fit.log_likelihood;
  j["iterations"] = fit.iterations;
  return j;
}

}  // namespace pbg
