#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbg/game_core.hpp"
#include "pbg/pbm_em.hpp"
#include "pbg/profit_lab.hpp"

namespace pbg {

using json = nlohmann::json;

/// Keys shared by every game description.
extern const std::vector<std::string> kGameKeys;

json load_json(const std::filesystem::path& path);

/// Throws Config naming the first key not in allowed.
void reject_unknown(const json& j, const std::vector<std::string>& allowed);

/// {n?, p | bias_row, tables?, p0?, beta, gamma | gammas | n_H + gamma_H +
/// gamma_L, c?}. bias_row picks a row (A, B, C) of the bundled tables.
GameConfig game_from_json(const json& j);
json game_to_json(const GameConfig& cfg);

void write_strategy_csv(const std::filesystem::path& path, const MixedStrategy& s);
MixedStrategy read_strategy_csv(const std::filesystem::path& path);

struct EquilibriumFiles {
  json header;
  std::vector<StrategyGroup> groups;
  std::vector<double> effective_p;
  double beta = 2.0;
};

/// Writes equilibrium.json plus one strategy CSV per group into dir.
void write_equilibrium(const std::filesystem::path& dir, json header,
                       const std::vector<StrategyGroup>& groups,
                       const std::vector<double>& effective_p, double beta);
EquilibriumFiles read_equilibrium(const std::filesystem::path& dir);

json fit_to_json(const PbmFit& fit);

}  // namespace pbg
