#pragma once

#include <string>
#include <vector>

namespace pbg {

/// Position-bias summary tables bundled with the library.
struct BiasTables {
  std::string name;
  std::vector<double> type_A;  // no overview
  std::vector<double> type_B;  // overview without citations
  std::vector<double> type_C;  // overview with citations, organic ranks
  std::vector<double> slots;   // cited-slot biases inside the overview
  double p0 = 0.0;             // overview body
};

/// Looks up a bundled table set; "paper-tables-v1" is the only one shipped.
const BiasTables& bundled_tables(const std::string& name = "paper-tables-v1");

/// p^C + sum(slots) / n on every rank: the overview cites all pages evenly.
std::vector<double> even_citation_baseline(const BiasTables& t);

}  // namespace pbg
