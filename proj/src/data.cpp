#include "pbg/data.hpp"

#include <numeric>

#include "pbg/errors.hpp"

namespace pbg {

const BiasTables& bundled_tables(const std::string& name) {
  static const BiasTables v1{
      "paper-tables-v1",
      {0.9911, 0.9473, 0.7173, 0.6792, 0.4170, 0.2294, 0.2116, 0.1742, 0.1485, 0.1421},
      {0.7557, 0.6502, 0.3974, 0.3661, 0.2280, 0.1572, 0.1519, 0.1430, 0.1392, 0.1158},
      {0.4801, 0.4328, 0.3307, 0.3209, 0.1605, 0.1273, 0.1203, 0.0787, 0.0762, 0.0529},
      {0.7289, 0.4417, 0.3221, 0.1480},
      0.9888,
  };
  if (name == v1.name) return v1;
  throw Error(Errc::Config, "unknown bias table set '" + name + "'");
}

std::vector<double> even_citation_baseline(const BiasTables& t) {
  const double add = std::accumulate(t.slots.begin(), t.slots.end(), 0.0) /
                     static_cast<double>(t.type_C.size());
  std::vector<double> p = t.type_C;
  for (double& v : p) v += add;
  return p;
}

}  // namespace pbg
