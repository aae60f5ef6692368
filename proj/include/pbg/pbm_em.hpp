#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pbg {

enum class Interface { A, B, C };
enum class PositionKind { Organic, Slot, Body };

char interface_code(Interface i);
Interface parse_interface(const std::string& s);
const char* position_kind_name(PositionKind k);

struct ClickRecord {
  std::int64_t session = 0;
  std::int64_t query = 0;
  Interface iface = Interface::A;
  PositionKind kind = PositionKind::Organic;
  int rank = 1;  // 1-based; unused for the overview body
  int page = -1;
  bool clicked = false;
  double dwell = 0.0;  // overview body only
  std::optional<bool> answer_ref;
};

/// Examination probabilities for one interface.
struct LayoutSpec {
  Interface iface = Interface::A;
  std::vector<double> rank_bias;
  std::vector<double> slot_bias;
  /// Overview body examination; ignored when the layout has no overview.
  double body_bias = 0.0;
  bool has_overview = false;
};

struct SimulationResult {
  std::vector<ClickRecord> records;
  /// Share of sessions in which the first organic rank was examined, per
  /// interface. Serves as the scale anchor for EM.
  std::map<Interface, double> examined_rank1;
};

/// Position-based click model: click = examine and attract. Sessions cycle
/// through the layouts; every session shows the pages in a fresh random order
/// and cites a random subset in the overview slots.
SimulationResult simulate_clicks(const std::vector<LayoutSpec>& layouts,
                                 const std::vector<double>& attractiveness, int sessions,
                                 std::uint64_t seed);

struct EmAnchor {
  Interface iface = Interface::A;
  bool slot = false;
  int rank = 1;
  double value = 1.0;
};

struct EmOptions {
  int max_iter = 500;
  double tol = 1e-8;
  /// Fixes the overall scale; without it the largest bias is set to 1.
  std::optional<EmAnchor> anchor;
  /// Fixed attractiveness per page; pages listed here are not updated.
  std::map<int, double> known_attractiveness;
};

struct PbmFit {
  std::map<Interface, std::vector<double>> rank_bias;
  std::map<Interface, std::vector<double>> slot_bias;
  std::optional<double> p0;
  std::map<int, double> attractiveness;
  std::vector<double> log_likelihood;
  int iterations = 0;
};

PbmFit em_fit(const std::vector<ClickRecord>& records, const EmOptions& opts = {});

/// Overview body counted as examined when dwell >= 2 s, when the session has
/// no other click, or when the answer-reference flag is set.
double overview_bias_estimate(const std::vector<ClickRecord>& records);

/// Columns: session,query,interface,position_kind,rank,page,clicked,dwell and an
/// optional answer_ref.
std::vector<ClickRecord> read_click_csv(std::istream& in);
void write_click_csv(std::ostream& out, const std::vector<ClickRecord>& records);

}  // namespace pbg
