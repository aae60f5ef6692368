#include "pbg/pbm_em.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "pbg/errors.hpp"

namespace pbg {

char interface_code(Interface i) {
  switch (i) {
    case Interface::A: return 'A';
    case Interface::B: return 'B';
    case Interface::C: return 'C';
  }
  return '?';
}

Interface parse_interface(const std::string& s) {
  if (s == "A") return Interface::A;
  if (s == "B") return Interface::B;
  if (s == "C") return Interface::C;
  throw Error(Errc::Config, "unknown interface '" + s + "'");
}

const char* position_kind_name(PositionKind k) {
  switch (k) {
    case PositionKind::Organic: return "organic";
    case PositionKind::Slot: return "slot";
    case PositionKind::Body: return "body";
  }
  return "?";
}

namespace {

PositionKind parse_kind(const std::string& s) {
  if (s == "organic") return PositionKind::Organic;
  if (s == "slot") return PositionKind::Slot;
  if (s == "body") return PositionKind::Body;
  throw Error(Errc::Config, "unknown position kind '" + s + "'");
}

}  // namespace

SimulationResult simulate_clicks(const std::vector<LayoutSpec>& layouts,
                                 const std::vector<double>& attractiveness, int sessions,
                                 std::uint64_t seed) {
  if (layouts.empty()) throw Error(Errc::Config, "no layouts to simulate");
  for (double x : attractiveness) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::Domain, "attractiveness outside [0, 1]");
  }
  for (const auto& l : layouts) {
    if (l.rank_bias.size() > attractiveness.size() || l.slot_bias.size() > attractiveness.size()) {
      throw Error(Errc::Config, "more positions than pages");
    }
    auto bad = [](double p) { return !(p >= 0.0 && p <= 1.0); };
    if (std::any_of(l.rank_bias.begin(), l.rank_bias.end(), bad) ||
        std::any_of(l.slot_bias.begin(), l.slot_bias.end(), bad) || bad(l.body_bias)) {
      throw Error(Errc::Domain, "examination probability outside [0, 1]");
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SimulationResult out;
  std::map<Interface, std::pair<long, long>> rank1;
  std::vector<int> order(attractiveness.size()), cited(attractiveness.size());
  std::iota(order.begin(), order.end(), 0);
  std::iota(cited.begin(), cited.end(), 0);

  for (int s = 0; s < sessions; ++s) {
    const LayoutSpec& L = layouts[s % layouts.size()];
    std::shuffle(order.begin(), order.end(), rng);
    std::shuffle(cited.begin(), cited.end(), rng);
    for (std::size_t r = 0; r < L.rank_bias.size(); ++r) {
      const bool exam = U(rng) < L.rank_bias[r];
      const bool attr = U(rng) < attractiveness[order[r]];
      if (r == 0) {
        auto& c = rank1[L.iface];
        c.first += exam;
        c.second += 1;
      }
      out.records.push_back({s, 0, L.iface, PositionKind::Organic, static_cast<int>(r + 1),
                             order[r], exam && attr, 0.0, std::nullopt});
    }
    if (!L.has_overview) continue;
    for (std::size_t r = 0; r < L.slot_bias.size(); ++r) {
      const bool exam = U(rng) < L.slot_bias[r];
      const bool attr = U(rng) < attractiveness[cited[r]];
      out.records.push_back({s, 0, L.iface, PositionKind::Slot, static_cast<int>(r + 1),
                             cited[r], exam && attr, 0.0, std::nullopt});
    }
    const bool body = U(rng) < L.body_bias;
    const double dwell = body ? 2.0 + 18.0 * U(rng) : 2.0 * U(rng);
    out.records.push_back(
        {s, 0, L.iface, PositionKind::Body, 0, -1, false, dwell, std::nullopt});
  }
  for (auto& [iface, c] : rank1) {
    out.examined_rank1[iface] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return out;
}

namespace {

using PosKey = std::tuple<int, int, int>;  // interface, slot flag, rank

struct Cell {
  int pos;
  int page;
  double n = 0.0;
  double k = 0.0;
};

double log_lik(const std::vector<Cell>& cells, const std::vector<double>& p,
               const std::vector<double>& x) {
  double ll = 0.0;
  for (const Cell& c : cells) {
    const double pr = std::clamp(p[c.pos] * x[c.page], 1e-300, 1.0 - 1e-16);
    ll += c.k * std::log(pr) + (c.n - c.k) * std::log1p(-pr);
  }
  return ll;
}

}  // namespace

PbmFit em_fit(const std::vector<ClickRecord>& records, const EmOptions& opts) {
  std::map<PosKey, int> pos_index;
  std::map<int, int> page_index;
  std::map<std::pair<int, int>, Cell> agg;
  bool any_body = false;
  for (const ClickRecord& r : records) {
    if (r.kind == PositionKind::Body) {
      any_body = true;
      continue;
    }
    if (r.page < 0) throw Error(Errc::Config, "click record without a page id");
    if (r.rank < 1) throw Error(Errc::Config, "rank must be 1-based");
    PosKey key{static_cast<int>(r.iface), r.kind == PositionKind::Slot, r.rank};
    auto [pit, pnew] = pos_index.try_emplace(key, static_cast<int>(pos_index.size()));
    auto [git, gnew] = page_index.try_emplace(r.page, static_cast<int>(page_index.size()));
    Cell& c = agg[{pit->second, git->second}];
    c.pos = pit->second;
    c.page = git->second;
    c.n += 1.0;
    c.k += r.clicked ? 1.0 : 0.0;
  }
  if (agg.empty()) throw Error(Errc::Degenerate, "no organic or slot records to fit");
  std::vector<Cell> cells;
  cells.reserve(agg.size());
  for (auto& [key, c] : agg) cells.push_back(c);

  const std::size_t P = pos_index.size(), J = page_index.size();
  std::vector<char> fixed(J, 0);
  std::vector<double> x(J, 0.5), p(P, 0.0);
  for (auto& [page, idx] : page_index) {
    auto it = opts.known_attractiveness.find(page);
    if (it != opts.known_attractiveness.end()) {
      x[idx] = it->second;
      fixed[idx] = 1;
    }
  }
  // Initial biases: click-through rate relative to the first rank of the
  // same interface and position kind.
  {
    std::vector<double> n(P, 0.0), k(P, 0.0);
    for (const Cell& c : cells) {
      n[c.pos] += c.n;
      k[c.pos] += c.k;
    }
    std::map<std::pair<int, int>, double> first;
    for (auto& [key, idx] : pos_index) {
      auto group = std::make_pair(std::get<0>(key), std::get<1>(key));
      if (!first.count(group)) first[group] = k[idx] / std::max(n[idx], 1.0);
    }
    for (auto& [key, idx] : pos_index) {
      const double top = first[{std::get<0>(key), std::get<1>(key)}];
      const double ctr = k[idx] / std::max(n[idx], 1.0);
      p[idx] = std::clamp(top > 0.0 ? ctr / top : 0.5, 1e-6, 1.0 - 1e-6);
    }
  }

  PbmFit fit;
  double ll = log_lik(cells, p, x);
  fit.log_likelihood.push_back(ll);
  std::vector<double> ep(P), np(P), ex(J), nx(J);
  for (int it = 0; it < opts.max_iter; ++it) {
    std::fill(ep.begin(), ep.end(), 0.0);
    std::fill(np.begin(), np.end(), 0.0);
    std::fill(ex.begin(), ex.end(), 0.0);
    std::fill(nx.begin(), nx.end(), 0.0);
    for (const Cell& c : cells) {
      const double a = p[c.pos], b = x[c.page];
      const double miss = c.n - c.k;
      const double den = std::max(1.0 - a * b, 1e-300);
      ep[c.pos] += c.k + miss * a * (1.0 - b) / den;
      ex[c.page] += c.k + miss * (1.0 - a) * b / den;
      np[c.pos] += c.n;
      nx[c.page] += c.n;
    }
    for (std::size_t i = 0; i < P; ++i) p[i] = ep[i] / np[i];
    for (std::size_t j = 0; j < J; ++j)
      if (!fixed[j]) x[j] = ex[j] / nx[j];
    const double next = log_lik(cells, p, x);
    fit.log_likelihood.push_back(next);
    fit.iterations = it + 1;
    const double gain = next - ll;
    ll = next;
    if (gain < opts.tol) break;
  }

  const bool any_fixed = std::any_of(fixed.begin(), fixed.end(), [](char f) { return f != 0; });
  if (!any_fixed) {
    double scale = 1.0 / *std::max_element(p.begin(), p.end());
    if (opts.anchor) {
      PosKey key{static_cast<int>(opts.anchor->iface), opts.anchor->slot, opts.anchor->rank};
      auto it = pos_index.find(key);
      if (it == pos_index.end()) throw Error(Errc::Config, "anchor position has no records");
      scale = opts.anchor->value / p[it->second];
    }
    for (double& v : p) v = std::min(1.0, v * scale);
    for (double& v : x) v = std::min(1.0, v / scale);
  }

  for (auto& [key, idx] : pos_index) {
    auto& vec = std::get<1>(key) ? fit.slot_bias[static_cast<Interface>(std::get<0>(key))]
                                 : fit.rank_bias[static_cast<Interface>(std::get<0>(key))];
    const int r = std::get<2>(key);
    if (static_cast<int>(vec.size()) < r) vec.resize(r, 0.0);
    vec[r - 1] = p[idx];
  }
  for (auto& [page, idx] : page_index) fit.attractiveness[page] = x[idx];
  if (any_body) fit.p0 = overview_bias_estimate(records);
  return fit;
}

double overview_bias_estimate(const std::vector<ClickRecord>& records) {
  std::set<std::int64_t> clicked_sessions;
  for (const ClickRecord& r : records) {
    if (r.kind != PositionKind::Body && r.clicked) clicked_sessions.insert(r.session);
  }
  long total = 0, examined = 0;
  for (const ClickRecord& r : records) {
    if (r.kind != PositionKind::Body) continue;
    ++total;
    const bool yes = r.dwell >= 2.0 || !clicked_sessions.count(r.session) ||
                     r.answer_ref.value_or(false);
    examined += yes;
  }
  if (total == 0) throw Error(Errc::Degenerate, "no overview body records");
  return static_cast<double>(examined) / static_cast<double>(total);
}

std::vector<ClickRecord> read_click_csv(std::istream& in) {
  std::vector<ClickRecord> out;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Config, "empty click log");
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) head.push_back(f);
  }
  const std::vector<std::string> want{"session", "query", "interface", "position_kind",
                                      "rank",    "page",  "clicked",   "dwell"};
  if (head.size() < want.size() || !std::equal(want.begin(), want.end(), head.begin())) {
    throw Error(Errc::Config, "unexpected click log header");
  }
  const bool has_ref = head.size() > want.size() && head[want.size()] == "answer_ref";
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() < want.size()) {
      throw Error(Errc::Config, "short row at line " + std::to_string(lineno));
    }
    try {
      ClickRecord r;
      r.session = std::stoll(f[0]);
      r.query = std::stoll(f[1]);
      r.iface = parse_interface(f[2]);
      r.kind = parse_kind(f[3]);
      r.rank = f[4].empty() ? 0 : std::stoi(f[4]);
      r.page = f[5].empty() ? -1 : std::stoi(f[5]);
      r.clicked = f[6] == "1" || f[6] == "true";
      r.dwell = f[7].empty() ? 0.0 : std::stod(f[7]);
      if (has_ref && f.size() > want.size() && !f[want.size()].empty()) {
        r.answer_ref = f[want.size()] == "1" || f[want.size()] == "true";
      }
      out.push_back(r);
    } catch (const std::logic_error& e) {
      throw Error(Errc::Config, "bad value at line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_click_csv(std::ostream& out, const std::vector<ClickRecord>& records) {
  out << "session,query,interface,position_kind,rank,page,clicked,dwell,answer_ref\n";
  for (const ClickRecord& r : records) {
    out << r.session << ',' << r.query << ',' << interface_code(r.iface) << ','
        << position_kind_name(r.kind) << ',' << r.rank << ',' << r.page << ','
        << (r.clicked ? 1 : 0) << ',' << r.dwell << ',';
    if (r.answer_ref) out << (*r.answer_ref ? 1 : 0);
    out << '\n';
  }
}

}  // namespace pbg
