#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "pbg/data.hpp"
#include "pbg/errors.hpp"
#include "pbg/pbm_em.hpp"

namespace pbg {
namespace {

std::vector<double> attractiveness(int n) {
  std::vector<double> x;
  for (int j = 0; j < n; ++j) x.push_back(0.35 + 0.5 * j / (n - 1.0));
  return x;
}

LayoutSpec layout(Interface i, std::vector<double> p) {
  LayoutSpec l;
  l.iface = i;
  l.rank_bias = std::move(p);
  return l;
}

TEST(Simulate, ZeroAttractionNoClicks) {
  SimulationResult r = simulate_clicks({layout(Interface::A, {0.9, 0.5})}, {0.0, 0.0, 0.0}, 1000, 3);
  for (const ClickRecord& c : r.records) EXPECT_FALSE(c.clicked);
}

TEST(Simulate, FullExaminationGivesAttraction) {
  const std::vector<double> x{0.2, 0.5, 0.8};
  const int S = 100000;
  SimulationResult r = simulate_clicks({layout(Interface::A, {1.0, 1.0, 1.0})}, x, S, 11);
  std::vector<double> n(3, 0.0), k(3, 0.0);
  for (const ClickRecord& c : r.records) {
    n[c.page] += 1;
    k[c.page] += c.clicked;
  }
  for (int j = 0; j < 3; ++j) {
    const double sd = std::sqrt(x[j] * (1 - x[j]) / n[j]);
    EXPECT_NEAR(k[j] / n[j], x[j], 3 * sd);
  }
}

TEST(Simulate, CtrMatchesProduct) {
  const BiasTables& t = bundled_tables();
  const auto x = attractiveness(10);
  SimulationResult r = simulate_clicks({layout(Interface::B, t.type_B)}, x, 50000, 5);
  std::vector<double> n(10, 0.0), k(10, 0.0), expect(10, 0.0);
  for (const ClickRecord& c : r.records) {
    n[c.rank - 1] += 1;
    k[c.rank - 1] += c.clicked;
    expect[c.rank - 1] += t.type_B[c.rank - 1] * x[c.page];
  }
  for (int i = 0; i < 10; ++i) {
    const double m = expect[i] / n[i];
    EXPECT_NEAR(k[i] / n[i], m, 3 * std::sqrt(m * (1 - m) / n[i]));
  }
}

TEST(Simulate, SeedReproducible) {
  const auto x = attractiveness(4);
  auto a = simulate_clicks({layout(Interface::A, {0.9, 0.6, 0.3})}, x, 500, 42);
  auto b = simulate_clicks({layout(Interface::A, {0.9, 0.6, 0.3})}, x, 500, 42);
  std::ostringstream sa, sb;
  write_click_csv(sa, a.records);
  write_click_csv(sb, b.records);
  EXPECT_EQ(sa.str(), sb.str());
}

std::vector<ClickRecord> toy_cells(int rank, int page, int n, int k) {
  std::vector<ClickRecord> out;
  for (int s = 0; s < n; ++s) {
    ClickRecord r;
    r.session = s;
    r.rank = rank;
    r.page = page;
    r.clicked = s < k;
    out.push_back(r);
  }
  return out;
}

// With x fixed the likelihood separates per rank; the maximizer is CTR / x.
TEST(Em, KnownAttractivenessTwoRanks) {
  auto rec = toy_cells(1, 0, 200, 60);
  auto more = toy_cells(2, 1, 200, 16);
  rec.insert(rec.end(), more.begin(), more.end());
  EmOptions o;
  o.known_attractiveness = {{0, 0.5}, {1, 0.4}};
  o.tol = 1e-14;
  o.max_iter = 5000;
  PbmFit f = em_fit(rec, o);
  EXPECT_NEAR(f.rank_bias[Interface::A][0], 0.3 / 0.5, 1e-6);
  EXPECT_NEAR(f.rank_bias[Interface::A][1], 0.08 / 0.4, 1e-6);
}

SimulationResult recovery_logs() {
  const BiasTables& t = bundled_tables();
  return simulate_clicks({layout(Interface::B, t.type_B)}, attractiveness(10), 10000, 2024);
}

TEST(Em, RecoversTypeBBiases) {
  SimulationResult sim = recovery_logs();
  const BiasTables& t = bundled_tables();
  EmOptions o;
  o.anchor = EmAnchor{Interface::B, false, 1, sim.examined_rank1.at(Interface::B)};
  PbmFit f = em_fit(sim.records, o);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(f.rank_bias[Interface::B][i], t.type_B[i], 0.03) << i;
}

TEST(Em, LikelihoodNonDecreasing) {
  PbmFit f = em_fit(recovery_logs().records);
  ASSERT_GT(f.log_likelihood.size(), 2u);
  for (std::size_t k = 1; k < f.log_likelihood.size(); ++k) {
    EXPECT_GE(f.log_likelihood[k], f.log_likelihood[k - 1] - 1e-9 * std::fabs(f.log_likelihood[k - 1]));
  }
}

TEST(Em, SessionOrderDoesNotMatter) {
  auto rec = recovery_logs().records;
  PbmFit a = em_fit(rec);
  std::reverse(rec.begin(), rec.end());
  PbmFit b = em_fit(rec);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(a.rank_bias[Interface::B][i], b.rank_bias[Interface::B][i], 1e-9);
}

TEST(Em, OverviewLowersOrganicBiases) {
  const BiasTables& t = bundled_tables();
  LayoutSpec a = layout(Interface::A, t.type_A);
  LayoutSpec b = layout(Interface::B, t.type_B);
  b.has_overview = true;
  b.body_bias = t.p0;
  SimulationResult sim = simulate_clicks({a, b}, attractiveness(10), 20000, 9);
  EmOptions o;
  o.anchor = EmAnchor{Interface::A, false, 1, sim.examined_rank1.at(Interface::A)};
  PbmFit f = em_fit(sim.records, o);
  for (int i = 0; i < 10; ++i) EXPECT_GE(f.rank_bias[Interface::A][i], f.rank_bias[Interface::B][i] - 0.02) << i;
  ASSERT_TRUE(f.p0.has_value());
}

TEST(Overview, CountingFixture) {
  std::ifstream in(PBG_FIXTURE_DIR "/overview_counting.csv");
  ASSERT_TRUE(in.good());
  EXPECT_NEAR(overview_bias_estimate(read_click_csv(in)), 1.0 - 9.0 / 800.0, 1e-15);
}

TEST(Overview, AnswerFlagOptional) {
  std::istringstream in(
      "session,query,interface,position_kind,rank,page,clicked,dwell\n"
      "0,0,C,organic,1,0,1,0\n"
      "0,0,C,body,0,,0,0.5\n"
      "1,0,C,organic,1,0,0,0\n"
      "1,0,C,body,0,,0,0.5\n");
  EXPECT_DOUBLE_EQ(overview_bias_estimate(read_click_csv(in)), 0.5);
}

TEST(ClickCsv, RoundTrip) {
  auto rec = simulate_clicks({layout(Interface::C, {0.9, 0.4})}, {0.3, 0.6, 0.9}, 50, 1).records;
  rec[0].answer_ref = true;
  std::stringstream ss;
  write_click_csv(ss, rec);
  auto back = read_click_csv(ss);
  ASSERT_EQ(back.size(), rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    EXPECT_EQ(back[i].session, rec[i].session);
    EXPECT_EQ(back[i].page, rec[i].page);
    EXPECT_EQ(back[i].clicked, rec[i].clicked);
    EXPECT_EQ(back[i].answer_ref, rec[i].answer_ref);
  }
}

TEST(ClickCsv, RejectsBadHeader) {
  std::istringstream in("session,query,rank\n1,2,3\n");
  EXPECT_THROW(read_click_csv(in), Error);
}

}  // namespace
}  // namespace pbg
