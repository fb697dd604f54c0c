#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qimf/problems.hpp"
#include "qimf/solver.hpp"
#include "test_util.hpp"

using namespace qimf;
using testutil::bits_of;

namespace {

double qubo_cost(const QuboInstance& q, const Assignment& x) {
  return evaluate_full(instance_hamiltonian(q), x);
}

std::filesystem::path write(const std::filesystem::path& dir, const std::string& name,
                            const std::string& text) {
  testutil::spit(dir / name, text);
  return dir / name;
}

}  // namespace

TEST(Portfolio, PureRisk) {
  const Matrix v{{0.2, 0.1}, {0.1, 0.3}};
  const auto q = build_portfolio(v, {0.1, 0.4}, 1.0);
  EXPECT_EQ(q.at(0, 0), 0.2);
  EXPECT_EQ(q.at(0, 1), 0.1);
  EXPECT_EQ(q.at(1, 1), 0.3);
}

TEST(Portfolio, PureReturnSelectsPositive) {
  const Matrix v{{1.0, 0.5, 0.0}, {0.5, 2.0, 0.1}, {0.0, 0.1, 1.0}};
  const std::vector<double> r{0.3, -0.2, 0.05};
  const auto q = build_portfolio(v, r, 0.0);
  EXPECT_EQ(q.entries.size(), 3u);
  for (Index i = 0; i < 3; ++i) EXPECT_EQ(q.at(i, i), -r[i]);
  const auto [x, c] = brute_force(instance_hamiltonian(q));
  EXPECT_EQ(x, (Assignment{1, 0, 1}));
  EXPECT_NEAR(c, -0.35, 1e-15);
}

TEST(Portfolio, TwoAssetEnumeration) {
  const Matrix v{{0.2, 0.1}, {0.1, 0.3}};
  const std::vector<double> r{0.1, 0.4};
  const auto q = build_portfolio(v, r, 0.5);
  double best = INFINITY;
  for (std::uint64_t c = 0; c < 4; ++c) {
    const auto x = bits_of(c, 2);
    double quad = 0, lin = 0;
    for (int i = 0; i < 2; ++i) {
      lin += r[i] * x[i];
      for (int j = 0; j < 2; ++j) quad += v[i][j] * x[i] * x[j];
    }
    const double direct = 0.5 * quad - 0.5 * lin;
    EXPECT_NEAR(qubo_cost(q, x), direct, 1e-12);
    best = std::min(best, direct);
  }
  EXPECT_NEAR(brute_force(instance_hamiltonian(q)).second, best, 1e-12);
  EXPECT_EQ(q.metadata.at("problem"), "portfolio");
}

TEST(Portfolio, IdentityOnRandomData) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rep;
    Matrix v(n, std::vector<double>(n));
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = nd(gen);
      for (std::size_t j = i; j < n; ++j) v[i][j] = v[j][i] = nd(gen);
    }
    const double lambda = u(gen);
    const auto q = build_portfolio(v, r, lambda);
    const auto h = instance_hamiltonian(q);
    for (std::uint64_t c = 0; c < (1u << n); ++c) {
      const auto x = bits_of(c, n);
      double quad = 0, lin = 0;
      for (std::size_t i = 0; i < n; ++i) {
        lin += r[i] * x[i];
        for (std::size_t j = 0; j < n; ++j) quad += v[i][j] * x[i] * x[j];
      }
      ASSERT_NEAR(evaluate_full(h, x), lambda * quad - (1 - lambda) * lin, 1e-9);
    }
  }
}

TEST(Portfolio, Errors) {
  EXPECT_THROW(build_portfolio(Matrix{{1.0}}, {1.0, 2.0}, 0.5), ValidationError);
  EXPECT_THROW(build_portfolio(Matrix{{1.0, 0.0}}, {1.0}, 0.5), ValidationError);
  EXPECT_THROW(build_portfolio(Matrix{{1.0, 0.2}, {0.1, 1.0}}, {1.0, 1.0}, 0.5), ValidationError);
  EXPECT_THROW(build_portfolio(Matrix{{1.0}}, {1.0}, 1.5), ValidationError);
}

TEST(Ingest, SingleTickerHandArithmetic) {
  const auto dir = testutil::temp_dir("ingest_single");
  const auto prices = write(dir, "p.csv", "date,ticker,close\n2024-01-02,AAA,100\n2024-01-03,AAA,110\n2024-01-04,AAA,99\n");
  const auto sectors = write(dir, "s.csv", "ticker,sector\nAAA,Tech\n");
  const auto d = ingest_prices(prices, sectors);
  ASSERT_EQ(d.tickers, std::vector<std::string>{"AAA"});
  EXPECT_NEAR(d.mean_return[0], 0.0, 1e-15);
  EXPECT_NEAR(d.covariance[0][0], 0.02, 1e-15);
  EXPECT_EQ(d.num_returns, 2u);
  const auto scaled = ingest_prices(prices, sectors, 252.0);
  EXPECT_NEAR(scaled.covariance[0][0], 0.02 * 252, 1e-12);
}

TEST(Ingest, ConstantPricesGiveZeros) {
  const auto dir = testutil::temp_dir("ingest_const");
  std::string p = "date,ticker,close\n";
  for (const char* date : {"2024-01-02", "2024-01-03", "2024-01-04", "2024-01-05"})
    p += std::string(date) + ",AAA,50\n" + date + ",BBB,7.5\n";
  const auto d = ingest_prices(write(dir, "p.csv", p), write(dir, "s.csv", "ticker,sector\nAAA,X\nBBB,Y\n"));
  for (double r : d.mean_return) EXPECT_EQ(r, 0.0);
  for (const auto& row : d.covariance)
    for (double v : row) EXPECT_EQ(v, 0.0);
}

TEST(Ingest, SectorsAreBlockContiguous) {
  const auto dir = testutil::temp_dir("ingest_sectors");
  const std::vector<std::string> tickers{"A1", "B1", "C1", "A2", "B2", "C2", "A3"};
  std::string p = "date,ticker,close\n";
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(10, 20);
  for (int day = 1; day <= 6; ++day)
    for (const auto& t : tickers) p += "2024-02-0" + std::to_string(day) + "," + t + "," + std::to_string(u(gen)) + "\n";
  const std::string s = "ticker,sector\nA1,Energy\nB1,Tech\nC1,Utilities\nA2,Energy\nB2,Tech\nC2,Utilities\nA3,Energy\n";
  const auto d = ingest_prices(write(dir, "p.csv", p), write(dir, "s.csv", s));
  EXPECT_EQ(d.tickers, (std::vector<std::string>{"A1", "A2", "A3", "B1", "B2", "C1", "C2"}));
  EXPECT_EQ(d.block_labels, (std::vector<int>{0, 0, 0, 1, 1, 2, 2}));
  EXPECT_EQ(d.sectors, (std::vector<std::string>{"Energy", "Tech", "Utilities"}));
  const auto q = build_portfolio(d, 0.5);
  ASSERT_TRUE(q.block_labels.has_value());
  EXPECT_EQ(*q.block_labels, d.block_labels);
  EXPECT_TRUE(validate(q).empty());
}

TEST(Ingest, CovarianceMatchesIndependentComputation) {
  const auto dir = testutil::temp_dir("ingest_cov");
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0, 0.02);
  const int days = 40, n = 6;
  std::vector<std::vector<double>> price(n, std::vector<double>(days));
  std::string p = "date,ticker,close\n";
  for (int t = 0; t < n; ++t) {
    double v = 100;
    for (int d = 0; d < days; ++d) {
      v *= 1 + nd(gen);
      price[t][d] = v;
    }
  }
  char buf[64];
  for (int d = 0; d < days; ++d) {
    for (int t = 0; t < n; ++t) {
      std::snprintf(buf, sizeof buf, "2023-%02d-%02d,T%d,%.17g\n", 1 + d / 28, 1 + d % 28, t, price[t][d]);
      p += buf;
    }
  }
  const std::string s = "ticker,sector\nT0,a\nT1,a\nT2,a\nT3,a\nT4,a\nT5,a\n";
  const auto data = ingest_prices(write(dir, "p.csv", p), write(dir, "s.csv", s));

  Eigen::MatrixXd ret(days - 1, n);
  for (int t = 0; t < n; ++t)
    for (int d = 1; d < days; ++d) ret(d - 1, t) = price[t][d] / price[t][d - 1] - 1;
  const Eigen::RowVectorXd mean = ret.colwise().mean();
  const Eigen::MatrixXd centered = ret.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (days - 2);
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(data.mean_return[i], mean(i), 1e-12);
    for (int j = 0; j < n; ++j) {
      EXPECT_NEAR(data.covariance[i][j], cov(i, j), 1e-12);
      EXPECT_EQ(data.covariance[i][j], data.covariance[j][i]);
    }
  }
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = data.covariance[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);

  const auto again = ingest_prices(dir / "p.csv", dir / "s.csv");
  EXPECT_EQ(again.covariance, data.covariance);
  EXPECT_EQ(again.mean_return, data.mean_return);
  EXPECT_EQ(again.block_labels, data.block_labels);
}

TEST(Ingest, MissingDatesAreDropped) {
  const auto dir = testutil::temp_dir("ingest_missing");
  const std::string p =
      "date,ticker,close\n2024-01-02,A,1\n2024-01-02,B,2\n2024-01-03,A,2\n"
      "2024-01-04,A,4\n2024-01-04,B,4\n2024-01-05,A,2\n2024-01-05,B,8\n";
  const auto d = ingest_prices(write(dir, "p.csv", p), write(dir, "s.csv", "ticker,sector\nA,s\nB,s\n"));
  EXPECT_EQ(d.num_returns, 2u);
  EXPECT_NEAR(d.mean_return[0], (3.0 - 0.5) / 2, 1e-15);  // A: 1, 4, 2
}

TEST(Ingest, Errors) {
  const auto dir = testutil::temp_dir("ingest_errors");
  const auto sectors = write(dir, "s.csv", "ticker,sector\nA,s\n");
  auto expect_parse = [&](const std::string& prices, const std::string& needle) {
    const auto p = write(dir, "p.csv", prices);
    try {
      ingest_prices(p, sectors);
      ADD_FAILURE() << "no error for " << needle;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_parse("date,ticker,close\n2024-01-01,A,1\n2024-01-02,A,0\n2024-01-03,A,1\n", "line 3");
  expect_parse("date,ticker,close\n2024-01-01,A,1\n2024-01-02,B,1\n2024-01-03,A,1\n", "B");
  expect_parse("day,ticker,close\n", "header");
  expect_parse("date,ticker,close\n2024-01-01,A,1\n2024-01-01,A,2\n2024-01-02,A,1\n", "duplicate");
  expect_parse("date,ticker,close\n2024-01-01,A,1\n2024-01-02,A,1\n", "3");
}

TEST(Maxcut, SingleEdge) {
  const Graph g{2, {{0, 1, 5.0}}};
  const auto q = build_maxcut(g);
  const auto [x, c] = brute_force(instance_hamiltonian(q));
  EXPECT_EQ(c, -5.0);
  EXPECT_NE(x[0], x[1]);
  EXPECT_EQ(problem_score(q, c), 5.0);
}

TEST(Maxcut, UnitTriangle) {
  const Graph g{3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}};
  double best = 0;
  for (std::uint64_t c = 0; c < 8; ++c) best = std::max(best, cut_value(g, bits_of(c, 3)));
  EXPECT_EQ(best, 2.0);
  EXPECT_EQ(brute_force(instance_hamiltonian(build_maxcut(g))).second, -2.0);
}

TEST(Maxcut, EmptyGraph) {
  const Graph g{4, {}};
  const auto q = build_maxcut(g);
  for (std::uint64_t c = 0; c < 16; ++c) {
    EXPECT_EQ(cut_value(g, bits_of(c, 4)), 0.0);
    EXPECT_EQ(qubo_cost(q, bits_of(c, 4)), 0.0);
  }
}

TEST(Maxcut, IdentityOnRandomGraphs) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 2);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 1 + rep;
    Graph g{n, {}};
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (gen() % 2) g.edges.push_back({i, j, u(gen)});
    const auto h = instance_hamiltonian(build_maxcut(g));
    for (std::uint64_t c = 0; c < (1u << n); ++c) {
      const auto x = bits_of(c, n);
      double cut = 0;
      for (const auto& e : g.edges) cut += x[e.u] != x[e.v] ? e.w : 0.0;
      ASSERT_NEAR(-evaluate_full(h, x), cut, 1e-9);
    }
  }
}

TEST(Maxcut, EdgeListFile) {
  const auto dir = testutil::temp_dir("edges");
  const auto g = read_edge_list(write(dir, "g.txt", "# comment\n0 1 2.5\n\n3 1 1\n"));
  EXPECT_EQ(g.num_nodes, 4u);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[1].u, 1u);
  EXPECT_EQ(g.edges[1].v, 3u);
  EXPECT_THROW(read_edge_list(write(dir, "bad.txt", "1 1 2\n")), std::exception);
  EXPECT_THROW(validate_graph(Graph{2, {{0, 1, 1.0}, {0, 1, 2.0}}}), ValidationError);
}

TEST(Ising, SingleCoupling) {
  const auto h = build_ising(2, {{0, 1, -1.0}}, {});
  const auto [x, c] = brute_force(h);
  EXPECT_EQ(c, -1.0);
  EXPECT_EQ(x[0], x[1]);
}

TEST(Ising, SingleField) {
  const auto h = build_ising(1, {}, {{0, 1.0}});
  const auto [x, c] = brute_force(h);
  EXPECT_EQ(x, Assignment{1});
  EXPECT_EQ(c, -1.0);
}

TEST(Ising, EmptyAndErrors) {
  const auto h = build_ising(3, {}, {});
  EXPECT_EQ(h.num_terms(), 0u);
  EXPECT_EQ(h.offset, 0.0);
  EXPECT_THROW(build_ising(2, {{0, 1, 1.0}, {1, 0, 2.0}}, {}), ValidationError);
  EXPECT_THROW(build_ising(2, {{0, 0, 1.0}}, {}), ValidationError);
  EXPECT_THROW(build_ising(2, {{0, 2, 1.0}}, {}), ValidationError);
  EXPECT_THROW(build_ising(2, {}, {{0, 1.0}, {0, 2.0}}), ValidationError);
}

TEST(Ising, InstanceRoundTrip) {
  const auto h = build_ising(4, {{0, 1, -1.0}, {1, 2, 0.5}, {2, 3, 2.0}}, {{1, 0.25}, {3, -1.0}});
  const auto q = ising_instance(h);
  EXPECT_EQ(q.metadata.at("problem"), "ising");
  const auto back = instance_hamiltonian(q);
  for (std::uint64_t c = 0; c < 16; ++c)
    EXPECT_NEAR(evaluate_full(back, bits_of(c, 4)), evaluate_full(h, bits_of(c, 4)), 1e-12);
}
