#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qimf/hamiltonian.hpp"
#include "qimf/instance.hpp"

namespace qimf {

using Matrix = std::vector<std::vector<double>>;

/// Closing prices aligned to `dates`; only complete rows are kept.
struct PriceTable {
  std::vector<std::string> dates;
  std::map<std::string, std::vector<double>> close;
  std::map<std::string, std::string> sector;
};

/// Reads the long-format prices CSV (`date,ticker,close`) and the sectors
/// CSV (`ticker,sector`). Dates with any missing ticker are dropped.
/// Errors are ParseError with the file and line.
PriceTable read_price_table(const std::filesystem::path& prices_csv,
                            const std::filesystem::path& sectors_csv);

struct PortfolioData {
  std::vector<std::string> tickers;  // grouped by sector, then by name
  std::vector<std::string> sectors;  // label k names sectors[k]
  Matrix covariance;
  std::vector<double> mean_return;
  std::vector<int> block_labels;
  std::size_t num_returns = 0;
};

/// Simple returns, per-ticker mean and sample covariance (denominator T-1).
/// `scale` multiplies both, e.g. 252 to annualize daily data.
PortfolioData portfolio_statistics(const PriceTable& table, double scale = 1.0);

PortfolioData ingest_prices(const std::filesystem::path& prices_csv,
                            const std::filesystem::path& sectors_csv, double scale = 1.0);

/// Q with x^T Q x = lambda x^T V x - (1 - lambda) r^T x on binary x.
QuboInstance build_portfolio(const Matrix& covariance, const std::vector<double>& returns,
                             double lambda);

/// build_portfolio plus sector labels and provenance metadata.
QuboInstance build_portfolio(const PortfolioData& data, double lambda);

struct Edge {
  Index u = 0;
  Index v = 0;
  double w = 0.0;
};

struct Graph {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;  // u < v, no duplicates
};

/// Throws ValidationError on self-loops, duplicates, bad indices or u > v.
void validate_graph(const Graph& g);

/// `u v w` per line; blank lines and `#` comments are skipped. Edges given
/// as v u are canonicalized. num_nodes = largest index + 1.
Graph read_edge_list(const std::filesystem::path& path);

double cut_value(const Graph& g, const Assignment& x);

/// x^T Q x = -cut(x).
QuboInstance build_maxcut(const Graph& g);

/// Off-diagonal WSBM entries become an edge list.
Graph graph_from_instance(const QuboInstance& instance);

using Coupling = std::tuple<Index, Index, double>;
using Field = std::pair<Index, double>;

/// sum J_ij Z_i Z_j + sum h_i Z_i with zero offset.
IsingHamiltonian build_ising(std::size_t num_qubits, const std::vector<Coupling>& couplings,
                             const std::vector<Field>& fields);

/// Instance-file form of an Ising model (metadata problem=ising).
QuboInstance ising_instance(const IsingHamiltonian& h);

/// Reads V_ij (i<j) as couplings and V_ii as fields.
IsingHamiltonian ising_from_instance_entries(const QuboInstance& instance);

/// The number reported for a run: +cut for max-cut, the cost otherwise.
double problem_score(const QuboInstance& instance, double cost);

}  // namespace qimf
