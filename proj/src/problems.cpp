#include "qimf/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qimf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line, const std::string& what,
                       const std::string& field = {}) {
  throw ParseError(file.string() + ": " + what, line, field);
}

std::ifstream open_or_fail(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

bool parse_number(const std::string& text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// YYYY-MM-DD, optionally followed by a time part.
bool looks_like_iso_date(const std::string& s) {
  if (s.size() < 10) return false;
  for (std::size_t k = 0; k < 10; ++k) {
    const bool dash = k == 4 || k == 7;
    if (dash ? s[k] != '-' : !std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  }
  return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

void expect_header(std::istream& in, const std::filesystem::path& file, const std::string& header) {
  std::string line;
  if (!std::getline(in, line)) fail(file, 1, "empty file, expected header '" + header + "'");
  if (!line.empty() && static_cast<unsigned char>(line[0]) == 0xEF && line.size() >= 3)
    line.erase(0, 3);  // UTF-8 BOM
  if (trim(line) != header) fail(file, 1, "expected header '" + header + "', got '" + trim(line) + "'");
}

}  // namespace

PriceTable read_price_table(const std::filesystem::path& prices_csv,
                            const std::filesystem::path& sectors_csv) {
  std::map<std::string, std::map<std::string, double>> by_ticker;  // ticker -> date -> close
  std::set<std::string> all_dates;
  {
    auto in = open_or_fail(prices_csv);
    expect_header(in, prices_csv, "date,ticker,close");
    std::string line;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
      if (trim(line).empty()) continue;
      const auto f = split_csv(line);
      if (f.size() != 3) fail(prices_csv, lineno, "expected 3 fields, got " + std::to_string(f.size()));
      if (!looks_like_iso_date(f[0])) fail(prices_csv, lineno, "missing or malformed date '" + f[0] + "'", "date");
      if (f[1].empty()) fail(prices_csv, lineno, "empty ticker", "ticker");
      double close = 0.0;
      if (!parse_number(f[2], close)) fail(prices_csv, lineno, "bad price '" + f[2] + "'", "close");
      if (!(close > 0.0))
        fail(prices_csv, lineno, "nonpositive price " + f[2] + " for " + f[1], "close");
      if (!by_ticker[f[1]].emplace(f[0], close).second)
        fail(prices_csv, lineno, "duplicate row for " + f[1] + " on " + f[0]);
      all_dates.insert(f[0]);
    }
  }
  if (by_ticker.empty()) throw ParseError(prices_csv.string() + ": no price rows");

  std::map<std::string, std::string> sector;
  {
    auto in = open_or_fail(sectors_csv);
    expect_header(in, sectors_csv, "ticker,sector");
    std::string line;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
      if (trim(line).empty()) continue;
      const auto f = split_csv(line);
      if (f.size() != 2) fail(sectors_csv, lineno, "expected 2 fields, got " + std::to_string(f.size()));
      if (f[0].empty()) fail(sectors_csv, lineno, "empty ticker", "ticker");
      const std::string label = f[1].empty() ? "UNKNOWN" : f[1];
      if (!sector.emplace(f[0], label).second)
        fail(sectors_csv, lineno, "ticker " + f[0] + " listed twice");
    }
  }

  PriceTable table;
  for (const auto& [ticker, series] : by_ticker) {
    const auto it = sector.find(ticker);
    if (it == sector.end())
      throw ParseError(sectors_csv.string() + ": no sector for ticker " + ticker, 0, "ticker");
    table.sector[ticker] = it->second;
  }
  for (const auto& date : all_dates) {
    const bool complete = std::all_of(by_ticker.begin(), by_ticker.end(),
                                      [&](const auto& kv) { return kv.second.contains(date); });
    if (!complete) continue;
    table.dates.push_back(date);
    for (const auto& [ticker, series] : by_ticker) table.close[ticker].push_back(series.at(date));
  }
  if (table.dates.size() < 3) {
    throw ParseError(prices_csv.string() + ": need at least 3 dates priced for every ticker, found " +
                     std::to_string(table.dates.size()));
  }
  return table;
}

PortfolioData portfolio_statistics(const PriceTable& table, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("return scale must be > 0");
  const std::size_t t = table.dates.size();
  if (t < 3) throw ValidationError("need at least 3 dates");

  PortfolioData out;
  std::map<std::string, int> sector_index;
  for (const auto& [ticker, label] : table.sector) sector_index.emplace(label, 0);
  for (auto& [label, k] : sector_index) {
    k = static_cast<int>(out.sectors.size());
    out.sectors.push_back(label);
  }
  for (const auto& [ticker, series] : table.close) {
    if (series.size() != t) throw ValidationError("price series for " + ticker + " misaligned");
    out.tickers.push_back(ticker);
  }
  std::stable_sort(out.tickers.begin(), out.tickers.end(), [&](const auto& a, const auto& b) {
    return sector_index.at(table.sector.at(a)) < sector_index.at(table.sector.at(b));
  });

  const std::size_t n = out.tickers.size();
  const std::size_t m = t - 1;
  out.num_returns = m;
  std::vector<std::vector<double>> ret(n, std::vector<double>(m));
  out.mean_return.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = table.close.at(out.tickers[i]);
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      ret[i][k] = p[k + 1] / p[k] - 1.0;
      sum += ret[i][k];
    }
    out.mean_return[i] = sum / static_cast<double>(m);
    out.block_labels.push_back(sector_index.at(table.sector.at(out.tickers[i])));
  }
  out.covariance.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k)
        s += (ret[i][k] - out.mean_return[i]) * (ret[j][k] - out.mean_return[j]);
      const double c = scale * s / static_cast<double>(m - 1);
      out.covariance[i][j] = c;
      out.covariance[j][i] = c;
    }
  }
  for (auto& r : out.mean_return) r *= scale;
  return out;
}

PortfolioData ingest_prices(const std::filesystem::path& prices_csv,
                            const std::filesystem::path& sectors_csv, double scale) {
  return portfolio_statistics(read_price_table(prices_csv, sectors_csv), scale);
}

QuboInstance build_portfolio(const Matrix& covariance, const std::vector<double>& returns,
                             double lambda) {
  const std::size_t n = returns.size();
  if (covariance.size() != n)
    throw ValidationError("covariance is " + std::to_string(covariance.size()) + "x?, returns has " +
                          std::to_string(n) + " entries");
  for (const auto& row : covariance) {
    if (row.size() != n) throw ValidationError("covariance is not square");
  }
  if (n == 0) throw ValidationError("portfolio needs at least one asset");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0, 1]");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (covariance[i][j] != covariance[j][i])
        throw ValidationError("covariance is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    }
  }

  QuboInstance q;
  q.num_vars = n;
  for (std::size_t i = 0; i < n; ++i) {
    q.set(i, i, lambda * covariance[i][i] - (1.0 - lambda) * returns[i]);
    for (std::size_t j = i + 1; j < n; ++j) q.set(i, j, lambda * covariance[i][j]);
  }
  q.metadata["problem"] = "portfolio";
  q.metadata["lambda"] = format_double(lambda);
  return q;
}

QuboInstance build_portfolio(const PortfolioData& data, double lambda) {
  auto q = build_portfolio(data.covariance, data.mean_return, lambda);
  q.block_labels = data.block_labels;
  q.metadata["returns"] = "simple";
  q.metadata["risk"] = "sample_covariance";
  q.metadata["num_returns"] = std::to_string(data.num_returns);
  q.metadata["num_sectors"] = std::to_string(data.sectors.size());
  std::string tickers;
  for (const auto& t : data.tickers) tickers += (tickers.empty() ? "" : ",") + t;
  q.metadata["tickers"] = tickers;
  return q;
}

void validate_graph(const Graph& g) {
  std::set<std::pair<Index, Index>> seen;
  for (const auto& e : g.edges) {
    const std::string tag = "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")";
    if (e.u == e.v) throw ValidationError(tag + " is a self-loop");
    if (e.u > e.v) throw ValidationError(tag + " must have u < v");
    if (e.v >= g.num_nodes) throw ValidationError(tag + " exceeds num_nodes");
    if (!std::isfinite(e.w)) throw ValidationError(tag + " has a non-finite weight");
    if (!seen.emplace(e.u, e.v).second) throw ValidationError(tag + " appears twice");
  }
}

Graph read_edge_list(const std::filesystem::path& path) {
  auto in = open_or_fail(path);
  Graph g;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string su, sv, sw, extra;
    if (!(fields >> su >> sv >> sw) || (fields >> extra)) fail(path, lineno, "expected 'u v w'");
    Edge e;
    double du = 0.0, dv = 0.0;
    if (!parse_number(su, du) || !parse_number(sv, dv) || du < 0 || dv < 0 ||
        du != std::floor(du) || dv != std::floor(dv))
      fail(path, lineno, "node ids must be nonnegative integers");
    if (!parse_number(sw, e.w)) fail(path, lineno, "bad weight '" + sw + "'");
    e.u = static_cast<Index>(du);
    e.v = static_cast<Index>(dv);
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) fail(path, lineno, "self-loop on node " + su);
    g.num_nodes = std::max(g.num_nodes, e.v + 1);
    g.edges.push_back(e);
  }
  try {
    validate_graph(g);
  } catch (const ValidationError& err) {
    throw ParseError(path.string() + ": " + err.what());
  }
  return g;
}

double cut_value(const Graph& g, const Assignment& x) {
  if (x.size() != g.num_nodes) throw ValidationError("assignment length differs from num_nodes");
  double cut = 0.0;
  for (const auto& e : g.edges) {
    if (x[e.u] != x[e.v]) cut += e.w;
  }
  return cut;
}

QuboInstance build_maxcut(const Graph& g) {
  validate_graph(g);
  QuboInstance q;
  q.num_vars = std::max<std::size_t>(g.num_nodes, 1);
  for (const auto& e : g.edges) {
    q.add(e.u, e.v, e.w);
    q.add(e.u, e.u, -e.w);
    q.add(e.v, e.v, -e.w);
  }
  q.metadata["problem"] = "maxcut";
  return q;
}

Graph graph_from_instance(const QuboInstance& instance) {
  Graph g;
  g.num_nodes = instance.num_vars;
  for (const auto& [key, value] : instance.entries) {
    if (key.first != key.second) g.edges.push_back({key.first, key.second, value});
  }
  return g;
}

IsingHamiltonian build_ising(std::size_t num_qubits, const std::vector<Coupling>& couplings,
                             const std::vector<Field>& fields) {
  std::map<std::vector<Index>, double> terms;
  for (const auto& [a, b, j] : couplings) {
    if (a == b) throw ValidationError("coupling on a single site " + std::to_string(a));
    if (std::max(a, b) >= num_qubits) throw ValidationError("coupling index out of range");
    if (!std::isfinite(j)) throw ValidationError("non-finite coupling");
    if (!terms.emplace(std::vector<Index>{std::min(a, b), std::max(a, b)}, j).second)
      throw ValidationError("duplicate coupling (" + std::to_string(std::min(a, b)) + ", " +
                            std::to_string(std::max(a, b)) + ")");
  }
  for (const auto& [i, h] : fields) {
    if (i >= num_qubits) throw ValidationError("field index out of range");
    if (!std::isfinite(h)) throw ValidationError("non-finite field");
    if (!terms.emplace(std::vector<Index>{i}, h).second)
      throw ValidationError("duplicate field on site " + std::to_string(i));
  }
  return IsingHamiltonian::from_z_terms(num_qubits, terms, 0.0);
}

QuboInstance ising_instance(const IsingHamiltonian& h) {
  auto q = ising_to_qubo(h);
  q.metadata["problem"] = "ising";
  return q;
}

IsingHamiltonian ising_from_instance_entries(const QuboInstance& instance) {
  std::vector<Coupling> couplings;
  std::vector<Field> fields;
  for (const auto& [key, value] : instance.entries) {
    if (key.first == key.second)
      fields.emplace_back(key.first, value);
    else
      couplings.emplace_back(key.first, key.second, value);
  }
  return build_ising(instance.num_vars, couplings, fields);
}

double problem_score(const QuboInstance& instance, double cost) {
  const auto it = instance.metadata.find("problem");
  return it != instance.metadata.end() && it->second == "maxcut" ? -cost : cost;
}

}  // namespace qimf
