#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qimf {

/// Thrown when an input does not satisfy a documented contract.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a file cannot be parsed. `line` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::string field = {});
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string detail_;
  std::size_t line_;
  std::string field_;
};

using Index = std::size_t;
using EntryKey = std::pair<Index, Index>;

/// A QUBO instance: minimize x^T V x over binary x.
///
/// Only the upper triangle (i <= j) is stored; V_ji = V_ij is implied, so
/// x^T V x = sum_i V_ii x_i + 2 sum_{i<j} V_ij x_i x_j.
///
/// When `linear` is present the instance describes a risk/return problem
/// lambda * x^T V x - (1 - lambda) * linear^T x, with lambda read from
/// metadata["lambda"]. A metadata["offset"] entry adds a constant.
struct QuboInstance {
  std::size_t num_vars = 0;
  std::map<EntryKey, double> entries;
  std::optional<std::vector<double>> linear;
  std::optional<std::vector<int>> block_labels;
  std::map<std::string, std::string> metadata;

  double at(Index i, Index j) const;
  void set(Index i, Index j, double value);  // canonicalizes (i,j), drops zeros
  void add(Index i, Index j, double value);

  std::size_t num_blocks() const;  // distinct labels, 1 without labels

  friend bool operator==(const QuboInstance&, const QuboInstance&) = default;
};

/// x^T V x for the stored upper triangle.
double quadratic_form(const QuboInstance& instance, const std::vector<std::uint8_t>& x);

struct Normal {
  double mean = 0.0;
  double stddev = 1.0;
};
struct Exponential {
  double rate = 1.0;
};
struct Uniform {
  double low = 0.0;
  double high = 1.0;
};
struct Constant {
  double value = 0.0;
};

using WeightDistribution = std::variant<Normal, Exponential, Uniform, Constant>;

bool operator==(const WeightDistribution& a, const WeightDistribution& b);

/// Parses "norm:MEAN,STD", "exp:RATE", "unif:LO,HI" or "const:V".
WeightDistribution parse_distribution(const std::string& text);
std::string to_string(const WeightDistribution& dist);

/// Weighted stochastic block model parameters.
struct WsbmSpec {
  std::vector<std::size_t> block_sizes;
  std::vector<std::vector<double>> connectivity;
  std::vector<std::vector<WeightDistribution>> weights;

  std::size_t num_blocks() const { return block_sizes.size(); }

  /// Equal-size blocks with one (probability, distribution) pair on the
  /// block diagonal and another everywhere else.
  static WsbmSpec two_level(std::vector<std::size_t> block_sizes, double p_diag,
                            double p_off, WeightDistribution w_diag,
                            WeightDistribution w_off);
};

/// Throws ValidationError listing every problem with the spec.
void validate_spec(const WsbmSpec& spec);

/// `count` i.i.d. draws from `dist`.
std::vector<double> draw_values(const WeightDistribution& dist, std::size_t count,
                                std::uint64_t seed);

/// Samples a QUBO instance from a WSBM. Deterministic in (spec, seed).
QuboInstance generate_wsbm(const WsbmSpec& spec, std::uint64_t seed);

/// Returns one message per violated invariant; empty means well-formed.
std::vector<std::string> validate(const QuboInstance& instance);

std::string to_json(const QuboInstance& instance);
QuboInstance from_json(const std::string& text);

void save(const QuboInstance& instance, const std::filesystem::path& path);
QuboInstance load(const std::filesystem::path& path);

/// Full-precision decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace qimf
