#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "qimf/solver.hpp"

namespace qimf::cli {

/// Bad flags or flag values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. The vector form takes
/// the arguments without the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "10x5" (five blocks of 10), "4", or "10,20,5".
std::vector<std::size_t> parse_blocks(const std::string& text);

/// "1..10" (inclusive), "3", or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text);

/// Header `epoch,queries,mean_cost,best_cost`; the epoch column is
/// queries / (n_s * n_b).
std::string trace_csv(const RunTrace& trace);

}  // namespace qimf::cli
