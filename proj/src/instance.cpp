#include "qimf/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qimf/random.hpp"

namespace qimf {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string location(std::size_t line, const std::string& field) {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line);
  if (!field.empty()) out += (out.empty() ? "" : ", ") + std::string("field ") + field;
  return out;
}

double draw(const WeightDistribution& dist, Rng& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return rng.normal(d.mean, d.stddev);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return rng.exponential(d.rate);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return rng.uniform(d.low, d.high);
        } else {
          return d.value;
        }
      },
      dist);
}

void check_distribution(const WeightDistribution& dist, const std::string& where,
                        std::vector<std::string>& problems) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          if (!std::isfinite(d.mean) || !std::isfinite(d.stddev) || d.stddev < 0.0)
            problems.push_back(where + ": normal needs finite mean and std >= 0");
        } else if constexpr (std::is_same_v<T, Exponential>) {
          if (!std::isfinite(d.rate) || d.rate <= 0.0)
            problems.push_back(where + ": exponential rate must be > 0");
        } else if constexpr (std::is_same_v<T, Uniform>) {
          if (!std::isfinite(d.low) || !std::isfinite(d.high) || d.low > d.high)
            problems.push_back(where + ": uniform needs finite low <= high");
        } else {
          if (!std::isfinite(d.value)) problems.push_back(where + ": constant must be finite");
        }
      },
      dist);
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("bad number '" + item + "' in distribution");
    }
    if (used != item.size()) throw ValidationError("bad number '" + item + "' in distribution");
    out.push_back(v);
  }
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::string field)
    : std::runtime_error(line == 0 && field.empty() ? what
                                                    : what + " (" + location(line, field) + ")"),
      detail_(what),
      line_(line),
      field_(std::move(field)) {}

double QuboInstance::at(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  auto it = entries.find({i, j});
  return it == entries.end() ? 0.0 : it->second;
}

void QuboInstance::set(Index i, Index j, double value) {
  if (i > j) std::swap(i, j);
  if (value == 0.0) {
    entries.erase({i, j});
  } else {
    entries[{i, j}] = value;
  }
}

void QuboInstance::add(Index i, Index j, double value) { set(i, j, at(i, j) + value); }

std::size_t QuboInstance::num_blocks() const {
  if (!block_labels || block_labels->empty()) return 1;
  return std::set<int>(block_labels->begin(), block_labels->end()).size();
}

double quadratic_form(const QuboInstance& instance, const std::vector<std::uint8_t>& x) {
  double total = 0.0;
  for (const auto& [key, value] : instance.entries) {
    const auto [i, j] = key;
    if (x[i] && x[j]) total += (i == j) ? value : 2.0 * value;
  }
  return total;
}

bool operator==(const WeightDistribution& a, const WeightDistribution& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&b](const auto& lhs) {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b);
        if constexpr (std::is_same_v<T, Normal>) {
          return lhs.mean == rhs.mean && lhs.stddev == rhs.stddev;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return lhs.rate == rhs.rate;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return lhs.low == rhs.low && lhs.high == rhs.high;
        } else {
          return lhs.value == rhs.value;
        }
      },
      a);
}

WeightDistribution parse_distribution(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ValidationError("distribution '" + text + "' must look like kind:params");
  const std::string kind = text.substr(0, colon);
  const auto params = parse_numbers(text.substr(colon + 1));
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw ValidationError("distribution '" + text + "' expects " + std::to_string(n) +
                            " parameter(s)");
  };
  WeightDistribution dist;
  if (kind == "norm" || kind == "normal") {
    need(2);
    dist = Normal{params[0], params[1]};
  } else if (kind == "exp") {
    need(1);
    dist = Exponential{params[0]};
  } else if (kind == "unif" || kind == "uniform") {
    need(2);
    dist = Uniform{params[0], params[1]};
  } else if (kind == "const") {
    need(1);
    dist = Constant{params[0]};
  } else {
    throw ValidationError("unknown distribution kind '" + kind + "'");
  }
  std::vector<std::string> problems;
  check_distribution(dist, text, problems);
  if (!problems.empty()) throw ValidationError(problems.front());
  return dist;
}

std::string to_string(const WeightDistribution& dist) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return "norm:" + format_double(d.mean) + "," + format_double(d.stddev);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return "exp:" + format_double(d.rate);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return "unif:" + format_double(d.low) + "," + format_double(d.high);
        } else {
          return "const:" + format_double(d.value);
        }
      },
      dist);
}

WsbmSpec WsbmSpec::two_level(std::vector<std::size_t> block_sizes, double p_diag, double p_off,
                             WeightDistribution w_diag, WeightDistribution w_off) {
  const std::size_t n = block_sizes.size();
  WsbmSpec spec;
  spec.block_sizes = std::move(block_sizes);
  spec.connectivity.assign(n, std::vector<double>(n, p_off));
  spec.weights.assign(n, std::vector<WeightDistribution>(n, w_off));
  for (std::size_t a = 0; a < n; ++a) {
    spec.connectivity[a][a] = p_diag;
    spec.weights[a][a] = w_diag;
  }
  return spec;
}

void validate_spec(const WsbmSpec& spec) {
  std::vector<std::string> problems;
  const std::size_t n = spec.num_blocks();
  if (n == 0) problems.emplace_back("at least one block is required");
  for (std::size_t a = 0; a < n; ++a) {
    if (spec.block_sizes[a] == 0) problems.push_back("block " + std::to_string(a) + " is empty");
  }
  bool square = spec.connectivity.size() == n && spec.weights.size() == n;
  for (std::size_t a = 0; square && a < n; ++a) {
    square = spec.connectivity[a].size() == n && spec.weights[a].size() == n;
  }
  if (!square) {
    problems.push_back("connectivity and weights must be " + std::to_string(n) + "x" +
                       std::to_string(n));
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const std::string where = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
        const double p = spec.connectivity[a][b];
        if (!(p >= 0.0 && p <= 1.0)) problems.push_back("connectivity" + where + " not in [0,1]");
        if (p != spec.connectivity[b][a]) problems.push_back("connectivity" + where + " asymmetric");
        if (!(spec.weights[a][b] == spec.weights[b][a]))
          problems.push_back("weights" + where + " asymmetric");
        check_distribution(spec.weights[a][b], "weights" + where, problems);
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid WSBM spec:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ValidationError(msg);
  }
}

std::vector<double> draw_values(const WeightDistribution& dist, std::size_t count,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(count);
  for (auto& v : out) v = draw(dist, rng);
  return out;
}

QuboInstance generate_wsbm(const WsbmSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  QuboInstance inst;
  std::vector<int> labels;
  for (std::size_t a = 0; a < spec.num_blocks(); ++a) {
    labels.insert(labels.end(), spec.block_sizes[a], static_cast<int>(a));
  }
  inst.num_vars = labels.size();

  Rng rng(derive_seed(seed, "wsbm"));
  for (Index i = 0; i < inst.num_vars; ++i) {
    const auto a = static_cast<std::size_t>(labels[i]);
    inst.set(i, i, draw(spec.weights[a][a], rng));
    for (Index j = i + 1; j < inst.num_vars; ++j) {
      const auto b = static_cast<std::size_t>(labels[j]);
      if (rng.bernoulli(spec.connectivity[a][b])) inst.set(i, j, draw(spec.weights[a][b], rng));
    }
  }

  inst.block_labels = std::move(labels);
  inst.metadata["generator"] = "wsbm";
  inst.metadata["seed"] = std::to_string(seed);
  return inst;
}

std::vector<std::string> validate(const QuboInstance& instance) {
  std::vector<std::string> out;
  if (instance.num_vars == 0) out.emplace_back("num_vars must be positive");
  for (const auto& [key, value] : instance.entries) {
    const auto [i, j] = key;
    const std::string name = "entry (" + std::to_string(i) + "," + std::to_string(j) + ")";
    if (i > j) out.push_back(name + " has i > j");
    if (std::max(i, j) >= instance.num_vars) out.push_back(name + " index out of range");
    if (value == 0.0) out.push_back(name + " is an explicit zero");
    if (!std::isfinite(value)) out.push_back(name + " is not finite");
  }
  if (instance.block_labels && instance.block_labels->size() != instance.num_vars) {
    out.push_back("block_labels has " + std::to_string(instance.block_labels->size()) +
                  " entries, expected " + std::to_string(instance.num_vars));
  }
  if (instance.linear) {
    if (instance.linear->size() != instance.num_vars) {
      out.push_back("linear has " + std::to_string(instance.linear->size()) +
                    " entries, expected " + std::to_string(instance.num_vars));
    }
    if (!instance.metadata.contains("lambda"))
      out.emplace_back("linear term present without metadata.lambda");
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string to_json(const QuboInstance& instance) {
  ordered_json doc;
  doc["num_vars"] = instance.num_vars;
  auto entries = ordered_json::array();
  for (const auto& [key, value] : instance.entries) {
    entries.push_back(ordered_json::array({key.first, key.second, value}));
  }
  doc["entries"] = std::move(entries);
  if (instance.linear) doc["linear"] = *instance.linear;
  if (instance.block_labels) doc["block_labels"] = *instance.block_labels;
  auto meta = ordered_json::object();
  for (const auto& [k, v] : instance.metadata) meta[k] = v;
  doc["metadata"] = std::move(meta);

  // One entry per line keeps diffs and parse-error line numbers useful.
  std::string out = "{\n";
  bool first = true;
  for (const auto& [key, value] : doc.items()) {
    if (!first) out += ",\n";
    first = false;
    out += "  " + ordered_json(key).dump() + ": ";
    if (key == "entries" && !value.empty()) {
      out += "[\n";
      for (std::size_t k = 0; k < value.size(); ++k) {
        out += "    " + value[k].dump() + (k + 1 < value.size() ? ",\n" : "\n");
      }
      out += "  ]";
    } else {
      out += value.dump();
    }
  }
  out += "\n}\n";
  return out;
}

QuboInstance from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ParseError(std::string("malformed JSON: ") + e.what(), line);
  }
  if (!doc.is_object()) throw ParseError("instance must be a JSON object", 1);

  // Entries are written one per line, so their line is 3 + position.
  auto entry_line = [](std::size_t k) { return k + 3; };

  QuboInstance inst;
  if (!doc.contains("num_vars") || !doc["num_vars"].is_number_unsigned())
    throw ParseError("num_vars must be a non-negative integer", 0, "num_vars");
  inst.num_vars = doc["num_vars"].get<std::size_t>();
  if (inst.num_vars == 0) throw ParseError("num_vars must be positive", 0, "num_vars");

  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw ParseError("entries must be an array", 0, "entries");
  const auto& entries = doc["entries"];
  std::optional<EntryKey> prev;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string field = "entries[" + std::to_string(k) + "]";
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() ||
        !e[1].is_number_unsigned() || !e[2].is_number())
      throw ParseError("entry must be [i, j, value]", entry_line(k), field);
    const EntryKey key{e[0].get<Index>(), e[1].get<Index>()};
    const double value = e[2].get<double>();
    if (key.first > key.second) throw ParseError("entry has i > j", entry_line(k), field);
    if (key.second >= inst.num_vars)
      throw ParseError("entry index out of range", entry_line(k), field);
    if (prev && key == *prev) throw ParseError("duplicate entry", entry_line(k), field);
    if (prev && key < *prev) throw ParseError("entries not sorted by (i, j)", entry_line(k), field);
    if (value == 0.0) throw ParseError("explicit zero entry", entry_line(k), field);
    if (!std::isfinite(value)) throw ParseError("non-finite entry", entry_line(k), field);
    inst.entries.emplace_hint(inst.entries.end(), key, value);
    prev = key;
  }

  if (doc.contains("linear")) {
    const auto& lin = doc["linear"];
    if (!lin.is_array() || lin.size() != inst.num_vars)
      throw ParseError("linear must be an array of num_vars numbers", 0, "linear");
    std::vector<double> values;
    for (std::size_t k = 0; k < lin.size(); ++k) {
      if (!lin[k].is_number())
        throw ParseError("linear value must be a number", 0, "linear[" + std::to_string(k) + "]");
      values.push_back(lin[k].get<double>());
    }
    inst.linear = std::move(values);
  }
  if (doc.contains("block_labels")) {
    const auto& lab = doc["block_labels"];
    if (!lab.is_array() || lab.size() != inst.num_vars)
      throw ParseError("block_labels must be an array of num_vars integers", 0, "block_labels");
    std::vector<int> labels;
    for (std::size_t k = 0; k < lab.size(); ++k) {
      if (!lab[k].is_number_integer())
        throw ParseError("block label must be an integer", 0,
                         "block_labels[" + std::to_string(k) + "]");
      labels.push_back(lab[k].get<int>());
    }
    inst.block_labels = std::move(labels);
  }
  if (doc.contains("metadata")) {
    const auto& meta = doc["metadata"];
    if (!meta.is_object()) throw ParseError("metadata must be an object", 0, "metadata");
    for (const auto& [k, v] : meta.items()) {
      if (!v.is_string())
        throw ParseError("metadata values must be strings", 0, "metadata." + k);
      inst.metadata[k] = v.get<std::string>();
    }
  }
  for (const auto& [k, v] : doc.items()) {
    (void)v;
    if (k != "num_vars" && k != "entries" && k != "linear" && k != "block_labels" &&
        k != "metadata")
      throw ParseError("unknown field", 0, k);
  }
  if (inst.linear && !inst.metadata.contains("lambda"))
    throw ParseError("linear requires metadata.lambda", 0, "metadata.lambda");
  return inst;
}

void save(const QuboInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json(instance);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

QuboInstance load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line(), e.field());
  }
}

}  // namespace qimf
