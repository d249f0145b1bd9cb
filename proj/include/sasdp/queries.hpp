#pragma once

// Dataset ingestion, bounded query evaluation, and sensitivity computation
// under removal neighboring (datasets differing by the presence or absence
// of exactly one record).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sasdp {

/// Immutable tabular dataset: named real-valued columns, one row per record.
struct Dataset {
  std::vector<std::string> fields;
  std::vector<std::vector<double>> rows;

  std::size_t n() const { return rows.size(); }

  std::size_t field_index(const std::string& name) const {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == name) return i;
    }
    throw std::invalid_argument("dataset has no field named '" + name + "'");
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_field(const std::string& token, std::size_t row,
                          const std::string& field) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  const char* stop = last;
  while (stop != first && (stop[-1] == ' ' || stop[-1] == '\t')) --stop;
  if (first == stop) {
    throw std::runtime_error("csv row " + std::to_string(row) + ", field '" + field +
                             "': missing value");
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, stop, value);
  if (ec != std::errc{} || ptr != stop || !std::isfinite(value)) {
    throw std::runtime_error("csv row " + std::to_string(row) + ", field '" + field +
                             "': cannot parse '" + token + "' as a finite real");
  }
  return value;
}

}  // namespace detail

/// Reads UTF-8 comma-separated data with a mandatory header row. Malformed
/// rows are rejected with 1-based row numbers (the header is row 1); missing
/// values are a hard error.
inline Dataset read_csv(std::istream& in) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header row");
  ds.fields = detail::split_csv_line(line);
  for (auto& f : ds.fields) {
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    if (f.empty()) throw std::runtime_error("csv: empty field name in header");
  }
  for (std::size_t i = 0; i < ds.fields.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.fields.size(); ++j) {
      if (ds.fields[i] == ds.fields[j]) {
        throw std::runtime_error("csv: duplicate field name '" + ds.fields[i] + "'");
      }
    }
  }
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const auto tokens = detail::split_csv_line(line);
    if (tokens.size() != ds.fields.size()) {
      throw std::runtime_error("csv row " + std::to_string(row_no) + ": expected " +
                               std::to_string(ds.fields.size()) + " fields, found " +
                               std::to_string(tokens.size()));
    }
    std::vector<double> row(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      row[i] = detail::parse_field(tokens[i], row_no, ds.fields[i]);
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

inline Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file '" + path + "'");
  return read_csv(in);
}

/// Query descriptor. COUNT and CLIPPED_MEAN release one value; HISTOGRAM
/// releases one value per bin.
class BoundedQuery {
 public:
  enum class Kind { kCount, kClippedMean, kHistogram };

  static BoundedQuery count(double n_max = 1e9) {
    if (!(n_max > 0.0)) throw std::invalid_argument("count: n_max must be positive");
    BoundedQuery q;
    q.kind_ = Kind::kCount;
    q.n_max_ = n_max;
    return q;
  }

  static BoundedQuery clipped_mean(std::string field, double lower, double upper) {
    if (!(lower < upper)) {
      throw std::invalid_argument("clipped_mean: requires lower < upper");
    }
    BoundedQuery q;
    q.kind_ = Kind::kClippedMean;
    q.field_ = std::move(field);
    q.lower_ = lower;
    q.upper_ = upper;
    return q;
  }

  static BoundedQuery histogram(std::string field, std::vector<double> edges) {
    if (edges.size() < 2) {
      throw std::invalid_argument("histogram: needs at least two bin edges");
    }
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      if (!(edges[i] < edges[i + 1])) {
        throw std::invalid_argument("histogram: bin edges must be strictly increasing");
      }
    }
    BoundedQuery q;
    q.kind_ = Kind::kHistogram;
    q.field_ = std::move(field);
    q.edges_ = std::move(edges);
    return q;
  }

  Kind kind() const { return kind_; }
  const std::string& field() const { return field_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double n_max() const { return n_max_; }
  const std::vector<double>& edges() const { return edges_; }

  std::size_t output_dim() const {
    return kind_ == Kind::kHistogram ? edges_.size() - 1 : 1;
  }

 private:
  Kind kind_ = Kind::kCount;
  std::string field_;
  double lower_ = 0.0;
  double upper_ = 1.0;
  double n_max_ = 1e9;
  std::vector<double> edges_;
};

/// Query response with its per-coordinate codomain bounds.
struct QueryResult {
  std::vector<double> values;
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;
};

inline QueryResult evaluate(const Dataset& ds, const BoundedQuery& query) {
  QueryResult r;
  switch (query.kind()) {
    case BoundedQuery::Kind::kCount: {
      const double n = static_cast<double>(ds.n());
      if (n > query.n_max()) {
        throw std::invalid_argument("count: dataset exceeds the configured n_max cap");
      }
      r.values = {n};
      r.lower_bounds = {0.0};
      r.upper_bounds = {query.n_max()};
      return r;
    }
    case BoundedQuery::Kind::kClippedMean: {
      if (ds.n() == 0) {
        throw std::invalid_argument("clipped_mean: undefined on an empty dataset");
      }
      const std::size_t col = ds.field_index(query.field());
      double sum = 0.0;
      for (const auto& row : ds.rows) {
        sum += std::clamp(row[col], query.lower(), query.upper());
      }
      r.values = {sum / static_cast<double>(ds.n())};
      r.lower_bounds = {query.lower()};
      r.upper_bounds = {query.upper()};
      return r;
    }
    case BoundedQuery::Kind::kHistogram: {
      const std::size_t col = ds.field_index(query.field());
      const auto& e = query.edges();
      std::vector<double> counts(e.size() - 1, 0.0);
      for (const auto& row : ds.rows) {
        const double v = row[col];
        if (v < e.front() || v > e.back()) continue;
        // half-open bins [e_i, e_{i+1}), last bin closed
        auto it = std::upper_bound(e.begin(), e.end(), v);
        std::size_t bin = static_cast<std::size_t>(it - e.begin());
        bin = bin == 0 ? 0 : bin - 1;
        if (bin >= counts.size()) bin = counts.size() - 1;
        counts[bin] += 1.0;
      }
      r.values = std::move(counts);
      r.lower_bounds.assign(r.values.size(), 0.0);
      r.upper_bounds.assign(r.values.size(), static_cast<double>(ds.n()));
      return r;
    }
  }
  throw std::invalid_argument("evaluate: unknown query kind");
}

/// The n leave-one-out datasets, in record order.
inline std::vector<Dataset> neighbors(const Dataset& ds) {
  if (ds.n() == 0) throw std::invalid_argument("neighbors: dataset must be non-empty");
  std::vector<Dataset> out;
  out.reserve(ds.n());
  for (std::size_t k = 0; k < ds.n(); ++k) {
    Dataset d;
    d.fields = ds.fields;
    d.rows.reserve(ds.n() - 1);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (i != k) d.rows.push_back(ds.rows[i]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

namespace detail {

inline double p_norm(const std::vector<double>& a, const std::vector<double>& b,
                     double p) {
  double acc = 0.0;
  if (std::isinf(p)) {
    for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
    return acc;
  }
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace detail

/// Worst-case p-norm change of the query across removal neighbors of any
/// dataset of size n. p must be >= 1 (or infinity).
inline double global_sensitivity(const BoundedQuery& query, std::size_t n, double p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("global_sensitivity: unsupported norm order p < 1");
  }
  switch (query.kind()) {
    case BoundedQuery::Kind::kCount:
      return 1.0;  // removal changes the count by exactly one
    case BoundedQuery::Kind::kClippedMean:
      if (n < 2) {
        throw std::invalid_argument(
            "global_sensitivity: clipped_mean requires n >= 2 (the neighbor of a "
            "single-record dataset is empty)");
      }
      return (query.upper() - query.lower()) / static_cast<double>(n);
    case BoundedQuery::Kind::kHistogram:
      return 1.0;  // one record occupies one bin; any p-norm of a unit change is 1
  }
  throw std::invalid_argument("global_sensitivity: unknown query kind");
}

/// Realized sensitivity: max over the leave-one-out neighbors of
/// ||f(D) - f(D')||_p. Never exceeds global_sensitivity at the same n.
inline double empirical_sensitivity(const Dataset& ds, const BoundedQuery& query,
                                    double p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("empirical_sensitivity: unsupported norm order p < 1");
  }
  if (query.kind() == BoundedQuery::Kind::kClippedMean && ds.n() < 2) {
    throw std::invalid_argument("empirical_sensitivity: clipped_mean requires n >= 2");
  }
  const QueryResult base = evaluate(ds, query);
  double worst = 0.0;
  for (const Dataset& nb : neighbors(ds)) {
    const QueryResult other = evaluate(nb, query);
    worst = std::max(worst, detail::p_norm(base.values, other.values, p));
  }
  return worst;
}

}  // namespace sasdp
