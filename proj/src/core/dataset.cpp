#include "certdag/core/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "certdag/core/csv.hpp"
#include "certdag/core/types.hpp"

namespace certdag {

namespace {

double parse_number(const std::string& s, std::size_t row, std::size_t col) {
  std::string_view v(s);
  while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
  while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw CertdagError("MALFORMED_CSV", "non-numeric or missing value at row " + std::to_string(row + 1) +
                                            ", column " + std::to_string(col + 1));
  }
  return out;
}

Dataset from_rows(const std::vector<csv::Row>& rows) {
  if (rows.empty()) throw CertdagError("MALFORMED_CSV", "empty CSV");
  const auto& header = rows.front();
  if (header.empty()) throw CertdagError("MALFORMED_CSV", "empty header");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(header.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw CertdagError("MALFORMED_CSV", "row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                              " fields, header has " + std::to_string(header.size()));
    for (std::size_t c = 0; c < header.size(); ++c)
      values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = parse_number(rows[r][c], r, c);
  }
  return Dataset(std::move(values), header);
}

}  // namespace

VariableMeta describe_column(const Eigen::VectorXd& col) {
  VariableMeta m;
  std::vector<double> v(col.data(), col.data() + col.size());
  std::sort(v.begin(), v.end());
  m.cardinality = static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
  m.is_integer_valued = std::all_of(col.data(), col.data() + col.size(),
                                    [](double x) { return std::floor(x) == x && std::abs(x) < 1e15; });
  return m;
}

Dataset::Dataset(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  if (static_cast<std::size_t>(values_.cols()) != names_.size())
    throw std::invalid_argument("column count does not match names");
  compute_meta();
}

void Dataset::compute_meta() {
  meta_.clear();
  for (int v = 0; v < vars(); ++v) meta_.push_back(describe_column(values_.col(v)));
}

Dataset Dataset::from_csv(const std::string& path) { return from_rows(csv::read_file(path)); }

Dataset Dataset::from_csv_text(const std::string& text) { return from_rows(csv::parse(text)); }

int Dataset::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

Dataset Dataset::head(int n) const {
  n = std::min(n, rows());
  Dataset out(values_.topRows(n), names_);
  for (int v = 0; v < vars(); ++v)
    if (meta(v).flagged_circular) out.flag_circular(v);
  return out;
}

std::string Dataset::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= p[k];
      h *= 1099511628211ull;
    }
  };
  for (const auto& n : names_) mix(n.data(), n.size() + 1);
  for (Eigen::Index c = 0; c < values_.cols(); ++c)
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      double x = values_(r, c);
      mix(&x, sizeof x);
    }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> Dataset::validate(int min_samples) const {
  std::vector<std::string> warnings;
  for (int v = 0; v < vars(); ++v) {
    if (!values_.col(v).allFinite()) throw CertdagError("MALFORMED_CSV", "missing value in column " + name(v));
    if (meta(v).cardinality < 2)
      throw CertdagError("MALFORMED_CSV", "column " + name(v) + " has fewer than 2 distinct values");
  }
  if (rows() < min_samples)
    warnings.push_back("sample size " + std::to_string(rows()) + " is below the minimum of " +
                       std::to_string(min_samples));
  if (vars() < 2) warnings.push_back("dataset has fewer than two variables; nothing to orient");
  return warnings;
}

}  // namespace certdag
