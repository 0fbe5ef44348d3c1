#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace certdag {

struct VariableMeta {
  bool is_integer_valued = false;
  int cardinality = 0;  // distinct values
  bool flagged_circular = false;
};

/// N x V observational sample matrix. Node identity is the column index.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Eigen::MatrixXd values, std::vector<std::string> names);

  /// Headered CSV, one column per variable. Throws CertdagError("MALFORMED_CSV").
  static Dataset from_csv(const std::string& path);
  static Dataset from_csv_text(const std::string& text);

  int rows() const { return static_cast<int>(values_.rows()); }
  int vars() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::VectorXd column(int v) const { return values_.col(v); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int v) const { return names_[static_cast<std::size_t>(v)]; }
  int index_of(const std::string& name) const;  // -1 when absent
  const VariableMeta& meta(int v) const { return meta_[static_cast<std::size_t>(v)]; }

  void flag_circular(int v) { meta_[static_cast<std::size_t>(v)].flagged_circular = true; }

  /// Row subset, keeping metadata recomputed on the subset.
  Dataset head(int n) const;

  /// FNV-1a over the raw bytes of the matrix and the header.
  std::string content_hash() const;

  /// Checks the hard invariants (no missing values, >= 2 distinct values per column).
  /// Returns human-readable warnings for soft ones (N below `min_samples`).
  std::vector<std::string> validate(int min_samples) const;

 private:
  void compute_meta();

  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
  std::vector<VariableMeta> meta_;
};

VariableMeta describe_column(const Eigen::VectorXd& col);

}  // namespace certdag
