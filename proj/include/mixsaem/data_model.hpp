#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mixsaem/common.hpp"

namespace mixsaem {

enum class VariableKind { Continuous, Discrete };

/// One covariate column. Discrete levels are coded 1..levels; `labels`
/// optionally maps raw CSV strings onto those codes.
struct VariableSchema {
  std::string name;
  VariableKind kind = VariableKind::Continuous;
  int levels = 0;
  std::map<std::string, int> labels;

  bool is_discrete() const { return kind == VariableKind::Discrete; }
};

/// Covariate schema plus the name of the outcome column. Discrete
/// variables always precede continuous ones.
struct Schema {
  std::vector<VariableSchema> columns;
  std::string outcome = "y";

  std::size_t num_discrete() const;
  std::size_t num_continuous() const;
  std::size_t size() const { return columns.size(); }
  std::vector<int> discrete_levels() const;
  /// Throws DataError on duplicate names, bad level counts or ordering.
  void validate() const;
  /// Stable-partitions discrete columns in front of continuous ones.
  void normalize_order();
};

Schema schema_from_json(const std::string& json_text);
Schema load_schema(const std::string& path);
std::string schema_to_json(const Schema& schema);

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// n samples of a binary outcome plus l discrete and h continuous
/// covariates. `values` holds discrete level codes as doubles; cells with
/// mask == false are missing and their value is unspecified (NaN).
class HybridDataset {
 public:
  HybridDataset() = default;
  HybridDataset(Schema schema, std::vector<int> outcomes,
                Eigen::MatrixXd values, BoolMatrix mask);

  const Schema& schema() const { return schema_; }
  const std::vector<int>& outcomes() const { return outcomes_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const BoolMatrix& mask() const { return mask_; }

  std::size_t rows() const { return outcomes_.size(); }
  std::size_t num_discrete() const { return num_discrete_; }
  std::size_t num_continuous() const { return schema_.size() - num_discrete_; }

  bool observed(std::size_t i, std::size_t j) const { return mask_(i, j); }
  bool fully_observed() const { return mask_.all(); }
  bool row_complete(std::size_t i) const { return mask_.row(i).all(); }
  std::size_t missing_count() const;

  /// Dataset restricted to the given rows, in the given order.
  HybridDataset subset(const std::vector<std::size_t>& rows) const;
  /// Copy with a replaced mask; newly masked cells are set to NaN.
  HybridDataset with_mask(const BoolMatrix& mask) const;

 private:
  void validate() const;

  Schema schema_;
  std::vector<int> outcomes_;
  Eigen::MatrixXd values_;
  BoolMatrix mask_;
  std::size_t num_discrete_ = 0;
};

/// Per-sample partition of the coordinates into observed and missing parts.
/// Discrete indices are in 0..l-1, continuous indices in 0..h-1.
struct SampleView {
  std::size_t index = 0;
  int y = 0;
  std::vector<int> discrete;  // level codes, 0 where missing
  std::vector<std::size_t> obs_discrete;
  std::vector<std::size_t> mis_discrete;
  Eigen::VectorXd continuous;  // NaN where missing
  std::vector<std::size_t> obs_continuous;
  std::vector<std::size_t> mis_continuous;

  bool complete() const {
    return mis_discrete.empty() && mis_continuous.empty();
  }
};

SampleView sample_view(const HybridDataset& ds, std::size_t i);

struct CsvOptions {
  char delimiter = ',';
  std::string na_token = "NA";
};

HybridDataset load_csv(const std::string& path, const Schema& schema,
                       const CsvOptions& options = {});
HybridDataset parse_csv(const std::string& text, const Schema& schema,
                        const CsvOptions& options = {});
void save_csv(const HybridDataset& ds, const std::string& path,
              const CsvOptions& options = {});
std::string format_csv(const HybridDataset& ds, const CsvOptions& options = {});

/// Random row partition with ceil(n(1-f)) training and floor(n f) test rows.
std::pair<HybridDataset, HybridDataset> split_train_test(
    const HybridDataset& ds, double test_fraction, std::uint64_t seed);

}  // namespace mixsaem
