#include "mixsaem/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>

namespace mixsaem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Data rows are reported 1-based, header excluded.
std::string cell_id(std::size_t row, const std::string& column) {
  return "row " + std::to_string(row + 1) + ", column '" + column + "'";
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (c == '"') {
      if (quoted && k + 1 < line.size() && line[k + 1] == '"') {
        cell.push_back('"');
        ++k;
      } else {
        quoted = !quoted;
      }
    } else if (c == delim && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  for (auto& s : out) {
    const auto first = s.find_first_not_of(" \t\r");
    const auto last = s.find_last_not_of(" \t\r");
    s = first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_int(const std::string& s, int& out) {
  double d = 0.0;
  if (!parse_double(s, d)) return false;
  if (d != std::floor(d) || std::abs(d) > 1e9) return false;
  out = static_cast<int>(d);
  return true;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t Schema::num_discrete() const {
  return static_cast<std::size_t>(std::count_if(
      columns.begin(), columns.end(), [](const auto& c) { return c.is_discrete(); }));
}

std::size_t Schema::num_continuous() const { return columns.size() - num_discrete(); }

std::vector<int> Schema::discrete_levels() const {
  std::vector<int> out;
  for (const auto& c : columns)
    if (c.is_discrete()) out.push_back(c.levels);
  return out;
}

void Schema::validate() const {
  std::set<std::string> names{outcome};
  bool seen_continuous = false;
  for (const auto& c : columns) {
    if (c.name.empty()) throw DataError("schema: empty column name");
    if (!names.insert(c.name).second)
      throw DataError("schema: duplicate column name '" + c.name + "'");
    if (c.is_discrete()) {
      if (seen_continuous)
        throw DataError("schema: discrete column '" + c.name +
                        "' follows a continuous column");
      if (c.levels < 2)
        throw DataError("schema: discrete column '" + c.name + "' needs at least 2 levels");
      for (const auto& [label, code] : c.labels)
        if (code < 1 || code > c.levels)
          throw DataError("schema: label '" + label + "' of '" + c.name +
                          "' maps outside 1.." + std::to_string(c.levels));
    } else {
      seen_continuous = true;
      if (c.levels != 0)
        throw DataError("schema: continuous column '" + c.name + "' declares levels");
    }
  }
}

void Schema::normalize_order() {
  std::stable_partition(columns.begin(), columns.end(),
                        [](const auto& c) { return c.is_discrete(); });
}

Schema schema_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("schema: invalid JSON: ") + e.what());
  }
  Schema schema;
  schema.outcome = j.value("outcome", std::string("y"));
  if (!j.contains("columns") || !j["columns"].is_array())
    throw DataError("schema: missing 'columns' array");
  for (const auto& c : j["columns"]) {
    VariableSchema v;
    v.name = c.at("name").get<std::string>();
    const auto kind = c.at("kind").get<std::string>();
    if (kind == "discrete") {
      v.kind = VariableKind::Discrete;
      if (c.contains("labels")) {
        const auto& labels = c["labels"];
        if (labels.is_array()) {
          int code = 1;
          for (const auto& l : labels) v.labels[l.get<std::string>()] = code++;
          v.levels = c.value("levels", code - 1);
        } else {
          for (auto it = labels.begin(); it != labels.end(); ++it)
            v.labels[it.key()] = it.value().get<int>();
          v.levels = c.at("levels").get<int>();
        }
      } else {
        v.levels = c.at("levels").get<int>();
      }
    } else if (kind == "continuous") {
      v.kind = VariableKind::Continuous;
    } else {
      throw DataError("schema: unknown kind '" + kind + "' for '" + v.name + "'");
    }
    schema.columns.push_back(std::move(v));
  }
  schema.normalize_order();
  schema.validate();
  return schema;
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return schema_from_json(buf.str());
}

std::string schema_to_json(const Schema& schema) {
  nlohmann::json j;
  j["outcome"] = schema.outcome;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : schema.columns) {
    nlohmann::json col{{"name", c.name},
                       {"kind", c.is_discrete() ? "discrete" : "continuous"}};
    if (c.is_discrete()) {
      col["levels"] = c.levels;
      if (!c.labels.empty()) {
        nlohmann::json labels = nlohmann::json::object();
        for (const auto& [label, code] : c.labels) labels[label] = code;
        col["labels"] = labels;
      }
    }
    j["columns"].push_back(col);
  }
  return j.dump(2);
}

HybridDataset::HybridDataset(Schema schema, std::vector<int> outcomes,
                             Eigen::MatrixXd values, BoolMatrix mask)
    : schema_(std::move(schema)),
      outcomes_(std::move(outcomes)),
      values_(std::move(values)),
      mask_(std::move(mask)) {
  schema_.validate();
  num_discrete_ = schema_.num_discrete();
  validate();
}

void HybridDataset::validate() const {
  const auto n = outcomes_.size();
  const auto p = schema_.size();
  if (static_cast<std::size_t>(values_.rows()) != n ||
      static_cast<std::size_t>(values_.cols()) != p)
    throw DataError("dataset: values matrix shape does not match schema/outcomes");
  if (mask_.rows() != values_.rows() || mask_.cols() != values_.cols())
    throw DataError("dataset: mask and values differ in shape");
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes_[i] != 0 && outcomes_[i] != 1)
      throw DataError("dataset: outcome at row " + std::to_string(i) + " is not 0/1");
    for (std::size_t j = 0; j < p; ++j) {
      if (!mask_(i, j)) continue;
      const double v = values_(i, j);
      const auto& col = schema_.columns[j];
      if (!std::isfinite(v))
        throw DataError("dataset: non-finite observed value at " + cell_id(i, col.name));
      if (col.is_discrete() && (v != std::floor(v) || v < 1 || v > col.levels))
        throw DataError("dataset: discrete value outside 1.." + std::to_string(col.levels) +
                        " at " + cell_id(i, col.name));
    }
  }
}

std::size_t HybridDataset::missing_count() const {
  return static_cast<std::size_t>((!mask_).count());
}

HybridDataset HybridDataset::subset(const std::vector<std::size_t>& rows) const {
  const auto p = static_cast<Eigen::Index>(schema_.size());
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), p);
  BoolMatrix mask(static_cast<Eigen::Index>(rows.size()), p);
  std::vector<int> outcomes;
  outcomes.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(rows[k]);
    if (rows[k] >= outcomes_.size()) throw DataError("subset: row index out of range");
    values.row(static_cast<Eigen::Index>(k)) = values_.row(i);
    mask.row(static_cast<Eigen::Index>(k)) = mask_.row(i);
    outcomes.push_back(outcomes_[rows[k]]);
  }
  return HybridDataset(schema_, std::move(outcomes), std::move(values), std::move(mask));
}

HybridDataset HybridDataset::with_mask(const BoolMatrix& mask) const {
  if (mask.rows() != mask_.rows() || mask.cols() != mask_.cols())
    throw DataError("with_mask: shape mismatch");
  Eigen::MatrixXd values = values_;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      if (!mask(i, j)) {
        values(i, j) = kNaN;
      } else if (!mask_(i, j)) {
        throw DataError("with_mask: cannot reveal a missing cell");
      }
  return HybridDataset(schema_, outcomes_, std::move(values), mask);
}

SampleView sample_view(const HybridDataset& ds, std::size_t i) {
  SampleView s;
  s.index = i;
  s.y = ds.outcomes().at(i);
  const auto l = ds.num_discrete();
  const auto h = ds.num_continuous();
  const auto row = static_cast<Eigen::Index>(i);
  s.discrete.assign(l, 0);
  for (std::size_t j = 0; j < l; ++j) {
    if (ds.observed(i, j)) {
      s.discrete[j] = static_cast<int>(ds.values()(row, static_cast<Eigen::Index>(j)));
      s.obs_discrete.push_back(j);
    } else {
      s.mis_discrete.push_back(j);
    }
  }
  s.continuous = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(h), kNaN);
  for (std::size_t k = 0; k < h; ++k) {
    if (ds.observed(i, l + k)) {
      s.continuous(static_cast<Eigen::Index>(k)) =
          ds.values()(row, static_cast<Eigen::Index>(l + k));
      s.obs_continuous.push_back(k);
    } else {
      s.mis_continuous.push_back(k);
    }
  }
  return s;
}

HybridDataset parse_csv(const std::string& text, const Schema& schema,
                        const CsvOptions& options) {
  schema.validate();
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty input");
  const auto header = split_line(line, options.delimiter);

  // Map schema columns onto CSV positions.
  const auto p = schema.size();
  std::vector<std::size_t> position(p);
  std::size_t outcome_pos = header.size();
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!seen.insert(header[c]).second)
      throw DataError("csv: duplicate header column '" + header[c] + "'");
  }
  if (header.size() != p + 1)
    throw DataError("csv: header has " + std::to_string(header.size()) +
                    " columns, schema expects " + std::to_string(p + 1));
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == schema.outcome) outcome_pos = c;
  if (outcome_pos == header.size())
    throw DataError("csv: outcome column '" + schema.outcome + "' not in header");
  for (std::size_t j = 0; j < p; ++j) {
    const auto it = std::find(header.begin(), header.end(), schema.columns[j].name);
    if (it == header.end())
      throw DataError("csv: schema column '" + schema.columns[j].name + "' not in header");
    position[j] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> masks;
  std::vector<int> outcomes;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_line(line, options.delimiter);
    if (cells.size() != header.size())
      throw DataError("csv: row " + std::to_string(row + 1) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    const auto& yc = cells[outcome_pos];
    int y = 0;
    if (yc == options.na_token)
      throw DataError("csv: missing outcome at " + cell_id(row, schema.outcome));
    if (!parse_int(yc, y) || (y != 0 && y != 1))
      throw DataError("csv: outcome must be 0 or 1 at " + cell_id(row, schema.outcome));
    std::vector<double> vals(p, kNaN);
    std::vector<bool> mask(p, true);
    for (std::size_t j = 0; j < p; ++j) {
      const auto& col = schema.columns[j];
      const auto& cell = cells[position[j]];
      if (cell == options.na_token) {
        mask[j] = false;
        continue;
      }
      if (col.is_discrete()) {
        int level = 0;
        if (auto it = col.labels.find(cell); it != col.labels.end()) {
          level = it->second;
        } else if (!parse_int(cell, level)) {
          throw DataError("csv: unparseable discrete cell '" + cell + "' at " +
                          cell_id(row, col.name));
        }
        if (level < 1 || level > col.levels)
          throw DataError("csv: level " + std::to_string(level) + " outside 1.." +
                          std::to_string(col.levels) + " at " + cell_id(row, col.name));
        vals[j] = level;
      } else if (!parse_double(cell, vals[j])) {
        throw DataError("csv: unparseable continuous cell '" + cell + "' at " +
                        cell_id(row, col.name));
      }
    }
    rows.push_back(std::move(vals));
    masks.push_back(std::move(mask));
    outcomes.push_back(y);
    ++row;
  }
  if (rows.empty()) throw DataError("csv: no data rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd values(n, static_cast<Eigen::Index>(p));
  BoolMatrix mask(n, static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      values(i, static_cast<Eigen::Index>(j)) = rows[static_cast<std::size_t>(i)][j];
      mask(i, static_cast<Eigen::Index>(j)) = masks[static_cast<std::size_t>(i)][j];
    }
  return HybridDataset(schema, std::move(outcomes), std::move(values), std::move(mask));
}

HybridDataset load_csv(const std::string& path, const Schema& schema,
                       const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema, options);
}

std::string format_csv(const HybridDataset& ds, const CsvOptions& options) {
  const auto& schema = ds.schema();
  std::string out;
  for (const auto& c : schema.columns) {
    out += c.name;
    out += options.delimiter;
  }
  out += schema.outcome;
  out += '\n';
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (!ds.observed(i, j)) {
        out += options.na_token;
      } else {
        const double v = ds.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out += schema.columns[j].is_discrete() ? std::to_string(static_cast<int>(v))
                                               : format_real(v);
      }
      out += options.delimiter;
    }
    out += std::to_string(ds.outcomes()[i]);
    out += '\n';
  }
  return out;
}

void save_csv(const HybridDataset& ds, const std::string& path, const CsvOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write csv file '" + path + "'");
  out << format_csv(ds, options);
  if (!out) throw DataError("failed writing csv file '" + path + "'");
}

std::pair<HybridDataset, HybridDataset> split_train_test(const HybridDataset& ds,
                                                         double test_fraction,
                                                         std::uint64_t seed) {
  const auto n = ds.rows();
  if (n < 2) throw DataError("split: need at least 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw DataError("split: test fraction must lie in (0, 1)");
  const auto n_test = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * test_fraction + 1e-9));
  if (n_test == 0 || n_test >= n)
    throw DataError("split: fraction leaves an empty partition");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  // Fisher-Yates with our own index draws: std::shuffle is not portable
  // across standard libraries.
  for (std::size_t k = n - 1; k > 0; --k) {
    const auto r = static_cast<std::size_t>(rng() % (k + 1));
    std::swap(order[k], order[r]);
  }
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<long>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<long>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {ds.subset(train), ds.subset(test)};
}

}  // namespace mixsaem
