#include "thyro/feature_table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "thyro/util.hpp"

namespace thyro {

using nlohmann::json;

int FeatureTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

FeatureTable FeatureTable::select_columns(const std::vector<std::string>& names) const {
  FeatureTable out;
  out.case_ids = case_ids;
  out.centers = centers;
  out.labels = labels;
  out.columns = names;
  std::vector<int> idx;
  for (const auto& n : names) {
    int i = column_index(n);
    if (i < 0) throw ContractError("select_columns: unknown column '" + n + "'");
    idx.push_back(i);
  }
  out.rows.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> r;
    r.reserve(idx.size());
    for (int i : idx) r.push_back(row[i]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

FeatureTable FeatureTable::select_rows(const std::vector<size_t>& indices) const {
  FeatureTable out;
  out.columns = columns;
  for (size_t i : indices) {
    out.case_ids.push_back(case_ids[i]);
    out.centers.push_back(centers[i]);
    out.labels.push_back(labels[i]);
    out.rows.push_back(rows[i]);
  }
  return out;
}

void validate(const FeatureTable& t) {
  if (t.case_ids.size() != t.rows.size() || t.centers.size() != t.rows.size() ||
      t.labels.size() != t.rows.size())
    throw ContractError("feature table: row/label/center lengths differ");
  std::set<std::string> names(t.columns.begin(), t.columns.end());
  if (names.size() != t.columns.size()) throw ContractError("feature table: duplicate column");
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw ContractError("feature table: ragged row");
    for (double v : row)
      if (!std::isfinite(v)) throw ContractError("feature table: non-finite value");
  }
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t) {
  validate(t);
  std::ostringstream out;
  out << "case_id,center_id,label";
  for (const auto& c : t.columns) out << ',' << c;
  out << '\n';
  for (size_t i = 0; i < t.rows.size(); ++i) {
    out << t.case_ids[i] << ',' << t.centers[i] << ',' << t.labels[i];
    for (double v : t.rows[i]) out << ',' << format_double(v);
    out << '\n';
  }
  atomic_write_file(path, out.str());
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("schema error: empty CSV " + path.string());

  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
    return parts;
  };

  std::vector<std::string> header = split(line);
  if (header.size() < 4 || header[0] != "case_id" || header[1] != "center_id" ||
      header[2] != "label")
    throw SchemaError("schema error: " + path.string() +
                      ": expected header case_id,center_id,label,<features>");
  FeatureTable t;
  t.columns.assign(header.begin() + 3, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts = split(line);
    if (parts.size() != header.size())
      throw SchemaError("schema error: " + path.string() + ": ragged CSV row");
    t.case_ids.push_back(parts[0]);
    t.centers.push_back(std::stoi(parts[1]));
    t.labels.push_back(parts[2]);
    std::vector<double> row;
    row.reserve(parts.size() - 3);
    for (size_t i = 3; i < parts.size(); ++i) row.push_back(std::stod(parts[i]));
    t.rows.push_back(std::move(row));
  }
  validate(t);
  return t;
}

TableZscoreResult table_zscore(const FeatureTable& train, const FeatureTable& apply_to) {
  validate(train);
  validate(apply_to);
  if (train.columns != apply_to.columns)
    throw ContractError("table_zscore: column sets differ");
  if (train.rows.empty()) throw InvalidRangeError("table_zscore: empty training table");

  TableZscoreResult res;
  res.train = train;
  res.applied = apply_to;
  const size_t n = train.rows.size();
  for (size_t c = 0; c < train.columns.size(); ++c) {
    double mean = 0.0;
    for (const auto& row : train.rows) mean += row[c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& row : train.rows) var += (row[c] - mean) * (row[c] - mean);
    var /= static_cast<double>(n);
    if (var == 0.0) {
      res.constant_columns.push_back(train.columns[c]);  // pass through unscaled
      continue;
    }
    double inv_sd = 1.0 / std::sqrt(var);
    for (auto& row : res.train.rows) row[c] = (row[c] - mean) * inv_sd;
    for (auto& row : res.applied.rows) row[c] = (row[c] - mean) * inv_sd;
  }
  return res;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&x](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

bool is_constant(const std::vector<double>& x) {
  for (double v : x)
    if (v != x[0]) return false;
  return true;
}

}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ContractError("spearman_rho: length mismatch");
  if (x.size() < 2) throw InvalidRangeError("spearman_rho: need length >= 2");
  if (is_constant(x) || is_constant(y))
    throw DegenerateError("spearman_rho: constant input, correlation undefined");
  return pearson(average_ranks(x), average_ranks(y));
}

CorrelationFilterResult correlation_filter(const FeatureTable& table, double threshold) {
  validate(table);
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw InvalidRangeError("correlation_filter: threshold must be in (0, 1]");

  const size_t nc = table.columns.size();
  std::vector<std::vector<double>> cols(nc, std::vector<double>(table.rows.size()));
  for (size_t r = 0; r < table.rows.size(); ++r)
    for (size_t c = 0; c < nc; ++c) cols[c][r] = table.rows[r][c];

  std::vector<char> constant(nc, 0);
  std::vector<std::vector<double>> ranks(nc);
  for (size_t c = 0; c < nc; ++c) {
    constant[c] = is_constant(cols[c]) ? 1 : 0;
    if (!constant[c]) ranks[c] = average_ranks(cols[c]);
  }

  std::vector<char> dropped(nc, 0);
  for (size_t i = 0; i < nc; ++i) {
    for (size_t j = i + 1; j < nc; ++j) {
      if (dropped[j] || constant[i] || constant[j]) continue;
      double rho = pearson(ranks[i], ranks[j]);
      if (std::abs(rho) > threshold) dropped[j] = 1;
    }
  }

  CorrelationFilterResult res;
  for (size_t c = 0; c < nc; ++c)
    (dropped[c] ? res.dropped : res.kept).push_back(table.columns[c]);
  return res;
}

RfeResult rfe_select(const FeatureTable& table, int k, const GbdtHyperparams& trainer_config) {
  validate(table);
  if (k < 1) throw InvalidRangeError("rfe_select: k must be >= 1");
  if (static_cast<size_t>(k) > table.columns.size())
    throw InvalidRangeError("rfe_select: k exceeds column count");

  std::vector<std::string> remaining = table.columns;
  FeatureTable current = table;
  while (remaining.size() > static_cast<size_t>(k)) {
    GbdtModel model = gbdt_train(current.rows, current.labels, remaining, trainer_config);
    std::map<std::string, double> imp = model.feature_importance(false);
    // Minimum total gain loses; ties drop the canonically later name.
    size_t worst = 0;
    for (size_t c = 1; c < remaining.size(); ++c)
      if (imp.at(remaining[c]) <= imp.at(remaining[worst])) worst = c;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(worst));
    current = table.select_columns(remaining);
  }

  GbdtModel final_model = gbdt_train(current.rows, current.labels, remaining, trainer_config);
  RfeResult res;
  res.selected = remaining;
  res.importances = final_model.feature_importance(true);
  return res;
}

SelectionReport build_selection_report(
    const std::vector<std::map<std::string, double>>& per_fold_importances) {
  if (per_fold_importances.empty())
    throw InvalidRangeError("build_selection_report: need at least one fold");
  SelectionReport rep;
  for (const auto& fold : per_fold_importances) {
    for (const auto& [name, importance] : fold) {
      auto& e = rep.entries[name];
      e.first += 1;
      e.second += importance;
    }
  }
  for (auto& [_, e] : rep.entries) e.second /= static_cast<double>(e.first);
  return rep;
}

json SelectionReport::to_json() const {
  std::vector<std::pair<std::string, std::pair<int, double>>> sorted(entries.begin(),
                                                                     entries.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    if (a.second.second != b.second.second) return a.second.second > b.second.second;
    return a.first < b.first;
  });
  json arr = json::array();
  for (const auto& [name, e] : sorted)
    arr.push_back(json{{"feature", name}, {"count", e.first}, {"mean_importance", e.second}});
  return arr;
}

}  // namespace thyro
