#include "advlcd/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "advlcd/error.hpp"

namespace advlcd {

void ResultTable::validate() const {
  if (methods.empty()) fail(ErrorCode::InvalidConfig, "result table has no methods");
  if (cells.size() != rows.size()) fail(ErrorCode::InvalidConfig, "result table row count mismatch");
  for (const auto& row : cells) {
    if (row.size() != methods.size()) fail(ErrorCode::InvalidConfig, "result table is not rectangular");
    for (double v : row) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidConfig, "result table holds a non-finite cell");
    }
  }
}

std::vector<double> ResultTable::column(std::size_t method) const {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& row : cells) out.push_back(row.at(method));
  return out;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  if (std::strcmp(buf, "-0.000000") == 0) return "0.000000";
  return buf;
}

void write_table_csv(const ResultTable& table, std::ostream& out) {
  table.validate();
  out << "block";
  for (const auto& m : table.methods) out << ',' << m;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << table.rows[r];
    for (double v : table.cells[r]) out << ',' << format_number(v);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

ResultTable read_table_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (table.methods.empty()) {
      if (fields.size() < 2) fail(ErrorCode::ParseError, "line 1: header needs a method column");
      table.methods.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != table.methods.size() + 1) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(table.methods.size() + 1) + " fields");
    }
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(fields[i], &used));
        if (used != fields[i].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError,
             "line " + std::to_string(line_no) + ": bad number \"" + fields[i] + "\"");
      }
    }
    table.rows.push_back(fields[0]);
    table.cells.push_back(std::move(row));
  }
  if (table.methods.empty()) fail(ErrorCode::ParseError, "empty table");
  table.validate();
  return table;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorCode::DegenerateData, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Descriptives rank_descriptives(const std::vector<double>& values) {
  Descriptives d;
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  d.median = quantile(values, 0.5);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::abs(v - d.median));
  d.mad = quantile(dev, 0.5);
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  const double half = 1.58 * iqr / std::sqrt(static_cast<double>(values.size()));
  d.ci_low = d.median - half;
  d.ci_high = d.median + half;
  return d;
}

std::vector<double> rank_block(const std::vector<double>& values) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  // Largest value first, so the most negative decline ends at rank k.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(k);
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double nemenyi_q(std::size_t k, double alpha) {
  // q_alpha = studentized range quantile / sqrt(2), infinite degrees of freedom.
  static const double q05[] = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
  static const double q10[] = {1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};
  if (k < 2 || k > 10) fail(ErrorCode::InvalidConfig, "Nemenyi table covers 2..10 methods");
  if (std::abs(alpha - 0.05) < 1e-12) return q05[k - 2];
  if (std::abs(alpha - 0.10) < 1e-12) return q10[k - 2];
  fail(ErrorCode::InvalidConfig, "alpha must be 0.05 or 0.10");
}

double critical_difference(std::size_t k, std::size_t n, double alpha) {
  const double kk = static_cast<double>(k);
  return nemenyi_q(k, alpha) * std::sqrt(kk * (kk + 1.0) / (6.0 * static_cast<double>(n)));
}

RankReport friedman_nemenyi(const ResultTable& table, double alpha) {
  table.validate();
  const std::size_t k = table.methods.size();
  const std::size_t n = table.rows.size();
  if (k < 2) fail(ErrorCode::InvalidConfig, "ranking needs at least 2 methods");
  if (n < 2) fail(ErrorCode::TooFewBlocks, "ranking needs at least 2 blocks, got " + std::to_string(n));

  RankReport report;
  report.alpha = alpha;
  report.k = k;
  report.n = n;
  report.q_alpha = nemenyi_q(k, alpha);
  report.cd = critical_difference(k, n, alpha);

  std::vector<double> rank_sum(k, 0.0);
  for (const auto& row : table.cells) {
    const auto ranks = rank_block(row);
    for (std::size_t j = 0; j < k; ++j) rank_sum[j] += ranks[j];
  }
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double mr = rank_sum[j] / nn;
    sum_sq += mr * mr;
    report.methods.push_back(MethodRank{table.methods[j], mr, rank_descriptives(table.column(j))});
  }
  report.friedman_statistic =
      12.0 * nn / (kk * (kk + 1.0)) * (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0);
  if (report.friedman_statistic <= 0.0) {
    report.friedman_statistic = std::max(0.0, report.friedman_statistic);
    report.p_value = 1.0;
  } else {
    const boost::math::chi_squared dist(kk - 1.0);
    report.p_value = boost::math::cdf(boost::math::complement(dist, report.friedman_statistic));
  }
  report.significant.assign(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      report.significant[i][j] =
          std::abs(report.methods[i].mean_rank - report.methods[j].mean_rank) > report.cd;
    }
  }
  return report;
}

nlohmann::ordered_json RankReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["rank_direction"] = "rank k = most negative decline (strongest attack)";
  doc["alpha"] = alpha;
  doc["k"] = k;
  doc["n_blocks"] = n;
  doc["friedman_statistic"] = friedman_statistic;
  doc["p_value"] = p_value;
  doc["q_alpha"] = q_alpha;
  doc["cd"] = cd;
  auto& ms = doc["methods"] = nlohmann::ordered_json::array();
  for (const auto& m : methods) {
    nlohmann::ordered_json row;
    row["name"] = m.name;
    row["mean_rank"] = m.mean_rank;
    row["mean"] = m.stats.mean;
    row["median"] = m.stats.median;
    row["mad"] = m.stats.mad;
    row["ci"] = {m.stats.ci_low, m.stats.ci_high};
    ms.push_back(std::move(row));
  }
  auto& sig = doc["significant"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      if (significant[i][j]) sig.push_back({methods[i].name, methods[j].name});
    }
  }
  return doc;
}

void write_rank_csv(const RankReport& report, std::ostream& out) {
  out << "method,mean_rank,mean,median,mad,ci_low,ci_high\n";
  for (const auto& m : report.methods) {
    out << m.name << ',' << format_number(m.mean_rank) << ',' << format_number(m.stats.mean) << ','
        << format_number(m.stats.median) << ',' << format_number(m.stats.mad) << ','
        << format_number(m.stats.ci_low) << ',' << format_number(m.stats.ci_high) << '\n';
  }
}

namespace {

std::vector<std::size_t> by_mean_rank(const RankReport& report) {
  std::vector<std::size_t> order(report.methods.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.methods[a].mean_rank < report.methods[b].mean_rank;
  });
  return order;
}

}  // namespace

std::vector<std::vector<std::size_t>> cd_cliques(const RankReport& report) {
  const auto order = by_mean_rank(report);
  std::vector<std::vector<std::size_t>> cliques;
  std::size_t last_end = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::size_t j = i;
    while (j + 1 < order.size() && report.methods[order[j + 1]].mean_rank -
                                           report.methods[order[i]].mean_rank <=
                                       report.cd) {
      ++j;
    }
    // Skip groups contained in the previous one.
    if (j > i && j + 1 > last_end) {
      cliques.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                           order.begin() + static_cast<std::ptrdiff_t>(j + 1));
      last_end = j + 1;
    }
  }
  return cliques;
}

std::string cd_diagram(const RankReport& report) {
  std::ostringstream out;
  char buf[160];
  out << "critical difference diagram\n";
  std::snprintf(buf, sizeof buf, "k=%zu N=%zu alpha=%.2f CD=%.4f friedman=%.4f p=%.6g\n", report.k,
                report.n, report.alpha, report.cd, report.friedman_statistic, report.p_value);
  out << buf;
  out << "axis: mean rank 1 (weakest attack) .. " << report.k << " (strongest attack)\n";
  constexpr int kWidth = 60;
  const double span = static_cast<double>(report.k) - 1.0;
  for (std::size_t idx : by_mean_rank(report)) {
    const auto& m = report.methods[idx];
    const int pos = static_cast<int>(std::lround((m.mean_rank - 1.0) / span * kWidth));
    std::string bar(kWidth + 1, '-');
    bar[static_cast<std::size_t>(std::clamp(pos, 0, kWidth))] = '*';
    std::snprintf(buf, sizeof buf, "  %-20s %7.4f  |%s|\n", m.name.c_str(), m.mean_rank, bar.c_str());
    out << buf;
  }
  const auto cliques = cd_cliques(report);
  out << "cliques (not significantly different):" << (cliques.empty() ? " none" : "") << '\n';
  for (const auto& c : cliques) {
    out << "  [";
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? ", " : "") << report.methods[c[i]].name;
    out << "]\n";
  }
  return out.str();
}

}  // namespace advlcd
