#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace advlcd {

/// Blocks (rows) by methods (columns). Cells are accuracy declines in
/// percentage points; more negative means a stronger attack.
struct ResultTable {
  std::vector<std::string> rows;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> cells;  ///< cells[row][method]

  void validate() const;  ///< rectangular, finite; throws InvalidConfig
  std::vector<double> column(std::size_t method) const;
};

void write_table_csv(const ResultTable& table, std::ostream& out);
/// First column names the row, the rest are methods. Throws ParseError.
ResultTable read_table_csv(std::istream& in);

/// Type-7 (linear interpolation) quantile of unsorted values.
double quantile(std::vector<double> values, double q);

struct Descriptives {
  double mean = 0.0;
  double median = 0.0;
  double mad = 0.0;  ///< median absolute deviation from the median
  double ci_low = 0.0;
  double ci_high = 0.0;  ///< median -/+ 1.58 IQR / sqrt(m)
};

Descriptives rank_descriptives(const std::vector<double>& values);

/// Average ranks within one block. The most negative value gets rank k.
std::vector<double> rank_block(const std::vector<double>& values);

/// Studentized-range based Nemenyi constant q_alpha for k in [2, 10];
/// alpha must be 0.05 or 0.10. Throws InvalidConfig otherwise.
double nemenyi_q(std::size_t k, double alpha);
double critical_difference(std::size_t k, std::size_t n, double alpha);

struct MethodRank {
  std::string name;
  double mean_rank = 0.0;
  Descriptives stats;
};

struct RankReport {
  double alpha = 0.05;
  std::size_t k = 0;
  std::size_t n = 0;
  double friedman_statistic = 0.0;
  double p_value = 1.0;
  double q_alpha = 0.0;
  double cd = 0.0;
  std::vector<MethodRank> methods;                ///< in table column order
  std::vector<std::vector<bool>> significant;     ///< |MR_i - MR_j| > CD

  nlohmann::ordered_json to_json() const;
};

/// Friedman test over the blocks of `table` with Nemenyi post-hoc CD.
/// Throws TooFewBlocks for fewer than 2 rows, InvalidConfig for fewer than
/// 2 or more than 10 methods.
RankReport friedman_nemenyi(const ResultTable& table, double alpha = 0.05);

void write_rank_csv(const RankReport& report, std::ostream& out);

/// Plain-text critical difference diagram: methods on the mean-rank axis
/// and the cliques whose rank spread does not exceed CD.
std::string cd_diagram(const RankReport& report);

/// Maximal groups of method indices (sorted by mean rank) whose mean ranks
/// lie within CD of each other; only groups of two or more.
std::vector<std::vector<std::size_t>> cd_cliques(const RankReport& report);

/// Fixed-precision rendering used by every CSV writer.
std::string format_number(double value);

}  // namespace advlcd
