#pragma once

#include <cstddef>
#include <memory>

#include "advlcd/graph.hpp"

namespace advlcd {

/// What the attacker sees for one query: the predicted class and the
/// confidence attached to that prediction (1.0 in label-only mode).
struct Observation {
  ClassLabel label = ClassLabel::Loop;
  double confidence = 1.0;
};

enum class OracleMode { Score, Label };

const char* to_string(OracleMode mode) noexcept;
OracleMode parse_oracle_mode(const std::string& text);

/// Black-box access to a victim classifier with a per-session query budget.
/// Repeated queries of an identical graph are answered from a cache and do
/// not consume budget. Throws ErrorCode::QueryBudgetExhausted once the budget
/// is spent.
class QueryOracle {
 public:
  virtual ~QueryOracle() = default;
  virtual Observation query(const LabeledGraph& g) = 0;
  virtual std::size_t queries_used() const = 0;
  virtual std::size_t max_queries() const = 0;
  std::size_t remaining() const { return max_queries() - queries_used(); }
};

/// Opens independent query sessions against one victim.
class TargetService {
 public:
  virtual ~TargetService() = default;
  virtual std::unique_ptr<QueryOracle> open_session(std::size_t max_queries) const = 0;
};

/// 1 - p(y | G'), where p(y | G') is the observed confidence when the
/// prediction equals y and its complement otherwise. Always in [0, 1].
double attack_loss(const Observation& observed, ClassLabel y);

inline bool attack_succeeded(const Observation& observed, ClassLabel y) {
  return observed.label != y;
}

}  // namespace advlcd
