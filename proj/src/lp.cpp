#include "lidual/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lidual/errors.hpp"

namespace lidual {

std::size_t LinearProgram::add_variable(double cost, double lo, double up) {
  objective.push_back(cost);
  lower.resize(objective.size() - 1, 0.0);
  upper.resize(objective.size() - 1, kInfinity);
  lower.push_back(lo);
  upper.push_back(up);
  return objective.size() - 1;
}

void LinearProgram::add_row(std::vector<double> coefficients, RowType type, double rhs) {
  rows.push_back({std::move(coefficients), type, rhs});
}

namespace {

// Original variable j = offset + sign * x[col] - (neg >= 0 ? x[neg] : 0).
struct VariableMap {
  double offset = 0.0;
  double sign = 1.0;
  std::size_t col = 0;
  long neg = -1;
};

struct StandardRow {
  std::vector<double> a;  // over standard structural columns
  RowType type;
  double rhs;
  double scale = 1.0;   // row multiplier applied (sign included)
  long origin = -1;     // original row index; -1 for bound rows
  long bound_index = -1;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), data_(rows * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return data_[i * (n_ + 1) + n_]; }
  double rhs(std::size_t i) const { return data_[i * (n_ + 1) + n_]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    double* prow = &data_[r * (n_ + 1)];
    for (std::size_t j = 0; j <= n_; ++j) prow[j] /= p;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * (n_ + 1)];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  void erase_row(std::size_t r) {
    data_.erase(data_.begin() + static_cast<long>(r * (n_ + 1)), data_.begin() + static_cast<long>((r + 1) * (n_ + 1)));
    basis_.erase(basis_.begin() + static_cast<long>(r));
    --m_;
  }

 private:
  std::size_t m_, n_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { Optimal, Unbounded };

class SimplexSolver {
 public:
  SimplexSolver(Tableau& t, const LpOptions& options, std::size_t first_artificial)
      : t_(t), opt_(options), first_artificial_(first_artificial) {}

  // Minimizes cost^T x from the current basic feasible tableau.
  PhaseResult run(const std::vector<double>& cost, std::size_t& entering_out) {
    std::size_t degenerate_run = 0;
    while (true) {
      reduced_costs(cost);
      const bool use_bland = opt_.rule == PivotRule::Bland || degenerate_run > 50;
      std::size_t enter = t_.cols();
      double best = -opt_.tolerance;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (reduced_[j] < best) {
          enter = j;
          if (use_bland) break;
          best = reduced_[j];
        }
      }
      if (enter == t_.cols()) return PhaseResult::Optimal;

      std::size_t leave = t_.rows();
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < t_.rows(); ++i) {
        const double a = t_.at(i, enter);
        if (a <= opt_.tolerance) continue;
        const double ratio = std::max(t_.rhs(i), 0.0) / a;
        if (leave == t_.rows() || ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && t_.basis()[i] < t_.basis()[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == t_.rows()) {
        entering_out = enter;
        return PhaseResult::Unbounded;
      }
      degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
      if (++pivots_ > opt_.max_pivots)
        throw NumericalFailure("simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
      t_.pivot(leave, enter);
    }
  }

  const std::vector<double>& reduced() const { return reduced_; }

  void reduced_costs(const std::vector<double>& cost) {
    reduced_.assign(t_.cols(), 0.0);
    for (std::size_t j = 0; j < t_.cols(); ++j) reduced_[j] = cost[j];
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      const double cb = cost[t_.basis()[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < t_.cols(); ++j) reduced_[j] -= cb * t_.at(i, j);
    }
  }

 private:
  Tableau& t_;
  const LpOptions& opt_;
  std::size_t first_artificial_;
  std::size_t pivots_ = 0;
  std::vector<double> reduced_;
};

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp, const LpOptions& options) {
  const std::size_t nvars = lp.variables();
  auto lower_of = [&](std::size_t j) { return j < lp.lower.size() ? lp.lower[j] : 0.0; };
  auto upper_of = [&](std::size_t j) { return j < lp.upper.size() ? lp.upper[j] : LinearProgram::kInfinity; };
  for (const auto& row : lp.rows)
    if (row.coefficients.size() > nvars) throw DomainError("LP row longer than the variable count");

  // Variable substitution into nonnegative standard columns.
  std::vector<VariableMap> vmap(nvars);
  std::size_t ns = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (std col, bound)
  std::vector<std::size_t> upper_owner;
  for (std::size_t j = 0; j < nvars; ++j) {
    const double lo = lower_of(j), up = upper_of(j);
    if (lo > up) {
      LpInfeasible inf;
      inf.certificate.assign(lp.rows.size(), 0.0);
      return inf;
    }
    auto& v = vmap[j];
    if (std::isfinite(lo)) {
      v.offset = lo;
      v.col = ns++;
      if (std::isfinite(up)) {
        upper_rows.emplace_back(v.col, up - lo);
        upper_owner.push_back(j);
      }
    } else if (std::isfinite(up)) {
      v.offset = up;
      v.sign = -1.0;
      v.col = ns++;
    } else {
      v.col = ns++;
      v.neg = static_cast<long>(ns++);
    }
  }

  std::vector<StandardRow> srows;
  srows.reserve(lp.rows.size() + upper_rows.size());
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& row = lp.rows[i];
    StandardRow s{std::vector<double>(ns, 0.0), row.type, row.rhs};
    s.origin = static_cast<long>(i);
    for (std::size_t j = 0; j < row.coefficients.size(); ++j) {
      const double a = row.coefficients[j];
      if (a == 0.0) continue;
      const auto& v = vmap[j];
      s.rhs -= a * v.offset;
      s.a[v.col] += a * v.sign;
      if (v.neg >= 0) s.a[static_cast<std::size_t>(v.neg)] -= a;
    }
    srows.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < upper_rows.size(); ++k) {
    StandardRow s{std::vector<double>(ns, 0.0), RowType::LessEqual, upper_rows[k].second};
    s.a[upper_rows[k].first] = 1.0;
    s.bound_index = static_cast<long>(k);
    srows.push_back(std::move(s));
  }
  const std::size_t certificate_size = lp.rows.size() + upper_rows.size();
  auto certificate_slot = [&](const StandardRow& s) {
    return s.origin >= 0 ? static_cast<std::size_t>(s.origin) : lp.rows.size() + static_cast<std::size_t>(s.bound_index);
  };

  // Row scaling, trivial rows, sign normalisation.
  std::vector<StandardRow> active;
  for (auto& s : srows) {
    double norm = 0.0;
    for (double a : s.a) norm = std::max(norm, std::abs(a));
    if (norm == 0.0) {
      const bool ok = (s.type == RowType::LessEqual && s.rhs >= -options.tolerance) ||
                      (s.type == RowType::GreaterEqual && s.rhs <= options.tolerance) ||
                      (s.type == RowType::Equal && std::abs(s.rhs) <= options.tolerance);
      if (!ok) {
        LpInfeasible inf;
        inf.certificate.assign(certificate_size, 0.0);
        // 0 <= y * rhs fails: orientation matches the documented sign convention.
        double y = s.type == RowType::LessEqual ? -1.0 : (s.type == RowType::GreaterEqual ? 1.0 : (s.rhs > 0 ? 1.0 : -1.0));
        inf.certificate[certificate_slot(s)] = y;
        return inf;
      }
      continue;
    }
    double mult = 1.0 / norm;
    if (s.rhs * mult < 0.0) {
      mult = -mult;
      if (s.type == RowType::LessEqual)
        s.type = RowType::GreaterEqual;
      else if (s.type == RowType::GreaterEqual)
        s.type = RowType::LessEqual;
    }
    for (double& a : s.a) a *= mult;
    s.rhs *= mult;
    s.scale = mult;
    active.push_back(std::move(s));
  }

  const std::size_t m = active.size();
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& s : active) {
    if (s.type != RowType::Equal) ++n_slack;
    if (s.type != RowType::LessEqual) ++n_art;
  }
  const std::size_t first_slack = ns;
  const std::size_t first_art = ns + n_slack;
  const std::size_t ncols = first_art + n_art;

  Tableau t(m, ncols);
  std::vector<std::size_t> init_col(m);
  std::vector<long> row_slot(m);
  {
    std::size_t slack = first_slack, art = first_art;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& s = active[i];
      for (std::size_t j = 0; j < ns; ++j) t.at(i, j) = s.a[j];
      t.rhs(i) = s.rhs;
      if (s.type == RowType::LessEqual) {
        t.at(i, slack) = 1.0;
        init_col[i] = slack++;
      } else if (s.type == RowType::GreaterEqual) {
        t.at(i, slack++) = -1.0;
        t.at(i, art) = 1.0;
        init_col[i] = art++;
      } else {
        t.at(i, art) = 1.0;
        init_col[i] = art++;
      }
      t.basis()[i] = init_col[i];
      row_slot[i] = static_cast<long>(i);
    }
  }

  // Initial-basis column per surviving row, for reading B^{-1}.
  std::vector<std::size_t> unit_col = init_col;

  SimplexSolver solver(t, options, first_art);
  std::size_t entering = 0;

  if (n_art > 0) {
    std::vector<double> phase1(ncols, 0.0);
    for (std::size_t j = first_art; j < ncols; ++j) phase1[j] = 1.0;
    solver.run(phase1, entering);  // phase 1 is bounded below by 0
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i)
      if (t.basis()[i] >= first_art) infeasibility += std::max(t.rhs(i), 0.0);
    if (infeasibility > options.tolerance) {
      solver.reduced_costs(phase1);
      LpInfeasible inf;
      inf.certificate.assign(certificate_size, 0.0);
      for (std::size_t i = 0; i < t.rows(); ++i) {
        const std::size_t col = unit_col[i];
        const double y = phase1[col] - solver.reduced()[col];
        const auto& s = active[static_cast<std::size_t>(row_slot[i])];
        inf.certificate[certificate_slot(s)] = y * s.scale;
      }
      return inf;
    }
    // Drive artificial variables out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis()[i] < first_art) {
        ++i;
        continue;
      }
      std::size_t col = ncols;
      double best = options.tolerance;
      for (std::size_t j = 0; j < first_art; ++j)
        if (std::abs(t.at(i, j)) > best) {
          best = std::abs(t.at(i, j));
          col = j;
        }
      if (col == ncols) {
        t.erase_row(i);
        unit_col.erase(unit_col.begin() + static_cast<long>(i));
        row_slot.erase(row_slot.begin() + static_cast<long>(i));
        continue;
      }
      t.pivot(i, col);
      ++i;
    }
  }

  // Phase 2 objective as a minimisation over standard columns.
  const double flip = lp.sense == Sense::Maximize ? -1.0 : 1.0;
  std::vector<double> cost(ncols, 0.0);
  for (std::size_t j = 0; j < nvars; ++j) {
    const double c = flip * lp.objective[j];
    const auto& v = vmap[j];
    cost[v.col] += c * v.sign;
    if (v.neg >= 0) cost[static_cast<std::size_t>(v.neg)] -= c;
  }

  auto to_original = [&](const std::vector<double>& xs, bool with_offset) {
    std::vector<double> x(nvars, 0.0);
    for (std::size_t j = 0; j < nvars; ++j) {
      const auto& v = vmap[j];
      x[j] = (with_offset ? v.offset : 0.0) + v.sign * xs[v.col];
      if (v.neg >= 0) x[j] -= xs[static_cast<std::size_t>(v.neg)];
    }
    return x;
  };

  if (solver.run(cost, entering) == PhaseResult::Unbounded) {
    std::vector<double> dir(ncols, 0.0);
    dir[entering] = 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i) dir[t.basis()[i]] = -t.at(i, entering);
    return LpUnbounded{to_original(dir, false)};
  }

  std::vector<double> xs(ncols, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) xs[t.basis()[i]] = t.rhs(i);
  LpOptimal out;
  out.point = to_original(xs, true);
  out.value = 0.0;
  for (std::size_t j = 0; j < nvars; ++j) out.value += lp.objective[j] * out.point[j];
  out.duals.assign(lp.rows.size(), 0.0);
  solver.reduced_costs(cost);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const std::size_t col = unit_col[i];
    const double y = cost[col] - solver.reduced()[col];
    const auto& s = active[static_cast<std::size_t>(row_slot[i])];
    if (s.origin >= 0) out.duals[static_cast<std::size_t>(s.origin)] = flip * y * s.scale;
  }
  return out;
}

}  // namespace lidual
