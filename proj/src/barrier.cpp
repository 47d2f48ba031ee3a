#include "lidual/barrier.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lidual/errors.hpp"

namespace lidual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orthonormal basis of the null space of A.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& A, Eigen::Index n) {
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.transpose());
  qr.setThreshold(1e-11);
  const Eigen::Index rank = qr.rank();
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - rank);
}

}  // namespace

BarrierResult minimize_with_barrier(const BarrierProblem& problem, Eigen::VectorXd z,
                                    const BarrierOptions& options) {
  const Eigen::Index n = z.size();
  const auto& G = problem.inequality;
  const auto& h = problem.inequality_offset;
  const Eigen::Index m = G.rows();
  const bool has_equalities = problem.equality.rows() > 0;
  const Eigen::MatrixXd N = null_space(problem.equality, n);
  const bool reduced = has_equalities;

  Eigen::VectorXd s = G * z + h;
  if (m > 0 && s.minCoeff() <= 0.0) throw NumericalFailure("barrier start is not strictly feasible");
  double f = problem.objective.value(z);
  if (!std::isfinite(f)) throw NumericalFailure("barrier start outside the objective domain");

  auto barrier_value = [&](const Eigen::VectorXd& point, const Eigen::VectorXd& slack, double mu) {
    const double fv = problem.objective.value(point);
    if (!std::isfinite(fv)) return kInf;
    double b = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (slack[i] <= 0.0) return kInf;
      b -= std::log(slack[i]);
    }
    return fv + mu * b;
  };

  double mu = options.initial_mu > 0.0 ? options.initial_mu
                                       : std::max(1e-3, 0.1 * (1.0 + std::abs(f)) / std::max<Eigen::Index>(m, 1));
  if (m == 0) mu = 0.0;
  int steps = 0;
  Eigen::VectorXd grad(n), hdiag(n), inv_s(m), ds_last = Eigen::VectorXd::Zero(m);

  while (true) {
    // Centre for the current mu.
    double last_decrement = kInf;
    while (true) {
      problem.objective.derivatives(z, grad, hdiag);
      inv_s = s.cwiseInverse();
      Eigen::VectorXd g = grad - mu * (G.transpose() * inv_s);
      Eigen::MatrixXd H = G.transpose() * (mu * inv_s.cwiseAbs2()).asDiagonal() * G;
      H.diagonal() += hdiag;
      if (problem.regularization.size() == n) H.diagonal() += problem.regularization;

      Eigen::VectorXd dz;
      if (reduced) {
        const Eigen::MatrixXd Hr = N.transpose() * H * N;
        const Eigen::VectorXd gr = N.transpose() * g;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Hr);
        dz = N * ldlt.solve(-gr);
      } else {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
        dz = ldlt.solve(-g);
      }
      if (!dz.allFinite()) throw NumericalFailure("Newton system singular");
      ds_last = G * dz;
      const double decrement = -g.dot(dz);
      const double scale = 1.0 + std::abs(f);
      const bool final_stage = static_cast<double>(m) * mu <= options.gap_tolerance * scale;
      if (!(decrement > 0.0)) break;
      if (!final_stage && decrement * 0.5 <= 0.01 * static_cast<double>(m) * mu) break;
      // The final centring is pushed until mu / s is an accurate multiplier.
      const bool quadratic = m > 0 && decrement <= 0.05 * mu;
      if (final_stage) {
        if (m == 0 ? decrement * 0.5 <= 1e-3 * options.gap_tolerance * scale : decrement <= 1e-10 * mu) break;
        if (quadratic && decrement > 0.5 * last_decrement) break;  // stalled at rounding level
      }
      last_decrement = quadratic ? decrement : kInf;

      // Fraction to the boundary.
      const Eigen::VectorXd ds = ds_last;
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < m; ++i)
        if (ds[i] < 0.0) alpha = std::min(alpha, -0.99 * s[i] / ds[i]);
      const double phi0 = barrier_value(z, s, mu);
      double phi = kInf;
      Eigen::VectorXd z_new, s_new;
      for (int k = 0; k < 60; ++k) {
        z_new = z + alpha * dz;
        s_new = s + alpha * ds;
        phi = barrier_value(z_new, s_new, mu);
        // Near the centre Newton converges quadratically and the value test
        // drowns in rounding, so full steps are taken there.
        if (quadratic && std::isfinite(phi)) break;
        if (phi <= phi0 - options.armijo * alpha * decrement) break;
        alpha *= 0.5;
      }
      if (++steps > options.max_newton_steps)
        throw NumericalFailure("interior point exceeded " + std::to_string(options.max_newton_steps) +
                               " Newton steps");
      if (!std::isfinite(phi) || (!quadratic && !(phi < phi0))) break;  // no progress at machine precision
      z = z_new;
      s = G * z + h;
      f = problem.objective.value(z);
    }
    const double gap = static_cast<double>(m) * mu;
    if (gap <= options.gap_tolerance * (1.0 + std::abs(f))) break;
    mu /= options.mu_reduction;
  }

  BarrierResult out;
  out.point = z;
  out.slacks = s;
  // First-order correction of mu / s along the pending Newton step.
  out.multipliers.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.multipliers[i] = std::max(0.0, mu / s[i] * (1.0 - ds_last[i] / s[i]));
  out.objective = f;
  out.mu = mu;
  out.gap = static_cast<double>(m) * mu;
  out.newton_steps = steps;
  return out;
}

}  // namespace lidual
