#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonlocal/spectral.hpp"

namespace nonlocal {

/// Sampled nonlinearity on a (x, u) lattice, interpolated bilinearly with
/// periodic extension in x and clamping at u_max (iterates above the lattice
/// see f(x, u_max), which is nonpositive for admissible tables).  Used for
/// nonlinearities given as data rather than in logistic form.
struct CustomNonlinearityTable {
  double period = 2.0;
  double u_max = 1.0;
  int nx = 0;  // uniform x nodes over [-period/2, period/2)
  int nu = 0;  // uniform u nodes over [0, u_max]
  Eigen::MatrixXd f_vals;   // nx x nu
  Eigen::MatrixXd fu_vals;  // nx x nu
  double m_sup = 1.0;
};

/// Reaction term f(x, u) with f(x, 0) = 0, f(x, u)/u decreasing in u, and
/// f(x, u) <= 0 for u >= m_sup.  The logistic form is f(x, u) = u (a(x) - u).
/// Hypothesis checks run at construction on a finite u-lattice and throw
/// HypF1Violation naming the failed condition and a witness point.
class Nonlinearity {
public:
  enum class Form { kpp, custom };

  static Nonlinearity kpp(const Coefficient& a, const PeriodicGrid& grid);
  static Nonlinearity custom(const CustomNonlinearityTable& table, const PeriodicGrid& grid);

  Form form() const { return form_; }
  double m_sup() const { return m_sup_; }

  double f(double x, double u) const;
  double fu(double x, double u) const;

  /// Samples of f_u(x, 0) on a grid (the linearization coefficient).
  Eigen::VectorXd derivative_at_zero(const Grid& g) const;
  /// The linearization as a Fourier coefficient; only available for the kpp form.
  const std::optional<Coefficient>& coefficient() const { return coeff_; }

  /// Lower bound for f_u over grid x and u in [0, u_hi]; exact for kpp.
  double min_fu(const PeriodicGrid& grid, double u_hi) const;

private:
  Nonlinearity() = default;

  Form form_ = Form::kpp;
  std::optional<Coefficient> coeff_;
  std::optional<CustomNonlinearityTable> table_;
  double m_sup_ = 0.0;
};

enum class IterationDirection { up, down };
enum class Classification { nontrivial_exists, only_trivial, marginal };

std::string to_string(Classification c);

struct IterateResult {
  GridFunction u;
  int iterations = 0;
  double final_step = 0.0;
  std::vector<double> step_trace;
  bool hit_decay_floor = false;
};

/// Damped fixed-point map u <- u + tau (M[u] + f(x, u)) with
/// tau = 1/(1 + C_f), C_f = max(0, -min f_u) over the iteration range
/// [0, max(m_sup, sup u0)].  The damping makes the map order preserving there,
/// so iterates from a discrete subsolution increase and iterates from a
/// supersolution decrease; a monotonicity break beyond 1e-12 is a hard failure.
/// Stops when the sup-norm step drops below tol (residual <= tol/tau), or when
/// sup u <= decay_floor if a nonnegative floor is given.
IterateResult monotone_iterate(const PeriodicOperator& m0, const Nonlinearity& f,
                               const GridFunction& u0, IterationDirection direction, double tol,
                               int max_iter, double decay_floor = -1.0);

/// Largest dyadic eps in {1, 1/2, ..., 2^-40} with eps*phi1 a discrete
/// subsolution staying below m_sup.
double subsolution_scale(const PeriodicOperator& m0, const Nonlinearity& f,
                         const GridFunction& phi1);

Classification classify_existence(const Kernel& kernel, const Nonlinearity& f,
                                  const PeriodicGrid& grid, double margin_tol,
                                  EigenResult* eig_out = nullptr, double eig_tol = 1e-12,
                                  int eig_max_iter = 200000);

struct SteadyOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  double margin_tol = 1e-6;
  double decay_tol = 1e-8;
  double uniq_tol = 1e-6;
  double tail_tol = 1e-12;
  double eig_tol = 1e-12;
  int eig_max_iter = 200000;
};

struct SteadyReport {
  double lambda1 = 0.0;
  Classification classification = Classification::marginal;
  std::optional<GridFunction> p;
  double residual = 0.0;
  int iterations = 0;
  double lower_bound = 0.0;   // min of p in the nontrivial case
  double limits_gap = 0.0;    // sup distance between the up- and down-limits
  double decay_sup = 0.0;     // final sup of the decay run in the only-trivial case
  double subsolution_eps = 0.0;
  std::vector<double> up_trace, down_trace;
};

/// Existence dichotomy driven by the sign of lambda1: below -margin_tol the
/// monotone scheme brackets a positive periodic solution between eps*phi1 and
/// the constant m_sup; above margin_tol the iteration from m_sup + 1 is driven
/// below decay_tol.
SteadyReport solve_steady(const Kernel& kernel, const Nonlinearity& f, const PeriodicGrid& grid,
                          const SteadyOptions& opts = {});

struct CompactSubsolutionResult {
  double gamma0 = 0.0;
  GridFunction phi;
  double r = 0.0;
  double lambda_r = 0.0;
  double y_used = 0.0;
  double defect_min = 0.0;
};

/// Compactly supported subsolution: doubles r from 2R until
/// lambda_{r,y} < lambda1 / 2, then scales the Dirichlet eigenfunction by the
/// largest dyadic gamma0 whose zero-extension has nonnegative defect on a grid
/// covering the support plus the kernel reach.  Requires lambda1 < 0.
CompactSubsolutionResult compact_subsolution(const Kernel& kernel, const Nonlinearity& f,
                                             const PeriodicGrid& grid, double y,
                                             int points_per_unit, const SteadyOptions& opts = {});

struct UniquenessEntry {
  IterationDirection direction = IterationDirection::up;
  double sup_dist_to_p = 0.0;
  double gamma_star_vs_p = 0.0;
};

struct UniquenessReport {
  std::vector<UniquenessEntry> entries;
  double max_pairwise_dist = 0.0;
  bool pass = false;
  double lambda1 = 0.0;
};

/// Runs the monotone scheme from every admissible init (classified as sub- or
/// supersolution by its defect sign) and compares all limits against the
/// reference solution: PASS iff every sup distance is below uniq_tol and every
/// gamma_star sits in [1 - uniq_tol, 1 + uniq_tol].  Symmetric kernels only.
UniquenessReport uniqueness_probe(const Kernel& kernel, const Nonlinearity& f,
                                  const PeriodicGrid& grid,
                                  const std::vector<GridFunction>& inits,
                                  const SteadyOptions& opts = {});

}  // namespace nonlocal
