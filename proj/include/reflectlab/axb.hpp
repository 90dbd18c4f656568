#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reflectlab::axb {

using cd = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;

/// (s, b) ~ [[e^s, b], [0, 1]], (s,b)(s',b') = (s+s', b + e^s b').
struct AxbElement {
  double s = 0, b = 0;
  AxbElement operator*(const AxbElement& o) const;
  AxbElement inverse() const;
  Eigen::Matrix2d matrix() const;
};

/// (s, -b)
AxbElement tau(const AxbElement& g);

/// (pi_+-(g) f)(x) = exp(+-i e^x b) f(x + s); sign is +1 or -1.
cd pi_pm(const AxbElement& g, int sign, const std::function<cd(double)>& f, double x);

/// Component swap on H+ (+) H-.
Mat2c reflection_j();

/// (1 + |mu|^2)^-1 [[1, mu], [conj mu, |mu|^2]]. Throws DomainError if Re mu < 0.
Mat2c q_from_mu(cd mu);

enum class DegenerateCase { Zero, Plus, Minus };
/// 0, diag(1, 0) or diag(0, 1).
Mat2c q_degenerate(DegenerateCase which);

struct QFieldResiduals {
  double idempotent = 0;  // |Q^2 - Q|
  double hermitian = 0;   // |Q - Q^*|
  double qfield = 0;      // ||Q12|^2 - Q11 Q22|
  double trace_qjq = 0;   // Tr(Q J Q)
  double det_qjq = 0;     // det(Q J Q)
};
QFieldResiduals qfield_residuals(const Mat2c& q);

/// Sampled xi -> Q(xi); mu is empty where a degenerate case applies.
struct ProjectionField {
  std::vector<double> xi;
  std::vector<std::optional<cd>> mu;
  std::vector<Mat2c> q;

  /// Uniform grid of count nodes on [lo, hi] (default 256 on [-20, 20]).
  static std::vector<double> uniform_grid(int count = 256, double lo = -20.0, double hi = 20.0);
  static ProjectionField from_mu(std::span<const double> xi, const std::function<cd(double)>& mu);
  /// Largest residual of the three projection-field identities over all nodes.
  double max_identity_residual() const;
};

/// 2 sum_k Re lambda_k |f0_hat_k|^2 w_k.
double graph_jform(std::span<const cd> lambda, std::span<const cd> f0_hat,
                   std::span<const double> weights);

enum class Direction { PlusInfinity, MinusInfinity };

struct EscapeResult {
  bool diverges = false;
  double value = 0;             // stabilized integral when finite
  double slope = 0;             // growth per unit length when diverging
  double start = 0;             // x0, or the turning point when E < 0
  std::vector<double> cutoffs;  // path lengths used
  std::vector<double> partials; // integral over each path length
};

/// int dx / sqrt(E + e^{2x}) from x0 toward +-infinity over growing cutoffs.
/// Default cutoffs are path lengths 10, 20, ..., 80.
EscapeResult escape_time(double energy, double x0, Direction direction,
                         std::span<const double> cutoffs = {});

enum class EndClass { LimitPoint, LimitCircle, Undetermined };
std::string to_string(EndClass c);

struct DeficiencyOptions {
  double x_range = 20;        // X, integrating over [-X, X]
  double decay_tol = 1e-6;    // relative mass change allowed under X -> X + 5
  double rel_tol = 1e-10;     // ODE tolerance
  bool control = false;       // replace e^{2x} by 0
  long max_steps = 5'000'000;
};

struct EndReport {
  int l2_count = 0;               // 2, 1 or 0 square-integrable directions
  EndClass classification = EndClass::Undetermined;
  double column_mass[2] = {0, 0}; // generic columns at X
  double column_mass_next[2] = {0, 0};  // at X + 5
  double sub_mass = 0, sub_mass_next = 0;
  double tail_bound = 0;          // envelope bound used beyond the oscillation cutoff
  Eigen::Vector2cd sub_data{0, 0};  // (f, f') at 0 of the subdominant solution
};

struct DeficiencyResult {
  cd z;
  EndReport plus, minus;
  int count_l2 = 0;  // dimension of solutions square-integrable on all of R
  double wronskian = 0;  // normalized Wronskian of the end subspaces when both are 1-dim
};

/// Square-integrable solutions of f'' + e^{2x} f = z f at each end.
/// Throws StiffnessError if the integrator exceeds its step budget.
DeficiencyResult deficiency_probe(cd z, const DeficiencyOptions& options = {});

/// Periodic x-grid x_k = lo + k (hi - lo) / count.
struct XGrid {
  int count = 128;
  double lo = -6.0, hi = 2.0;
  double x(int k) const { return lo + (hi - lo) * k / count; }
  /// Angular frequency of DFT index k (symmetric ordering).
  double frequency(int k) const;
};

/// max over b of how far pi_+(b) (+) pi_+(-b) moves the graph
/// {(f0, f1) : f1_hat = lambda f0_hat} outside itself.
double invariance_probe(const std::function<cd(double)>& lambda, std::span<const double> b_samples,
                        const XGrid& grid = {});

/// Eigenvalues 2 Re lambda / (1 + |lambda|^2) of the J-form on the graph
/// relative to the graph metric, at the grid frequencies.
std::vector<double> normalized_graph_form(const std::function<cd(double)>& lambda,
                                          const XGrid& grid = {});

struct NoGoMember {
  std::string name;
  std::function<cd(double)> lambda;
};

struct NoGoRow {
  std::string name;
  double violation = 0;
  double form_max = 0;  // largest normalized eigenvalue
  double form_min = 0;
  bool nondegenerate = false;  // form_max > positive_threshold
  bool consistent = false;     // nondegenerate implies violation > violation_threshold
};

std::vector<NoGoMember> default_nogo_family();
std::vector<NoGoRow> nogo_harness(std::span<const NoGoMember> family,
                                  std::span<const double> b_samples, const XGrid& grid = {},
                                  double positive_threshold = 0.1,
                                  double violation_threshold = 0.05);

/// The invariant cones of the (ax+b) Lie algebra in the order listed for the model.
struct ConeRecord {
  std::string name;
  std::string description;
};
std::vector<ConeRecord> invariant_cones();

}  // namespace reflectlab::axb
