#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iquad/linear_ops.hpp"

namespace iquad {

enum class Method { kLandweberLinear, kLandweberNonlinear, kCg, kModal };
Method parse_method(const std::string& s);
std::string to_string(Method m);

enum class ForwardModel { kDoubleIquad, kMetaIntensity };
ForwardModel parse_forward_model(const std::string& s);
std::string to_string(ForwardModel f);

struct ReconstructionConfig {
  Method method = Method::kLandweberLinear;
  std::optional<double> tau;  // unset: 1 / (power-iteration estimate of |A|^2)
  int max_iters = 500;
  double residual_tol = 1e-6;
  double s = kDefaultSobolevIndex;
  int modal_basis_size = 0;  // radial order for the modal basis
  std::optional<double> alpha;  // unset: 1e-6 trace(M^T M) / modes
  int stagnation_window = 25;
  ForwardModel forward = ForwardModel::kDoubleIquad;
};

struct ReconstructionReport {
  std::string method;
  int iterations = 0;
  std::vector<double> residuals;  // relative |d - A x| / |d|, index 0 is the start point
  ScalarField estimate;
  std::optional<double> relative_error;
  std::vector<double> coefficients;
  std::vector<ZernikeIndex> basis;
  double tau = 0.0;
  std::optional<double> regularization;  // modal alpha
  double norm_estimate = 0.0;
  double wall_time_s = 0.0;
  bool converged = false;
  bool stagnated = false;
  bool unobservable = false;
  bool breakdown = false;
  bool diverged = false;

  double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ReconstructionReport landweber_linear(const Measurement& data, const LinearOperator& op,
                                      const ReconstructionConfig& cfg);
ReconstructionReport cg_normal(const Measurement& data, const LinearOperator& op, const ReconstructionConfig& cfg);
ReconstructionReport landweber_nonlinear(const Measurement& data, const SensorSpec& spec,
                                         const ReconstructionConfig& cfg);
ReconstructionReport modal_solve(const Measurement& data, const InteractionMatrix& matrix,
                                 std::optional<double> regularization);

// nonlinear forward map used by landweber_nonlinear
ScalarField forward_apply(const ScalarField& phase, const SensorSpec& spec, ForwardModel model);
double model_residual(const Measurement& data, const ScalarField& estimate, const SensorSpec& spec,
                      ForwardModel model);

// relative L2 error over the pupil after removing piston from both fields;
// a truth with no piston-free content counts as 100% error
double relative_error_omega(const ScalarField& estimate, const ScalarField& truth, const PupilMask& pupil);
void attach_error(ReconstructionReport& report, const ScalarField& truth, const PupilMask& pupil);

std::string to_json(const ReconstructionReport& report, bool include_timing = true);

}  // namespace iquad
