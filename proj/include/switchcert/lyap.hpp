#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "switchcert/sosprog.hpp"

namespace switchcert::lyap {

/// Common Lyapunov certificate for a switched linear system: a homogeneous
/// form V with an algebraic convexity (or plain sos positivity) certificate
/// and one Gram certificate per mode for V(x) - V(A_i x) - eps*(sum x_i^2)^d.
struct LyapunovCertificate {
  Polynomial v;
  int degree = 2;
  bool convex = true;
  double margin = 1e-6;
  std::optional<sos::SosConvexityCertificate> convexity;  // when convex
  std::optional<sos::GramCertificate> positivity;         // V sos (when !convex)
  std::vector<sos::GramCertificate> decrease;             // per mode
};

struct SynthOptions {
  double margin = 1e-6;
  sos::SosOptions sos;
  /// Re-run the decomposition checks on the instantiated V, independently of
  /// the synthesis solve.
  bool reverify = true;
};

/// Searches for a common Lyapunov form of the given even degree. With
/// convex=true the form must be sos-convex; otherwise plain sos positivity
/// of V is required. The normalization pins the coefficient of x1^degree to
/// one; a Gram-trace normalization is used as fallback when the solver
/// stalls on the pinned program.
sos::CheckResult<LyapunovCertificate> synth_common_lyapunov(
    const std::vector<Eigen::MatrixXd>& matrices, int degree, bool convex,
    const SynthOptions& opts = {});

struct JsrProbe {
  double gamma;
  sos::Verdict verdict;
};

/// Certified upper bound on the joint spectral radius: the smallest gamma
/// (within tol) whose scaled family {A_i / gamma} admits a common Lyapunov
/// form of the requested degree.
struct JsrBound {
  int degree = 2;
  bool convex = true;
  double upper_bound = 0;
  double tol = 0;
  LyapunovCertificate certificate;  // verifies for {A_i / upper_bound}
  double gamma_below = 0;           // largest gamma probed without a certificate
  sos::Verdict below_verdict = sos::Verdict::Infeasible;
  bool bracket_contains_unknown = false;  // some probes stalled
  std::vector<JsrProbe> probes;
};

struct JsrOptions {
  double tol_gamma = 5e-3;
  int max_doublings = 6;
  SynthOptions synth;
};

JsrBound jsr_upper_bound(const std::vector<Eigen::MatrixXd>& matrices, int degree, bool convex,
                         const JsrOptions& opts = {});

struct EscalationEntry {
  int degree;
  sos::Verdict verdict;
};

/// Feasibility verdict of the synthesis per degree 2, 4, ..., max_degree.
std::vector<EscalationEntry> degree_escalation(const std::vector<Eigen::MatrixXd>& matrices,
                                               bool convex, int max_degree,
                                               const SynthOptions& opts = {});

double spectral_radius(const Eigen::MatrixXd& a);
double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace switchcert::lyap
