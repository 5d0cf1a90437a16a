#pragma once

#include <string_view>
#include <vector>

#include "recon/grid.hpp"

namespace recon {

/// Closed-form base bumps, supported in [-1/2, 1/2] before normalisation.
enum class BumpKind {
  exponential,  ///< exp(-1 / (1 - (2y)^2))
  polynomial,   ///< (1 - (2y)^2)^8
};

std::string_view to_string(BumpKind kind) noexcept;
BumpKind parse_bump_kind(std::string_view name);

/// Unnormalised profile and its derivative.
double bump_profile(BumpKind kind, double y) noexcept;
double bump_profile_derivative(BumpKind kind, double y) noexcept;

/// The even bump normalised to unit quadrature. Requires n_max >= 8.
SampledFunction base_bump(const DyadicGrid& grid, BumpKind kind = BumpKind::exponential);

struct MomentCancellation {
  SampledFunction phi;
  /// Weights of the dilates phi0^{(0)}, phi0^{(1)}, ...
  std::vector<double> coefficients;
};

/// Discrete moment h * sum y^alpha f(y) of a centred function.
double moment(const SampledFunction& f, int alpha);

/// Combines dilates of phi0 into a function with unit mass and vanishing
/// moments of orders 1..r_tilde (0 <= r_tilde <= 4).
MomentCancellation moment_cancel(const SampledFunction& phi0, int r_tilde);

/// The mollifier stack phi, rho = phi^{(1)} * phi and psi = phi^{(2)} - phi,
/// together with their dilates at every resolvable scale.
///
/// Scale-n dilates are renormalised to unit discrete mass. With that
/// convention rho^{(n)} := phi^{(n+1)} * phi^{(n)} and
/// psi^{(n)} := phi^{(n+2)} - phi^{(n)} satisfy
/// rho^{(n+1)} - rho^{(n)} = phi^{(n+1)} * psi^{(n)} exactly in discrete
/// arithmetic, which the reconstruction engine relies on.
class MollifierStack {
 public:
  static MollifierStack build(const DyadicGrid& grid, double r,
                              BumpKind kind = BumpKind::exponential);

  const DyadicGrid& grid() const noexcept { return grid_; }
  double r() const noexcept { return r_; }
  int r_tilde() const noexcept { return r_tilde_; }
  BumpKind bump_kind() const noexcept { return kind_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  const SampledFunction& phi() const noexcept { return phi_; }
  /// Periodic rho; its real-line support radius 3/4 exceeds the half period.
  const SampledFunction& rho() const noexcept { return rho_; }
  const SampledFunction& psi() const noexcept { return psi_; }

  int max_phi_scale() const noexcept { return static_cast<int>(phi_scales_.size()) - 1; }
  int max_rho_scale() const noexcept { return static_cast<int>(rho_scales_.size()) - 1; }
  int max_psi_scale() const noexcept { return static_cast<int>(psi_scales_.size()) - 1; }

  const Kernel& phi_at(int n) const;
  const Kernel& rho_at(int n) const;
  const Kernel& psi_at(int n) const;

 private:
  MollifierStack(DyadicGrid grid, double r, int r_tilde, BumpKind kind, std::vector<double> coefficients,
                 SampledFunction phi, SampledFunction rho, SampledFunction psi);

  DyadicGrid grid_;
  double r_;
  int r_tilde_;
  BumpKind kind_;
  std::vector<double> coefficients_;
  SampledFunction phi_;
  SampledFunction rho_;
  SampledFunction psi_;
  std::vector<Kernel> phi_scales_;
  std::vector<Kernel> rho_scales_;
  std::vector<Kernel> psi_scales_;
};

/// Largest integer strictly below r.
int r_tilde_for(double r);

enum class TelescopeRoute {
  /// rho^{(m)} from the per-scale convolutions held by the stack.
  discrete,
  /// rho^{(m)} by subsampling rho computed once on the real line at the
  /// finest spacing; measures how well the grid realises the continuum
  /// dilation identity.
  resampled,
};

struct TelescopeCheck {
  TelescopeRoute route = TelescopeRoute::discrete;
  /// Negative control: evaluate the right-hand side with psi replaced by 0.
  bool suppress_psi = false;
};

/// sup |[rho^{(n+1)} - rho^{(n)}] - [phi^{(n+1)} * psi^{(n)}]| / sup |rho^{(n+1)}|.
double check_telescope_identity(const MollifierStack& stack, int n, const TelescopeCheck& opts = {});

}  // namespace recon
