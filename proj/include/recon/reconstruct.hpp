#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recon/coherence.hpp"
#include "recon/exec.hpp"
#include "recon/germ.hpp"
#include "recon/mollifier.hpp"
#include "recon/multiscale.hpp"
#include "recon/quasinorm.hpp"

namespace recon {

/// z -> F_z(rho_z^{(n)}) at every grid point. Requires n <= n_max - 4.
SampledFunction f_n_field(const Germ& germ, const MollifierStack& stack, int n, Exec exec = Exec::parallel);

/// z -> (F_z - F_x)(rho_z^{(n)}).
SampledFunction f_x_n_field(const Germ& germ, const MollifierStack& stack, double x_base, int n,
                            Exec exec = Exec::parallel);

struct TelescopePieces {
  int n = 0;
  /// z -> sum_y h (F_y - F_x)(phi_y^{(n+1)}) psi^{(n)}(y - z).
  SampledFunction g_prime;
  /// z -> sum_y h (F_z - F_y)(phi_y^{(n+1)}) psi^{(n)}(y - z).
  SampledFunction g_dprime;
};

/// g'_{x,n} and g''_n. With `radius`, z is restricted to B(x_base, radius)
/// and the fields vanish elsewhere. Requires n <= n_max - 4.
TelescopePieces telescope_pieces(const Germ& germ, const MollifierStack& stack, double x_base, int n,
                                 std::optional<double> radius = std::nullopt, Exec exec = Exec::parallel);

/// g''_n alone, over the whole grid.
SampledFunction g_dprime_field(const Germ& germ, const MollifierStack& stack, int n, Exec exec = Exec::parallel);

/// sup |(f_{x,n+1} - f_{x,n}) - (g' + g'')| relative to the larger of sup |f_{x,n+1} - f_{x,n}|
/// and sup |g'| + sup |g''|. Points whose stencil reaches x + 1/2, where F_x is cut, are skipped.
double telescope_residual(const Germ& germ, const MollifierStack& stack, double x_base, int n,
                          Exec exec = Exec::parallel);

struct ReconstructOptions {
  RegularityMode mode = RegularityMode::positive;
  bool record_pieces = false;
  Exec exec = Exec::parallel;
};

struct Reconstruction {
  SampledFunction f;
  int n_stop = 0;
  RegularityMode mode = RegularityMode::positive;
  /// g''_m for m = 1 .. n_stop - 1, when recorded (negative mode only).
  std::vector<SampledFunction> g_dprime;
  /// sup |f_{n_stop} - f_{n_stop - 1}|, the size of the last increment.
  double last_increment = 0.0;
};

/// Default n_stop for a grid.
inline int default_n_stop(const DyadicGrid& g) { return g.n_max() - 4; }

Reconstruction reconstruct(const Germ& germ, const MollifierStack& stack, int n_stop,
                           const ReconstructOptions& opts = {});

/// sup |f_{n+1} - f_n| for n in [n_lo, n_hi - 1].
std::vector<double> increment_sweep(const Germ& germ, const MollifierStack& stack, int n_lo, int n_hi,
                                    Exec exec = Exec::parallel);

/// Five members: the moment-cancelled bump, its derivative, the half-width
/// bumps centred at -1/4 and 1/4, and their odd difference. Each is scaled to
/// unit discrete Hoelder-r seminorm.
TestClassDictionary standard_dictionary(const MollifierStack& stack, double r);

struct ErrorOptions {
  int oversample = MultiscaleField::default_oversample;
  Exec exec = Exec::parallel;
};

/// Delta(k, x) = max over the dictionary of |(f - F_x)(xi_x^{(k)})|. Requires k_max <= n_stop - 2.
MultiscaleField error_field(const Reconstruction& rec, const Germ& germ, const TestClassDictionary& dict, int k_min,
                            int k_max, const ErrorOptions& opts = {});

/// (k, x) -> avg_{|z-x| <= 2^{-k-1}} |f_{x,k}(z)|.
MultiscaleField local_integrability(const Germ& germ, const MollifierStack& stack, int k_min, int k_max,
                                    const CoherenceOptions& opts = {});

inline constexpr double C_thm = 256.0;
/// Pointwise Delta(k, x) <= C_rec H(k, x).
inline constexpr double C_rec = 128.0;

struct TheoremRequest {
  QuasinormSpec spec;
  double r = 1.5;
  int k_min = 2;
  int k_max = 6;
  int l_min = 0;
  int l_max = 4;
  /// Defaults to n_max - 4.
  std::optional<int> n_stop;
  CoherenceOptions coherence;
};

struct TheoremLevel {
  int l = 0;
  /// N applied to the coherence coefficient field at l.
  double coefficient_norm = 0.0;
  /// 2^{l alpha} A.
  double coefficient_bound = 0.0;
  /// N applied to the l-th second-sum summand of H.
  double second_sum_norm = 0.0;
  /// 2^{-l gamma'} A.
  double second_sum_bound = 0.0;
};

struct TheoremReport {
  std::string spec;
  double alpha = 0.0;
  double A = 0.0;
  double error_norm = 0.0;
  /// error_norm / A, or 0 when A = 0.
  double ratio = 0.0;
  bool degenerate = false;
  bool pass = false;
  int n_stop = 0;
  std::vector<TheoremLevel> levels;
};

/// Coherence coefficients, (alpha, A) fit, reconstruction, error field and
/// N[Delta] <= C_thm A. Throws hypothesis_violated when r <= alpha.
TheoremReport verify_theorem_2_1(const Germ& germ, const MollifierStack& stack, const TheoremRequest& req);

}  // namespace recon
