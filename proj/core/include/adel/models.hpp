// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "adel/effective.hpp"
#include "adel/types.hpp"

namespace adel {

/// Which golden-rule normalization fixes the injection rate gamma of a
/// ground state into a flat continuum. The discretized-continuum oracle
/// confirms two_pi_nv2 (gamma = 2 n pi V^2); pi_nv2 is kept selectable for
/// comparison only.
enum class RateConvention { two_pi_nv2, pi_nv2 };

struct GroundLevel {
  std::string label;
  double energy = 0;
};

/// A flat (wide-band) continuum: density of states n per unit energy,
/// couplings V_i and decay rates Gamma_i to each ground state.
struct ContinuumSpec {
  std::string label;
  double density = 0;
  RealVec couplings;    // size n_ground
  RealVec decay_rates;  // size n_ground, continuum -> ground
};

/// A discrete excited level with couplings V_i, decay rates Gamma_i
/// (excited -> ground) and pump rates Gamma'_i (ground -> excited).
struct ExcitedLevel {
  std::string label;
  double energy = 0;
  RealVec couplings;
  RealVec decay_rates;
  RealVec pump_rates;  // empty or zero at zero temperature
};

/// Declarative model description; the single source of truth from which both
/// exact generators and closed-form effective families are compiled.
struct ModelSpec {
  std::vector<GroundLevel> ground_levels;
  Eigen::MatrixXcd ground_couplings;  // Hermitian V_ij, zero diagonal
  std::vector<ExcitedLevel> excited_levels;
  std::vector<ContinuumSpec> continua;
  RateConvention rate_convention = RateConvention::two_pi_nv2;

  int n_ground() const { return static_cast<int>(ground_levels.size()); }
  /// PHP: ground energies plus ground-ground couplings.
  Operator ground_hamiltonian() const;
  void validate() const;  // throws Error on rate signs / shapes / Hermiticity

  std::string to_json_string(int indent = 2) const;
  static ModelSpec from_json_string(const std::string& text);
};

/// Named parameter sets for the models exercised throughout; params may
/// override the documented defaults (e.g. beta, gamma_total, detuning).
ModelSpec builtin_model(const std::string& name,
                        const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_model_names();

// -- Exact discrete generators ----------------------------------------------

/// Hamiltonian of a purely discrete model (grounds + excited levels).
Operator discrete_hamiltonian(const ModelSpec& spec);

/// Jump operators of a purely discrete model (decays, then pumps).
std::vector<Operator> discrete_jumps(const ModelSpec& spec);

/// Full Lindblad superoperator of a discrete model (9x9 for the Lambda
/// system). Requires at least one excited level and no continua.
SuperOp lambda_exact_generator(const ModelSpec& spec);

/// Projector onto the ground manifold (leading block).
Operator ground_projector(const ModelSpec& spec);

// -- Closed-form effective families ------------------------------------------

/// Wide-band continuum family: L_eff(z) = ham + sum_a [D_a + f_a(z) J_a]
/// with f_a(z) = -z/(z + Gamma_a); L0 and L1 are analytic.
class ContinuumFamily final : public EffectiveFamily {
 public:
  explicit ContinuumFamily(const ModelSpec& spec);

  int slow_dim() const override { return dim_; }
  Eigen::MatrixXcd eval(Complex z) const override;
  Eigen::MatrixXcd deriv(Complex z) const override;
  Eigen::MatrixXcd l0_matrix() const override;
  Eigen::MatrixXcd l1_matrix() const override;
  std::vector<Complex> poles() const override;
  Source source() const override { return Source::closed_form; }
  std::optional<SinglePoleForm> single_pole_form() const override;

  const Eigen::MatrixXcd& hamiltonian_part() const { return ham_; }
  const std::vector<Eigen::MatrixXcd>& jump_sums() const { return j_; }
  const std::vector<Eigen::MatrixXcd>& dissipator_sums() const { return d_; }
  const std::vector<double>& total_decay() const { return gamma_; }
  std::vector<Operator> effective_jumps() const { return f_eff_; }

 private:
  int dim_;
  Eigen::MatrixXcd ham_;
  std::vector<Eigen::MatrixXcd> d_, j_;
  std::vector<double> gamma_;
  std::vector<Operator> f_eff_;
};

std::unique_ptr<ContinuumFamily> continuum_effective_family(const ModelSpec& spec);

enum class Temperature { zero, finite };

/// Perturbative closed form for a two-ground/one-excited Lambda model, valid
/// up to O(V^2/Gamma). Finite temperature adds the pump-dressed factor and
/// the pump-decay population shuttle.
class LambdaClosedFamily final : public EffectiveFamily {
 public:
  LambdaClosedFamily(const ModelSpec& spec, Temperature temperature);

  int slow_dim() const override { return 4; }
  Eigen::MatrixXcd eval(Complex z) const override;
  Eigen::MatrixXcd deriv(Complex z) const override;
  std::vector<Complex> poles() const override;
  Source source() const override { return Source::closed_form; }

  /// max_i V_i^2 / Gamma, the size of the neglected corrections.
  double validity_ratio() const { return validity_ratio_; }

 private:
  Eigen::MatrixXcd slow_part_;               // PHP commutator + pump losses
  std::vector<Eigen::MatrixXcd> h_;          // resolvent numerators
  std::vector<Complex> xi_;                  // fast-coherence poles
  Eigen::MatrixXcd m_, mprime_;              // decay / pump harvest matrices
  double gamma_total_ = 0, pump_total_ = 0;
  double validity_ratio_ = 0;
};

std::unique_ptr<LambdaClosedFamily> lambda_effective_family(const ModelSpec& spec,
                                                            Temperature temperature);

// -- Discretized-continuum oracle ---------------------------------------------

/// A continuum model with each continuum replaced by `levels` equally spaced
/// discrete states across `bandwidth`, couplings scaled so the golden-rule
/// rate is grid independent. Used to validate the wide-band closed forms.
class DiscretizedModel {
 public:
  int total_dim() const { return static_cast<int>(hamiltonian_.rows()); }
  int n_ground() const { return n_ground_; }
  bool wideband_warning() const { return wideband_warning_; }
  const Operator& hamiltonian() const { return hamiltonian_; }
  Operator ground_block_projector() const;

  /// Explicit per-level jump operators (ground feed at rate Gamma_i).
  std::vector<Operator> jump_operators() const;

  /// Dense Lindblad superoperator; guarded against infeasible dimensions.
  SuperOp assemble_generator() const;

  /// Master-equation right-hand side in matrix form, evaluated with the
  /// arrow structure of H (O(N^2), never forms the superoperator).
  Operator rho_dot(const Operator& rho) const;

  /// Adaptive RK propagation of the matrix-form master equation.
  Operator propagate(const Operator& rho0, double t, double rtol = 1e-9) const;

  /// Slow (ground-block) trajectory on a time grid, as column-stacked
  /// ground-block density matrices.
  std::vector<StateVec> slow_trajectory(const Operator& rho0, const std::vector<double>& times,
                                        double rtol = 1e-9) const;

 private:
  friend DiscretizedModel discretized_continuum_oracle(const ModelSpec&, int, double);
  Operator hamiltonian_;
  int n_ground_ = 0;
  Eigen::VectorXd level_decay_;            // total decay per fast level
  Eigen::MatrixXd feed_;                   // n_ground x n_fast: Gamma_i per level
  bool wideband_warning_ = false;
};

/// levels must be odd (symmetric grid) and >= 1; bandwidth below 10x the
/// largest model rate raises the wide-band warning flag on the result.
DiscretizedModel discretized_continuum_oracle(const ModelSpec& spec, int levels,
                                              double bandwidth);

// -- Model relations -----------------------------------------------------------

struct CptReport {
  bool passes = false;
  double commutator_residual = 0;  // ||[PHP, rho]|| (relative)
  double coupling_residual = 0;    // ||QHP rho|| (relative, state-level reading)
};

/// Coherent-population-trapping test of a candidate slow state (column-
/// stacked on the ground manifold). The operator condition QHP = 0 is read at
/// the state level, QHP rho = 0, since a literal operator reading would
/// forbid any ground-excited coupling.
CptReport cpt_check(const ModelSpec& spec, const StateVec& rho_slow);

/// Map a single-excited-level model onto its flat-continuum counterpart with
/// density n = 2/(pi Gamma); the excited energy (Lamb shift) is dropped by
/// construction. Gamma = 0 is rejected.
ModelSpec large_gamma_map(const ModelSpec& three_level_spec);

/// Smallness parameters delta_j = -i omega_j / (Gamma/2) of the large-Gamma
/// limit, one per ground-excited detuning (positive and negative branch).
std::vector<Complex> large_gamma_smallness(const ModelSpec& three_level_spec);

}  // namespace adel
