// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "adel/compare.hpp"
#include "adel/models.hpp"
#include "adel/propagation.hpp"
#include "adel/spectral.hpp"
#include "adel/superop.hpp"
#include "support/oracles.hpp"

using namespace adel;
namespace oracle = adel::testing;

TEST_CASE("ModelSpec validation and JSON round trip") {
  ModelSpec spec = builtin_model("lambda_fig6");
  const std::string text = spec.to_json_string();
  const ModelSpec back = ModelSpec::from_json_string(text);
  CHECK(back.ground_levels.size() == 2);
  CHECK(back.excited_levels.size() == 1);
  CHECK(back.excited_levels[0].pump_rates(0) == doctest::Approx(5.0));
  CHECK(back.to_json_string() == text);

  CHECK_THROWS_AS(ModelSpec::from_json_string("{not json"), Error);
  CHECK_THROWS_AS(ModelSpec::from_json_string("{}"), Error);

  ModelSpec bad = spec;
  bad.excited_levels[0].decay_rates(0) = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  ModelSpec skew = spec;
  skew.ground_couplings(0, 1) = Complex(0.5, 0.1);  // not Hermitian
  CHECK_THROWS_AS(skew.validate(), Error);
}

TEST_CASE("single-level continuum family matches the printed closed form") {
  const double beta = 1.0;
  const ModelSpec spec = builtin_model("single_level", {{"beta", beta}});
  const auto family = continuum_effective_family(spec);
  REQUIRE(family->slow_dim() == 1);

  // gamma = 2 n pi V^2 = 1 by the builtin normalization; Gamma = beta.
  const Complex z(0.7, 0.4);
  const Complex expected = -z / (z + beta);  // times gamma = 1
  CHECK(std::abs(family->eval(z)(0, 0) - expected) < 1e-14);

  // The z-independent term L0 is zero for a single level and one continuum.
  CHECK(std::abs(family->l0_matrix()(0, 0)) < 1e-14);
  CHECK(std::abs(family->l1_matrix()(0, 0) - Complex(-1.0 / beta, 0)) < 1e-14);

  // Trace correction: alpha = 1/(1 + 1/beta).
  const TraceCorrection tc = trace_correction(*family);
  CHECK(tc.alpha == doctest::Approx(1.0 / (1.0 + 1.0 / beta)).epsilon(1e-12));

  const auto big = continuum_effective_family(builtin_model("single_level", {{"beta", 1e6}}));
  CHECK(trace_correction(*big).alpha == doctest::Approx(1.0 - 1e-6).epsilon(1e-9));
}

TEST_CASE("detailed balance reading of the single-level correction") {
  // alpha equals the two-site steady population 1/(1 + k_PQ/k_QP) with
  // k_QP = Gamma and k_PQ the golden-rule injection rate.
  const double beta = 3.7;
  const auto family = continuum_effective_family(builtin_model("single_level", {{"beta", beta}}));
  const double k_qp = beta;  // Gamma in gamma units
  const double k_pq = 1.0;   // injection rate
  CHECK(trace_correction(*family).alpha ==
        doctest::Approx(1.0 / (1.0 + k_pq / k_qp)).epsilon(1e-12));
}

TEST_CASE("continuum family structure") {
  SUBCASE("no continua: plain Hamiltonian family") {
    ModelSpec spec;
    spec.ground_levels = {{"g1", 0.3}, {"g2", -0.2}};
    spec.ground_couplings = Eigen::MatrixXcd::Zero(2, 2);
    spec.ground_couplings(0, 1) = spec.ground_couplings(1, 0) = 0.15;
    const auto family = continuum_effective_family(spec);
    CHECK(family->poles().empty());
    CHECK((family->eval(Complex(0.3, 0.1)) - family->l0_matrix()).norm() == 0.0);
    CHECK(family->l1_matrix().norm() == 0.0);
  }
  SUBCASE("f(0) = 0 makes L_eff(0) the Lindblad-form L0") {
    const auto family = continuum_effective_family(builtin_model("fano_fig3"));
    CHECK((family->eval(Complex(0, 0)) - family->l0_matrix()).norm() < 1e-13);
    CHECK(lindblad_form_defect(family->l0_matrix()) > -1e-12);
  }
  SUBCASE("L1 = -sum_i J_i / Gamma") {
    const ModelSpec spec = builtin_model("fano_fig3", {{"gamma_total", 10.0}});
    const auto family = continuum_effective_family(spec);
    Eigen::MatrixXcd j_total = Eigen::MatrixXcd::Zero(4, 4);
    for (const auto& f : family->effective_jumps()) {
      j_total += sandwich(f, f);
    }
    CHECK((family->l1_matrix() + j_total / 10.0).norm() < 1e-13);
  }
  SUBCASE("derivative consistency via finite differences") {
    for (double gamma_total : {0.1, 10.0}) {
      const auto family =
          continuum_effective_family(builtin_model("fano_fig3", {{"gamma_total", gamma_total}}));
      CHECK((family->l1_matrix() - oracle::fd_derivative_at_zero(*family)).norm() < 1e-6);
    }
  }
  SUBCASE("evaluation at the pole is rejected with the pole location") {
    const auto family = continuum_effective_family(builtin_model("fano_fig3"));
    CHECK_THROWS_AS(family->eval(Complex(-10.0, 0)), ResolventPoleError);
  }
}

TEST_CASE("Fano non-Hermitian decomposition and <L0> = 0") {
  const ModelSpec spec = builtin_model("fano_fig3", {{"gamma_total", 10.0}});
  const auto family = continuum_effective_family(spec);

  // N = L0 - sum_i J_i equals the commutator superoperator of the
  // non-Hermitian H_D = PHP - (i/2) sum_j F_j^dag F_j. The one-half keeps
  // the dissipator algebra consistent; the direct identity below pins it.
  Eigen::MatrixXcd j_total = Eigen::MatrixXcd::Zero(4, 4);
  Operator ff = Operator::Zero(2, 2);
  for (const auto& f : family->effective_jumps()) {
    j_total += sandwich(f, f);
    ff += f.adjoint() * f;
  }
  const Operator h_d = spec.ground_hamiltonian() - Complex(0, 0.5) * ff;
  const Operator id = Operator::Identity(2, 2);
  const Eigen::MatrixXcd commutator =
      Complex(0, -1) * (kron(id, h_d) - kron(h_d.conjugate(), id));
  CHECK((family->l0_matrix() - j_total - commutator).cwiseAbs().maxCoeff() < 1e-12);

  // tr(L0 rho_bar) vanishes for the Fano model.
  const TraceCorrection tc = trace_correction(*family);
  CHECK(std::abs(family->trace_functional().dot((family->l0_matrix() * tc.rho_bar).eval())) <
        1e-12);
}

TEST_CASE("lambda_exact_generator") {
  SUBCASE("V = 0 at zero temperature: excited population decays at Gamma1 + Gamma2") {
    ModelSpec spec = builtin_model("lambda_fig5", {{"gamma_total", 3.0}});
    spec.excited_levels[0].couplings.setZero();
    const SuperOp l = lambda_exact_generator(spec);
    Operator rho0 = Operator::Zero(3, 3);
    rho0(2, 2) = 1.0;
    const double t = 0.8;
    const Operator rho = unvectorize(expm_apply(l, t, vectorize(rho0)));
    CHECK(rho(2, 2).real() == doctest::Approx(std::exp(-3.0 * t)).epsilon(1e-10));
  }
  SUBCASE("trace annihilation") {
    const SuperOp l = lambda_exact_generator(builtin_model("lambda_fig6"));
    const StateVec id_vec = vectorize(Operator::Identity(3, 3));
    CHECK((id_vec.adjoint() * l).norm() <= 1e-12 * l.norm());
  }
  SUBCASE("kernel steady state agrees with long-time propagation") {
    const SuperOp l = lambda_exact_generator(builtin_model("lambda_fig5"));
    const StateVec steady = steady_state_exact(l);
    Operator rho0 = Operator::Zero(3, 3);
    rho0(0, 0) = 1.0;
    const StateVec late = expm_apply(l, 400.0, vectorize(rho0));
    CHECK((steady - late).norm() < 1e-8);
  }
}

TEST_CASE("Lambda closed form converges to the exact Schur family") {
  // Relative errors frozen from the perturbative scaling O(V^2/Gamma)
  // (values: ~7e-3, ~3e-4, ~9e-6 for the evaluation; L1 is relatively
  // larger since L1 itself is O(V^2/Gamma^2)).
  struct Row {
    double gamma;
    double eval_tol;
    double l1_tol;
  };
  for (const Row row : {Row{10.0, 2e-2, 0.15}, Row{30.0, 1e-3, 0.03}, Row{100.0, 3e-5, 3e-3}}) {
    const ModelSpec spec = builtin_model("lambda_fig5", {{"gamma_total", row.gamma}});
    const SchurFamily exact(lambda_exact_generator(spec), ground_projector(spec));
    const auto closed = lambda_effective_family(spec, Temperature::zero);
    for (const Complex z : {Complex(0, 0), Complex(0.05, 0.02)}) {
      const auto a = exact.eval(z);
      CHECK((a - closed->eval(z)).norm() <= row.eval_tol * a.norm());
    }
    CHECK((exact.l1_matrix() - closed->l1_matrix()).norm() <=
          row.l1_tol * exact.l1_matrix().norm());
    CHECK(closed->validity_ratio() == doctest::Approx(1.0 / row.gamma));
  }
}

TEST_CASE("finite-temperature Lambda closed form") {
  SUBCASE("matches the exact Schur family of the pumped model") {
    for (double gamma : {10.0, 30.0}) {
      const ModelSpec spec = builtin_model("lambda_fig6", {{"gamma_total", gamma}});
      const SchurFamily exact(lambda_exact_generator(spec), ground_projector(spec));
      const auto closed = lambda_effective_family(spec, Temperature::finite);
      const auto a = exact.eval(Complex(0, 0));
      CHECK((a - closed->eval(Complex(0, 0))).norm() <= (gamma == 10.0 ? 5e-3 : 1e-4) * a.norm());
    }
  }
  SUBCASE("zero pump rates reduce the finite-T form to the zero-T form entrywise") {
    const ModelSpec spec = builtin_model("lambda_fig5");
    const auto zero_t = lambda_effective_family(spec, Temperature::zero);
    ModelSpec pumped = spec;
    pumped.excited_levels[0].pump_rates = RealVec::Zero(2);
    const auto finite_t = lambda_effective_family(pumped, Temperature::finite);
    for (const Complex z : {Complex(0, 0), Complex(0.3, -0.2), Complex(-0.05, 0.6)}) {
      CHECK((zero_t->eval(z) - finite_t->eval(z)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  SUBCASE("closed-form derivative matches finite differences") {
    const auto family = lambda_effective_family(builtin_model("lambda_fig6"), Temperature::finite);
    CHECK((family->l1_matrix() - oracle::fd_derivative_at_zero(*family)).norm() < 1e-6);
  }
}

TEST_CASE("order-2 perturbative inversion reproduces the Schur L0") {
  const ModelSpec spec = builtin_model("lambda_fig5", {{"gamma_total", 20.0}});
  const SuperOp l = lambda_exact_generator(spec);
  const Operator h = discrete_hamiltonian(spec);
  const Operator p = ground_projector(spec);
  const ProjectedLindblad blocks(l, p);
  const auto ldw = build_ld_w(l, h, p);
  const Eigen::MatrixXcd l0_exact = blocks.l0_l1().l0;

  double previous = std::numeric_limits<double>::infinity();
  for (int order : {0, 2, 4}) {
    const Eigen::MatrixXcd inv = perturbative_inverse(ldw.ld, ldw.w, order);
    const Eigen::MatrixXcd l0_pert = blocks.pp() - blocks.pq() * inv * blocks.qp();
    const double err = (l0_pert - l0_exact).norm() / l0_exact.norm();
    CHECK(err < previous);
    previous = err;
    if (order == 2) {
      // O((V/Gamma)^3) agreement: (1/20)^3 times an O(10) prefactor.
      CHECK(err < 20.0 * std::pow(1.0 / 20.0, 3));
    }
  }
}

TEST_CASE("discretized continuum oracle") {
  const ModelSpec single = builtin_model("single_level", {{"beta", 1.0}});

  SUBCASE("validation") {
    CHECK_THROWS_AS(discretized_continuum_oracle(single, 10, 50.0), Error);  // even
    CHECK_THROWS_AS(discretized_continuum_oracle(single, 31, -1.0), Error);
    CHECK_THROWS_AS(discretized_continuum_oracle(builtin_model("lambda_fig5"), 31, 50.0), Error);
    const auto narrow = discretized_continuum_oracle(single, 31, 5.0);
    CHECK(narrow.wideband_warning());
    const auto wide = discretized_continuum_oracle(single, 31, 50.0);
    CHECK(!wide.wideband_warning());
  }
  SUBCASE("M = 1 degenerates to a single discrete excited level") {
    const auto model = discretized_continuum_oracle(single, 1, 50.0);
    CHECK(model.total_dim() == 2);
    CHECK(model.jump_operators().size() == 1);
  }
  SUBCASE("structured rho_dot equals the dense superoperator action") {
    const ModelSpec fano = builtin_model("fano_fig3", {{"gamma_total", 2.0}});
    const auto model = discretized_continuum_oracle(fano, 5, 20.0);
    const SuperOp dense = model.assemble_generator();
    oracle::Rng rng(501);
    for (int trial = 0; trial < 5; ++trial) {
      const Operator rho = oracle::random_matrix(model.total_dim(), rng);
      const Operator via_struct = model.rho_dot(rho);
      const Operator via_dense = unvectorize(dense * vectorize(rho));
      CHECK((via_struct - via_dense).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("dense assembly is guarded against infeasible sizes") {
    CHECK_THROWS_AS(discretized_continuum_oracle(single, 201, 50.0).assemble_generator(), Error);
  }
  SUBCASE("slow trajectory converges to the closed-form law and fixes the rate convention") {
    const auto model = discretized_continuum_oracle(single, 31, 50.0);
    Operator rho0 = Operator::Zero(model.total_dim(), model.total_dim());
    rho0(0, 0) = 1.0;
    const std::vector<double> taus = {0.5, 1.0, 2.0};
    const auto traj = model.slow_trajectory(rho0, taus, 1e-8);
    double err_two_pi = 0, err_pi = 0;
    for (size_t i = 0; i < taus.size(); ++i) {
      const double tr = trace_of_vec(traj[i]).real();
      err_two_pi = std::max(err_two_pi, std::abs(tr - oracle::single_level_law(1.0, taus[i])));
      // Under gamma = n pi V^2 the same physical run would read beta = 2 and
      // half the rescaled time.
      err_pi = std::max(err_pi,
                        std::abs(tr - oracle::single_level_law(2.0, 0.5 * taus[i])));
    }
    CHECK(err_two_pi < 0.05);
    CHECK(err_two_pi < err_pi / 3.0);
  }
}

TEST_CASE("cpt_check") {
  const ModelSpec at_cpt = builtin_model("fig9", {{"detuning", 0.0}});
  const double v1 = 1.7, v2 = 1.0;
  Eigen::Vector2cd dark;
  dark << v2, -v1;
  dark.normalize();
  const Operator rho_dark = dark * dark.adjoint();

  const CptReport pass = cpt_check(at_cpt, vectorize(rho_dark));
  CHECK(pass.passes);
  CHECK(pass.commutator_residual < 1e-12);
  CHECK(pass.coupling_residual < 1e-12);

  const ModelSpec detuned = builtin_model("fig9", {{"detuning", 0.7}});
  const CptReport fail = cpt_check(detuned, vectorize(rho_dark));
  CHECK(!fail.passes);

  // At the passing point the trace correction is exactly one.
  const SchurFamily family(lambda_exact_generator(at_cpt), ground_projector(at_cpt));
  CHECK(std::abs(trace_correction(family).alpha - 1.0) < 1e-10);
}

TEST_CASE("large_gamma_map") {
  SUBCASE("rejects vanishing dissipation") {
    ModelSpec spec = builtin_model("fig7");
    spec.excited_levels[0].decay_rates.setZero();
    CHECK_THROWS_AS(large_gamma_map(spec), Error);
  }
  SUBCASE("density of states is 2/(pi Gamma)") {
    const ModelSpec mapped = large_gamma_map(builtin_model("fig7", {{"gamma_total", 25.0}}));
    REQUIRE(mapped.continua.size() == 1);
    CHECK(mapped.continua[0].density ==
          doctest::Approx(2.0 / (std::numbers::pi * 25.0)).epsilon(1e-14));
    CHECK(mapped.excited_levels.empty());
  }
  SUBCASE("dimensionless L0 deviation decays as 1/Gamma") {
    // The absolute operator difference is the Lamb-shift term O(omega V^2 /
    // Gamma^2); measured against the dissipative magnitude O(V^2/Gamma) it
    // is the smallness parameter delta = O(omega/Gamma).
    std::vector<double> gammas = {10.0, 30.0, 100.0};
    std::vector<double> deviation;
    for (double g : gammas) {
      const ModelSpec spec = builtin_model("fig7", {{"gamma_total", g}});
      const SchurFamily threels(lambda_exact_generator(spec), ground_projector(spec));
      const auto cont = continuum_effective_family(large_gamma_map(spec));
      const double dissipative = (cont->l0_matrix() - cont->hamiltonian_part()).norm();
      deviation.push_back((threels.l0_matrix() - cont->l0_matrix()).norm() / dissipative);
    }
    const double slope = oracle::loglog_slope(gammas, deviation);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.2));
  }
  SUBCASE("L1 differs by the predicted offset") {
    for (double g : {30.0, 100.0}) {
      const ModelSpec spec = builtin_model("fig7", {{"gamma_total", g}});
      const SchurFamily threels(lambda_exact_generator(spec), ground_projector(spec));
      const auto cont = continuum_effective_family(large_gamma_map(spec));
      const Eigen::MatrixXcd predicted =
          cont->l1_matrix() - (2.0 / g) * (cont->l0_matrix() - cont->hamiltonian_part());
      const double with_offset =
          (threels.l1_matrix() - predicted).norm() / threels.l1_matrix().norm();
      const double without_offset =
          (threels.l1_matrix() - cont->l1_matrix()).norm() / threels.l1_matrix().norm();
      CHECK(with_offset < 0.05);
      CHECK(without_offset > 0.5);  // the offset term is essential
    }
  }
  SUBCASE("smallness parameters vanish as Gamma grows") {
    const auto small = large_gamma_smallness(builtin_model("fig7", {{"gamma_total", 300.0}}));
    REQUIRE(small.size() == 4);
    for (const Complex d : small) CHECK(std::abs(d) < 0.01);
    const auto big = large_gamma_smallness(builtin_model("fig7", {{"gamma_total", 1.0}}));
    CHECK(std::abs(big[0]) > std::abs(small[0]));
  }
}

TEST_CASE("oracle self-convergence: doubling M changes the trajectory below 1e-3") {
  // Converged settings: the level spacing sits below the decay width, so the
  // discrete band already acts continuous and M only refines the tails.
  const ModelSpec spec = builtin_model("single_level", {{"beta", 1.0}});
  const std::vector<double> taus = {0.5, 1.0, 2.0};
  std::vector<std::vector<StateVec>> runs;
  for (int m : {51, 101}) {
    const auto model = discretized_continuum_oracle(spec, m, 50.0);
    Operator rho0 = Operator::Zero(model.total_dim(), model.total_dim());
    rho0(0, 0) = 1.0;
    runs.push_back(model.slow_trajectory(rho0, taus, 1e-8));
  }
  for (size_t i = 0; i < taus.size(); ++i) {
    CHECK((runs[0][i] - runs[1][i]).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("compare_evolutions emits coherent variant tables") {
  const ModelSpec spec = builtin_model("lambda_fig5");
  Operator rho0 = Operator::Zero(2, 2);
  rho0(0, 0) = 1.0;
  const auto cmp = compare_evolutions(spec, vectorize(rho0), {0.0, 0.5, 1.0, 2.0});
  REQUIRE(cmp.variants.size() == 4);
  CHECK(cmp.variants[0].name == "exact");
  CHECK(cmp.variants[1].name == "l0");
  CHECK(cmp.variants[2].name == "rescaled");
  CHECK(cmp.variants[3].name == "keldysh");
  // The bare L0 evolution keeps unit trace; the rescaled one starts at alpha.
  CHECK(cmp.variants[1].observables[0].trace.real() == doctest::Approx(1.0));
  CHECK(cmp.variants[2].observables[0].trace.real() == doctest::Approx(cmp.alpha));
  // Fidelity of the exact variant against itself is one.
  for (double f : cmp.variants[0].fidelity_vs_exact) {
    CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("compare_evolutions on the single-level model shows the trace semantics") {
  const ModelSpec spec = builtin_model("single_level", {{"beta", 1.0}});
  Operator one = Operator::Ones(1, 1);
  const auto cmp = compare_evolutions(spec, vectorize(one), linspace(0.0, 12.0, 25));
  const auto& exact = cmp.variants[0];
  const auto& bare = cmp.variants[1];
  const auto& rescaled = cmp.variants[2];
  // Exact trace relaxes to 1/2; the bare L0 evolution stays at 1 (the
  // documented failure mode); the rescaled one sits at alpha = 1/2 forever
  // because L0 = 0 here.
  CHECK(exact.observables.back().trace.real() == doctest::Approx(0.5).epsilon(1e-6));
  for (size_t i = 0; i < cmp.times.size(); ++i) {
    CHECK(bare.observables[i].trace.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rescaled.observables[i].trace.real() == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("all variants coincide at the Fano CPT point from the dark state") {
  const ModelSpec spec = large_gamma_map(builtin_model("fig9", {{"gamma_total", 10.0}}));
  Eigen::Vector2cd dark;
  dark << 1.0, -1.7;
  dark.normalize();
  const Operator rho_dark = dark * dark.adjoint();
  const auto cmp = compare_evolutions(spec, vectorize(rho_dark), linspace(0.0, 5.0, 11));
  for (const auto& variant : cmp.variants) {
    for (size_t i = 0; i < cmp.times.size(); ++i) {
      CHECK((variant.states[i] - cmp.variants[0].states[i]).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  CHECK(cmp.alpha == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rescaled-evolution error floor shrinks with the dissipation rate") {
  // || alpha e^{L0 t} rho0 - P e^{Lt} rho0 || peaks during the transient and
  // then settles (both sides share the same alpha rho_bar limit, so the
  // late-time deviation sits below the transient floor); the floor decreases
  // as Gamma grows.
  std::vector<double> floors;
  for (double gamma_total : {10.0, 100.0}) {
    const ModelSpec spec = builtin_model("fano_fig3", {{"gamma_total", gamma_total}});
    Operator rho0 = Operator::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const auto family = continuum_effective_family(spec);
    const auto pairs = nonlinear_eigs_rational(*family);
    const double gap = spectral_gap(pairs);
    const TraceCorrection tc = trace_correction(*family);
    auto deviation = [&](double t) {
      const Eigen::VectorXcd exact = keldysh_propagate(pairs, vectorize(rho0), t);
      const Eigen::VectorXcd rescaled =
          tc.alpha * expm_apply(family->l0_matrix(), t, vectorize(rho0));
      return (exact - rescaled).norm();
    };
    double floor = 0;
    for (double t : linspace(0.0, 10.0 / std::abs(gap), 21)) {
      floor = std::max(floor, deviation(t));
    }
    CHECK(deviation(40.0 / std::abs(gap)) <= floor);
    floors.push_back(floor);
  }
  CHECK(floors[1] < floors[0]);
}

TEST_CASE("build_ld_w carries the pump-augmented widths at finite temperature") {
  const ModelSpec spec = builtin_model("lambda_fig6", {{"gamma_total", 10.0}});
  const auto ldw =
      build_ld_w(lambda_exact_generator(spec), discrete_hamiltonian(spec), ground_projector(spec));
  // Ground-excited coherences relax at (Gamma + Gamma'_i)/2 = 7.5 here.
  int found = 0;
  for (Eigen::Index i = 0; i < ldw.ld.rows(); ++i) {
    if (std::abs(ldw.ld(i, i).real() + 7.5) < 1e-12) ++found;
  }
  CHECK(found == 4);
}
