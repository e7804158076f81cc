// Copyright (c) 2026 the adel authors
// SPDX-License-Identifier: Apache-2.0

#include "adel/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include <json.hpp>

#include "adel/detail/rk45.hpp"
#include "adel/superop.hpp"

namespace adel {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double kappa_squared(RateConvention convention, double density) {
  const double factor = convention == RateConvention::two_pi_nv2 ? 2.0 : 1.0;
  return factor * density * kPi;
}

void check_sizes(const RealVec& v, int n_ground, const std::string& what) {
  if (v.size() != n_ground) {
    throw DimensionError("ModelSpec: " + what + " must have one entry per ground state");
  }
}

}  // namespace

Operator ModelSpec::ground_hamiltonian() const {
  const int ng = n_ground();
  Operator h = Operator::Zero(ng, ng);
  for (int i = 0; i < ng; ++i) h(i, i) = ground_levels[i].energy;
  if (ground_couplings.size() > 0) h += ground_couplings;
  return h;
}

void ModelSpec::validate() const {
  const int ng = n_ground();
  if (ng < 1) throw Error("ModelSpec: at least one ground level required");
  if (ground_couplings.size() > 0) {
    if (ground_couplings.rows() != ng || ground_couplings.cols() != ng) {
      throw DimensionError("ModelSpec: ground_couplings must be n_ground x n_ground");
    }
    if (!is_hermitian(ground_couplings, numeric_policy().hermiticity_tol)) {
      throw Error("ModelSpec: ground_couplings must be Hermitian");
    }
    if (ground_couplings.diagonal().cwiseAbs().maxCoeff() > 1e-12) {
      throw Error("ModelSpec: ground coupling diagonal must be zero (energies live in levels)");
    }
  }
  for (const auto& ex : excited_levels) {
    check_sizes(ex.couplings, ng, "excited couplings");
    check_sizes(ex.decay_rates, ng, "excited decay_rates");
    if (ex.pump_rates.size() != 0) check_sizes(ex.pump_rates, ng, "pump_rates");
    if (ex.decay_rates.minCoeff() < 0 ||
        (ex.pump_rates.size() && ex.pump_rates.minCoeff() < 0)) {
      throw Error("ModelSpec: rates must be nonnegative");
    }
  }
  for (const auto& c : continua) {
    check_sizes(c.couplings, ng, "continuum couplings");
    check_sizes(c.decay_rates, ng, "continuum decay_rates");
    if (c.density <= 0) throw Error("ModelSpec: continuum density must be positive");
    if (c.decay_rates.minCoeff() < 0) throw Error("ModelSpec: rates must be nonnegative");
  }
}

std::string ModelSpec::to_json_string(int indent) const {
  validate();
  json j;
  j["schema_version"] = 1;
  j["rate_convention"] =
      rate_convention == RateConvention::two_pi_nv2 ? "two_pi_nv2" : "pi_nv2";
  j["ground_levels"] = json::array();
  for (const auto& g : ground_levels) {
    j["ground_levels"].push_back({{"label", g.label}, {"energy", g.energy}});
  }
  const int ng = n_ground();
  json vij = json::array();
  for (int i = 0; i < ng; ++i) {
    json row = json::array();
    for (int k = 0; k < ng; ++k) {
      Complex value = ground_couplings.size() > 0 ? ground_couplings(i, k) : Complex(0, 0);
      if (std::abs(value.imag()) > 1e-14) {
        throw Error("ModelSpec: the JSON schema stores real couplings only");
      }
      row.push_back(value.real());
    }
    vij.push_back(row);
  }
  j["ground_couplings"] = vij;
  j["excited_levels"] = json::array();
  for (const auto& ex : excited_levels) {
    json e;
    e["label"] = ex.label;
    e["energy"] = ex.energy;
    e["couplings"] = std::vector<double>(ex.couplings.data(), ex.couplings.data() + ng);
    e["decay_rates"] = std::vector<double>(ex.decay_rates.data(), ex.decay_rates.data() + ng);
    std::vector<double> pumps(ng, 0.0);
    if (ex.pump_rates.size()) {
      pumps.assign(ex.pump_rates.data(), ex.pump_rates.data() + ng);
    }
    e["pump_rates"] = pumps;
    j["excited_levels"].push_back(e);
  }
  j["continua"] = json::array();
  for (const auto& c : continua) {
    json e;
    e["label"] = c.label;
    e["density"] = c.density;
    e["couplings"] = std::vector<double>(c.couplings.data(), c.couplings.data() + ng);
    e["decay_rates"] = std::vector<double>(c.decay_rates.data(), c.decay_rates.data() + ng);
    j["continua"].push_back(e);
  }
  return j.dump(indent);
}

ModelSpec ModelSpec::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw Error(std::string("ModelSpec: JSON parse error: ") + err.what());
  }
  ModelSpec spec;
  if (j.contains("rate_convention")) {
    const std::string conv = j["rate_convention"];
    if (conv == "two_pi_nv2") {
      spec.rate_convention = RateConvention::two_pi_nv2;
    } else if (conv == "pi_nv2") {
      spec.rate_convention = RateConvention::pi_nv2;
    } else {
      throw Error("ModelSpec: unknown rate_convention '" + conv + "'");
    }
  }
  if (!j.contains("ground_levels") || !j["ground_levels"].is_array() ||
      j["ground_levels"].empty()) {
    throw Error("ModelSpec: ground_levels array is required");
  }
  for (const auto& g : j["ground_levels"]) {
    spec.ground_levels.push_back({g.value("label", std::string("g")), g.at("energy").get<double>()});
  }
  const int ng = spec.n_ground();
  spec.ground_couplings = Mat::Zero(ng, ng);
  if (j.contains("ground_couplings")) {
    const auto& rows = j["ground_couplings"];
    if (static_cast<int>(rows.size()) != ng) {
      throw Error("ModelSpec: ground_couplings shape mismatch");
    }
    for (int i = 0; i < ng; ++i) {
      if (static_cast<int>(rows[i].size()) != ng) {
        throw Error("ModelSpec: ground_couplings shape mismatch");
      }
      for (int k = 0; k < ng; ++k) spec.ground_couplings(i, k) = rows[i][k].get<double>();
    }
  }
  auto read_vec = [ng](const json& arr, const std::string& what) {
    if (static_cast<int>(arr.size()) != ng) {
      throw Error("ModelSpec: " + what + " must have one entry per ground state");
    }
    RealVec v(ng);
    for (int i = 0; i < ng; ++i) v(i) = arr[i].get<double>();
    return v;
  };
  for (const auto& e : j.value("excited_levels", json::array())) {
    ExcitedLevel ex;
    ex.label = e.value("label", std::string("e"));
    ex.energy = e.at("energy").get<double>();
    ex.couplings = read_vec(e.at("couplings"), "excited couplings");
    ex.decay_rates = read_vec(e.at("decay_rates"), "excited decay_rates");
    ex.pump_rates = e.contains("pump_rates") ? read_vec(e["pump_rates"], "pump_rates")
                                             : RealVec::Zero(ng).eval();
    spec.excited_levels.push_back(std::move(ex));
  }
  for (const auto& e : j.value("continua", json::array())) {
    ContinuumSpec c;
    c.label = e.value("label", std::string("k"));
    c.density = e.at("density").get<double>();
    c.couplings = read_vec(e.at("couplings"), "continuum couplings");
    c.decay_rates = read_vec(e.at("decay_rates"), "continuum decay_rates");
    spec.continua.push_back(std::move(c));
  }
  spec.validate();
  return spec;
}

// -- Builtins -----------------------------------------------------------------

ModelSpec builtin_model(const std::string& name, const std::map<std::string, double>& params) {
  ModelSpec spec;
  auto two_ground = [&spec](double e1, double e2) {
    spec.ground_levels = {{"g1", e1}, {"g2", e2}};
    spec.ground_couplings = Mat::Zero(2, 2);
  };
  auto split_decay = [](double total) {
    RealVec v(2);
    v << total / 2, total / 2;
    return v;
  };

  if (name == "single_level") {
    const double beta = get_param(params, "beta", 1.0);
    spec.ground_levels = {{"g1", 0.0}};
    spec.ground_couplings = Mat::Zero(1, 1);
    ContinuumSpec c;
    c.label = "k1";
    // density 1/(2 pi) makes the injection rate gamma = 2 n pi V^2 equal one,
    // so the CLI time grid is directly the rescaled time.
    c.density = 1.0 / (2.0 * kPi);
    c.couplings = RealVec::Ones(1);
    c.decay_rates = RealVec::Constant(1, beta);
    spec.continua.push_back(c);
  } else if (name == "fano_fig3") {
    const double gamma_total = get_param(params, "gamma_total", 10.0);
    two_ground(0.0, 0.9);
    ContinuumSpec c;
    c.label = "k1";
    c.density = get_param(params, "density", 1.0);
    c.couplings = RealVec(2);
    c.couplings << 1.0, 0.2;
    c.decay_rates = split_decay(gamma_total);
    spec.continua.push_back(c);
  } else if (name == "lambda_fig5" || name == "lambda_fig6") {
    const double gamma_total = get_param(params, "gamma_total", 10.0);
    two_ground(7.0, 9.0);
    ExcitedLevel ex;
    ex.label = "e1";
    ex.energy = 6.0;
    ex.couplings = RealVec(2);
    ex.couplings << 1.0, 0.7;
    ex.decay_rates = split_decay(gamma_total);
    // Infinite temperature: pumping at the same rate as the decay.
    ex.pump_rates = (name == "lambda_fig6") ? ex.decay_rates : RealVec::Zero(2).eval();
    spec.excited_levels.push_back(ex);
  } else if (name == "fig7") {
    const double gamma_total = get_param(params, "gamma_total", 10.0);
    two_ground(0.5, -0.1);
    ExcitedLevel ex;
    ex.label = "e1";
    ex.energy = 0.01;
    ex.couplings = RealVec(2);
    ex.couplings << 0.2, 0.3;
    ex.decay_rates = split_decay(gamma_total);
    ex.pump_rates = RealVec::Zero(2);
    spec.excited_levels.push_back(ex);
  } else if (name == "fig9") {
    const double gamma_total = get_param(params, "gamma_total", 10.0);
    const double detuning = get_param(params, "detuning", 0.0);
    // g2-e1 detuning pinned to zero; g1-e1 detuning swept.
    two_ground(detuning, 0.0);
    ExcitedLevel ex;
    ex.label = "e1";
    ex.energy = 0.0;
    ex.couplings = RealVec(2);
    ex.couplings << 1.7, 1.0;
    ex.decay_rates = split_decay(gamma_total);
    ex.pump_rates = RealVec::Zero(2);
    spec.excited_levels.push_back(ex);
  } else {
    throw Error("builtin_model: unknown builtin '" + name + "'");
  }
  spec.validate();
  return spec;
}

std::vector<std::string> builtin_model_names() {
  return {"single_level", "fano_fig3", "lambda_fig5", "lambda_fig6", "fig7", "fig9"};
}

// -- Exact discrete generators --------------------------------------------------

Operator discrete_hamiltonian(const ModelSpec& spec) {
  spec.validate();
  if (!spec.continua.empty()) {
    throw Error("discrete_hamiltonian: model has continua; discretize them first");
  }
  const int ng = spec.n_ground();
  const int nx = static_cast<int>(spec.excited_levels.size());
  const int n = ng + nx;
  Operator h = Operator::Zero(n, n);
  h.topLeftCorner(ng, ng) = spec.ground_hamiltonian();
  for (int a = 0; a < nx; ++a) {
    const auto& ex = spec.excited_levels[a];
    h(ng + a, ng + a) = ex.energy;
    for (int i = 0; i < ng; ++i) {
      h(i, ng + a) = ex.couplings(i);
      h(ng + a, i) = ex.couplings(i);
    }
  }
  return h;
}

std::vector<Operator> discrete_jumps(const ModelSpec& spec) {
  const int ng = spec.n_ground();
  const int nx = static_cast<int>(spec.excited_levels.size());
  const int n = ng + nx;
  std::vector<Operator> jumps;
  for (int a = 0; a < nx; ++a) {
    const auto& ex = spec.excited_levels[a];
    for (int i = 0; i < ng; ++i) {
      if (ex.decay_rates(i) > 0) {
        Operator f = Operator::Zero(n, n);
        f(i, ng + a) = std::sqrt(ex.decay_rates(i));
        jumps.push_back(f);
      }
    }
    for (int i = 0; i < ng; ++i) {
      if (ex.pump_rates.size() && ex.pump_rates(i) > 0) {
        Operator f = Operator::Zero(n, n);
        f(ng + a, i) = std::sqrt(ex.pump_rates(i));
        jumps.push_back(f);
      }
    }
  }
  return jumps;
}

SuperOp lambda_exact_generator(const ModelSpec& spec) {
  if (spec.excited_levels.empty()) {
    throw Error("lambda_exact_generator: model has no discrete excited level");
  }
  return lindblad(discrete_hamiltonian(spec), discrete_jumps(spec));
}

Operator ground_projector(const ModelSpec& spec) {
  if (!spec.continua.empty()) {
    throw Error("ground_projector: only defined for discrete models");
  }
  const int ng = spec.n_ground();
  const int n = ng + static_cast<int>(spec.excited_levels.size());
  Operator p = Operator::Zero(n, n);
  p.topLeftCorner(ng, ng).setIdentity();
  return p;
}

// -- Continuum closed form -------------------------------------------------------

ContinuumFamily::ContinuumFamily(const ModelSpec& spec) {
  spec.validate();
  if (!spec.excited_levels.empty()) {
    throw Error("ContinuumFamily: discrete excited levels are not part of the wide-band form");
  }
  const int ng = spec.n_ground();
  dim_ = ng * ng;
  const Operator hpp = spec.ground_hamiltonian();
  const Operator id = Operator::Identity(ng, ng);
  ham_ = Complex(0, -1) * (kron(id, hpp) - kron(hpp.conjugate(), id));
  for (const auto& c : spec.continua) {
    const double gamma_total = c.decay_rates.sum();
    if (gamma_total <= 0) {
      throw Error("ContinuumFamily: each continuum needs a positive total decay rate");
    }
    const double k2 = kappa_squared(spec.rate_convention, c.density);
    Mat d_sum = Mat::Zero(dim_, dim_);
    Mat j_sum = Mat::Zero(dim_, dim_);
    for (int i = 0; i < ng; ++i) {
      if (c.decay_rates(i) <= 0) continue;
      Operator f = Operator::Zero(ng, ng);
      for (int j = 0; j < ng; ++j) {
        f(i, j) = std::sqrt(k2 * c.decay_rates(i) / gamma_total) * c.couplings(j);
      }
      d_sum += dissipator(f);
      j_sum += sandwich(f, f);
      f_eff_.push_back(f);
    }
    d_.push_back(d_sum);
    j_.push_back(j_sum);
    gamma_.push_back(gamma_total);
  }
}

Eigen::MatrixXcd ContinuumFamily::eval(Complex z) const {
  Mat acc = ham_;
  for (size_t a = 0; a < gamma_.size(); ++a) {
    if (std::abs(z + gamma_[a]) < 1e-13 * std::max(gamma_[a], 1.0)) {
      throw ResolventPoleError("ContinuumFamily: z at the continuum pole", -gamma_[a]);
    }
    const Complex f = -z / (z + gamma_[a]);
    acc += d_[a] + f * j_[a];
  }
  return acc;
}

Eigen::MatrixXcd ContinuumFamily::deriv(Complex z) const {
  Mat acc = Mat::Zero(dim_, dim_);
  for (size_t a = 0; a < gamma_.size(); ++a) {
    const Complex denom = z + gamma_[a];
    if (std::abs(denom) < 1e-13 * std::max(gamma_[a], 1.0)) {
      throw ResolventPoleError("ContinuumFamily: z at the continuum pole", -gamma_[a]);
    }
    acc += (-gamma_[a] / (denom * denom)) * j_[a];
  }
  return acc;
}

Eigen::MatrixXcd ContinuumFamily::l0_matrix() const {
  Mat acc = ham_;
  for (const auto& d : d_) acc += d;
  return acc;
}

Eigen::MatrixXcd ContinuumFamily::l1_matrix() const {
  Mat acc = Mat::Zero(dim_, dim_);
  for (size_t a = 0; a < gamma_.size(); ++a) acc -= j_[a] / gamma_[a];
  return acc;
}

std::vector<Complex> ContinuumFamily::poles() const {
  std::vector<Complex> out;
  for (double g : gamma_) out.emplace_back(-g, 0);
  return out;
}

std::optional<EffectiveFamily::SinglePoleForm> ContinuumFamily::single_pole_form() const {
  if (gamma_.size() != 1) return std::nullopt;
  SinglePoleForm form;
  form.a = l0_matrix();
  form.b = j_[0];
  form.gamma = gamma_[0];
  return form;
}

std::unique_ptr<ContinuumFamily> continuum_effective_family(const ModelSpec& spec) {
  return std::make_unique<ContinuumFamily>(spec);
}

// -- Lambda closed form -----------------------------------------------------------

LambdaClosedFamily::LambdaClosedFamily(const ModelSpec& spec, Temperature temperature) {
  spec.validate();
  if (spec.n_ground() != 2 || spec.excited_levels.size() != 1 || !spec.continua.empty()) {
    throw Error("LambdaClosedFamily: requires exactly two ground states and one excited level");
  }
  const auto& ex = spec.excited_levels[0];
  const double g1 = ex.decay_rates(0), g2 = ex.decay_rates(1);
  gamma_total_ = g1 + g2;
  if (gamma_total_ <= 0) {
    throw Error("LambdaClosedFamily: total decay rate must be positive");
  }
  RealVec pumps = RealVec::Zero(2);
  if (temperature == Temperature::finite && ex.pump_rates.size()) {
    pumps = ex.pump_rates;
  }
  const double p1 = pumps(0), p2 = pumps(1);
  pump_total_ = p1 + p2;

  const double v1 = ex.couplings(0), v2 = ex.couplings(1);
  validity_ratio_ = std::max(v1 * v1, v2 * v2) / gamma_total_;

  const Operator id = Operator::Identity(2, 2);
  Operator pi1 = Operator::Zero(2, 2), pi2 = Operator::Zero(2, 2);
  pi1(0, 0) = 1;
  pi2(1, 1) = 1;
  Operator sigma = Operator::Zero(2, 2);  // |g2><g1|
  sigma(1, 0) = 1;
  const Operator sigma_dag = sigma.adjoint();

  // K = S0^dag S0 with S0 = sum_i V_i |e><g_i| (the bright-state projector
  // weighted by the couplings).
  Operator k = Operator::Zero(2, 2);
  k(0, 0) = v1 * v1;
  k(0, 1) = v1 * v2;
  k(1, 0) = v2 * v1;
  k(1, 1) = v2 * v2;

  const double w1 = ex.energy - spec.ground_levels[0].energy;
  const double w2 = ex.energy - spec.ground_levels[1].energy;

  // Resolvent terms of the eliminated coherences, column (|e><g_j|) and row
  // (|g_i><e|) variants paired with their own detunings and pump widths.
  h_ = {kron(pi1, k), kron(k.transpose(), pi1), kron(pi2, k), kron(k.transpose(), pi2)};
  xi_ = {Complex(-(gamma_total_ + p1) / 2, -w1), Complex(-(gamma_total_ + p1) / 2, +w1),
         Complex(-(gamma_total_ + p2) / 2, -w2), Complex(-(gamma_total_ + p2) / 2, +w2)};

  const Mat m1 = kron(pi1, pi1) + kron(sigma_dag, sigma_dag);
  const Mat m2 = kron(pi2, pi2) + kron(sigma, sigma);
  m_ = -(g1 * m1 + g2 * m2) / gamma_total_;
  if (pump_total_ > 0) {
    const Mat mp1 = kron(pi1, pi1) + kron(sigma, sigma);
    const Mat mp2 = kron(pi2, pi2) + kron(sigma_dag, sigma_dag);
    mprime_ = -(p1 * mp1 + p2 * mp2) / pump_total_;
  } else {
    mprime_ = Mat::Zero(4, 4);
  }

  const Operator hpp = spec.ground_hamiltonian();
  slow_part_ = Complex(0, -1) * (kron(id, hpp) - kron(hpp.conjugate(), id));
  // Pump loss on the slow sector: -1/2 {sum_i Gamma'_i Pi_i, .}.
  const Operator pump_op = p1 * pi1 + p2 * pi2;
  slow_part_ -= 0.5 * (kron(id, pump_op) + kron(pump_op.transpose(), id));
}

Eigen::MatrixXcd LambdaClosedFamily::eval(Complex z) const {
  const double scale = std::max(gamma_total_, 1.0);
  if (std::abs(z + gamma_total_) < 1e-13 * scale) {
    throw ResolventPoleError("LambdaClosedFamily: z at the excited-population pole",
                             -gamma_total_);
  }
  Mat hsum = Mat::Zero(4, 4);
  for (size_t j = 0; j < h_.size(); ++j) {
    if (std::abs(z - xi_[j]) < 1e-13 * scale) {
      throw ResolventPoleError("LambdaClosedFamily: z at a fast-coherence pole", xi_[j]);
    }
    hsum += h_[j] / (z - xi_[j]);
  }
  const Mat id = Mat::Identity(4, 4);
  const Mat decay_dress = id + m_ * (gamma_total_ / (z + gamma_total_));
  const Mat pump_dress = id + mprime_ * (pump_total_ / (z + gamma_total_));
  Mat result = slow_part_ - decay_dress * hsum * pump_dress;
  if (pump_total_ > 0) {
    result += 0.5 * m_ * mprime_ * (gamma_total_ * pump_total_ / (z + gamma_total_));
  }
  return result;
}

Eigen::MatrixXcd LambdaClosedFamily::deriv(Complex z) const {
  Mat hsum = Mat::Zero(4, 4), hsum_d = Mat::Zero(4, 4);
  for (size_t j = 0; j < h_.size(); ++j) {
    const Complex denom = z - xi_[j];
    hsum += h_[j] / denom;
    hsum_d -= h_[j] / (denom * denom);
  }
  const Mat id = Mat::Identity(4, 4);
  const Complex zg = z + gamma_total_;
  const Mat p = id + m_ * (gamma_total_ / zg);
  const Mat pd = -m_ * (gamma_total_ / (zg * zg));
  const Mat q = id + mprime_ * (pump_total_ / zg);
  const Mat qd = -mprime_ * (pump_total_ / (zg * zg));
  Mat result = -(pd * hsum * q + p * hsum_d * q + p * hsum * qd);
  if (pump_total_ > 0) {
    result -= 0.5 * m_ * mprime_ * (gamma_total_ * pump_total_ / (zg * zg));
  }
  return result;
}

std::vector<Complex> LambdaClosedFamily::poles() const {
  std::vector<Complex> out = xi_;
  out.emplace_back(-gamma_total_, 0);
  return out;
}

std::unique_ptr<LambdaClosedFamily> lambda_effective_family(const ModelSpec& spec,
                                                            Temperature temperature) {
  return std::make_unique<LambdaClosedFamily>(spec, temperature);
}

// -- Discretized-continuum oracle ---------------------------------------------------

DiscretizedModel discretized_continuum_oracle(const ModelSpec& spec, int levels,
                                              double bandwidth) {
  spec.validate();
  if (!spec.excited_levels.empty()) {
    throw Error("discretized_continuum_oracle: model must be of pure continuum type");
  }
  if (spec.continua.empty()) {
    throw Error("discretized_continuum_oracle: no continuum to discretize");
  }
  if (levels < 1 || levels % 2 == 0) {
    throw Error("discretized_continuum_oracle: level count must be odd (symmetric grid)");
  }
  if (bandwidth <= 0) {
    throw Error("discretized_continuum_oracle: bandwidth must be positive");
  }

  const int ng = spec.n_ground();
  const int nc = static_cast<int>(spec.continua.size());
  const int nf = nc * levels;
  const int n = ng + nf;

  double max_rate = 0;
  for (const auto& c : spec.continua) {
    max_rate = std::max(max_rate, c.decay_rates.sum());
    for (int i = 0; i < ng; ++i) {
      // Injection rate gamma_i = kappa^2 V_i^2 (2 n pi V^2 by default).
      max_rate = std::max(max_rate, kappa_squared(spec.rate_convention, c.density) *
                                        c.couplings(i) * c.couplings(i));
    }
  }

  DiscretizedModel model;
  model.n_ground_ = ng;
  model.wideband_warning_ = bandwidth < 10.0 * max_rate;
  model.hamiltonian_ = Operator::Zero(n, n);
  model.hamiltonian_.topLeftCorner(ng, ng) = spec.ground_hamiltonian();
  model.level_decay_ = Eigen::VectorXd::Zero(nf);
  model.feed_ = Eigen::MatrixXd::Zero(ng, nf);

  double center = 0;
  for (const auto& g : spec.ground_levels) center += g.energy;
  center /= ng;

  const double spacing = levels > 1 ? bandwidth / (levels - 1) : bandwidth;
  for (int a = 0; a < nc; ++a) {
    const auto& c = spec.continua[a];
    for (int m = 0; m < levels; ++m) {
      const int idx = ng + a * levels + m;
      model.hamiltonian_(idx, idx) = center + spacing * (m - (levels - 1) / 2);
      for (int i = 0; i < ng; ++i) {
        // Coupling scaled so the golden-rule injection rate matches the
        // continuum: v = V sqrt(n dE) keeps 2 pi v^2 / dE = 2 pi n V^2.
        const double v = c.couplings(i) * std::sqrt(c.density * spacing);
        model.hamiltonian_(i, idx) = v;
        model.hamiltonian_(idx, i) = v;
        model.feed_(i, idx - ng) = c.decay_rates(i);
      }
      model.level_decay_(idx - ng) = c.decay_rates.sum();
    }
  }
  return model;
}

Operator DiscretizedModel::ground_block_projector() const {
  Operator p = Operator::Zero(total_dim(), total_dim());
  p.topLeftCorner(n_ground_, n_ground_).setIdentity();
  return p;
}

std::vector<Operator> DiscretizedModel::jump_operators() const {
  const int n = total_dim();
  const int nf = n - n_ground_;
  std::vector<Operator> jumps;
  for (int m = 0; m < nf; ++m) {
    for (int i = 0; i < n_ground_; ++i) {
      const double rate = feed_(i, m);
      if (rate <= 0) continue;
      Operator f = Operator::Zero(n, n);
      f(i, n_ground_ + m) = std::sqrt(rate);
      jumps.push_back(f);
    }
  }
  return jumps;
}

SuperOp DiscretizedModel::assemble_generator() const {
  if (total_dim() > 48) {
    throw Error(
        "DiscretizedModel: dense superoperator assembly is limited to dimension 48; use the "
        "structured propagator instead");
  }
  return lindblad(hamiltonian_, jump_operators());
}

Operator DiscretizedModel::rho_dot(const Operator& rho) const {
  const int n = total_dim();
  const int ng = n_ground_;
  const int nf = n - ng;
  const auto hpp = hamiltonian_.topLeftCorner(ng, ng);
  const auto border = hamiltonian_.topRightCorner(ng, nf);
  const auto energies = hamiltonian_.bottomRightCorner(nf, nf).diagonal();

  // H rho with the arrow structure of H (dense block times are O(ng N^2)).
  auto h_times = [&](const Operator& x) {
    Operator out(n, n);
    out.topRows(ng) = hpp * x.topRows(ng) + border * x.bottomRows(nf);
    out.bottomRows(nf) = energies.asDiagonal() * x.bottomRows(nf) + border.adjoint() * x.topRows(ng);
    return out;
  };
  const Operator h_rho = h_times(rho);
  const Operator h_rho_dag = h_times(rho.adjoint());
  Operator out = Complex(0, -1) * (h_rho - h_rho_dag.adjoint());

  // Per-level decay: -1/2 {sum F^dag F, rho} with sum F^dag F diagonal on the
  // fast levels.
  Eigen::VectorXd widths = Eigen::VectorXd::Zero(n);
  widths.tail(nf) = level_decay_;
  out.noalias() -= 0.5 * widths.asDiagonal() * rho;
  out.noalias() -= 0.5 * rho * widths.asDiagonal();

  // Feed: each fast level m returns population to ground state i at feed_(i,m).
  for (int i = 0; i < ng; ++i) {
    Complex gain = 0;
    for (int m = 0; m < nf; ++m) {
      gain += feed_(i, m) * rho(ng + m, ng + m);
    }
    out(i, i) += gain;
  }
  return out;
}

Operator DiscretizedModel::propagate(const Operator& rho0, double t, double rtol) const {
  if (rho0.rows() != total_dim() || rho0.cols() != total_dim()) {
    throw DimensionError("DiscretizedModel::propagate: state dimension mismatch");
  }
  if (t == 0) return rho0;
  const auto rhs = [this](const Operator& r) { return rho_dot(r); };
  return detail::rk45_integrate(rhs, rho0, 0.0, t, rtol, 1e-12);
}

std::vector<StateVec> DiscretizedModel::slow_trajectory(const Operator& rho0,
                                                        const std::vector<double>& times,
                                                        double rtol) const {
  std::vector<StateVec> out;
  Operator rho = rho0;
  double t = 0;
  const auto rhs = [this](const Operator& r) { return rho_dot(r); };
  for (double target : times) {
    if (target < t) throw Error("DiscretizedModel::slow_trajectory: times must be increasing");
    if (target > t) {
      rho = detail::rk45_integrate(rhs, rho, t, target, rtol, 1e-12);
      t = target;
    }
    out.push_back(vectorize(rho.topLeftCorner(n_ground_, n_ground_).eval()));
  }
  return out;
}

// -- Model relations ------------------------------------------------------------------

CptReport cpt_check(const ModelSpec& spec, const StateVec& rho_slow) {
  spec.validate();
  const int ng = spec.n_ground();
  if (rho_slow.size() != ng * ng) {
    throw DimensionError("cpt_check: state must live on the ground manifold");
  }
  const Operator rho = unvectorize(rho_slow);
  const Operator hpp = spec.ground_hamiltonian();
  const double rho_norm = rho.norm();

  CptReport report;
  const double h_norm = hpp.norm();
  report.commutator_residual =
      (hpp * rho - rho * hpp).norm() / std::max(h_norm * rho_norm, 1e-300);
  if (h_norm == 0) report.commutator_residual = 0;

  double worst = 0;
  auto check_row = [&](const RealVec& couplings) {
    Eigen::RowVectorXcd row(ng);
    for (int i = 0; i < ng; ++i) row(i) = couplings(i);
    const double row_norm = row.norm();
    if (row_norm == 0) return;
    worst = std::max(worst, (row * rho).norm() / (row_norm * std::max(rho_norm, 1e-300)));
  };
  for (const auto& ex : spec.excited_levels) check_row(ex.couplings);
  for (const auto& c : spec.continua) check_row(c.couplings);
  report.coupling_residual = worst;

  const double tol = numeric_policy().cpt_tol;
  report.passes = report.commutator_residual <= tol && report.coupling_residual <= tol;
  return report;
}

std::vector<Complex> large_gamma_smallness(const ModelSpec& three_level_spec) {
  three_level_spec.validate();
  if (three_level_spec.excited_levels.size() != 1) {
    throw Error("large_gamma_smallness: requires exactly one discrete excited level");
  }
  const auto& ex = three_level_spec.excited_levels[0];
  const double gamma_total = ex.decay_rates.sum();
  if (gamma_total <= 0) {
    throw Error("large_gamma_smallness: total decay rate must be positive");
  }
  std::vector<Complex> out;
  for (const auto& g : three_level_spec.ground_levels) {
    const double omega = ex.energy - g.energy;
    out.push_back(Complex(0, -omega) / (gamma_total / 2));
    out.push_back(Complex(0, +omega) / (gamma_total / 2));
  }
  return out;
}

ModelSpec large_gamma_map(const ModelSpec& three_level_spec) {
  three_level_spec.validate();
  if (three_level_spec.excited_levels.size() != 1 || !three_level_spec.continua.empty()) {
    throw Error("large_gamma_map: requires exactly one discrete excited level");
  }
  const auto& ex = three_level_spec.excited_levels[0];
  const double gamma_total = ex.decay_rates.sum();
  if (gamma_total <= 0) {
    throw Error("large_gamma_map: total decay rate must be positive");
  }
  ModelSpec out;
  out.ground_levels = three_level_spec.ground_levels;
  out.ground_couplings = three_level_spec.ground_couplings;
  out.rate_convention = RateConvention::two_pi_nv2;
  ContinuumSpec c;
  c.label = ex.label + "_cont";
  c.density = 2.0 / (kPi * gamma_total);
  c.couplings = ex.couplings;
  c.decay_rates = ex.decay_rates;
  out.continua.push_back(c);
  return out;
}

}  // namespace adel
