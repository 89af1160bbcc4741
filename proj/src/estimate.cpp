#include "qest/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qest/dynamics.hpp"

namespace qest {

// ---------------------------------------------------------------------------
// Random numbers

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t batch, std::uint64_t trial) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k + batch * 0xd1b54a32d192ed03ULL);
  key_ = splitmix64(k + trial * 0x8cb92ba72f3d8dd7ULL);
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return splitmix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Measurements

MeasurementSpec::MeasurementSpec(HilbertSpace space, std::vector<Matrix> projectors,
                                 std::vector<std::string> labels)
    : space_(std::move(space)), projectors_(std::move(projectors)), labels_(std::move(labels)) {
  if (projectors_.empty()) throw InvalidArgument("measurement needs at least one projector");
  const Eigen::Index n = space_.size();
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < projectors_.size(); ++a) {
    const Matrix& p = projectors_[a];
    if (p.rows() != n || p.cols() != n) {
      throw SpaceMismatchError("projector " + std::to_string(a) + " has the wrong dimension");
    }
    sum += p;
    for (std::size_t b = a; b < projectors_.size(); ++b) {
      Matrix prod = p * projectors_[b];
      double dev = a == b ? (prod - p).cwiseAbs().maxCoeff() : prod.cwiseAbs().maxCoeff();
      if (dev > 1e-10) {
        std::ostringstream os;
        os << "projectors " << a << " and " << b << " violate P_a P_b = delta_ab P_a (deviation "
           << dev << ")";
        throw InvalidArgument(os.str());
      }
    }
  }
  double dev = (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) {
    std::ostringstream os;
    os << "projectors do not sum to the identity (deviation " << dev << ")";
    throw InvalidArgument(os.str());
  }
  if (labels_.empty()) {
    for (std::size_t a = 0; a < projectors_.size(); ++a) labels_.push_back(std::to_string(a));
  }
  if (labels_.size() != projectors_.size()) {
    throw InvalidArgument("measurement labels and projectors differ in number");
  }
}

MeasurementSpec MeasurementSpec::in_basis(const HilbertSpace& space, std::span<const int> sites,
                                          const Matrix& basis) {
  std::vector<int> dims;
  for (int s : sites) dims.push_back(space.site_dim(s));
  std::vector<Matrix> projectors;
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Matrix local = basis.col(c) * basis.col(c).adjoint();
    projectors.push_back(embed(local, dims, sites, space));
  }
  return MeasurementSpec(space, std::move(projectors));
}

std::vector<double> born_probabilities(const QuantumState& rho, const MeasurementSpec& m) {
  if (!(rho.space() == m.space())) throw SpaceMismatchError("measurement and state spaces differ");
  std::vector<double> p;
  p.reserve(m.size());
  double total = 0.0;
  for (const Matrix& proj : m.projectors()) {
    double v = expectation(rho, proj).real();
    if (v < 0.0 && v > -1e-12) v = 0.0;
    p.push_back(v);
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "outcome probabilities sum to " << total;
    throw Error(os.str());
  }
  return p;
}

std::size_t sample_index(std::span<const double> probabilities, double u) {
  double acc = 0.0;
  for (std::size_t a = 0; a < probabilities.size(); ++a) {
    acc += probabilities[a];
    if (u < acc) return a;
  }
  // u beyond the rounded total: last outcome with nonzero weight
  for (std::size_t a = probabilities.size(); a-- > 0;) {
    if (probabilities[a] > 0.0) return a;
  }
  return probabilities.size() - 1;
}

std::size_t born_sample(const QuantumState& rho, const MeasurementSpec& m, CounterRng& rng) {
  std::vector<double> p = born_probabilities(rho, m);
  return sample_index(p, rng.uniform());
}

// ---------------------------------------------------------------------------
// Parity protocol

ParityProbabilities cat_protocol_distribution(double gamma, double t, int n, int k,
                                              double lambda_max, double lambda_min) {
  if (k < 1 || k > n) throw InvalidArgument("k must satisfy 1 <= k <= n");
  if (!(lambda_max > lambda_min)) throw InvalidArgument("lambda_max must exceed lambda_min");
  const double phi =
      gamma * t * binomial(n, k) * (std::pow(lambda_max, k) - std::pow(lambda_min, k));
  const double c = std::cos(phi);
  return {(1.0 + c) / 2.0, (1.0 - c) / 2.0};
}

namespace {

struct Extremes {
  double lambda_max;
  double lambda_min;
  Vector top;
  Vector bottom;
};

Extremes extremes(const HermitianOp& h_local) {
  SpectralDecomp sd = spectral(h_local);
  if (sd.clusters.size() < 2) throw InvalidArgument("single-site operator has a flat spectrum");
  const Eigen::Index hi = sd.clusters.back().first;
  const Eigen::Index lo = sd.clusters.front().first;
  return {sd.eigenvalues(hi), sd.eigenvalues(lo), sd.eigenvectors.col(hi),
          sd.eigenvectors.col(lo)};
}

Matrix tensor_power(const Matrix& m, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int j = 0; j < n; ++j) out = kron(out, m);
  return out;
}

}  // namespace

MeasurementSpec parity_measurement(const HermitianOp& h_local, int n) {
  if (h_local.space().num_sites() != 1) throw InvalidArgument("h_local must act on one site");
  Extremes ex = extremes(h_local);
  const Vector plus = (ex.top + ex.bottom) / std::sqrt(2.0);
  const Vector minus = (ex.top - ex.bottom) / std::sqrt(2.0);
  const Matrix pp = plus * plus.adjoint();
  const Matrix mm = minus * minus.adjoint();
  const Matrix span = tensor_power(Matrix(pp + mm), n);
  const Matrix signs = tensor_power(Matrix(pp - mm), n);
  HilbertSpace space(std::vector<int>(static_cast<std::size_t>(n), h_local.space().site_dim(0)));
  std::vector<Matrix> projectors{(span + signs) / 2.0, (span - signs) / 2.0};
  std::vector<std::string> labels{"even", "odd"};
  if (h_local.space().site_dim(0) > 2) {
    projectors.push_back(Matrix::Identity(space.size(), space.size()) - span);
    labels.push_back("other");
  }
  return MeasurementSpec(space, std::move(projectors), std::move(labels));
}

double BinaryModel::success(double gamma) const {
  return base + amplitude * std::cos(omega * gamma * t + offset);
}

double log_likelihood(const BinomialCounts& counts, const BinaryModel& model, double gamma) {
  const double p = std::clamp(model.success(gamma), 0.0, 1.0);
  const double s = static_cast<double>(counts.successes);
  const double f = static_cast<double>(counts.trials - counts.successes);
  double ll = 0.0;
  if (s > 0) ll += p > 0.0 ? s * std::log(p) : -std::numeric_limits<double>::infinity();
  if (f > 0) ll += p < 1.0 ? f * std::log1p(-p) : -std::numeric_limits<double>::infinity();
  return ll;
}

double mle_estimate(const BinomialCounts& counts, const BinaryModel& model,
                    const MleOptions& options) {
  if (counts.trials == 0) throw InvalidArgument("no trials to estimate from");
  if (counts.successes > counts.trials) throw InvalidArgument("more successes than trials");
  if (!(options.gamma_max > options.gamma_min)) throw InvalidArgument("degenerate estimator window");
  if (options.grid_points < 3) throw InvalidArgument("grid needs at least 3 points");

  const double lo = options.gamma_min;
  const double hi = options.gamma_max;
  const int g = options.grid_points;
  const double step = (hi - lo) / (g - 1);
  auto grid = [&](int j) { return j == g - 1 ? hi : lo + j * step; };

  int best = 0;
  double best_ll = log_likelihood(counts, model, lo);
  for (int j = 1; j < g; ++j) {
    double ll = log_likelihood(counts, model, grid(j));
    if (ll > best_ll) {
      best_ll = ll;
      best = j;
    }
  }

  double a = grid(std::max(0, best - 1));
  double b = grid(std::min(g - 1, best + 1));
  const double tol = options.refine_fraction * (hi - lo);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_likelihood(counts, model, c);
  double fd = log_likelihood(counts, model, d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_likelihood(counts, model, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_likelihood(counts, model, d);
    }
  }
  const double refined = 0.5 * (a + b);
  return log_likelihood(counts, model, refined) > best_ll ? refined : grid(best);
}

// ---------------------------------------------------------------------------
// Monte-Carlo estimation

double operating_point(const ProbeSpec& spec, double t) {
  Probe probe = build_probe(spec);
  const double norm = seminorm(probe.h0_probe);
  if (!(norm > 0.0) || !(t > 0.0)) {
    throw InvalidArgument("operating point needs t > 0 and a nonzero coupling seminorm");
  }
  return std::numbers::pi / (2.0 * t * norm);
}

EstimationReport run_monte_carlo(const ProbeSpec& spec, const EstimationConfig& config) {
  using std::numbers::pi;
  if (config.nu < 1) throw InvalidArgument("nu must be >= 1");
  if (config.batches < 1) throw InvalidArgument("batches must be >= 1");
  if (!(config.t > 0.0)) throw InvalidArgument("t must be positive");

  Probe probe = build_probe(spec);
  if (!probe.aux.empty() || !spec.ancillas.empty()) {
    throw InvalidArgument("Monte-Carlo estimation simulates aux-free probes without ancillas");
  }
  if (spec.coupling.form != Coupling::Form::product_local) {
    throw InvalidArgument("Monte-Carlo estimation needs a product(...) coupling");
  }
  const int n = spec.n_systems;
  const int k = spec.degree;
  Extremes ex = extremes(probe.unit);

  EstimationReport rep;
  rep.config = config;
  rep.n_systems = n;
  rep.degree = k;
  rep.seminorm_h0 = seminorm(probe.h0_probe);

  BinaryModel model;
  model.t = config.t;
  std::vector<MeasurementSpec> measurements;  // one per independently measured unit
  if (spec.state.kind == InitialState::Kind::cat) {
    rep.protocol = "cat_parity";
    model.omega = std::abs(binomial(n, k) *
                           (std::pow(ex.lambda_max, k) - std::pow(ex.lambda_min, k)));
    measurements.push_back(parity_measurement(probe.unit, n));
  } else if (spec.state.kind == InitialState::Kind::product) {
    if (k != 1) throw InvalidArgument("product-state estimation needs a separable (k = 1) coupling");
    rep.protocol = "product_sites";
    Vector v = Eigen::Map<const Vector>(spec.state.amplitudes.data(),
                                        static_cast<Eigen::Index>(spec.state.amplitudes.size()));
    v.normalize();
    const cplx c_top = ex.top.dot(v);
    const cplx c_bottom = ex.bottom.dot(v);
    const cplx cross = c_top * std::conj(c_bottom);
    model.base = (std::norm(c_top) + std::norm(c_bottom)) / 2.0;
    model.amplitude = std::abs(cross);
    model.omega = ex.lambda_max - ex.lambda_min;
    model.offset = -std::arg(cross);
    Matrix basis(probe.unit.space().size(), 2);
    basis.col(0) = (ex.top + ex.bottom) / std::sqrt(2.0);
    basis.col(1) = (ex.top - ex.bottom) / std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
      const int site[] = {j};
      std::vector<int> dims{probe.unit.space().site_dim(0)};
      Matrix pp = embed(Matrix(basis.col(0) * basis.col(0).adjoint()), dims, site, probe.full_space);
      Matrix mm = embed(Matrix(basis.col(1) * basis.col(1).adjoint()), dims, site, probe.full_space);
      std::vector<Matrix> projectors{pp, mm};
      const Matrix rest = Matrix::Identity(pp.rows(), pp.cols()) - pp - mm;
      if (rest.cwiseAbs().maxCoeff() > 1e-12) projectors.push_back(rest);
      measurements.emplace_back(probe.full_space, std::move(projectors));
    }
  } else {
    throw InvalidArgument("Monte-Carlo estimation needs state=cat or state=product(...)");
  }
  if (!(model.omega > 0.0) || !(model.amplitude > 0.0)) {
    throw InvalidArgument("the measured signal does not depend on gamma for this probe");
  }
  rep.omega = model.omega;
  if (rep.protocol == "cat_parity" && model.omega < rep.seminorm_h0 * (1.0 - 1e-9)) {
    std::ostringstream os;
    os << "parity phase frequency " << model.omega << " is below ||h0|| = " << rep.seminorm_h0
       << "; the cat state does not saturate the bound for this coupling";
    rep.warnings.push_back(os.str());
  }

  // Window: the monotone half-period of the signal containing gamma_true,
  // 5% in from each end, unless given.
  double gmin = config.gamma_min;
  double gmax = config.gamma_max;
  const double freq = model.omega * config.t;
  if (!(gmin < gmax)) {
    const double phase = freq * config.gamma_true + model.offset;
    const double cell = std::floor(phase / pi);
    gmin = ((cell + 0.05) * pi - model.offset) / freq;
    gmax = ((cell + 0.95) * pi - model.offset) / freq;
    if (config.gamma_true < gmin || config.gamma_true > gmax) {
      rep.warnings.push_back("gamma_true sits within 5% of a parity extremum; estimates are biased");
    }
  }
  if (!((gmax - gmin) * freq < 2.0 * pi)) {
    std::ostringstream os;
    os << "estimator window [" << gmin << ", " << gmax
       << "] spans a signal phase >= 2 pi; the estimate would alias";
    throw InvalidArgument(os.str());
  }
  rep.config.gamma_min = gmin;
  rep.config.gamma_max = gmax;
  rep.fd_step = 0.01 * (gmax - gmin);
  if (config.nu == 1) rep.warnings.push_back("nu = 1: statistics are degenerate, ratio is uninformative");

  // Outcome-0 probabilities at gamma - step, gamma, gamma + step for every unit.
  const double gammas[3] = {config.gamma_true - rep.fd_step, config.gamma_true,
                            config.gamma_true + rep.fd_step};
  std::vector<std::vector<double>> p0(3, std::vector<double>(measurements.size()));
  for (int s = 0; s < 3; ++s) {
    Matrix U = evolve_unitary(probe.h0, probe.aux, gammas[s], config.t);
    QuantumState rho = evolve_state(probe.initial, U);
    for (std::size_t m = 0; m < measurements.size(); ++m) {
      p0[static_cast<std::size_t>(s)][m] = born_probabilities(rho, measurements[m])[0];
    }
  }

  rep.trials_per_batch = config.nu * measurements.size();
  MleOptions mle{gmin, gmax, config.grid_points, config.refine_fraction};
  double sums[3] = {0.0, 0.0, 0.0};
  rep.estimates.reserve(static_cast<std::size_t>(config.batches));
  for (int b = 0; b < config.batches; ++b) {
    std::uint64_t success[3] = {0, 0, 0};
    for (std::uint64_t i = 0; i < config.nu; ++i) {
      CounterRng rng(config.seed, static_cast<std::uint64_t>(b), i);
      for (std::size_t m = 0; m < measurements.size(); ++m) {
        const double u = rng.uniform();
        for (int s = 0; s < 3; ++s) {
          if (u < p0[static_cast<std::size_t>(s)][m]) ++success[s];
        }
      }
    }
    for (int s = 0; s < 3; ++s) {
      double est = mle_estimate({success[s], rep.trials_per_batch}, model, mle);
      sums[s] += est;
      if (s == 1) rep.estimates.push_back(est);
    }
  }
  const double nb = static_cast<double>(config.batches);
  rep.mean_estimate_minus = sums[0] / nb;
  rep.mean_estimate = sums[1] / nb;
  rep.mean_estimate_plus = sums[2] / nb;
  rep.slope = (rep.mean_estimate_plus - rep.mean_estimate_minus) / (2.0 * rep.fd_step);
  double scale = std::abs(rep.slope);
  if (!(scale > 1e-12) || !std::isfinite(scale)) {
    rep.warnings.push_back("d<gamma_est>/dgamma vanished; deviation reported without units correction");
    scale = 1.0;
  }
  // Rescale the error about gamma_true, not the estimate itself: e/scale - gamma
  // would turn a 1% slope error into a bias of 1% of gamma.
  double msd = 0.0;
  for (double e : rep.estimates) {
    const double dev = (e - config.gamma_true) / scale;
    msd += dev * dev;
  }
  rep.delta_gamma = std::sqrt(msd / nb);
  rep.bound = 1.0 / (std::sqrt(static_cast<double>(config.nu)) * config.t * rep.seminorm_h0);
  rep.ratio = rep.delta_gamma / rep.bound;
  return rep;
}

}  // namespace qest
