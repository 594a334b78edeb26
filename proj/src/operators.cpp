#include "ifrk/operators.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "ifrk/errors.hpp"
#include "spectral_transform.hpp"

namespace ifrk {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralTransform::SpectralTransform(const GridSpec& grid) : grid_(grid) {
  std::vector<int> n(static_cast<std::size_t>(grid.dim), static_cast<int>(grid.points));
  real_size_ = grid.size();
  spectrum_size_ = real_size_ / grid.points * (grid.points / 2 + 1);
  real_ = fftw_alloc_real(real_size_);
  spectrum_ = fftw_alloc_complex(spectrum_size_);
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_dft_r2c(grid.dim, n.data(), real_, spectrum_, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r(grid.dim, n.data(), spectrum_, real_, FFTW_ESTIMATE);
  if (!forward_ || !inverse_) throw Error("FFTW plan creation failed");
}

SpectralTransform::~SpectralTransform() {
  {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (inverse_) fftw_destroy_plan(inverse_);
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::vector<std::size_t> SpectralTransform::spectrum_shape() const {
  std::vector<std::size_t> shape(static_cast<std::size_t>(grid_.dim), grid_.points);
  shape.back() = grid_.points / 2 + 1;
  return shape;
}

std::shared_ptr<SpectralTransform> make_spectral_transform(const GridSpec& grid) {
  return std::make_shared<SpectralTransform>(grid);
}

struct LinearOperator::Impl {
  Kind kind;
  GridSpec grid;
  double diffusion = 0.0;
  std::vector<double> axis_symbol;
  std::vector<double> eigenvalues;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd eigenvectors;
};

LinearOperator LinearOperator::periodic_laplacian(const GridSpec& grid, double diffusion) {
  if (grid.points == 0) throw ConfigError("grid must have at least one point per axis");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion))
    throw ConfigError("diffusion coefficient must be finite and non-negative");

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::spectral;
  impl->grid = grid;
  impl->diffusion = diffusion;

  const std::size_t n = grid.points;
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  impl->axis_symbol.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    impl->axis_symbol[j] = diffusion * (2.0 * std::cos(angle) - 2.0) * inv_h2;
  }

  // Kronecker sum: eigenvalue of mode (k_0, ..., k_{d-1}) is sum_a sigma(k_a).
  const std::size_t m = grid.size();
  impl->eigenvalues.assign(m, 0.0);
  for (std::size_t idx = 0; idx < m; ++idx) {
    std::size_t rest = idx;
    double lambda = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      lambda += impl->axis_symbol[rest % n];
      rest /= n;
    }
    impl->eigenvalues[idx] = lambda;
  }
  return LinearOperator(std::move(impl));
}

LinearOperator LinearOperator::dense(Eigen::MatrixXd matrix) {
  const auto m = static_cast<std::size_t>(matrix.rows());
  return dense(std::move(matrix), GridSpec(1, std::max<std::size_t>(m, 1), 1.0), 0.0);
}

LinearOperator LinearOperator::dense(Eigen::MatrixXd matrix, const GridSpec& grid,
                                     double diffusion) {
  if (matrix.rows() != matrix.cols()) throw ConfigError("dense operator must be square");
  if (static_cast<std::size_t>(matrix.rows()) != grid.size())
    throw GridMismatch("dense operator size does not match its grid");
  if (grid.size() > kMaxDenseSize)
    throw ConfigError("dense operators are limited to " + std::to_string(kMaxDenseSize) +
                      " unknowns");
  const double scale = matrix.size() ? std::max(1.0, matrix.cwiseAbs().maxCoeff()) : 1.0;
  if (matrix.size() > 0 && (matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
    throw ConfigError("dense operator must be symmetric");

  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::dense;
  impl->grid = grid;
  impl->diffusion = diffusion;
  impl->matrix = std::move(matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(impl->matrix);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigendecomposition failed");
  const auto& evals = solver.eigenvalues();
  impl->eigenvalues.assign(evals.data(), evals.data() + evals.size());
  impl->eigenvectors = solver.eigenvectors();
  return LinearOperator(std::move(impl));
}

LinearOperator::Kind LinearOperator::kind() const { return impl_->kind; }
const GridSpec& LinearOperator::grid() const { return impl_->grid; }
double LinearOperator::diffusion() const { return impl_->diffusion; }
std::span<const double> LinearOperator::eigenvalues() const { return impl_->eigenvalues; }

std::span<const double> LinearOperator::axis_symbol() const {
  if (impl_->kind != Kind::spectral) throw Error("axis symbol requested from a dense operator");
  return impl_->axis_symbol;
}

const Eigen::MatrixXd& LinearOperator::matrix() const {
  if (impl_->kind != Kind::dense) throw Error("matrix requested from a spectral operator");
  return impl_->matrix;
}

const Eigen::MatrixXd& LinearOperator::eigenvectors() const {
  if (impl_->kind != Kind::dense) throw Error("eigenvectors requested from a spectral operator");
  return impl_->eigenvectors;
}

Eigen::MatrixXd LinearOperator::to_dense() const {
  if (impl_->kind == Kind::dense) return impl_->matrix;
  const GridSpec& g = impl_->grid;
  const std::size_t m = g.size();
  if (m > kMaxDenseSize)
    throw ConfigError("operator too large for a dense representation");
  const std::size_t n = g.points;
  const double w = impl_->diffusion / (g.h * g.h);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::size_t stride = 1;
  for (int axis = g.dim - 1; axis >= 0; --axis) {
    for (std::size_t idx = 0; idx < m; ++idx) {
      const std::size_t k = (idx / stride) % n;
      const std::size_t base = idx - k * stride;
      const std::size_t up = base + ((k + 1) % n) * stride;
      const std::size_t down = base + ((k + n - 1) % n) * stride;
      const auto r = static_cast<Eigen::Index>(idx);
      a(r, r) -= 2.0 * w;
      a(r, static_cast<Eigen::Index>(up)) += w;
      a(r, static_cast<Eigen::Index>(down)) += w;
    }
    stride *= n;
  }
  return a;
}

LinearOperator LinearOperator::as_dense() const {
  if (impl_->kind == Kind::dense) return *this;
  return dense(to_dense(), impl_->grid, impl_->diffusion);
}

LinearOperator build_periodic_laplacian(const GridSpec& grid, double diffusion) {
  return LinearOperator::periodic_laplacian(grid, diffusion);
}

Eigen::MatrixXd central_difference_matrix(std::size_t n, double h, double corner) {
  if (n == 0) throw ConfigError("matrix size must be positive");
  const auto N = static_cast<Eigen::Index>(n);
  const double w = 1.0 / (h * h);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    a(i, i) -= 2.0 * w;
    if (i + 1 < N)
      a(i, i + 1) += w;
    else
      a(i, 0) += corner * w;
    if (i > 0)
      a(i, i - 1) += w;
    else
      a(i, N - 1) += corner * w;
  }
  return a;
}

double mu_inf(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = a(i, i);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (j != i) row += std::abs(a(i, j));
    best = std::max(best, row);
  }
  return a.rows() == 0 ? 0.0 : best;
}

DiagonalAction::DiagonalAction(const LinearOperator& op, std::shared_ptr<SpectralTransform> transform)
    : op_(op), transform_(std::move(transform)) {
  if (op_.is_spectral()) {
    if (!transform_) transform_ = make_spectral_transform(op_.grid());
    if (!(transform_->grid() == op_.grid()))
      throw GridMismatch("spectral transform built for another grid");
  } else {
    transform_.reset();
    coeffs_.resize(static_cast<Eigen::Index>(op_.size()));
  }
}

namespace {

// Evaluates g on the eigenvalues in the storage layout used by DiagonalAction.
template <class G>
std::vector<double> diagonal_factors(const LinearOperator& op, const SpectralTransform* transform,
                                     G&& g) {
  std::vector<double> out;
  if (!op.is_spectral()) {
    for (double lambda : op.eigenvalues()) out.push_back(g(lambda));
    return out;
  }
  const GridSpec& grid = op.grid();
  const std::size_t n = grid.points;
  const std::size_t half = n / 2 + 1;
  const auto symbol = op.axis_symbol();
  const double norm = 1.0 / static_cast<double>(grid.size());
  out.resize(transform->spectrum_size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    double lambda = symbol[idx % half];
    std::size_t rest = idx / half;
    for (int a = 0; a + 1 < grid.dim; ++a) {
      lambda += symbol[rest % n];
      rest /= n;
    }
    out[idx] = g(lambda) * norm;
  }
  return out;
}

}  // namespace

DiagonalAction DiagonalAction::exponential(const LinearOperator& op, double scale,
                                           std::shared_ptr<SpectralTransform> transform) {
  DiagonalAction action(op, std::move(transform));
  action.factors_ = diagonal_factors(op, action.transform_.get(),
                                     [scale](double lambda) { return std::exp(scale * lambda); });
  return action;
}

DiagonalAction DiagonalAction::generator(const LinearOperator& op,
                                         std::shared_ptr<SpectralTransform> transform) {
  DiagonalAction action(op, std::move(transform));
  action.factors_ = diagonal_factors(op, action.transform_.get(), [](double lambda) { return lambda; });
  return action;
}

void DiagonalAction::apply(std::span<const double> in, std::span<double> out) {
  const std::size_t m = op_.size();
  if (in.size() != m || out.size() != m) throw GridMismatch("vector length does not match operator");
  if (transform_) {
    std::copy(in.begin(), in.end(), transform_->real());
    transform_->forward();
    fftw_complex* spec = transform_->spectrum();
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      spec[k][0] *= factors_[k];
      spec[k][1] *= factors_[k];
    }
    transform_->inverse();
    std::copy(transform_->real(), transform_->real() + m, out.begin());
    return;
  }
  const auto& v = op_.eigenvectors();
  Eigen::Map<const Eigen::VectorXd> x(in.data(), static_cast<Eigen::Index>(m));
  coeffs_.noalias() = v.transpose() * x;
  for (Eigen::Index k = 0; k < coeffs_.size(); ++k) coeffs_[k] *= factors_[static_cast<std::size_t>(k)];
  Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(m));
  y.noalias() = v * coeffs_;
}

Field apply_exponential(const LinearOperator& op, const Field& u, double scale) {
  require_same_grid(op.grid(), u);
  Field v(u.grid);
  if (scale == 0.0) {
    v.values = u.values;
    return v;
  }
  auto action = DiagonalAction::exponential(op, scale);
  action.apply(u.span(), v.span());
  return v;
}

Field apply_operator(const LinearOperator& op, const Field& u) {
  require_same_grid(op.grid(), u);
  Field v(u.grid);
  if (op.is_spectral()) {
    auto action = DiagonalAction::generator(op);
    action.apply(u.span(), v.span());
  } else {
    Eigen::Map<const Eigen::VectorXd> x(u.values.data(), static_cast<Eigen::Index>(u.size()));
    Eigen::Map<Eigen::VectorXd>(v.values.data(), static_cast<Eigen::Index>(v.size())) =
        op.matrix() * x;
  }
  return v;
}

ContractionReport verify_contraction(const LinearOperator& op) {
  ContractionReport report;
  const auto evals = op.eigenvalues();
  report.max_eigenvalue = evals.empty() ? 0.0 : *std::max_element(evals.begin(), evals.end());
  if (op.is_spectral()) {
    report.constant_mode_eigenvalue = evals.front();
    report.contractive = report.max_eigenvalue <= 0.0 && report.constant_mode_eigenvalue == 0.0;
    report.justification =
        report.contractive
            ? "circulant operator with non-positive spectrum and zero constant mode: e^{wL} is a "
              "convolution with a nonnegative kernel of unit sum, so ||e^{wL}||_inf = 1"
            : "spectrum has a positive eigenvalue or a nonzero constant mode";
    return report;
  }
  const auto& a = op.matrix();
  report.mu_inf = mu_inf(a);
  const double scale = a.size() ? a.diagonal().cwiseAbs().maxCoeff() : 0.0;
  report.contractive = report.mu_inf <= 1e-12 * scale;
  report.justification = report.contractive
                             ? "mu_inf(L) <= 0 gives ||e^{wL}||_inf <= e^{w mu_inf(L)} <= 1"
                             : "mu_inf(L) > 0; contraction not established";
  return report;
}

}  // namespace ifrk
