#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ifrk/grid.hpp"

namespace ifrk {

class SpectralTransform;

/// The symmetric linear part L of du/dt = Lu + f(u).
///
/// Two representations are supported. The spectral one stores the
/// eigenvalues of a circulant operator in FFT mode order (row-major over
/// the multi-index, last axis fastest) and applies functions of L with a
/// real FFT. The dense one stores the matrix together with its symmetric
/// eigendecomposition. Instances are immutable handles and cheap to copy.
class LinearOperator {
 public:
  enum class Kind { spectral, dense };

  /// Largest system for which a dense matrix is formed.
  static constexpr std::size_t kMaxDenseSize = 4096;

  /// Five-point (in 2-D) central difference Laplacian times `diffusion`
  /// with periodic wrap.
  static LinearOperator periodic_laplacian(const GridSpec& grid, double diffusion);

  /// Dense symmetric matrix. Without a grid the operator acts on a 1-D grid
  /// with one node per row and unit spacing.
  static LinearOperator dense(Eigen::MatrixXd matrix);
  static LinearOperator dense(Eigen::MatrixXd matrix, const GridSpec& grid, double diffusion);

  Kind kind() const;
  bool is_spectral() const { return kind() == Kind::spectral; }
  const GridSpec& grid() const;
  double diffusion() const;
  std::size_t size() const { return grid().size(); }

  /// Spectral: all m eigenvalues in mode order. Dense: ascending eigenvalues.
  std::span<const double> eigenvalues() const;

  /// Spectral only: 1-D symbol sigma(j), j = 0..points-1.
  std::span<const double> axis_symbol() const;

  /// Dense only.
  const Eigen::MatrixXd& matrix() const;
  const Eigen::MatrixXd& eigenvectors() const;

  /// Dense form of a spectral operator (m <= kMaxDenseSize), or the stored
  /// matrix of a dense one.
  Eigen::MatrixXd to_dense() const;

  /// Same operator, dense representation.
  LinearOperator as_dense() const;

 private:
  struct Impl;
  explicit LinearOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

LinearOperator build_periodic_laplacian(const GridSpec& grid, double diffusion);

/// The 1-D three-point matrix (1, -2, 1)/h^2 with corner entries `corner`
/// (1 for periodic wrap, 0 for the homogeneous Dirichlet variant).
Eigen::MatrixXd central_difference_matrix(std::size_t n, double h, double corner);

/// Logarithmic infinity-norm: max_i (a_ii + sum_{j != i} |a_ij|).
double mu_inf(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// g(L) applied through the eigenbasis of L with reusable scratch.
/// Single-owner: `apply` mutates internal buffers.
class DiagonalAction {
 public:
  /// e^{scale L}.
  static DiagonalAction exponential(const LinearOperator& op, double scale,
                                    std::shared_ptr<SpectralTransform> transform = nullptr);
  /// L itself.
  static DiagonalAction generator(const LinearOperator& op,
                                  std::shared_ptr<SpectralTransform> transform = nullptr);

  /// `in` and `out` may alias.
  void apply(std::span<const double> in, std::span<double> out);

  std::size_t size() const { return op_.size(); }

 private:
  DiagonalAction(const LinearOperator& op, std::shared_ptr<SpectralTransform> transform);

  LinearOperator op_;
  std::shared_ptr<SpectralTransform> transform_;
  // Spectral: one real factor per stored half-spectrum coefficient, with the
  // inverse-transform normalisation folded in. Dense: one factor per eigenvalue.
  std::vector<double> factors_;
  Eigen::VectorXd coeffs_;
};

/// Shares FFT plans and buffers between several DiagonalActions on the same grid.
std::shared_ptr<SpectralTransform> make_spectral_transform(const GridSpec& grid);

/// v = e^{scale L} u.
Field apply_exponential(const LinearOperator& op, const Field& u, double scale);

/// v = L u.
Field apply_operator(const LinearOperator& op, const Field& u);

struct ContractionReport {
  bool contractive = false;
  double max_eigenvalue = 0.0;
  double constant_mode_eigenvalue = 0.0;  // spectral only
  double mu_inf = 0.0;                    // dense only
  std::string justification;
};

/// Checks that ||e^{wL}||_inf <= 1 for all w >= 0.
ContractionReport verify_contraction(const LinearOperator& op);

}  // namespace ifrk
