#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "gmc/kernels.hpp"
#include "gmc/rng.hpp"

namespace gmc {

/// Regular grid of cell centers inside an axis-aligned box.
struct GridSpec {
  int d = 1;
  Box box;
  double spacing = 0.0;
  std::vector<Point> points;

  static GridSpec regular(int d, Box box, double spacing);
  double cell_volume() const;
  size_t size() const { return points.size(); }
};

/// One joint draw of the regularized field X_eps on a grid.
struct FieldSample {
  std::shared_ptr<const GridSpec> grid;
  double epsilon = 0.0;
  Eigen::VectorXd values;
  std::shared_ptr<const Eigen::VectorXd> variance;  // E[X_eps(x)^2] per point
  std::string kernel_id;
  uint64_t seed = 0;
  uint64_t replica = 0;
};

/// Holds the repaired covariance factor for a (kernel, grid, epsilon)
/// triple; replica draws reuse it and are embarrassingly parallel.
class FieldSampler {
 public:
  FieldSampler(KernelDescriptor k, GridSpec grid, double epsilon,
               const QuadratureConfig& quad = {});

  FieldSample sample(const RngPolicy& rng, uint64_t replica) const;

  /// Fills one column per replica [first, first+count); column j is the
  /// replica (first + j) draw, bitwise independent of threading.
  void sample_block(const RngPolicy& rng, uint64_t first_replica, int count,
                    Eigen::MatrixXd& out, int workers = 0) const;

  const CovMatrix& cov() const { return cov_; }
  const GridSpec& grid() const { return *grid_; }
  std::shared_ptr<const GridSpec> grid_ptr() const { return grid_; }
  std::shared_ptr<const Eigen::VectorXd> variance_ptr() const { return variance_; }
  double epsilon() const { return epsilon_; }
  const std::string& kernel_id() const { return kernel_id_; }
  bool epsilon_below_spacing() const { return warn_epsilon_; }

 private:
  std::shared_ptr<const GridSpec> grid_;
  double epsilon_;
  CovMatrix cov_;
  std::shared_ptr<const Eigen::VectorXd> variance_;
  std::string kernel_id_;
  bool warn_epsilon_ = false;
};

/// Draw n independent field replicas (the factor is computed once).
std::vector<FieldSample> sample_field(const KernelDescriptor& k, const GridSpec& grid,
                                      double epsilon, const RngPolicy& rng, int n,
                                      int workers = 0);

/// Reference-field sampler via the radial + lateral decomposition: one
/// shared Brownian path in the log-radius variable plus an independent
/// lateral field with the same epsilon regularization.
std::vector<FieldSample> sample_reference_radial(int d, const GridSpec& grid, double epsilon,
                                                 const RngPolicy& rng, int n, int workers = 0);

/// Adds one shared independent N(0, sigma2) to every grid value (the
/// L-shift / rescaling device); variance grows by sigma2.
FieldSample shift_field(const FieldSample& sample, double sigma2, const RngPolicy& rng);

/// Joint Gaussian draws for an arbitrary continuous covariance function
/// (no log part); used for smooth fields G with covariance f.
std::vector<Eigen::VectorXd> sample_continuous_field(
    const std::function<double(const Point&, const Point&)>& cov,
    const std::vector<Point>& points, const RngPolicy& rng, int n);

}  // namespace gmc
