#include "gmc/field_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gmc/parallel.hpp"

namespace gmc {

GridSpec GridSpec::regular(int d, Box box, double spacing) {
  if (spacing <= 0) throw DomainError("GridSpec: spacing > 0 required");
  if (d < 1 || d > 3) throw DomainError("GridSpec: d in {1,2,3}");
  GridSpec g;
  g.d = d;
  g.box = box;
  std::array<int, 3> counts{1, 1, 1};
  for (int i = 0; i < d; ++i) {
    const double len = box.hi[i] - box.lo[i];
    if (len <= 0) throw DomainError("GridSpec: degenerate box");
    counts[static_cast<size_t>(i)] = std::max(1, static_cast<int>(std::round(len / spacing)));
  }
  // Snap the spacing so the cells tile the box exactly (sum of cell
  // volumes equals |box|); all axes must agree on the snapped value.
  g.spacing = (box.hi[0] - box.lo[0]) / counts[0];
  for (int i = 1; i < d; ++i) {
    const double si = (box.hi[i] - box.lo[i]) / counts[static_cast<size_t>(i)];
    if (std::abs(si - g.spacing) > 1e-9 * g.spacing)
      throw DomainError("GridSpec: box sides are not commensurate with one spacing");
  }
  const int64_t total = int64_t{counts[0]} * counts[1] * counts[2];
  if (total > 200000) throw ResourceError("GridSpec: grid too large for dense sampling");
  g.points.reserve(static_cast<size_t>(total));
  for (int i = 0; i < counts[0]; ++i)
    for (int j = 0; j < counts[1]; ++j)
      for (int l = 0; l < counts[2]; ++l) {
        Point p;
        p.dim = d;
        p[0] = box.lo[0] + (i + 0.5) * g.spacing;
        if (d > 1) p[1] = box.lo[1] + (j + 0.5) * g.spacing;
        if (d > 2) p[2] = box.lo[2] + (l + 0.5) * g.spacing;
        g.points.push_back(p);
      }
  return g;
}

double GridSpec::cell_volume() const { return std::pow(spacing, d); }

FieldSampler::FieldSampler(KernelDescriptor k, GridSpec grid, double epsilon,
                           const QuadratureConfig& quad)
    : grid_(std::make_shared<const GridSpec>(std::move(grid))),
      epsilon_(epsilon),
      cov_(build_cov_matrix(k, grid_->points, epsilon, quad)),
      kernel_id_(k.id()) {
  warn_epsilon_ = epsilon < grid_->spacing;
  variance_ = std::make_shared<const Eigen::VectorXd>(cov_.variance());
}

FieldSample FieldSampler::sample(const RngPolicy& rng, uint64_t replica) const {
  const auto n = cov_.factor.rows();
  Eigen::VectorXd z(n);
  RngStream s = RngStream::derive(rng, streams::field, replica);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = s.normal();
  FieldSample out;
  out.grid = grid_;
  out.epsilon = epsilon_;
  out.values = cov_.factor * z;
  out.variance = variance_;
  out.kernel_id = kernel_id_;
  out.seed = rng.master_seed;
  out.replica = replica;
  return out;
}

void FieldSampler::sample_block(const RngPolicy& rng, uint64_t first_replica, int count,
                                Eigen::MatrixXd& out, int workers) const {
  const auto n = cov_.factor.rows();
  Eigen::MatrixXd z(n, count);
  parallel_for(count, workers, [&](int64_t lo, int64_t hi) {
    for (int64_t j = lo; j < hi; ++j) {
      RngStream s = RngStream::derive(rng, streams::field, first_replica + static_cast<uint64_t>(j));
      for (Eigen::Index i = 0; i < n; ++i) z(i, j) = s.normal();
    }
  });
  out.resize(n, count);
  // One fixed-shape GEMM: identical result for any worker count.
  out.noalias() = cov_.factor * z;
}

std::vector<FieldSample> sample_field(const KernelDescriptor& k, const GridSpec& grid,
                                      double epsilon, const RngPolicy& rng, int n,
                                      int workers) {
  FieldSampler sampler(k, grid, epsilon);
  std::vector<FieldSample> out(static_cast<size_t>(n));
  parallel_for(n, workers, [&](int64_t lo, int64_t hi) {
    for (int64_t i = lo; i < hi; ++i)
      out[static_cast<size_t>(i)] = sampler.sample(rng, static_cast<uint64_t>(i));
  });
  return out;
}

std::vector<FieldSample> sample_reference_radial(int d, const GridSpec& grid, double epsilon,
                                                 const RngPolicy& rng, int n, int workers) {
  if (d < 2) throw DomainError("sample_reference_radial: d >= 2 required");
  for (const auto& p : grid.points) {
    const double r = p.norm();
    if (r == 0.0) throw DomainError("sample_reference_radial: grid contains the origin");
    if (r > 1.0) throw DomainError("sample_reference_radial: grid outside the unit ball");
  }

  // Lateral part: regularized covariance with log part -log(|x-y| v eps)
  // and non-log part log(|x| v |y|) - S_d, so that the radial Brownian part
  // min(-log|x|, -log|y|) completes it to the reference covariance exactly.
  KernelDescriptor lateral = KernelDescriptor::composite(
      d,
      [d](const Point& x, const Point& y) {
        return std::log(std::max(x.norm(), y.norm())) - eval_Sd(d, sd_ratio_c(x, y));
      },
      "yhat");
  FieldSampler lat(lateral, grid, epsilon);

  // Log-radius times, ascending (largest radius first hit by the path).
  const size_t npts = grid.points.size();
  std::vector<double> logr(npts);
  for (size_t i = 0; i < npts; ++i) logr[i] = -std::log(grid.points[i].norm());
  std::vector<size_t> order(npts);
  for (size_t i = 0; i < npts; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return logr[a] < logr[b]; });

  auto ref = KernelDescriptor::reference(d);
  Eigen::VectorXd total_var(static_cast<Eigen::Index>(npts));
  for (size_t i = 0; i < npts; ++i)
    total_var[static_cast<Eigen::Index>(i)] =
        -std::log(epsilon) + ref.non_log_part(grid.points[i], grid.points[i]);
  auto var_ptr = std::make_shared<const Eigen::VectorXd>(std::move(total_var));
  auto grid_ptr = std::make_shared<const GridSpec>(grid);
  const std::string kid = "reference_radial(d=" + std::to_string(d) + ")";

  std::vector<FieldSample> out(static_cast<size_t>(n));
  parallel_for(n, workers, [&](int64_t lo, int64_t hi) {
    for (int64_t r = lo; r < hi; ++r) {
      FieldSample fs = lat.sample(rng, static_cast<uint64_t>(r));
      // One Brownian path on the log-radius scale, shared by all points.
      RngStream s = RngStream::derive(rng, streams::radial, static_cast<uint64_t>(r));
      double t = 0.0, b = 0.0;
      for (size_t k = 0; k < npts; ++k) {
        const double tk = logr[order[k]];
        if (tk > t) b += s.normal() * std::sqrt(tk - t);
        t = std::max(t, tk);
        fs.values[static_cast<Eigen::Index>(order[k])] += b;
      }
      fs.variance = var_ptr;
      fs.grid = grid_ptr;
      fs.kernel_id = kid;
      out[static_cast<size_t>(r)] = std::move(fs);
    }
  });
  return out;
}

FieldSample shift_field(const FieldSample& sample, double sigma2, const RngPolicy& rng) {
  if (sigma2 < 0) throw DomainError("shift_field: sigma2 >= 0 required");
  FieldSample out = sample;
  if (sigma2 == 0.0) return out;
  RngStream s = RngStream::derive(rng, streams::shift, sample.replica);
  const double shift = s.normal() * std::sqrt(sigma2);
  out.values.array() += shift;
  auto var = std::make_shared<Eigen::VectorXd>(*sample.variance);
  var->array() += sigma2;
  out.variance = std::move(var);
  return out;
}

std::vector<Eigen::VectorXd> sample_continuous_field(
    const std::function<double(const Point&, const Point&)>& cov,
    const std::vector<Point>& points, const RngPolicy& rng, int n) {
  CovMatrix m = build_cov_matrix_fn(cov, points);
  const auto np = m.factor.rows();
  std::vector<Eigen::VectorXd> out(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    RngStream s = RngStream::derive(rng, streams::field, static_cast<uint64_t>(r));
    Eigen::VectorXd z(np);
    for (Eigen::Index i = 0; i < np; ++i) z[i] = s.normal();
    out[static_cast<size_t>(r)] = m.factor * z;
  }
  return out;
}

}  // namespace gmc
