#include "generators.hpp"
#include "oracle.hpp"

#include "wabe/core/error.hpp"
#include "wabe/core/image.hpp"
#include "wabe/core/math.hpp"
#include "wabe/core/parallel.hpp"
#include "wabe/core/types.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

using namespace wabe;
using testsupport::Gen;

TEST(Opacity, SigmoidValuesAndExtremes) {
  EXPECT_DOUBLE_EQ(activate_opacity(0.0), 0.5);
  EXPECT_NEAR(activate_opacity(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_GT(activate_opacity(-800.0), -1e-300);
  EXPECT_TRUE(std::isfinite(activate_opacity(-800.0)));
  EXPECT_EQ(activate_opacity(800.0), 1.0);
}

TEST(Opacity, LogitRoundTrip) {
  for (double p : {0.01, 0.3, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(activate_opacity(opacity_logit_from(p)), p, 1e-12);
  }
}

TEST(Rotation, MatchesTermByTermFormula) {
  Gen gen(11);
  for (int i = 0; i < 50; ++i) {
    const Quat q = gen.quat() * gen.uniform(0.3, 3.0);
    const Mat3 r = rotation_matrix(q);
    EXPECT_LT((r - testsupport::reference_rotation(q)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-13);
  }
}

TEST(Rotation, IdentityAndHalfTurn) {
  EXPECT_EQ(rotation_matrix(identity_quat()), Mat3::Identity());
  // 180 degrees about z: (x, y) -> (-x, -y).
  const Mat3 r = rotation_matrix(Quat(0.0, 0.0, 0.0, 1.0));
  EXPECT_NEAR(r(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(r(1, 1), -1.0, 1e-15);
  EXPECT_NEAR(r(2, 2), 1.0, 1e-15);
}

TEST(Rotation, BackwardMatchesFiniteDifferences) {
  Gen gen(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Quat q = gen.quat() * 1.7;
    Mat3 upstream;
    for (int i = 0; i < 9; ++i) upstream(i / 3, i % 3) = gen.normal();
    const Vec4 analytic = rotation_matrix_backward(q, upstream);
    for (int k = 0; k < 4; ++k) {
      const double h = 1e-6;
      Quat qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      const double fd = ((rotation_matrix(qp) - rotation_matrix(qm)).cwiseProduct(upstream)).sum() /
                        (2 * h);
      EXPECT_NEAR(analytic[k], fd, 1e-7 * std::max(1.0, std::abs(fd)));
    }
    // Scaling q does not change R, so the gradient has no radial part.
    EXPECT_NEAR(analytic.dot(q), 0.0, 1e-12);
  }
}

TEST(Quaternion, ProductMatchesMatrixProduct) {
  Gen gen(13);
  for (int i = 0; i < 20; ++i) {
    const Quat a = gen.quat(), b = gen.quat();
    EXPECT_LT((rotation_matrix(quat_multiply(a, b)) - rotation_matrix(a) * rotation_matrix(b))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-13);
    EXPECT_LT((quat_left_matrix(a) * b - quat_multiply(a, b)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Quaternion, FromMatrixInvertsRotation) {
  Gen gen(14);
  for (int i = 0; i < 20; ++i) {
    const Mat3 r = rotation_matrix(gen.quat());
    EXPECT_LT((rotation_matrix(quat_from_matrix(r)) - r).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(quat_from_matrix(r).norm(), 1.0, 1e-14);
  }
}

TEST(Covariance, AxisAlignedIsDiagonalOfSquaredScales) {
  const Mat3 s = assemble_covariance(identity_quat(), Vec3(std::log(0.1), std::log(0.2), std::log(0.3)));
  EXPECT_NEAR(s(0, 0), 0.01, 1e-15);
  EXPECT_NEAR(s(1, 1), 0.04, 1e-15);
  EXPECT_NEAR(s(2, 2), 0.09, 1e-15);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-15);
}

TEST(Covariance, SymmetricPositiveDefinite) {
  Gen gen(15);
  for (int i = 0; i < 30; ++i) {
    const Mat3 s = assemble_covariance(gen.quat(), gen.vec3(-3.0, 1.0));
    EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Mat3> eig(s);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Image, ShapeAccessAndEquality) {
  ImageBuffer a(4, 3, 0.25);
  EXPECT_EQ(a.size(), 36u);
  a.at(3, 2, 1) = 0.75;
  EXPECT_EQ(a.data()[(2 * 4 + 3) * 3 + 1], 0.75);
  ImageBuffer b = a;
  EXPECT_EQ(a, b);
  b.at(0, 0, 0) = 0.0;
  EXPECT_NE(a, b);
  EXPECT_TRUE(a.all_finite());
  a.at(1, 1, 1) = std::nan("");
  EXPECT_FALSE(a.all_finite());
  EXPECT_THROW(require_same_shape(a, ImageBuffer(3, 4), "test"), Error);
}

TEST(Parameters, PackUnpackRoundTrip) {
  Gen gen(16);
  std::vector<Gaussian3D> gs(5);
  for (auto& g : gs) {
    g.position_local = gen.vec3(-1, 1);
    g.rotation_local = gen.quat();
    g.log_scale = gen.vec3(-3, 0);
    g.opacity_logit = gen.normal();
    g.color = gen.vec3(0, 1);
  }
  const auto flat = pack_parameters(gs);
  ASSERT_EQ(flat.size(), gs.size() * kParamsPerGaussian);
  EXPECT_EQ(flat[kParamsPerGaussian + 10], gs[1].opacity_logit);
  std::vector<Gaussian3D> back(5);
  unpack_parameters(flat, back);
  EXPECT_EQ(pack_parameters(back), flat);
  EXPECT_THROW(unpack_parameters(std::span<const double>(flat).first(3), back), ContractViolation);
}

TEST(Parameters, GradientLayoutMatchesParameterLayout) {
  GradBuffer g(2);
  g.entries[1].opacity_logit = 7.0;
  g.entries[1].color[2] = 3.0;
  const auto flat = pack_gradients(g);
  EXPECT_EQ(flat[kParamsPerGaussian + 10], 7.0);
  EXPECT_EQ(flat[2 * kParamsPerGaussian - 1], 3.0);
}

TEST(Parameters, ChecksumDetectsSingleBitChange) {
  std::vector<double> v{1.0, 2.0, 3.0};
  const auto h = fnv1a64(v);
  v[1] = std::nextafter(v[1], 3.0);
  EXPECT_NE(h, fnv1a64(v));
}

TEST(Camera, ValidateRejectsBadIntrinsics) {
  Camera c;
  c.width = 8;
  c.height = 8;
  EXPECT_NO_THROW(c.validate());
  c.fx = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c.fx = 1.0;
  c.width = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Parallel, VisitsEveryIndexOnce) {
  for (int threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(16, 4,
                            [](std::size_t i) {
                              if (i == 9) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Parallel, ThreadCapIsAdjustable) {
  const int before = max_threads();
  set_max_threads(3);
  EXPECT_EQ(max_threads(), 3);
  set_max_threads(0);
  EXPECT_GE(max_threads(), 1);
  set_max_threads(before);
}
