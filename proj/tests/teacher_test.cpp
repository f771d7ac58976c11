#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "tsbench/errors.hpp"
#include "tsbench/teacher.hpp"

namespace tsbench {
namespace {

TEST(TeacherTest, Shapes) {
  RandomSource rng(1);
  const TeacherNet g = sample_teacher({4, 3, 0.1}, rng);
  EXPECT_EQ(g.a.rows(), 3u);
  EXPECT_EQ(g.a.cols(), 4u);
  EXPECT_EQ(g.b.size(), 3u);
  EXPECT_EQ(g.theta.size(), 3u);
}

TEST(TeacherTest, SmallestCaseIsFinite) {
  RandomSource rng(2);
  const TeacherNet g = sample_teacher({1, 1, 0.1}, rng);
  EXPECT_TRUE(std::isfinite(g.a(0, 0)));
  EXPECT_TRUE(std::isfinite(g.b[0]));
  EXPECT_TRUE(std::isfinite(g.theta[0]));
}

TEST(TeacherTest, InvalidGammaThrows) {
  RandomSource rng(2);
  EXPECT_THROW(sample_teacher({0, 1, 0.1}, rng), ValidationError);
  EXPECT_THROW(sample_teacher({1, 0, 0.1}, rng), ValidationError);
  EXPECT_THROW(sample_teacher({1, 1, 0.0}, rng), ValidationError);
}

TEST(TeacherTest, FirstLayerVarianceIsOneOverDPlusOne) {
  // d=15: entries of a ~ N(0, 1/16).
  RandomSource rng(3);
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (int t = 0; t < 100'000; ++t) {
    RandomSource child = rng.child(t);
    const TeacherNet g = sample_teacher({15, 1, 0.1}, child);
    for (double v : g.a.data()) {
      sum += v;
      sum2 += v * v;
      ++count;
    }
  }
  const double mean = sum / count;
  const double var = sum2 / count - mean * mean;
  EXPECT_NEAR(var, 1.0 / 16.0, 0.03 / 16.0);
}

TEST(TeacherTest, ZeroThetaGivesZero) {
  RandomSource rng(4);
  TeacherNet g = sample_teacher({3, 5, 0.1}, rng);
  std::fill(g.theta.begin(), g.theta.end(), 0.0);
  const std::vector<double> x{0.3, -1.2, 2.0};
  EXPECT_EQ(teacher_forward(g, x), 0.0);
}

TEST(TeacherTest, SingleUnitByHand) {
  TeacherNet g{Matrix{{1, 0}}, {0.0}, {2.0}, {2, 1, 0.1}};
  EXPECT_DOUBLE_EQ(teacher_forward(g, std::vector<double>{3, 7}), 6.0);
  EXPECT_DOUBLE_EQ(teacher_forward(g, std::vector<double>{-3, 7}), 0.0);
}

TEST(TeacherTest, DimensionMismatchThrows) {
  RandomSource rng(5);
  const TeacherNet g = sample_teacher({3, 2, 0.1}, rng);
  EXPECT_THROW(teacher_forward(g, std::vector<double>{1, 2}), ShapeError);
}

TEST(TeacherTest, BatchMatchesPerUnitLoop) {
  RandomSource rng(6);
  const TeacherNet g = sample_teacher({7, 9, 0.1}, rng);
  Matrix xs(50, 7);
  rng.fill_normal(xs.data());
  const auto batch = teacher_forward_batch(g, xs);
  for (std::size_t i = 0; i < xs.rows(); ++i) {
    // Independent scalar loop, not the library's per-unit path.
    double expect = 0.0;
    for (std::size_t u = 0; u < 9; ++u) {
      double z = g.b[u];
      for (std::size_t j = 0; j < 7; ++j) z += g.a(u, j) * xs(i, j);
      expect += g.theta[u] * std::max(z, 0.0);
    }
    EXPECT_NEAR(batch[i], expect, 1e-12);
    EXPECT_NEAR(teacher_forward(g, xs.row(i)), expect, 1e-12);
  }
}

TEST(DatasetTest, NoiseHasStdSigmaAndZeroMean) {
  const double sigma = 0.3;
  const std::size_t n = 100'000;
  RandomSource rng(7);
  const TeacherNet g = sample_teacher({3, 3, sigma}, rng);
  const Dataset s = generate_dataset(g, n, rng);
  ASSERT_EQ(s.size(), n);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = s.ys[i] - s.ys_noiseless[i];
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_NEAR(sd, sigma, 0.05 * sigma);
  EXPECT_LE(std::abs(mean), 5 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST(DatasetTest, NoiselessLabelsMatchTeacher) {
  RandomSource rng(8);
  const TeacherNet g = sample_teacher({2, 4, 0.1}, rng);
  const Dataset s = generate_dataset(g, 20, rng);
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_EQ(s.ys_noiseless[i], teacher_forward(g, s.xs.row(i)));
}

TEST(DatasetTest, SingleRow) {
  RandomSource rng(9);
  const TeacherNet g = sample_teacher({2, 2, 0.1}, rng);
  const Dataset s = generate_dataset(g, 1, rng);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.xs.rows(), 1u);
  EXPECT_EQ(s.dim(), 2u);
}

TEST(DatasetTest, Deterministic) {
  auto make = [] {
    RandomSource rng(10);
    const TeacherNet g = sample_teacher({3, 2, 0.1}, rng);
    return generate_dataset(g, 64, rng);
  };
  const Dataset a = make(), b = make();
  EXPECT_EQ(a.xs, b.xs);
  EXPECT_EQ(a.ys, b.ys);
}

TEST(DatasetTest, CsvHasHeaderAndRows) {
  RandomSource rng(11);
  const TeacherNet g = sample_teacher({2, 2, 0.1}, rng);
  const Dataset s = generate_dataset(g, 5, rng);
  const auto path = std::filesystem::temp_directory_path() / "tsbench_dataset_test.csv";
  write_dataset_csv(s, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x_1,x_2,y,y_noiseless");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
  std::filesystem::remove(path);
}

// Output variance stays in a band around 1/2 as d and M grow.
class TeacherVarianceTest : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(TeacherVarianceTest, VarianceRoughlyFixed) {
  const auto [d, m] = GetParam();
  RandomSource root(12);
  const int draws = 100'000;
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> x(d);
  for (int t = 0; t < draws; ++t) {
    RandomSource rng = root.child(t);
    const TeacherNet g = sample_teacher({static_cast<std::size_t>(d), static_cast<std::size_t>(m), 0.1}, rng);
    rng.fill_normal(x);
    const double y = teacher_forward(g, x);
    sum += y;
    sum2 += y * y;
  }
  const double mean = sum / draws;
  const double var = sum2 / draws - mean * mean;
  EXPECT_GE(var, 0.3);
  EXPECT_LE(var, 0.7);
}

INSTANTIATE_TEST_SUITE_P(Grid, TeacherVarianceTest,
                         ::testing::Values(std::pair{4, 4}, std::pair{16, 16}, std::pair{64, 64}));

}  // namespace
}  // namespace tsbench
