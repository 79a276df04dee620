#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles/fid_oracle.hpp"
#include "test_support.hpp"
#include "transart/reprdist.hpp"

namespace transart::reprdist {
namespace {

std::string error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return "<no error>";
}

EmbeddingSet gaussian_set(std::size_t n, std::size_t d, double mean_shift, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  // Correlated columns: x = scale * (z + 0.5 * z_prev) + shift.
  std::vector<float> data(n * d);
  for (std::size_t r = 0; r < n; ++r) {
    double prev = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double z = nd(rng);
      data[r * d + c] = static_cast<float>(scale * (z + 0.5 * prev) + mean_shift + 0.1 * static_cast<double>(c));
      prev = z;
    }
  }
  return make_embeddings(n, d, std::move(data));
}

std::vector<std::vector<double>> rows_of(const EmbeddingSet& s) {
  std::vector<std::vector<double>> rows(s.n, std::vector<double>(s.d));
  for (std::size_t r = 0; r < s.n; ++r)
    for (std::size_t c = 0; c < s.d; ++c) rows[r][c] = s.at(r, c);
  return rows;
}

EmbeddingSet transformed(const EmbeddingSet& s, float scale, float shift) {
  EmbeddingSet out = s;
  for (float& v : out.data) v = v * scale + shift;
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian statistics

TEST(GaussianStats, HandComputed) {
  const GaussianStats s = gaussian_stats(make_embeddings(2, 2, {0, 0, 2, 2}));
  EXPECT_DOUBLE_EQ(s.mean(0), 1.0);
  EXPECT_DOUBLE_EQ(s.mean(1), 1.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(s.cov(i, j), 2.0);
}

TEST(GaussianStats, IdenticalRowsGiveZeroCovariance) {
  const GaussianStats s = gaussian_stats(make_embeddings(4, 3, {1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3}));
  EXPECT_EQ(s.cov.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GaussianStats, MatchesDoubleLoopCovariance) {
  const EmbeddingSet set = gaussian_set(50, 8, 0.3, 1.7, 5);
  const GaussianStats s = gaussian_stats(set);
  const auto ref = test::oracle::moments(rows_of(set));
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(s.mean(static_cast<Eigen::Index>(i)), ref.mean[i], 1e-10);
    for (std::size_t j = 0; j < 8; ++j) {
      EXPECT_NEAR(s.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), ref.cov[i][j], 1e-10);
    }
  }
}

TEST(GaussianStats, TooFewSamples) {
  EXPECT_EQ(error_kind([] { gaussian_stats(make_embeddings(1, 2, {1, 2})); }), "TooFewSamples");
}

// ---------------------------------------------------------------------------
// FID

TEST(Fid, SelfDistanceIsZero) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const EmbeddingSet s = gaussian_set(100, 16, 0.0, 1.0, seed);
    EXPECT_LE(std::abs(fid(s, s).value), 1e-9);
  }
}

TEST(Fid, OneDimensionalClosedForm) {
  const FidResult r = fid(make_embeddings(2, 1, {0, 2}), make_embeddings(2, 1, {0, 4}));
  EXPECT_NEAR(r.value, 3.0, 1e-9);
  EXPECT_FALSE(r.stabilized);
}

TEST(Fid, MatchesDenmanBeaversOracle) {
  const EmbeddingSet a = gaussian_set(100, 16, 0.0, 1.0, 10);
  const EmbeddingSet b = gaussian_set(100, 16, 0.4, 1.3, 11);
  const double expected = test::oracle::fid(rows_of(a), rows_of(b));
  EXPECT_NEAR(fid(a, b).value, expected, 1e-4);
  EXPECT_GT(expected, 1.0);
}

TEST(Fid, Symmetric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EmbeddingSet a = gaussian_set(60, 6, 0.0, 1.0, 100 + seed);
    const EmbeddingSet b = gaussian_set(60, 6, 0.2 * static_cast<double>(seed), 0.8, 200 + seed);
    const double ab = fid(a, b).value;
    const double ba = fid(b, a).value;
    EXPECT_LE(std::abs(ab - ba), 1e-6 * std::max(1.0, std::abs(ab))) << seed;
  }
}

TEST(Fid, TranslationInvariant) {
  const EmbeddingSet a = gaussian_set(80, 8, 0.0, 1.0, 31);
  const EmbeddingSet b = gaussian_set(80, 8, 1.0, 1.5, 32);
  const double base = fid(a, b).value;
  for (float t : {-4.0f, 0.5f, 16.0f}) {
    EXPECT_NEAR(fid(transformed(a, 1.0f, t), transformed(b, 1.0f, t)).value, base, 1e-4 * base) << t;
  }
}

TEST(Fid, ScalingLaw) {
  const EmbeddingSet a = gaussian_set(100, 16, 0.0, 1.0, 41);
  const EmbeddingSet b = gaussian_set(100, 16, 0.5, 1.2, 42);
  const double base = fid(a, b).value;
  // Powers of two keep the float data exact.
  for (float c : {0.25f, 0.5f, 2.0f, 8.0f}) {
    const double scaled = fid(transformed(a, c, 0.0f), transformed(b, c, 0.0f)).value;
    const double expected = static_cast<double>(c) * c * base;
    EXPECT_LE(std::abs(scaled - expected), 1e-6 * expected) << c;
  }
  // Arbitrary factors on the moments directly.
  const GaussianStats sa = gaussian_stats(a);
  const GaussianStats sb = gaussian_stats(b);
  for (double c : {0.3, 1.7, 3.0, 10.0}) {
    const GaussianStats ca{c * sa.mean, c * c * sa.cov};
    const GaussianStats cb{c * sb.mean, c * c * sb.cov};
    const double expected = c * c * base;
    EXPECT_LE(std::abs(fid(ca, cb).value - expected), 1e-6 * expected) << c;
  }
}

TEST(Fid, NonNegativeOnRandomInputs) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + rng() % 10;
    const std::size_t n = 2 + rng() % 40;
    const EmbeddingSet a = gaussian_set(n, d, 0.0, 1.0, rng());
    const EmbeddingSet b = gaussian_set(n + 3, d, 0.1, 0.9, rng());
    EXPECT_GE(fid(a, b).value, 0.0);
  }
}

TEST(Fid, RankDeficientIsStabilized) {
  // n < d gives singular covariances.
  const EmbeddingSet a = gaussian_set(5, 12, 0.0, 1.0, 1);
  const EmbeddingSet b = gaussian_set(5, 12, 0.5, 1.0, 2);
  const FidResult r = fid(a, b);
  EXPECT_TRUE(r.stabilized);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GE(r.value, 0.0);
}

TEST(Fid, DimensionMismatch) {
  EXPECT_EQ(error_kind([] { fid(gaussian_set(10, 3, 0, 1, 1), gaussian_set(10, 4, 0, 1, 1)); }),
            "DimensionMismatch");
}

// ---------------------------------------------------------------------------
// fid_report

TEST(FidReport, EvalEqualToMtTrainingSet) {
  const EmbeddingSet human = gaussian_set(100, 8, 0.0, 1.0, 1);
  const EmbeddingSet mt = gaussian_set(100, 8, 1.0, 1.0, 2);
  const auto rows = fid_report(human, mt, {{"mt_copy", mt}, {"human_copy", human}});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].eval_name, "mt_copy");
  EXPECT_LE(rows[0].fid_vs_mt, 1e-9);
  EXPECT_LT(rows[0].delta, 0.0);
  EXPECT_GT(rows[1].delta, 0.0);
  EXPECT_DOUBLE_EQ(rows[1].delta, rows[1].fid_vs_mt - rows[1].fid_vs_human);
}

TEST(FidReport, MidwayAndNearMt) {
  const EmbeddingSet human = gaussian_set(400, 4, 0.0, 1.0, 7);
  const EmbeddingSet mt = gaussian_set(400, 4, 2.0, 1.0, 8);
  const EmbeddingSet mid = gaussian_set(400, 4, 1.0, 1.0, 9);
  const EmbeddingSet near_mt = gaussian_set(400, 4, 1.8, 1.0, 10);
  const auto rows = fid_report(human, mt, {{"mid", mid}, {"near_mt", near_mt}});
  EXPECT_LT(std::abs(rows[0].delta), 0.1 * rows[0].fid_vs_human);
  EXPECT_LT(rows[1].fid_vs_mt, rows[1].fid_vs_human);
  EXPECT_EQ(error_kind([&] { fid_report(human, mt, {{"bad", gaussian_set(10, 3, 0, 1, 1)}}); }),
            "DimensionMismatch");
}

// ---------------------------------------------------------------------------
// EMBV1 files

TEST(EmbeddingFile, RoundTripWithIds) {
  test::TempDir dir;
  EmbeddingSet s = gaussian_set(7, 3, 0.0, 1.0, 4);
  s.ids = std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g"};
  save_embeddings(s, dir / "x.emb");
  EXPECT_EQ(std::filesystem::file_size(dir / "x.emb"), 6u + 16u + 7u * 3u * 4u);
  EXPECT_EQ(load_embeddings(dir / "x.emb"), s);
  std::filesystem::remove(ids_sidecar(dir / "x.emb"));
  EXPECT_FALSE(load_embeddings(dir / "x.emb").ids.has_value());
}

TEST(EmbeddingFile, LittleEndianLayout) {
  std::ostringstream os;
  write_embeddings(make_embeddings(1, 1, {1.0f}), os);
  const std::string bytes = os.str();
  ASSERT_EQ(bytes.size(), 6u + 16u + 4u);
  EXPECT_EQ(bytes.substr(0, 6), "EMBV1\n");
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[14]), 1u);
  EXPECT_EQ(bytes.substr(22), std::string("\x00\x00\x80\x3f", 4));
}

TEST(EmbeddingFile, Errors) {
  test::TempDir dir;
  test::write_file(dir / "bad.emb", "EMBV2\n0000000000000000");
  EXPECT_EQ(error_kind([&] { load_embeddings(dir / "bad.emb"); }), "BadMagic");

  EmbeddingSet s = gaussian_set(4, 2, 0.0, 1.0, 1);
  s.data[2 * 2 + 1] = std::numeric_limits<float>::quiet_NaN();
  std::ostringstream os;
  write_embeddings(s, os);
  test::write_file(dir / "nan.emb", os.str());
  try {
    load_embeddings(dir / "nan.emb");
    FAIL() << "expected NonFiniteValue";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "NonFiniteValue");
    EXPECT_STREQ(e.what(), "row 2");
  }

  std::ostringstream ok;
  write_embeddings(gaussian_set(4, 2, 0.0, 1.0, 1), ok);
  test::write_file(dir / "short.emb", ok.str().substr(0, ok.str().size() - 3));
  EXPECT_EQ(error_kind([&] { load_embeddings(dir / "short.emb"); }), "TruncatedFile");

  test::write_file(dir / "noheader.emb", "EMBV1\n\x01");
  EXPECT_EQ(error_kind([&] { load_embeddings(dir / "noheader.emb"); }), "TruncatedFile");
  EXPECT_EQ(error_kind([&] { load_embeddings(dir / "missing.emb"); }), "IoError");
}

}  // namespace
}  // namespace transart::reprdist
