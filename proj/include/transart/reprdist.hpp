#pragma once

// Fréchet distance between Gaussians fitted to two embedding sets:
//
//   FID = |mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2})
//
// The trace of the non-symmetric square root is computed from the symmetric
// matrix S_a^{1/2} S_b S_a^{1/2}, which has the same eigenvalues as S_a S_b.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "transart/error.hpp"

namespace transart::reprdist {

struct EmbeddingSet {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<float> data;  // n * d, row-major
  std::optional<std::vector<std::string>> ids;

  float at(std::size_t row, std::size_t col) const { return data[row * d + col]; }

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;
};

inline EmbeddingSet make_embeddings(std::size_t n, std::size_t d, std::vector<float> data) {
  if (data.size() != n * d) fail("DimensionMismatch", "data length != n * d");
  return EmbeddingSet{n, d, std::move(data), std::nullopt};
}

inline void check_finite(const EmbeddingSet& set) {
  for (std::size_t r = 0; r < set.n; ++r) {
    for (std::size_t c = 0; c < set.d; ++c) {
      if (!std::isfinite(set.at(r, c))) fail("NonFiniteValue", "row " + std::to_string(r));
    }
  }
}

// ---------------------------------------------------------------------------
// EMBV1 files: "EMBV1\n", u64 n, u64 d, n*d f32, all little-endian.
// Optional sidecar "<path>.ids" with one id per line.

inline constexpr std::string_view kEmbeddingMagic = "EMBV1\n";

inline std::filesystem::path ids_sidecar(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".ids");
}

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) fail("TruncatedFile", "embedding header ends early");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline void put_f32(std::ostream& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

inline void write_embeddings(const EmbeddingSet& set, std::ostream& out) {
  out.write(kEmbeddingMagic.data(), static_cast<std::streamsize>(kEmbeddingMagic.size()));
  detail::put_u64(out, set.n);
  detail::put_u64(out, set.d);
  for (float f : set.data) detail::put_f32(out, f);
}

inline EmbeddingSet read_embeddings(std::istream& in) {
  char magic[6];
  if (!in.read(magic, 6) || std::string_view(magic, 6) != kEmbeddingMagic) fail("BadMagic", "not an EMBV1 file");
  EmbeddingSet set;
  set.n = detail::get_u64(in);
  set.d = detail::get_u64(in);
  if (set.d != 0 && set.n > (std::uint64_t{1} << 40) / set.d) fail("TruncatedFile", "implausible n * d");
  std::vector<unsigned char> raw(set.n * set.d * 4);
  if (!raw.empty() && !in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    fail("TruncatedFile", "expected " + std::to_string(set.n * set.d) + " floats");
  }
  set.data.resize(set.n * set.d);
  for (std::size_t i = 0; i < set.data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int k = 3; k >= 0; --k) bits = (bits << 8) | raw[4 * i + static_cast<std::size_t>(k)];
    std::memcpy(&set.data[i], &bits, 4);
  }
  check_finite(set);
  return set;
}

inline void save_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  if (set.data.size() != set.n * set.d) fail("DimensionMismatch", "data length != n * d");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("IoError", "cannot write " + path.string());
  write_embeddings(set, out);
  if (!out) fail("IoError", "write failed for " + path.string());
  if (set.ids) {
    if (set.ids->size() != set.n) fail("DimensionMismatch", "ids count != n");
    std::ofstream ids(ids_sidecar(path), std::ios::binary | std::ios::trunc);
    for (const auto& id : *set.ids) ids << id << '\n';
  }
}

inline EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("IoError", "cannot open " + path.string());
  EmbeddingSet set = read_embeddings(in);
  if (std::ifstream ids(ids_sidecar(path)); ids) {
    std::vector<std::string> list;
    std::string line;
    while (std::getline(ids, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      list.push_back(line);
    }
    if (list.size() != set.n) fail("DimensionMismatch", "sidecar has " + std::to_string(list.size()) + " ids");
    set.ids = std::move(list);
  }
  return set;
}

// ---------------------------------------------------------------------------

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Column means and the unbiased (n - 1) covariance, symmetrized.
inline GaussianStats gaussian_stats(const EmbeddingSet& set) {
  if (set.n < 2) fail("TooFewSamples", "need at least two embeddings");
  check_finite(set);
  const Eigen::MatrixXd x =
      Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          set.data.data(), static_cast<Eigen::Index>(set.n), static_cast<Eigen::Index>(set.d))
          .cast<double>();
  GaussianStats s;
  s.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  s.cov = (centered.transpose() * centered) / static_cast<double>(set.n - 1);
  s.cov = 0.5 * (s.cov + s.cov.transpose());
  return s;
}

struct FidResult {
  double value = 0.0;
  bool stabilized = false;  // eps * I was added to both covariances
};

namespace detail {

inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) fail("NumericalFailure", "eigendecomposition did not converge");
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail("NumericalFailure", "eigendecomposition did not converge");
  return es.eigenvalues().minCoeff();
}

}  // namespace detail

inline FidResult fid(const GaussianStats& a, const GaussianStats& b, double eps = 1e-6) {
  if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows()) {
    fail("DimensionMismatch", "dimensions " + std::to_string(a.mean.size()) + " and " +
                                  std::to_string(b.mean.size()) + " differ");
  }
  FidResult result;
  Eigen::MatrixXd cov_a = a.cov;
  Eigen::MatrixXd cov_b = b.cov;
  if (detail::min_eigenvalue(cov_a) < eps || detail::min_eigenvalue(cov_b) < eps) {
    const auto identity = Eigen::MatrixXd::Identity(cov_a.rows(), cov_a.cols());
    cov_a += eps * identity;
    cov_b += eps * identity;
    result.stabilized = true;
  }
  if (a.mean == b.mean && a.cov == b.cov) return result;  // exact zero, no rounding from the square root

  const Eigen::MatrixXd root_a = detail::psd_sqrt(cov_a);
  Eigen::MatrixXd inner = root_a * cov_b * root_a;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail("NumericalFailure", "eigendecomposition did not converge");
  const double trace_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double mean_term = (a.mean - b.mean).squaredNorm();
  double value = mean_term + cov_a.trace() + cov_b.trace() - 2.0 * trace_sqrt;
  if (value < 0.0) {
    if (value < -1e-6) fail("NumericalFailure", "FID evaluated to " + std::to_string(value));
    value = 0.0;
  }
  result.value = value;
  return result;
}

inline FidResult fid(const EmbeddingSet& a, const EmbeddingSet& b, double eps = 1e-6) {
  if (a.d != b.d) fail("DimensionMismatch", "dimensions " + std::to_string(a.d) + " and " + std::to_string(b.d));
  return fid(gaussian_stats(a), gaussian_stats(b), eps);
}

struct FidRow {
  std::string eval_name;
  double fid_vs_human = 0.0;
  double fid_vs_mt = 0.0;
  double delta = 0.0;  // fid_vs_mt - fid_vs_human; negative means closer to MT training data
};

/// Distance of each evaluation set to human-origin and MT-origin training embeddings.
inline std::vector<FidRow> fid_report(const EmbeddingSet& train_human, const EmbeddingSet& train_mt,
                                      const std::vector<std::pair<std::string, EmbeddingSet>>& eval_sets,
                                      double eps = 1e-6) {
  if (train_human.d != train_mt.d) fail("DimensionMismatch", "training sets differ in dimension");
  for (const auto& [name, set] : eval_sets) {
    if (set.d != train_human.d) fail("DimensionMismatch", "eval set '" + name + "' has dimension " + std::to_string(set.d));
  }
  const GaussianStats human = gaussian_stats(train_human);
  const GaussianStats mt = gaussian_stats(train_mt);
  std::vector<FidRow> rows;
  rows.reserve(eval_sets.size());
  for (const auto& [name, set] : eval_sets) {
    const GaussianStats e = gaussian_stats(set);
    FidRow row;
    row.eval_name = name;
    row.fid_vs_human = fid(e, human, eps).value;
    row.fid_vs_mt = fid(e, mt, eps).value;
    row.delta = row.fid_vs_mt - row.fid_vs_human;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace transart::reprdist
