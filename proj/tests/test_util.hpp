#pragma once

// Shared helpers for the unit and acceptance tests: closed-form transform
// oracles, random orthonormal matrices, and small statistics utilities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#ifndef _WIN32
#include <sys/wait.h>
#include <unistd.h>
#endif

#include "rdot/mat.hpp"
#include "rdot/rng.hpp"
#include "rdot/transform.hpp"

namespace testutil {

// Closed-form orthonormal DCT-II basis; column k holds the k-th basis vector
// v_k(i) = sqrt(2/N) * c_k * cos(pi * k * (2i + 1) / (2N)), c_0 = 1/sqrt(2).
inline rdot::Mat dct2_closed_form(int n) {
  rdot::Mat m(n, n);
  const double pi = std::numbers::pi;
  for (int k = 0; k < n; ++k) {
    const double ck = (k == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
    for (int i = 0; i < n; ++i) {
      m(i, k) = std::sqrt(2.0 / n) * ck *
                std::cos(pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
  }
  return m;
}

// Closed-form orthonormal DST-VII basis; column k holds
// v_k(i) = 2/sqrt(2N+1) * sin(pi * (2k + 1) * (i + 1) / (2N + 1)).
inline rdot::Mat dst7_closed_form(int n) {
  rdot::Mat m(n, n);
  const double pi = std::numbers::pi;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      m(i, k) = 2.0 / std::sqrt(2.0 * n + 1.0) *
                std::sin(pi * (2.0 * k + 1.0) * (i + 1.0) / (2.0 * n + 1.0));
    }
  }
  return m;
}

// Largest per-entry difference between a and b after flipping each column of b
// to whichever sign matches a best (basis vectors are unique up to sign).
inline double sign_aligned_diff(const rdot::Mat& a, const rdot::Mat& b) {
  double worst = 0.0;
  for (int k = 0; k < a.cols(); ++k) {
    double plus = 0.0;
    double minus = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
      plus = std::max(plus, std::abs(a(i, k) - b(i, k)));
      minus = std::max(minus, std::abs(a(i, k) + b(i, k)));
    }
    worst = std::max(worst, std::min(plus, minus));
  }
  return worst;
}

// Random orthonormal matrix from a Gaussian sample via modified Gram-Schmidt
// with a second orthogonalization pass for stability.
inline rdot::Mat random_orthonormal(int n, rdot::Xoshiro256pp& rng) {
  rdot::Mat q(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = rng.gaussian();
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < j; ++p) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += q(i, p) * v[static_cast<size_t>(i)];
        for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] -= dot * q(i, p);
      }
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i)
      norm += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      // Astronomically unlikely; restart the column with a nudged draw.
      --j;
      continue;
    }
    for (int i = 0; i < n; ++i) q(i, j) = v[static_cast<size_t>(i)] / norm;
  }
  return q;
}

// Uniformly random permutation of 0..len-1 (Fisher-Yates).
inline rdot::ScanOrder random_scan(int len, rdot::Xoshiro256pp& rng) {
  rdot::ScanOrder scan;
  scan.perm.resize(static_cast<size_t>(len));
  for (int i = 0; i < len; ++i) scan.perm[static_cast<size_t>(i)] = i;
  for (int i = len - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next() % static_cast<uint64_t>(i + 1));
    std::swap(scan.perm[static_cast<size_t>(i)], scan.perm[static_cast<size_t>(j)]);
  }
  return scan;
}

inline rdot::Mat random_block(int n, rdot::Xoshiro256pp& rng, double scale) {
  rdot::Mat x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = scale * rng.gaussian();
  return x;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

// Runs a shell command, returns its exit code (-1 if it did not exit
// normally). Used by the CLI and determinism tests.
inline int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
#ifdef _WIN32
  return status;
#else
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
#endif
}

// Path of the rdot CLI binary, injected by CTest through the environment.
inline std::string cli_path() {
  const char* p = std::getenv("RDOT_CLI");
  return p ? std::string(p) : std::string();
}

// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("rdot_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::FILE* f = std::fopen(p.string().c_str(), "rb");
  if (!f) return {};
  std::string out;
  char buf[4096];
  size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
  std::fclose(f);
  return out;
}

}  // namespace testutil
