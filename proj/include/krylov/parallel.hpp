#pragma once

// OpenMP kernels for the hot inner loops, each with a serial reference
// implementation kept for testing and benchmarking. The runtime switch
// lets the test suite and the bench tool run both paths on identical data.

#include <functional>

#include "krylov/types.hpp"

namespace krylov::par {

// Global switch: when false every kernel routes to its serial reference.
void enable_openmp(bool on);
bool openmp_enabled();
int worker_count();
void set_worker_count(int n);  // n <= 0 restores the OpenMP default

// out = H*X - X*H
void commutator_serial(const Mat& H, const Mat& X, Mat& out);
void commutator_omp(const Mat& H, const Mat& X, Mat& out);
void commutator(const Mat& H, const Mat& X, Mat& out);

// out += c * A*X*B (dense sandwich)
void sandwich_add_serial(const cxd& c, const Mat& A, const Mat& X, const Mat& B, Mat& out);
void sandwich_add_omp(const cxd& c, const Mat& A, const Mat& X, const Mat& B, Mat& out);
void sandwich_add(const cxd& c, const Mat& A, const Mat& X, const Mat& B, Mat& out);

// Classical Gram-Schmidt projection pass: v -= B * (B^dag W v) where the
// columns of B are the stored basis and W an optional diagonal weight.
void project_out_serial(const Mat& basis, int ncols, const RVec* weight, Vec& v);
void project_out_omp(const Mat& basis, int ncols, const RVec* weight, Vec& v);
void project_out(const Mat& basis, int ncols, const RVec* weight, Vec& v);

// Deterministic parallel map over ensemble samples: f(i) must write only to
// sample slot i. Results are identical for any worker count.
void ensemble_for(int n, const std::function<void(int)>& f);
void ensemble_for_serial(int n, const std::function<void(int)>& f);

}  // namespace krylov::par
