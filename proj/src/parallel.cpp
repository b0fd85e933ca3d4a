#include "krylov/parallel.hpp"

#include <atomic>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace krylov::par {

namespace {
std::atomic<bool> g_omp{true};
std::atomic<int> g_workers{0};
}  // namespace

void enable_openmp(bool on) { g_omp.store(on); }
bool openmp_enabled() { return g_omp.load(); }

int worker_count() {
#ifdef _OPENMP
  const int w = g_workers.load();
  return w > 0 ? w : omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_count(int n) {
  g_workers.store(n);
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#endif
}

void commutator_serial(const Mat& H, const Mat& X, Mat& out) {
  out.noalias() = H * X;
  out.noalias() -= X * H;
}

void commutator_omp(const Mat& H, const Mat& X, Mat& out) {
  const Eigen::Index d = H.rows();
  out.resize(d, d);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j0 = 0; j0 < d; j0 += 64) {
    const Eigen::Index w = std::min<Eigen::Index>(64, d - j0);
    out.middleCols(j0, w).noalias() = H * X.middleCols(j0, w);
    out.middleCols(j0, w).noalias() -= X * H.middleCols(j0, w);
  }
}

void commutator(const Mat& H, const Mat& X, Mat& out) {
  if (openmp_enabled() && H.rows() >= 128)
    commutator_omp(H, X, out);
  else
    commutator_serial(H, X, out);
}

void sandwich_add_serial(const cxd& c, const Mat& A, const Mat& X, const Mat& B, Mat& out) {
  out.noalias() += c * (A * X * B);
}

void sandwich_add_omp(const cxd& c, const Mat& A, const Mat& X, const Mat& B, Mat& out) {
  const Eigen::Index d = X.rows();
  Mat t(d, d);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j0 = 0; j0 < d; j0 += 64) {
    const Eigen::Index w = std::min<Eigen::Index>(64, d - j0);
    t.middleCols(j0, w).noalias() = A * (X * B.middleCols(j0, w));
  }
  out.noalias() += c * t;
}

void sandwich_add(const cxd& c, const Mat& A, const Mat& X, const Mat& B, Mat& out) {
  if (openmp_enabled() && X.rows() >= 128)
    sandwich_add_omp(c, A, X, B, out);
  else
    sandwich_add_serial(c, A, X, B, out);
}

void project_out_serial(const Mat& basis, int ncols, const RVec* weight, Vec& v) {
  if (ncols == 0) return;
  const auto B = basis.leftCols(ncols);
  Vec coeff(ncols);
  if (weight) {
    const Vec wv = weight->array() * v.array();
    coeff.noalias() = B.adjoint() * wv;
  } else {
    coeff.noalias() = B.adjoint() * v;
  }
  v.noalias() -= B * coeff;
}

void project_out_omp(const Mat& basis, int ncols, const RVec* weight, Vec& v) {
  if (ncols == 0) return;
  Vec coeff(ncols);
  const Vec wv = weight ? Vec(weight->array() * v.array()) : v;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < ncols; ++k) coeff[k] = basis.col(k).dot(wv);
  const Eigen::Index d = v.size();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i0 = 0; i0 < d; i0 += 4096) {
    const Eigen::Index w = std::min<Eigen::Index>(4096, d - i0);
    v.segment(i0, w).noalias() -= basis.middleRows(i0, w).leftCols(ncols) * coeff;
  }
}

void project_out(const Mat& basis, int ncols, const RVec* weight, Vec& v) {
  if (openmp_enabled() && v.size() >= 8192 && ncols >= 8)
    project_out_omp(basis, ncols, weight, v);
  else
    project_out_serial(basis, ncols, weight, v);
}

void ensemble_for_serial(int n, const std::function<void(int)>& f) {
  for (int i = 0; i < n; ++i) f(i);
}

void ensemble_for(int n, const std::function<void(int)>& f) {
  if (!openmp_enabled()) {
    ensemble_for_serial(n, f);
    return;
  }
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) f(i);
}

}  // namespace krylov::par
