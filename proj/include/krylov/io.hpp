#pragma once

#include <filesystem>
#include <string>

#include "krylov/lattice.hpp"
#include "krylov/tridiag.hpp"
#include "krylov/types.hpp"

namespace krylov::io {

// Dense operator file format, binary:
//   magic "KRYMAT1\n", uint64 dim, uint32 tag length, tag bytes,
//   then dim*dim complex entries, row-major, interleaved re/im doubles.
// The CSV variant writes "# dim=<d> tag=<tag>" then one "re,im" pair per line.
void write_operator(const std::filesystem::path& path, const Mat& A, const std::string& tag,
                    bool binary = true);
Mat read_operator(const std::filesystem::path& path, std::string* tag = nullptr);

// Coefficient table: columns n, a_re, a_im, b, c.
void write_coefficients(const std::filesystem::path& path, const Vec& a, const RVec& b,
                        const RVec& c);
void write_coefficients(const std::filesystem::path& path, const LanczosResult& r);
void write_coefficients(const std::filesystem::path& path, const BiLanczosResult& r);

// ComplexityTrace: t, K, varK, S, Z, kappa3, kappa4.
void write_trace(const std::filesystem::path& path, const ComplexityTrace& tr);

// Wavefunction snapshots: t, n, re, im.
void write_wavefunction(const std::filesystem::path& path, const KrylovWavefunction& wf);

// Generic one-series and multi-column tables.
void write_series(const std::filesystem::path& path, const std::string& header,
                  const std::vector<RVec>& columns);

std::string format_double(double v);

}  // namespace krylov::io
