#include "krylov/io.hpp"

#include <cstring>
#include <fstream>

namespace krylov::io {

namespace {
constexpr char kMagic[8] = {'K', 'R', 'Y', 'M', 'A', 'T', '1', '\n'};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_operator(const std::filesystem::path& path, const Mat& A, const std::string& tag,
                    bool binary) {
  const auto d = static_cast<std::uint64_t>(A.rows());
  if (A.cols() != A.rows()) throw DimensionError("write_operator: square matrix required");
  if (binary) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_operator: cannot open " + path.string());
    f.write(kMagic, sizeof(kMagic));
    f.write(reinterpret_cast<const char*>(&d), sizeof(d));
    const auto tl = static_cast<std::uint32_t>(tag.size());
    f.write(reinterpret_cast<const char*>(&tl), sizeof(tl));
    f.write(tag.data(), tl);
    for (std::uint64_t i = 0; i < d; ++i)
      for (std::uint64_t j = 0; j < d; ++j) {
        const double re = A(i, j).real(), im = A(i, j).imag();
        f.write(reinterpret_cast<const char*>(&re), sizeof(re));
        f.write(reinterpret_cast<const char*>(&im), sizeof(im));
      }
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_operator: cannot open " + path.string());
  f << "# dim=" << d << " tag=" << tag << "\n";
  for (std::uint64_t i = 0; i < d; ++i)
    for (std::uint64_t j = 0; j < d; ++j)
      f << format_double(A(i, j).real()) << "," << format_double(A(i, j).imag()) << "\n";
}

Mat read_operator(const std::filesystem::path& path, std::string* tag) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_operator: cannot open " + path.string());
  char magic[8];
  f.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) == 0) {
    std::uint64_t d = 0;
    std::uint32_t tl = 0;
    f.read(reinterpret_cast<char*>(&d), sizeof(d));
    f.read(reinterpret_cast<char*>(&tl), sizeof(tl));
    std::string t(tl, '\0');
    f.read(t.data(), tl);
    if (tag) *tag = t;
    Mat A(d, d);
    for (std::uint64_t i = 0; i < d; ++i)
      for (std::uint64_t j = 0; j < d; ++j) {
        double re, im;
        f.read(reinterpret_cast<char*>(&re), sizeof(re));
        f.read(reinterpret_cast<char*>(&im), sizeof(im));
        A(i, j) = cxd(re, im);
      }
    if (!f) throw std::runtime_error("read_operator: truncated file");
    return A;
  }
  // CSV fallback
  f.close();
  std::ifstream g(path);
  std::string line;
  std::getline(g, line);
  std::uint64_t d = 0;
  if (std::sscanf(line.c_str(), "# dim=%lu", &d) != 1)
    throw std::runtime_error("read_operator: bad header");
  if (tag) {
    const auto pos = line.find("tag=");
    *tag = pos == std::string::npos ? "" : line.substr(pos + 4);
  }
  Mat A(d, d);
  for (std::uint64_t i = 0; i < d; ++i)
    for (std::uint64_t j = 0; j < d; ++j) {
      std::getline(g, line);
      double re, im;
      if (std::sscanf(line.c_str(), "%lf,%lf", &re, &im) != 2)
        throw std::runtime_error("read_operator: bad row");
      A(i, j) = cxd(re, im);
    }
  return A;
}

void write_coefficients(const std::filesystem::path& path, const Vec& a, const RVec& b,
                        const RVec& c) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_coefficients: cannot open " + path.string());
  f << "n,a_re,a_im,b,c\n";
  const Eigen::Index n = std::max<Eigen::Index>(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    f << i;
    if (i < a.size())
      f << "," << format_double(a[i].real()) << "," << format_double(a[i].imag());
    else
      f << ",,";
    f << "," << (i >= 1 && i - 1 < b.size() ? format_double(b[i - 1]) : "");
    f << "," << (i >= 1 && i - 1 < c.size() ? format_double(c[i - 1]) : "");
    f << "\n";
  }
}

void write_coefficients(const std::filesystem::path& path, const LanczosResult& r) {
  Vec a = r.a.cast<cxd>();
  write_coefficients(path, a, r.b, r.b);
}

void write_coefficients(const std::filesystem::path& path, const BiLanczosResult& r) {
  write_coefficients(path, r.a, r.b, r.c);
}

void write_trace(const std::filesystem::path& path, const ComplexityTrace& tr) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trace: cannot open " + path.string());
  f << "t,K,varK,S,Z,kappa3,kappa4\n";
  for (Eigen::Index j = 0; j < tr.t.size(); ++j) {
    f << format_double(tr.t[j]) << "," << format_double(tr.K[j]) << ","
      << format_double(tr.varK[j]);
    f << "," << (j < tr.S.size() ? format_double(tr.S[j]) : "");
    f << "," << (j < tr.Z.size() ? format_double(tr.Z[j]) : "");
    f << "," << (j < tr.kappa3.size() ? format_double(tr.kappa3[j]) : "");
    f << "," << (j < tr.kappa4.size() ? format_double(tr.kappa4[j]) : "");
    f << "\n";
  }
}

void write_wavefunction(const std::filesystem::path& path, const KrylovWavefunction& wf) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_wavefunction: cannot open " + path.string());
  f << "t,n,re,im\n";
  for (Eigen::Index j = 0; j < wf.t.size(); ++j)
    for (Eigen::Index n = 0; n < wf.amp.rows(); ++n)
      f << format_double(wf.t[j]) << "," << n << "," << format_double(wf.amp(n, j).real())
        << "," << format_double(wf.amp(n, j).imag()) << "\n";
}

void write_series(const std::filesystem::path& path, const std::string& header,
                  const std::vector<RVec>& columns) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_series: cannot open " + path.string());
  f << header << "\n";
  if (columns.empty()) return;
  const Eigen::Index rows = columns[0].size();
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (size_t c = 0; c < columns.size(); ++c) {
      if (c) f << ",";
      if (i < columns[c].size()) f << format_double(columns[c][i]);
    }
    f << "\n";
  }
}

}  // namespace krylov::io
