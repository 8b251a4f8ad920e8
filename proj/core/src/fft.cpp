#include "reconkit/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>

#include "reconkit/errors.hpp"

namespace reconkit {

size_t spectrum_size(const Grid& g) {
  const size_t half = size_t(g.n() / 2 + 1);
  return g.dim == 1 ? half : size_t(g.n()) * half;
}

namespace {

/* One set of aligned buffers plus plans for a grid. Plans are created with
   FFTW_ESTIMATE only: measured plans would make results depend on runtime
   timing, breaking byte-identical reruns. */
struct Workspace {
  Grid grid;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Workspace(const Grid& g) : grid(g) {
    const int n = g.n();
    real = fftw_alloc_real(g.size());
    cplx = fftw_alloc_complex(spectrum_size(g));
    if (!real || !cplx) fail(Errc::ResourceLimit, "fft buffer allocation failed");
    if (g.dim == 1) {
      fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
    } else {
      fwd = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
    }
    if (!fwd || !bwd) fail(Errc::ResourceLimit, "fft planning failed");
  }
  ~Workspace() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (cplx) fftw_free(cplx);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
};

/* The FFTW planner is not thread safe, and plans are cheap with ESTIMATE, so
   workspaces live in a freelist: concurrent callers each lease their own. */
class WorkspacePool {
 public:
  std::unique_ptr<Workspace> acquire(const Grid& g) {
    std::lock_guard<std::mutex> lock(mu_);
    auto& list = free_[{g.dim, g.L}];
    if (!list.empty()) {
      auto ws = std::move(list.back());
      list.pop_back();
      return ws;
    }
    return std::make_unique<Workspace>(g);
  }
  void release(std::unique_ptr<Workspace> ws) {
    std::lock_guard<std::mutex> lock(mu_);
    auto& list = free_[{ws->grid.dim, ws->grid.L}];
    if (list.size() < 32) list.push_back(std::move(ws));
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, std::vector<std::unique_ptr<Workspace>>> free_;
};

WorkspacePool& pool() {
  static WorkspacePool* p = new WorkspacePool;  // leaked: outlives static dtor order issues
  return *p;
}

struct Lease {
  std::unique_ptr<Workspace> ws;
  explicit Lease(const Grid& g) : ws(pool().acquire(g)) {}
  ~Lease() { pool().release(std::move(ws)); }
};

std::shared_ptr<const SpectrumData> compute_spectrum(const Field& f) {
  Lease lease(f.grid());
  Workspace& ws = *lease.ws;
  const auto& v = f.values();
  std::memcpy(ws.real, v.data(), v.size() * sizeof(double));
  fftw_execute(ws.fwd);
  auto out = std::make_shared<SpectrumData>();
  out->grid = f.grid();
  const size_t m = spectrum_size(f.grid());
  out->coef.resize(m);
  const double scale = 1.0 / double(f.grid().size());
  for (size_t p = 0; p < m; ++p)
    out->coef[p] = std::complex<double>(ws.cplx[p][0] * scale, ws.cplx[p][1] * scale);
  return out;
}

}  // namespace

std::shared_ptr<const SpectrumData> spectrum_of(const Field& f) {
  if (f.empty()) fail(Errc::InvalidArgument, "cannot transform an empty field");
  FieldCache* cell = f.cache();
  std::lock_guard<std::mutex> lock(cell->mu);
  if (cell->spectrum) return std::static_pointer_cast<const SpectrumData>(cell->spectrum);
  auto s = compute_spectrum(f);
  cell->spectrum = s;
  return s;
}

Field synthesize(const SpectrumData& s) {
  if (s.coef.size() != spectrum_size(s.grid)) fail(Errc::InvalidArgument, "spectrum size mismatch");
  Lease lease(s.grid);
  Workspace& ws = *lease.ws;
  for (size_t p = 0; p < s.coef.size(); ++p) {
    ws.cplx[p][0] = s.coef[p].real();
    ws.cplx[p][1] = s.coef[p].imag();
  }
  fftw_execute(ws.bwd);
  std::vector<double> out(s.grid.size());
  std::memcpy(out.data(), ws.real, out.size() * sizeof(double));
  return Field(s.grid, std::move(out));
}

Field apply_multiplier(const Field& f, const std::function<std::complex<double>(int, int)>& mult) {
  auto s = spectrum_of(f);
  SpectrumData scaled;
  scaled.grid = s->grid;
  scaled.coef.resize(s->coef.size());
  const int n = s->grid.n();
  if (s->grid.dim == 1) {
    for (int m = 0; m <= n / 2; ++m) scaled.coef[size_t(m)] = s->coef[size_t(m)] * mult(m, 0);
  } else {
    const int half = n / 2 + 1;
    for (int m0 = 0; m0 < n; ++m0) {
      const int x0 = signed_freq(m0, n);
      for (int m1 = 0; m1 < half; ++m1) {
        const size_t p = size_t(m0) * size_t(half) + size_t(m1);
        scaled.coef[p] = s->coef[p] * mult(x0, m1);
      }
    }
  }
  return synthesize(scaled);
}

Field apply_radial(const Field& f, const std::function<double(double)>& mult) {
  return apply_multiplier(f, [&](int x0, int x1) {
    return std::complex<double>(mult(std::sqrt(double(x0) * x0 + double(x1) * x1)), 0.0);
  });
}

Field derivative(const Field& f, int k0, int k1) {
  if (k0 < 0 || k1 < 0) fail(Errc::InvalidArgument, "derivative order must be nonnegative");
  if (f.grid().dim == 1 && k1 != 0) fail(Errc::InvalidArgument, "second axis absent on a 1d grid");
  if (k0 == 0 && k1 == 0) return f;
  const int nyq = f.grid().n() / 2;
  auto power = [](std::complex<double> base, int k) {
    std::complex<double> r(1.0, 0.0);
    for (int i = 0; i < k; ++i) r *= base;
    return r;
  };
  const double two_pi = 6.283185307179586476925286766559;
  return apply_multiplier(f, [&](int x0, int x1) -> std::complex<double> {
    if ((k0 % 2 == 1 && std::abs(x0) == nyq) || (k1 % 2 == 1 && std::abs(x1) == nyq))
      return {0.0, 0.0};
    return power({0.0, two_pi * x0}, k0) * power({0.0, two_pi * x1}, k1);
  });
}

Field convolve(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) fail(Errc::InvalidArgument, "convolution grids differ");
  auto sa = spectrum_of(a);
  auto sb = spectrum_of(b);
  SpectrumData prod;
  prod.grid = a.grid();
  prod.coef.resize(sa->coef.size());
  for (size_t p = 0; p < prod.coef.size(); ++p) prod.coef[p] = sa->coef[p] * sb->coef[p];
  return synthesize(prod);
}

}  // namespace reconkit
