#include "reconkit/field.hpp"

#include <cmath>
#include <functional>

namespace reconkit {

Field::Field(Grid g, std::vector<double> values) : grid_(g) {
  if (values.size() != g.size()) fail(Errc::InvalidArgument, "field size does not match grid");
  data_ = std::make_shared<const std::vector<double>>(std::move(values));
  cache_ = std::make_shared<FieldCache>();
}

Field Field::zeros(Grid g) { return Field(g, std::vector<double>(g.size(), 0.0)); }
Field Field::constant(Grid g, double c) { return Field(g, std::vector<double>(g.size(), c)); }

const std::vector<double>& Field::values() const {
  if (!data_) fail(Errc::InvalidArgument, "empty field");
  return *data_;
}

namespace {
Field zip(const Field& a, const Field& b, double (*op)(double, double)) {
  if (a.grid() != b.grid()) fail(Errc::InvalidArgument, "field grids differ");
  std::vector<double> out(a.size());
  const auto& va = a.values();
  const auto& vb = b.values();
  for (size_t p = 0; p < out.size(); ++p) out[p] = op(va[p], vb[p]);
  return Field(a.grid(), std::move(out));
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
  return zip(a, b, +[](double x, double y) { return x + y; });
}
Field operator-(const Field& a, const Field& b) {
  return zip(a, b, +[](double x, double y) { return x - y; });
}
Field operator*(const Field& a, const Field& b) {
  return zip(a, b, +[](double x, double y) { return x * y; });
}
Field operator*(double c, const Field& a) {
  std::vector<double> out(a.size());
  const auto& va = a.values();
  for (size_t p = 0; p < out.size(); ++p) out[p] = c * va[p];
  return Field(a.grid(), std::move(out));
}
Field operator+(const Field& a, double c) {
  std::vector<double> out(a.size());
  const auto& va = a.values();
  for (size_t p = 0; p < out.size(); ++p) out[p] = va[p] + c;
  return Field(a.grid(), std::move(out));
}

double linf(const Field& a) {
  double m = 0;
  for (double v : a.values()) m = std::max(m, std::fabs(v));
  return m;
}

double linf_diff(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) fail(Errc::InvalidArgument, "field grids differ");
  double m = 0;
  const auto& va = a.values();
  const auto& vb = b.values();
  for (size_t p = 0; p < va.size(); ++p) m = std::max(m, std::fabs(va[p] - vb[p]));
  return m;
}

double mean(const Field& a) {
  double s = 0;
  for (double v : a.values()) s += v;
  return s / double(a.size());
}

Field sample(Grid g, const std::function<double(double)>& f) {
  if (g.dim != 1) fail(Errc::InvalidArgument, "one-argument sampling needs a 1d grid");
  std::vector<double> out(g.size());
  for (size_t p = 0; p < out.size(); ++p) out[p] = f(g.x0(p));
  return Field(g, std::move(out));
}

Field sample2(Grid g, const std::function<double(double, double)>& f) {
  std::vector<double> out(g.size());
  for (size_t p = 0; p < out.size(); ++p) out[p] = f(g.x0(p), g.x1(p));
  return Field(g, std::move(out));
}

}  // namespace reconkit
