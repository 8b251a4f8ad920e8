#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "reconkit/grid.hpp"

namespace reconkit {

/* Lazily filled by the spectral layer (which knows the concrete type) and
   shared between copies of a field, so transforming the same data twice costs
   one FFT. */
struct FieldCache {
  std::mutex mu;
  std::shared_ptr<const void> spectrum;
};

/* Immutable real scalar field sampled on a Grid. Copies share the buffer, so
   fields are cheap to pass around and cache. */
class Field {
 public:
  Field() = default;
  Field(Grid g, std::vector<double> values);

  static Field zeros(Grid g);
  static Field constant(Grid g, double c);

  const Grid& grid() const { return grid_; }
  bool empty() const { return data_ == nullptr; }
  size_t size() const { return data_ ? data_->size() : 0; }
  double operator[](size_t p) const { return (*data_)[p]; }
  const std::vector<double>& values() const;

  /* flat index access by grid coordinates (wrapped) */
  double at(int i) const { return (*data_)[grid_.at(i)]; }
  double at(int i, int j) const { return (*data_)[grid_.at(i, j)]; }

  FieldCache* cache() const { return cache_.get(); }

 private:
  Grid grid_;
  std::shared_ptr<const std::vector<double>> data_;
  std::shared_ptr<FieldCache> cache_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);  // pointwise
Field operator*(double c, const Field& a);
Field operator+(const Field& a, double c);

double linf(const Field& a);
double linf_diff(const Field& a, const Field& b);
double mean(const Field& a);

/* Samples f(x) (one argument per axis) on the grid. */
Field sample(Grid g, const std::function<double(double)>& f);
Field sample2(Grid g, const std::function<double(double, double)>& f);

}  // namespace reconkit
