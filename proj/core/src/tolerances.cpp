#include "reconkit/tolerances.hpp"

#include <cstdlib>

#include "reconkit/errors.hpp"

namespace reconkit {

Tolerances Tolerances::defaults() {
  Tolerances t;
  t.m_ = {
      {"bony-identity", 1e-11},       // relative, product decomposition resumming
      {"calculus-exact", 1e-10},      // grid-exact identities of the block calculus
      {"bracket-truth", 1e-10},       // closed-form bracket ground truths
      {"bracket-assembly", 1e-9},     // recursion vs corrector-series assembly
      {"reconstruct-poly", 1e-6},     // reconstruction identity on polynomial lifts
      {"roundtrip-bracket", 1e-10},   // bracket data recovered after round trip
      {"roundtrip-model", 1e-9},      // model fields recovered after round trip
      {"admissible-commute", 1e-9},   // kernel integration against the model pairing
      {"admissible-usual", 1e-6},     // chart-localized expansion bounds
      {"slope-slack", 0.2},           // allowed defect of measured decay exponents
      {"linearity-factor", 2.0},      // small-perturbation response ratio band
  };
  return t;
}

double Tolerances::get(const std::string& key) const {
  auto it = m_.find(key);
  if (it == m_.end()) fail(Errc::InvalidArgument, "unknown tolerance key: " + key);
  return it->second;
}

void Tolerances::set(const std::string& key, double value) {
  auto it = m_.find(key);
  if (it == m_.end()) fail(Errc::InvalidArgument, "unknown tolerance key: " + key);
  if (!(value > 0)) fail(Errc::InvalidArgument, "tolerance must be positive: " + key);
  it->second = value;
}

void Tolerances::apply_override(const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos) fail(Errc::InvalidArgument, "tolerance override needs KEY=VALUE");
  const std::string key = spec.substr(0, eq);
  char* end = nullptr;
  double v = std::strtod(spec.c_str() + eq + 1, &end);
  if (end == spec.c_str() + eq + 1 || *end != '\0')
    fail(Errc::InvalidArgument, "bad tolerance value in: " + spec);
  set(key, v);
}

}  // namespace reconkit
