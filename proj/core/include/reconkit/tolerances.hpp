#pragma once

#include <map>
#include <string>

namespace reconkit {

/* Named numeric tolerances used by the CLI-facing checks. Keys are fixed at
   the defaults table; overrides of unknown keys are rejected so typos fail
   loudly rather than silently loosening a check. */
class Tolerances {
 public:
  static Tolerances defaults();

  double get(const std::string& key) const;
  void set(const std::string& key, double value);
  /* "KEY=VALUE" as accepted on the command line */
  void apply_override(const std::string& spec);
  const std::map<std::string, double>& all() const { return m_; }

 private:
  std::map<std::string, double> m_;
};

}  // namespace reconkit
