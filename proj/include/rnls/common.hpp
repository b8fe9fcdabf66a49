#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnls {

using cd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Thrown on any precondition violation; CLI maps it to exit code 1.
struct contract_error : std::runtime_error {
  explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw contract_error(what);
}

}  // namespace rnls
