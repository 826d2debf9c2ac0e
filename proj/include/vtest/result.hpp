#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace vtest {

enum class Method { permutation, chi_square, normal, bootstrap, tracy_widom };

const char* method_name(Method m);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Method method = Method::permutation;
  std::optional<std::int64_t> resamples;
  std::optional<std::uint64_t> seed;
  double elapsed_ms = 0.0;
};

}  // namespace vtest
