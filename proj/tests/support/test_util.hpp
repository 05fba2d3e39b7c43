#pragma once

#include <cmath>
#include <utility>

#include "doctest.h"
#include "flatbp/error.hpp"

namespace flatbp::testsupport {

// Runs fn, expecting it to throw Error; returns the carried code.
template <typename Fn>
ErrorCode error_code_of(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a flatbp::Error to be thrown");
  return ErrorCode::configuration_error;
}

inline bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace flatbp::testsupport
