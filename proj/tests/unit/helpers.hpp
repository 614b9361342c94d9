#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "advlcd/error.hpp"

namespace testutil {

/// Code of the advlcd::Error thrown by fn; records a failure if none is thrown.
inline advlcd::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const advlcd::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an advlcd::Error";
  return advlcd::ErrorCode::InvalidConfig;
}

}  // namespace testutil
