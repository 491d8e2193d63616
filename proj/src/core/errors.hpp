#pragma once

#include <stdexcept>
#include <string>

namespace exhurst {

// Mirrors the exh_status codes of the public C API (capi.cpp owns the mapping).
enum class ErrorCode {
  invalid_argument,
  domain,           // parameter outside its mathematical domain (H, p, sigma, ...)
  embedding,        // circulant embedding produced a significantly negative eigenvalue
  short_series,     // series shorter than the filter support requires
  degenerate_scale, // nonpositive per-scale statistic, log regression undefined
  unknown_name,     // unrecognized filter/transform/method name
  io,
  parse,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace exhurst
