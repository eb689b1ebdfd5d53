#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geocon {

enum class ErrorKind {
  invalid_argument,
  degenerate_subspace,
  null_direction,
  pole,
  degenerate_metric,
  null_normal,
  singular_parallel,
  not_weingarten,
  excluded_case,
  singular_family,
  not_lagrangian,
  unsupported_dimension,
  undefined_form,
  empty_space,
  domain,
  parse,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::degenerate_subspace: return "degenerate-subspace";
    case ErrorKind::null_direction: return "null-direction";
    case ErrorKind::pole: return "pole";
    case ErrorKind::degenerate_metric: return "degenerate-metric";
    case ErrorKind::null_normal: return "null-normal";
    case ErrorKind::singular_parallel: return "singular-parallel";
    case ErrorKind::not_weingarten: return "not-weingarten";
    case ErrorKind::excluded_case: return "excluded-case";
    case ErrorKind::singular_family: return "singular-family";
    case ErrorKind::not_lagrangian: return "not-lagrangian";
    case ErrorKind::unsupported_dimension: return "unsupported-dimension";
    case ErrorKind::undefined_form: return "undefined-second-fundamental-form";
    case ErrorKind::empty_space: return "empty-space";
    case ErrorKind::domain: return "domain";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

class GeoError : public std::runtime_error {
 public:
  GeoError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace geocon
