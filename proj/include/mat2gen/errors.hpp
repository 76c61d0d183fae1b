#pragma once

#include <stdexcept>
#include <string>

namespace mat2gen {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation needs a backend it was not given (eigen-decomposition on exact data).
class unsupported_backend : public error {
 public:
  explicit unsupported_backend(const std::string& what)
      : error("unsupported backend: " + what) {}
};

// The span test and the common-eigenline test disagree.
class inconsistent_classification : public error {
 public:
  using error::error;
};

class not_traceless : public error {
 public:
  using error::error;
};

class wrong_arity : public error {
 public:
  using error::error;
};

class singular_conjugator : public error {
 public:
  using error::error;
};

class no_exact_realization : public error {
 public:
  using error::error;
};

class on_quadric : public error {
 public:
  using error::error;
};

class invalid_point : public error {
 public:
  using error::error;
};

class scalar_base : public error {
 public:
  using error::error;
};

class margin_violation : public error {
 public:
  using error::error;
};

class wrong_stratum : public error {
 public:
  using error::error;
};

class line_outside_chart : public error {
 public:
  using error::error;
};

class not_unit_modulus : public error {
 public:
  using error::error;
};

class not_on_sphere : public error {
 public:
  using error::error;
};

// Malformed tuple document; the message carries the position or JSON path.
class document_error : public error {
 public:
  using error::error;
};

}  // namespace mat2gen
