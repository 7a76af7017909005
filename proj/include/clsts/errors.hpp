#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clsts {

/// Malformed content inside an otherwise readable file (bad field count,
/// non-numeric value, ...). Carries the 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally invalid file: bad header, inconsistent dimensions, empty input.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument values or degenerate numeric state (zero-norm vector,
/// dimension mismatch, empty test set, ...).
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sentence had no in-vocabulary tokens left, so no score is defined.
/// Callers that want a "no evidence of similarity" floor map this to 0.
class empty_input_error : public std::runtime_error {
public:
    empty_input_error(const std::string& what, std::size_t oov_source,
                      std::size_t oov_target)
        : std::runtime_error(what + " (oov_source=" + std::to_string(oov_source) +
                             ", oov_target=" + std::to_string(oov_target) + ")"),
          oov_source_(oov_source),
          oov_target_(oov_target) {}

    std::size_t oov_source() const noexcept { return oov_source_; }
    std::size_t oov_target() const noexcept { return oov_target_; }

private:
    std::size_t oov_source_;
    std::size_t oov_target_;
};

/// Stochastic training produced a non-finite loss or gradient.
class optimization_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace clsts
