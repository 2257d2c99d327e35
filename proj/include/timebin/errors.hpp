// Copyright timebin contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace timebin {

/// A physical or configuration parameter outside its admissible range.
class InvalidParameter : public std::invalid_argument {
  public:
    InvalidParameter(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// A root finder was asked for a target the model cannot reach.
class TargetUnreachable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Integration grid violates the resolution or span requirements.
class GridTooCoarse : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Fringe extrema both vanish, so visibility is undefined.
class DegenerateFringe : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

} // namespace timebin
