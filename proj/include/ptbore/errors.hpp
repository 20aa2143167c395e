#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ptbore {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Rotation axis between two antipodal directions is undefined.
class AntipodalInput : public Error {
public:
  using Error::Error;
};

class DegenerateMatrix : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class HypothesisViolated : public Error {
public:
  using Error::Error;
};

// A state entered an epsilon-augmented forbidden zone.
class BoundaryViolation : public Error {
public:
  BoundaryViolation(const std::string& what, int zone = -1)
      : Error(what), zone_(zone) {}
  int zone() const { return zone_; }

private:
  int zone_;
};

class NoSolution : public Error {
public:
  using Error::Error;
};

class NonFiniteState : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Safe-tube barrier left its domain (xi >= 1).
class TubeBreach : public Error {
public:
  TubeBreach(const std::string& what, double xi) : Error(what), xi_(xi) {}
  double xi() const { return xi_; }

private:
  double xi_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& field, int line, const std::string& detail)
      : Error(format(field, line, detail)), field_(field), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

private:
  static std::string format(const std::string& field, int line,
                            const std::string& detail) {
    std::string msg = "parse error";
    if (line >= 0) msg += " at line " + std::to_string(line + 1);
    if (!field.empty()) msg += " (field '" + field + "')";
    return msg + ": " + detail;
  }

  std::string field_;
  int line_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> clauses)
      : Error(join(clauses)), clauses_(std::move(clauses)) {}
  const std::vector<std::string>& clauses() const { return clauses_; }

private:
  static std::string join(const std::vector<std::string>& clauses) {
    std::string msg = "validation failed:";
    for (const auto& c : clauses) msg += "\n  - " + c;
    return msg;
  }

  std::vector<std::string> clauses_;
};

}  // namespace ptbore
