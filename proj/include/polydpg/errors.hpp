#ifndef POLYDPG_ERRORS_HPP
#define POLYDPG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polydpg {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidPolygon : public Error {
public:
  explicit InvalidPolygon(const std::string& msg) : Error("invalid polygon: " + msg) {}
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line)
      : Error("parse error at line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

class TopologyError : public Error {
public:
  explicit TopologyError(const std::string& msg) : Error("mesh topology: " + msg) {}
};

class InvalidCut : public Error {
public:
  explicit InvalidCut(const std::string& msg) : Error("invalid cut: " + msg) {}
};

class ConcaveRefineUnsupported : public Error {
public:
  explicit ConcaveRefineUnsupported(int elem)
      : Error("refinement of concave element " + std::to_string(elem) + " is not supported") {}
};

class IllConditionedBasis : public Error {
public:
  explicit IllConditionedBasis(const std::string& msg) : Error("ill-conditioned basis: " + msg) {}
};

class SingularInteriorBlock : public Error {
public:
  explicit SingularInteriorBlock(int elem)
      : Error("interior block of element " + std::to_string(elem) +
              " is singular (test space too small or degenerate element)") {}
};

class NotSPD : public Error {
public:
  explicit NotSPD(const std::string& msg) : Error("matrix not SPD: " + msg) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

}  // namespace polydpg

#endif
