#pragma once

#include <stdexcept>
#include <string>

namespace pwe {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ResolutionError : public Error { using Error::Error; };
class CycleError : public Error { using Error::Error; };
class TypeError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class SingleAssignmentError : public Error { using Error::Error; };
class UnsupportedError : public Error { using Error::Error; };
class InternalError : public Error { using Error::Error; };

// Parse failures keep the position so drivers can print file:line:col.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, int line, int col)
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          message(msg), line(line), col(col) {}
    std::string message;
    int line;
    int col;
};

}  // namespace pwe
