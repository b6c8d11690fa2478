#pragma once

#include <stdexcept>
#include <string>

namespace mkin {

//! Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public Error { using Error::Error; };
class ContractError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class ModelError : public Error { using Error::Error; };
class TopologyError : public Error { using Error::Error; };
class SolveError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace mkin
