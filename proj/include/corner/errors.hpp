#pragma once

#include <stdexcept>
#include <string>

namespace corner {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite input or a point that belongs to no region.
class InvalidPointError : public Error { public: using Error::Error; };
/// An affine system with no unique fixed point (eigenvalue 1).
class NoFixedPointError : public Error { public: using Error::Error; };
class NonInvertibleError : public Error { public: using Error::Error; };
/// Root-finding bracket without a sign change.
class BracketError : public Error { public: using Error::Error; };
class EscapeError : public Error { public: using Error::Error; };
/// An iteration or growth budget ran out before the requested event.
class BudgetError : public Error { public: using Error::Error; };
class NonObservableError : public Error { public: using Error::Error; };
class GenericityError : public Error { public: using Error::Error; };
class PreconditionError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace corner
