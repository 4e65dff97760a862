#pragma once

#include <stdexcept>
#include <string>

namespace logvol {

// Bad argument or parameter outside the mathematical domain.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class unsupported_order : public domain_error {
public:
    using domain_error::domain_error;
};

class combinatorial_limit : public domain_error {
public:
    using domain_error::domain_error;
};

// Malformed experiment or law configuration.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical procedure could not deliver a trustworthy value.
class numeric_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class quadrature_failure : public numeric_failure {
public:
    using numeric_failure::numeric_failure;
};

class sampler_failure : public numeric_failure {
public:
    using numeric_failure::numeric_failure;
};

class rank_deficient : public numeric_failure {
public:
    using numeric_failure::numeric_failure;
};

class instability_error : public numeric_failure {
public:
    using numeric_failure::numeric_failure;
};

class degenerate_variance : public numeric_failure {
public:
    using numeric_failure::numeric_failure;
};

}  // namespace logvol
