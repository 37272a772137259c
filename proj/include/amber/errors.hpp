#ifndef AMBER_ERRORS_HPP
#define AMBER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace amber {

// Thrown when an evaluation point sits on a non-integrable divergence
// (e.g. the chi-squared density with one degree of freedom at the origin).
class divergent_point_error : public std::domain_error {
public:
    explicit divergent_point_error(const std::string& what)
        : std::domain_error(what) {}
};

// Thrown when a likelihood-ratio threshold does not exist or is not unique,
// notably for identical conditional densities (mu == nu).
class no_unique_threshold_error : public std::domain_error {
public:
    explicit no_unique_threshold_error(const std::string& what)
        : std::domain_error(what) {}
};

// Thrown when a closed-form approximation leaves its validity region
// (negative radicand and similar).
class approximation_invalid_error : public std::domain_error {
public:
    explicit approximation_invalid_error(const std::string& what)
        : std::domain_error(what) {}
};

// Thrown by iterative schemes (quadrature, bracketing, series) that fail
// to reach the requested tolerance.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace amber

#endif
