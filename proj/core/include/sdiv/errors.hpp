#pragma once

#include <stdexcept>
#include <string>

namespace sdiv {

// Parameter or argument outside its mathematical domain (theta outside the
// open parameter space, x below the support origin, invalid alpha, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The requested divergence value does not exist for the given pair of
// densities: a cell with zero mass meets a negative (or zero-limit) exponent.
// Rendered downstream as "--".
class undefined_divergence : public std::runtime_error {
public:
    undefined_divergence(const std::string& what, long long cell)
        : std::runtime_error(what), cell_(cell) {}
    long long cell() const noexcept { return cell_; }

private:
    long long cell_;
};

// Support truncation hit the hard cap before reaching the mass tolerance.
class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& what, double achieved_mass)
        : std::runtime_error(what), achieved_mass_(achieved_mass) {}
    double achieved_mass() const noexcept { return achieved_mass_; }

private:
    double achieved_mass_;
};

// No solver seed converged; carries the per-seed trace for diagnostics.
class nonconvergence_error : public std::runtime_error {
public:
    nonconvergence_error(const std::string& what, std::string trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::string& trace() const noexcept { return trace_; }

private:
    std::string trace_;
};

// J <= 0: the sandwich variance is not defined.
class degenerate_information_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input file could not be parsed; carries the 1-based offending line.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, long long line)
        : std::runtime_error(what), line_(line) {}
    long long line() const noexcept { return line_; }

private:
    long long line_;
};

} // namespace sdiv
