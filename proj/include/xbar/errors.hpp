#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xbar {

/// Base for every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// Internal node of a selector/resistor pair could not be balanced.
class SeriesSolveFailure : public Error {
public:
    SeriesSolveFailure(double voltage, double residual)
        : Error("series selector solve failed at v=" + std::to_string(voltage) +
                " (residual " + std::to_string(residual) + " A)"),
          voltage_(voltage), residual_(residual) {}

    double voltage() const noexcept { return voltage_; }
    double residual() const noexcept { return residual_; }

private:
    double voltage_;
    double residual_;
};

class NonConvergence : public Error {
public:
    NonConvergence(std::size_t iterations, double residual)
        : Error("Newton iteration did not converge after " + std::to_string(iterations) +
                " iterations (KCL residual " + std::to_string(residual) + " A)"),
          iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

/// A read solve failed; carries which target state was being solved.
class ReadFailure : public Error {
public:
    ReadFailure(bool target_lrs, const std::string& what)
        : Error(std::string(target_lrs ? "LRS" : "HRS") + " target solve: " + what),
          target_lrs_(target_lrs) {}

    bool target_lrs() const noexcept { return target_lrs_; }

private:
    bool target_lrs_;
};

/// Config file or command-line value problem, with location.
class ConfigError : public Error {
public:
    ConfigError(std::string path, std::size_t line, std::string key, const std::string& msg)
        : Error(path + (line > 0 ? ":" + std::to_string(line) : "") + ": " + (key.empty() ? "" : "'" + key + "': ") + msg),
          path_(std::move(path)), line_(line), key_(std::move(key)) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::string path_;
    std::size_t line_;
    std::string key_;
};

} // namespace xbar
