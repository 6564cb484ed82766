#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cook {

// Base class for everything thrown by this library. Catching cook::Error at
// the CLI boundary is what separates "tool failed" (exit 1) from a crash.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A symbol resolved to an error stub (or is missing from the hook table).
class UnhookedSymbolError : public Error {
public:
    explicit UnhookedSymbolError(const std::string& symbol)
        : Error("unhooked symbol called: " + symbol), symbol_(symbol) {}
    const std::string& symbol() const { return symbol_; }

private:
    std::string symbol_;
};

// Kernel launch with an out-of-range grid (threads per block outside 1..1024
// or a non-positive block count).
class GridError : public Error {
public:
    using Error::Error;
};

// Interface definition file could not be parsed. Carries the 1-based line
// number of the offending declaration.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Hook configuration references something that does not exist (unknown
// template id, bad directive, invalid timing value...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Exported symbol set not fully covered when assembling a hook library.
class CoverageError : public Error {
public:
    explicit CoverageError(const std::string& what, std::vector<std::string> missing)
        : Error(what), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

// Export list contained no symbols at all.
class EmptyInterfaceError : public Error {
public:
    using Error::Error;
};

// GPU lock released by an application that does not own it.
class LockProtocolError : public Error {
public:
    using Error::Error;
};

// Deferred launch of a kernel that was never registered.
class UnknownKernelError : public Error {
public:
    explicit UnknownKernelError(int kernel)
        : Error("launch of unregistered kernel id " + std::to_string(kernel)) {}
};

// Re-registration of a kernel id with a different name or argument layout.
class RegistryConflictError : public Error {
public:
    using Error::Error;
};

// Argument blob does not match the registered layout of the kernel.
class ArgLayoutError : public Error {
public:
    using Error::Error;
};

// Metric computation over an empty or degenerate input.
class MetricsError : public Error {
public:
    using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// The simulation exceeded its event budget or ended with host contexts
// still parked. Either one means the run did not complete.
class SimError : public Error {
public:
    using Error::Error;
};

}  // namespace cook
