#pragma once

#include <stdexcept>
#include <string>

namespace pfpn {

/// Classifies failures so front-ends can map them to stable exit codes.
enum class errc {
    bad_input,        // malformed document, unknown name, invariant violation
    property_false,   // a checked property does not hold (not live, not Pi^2, ...)
    budget_exceeded,  // an exploration budget was hit where completeness is required
    internal,         // numeric overflow or inconsistency that should not occur
};

class error : public std::runtime_error {
public:
    error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    errc kind() const noexcept { return kind_; }

private:
    errc kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw error(errc::bad_input, msg); }
[[noreturn]] inline void fail_property(const std::string& msg) { throw error(errc::property_false, msg); }
[[noreturn]] inline void fail_budget(const std::string& msg) { throw error(errc::budget_exceeded, msg); }
[[noreturn]] inline void fail_internal(const std::string& msg) { throw error(errc::internal, msg); }

} // namespace pfpn
