#pragma once

#include <stdexcept>
#include <string>

namespace vpmap {

// Error taxonomy shared by the library and the CLI exit-code mapping.
enum class ErrorCode {
    parse,                 // malformed input text (line-level)
    validation,            // structurally valid input violating a contract
    size,                  // dimension too small / over the configured cap
    domain,                // argument outside an open-interval domain
    elicitation,           // inadmissible prior elicitation pair
    numerical,             // bracketing / convergence / non-finite failure
    degenerate_structure,  // structure matrix with no usable pseudo-inverse
    constraint_violation,  // latent value outside its constrained subspace
    support_mismatch,      // singular covariances with different supports
    config,                // run configuration rejected by the schema
    data,                  // dataset/graph file problems
    io,                    // filesystem failures
    init                   // non-finite log-posterior at initialization
};

class VpError : public std::runtime_error {
  public:
    VpError(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw VpError(code, msg);
}

} // namespace vpmap
