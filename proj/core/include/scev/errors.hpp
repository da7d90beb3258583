#pragma once

#include <stdexcept>
#include <string>

namespace scev {

// Every failure the library reports, as a stable code plus a human message.
enum class Errc {
    conflicting_constraints,
    unknown_object,
    degenerate_input,
    missing_seed_class,
    invalid_seed_class,
    infeasible_assignment,
    zero_vector,
    length_mismatch,
    too_large,
    unmapped_label,
    index_out_of_range,
    all_zero_weights,
    too_few_objects,
    parse_error,
    non_numeric_feature,
    duplicate_id,
    ragged_rows,
    empty_column,
    invalid_argument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code),
          detail_(message) {}

    Errc code() const { return code_; }
    // Message without the code prefix; used when rewrapping with a stage tag.
    const std::string& detail() const { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace scev
