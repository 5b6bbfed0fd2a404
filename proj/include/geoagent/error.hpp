// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geoagent {

/// Failure codes raised by every module. Tool dispatch maps these onto the
/// error taxonomy, so adding a code means deciding its class in
/// classify() (src/tools/registry.cpp) as well.
enum class Errc {
    // files and layout
    MissingFile,
    MissingDirectory,
    UnsupportedLayout,
    CorruptFile,
    PathEscapesWorkspace,
    WriteFailure,
    WrongDtype,
    // shapes and inputs
    ShapeMismatch,
    MissingBandRole,
    BandOutOfRange,
    MultiBandInput,
    NonBinaryInput,
    EmptyBatch,
    EmptyList,
    EmptySelection,
    PairCountMismatch,
    ConditionBandMissing,
    InvalidArgument,
    // numerics
    DegenerateRange,
    InsufficientBins,
    DegenerateSeries,
    TooShort,
    PeriodTooLong,
    ZeroVariance,
    ZeroMean,
    DivisionByZero,
    ZeroBase,
    // perception adapters
    UnsupportedTask,
    EndpointUnreachable,
    // registry and serialization
    DuplicateName,
    SchemaError,
    Internal,
    // agent loop and evaluation
    MalformedModelOutput,
    PolicyUnreachable,
    EmptyInput,
    MissingAnswer,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Error(Errc code, const std::string& message, std::size_t item_index)
        : std::runtime_error("item " + std::to_string(item_index) + ": " + message),
          code_(code), item_index_(item_index) {}

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> item_index() const noexcept { return item_index_; }

private:
    Errc code_;
    std::optional<std::size_t> item_index_;
};

/// Re-throws `e` tagged with the batch position it came from.
[[noreturn]] inline void rethrow_with_index(const Error& e, std::size_t index) {
    throw Error(e.code(), e.what(), index);
}

} // namespace geoagent
