// SPDX-License-Identifier: Apache-2.0
#include "geoagent/error.hpp"

namespace geoagent {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::MissingDirectory: return "MissingDirectory";
    case Errc::UnsupportedLayout: return "UnsupportedLayout";
    case Errc::CorruptFile: return "CorruptFile";
    case Errc::PathEscapesWorkspace: return "PathEscapesWorkspace";
    case Errc::WriteFailure: return "WriteFailure";
    case Errc::WrongDtype: return "WrongDtype";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::MissingBandRole: return "MissingBandRole";
    case Errc::BandOutOfRange: return "BandOutOfRange";
    case Errc::MultiBandInput: return "MultiBandInput";
    case Errc::NonBinaryInput: return "NonBinaryInput";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::EmptyList: return "EmptyList";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::PairCountMismatch: return "PairCountMismatch";
    case Errc::ConditionBandMissing: return "ConditionBandMissing";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DegenerateRange: return "DegenerateRange";
    case Errc::InsufficientBins: return "InsufficientBins";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::TooShort: return "TooShort";
    case Errc::PeriodTooLong: return "PeriodTooLong";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::ZeroMean: return "ZeroMean";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::ZeroBase: return "ZeroBase";
    case Errc::UnsupportedTask: return "UnsupportedTask";
    case Errc::EndpointUnreachable: return "EndpointUnreachable";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::SchemaError: return "SchemaError";
    case Errc::Internal: return "Internal";
    case Errc::MalformedModelOutput: return "MalformedModelOutput";
    case Errc::PolicyUnreachable: return "PolicyUnreachable";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingAnswer: return "MissingAnswer";
    }
    return "Unknown";
}

} // namespace geoagent
