#include "cdtrade/error.hpp"

namespace cdtrade {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Unreadable: return "Unreadable";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::DuplicateDate: return "DuplicateDate";
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::EmptyPanel: return "EmptyPanel";
        case ErrorCode::PanelTooShort: return "PanelTooShort";
        case ErrorCode::UnknownTicker: return "UnknownTicker";
        case ErrorCode::TickerMismatch: return "TickerMismatch";
        case ErrorCode::TooFewTickers: return "TooFewTickers";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EndOfData: return "EndOfData";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SingularDesign: return "SingularDesign";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::NonStationary: return "NonStationary";
        case ErrorCode::Domain: return "Domain";
        case ErrorCode::Network: return "Network";
        case ErrorCode::MalformedResponse: return "MalformedResponse";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::MemoryLimit: return "MemoryLimit";
    }
    return "Unknown";
}

bool is_data_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Unreadable:
        case ErrorCode::MalformedRow:
        case ErrorCode::DuplicateDate:
        case ErrorCode::NonPositivePrice:
        case ErrorCode::EmptyPanel:
        case ErrorCode::PanelTooShort:
        case ErrorCode::UnknownTicker:
        case ErrorCode::TickerMismatch:
        case ErrorCode::TooFewTickers:
        case ErrorCode::LengthMismatch:
        case ErrorCode::EndOfData:
        case ErrorCode::InvalidArgument:
        case ErrorCode::MalformedResponse:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace cdtrade
