#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdtrade {

enum class ErrorCode {
    Unreadable,
    MalformedRow,
    DuplicateDate,
    NonPositivePrice,
    EmptyPanel,
    PanelTooShort,
    UnknownTicker,
    TickerMismatch,
    TooFewTickers,
    LengthMismatch,
    EndOfData,
    InvalidArgument,
    SingularDesign,
    NonFinite,
    InsufficientSamples,
    NonStationary,
    Domain,
    Network,
    MalformedResponse,
    Timeout,
    MemoryLimit,
};

std::string_view to_string(ErrorCode code) noexcept;

// Data errors are problems with the inputs (exit code 2); the rest are
// numeric or resource failures (exit code 3).
bool is_data_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cdtrade
