#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace molecuforge {

enum class ErrorCode {
    UnknownElement,
    NoSuchAtom,
    NoSuchSlot,
    NoSuchBond,
    UnsupportedValency,
    NotBonded,
    DegeneratePositions,
    SlotOccupied,
    SameComponent,
    AtomGrabbed,
    AlreadyGrabbing,
    AnchorGrabbed,
    NoActiveGrab,
    NoFreeSlot,
    AlreadyBonded,
    SelfBond,
    BondInCycle,
    NotAnEndpoint,
    InvalidWorkspace,
    ParseError,
    SchemaError,
    ConsistencyError,
    UnknownCommand,
    BadArguments,
    FileNotFound,
    IoError,
    BindError,
};

/// Wire name of an error code, e.g. "NoFreeSlot".
std::string_view error_code_name(ErrorCode code);

/// Every engine failure is reported as an Error carrying a stable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace molecuforge
